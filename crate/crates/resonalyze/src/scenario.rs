//! Scenario files: a single self-contained description of a forcing, an
//! oscillator, and what to do with them. JSON is the primary format; TOML
//! is accepted as sugar. Exact quantities (periods, frequencies) are
//! ScaledReal text like "2*pi" or "1/2"; see the README for the schema.

use crate::error::{Error, Result};
use crate::exactnum::ScaledReal;
use crate::forcing::{ForcingSegment, ForcingTerm, PeriodicForcing, Trig, TrigKind};
use crate::modal::{ModeForcing, WaveProblem};
use crate::oscillator::OscillatorConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Scenario {
    pub forcing: ForcingSpec,
    /// natural frequency, ScaledReal text ("1/2*pi")
    pub omega0: String,
    /// [x0, x1]
    #[serde(default)]
    pub initial: [f64; 2],
    #[serde(default)]
    pub damping: f64,
    #[serde(default)]
    pub time: TimeSpec,
    #[serde(default)]
    pub classifier: ClassifierSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laplace: Option<LaplaceGridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave: Option<WaveSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForcingSpec {
    Builtin(BuiltinSpec),
    Piecewise(PiecewiseSpec),
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_kind() -> TrigKind {
    TrigKind::Sin
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinSpec {
    /// A0 trig(omega t + phase)
    Sinusoid {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        omega: String,
        #[serde(default = "default_kind")]
        kind: TrigKind,
        #[serde(default)]
        phase: f64,
    },
    /// odd unit triangle wave of the given period
    Triangle { period: String },
    /// 1 on the outer quarters of the period, 0 between
    StepSymmetric { period: String },
    /// |sin(2 pi t / t0)|, period t0/2
    RectAbs { t0: String },
    /// max(sin(2 pi t / t0), 0), period t0
    RectHalf { t0: String },
    /// two-level step on the unit interval with vanishing first-mode projections
    CancellationStep { amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    pub period: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub segments: Vec<SegmentSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub poly: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<Trig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl Default for TimeSpec {
    fn default() -> Self {
        TimeSpec { t0: 0.0, t1: 50.0, samples: 1001 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ClassifierSpec {
    pub q_tol: f64,
    pub strict_minimality: bool,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec { q_tol: 1e-9, strict_minimality: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Ok(Vec::new());
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        if !(self.end > self.start) {
            return Err(Error::InvalidArgument("grid needs end > start for count > 1".into()));
        }
        let h = (self.end - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| if i + 1 == self.count { self.end } else { self.start + i as f64 * h })
            .collect())
    }
}

fn default_im_grid() -> GridSpec {
    GridSpec { start: 0.0, end: 0.0, count: 1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplaceGridSpec {
    pub re: GridSpec,
    #[serde(default = "default_im_grid")]
    pub im: GridSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// sweep the natural frequency
    Omega0,
    /// sweep the forcing frequency (sinusoid builtins only)
    Omega,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    /// ScaledReal texts so exact values like "1/2*pi" are hit exactly
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct WaveSpec {
    pub length: String,
    pub wave_speed: String,
    pub mode_count: u32,
    pub forcing: Vec<WaveForcingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveForcingSpec {
    pub mode: u32,
    pub coefficient: f64,
    pub profile: ForcingSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisSpec {
    /// interior sample positions
    pub x: Vec<f64>,
    /// modes to include in the truncated sum
    pub modes: Vec<u32>,
}

fn parse_scaled(text: &str, what: &str) -> Result<ScaledReal> {
    ScaledReal::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("{what}: {e}")))
}

pub fn build_forcing(spec: &ForcingSpec) -> Result<PeriodicForcing> {
    match spec {
        ForcingSpec::Builtin(b) => match b {
            BuiltinSpec::Sinusoid { amplitude, omega, kind, phase } => {
                let omega = parse_scaled(omega, "forcing.params.omega")?;
                PeriodicForcing::sinusoid(*amplitude, &omega, *kind, *phase)
            }
            BuiltinSpec::Triangle { period } => {
                PeriodicForcing::triangle(&parse_scaled(period, "forcing.params.period")?)
            }
            BuiltinSpec::StepSymmetric { period } => {
                PeriodicForcing::step_symmetric(&parse_scaled(period, "forcing.params.period")?)
            }
            BuiltinSpec::RectAbs { t0 } => {
                PeriodicForcing::rect_abs(&parse_scaled(t0, "forcing.params.t0")?)
            }
            BuiltinSpec::RectHalf { t0 } => {
                PeriodicForcing::rect_half(&parse_scaled(t0, "forcing.params.t0")?)
            }
            BuiltinSpec::CancellationStep { amplitude } => {
                PeriodicForcing::cancellation_step(*amplitude)
            }
        },
        ForcingSpec::Piecewise(p) => {
            let period = parse_scaled(&p.period, "forcing.period")?;
            let mut segments = Vec::with_capacity(p.segments.len());
            for s in &p.segments {
                let terms = s
                    .terms
                    .iter()
                    .map(|t| ForcingTerm::new(t.poly.clone(), t.trig))
                    .collect::<Result<Vec<_>>>()?;
                segments.push(ForcingSegment::new(s.start, s.end, terms)?);
            }
            let name = p.name.clone().unwrap_or_else(|| "piecewise".into());
            PeriodicForcing::new(name, period, segments)
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("scenario JSON: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("scenario TOML: {e}")))
    }

    /// Parse by extension (.toml vs everything-else-is-JSON).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        if path.extension().and_then(|e| e.to_str()) == Some("toml") {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn forcing(&self) -> Result<PeriodicForcing> {
        build_forcing(&self.forcing)
    }

    pub fn omega0(&self) -> Result<ScaledReal> {
        parse_scaled(&self.omega0, "omega0")
    }

    pub fn oscillator_config(&self) -> Result<OscillatorConfig> {
        OscillatorConfig::new(self.omega0()?, self.initial[0], self.initial[1], self.damping)
    }

    pub fn wave_problem(&self) -> Result<WaveProblem> {
        let wave = self
            .wave
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("scenario has no wave section".into()))?;
        let forcing = wave
            .forcing
            .iter()
            .map(|mf| {
                Ok(ModeForcing {
                    mode: mf.mode,
                    coefficient: mf.coefficient,
                    profile: build_forcing(&mf.profile)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        WaveProblem::new(
            parse_scaled(&wave.length, "wave.length")?,
            parse_scaled(&wave.wave_speed, "wave.waveSpeed")?,
            wave.mode_count,
            forcing,
        )
    }
}
