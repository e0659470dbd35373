//! Modal reduction of the forced 1D wave equation with Dirichlet ends.
//!
//! With eigenfunctions phi_j(x) = sqrt(2/L) sin(j pi x / L) of -d^2/dx^2 on
//! (0, L) and forcing given directly in the eigenbasis, each mode is an
//! independent oscillator g_j'' + (c j pi / L)^2 g_j = c_j f_j(t); the
//! classifier runs per mode and truncated solutions are reassembled as
//! w(x, t) = sum phi_j(x) g_j(t). Truncated sums only; no convergence
//! claims are made for the full series.

use crate::classifier::{classify, Classification, ClassifyOptions};
use crate::error::{Error, Result};
use crate::exactnum::ScaledReal;
use crate::forcing::PeriodicForcing;
use crate::oscillator::{DuhamelSolver, OscillatorConfig};

/// One forced mode: coefficient times a time profile, in the eigenbasis.
#[derive(Clone, Debug)]
pub struct ModeForcing {
    pub mode: u32,
    pub coefficient: f64,
    pub profile: PeriodicForcing,
}

#[derive(Clone, Debug)]
pub struct WaveProblem {
    pub length: ScaledReal,
    pub wave_speed: ScaledReal,
    pub mode_count: u32,
    pub forcing: Vec<ModeForcing>,
}

impl WaveProblem {
    pub fn new(
        length: ScaledReal,
        wave_speed: ScaledReal,
        mode_count: u32,
        forcing: Vec<ModeForcing>,
    ) -> Result<Self> {
        if !length.is_positive() || !wave_speed.is_positive() {
            return Err(Error::InvalidArgument("length and wave speed must be positive".into()));
        }
        if mode_count == 0 {
            return Err(Error::InvalidArgument("mode count must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for mf in &forcing {
            if mf.mode == 0 || mf.mode > mode_count {
                return Err(Error::InvalidArgument(format!(
                    "forced mode {} outside 1..={mode_count}",
                    mf.mode
                )));
            }
            if !seen.insert(mf.mode) {
                return Err(Error::InvalidArgument(format!(
                    "mode {} is forced more than once",
                    mf.mode
                )));
            }
            if !mf.coefficient.is_finite() {
                return Err(Error::InvalidArgument("mode coefficient must be finite".into()));
            }
        }
        Ok(WaveProblem { length, wave_speed, mode_count, forcing })
    }

    /// omega_j = c j pi / L, exact.
    pub fn mode_frequency(&self, mode: u32) -> Result<ScaledReal> {
        self.wave_speed
            .mul(&ScaledReal::new(mode as i64, 1, 1)?)
            .div(&self.length)
    }

    /// phi_j(x) = sqrt(2/L) sin(j pi x / L).
    pub fn eigenfunction(&self, mode: u32, x: f64) -> f64 {
        let l = self.length.to_f64();
        (2.0 / l).sqrt() * (mode as f64 * std::f64::consts::PI * x / l).sin()
    }
}

/// The decoupled per-mode oscillators: (j, omega_j, f_j). Modes with zero
/// coefficient (or no forcing entry) are omitted.
pub fn modal_reduce(p: &WaveProblem) -> Result<Vec<(u32, ScaledReal, PeriodicForcing)>> {
    let mut out = Vec::new();
    for mf in &p.forcing {
        if mf.coefficient == 0.0 {
            continue;
        }
        let omega = p.mode_frequency(mf.mode)?;
        let f_j = mf.profile.scale(mf.coefficient)?;
        out.push((mf.mode, omega, f_j));
    }
    out.sort_by_key(|(j, _, _)| *j);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ModeReport {
    pub mode: u32,
    pub omega: f64,
    pub classification: Classification,
}

impl ModeReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "omega": self.omega,
            "classification": self.classification.to_json(),
        })
    }
}

/// Classifier verdict per forced mode.
pub fn classify_modes(p: &WaveProblem, opts: &ClassifyOptions) -> Result<Vec<ModeReport>> {
    modal_reduce(p)?
        .into_iter()
        .map(|(mode, omega, f_j)| {
            let classification = classify(&f_j, &omega, opts)?;
            Ok(ModeReport { mode, omega: omega.to_f64(), classification })
        })
        .collect()
}

/// Truncated synthesis w(x, t) over a subset of modes, with per-mode exact
/// solvers built once.
pub struct WaveSolver {
    problem: WaveProblem,
    modes: Vec<(u32, DuhamelSolver)>,
}

impl WaveSolver {
    /// Zero initial data in every mode.
    pub fn new(problem: WaveProblem) -> Result<Self> {
        let mut modes = Vec::new();
        for (mode, omega, f_j) in modal_reduce(&problem)? {
            let cfg = OscillatorConfig::undamped(omega, 0.0, 0.0)?;
            modes.push((mode, DuhamelSolver::new(f_j, &cfg)?));
        }
        Ok(WaveSolver { problem, modes })
    }

    pub fn problem(&self) -> &WaveProblem {
        &self.problem
    }

    /// w(x, t) = sum over the subset of phi_j(x) g_j(t). An empty subset
    /// gives 0; modes in the subset that carry no forcing contribute 0.
    pub fn synthesize(&self, x: f64, t: f64, mode_subset: &[u32]) -> Result<f64> {
        let l = self.problem.length.to_f64();
        if !(0.0..=l).contains(&x) || t < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "synthesis point (x, t) = ({x}, {t}) outside [0, {l}] x [0, inf)"
            )));
        }
        let mut w = 0.0;
        for (mode, solver) in &self.modes {
            if !mode_subset.contains(mode) {
                continue;
            }
            let (g, _) = solver.solve_at(t);
            w += self.problem.eigenfunction(*mode, x) * g;
        }
        Ok(w)
    }
}
