//! Subcommand implementations behind the `resonalyze` binary.
//!
//! Exit codes: 0 success, 2 invalid input (files, schema, arguments),
//! 3 numeric failure. Byte-identical outputs for identical scenarios.

use crate::analysis;
use crate::classifier::{classify, resonance_witness, Classification, ClassifyOptions};
use crate::error::{Error, Result};
use crate::exactnum::ScaledReal;
use crate::forcing::PeriodicForcing;
use crate::laplace;
use crate::modal::{classify_modes, WaveSolver};
use crate::oscillator::{sample, OscillatorConfig};
use crate::quadrature::project;
use crate::scenario::{
    BuiltinSpec, ForcingSpec, OutputFormat, Scenario, SweepParam, SynthesisSpec,
};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "resonalyze",
    version,
    about = "Classify and evaluate harmonic-oscillator responses to periodic forcing"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the response class (bounded / periodic / resonant) and report
    /// periods, projections, bounds, and growth
    Classify(CommonArgs),
    /// Sample the exact solution trajectory
    Simulate(CommonArgs),
    /// Inner products (Q1, Q2) of the forcing with the fundamental sinusoids
    Project(ProjectArgs),
    /// Transform data F(s), X(s) over an s-grid
    Laplace(CommonArgs),
    /// Per-mode wave-equation classification and optional synthesis grid
    Modal(CommonArgs),
    /// Classification sweep over a parameter grid
    Sweep(CommonArgs),
    /// Recompute the built-in reference table and verify every value
    Repro,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (JSON, or TOML by .toml extension)
    #[arg(long)]
    scenario: PathBuf,
    /// Output path (default: the scenario's outputs.path, else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: the scenario's outputs.format, else
    /// subcommand-specific)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Override the classifier zero-test tolerance
    #[arg(long)]
    qtol: Option<f64>,
    /// Verify the declared minimal period before classifying
    #[arg(long)]
    strict_minimality: bool,
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Projection horizon; defaults to the classification's T3
    #[arg(long)]
    t3: Option<f64>,
}

impl CommonArgs {
    fn load(&self) -> Result<Scenario> {
        Scenario::load(&self.scenario)
    }

    fn classify_options(&self, sc: &Scenario) -> ClassifyOptions {
        ClassifyOptions {
            q_tol: self.qtol.unwrap_or(sc.classifier.q_tol),
            strict_minimality: self.strict_minimality || sc.classifier.strict_minimality,
            ..ClassifyOptions::default()
        }
    }

    fn format(&self, sc: &Scenario, default: OutputFormat) -> OutputFormat {
        self.format.or(sc.outputs.format).unwrap_or(default)
    }

    fn write(&self, sc: &Scenario, text: &str) -> Result<()> {
        let path = self
            .out
            .clone()
            .or_else(|| sc.outputs.path.as_ref().map(PathBuf::from));
        match path {
            Some(p) => write_file(&p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// Entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify(args) => run_classify(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Project(args) => run_project(args),
        Command::Laplace(args) => run_laplace(args),
        Command::Modal(args) => run_modal(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Repro => run_repro(),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn classified(args: &CommonArgs) -> Result<(Scenario, PeriodicForcing, ScaledReal, Classification)> {
    let sc = args.load()?;
    if sc.damping != 0.0 {
        return Err(Error::InvalidArgument(
            "classification covers the undamped equation; set damping to 0".into(),
        ));
    }
    let f = sc.forcing()?;
    let omega0 = sc.omega0()?;
    let cls = classify(&f, &omega0, &args.classify_options(&sc))?;
    Ok((sc, f, omega0, cls))
}

fn run_classify(args: &CommonArgs) -> Result<()> {
    let (sc, _, _, cls) = classified(args)?;
    let text = format!("{:#}\n", cls.to_json());
    args.write(&sc, &text)
}

fn run_simulate(args: &CommonArgs) -> Result<()> {
    let sc = args.load()?;
    let f = sc.forcing()?;
    let cfg = sc.oscillator_config()?;
    let traj = sample(&f, &cfg, sc.time.t0, sc.time.t1, sc.time.samples)?;
    let text = match args.format(&sc, OutputFormat::Csv) {
        OutputFormat::Csv => traj.to_csv(),
        OutputFormat::Json => format!(
            "{:#}\n",
            serde_json::to_value(&traj)
                .map_err(|e| Error::InvalidArgument(format!("trajectory serialization: {e}")))?
        ),
    };
    args.write(&sc, &text)
}

fn run_project(args: &ProjectArgs) -> Result<()> {
    let (sc, f, omega0, cls) = classified(&args.common)?;
    let t3 = args.t3.or(cls.t3).ok_or_else(|| {
        Error::InvalidArgument(
            "an irrational-ratio scenario has no coincident period; pass --t3".into(),
        )
    })?;
    let proj = project(&f, omega0.to_f64(), t3)?;
    let text = format!(
        "{:#}\n",
        serde_json::to_value(proj)
            .map_err(|e| Error::InvalidArgument(format!("projection serialization: {e}")))?
    );
    args.common.write(&sc, &text)
}

fn run_laplace(args: &CommonArgs) -> Result<()> {
    let sc = args.load()?;
    let f = sc.forcing()?;
    let omega0 = sc.omega0()?.to_f64();
    let grid = sc
        .laplace
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("scenario has no laplace grid section".into()))?;
    let re_pts = grid.re.points()?;
    let im_pts = grid.im.points()?;
    let mut out = String::from("re_s,im_s,re_F,im_F,re_X,im_X\n");
    for &re in &re_pts {
        for &im in &im_pts {
            let s = Complex64::new(re, im);
            let f_val = laplace::periodic_transform(&f, s)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let x_val = laplace::solution_transform(&f, omega0, s)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                re, im, f_val.re, f_val.im, x_val.re, x_val.im
            ));
        }
    }
    args.write(&sc, &out)
}

fn run_modal(args: &CommonArgs) -> Result<()> {
    let sc = args.load()?;
    let problem = sc.wave_problem()?;
    match args.format(&sc, OutputFormat::Json) {
        OutputFormat::Json => {
            let reports = classify_modes(&problem, &args.classify_options(&sc))?;
            let json: Vec<_> = reports.iter().map(|r| r.to_json()).collect();
            let text = format!("{:#}\n", serde_json::Value::Array(json));
            args.write(&sc, &text)
        }
        OutputFormat::Csv => {
            let synthesis: &SynthesisSpec =
                sc.wave.as_ref().and_then(|w| w.synthesis.as_ref()).ok_or_else(|| {
                    Error::InvalidArgument(
                        "csv output needs a wave.synthesis section (x positions and modes)".into(),
                    )
                })?;
            let solver = WaveSolver::new(problem)?;
            let count = sc.time.samples.max(2);
            let h = (sc.time.t1 - sc.time.t0) / (count - 1) as f64;
            if !(sc.time.t1 > sc.time.t0) {
                return Err(Error::InvalidArgument("time.t1 must exceed time.t0".into()));
            }
            let mut out = String::from("x,t,w\n");
            for &x in &synthesis.x {
                for i in 0..count {
                    let t = if i + 1 == count { sc.time.t1 } else { sc.time.t0 + i as f64 * h };
                    let w = solver.synthesize(x, t, &synthesis.modes)?;
                    out.push_str(&format!("{},{},{}\n", x, t, w));
                }
            }
            args.write(&sc, &out)
        }
    }
}

fn sweep_row(
    text: &str,
    sc: &Scenario,
    opts: &ClassifyOptions,
    param: SweepParam,
) -> Result<String> {
    let value: ScaledReal = text
        .parse()
        .map_err(|e| Error::InvalidArgument(format!("sweep value {text:?}: {e}")))?;
    let (f, omega0) = match param {
        SweepParam::Omega0 => (sc.forcing()?, value),
        SweepParam::Omega => {
            let rebuilt = match &sc.forcing {
                ForcingSpec::Builtin(BuiltinSpec::Sinusoid { amplitude, kind, phase, .. }) => {
                    PeriodicForcing::sinusoid(*amplitude, &value, *kind, *phase)?
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "sweeping the forcing frequency requires a sinusoid builtin".into(),
                    ))
                }
            };
            (rebuilt, sc.omega0()?)
        }
    };
    let cls = classify(&f, &omega0, opts)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let bound_or_growth = match cls.case_id {
        1 | 2 => opt(cls.sup_bound),
        4 => opt(cls.growth_per_cycle),
        _ => String::new(),
    };
    Ok(format!(
        "{},{},{},{},{}\n",
        text,
        cls.case_id,
        opt(cls.q1),
        opt(cls.q2),
        bound_or_growth
    ))
}

fn run_sweep(args: &CommonArgs) -> Result<()> {
    let sc = args.load()?;
    let sweep = sc
        .sweep
        .clone()
        .ok_or_else(|| Error::InvalidArgument("scenario has no sweep section".into()))?;
    let opts = args.classify_options(&sc);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RESONALYZE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => builder = builder.num_threads(n),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "RESONALYZE_THREADS must be a positive integer, got {v:?}"
                )))
            }
        }
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    // rows computed in parallel but assembled in grid order
    let rows: Vec<Result<String>> = pool.install(|| {
        use rayon::prelude::*;
        sweep
            .values
            .par_iter()
            .map(|text| sweep_row(text, &sc, &opts, sweep.param))
            .collect()
    });
    let mut out = String::from("param,caseId,Q1,Q2,supBoundOrGrowth\n");
    for row in rows {
        out.push_str(&row?);
    }
    args.write(&sc, &out)
}

// ---- reproduction table -------------------------------------------------

struct ReproOutcome {
    failures: usize,
    lines: Vec<String>,
}

impl ReproOutcome {
    fn new() -> Self {
        ReproOutcome { failures: 0, lines: Vec::new() }
    }

    fn check(&mut self, item: &str, computed: f64, expected: f64, tol: f64) {
        let pass = (computed - expected).abs() <= tol;
        if !pass {
            self.failures += 1;
        }
        self.lines.push(format!(
            "{} | {item} | computed {computed:.12e} | expected {expected:.12e} | tol {tol:.1e}",
            if pass { "PASS" } else { "FAIL" },
        ));
    }

    fn check_case(&mut self, item: &str, computed: u8, expected: u8) {
        let pass = computed == expected;
        if !pass {
            self.failures += 1;
        }
        self.lines.push(format!(
            "{} | {item} | computed case {computed} | expected case {expected}",
            if pass { "PASS" } else { "FAIL" },
        ));
    }
}

/// Recompute every tabulated value and verdict of the reference table.
fn run_repro() -> Result<()> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let sr = |n: i64, d: i64, e: i32| ScaledReal::new(n, d, e).expect("static value");
    let opts = ClassifyOptions::default();
    let mut table = ReproOutcome::new();

    // projection values
    let tri4 = PeriodicForcing::triangle(&sr(4, 1, 0))?;
    let p4 = project(&tri4, FRAC_PI_2, 4.0)?;
    table.check("triangle T2=4, w0=pi/2: Q1 = 16/pi^2", p4.q1, 16.0 / (PI * PI), 1e-10);

    let tri6 = PeriodicForcing::triangle(&sr(6, 1, 0))?;
    let p6 = project(&tri6, PI, 6.0)?;
    table.check("triangle T2=6, w0=pi: Q1 = -8/(3 pi^2)", p6.q1, -8.0 / (3.0 * PI * PI), 1e-10);
    table.check("triangle T2=6, w0=pi: Q1 vs tabulated -0.27019", p6.q1, -0.27019, 5e-5);

    let f_sin3 = PeriodicForcing::sinusoid(1.0, &sr(1, 3, 1), crate::forcing::TrigKind::Sin, 0.0)?;
    let p_orth = project(&f_sin3, PI, 6.0)?;
    table.check("sin(pi t/3) vs sin(pi t) over [0,6]: orthogonality", p_orth.q1, 0.0, 1e-10);

    let fm = PeriodicForcing::cancellation_step(0.5)?;
    let pm = project(&fm, std::f64::consts::TAU, 1.0)?;
    table.check("cancellation step: (f, sin 2 pi t) = 0", pm.q1, 0.0, 1e-12);
    table.check("cancellation step: (f, cos 2 pi t) = 0", pm.q2, 0.0, 1e-12);

    let fs = PeriodicForcing::step_symmetric(&sr(2, 1, 0))?;
    let ps = project(&fs, PI, 2.0)?;
    table.check("symmetric step: (f, cos pi t) = 2/pi", ps.q2, 2.0 / PI, 1e-12);

    let fa = PeriodicForcing::rect_half(&sr(4, 1, 0))?;
    let pa = project(&fa, PI, 4.0)?;
    table.check("half-rectified sine: (f, cos pi t) = -4/(3 pi)", pa.q2, -4.0 / (3.0 * PI), 1e-12);

    // closed-form solutions
    let sin_t = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 0), crate::forcing::TrigKind::Sin, 0.0)?;
    let cfg = OscillatorConfig::undamped(sr(1, 1, 0), 0.0, 0.0)?;
    let solver = crate::oscillator::DuhamelSolver::new(sin_t, &cfg)?;
    let mut worst = 0.0_f64;
    for i in 0..=500 {
        let t = i as f64 * 0.1;
        let (x, _) = solver.solve_at(t);
        worst = worst.max((x - (0.5 * t.sin() - 0.5 * t * t.cos())).abs());
    }
    table.check("x'' + x = sin t: max deviation from (sin t - t cos t)/2", worst, 0.0, 1e-9);

    let sin_2t = PeriodicForcing::sinusoid(1.0, &sr(2, 1, 0), crate::forcing::TrigKind::Sin, 0.0)?;
    let solver2 = crate::oscillator::DuhamelSolver::new(sin_2t, &cfg)?;
    let mut worst2 = 0.0_f64;
    for i in 0..=500 {
        let t = i as f64 * 0.1;
        let (x, _) = solver2.solve_at(t);
        worst2 = worst2.max((x - (2.0 / 3.0 * t.sin() - (2.0 * t).sin() / 3.0)).abs());
    }
    table.check("x'' + x = sin 2t: max deviation from closed form", worst2, 0.0, 1e-9);

    // verdict table
    let verdicts: Vec<(&str, PeriodicForcing, ScaledReal, u8)> = vec![
        ("triangle T2=4, w0=pi/2", PeriodicForcing::triangle(&sr(4, 1, 0))?, sr(1, 2, 1), 4),
        ("triangle T2=2pi, w0=1/2", PeriodicForcing::triangle(&sr(2, 1, 1))?, sr(1, 2, 0), 2),
        ("triangle T2=6, w0=pi", PeriodicForcing::triangle(&sr(6, 1, 0))?, sr(1, 1, 1), 4),
        ("symmetric step T2=2, w0=pi", PeriodicForcing::step_symmetric(&sr(2, 1, 0))?, sr(1, 1, 1), 4),
        ("half-rectified T0=4, w0=pi", PeriodicForcing::rect_half(&sr(4, 1, 0))?, sr(1, 1, 1), 4),
        ("cancellation step, w0=2pi", PeriodicForcing::cancellation_step(0.5)?, sr(2, 1, 1), 3),
        (
            "sin(pi t), w0=1",
            PeriodicForcing::sinusoid(1.0, &sr(1, 1, 1), crate::forcing::TrigKind::Sin, 0.0)?,
            sr(1, 1, 0),
            1,
        ),
        ("|sin(2 pi t)|, w0=1", PeriodicForcing::rect_abs(&sr(1, 1, 0))?, sr(1, 1, 0), 1),
    ];
    for (name, f, w0, expected) in verdicts {
        let cls = classify(&f, &w0, &opts)?;
        table.check_case(name, cls.case_id, expected);
    }

    // resonance witness spot check: |x(t1(L))| > L by exact evaluation
    let tri = PeriodicForcing::triangle(&sr(4, 1, 0))?;
    let w0 = sr(1, 2, 1);
    let cls = classify(&tri, &w0, &opts)?;
    let t1 = resonance_witness(&tri, &w0, &cls, 10.0)?;
    let solver =
        crate::oscillator::DuhamelSolver::new(tri, &OscillatorConfig::undamped(w0, 0.0, 0.0)?)?;
    let (x_t1, _) = solver.solve_at(t1);
    table.check("witness t1(10) = 44 exceeds the level", (x_t1.abs() > 10.0) as u8 as f64, 1.0, 0.0);

    // growth slope via the sampled trajectory
    let traj = {
        let tri = PeriodicForcing::triangle(&sr(4, 1, 0))?;
        let cfg = OscillatorConfig::undamped(sr(1, 2, 1), 0.0, 0.0)?;
        sample(&tri, &cfg, 0.0, 120.0, 31)?
    };
    let slope = analysis::detect_growth(&traj)?;
    table.check(
        "resonant growth slope = -Q1/w0",
        slope,
        -(16.0 / (PI * PI)) / FRAC_PI_2,
        1e-8,
    );

    for line in &table.lines {
        println!("{line}");
    }
    println!(
        "{} checks, {} failed",
        table.lines.len(),
        table.failures
    );
    if table.failures > 0 {
        return Err(Error::AccuracyFailure {
            estimate: table.failures as f64,
            error_bound: table.lines.len() as f64,
        });
    }
    Ok(())
}
