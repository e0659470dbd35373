//! Exact evaluation of the undamped forced oscillator.
//!
//! The solution with zero Cauchy data is the variation-of-parameters
//! (Duhamel) formula
//!
//!   x(t) = sin(w0 t)/w0 * int_0^t f cos(w0 s) ds
//!        - cos(w0 t)/w0 * int_0^t f sin(w0 s) ds,
//!
//! plus x0 cos(w0 t) + (x1/w0) sin(w0 t) for general initial data. The
//! fast path splits t = n T2 + r, rewrites each whole-period integral as the
//! one-period integral rotated by the accumulated phase 2 pi k alpha, and
//! sums the rotations in closed form: exact cycle arithmetic when alpha is
//! rational, the trigonometric partial-sum identities when it is not. Cost
//! is independent of n.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::exactnum::{ratio_kind, RatioClass, ScaledReal};
use crate::forcing::{PeriodicForcing, TrigKind};
use crate::quadrature::{segment_trig_integral, PrefixTable};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Clone, Debug)]
pub struct OscillatorConfig {
    pub omega0: ScaledReal,
    pub x0: f64,
    pub x1: f64,
    pub damping: f64,
}

impl OscillatorConfig {
    pub fn new(omega0: ScaledReal, x0: f64, x1: f64, damping: f64) -> Result<Self> {
        if !omega0.is_positive() {
            return Err(Error::InvalidArgument("omega0 must be positive".into()));
        }
        if damping < 0.0 || !damping.is_finite() {
            return Err(Error::InvalidArgument("damping must be finite and >= 0".into()));
        }
        if !x0.is_finite() || !x1.is_finite() {
            return Err(Error::InvalidArgument("initial conditions must be finite".into()));
        }
        Ok(OscillatorConfig { omega0, x0, x1, damping })
    }

    pub fn undamped(omega0: ScaledReal, x0: f64, x1: f64) -> Result<Self> {
        Self::new(omega0, x0, x1, 0.0)
    }
}

/// Per-period phase bookkeeping for the fast path.
enum AlphaPhase {
    /// alpha = m/n in lowest terms; all phase arithmetic is exact integer
    /// arithmetic mod 2n.
    Rational { m: u64, n: u64 },
    /// alpha as a double-double; phases stay accurate to ~1e-26 rad at
    /// a million periods.
    Irrational { alpha: Dd },
}

pub struct DuhamelSolver {
    forcing: PeriodicForcing,
    omega0_f: f64,
    x0: f64,
    x1: f64,
    table: PrefixTable,
    t2_f: f64,
    alpha_class: RatioClass,
    alpha: AlphaPhase,
}

struct TimeParts {
    /// remainder in [0, T2)
    r: f64,
    /// 2 pi n alpha mod 2 pi
    theta: f64,
    /// sum_{k<n} cos(2 pi k alpha), sin(...)
    cos_sum: f64,
    sin_sum: f64,
}

impl DuhamelSolver {
    pub fn new(forcing: PeriodicForcing, cfg: &OscillatorConfig) -> Result<Self> {
        if cfg.damping != 0.0 {
            return Err(Error::UnsupportedCombination(
                "the Duhamel solver handles the undamped equation; use the damped solver".into(),
            ));
        }
        if !cfg.omega0.is_positive() {
            return Err(Error::InvalidArgument("omega0 must be positive".into()));
        }
        let t1 = ScaledReal::two_pi().div(&cfg.omega0)?;
        let alpha_class = ratio_kind(forcing.period(), &t1)?;
        let alpha = match &alpha_class {
            RatioClass::Rational { numer, denom } => AlphaPhase::Rational { m: *numer, n: *denom },
            RatioClass::Irrational => AlphaPhase::Irrational {
                alpha: forcing.period().div(&t1)?.to_dd(),
            },
        };
        let omega0_f = cfg.omega0.to_f64();
        let table = PrefixTable::build(&forcing, omega0_f)?;
        let t2_f = forcing.period_f64();
        Ok(DuhamelSolver {
            forcing,
            omega0_f,
            x0: cfg.x0,
            x1: cfg.x1,
            table,
            t2_f,
            alpha_class,
            alpha,
        })
    }

    pub fn forcing(&self) -> &PeriodicForcing {
        &self.forcing
    }

    pub fn omega0(&self) -> f64 {
        self.omega0_f
    }

    pub fn alpha(&self) -> &RatioClass {
        &self.alpha_class
    }

    pub fn prefix_table(&self) -> &PrefixTable {
        &self.table
    }

    /// t = n T2 + r with 0 <= r < T2. Exact rational splitting when the
    /// period has no pi factor, double-double otherwise.
    fn split_time(&self, t: f64) -> (u64, f64) {
        let t = t.max(0.0);
        if t < self.t2_f {
            return (0, t);
        }
        let period = self.forcing.period();
        let (n, r) = if period.pi_exp() == 0 {
            match BigRational::from_float(t) {
                Some(t_rat) => {
                    let q = (&t_rat / period.coeff()).floor();
                    let n = q.to_integer().to_u64().unwrap_or(u64::MAX >> 1);
                    let r = (t_rat - q * period.coeff()).to_f64().unwrap_or(0.0);
                    (n, r)
                }
                None => (0, 0.0),
            }
        } else {
            let t_dd = Dd::from_f64(t);
            let period_dd = period.to_dd();
            let q = t_dd.div(period_dd).floor();
            let n = q.to_f64().max(0.0) as u64;
            let r = t_dd.sub(period_dd.mul_f64(n as f64)).to_f64();
            (n, r)
        };
        (n, r.clamp(0.0, self.t2_f))
    }

    /// Angle pi * (m k mod 2n) / n, the exact reduction of pi k m / n.
    fn rational_angle(m: u64, n: u64, k: u64) -> f64 {
        let modulus = 2 * n as u128;
        let rem = (m as u128 * k as u128) % modulus;
        std::f64::consts::PI * (rem as f64) / (n as f64)
    }

    /// Angle pi * ((k alpha) mod 2) for irrational alpha, via double-double.
    fn irrational_angle(alpha: Dd, k: f64) -> f64 {
        let v = alpha.mul_f64(k);
        let q = v.mul_f64(0.5).floor();
        let m2 = v.sub(q.mul_f64(2.0));
        std::f64::consts::PI * m2.to_f64()
    }

    fn parts(&self, t: f64) -> TimeParts {
        let (n, r) = self.split_time(t);
        let (theta, cos_sum, sin_sum) = match &self.alpha {
            AlphaPhase::Rational { m, n: den } => {
                // theta = 2 pi n alpha mod 2 pi, reduced in exact integers
                let rem = (*m as u128 * n as u128) % (*den as u128);
                let theta = TAU * (rem as f64) / (*den as f64);
                if *den == 1 {
                    (0.0, n as f64, 0.0)
                } else {
                    // Dirichlet-style closed forms with exact angle reduction:
                    // sum_{k=0}^{n-1} cos(k w) = cos(w(n-1)/2) sin(wn/2) / sin(w/2)
                    if n == 0 {
                        (theta, 0.0, 0.0)
                    } else {
                        let half_prev = Self::rational_angle(*m, *den, n - 1);
                        let half_n = Self::rational_angle(*m, *den, n);
                        let half_one = Self::rational_angle(*m, *den, 1);
                        let denom = half_one.sin();
                        let cos_sum = half_prev.cos() * half_n.sin() / denom;
                        let sin_sum = half_prev.sin() * half_n.sin() / denom;
                        (theta, cos_sum, sin_sum)
                    }
                }
            }
            AlphaPhase::Irrational { alpha } => {
                let theta_half = Self::irrational_angle(*alpha, n as f64);
                let theta = 2.0 * theta_half;
                if n == 0 {
                    (theta, 0.0, 0.0)
                } else {
                    let half_prev = Self::irrational_angle(*alpha, (n - 1) as f64);
                    let half_one = Self::irrational_angle(*alpha, 1.0);
                    let denom = half_one.sin();
                    let cos_sum = half_prev.cos() * theta_half.sin() / denom;
                    let sin_sum = half_prev.sin() * theta_half.sin() / denom;
                    (theta, cos_sum, sin_sum)
                }
            }
        };
        TimeParts { r, theta, cos_sum, sin_sum }
    }

    /// (I_c(t), I_s(t)) = (int_0^t f cos(w0 s) ds, int_0^t f sin(w0 s) ds)
    /// in O(1) with respect to the period count.
    pub fn duhamel_integrals(&self, t: f64) -> (f64, f64) {
        let p = self.parts(t);
        self.integrals_from_parts(&p)
    }

    fn integrals_from_parts(&self, p: &TimeParts) -> (f64, f64) {
        let (p_c, p_s) = self.table.per_period();
        let (r_c, r_s) = self.table.partial(p.r);
        let (sin_t, cos_t) = p.theta.sin_cos();
        let i_c = p.cos_sum * p_c - p.sin_sum * p_s + cos_t * r_c - sin_t * r_s;
        let i_s = p.cos_sum * p_s + p.sin_sum * p_c + cos_t * r_s + sin_t * r_c;
        (i_c, i_s)
    }

    fn assemble(&self, sin_t: f64, cos_t: f64, i_c: f64, i_s: f64) -> (f64, f64) {
        let w = self.omega0_f;
        let x = self.x0 * cos_t + self.x1 / w * sin_t + (sin_t * i_c - cos_t * i_s) / w;
        // the f(t) terms of d/dt cancel; only the integral terms survive
        let xdot = -self.x0 * w * sin_t + self.x1 * cos_t + cos_t * i_c + sin_t * i_s;
        (x, xdot)
    }

    /// Exact (x, xdot) at any t >= 0, O(1) in the number of elapsed periods.
    pub fn solve_at(&self, t: f64) -> (f64, f64) {
        let p = self.parts(t);
        let (i_c, i_s) = self.integrals_from_parts(&p);
        // w0 t = theta + w0 r (mod 2 pi), so large-t phases stay exact
        let phase = p.theta + self.omega0_f * p.r;
        let (sin_t, cos_t) = phase.sin_cos();
        self.assemble(sin_t, cos_t, i_c, i_s)
    }

    /// Reference path: integrate every period segment by segment. O(t/T2);
    /// kept as the independent oracle for the fast path.
    pub fn solve_at_direct(&self, t: f64) -> (f64, f64) {
        let (n, r) = self.split_time(t);
        let w = self.omega0_f;
        let mut i_c = 0.0;
        let mut i_s = 0.0;
        for k in 0..n {
            let carrier = w * self.t2_f * k as f64;
            for seg in self.forcing.segments() {
                i_c += segment_trig_integral(seg, w, TrigKind::Cos, carrier, seg.start, seg.end);
                i_s += segment_trig_integral(seg, w, TrigKind::Sin, carrier, seg.start, seg.end);
            }
        }
        let carrier = w * self.t2_f * n as f64;
        for seg in self.forcing.segments() {
            if seg.start >= r {
                break;
            }
            let hi = r.min(seg.end);
            i_c += segment_trig_integral(seg, w, TrigKind::Cos, carrier, seg.start, hi);
            i_s += segment_trig_integral(seg, w, TrigKind::Sin, carrier, seg.start, hi);
        }
        let (sin_t, cos_t) = (w * t).sin_cos();
        self.assemble(sin_t, cos_t, i_c, i_s)
    }
}

// ---- trajectories -------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
    pub f: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionMethod {
    #[serde(rename = "exact-duhamel")]
    ExactDuhamel,
    #[serde(rename = "damped-closed-form")]
    DampedClosedForm,
}

/// Sampled (t, x, xdot, f) records with the generating configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub method: SolutionMethod,
    pub forcing: String,
    pub omega0: f64,
    pub x0: f64,
    pub x1: f64,
    pub damping: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    /// CSV with full round-trip float precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,xdot,f\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", s.t, s.x, s.xdot, s.f));
        }
        out
    }

    /// Uniform grid spacing, if the grid is uniform to 1e-9 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.samples.len() < 2 {
            return None;
        }
        let h = self.samples[1].t - self.samples[0].t;
        for w in self.samples.windows(2) {
            if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.abs().max(1e-300) {
                return None;
            }
        }
        Some(h)
    }

    pub fn sup_x(&self) -> f64 {
        self.samples.iter().map(|s| s.x.abs()).fold(0.0, f64::max)
    }
}

/// Sample the solution on a uniform grid. Undamped configurations use the
/// exact Duhamel evaluation; damped ones require a pure sinusoidal forcing
/// and use the closed-form regimes.
pub fn sample(
    forcing: &PeriodicForcing,
    cfg: &OscillatorConfig,
    t0: f64,
    t1: f64,
    count: usize,
) -> Result<Trajectory> {
    if !(t0 >= 0.0 && t1 > t0) || count < 2 {
        return Err(Error::InvalidArgument(
            "sampling needs 0 <= t0 < t1 and at least two samples".into(),
        ));
    }
    let h = (t1 - t0) / (count - 1) as f64;
    let mut samples = Vec::with_capacity(count);
    let method;
    if cfg.damping == 0.0 {
        let solver = DuhamelSolver::new(forcing.clone(), cfg)?;
        method = SolutionMethod::ExactDuhamel;
        for i in 0..count {
            let t = if i + 1 == count { t1 } else { t0 + i as f64 * h };
            let (x, xdot) = solver.solve_at(t);
            samples.push(Sample { t, x, xdot, f: forcing.evaluate(t) });
        }
    } else {
        let solver = crate::damped::DampedSolver::new(forcing, cfg)?;
        method = SolutionMethod::DampedClosedForm;
        for i in 0..count {
            let t = if i + 1 == count { t1 } else { t0 + i as f64 * h };
            let (x, xdot) = solver.solve_at(t);
            samples.push(Sample { t, x, xdot, f: forcing.evaluate(t) });
        }
    }
    Ok(Trajectory {
        method,
        forcing: forcing.name().to_string(),
        omega0: cfg.omega0.to_f64(),
        x0: cfg.x0,
        x1: cfg.x1,
        damping: cfg.damping,
        samples,
    })
}

// ---- beats --------------------------------------------------------------

/// Amplitude-modulation view of the zero-data response to A0 cos(w t) with
/// w near (but not equal to) w0:
///   x(t) = 2 A0/(w0^2 - w^2) sin((w0-w)t/2) sin((w0+w)t/2).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BeatDescriptor {
    pub envelope_amplitude: f64,
    pub modulation_freq: f64,
    pub carrier_freq: f64,
}

pub fn beat_descriptor(a0: f64, omega: f64, omega0: f64) -> Result<BeatDescriptor> {
    if !(omega > 0.0 && omega0 > 0.0) {
        return Err(Error::InvalidArgument("beat frequencies must be positive".into()));
    }
    if omega == omega0 {
        return Err(Error::InvalidArgument(
            "equal forcing and natural frequencies are the resonant case; no beat exists".into(),
        ));
    }
    if a0 < 0.0 {
        return Err(Error::InvalidArgument("amplitude must be >= 0".into()));
    }
    Ok(BeatDescriptor {
        envelope_amplitude: 2.0 * a0 / (omega0 * omega0 - omega * omega).abs(),
        modulation_freq: (omega0 - omega).abs() / 2.0,
        carrier_freq: (omega0 + omega) / 2.0,
    })
}
