//! Laplace-transform view of the forced oscillator.
//!
//! For periodic f the transform collapses to one period:
//!   F(s) = int_0^{T2} e^{-s t} f(t) dt / (1 - e^{-s T2}),
//! and the transformed solution is X(s) = F(s)/(s^2 + w0^2). Resonance is
//! read off the pole structure: when w0 T3 is a whole number of turns the
//! pole of 1/(1 - e^{-s T3}) lands on the pole of 1/(s^2 + w0^2), and the
//! response is resonant exactly when the one-period numerator
//! int_0^{T3} e^{-i w0 t} f dt = Q2 - i Q1 fails to vanish. No numerical
//! inversion is attempted.

use crate::error::{Error, Result};
use crate::forcing::PeriodicForcing;
use crate::quadrature::segment_exp_integral;
use num_complex::Complex64;

/// How close to a lattice/pole point a quotient is still formed.
const POLE_EPS: f64 = 1e-12;

/// One-period transform numerator int_0^{T2} e^{-s t} f(t) dt.
pub fn one_period_transform(f: &PeriodicForcing, s: Complex64) -> Complex64 {
    f.segments()
        .iter()
        .map(|seg| segment_exp_integral(seg, s, seg.start, seg.end))
        .sum()
}

/// F(s) for the periodic extension of f via the one-period identity.
/// Near the lattice s T2 in 2 pi i Z the quotient is refused and the
/// numerator handed back for the caller's own limiting.
pub fn periodic_transform(f: &PeriodicForcing, s: Complex64) -> Result<Complex64> {
    let numerator = one_period_transform(f, s);
    let denom = Complex64::new(1.0, 0.0) - (-s * f.period_f64()).exp();
    if denom.norm() <= POLE_EPS {
        return Err(Error::PoleProximity { numerator });
    }
    Ok(numerator / denom)
}

/// X(s) = F(s) / (s^2 + w0^2).
pub fn solution_transform(f: &PeriodicForcing, omega0: f64, s: Complex64) -> Result<Complex64> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidArgument("omega0 must be positive".into()));
    }
    let char_poly = s * s + omega0 * omega0;
    if char_poly.norm() <= POLE_EPS {
        return Err(Error::PoleProximity { numerator: one_period_transform(f, s) });
    }
    Ok(periodic_transform(f, s)? / char_poly)
}

/// The coincident-pole numerator int_0^{T3} e^{-i w0 t} f(t) dt, which
/// equals Q2 - i Q1. Requires T3 to be a positive integer multiple of T2
/// and w0 T3 to be a whole number of turns (the alpha-integer case), both
/// checked to 1e-9 relative.
pub fn pole_numerator(f: &PeriodicForcing, omega0: f64, t3: f64) -> Result<Complex64> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidArgument("omega0 must be positive".into()));
    }
    let t2 = f.period_f64();
    let periods = t3 / t2;
    let j = periods.round();
    if !(t3 > 0.0) || j < 1.0 || (t3 - j * t2).abs() > 1e-9 * t3.max(t2) {
        return Err(Error::InvalidArgument(format!(
            "T3 = {t3} is not a positive integer multiple of the period {t2}"
        )));
    }
    let turns = omega0 * t3 / std::f64::consts::TAU;
    if turns < 0.5 || (turns - turns.round()).abs() > 1e-9 * turns.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "w0 T3 = {} is not a whole number of turns; the poles do not coincide",
            omega0 * t3,
        )));
    }
    let s = Complex64::new(0.0, omega0);
    let one_period = one_period_transform(f, s);
    // per-period phases e^{-i w0 k T2} accumulated from the reduced angle
    let theta = std::f64::consts::TAU * (omega0 * t2 / std::f64::consts::TAU).fract();
    let step = Complex64::from_polar(1.0, -theta);
    let mut total = Complex64::new(0.0, 0.0);
    let mut rot = Complex64::new(1.0, 0.0);
    for _ in 0..j as u64 {
        total += rot * one_period;
        rot *= step;
    }
    Ok(total)
}
