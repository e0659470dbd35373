//! Trajectory diagnostics: the energy identity residual, empirical period
//! detection, and growth-rate estimation. These cross-check the classifier
//! verdicts against what the sampled solution actually does.

use crate::error::{Error, Result};
use crate::oscillator::Trajectory;

/// Max residual of the energy identity
///   w0^2 x^2 + xdot^2 = w0^2 x(t_a)^2 + xdot(t_a)^2 + 2 int_{t_a}^t f xdot
/// over the samples, with the work integral accumulated by the trapezoid
/// rule on the sample grid (O(h^2); diagnostic, not proof-grade).
pub fn energy_residual(traj: &Trajectory) -> Result<f64> {
    if traj.damping != 0.0 {
        return Err(Error::InvalidArgument(
            "the energy identity holds in this form only for d = 0".into(),
        ));
    }
    if traj.samples.len() < 2 {
        return Err(Error::InsufficientData("need at least two samples".into()));
    }
    let w0sq = traj.omega0 * traj.omega0;
    let first = &traj.samples[0];
    let base = w0sq * first.x * first.x + first.xdot * first.xdot;
    let mut work = 0.0;
    let mut worst = 0.0_f64;
    for w in traj.samples.windows(2) {
        let h = w[1].t - w[0].t;
        work += 0.5 * h * (w[0].f * w[0].xdot + w[1].f * w[1].xdot);
        let energy = w0sq * w[1].x * w[1].x + w[1].xdot * w[1].xdot;
        worst = worst.max((energy - base - 2.0 * work).abs());
    }
    Ok(worst)
}

/// Max over usable samples of |x(t + shift) - x(t)|, with x(t + shift) read
/// off the grid (index shift when the lag is a whole number of steps, linear
/// interpolation otherwise).
fn shift_deviation(traj: &Trajectory, h: f64, shift: f64) -> f64 {
    let samples = &traj.samples;
    let t0 = samples[0].t;
    let t_end = samples[samples.len() - 1].t;
    let steps = shift / h;
    let rounded = steps.round();
    let mut worst = 0.0_f64;
    if (steps - rounded).abs() <= 1e-9 * steps.max(1.0) {
        let p = rounded as usize;
        if p == 0 || p >= samples.len() {
            return f64::INFINITY;
        }
        for i in 0..samples.len() - p {
            worst = worst.max((samples[i + p].x - samples[i].x).abs());
        }
    } else {
        let mut any = false;
        for s in samples {
            let target = s.t + shift;
            if target > t_end {
                break;
            }
            let pos = (target - t0) / h;
            let j = (pos.floor() as usize).min(samples.len() - 2);
            let frac = pos - j as f64;
            let x_shift = samples[j].x * (1.0 - frac) + samples[j + 1].x * frac;
            worst = worst.max((x_shift - s.x).abs());
            any = true;
        }
        if !any {
            return f64::INFINITY;
        }
    }
    worst
}

/// Empirical period detection on a uniformly sampled trajectory.
///
/// With a candidate period, tries the divisors candidate/k for k = 64..1 and
/// returns the smallest one whose shift deviation stays within
/// tol * (1 + sup|x|). Without a candidate, scans integer lags for the first
/// deviation minimum under the same threshold. `None` means no period was
/// found at this tolerance, which is the expected outcome for the
/// irrational-ratio case.
pub fn detect_period(traj: &Trajectory, candidate: Option<f64>, tol: f64) -> Result<Option<f64>> {
    let h = traj
        .uniform_step()
        .ok_or_else(|| Error::InvalidArgument("period detection needs a uniform grid".into()))?;
    let samples = &traj.samples;
    let span = samples[samples.len() - 1].t - samples[0].t;
    let threshold = tol * (1.0 + traj.sup_x());

    match candidate {
        Some(c) => {
            if !(c > 0.0) {
                return Err(Error::InvalidArgument("candidate period must be positive".into()));
            }
            if span < 3.0 * c {
                return Err(Error::InsufficientData(format!(
                    "trajectory spans {span:.3}, need at least three candidate periods ({})",
                    3.0 * c
                )));
            }
            for k in (1..=64u32).rev() {
                let period = c / k as f64;
                if period < 2.0 * h {
                    continue; // below grid resolution
                }
                if shift_deviation(traj, h, period) <= threshold {
                    return Ok(Some(period));
                }
            }
            Ok(None)
        }
        None => {
            if samples.len() < 8 {
                return Err(Error::InsufficientData(
                    "need at least eight samples for a period scan".into(),
                ));
            }
            let max_lag = samples.len() / 2;
            let mut prev: Option<f64> = None;
            for p in 1..=max_lag {
                let dev = shift_deviation(traj, h, p as f64 * h);
                if dev <= threshold {
                    // descend to the local minimum of the deviation
                    if let Some(prev_dev) = prev {
                        if prev_dev < dev {
                            return Ok(Some((p - 1) as f64 * h));
                        }
                    }
                    let next = if p < max_lag {
                        shift_deviation(traj, h, (p + 1) as f64 * h)
                    } else {
                        f64::INFINITY
                    };
                    if dev <= next {
                        return Ok(Some(p as f64 * h));
                    }
                }
                prev = Some(dev);
            }
            Ok(None)
        }
    }
}

/// Least-squares slope of x against the sample index, for trajectories
/// sampled at consecutive multiples of T3. For a resonant system this equals
/// -Q1/w0 (the exact per-cycle increment at the sample times).
pub fn detect_growth(traj: &Trajectory) -> Result<f64> {
    let n = traj.samples.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "growth estimation needs at least 10 samples, got {n}"
        )));
    }
    let mean_i = (n - 1) as f64 / 2.0;
    let mean_x = traj.samples.iter().map(|s| s.x).sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, s) in traj.samples.iter().enumerate() {
        let di = i as f64 - mean_i;
        num += di * (s.x - mean_x);
        den += di * di;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ScaledReal;
    use crate::forcing::{PeriodicForcing, TrigKind};
    use crate::oscillator::{sample, OscillatorConfig};
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn sr(num: i64, den: i64, e: i32) -> ScaledReal {
        ScaledReal::new(num, den, e).unwrap()
    }

    #[test]
    fn energy_conserved_without_forcing_contribution() {
        // near-zero forcing, nonzero initial data: residual at rounding level
        let f = PeriodicForcing::sinusoid(1e-30, &sr(2, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(3, 2, 0), 1.0, -0.5).unwrap();
        let traj = sample(&f, &cfg, 0.0, 20.0, 4001).unwrap();
        let res = energy_residual(&traj).unwrap();
        assert!(res < 1e-10, "homogeneous residual {res}");
    }

    #[test]
    fn energy_residual_shrinks_quadratically() {
        // x'' + x = sin t on [0, 50]: the stated 1e-4-level residual at 1e4
        // samples, with the O(h^2) rate confirmed on refinement
        let f = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 1, 0), 0.0, 0.0).unwrap();
        let coarse = energy_residual(&sample(&f, &cfg, 0.0, 50.0, 10_001).unwrap()).unwrap();
        let fine = energy_residual(&sample(&f, &cfg, 0.0, 50.0, 20_001).unwrap()).unwrap();
        // honest trapezoid arithmetic puts the coarse residual at 1.02e-4,
        // a hair over the nominal 1e-4
        assert!(coarse < 1.1e-4, "coarse residual {coarse}");
        assert!(coarse > 0.8e-4, "coarse residual suspiciously small: {coarse}");
        let rate = coarse / fine;
        assert!(rate > 3.0 && rate < 5.0, "O(h^2) rate, got {rate}");
    }

    #[test]
    fn energy_scales_quadratically_with_amplitude() {
        let scale = 3.0;
        let f1 = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let f2 = PeriodicForcing::sinusoid(scale, &sr(1, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg1 = OscillatorConfig::undamped(sr(1, 1, 0), 0.2, 0.1).unwrap();
        let cfg2 = OscillatorConfig::undamped(sr(1, 1, 0), 0.2 * scale, 0.1 * scale).unwrap();
        let t1 = sample(&f1, &cfg1, 0.0, 10.0, 2001).unwrap();
        let t2 = sample(&f2, &cfg2, 0.0, 10.0, 2001).unwrap();
        for (a, b) in t1.samples.iter().zip(&t2.samples) {
            assert!((b.x - scale * a.x).abs() < 1e-9);
            // both sides of the identity pick up the factor scale^2
            let ea = a.x * a.x + a.xdot * a.xdot;
            let eb = b.x * b.x + b.xdot * b.xdot;
            assert!((eb - scale * scale * ea).abs() < 1e-7 * (1.0 + eb.abs()));
        }
    }

    #[test]
    fn damped_trajectory_is_rejected() {
        let f = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::new(sr(1, 1, 0), 0.0, 0.0, 0.5).unwrap();
        let traj = sample(&f, &cfg, 0.0, 10.0, 101).unwrap();
        assert!(energy_residual(&traj).is_err());
    }

    #[test]
    fn detects_known_homogeneous_period() {
        // x = cos(2t) via initial data, forcing negligible: period pi
        let f = PeriodicForcing::sinusoid(1e-30, &sr(3, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(2, 1, 0), 1.0, 0.0).unwrap();
        // 12 periods, 128 samples per period
        let traj = sample(&f, &cfg, 0.0, 12.0 * PI, 12 * 128 + 1).unwrap();
        let got = detect_period(&traj, None, 1e-6).unwrap().unwrap();
        assert!((got - PI).abs() < 1e-3, "got {got}");
    }

    #[test]
    fn detected_period_matches_the_theorem_period() {
        // case 2: triangle T2 = 2 pi, w0 = 1/2, T3 = n T2 = 4 pi. The
        // detector scans every divisor 4 pi / k and none below 4 pi itself
        // qualifies: 4 pi really is the minimal period of the response
        // (at 2 pi the solution deviates by more than its own sup).
        let f = PeriodicForcing::triangle(&sr(2, 1, 1)).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 2, 0), 0.0, 0.0).unwrap();
        let t3 = 4.0 * PI;
        let traj = sample(&f, &cfg, 0.0, 4.0 * t3, 4 * 256 + 1).unwrap();
        let got = detect_period(&traj, Some(t3), 1e-6).unwrap().unwrap();
        assert!((got - t3).abs() < 1e-9, "detected {got}, expected exactly {t3}");
    }

    #[test]
    fn no_period_for_irrational_ratio() {
        // f_i = sin(pi t), w0 = 1: bounded but never periodic
        let f = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 1), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 1, 0), 0.0, 0.0).unwrap();
        let traj = sample(&f, &cfg, 0.0, 60.0, 6001).unwrap();
        assert_eq!(detect_period(&traj, Some(TAU), 1e-8).unwrap(), None);
        assert_eq!(detect_period(&traj, None, 1e-8).unwrap(), None);
    }

    #[test]
    fn short_span_is_rejected() {
        let f = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 1, 0), 0.0, 0.0).unwrap();
        let traj = sample(&f, &cfg, 0.0, 10.0, 101).unwrap();
        assert!(matches!(
            detect_period(&traj, Some(8.0), 1e-6),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn growth_slope_matches_resonant_identity() {
        // triangle T2 = 4, w0 = pi/2: slope of x(n T3) is -Q1/w0
        let f = PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 2, 1), 0.0, 0.0).unwrap();
        let t3 = 4.0;
        let traj = sample(&f, &cfg, 0.0, 40.0 * t3, 41).unwrap();
        let slope = detect_growth(&traj).unwrap();
        let expect = -(16.0 / (PI * PI)) / FRAC_PI_2;
        assert!(
            (slope - expect).abs() <= 1e-6 * expect.abs(),
            "slope {slope} vs {expect}"
        );
    }

    #[test]
    fn growth_slope_for_classical_resonance() {
        // f = A0 sin(w0 t): |slope| = A0 pi / w0^2
        let a0 = 2.0;
        let f = PeriodicForcing::sinusoid(a0, &sr(1, 2, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 2, 0), 0.0, 0.0).unwrap();
        let t3 = TAU / 0.5;
        let traj = sample(&f, &cfg, 0.0, 30.0 * t3, 31).unwrap();
        let slope = detect_growth(&traj).unwrap();
        let expect = a0 * PI / 0.25;
        assert!(
            (slope.abs() - expect).abs() <= 1e-8 * expect,
            "slope {slope} vs magnitude {expect}"
        );
    }

    #[test]
    fn growth_needs_enough_samples() {
        let f = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 0), TrigKind::Sin, 0.0).unwrap();
        let cfg = OscillatorConfig::undamped(sr(1, 1, 0), 0.0, 0.0).unwrap();
        let traj = sample(&f, &cfg, 0.0, 5.0 * TAU, 6).unwrap();
        assert!(matches!(detect_growth(&traj), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn growth_is_zero_for_the_cancellation_step() {
        let f = PeriodicForcing::cancellation_step(0.5).unwrap();
        let cfg = OscillatorConfig::undamped(sr(2, 1, 1), 0.0, 0.0).unwrap();
        let traj = sample(&f, &cfg, 0.0, 40.0, 41).unwrap();
        let slope = detect_growth(&traj).unwrap();
        assert!(slope.abs() < 1e-10, "slope {slope}");
    }
}
