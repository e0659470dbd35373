//! Closed-form and adaptive evaluation of the Duhamel integrals
//! int f(tau) sin(w0 tau) dtau and int f(tau) cos(w0 tau) dtau.
//!
//! Everything in the term basis reduces to int poly(t) * e^{z t} dt, which
//! has an exact recurrence for |z| away from zero and a fast series for
//! small |z|. The series branch is what keeps the equal-frequency (secular)
//! case exact instead of a 0/0: the product-to-sum split sends nu = w0 to a
//! zero-frequency factor, never to a vanishing denominator.

use crate::error::{Error, Result};
use crate::forcing::{ForcingSegment, PeriodicForcing, TrigKind};
use num_complex::Complex64;
use serde::Serialize;

/// int_a^b poly(t) e^{z t} dt.
pub(crate) fn poly_exp_integral(coeffs: &[f64], z: Complex64, a: f64, b: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let max_t = a.abs().max(b.abs());
    if z.norm() * max_t.max(1.0) < 0.5 {
        poly_exp_series(coeffs, z, a, b)
    } else {
        poly_exp_recurrence(coeffs, z, a, b)
    }
}

/// Series branch: sum_k z^k/k! * int t^k poly(t) dt. Converges in ~25 terms
/// when |z| max|t| < 0.5 and is exact at z = 0 (the secular case).
fn poly_exp_series(coeffs: &[f64], z: Complex64, a: f64, b: f64) -> Complex64 {
    let max_t = a.abs().max(b.abs());
    let poly_scale: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(p, c)| c.abs() * max_t.powi(p as i32))
        .sum();
    let width = (b - a).abs();
    // |term_k| <= envelope_k = (|z| max_t)^k / k! * width * poly_scale, and
    // the step ratio |z| max_t / (k+1) stays below 1/2 in this branch, so
    // the tail after term k is at most 2 * envelope_{k+1}
    let step = z.norm() * max_t;
    let mut envelope = width * poly_scale;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0); // z^k / k!
    let mut apow: Vec<f64> = Vec::new();
    let mut bpow: Vec<f64> = Vec::new();
    // powers a^(p+k+1), b^(p+k+1) maintained incrementally
    let deg = coeffs.len() - 1;
    for p in 0..=deg + 1 {
        apow.push(a.powi(p as i32 + 1));
        bpow.push(b.powi(p as i32 + 1));
    }
    for k in 0..60 {
        let mut moment = 0.0;
        for (p, &c) in coeffs.iter().enumerate() {
            moment += c * (bpow[p] - apow[p]) / (p + k + 1) as f64;
        }
        acc += zk * moment;
        envelope *= step / (k as f64 + 1.0);
        if 2.0 * envelope < 1e-22 * (acc.norm() + 1e-300) && k > 1 {
            break;
        }
        zk *= z / (k as f64 + 1.0);
        for p in 0..apow.len() {
            apow[p] *= a;
            bpow[p] *= b;
        }
    }
    acc
}

/// Integration-by-parts recurrence, ascending in the power:
/// J_p = (b^p e^{zb} - a^p e^{za})/z - (p/z) J_{p-1}.
fn poly_exp_recurrence(coeffs: &[f64], z: Complex64, a: f64, b: f64) -> Complex64 {
    let ea = (z * a).exp();
    let eb = (z * b).exp();
    let mut j = (eb - ea) / z;
    let mut acc = coeffs[0] * j;
    let mut apow = 1.0;
    let mut bpow = 1.0;
    for (p, &c) in coeffs.iter().enumerate().skip(1) {
        apow *= a;
        bpow *= b;
        j = (bpow * eb - apow * ea) / z - (p as f64 / z) * j;
        acc += c * j;
    }
    acc
}

/// (int poly cos(w t + phase), int poly sin(w t + phase)) on [a, b].
pub(crate) fn poly_trig_pair(coeffs: &[f64], w: f64, phase: f64, a: f64, b: f64) -> (f64, f64) {
    let j = poly_exp_integral(coeffs, Complex64::new(0.0, w), a, b);
    let rot = Complex64::from_polar(1.0, phase);
    let r = rot * j;
    (r.re, r.im)
}

/// int_a^b seg(t) * trig(w0 t + carrier_phase) dt with the product-to-sum
/// split; the equal-frequency case goes through the zero-frequency series.
pub(crate) fn segment_trig_integral(
    seg: &ForcingSegment,
    omega0: f64,
    kind: TrigKind,
    carrier_phase: f64,
    a: f64,
    b: f64,
) -> f64 {
    let psi = carrier_phase
        + match kind {
            TrigKind::Sin => -std::f64::consts::FRAC_PI_2,
            TrigKind::Cos => 0.0,
        };
    let mut acc = 0.0;
    for term in &seg.terms {
        match term.trig() {
            None => {
                acc += poly_trig_pair(term.poly(), omega0, psi, a, b).0;
            }
            Some(trig) => {
                let phi = trig.phase
                    + match trig.kind {
                        TrigKind::Sin => -std::f64::consts::FRAC_PI_2,
                        TrigKind::Cos => 0.0,
                    };
                // cos(nu t + phi) cos(w0 t + psi)
                //   = 1/2 cos((nu-w0) t + phi-psi) + 1/2 cos((nu+w0) t + phi+psi)
                let low = poly_trig_pair(term.poly(), trig.freq - omega0, phi - psi, a, b).0;
                let high = poly_trig_pair(term.poly(), trig.freq + omega0, phi + psi, a, b).0;
                acc += 0.5 * (low + high);
            }
        }
    }
    acc
}

/// Exact int_a^b seg(t) * trig(w0 t) dt for [a, b] inside the segment.
pub fn segment_integral(
    seg: &ForcingSegment,
    omega0: f64,
    kind: TrigKind,
    a: f64,
    b: f64,
) -> Result<f64> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidArgument("omega0 must be positive".into()));
    }
    if a > b {
        return Err(Error::InvalidArgument("integral bounds out of order".into()));
    }
    let tol = 1e-9 * (seg.end - seg.start).max(1.0);
    if a < seg.start - tol || b > seg.end + tol {
        return Err(Error::InvalidArgument(format!(
            "[{a}, {b}] is not inside the segment [{}, {}]",
            seg.start, seg.end
        )));
    }
    Ok(segment_trig_integral(seg, omega0, kind, 0.0, a, b))
}

/// int_a^b seg(t) e^{-s t} dt, for the Laplace transform of one period.
pub(crate) fn segment_exp_integral(seg: &ForcingSegment, s: Complex64, a: f64, b: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for term in &seg.terms {
        match term.trig() {
            None => acc += poly_exp_integral(term.poly(), -s, a, b),
            Some(trig) => {
                let phi = trig.phase
                    + match trig.kind {
                        TrigKind::Sin => -std::f64::consts::FRAC_PI_2,
                        TrigKind::Cos => 0.0,
                    };
                // cos(nu t + phi) = (e^{i(nu t + phi)} + e^{-i(nu t + phi)}) / 2
                let rot = Complex64::from_polar(1.0, phi);
                let plus = poly_exp_integral(term.poly(), -s + Complex64::new(0.0, trig.freq), a, b);
                let minus = poly_exp_integral(term.poly(), -s - Complex64::new(0.0, trig.freq), a, b);
                acc += 0.5 * (rot * plus + rot.conj() * minus);
            }
        }
    }
    acc
}

/// Cumulative Duhamel integrals over one period of a forcing.
///
/// Stores I_c(tau) = int_0^tau f cos(w0 t) dt and the sine analogue at every
/// segment breakpoint; between breakpoints the closed-form segment integral
/// finishes the job, so any partial integral on [0, T2] costs O(segments)
/// once and O(log segments) after.
#[derive(Clone, Debug)]
pub struct PrefixTable {
    forcing: PeriodicForcing,
    omega0: f64,
    breakpoints: Vec<f64>,
    cum_cos: Vec<f64>,
    cum_sin: Vec<f64>,
}

impl PrefixTable {
    pub fn build(forcing: &PeriodicForcing, omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::InvalidArgument("omega0 must be positive".into()));
        }
        let breakpoints = forcing.breakpoints();
        let mut cum_cos = vec![0.0];
        let mut cum_sin = vec![0.0];
        for seg in forcing.segments() {
            let c = segment_trig_integral(seg, omega0, TrigKind::Cos, 0.0, seg.start, seg.end);
            let s = segment_trig_integral(seg, omega0, TrigKind::Sin, 0.0, seg.start, seg.end);
            cum_cos.push(cum_cos.last().unwrap() + c);
            cum_sin.push(cum_sin.last().unwrap() + s);
        }
        Ok(PrefixTable {
            forcing: forcing.clone(),
            omega0,
            breakpoints,
            cum_cos,
            cum_sin,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn forcing(&self) -> &PeriodicForcing {
        &self.forcing
    }

    /// (P_c, P_s) = (I_c(T2), I_s(T2)).
    pub fn per_period(&self) -> (f64, f64) {
        (*self.cum_cos.last().unwrap(), *self.cum_sin.last().unwrap())
    }

    /// (I_c(r), I_s(r)) for r in [0, T2]; r is clamped against endpoint
    /// rounding from the time reduction.
    pub fn partial(&self, r: f64) -> (f64, f64) {
        let t2 = self.forcing.period_f64();
        let r = r.clamp(0.0, t2);
        let segments = self.forcing.segments();
        let i = segments
            .partition_point(|s| s.start <= r)
            .saturating_sub(1);
        let seg = &segments[i];
        let upto = r.min(seg.end);
        let c = self.cum_cos[i]
            + segment_trig_integral(seg, self.omega0, TrigKind::Cos, 0.0, seg.start, upto);
        let s = self.cum_sin[i]
            + segment_trig_integral(seg, self.omega0, TrigKind::Sin, 0.0, seg.start, upto);
        (c, s)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// Inner products of the forcing with the fundamental sinusoids over the
/// coincident period: Q1 = (f, sin w0 t), Q2 = (f, cos w0 t) on [0, T3].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Projection {
    #[serde(rename = "Q1")]
    pub q1: f64,
    #[serde(rename = "Q2")]
    pub q2: f64,
    #[serde(rename = "T3")]
    pub t3: f64,
}

/// Compute the projection over T3, which must be a positive integer multiple
/// of the forcing period (validated to 1e-9 relative). Uses the per-period
/// totals rotated by the accumulated phase of each period, i.e. the shift
/// identity int_{kT2}^{(k+1)T2} f trig(w0 t) dt written with the angle
/// addition formulas.
pub fn project(forcing: &PeriodicForcing, omega0: f64, t3: f64) -> Result<Projection> {
    let t2 = forcing.period_f64();
    let ratio = t3 / t2;
    let j = ratio.round();
    if !(t3 > 0.0) || j < 1.0 || (t3 - j * t2).abs() > 1e-9 * t3.max(t2) {
        return Err(Error::InvalidArgument(format!(
            "T3 = {t3} is not a positive integer multiple of the period {t2}"
        )));
    }
    let table = PrefixTable::build(forcing, omega0)?;
    let (p_c, p_s) = table.per_period();
    let mut q1 = 0.0;
    let mut q2 = 0.0;
    for k in 0..j as u64 {
        let theta = omega0 * t2 * k as f64;
        let (sin_t, cos_t) = theta.sin_cos();
        q2 += cos_t * p_c - sin_t * p_s;
        q1 += cos_t * p_s + sin_t * p_c;
    }
    Ok(Projection { q1, q2, t3 })
}

// ---- adaptive quadrature (the brute-force oracle) ----------------------

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = g(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut res_abs = kronrod.abs();
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        kronrod += WGK[i] * (f1 + f2);
        res_abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs().max(50.0 * f64::EPSILON * res_abs * half.abs());
    (value, err)
}

/// Adaptive Gauss-Kronrod integration to absolute tolerance `tol`.
///
/// Bisects until the local error estimate fits the split tolerance; an
/// interval that reaches the depth cap or shrinks to machine width is
/// accepted as-is and its error charged against the budget. If the accepted
/// error ends up above `tol` the call fails, carrying the best estimate.
pub fn adaptive_integral<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if a > b {
        return Err(Error::InvalidArgument("integration bounds out of order".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let min_width = 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
    let mut stack: Vec<(f64, f64, f64, u32)> = vec![(a, b, tol, 0)];
    let mut total = 0.0;
    let mut err_accepted = 0.0;
    let mut forced = false;
    let mut intervals = 0_u64;
    while let Some((lo, hi, tol_local, depth)) = stack.pop() {
        intervals += 1;
        let (value, err) = gauss_kronrod_15(&g, lo, hi);
        let width = hi - lo;
        if err <= tol_local || depth >= 60 || width <= min_width || intervals > 500_000 {
            if err > tol_local {
                forced = true;
            }
            total += value;
            err_accepted += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol_local, depth + 1));
            stack.push((mid, hi, 0.5 * tol_local, depth + 1));
        }
    }
    if forced && err_accepted > tol {
        return Err(Error::AccuracyFailure { estimate: total, error_bound: err_accepted });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ScaledReal;
    use crate::forcing::{ForcingTerm, Trig};
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn sr(num: i64, den: i64, e: i32) -> ScaledReal {
        ScaledReal::new(num, den, e).unwrap()
    }

    fn seg(start: f64, end: f64, terms: Vec<ForcingTerm>) -> ForcingSegment {
        ForcingSegment::new(start, end, terms).unwrap()
    }

    #[test]
    fn adaptive_closed_forms() {
        let one = adaptive_integral(|t: f64| t.cos(), 0.0, FRAC_PI_2, 1e-12).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let zero = adaptive_integral(|_| 0.0, -3.0, 7.0, 1e-12).unwrap();
        assert_eq!(zero, 0.0);
        assert_eq!(adaptive_integral(|t: f64| t, 2.0, 2.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn adaptive_handles_jumps() {
        // unit step at sqrt(2)/2: exact integral is 1 - sqrt(2)/2
        let g = |t: f64| if t < std::f64::consts::SQRT_2 / 2.0 { 0.0 } else { 1.0 };
        let v = adaptive_integral(g, 0.0, 1.0, 1e-10).unwrap();
        assert!((v - (1.0 - std::f64::consts::SQRT_2 / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reports_unreachable_tolerance() {
        match adaptive_integral(|t: f64| t.sin(), 0.0, 10.0, 1e-300) {
            Err(Error::AccuracyFailure { estimate, error_bound }) => {
                assert!((estimate - (1.0 - 10.0_f64.cos())).abs() < 1e-9);
                assert!(error_bound > 0.0);
            }
            other => panic!("expected accuracy failure, got {other:?}"),
        }
    }

    #[test]
    fn adaptive_reproduces_triangle_projection_value() {
        let tri = crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let g = |t: f64| tri.evaluate(t) * (FRAC_PI_2 * t).sin();
        let v = adaptive_integral(g, 0.0, 4.0, 1e-10).unwrap();
        assert!((v - 16.0 / (PI * PI)).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn constant_segment_integral() {
        // int_0^{1/2} cos(pi t) dt = 1/pi
        let s = seg(0.0, 0.5, vec![ForcingTerm::constant(1.0)]);
        let v = segment_integral(&s, PI, TrigKind::Cos, 0.0, 0.5).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-14);
        let oracle = adaptive_integral(|t: f64| (PI * t).cos(), 0.0, 0.5, 1e-12).unwrap();
        assert!((v - oracle).abs() < 1e-11);
    }

    #[test]
    fn empty_interval_is_zero() {
        let s = seg(0.0, 1.0, vec![ForcingTerm::new(vec![0.0, 1.0], None).unwrap()]);
        assert_eq!(segment_integral(&s, 2.3, TrigKind::Sin, 0.7, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn same_frequency_secular_case() {
        // int_0^{2 pi / w} sin(w t) sin(w t) dt = pi / w, no 0/0
        for &w in &[0.7, 1.0, PI, 13.0] {
            let s = seg(
                0.0,
                TAU / w,
                vec![ForcingTerm::new(vec![1.0], Some(Trig { kind: TrigKind::Sin, freq: w, phase: 0.0 }))
                    .unwrap()],
            );
            let v = segment_integral(&s, w, TrigKind::Sin, 0.0, TAU / w).unwrap();
            assert!((v - PI / w).abs() < 1e-12, "w = {w}: {v}");
        }
    }

    #[test]
    fn near_degenerate_frequency_on_a_wide_segment() {
        // wide interval pushes the series envelope through many decades of
        // max_t^k; the oracle pins the result
        let w0 = 0.7;
        for &nu_off in &[0.0, 1e-9, 1e-6, 1e-3] {
            let s = seg(
                0.0,
                40.0,
                vec![ForcingTerm::new(
                    vec![0.5, 0.02, -0.001],
                    Some(Trig { kind: TrigKind::Sin, freq: w0 + nu_off, phase: 0.2 }),
                )
                .unwrap()],
            );
            let exact = segment_integral(&s, w0, TrigKind::Sin, 0.0, 40.0).unwrap();
            let sc = s.clone();
            let oracle =
                adaptive_integral(move |t| sc.eval(t) * (w0 * t).sin(), 0.0, 40.0, 1e-10).unwrap();
            assert!(
                (exact - oracle).abs() <= 1e-8 * (1.0 + exact.abs()),
                "nu offset {nu_off}: exact {exact} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn degenerate_frequency_continuity() {
        let w0 = 1.3;
        let value_at = |nu: f64| {
            let s = seg(
                0.0,
                2.0,
                vec![ForcingTerm::new(
                    vec![0.3, -0.8, 0.2],
                    Some(Trig { kind: TrigKind::Cos, freq: nu, phase: 0.4 }),
                )
                .unwrap()],
            );
            segment_integral(&s, w0, TrigKind::Sin, 0.0, 2.0).unwrap()
        };
        let center = value_at(w0);
        for sign in [-1.0, 1.0] {
            let off = value_at(w0 * (1.0 + sign * 1e-8));
            assert!(
                (off - center).abs() <= 1e-6 * center.abs().max(1.0),
                "jump through nu = w0: {center} vs {off}"
            );
        }
    }

    #[test]
    fn segment_integrals_match_adaptive_oracle() {
        // randomized mix of poly and poly*trig terms against the oracle
        let mut seed = 0x9e3779b97f4a7c15_u64;
        let mut rng = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1_u64 << 53) as f64
        };
        for case in 0..200 {
            let a = rng() * 2.0;
            let b = a + 0.2 + rng() * 3.0;
            let w0 = 0.2 + rng() * 8.0;
            let deg = (rng() * 4.0) as usize;
            let poly: Vec<f64> = (0..=deg).map(|_| rng() * 4.0 - 2.0).collect();
            let trig = if rng() < 0.5 {
                None
            } else {
                Some(Trig {
                    kind: if rng() < 0.5 { TrigKind::Sin } else { TrigKind::Cos },
                    freq: 0.1 + rng() * 9.0,
                    phase: rng() * TAU,
                })
            };
            let term = match ForcingTerm::new(poly, trig) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let s = seg(a, b, vec![term]);
            for kind in [TrigKind::Sin, TrigKind::Cos] {
                let exact = segment_integral(&s, w0, kind, a, b).unwrap();
                let trig_eval = move |t: f64| match kind {
                    TrigKind::Sin => (w0 * t).sin(),
                    TrigKind::Cos => (w0 * t).cos(),
                };
                let seg_clone = s.clone();
                let oracle =
                    adaptive_integral(move |t| seg_clone.eval(t) * trig_eval(t), a, b, 1e-11)
                        .unwrap();
                assert!(
                    (exact - oracle).abs() <= 1e-9 * (1.0 + exact.abs()),
                    "case {case} kind {kind:?}: exact {exact} vs oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn prefix_table_basics() {
        let f = crate::forcing::PeriodicForcing::step_symmetric(&sr(2, 1, 0)).unwrap();
        let table = PrefixTable::build(&f, PI).unwrap();
        assert_eq!(table.partial(0.0), (0.0, 0.0));
        let (p_c, p_s) = table.per_period();
        // two constant segments of value 1: oracle by adaptive quadrature
        let fc = f.clone();
        let oracle_c =
            adaptive_integral(move |t| fc.evaluate(t) * (PI * t).cos(), 0.0, 2.0, 1e-12).unwrap();
        let fs = f.clone();
        let oracle_s =
            adaptive_integral(move |t| fs.evaluate(t) * (PI * t).sin(), 0.0, 2.0, 1e-12).unwrap();
        assert!((p_c - 2.0 / PI).abs() < 1e-13, "P_c = {p_c}");
        assert!(p_s.abs() < 1e-13, "P_s = {p_s}");
        assert!((p_c - oracle_c).abs() < 1e-10);
        assert!((p_s - oracle_s).abs() < 1e-10);
        // cumulative at an interior point
        let (c_half, s_half) = table.partial(0.25);
        assert!((c_half - (PI * 0.25).sin() / PI).abs() < 1e-13);
        assert!((s_half - (1.0 - (PI * 0.25).cos()) / PI).abs() < 1e-13);
    }

    #[test]
    fn prefix_partial_at_the_period_is_the_per_period_total() {
        for f in [
            crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap(),
            crate::forcing::PeriodicForcing::cancellation_step(0.5).unwrap(),
            crate::forcing::PeriodicForcing::rect_half(&sr(4, 1, 0)).unwrap(),
        ] {
            let table = PrefixTable::build(&f, 1.3).unwrap();
            let (p_c, p_s) = table.per_period();
            // same computation, so bitwise equality
            assert_eq!(table.partial(f.period_f64()), (p_c, p_s), "{}", f.name());
        }
    }

    #[test]
    fn projections_are_bounded_by_sup_times_t3() {
        for (f, w0, t3) in [
            (crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap(), FRAC_PI_2, 8.0),
            (crate::forcing::PeriodicForcing::step_symmetric(&sr(2, 1, 0)).unwrap(), PI, 6.0),
        ] {
            let p = project(&f, w0, t3).unwrap();
            let bound = f.sup_norm() * t3;
            assert!(p.q1.abs() <= bound && p.q2.abs() <= bound, "{}", f.name());
            assert!(p.q1.is_finite() && p.q2.is_finite());
        }
    }

    #[test]
    fn prefix_table_of_offbeat_sinusoid() {
        // f = sin(w t) with w = 17/10 against w0 = 2.9: closed-form trig
        // integrals as oracle
        let w = 1.7;
        let w0 = 2.9;
        let f = crate::forcing::PeriodicForcing::sinusoid(1.0, &sr(17, 10, 0), TrigKind::Sin, 0.0)
            .unwrap();
        let table = PrefixTable::build(&f, w0).unwrap();
        let (p_c, p_s) = table.per_period();
        let t2 = f.period_f64();
        // int sin(w t) cos(w0 t) dt = 1/2 [ (1-cos((w+w0)T))/(w+w0) + (1-cos((w-w0)T))/(w-w0) ]
        let closed_c = 0.5 * (1.0 - ((w + w0) * t2).cos()) / (w + w0)
            + 0.5 * (1.0 - ((w - w0) * t2).cos()) / (w - w0);
        // int sin(w t) sin(w0 t) dt = 1/2 [ sin((w-w0)T)/(w-w0) - sin((w+w0)T)/(w+w0) ]
        let closed_s =
            0.5 * ((w - w0) * t2).sin() / (w - w0) - 0.5 * ((w + w0) * t2).sin() / (w + w0);
        assert!((p_c - closed_c).abs() < 1e-12, "{p_c} vs {closed_c}");
        assert!((p_s - closed_s).abs() < 1e-12, "{p_s} vs {closed_s}");
    }

    #[test]
    fn projection_reference_values() {
        // triangle, T2 = 4, w0 = pi/2, T3 = 4 -> Q1 = 16/pi^2
        let tri4 = crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let p = project(&tri4, FRAC_PI_2, 4.0).unwrap();
        assert!((p.q1 - 16.0 / (PI * PI)).abs() < 1e-12, "Q1 = {}", p.q1);
        assert!(p.q2.abs() < 1e-12, "Q2 = {}", p.q2);

        // triangle, T2 = 6, w0 = pi, T3 = 6 -> Q1 = -8/(3 pi^2) ~ -0.27019
        let tri6 = crate::forcing::PeriodicForcing::triangle(&sr(6, 1, 0)).unwrap();
        let p6 = project(&tri6, PI, 6.0).unwrap();
        let expect = -8.0 / (3.0 * PI * PI);
        assert!((p6.q1 - expect).abs() < 1e-12, "Q1 = {}", p6.q1);
        assert!((p6.q1 - (-0.27019)).abs() < 5e-5);
        let tri6b = tri6.clone();
        let oracle =
            adaptive_integral(move |t| tri6b.evaluate(t) * (PI * t).sin(), 0.0, 6.0, 1e-11).unwrap();
        assert!((p6.q1 - oracle).abs() < 1e-9);

        // sin(pi t / 3) against sin(pi t) over [0, 6]: classical orthogonality
        let f = crate::forcing::PeriodicForcing::sinusoid(1.0, &sr(1, 3, 1), TrigKind::Sin, 0.0)
            .unwrap();
        let p0 = project(&f, PI, 6.0).unwrap();
        assert!(p0.q1.abs() < 1e-12, "orthogonality Q1 = {}", p0.q1);

        // rect_half, T2 = 4, w0 = pi -> (Q1, Q2) = (0, -4/(3 pi))
        let fa = crate::forcing::PeriodicForcing::rect_half(&sr(4, 1, 0)).unwrap();
        let pa = project(&fa, PI, 4.0).unwrap();
        assert!(pa.q1.abs() < 1e-12, "Q1 = {}", pa.q1);
        assert!((pa.q2 - (-4.0 / (3.0 * PI))).abs() < 1e-12, "Q2 = {}", pa.q2);
        let fa2 = fa.clone();
        let oracle_q2 =
            adaptive_integral(move |t| fa2.evaluate(t) * (PI * t).cos(), 0.0, 4.0, 1e-11).unwrap();
        assert!((pa.q2 - oracle_q2).abs() < 1e-9);
    }

    #[test]
    fn projection_rejects_non_multiples() {
        let tri = crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        assert!(project(&tri, 1.0, 6.0).is_err());
        assert!(project(&tri, 1.0, -4.0).is_err());
    }

    #[test]
    fn shift_identity_against_oracle() {
        // int_{kT2}^{(k+1)T2} f cos(w0 t) dt = cos(2 pi k a) P_c - sin(...) P_s
        let f = crate::forcing::PeriodicForcing::cancellation_step(0.5).unwrap();
        for &w0 in &[1.0, 2.2, PI] {
            let table = PrefixTable::build(&f, w0).unwrap();
            let (p_c, p_s) = table.per_period();
            let t2 = f.period_f64();
            for k in [1_u32, 3, 17, 50] {
                let theta = w0 * t2 * k as f64;
                let expect_c = theta.cos() * p_c - theta.sin() * p_s;
                let expect_s = theta.cos() * p_s + theta.sin() * p_c;
                let fc = f.clone();
                let lo = k as f64 * t2;
                let oracle_c = adaptive_integral(
                    move |t| fc.evaluate(t) * (w0 * t).cos(),
                    lo,
                    lo + t2,
                    1e-11,
                )
                .unwrap();
                let fs = f.clone();
                let oracle_s = adaptive_integral(
                    move |t| fs.evaluate(t) * (w0 * t).sin(),
                    lo,
                    lo + t2,
                    1e-11,
                )
                .unwrap();
                assert!((expect_c - oracle_c).abs() < 1e-9, "w0={w0} k={k}");
                assert!((expect_s - oracle_s).abs() < 1e-9, "w0={w0} k={k}");
            }
        }
    }

    #[test]
    fn projection_is_linear() {
        let base = crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let scaled = base.scale(3.5).unwrap();
        let p1 = project(&base, FRAC_PI_2, 4.0).unwrap();
        let p2 = project(&scaled, FRAC_PI_2, 4.0).unwrap();
        assert!((p2.q1 - 3.5 * p1.q1).abs() <= 1e-12 * p2.q1.abs().max(1.0));
        assert!((p2.q2 - 3.5 * p1.q2).abs() <= 1e-12);
    }

    #[test]
    fn projection_is_additive() {
        // f1 = triangle(4), f2 = sin(pi t / 2) on the same period; the sum
        // shares f1's segmentation with f2's term appended to every segment
        let f1 = crate::forcing::PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let f2 = crate::forcing::PeriodicForcing::sinusoid(0.8, &sr(1, 2, 1), TrigKind::Sin, 0.3)
            .unwrap();
        let extra = f2.segments()[0].terms[0].clone();
        let merged: Vec<ForcingSegment> = f1
            .segments()
            .iter()
            .map(|s| {
                let mut terms = s.terms.clone();
                terms.push(extra.clone());
                ForcingSegment::new(s.start, s.end, terms).unwrap()
            })
            .collect();
        let sum = crate::forcing::PeriodicForcing::new("sum", sr(4, 1, 0), merged).unwrap();
        for &w0 in &[FRAC_PI_2, 1.1, PI] {
            let ps = project(&sum, w0, 4.0).unwrap();
            let pa = project(&f1, w0, 4.0).unwrap();
            let pb = project(&f2, w0, 4.0).unwrap();
            let scale = ps.q1.abs().max(ps.q2.abs()).max(1.0);
            assert!((ps.q1 - (pa.q1 + pb.q1)).abs() <= 1e-12 * scale, "w0 = {w0}");
            assert!((ps.q2 - (pa.q2 + pb.q2)).abs() <= 1e-12 * scale, "w0 = {w0}");
        }
    }
}
