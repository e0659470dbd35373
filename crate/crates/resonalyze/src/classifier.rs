//! The four-way classification of the zero-data response.
//!
//! With T1 = 2 pi / w0 and alpha = T2/T1:
//!   case 1: alpha irrational            -> bounded, not periodic
//!   case 2: alpha = m/n, n >= 2         -> periodic with T3 = n T2 = m T1
//!   case 3: alpha integer, Q1 = Q2 = 0  -> periodic with T3 = T2
//!   case 4: alpha integer, some Q != 0  -> resonant
//! where Q1 = (f, sin w0 t) and Q2 = (f, cos w0 t) over [0, T3].
//!
//! The rationality split is decided exactly in ScaledReal arithmetic; only
//! the Q zero-test is numeric, against a scale-aware tolerance that the
//! caller can override.

use crate::error::{Error, Result};
use crate::exactnum::{ratio_kind, RatioClass, ScaledReal};
use crate::forcing::PeriodicForcing;
use crate::quadrature::{project, PrefixTable};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    BoundedNonPeriodic,
    Periodic { t3: f64 },
    Resonant,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::BoundedNonPeriodic => "bounded-non-periodic",
            Verdict::Periodic { .. } => "periodic",
            Verdict::Resonant => "resonant",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub case_id: u8,
    pub verdict: Verdict,
    pub alpha: RatioClass,
    pub t1: f64,
    pub t2: f64,
    pub t3: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    /// L-infinity bound for cases 1 and 2
    pub sup_bound: Option<f64>,
    /// sqrt(Q1^2 + Q2^2)/w0, the amplitude increment per T3, for case 4
    pub growth_per_cycle: Option<f64>,
    pub q_tolerance: f64,
    /// the actual threshold the zero test used: q_tolerance * max(1, sup|f| T3)
    pub q_threshold: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// relative tolerance of the Q zero test
    pub q_tol: f64,
    /// run the numeric minimal-period check before classifying
    pub strict_minimality: bool,
    /// divisors tried by the strict check
    pub minimality_divisors: u32,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { q_tol: 1e-9, strict_minimality: false, minimality_divisors: 16 }
    }
}

/// Report shape emitted by the CLI; field order is the serialization order.
#[derive(Serialize)]
struct ClassificationReport<'a> {
    #[serde(rename = "caseId")]
    case_id: u8,
    verdict: &'a str,
    alpha: serde_json::Value,
    #[serde(rename = "T1")]
    t1: f64,
    #[serde(rename = "T2")]
    t2: f64,
    #[serde(rename = "T3")]
    t3: Option<f64>,
    #[serde(rename = "Q1")]
    q1: Option<f64>,
    #[serde(rename = "Q2")]
    q2: Option<f64>,
    #[serde(rename = "qTolerance")]
    q_tolerance: f64,
    #[serde(rename = "qThreshold")]
    q_threshold: Option<f64>,
    #[serde(rename = "supBound")]
    sup_bound: Option<f64>,
    #[serde(rename = "growthPerCycle")]
    growth_per_cycle: Option<f64>,
}

impl Classification {
    pub fn to_json(&self) -> serde_json::Value {
        let alpha = match &self.alpha {
            RatioClass::Irrational => serde_json::Value::String("irrational".into()),
            RatioClass::Rational { numer, denom } => {
                serde_json::json!({ "m": numer, "n": denom })
            }
        };
        serde_json::to_value(ClassificationReport {
            case_id: self.case_id,
            verdict: self.verdict.label(),
            alpha,
            t1: self.t1,
            t2: self.t2,
            t3: self.t3,
            q1: self.q1,
            q2: self.q2,
            q_tolerance: self.q_tolerance,
            q_threshold: self.q_threshold,
            sup_bound: self.sup_bound,
            growth_per_cycle: self.growth_per_cycle,
        })
        .expect("report serialization cannot fail")
    }
}

/// |sin(pi alpha)| evaluated exactly enough for the bound: exact integer
/// reduction for rational alpha, ScaledReal floats otherwise.
fn sin_pi_alpha(alpha: &RatioClass, t2: &ScaledReal, t1: &ScaledReal) -> f64 {
    match alpha {
        RatioClass::Rational { numer, denom } => {
            let rem = (*numer as u128) % (2 * *denom as u128);
            (std::f64::consts::PI * rem as f64 / *denom as f64).sin()
        }
        RatioClass::Irrational => {
            let a = t2.to_f64() / t1.to_f64();
            (std::f64::consts::PI * a).sin()
        }
    }
}

/// The case-1/2 bound ||x||_inf <= (2 T2 / w0) ||f||_inf (2/|sin(pi alpha)| + 1).
/// Not applicable when alpha is an integer (sin vanishes).
pub fn sup_bound(f: &PeriodicForcing, omega0: &ScaledReal, alpha: &RatioClass) -> Result<f64> {
    if alpha.is_integer() {
        return Err(Error::NotApplicable(
            "the L-infinity bound requires sin(pi alpha) != 0, i.e. alpha not an integer".into(),
        ));
    }
    let t1 = ScaledReal::two_pi().div(omega0)?;
    let s = sin_pi_alpha(alpha, f.period(), &t1).abs();
    let t2 = f.period_f64();
    let w0 = omega0.to_f64();
    Ok(2.0 * t2 / w0 * f.sup_norm() * (2.0 / s + 1.0))
}

/// Classify the response of x'' + w0^2 x = f with zero Cauchy data.
pub fn classify(
    f: &PeriodicForcing,
    omega0: &ScaledReal,
    opts: &ClassifyOptions,
) -> Result<Classification> {
    if !omega0.is_positive() {
        return Err(Error::InvalidArgument("omega0 must be positive".into()));
    }
    if !(opts.q_tol > 0.0) {
        return Err(Error::InvalidArgument("q tolerance must be positive".into()));
    }
    if opts.strict_minimality && !f.verify_minimal_period(opts.minimality_divisors)? {
        return Err(Error::InvalidArgument(
            "declared period failed the minimal-period check".into(),
        ));
    }
    let t1_exact = ScaledReal::two_pi().div(omega0)?;
    let t1 = t1_exact.to_f64();
    let t2 = f.period_f64();
    let alpha = ratio_kind(f.period(), &t1_exact)?;

    match &alpha {
        RatioClass::Irrational => {
            let bound = sup_bound(f, omega0, &alpha)?;
            Ok(Classification {
                case_id: 1,
                verdict: Verdict::BoundedNonPeriodic,
                alpha,
                t1,
                t2,
                t3: None,
                q1: None,
                q2: None,
                sup_bound: Some(bound),
                growth_per_cycle: None,
                q_tolerance: opts.q_tol,
                q_threshold: None,
            })
        }
        RatioClass::Rational { denom, .. } if *denom >= 2 => {
            let t3 = f.period().mul_int(*denom as i64).to_f64();
            let bound = sup_bound(f, omega0, &alpha)?;
            Ok(Classification {
                case_id: 2,
                verdict: Verdict::Periodic { t3 },
                alpha,
                t1,
                t2,
                t3: Some(t3),
                q1: None,
                q2: None,
                sup_bound: Some(bound),
                growth_per_cycle: None,
                q_tolerance: opts.q_tol,
                q_threshold: None,
            })
        }
        RatioClass::Rational { .. } => {
            // alpha integer: T3 = T2, the Q dichotomy decides
            let t3 = t2;
            let proj = project(f, omega0.to_f64(), t3)?;
            let threshold = opts.q_tol * (f.sup_norm() * t3).max(1.0);
            let resonant = proj.q1.abs().max(proj.q2.abs()) > threshold;
            if resonant {
                let growth = proj.q1.hypot(proj.q2) / omega0.to_f64();
                Ok(Classification {
                    case_id: 4,
                    verdict: Verdict::Resonant,
                    alpha,
                    t1,
                    t2,
                    t3: Some(t3),
                    q1: Some(proj.q1),
                    q2: Some(proj.q2),
                    sup_bound: None,
                    growth_per_cycle: Some(growth),
                    q_tolerance: opts.q_tol,
                    q_threshold: Some(threshold),
                })
            } else {
                Ok(Classification {
                    case_id: 3,
                    verdict: Verdict::Periodic { t3 },
                    alpha,
                    t1,
                    t2,
                    t3: Some(t3),
                    q1: Some(proj.q1),
                    q2: Some(proj.q2),
                    sup_bound: None,
                    growth_per_cycle: None,
                    q_tolerance: opts.q_tol,
                    q_threshold: Some(threshold),
                })
            }
        }
    }
}

/// A time t1 at which |x(t1)| provably exceeds L for a resonant (case 4)
/// classification, following the constructive proof:
///   Q1 != 0: t1 = T3 (floor(w0 L / |Q1|) + 2)
///   Q1 = 0, Q2 != 0: t1 = T3 (ceil((w0 L + |a|)/|Q2|) + 1) + T1/4,
/// with a the partial integral of f cos(w0 t) over the leading quarter
/// natural period.
pub fn resonance_witness(
    f: &PeriodicForcing,
    omega0: &ScaledReal,
    cls: &Classification,
    level: f64,
) -> Result<f64> {
    if cls.case_id != 4 {
        return Err(Error::InvalidState(format!(
            "resonance witness requires a case-4 classification, got case {}",
            cls.case_id
        )));
    }
    if !(level > 0.0) {
        return Err(Error::InvalidArgument("threshold level must be positive".into()));
    }
    let w0 = omega0.to_f64();
    let t3 = cls.t3.expect("case 4 always carries T3");
    let q1 = cls.q1.expect("case 4 always carries Q1");
    let q2 = cls.q2.expect("case 4 always carries Q2");
    let threshold = cls.q_threshold.unwrap_or(0.0);
    if q1.abs() > threshold {
        Ok(t3 * ((w0 * level / q1.abs()).floor() + 2.0))
    } else {
        let t1_quarter = cls.t1 / 4.0;
        let table = PrefixTable::build(f, w0)?;
        let (a, _) = table.partial(t1_quarter);
        Ok(t3 * (((w0 * level + a.abs()) / q2.abs()).ceil() + 1.0) + t1_quarter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::TrigKind;
    use std::f64::consts::PI;

    fn sr(num: i64, den: i64, e: i32) -> ScaledReal {
        ScaledReal::new(num, den, e).unwrap()
    }

    fn run(f: &PeriodicForcing, omega0: &ScaledReal) -> Classification {
        classify(f, omega0, &ClassifyOptions::default()).unwrap()
    }

    #[test]
    fn triangle_period_matching_is_resonant() {
        let f = PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let cls = run(&f, &sr(1, 2, 1));
        assert_eq!(cls.case_id, 4);
        assert_eq!(cls.verdict, Verdict::Resonant);
        assert!((cls.q1.unwrap() - 16.0 / (PI * PI)).abs() < 1e-12);
        assert_eq!(cls.alpha, RatioClass::Rational { numer: 1, denom: 1 });
    }

    #[test]
    fn triangle_half_ratio_is_periodic() {
        // T2 = 2 pi, w0 = 1/2 so T1 = 4 pi: case 2 with T3 = n T2 = 4 pi
        let f = PeriodicForcing::triangle(&sr(2, 1, 1)).unwrap();
        let cls = run(&f, &sr(1, 2, 0));
        assert_eq!(cls.case_id, 2);
        assert_eq!(cls.alpha, RatioClass::Rational { numer: 1, denom: 2 });
        match cls.verdict {
            Verdict::Periodic { t3 } => assert!((t3 - 4.0 * PI).abs() < 1e-12),
            ref other => panic!("expected periodic, got {other:?}"),
        }
        assert!(cls.sup_bound.is_some());
    }

    #[test]
    fn triangle_integer_multiple_is_resonant() {
        // T2 = 6, T1 = 2 (w0 = pi): alpha = 3
        let f = PeriodicForcing::triangle(&sr(6, 1, 0)).unwrap();
        let cls = run(&f, &sr(1, 1, 1));
        assert_eq!(cls.case_id, 4);
        assert_eq!(cls.alpha, RatioClass::Rational { numer: 3, denom: 1 });
        assert!((cls.q1.unwrap() - (-8.0 / (3.0 * PI * PI))).abs() < 1e-12);
    }

    #[test]
    fn cancellation_step_is_periodic_despite_matching() {
        let f = PeriodicForcing::cancellation_step(0.5).unwrap();
        let cls = run(&f, &sr(2, 1, 1));
        assert_eq!(cls.case_id, 3);
        match cls.verdict {
            Verdict::Periodic { t3 } => assert!((t3 - 1.0).abs() < 1e-12),
            ref other => panic!("expected periodic, got {other:?}"),
        }
        assert!(cls.q1.unwrap().abs() <= cls.q_threshold.unwrap());
        assert!(cls.q2.unwrap().abs() <= cls.q_threshold.unwrap());
    }

    #[test]
    fn irrational_ratio_is_bounded_non_periodic() {
        // f_i = sin(pi t): T2 = 2, w0 = 1 gives T1 = 2 pi
        let f = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 1), TrigKind::Sin, 0.0).unwrap();
        let cls = run(&f, &sr(1, 1, 0));
        assert_eq!(cls.case_id, 1);
        assert_eq!(cls.verdict, Verdict::BoundedNonPeriodic);
        assert_eq!(cls.alpha, RatioClass::Irrational);
        // bound value: (2*2/1) * 1 * (2/|sin 1| + 1)
        let expect = 4.0 * (2.0 / 1.0_f64.sin().abs() + 1.0);
        assert!((cls.sup_bound.unwrap() - expect).abs() < 1e-12);
        assert!((expect - 13.507).abs() < 1e-3);
    }

    #[test]
    fn every_case_is_reachable_and_exclusive() {
        let cases: Vec<(PeriodicForcing, ScaledReal, u8)> = vec![
            (PeriodicForcing::sinusoid(1.0, &sr(1, 1, 1), TrigKind::Sin, 0.0).unwrap(), sr(1, 1, 0), 1),
            (PeriodicForcing::rect_abs(&sr(1, 1, 0)).unwrap(), sr(1, 1, 0), 1),
            (PeriodicForcing::triangle(&sr(2, 1, 1)).unwrap(), sr(1, 2, 0), 2),
            (PeriodicForcing::cancellation_step(0.5).unwrap(), sr(2, 1, 1), 3),
            (PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap(), sr(1, 2, 1), 4),
            (PeriodicForcing::step_symmetric(&sr(2, 1, 0)).unwrap(), sr(1, 1, 1), 4),
            (PeriodicForcing::rect_half(&sr(4, 1, 0)).unwrap(), sr(1, 1, 1), 4),
        ];
        for (f, w0, expect) in cases {
            let cls = run(&f, &w0);
            assert_eq!(cls.case_id, expect, "{}", f.name());
            // structural invariants tying case id, verdict, and alpha
            match cls.case_id {
                1 => {
                    assert_eq!(cls.alpha, RatioClass::Irrational);
                    assert_eq!(cls.verdict, Verdict::BoundedNonPeriodic);
                }
                2 => {
                    assert!(matches!(cls.alpha, RatioClass::Rational { denom, .. } if denom >= 2));
                    assert!(matches!(cls.verdict, Verdict::Periodic { .. }));
                }
                3 | 4 => {
                    assert!(cls.alpha.is_integer());
                    if cls.case_id == 4 {
                        assert_eq!(cls.verdict, Verdict::Resonant);
                        assert!(cls.growth_per_cycle.unwrap() > 0.0);
                    } else {
                        assert!(matches!(cls.verdict, Verdict::Periodic { .. }));
                    }
                }
                other => panic!("impossible case id {other}"),
            }
        }
    }

    #[test]
    fn scaling_preserves_the_case() {
        let shapes: Vec<(PeriodicForcing, ScaledReal)> = vec![
            (PeriodicForcing::sinusoid(1.0, &sr(1, 1, 1), TrigKind::Sin, 0.0).unwrap(), sr(1, 1, 0)),
            (PeriodicForcing::triangle(&sr(2, 1, 1)).unwrap(), sr(1, 2, 0)),
            (PeriodicForcing::cancellation_step(0.5).unwrap(), sr(2, 1, 1)),
            (PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap(), sr(1, 2, 1)),
        ];
        for (f, w0) in shapes {
            let base = run(&f, &w0).case_id;
            for c in [0.001, -1.0, 250.0] {
                let scaled = f.scale(c).unwrap();
                assert_eq!(run(&scaled, &w0).case_id, base, "{} scaled by {c}", f.name());
            }
        }
    }

    #[test]
    fn sup_bound_not_applicable_for_integer_alpha() {
        let f = PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        match sup_bound(&f, &sr(1, 2, 1), &RatioClass::Rational { numer: 1, denom: 1 }) {
            Err(Error::NotApplicable(_)) => {}
            other => panic!("expected NotApplicable, got {other:?}"),
        }
    }

    #[test]
    fn sup_bound_scales_with_the_forcing() {
        let f = PeriodicForcing::triangle(&sr(2, 1, 1)).unwrap();
        let alpha = RatioClass::Rational { numer: 1, denom: 2 };
        let b1 = sup_bound(&f, &sr(1, 2, 0), &alpha).unwrap();
        let b3 = sup_bound(&f.scale(3.0).unwrap(), &sr(1, 2, 0), &alpha).unwrap();
        assert!((b3 - 3.0 * b1).abs() < 1e-9 * b3);
    }

    #[test]
    fn witness_formula_for_q1_branch() {
        // t1 = 4 (floor((pi/2) * 10 / (16/pi^2)) + 2) = 44
        let f = PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let cls = run(&f, &sr(1, 2, 1));
        let t1 = resonance_witness(&f, &sr(1, 2, 1), &cls, 10.0).unwrap();
        assert_eq!(t1, 44.0);
        // L -> 0+ floor vanishes: t1 = 2 T3
        let tiny = resonance_witness(&f, &sr(1, 2, 1), &cls, 1e-300).unwrap();
        assert_eq!(tiny, 8.0);
    }

    #[test]
    fn witness_rejects_non_resonant_classifications() {
        let f = PeriodicForcing::cancellation_step(0.5).unwrap();
        let cls = run(&f, &sr(2, 1, 1));
        match resonance_witness(&f, &sr(2, 1, 1), &cls, 10.0) {
            Err(Error::InvalidState(_)) => {}
            other => panic!("expected InvalidState, got {other:?}"),
        }
    }

    #[test]
    fn strict_minimality_rejects_padded_periods() {
        use crate::forcing::{ForcingSegment, ForcingTerm, Trig};
        // sin(t) declared with period 4 pi
        let fake = sr(4, 1, 1);
        let seg = ForcingSegment::new(
            0.0,
            fake.to_f64(),
            vec![ForcingTerm::new(vec![1.0], Some(Trig { kind: TrigKind::Sin, freq: 1.0, phase: 0.0 }))
                .unwrap()],
        )
        .unwrap();
        let f = PeriodicForcing::new("padded", fake, vec![seg]).unwrap();
        let opts = ClassifyOptions { strict_minimality: true, ..Default::default() };
        assert!(classify(&f, &sr(1, 1, 0), &opts).is_err());
        // non-strict mode trusts the declaration
        assert!(classify(&f, &sr(1, 1, 0), &ClassifyOptions::default()).is_ok());
    }

    #[test]
    fn report_json_shape() {
        let f = PeriodicForcing::triangle(&sr(4, 1, 0)).unwrap();
        let cls = run(&f, &sr(1, 2, 1));
        let json = cls.to_json();
        assert_eq!(json["caseId"], 4);
        assert_eq!(json["verdict"], "resonant");
        assert_eq!(json["alpha"]["m"], 1);
        assert_eq!(json["alpha"]["n"], 1);
        assert!(json["growthPerCycle"].as_f64().unwrap() > 0.0);
        let f_i = PeriodicForcing::sinusoid(1.0, &sr(1, 1, 1), TrigKind::Sin, 0.0).unwrap();
        let cls1 = run(&f_i, &sr(1, 1, 0));
        assert_eq!(cls1.to_json()["alpha"], "irrational");
    }
}
