//! Exact arithmetic for periods and frequencies of the form q * pi^e.
//!
//! The period-ratio test at the heart of the classification is discontinuous
//! in alpha = T2/T1, so it must never be decided in floating point. Every
//! period and frequency in the toolkit is a rational multiple of a power of
//! pi; products and quotients stay in that form and the rationality of a
//! ratio is decidable exactly (pi is transcendental, so the pi exponents must
//! match for the ratio to be rational).
//!
//! Sums of mixed pi powers (1 + pi) are deliberately not representable;
//! nothing in the classification needs them.

use crate::dd::{Dd, DD_PI};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// An exact number `coeff * pi^pi_exp` with `coeff` a rational in lowest
/// terms (positive denominator) and canonical zero (`coeff = 0` forces
/// `pi_exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledReal {
    coeff: BigRational,
    pi_exp: i32,
}

/// Rationality class of a ratio of two `ScaledReal`s.
///
/// `Rational` carries alpha = numer/denom in lowest terms, both >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioClass {
    Irrational,
    Rational { numer: u64, denom: u64 },
}

impl RatioClass {
    pub fn is_integer(&self) -> bool {
        matches!(self, RatioClass::Rational { denom: 1, .. })
    }
}

impl fmt::Display for RatioClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioClass::Irrational => write!(f, "irrational"),
            RatioClass::Rational { numer, denom } => write!(f, "{numer}/{denom}"),
        }
    }
}

impl ScaledReal {
    /// Build `num/den * pi^pi_exp` in canonical form.
    pub fn new(num: i64, den: i64, pi_exp: i32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self::from_rational(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            pi_exp,
        ))
    }

    pub fn from_rational(coeff: BigRational, pi_exp: i32) -> Self {
        let pi_exp = if coeff.is_zero() { 0 } else { pi_exp };
        ScaledReal { coeff, pi_exp }
    }

    pub fn integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)), 0)
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn pi() -> Self {
        Self::from_rational(BigRational::one(), 1)
    }

    pub fn two_pi() -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(2)), 1)
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn pi_exp(&self) -> i32 {
        self.pi_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn mul(&self, other: &ScaledReal) -> ScaledReal {
        ScaledReal::from_rational(&self.coeff * &other.coeff, self.pi_exp + other.pi_exp)
    }

    pub fn div(&self, other: &ScaledReal) -> Result<ScaledReal> {
        if other.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        Ok(ScaledReal::from_rational(
            &self.coeff / &other.coeff,
            self.pi_exp - other.pi_exp,
        ))
    }

    pub fn recip(&self) -> Result<ScaledReal> {
        ScaledReal::one().div(self)
    }

    /// Exact scaling by an integer (used for T3 = n * T2).
    pub fn mul_int(&self, n: i64) -> ScaledReal {
        ScaledReal::from_rational(&self.coeff * BigInt::from(n), self.pi_exp)
    }

    pub(crate) fn to_dd(&self) -> Dd {
        Dd::from_rational(&self.coeff).mul(DD_PI.powi(self.pi_exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_dd().to_f64()
    }

    /// Canonical JSON emission {"num": p, "den": q, "piExp": e}. Components
    /// beyond i64 fall back to decimal strings.
    pub fn to_canonical_json(&self) -> serde_json::Value {
        let int = |b: &BigInt| match b.to_i64() {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::String(b.to_string()),
        };
        serde_json::json!({
            "num": int(self.coeff.numer()),
            "den": int(self.coeff.denom()),
            "piExp": self.pi_exp,
        })
    }
}

impl serde::Serialize for ScaledReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_canonical_json().serialize(serializer)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff.numer())?;
        if !self.coeff.denom().is_one() {
            write!(f, "/{}", self.coeff.denom())?;
        }
        match self.pi_exp {
            0 => Ok(()),
            1 => write!(f, "*pi"),
            e => write!(f, "*pi^{e}"),
        }
    }
}

impl FromStr for ScaledReal {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/q*pi`, `p/q*pi^e` (and `pi`, `pi^e` alone).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidArgument(format!("cannot parse {s:?} as p/q*pi^e: {msg}"));
        let s_trim = s.trim();
        if s_trim.is_empty() {
            return Err(bad("empty"));
        }
        let mut parts = s_trim.splitn(2, '*');
        let first = parts.next().unwrap().trim();
        let second = parts.next().map(str::trim);

        let (rational_part, pi_part) = if first == "pi" || first.starts_with("pi^") {
            if second.is_some() {
                return Err(bad("pi factor must come last"));
            }
            (None, Some(first))
        } else {
            (Some(first), second)
        };

        let coeff = match rational_part {
            None => BigRational::one(),
            Some(r) => {
                let mut nd = r.splitn(2, '/');
                let num: BigInt = nd
                    .next()
                    .unwrap()
                    .trim()
                    .parse()
                    .map_err(|_| bad("invalid numerator"))?;
                let den: BigInt = match nd.next() {
                    None => BigInt::one(),
                    Some(d) => d.trim().parse().map_err(|_| bad("invalid denominator"))?,
                };
                if den.is_zero() {
                    return Err(bad("zero denominator"));
                }
                BigRational::new(num, den)
            }
        };

        let pi_exp = match pi_part {
            None => 0,
            Some("pi") => 1,
            Some(p) => {
                let exp = p
                    .strip_prefix("pi^")
                    .ok_or_else(|| bad("expected pi or pi^e"))?;
                exp.trim().parse().map_err(|_| bad("invalid pi exponent"))?
            }
        };

        Ok(ScaledReal::from_rational(coeff, pi_exp))
    }
}

/// Decide the rationality of T2/T1.
///
/// Both inputs must be positive. The ratio is rational exactly when the pi
/// exponents agree; otherwise the ratio is a nonzero rational times a nonzero
/// power of pi, which is irrational by the transcendence of pi.
pub fn ratio_kind(t2: &ScaledReal, t1: &ScaledReal) -> Result<RatioClass> {
    if !t2.is_positive() || !t1.is_positive() {
        return Err(Error::InvalidArgument("ratio_kind requires positive inputs".into()));
    }
    if t2.pi_exp != t1.pi_exp {
        return Ok(RatioClass::Irrational);
    }
    let q = &t2.coeff / &t1.coeff;
    let numer = q.numer().to_u64().ok_or_else(|| {
        Error::InvalidArgument("period ratio numerator exceeds supported magnitude".into())
    })?;
    let denom = q.denom().to_u64().ok_or_else(|| {
        Error::InvalidArgument("period ratio denominator exceeds supported magnitude".into())
    })?;
    Ok(RatioClass::Rational { numer, denom })
}

/// Result of snapping a float to an exact representation.
#[derive(Clone, Debug)]
pub struct FloatApprox {
    pub value: ScaledReal,
    /// |x - value| after the snap; reported so the caller can judge the fit.
    pub residual: f64,
}

/// Best rational approximation of `target >= 0` with denominator bounded by
/// `max_den`, via the continued-fraction convergents and the closing
/// semiconvergent.
fn best_bounded_rational(target: &BigRational, max_den: &BigInt) -> BigRational {
    debug_assert!(!target.is_negative());
    let mut h_prev = BigInt::one();
    let mut k_prev = BigInt::zero();
    let mut h = target.to_integer();
    let mut k = BigInt::one();
    let mut frac = target - BigRational::from_integer(h.clone());

    for _ in 0..300 {
        if frac.is_zero() {
            break;
        }
        let inv = frac.recip();
        let a = inv.to_integer();
        frac = inv - BigRational::from_integer(a.clone());
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > *max_den {
            // best semiconvergent between the last two convergents
            let a_max = (max_den - &k_prev) / &k;
            if a_max.is_positive() {
                let cand = BigRational::new(&h_prev + &a_max * &h, &k_prev + &a_max * &k);
                let conv = BigRational::new(h.clone(), k.clone());
                if (target - &cand).abs() < (target - &conv).abs() {
                    return cand;
                }
            }
            return BigRational::new(h, k);
        }
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
    BigRational::new(h, k)
}

/// Snap a float to `q * pi^pi_hint` with denominator of q bounded by
/// `max_denominator`, failing when the residual exceeds `tol`.
///
/// Never snaps silently: the residual is always reported, and a caller that
/// wants the best effort regardless can pass `tol = f64::INFINITY`.
pub fn float_to_scaled(
    x: f64,
    max_denominator: u64,
    pi_hint: i32,
    tol: f64,
) -> Result<FloatApprox> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument("cannot approximate a non-finite value".into()));
    }
    if max_denominator < 1 {
        return Err(Error::InvalidArgument("max denominator must be >= 1".into()));
    }
    let y = x / DD_PI.powi(pi_hint).to_f64();
    let y_rat = BigRational::from_float(y.abs())
        .unwrap_or_else(|| BigRational::from_integer(BigInt::zero()));
    let mut best = best_bounded_rational(&y_rat, &BigInt::from(max_denominator));
    if y < 0.0 {
        best = -best;
    }
    let value = ScaledReal::from_rational(best, pi_hint);
    let residual = (x - value.to_f64()).abs();
    if residual > tol {
        return Err(Error::NoExactRepresentation { residual });
    }
    Ok(FloatApprox { value, residual })
}
