//! Minimal double-double arithmetic.
//!
//! Used for phase reduction at large times (t mod T, frac(n*alpha)) where a
//! plain f64 would lose the phase after ~1e6 periods. Roughly 32 significant
//! digits; that keeps phase error near 1e-26 rad at n = 1e6.

use num_rational::BigRational;
use num_traits::ToPrimitive;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// pi as a double-double (hi is f64 pi, lo the next correction term).
pub(crate) const DD_PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion of a rational: hi is the rounded value, lo the
    /// rounded remainder, so hi + lo carries ~107 bits of the quotient.
    pub fn from_rational(r: &BigRational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let hi_rat = BigRational::from_float(hi).expect("finite float is rational");
        let lo = (r - hi_rat).to_f64().unwrap_or(0.0);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd { hi: -other.hi, lo: -other.lo })
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e + q3 }
    }

    pub fn floor(self) -> Dd {
        let fhi = self.hi.floor();
        if fhi == self.hi {
            // hi is an integer; the fractional part lives in lo
            let (hi, lo) = quick_two_sum(fhi, self.lo.floor());
            Dd { hi, lo }
        } else {
            Dd { hi: fhi, lo: 0.0 }
        }
    }

    /// Integer power, used for pi^e with small e.
    pub fn powi(self, e: i32) -> Dd {
        if e == 0 {
            return Dd::from_f64(1.0);
        }
        let mut acc = self;
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(self);
        }
        if e < 0 {
            Dd::from_f64(1.0).div(acc)
        } else {
            acc
        }
    }
}
