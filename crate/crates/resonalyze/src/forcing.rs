//! Periodic forcing functions: piecewise polynomial-times-sinusoid segments
//! on one period, extended periodically.
//!
//! The term basis (polynomial times a single sinusoid) is the smallest one
//! that covers every builtin exactly and still admits closed-form Duhamel
//! integrals. Jumps follow the right-continuity convention: at a segment
//! boundary the segment starting there wins.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::exactnum::ScaledReal;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Sin,
    Cos,
}

/// A sinusoidal factor trig(freq * t + phase), freq > 0 in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trig {
    pub kind: TrigKind,
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Trig {
    fn eval(&self, t: f64) -> f64 {
        let arg = self.freq * t + self.phase;
        match self.kind {
            TrigKind::Sin => arg.sin(),
            TrigKind::Cos => arg.cos(),
        }
    }
}

/// One additive term: (c0 + c1 t + ... + cP t^P) * optional trig factor.
/// `t` is the position inside the base period, in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingTerm {
    poly: Vec<f64>,
    trig: Option<Trig>,
}

impl ForcingTerm {
    pub fn new(poly: Vec<f64>, trig: Option<Trig>) -> Result<Self> {
        let mut poly = poly;
        while poly.len() > 1 && poly.last() == Some(&0.0) {
            poly.pop();
        }
        if poly.is_empty() {
            return Err(Error::InvalidArgument("term polynomial must be non-empty".into()));
        }
        if !poly.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
        }
        if let Some(trig) = &trig {
            if !(trig.freq > 0.0) || !trig.phase.is_finite() {
                return Err(Error::InvalidArgument(
                    "trig factor requires freq > 0 and finite phase".into(),
                ));
            }
        }
        Ok(ForcingTerm { poly, trig })
    }

    pub fn constant(value: f64) -> Self {
        ForcingTerm { poly: vec![value], trig: None }
    }

    pub fn poly(&self) -> &[f64] {
        &self.poly
    }

    pub fn trig(&self) -> Option<&Trig> {
        self.trig.as_ref()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut p = 0.0;
        for &c in self.poly.iter().rev() {
            p = p * t + c;
        }
        match &self.trig {
            None => p,
            Some(trig) => p * trig.eval(t),
        }
    }

    fn scaled(&self, c: f64) -> Self {
        ForcingTerm { poly: self.poly.iter().map(|&p| p * c).collect(), trig: self.trig }
    }
}

/// A piece of the base period: value = sum of terms on [start, end).
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingSegment {
    pub start: f64,
    pub end: f64,
    pub terms: Vec<ForcingTerm>,
}

impl ForcingSegment {
    pub fn new(start: f64, end: f64, terms: Vec<ForcingTerm>) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidArgument(format!(
                "segment needs finite start < end, got [{start}, {end}]"
            )));
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("segment needs at least one term".into()));
        }
        Ok(ForcingSegment { start, end, terms })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }
}

/// A periodic forcing: exact minimal period T2 plus the segments of one
/// period. Immutable after construction.
#[derive(Clone, Debug)]
pub struct PeriodicForcing {
    name: String,
    period: ScaledReal,
    period_f: f64,
    segments: Vec<ForcingSegment>,
}

impl PeriodicForcing {
    /// Validates that the segments partition [0, T2) (gaps below 1e-12
    /// relative are snapped shut) and that the function is not constant,
    /// since a constant has no minimal period.
    pub fn new(name: impl Into<String>, period: ScaledReal, segments: Vec<ForcingSegment>) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        let period_f = period.to_f64();
        if segments.is_empty() {
            return Err(Error::InvalidArgument("forcing needs at least one segment".into()));
        }
        let snap = 1e-12 * period_f;
        let mut segments = segments;
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        if segments[0].start.abs() > snap {
            return Err(Error::InvalidArgument("first segment must start at 0".into()));
        }
        segments[0].start = 0.0;
        for i in 1..segments.len() {
            let prev_end = segments[i - 1].end;
            if (segments[i].start - prev_end).abs() > snap {
                return Err(Error::InvalidArgument(format!(
                    "segments must partition the period without gaps or overlaps \
                     (segment {} starts at {} but previous ends at {prev_end})",
                    i, segments[i].start
                )));
            }
            segments[i].start = prev_end;
        }
        let last_end = segments.last().unwrap().end;
        if (last_end - period_f).abs() > snap {
            return Err(Error::InvalidArgument(format!(
                "segments cover [0, {last_end}] but the period is {period_f}"
            )));
        }
        segments.last_mut().unwrap().end = period_f;
        for seg in &segments {
            if seg.end <= seg.start {
                return Err(Error::InvalidArgument("degenerate segment after snapping".into()));
            }
        }

        let forcing = PeriodicForcing { name: name.into(), period, period_f, segments };
        if forcing.looks_constant() {
            return Err(Error::InvalidArgument(
                "forcing is constant on its period; constants have no minimal period".into(),
            ));
        }
        Ok(forcing)
    }

    fn looks_constant(&self) -> bool {
        let n = 512;
        let first = self.eval_base(0.0);
        let mut spread = 0.0_f64;
        let mut scale = first.abs();
        for i in 0..n {
            // golden-ratio offset keeps the probe off symmetric lattices
            let t = (i as f64 + 0.381_966) / n as f64 * self.period_f;
            let v = self.eval_base(t);
            spread = spread.max((v - first).abs());
            scale = scale.max(v.abs());
        }
        // relative to the function's own scale, so tiny amplitudes are
        // still recognized as genuinely varying
        scale == 0.0 || spread <= 1e-12 * scale
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn period(&self) -> &ScaledReal {
        &self.period
    }

    pub fn period_f64(&self) -> f64 {
        self.period_f
    }

    pub fn segments(&self) -> &[ForcingSegment] {
        &self.segments
    }

    /// Segment boundaries 0 = tau_0 < ... < tau_M = T2.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bp: Vec<f64> = self.segments.iter().map(|s| s.start).collect();
        bp.push(self.period_f);
        bp
    }

    /// Reduce t into [0, T2). Uses exact rational remainders when the period
    /// carries no power of pi, double-double reduction otherwise, so the
    /// phase survives t up to ~1e6 periods.
    pub fn reduce(&self, t: f64) -> f64 {
        if t >= 0.0 && t < self.period_f {
            return t;
        }
        let r = if self.period.pi_exp() == 0 {
            match BigRational::from_float(t) {
                Some(t_rat) => {
                    let q = (&t_rat / self.period.coeff()).floor();
                    (t_rat - q * self.period.coeff()).to_f64().unwrap_or(0.0)
                }
                None => 0.0,
            }
        } else {
            let t_dd = Dd::from_f64(t);
            let period_dd = self.period.to_dd();
            let q = t_dd.div(period_dd).floor();
            t_dd.sub(period_dd.mul(q)).to_f64()
        };
        if r < 0.0 {
            r + self.period_f
        } else if r >= self.period_f {
            r - self.period_f
        } else {
            r
        }
    }

    fn segment_index(&self, r: f64) -> usize {
        let i = self.segments.partition_point(|s| s.start <= r);
        i.saturating_sub(1)
    }

    fn eval_base(&self, r: f64) -> f64 {
        self.segments[self.segment_index(r)].eval(r)
    }

    /// Value of the periodic extension at time t; at a jump the right limit.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.eval_base(self.reduce(t))
    }

    /// When the forcing is a single pure sinusoid A * trig(w t + phase),
    /// return (A, trig). The damped closed forms only exist for this shape.
    pub fn as_pure_sinusoid(&self) -> Option<(f64, Trig)> {
        if self.segments.len() != 1 {
            return None;
        }
        let seg = &self.segments[0];
        if seg.terms.len() != 1 {
            return None;
        }
        let term = &seg.terms[0];
        if term.poly().len() != 1 {
            return None;
        }
        term.trig().map(|trig| (term.poly()[0], *trig))
    }

    /// Rescale by a nonzero factor (used for modal coefficients).
    pub fn scale(&self, c: f64) -> Result<PeriodicForcing> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument("scale factor must be finite and nonzero".into()));
        }
        let segments = self
            .segments
            .iter()
            .map(|s| ForcingSegment {
                start: s.start,
                end: s.end,
                terms: s.terms.iter().map(|t| t.scaled(c)).collect(),
            })
            .collect();
        Ok(PeriodicForcing {
            name: format!("{}*{}", c, self.name),
            period: self.period.clone(),
            period_f: self.period_f,
            segments,
        })
    }

    /// Upper bound on sup |f| over one period, tight to ~1e-6 relative for
    /// the term basis. Combines an exact coefficient bound (sum over terms of
    /// max |poly| on the segment, with |trig| <= 1) with a refined grid
    /// search, and returns whichever is smaller while staying an upper bound.
    pub fn sup_norm(&self) -> f64 {
        let mut coeff_bound = 0.0_f64;
        let mut grid_max = 0.0_f64;
        for seg in &self.segments {
            let mut seg_bound = 0.0;
            let mut max_freq = 0.0_f64;
            for term in &seg.terms {
                seg_bound += poly_abs_max(&term.poly, seg.start, seg.end);
                if let Some(trig) = &term.trig {
                    max_freq = max_freq.max(trig.freq);
                }
            }
            coeff_bound = coeff_bound.max(seg_bound);

            let len = seg.end - seg.start;
            let n = (64.0 * (max_freq * len / std::f64::consts::TAU).ceil()).max(512.0) as usize;
            let h = len / n as f64;
            let mut prev2 = seg.eval(seg.start).abs();
            let mut prev1 = seg.eval(seg.start + h).abs();
            grid_max = grid_max.max(prev2).max(prev1);
            for i in 2..=n {
                let t = if i == n { seg.end } else { seg.start + i as f64 * h };
                let v = seg.eval(t).abs();
                grid_max = grid_max.max(v);
                if prev1 >= prev2 && prev1 >= v {
                    // local max of |f|; refine by golden section
                    let refined = golden_max(
                        |x| seg.eval(x).abs(),
                        seg.start + (i - 2) as f64 * h,
                        t,
                    );
                    grid_max = grid_max.max(refined);
                }
                prev2 = prev1;
                prev1 = v;
            }
        }
        coeff_bound.min(grid_max * (1.0 + 1e-6))
    }

    /// Numeric check that the declared period is minimal: every proper
    /// divisor T2/k (k = 2..=max_divisor) must fail to be a period on a
    /// dense grid. Heuristic by nature; any true period of the extension is
    /// an integer multiple of the minimal one, so divisors are the only
    /// candidates below T2.
    pub fn verify_minimal_period(&self, max_divisor: u32) -> Result<bool> {
        if max_divisor < 2 {
            return Err(Error::InvalidArgument("max divisor must be >= 2".into()));
        }
        let threshold = 1e-9 * self.sup_norm();
        let n = 2048;
        for k in 2..=max_divisor {
            let shift = self.period_f / k as f64;
            let mut max_dev = 0.0_f64;
            for i in 0..n {
                let t = (i as f64 + 0.381_966) / n as f64 * self.period_f;
                max_dev = max_dev.max((self.evaluate(t) - self.evaluate(t + shift)).abs());
                if max_dev > threshold {
                    break;
                }
            }
            if max_dev <= threshold {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // ---- builtins -----------------------------------------------------

    /// A0 * trig(omega t + phase). The minimal period 2*pi/omega is exact.
    pub fn sinusoid(amplitude: f64, omega: &ScaledReal, kind: TrigKind, phase: f64) -> Result<Self> {
        if amplitude == 0.0 || !amplitude.is_finite() {
            return Err(Error::InvalidArgument(
                "sinusoid amplitude must be nonzero (a zero forcing is constant)".into(),
            ));
        }
        if !omega.is_positive() {
            return Err(Error::InvalidArgument("sinusoid frequency must be positive".into()));
        }
        let period = ScaledReal::two_pi().div(omega)?;
        let period_f = period.to_f64();
        let term = ForcingTerm::new(
            vec![amplitude],
            Some(Trig { kind, freq: omega.to_f64(), phase }),
        )?;
        let seg = ForcingSegment::new(0.0, period_f, vec![term])?;
        let kind_name = match kind {
            TrigKind::Sin => "sin",
            TrigKind::Cos => "cos",
        };
        PeriodicForcing::new(
            format!("sinusoid({amplitude}*{kind_name}({omega}*t))"),
            period,
            vec![seg],
        )
    }

    /// Odd unit triangle wave mirroring sin: 4t/T on [0,T/4], 2-4t/T on
    /// [T/4,3T/4], 4t/T-4 on [3T/4,T].
    pub fn triangle(period: &ScaledReal) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument("triangle period must be positive".into()));
        }
        let t = period.to_f64();
        let slope = 4.0 / t;
        let segs = vec![
            ForcingSegment::new(0.0, t / 4.0, vec![ForcingTerm::new(vec![0.0, slope], None)?])?,
            ForcingSegment::new(
                t / 4.0,
                3.0 * t / 4.0,
                vec![ForcingTerm::new(vec![2.0, -slope], None)?],
            )?,
            ForcingSegment::new(
                3.0 * t / 4.0,
                t,
                vec![ForcingTerm::new(vec![-4.0, slope], None)?],
            )?,
        ];
        PeriodicForcing::new(format!("triangle(T2={period})"), period.clone(), segs)
    }

    /// Step function symmetric about the half period: 1 on the outer
    /// quarters, 0 in between.
    pub fn step_symmetric(period: &ScaledReal) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument("step period must be positive".into()));
        }
        let t = period.to_f64();
        let segs = vec![
            ForcingSegment::new(0.0, t / 4.0, vec![ForcingTerm::constant(1.0)])?,
            ForcingSegment::new(t / 4.0, 3.0 * t / 4.0, vec![ForcingTerm::constant(0.0)])?,
            ForcingSegment::new(3.0 * t / 4.0, t, vec![ForcingTerm::constant(1.0)])?,
        ];
        PeriodicForcing::new(format!("step_symmetric(T2={period})"), period.clone(), segs)
    }

    /// Rectified |sin(2 pi t / T0)|; the minimal period is T0/2.
    pub fn rect_abs(t0: &ScaledReal) -> Result<Self> {
        if !t0.is_positive() {
            return Err(Error::InvalidArgument("rect_abs base period must be positive".into()));
        }
        let period = t0.mul(&ScaledReal::new(1, 2, 0)?);
        let period_f = period.to_f64();
        let freq = ScaledReal::two_pi().div(t0)?.to_f64();
        let seg = ForcingSegment::new(
            0.0,
            period_f,
            vec![ForcingTerm::new(vec![1.0], Some(Trig { kind: TrigKind::Sin, freq, phase: 0.0 }))?],
        )?;
        PeriodicForcing::new(format!("rect_abs(T0={t0})"), period, vec![seg])
    }

    /// Half-wave rectified max(sin(2 pi t / T0), 0); period T0.
    pub fn rect_half(t0: &ScaledReal) -> Result<Self> {
        if !t0.is_positive() {
            return Err(Error::InvalidArgument("rect_half base period must be positive".into()));
        }
        let period_f = t0.to_f64();
        let freq = ScaledReal::two_pi().div(t0)?.to_f64();
        let segs = vec![
            ForcingSegment::new(
                0.0,
                period_f / 2.0,
                vec![ForcingTerm::new(vec![1.0], Some(Trig { kind: TrigKind::Sin, freq, phase: 0.0 }))?],
            )?,
            ForcingSegment::new(period_f / 2.0, period_f, vec![ForcingTerm::constant(0.0)])?,
        ];
        PeriodicForcing::new(format!("rect_half(T0={t0})"), t0.clone(), segs)
    }

    /// Two-level step function on the unit interval whose projections onto
    /// sin(2 pi t) and cos(2 pi t) both vanish: level B on \[1/16, 3/16\] and
    /// A on \[3/8, 7/8\], with B chosen by `derive_cancellation_level`.
    pub fn cancellation_step(amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidArgument("cancellation level A must be positive".into()));
        }
        let b = derive_cancellation_level(amplitude);
        let segs = vec![
            ForcingSegment::new(0.0, 1.0 / 16.0, vec![ForcingTerm::constant(0.0)])?,
            ForcingSegment::new(1.0 / 16.0, 3.0 / 16.0, vec![ForcingTerm::constant(b)])?,
            ForcingSegment::new(3.0 / 16.0, 3.0 / 8.0, vec![ForcingTerm::constant(0.0)])?,
            ForcingSegment::new(3.0 / 8.0, 7.0 / 8.0, vec![ForcingTerm::constant(amplitude)])?,
            ForcingSegment::new(7.0 / 8.0, 1.0, vec![ForcingTerm::constant(0.0)])?,
        ];
        PeriodicForcing::new(
            format!("cancellation_step(A={amplitude})"),
            ScaledReal::one(),
            segs,
        )
    }
}

/// The level B making both first-mode projections of the cancellation step
/// vanish:
///   B * int_{1/16}^{3/16} cos(2 pi x) dx + A * int_{3/8}^{7/8} cos(2 pi x) dx = 0,
/// which evaluates to B = A * sqrt(2) / (sin(3 pi / 8) - sin(pi / 8)). The
/// same B cancels the sine projection.
pub fn derive_cancellation_level(amplitude: f64) -> f64 {
    let s3 = (3.0 * std::f64::consts::PI / 8.0).sin();
    let s1 = (std::f64::consts::PI / 8.0).sin();
    amplitude * std::f64::consts::SQRT_2 / (s3 - s1)
}

/// Max of |poly| on [a, b] via endpoints plus critical points.
fn poly_abs_max(poly: &[f64], a: f64, b: f64) -> f64 {
    let eval = |t: f64| {
        let mut p = 0.0;
        for &c in poly.iter().rev() {
            p = p * t + c;
        }
        p
    };
    let mut best = eval(a).abs().max(eval(b).abs());
    if poly.len() <= 1 {
        return best;
    }
    // derivative coefficients
    let deriv: Vec<f64> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(p, &c)| c * p as f64)
        .collect();
    let deval = |t: f64| {
        let mut p = 0.0;
        for &c in deriv.iter().rev() {
            p = p * t + c;
        }
        p
    };
    match deriv.len() {
        1 => {} // constant derivative: no interior critical point
        2 => {
            let root = -deriv[0] / deriv[1];
            if root > a && root < b {
                best = best.max(eval(root).abs());
            }
        }
        _ => {
            // scan for sign changes of the derivative and bisect
            let n = 256;
            let h = (b - a) / n as f64;
            let mut prev = deval(a);
            for i in 1..=n {
                let t = a + i as f64 * h;
                let cur = deval(t);
                if prev == 0.0 {
                    best = best.max(eval(t - h).abs());
                } else if prev.signum() != cur.signum() {
                    let (mut lo, mut hi) = (t - h, t);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if deval(mid).signum() == prev.signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    best = best.max(eval(0.5 * (lo + hi)).abs());
                }
                prev = cur;
            }
        }
    }
    best
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}
