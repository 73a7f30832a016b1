//! Certified real and complex intervals over MPFR.
//!
//! Every operation rounds the lower endpoint toward -inf and the upper
//! endpoint toward +inf, so the true value always lies in `[lo, hi]`.

use std::fmt;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Largest precision tried before giving up.
pub const MAX_PRECISION: u32 = 1024;
/// Significant digits used when rendering values.
pub const DISPLAY_DIGITS: usize = 30;

/// Runs `attempt` at `start` bits, doubling until it returns `Some` or the
/// precision would exceed [`MAX_PRECISION`]. Returns the value and the
/// precision that produced it.
pub fn with_escalation<T>(start: u32, mut attempt: impl FnMut(u32) -> Option<T>) -> Option<(T, u32)> {
    let mut prec = start.max(32);
    loop {
        if let Some(v) = attempt(prec) {
            return Some((v, prec));
        }
        if prec >= MAX_PRECISION {
            return None;
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

macro_rules! rounded {
    ($prec:expr, $val:expr, $round:expr) => {
        Float::with_val_round($prec, $val, $round).0
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct Real {
    lo: Float,
    hi: Float,
}

impl Real {
    pub fn from_bounds(lo: Float, hi: Float) -> Real {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Real { lo, hi }
    }

    pub fn from_int(v: &Integer, prec: u32) -> Real {
        Real {
            lo: rounded!(prec, v, Round::Down),
            hi: rounded!(prec, v, Round::Up),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Real {
        Real::from_int(&Integer::from(v), prec)
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Real {
        Real {
            lo: rounded!(prec, v, Round::Down),
            hi: rounded!(prec, v, Round::Up),
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Real {
        Real::from_rational(&Rational::from((num, den)), prec)
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64(v: f64, prec: u32) -> Real {
        let p = prec.max(64);
        let x = Float::with_val(p, v);
        Real { lo: x.clone(), hi: x }
    }

    /// Interval around a point with the given radius.
    pub fn ball(center: &Float, radius: &Float, prec: u32) -> Real {
        Real {
            lo: rounded!(prec, center - radius, Round::Down),
            hi: rounded!(prec, center + radius, Round::Up),
        }
    }

    pub fn pi(prec: u32) -> Real {
        Real {
            lo: rounded!(prec, Constant::Pi, Round::Down),
            hi: rounded!(prec, Constant::Pi, Round::Up),
        }
    }

    pub fn ln2(prec: u32) -> Real {
        Real {
            lo: rounded!(prec, Constant::Log2, Round::Down),
            hi: rounded!(prec, Constant::Log2, Round::Up),
        }
    }

    pub fn zero(prec: u32) -> Real {
        Real::from_i64(0, prec)
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Midpoint, rounded to nearest.
    pub fn mid(&self) -> Float {
        let p = self.prec() + 2;
        let s = rounded!(p, &self.lo + &self.hi, Round::Nearest);
        s / 2u32
    }

    /// Half-width, rounded up.
    pub fn radius(&self) -> Float {
        let p = self.prec();
        let w = rounded!(p, &self.hi - &self.lo, Round::Up);
        w / 2u32
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag(&self) -> Float {
        let a = Float::with_val(self.lo.prec(), self.lo.abs_ref());
        let b = Float::with_val(self.hi.prec(), self.hi.abs_ref());
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `|x|` over the interval.
    pub fn mig(&self) -> Float {
        let p = self.prec();
        if self.contains_zero() {
            Float::new(p)
        } else if self.lo.is_sign_positive() {
            self.lo.clone()
        } else {
            Float::with_val(p, -&self.hi)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn contains_zero(&self) -> bool {
        !(self.lo > 0) && !(self.hi < 0)
    }

    pub fn contains(&self, v: &Float) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    /// Certainly `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lo > 0
    }

    /// Certainly `< 0`.
    pub fn is_negative(&self) -> bool {
        self.hi < 0
    }

    /// Certainly `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.lo >= 0
    }

    /// `Some(true)` if every point is below every point of `other`,
    /// `Some(false)` if none is, `None` when the intervals overlap.
    pub fn lt(&self, other: &Real) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Certified `self <= other`, or `None` when undecided.
    pub fn le(&self, other: &Real) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn ge(&self, other: &Real) -> Option<bool> {
        other.le(self)
    }

    pub fn gt(&self, other: &Real) -> Option<bool> {
        other.lt(self)
    }

    /// `floor(x)` when it is the same at both endpoints.
    pub fn floor(&self) -> Option<Integer> {
        let a = self.lo.to_integer_round(Round::Down)?.0;
        let b = self.hi.to_integer_round(Round::Down)?.0;
        (a == b).then_some(a)
    }

    /// `floor` of the upper endpoint, an upper bound for the true floor.
    pub fn floor_upper(&self) -> Option<Integer> {
        Some(self.hi.to_integer_round(Round::Down)?.0)
    }

    pub fn neg(&self) -> Real {
        Real {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }

    pub fn abs(&self) -> Real {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            self.neg()
        } else {
            Real { lo: Float::new(self.prec()), hi: self.mag() }
        }
    }

    pub fn add(&self, o: &Real) -> Real {
        let p = self.prec().max(o.prec());
        Real {
            lo: rounded!(p, &self.lo + &o.lo, Round::Down),
            hi: rounded!(p, &self.hi + &o.hi, Round::Up),
        }
    }

    pub fn sub(&self, o: &Real) -> Real {
        let p = self.prec().max(o.prec());
        Real {
            lo: rounded!(p, &self.lo - &o.hi, Round::Down),
            hi: rounded!(p, &self.hi - &o.lo, Round::Up),
        }
    }

    pub fn mul(&self, o: &Real) -> Real {
        let p = self.prec().max(o.prec());
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let d = product(p, a, b, Round::Down);
            let u = product(p, a, b, Round::Up);
            if lo.as_ref().map_or(true, |l| d < *l) {
                lo = Some(d);
            }
            if hi.as_ref().map_or(true, |h| u > *h) {
                hi = Some(u);
            }
        }
        Real { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    pub fn mul_int(&self, k: &Integer) -> Real {
        self.mul(&Real::from_int(k, self.prec()))
    }

    pub fn sqr(&self) -> Real {
        let p = self.prec();
        let l2d = rounded!(p, self.lo.square_ref(), Round::Down);
        let l2u = rounded!(p, self.lo.square_ref(), Round::Up);
        let h2d = rounded!(p, self.hi.square_ref(), Round::Down);
        let h2u = rounded!(p, self.hi.square_ref(), Round::Up);
        if self.lo >= 0 {
            Real { lo: l2d, hi: h2u }
        } else if self.hi <= 0 {
            Real { lo: h2d, hi: l2u }
        } else {
            Real { lo: Float::new(p), hi: if l2u > h2u { l2u } else { h2u } }
        }
    }

    /// Division. A divisor interval containing zero yields `(-inf, inf)`.
    pub fn div(&self, o: &Real) -> Real {
        let p = self.prec().max(o.prec());
        if o.contains_zero() {
            return Real::entire(p);
        }
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let d = rounded!(p, a / b, Round::Down);
            let u = rounded!(p, a / b, Round::Up);
            if lo.as_ref().map_or(true, |l| d < *l) {
                lo = Some(d);
            }
            if hi.as_ref().map_or(true, |h| u > *h) {
                hi = Some(u);
            }
        }
        Real { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    pub fn div_int(&self, k: &Integer) -> Real {
        self.div(&Real::from_int(k, self.prec()))
    }

    /// Square root of the nonnegative part of the interval.
    pub fn sqrt(&self) -> Real {
        let p = self.prec();
        let lo = if self.lo > 0 {
            rounded!(p, self.lo.sqrt_ref(), Round::Down)
        } else {
            Float::new(p)
        };
        let hi = if self.hi > 0 {
            rounded!(p, self.hi.sqrt_ref(), Round::Up)
        } else {
            Float::new(p)
        };
        Real { lo, hi }
    }

    /// Natural logarithm; a nonpositive lower endpoint maps to `-inf`.
    pub fn ln(&self) -> Real {
        let p = self.prec();
        let lo = if self.lo > 0 {
            rounded!(p, self.lo.ln_ref(), Round::Down)
        } else {
            Float::with_val(p, rug::float::Special::NegInfinity)
        };
        let hi = if self.hi > 0 {
            rounded!(p, self.hi.ln_ref(), Round::Up)
        } else {
            Float::with_val(p, rug::float::Special::NegInfinity)
        };
        Real { lo, hi }
    }

    pub fn exp(&self) -> Real {
        let p = self.prec();
        Real {
            lo: rounded!(p, self.lo.exp_ref(), Round::Down),
            hi: rounded!(p, self.hi.exp_ref(), Round::Up),
        }
    }

    pub fn log2(&self) -> Real {
        self.ln().div(&Real::ln2(self.prec()))
    }

    /// `atan2(self, x)` for intervals that stay off the branch cut
    /// (`x > 0` or `self` of fixed sign). Returns `None` otherwise.
    pub fn atan2(&self, x: &Real) -> Option<Real> {
        let p = self.prec().max(x.prec());
        // On each admissible region atan2 is monotone in each argument, so the
        // extremes are attained at corners.
        let off_cut = x.is_positive() || self.is_positive() || self.is_negative();
        if !off_cut {
            return None;
        }
        let ys = [&self.lo, &self.hi];
        let xs = [&x.lo, &x.hi];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for y in ys {
            for xx in xs {
                let d = rounded!(p, y.atan2_ref(xx), Round::Down);
                let u = rounded!(p, y.atan2_ref(xx), Round::Up);
                if lo.as_ref().map_or(true, |l| d < *l) {
                    lo = Some(d);
                }
                if hi.as_ref().map_or(true, |h| u > *h) {
                    hi = Some(u);
                }
            }
        }
        Some(Real { lo: lo?, hi: hi? })
    }

    pub fn min(&self, o: &Real) -> Real {
        Real {
            lo: if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi < o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    pub fn max(&self, o: &Real) -> Real {
        Real {
            lo: if self.lo > o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    /// Widens the interval by `r` on both sides.
    pub fn widen(&self, r: &Float) -> Real {
        let p = self.prec();
        Real {
            lo: rounded!(p, &self.lo - r, Round::Down),
            hi: rounded!(p, &self.hi + r, Round::Up),
        }
    }

    fn entire(p: u32) -> Real {
        Real {
            lo: Float::with_val(p, rug::float::Special::NegInfinity),
            hi: Float::with_val(p, rug::float::Special::Infinity),
        }
    }

    pub fn certified(&self) -> CertifiedValue {
        CertifiedValue::from_real(self)
    }
}

fn product(p: u32, a: &Float, b: &Float, round: Round) -> Float {
    // 0 * inf would be NaN; treat it as 0 since the finite factor is exact.
    if a.is_zero() || b.is_zero() {
        return Float::new(p);
    }
    rounded!(p, a * b, round)
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.certified();
        write!(f, "{} +/- {}", c.value, c.radius)
    }
}

/// Decimal rendering of a certified real: the midpoint to
/// [`DISPLAY_DIGITS`] significant digits and an upper bound on the distance
/// from it to any point of the interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: String,
    pub radius: String,
}

impl CertifiedValue {
    pub fn from_real(r: &Real) -> CertifiedValue {
        let mid = r.mid();
        let value = render(&mid, DISPLAY_DIGITS, Round::Nearest);
        // The printed midpoint is itself rounded, so bound the radius from
        // the printed value, not the binary midpoint.
        let printed = Float::parse(&value)
            .map(|p| Float::with_val(r.prec() + 64, p))
            .unwrap_or_else(|_| mid.clone());
        let p = r.prec() + 64;
        let a = rounded!(p, &r.hi - &printed, Round::Up);
        let b = rounded!(p, &printed - &r.lo, Round::Up);
        let rad = if a > b { a } else { b };
        let radius = render(&rad, 3, Round::Up);
        CertifiedValue { value, radius }
    }

    pub fn value_f64(&self) -> f64 {
        self.value.parse().unwrap_or(f64::NAN)
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius.parse().unwrap_or(f64::NAN)
    }
}

fn render(x: &Float, digits: usize, round: Round) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    let s = x.to_string_radix_round(10, Some(digits), round);
    normalize_exponent(&s)
}

/// MPFR prints `1.5e0`; tidy to `1.5` and keep other exponents.
fn normalize_exponent(s: &str) -> String {
    match s.split_once('e') {
        Some((m, "0")) => m.to_string(),
        Some((m, e)) => format!("{m}e{e}"),
        None => s.to_string(),
    }
}

/// Complex interval in rectangular form.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn real(re: Real) -> Complex {
        let p = re.prec();
        Complex { re, im: Real::zero(p) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Complex {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, k: &Real) -> Complex {
        Complex { re: self.re.mul(k), im: self.im.mul(k) }
    }

    pub fn scale_int(&self, k: &Integer) -> Complex {
        self.scale(&Real::from_int(k, self.prec()))
    }

    pub fn sqr(&self) -> Complex {
        let two = Real::from_i64(2, self.prec());
        Complex {
            re: self.re.sqr().sub(&self.im.sqr()),
            im: self.re.mul(&self.im).mul(&two),
        }
    }

    pub fn cube(&self) -> Complex {
        self.sqr().mul(self)
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let n = o.norm_sqr();
        let num = self.mul(&o.conj());
        Complex { re: num.re.div(&n), im: num.im.div(&n) }
    }

    /// Argument, when the interval avoids the negative real axis.
    pub fn arg(&self) -> Option<Real> {
        self.im.atan2(&self.re)
    }

    /// Upper bound on the distance from the midpoint to any point.
    pub fn radius(&self) -> Float {
        let p = self.prec();
        let r = rounded!(p, self.re.radius().hypot_ref(&self.im.radius()), Round::Up);
        r
    }

    /// The primitive cube root of unity `ω^k`, `k` taken mod 3.
    pub fn omega_pow(k: u32, prec: u32) -> Complex {
        match k % 3 {
            0 => Complex::real(Real::from_i64(1, prec)),
            k => {
                let half = Real::from_ratio(-1, 2, prec);
                let s = Real::from_i64(3, prec).sqrt().mul(&Real::from_ratio(1, 2, prec));
                Complex::new(half, if k == 1 { s } else { s.neg() })
            }
        }
    }

    /// Principal cube root of the midpoint, computed in floating point.
    /// The result is a point value; callers certify it separately.
    pub fn cbrt_principal_point(&self) -> (Float, Float) {
        let p = self.prec() + 32;
        let re = self.re.mid();
        let im = self.im.mid();
        let rc = Float::with_val(p, re.hypot_ref(&im)).cbrt();
        let a = Float::with_val(p, im.atan2_ref(&re)) / 3u32;
        let (s, co) = a.sin_cos(Float::new(p));
        (Float::with_val(p, &rc * &co), Float::with_val(p, &rc * &s))
    }
}
