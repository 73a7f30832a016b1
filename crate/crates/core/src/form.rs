//! Binary cubic forms, their invariants and covariants, and the `GL_2(Z)`
//! substitution action.
//!
//! Everything here is exact integer arithmetic. A cubic form
//! `F(x, y) = a x^3 + b x^2 y + c x y^2 + d y^3` carries the discriminant
//! `D`, the Hessian `H = A x^2 + B x y + C y^2` and the cubic covariant
//! `G = F_x H_y - F_y H_x`, tied together by `4 H^3 = G^2 + 27 D F^2`.

use std::fmt;

use rug::ops::{DivRounding, Pow};
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Homogeneous form of arbitrary degree; `coeffs[i]` multiplies `x^(n-i) y^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<Integer>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Integer>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        BinaryForm { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm { coeffs: vec![Integer::new(); degree + 1] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Integer> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        // Horner in x: term i is multiplied by x once per later coefficient.
        let mut acc = Integer::new();
        let mut ypow = Integer::from(1);
        let n = self.degree();
        let mut terms = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            terms.push(ypow.clone());
            ypow *= y;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            acc *= x;
            acc += Integer::from(c * &terms[i]);
        }
        acc
    }

    pub fn add(&self, other: &BinaryForm) -> BinaryForm {
        assert_eq!(self.degree(), other.degree());
        BinaryForm {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| Integer::from(a + b)).collect(),
        }
    }

    pub fn sub(&self, other: &BinaryForm) -> BinaryForm {
        assert_eq!(self.degree(), other.degree());
        BinaryForm {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| Integer::from(a - b)).collect(),
        }
    }

    pub fn scale(&self, k: &Integer) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().map(|c| Integer::from(c * k)).collect() }
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let mut out = vec![Integer::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> BinaryForm {
        let mut acc = BinaryForm { coeffs: vec![Integer::from(1)] };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative in `x`.
    pub fn d_dx(&self) -> BinaryForm {
        let n = self.degree();
        if n == 0 {
            return BinaryForm::zero(0);
        }
        BinaryForm {
            coeffs: (0..n).map(|i| Integer::from(&self.coeffs[i] * (n - i) as u32)).collect(),
        }
    }

    /// Partial derivative in `y`.
    pub fn d_dy(&self) -> BinaryForm {
        let n = self.degree();
        if n == 0 {
            return BinaryForm::zero(0);
        }
        BinaryForm {
            coeffs: (1..=n).map(|i| Integer::from(&self.coeffs[i] * i as u32)).collect(),
        }
    }

    /// `F(a1 x + a2 y, a3 x + a4 y)`.
    pub fn substitute(&self, m: &UnimodularMatrix) -> BinaryForm {
        self.substitute_raw(&m.a1, &m.a2, &m.a3, &m.a4)
    }

    fn substitute_raw(&self, a1: &Integer, a2: &Integer, a3: &Integer, a4: &Integer) -> BinaryForm {
        let n = self.degree();
        let l1 = BinaryForm { coeffs: vec![a1.clone(), a2.clone()] };
        let l2 = BinaryForm { coeffs: vec![a3.clone(), a4.clone()] };
        let p1: Vec<BinaryForm> = (0..=n as u32).map(|e| l1.pow(e)).collect();
        let p2: Vec<BinaryForm> = (0..=n as u32).map(|e| l2.pow(e)).collect();
        let mut out = BinaryForm::zero(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let term = p1[n - i].mul(&p2[i]).scale(c);
            out = out.add(&term);
        }
        out
    }
}

/// `F(x, y) = a x^3 + b x^2 y + c x y^2 + d y^3` with integer coefficients.
///
/// Structural equality; no implicit sign or content normalisation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawCubic")]
pub struct CubicForm {
    #[serde(with = "crate::json")]
    a: Integer,
    #[serde(with = "crate::json")]
    b: Integer,
    #[serde(with = "crate::json")]
    c: Integer,
    #[serde(with = "crate::json")]
    d: Integer,
}

#[derive(Deserialize)]
struct RawCubic {
    #[serde(with = "crate::json")]
    a: Integer,
    #[serde(with = "crate::json")]
    b: Integer,
    #[serde(with = "crate::json")]
    c: Integer,
    #[serde(with = "crate::json")]
    d: Integer,
}

impl TryFrom<RawCubic> for CubicForm {
    type Error = Error;
    fn try_from(r: RawCubic) -> Result<Self> {
        CubicForm::try_new(r.a, r.b, r.c, r.d)
    }
}

impl CubicForm {
    pub fn try_new(
        a: impl Into<Integer>,
        b: impl Into<Integer>,
        c: impl Into<Integer>,
        d: impl Into<Integer>,
    ) -> Result<Self> {
        let f = CubicForm { a: a.into(), b: b.into(), c: c.into(), d: d.into() };
        if f.a == 0 && f.b == 0 && f.c == 0 && f.d == 0 {
            return Err(Error::ZeroForm);
        }
        Ok(f)
    }

    /// Panics on the zero form; use [`CubicForm::try_new`] for untrusted input.
    pub fn new(
        a: impl Into<Integer>,
        b: impl Into<Integer>,
        c: impl Into<Integer>,
        d: impl Into<Integer>,
    ) -> Self {
        Self::try_new(a, b, c, d).expect("zero cubic form")
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }
    pub fn b(&self) -> &Integer {
        &self.b
    }
    pub fn c(&self) -> &Integer {
        &self.c
    }
    pub fn d(&self) -> &Integer {
        &self.d
    }

    pub fn coeffs(&self) -> [&Integer; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn to_binary(&self) -> BinaryForm {
        BinaryForm::new(vec![self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()])
    }

    fn from_binary(f: BinaryForm) -> Self {
        let mut it = f.into_coeffs().into_iter();
        let (a, b, c, d) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        CubicForm { a, b, c, d }
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        let x2 = Integer::from(x * x);
        let y2 = Integer::from(y * y);
        let mut v = Integer::from(&self.a * &x2) * x;
        v += Integer::from(&self.b * &x2) * y;
        v += Integer::from(&self.c * &y2) * x;
        v += Integer::from(&self.d * &y2) * y;
        v
    }

    pub fn eval_i64(&self, x: i64, y: i64) -> Integer {
        self.eval(&Integer::from(x), &Integer::from(y))
    }

    /// `D = 18abcd + b^2 c^2 - 27 a^2 d^2 - 4 a c^3 - 4 b^3 d`.
    pub fn discriminant(&self) -> Integer {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let abcd = Integer::from(a * b) * c * d;
        let bc = Integer::from(b * c);
        let ad = Integer::from(a * d);
        let c3 = Integer::from(c.pow(3u32));
        let b3 = Integer::from(b.pow(3u32));
        18 * abcd + Integer::from(&bc * &bc) - 27 * Integer::from(&ad * &ad) - 4 * (c3 * a) - 4 * (b3 * d)
    }

    /// `(A, B, C) = (b^2 - 3ac, bc - 9ad, c^2 - 3bd)`.
    pub fn hessian(&self) -> QuadraticForm {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        QuadraticForm {
            a: Integer::from(b * b) - 3 * Integer::from(a * c),
            b: Integer::from(b * c) - 9 * Integer::from(a * d),
            c: Integer::from(c * c) - 3 * Integer::from(b * d),
        }
    }

    /// `G = F_x H_y - F_y H_x`.
    pub fn g_covariant(&self) -> GCovariant {
        let f = self.to_binary();
        let h = self.hessian().to_binary();
        let g = f.d_dx().mul(&h.d_dy()).sub(&f.d_dy().mul(&h.d_dx()));
        let mut it = g.into_coeffs().into_iter();
        GCovariant {
            g0: it.next().unwrap(),
            g1: it.next().unwrap(),
            g2: it.next().unwrap(),
            g3: it.next().unwrap(),
        }
    }

    /// `F o gamma`, i.e. `F(a1 x + a2 y, a3 x + a4 y)`.
    pub fn apply(&self, m: &UnimodularMatrix) -> CubicForm {
        CubicForm::from_binary(self.to_binary().substitute(m))
    }

    /// gcd of the coefficients; always positive for a nonzero form.
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in self.coeffs() {
            g.gcd_mut(c);
        }
        g
    }

    pub fn negate(&self) -> CubicForm {
        CubicForm {
            a: Integer::from(-&self.a),
            b: Integer::from(-&self.b),
            c: Integer::from(-&self.c),
            d: Integer::from(-&self.d),
        }
    }

    /// Irreducibility over `Q`.
    ///
    /// A cubic factors over `Q` exactly when it has a linear factor. If
    /// `a = 0` or `d = 0` then `y` or `x` divides `F`. Otherwise a rational
    /// root `t` of `F(t, 1)` makes `a t` an integer root of the monic cubic
    /// `s^3 + b s^2 + ac s + a^2 d`, which is searched exactly.
    pub fn is_irreducible(&self) -> bool {
        if self.a == 0 || self.d == 0 {
            return false;
        }
        let p2 = self.b.clone();
        let p1 = Integer::from(&self.a * &self.c);
        let p0 = Integer::from(&self.a * &self.a) * &self.d;
        integer_roots_monic_cubic(&p2, &p1, &p0).is_empty()
    }

    /// Checks `4 H^3 = G^2 + 27 D F^2` coefficient by coefficient.
    pub fn syzygy_holds(&self) -> bool {
        self.syzygy_residual().is_zero()
    }

    /// `4 H^3 - G^2 - 27 D F^2` as a sextic form (identically zero).
    pub fn syzygy_residual(&self) -> BinaryForm {
        let f = self.to_binary();
        let h = self.hessian().to_binary();
        let g = self.g_covariant().to_binary();
        let d = self.discriminant();
        let lhs = h.pow(3).scale(&Integer::from(4));
        let rhs = g.mul(&g).add(&f.mul(&f).scale(&(d * 27)));
        lhs.sub(&rhs)
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// `A x^2 + B x y + C y^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticForm {
    #[serde(rename = "A", with = "crate::json")]
    pub a: Integer,
    #[serde(rename = "B", with = "crate::json")]
    pub b: Integer,
    #[serde(rename = "C", with = "crate::json")]
    pub c: Integer,
}

impl QuadraticForm {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Self {
        QuadraticForm { a: a.into(), b: b.into(), c: c.into() }
    }

    /// `B^2 - 4AC`.
    pub fn discriminant(&self) -> Integer {
        Integer::from(&self.b * &self.b) - 4 * Integer::from(&self.a * &self.c)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() < 0
    }

    /// `C >= A >= |B|`.
    pub fn is_reduced(&self) -> bool {
        self.c >= self.a && self.a >= *self.b.as_abs()
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        let mut v = Integer::from(&self.a * x) * x;
        v += Integer::from(&self.b * x) * y;
        v += Integer::from(&self.c * y) * y;
        v
    }

    pub fn to_binary(&self) -> BinaryForm {
        BinaryForm::new(vec![self.a.clone(), self.b.clone(), self.c.clone()])
    }

    pub fn apply(&self, m: &UnimodularMatrix) -> QuadraticForm {
        let mut it = self.to_binary().substitute(m).into_coeffs().into_iter();
        QuadraticForm { a: it.next().unwrap(), b: it.next().unwrap(), c: it.next().unwrap() }
    }
}

/// Coefficients of the cubic covariant `G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GCovariant {
    #[serde(with = "crate::json")]
    pub g0: Integer,
    #[serde(with = "crate::json")]
    pub g1: Integer,
    #[serde(with = "crate::json")]
    pub g2: Integer,
    #[serde(with = "crate::json")]
    pub g3: Integer,
}

impl GCovariant {
    pub fn to_binary(&self) -> BinaryForm {
        BinaryForm::new(vec![self.g0.clone(), self.g1.clone(), self.g2.clone(), self.g3.clone()])
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        CubicForm { a: self.g0.clone(), b: self.g1.clone(), c: self.g2.clone(), d: self.g3.clone() }.eval(x, y)
    }

    pub fn apply(&self, m: &UnimodularMatrix) -> GCovariant {
        let mut it = self.to_binary().substitute(m).into_coeffs().into_iter();
        GCovariant {
            g0: it.next().unwrap(),
            g1: it.next().unwrap(),
            g2: it.next().unwrap(),
            g3: it.next().unwrap(),
        }
    }

    pub fn negate(&self) -> GCovariant {
        GCovariant {
            g0: Integer::from(-&self.g0),
            g1: Integer::from(-&self.g1),
            g2: Integer::from(-&self.g2),
            g3: Integer::from(-&self.g3),
        }
    }
}

/// Integer matrix `[[a1, a2], [a3, a4]]` with determinant `+1` or `-1`,
/// acting on forms by `(x, y) -> (a1 x + a2 y, a3 x + a4 y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct UnimodularMatrix {
    #[serde(with = "crate::json")]
    a1: Integer,
    #[serde(with = "crate::json")]
    a2: Integer,
    #[serde(with = "crate::json")]
    a3: Integer,
    #[serde(with = "crate::json")]
    a4: Integer,
}

#[derive(Deserialize)]
struct RawMatrix {
    #[serde(with = "crate::json")]
    a1: Integer,
    #[serde(with = "crate::json")]
    a2: Integer,
    #[serde(with = "crate::json")]
    a3: Integer,
    #[serde(with = "crate::json")]
    a4: Integer,
}

impl TryFrom<RawMatrix> for UnimodularMatrix {
    type Error = Error;
    fn try_from(r: RawMatrix) -> Result<Self> {
        UnimodularMatrix::new(r.a1, r.a2, r.a3, r.a4)
    }
}

impl UnimodularMatrix {
    pub fn new(
        a1: impl Into<Integer>,
        a2: impl Into<Integer>,
        a3: impl Into<Integer>,
        a4: impl Into<Integer>,
    ) -> Result<Self> {
        let m = UnimodularMatrix { a1: a1.into(), a2: a2.into(), a3: a3.into(), a4: a4.into() };
        let det = m.det();
        if det != 1 && det != -1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self::from_trusted(1, 0, 0, 1)
    }

    /// `(x, y) -> (x + t y, y)`.
    pub fn translation(t: impl Into<Integer>) -> Self {
        UnimodularMatrix { a1: Integer::from(1), a2: t.into(), a3: Integer::new(), a4: Integer::from(1) }
    }

    /// `(x, y) -> (-y, x)`.
    pub fn rotation() -> Self {
        Self::from_trusted(0, -1, 1, 0)
    }

    /// `(x, y) -> (y, x)`, determinant `-1`.
    pub fn swap() -> Self {
        Self::from_trusted(0, 1, 1, 0)
    }

    fn from_trusted(a1: i64, a2: i64, a3: i64, a4: i64) -> Self {
        UnimodularMatrix {
            a1: Integer::from(a1),
            a2: Integer::from(a2),
            a3: Integer::from(a3),
            a4: Integer::from(a4),
        }
    }

    pub fn entries(&self) -> [&Integer; 4] {
        [&self.a1, &self.a2, &self.a3, &self.a4]
    }

    pub fn det(&self) -> Integer {
        Integer::from(&self.a1 * &self.a4) - Integer::from(&self.a2 * &self.a3)
    }

    /// Matrix product `self * other`; `f.apply(&p).apply(&q) == f.apply(&p.compose(&q))`.
    pub fn compose(&self, other: &UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            a1: Integer::from(&self.a1 * &other.a1) + Integer::from(&self.a2 * &other.a3),
            a2: Integer::from(&self.a1 * &other.a2) + Integer::from(&self.a2 * &other.a4),
            a3: Integer::from(&self.a3 * &other.a1) + Integer::from(&self.a4 * &other.a3),
            a4: Integer::from(&self.a3 * &other.a2) + Integer::from(&self.a4 * &other.a4),
        }
    }

    pub fn inverse(&self) -> UnimodularMatrix {
        // inverse = det * adj, det = +-1
        let det = self.det();
        UnimodularMatrix {
            a1: Integer::from(&self.a4 * &det),
            a2: -Integer::from(&self.a2 * &det),
            a3: -Integer::from(&self.a3 * &det),
            a4: Integer::from(&self.a1 * &det),
        }
    }

    /// Image of the column vector `(x, y)`.
    pub fn map_point(&self, x: &Integer, y: &Integer) -> (Integer, Integer) {
        (
            Integer::from(&self.a1 * x) + Integer::from(&self.a2 * y),
            Integer::from(&self.a3 * x) + Integer::from(&self.a4 * y),
        )
    }

    pub fn max_abs_entry(&self) -> Integer {
        self.entries().into_iter().map(|e| e.clone().abs()).max().unwrap()
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a1, self.a2, self.a3, self.a4)
    }
}

/// All integer roots of `t^3 + p2 t^2 + p1 t + p0`, in increasing order.
///
/// Splits the line at the critical points (bracketed with an integer square
/// root), scans the small neighbourhoods of the critical points and binary
/// searches each strictly monotone piece.
pub(crate) fn integer_roots_monic_cubic(p2: &Integer, p1: &Integer, p0: &Integer) -> Vec<Integer> {
    let eval = |t: &Integer| -> Integer {
        let mut v = Integer::from(t + p2);
        v *= t;
        v += p1;
        v *= t;
        v += p0;
        v
    };
    let bound = Integer::from(1) + p2.clone().abs().max(p1.clone().abs()).max(p0.clone().abs());
    let lo_all = Integer::from(-&bound);
    let hi_all = bound;

    let mut roots = Vec::new();
    let disc = Integer::from(p2 * p2) - Integer::from(p1 * 3);
    if disc <= 0 {
        if let Some(r) = zero_in_monotone(&lo_all, &hi_all, true, &eval) {
            roots.push(r);
        }
        return roots;
    }
    let s = disc.sqrt();
    let neg_p2 = Integer::from(-p2);
    // critical points lie in ((-p2 - s - 1)/3, (-p2 - s)/3] and [(-p2 + s)/3, (-p2 + s + 1)/3)
    let n1_lo = (Integer::from(&neg_p2 - &s) - 1u32).div_floor(Integer::from(3)) - 1u32;
    let n1_hi = Integer::from(&neg_p2 - &s).div_ceil(Integer::from(3)) + 1u32;
    let n2_lo = Integer::from(&neg_p2 + &s).div_floor(Integer::from(3)) - 1u32;
    let n2_hi = (Integer::from(&neg_p2 + &s) + 1u32).div_ceil(Integer::from(3)) + 1u32;

    if let Some(r) = zero_in_monotone(&lo_all, &Integer::from(&n1_lo - 1u32), true, &eval) {
        roots.push(r);
    }
    let mut t = n1_lo.clone();
    while t <= n1_hi {
        if eval(&t) == 0 {
            roots.push(t.clone());
        }
        t += 1u32;
    }
    let mid_lo = Integer::from(&n1_hi + 1u32).max(t.clone());
    if let Some(r) = zero_in_monotone(&mid_lo, &Integer::from(&n2_lo - 1u32), false, &eval) {
        roots.push(r);
    }
    let mut t = n2_lo.max(mid_lo);
    while t <= n2_hi {
        if eval(&t) == 0 {
            roots.push(t.clone());
        }
        t += 1u32;
    }
    if let Some(r) = zero_in_monotone(&Integer::from(&n2_hi + 1u32), &hi_all, true, &eval) {
        roots.push(r);
    }
    roots.sort();
    roots.dedup();
    roots
}

fn zero_in_monotone<F: Fn(&Integer) -> Integer>(
    lo: &Integer,
    hi: &Integer,
    increasing: bool,
    f: &F,
) -> Option<Integer> {
    if lo > hi {
        return None;
    }
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    while lo <= hi {
        let mid = Integer::from(&lo + &hi).div_floor(Integer::from(2));
        let v = f(&mid);
        if v == 0 {
            return Some(mid);
        }
        if (v < 0) == increasing {
            lo = mid + 1u32;
        } else {
            hi = mid - 1u32;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(a: i64, b: i64, c: i64, d: i64) -> CubicForm {
        CubicForm::new(a, b, c, d)
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(cf(1, 0, -3, 1).discriminant(), 81);
        assert_eq!(cf(1, 1, -2, -1).discriminant(), 49);
        assert_eq!(cf(1, 0, 0, 0).discriminant(), 0);
    }

    #[test]
    fn hessian_examples() {
        let h = cf(1, 0, -3, 1).hessian();
        assert_eq!(h, QuadraticForm::new(9, -9, 9));
        assert_eq!(h.discriminant(), -3 * 81);
        let h = cf(1, 1, -2, -1).hessian();
        assert_eq!(h, QuadraticForm::new(7, 7, 7));
        assert_eq!(h.discriminant(), -3 * 49);
        assert_eq!(cf(1, 0, 0, 0).hessian(), QuadraticForm::new(0, 0, 0));
    }

    #[test]
    fn g_covariant_examples() {
        let g = cf(1, 0, -3, 1).g_covariant();
        assert_eq!([g.g0.clone(), g.g1.clone(), g.g2.clone(), g.g3.clone()], [-27, 162, -81, -27].map(Integer::from));
        // syzygy at (1, 0): 4 * 9^3 = 27^2 + 27 * 81
        assert_eq!(4 * 729, 729 + 27 * 81);

        let f = cf(1, 1, -2, -1);
        let g = f.g_covariant();
        assert_eq!(g.g0, 7);
        assert_eq!(Integer::from(4 * 343), Integer::from(&g.g0 * &g.g0) + 27 * 49);

        let g = cf(1, 0, 0, 0).g_covariant();
        assert!(g.to_binary().is_zero());
        assert!(cf(1, 0, 0, 0).syzygy_holds());
    }

    #[test]
    fn syzygy_on_examples() {
        for f in [cf(1, 0, -3, 1), cf(1, 1, -2, -1), cf(2, -7, 11, 5), cf(0, 3, 6, 9)] {
            assert!(f.syzygy_holds(), "{f}");
        }
    }

    #[test]
    fn apply_examples() {
        let f = cf(1, 0, -3, 1);
        assert_eq!(f.apply(&UnimodularMatrix::identity()), f);
        let swapped = f.apply(&UnimodularMatrix::swap());
        assert_eq!(swapped, cf(1, -3, 0, 1));
        assert_eq!(swapped.discriminant(), 81);

        let g = cf(1, 1, -2, -1);
        let t = g.apply(&UnimodularMatrix::translation(1));
        // (x+y)^3 + (x+y)^2 y - 2 (x+y) y^2 - y^3
        assert_eq!(t, cf(1, 4, 3, -1));
        assert_eq!(t.discriminant(), 49);
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(UnimodularMatrix::new(2, 0, 0, 1), Err(Error::NotUnimodular { .. })));
        assert!(UnimodularMatrix::new(2, 1, 1, 1).is_ok());
        assert!(UnimodularMatrix::new(1, 1, 1, 0).is_ok());
    }

    #[test]
    fn zero_form_rejected() {
        assert!(matches!(CubicForm::try_new(0, 0, 0, 0), Err(Error::ZeroForm)));
    }

    #[test]
    fn irreducibility() {
        assert!(cf(1, 0, -3, 1).is_irreducible());
        assert!(!cf(0, 1, 1, 0).is_irreducible());
        assert!(cf(1, 1, -2, -1).is_irreducible());
        // (x - 2y)(x^2 + y^2)
        assert!(!cf(1, -2, 1, -2).is_irreducible());
        // (2x - 3y)(x^2 + xy + 5y^2) = 2x^3 - x^2 y + 7 x y^2 - 15 y^3
        assert!(!cf(2, -1, 7, -15).is_irreducible());
        // x^3 - 2 y^3
        assert!(cf(1, 0, 0, -2).is_irreducible());
        // content is ignored
        assert!(cf(2, 0, -6, 2).is_irreducible());
    }

    #[test]
    fn monic_roots_exact() {
        // (t - 3)(t + 5)(t - 7) = t^3 - 5 t^2 - 29 t + 105
        let r = integer_roots_monic_cubic(&Integer::from(-5), &Integer::from(-29), &Integer::from(105));
        assert_eq!(r, vec![Integer::from(-5), Integer::from(3), Integer::from(7)]);
        // (t - 4)^2 (t + 1) = t^3 - 7 t^2 + 8 t + 16
        let r = integer_roots_monic_cubic(&Integer::from(-7), &Integer::from(8), &Integer::from(16));
        assert_eq!(r, vec![Integer::from(-1), Integer::from(4)]);
        // t^3 + t + 1 has no integer roots
        assert!(integer_roots_monic_cubic(&Integer::from(0), &Integer::from(1), &Integer::from(1)).is_empty());
        // huge root: (t - 10^30)(t^2 + 1)
        let big = Integer::from(10).pow(30u32);
        let r = integer_roots_monic_cubic(&Integer::from(-&big), &Integer::from(1), &Integer::from(-&big));
        assert_eq!(r, vec![big]);
    }

    #[test]
    fn content_examples() {
        assert_eq!(cf(2, 4, -6, 8).content(), 2);
        assert_eq!(cf(1, 0, -3, 1).content(), 1);
        assert_eq!(cf(0, 3, 6, 9).content(), 3);
    }

    #[test]
    fn g_covariance_picks_up_determinant() {
        let f = cf(2, -7, 11, 5);
        for m in [UnimodularMatrix::translation(3), UnimodularMatrix::rotation(), UnimodularMatrix::swap()] {
            let lhs = f.apply(&m).g_covariant();
            let rhs = f.g_covariant().apply(&m);
            if m.det() == 1 {
                assert_eq!(lhs, rhs);
            } else {
                assert_eq!(lhs, rhs.negate());
            }
        }
    }

    #[test]
    fn matrix_inverse_and_compose() {
        let m = UnimodularMatrix::new(5, 3, 3, 2).unwrap();
        assert_eq!(m.compose(&m.inverse()), UnimodularMatrix::identity());
        let s = UnimodularMatrix::swap();
        assert_eq!(s.compose(&s.inverse()), UnimodularMatrix::identity());
    }

    #[test]
    fn binary_eval_matches_cubic_eval() {
        let f = cf(3, -1, 4, -1);
        let bf = f.to_binary();
        for (x, y) in [(0, 1), (2, -3), (-5, 7), (11, 0)] {
            let (x, y) = (Integer::from(x), Integer::from(y));
            assert_eq!(bf.eval(&x, &y), f.eval(&x, &y));
        }
    }

    #[test]
    fn json_literal() {
        let f: CubicForm = serde_json::from_str(r#"{"a":1,"b":0,"c":-3,"d":1}"#).unwrap();
        assert_eq!(f, cf(1, 0, -3, 1));
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"a":1,"b":0,"c":-3,"d":1}"#);
        assert!(serde_json::from_str::<CubicForm>(r#"{"a":0,"b":0,"c":0,"d":0}"#).is_err());
        let big: CubicForm =
            serde_json::from_str(r#"{"a":"100000000000000000000","b":0,"c":-3,"d":1}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&big).unwrap(),
            r#"{"a":"100000000000000000000","b":0,"c":-3,"d":1}"#
        );
    }
}
