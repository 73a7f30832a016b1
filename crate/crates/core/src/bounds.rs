//! Closed-form counting bounds and the thresholds they depend on.
//!
//! Everything is evaluated in certified interval arithmetic. Bounds are
//! compared against solution counts through their floors, which are only
//! reported as certified when both interval endpoints agree.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{with_escalation, CertifiedValue, Real, DEFAULT_PRECISION};

/// Number of large solutions allowed by the large-height count.
pub const LARGE_SOLUTION_BOUND: u32 = 9;

/// `epsilon` together with the `(D, h)` it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonContext {
    #[serde(rename = "D", with = "crate::json")]
    pub discriminant: Integer,
    #[serde(with = "crate::json")]
    pub h: Integer,
    pub epsilon: CertifiedValue,
    /// `0 < epsilon < 1/4`.
    pub in_range: bool,
}

/// `epsilon = 1/4 - ln(2 pi h) / ln(3D)` as a certified interval.
pub fn epsilon_real(d: &Integer, h: &Integer, prec: u32) -> Real {
    let two_pi_h = Real::pi(prec).mul_int(&(Integer::from(2) * h));
    epsilon_from_scale(d, &two_pi_h, prec)
}

fn epsilon_from_scale(d: &Integer, two_pi_h: &Real, prec: u32) -> Real {
    let ln3d = Real::from_int(&(Integer::from(3) * d), prec).ln();
    Real::from_ratio(1, 4, prec).sub(&two_pi_h.ln().div(&ln3d))
}

/// Computes `epsilon` for `(D, h)`. Out-of-range values are reported through
/// `in_range`, not as errors.
pub fn epsilon_of(d: &Integer, h: &Integer) -> Result<EpsilonContext> {
    if *d < 1 || *h < 1 {
        return Err(Error::InvalidArgument(format!("epsilon needs D >= 1 and h >= 1, got D = {d}, h = {h}")));
    }
    let (eps, in_range) = with_escalation(DEFAULT_PRECISION, |p| {
        let e = epsilon_real(d, h, p);
        let quarter = Real::from_ratio(1, 4, p);
        let pos = e.gt(&Real::zero(p))?;
        let below = e.lt(&quarter)?;
        Some((e, pos && below))
    })
    .map(|(v, _)| v)
    .ok_or_else(|| Error::precision("sign of epsilon", crate::real::MAX_PRECISION))?;
    Ok(EpsilonContext { discriminant: d.clone(), h: h.clone(), epsilon: eps.certified(), in_range })
}

fn require_open(eps: &Real) -> Result<()> {
    let p = eps.prec();
    let ok = eps.is_positive() && eps.lt(&Real::from_ratio(1, 4, p)) == Some(true);
    if ok {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange { value: eps.certified().value, range: "(0, 1/4)" })
    }
}

fn require_half_open(eps: &Real) -> Result<()> {
    let p = eps.prec();
    let ok = eps.is_nonnegative() && eps.lt(&Real::from_ratio(1, 4, p)) == Some(true);
    if ok {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange { value: eps.certified().value, range: "[0, 1/4)" })
    }
}

/// `log2(3/(8 eps) + 1/2)`, the per-branch small-solution count.
fn log_term_small(eps: &Real) -> Real {
    let p = eps.prec();
    let three = Real::from_i64(3, p);
    three
        .div(&eps.mul_int(&Integer::from(8)))
        .add(&Real::from_ratio(1, 2, p))
        .log2()
}

/// `3 / (8 (3/2 eps + ratio))` where `ratio = ln 2 / ln(3D)`.
fn inner_argument(eps: &Real, ratio: &Real) -> Real {
    let p = eps.prec();
    let denom = eps.mul(&Real::from_ratio(3, 2, p)).add(ratio).mul_int(&Integer::from(8));
    Real::from_i64(3, p).div(&denom)
}

fn ln2_over_ln3d(d: &Integer, prec: u32) -> Real {
    Real::ln2(prec).div(&Real::from_int(&(Integer::from(3) * d), prec).ln())
}

fn positive_inner(eps: &Real, ratio: &Real) -> Result<Real> {
    let inner = inner_argument(eps, ratio);
    if !inner.is_positive() || !inner.is_finite() {
        return Err(Error::NonPositiveArgument);
    }
    Ok(inner)
}

/// `9 + log2(3/(8 eps) + 1/2)`, for `0 < eps < 1/4`.
pub fn bound_newmain(eps: &Real) -> Result<Real> {
    require_open(eps)?;
    Ok(Real::from_i64(9, eps.prec()).add(&log_term_small(eps)))
}

/// `12 + (3 / ln 2) ln(3 / (8 (3/2 eps + ln 2 / ln(3D))))`, for `0 < eps < 1/4`.
pub fn bound_main(eps: &Real, d: &Integer) -> Result<Real> {
    require_open(eps)?;
    let p = eps.prec();
    let inner = positive_inner(eps, &ln2_over_ln3d(d, p))?;
    let three_over_ln2 = Real::from_i64(3, p).div(&Real::ln2(p));
    Ok(Real::from_i64(12, p).add(&three_over_ln2.mul(&inner.ln())))
}

/// `3 log2(3/(8 eps) + 1/2)`, for `0 < eps < 1/4`.
pub fn bound_small_lemma1(eps: &Real) -> Result<Real> {
    require_open(eps)?;
    Ok(log_term_small(eps).mul_int(&Integer::from(3)))
}

/// `3 log2(3 / (8 (3/2 eps + ln 2 / ln(3D)))) + 3`, for `0 <= eps < 1/4`.
pub fn bound_small_lemma2(eps: &Real, d: &Integer) -> Result<Real> {
    bound_small_lemma2_with_ratio(eps, &ln2_over_ln3d(d, eps.prec()))
}

/// The same bound with `ln 2 / ln(3D)` supplied directly.
pub fn bound_small_lemma2_with_ratio(eps: &Real, ratio: &Real) -> Result<Real> {
    require_half_open(eps)?;
    let p = eps.prec();
    let inner = positive_inner(eps, ratio)?;
    Ok(inner.log2().mul_int(&Integer::from(3)).add(&Real::from_i64(3, p)))
}

/// Left minus right side of the detection inequality
/// `2^(2^(k-2)-1) (3D)^(1/4 + (2^(k-1)-1) eps) >= sqrt(3/2) (3D)^(1/4) h^(3/2)`,
/// in logarithms and with the common `(3D)^(1/4)` cancelled.
pub fn detection_slack(k: u32, eps: &Real, d: &Integer, h: &Integer) -> Real {
    let p = eps.prec();
    let ln3d = Real::from_int(&(Integer::from(3) * d), p).ln();
    let e1 = (Integer::from(1) << (k - 2)) - 1u32;
    let e2 = (Integer::from(1) << (k - 1)) - 1u32;
    let lhs = Real::ln2(p).mul_int(&e1).add(&eps.mul_int(&e2).mul(&ln3d));
    let rhs = Real::from_ratio(3, 2, p)
        .ln()
        .mul(&Real::from_ratio(1, 2, p))
        .add(&Real::from_int(h, p).ln().mul(&Real::from_ratio(3, 2, p)));
    lhs.sub(&rhs)
}

/// Smallest `k >= 2` satisfying the detection inequality.
pub fn detection_k(eps: &Real, d: &Integer, h: &Integer) -> Result<u32> {
    require_open(eps)?;
    // The slack grows at least like 2^(k-2) ln 2, so this terminates quickly.
    for k in 2..64u32 {
        let s = detection_slack(k, eps, d, h);
        if s.is_nonnegative() {
            return Ok(k);
        }
        if !s.is_negative() {
            return Err(Error::precision(format!("detection inequality at k = {k}"), eps.prec()));
        }
    }
    Err(Error::InvalidArgument("detection index exceeds 63".into()))
}

/// A bound value with its floor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: CertifiedValue,
    #[serde(with = "crate::json")]
    pub floor: Integer,
    /// Both interval endpoints have this floor. When false, `floor` is the
    /// floor of the upper endpoint, which is never below the true floor.
    pub floor_certified: bool,
}

/// Evaluates `f` with precision escalation until its floor is certified.
pub fn certified_floor(f: impl Fn(u32) -> Result<Real>) -> Result<BoundValue> {
    let mut last: Option<Real> = None;
    let mut err: Option<Error> = None;
    let got = with_escalation(DEFAULT_PRECISION, |p| match f(p) {
        Ok(v) => {
            let fl = v.floor();
            last = Some(v.clone());
            fl.map(|fl| (v, fl))
        }
        Err(e) => {
            err = Some(e);
            Some((Real::zero(p), Integer::new()))
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    match got {
        Some(((v, floor), _)) => Ok(BoundValue { value: v.certified(), floor, floor_certified: true }),
        None => {
            let v = last.expect("at least one attempt");
            let floor = v.floor_upper().ok_or(Error::NonPositiveArgument)?;
            Ok(BoundValue { value: v.certified(), floor, floor_certified: false })
        }
    }
}

/// All bounds for one `(D, h)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(flatten)]
    pub epsilon: EpsilonContext,
    pub newmain_bound: Option<BoundValue>,
    pub main_bound: Option<BoundValue>,
    pub small_lemma1_bound: Option<BoundValue>,
    pub small_lemma2_bound: Option<BoundValue>,
    pub evertse_large_bound: u32,
    pub detection_k: Option<u32>,
    pub applicable: Applicability,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Applicability {
    pub newmain: bool,
    pub main: bool,
    pub small_lemma1: bool,
    pub small_lemma2: bool,
}

impl BoundReport {
    /// Minimum of the applicable small-solution floors.
    pub fn small_floor(&self) -> Option<Integer> {
        [&self.small_lemma1_bound, &self.small_lemma2_bound]
            .into_iter()
            .flatten()
            .map(|b| b.floor.clone())
            .min()
    }

    /// Minimum of the applicable whole-count floors.
    pub fn total_floor(&self) -> Option<Integer> {
        [&self.newmain_bound, &self.main_bound].into_iter().flatten().map(|b| b.floor.clone()).min()
    }
}

/// Evaluates every bound whose hypotheses hold for `(D, h)`.
pub fn bound_report(d: &Integer, h: &Integer) -> Result<BoundReport> {
    let epsilon = epsilon_of(d, h)?;
    let eps_at = |p: u32| epsilon_real(d, h, p);
    let (newmain, main, lemma1, lemma2, k) = if epsilon.in_range {
        (
            Some(certified_floor(|p| bound_newmain(&eps_at(p)))?),
            Some(certified_floor(|p| bound_main(&eps_at(p), d))?),
            Some(certified_floor(|p| bound_small_lemma1(&eps_at(p)))?),
            Some(certified_floor(|p| bound_small_lemma2(&eps_at(p), d))?),
            Some(detection_k(&eps_at(DEFAULT_PRECISION), d, h)?),
        )
    } else {
        // epsilon is never exactly 0 for integer h (pi is transcendental),
        // so the second small-solution bound's closed endpoint adds nothing here.
        (None, None, None, None, None)
    };
    let applicable = Applicability {
        newmain: newmain.is_some(),
        main: main.is_some(),
        small_lemma1: lemma1.is_some(),
        small_lemma2: lemma2.is_some(),
    };
    Ok(BoundReport {
        epsilon,
        newmain_bound: newmain,
        main_bound: main,
        small_lemma1_bound: lemma1,
        small_lemma2_bound: lemma2,
        evertse_large_bound: LARGE_SOLUTION_BOUND,
        detection_k: k,
        applicable,
    })
}

/// `N(n) = 6n * 7^e`, stored by its parts since `e` can be in the millions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerOfSeven {
    pub coefficient: u64,
    pub exponent: u64,
}

impl PowerOfSeven {
    pub fn value(&self) -> Integer {
        Integer::from(self.coefficient) * Integer::from(Integer::u_pow_u(7, self.exponent as u32))
    }

    pub fn ln(&self, prec: u32) -> Real {
        Real::from_int(&Integer::from(self.coefficient), prec)
            .ln()
            .add(&Real::from_i64(7, prec).ln().mul_int(&Integer::from(self.exponent)))
    }
}

/// `(N(n), delta(n))`: at most `N` solutions once `|D|` is large in terms of `h^delta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvertseGyory {
    pub max_solutions: PowerOfSeven,
    /// Decimal value of `max_solutions` when it has at most 100 digits.
    pub max_solutions_value: Option<String>,
    pub delta: String,
}

/// Earlier explicit bounds for Thue inequalities of degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparativeBounds {
    pub n: u64,
    /// `None` for `n = 400`, which neither stated range covers.
    pub evertse_gyory: Option<EvertseGyory>,
    /// `|D| > h^delta exp(80 n (n - 1))`.
    pub evertse_gyory_applicable: Option<bool>,
    pub gyory_irreducible: String,
    pub gyory_reducible: String,
    /// `|D| >= n^n (3.5^n h^2)^(2(n-1)/(1-a))`.
    pub gyory_applicable: bool,
}

fn evertse_gyory_pair(n: u64) -> Option<(PowerOfSeven, Rational)> {
    if (3..400).contains(&n) {
        let e = n * (n - 1) * (n - 2) / 6;
        Some((PowerOfSeven { coefficient: 6 * n, exponent: e }, Rational::from((5 * n * (n - 1), 6u64))))
    } else if n > 400 {
        Some((PowerOfSeven { coefficient: 6 * n, exponent: 0 }, Rational::from(120 * (n - 1))))
    } else {
        None
    }
}

/// `25n + (n + 2)(2/a + 1/4)` and `5n + (n + 2)(2/a + 1/4)`.
pub fn gyory_bounds(n: u64, a: &Rational) -> (Rational, Rational) {
    let tail = Rational::from(n + 2) * (Rational::from(2) / a.clone() + Rational::from((1, 4)));
    (Rational::from(25 * n) + tail.clone(), Rational::from(5 * n) + tail)
}

pub fn comparative_bounds(n: u64, h: &Integer, d: &Integer, a: &Rational) -> Result<ComparativeBounds> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("degree must be at least 3, got {n}")));
    }
    if *a <= 0 || *a >= 1 {
        return Err(Error::InvalidArgument(format!("a must lie in (0, 1), got {a}")));
    }
    if *h < 1 || d.is_zero() {
        return Err(Error::InvalidArgument("comparative bounds need h >= 1 and D != 0".into()));
    }
    let pair = evertse_gyory_pair(n);
    let d_abs = Integer::from(d.abs_ref());
    let eg_app = match &pair {
        Some((_, delta)) => Some(decide(|p| {
            let lhs = Real::from_int(&d_abs, p).ln();
            let rhs = Real::from_rational(delta, p)
                .mul(&Real::from_int(h, p).ln())
                .add(&Real::from_int(&Integer::from(80 * n * (n - 1)), p));
            lhs.gt(&rhs)
        })?),
        None => None,
    };
    let g_app = decide(|p| {
        let ln_d = Real::from_int(&d_abs, p).ln();
        let nn = Real::from_int(&Integer::from(n), p);
        let exponent = Real::from_int(&Integer::from(2 * (n - 1)), p)
            .div(&Real::from_rational(&(Rational::from(1) - a.clone()), p));
        let inner = Real::from_ratio(7, 2, p)
            .ln()
            .mul(&nn)
            .add(&Real::from_int(h, p).ln().mul_int(&Integer::from(2)));
        let rhs = nn.mul(&nn.ln()).add(&exponent.mul(&inner));
        ln_d.ge(&rhs)
    })?;
    let (irr, red) = gyory_bounds(n, a);
    Ok(ComparativeBounds {
        n,
        evertse_gyory: pair.map(|(np, delta)| EvertseGyory {
            max_solutions_value: (np.exponent <= 115).then(|| np.value().to_string()),
            max_solutions: np,
            delta: delta.to_string(),
        }),
        evertse_gyory_applicable: eg_app,
        gyory_irreducible: irr.to_string(),
        gyory_reducible: red.to_string(),
        gyory_applicable: g_app,
    })
}

fn decide(f: impl Fn(u32) -> Option<bool>) -> Result<bool> {
    with_escalation(DEFAULT_PRECISION, f)
        .map(|(v, _)| v)
        .ok_or_else(|| Error::precision("applicability condition", crate::real::MAX_PRECISION))
}
