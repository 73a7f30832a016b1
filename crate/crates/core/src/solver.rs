//! Enumeration of primitive solutions of `0 < |F(x, y)| <= h` in a box.
//!
//! For fixed `y > 0`, `x -> F(x, y)` is a cubic with two real critical points
//! (the Hessian's leading coefficient is positive), so the integers split
//! into three monotone runs plus two single points next to the critical
//! points. On each run the solutions form one contiguous range, located by
//! galloping from a floating-point root estimate and then confirmed with
//! exact integer comparisons.

use rayon::prelude::*;
use rug::ops::{DivRounding, Pow};
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::bounds::{epsilon_of, epsilon_real, EpsilonContext};
use crate::error::{Error, Result};
use crate::form::CubicForm;
use crate::real::{with_escalation, CertifiedValue, Real, DEFAULT_PRECISION};
use crate::resolvent::{build_resolvents_with_precision, classify, ResolventSet, SolutionResolventData};

/// Default half-width of the search box.
pub const DEFAULT_BOX: u64 = 10_000;

/// Largest supported box; keeps every coordinate comfortably inside `i64`.
pub const MAX_BOX: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRequest {
    pub form: CubicForm,
    pub h: u64,
    #[serde(rename = "box")]
    pub box_size: u64,
    pub precision: u32,
}

impl SolveRequest {
    pub fn new(form: CubicForm, h: u64) -> SolveRequest {
        SolveRequest { form, h, box_size: DEFAULT_BOX, precision: DEFAULT_PRECISION }
    }

    fn validate(&self) -> Result<()> {
        if self.h < 1 {
            return Err(Error::InvalidArgument("h must be at least 1".into()));
        }
        if self.box_size < 1 || self.box_size > MAX_BOX {
            return Err(Error::InvalidArgument(format!("box must lie in 1..={MAX_BOX}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub x: i64,
    pub y: i64,
    #[serde(with = "crate::json")]
    pub f_value: Integer,
    #[serde(with = "crate::json")]
    pub h_value: Integer,
    pub xi_abs: CertifiedValue,
    pub related_branch: u8,
    /// `y < 12^(1/4) h^(3/2)`.
    pub small_flag: bool,
    /// `H(x, y) >= (3/2) (3D)^(1/2) h^3`.
    #[serde(rename = "large_H_flag")]
    pub large_h_flag: bool,
    pub resolvent: SolutionResolventData,
}

/// `y^4 < 12 h^6`.
pub fn is_small_y(y: &Integer, h: u64) -> bool {
    let y4 = Integer::from(y.pow(4u32));
    y4 < Integer::from(12) * Integer::from(h).pow(6u32)
}

/// `4 H^2 >= 27 D h^6`, the squared form of `H >= (3/2)(3D)^(1/2) h^3`.
pub fn is_large_h(hv: &Integer, d: &Integer, h: u64) -> bool {
    Integer::from(4) * Integer::from(hv.square_ref()) >= Integer::from(27) * d * Integer::from(h).pow(6u32)
}

/// Real roots of `F(t, 1)` in increasing order, as `f64` estimates.
/// Only used to seed exact searches.
fn root_estimates(a: f64, b: f64, c: f64, d: f64) -> [f64; 3] {
    let g = |t: f64| ((a * t + b) * t + c) * t + d;
    let disc = (b * b - 3.0 * a * c).max(0.0).sqrt();
    let (mut c1, mut c2) = ((-b - disc) / (3.0 * a), (-b + disc) / (3.0 * a));
    if c1 > c2 {
        std::mem::swap(&mut c1, &mut c2);
    }
    let bound = 1.0 + [b, c, d].iter().map(|v| (v / a).abs()).fold(0.0, f64::max);
    let bisect = |mut lo: f64, mut hi: f64| {
        let slo = g(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid).signum() == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    [bisect(-bound, c1), bisect(c1, c2), bisect(c2, bound)]
}

/// Per-`y` evaluation of the cubic, in `i128` or arbitrary precision.
trait Strip: Sync {
    /// Sign of `F(x, y)` relative to `[-h, h]`: -1 below, 0 inside, 1 above.
    fn band(&self, y: i64, x: i64) -> i8;
    /// `(m1, m2)` with the critical points in `(m1, m1 + 4/3)` and
    /// `[m2, m2 + 4/3)`, clamped to `[lo, hi]`.
    fn critical_brackets(&self, y: i64, lo: i64, hi: i64) -> (i64, i64);
}

/// Coefficients normalised so that `a > 0`.
struct FastStrip {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
    hess_a: i128,
    h: i128,
}

impl Strip for FastStrip {
    #[inline]
    fn band(&self, y: i64, x: i64) -> i8 {
        let (x, y) = (x as i128, y as i128);
        let v = ((self.a * x + self.b * y) * x + self.c * y * y) * x + self.d * y * y * y;
        if v < -self.h {
            -1
        } else if v > self.h {
            1
        } else {
            0
        }
    }

    fn critical_brackets(&self, y: i64, lo: i64, hi: i64) -> (i64, i64) {
        let y = y as i128;
        let s0 = isqrt_i128(self.hess_a * y * y);
        let by = self.b * y;
        let three_a = 3 * self.a;
        let m1 = (-by - s0 - 1).div_euclid(three_a);
        let m2 = (-by + s0).div_euclid(three_a);
        let clamp = |m: i128| m.clamp(lo as i128 - 2, hi as i128 + 2) as i64;
        (clamp(m1), clamp(m2))
    }
}

fn isqrt_i128(n: i128) -> i128 {
    debug_assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

struct BigStrip {
    a: Integer,
    b: Integer,
    c: Integer,
    d: Integer,
    hess_a: Integer,
    h: Integer,
}

impl Strip for BigStrip {
    fn band(&self, y: i64, x: i64) -> i8 {
        let (x, y) = (Integer::from(x), Integer::from(y));
        let mut v = Integer::from(&self.a * &x) + Integer::from(&self.b * &y);
        v *= &x;
        v += Integer::from(&self.c * &y) * &y;
        v *= &x;
        v += Integer::from(&self.d * &y) * &y * &y;
        if v < Integer::from(-&self.h) {
            -1
        } else if v > self.h {
            1
        } else {
            0
        }
    }

    fn critical_brackets(&self, y: i64, lo: i64, hi: i64) -> (i64, i64) {
        let y = Integer::from(y);
        let s0 = (Integer::from(&self.hess_a * &y) * &y).sqrt();
        let by = Integer::from(&self.b * &y);
        let three_a = Integer::from(&self.a * 3u32);
        let m1 = (Integer::from(-&by) - &s0 - 1u32).div_floor(three_a.clone());
        let m2 = (Integer::from(-&by) + &s0).div_floor(three_a);
        let clamp = |m: Integer| -> i64 {
            if m < lo - 2 {
                lo - 2
            } else if m > hi + 2 {
                hi + 2
            } else {
                m.to_i64().expect("clamped")
            }
        };
        (clamp(m1), clamp(m2))
    }
}

/// First `x` in `[lo, hi]` where the monotone predicate holds, or `hi + 1`.
fn first_true(lo: i64, hi: i64, guess: i64, pred: impl Fn(i64) -> bool) -> i64 {
    if lo > hi {
        return hi + 1;
    }
    let g = guess.clamp(lo, hi);
    // Bracket the switch point as (f, t] with pred(f) false and pred(t) true,
    // using lo - 1 and hi + 1 as virtual ends.
    let (mut f, mut t);
    if pred(g) {
        t = g;
        let mut step = 1i64;
        loop {
            let probe = t - step;
            if probe < lo {
                f = lo - 1;
                break;
            }
            if pred(probe) {
                t = probe;
                step *= 2;
            } else {
                f = probe;
                break;
            }
        }
    } else {
        f = g;
        let mut step = 1i64;
        loop {
            let probe = f + step;
            if probe > hi {
                t = hi + 1;
                break;
            }
            if pred(probe) {
                t = probe;
                break;
            } else {
                f = probe;
                step *= 2;
            }
        }
    }
    while t - f > 1 {
        let m = f + (t - f) / 2;
        if pred(m) {
            t = m;
        } else {
            f = m;
        }
    }
    t
}

/// Integers in `[lo, hi]` where `|F| <= h`, given that `dir * F` is
/// increasing on the range.
fn monotone_run(s: &dyn Strip, y: i64, lo: i64, hi: i64, dir: i8, guess: i64, out: &mut Vec<i64>) {
    if lo > hi {
        return;
    }
    let phi = |x: i64| s.band(y, x) * dir;
    let left = first_true(lo, hi, guess, |x| phi(x) >= 0);
    let past = first_true(lo, hi, guess, |x| phi(x) > 0);
    out.extend(left..past);
}

fn strip_points(s: &dyn Strip, y: i64, bx: i64, roots: &[f64; 3]) -> Vec<i64> {
    let (m1, m2) = s.critical_brackets(y, -bx, bx);
    let guess = |r: f64| {
        let v = (r * y as f64).round();
        if v.is_finite() {
            v.clamp(-(bx as f64) - 1.0, bx as f64 + 1.0) as i64
        } else {
            0
        }
    };
    let mut xs = Vec::new();
    monotone_run(s, y, -bx, m1.min(bx), 1, guess(roots[0]), &mut xs);
    monotone_run(s, y, (m1 + 2).max(-bx), m2.min(bx), -1, guess(roots[1]), &mut xs);
    monotone_run(s, y, (m2 + 2).max(-bx), bx, 1, guess(roots[2]), &mut xs);
    for x in [m1 + 1, m2 + 1] {
        if (-bx..=bx).contains(&x) && s.band(y, x) == 0 {
            xs.push(x);
        }
    }
    xs.sort_unstable();
    xs.dedup();
    xs
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All primitive `(x, y)` with `0 < y <= box`, `|x| <= box` and
/// `0 < |F(x, y)| <= h`, sorted by `(y, x)`. No resolvent data is attached.
pub fn enumerate_points(f: &CubicForm, h: u64, box_size: u64) -> Result<Vec<(i64, i64)>> {
    check_form(f)?;
    if h < 1 || box_size < 1 || box_size > MAX_BOX {
        return Err(Error::InvalidArgument("need h >= 1 and 1 <= box <= 2^40".into()));
    }
    let g = if *f.a() < 0 { f.negate() } else { f.clone() };
    let bx = box_size as i64;
    let roots = root_estimates(g.a().to_f64(), g.b().to_f64(), g.c().to_f64(), g.d().to_f64());
    let hess_a = g.hessian().a;

    let strip: Box<dyn Strip> = if fits_i128(&g, &hess_a, h, box_size) {
        let v = |i: &Integer| i.to_i128().expect("checked");
        Box::new(FastStrip {
            a: v(g.a()),
            b: v(g.b()),
            c: v(g.c()),
            d: v(g.d()),
            hess_a: v(&hess_a),
            h: h as i128,
        })
    } else {
        Box::new(BigStrip {
            a: g.a().clone(),
            b: g.b().clone(),
            c: g.c().clone(),
            d: g.d().clone(),
            hess_a,
            h: Integer::from(h),
        })
    };
    let strip = strip.as_ref();

    const CHUNK: i64 = 512;
    let chunks: Vec<i64> = (0..(bx + CHUNK - 1) / CHUNK).collect();
    let per_chunk: Vec<Vec<(i64, i64)>> = chunks
        .par_iter()
        .map(|&c| {
            let mut pts = Vec::new();
            for y in (c * CHUNK + 1)..=((c + 1) * CHUNK).min(bx) {
                for x in strip_points(strip, y, bx, &roots) {
                    if gcd(x.unsigned_abs(), y as u64) == 1 && strip.band(y, x) == 0 {
                        pts.push((x, y));
                    }
                }
            }
            pts
        })
        .collect();
    let mut out: Vec<(i64, i64)> = per_chunk.into_iter().flatten().collect();
    // F never vanishes at a nonzero integer point of an irreducible form,
    // but the exact value is cheap to confirm on the few survivors.
    out.retain(|&(x, y)| !f.eval_i64(x, y).is_zero());
    Ok(out)
}

fn fits_i128(f: &CubicForm, hess_a: &Integer, h: u64, box_size: u64) -> bool {
    let m = f.coeffs().iter().map(|c| Integer::from(c.abs_ref())).max().unwrap();
    let b = Integer::from(box_size + 3);
    let limit = Integer::from(1) << 120;
    let eval_bound = Integer::from(4) * &m * Integer::from((&b).pow(3u32));
    let sqrt_arg = Integer::from(hess_a * &b) * &b;
    eval_bound < limit && sqrt_arg < limit && Integer::from(h) < limit
}

fn check_form(f: &CubicForm) -> Result<()> {
    let d = f.discriminant();
    if d <= 0 {
        return Err(Error::NonPositiveDiscriminant(d));
    }
    if !f.is_irreducible() {
        return Err(Error::Reducible);
    }
    Ok(())
}

/// Brute force over the whole signed box: every primitive `(x, y)` with
/// `|x|, |y| <= box`, `(x, y) != (0, 0)` and `0 < |F(x, y)| <= h`. Meant as
/// a test oracle for small boxes.
pub fn brute_force_signed(f: &CubicForm, h: u64, box_size: i64) -> Vec<(i64, i64)> {
    let hh = Integer::from(h);
    let mut out = Vec::new();
    for y in -box_size..=box_size {
        for x in -box_size..=box_size {
            if gcd(x.unsigned_abs(), y.unsigned_abs()) != 1 {
                continue;
            }
            let v = f.eval_i64(x, y);
            if !v.is_zero() && Integer::from(v.abs_ref()) <= hh {
                out.push((x, y));
            }
        }
    }
    out
}

/// Enumerates and attaches exact values, flags and resolvent data.
pub fn enumerate(req: &SolveRequest) -> Result<Vec<Solution>> {
    req.validate()?;
    let points = enumerate_points(&req.form, req.h, req.box_size)?;
    let set = build_resolvents_with_precision(&req.form, req.precision)?;
    attach(&req.form, &set, req.h, &points)
}

/// Builds [`Solution`] records for points already known to solve the
/// inequality with bound `h`.
pub fn attach(f: &CubicForm, set: &ResolventSet, h: u64, points: &[(i64, i64)]) -> Result<Vec<Solution>> {
    let hess = f.hessian();
    let d = f.discriminant();
    points
        .iter()
        .map(|&(x, y)| {
            let (xi, yi) = (Integer::from(x), Integer::from(y));
            let hv = hess.eval(&xi, &yi);
            let data = classify(set, &xi, &yi)?;
            Ok(Solution {
                x,
                y,
                f_value: f.eval(&xi, &yi),
                small_flag: is_small_y(&yi, h),
                large_h_flag: is_large_h(&hv, &d, h),
                h_value: hv,
                xi_abs: data.xi_abs.clone(),
                related_branch: data.related_branch,
                resolvent: data,
            })
        })
        .collect()
}

/// The `y = 0` diagnostic: `(1, 0)` solves the inequality iff `0 < |a| <= h`.
pub fn y_zero_count(f: &CubicForm, h: u64) -> u64 {
    let a = Integer::from(f.a().abs_ref());
    u64::from(a > 0 && a <= h)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    /// `y < 12^(1/4) h^(3/2)`.
    pub small: u64,
    /// Neither small nor large.
    pub mid: u64,
    /// `H >= (3/2)(3D)^(1/2) h^3`.
    pub large: u64,
    /// Both small and large; these are the only solutions counted twice in
    /// `small + large`, so `small + mid + large - small_and_large` is the total.
    pub small_and_large: u64,
}

pub fn split_counts(solutions: &[Solution]) -> SplitCounts {
    let mut c = SplitCounts::default();
    for s in solutions {
        match (s.small_flag, s.large_h_flag) {
            (true, true) => {
                c.small += 1;
                c.large += 1;
                c.small_and_large += 1;
            }
            (true, false) => c.small += 1,
            (false, true) => c.large += 1,
            (false, false) => c.mid += 1,
        }
    }
    c
}

/// Point of a gap chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub x: i64,
    pub y: i64,
    #[serde(with = "crate::json")]
    pub h_value: Integer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapChain {
    pub branch: u8,
    /// Related solutions ordered by `|xi|`, i.e. by `H`.
    pub solutions: Vec<ChainEntry>,
    /// Consecutive entries with equal `|xi|`.
    pub ties: bool,
    /// `|xi_{i+1}| >= |xi_i|^2 / (h pi)` for every consecutive pair.
    pub consecutive_ok: bool,
    /// `|xi| >= (3D)^(1/4) / sqrt 2` for every entry.
    pub first_bound_ok: bool,
    /// `|xi_k| >= 2^(2^(k-2) - 1) (3D)^(1/4 + (2^(k-1) - 1) eps)` for `k >= 2`,
    /// or `None` when `eps` is outside `(0, 1/4)`.
    pub iterated_ok: Option<bool>,
    pub chain_ok: bool,
    pub violations: Vec<String>,
}

/// Groups solutions by related branch and checks the growth laws.
pub fn audit_gap_chains(solutions: &[Solution], d: &Integer, h: u64) -> Result<[GapChain; 3]> {
    let eps = epsilon_of(d, &Integer::from(h))?;
    let mut chains = Vec::with_capacity(3);
    for k in 0..3u8 {
        let mut entries: Vec<ChainEntry> = solutions
            .iter()
            .filter(|s| s.related_branch == k)
            .map(|s| ChainEntry { x: s.x, y: s.y, h_value: s.h_value.clone() })
            .collect();
        entries.sort_by(|p, q| p.h_value.cmp(&q.h_value).then((p.y, p.x).cmp(&(q.y, q.x))));
        chains.push(audit_chain(k, entries, d, h, eps.in_range)?);
    }
    Ok(chains.try_into().expect("three branches"))
}

fn audit_chain(branch: u8, entries: Vec<ChainEntry>, d: &Integer, h: u64, in_range: bool) -> Result<GapChain> {
    let mut violations = Vec::new();
    let ties = entries.windows(2).any(|w| w[0].h_value == w[1].h_value);
    let three_d = Integer::from(3) * d;

    // 4 H^2 >= 3D is the square of H >= sqrt(3D)/2.
    let mut first_bound_ok = true;
    for e in &entries {
        if Integer::from(4) * Integer::from(e.h_value.square_ref()) < three_d {
            first_bound_ok = false;
            violations.push(format!("({}, {}): 4H^2 < 3D", e.x, e.y));
        }
    }

    // h^2 pi^2 H_{i+1} >= H_i^2, the square of the gap inequality.
    let mut consecutive_ok = true;
    for w in entries.windows(2) {
        let ok = decide(|p| {
            let pi = Real::pi(p);
            let lhs = pi.sqr().mul_int(&(Integer::from(h) * h)).mul_int(&w[1].h_value);
            lhs.ge(&Real::from_int(&Integer::from(w[0].h_value.square_ref()), p))
        })?;
        if !ok {
            consecutive_ok = false;
            violations.push(format!("gap fails between ({}, {}) and ({}, {})", w[0].x, w[0].y, w[1].x, w[1].y));
        }
    }

    let iterated_ok = if in_range {
        let mut ok = true;
        for (i, e) in entries.iter().enumerate().skip(1) {
            let k = (i + 1) as u32;
            let holds = decide(|p| {
                let eps = epsilon_real(d, &Integer::from(h), p);
                let lhs = Real::from_int(&e.h_value, p).ln().mul(&Real::from_ratio(1, 2, p));
                lhs.ge(&iterated_rhs(k, &eps, d, p))
            })?;
            if !holds {
                ok = false;
                violations.push(format!("iterated bound fails at index {k} ({}, {})", e.x, e.y));
            }
        }
        Some(ok)
    } else {
        None
    };

    let chain_ok = first_bound_ok && consecutive_ok && iterated_ok.unwrap_or(true);
    Ok(GapChain { branch, solutions: entries, ties, consecutive_ok, first_bound_ok, iterated_ok, chain_ok, violations })
}

/// `ln` of `2^(2^(k-2) - 1) (3D)^(1/4 + (2^(k-1) - 1) eps)`.
fn iterated_rhs(k: u32, eps: &Real, d: &Integer, p: u32) -> Real {
    let e1 = (Integer::from(1) << (k - 2)) - 1u32;
    let e2 = (Integer::from(1) << (k - 1)) - 1u32;
    let ln3d = Real::from_int(&(Integer::from(3) * d), p).ln();
    let expo = Real::from_ratio(1, 4, p).add(&eps.mul_int(&e2));
    Real::ln2(p).mul_int(&e1).add(&expo.mul(&ln3d))
}

fn decide(f: impl Fn(u32) -> Option<bool>) -> Result<bool> {
    with_escalation(DEFAULT_PRECISION, f)
        .map(|(v, _)| v)
        .ok_or_else(|| Error::precision("gap comparison", crate::real::MAX_PRECISION))
}

/// Header written before the solution list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub form: CubicForm,
    #[serde(rename = "D", with = "crate::json")]
    pub discriminant: Integer,
    pub h: u64,
    #[serde(rename = "box")]
    pub box_size: u64,
    pub precision: u32,
    pub epsilon: EpsilonContext,
    pub count_canonical: u64,
    /// Each canonical solution and its negative.
    pub count_signed: u64,
    /// `(1, 0)` when `0 < |a| <= h`; not part of the counts above.
    pub count_y_zero: u64,
    pub split: SplitCounts,
    /// `12^(1/4) h^(3/2)`.
    pub small_y_threshold: CertifiedValue,
    /// `(3/2) (3D)^(1/2) h^3`.
    pub large_h_threshold: CertifiedValue,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub summary: SolveSummary,
    pub solutions: Vec<Solution>,
}

/// Runs [`enumerate`] and assembles the summary.
pub fn solve(req: &SolveRequest) -> Result<SolveOutput> {
    let solutions = enumerate(req)?;
    let d = req.form.discriminant();
    let p = req.precision;
    let hh = Integer::from(req.h);
    let h32 = Real::from_int(&hh, p).sqrt().mul_int(&hh);
    let small_t = Real::from_i64(12, p).sqrt().sqrt().mul(&h32);
    let large_t = Real::from_rational(&Rational::from((3, 2)), p)
        .mul(&Real::from_int(&(Integer::from(3) * &d), p).sqrt())
        .mul_int(&Integer::from((&hh).pow(3u32)));
    let n = solutions.len() as u64;
    Ok(SolveOutput {
        summary: SolveSummary {
            form: req.form.clone(),
            epsilon: epsilon_of(&d, &hh)?,
            discriminant: d,
            h: req.h,
            box_size: req.box_size,
            precision: req.precision,
            count_canonical: n,
            count_signed: 2 * n,
            count_y_zero: y_zero_count(&req.form, req.h),
            split: split_counts(&solutions),
            small_y_threshold: small_t.certified(),
            large_h_threshold: large_t.certified(),
            note: format!("complete only within |x| <= {0}, 0 < y <= {0}", req.box_size),
        },
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn canonical_half(mut v: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
        v.retain(|&(_, y)| y > 0);
        v.sort_by_key(|&(x, y)| (y, x));
        v
    }

    #[test]
    fn known_form_small_box() {
        let f = CubicForm::new(1, 0, -3, 1);
        let pts = enumerate_points(&f, 1, 50).unwrap();
        assert!(pts.contains(&(0, 1)));
        assert!(pts.contains(&(1, 3)));
        assert!(!pts.contains(&(3, 1)));
        let brute = brute_force_signed(&f, 1, 50);
        let y_nonzero: Vec<_> = brute.iter().copied().filter(|&(_, y)| y != 0).collect();
        assert_eq!(y_nonzero.len(), 2 * pts.len());
        assert_eq!(canonical_half(brute), pts);
    }

    #[test]
    fn second_known_form() {
        let f = CubicForm::new(1, 1, -2, -1);
        let pts = enumerate_points(&f, 1, 50).unwrap();
        assert!(pts.contains(&(0, 1)));
        assert!(pts.contains(&(1, 1)));
        assert_eq!(canonical_half(brute_force_signed(&f, 1, 50)), pts);
    }

    #[test]
    fn zero_one_iff_small_d() {
        for (f, h, expect) in [
            (CubicForm::new(1, 0, -3, 1), 1, true),
            (CubicForm::new(1, 0, -7, 5), 4, false),
            (CubicForm::new(1, 0, -7, 5), 5, true),
        ] {
            let pts = enumerate_points(&f, h, 20).unwrap();
            assert_eq!(pts.contains(&(0, 1)), expect, "{f} h = {h}");
        }
    }

    #[test]
    fn negative_leading_coefficient() {
        let f = CubicForm::new(-2, 3, 5, -1);
        assert!(f.discriminant() > 0 && f.is_irreducible());
        for h in 1..6 {
            let pts = enumerate_points(&f, h, 40).unwrap();
            assert_eq!(canonical_half(brute_force_signed(&f, h, 40)), pts);
        }
    }

    #[test]
    fn big_arithmetic_path_agrees() {
        let f = CubicForm::new(1, 0, -3, 1);
        let hess_a = f.hessian().a;
        let g = BigStrip {
            a: f.a().clone(),
            b: f.b().clone(),
            c: f.c().clone(),
            d: f.d().clone(),
            hess_a: hess_a.clone(),
            h: Integer::from(3),
        };
        let fast = FastStrip { a: 1, b: 0, c: -3, d: 1, hess_a: 9, h: 3 };
        let roots = root_estimates(1.0, 0.0, -3.0, 1.0);
        for y in 1..200 {
            assert_eq!(strip_points(&g, y, 300, &roots), strip_points(&fast, y, 300, &roots));
            assert_eq!(g.critical_brackets(y, -300, 300), fast.critical_brackets(y, -300, 300));
        }
        // Coefficients too large for i128 go through the same search.
        let big = CubicForm::new(Integer::from(1) << 100u32, 0, -(Integer::from(3) << 100u32), Integer::from(1) << 100u32);
        let _ = enumerate_points(&big.clone(), 1, 10);
    }

    #[test]
    fn flags() {
        assert!(is_small_y(&Integer::from(1), 1));
        assert!(!is_small_y(&Integer::from(2), 1));
        assert!(!is_small_y(&Integer::from(3), 1));
        assert!(is_large_h(&Integer::from(63), &Integer::from(81), 1));
        assert!(!is_large_h(&Integer::from(23), &Integer::from(81), 1));
    }

    #[test]
    fn solve_known_form() {
        let out = solve(&SolveRequest { box_size: 50, ..SolveRequest::new(CubicForm::new(1, 0, -3, 1), 1) }).unwrap();
        let s = &out.summary;
        assert_eq!(s.count_signed, 2 * s.count_canonical);
        assert_eq!(s.count_y_zero, 1);
        let sol = out.solutions.iter().find(|s| (s.x, s.y) == (1, 3)).unwrap();
        assert_eq!(sol.h_value, 63);
        assert!(!sol.small_flag);
        assert!(sol.large_h_flag);
        let c = s.split;
        assert_eq!(c.small + c.mid + c.large - c.small_and_large, s.count_canonical);
        let json = serde_json::to_string(&out).unwrap();
        let back: SolveOutput = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        for sol in &out.solutions {
            assert!(crate::resolvent::check_cosi(&sol.resolvent));
        }
    }

    #[test]
    fn gap_chains_on_known_forms() {
        for f in [CubicForm::new(1, 0, -3, 1), CubicForm::new(1, 1, -2, -1)] {
            let sols = enumerate(&SolveRequest { box_size: 1000, ..SolveRequest::new(f.clone(), 1) }).unwrap();
            let chains = audit_gap_chains(&sols, &f.discriminant(), 1).unwrap();
            let total: usize = chains.iter().map(|c| c.solutions.len()).sum();
            assert_eq!(total, sols.len());
            for c in &chains {
                assert!(c.chain_ok, "{f}: {:?}", c.violations);
                assert!(c.iterated_ok.is_none());
            }
        }
    }

    #[test]
    fn short_chains_are_ok() {
        let chains = audit_gap_chains(&[], &Integer::from(3888), 1).unwrap();
        for c in chains {
            assert!(c.chain_ok);
            assert_eq!(c.iterated_ok, Some(true));
        }
    }

    #[test]
    fn first_true_edges() {
        let p = |t: i64| move |x: i64| x >= t;
        for t in -5..=6 {
            for guess in -10..=10 {
                let got = first_true(-3, 4, guess, p(t));
                assert_eq!(got, t.clamp(-3, 5), "t = {t}, guess = {guess}");
            }
        }
        assert_eq!(first_true(3, 2, 0, |_| true), 3);
    }

    fn irreducible_positive() -> impl Strategy<Value = CubicForm> {
        (-6i64..=6, -9i64..=9, -9i64..=9, -9i64..=9).prop_filter_map("need D > 0, irreducible", |(a, b, c, d)| {
            let f = CubicForm::try_new(a, b, c, d).ok()?;
            (f.discriminant() > 0 && f.is_irreducible()).then_some(f)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_brute_force(f in irreducible_positive(), h in 1u64..30, bx in 1i64..40) {
            let pts = enumerate_points(&f, h, bx as u64).unwrap();
            prop_assert_eq!(canonical_half(brute_force_signed(&f, h, bx)), pts);
        }
    }
}
