//! Reduced irreducible forms of positive discriminant up to a bound.
//!
//! Forms are generated from their Hessians. For a reduced Hessian
//! `(A, B, C)` we have `3A^2 <= 3D`, and the syzygy at `(1, 0)` gives
//! `27 a^2 D <= 4 A^3`, so `a^2 <= 4A/27`. Given `(a, A, B)` the remaining
//! coefficients are determined by `b`:
//!
//! ```text
//! c = (b^2 - A) / (3a)
//! d = (b^3 - A b - 3 a B) / (27 a^2)
//! C = (A^2 - A b^2 + 3 a B b) / (9 a^2)
//! ```
//!
//! and `C >= A` confines `b` to the roots of `A b^2 - 3aB b + 9a^2 A - A^2`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::bounds::certified_floor;
use crate::error::{Error, Result};
use crate::form::CubicForm;
use crate::real::{with_escalation, Real, DEFAULT_PRECISION};
use crate::reduction::find_equivalence;

/// Which values of `h` to check for each form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HPolicy {
    Fixed { h: u64 },
    List { hs: Vec<u64> },
    /// `h = floor((3D)^(1/4 - eps) / (2 pi))` for each grid value, skipping
    /// `h < 1`; the exact `eps` is recomputed from the integer `h`.
    EpsilonGrid { epsilons: Vec<f64> },
    /// Every `h >= 1` whose `eps` lies in `(0, 1/4)`.
    AllInRange,
}

impl HPolicy {
    /// The values of `h` this policy selects for discriminant `d`, sorted
    /// and without repeats.
    pub fn resolve(&self, d: &Integer) -> Result<Vec<u64>> {
        let mut hs = match self {
            HPolicy::Fixed { h } => vec![*h],
            HPolicy::List { hs } => hs.clone(),
            HPolicy::EpsilonGrid { epsilons } => {
                let mut hs = Vec::new();
                for &eps in epsilons {
                    let eps = Rational::from_f64(eps)
                        .ok_or_else(|| Error::InvalidArgument(format!("epsilon {eps} is not finite")))?;
                    let h = certified_floor(|p| Ok(grid_h(d, &eps, p)))?.floor;
                    if h >= 1 {
                        hs.push(h.to_u64().ok_or_else(|| Error::InvalidArgument(format!("h = {h} too large")))?);
                    }
                }
                hs
            }
            HPolicy::AllInRange => {
                let mut hs = Vec::new();
                let mut h = 1u64;
                while epsilon_positive(d, h)? {
                    hs.push(h);
                    h += 1;
                }
                hs
            }
        };
        if hs.contains(&0) {
            return Err(Error::InvalidArgument("h must be at least 1".into()));
        }
        hs.sort_unstable();
        hs.dedup();
        Ok(hs)
    }
}

/// `(3D)^(1/4 - eps) / (2 pi)`.
fn grid_h(d: &Integer, eps: &Rational, p: u32) -> Real {
    let expo = Real::from_ratio(1, 4, p).sub(&Real::from_rational(eps, p));
    let ln3d = Real::from_int(&(Integer::from(3) * d), p).ln();
    expo.mul(&ln3d).exp().div(&Real::pi(p).mul_int(&Integer::from(2)))
}

/// `eps > 0`, i.e. `(2 pi h)^4 < 3D`.
fn epsilon_positive(d: &Integer, h: u64) -> Result<bool> {
    with_escalation(DEFAULT_PRECISION, |p| {
        let t = Real::pi(p).mul_int(&Integer::from(2 * h)).sqr().sqr();
        t.lt(&Real::from_int(&(Integer::from(3) * d), p))
    })
    .map(|(v, _)| v)
    .ok_or_else(|| Error::precision("epsilon sign", crate::real::MAX_PRECISION))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub d_max: u64,
    pub dedupe: bool,
    pub h_policy: HPolicy,
}

/// One line of a corpus file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub form_id: String,
    #[serde(flatten)]
    pub form: CubicForm,
    #[serde(rename = "D", with = "crate::json")]
    pub discriminant: Integer,
}

impl CorpusRecord {
    pub fn new(form: CubicForm) -> CorpusRecord {
        let discriminant = form.discriminant();
        CorpusRecord { form_id: form_id(&form), form, discriminant }
    }
}

/// Stable identifier derived from the coefficients.
pub fn form_id(f: &CubicForm) -> String {
    format!("f_{}_{}_{}_{}", f.a(), f.b(), f.c(), f.d())
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All reduced forms with `a > 0` and `0 < D <= d_max`, irreducible,
/// sorted by `(D, a, b, c, d)`. No deduplication.
fn reduced_positive_leading(d_max: u64) -> Vec<CubicForm> {
    let d_max = d_max as i128;
    let a_max_hess = isqrt(d_max.min(i64::MAX as i128) as i64);
    let mut out = Vec::new();
    for big_a in 1..=a_max_hess as i128 {
        for big_b in -big_a..=big_a {
            // 27 a^2 <= 4A.
            let mut a = 1i128;
            while 27 * a * a <= 4 * big_a {
                push_for(a, big_a, big_b, d_max, &mut out);
                a += 1;
            }
        }
    }
    out.sort_by(|p, q| (p.discriminant(), p.coeffs()).cmp(&(q.discriminant(), q.coeffs())));
    out
}

fn push_for(a: i128, big_a: i128, big_b: i128, d_max: i128, out: &mut Vec<CubicForm>) {
    // A b^2 - 3aB b + 9a^2 A - A^2 <= 0.
    let disc = 9 * a * a * big_b * big_b - 4 * big_a * (9 * a * a * big_a - big_a * big_a);
    if disc < 0 {
        return;
    }
    let root = (disc as f64).sqrt();
    let lo = ((3.0 * (a * big_b) as f64 - root) / (2.0 * big_a as f64)).floor() as i128 - 1;
    let hi = ((3.0 * (a * big_b) as f64 + root) / (2.0 * big_a as f64)).ceil() as i128 + 1;
    for b in lo..=hi {
        if big_a * b * b - 3 * a * big_b * b + 9 * a * a * big_a - big_a * big_a > 0 {
            continue;
        }
        let cn = b * b - big_a;
        if cn % (3 * a) != 0 {
            continue;
        }
        let c = cn / (3 * a);
        let dn = b * b * b - big_a * b - 3 * a * big_b;
        if dn % (27 * a * a) != 0 {
            continue;
        }
        let d = dn / (27 * a * a);
        let big_c = c * c - 3 * b * d;
        if big_c < big_a {
            continue;
        }
        let three_d = 4 * big_a * big_c - big_b * big_b;
        if three_d <= 0 || three_d % 3 != 0 || three_d / 3 > d_max {
            continue;
        }
        let f = CubicForm::new(
            Integer::from(a),
            Integer::from(b),
            Integer::from(c),
            Integer::from(d),
        );
        debug_assert_eq!(f.discriminant(), Integer::from(three_d / 3));
        if f.is_irreducible() {
            out.push(f);
        }
    }
}

/// Generates the corpus described by `spec`. With `dedupe`, one form per
/// GL2(Z) class (the first in `(D, a, b, c, d)` order); without it, every
/// reduced form, including those with `a < 0`.
pub fn generate_corpus(spec: &CorpusSpec) -> Vec<CubicForm> {
    let positive = reduced_positive_leading(spec.d_max);
    let mut forms = if spec.dedupe {
        dedupe(positive)
    } else {
        let mut all: Vec<CubicForm> = positive.iter().map(|f| f.negate()).collect();
        all.extend(positive);
        all.sort_by(|p, q| (p.discriminant(), p.coeffs()).cmp(&(q.discriminant(), q.coeffs())));
        all
    };
    forms.dedup();
    forms
}

fn dedupe(forms: Vec<CubicForm>) -> Vec<CubicForm> {
    // Reduced forms in one class have Hessians (A, +-B, C).
    let mut buckets: BTreeMap<(Integer, Integer, Integer, Integer), Vec<usize>> = BTreeMap::new();
    let mut keep = vec![true; forms.len()];
    for (i, f) in forms.iter().enumerate() {
        let h = f.hessian();
        let key = (f.discriminant(), h.a.clone(), Integer::from(h.b.abs_ref()), h.c.clone());
        let bucket = buckets.entry(key).or_default();
        for &j in bucket.iter() {
            if keep[j] && matches!(find_equivalence(&forms[j], f), Ok(Some(_))) {
                keep[i] = false;
                break;
            }
        }
        if keep[i] {
            bucket.push(i);
        }
    }
    forms.into_iter().zip(keep).filter_map(|(f, k)| k.then_some(f)).collect()
}

pub fn write_corpus(path: &Path, forms: &[CubicForm]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for f in forms {
        let line = serde_json::to_string(&CorpusRecord::new(f.clone()))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a JSON-lines corpus. Blank lines are skipped.
pub fn read_corpus(path: &Path) -> Result<Vec<CorpusRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusRecord = serde_json::from_str(&line).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(rec);
    }
    Ok(out)
}
