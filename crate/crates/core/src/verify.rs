//! Per-form verification: every identity, pointwise bound, gap law and count bound
//! evaluated on one reduced form for one or more values of `h`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, BoundReport, LARGE_SOLUTION_BOUND};
use crate::corpus::form_id;
use crate::error::{Error, Result};
use crate::form::{CubicForm, UnimodularMatrix};
use crate::real::{CertifiedValue, DEFAULT_PRECISION};
use crate::reduction::ReducedForm;
use crate::resolvent::{build_resolvents_with_precision, check_cosi};
use crate::solver::{
    attach, audit_gap_chains, enumerate_points, is_large_h, is_small_y, split_counts, y_zero_count, Solution,
    SplitCounts, DEFAULT_BOX,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Pipeline parameters shared by every form of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    #[serde(rename = "box")]
    pub box_size: u64,
    pub precision: u32,
    /// Random points per form for the pointwise Hessian bounds.
    pub spot_points: usize,
    /// Random matrices per form for the covariance check.
    pub covariance_trials: usize,
    pub seed: u64,
    /// Record elapsed time in reports. Off gives reproducible output.
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            box_size: DEFAULT_BOX,
            precision: DEFAULT_PRECISION,
            spot_points: 1000,
            covariance_trials: 4,
            seed: 0,
            timings: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail { detail: String },
    NotApplicable { reason: String },
}

impl CheckStatus {
    fn from_bool(ok: bool, detail: impl FnOnce() -> String) -> CheckStatus {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail { detail: detail() }
        }
    }

    fn na(reason: impl Into<String>) -> CheckStatus {
        CheckStatus::NotApplicable { reason: reason.into() }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, CheckStatus::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, CheckStatus::Pass)
    }

    /// `pass`, `fail` or `not_applicable`.
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail { .. } => "fail",
            CheckStatus::NotApplicable { .. } => "not_applicable",
        }
    }
}

/// One status per check. Field order is the CSV column order and only grows
/// at the end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    /// `4H^3 = G^2 + 27 D F^2` coefficientwise.
    pub syzygy: CheckStatus,
    /// `H` and `G` transform as covariants, `D` is invariant.
    pub covariance: CheckStatus,
    /// `H(x, y) >= sqrt(3D) / 2` for `y != 0`.
    pub hessian_lower_bound: CheckStatus,
    /// `H(x, y) >= (3/4) sqrt(D) y^2`, and `(3/2) sqrt(D) y^2` when `|x| >= 2|y|`.
    pub hessian_y_bound: CheckStatus,
    /// `|1 - eta/xi| < (pi/6)|z|`, and `< (pi/9)|z|` when `|z| < 1`.
    pub angle_bound: CheckStatus,
    /// `|xi_{i+1}| >= |xi_i|^2 / (h pi)` and `|xi| >= (3D)^(1/4) / sqrt 2`.
    pub gap: CheckStatus,
    /// `|xi_k| >= 2^(2^(k-2) - 1) (3D)^(1/4 + (2^(k-1) - 1) eps)`.
    pub chain: CheckStatus,
    /// Total count against `floor(9 + log2(3/(8 eps) + 1/2))`.
    pub count_newmain: CheckStatus,
    /// Total count against the discriminant-dependent bound.
    pub count_main: CheckStatus,
    /// Solutions with `H` below the large threshold against the first small bound.
    pub count_small_lemma1: CheckStatus,
    /// The same class against the second small bound.
    pub count_small_lemma2: CheckStatus,
    /// At most 9 solutions with large `H`, `(1, 0)` included.
    pub count_large_h: CheckStatus,
    /// At most 9 solutions with `y >= 12^(1/4) h^(3/2)`.
    pub count_large_y: CheckStatus,
    /// Small-`y` solutions against the smaller of the two small bounds.
    pub count_small_y: CheckStatus,
    /// Per branch, at most `k - 1` solutions below the large threshold.
    pub detection: CheckStatus,
}

impl Checks {
    pub const NAMES: [&'static str; 15] = [
        "syzygy",
        "covariance",
        "hessian_lower_bound",
        "hessian_y_bound",
        "angle_bound",
        "gap",
        "chain",
        "count_newmain",
        "count_main",
        "count_small_lemma1",
        "count_small_lemma2",
        "count_large_h",
        "count_large_y",
        "count_small_y",
        "detection",
    ];

    /// Statuses in [`Checks::NAMES`] order.
    pub fn entries(&self) -> [(&'static str, &CheckStatus); 15] {
        let all = [
            &self.syzygy,
            &self.covariance,
            &self.hessian_lower_bound,
            &self.hessian_y_bound,
            &self.angle_bound,
            &self.gap,
            &self.chain,
            &self.count_newmain,
            &self.count_main,
            &self.count_small_lemma1,
            &self.count_small_lemma2,
            &self.count_large_h,
            &self.count_large_y,
            &self.count_small_y,
            &self.detection,
        ];
        std::array::from_fn(|i| (Self::NAMES[i], all[i]))
    }

    pub fn any_fail(&self) -> bool {
        self.entries().iter().any(|(_, c)| c.is_fail())
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.entries().iter().filter(|(_, c)| c.is_fail()).map(|(n, _)| *n).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    /// One solution per `+-` class, `y > 0`.
    pub canonical: u64,
    /// Both signs, the `y != 0` reading.
    pub signed: u64,
    /// `(1, 0)`, reported separately.
    pub y_zero: u64,
    pub split: SplitCounts,
    /// Canonical solutions with `H` below the large threshold.
    pub below_large_h: u64,
    /// Per related branch, when resolvent data is available.
    pub per_branch: Option<[u64; 3]>,
    pub per_branch_below_large_h: Option<[u64; 3]>,
}

/// Distance from each count to its bound; negative means a violation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub newmain: Option<i64>,
    pub main: Option<i64>,
    pub small_y: Option<i64>,
    pub large_h: i64,
    pub large_y: i64,
    pub detection: Option<i64>,
    /// Largest `|1 - eta/xi| / |z|` over the solutions; `pi/6 = 0.5236`.
    pub max_angle_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSolution {
    pub x: i64,
    pub y: i64,
    #[serde(with = "crate::json")]
    pub f_value: Integer,
    #[serde(with = "crate::json")]
    pub h_value: Integer,
    pub related_branch: Option<u8>,
    pub small_flag: bool,
    #[serde(rename = "large_H_flag")]
    pub large_h_flag: bool,
    pub xi_abs: Option<CertifiedValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub form_id: String,
    pub form: CubicForm,
    #[serde(rename = "D", with = "crate::json")]
    pub discriminant: Integer,
    pub h: u64,
    pub epsilon: CertifiedValue,
    pub in_range: bool,
    #[serde(rename = "box")]
    pub box_size: u64,
    pub precision: u32,
    pub counts: Counts,
    pub bounds: BoundReport,
    pub margins: Margins,
    pub checks: Checks,
    pub solutions: Vec<ReportSolution>,
    pub timing_ms: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.any_fail()
    }
}

/// Checks that do not depend on `h`.
struct FormChecks {
    syzygy: CheckStatus,
    covariance: CheckStatus,
    spot_lower: Option<String>,
    spot_y: Option<String>,
}

/// Runs every check on `f` for each `h` in `hs`, enumerating once with the
/// largest `h`. `f` must be reduced and irreducible with `D > 0`.
pub fn verify_form(f: &CubicForm, hs: &[u64], cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    let start = Instant::now();
    let reduced = ReducedForm::new(f.clone())?;
    if hs.contains(&0) {
        return Err(Error::InvalidArgument("h must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(f, cfg.seed));
    let form_checks = FormChecks {
        syzygy: CheckStatus::from_bool(f.syzygy_holds(), || "nonzero residual".into()),
        covariance: covariance_check(f, cfg.covariance_trials, &mut rng),
        spot_lower: spot_check(cfg, &mut rng, |x, y| reduced.check_hessian_lower_bound(x, y).unwrap_or(false)),
        spot_y: spot_check(cfg, &mut rng, |x, y| reduced.check_hessian_y_bound(x, y)),
    };
    let Some(&h_max) = hs.iter().max() else {
        return Ok(Vec::new());
    };
    let points = enumerate_points(f, h_max, cfg.box_size)?;
    // Resolvent data is shared by all h; its failure only disables the
    // checks that need it.
    let resolved: std::result::Result<Vec<Solution>, String> = build_resolvents_with_precision(f, cfg.precision)
        .and_then(|set| attach(f, &set, h_max, &points))
        .map_err(|e| e.to_string());
    let setup_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut out = Vec::with_capacity(hs.len());
    for &h in hs {
        let t = Instant::now();
        let report = verify_one(f, &reduced, h, cfg, &form_checks, &points, &resolved)?;
        let ms = t.elapsed().as_secs_f64() * 1e3 + setup_ms / hs.len() as f64;
        out.push(VerificationReport { timing_ms: cfg.timings.then_some(ms), ..report });
    }
    Ok(out)
}

fn verify_one(
    f: &CubicForm,
    reduced: &ReducedForm,
    h: u64,
    cfg: &VerifyConfig,
    fc: &FormChecks,
    points: &[(i64, i64)],
    resolved: &std::result::Result<Vec<Solution>, String>,
) -> Result<VerificationReport> {
    let d = reduced.discriminant().clone();
    let hh = Integer::from(h);
    let bounds = bound_report(&d, &hh)?;
    let eps = &bounds.epsilon;

    let solutions: Option<Vec<Solution>> = resolved.as_ref().ok().map(|all| {
        all.iter()
            .filter(|s| Integer::from(s.f_value.abs_ref()) <= h)
            .map(|s| Solution {
                small_flag: is_small_y(&Integer::from(s.y), h),
                large_h_flag: is_large_h(&s.h_value, &d, h),
                ..s.clone()
            })
            .collect()
    });
    let hess = f.hessian();
    let rows: Vec<ReportSolution> = match &solutions {
        Some(sols) => sols
            .iter()
            .map(|s| ReportSolution {
                x: s.x,
                y: s.y,
                f_value: s.f_value.clone(),
                h_value: s.h_value.clone(),
                related_branch: Some(s.related_branch),
                small_flag: s.small_flag,
                large_h_flag: s.large_h_flag,
                xi_abs: Some(s.xi_abs.clone()),
            })
            .collect(),
        None => points
            .iter()
            .filter_map(|&(x, y)| {
                let fv = f.eval_i64(x, y);
                (Integer::from(fv.abs_ref()) <= h).then(|| {
                    let hv = hess.eval(&Integer::from(x), &Integer::from(y));
                    ReportSolution {
                        x,
                        y,
                        small_flag: is_small_y(&Integer::from(y), h),
                        large_h_flag: is_large_h(&hv, &d, h),
                        f_value: fv,
                        h_value: hv,
                        related_branch: None,
                        xi_abs: None,
                    }
                })
            })
            .collect(),
    };
    let no_resolvents = || format!("resolvent data unavailable: {}", resolved.as_ref().err().cloned().unwrap_or_default());

    let canonical = rows.len() as u64;
    let split = match &solutions {
        Some(s) => split_counts(s),
        None => split_from_rows(&rows),
    };
    let below_large_h = rows.iter().filter(|r| !r.large_h_flag).count() as u64;
    let (per_branch, per_branch_below) = match &solutions {
        Some(sols) => {
            let mut all = [0u64; 3];
            let mut below = [0u64; 3];
            for s in sols {
                all[s.related_branch as usize] += 1;
                if !s.large_h_flag {
                    below[s.related_branch as usize] += 1;
                }
            }
            (Some(all), Some(below))
        }
        None => (None, None),
    };

    // Pointwise bounds: the spot sample plus every solution.
    let hessian_lower_bound = pointwise(&fc.spot_lower, &rows, |x, y| {
        reduced.check_hessian_lower_bound(x, y).unwrap_or(false)
    });
    let hessian_y_bound = pointwise(&fc.spot_y, &rows, |x, y| reduced.check_hessian_y_bound(x, y));

    let mut max_angle_ratio: Option<f64> = None;
    let angle_bound = match &solutions {
        Some(sols) => {
            let bad: Vec<String> = sols
                .iter()
                .filter(|s| !check_cosi(&s.resolvent))
                .map(|s| format!("({}, {})", s.x, s.y))
                .collect();
            for s in sols {
                let r = s.resolvent.related_distance.value_f64() / s.resolvent.z_abs.value_f64();
                if r.is_finite() {
                    max_angle_ratio = Some(max_angle_ratio.map_or(r, |m| m.max(r)));
                }
            }
            CheckStatus::from_bool(bad.is_empty(), || format!("violated at {}", bad.join(", ")))
        }
        None => CheckStatus::na(no_resolvents()),
    };

    let (gap, chain) = match &solutions {
        Some(sols) => {
            let chains = audit_gap_chains(sols, &d, h)?;
            let gap_bad: Vec<String> = chains
                .iter()
                .filter(|c| !(c.consecutive_ok && c.first_bound_ok))
                .flat_map(|c| c.violations.iter().map(move |v| format!("branch {}: {v}", c.branch)))
                .collect();
            let gap = CheckStatus::from_bool(gap_bad.is_empty(), || gap_bad.join("; "));
            let chain = if !eps.in_range {
                CheckStatus::na("epsilon outside (0, 1/4)")
            } else {
                let bad: Vec<u8> = chains.iter().filter(|c| c.iterated_ok == Some(false)).map(|c| c.branch).collect();
                CheckStatus::from_bool(bad.is_empty(), || format!("iterated bound fails on branches {bad:?}"))
            };
            (gap, chain)
        }
        None => (CheckStatus::na(no_resolvents()), CheckStatus::na(no_resolvents())),
    };

    let out_of_range = "epsilon outside (0, 1/4)";
    let against = |count: u64, b: &Option<crate::bounds::BoundValue>, what: &str| -> (CheckStatus, Option<i64>) {
        match b {
            None => (CheckStatus::na(out_of_range), None),
            Some(b) => count_check(count, &b.floor, b.floor_certified, what),
        }
    };
    let (count_newmain, m_newmain) = against(canonical, &bounds.newmain_bound, "total");
    let (count_main, m_main) = against(canonical, &bounds.main_bound, "total");
    let (count_small_lemma1, _) = against(below_large_h, &bounds.small_lemma1_bound, "below large H");
    let (count_small_lemma2, _) = against(below_large_h, &bounds.small_lemma2_bound, "below large H");
    let (count_small_y, m_small) = match bounds.small_floor() {
        None => (CheckStatus::na(out_of_range), None),
        Some(fl) => {
            let certified = [&bounds.small_lemma1_bound, &bounds.small_lemma2_bound]
                .into_iter()
                .flatten()
                .filter(|b| b.floor == fl)
                .any(|b| b.floor_certified);
            count_check(split.small, &fl, certified, "small y")
        }
    };

    // (1, 0) belongs to the large-H class when 4A^2 >= 27 D h^6.
    let y_zero = y_zero_count(f, h);
    let y_zero_large = y_zero == 1 && is_large_h(&hess.a, &d, h);
    let large_h_total = split.large + u64::from(y_zero_large);
    let cap = u64::from(LARGE_SOLUTION_BOUND);
    let count_large_h = CheckStatus::from_bool(large_h_total <= cap, || format!("{large_h_total} solutions with large H"));
    let large_y = canonical - split.small;
    let count_large_y = CheckStatus::from_bool(large_y <= cap, || format!("{large_y} solutions with large y"));

    let (detection, m_detection) = match (bounds.detection_k, per_branch_below) {
        (None, _) => (CheckStatus::na(out_of_range), None),
        (Some(_), None) => (CheckStatus::na(no_resolvents()), None),
        (Some(k), Some(below)) => {
            let worst = *below.iter().max().expect("three branches");
            let limit = u64::from(k - 1);
            (
                CheckStatus::from_bool(worst <= limit, || format!("{worst} solutions on one branch, k = {k}")),
                Some(limit as i64 - worst as i64),
            )
        }
    };

    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        form_id: form_id(f),
        form: f.clone(),
        discriminant: d,
        h,
        epsilon: eps.epsilon.clone(),
        in_range: eps.in_range,
        box_size: cfg.box_size,
        precision: cfg.precision,
        counts: Counts {
            canonical,
            signed: 2 * canonical,
            y_zero,
            split,
            below_large_h,
            per_branch,
            per_branch_below_large_h: per_branch_below,
        },
        margins: Margins {
            newmain: m_newmain,
            main: m_main,
            small_y: m_small,
            large_h: cap as i64 - large_h_total as i64,
            large_y: cap as i64 - large_y as i64,
            detection: m_detection,
            max_angle_ratio,
        },
        bounds,
        checks: Checks {
            syzygy: fc.syzygy.clone(),
            covariance: fc.covariance.clone(),
            hessian_lower_bound,
            hessian_y_bound,
            angle_bound,
            gap,
            chain,
            count_newmain,
            count_main,
            count_small_lemma1,
            count_small_lemma2,
            count_large_h,
            count_large_y,
            count_small_y,
            detection,
        },
        solutions: rows,
        timing_ms: None,
    })
}

/// `count <= floor`. An uncertified floor is an upper estimate of the true
/// floor, so equality with it decides nothing.
fn count_check(count: u64, floor: &Integer, certified: bool, what: &str) -> (CheckStatus, Option<i64>) {
    let margin = floor.to_i64().map(|f| f - count as i64);
    let status = if Integer::from(count) < *floor || (certified && Integer::from(count) == *floor) {
        CheckStatus::Pass
    } else if Integer::from(count) == *floor {
        CheckStatus::na(format!("{what} count equals an uncertified floor {floor}"))
    } else {
        CheckStatus::Fail { detail: format!("{what} count {count} exceeds {floor}") }
    };
    (status, margin)
}

fn split_from_rows(rows: &[ReportSolution]) -> SplitCounts {
    let mut c = SplitCounts::default();
    for r in rows {
        c.small += u64::from(r.small_flag);
        c.large += u64::from(r.large_h_flag);
        c.small_and_large += u64::from(r.small_flag && r.large_h_flag);
        c.mid += u64::from(!r.small_flag && !r.large_h_flag);
    }
    c
}

fn pointwise(
    spot: &Option<String>,
    rows: &[ReportSolution],
    holds: impl Fn(&Integer, &Integer) -> bool,
) -> CheckStatus {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !holds(&Integer::from(r.x), &Integer::from(r.y)))
        .map(|r| format!("({}, {})", r.x, r.y))
        .collect();
    match (spot, bad.is_empty()) {
        (None, true) => CheckStatus::Pass,
        (Some(s), true) => CheckStatus::Fail { detail: format!("random point {s}") },
        (s, false) => CheckStatus::Fail {
            detail: format!("solutions {}{}", bad.join(", "), s.as_ref().map(|s| format!("; random point {s}")).unwrap_or_default()),
        },
    }
}

/// First random point of the box with `y != 0` at which `holds` fails.
fn spot_check(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, holds: impl Fn(&Integer, &Integer) -> bool) -> Option<String> {
    let b = cfg.box_size.min(i64::MAX as u64) as i64;
    for _ in 0..cfg.spot_points {
        let x = rng.gen_range(-b..=b);
        let mut y = rng.gen_range(-b..=b - 1);
        if y >= 0 {
            y += 1;
        }
        if !holds(&Integer::from(x), &Integer::from(y)) {
            return Some(format!("({x}, {y})"));
        }
    }
    None
}

/// Product of a few random elementary matrices.
pub fn random_unimodular(rng: &mut impl Rng, steps: usize, max_shift: i64) -> UnimodularMatrix {
    let mut m = UnimodularMatrix::identity();
    for _ in 0..steps {
        let step = match rng.gen_range(0..3) {
            0 => UnimodularMatrix::translation(rng.gen_range(-max_shift..=max_shift)),
            1 => UnimodularMatrix::rotation(),
            _ => UnimodularMatrix::swap(),
        };
        m = m.compose(&step);
    }
    m
}

fn covariance_check(f: &CubicForm, trials: usize, rng: &mut ChaCha8Rng) -> CheckStatus {
    let (hess, g, d) = (f.hessian(), f.g_covariant(), f.discriminant());
    for _ in 0..trials {
        let m = random_unimodular(rng, 6, 4);
        let fg = f.apply(&m);
        let g_expected = if m.det() == 1 { g.apply(&m) } else { g.apply(&m).negate() };
        if fg.hessian() != hess.apply(&m) || fg.g_covariant() != g_expected || fg.discriminant() != d {
            return CheckStatus::Fail { detail: format!("fails for matrix {:?}", m.entries()) };
        }
    }
    CheckStatus::Pass
}

fn seed_for(f: &CubicForm, seed: u64) -> u64 {
    f.coeffs().iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |acc, c| {
        (acc ^ c.to_u64_wrapping()).wrapping_mul(0x1000_0000_01b3).rotate_left(17)
    })
}
