//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use cubic_thue::bounds::{bound_main, bound_newmain, bound_small_lemma1, bound_small_lemma2};
use cubic_thue::corpus::{generate_corpus, CorpusSpec, HPolicy};
use cubic_thue::real::{Real, DEFAULT_PRECISION};
use cubic_thue::reduction::{is_reduced, reduce};
use cubic_thue::solver::{enumerate, SolveRequest};
use cubic_thue::suite::{verify_all, SuiteSummary};
use cubic_thue::verify::{random_unimodular, VerifyConfig};
use cubic_thue::CubicForm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Integer;

const D_MAX: u64 = 100_000;
const BOX: u64 = 10_000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn report(n: u32, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = run();
    let el = t.elapsed();
    let in_time = limit.map_or(true, |l| el <= l);
    let ok = out.ok && in_time;
    let budget = limit.map(|l| format!(" of {}s", l.as_secs())).unwrap_or_default();
    println!(
        "criterion {n:>2} [{name}]: {} ({}; {:.1}s{budget})",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        el.as_secs_f64()
    );
    ok
}

fn random_form(rng: &mut ChaCha8Rng, bound: i64) -> CubicForm {
    loop {
        let c: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
        if let Ok(f) = CubicForm::try_new(c[0], c[1], c[2], c[3]) {
            return f;
        }
    }
}

fn syzygy() -> Outcome {
    let forms: Vec<CubicForm> = {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        (0..100_000).map(|_| random_form(&mut rng, 1000)).collect()
    };
    let bad = forms
        .par_iter()
        .enumerate()
        .filter(|(i, f)| {
            // Coefficientwise, then pointwise at one more point.
            let (x, y) = (Integer::from(*i as i64 % 97 - 48), Integer::from(*i as i64 % 89 + 1));
            let h = f.hessian().eval(&x, &y);
            let g = f.g_covariant().eval(&x, &y);
            let fv = f.eval(&x, &y);
            let lhs = Integer::from(4) * Integer::from(&h * &h) * &h;
            let rhs = Integer::from(&g * &g) + Integer::from(27) * f.discriminant() * Integer::from(&fv * &fv);
            !f.syzygy_holds() || lhs != rhs
        })
        .count();
    Outcome { ok: bad == 0, detail: format!("100000 forms, {bad} violations") }
}

fn covariance() -> Outcome {
    let cases: Vec<(CubicForm, cubic_thue::UnimodularMatrix)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        (0..10_000)
            .map(|_| {
                let f = random_form(&mut rng, 1000);
                let steps = rng.gen_range(1..10);
                (f, random_unimodular(&mut rng, steps, 6))
            })
            .collect()
    };
    let bad = cases
        .par_iter()
        .filter(|(f, m)| {
            let g = f.apply(m);
            let g_cov = f.g_covariant().apply(m);
            let g_cov = if m.det() == 1 { g_cov } else { g_cov.negate() };
            g.hessian() != f.hessian().apply(m) || g.g_covariant() != g_cov || g.discriminant() != f.discriminant()
        })
        .count();
    Outcome { ok: bad == 0, detail: format!("10000 pairs, {bad} violations") }
}

fn reduction(corpus: &[CubicForm]) -> Outcome {
    let bad = corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
            let mut bad = 0;
            for _ in 0..10 {
                let steps = rng.gen_range(2..12);
                let g = f.apply(&random_unimodular(&mut rng, steps, 9));
                let ok = match reduce(&g) {
                    Ok(r) => {
                        g.apply(&r.transform) == r.reduced_form
                            && r.transform.det().abs() == 1
                            && is_reduced(&r.reduced_form).unwrap_or(false)
                            && r.reduced_form.discriminant() == f.discriminant()
                    }
                    Err(_) => false,
                };
                bad += usize::from(!ok);
            }
            bad
        })
        .sum::<usize>();
    Outcome { ok: bad == 0, detail: format!("{} scrambled forms, {bad} failures", 10 * corpus.len()) }
}

fn tally(s: &SuiteSummary, checks: &[&str]) -> (u64, u64, u64) {
    checks.iter().fold((0, 0, 0), |(p, f, n), c| {
        let t = s.per_check.get(*c).cloned().unwrap_or_default();
        (p + t.pass, f + t.fail, n + t.not_applicable)
    })
}

fn from_suite(s: &SuiteSummary, checks: &[&str], extra: &str) -> Outcome {
    let (p, f, n) = tally(s, checks);
    Outcome {
        ok: f == 0 && s.errors == 0 && p > 0,
        detail: format!("{} reports: {p} pass, {f} fail, {n} not applicable{extra}", s.reports),
    }
}

fn bound_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut samples = 0;
    let p = DEFAULT_PRECISION;
    for i in 1..250 {
        let e = 0.25 * i as f64 / 250.0;
        for d in [23i64, 49, 3888, 100_000, 1_000_000, 1_000_000_000] {
            let eps = Real::from_f64(e, p);
            let dd = Integer::from(d);
            let newmain = bound_newmain(&eps).unwrap().to_f64();
            let lemma1 = bound_small_lemma1(&eps).unwrap().to_f64();
            worst = worst.max((newmain - (9.0 + lemma1 / 3.0)).abs());
            let inner_ok = 1.5 * e + std::f64::consts::LN_2 / ((3 * d) as f64).ln() > 0.0;
            if inner_ok {
                let main = bound_main(&eps, &dd).unwrap();
                let lemma2 = bound_small_lemma2(&eps, &dd).unwrap();
                // Certified difference, not a difference of rounded values.
                let diff = main.sub(&lemma2.add(&Real::from_i64(9, p))).mag().to_f64();
                worst = worst.max(diff);
                let ln3d = ((3 * d) as f64).ln();
                let oracle_main =
                    12.0 + 3.0 / std::f64::consts::LN_2 * (3.0 / (8.0 * (1.5 * e + std::f64::consts::LN_2 / ln3d))).ln();
                worst_oracle = worst_oracle.max((main.to_f64() - oracle_main).abs() / oracle_main.abs().max(1.0));
            }
            let oracle_newmain = 9.0 + (3.0 / (8.0 * e) + 0.5).log2();
            worst_oracle = worst_oracle.max((newmain - oracle_newmain).abs() / oracle_newmain);
            samples += 1;
        }
    }
    Outcome {
        ok: worst <= 1e-12 && worst_oracle <= 1e-12,
        detail: format!(
            "{samples} (eps, D) samples, max identity gap {worst:.2e}, max deviation from direct evaluation {worst_oracle:.2e}"
        ),
    }
}

/// Every primitive point of the signed box with `0 < |F| <= h`, by direct
/// evaluation. Needs `|c_i| * 4 * box^3` to fit in an i64.
fn signed_box_oracle(c: [i64; 4], h: i64, bx: i64) -> Vec<(i64, i64)> {
    let cmax = c.iter().map(|v| v.abs()).max().unwrap_or(0) as i128;
    assert!(cmax * 4 * (bx as i128).pow(3) < i64::MAX as i128);
    let gcd = |mut a: i64, mut b: i64| {
        (a, b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    (-bx..=bx)
        .into_par_iter()
        .flat_map_iter(|y| {
            (-bx..=bx).filter_map(move |x| {
                let v = ((c[0] * x + c[1] * y) * x + c[2] * y * y) * x + c[3] * y * y * y;
                (v != 0 && v.abs() <= h && gcd(x, y) == 1).then_some((x, y))
            })
        })
        .collect()
}

fn known_forms() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for c in [[1i64, 0, -3, 1], [1, 1, -2, -1]] {
        let f = CubicForm::new(c[0], c[1], c[2], c[3]);
        let req = SolveRequest { box_size: BOX, ..SolveRequest::new(f.clone(), 1) };
        let sols = enumerate(&req).unwrap();
        let run1 = serde_json::to_string(&sols).unwrap();
        let run2 = serde_json::to_string(&enumerate(&req).unwrap()).unwrap();
        let got: Vec<(i64, i64)> = sols.iter().map(|s| (s.x, s.y)).collect();

        let signed = signed_box_oracle(c, 1, BOX as i64);
        let with_y: Vec<(i64, i64)> = signed.iter().copied().filter(|&(_, y)| y != 0).collect();
        let mirrored = with_y.iter().all(|&(x, y)| with_y.contains(&(-x, -y)));
        let mut half: Vec<(i64, i64)> = with_y.iter().copied().filter(|&(_, y)| y > 0).collect();
        half.sort_by_key(|&(x, y)| (y, x));

        let this_ok = run1 == run2 && mirrored && with_y.len() == 2 * half.len() && got == half;
        ok &= this_ok;
        details.push(format!("{f}: {} solutions {:?}", got.len(), got));
    }
    Outcome { ok, detail: details.join("; ") }
}

fn main() {
    let mut all = true;
    all &= report(1, "syzygy identity", Some(Duration::from_secs(60)), syzygy);
    all &= report(2, "covariance", Some(Duration::from_secs(60)), covariance);

    let t = Instant::now();
    let corpus = generate_corpus(&CorpusSpec { d_max: D_MAX, dedupe: true, h_policy: HPolicy::AllInRange });
    let corpus_time = t.elapsed();
    println!("corpus: {} reduced classes with 0 < D <= {D_MAX} in {:.1}s", corpus.len(), corpus_time.as_secs_f64());

    all &= report(3, "reduction of scrambled corpus", Some(Duration::from_secs(300)), || reduction(&corpus));

    // One pipeline run over the corpus covers criteria 4 to 9.
    let t = Instant::now();
    let cfg = VerifyConfig { box_size: BOX, timings: false, ..VerifyConfig::default() };
    let hs = HPolicy::List { hs: vec![1, 2, 3] };
    let suite = verify_all(&corpus, &hs, &cfg, |_, _| Ok(())).expect("suite runs");
    let suite_time = t.elapsed();
    println!(
        "pipeline: {} forms x h in {{1, 2, 3}}, box {BOX}, {} reports in {:.1}s, {} pipeline errors",
        suite.forms_checked,
        suite.reports,
        suite_time.as_secs_f64(),
        suite.errors
    );
    for f in suite.failure_list.iter().take(20) {
        println!("  failure: {} h={:?} {}: {}", f.form_id, f.h, f.check, f.detail);
    }
    // Every h with eps in range is covered by {1, 2, 3} at this discriminant cap.
    let top = HPolicy::AllInRange.resolve(&Integer::from(D_MAX)).unwrap();
    let covered = top.iter().all(|h| *h <= 3);

    all &= report(4, "hessian lower bound", None, || from_suite(&suite, &["hessian_lower_bound"], ""));
    all &= report(5, "hessian y bound", None, || from_suite(&suite, &["hessian_y_bound"], ""));
    all &= report(6, "angle bound", None, || {
        let ratio = suite.max_angle_ratio.map(|r| format!(", max ratio {r:.4} vs pi/6")).unwrap_or_default();
        from_suite(&suite, &["angle_bound"], &ratio)
    });
    all &= report(7, "gap principle and chain", None, || from_suite(&suite, &["gap", "chain"], ""));
    all &= report(8, "total count bounds", Some(Duration::from_secs(1800)), || {
        let margins = format!(
            ", in-range h covered: {covered}, min margins {:?} / {:?}, pipeline {:.0}s",
            suite.min_margin_newmain,
            suite.min_margin_main,
            suite_time.as_secs_f64()
        );
        let mut o = from_suite(&suite, &["count_newmain", "count_main"], &margins);
        o.ok &= covered;
        o
    });
    all &= report(9, "small/large split", None, || {
        from_suite(&suite, &["count_large_h", "count_large_y", "count_small_y"], "")
    });
    let (_, f, _) = tally(&suite, &["count_small_lemma1", "count_small_lemma2", "detection"]);
    println!("supplementary [per-class small bounds and detection]: {} ({f} failures)", if f == 0 { "PASS" } else { "FAIL" });
    all &= f == 0;

    all &= report(10, "bound identities", None, bound_identities);
    all &= report(11, "known forms against signed-box oracle", Some(Duration::from_secs(10)), known_forms);

    if !all {
        println!("acceptance: FAIL");
        std::process::exit(1);
    }
    println!("acceptance: PASS");
}
