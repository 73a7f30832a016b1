use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cubic_thue::bounds::{bound_report, comparative_bounds, BoundValue};
use cubic_thue::corpus::{generate_corpus, read_corpus, write_corpus, CorpusSpec, HPolicy};
use cubic_thue::real::DEFAULT_PRECISION;
use cubic_thue::reduction::{is_reduced, reduce};
use cubic_thue::resolvent::{build_resolvents_with_precision, classify};
use cubic_thue::solver::{solve, SolveRequest, DEFAULT_BOX};
use cubic_thue::suite::run_suite;
use cubic_thue::verify::{verify_form, VerifyConfig};
use cubic_thue::CubicForm;
use rug::{Integer, Rational};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cubic-thue", version, about = "Binary cubic forms and cubic Thue inequalities")]
struct Cli {
    /// Working precision in bits for certified real arithmetic.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Search box: |x| <= box, 0 < y <= box.
    #[arg(long = "box", global = true, default_value_t = DEFAULT_BOX)]
    box_size: u64,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Output file (directory for `suite`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormArg {
    /// `{"a":1,"b":0,"c":-3,"d":1}` or `1,0,-3,1`.
    #[arg(long)]
    form: String,
}

#[derive(Args)]
struct HArgs {
    /// Values of h; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    h: Vec<u64>,
    /// h = floor((3D)^(1/4 - eps) / (2 pi)) for each listed eps.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["h", "all_in_range"])]
    epsilons: Vec<f64>,
    /// Every h with eps in (0, 1/4).
    #[arg(long, conflicts_with = "h")]
    all_in_range: bool,
}

impl HArgs {
    fn policy(&self) -> HPolicy {
        if self.all_in_range {
            HPolicy::AllInRange
        } else if !self.epsilons.is_empty() {
            HPolicy::EpsilonGrid { epsilons: self.epsilons.clone() }
        } else if self.h.is_empty() {
            HPolicy::Fixed { h: 1 }
        } else {
            HPolicy::List { hs: self.h.clone() }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant, Hessian and cubic covariant G.
    Covariants(FormArg),
    /// Reduce a form and print the witness matrix.
    Reduce(FormArg),
    /// Enumerate solutions of 0 < |F(x, y)| <= h in the box.
    Solve {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, default_value_t = 1)]
        h: u64,
    },
    /// Resolvent data of one point.
    Classify {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: i64,
    },
    /// Epsilon and every count bound for (D, h).
    Bounds {
        #[arg(long = "D")]
        d: String,
        #[arg(long, default_value_t = 1)]
        h: u64,
        /// Also evaluate the comparison bounds for forms of degree n.
        #[arg(long)]
        compare: Option<u64>,
        /// Parameter a in (0, 1) of the comparison bound, e.g. `1/2`.
        #[arg(long, default_value = "1/2")]
        a: String,
    },
    /// Write all reduced irreducible forms with 0 < D <= d-max as JSON lines.
    Corpus {
        #[arg(long)]
        d_max: u64,
        /// Keep every reduced representative instead of one per class.
        #[arg(long)]
        no_dedupe: bool,
    },
    /// Run every check on one form.
    Verify {
        #[command(flatten)]
        form: FormArg,
        #[command(flatten)]
        hs: HArgs,
        /// Random points for the pointwise Hessian bounds.
        #[arg(long, default_value_t = 1000)]
        spot_points: usize,
        /// Leave timings out of the report.
        #[arg(long)]
        no_timings: bool,
    },
    /// Run every check on a corpus and write reports, CSV summary and aggregate.
    Suite {
        /// Generate the corpus up to this discriminant.
        #[arg(long, required_unless_present = "corpus")]
        d_max: Option<u64>,
        /// Read the corpus from a JSON-lines file instead.
        #[arg(long, conflicts_with = "d_max")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        no_dedupe: bool,
        #[command(flatten)]
        hs: HArgs,
        #[arg(long, default_value_t = 1000)]
        spot_points: usize,
        #[arg(long)]
        no_timings: bool,
    },
}

/// A usage or input problem, exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_form(s: &str) -> Result<CubicForm> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| usage(format!("invalid form {s:?}: {e}")));
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(usage(format!("invalid form {s:?}: expected JSON or four comma separated integers")));
    }
    let mut c = Vec::with_capacity(4);
    for p in parts {
        c.push(Integer::from_str_radix(p, 10).map_err(|e| usage(format!("invalid coefficient {p:?}: {e}")))?);
    }
    let [a, b, cc, d]: [Integer; 4] = c.try_into().expect("four coefficients");
    CubicForm::try_new(a, b, cc, d).map_err(|e| usage(e.to_string()))
}

fn lib<T>(r: cubic_thue::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        cubic_thue::Error::Io { .. } | cubic_thue::Error::Parse { .. } | cubic_thue::Error::Csv(_) => anyhow::Error::new(e),
        other => usage(other.to_string()),
    })
}

/// Writes JSON to `--out` when given and to stdout when `--json` is set.
/// Returns whether stdout was used.
fn emit<T: Serialize>(cli: &Cli, value: &T) -> Result<bool> {
    let text = serde_json::to_string_pretty(value)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.json {
        println!("{text}");
    }
    Ok(cli.json)
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.precision < 53 {
        bail!(usage("--precision must be at least 53 bits"));
    }
    match &cli.command {
        Command::Covariants(FormArg { form }) => {
            let f = parse_form(form)?;
            #[derive(Serialize)]
            struct Out {
                form: CubicForm,
                #[serde(rename = "D")]
                discriminant: String,
                hessian: cubic_thue::QuadraticForm,
                g: cubic_thue::GCovariant,
                syzygy_holds: bool,
            }
            let out = Out {
                discriminant: f.discriminant().to_string(),
                hessian: f.hessian(),
                g: f.g_covariant(),
                syzygy_holds: f.syzygy_holds(),
                form: f,
            };
            if !emit(cli, &out)? {
                let h = &out.hessian;
                let g = &out.g;
                println!("form       {}", out.form);
                println!("D          {}", out.discriminant);
                println!("H          ({}, {}, {})", h.a, h.b, h.c);
                println!("G          ({}, {}, {}, {})", g.g0, g.g1, g.g2, g.g3);
                println!("syzygy     {}", if out.syzygy_holds { "holds" } else { "FAILS" });
            }
            Ok(out.syzygy_holds)
        }
        Command::Reduce(FormArg { form }) => {
            let f = parse_form(form)?;
            let r = lib(reduce(&f))?;
            if !emit(cli, &r)? {
                let [a1, a2, a3, a4] = r.transform.entries();
                println!("reduced    {}", r.reduced_form);
                println!("transform  [[{a1}, {a2}], [{a3}, {a4}]]");
                println!("steps      {}", r.steps);
            }
            Ok(true)
        }
        Command::Solve { form, h } => {
            let f = parse_form(&form.form)?;
            let req = SolveRequest { box_size: cli.box_size, precision: cli.precision, ..SolveRequest::new(f, *h) };
            let out = lib(solve(&req))?;
            if !emit(cli, &out)? {
                let s = &out.summary;
                println!("form       {}  D = {}  h = {}", s.form, s.discriminant, s.h);
                println!("epsilon    {} (in range: {})", s.epsilon.epsilon.value, s.epsilon.in_range);
                println!("solutions  {} canonical, {} signed, (1, 0): {}", s.count_canonical, s.count_signed, s.count_y_zero);
                println!(
                    "split      small {}  mid {}  large {}  small and large {}",
                    s.split.small, s.split.mid, s.split.large, s.split.small_and_large
                );
                println!("note       {}", s.note);
                println!("{:>8} {:>8} {:>6} {:>12} {:>6} {:>5} {:>5}  |xi|", "x", "y", "F", "H", "branch", "small", "large");
                for sol in &out.solutions {
                    println!(
                        "{:>8} {:>8} {:>6} {:>12} {:>6} {:>5} {:>5}  {}",
                        sol.x, sol.y, sol.f_value, sol.h_value, sol.related_branch, sol.small_flag, sol.large_h_flag, sol.xi_abs.value
                    );
                }
            }
            Ok(true)
        }
        Command::Classify { form, x, y } => {
            let f = parse_form(&form.form)?;
            let set = lib(build_resolvents_with_precision(&f, cli.precision))?;
            let data = lib(classify(&set, &Integer::from(*x), &Integer::from(*y)))?;
            if !emit(cli, &data)? {
                println!("xi         {}", data.xi_abs.value);
                println!("z          {} + {} i", data.z.re.value, data.z.im.value);
                println!("|z|        {}", data.z_abs.value);
                println!("branch     {}", data.related_branch);
                println!("distance   {}", data.related_distance.value);
                println!(
                    "angle      pi/6: {}  pi/9: {}",
                    data.cosi_pi6,
                    data.cosi_pi9.map_or("n/a".to_string(), |b| b.to_string())
                );
            }
            Ok(true)
        }
        Command::Bounds { d, h, compare, a } => {
            let d = Integer::from_str_radix(d.trim(), 10).map_err(|e| usage(format!("invalid --D {d:?}: {e}")))?;
            if d <= 0 {
                bail!(usage("--D must be positive"));
            }
            if *h == 0 {
                bail!(usage("--h must be positive"));
            }
            let hh = Integer::from(*h);
            let report = lib(bound_report(&d, &hh))?;
            let comparison = match compare {
                Some(n) => {
                    let a: Rational = a.parse().map_err(|e| usage(format!("invalid --a {a:?}: {e}")))?;
                    Some(lib(comparative_bounds(*n, &hh, &d, &a))?)
                }
                None => None,
            };
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(flatten)]
                report: &'a cubic_thue::bounds::BoundReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                comparison: Option<cubic_thue::bounds::ComparativeBounds>,
            }
            let out = Out { report: &report, comparison };
            if !emit(cli, &out)? {
                print_bounds(&report);
                if let Some(c) = &out.comparison {
                    print_comparison(c);
                }
            }
            Ok(true)
        }
        Command::Corpus { d_max, no_dedupe } => {
            let forms = generate_corpus(&CorpusSpec { d_max: *d_max, dedupe: !no_dedupe, h_policy: HPolicy::Fixed { h: 1 } });
            match &cli.out {
                Some(path) => {
                    lib(write_corpus(path, &forms))?;
                    eprintln!("{} forms written to {}", forms.len(), path.display());
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut w = stdout.lock();
                    for f in forms {
                        writeln!(w, "{}", serde_json::to_string(&cubic_thue::corpus::CorpusRecord::new(f))?)?;
                    }
                }
            }
            Ok(true)
        }
        Command::Verify { form, hs, spot_points, no_timings } => {
            let mut f = parse_form(&form.form)?;
            if f.discriminant() > 0 && !lib(is_reduced(&f))? {
                let r = lib(reduce(&f))?;
                eprintln!("note: {} is not reduced; verifying the equivalent reduced form {}", f, r.reduced_form);
                f = r.reduced_form;
            }
            let cfg = config(cli, *spot_points, *no_timings);
            let list = lib(hs.policy().resolve(&f.discriminant()))?;
            let reports = lib(verify_form(&f, &list, &cfg))?;
            let passed = reports.iter().all(|r| r.passed());
            if !emit(cli, &reports)? {
                for r in &reports {
                    println!("form {}  D = {}  h = {}  eps = {}  in range: {}", r.form, r.discriminant, r.h, r.epsilon.value, r.in_range);
                    println!("  solutions: {} canonical, {} signed", r.counts.canonical, r.counts.signed);
                    for (name, status) in r.checks.entries() {
                        let why = match status {
                            cubic_thue::verify::CheckStatus::Fail { detail } => format!("  {detail}"),
                            cubic_thue::verify::CheckStatus::NotApplicable { reason } => format!("  {reason}"),
                            cubic_thue::verify::CheckStatus::Pass => String::new(),
                        };
                        println!("  {name:<20} {}{why}", status.label());
                    }
                }
                if reports.is_empty() {
                    println!("no values of h selected");
                }
            }
            Ok(passed)
        }
        Command::Suite { d_max, corpus, no_dedupe, hs, spot_points, no_timings } => {
            let forms = match (d_max, corpus) {
                (_, Some(path)) => lib(read_corpus(path))?.into_iter().map(|r| r.form).collect(),
                (Some(d), None) => generate_corpus(&CorpusSpec { d_max: *d, dedupe: !no_dedupe, h_policy: hs.policy() }),
                (None, None) => bail!(usage("either --d-max or --corpus is required")),
            };
            let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("suite-out"));
            let cfg = config(cli, *spot_points, *no_timings);
            let summary = lib(run_suite(&forms, &hs.policy(), &cfg, &out_dir))?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                print_suite(&summary, &out_dir);
            }
            Ok(summary.all_passed())
        }
    }
}

fn config(cli: &Cli, spot_points: usize, no_timings: bool) -> VerifyConfig {
    VerifyConfig {
        box_size: cli.box_size,
        precision: cli.precision,
        spot_points,
        timings: !no_timings,
        ..VerifyConfig::default()
    }
}

fn print_bounds(r: &cubic_thue::bounds::BoundReport) {
    let e = &r.epsilon;
    println!("D                {}", e.discriminant);
    println!("h                {}", e.h);
    println!("epsilon          {}  (in (0, 1/4): {})", e.epsilon.value, e.in_range);
    println!("{:<16} {:<36} {:>6}  applicable", "bound", "value", "floor");
    let row = |name: &str, b: &Option<BoundValue>| match b {
        Some(b) => println!("{name:<16} {:<36} {:>6}  yes", b.value.value, b.floor),
        None => println!("{name:<16} {:<36} {:>6}  no", "-", "-"),
    };
    row("newmain", &r.newmain_bound);
    row("main", &r.main_bound);
    row("small_lemma1", &r.small_lemma1_bound);
    row("small_lemma2", &r.small_lemma2_bound);
    println!("{:<16} {:<36} {:>6}  yes", "large_H", r.evertse_large_bound, r.evertse_large_bound);
    match r.detection_k {
        Some(k) => println!("detection k      {k}"),
        None => println!("detection k      -"),
    }
}

fn print_comparison(c: &cubic_thue::bounds::ComparativeBounds) {
    println!();
    println!("degree n         {}", c.n);
    match &c.evertse_gyory {
        Some(eg) => {
            let m = &eg.max_solutions;
            let value = eg.max_solutions_value.as_deref().map(|v| format!(" = {v}")).unwrap_or_default();
            println!("N(n)             {} * 7^{}{value}", m.coefficient, m.exponent);
            println!("delta(n)         {}", eg.delta);
            println!("N applicable     {}", c.evertse_gyory_applicable.unwrap_or(false));
        }
        None => println!("N(n)             - (n = 400 lies in neither stated range)"),
    }
    println!("irreducible      {}", c.gyory_irreducible);
    println!("reducible        {}", c.gyory_reducible);
    println!("applicable       {}", c.gyory_applicable);
}

fn print_suite(s: &cubic_thue::suite::SuiteSummary, dir: &Path) {
    println!("forms checked    {}", s.forms_checked);
    println!("reports          {} ({} passed)", s.reports, s.reports_passed);
    println!("failures         {}", s.failures);
    println!("not applicable   {}", s.not_applicables);
    println!("pipeline errors  {}", s.errors);
    for (name, t) in &s.per_check {
        println!("  {name:<20} pass {:>7}  fail {:>5}  n/a {:>7}", t.pass, t.fail, t.not_applicable);
    }
    for f in &s.failure_list {
        println!("  FAIL {} h={} {}: {}", f.form_id, f.h.map_or("-".into(), |h| h.to_string()), f.check, f.detail);
    }
    println!("output           {}", dir.display());
}
