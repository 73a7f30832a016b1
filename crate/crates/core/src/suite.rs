//! Batch verification over a corpus with ordered, streamed output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{form_id, HPolicy};
use crate::error::{Error, Result};
use crate::form::CubicForm;
use crate::verify::{verify_form, VerificationReport, VerifyConfig};

pub const REPORTS_FILE: &str = "reports.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const AGGREGATE_FILE: &str = "aggregate.json";

/// Forms verified per parallel batch before the batch is written.
const BATCH: usize = 256;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub pass: u64,
    pub fail: u64,
    pub not_applicable: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub form_id: String,
    pub h: Option<u64>,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub forms_checked: u64,
    pub reports: u64,
    pub reports_passed: u64,
    pub failures: u64,
    pub not_applicables: u64,
    /// Forms the pipeline could not run on at all.
    pub errors: u64,
    pub per_check: BTreeMap<String, CheckTally>,
    /// Smallest slack against each count bound over all reports.
    pub min_margin_newmain: Option<i64>,
    pub min_margin_main: Option<i64>,
    pub max_angle_ratio: Option<f64>,
    pub max_count_canonical: u64,
    /// The first failures, capped.
    pub failure_list: Vec<FailureRecord>,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.failures == 0 && self.errors == 0
    }

    fn absorb(&mut self, form: &CubicForm, result: &Result<Vec<VerificationReport>>) {
        const CAP: usize = 100;
        self.forms_checked += 1;
        let reports = match result {
            Ok(r) => r,
            Err(e) => {
                self.errors += 1;
                if self.failure_list.len() < CAP {
                    self.failure_list.push(FailureRecord {
                        form_id: form_id(form),
                        h: None,
                        check: "pipeline".into(),
                        detail: e.to_string(),
                    });
                }
                return;
            }
        };
        for r in reports {
            self.reports += 1;
            self.reports_passed += u64::from(r.passed());
            self.max_count_canonical = self.max_count_canonical.max(r.counts.canonical);
            min_into(&mut self.min_margin_newmain, r.margins.newmain);
            min_into(&mut self.min_margin_main, r.margins.main);
            if let Some(v) = r.margins.max_angle_ratio {
                self.max_angle_ratio = Some(self.max_angle_ratio.map_or(v, |m| m.max(v)));
            }
            for (name, status) in r.checks.entries() {
                let t = self.per_check.entry(name.to_string()).or_default();
                match status.label() {
                    "pass" => t.pass += 1,
                    "fail" => {
                        t.fail += 1;
                        self.failures += 1;
                        if self.failure_list.len() < CAP {
                            let detail = match status {
                                crate::verify::CheckStatus::Fail { detail } => detail.clone(),
                                _ => String::new(),
                            };
                            self.failure_list.push(FailureRecord {
                                form_id: r.form_id.clone(),
                                h: Some(r.h),
                                check: name.to_string(),
                                detail,
                            });
                        }
                    }
                    _ => {
                        t.not_applicable += 1;
                        self.not_applicables += 1;
                    }
                }
            }
        }
    }
}

fn min_into(acc: &mut Option<i64>, v: Option<i64>) {
    if let Some(v) = v {
        *acc = Some(acc.map_or(v, |a| a.min(v)));
    }
}

/// Verifies every form under `policy`, calling `sink` on each form's
/// results in input order. Forms run in parallel.
pub fn verify_all(
    forms: &[CubicForm],
    policy: &HPolicy,
    cfg: &VerifyConfig,
    mut sink: impl FnMut(&CubicForm, &Result<Vec<VerificationReport>>) -> Result<()>,
) -> Result<SuiteSummary> {
    let mut summary = SuiteSummary::default();
    for chunk in forms.chunks(BATCH) {
        let results: Vec<Result<Vec<VerificationReport>>> = chunk
            .par_iter()
            .map(|f| {
                let hs = policy.resolve(&f.discriminant())?;
                verify_form(f, &hs, cfg)
            })
            .collect();
        for (f, r) in chunk.iter().zip(&results) {
            summary.absorb(f, r);
            sink(f, r)?;
        }
    }
    Ok(summary)
}

/// Runs [`verify_all`] and writes the report lines, the CSV summary and
/// the aggregate into `out_dir`.
pub fn run_suite(forms: &[CubicForm], policy: &HPolicy, cfg: &VerifyConfig, out_dir: &Path) -> Result<SuiteSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let reports_path = out_dir.join(REPORTS_FILE);
    let csv_path = out_dir.join(SUMMARY_FILE);
    let mut reports = BufWriter::new(create(&reports_path)?);
    let mut csv = csv::Writer::from_writer(create(&csv_path)?);
    csv.write_record(csv_header())?;

    let summary = verify_all(forms, policy, cfg, |_, result| {
        if let Ok(rs) = result {
            for r in rs {
                let line = serde_json::to_string(r)?;
                writeln!(reports, "{line}").map_err(|e| Error::io(&reports_path, e))?;
                csv.write_record(csv_row(r))?;
            }
        }
        Ok(())
    })?;
    reports.flush().map_err(|e| Error::io(&reports_path, e))?;
    csv.flush().map_err(|e| Error::io(&csv_path, e))?;

    let agg_path = out_dir.join(AGGREGATE_FILE);
    let text = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&agg_path, text + "\n").map_err(|e| Error::io(&agg_path, e))?;
    Ok(summary)
}

fn create(path: &PathBuf) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = [
        "form_id",
        "a",
        "b",
        "c",
        "d",
        "D",
        "h",
        "epsilon",
        "count_canonical",
        "count_signed",
        "bound_newmain_floor",
        "bound_main_floor",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(crate::verify::Checks::NAMES.iter().map(|n| n.to_string()));
    cols
}

pub fn csv_row(r: &VerificationReport) -> Vec<String> {
    let floor = |b: &Option<crate::bounds::BoundValue>| b.as_ref().map(|b| b.floor.to_string()).unwrap_or_default();
    let mut row = vec![
        r.form_id.clone(),
        r.form.a().to_string(),
        r.form.b().to_string(),
        r.form.c().to_string(),
        r.form.d().to_string(),
        r.discriminant.to_string(),
        r.h.to_string(),
        r.epsilon.value.clone(),
        r.counts.canonical.to_string(),
        r.counts.signed.to_string(),
        floor(&r.bounds.newmain_bound),
        floor(&r.bounds.main_bound),
    ];
    row.extend(r.checks.entries().iter().map(|(_, c)| c.label().to_string()));
    row
}
