//! Report tables: score CSVs with published reference columns, tag
//! distribution and histogram CSVs, and a JSON summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{ParamScore, PolicyHistogram, TagDistribution};
use crate::types::{CiParam, Method};

/// A published (recall, precision, f1) triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

const fn r(recall: f64, precision: f64, f1: f64) -> Reference {
    Reference {
        recall,
        precision,
        f1,
    }
}

const QA_REFERENCE: [(CiParam, Reference); 5] = [
    (CiParam::Attribute, r(0.21, 0.14, 0.17)),
    (CiParam::Receiver, r(0.07, 0.06, 0.06)),
    (CiParam::Sender, r(0.03, 0.02, 0.03)),
    (CiParam::Subject, r(0.06, 0.02, 0.03)),
    (CiParam::Tp, r(0.21, 0.16, 0.18)),
];

const HMM_REFERENCE: [(CiParam, Reference); 4] = [
    (CiParam::Attribute, r(0.65, 0.59, 0.62)),
    (CiParam::Receiver, r(0.41, 0.50, 0.45)),
    (CiParam::Sender, r(0.06, 0.16, 0.09)),
    (CiParam::Tp, r(0.81, 0.66, 0.73)),
];

const BERT_REFERENCE: [(CiParam, Reference); 4] = [
    (CiParam::Attribute, r(0.59, 0.43, 0.50)),
    (CiParam::Receiver, r(0.52, 0.32, 0.39)),
    (CiParam::Sender, r(0.13, 0.14, 0.13)),
    (CiParam::Tp, r(0.78, 0.58, 0.67)),
];

const DP_REFERENCE: [(CiParam, Reference); 3] = [
    (CiParam::Attribute, r(0.68, 0.43, 0.53)),
    (CiParam::Subject, r(0.79, 0.26, 0.40)),
    (CiParam::Tp, r(0.76, 0.62, 0.68)),
];

const SRL_REFERENCE: [(CiParam, Reference); 4] = [
    (CiParam::Attribute, r(0.93, 0.72, 0.81)),
    (CiParam::Receiver, r(0.94, 0.75, 0.83)),
    (CiParam::Sender, r(0.95, 0.64, 0.76)),
    (CiParam::Tp, r(0.91, 0.71, 0.80)),
];

const CI_SRL_REFERENCE: [(CiParam, Reference); 4] = [
    (CiParam::Attribute, r(0.91, 0.77, 0.83)),
    (CiParam::Receiver, r(0.88, 0.79, 0.84)),
    (CiParam::Sender, r(0.91, 0.74, 0.82)),
    (CiParam::Tp, r(0.90, 0.84, 0.87)),
];

/// Published scores for a system, keyed by parameter. These come from the
/// original full-scale corpus and are printed alongside local results for
/// comparison only.
pub fn reference_scores(system: &str) -> &'static [(CiParam, Reference)] {
    match system {
        "qa" => &QA_REFERENCE,
        "hmm" => &HMM_REFERENCE,
        "bert" => &BERT_REFERENCE,
        "dp" => &DP_REFERENCE,
        "srl" => &SRL_REFERENCE,
        "ci-srl" => &CI_SRL_REFERENCE,
        _ => &[],
    }
}

/// Reference system matching a method's output.
pub fn reference_for(method: Method) -> &'static [(CiParam, Reference)] {
    reference_scores(&method.to_string())
}

/// Published number of policies whose F1 falls in 0.80–0.90.
pub const REFERENCE_POLICIES_80_90: usize = 26;

/// Footnote carried by every phrase-level report.
pub const SKIP_RULE_NOTE: &str = "Macro averages skip, per parameter, statements where a side is \
empty: precision averages over statements with at least one prediction, recall over statements \
with at least one gold span.";

pub fn fmt4(x: f64) -> String {
    format!("{:.4}", x)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{:.2}", v)).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Invalid(format!("{}: {:?}", path.display(), other)),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut push = |rec: &[String]| w.write_record(rec).map_err(|e| csv_err(path, e));
    push(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>())?;
    for row in &rows {
        push(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Invalid(format!("{}: {}", path.display(), e)))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Score table rows: local values to 4 places, then the published values
/// (blank where the reference has no row for the parameter).
pub fn score_rows(scores: &[ParamScore], reference: &[(CiParam, Reference)]) -> Vec<Vec<String>> {
    scores
        .iter()
        .map(|s| {
            let refv = reference
                .iter()
                .find(|(p, _)| *p == s.param)
                .map(|(_, r)| r);
            vec![
                s.param.to_string(),
                fmt4(s.precision),
                fmt4(s.recall),
                fmt4(s.f1),
                s.support.tp.to_string(),
                s.support.fp.to_string(),
                s.support.fn_.to_string(),
                fmt_opt(refv.map(|r| r.precision)),
                fmt_opt(refv.map(|r| r.recall)),
                fmt_opt(refv.map(|r| r.f1)),
            ]
        })
        .collect()
}

pub const SCORE_HEADER: [&str; 10] = [
    "param",
    "precision",
    "recall",
    "f1",
    "tp",
    "fp",
    "fn",
    "ref_precision",
    "ref_recall",
    "ref_f1",
];

pub fn write_score_csv(
    path: &Path,
    scores: &[ParamScore],
    reference: &[(CiParam, Reference)],
) -> Result<()> {
    write_csv(path, &SCORE_HEADER, score_rows(scores, reference))
}

pub fn write_tag_distribution_csv(path: &Path, dist: &[TagDistribution]) -> Result<()> {
    let rows = dist
        .iter()
        .map(|d| vec![d.tag.clone(), fmt4(d.tp_pct), fmt4(d.fp_pct)])
        .collect();
    write_csv(path, &["tag", "tp_pct", "fp_pct"], rows)
}

pub fn write_histogram_csv(path: &Path, hist: &PolicyHistogram) -> Result<()> {
    let first = hist.bins.first().map(|b| b.lower).unwrap_or(0.0);
    let mut rows = vec![vec![fmt4(0.0), fmt4(first), hist.below.to_string()]];
    rows.extend(
        hist.bins
            .iter()
            .map(|b| vec![fmt4(b.lower), fmt4(b.upper), b.count.to_string()]),
    );
    write_csv(path, &["lower", "upper", "policies"], rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub statements: usize,
    pub unprocessed: usize,
    pub scores: Vec<ParamScore>,
    pub reference: BTreeMap<CiParam, Reference>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportSummary {
    pub match_policy: crate::eval::MatchPolicy,
    pub methods: Vec<MethodSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<PolicyHistogram>,
    pub note: String,
}

impl MethodSummary {
    pub fn new(
        method: Method,
        statements: usize,
        unprocessed: usize,
        scores: Vec<ParamScore>,
    ) -> Self {
        MethodSummary {
            method,
            statements,
            unprocessed,
            scores,
            reference: reference_for(method).iter().copied().collect(),
        }
    }
}

pub fn write_summary_json(path: &Path, summary: &ReportSummary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::Invalid(format!("summary: {}", e)))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
