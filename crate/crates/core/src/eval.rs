//! Scoring: phrase-level matching per statement with macro averaging over
//! statements, pooled word-level scores for tag sequences, per-tag match
//! distributions and per-policy F1 histograms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interchange::TaggedSentence;
use crate::types::{CiParam, FlowAnnotation, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchCriterion {
    Overlap,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchPolicy {
    pub criterion: MatchCriterion,
    /// Minimum fraction of the gold span that must be covered (overlap
    /// criterion only). Zero means any shared token.
    pub overlap_threshold: f64,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy {
            criterion: MatchCriterion::Overlap,
            overlap_threshold: 0.0,
        }
    }
}

impl MatchPolicy {
    pub fn exact() -> Self {
        MatchPolicy {
            criterion: MatchCriterion::Exact,
            overlap_threshold: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.overlap_threshold) {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "overlap threshold must lie in [0, 1], got {}",
                self.overlap_threshold
            )))
        }
    }

    pub fn accepts(&self, pred: &Span, gold: &Span) -> bool {
        match self.criterion {
            MatchCriterion::Exact => pred.same_range(gold),
            MatchCriterion::Overlap => {
                let shared = pred.overlap(gold);
                shared > 0 && shared as f64 >= self.overlap_threshold * gold.len() as f64
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn predicted(&self) -> usize {
        self.tp + self.fp
    }

    pub fn gold(&self) -> usize {
        self.tp + self.fn_
    }
}

/// Outcome of scoring one statement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatementScore {
    pub statement_id: String,
    pub counts: BTreeMap<CiParam, Counts>,
    /// Every predicted span with whether it matched a gold span. Actor spans
    /// are checked against Sender and Receiver gold spans here, but never
    /// enter `counts`.
    pub matched: Vec<(Span, bool)>,
}

fn greedy_match(preds: &[&Span], golds: &[&Span], policy: &MatchPolicy) -> Vec<bool> {
    let mut taken = vec![false; golds.len()];
    preds
        .iter()
        .map(|p| {
            let best = golds
                .iter()
                .enumerate()
                .filter(|(j, g)| !taken[*j] && policy.accepts(p, g))
                // Largest overlap, then exact boundaries, then leftmost.
                .max_by(|(ja, a), (jb, b)| {
                    p.overlap(a)
                        .cmp(&p.overlap(b))
                        .then(p.same_range(a).cmp(&p.same_range(b)))
                        .then(jb.cmp(ja))
                })
                .map(|(j, _)| j);
            if let Some(j) = best {
                taken[j] = true;
            }
            best.is_some()
        })
        .collect()
}

fn sorted_spans<'a>(spans: impl Iterator<Item = &'a Span>) -> Vec<&'a Span> {
    let mut v: Vec<&Span> = spans.collect();
    v.sort_by(|a, b| (a.start, a.end, &a.source_tag).cmp(&(b.start, b.end, &b.source_tag)));
    v
}

/// Greedy one-to-one matching per parameter: predictions in start order
/// each take the unmatched gold span with the largest overlap that the
/// policy accepts.
pub fn score_statement(
    pred: &FlowAnnotation,
    gold: &FlowAnnotation,
    policy: &MatchPolicy,
) -> Result<StatementScore> {
    if pred.statement_id != gold.statement_id {
        return Err(Error::StatementMismatch {
            expected: gold.statement_id.clone(),
            found: pred.statement_id.clone(),
        });
    }
    let mut counts = BTreeMap::new();
    let mut matched = Vec::new();
    for param in CiParam::SCORED {
        let preds = sorted_spans(pred.spans_for(param));
        let golds = sorted_spans(gold.spans_for(param));
        if preds.is_empty() && golds.is_empty() {
            continue;
        }
        let hits = greedy_match(&preds, &golds, policy);
        let tp = hits.iter().filter(|h| **h).count();
        counts.insert(
            param,
            Counts {
                tp,
                fp: preds.len() - tp,
                fn_: golds.len() - tp,
            },
        );
        matched.extend(preds.into_iter().cloned().zip(hits));
    }
    let actors = sorted_spans(pred.spans_for(CiParam::Actor));
    if !actors.is_empty() {
        let parties = sorted_spans(
            gold.spans
                .iter()
                .filter(|s| matches!(s.param, CiParam::Sender | CiParam::Receiver)),
        );
        let hits = greedy_match(&actors, &parties, policy);
        matched.extend(actors.into_iter().cloned().zip(hits));
    }
    Ok(StatementScore {
        statement_id: gold.statement_id.clone(),
        counts,
        matched,
    })
}

/// Pairs predictions with gold by statement id and scores each gold
/// statement. A statement without a prediction is scored against an empty
/// annotation; predictions for statements outside the gold set are an error.
pub fn score_corpus(
    predictions: &[FlowAnnotation],
    gold: &[FlowAnnotation],
    policy: &MatchPolicy,
) -> Result<Vec<StatementScore>> {
    policy.validate()?;
    let gold_ids: BTreeSet<&str> = gold.iter().map(|g| g.statement_id.as_str()).collect();
    let mut by_id: BTreeMap<&str, &FlowAnnotation> = BTreeMap::new();
    for p in predictions {
        if !gold_ids.contains(p.statement_id.as_str()) {
            return Err(Error::DanglingStatements(vec![p.statement_id.clone()]));
        }
        if by_id.insert(p.statement_id.as_str(), p).is_some() {
            return Err(Error::Invalid(format!(
                "two predictions for statement `{}`",
                p.statement_id
            )));
        }
    }
    gold.iter()
        .map(|g| match by_id.get(g.statement_id.as_str()) {
            Some(p) => score_statement(p, g, policy),
            None => {
                let empty = FlowAnnotation::new(g.statement_id.clone(), g.method);
                score_statement(&empty, g, policy)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMode {
    WordLevel,
    PhraseMacro,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Statements averaged into precision (phrase-macro only).
    pub precision_statements: usize,
    /// Statements averaged into recall (phrase-macro only).
    pub recall_statements: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamScore {
    pub param: CiParam,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mode: ScoreMode,
    pub support: Support,
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-statement precision and recall averaged over statements.
///
/// A statement contributes to a parameter's precision only when it has
/// predictions for it and to recall only when it has gold spans for it, so
/// statements with neither are skipped. F1 comes from the averaged
/// precision and recall.
pub fn macro_average(scores: &[StatementScore]) -> Result<Vec<ParamScore>> {
    if scores.is_empty() {
        return Err(Error::Invalid("no statements to average".into()));
    }
    let mut out = Vec::new();
    for param in CiParam::SCORED {
        let mut support = Support::default();
        let (mut p_sum, mut r_sum) = (0.0, 0.0);
        for c in scores.iter().filter_map(|s| s.counts.get(&param)) {
            if c.predicted() > 0 {
                p_sum += ratio(c.tp, c.predicted());
                support.precision_statements += 1;
            }
            if c.gold() > 0 {
                r_sum += ratio(c.tp, c.gold());
                support.recall_statements += 1;
            }
            support.tp += c.tp;
            support.fp += c.fp;
            support.fn_ += c.fn_;
        }
        if support.precision_statements == 0 && support.recall_statements == 0 {
            continue;
        }
        let precision = if support.precision_statements > 0 {
            p_sum / support.precision_statements as f64
        } else {
            0.0
        };
        let recall = if support.recall_statements > 0 {
            r_sum / support.recall_statements as f64
        } else {
            0.0
        };
        out.push(ParamScore {
            param,
            precision,
            recall,
            f1: f1(precision, recall),
            mode: ScoreMode::PhraseMacro,
            support,
        });
    }
    Ok(out)
}

/// Token counts pooled over the whole set; `O` is not a scored class.
pub fn word_level_scores(
    pred: &[TaggedSentence],
    gold: &[TaggedSentence],
) -> Result<Vec<ParamScore>> {
    if pred.len() != gold.len() {
        return Err(Error::Invalid(format!(
            "{} predicted sentences for {} gold sentences",
            pred.len(),
            gold.len()
        )));
    }
    let mut counts: BTreeMap<CiParam, Counts> = BTreeMap::new();
    for (p, g) in pred.iter().zip(gold) {
        if p.statement_id != g.statement_id {
            return Err(Error::StatementMismatch {
                expected: g.statement_id.clone(),
                found: p.statement_id.clone(),
            });
        }
        if p.tags.len() != g.tags.len() {
            return Err(Error::Invalid(format!(
                "statement `{}`: {} predicted tags for {} gold tags",
                g.statement_id,
                p.tags.len(),
                g.tags.len()
            )));
        }
        for (&pt, &gt) in p.tags.iter().zip(&g.tags) {
            if pt == gt {
                if gt != CiParam::O {
                    counts.entry(gt).or_default().tp += 1;
                }
                continue;
            }
            if pt != CiParam::O {
                counts.entry(pt).or_default().fp += 1;
            }
            if gt != CiParam::O {
                counts.entry(gt).or_default().fn_ += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|(param, c)| {
            let precision = ratio(c.tp, c.predicted());
            let recall = ratio(c.tp, c.gold());
            ParamScore {
                param,
                precision,
                recall,
                f1: f1(precision, recall),
                mode: ScoreMode::WordLevel,
                support: Support {
                    tp: c.tp,
                    fp: c.fp,
                    fn_: c.fn_,
                    ..Support::default()
                },
            }
        })
        .collect())
}

/// Pooled tp/fp/fn per parameter across statements.
pub fn pooled_counts(scores: &[StatementScore]) -> BTreeMap<CiParam, Counts> {
    let mut total: BTreeMap<CiParam, Counts> = BTreeMap::new();
    for s in scores {
        for (p, c) in &s.counts {
            total.entry(*p).or_default().add(*c);
        }
    }
    total
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TagDistribution {
    pub tag: String,
    pub matched: usize,
    pub unmatched: usize,
    pub tp_pct: f64,
    pub fp_pct: f64,
}

/// Tag a span is grouped under: the role of `lemma:ROLE` tags, otherwise
/// the tag itself.
pub fn distribution_key(source_tag: &str) -> &str {
    source_tag.rsplit(':').next().unwrap_or(source_tag)
}

/// Share of each source tag's spans that matched gold.
pub fn tag_distribution(scores: &[StatementScore]) -> Vec<TagDistribution> {
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (span, hit) in scores.iter().flat_map(|s| &s.matched) {
        let entry = tally
            .entry(distribution_key(&span.source_tag).to_owned())
            .or_default();
        if *hit {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    tally
        .into_iter()
        .map(|(tag, (matched, unmatched))| {
            let total = matched + unmatched;
            TagDistribution {
                tag,
                matched,
                unmatched,
                tp_pct: 100.0 * ratio(matched, total),
                fp_pct: 100.0 * ratio(unmatched, total),
            }
        })
        .collect()
}

pub const DEFAULT_BIN_EDGES: [f64; 3] = [0.70, 0.80, 0.90];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyHistogram {
    /// Mean over parameters of each policy's macro F1.
    pub policy_f1: BTreeMap<String, f64>,
    /// Policies below the first edge.
    pub below: usize,
    pub bins: Vec<HistogramBin>,
}

/// Buckets each policy's F1 into `[e0, e1), [e1, e2), ..., [e_last, 1]`.
pub fn per_policy_f1(
    scores_by_policy: &BTreeMap<String, Vec<StatementScore>>,
    edges: &[f64],
) -> Result<PolicyHistogram> {
    if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(
            "bin edges must be non-empty and strictly increasing".into(),
        ));
    }
    let mut policy_f1 = BTreeMap::new();
    for (policy, scores) in scores_by_policy {
        if scores.is_empty() {
            continue;
        }
        let params = macro_average(scores)?;
        if params.is_empty() {
            continue;
        }
        let mean = params.iter().map(|p| p.f1).sum::<f64>() / params.len() as f64;
        policy_f1.insert(policy.clone(), mean);
    }
    let mut bins: Vec<HistogramBin> = edges
        .iter()
        .enumerate()
        .map(|(i, &lower)| HistogramBin {
            lower,
            upper: edges.get(i + 1).copied().unwrap_or(1.0),
            count: 0,
        })
        .collect();
    let mut below = 0;
    for &f in policy_f1.values() {
        match edges.iter().rposition(|&e| f >= e) {
            Some(i) => bins[i].count += 1,
            None => below += 1,
        }
    }
    Ok(PolicyHistogram {
        policy_f1,
        below,
        bins,
    })
}
