//! Redundant-verb filter on top of the SRL rules.
//!
//! A tracked verb whose predicate token sits inside a TP argument of another
//! tracked verb only describes the condition of that other flow. Its frame's
//! spans are dropped unless they overlap a same-parameter span of a
//! non-redundant frame.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interchange::SrlFrame;
use crate::srl::{check_statement, frame_spans, VerbLexicon};
use crate::types::{sort_dedup_spans, FlowAnnotation, Method, Span};

/// How containment by a redundant frame is treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Containment {
    /// Any containing frame makes a frame redundant, redundant or not.
    #[default]
    SinglePass,
    /// Only containment by a non-redundant frame counts.
    Fixpoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedundantVerb {
    pub verb_index: usize,
    pub verb_lemma: String,
    /// Verb index of the frame whose TP contains this verb.
    pub container_verb_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub statement_id: String,
    pub redundant_verbs: Vec<RedundantVerb>,
    pub dropped_spans: Vec<Span>,
    pub kept_overlapping_spans: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub annotation: FlowAnnotation,
    pub report: RefinementReport,
    /// Non-redundant frames unchanged; redundant frames reduced to their TP
    /// arguments and the arguments whose spans were kept. Refining these
    /// again yields the same annotation.
    pub surviving_frames: Vec<SrlFrame>,
}

/// True when `outer` has a TP argument covering the predicate of `inner`.
fn tp_contains(outer: &SrlFrame, inner: &SrlFrame, lexicon: &VerbLexicon) -> bool {
    outer.verb_index != inner.verb_index
        && outer
            .arguments
            .iter()
            .any(|a| lexicon.is_tp_role(&a.role) && a.contains(inner.verb_index))
}

fn tracked_frames<'a>(frames: &'a [SrlFrame], lexicon: &VerbLexicon) -> Result<Vec<&'a SrlFrame>> {
    let mut tracked: Vec<&SrlFrame> = frames
        .iter()
        .filter(|f| lexicon.is_tracked(&f.verb_lemma))
        .collect();
    tracked.sort_by_key(|f| f.verb_index);
    if let Some(w) = tracked
        .windows(2)
        .find(|w| w[0].verb_index == w[1].verb_index)
    {
        return Err(Error::Invalid(format!(
            "statement `{}` has two frames for the predicate at {}",
            w[0].statement_id, w[0].verb_index
        )));
    }
    Ok(tracked)
}

/// Redundant tracked frames, as `verb_index -> container verb_index`.
///
/// When two frames contain each other, the one with the smaller verb index
/// is kept.
pub fn find_redundant_frames(
    frames: &[SrlFrame],
    lexicon: &VerbLexicon,
    mode: Containment,
) -> Result<BTreeMap<usize, usize>> {
    let tracked = tracked_frames(frames, lexicon)?;

    // containers[i]: frames whose TP covers frame i, after the mutual rule.
    let containers: Vec<Vec<usize>> = tracked
        .iter()
        .map(|inner| {
            tracked
                .iter()
                .enumerate()
                .filter(|(_, outer)| {
                    tp_contains(outer, inner, lexicon)
                        && !(tp_contains(inner, outer, lexicon)
                            && inner.verb_index < outer.verb_index)
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    let mut redundant = BTreeMap::new();
    match mode {
        Containment::SinglePass => {
            for (i, frame) in tracked.iter().enumerate() {
                if let Some(&j) = containers[i].first() {
                    redundant.insert(frame.verb_index, tracked[j].verb_index);
                }
            }
        }
        Containment::Fixpoint => {
            #[derive(Clone, Copy, PartialEq)]
            enum Status {
                Undecided,
                Kept,
                Redundant(usize),
            }
            let mut status = vec![Status::Undecided; tracked.len()];
            loop {
                let mut changed = false;
                for i in 0..tracked.len() {
                    if status[i] != Status::Undecided {
                        continue;
                    }
                    let kept_container = containers[i]
                        .iter()
                        .copied()
                        .find(|&j| status[j] == Status::Kept);
                    if let Some(j) = kept_container {
                        status[i] = Status::Redundant(j);
                        changed = true;
                    } else if containers[i]
                        .iter()
                        .all(|&j| matches!(status[j], Status::Redundant(_)))
                    {
                        status[i] = Status::Kept;
                        changed = true;
                    }
                }
                if !changed {
                    // Only containment cycles remain; break one at its
                    // earliest verb.
                    match status.iter().position(|s| *s == Status::Undecided) {
                        Some(i) => status[i] = Status::Kept,
                        None => break,
                    }
                }
            }
            for (i, s) in status.iter().enumerate() {
                if let Status::Redundant(j) = s {
                    redundant.insert(tracked[i].verb_index, tracked[*j].verb_index);
                }
            }
        }
    }
    Ok(redundant)
}

/// Drops the spans of redundant frames except those overlapping (by at least
/// one token) a same-parameter span of a non-redundant frame.
pub fn refine(
    statement_id: &str,
    frames: &[SrlFrame],
    lexicon: &VerbLexicon,
    mode: Containment,
) -> Result<Refinement> {
    check_statement(statement_id, frames)?;
    let redundant = find_redundant_frames(frames, lexicon, mode)?;
    let tracked = tracked_frames(frames, lexicon)?;

    let mut survivors = Vec::new();
    for frame in tracked
        .iter()
        .filter(|f| !redundant.contains_key(&f.verb_index))
    {
        survivors.extend(frame_spans(frame, lexicon)?);
    }

    let mut redundant_verbs = Vec::new();
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    let mut surviving_frames = Vec::new();
    for frame in &tracked {
        let Some(&container) = redundant.get(&frame.verb_index) else {
            surviving_frames.push((*frame).clone());
            continue;
        };
        redundant_verbs.push(RedundantVerb {
            verb_index: frame.verb_index,
            verb_lemma: frame.verb_lemma.clone(),
            container_verb_index: container,
        });
        let mut reduced = (*frame).clone();
        let mut kept_ranges = BTreeSet::new();
        for span in frame_spans(frame, lexicon)? {
            let overlaps = survivors
                .iter()
                .any(|s| s.param == span.param && s.overlap(&span) > 0);
            if overlaps {
                kept_ranges.insert((span.start, span.end, span.source_tag.clone()));
                kept.push(span);
            } else {
                dropped.push(span);
            }
        }
        let lemma = frame.verb_lemma.to_lowercase();
        reduced.arguments.retain(|a| {
            lexicon.is_tp_role(&a.role)
                || kept_ranges.contains(&(a.start, a.end, format!("{}:{}", lemma, a.role)))
        });
        surviving_frames.push(reduced);
    }
    dropped.sort();
    kept.sort();

    let mut spans = survivors;
    spans.extend(kept.iter().cloned());
    sort_dedup_spans(&mut spans);
    let mut annotation = FlowAnnotation::new(statement_id, Method::CiSrl);
    annotation.spans = spans;
    annotation.assumed_subject = Some(crate::srl::DEFAULT_SUBJECT.to_owned());
    annotation.unprocessed = tracked.is_empty();

    Ok(Refinement {
        annotation,
        report: RefinementReport {
            statement_id: statement_id.to_owned(),
            redundant_verbs,
            dropped_spans: dropped,
            kept_overlapping_spans: kept,
        },
        surviving_frames,
    })
}
