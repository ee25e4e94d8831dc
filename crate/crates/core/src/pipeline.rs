//! Corpus-level wiring of the per-statement mappers.

use std::collections::BTreeMap;

use crate::dp::{map_dependencies, DepMappingRules};
use crate::error::{Error, Result};
use crate::eval::StatementScore;
use crate::interchange::{DepTree, SrlFrame};
use crate::refine::{refine, Containment, RefinementReport};
use crate::srl::{extract_statement, VerbLexicon};
use crate::types::{FlowAnnotation, Statement};

/// Frames grouped by statement id, in order of first appearance.
pub fn group_frames(frames: &[SrlFrame]) -> Vec<(String, Vec<SrlFrame>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<SrlFrame>> = BTreeMap::new();
    for f in frames {
        let entry = groups.entry(f.statement_id.as_str()).or_default();
        if entry.is_empty() {
            order.push(f.statement_id.clone());
        }
        entry.push(f.clone());
    }
    order
        .into_iter()
        .map(|id| {
            let g = groups.remove(id.as_str()).unwrap_or_default();
            (id, g)
        })
        .collect()
}

/// Statement ids to annotate: the statement list when given (statements
/// without frames come out unprocessed), otherwise every id in the frames.
fn targets(
    statements: Option<&[Statement]>,
    frames: &[SrlFrame],
) -> Result<Vec<(String, Vec<SrlFrame>)>> {
    let mut grouped = group_frames(frames);
    let Some(statements) = statements else {
        return Ok(grouped);
    };
    let mut by_id: BTreeMap<String, Vec<SrlFrame>> = grouped.drain(..).collect();
    let out: Vec<(String, Vec<SrlFrame>)> = statements
        .iter()
        .map(|s| {
            let frames = by_id.remove(&s.id).unwrap_or_default();
            if let Some(f) = frames.iter().find(|f| f.sentence_len != s.tokens.len()) {
                return Err(Error::Invalid(format!(
                    "statement `{}` has {} tokens but a frame for `{}` says {}",
                    s.id,
                    s.tokens.len(),
                    f.verb_lemma,
                    f.sentence_len
                )));
            }
            Ok((s.id.clone(), frames))
        })
        .collect::<Result<_>>()?;
    if !by_id.is_empty() {
        return Err(Error::DanglingStatements(by_id.into_keys().collect()));
    }
    Ok(out)
}

pub fn srl_corpus(
    statements: Option<&[Statement]>,
    frames: &[SrlFrame],
    lexicon: &VerbLexicon,
) -> Result<Vec<FlowAnnotation>> {
    targets(statements, frames)?
        .iter()
        .map(|(id, fs)| extract_statement(id, fs, lexicon))
        .collect()
}

pub fn ci_srl_corpus(
    statements: Option<&[Statement]>,
    frames: &[SrlFrame],
    lexicon: &VerbLexicon,
    mode: Containment,
) -> Result<(Vec<FlowAnnotation>, Vec<RefinementReport>)> {
    let mut annotations = Vec::new();
    let mut reports = Vec::new();
    for (id, fs) in targets(statements, frames)? {
        let r = refine(&id, &fs, lexicon, mode)?;
        annotations.push(r.annotation);
        reports.push(r.report);
    }
    Ok((annotations, reports))
}

/// Maps every tree; when statements are given, each tree must match its
/// statement's tokens.
pub fn dp_corpus(
    statements: Option<&[Statement]>,
    trees: &[DepTree],
    rules: &DepMappingRules,
) -> Result<Vec<FlowAnnotation>> {
    if let Some(statements) = statements {
        check_tree_alignment(statements, trees)?;
    }
    Ok(trees.iter().map(|t| map_dependencies(t, rules)).collect())
}

/// Every tree names a known statement and carries the same token texts.
pub fn check_tree_alignment(statements: &[Statement], trees: &[DepTree]) -> Result<()> {
    let by_id: BTreeMap<&str, &Statement> = statements.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut dangling = Vec::new();
    for t in trees {
        match by_id.get(t.statement_id.as_str()) {
            None => dangling.push(t.statement_id.clone()),
            Some(s) => {
                let a = s.tokens.iter().map(|x| x.text.as_str());
                let b = t.tokens.iter().map(|x| x.text.as_str());
                if !a.eq(b) {
                    return Err(Error::Invalid(format!(
                        "statement `{}`: tree tokens differ from the corpus tokens",
                        s.id
                    )));
                }
            }
        }
    }
    if dangling.is_empty() {
        Ok(())
    } else {
        Err(Error::DanglingStatements(dangling))
    }
}

/// Splits statement scores by the policy of each statement.
pub fn scores_by_policy(
    scores: &[StatementScore],
    statements: &[Statement],
) -> Result<BTreeMap<String, Vec<StatementScore>>> {
    let policy: BTreeMap<&str, &str> = statements
        .iter()
        .map(|s| (s.id.as_str(), s.policy_id.as_str()))
        .collect();
    let mut out: BTreeMap<String, Vec<StatementScore>> = BTreeMap::new();
    let mut dangling = Vec::new();
    for s in scores {
        match policy.get(s.statement_id.as_str()) {
            Some(p) => out.entry(p.to_string()).or_default().push(s.clone()),
            None => dangling.push(s.statement_id.clone()),
        }
    }
    if dangling.is_empty() {
        Ok(out)
    } else {
        Err(Error::DanglingStatements(dangling))
    }
}

/// Keeps the gold annotations marked valid.
pub fn valid_only(gold: &[FlowAnnotation]) -> Vec<FlowAnnotation> {
    gold.iter()
        .filter(|g| g.valid == Some(true))
        .cloned()
        .collect()
}
