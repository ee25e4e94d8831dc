//! Trigram hidden Markov model over CI tags.
//!
//! Transitions are a linear interpolation of trigram, bigram and unigram
//! maximum-likelihood estimates:
//!
//! ```text
//! q(t | t2, t1) = l1 * P3(t | t2, t1) + l2 * P2(t | t1) + (1 - l1 - l2) * P1(t)
//! ```
//!
//! Sentences are padded with two start states and closed by a stop state.
//! Emissions are estimated over lowercased words; words seen once in
//! training are folded into an unknown-word symbol, which also absorbs
//! out-of-vocabulary words at decoding time.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interchange::TaggedSentence;
use crate::types::CiParam;

pub const DEFAULT_LAMBDA1: f64 = 0.42;
pub const DEFAULT_LAMBDA2: f64 = 0.48;
pub const UNK_TOKEN: &str = "<unk>";
pub const START_SYMBOL: &str = "<s>";
pub const STOP_SYMBOL: &str = "</s>";
pub const MODEL_VERSION: u32 = 1;

/// Log-score margin under which two tag sequences count as tied. Ties go to
/// the sequence that is first in tagset order, position by position.
pub const TIE_EPSILON: f64 = 1e-9;

const WEIGHT_SLACK: f64 = 1e-12;

/// A chain state: a tag, or one of the padding states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HmmState {
    Start,
    Tag(CiParam),
    Stop,
}

impl From<CiParam> for HmmState {
    fn from(p: CiParam) -> Self {
        HmmState::Tag(p)
    }
}

/// Raw count tables, keyed by tag names plus `<s>` / `</s>`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HmmCounts {
    /// outcome -> count
    pub unigram: BTreeMap<String, u64>,
    /// previous -> outcome -> count
    pub bigram: BTreeMap<String, BTreeMap<String, u64>>,
    /// two back -> previous -> outcome -> count
    pub trigram: BTreeMap<String, BTreeMap<String, BTreeMap<String, u64>>>,
    /// tag -> word -> count
    pub emission: BTreeMap<String, BTreeMap<String, u64>>,
}

/// Serialized form of a model.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    tagset: Vec<CiParam>,
    lambda1: f64,
    lambda2: f64,
    unk_token: String,
    counts: HmmCounts,
}

/// Trained model with dense probability tables derived from the counts.
///
/// Context indices run over the tagset plus `Start` (index `n`); outcome
/// indices over the tagset plus `Stop` (index `n`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "ModelFile", try_from = "ModelFile")]
pub struct HmmModel {
    tagset: Vec<CiParam>,
    lambda1: f64,
    lambda2: f64,
    unk_token: String,
    counts: HmmCounts,
    unigram: Vec<f64>,
    bigram: Vec<Option<Vec<f64>>>,
    trigram: Vec<Option<Vec<f64>>>,
    emission: HashMap<String, Vec<f64>>,
}

impl From<HmmModel> for ModelFile {
    fn from(m: HmmModel) -> Self {
        ModelFile {
            version: MODEL_VERSION,
            tagset: m.tagset,
            lambda1: m.lambda1,
            lambda2: m.lambda2,
            unk_token: m.unk_token,
            counts: m.counts,
        }
    }
}

impl TryFrom<ModelFile> for HmmModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.version != MODEL_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported model version {} (expected {})",
                f.version, MODEL_VERSION
            )));
        }
        let mut model = HmmModel::from_counts(f.tagset, f.counts, f.lambda1, f.lambda2)?;
        model.unk_token = f.unk_token;
        Ok(model)
    }
}

pub fn check_lambdas(lambda1: f64, lambda2: f64) -> Result<()> {
    let ok = lambda1.is_finite()
        && lambda2.is_finite()
        && lambda1 >= 0.0
        && lambda2 >= 0.0
        && lambda1 + lambda2 <= 1.0 + WEIGHT_SLACK;
    if ok {
        Ok(())
    } else {
        Err(Error::LambdaConstraint { lambda1, lambda2 })
    }
}

fn normalize(
    counts: &BTreeMap<String, u64>,
    index: &dyn Fn(&str) -> Result<usize>,
    width: usize,
) -> Result<Option<Vec<f64>>> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Ok(None);
    }
    let mut dist = vec![0.0; width];
    for (key, c) in counts {
        dist[index(key)?] += *c as f64 / total as f64;
    }
    Ok(Some(dist))
}

impl HmmModel {
    /// Maximum-likelihood training with the default unknown-word policy.
    pub fn train(sentences: &[TaggedSentence], lambda1: f64, lambda2: f64) -> Result<HmmModel> {
        check_lambdas(lambda1, lambda2)?;
        if sentences.iter().all(|s| s.tokens.is_empty()) {
            return Err(Error::EmptyTrainingSet);
        }
        let tagset = CiParam::TAGSET.to_vec();
        for s in sentences {
            if s.tokens.len() != s.tags.len() {
                return Err(Error::Invalid(format!(
                    "sentence `{}` has {} tokens but {} tags",
                    s.statement_id,
                    s.tokens.len(),
                    s.tags.len()
                )));
            }
            if let Some(bad) = s.tags.iter().find(|t| !tagset.contains(t)) {
                return Err(Error::UnknownTag(bad.to_string()));
            }
        }

        let mut freq: HashMap<String, u64> = HashMap::new();
        for s in sentences {
            for t in &s.tokens {
                *freq.entry(t.text.to_lowercase()).or_default() += 1;
            }
        }

        let mut counts = HmmCounts::default();
        for s in sentences.iter().filter(|s| !s.tokens.is_empty()) {
            let mut chain = vec![START_SYMBOL.to_owned(), START_SYMBOL.to_owned()];
            chain.extend(s.tags.iter().map(|t| t.as_str().to_owned()));
            chain.push(STOP_SYMBOL.to_owned());
            for w in chain.windows(3) {
                *counts.unigram.entry(w[2].clone()).or_default() += 1;
                *counts
                    .bigram
                    .entry(w[1].clone())
                    .or_default()
                    .entry(w[2].clone())
                    .or_default() += 1;
                *counts
                    .trigram
                    .entry(w[0].clone())
                    .or_default()
                    .entry(w[1].clone())
                    .or_default()
                    .entry(w[2].clone())
                    .or_default() += 1;
            }
            for (token, tag) in s.tokens.iter().zip(&s.tags) {
                let lower = token.text.to_lowercase();
                let word = if freq[&lower] <= 1 {
                    UNK_TOKEN.to_owned()
                } else {
                    lower
                };
                *counts
                    .emission
                    .entry(tag.as_str().to_owned())
                    .or_default()
                    .entry(word)
                    .or_default() += 1;
            }
        }
        HmmModel::from_counts(tagset, counts, lambda1, lambda2)
    }

    /// Builds the probability tables from arbitrary count tables.
    pub fn from_counts(
        tagset: Vec<CiParam>,
        counts: HmmCounts,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<HmmModel> {
        check_lambdas(lambda1, lambda2)?;
        if tagset.is_empty() {
            return Err(Error::Invalid("tagset is empty".into()));
        }
        for (i, t) in tagset.iter().enumerate() {
            if tagset[..i].contains(t) {
                return Err(Error::Invalid(format!("tag {} listed twice", t)));
            }
        }
        let n = tagset.len();
        let tag_index = |name: &str| -> Result<usize> {
            tagset
                .iter()
                .position(|t| t.as_str() == name)
                .ok_or_else(|| Error::UnknownTag(name.to_owned()))
        };
        let context = |name: &str| -> Result<usize> {
            if name == START_SYMBOL {
                Ok(n)
            } else {
                tag_index(name)
            }
        };
        let outcome = |name: &str| -> Result<usize> {
            if name == STOP_SYMBOL {
                Ok(n)
            } else {
                tag_index(name)
            }
        };

        let unigram =
            normalize(&counts.unigram, &outcome, n + 1)?.unwrap_or_else(|| vec![0.0; n + 1]);

        let mut bigram = vec![None; n + 1];
        for (prev, row) in &counts.bigram {
            bigram[context(prev)?] = normalize(row, &outcome, n + 1)?;
        }

        let mut trigram = vec![None; (n + 1) * (n + 1)];
        for (two_back, rows) in &counts.trigram {
            let c2 = context(two_back)?;
            for (prev, row) in rows {
                trigram[c2 * (n + 1) + context(prev)?] = normalize(row, &outcome, n + 1)?;
            }
        }

        let mut emission: HashMap<String, Vec<f64>> = HashMap::new();
        for (tag, words) in &counts.emission {
            let t = tag_index(tag)?;
            let total: u64 = words.values().sum();
            for (word, c) in words {
                if total > 0 {
                    emission.entry(word.clone()).or_insert_with(|| vec![0.0; n])[t] +=
                        *c as f64 / total as f64;
                }
            }
        }

        Ok(HmmModel {
            tagset,
            lambda1,
            lambda2,
            unk_token: UNK_TOKEN.to_owned(),
            counts,
            unigram,
            bigram,
            trigram,
            emission,
        })
    }

    /// Same counts, different interpolation weights.
    pub fn with_lambdas(&self, lambda1: f64, lambda2: f64) -> Result<HmmModel> {
        check_lambdas(lambda1, lambda2)?;
        let mut model = self.clone();
        model.lambda1 = lambda1;
        model.lambda2 = lambda2;
        Ok(model)
    }

    pub fn tagset(&self) -> &[CiParam] {
        &self.tagset
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.lambda1, self.lambda2)
    }

    pub fn counts(&self) -> &HmmCounts {
        &self.counts
    }

    pub fn unk_token(&self) -> &str {
        &self.unk_token
    }

    fn n(&self) -> usize {
        self.tagset.len()
    }

    fn tag_index(&self, tag: CiParam) -> Result<usize> {
        self.tagset
            .iter()
            .position(|t| *t == tag)
            .ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    fn context_index(&self, state: HmmState) -> Result<usize> {
        match state {
            HmmState::Start => Ok(self.n()),
            HmmState::Tag(t) => self.tag_index(t),
            HmmState::Stop => Err(Error::UnknownTag(format!(
                "{} cannot be a context",
                STOP_SYMBOL
            ))),
        }
    }

    fn outcome_index(&self, state: HmmState) -> Result<usize> {
        match state {
            HmmState::Stop => Ok(self.n()),
            HmmState::Tag(t) => self.tag_index(t),
            HmmState::Start => Err(Error::UnknownTag(format!(
                "{} cannot be an outcome",
                START_SYMBOL
            ))),
        }
    }

    fn transition_by_index(&self, c2: usize, c1: usize, t: usize) -> f64 {
        let n = self.n();
        let p3 = self.trigram[c2 * (n + 1) + c1]
            .as_ref()
            .map_or(0.0, |d| d[t]);
        let p2 = self.bigram[c1].as_ref().map_or(0.0, |d| d[t]);
        let p1 = self.unigram[t];
        self.lambda1 * p3 + self.lambda2 * p2 + (1.0 - self.lambda1 - self.lambda2) * p1
    }

    /// Interpolated `q(t | two_back, previous)`. Unseen trigram or bigram
    /// contexts contribute zero from that component.
    pub fn interpolated_transition(
        &self,
        two_back: HmmState,
        previous: HmmState,
        next: HmmState,
    ) -> Result<f64> {
        Ok(self.transition_by_index(
            self.context_index(two_back)?,
            self.context_index(previous)?,
            self.outcome_index(next)?,
        ))
    }

    /// Whether the `(two_back, previous)` trigram context was seen in training.
    pub fn has_trigram_context(&self, two_back: HmmState, previous: HmmState) -> Result<bool> {
        let n = self.n();
        Ok(
            self.trigram[self.context_index(two_back)? * (n + 1) + self.context_index(previous)?]
                .is_some(),
        )
    }

    /// The emission symbol a surface word maps to: lowercased, or the
    /// unknown-word symbol when out of vocabulary.
    pub fn emission_symbol<'a>(&'a self, word: &str) -> std::borrow::Cow<'a, str> {
        let lower = word.to_lowercase();
        if self.emission.contains_key(&lower) {
            lower.into()
        } else {
            self.unk_token.as_str().into()
        }
    }

    pub fn emission_prob(&self, tag: CiParam, word: &str) -> Result<f64> {
        let t = self.tag_index(tag)?;
        let symbol = self.emission_symbol(word);
        Ok(self.emission.get(symbol.as_ref()).map_or(0.0, |row| row[t]))
    }

    fn emission_row(&self, word: &str) -> Vec<f64> {
        let symbol = self.emission_symbol(word);
        self.emission
            .get(symbol.as_ref())
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.n()])
    }

    /// Most likely tag sequence for `tokens`.
    ///
    /// A backward max-product pass gives the best completion score for every
    /// `(previous, current)` tag pair; the forward pass then picks, position
    /// by position, the first tag in tagset order that still reaches the
    /// optimum (within [`TIE_EPSILON`]). The result is the optimal sequence
    /// that comes first in tagset order.
    pub fn viterbi_decode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<CiParam> {
        let len = tokens.len();
        if len == 0 {
            return Vec::new();
        }
        let n = self.n();
        let ctx = n + 1;
        let ln = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };

        let emit: Vec<Vec<f64>> = tokens
            .iter()
            .map(|w| self.emission_row(w.as_ref()).into_iter().map(ln).collect())
            .collect();
        let mut log_q = vec![f64::NEG_INFINITY; ctx * ctx * ctx];
        for c2 in 0..ctx {
            for c1 in 0..ctx {
                for t in 0..=n {
                    log_q[(c2 * ctx + c1) * ctx + t] = ln(self.transition_by_index(c2, c1, t));
                }
            }
        }
        let q = |c2: usize, c1: usize, t: usize| log_q[(c2 * ctx + c1) * ctx + t];

        // best[i][u * n + v]: best score of tags i+1.. and the stop transition,
        // given tag u at i-1 (u == n for the start state) and tag v at i.
        let mut best = vec![vec![f64::NEG_INFINITY; ctx * n]; len];
        for u in 0..ctx {
            for v in 0..n {
                best[len - 1][u * n + v] = q(u, v, n);
            }
        }
        for i in (0..len - 1).rev() {
            for u in 0..ctx {
                for v in 0..n {
                    let mut m = f64::NEG_INFINITY;
                    for w in 0..n {
                        let s = q(u, v, w) + emit[i + 1][w] + best[i + 1][v * n + w];
                        if s > m {
                            m = s;
                        }
                    }
                    best[i][u * n + v] = m;
                }
            }
        }

        let start = n;
        let optimum = (0..n)
            .map(|w| q(start, start, w) + emit[0][w] + best[0][start * n + w])
            .fold(f64::NEG_INFINITY, f64::max);
        if optimum == f64::NEG_INFINITY {
            return self.fallback_decode(tokens);
        }

        let mut path = Vec::with_capacity(len);
        let (mut u, mut v) = (start, start);
        let mut prefix = 0.0;
        for i in 0..len {
            let step = |w: usize| q(u, v, w) + emit[i][w];
            let total = |w: usize| prefix + step(w) + best[i][v * n + w];
            let chosen = (0..n)
                .find(|&w| total(w) >= optimum - TIE_EPSILON)
                .unwrap_or_else(|| {
                    (0..n)
                        .fold((0, f64::NEG_INFINITY), |(bw, bs), w| {
                            let s = total(w);
                            if s > bs {
                                (w, s)
                            } else {
                                (bw, bs)
                            }
                        })
                        .0
                });
            prefix += step(chosen);
            path.push(self.tagset[chosen]);
            u = v;
            v = chosen;
        }
        path
    }

    /// Per-token argmax of `P(t) * e(w | t)`, or of `P(t)` alone when the
    /// word has no emission mass anywhere.
    fn fallback_decode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<CiParam> {
        let n = self.n();
        tokens
            .iter()
            .map(|w| {
                let row = self.emission_row(w.as_ref());
                let scores: Vec<f64> = (0..n).map(|t| self.unigram[t] * row[t]).collect();
                let pick = |s: &[f64]| {
                    s.iter()
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |(bi, bs), (i, &x)| {
                            if x > bs {
                                (i, x)
                            } else {
                                (bi, bs)
                            }
                        })
                        .0
                };
                if scores.iter().any(|&s| s > 0.0) {
                    self.tagset[pick(&scores)]
                } else {
                    self.tagset[pick(&self.unigram[..n])]
                }
            })
            .collect()
    }

    pub fn tag_sentence(&self, sentence: &TaggedSentence) -> TaggedSentence {
        let words = sentence.words();
        TaggedSentence {
            statement_id: sentence.statement_id.clone(),
            tokens: sentence.tokens.clone(),
            tags: self.viterbi_decode(&words),
        }
    }
}

/// Fraction of tokens tagged correctly, as `(correct, total)`.
pub fn token_accuracy(model: &HmmModel, sentences: &[TaggedSentence]) -> (usize, usize) {
    let mut correct = 0;
    let mut total = 0;
    for s in sentences {
        let predicted = model.viterbi_decode(&s.words());
        correct += predicted
            .iter()
            .zip(&s.tags)
            .filter(|(p, g)| p == g)
            .count();
        total += s.tags.len();
    }
    (correct, total)
}

/// Grid search for the interpolation weights maximizing validation token
/// accuracy. Ties go to the smaller `lambda1`, then the smaller `lambda2`.
pub fn tune_lambdas(
    train: &[TaggedSentence],
    validation: &[TaggedSentence],
    grid_step: f64,
) -> Result<(f64, f64)> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::Invalid(format!(
            "grid step must lie in (0, 0.5], got {}",
            grid_step
        )));
    }
    if validation.is_empty() {
        return Err(Error::Invalid("validation set is empty".into()));
    }
    let base = HmmModel::train(train, 0.0, 0.0)?;
    let steps = (1.0 / grid_step + 1e-9).floor() as usize;

    let mut best: Option<(usize, f64, f64)> = None;
    for k1 in 0..=steps {
        for k2 in 0..=(steps - k1) {
            let (l1, l2) = (k1 as f64 * grid_step, k2 as f64 * grid_step);
            if l1 + l2 > 1.0 + WEIGHT_SLACK {
                continue;
            }
            let model = base.with_lambdas(l1, l2)?;
            let (correct, _) = token_accuracy(&model, validation);
            if best.is_none_or(|(c, _, _)| correct > c) {
                best = Some((correct, l1, l2));
            }
        }
    }
    let (_, l1, l2) = best.expect("grid contains (0, 0)");
    Ok((l1, l2))
}
