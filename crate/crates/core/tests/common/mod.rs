#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use ci_extractor::hmm::{HmmCounts, HmmModel, HmmState, START_SYMBOL, STOP_SYMBOL, UNK_TOKEN};
use ci_extractor::interchange::{SrlArgument, SrlFrame};
use ci_extractor::CiParam;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(rel)
}

pub const VOCAB: [&str; 5] = ["we", "collect", "your", "data", "when"];

/// Random count tables over the full tagset; about a third of the cells are
/// zero so that unseen contexts and dead paths occur.
pub fn random_model<R: Rng>(rng: &mut R) -> HmmModel {
    let tagset = CiParam::TAGSET.to_vec();
    let names: Vec<&str> = tagset.iter().map(|t| t.as_str()).collect();
    let contexts: Vec<&str> = std::iter::once(START_SYMBOL)
        .chain(names.iter().copied())
        .collect();
    let outcomes: Vec<&str> = names
        .iter()
        .copied()
        .chain(std::iter::once(STOP_SYMBOL))
        .collect();
    let draw = |rng: &mut R| -> u64 {
        if rng.gen_bool(0.35) {
            0
        } else {
            rng.gen_range(1..5)
        }
    };
    let mut counts = HmmCounts::default();
    for o in &outcomes {
        counts.unigram.insert(o.to_string(), draw(rng) + 1);
    }
    for c in &contexts {
        if rng.gen_bool(0.8) {
            let row: BTreeMap<String, u64> = outcomes
                .iter()
                .map(|o| (o.to_string(), draw(rng)))
                .collect();
            counts.bigram.insert(c.to_string(), row);
        }
    }
    for c2 in &contexts {
        for c1 in &contexts {
            if rng.gen_bool(0.6) {
                let row: BTreeMap<String, u64> = outcomes
                    .iter()
                    .map(|o| (o.to_string(), draw(rng)))
                    .collect();
                counts
                    .trigram
                    .entry(c2.to_string())
                    .or_default()
                    .insert(c1.to_string(), row);
            }
        }
    }
    for t in &names {
        let mut row: BTreeMap<String, u64> =
            VOCAB.iter().map(|w| (w.to_string(), draw(rng))).collect();
        row.insert(UNK_TOKEN.to_string(), draw(rng));
        counts.emission.insert(t.to_string(), row);
    }
    let l1 = rng.gen_range(0..=10) as f64 / 10.0;
    let l2 = rng.gen_range(0..=(10 - (l1 * 10.0).round() as i32)) as f64 / 10.0;
    HmmModel::from_counts(tagset, counts, l1, l2).expect("valid random model")
}

pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> Vec<String> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.15) {
                "unseen".to_string()
            } else {
                let w = VOCAB[rng.gen_range(0..VOCAB.len())];
                if rng.gen_bool(0.3) {
                    w.to_uppercase()
                } else {
                    w.to_string()
                }
            }
        })
        .collect()
}

/// Exhaustive search over all tag sequences using only the model's public
/// probabilities. Among sequences within 1e-9 of the best log score, the
/// first in tagset order wins; if every sequence has zero probability each
/// token independently takes the tag maximizing P(t)·e(w|t), else P(t).
pub fn brute_force_decode(model: &HmmModel, words: &[String]) -> Vec<CiParam> {
    let tags = model.tagset().to_vec();
    let n = tags.len();
    let ln = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
    let state = |i: Option<usize>| i.map_or(HmmState::Start, |i| HmmState::Tag(tags[i]));
    let mut q = BTreeMap::new();
    for a in std::iter::once(None).chain((0..n).map(Some)) {
        for b in std::iter::once(None).chain((0..n).map(Some)) {
            for c in (0..n).map(Some).chain(std::iter::once(None)) {
                let next = c.map_or(HmmState::Stop, |i| HmmState::Tag(tags[i]));
                let p = model
                    .interpolated_transition(state(a), state(b), next)
                    .unwrap();
                q.insert((a, b, c), ln(p));
            }
        }
    }
    let e: Vec<Vec<f64>> = words
        .iter()
        .map(|w| {
            tags.iter()
                .map(|t| ln(model.emission_prob(*t, w).unwrap()))
                .collect()
        })
        .collect();

    let len = words.len();
    let total = n.pow(len as u32);
    let mut scores = Vec::with_capacity(total);
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for i in (0..len).rev() {
            seq[i] = c % n;
            c /= n;
        }
        let mut s = 0.0;
        let (mut a, mut b) = (None, None);
        for (i, &t) in seq.iter().enumerate() {
            s += q[&(a, b, Some(t))] + e[i][t];
            a = b;
            b = Some(t);
        }
        s += q[&(a, b, None)];
        scores.push(s);
    }
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        let uni = model.with_lambdas(0.0, 0.0).unwrap();
        return words
            .iter()
            .map(|w| {
                let p: Vec<f64> = tags
                    .iter()
                    .map(|t| {
                        uni.interpolated_transition(HmmState::Start, HmmState::Start, (*t).into())
                            .unwrap()
                    })
                    .collect();
                let joint: Vec<f64> = tags
                    .iter()
                    .zip(&p)
                    .map(|(t, pt)| pt * model.emission_prob(*t, w).unwrap())
                    .collect();
                let pick = if joint.iter().any(|&x| x > 0.0) {
                    joint
                } else {
                    p
                };
                let mut bi = 0;
                for i in 1..n {
                    if pick[i] > pick[bi] {
                        bi = i;
                    }
                }
                tags[bi]
            })
            .collect();
    }
    // Codes enumerate sequences in tagset order, so the first hit wins.
    let code = scores
        .iter()
        .position(|&s| s >= best - 1e-9)
        .expect("optimum exists");
    let mut c = code;
    let mut out = vec![tags[0]; len];
    for i in (0..len).rev() {
        out[i] = tags[c % n];
        c /= n;
    }
    out
}

pub const TRACKED: [&str; 6] = ["collect", "share", "receive", "disclose", "acquire", "send"];
pub const UNTRACKED: [&str; 3] = ["visit", "sell", "use"];
pub const ROLES: [&str; 9] = [
    "ARG0", "ARG1", "ARG2", "ARGM-TMP", "ARGM-PNC", "ARGM-ADV", "ARGM-MOD", "C-ARG1", "ARGM-LOC",
];

/// A random set of frames for one statement with distinct verb indices.
pub fn random_frames<R: Rng>(rng: &mut R, id: &str) -> Vec<SrlFrame> {
    let len = rng.gen_range(4..=20);
    let count = rng.gen_range(1..=4.min(len));
    let mut verbs: Vec<usize> = (0..len).collect();
    for i in 0..count {
        let j = rng.gen_range(i..len);
        verbs.swap(i, j);
    }
    verbs[..count]
        .iter()
        .map(|&v| {
            let lemma = if rng.gen_bool(0.8) {
                TRACKED[rng.gen_range(0..TRACKED.len())]
            } else {
                UNTRACKED[rng.gen_range(0..UNTRACKED.len())]
            };
            let nargs = rng.gen_range(0..=4);
            let arguments = (0..nargs)
                .filter_map(|_| {
                    let s = rng.gen_range(0..len);
                    let e = rng.gen_range(s + 1..=len);
                    let role = ROLES[rng.gen_range(0..ROLES.len())];
                    (!(s..e).contains(&v)).then(|| SrlArgument::new(role, s, e))
                })
                .collect();
            SrlFrame {
                statement_id: id.to_string(),
                sentence_len: len,
                verb_index: v,
                verb_lemma: lemma.to_string(),
                arguments,
            }
        })
        .collect()
}
