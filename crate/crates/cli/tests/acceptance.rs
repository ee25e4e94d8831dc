//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so every line prints; any failure makes the process exit 1.

use std::collections::BTreeSet;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::{self, Command};
use std::time::{Duration, Instant};

use ci_extractor::dp::{map_dependencies, DepMappingRules};
use ci_extractor::eval::{macro_average, score_corpus, word_level_scores, MatchPolicy, ParamScore};
use ci_extractor::hmm::{HmmModel, HmmState, DEFAULT_LAMBDA1, DEFAULT_LAMBDA2};
use ci_extractor::interchange::{read_annotations, read_conll2003, read_conllu, read_srl_frames};
use ci_extractor::pipeline::{ci_srl_corpus, srl_corpus};
use ci_extractor::refine::{refine, Containment};
use ci_extractor::report::fmt4;
use ci_extractor::srl::{extract_statement, VerbLexicon};
use ci_extractor::types::span_text;
use ci_extractor::{CiParam, FlowAnnotation, Token};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[path = "../../core/tests/common/mod.rs"]
mod common;

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(rel)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(param, text)` for every span, sorted.
fn span_texts(tokens: &[Token], ann: &FlowAnnotation) -> BTreeSet<(CiParam, String)> {
    ann.spans
        .iter()
        .map(|s| (s.param, span_text(tokens, s.start, s.end)))
        .collect()
}

fn viterbi_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let started = Instant::now();
    for case in 0..200 {
        let model = common::random_model(&mut rng);
        let words = common::random_sentence(&mut rng, 6);
        ensure(model.tagset().len() == 6, || "tagset is not 6".into())?;
        let fast = model.viterbi_decode(&words);
        let slow = common::brute_force_decode(&model, &words);
        ensure(fast == slow, || {
            format!(
                "case {}: {:?} decoded {:?}, exhaustive {:?}",
                case, words, fast, slow
            )
        })?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("200 cases took {:.2?}", elapsed)
    })
}

fn normalization() -> Check {
    let train = read_conll2003(&fixture("hmm/train.conll")).map_err(|e| e.to_string())?;
    let model =
        HmmModel::train(&train, DEFAULT_LAMBDA1, DEFAULT_LAMBDA2).map_err(|e| e.to_string())?;
    let states: Vec<HmmState> = std::iter::once(HmmState::Start)
        .chain(model.tagset().iter().map(|&t| HmmState::Tag(t)))
        .collect();
    let mut observed = 0;
    for &a in &states {
        for &b in &states {
            if a != HmmState::Start && b == HmmState::Start {
                continue;
            }
            if !model.has_trigram_context(a, b).map_err(|e| e.to_string())? {
                continue;
            }
            observed += 1;
            let mut total = model
                .interpolated_transition(a, b, HmmState::Stop)
                .map_err(|e| e.to_string())?;
            for &t in model.tagset() {
                total += model
                    .interpolated_transition(a, b, HmmState::Tag(t))
                    .map_err(|e| e.to_string())?;
            }
            ensure((total - 1.0).abs() <= 1e-9, || {
                format!("context ({:?}, {:?}) sums to {:.12}", a, b, total)
            })?;
        }
    }
    ensure(observed > 0, || "no observed contexts".into())
}

fn worked_examples() -> Check {
    use CiParam::*;
    let err = |e: ci_extractor::Error| e.to_string();

    let tree = &read_conllu(&fixture("worked/google.conllu")).map_err(err)?[0];
    let dp = map_dependencies(tree, &DepMappingRules::default());
    let got = span_texts(&tree.tokens[..], &dp);
    for want in [
        (Tp, "When you use Google services"),
        (Attribute, "information about your actual location"),
        (Subject, "your"),
        (Actor, "we"),
    ] {
        ensure(got.contains(&(want.0, want.1.to_string())), || {
            format!("(a) DP lacks {:?}; got {:?}", want, got)
        })?;
    }

    let lexicon = VerbLexicon::default();
    let tree = &read_conllu(&fixture("worked/collect.conllu")).map_err(err)?[0];
    let frames = read_srl_frames(&fixture("worked/collect.frames.jsonl")).map_err(err)?;
    let srl = extract_statement("collect", &frames, &lexicon).map_err(err)?;
    let got = span_texts(&tree.tokens[..], &srl);
    let want: BTreeSet<(CiParam, String)> = [
        (Receiver, "We"),
        (Attribute, "technical information"),
        (Tp, "when you visit our websites"),
        (Tp, "or use our mobile applications or services"),
    ]
    .into_iter()
    .map(|(p, s)| (p, s.to_string()))
    .collect();
    ensure(got == want, || format!("(b) SRL gave {:?}", got))?;

    let tree = &read_conllu(&fixture("worked/collect_share.conllu")).map_err(err)?[0];
    let frames = read_srl_frames(&fixture("worked/collect_share.frames.jsonl")).map_err(err)?;
    let r = refine("collect_share", &frames, &lexicon, Containment::SinglePass).map_err(err)?;
    ensure(
        r.report
            .redundant_verbs
            .iter()
            .any(|v| v.verb_index == 8 && v.verb_lemma == "share"),
        || format!("(c) `sharing` not marked redundant: {:?}", r.report),
    )?;
    let tokens = &tree.tokens[..];
    for role in ["ARG0", "ARG1"] {
        let tag = format!("share:{}", role);
        ensure(
            r.report.dropped_spans.iter().any(|s| s.source_tag == tag),
            || format!("(c) {} not dropped: {:?}", tag, r.report.dropped_spans),
        )?;
        ensure(
            !r.annotation.spans.iter().any(|s| s.source_tag == tag),
            || format!("(c) {} still in output", tag),
        )?;
    }
    let got = span_texts(tokens, &r.annotation);
    ensure(
        !got.contains(&(Sender, "you".into())) && !got.contains(&(Attribute, "your post".into())),
        || format!("(c) share spans survive: {:?}", got),
    )
}

fn corpus_scores(
    anns: &[FlowAnnotation],
    gold: &[FlowAnnotation],
) -> Result<Vec<ParamScore>, String> {
    let scores = score_corpus(anns, gold, &MatchPolicy::default()).map_err(|e| e.to_string())?;
    macro_average(&scores).map_err(|e| e.to_string())
}

fn filter_direction() -> Check {
    let err = |e: ci_extractor::Error| e.to_string();
    let gold = read_annotations(&fixture("corpus/gold.jsonl")).map_err(err)?;
    let frames = read_srl_frames(&fixture("corpus/frames.jsonl")).map_err(err)?;
    let lexicon = VerbLexicon::default();
    let srl = srl_corpus(None, &frames, &lexicon).map_err(err)?;
    let (ci, _) = ci_srl_corpus(None, &frames, &lexicon, Containment::SinglePass).map_err(err)?;
    let base = corpus_scores(&srl, &gold)?;
    let filtered = corpus_scores(&ci, &gold)?;
    let mut lines = Vec::new();
    for (b, f) in base.iter().zip(&filtered) {
        lines.push(format!(
            "{} P {:.4}->{:.4} R {:.4}->{:.4}",
            b.param, b.precision, f.precision, b.recall, f.recall
        ));
        ensure(f.precision + 1e-12 >= b.precision, || {
            format!("{} precision fell: {}", b.param, lines.join("; "))
        })?;
        ensure(f.recall + 0.05 + 1e-12 >= b.recall, || {
            format!(
                "{} recall fell by more than 0.05: {}",
                b.param,
                lines.join("; ")
            )
        })?;
    }
    ensure(filtered.len() == CiParam::SCORED.len(), || {
        "missing parameters".into()
    })
}

fn check_table(label: &str, got: &[ParamScore], want: &[(CiParam, &str, &str, &str)]) -> Check {
    ensure(got.len() == want.len(), || {
        format!("{}: {} rows", label, got.len())
    })?;
    for (g, (param, p, r, f)) in got.iter().zip(want) {
        let row = (fmt4(g.precision), fmt4(g.recall), fmt4(g.f1));
        ensure(
            g.param == *param && row == (p.to_string(), r.to_string(), f.to_string()),
            || {
                format!(
                    "{} {}: got {:?}, want ({}, {}, {})",
                    label, g.param, row, p, r, f
                )
            },
        )?;
    }
    Ok(())
}

fn metrics() -> Check {
    use CiParam::*;
    let err = |e: ci_extractor::Error| e.to_string();
    let pred = read_annotations(&fixture("metrics/pred.jsonl")).map_err(err)?;
    let gold = read_annotations(&fixture("metrics/gold.jsonl")).map_err(err)?;
    ensure(gold.len() == 10, || {
        format!("{} gold statements", gold.len())
    })?;

    let overlap = macro_average(&score_corpus(&pred, &gold, &MatchPolicy::default()).map_err(err)?)
        .map_err(err)?;
    check_table(
        "overlap",
        &overlap,
        &[
            (Sender, "0.6667", "0.6667", "0.6667"),
            (Receiver, "0.6667", "0.6667", "0.6667"),
            (Subject, "1.0000", "1.0000", "1.0000"),
            (Attribute, "0.9000", "0.7500", "0.8182"),
            (Tp, "0.6333", "1.0000", "0.7755"),
        ],
    )?;
    let exact = macro_average(&score_corpus(&pred, &gold, &MatchPolicy::exact()).map_err(err)?)
        .map_err(err)?;
    check_table(
        "exact",
        &exact,
        &[
            (Sender, "0.6667", "0.6667", "0.6667"),
            (Receiver, "0.3333", "0.3333", "0.3333"),
            (Subject, "1.0000", "1.0000", "1.0000"),
            (Attribute, "0.3000", "0.3333", "0.3158"),
            (Tp, "0.5000", "0.7500", "0.6000"),
        ],
    )?;

    let pred = read_conll2003(&fixture("metrics/pred.conll")).map_err(err)?;
    let gold = read_conll2003(&fixture("metrics/gold.conll")).map_err(err)?;
    let words = word_level_scores(&pred, &gold).map_err(err)?;
    check_table(
        "word-level",
        &words,
        &[
            (Sender, "0.6000", "0.7500", "0.6667"),
            (Receiver, "0.7500", "0.5000", "0.6000"),
            (Subject, "1.0000", "1.0000", "1.0000"),
            (Attribute, "0.7895", "0.8333", "0.8108"),
            (Tp, "0.8077", "0.9545", "0.8750"),
        ],
    )?;
    let counts: Vec<(usize, usize, usize)> = words
        .iter()
        .map(|s| (s.support.tp, s.support.fp, s.support.fn_))
        .collect();
    ensure(
        counts == [(3, 2, 1), (3, 1, 3), (1, 0, 0), (15, 4, 3), (21, 5, 1)],
        || format!("word-level counts {:?}", counts),
    )
}

fn filter_containment() -> Check {
    let lexicon = VerbLexicon::default();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for case in 0..500 {
        let id = format!("r{}", case);
        let frames = common::random_frames(&mut rng, &id);
        let full = extract_statement(&id, &frames, &lexicon).map_err(|e| e.to_string())?;
        for mode in [Containment::SinglePass, Containment::Fixpoint] {
            let r = refine(&id, &frames, &lexicon, mode).map_err(|e| e.to_string())?;
            if let Some(s) = r.annotation.spans.iter().find(|s| !full.spans.contains(s)) {
                return Err(format!("case {} ({:?}): {:?} not extracted", case, mode, s));
            }
            let again =
                refine(&id, &r.surviving_frames, &lexicon, mode).map_err(|e| e.to_string())?;
            ensure(again.annotation.spans == r.annotation.spans, || {
                format!(
                    "case {} ({:?}): not idempotent, {:?} then {:?}",
                    case, mode, r.annotation.spans, again.annotation.spans
                )
            })?;
        }
    }
    Ok(())
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: Vec<PathBuf> = ["a", "b"].iter().map(|n| tmp.path().join(n)).collect();
    for dir in &runs {
        let out = Command::new(env!("CARGO_BIN_EXE_ci-extractor"))
            .arg("pipeline")
            .arg("--config")
            .arg(fixture("pipeline.toml"))
            .arg("--out-dir")
            .arg(dir)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("pipeline failed: {}", String::from_utf8_lossy(&out.stderr))
        })?;
    }
    let (a, b) = (files_under(&runs[0]), files_under(&runs[1]));
    ensure(a == b, || format!("file lists differ: {:?} vs {:?}", a, b))?;
    for want in [
        "dp.jsonl",
        "srl.jsonl",
        "ci-srl.jsonl",
        "report/summary.json",
    ] {
        ensure(a.iter().any(|p| p == Path::new(want)), || {
            format!("{} missing", want)
        })?;
    }
    for rel in &a {
        let x = fs::read(runs[0].join(rel)).map_err(|e| e.to_string())?;
        let y = fs::read(runs[1].join(rel)).map_err(|e| e.to_string())?;
        ensure(x == y, || format!("{} differs between runs", rel.display()))?;
    }
    Ok(())
}

fn main() {
    let checks: [Criterion; 7] = [
        (
            "viterbi matches exhaustive search on 200 random models",
            viterbi_oracle,
        ),
        (
            "interpolated transitions normalize for observed contexts",
            normalization,
        ),
        (
            "worked examples reproduce from bundled parses",
            worked_examples,
        ),
        (
            "redundant-verb filter raises precision at bounded recall cost",
            filter_direction,
        ),
        (
            "phrase-macro and word-level scores match the hand-computed oracle",
            metrics,
        ),
        (
            "refined spans are a subset and refinement is idempotent",
            filter_containment,
        ),
        ("pipeline runs are byte-identical", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {}", msg))
        });
        match outcome {
            Ok(()) => println!("PASS [{}] {}", i + 1, name),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {}: {}", i + 1, name, why);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        process::exit(1);
    }
}
