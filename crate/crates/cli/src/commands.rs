use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ci_extractor::corpus::{corpus_stats, ingest_corpus, split_sentences, tokenize, IngestOptions};
use ci_extractor::dp::DepMappingRules;
use ci_extractor::eval::{
    macro_average, per_policy_f1, score_corpus, tag_distribution, word_level_scores,
    MatchCriterion, MatchPolicy, ParamScore, StatementScore,
};
use ci_extractor::hmm::{token_accuracy, tune_lambdas, HmmModel};
use ci_extractor::interchange::{
    read_annotations, read_conll2003, read_conllu, read_srl_frames, read_statements,
    write_annotations, write_conll2003, write_statements, TaggedSentence,
};
use ci_extractor::pipeline::{ci_srl_corpus, dp_corpus, scores_by_policy, srl_corpus, valid_only};
use ci_extractor::refine::Containment;
use ci_extractor::report::{
    reference_for, write_histogram_csv, write_score_csv, write_summary_json,
    write_tag_distribution_csv, MethodSummary, ReportSummary, SKIP_RULE_NOTE,
};
use ci_extractor::srl::VerbLexicon;
use ci_extractor::types::{FlowAnnotation, Method, Statement};
use log::info;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{IngestConfig, MatchConfig, PipelineConfig};
use crate::manifest::Manifest;
use crate::{
    CiSrlArgs, Command, ContainmentArg, CriterionArg, DpMapArgs, HmmTagArgs, HmmTrainArgs,
    HmmTuneArgs, IngestArgs, MatchOpts, ModeArg, PipelineArgs, ReportArgs, ScoreArgs, SplitArgs,
    SrlMapArgs, ValidationError,
};

pub fn run(command: Command, cfg: PipelineConfig, from_file: bool) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a, &cfg),
        Command::Split(a) => split(a, &cfg),
        Command::HmmTrain(a) => hmm_train(a, &cfg),
        Command::HmmTag(a) => hmm_tag(a),
        Command::HmmTune(a) => hmm_tune(a, &cfg),
        Command::DpMap(a) => dp_map(a, &cfg),
        Command::SrlMap(a) => srl_map(a, &cfg),
        Command::CiSrl(a) => ci_srl(a, &cfg),
        Command::Score(a) => score(a, &cfg),
        Command::Report(a) => report(a, &cfg),
        Command::Pipeline(a) => {
            if !from_file {
                bail!(ValidationError(
                    "pipeline needs a configuration file (--config or CI_EXTRACTOR_CONFIG)".into()
                ));
            }
            pipeline(a, &cfg)
        }
    }
}

fn need(flag: Option<PathBuf>, configured: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    match flag.or_else(|| configured.clone()) {
        Some(p) => Ok(p),
        None => bail!(ValidationError(format!(
            "--{} is required (or set `{}` in the config)",
            name,
            name.replace('-', "_")
        ))),
    }
}

fn load_lexicon(path: Option<&Path>) -> Result<VerbLexicon> {
    Ok(match path {
        Some(p) => VerbLexicon::load(p)?,
        None => VerbLexicon::default(),
    })
}

fn load_rules(path: Option<&Path>) -> Result<DepMappingRules> {
    Ok(match path {
        Some(p) => DepMappingRules::load(p)?,
        None => DepMappingRules::default(),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

// ---------------------------------------------------------------- ingest

fn ingest_config(a: &IngestArgs, cfg: &PipelineConfig) -> IngestConfig {
    let mut ic = cfg.ingest.clone();
    if !a.allowed_labels.is_empty() {
        ic.allowed_labels = a.allowed_labels.clone();
    }
    ic.split_on_colon |= a.split.split_on_colon;
    ic
}

fn run_ingest(
    segments: &Path,
    opts: &IngestOptions,
    out: &Path,
    gold: Option<&Path>,
    stats_out: Option<&Path>,
) -> Result<Vec<Statement>> {
    let corpus = ingest_corpus(segments, opts)?;
    info!(
        "{} statements, {} segments skipped",
        corpus.statements.len(),
        corpus.skipped_segments()
    );
    write_statements(&corpus.statements, out)?;
    if let (Some(gold), Some(stats_out)) = (gold, stats_out) {
        let gold = read_annotations(gold)?;
        let stats = corpus_stats(&corpus, &gold)?;
        write_json(stats_out, &stats)?;
    }
    Ok(corpus.statements)
}

fn ingest(a: IngestArgs, cfg: &PipelineConfig) -> Result<()> {
    let segments = need(a.segments.clone(), &cfg.segments, "segments")?;
    let ic = ingest_config(&a, cfg);
    let gold = a.gold.clone().or_else(|| cfg.gold.clone());
    run_ingest(
        &segments,
        &ic.options(),
        &a.out,
        gold.as_deref(),
        a.stats_out.as_deref(),
    )?;
    let mut m = Manifest::new("ingest", &json!({ "segments": segments, "ingest": ic }))?;
    m.input(&segments)?;
    if let (Some(g), Some(s)) = (&gold, &a.stats_out) {
        m.input(g)?;
        m.output(s)?;
    }
    m.write_beside(&a.out)?;
    Ok(())
}

fn split(a: SplitArgs, cfg: &PipelineConfig) -> Result<()> {
    let mut ic = cfg.ingest.clone();
    ic.split_on_colon |= a.split.split_on_colon;
    let opts = ic.options().split;
    let text = match &a.input {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let mut out = String::new();
    for sentence in split_sentences(&text, &opts) {
        if a.tokens {
            let toks: Vec<String> = tokenize(&sentence, &opts)
                .into_iter()
                .map(|t| t.text)
                .collect();
            out.push_str(&toks.join(" "));
        } else {
            out.push_str(&sentence);
        }
        out.push('\n');
    }
    match &a.out {
        Some(p) => {
            fs::write(p, out).with_context(|| format!("writing {}", p.display()))?;
            let mut m = Manifest::new("split", &json!({ "split": opts, "tokens": a.tokens }))?;
            if let Some(i) = &a.input {
                m.input(i)?;
            }
            m.write_beside(p)?;
        }
        None => io::stdout().write_all(out.as_bytes())?,
    }
    Ok(())
}

// ---------------------------------------------------------------- hmm

fn write_model(model: &HmmModel, path: &Path) -> Result<()> {
    write_json(path, model)
}

fn read_model(path: &Path) -> Result<HmmModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| ValidationError(format!("{}: {}", path.display(), e)).into())
}

fn hmm_train(a: HmmTrainArgs, cfg: &PipelineConfig) -> Result<()> {
    let train = need(a.train, &cfg.hmm_train, "train")?;
    let l1 = a.lambdas.lambda1.unwrap_or(cfg.hmm.lambda1);
    let l2 = a.lambdas.lambda2.unwrap_or(cfg.hmm.lambda2);
    let sentences = read_conll2003(&train)?;
    let model = HmmModel::train(&sentences, l1, l2)?;
    write_model(&model, &a.out)?;
    let mut m = Manifest::new("hmm-train", &json!({ "lambda1": l1, "lambda2": l2 }))?;
    m.input(&train)?;
    m.write_beside(&a.out)?;
    Ok(())
}

fn tag_all(model: &HmmModel, sentences: &[TaggedSentence]) -> Vec<TaggedSentence> {
    sentences.iter().map(|s| model.tag_sentence(s)).collect()
}

fn tagged_annotations(tagged: &[TaggedSentence]) -> Vec<FlowAnnotation> {
    tagged
        .iter()
        .map(|t| {
            let mut ann = FlowAnnotation::new(t.statement_id.clone(), Method::Hmm);
            ann.spans = t.to_spans("hmm");
            ann
        })
        .collect()
}

fn hmm_tag(a: HmmTagArgs) -> Result<()> {
    let model = read_model(&a.model)?;
    let input = read_conll2003(&a.input)?;
    let tagged = tag_all(&model, &input);
    write_conll2003(&tagged, &a.out)?;
    let mut m = Manifest::new("hmm-tag", &json!({ "lambdas": model.lambdas() }))?;
    m.input(&a.model)?;
    m.input(&a.input)?;
    if let Some(p) = &a.annotations_out {
        write_annotations(&tagged_annotations(&tagged), p)?;
        m.output(p)?;
    }
    m.write_beside(&a.out)?;
    Ok(())
}

/// Seeded shuffle, then the first 80% train and the rest validate.
fn holdout_split(
    sentences: Vec<TaggedSentence>,
    seed: u64,
) -> Result<(Vec<TaggedSentence>, Vec<TaggedSentence>)> {
    if sentences.len() < 2 {
        bail!(ValidationError(
            "need at least two training sentences to hold some out".into()
        ));
    }
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = ((sentences.len() as f64) * 0.2).round().max(1.0) as usize;
    let mut slots: Vec<Option<TaggedSentence>> = sentences.into_iter().map(Some).collect();
    let mut take = |i: &usize| slots[*i].take().expect("each index once");
    let val: Vec<TaggedSentence> = order[..n_val].iter().map(&mut take).collect();
    let train: Vec<TaggedSentence> = order[n_val..].iter().map(&mut take).collect();
    Ok((train, val))
}

#[derive(Serialize)]
struct Tuned {
    lambda1: f64,
    lambda2: f64,
    grid_step: f64,
    seed: u64,
    train_sentences: usize,
    validation_sentences: usize,
    validation_correct: usize,
    validation_tokens: usize,
}

fn run_tune(
    all: &[TaggedSentence],
    validation: Option<Vec<TaggedSentence>>,
    step: f64,
    seed: u64,
) -> Result<Tuned> {
    let (train, val) = match validation {
        Some(v) => (all.to_vec(), v),
        None => holdout_split(all.to_vec(), seed)?,
    };
    let (l1, l2) = tune_lambdas(&train, &val, step)?;
    let model = HmmModel::train(&train, l1, l2)?;
    let (correct, total) = token_accuracy(&model, &val);
    Ok(Tuned {
        lambda1: l1,
        lambda2: l2,
        grid_step: step,
        seed,
        train_sentences: train.len(),
        validation_sentences: val.len(),
        validation_correct: correct,
        validation_tokens: total,
    })
}

fn hmm_tune(a: HmmTuneArgs, cfg: &PipelineConfig) -> Result<()> {
    let train = need(a.train, &cfg.hmm_train, "train")?;
    let step = a.grid_step.unwrap_or(cfg.hmm.grid_step);
    let seed = a.seed.unwrap_or(cfg.seed);
    let all = read_conll2003(&train)?;
    let validation = a.validation.as_deref().map(read_conll2003).transpose()?;
    let tuned = run_tune(&all, validation, step, seed)?;
    info!("tuned weights: {} {}", tuned.lambda1, tuned.lambda2);
    write_json(&a.out, &tuned)?;
    let mut m = Manifest::new("hmm-tune", &json!({ "grid_step": step, "seed": seed }))?;
    m.input(&train)?;
    if let Some(v) = &a.validation {
        m.input(v)?;
    }
    if let Some(p) = &a.model_out {
        write_model(&HmmModel::train(&all, tuned.lambda1, tuned.lambda2)?, p)?;
        m.output(p)?;
    }
    m.write_beside(&a.out)?;
    Ok(())
}

// ---------------------------------------------------------------- mappers

fn dp_map(a: DpMapArgs, cfg: &PipelineConfig) -> Result<()> {
    let trees_path = need(a.trees, &cfg.trees, "trees")?;
    let rules_path = a.dp_rules.or_else(|| cfg.dp_rules.clone());
    let rules = load_rules(rules_path.as_deref())?;
    let statements = a.statements.as_deref().map(read_statements).transpose()?;
    let trees = read_conllu(&trees_path)?;
    let anns = dp_corpus(statements.as_deref(), &trees, &rules)?;
    write_annotations(&anns, &a.out)?;
    let mut m = Manifest::new("dp-map", &rules)?;
    m.input(&trees_path)?;
    for p in a.statements.iter().chain(&rules_path) {
        m.input(p)?;
    }
    m.write_beside(&a.out)?;
    Ok(())
}

struct SrlInputs {
    frames_path: PathBuf,
    lexicon_path: Option<PathBuf>,
    lexicon: VerbLexicon,
    statements: Option<Vec<Statement>>,
    frames: Vec<ci_extractor::interchange::SrlFrame>,
}

fn srl_inputs(a: &SrlMapArgs, cfg: &PipelineConfig) -> Result<SrlInputs> {
    let frames_path = need(a.frames.clone(), &cfg.frames, "frames")?;
    let lexicon_path = a.verb_lexicon.clone().or_else(|| cfg.verb_lexicon.clone());
    Ok(SrlInputs {
        lexicon: load_lexicon(lexicon_path.as_deref())?,
        statements: a.statements.as_deref().map(read_statements).transpose()?,
        frames: read_srl_frames(&frames_path)?,
        frames_path,
        lexicon_path,
    })
}

fn srl_manifest(
    command: &str,
    a: &SrlMapArgs,
    inp: &SrlInputs,
    extra: serde_json::Value,
) -> Result<Manifest> {
    let mut m = Manifest::new(
        command,
        &json!({ "lexicon": inp.lexicon, "options": extra }),
    )?;
    m.input(&inp.frames_path)?;
    for p in a.statements.iter().chain(&inp.lexicon_path) {
        m.input(p)?;
    }
    Ok(m)
}

fn srl_map(a: SrlMapArgs, cfg: &PipelineConfig) -> Result<()> {
    let inp = srl_inputs(&a, cfg)?;
    let anns = srl_corpus(inp.statements.as_deref(), &inp.frames, &inp.lexicon)?;
    let unprocessed = anns.iter().filter(|a| a.unprocessed).count();
    info!("{} statements, {} unprocessed", anns.len(), unprocessed);
    write_annotations(&anns, &a.out)?;
    srl_manifest("srl-map", &a, &inp, json!({}))?.write_beside(&a.out)?;
    Ok(())
}

fn containment(arg: Option<ContainmentArg>, cfg: &PipelineConfig) -> Containment {
    match arg {
        Some(ContainmentArg::SinglePass) => Containment::SinglePass,
        Some(ContainmentArg::Fixpoint) => Containment::Fixpoint,
        None => cfg.containment,
    }
}

fn ci_srl(a: CiSrlArgs, cfg: &PipelineConfig) -> Result<()> {
    let inp = srl_inputs(&a.map, cfg)?;
    let mode = containment(a.containment, cfg);
    let (anns, reports) =
        ci_srl_corpus(inp.statements.as_deref(), &inp.frames, &inp.lexicon, mode)?;
    write_annotations(&anns, &a.map.out)?;
    let mut m = srl_manifest("ci-srl", &a.map, &inp, json!({ "containment": mode }))?;
    if let Some(p) = &a.emit_refinement_report {
        fs::write(p, ci_extractor::interchange::format_jsonl(&reports))
            .with_context(|| format!("writing {}", p.display()))?;
        m.output(p)?;
    }
    m.write_beside(&a.map.out)?;
    Ok(())
}

// ---------------------------------------------------------------- scoring

fn match_policy(o: &MatchOpts, cfg: &PipelineConfig) -> Result<(MatchPolicy, bool)> {
    let mut mc: MatchConfig = cfg.match_policy.clone();
    if let Some(c) = o.criterion {
        mc.criterion = match c {
            CriterionArg::Overlap => MatchCriterion::Overlap,
            CriterionArg::Exact => MatchCriterion::Exact,
        };
    }
    if let Some(t) = o.overlap_threshold {
        mc.overlap_threshold = t;
    }
    let policy = mc.policy();
    policy
        .validate()
        .map_err(|e| ValidationError(e.to_string()))?;
    Ok((policy, o.valid_only || cfg.report.valid_only))
}

/// The single method shared by all annotations of a file.
fn method_of(path: &Path, anns: &[FlowAnnotation]) -> Result<Method> {
    let methods: BTreeSet<String> = anns.iter().map(|a| a.method.to_string()).collect();
    match (anns.first(), methods.len()) {
        (Some(a), 1) => Ok(a.method),
        (None, _) => bail!(ValidationError(format!(
            "{}: no annotations",
            path.display()
        ))),
        _ => bail!(ValidationError(format!(
            "{}: annotations mix methods {:?}",
            path.display(),
            methods
        ))),
    }
}

struct Scored {
    method: Method,
    statements: usize,
    unprocessed: usize,
    per_statement: Vec<StatementScore>,
    params: Vec<ParamScore>,
}

fn score_annotations(
    pred_path: &Path,
    gold: &[FlowAnnotation],
    policy: &MatchPolicy,
) -> Result<Scored> {
    let pred = read_annotations(pred_path)?;
    let method = method_of(pred_path, &pred)?;
    let ids: BTreeSet<&str> = gold.iter().map(|g| g.statement_id.as_str()).collect();
    let pred: Vec<FlowAnnotation> = pred
        .into_iter()
        .filter(|p| ids.contains(p.statement_id.as_str()))
        .collect();
    let per_statement = score_corpus(&pred, gold, policy)?;
    let params = macro_average(&per_statement)?;
    Ok(Scored {
        method,
        statements: per_statement.len(),
        unprocessed: pred.iter().filter(|p| p.unprocessed).count(),
        per_statement,
        params,
    })
}

fn load_gold(path: &Path, valid: bool) -> Result<Vec<FlowAnnotation>> {
    let gold = read_annotations(path)?;
    Ok(if valid { valid_only(&gold) } else { gold })
}

fn score(a: ScoreArgs, cfg: &PipelineConfig) -> Result<()> {
    let (policy, valid) = match_policy(&a.matching, cfg)?;
    let mut m = Manifest::new(
        "score",
        &json!({ "mode": format!("{:?}", a.mode), "policy": policy, "valid_only": valid }),
    )?;
    m.input(&a.pred)?;
    m.input(&a.gold)?;
    match a.mode {
        ModeArg::WordLevel => {
            if a.tag_dist_out.is_some() {
                bail!(ValidationError(
                    "--tag-dist-out needs phrase-macro mode".into()
                ));
            }
            let pred = read_conll2003(&a.pred)?;
            let gold = read_conll2003(&a.gold)?;
            let scores = word_level_scores(&pred, &gold)?;
            write_score_csv(&a.out, &scores, reference_for(Method::Hmm))?;
        }
        ModeArg::PhraseMacro => {
            let gold = load_gold(&a.gold, valid)?;
            let s = score_annotations(&a.pred, &gold, &policy)?;
            write_score_csv(&a.out, &s.params, reference_for(s.method))?;
            if let Some(p) = &a.tag_dist_out {
                write_tag_distribution_csv(p, &tag_distribution(&s.per_statement))?;
                m.output(p)?;
            }
        }
    }
    m.write_beside(&a.out)?;
    Ok(())
}

struct ReportPlan<'a> {
    preds: &'a [PathBuf],
    gold: &'a Path,
    statements: &'a [Statement],
    word_level: Option<(&'a Path, &'a Path)>,
    policy: MatchPolicy,
    valid_only: bool,
    bins: Vec<f64>,
    histogram_method: &'a str,
    out_dir: &'a Path,
}

/// Writes the report files; returns their paths.
fn run_report(plan: &ReportPlan) -> Result<Vec<PathBuf>> {
    ensure_dir(plan.out_dir)?;
    let gold = load_gold(plan.gold, plan.valid_only)?;
    let mut written = Vec::new();
    let mut methods = Vec::new();
    let mut histogram = None;
    for pred in plan.preds {
        let s = score_annotations(pred, &gold, &plan.policy)?;
        let name = s.method.to_string();
        let table = plan.out_dir.join(format!("scores_{}.csv", name));
        write_score_csv(&table, &s.params, reference_for(s.method))?;
        let tags = plan.out_dir.join(format!("tags_{}.csv", name));
        write_tag_distribution_csv(&tags, &tag_distribution(&s.per_statement))?;
        written.extend([table, tags]);
        if name == plan.histogram_method {
            let grouped = scores_by_policy(&s.per_statement, plan.statements)?;
            let h =
                per_policy_f1(&grouped, &plan.bins).map_err(|e| ValidationError(e.to_string()))?;
            let path = plan.out_dir.join("histogram.csv");
            write_histogram_csv(&path, &h)?;
            written.push(path);
            histogram = Some(h);
        }
        methods.push(MethodSummary::new(
            s.method,
            s.statements,
            s.unprocessed,
            s.params,
        ));
    }
    if let Some((pred, gold)) = plan.word_level {
        let pred = read_conll2003(pred)?;
        let gold = read_conll2003(gold)?;
        let scores = word_level_scores(&pred, &gold)?;
        let table = plan.out_dir.join("scores_hmm.csv");
        write_score_csv(&table, &scores, reference_for(Method::Hmm))?;
        written.push(table);
        methods.push(MethodSummary::new(Method::Hmm, pred.len(), 0, scores));
    }
    let summary = ReportSummary {
        match_policy: plan.policy,
        methods,
        histogram,
        note: SKIP_RULE_NOTE.to_owned(),
    };
    let path = plan.out_dir.join("summary.json");
    write_summary_json(&path, &summary)?;
    written.push(path);
    Ok(written)
}

fn report(a: ReportArgs, cfg: &PipelineConfig) -> Result<()> {
    let gold = need(a.gold.clone(), &cfg.gold, "gold")?;
    let (policy, valid) = match_policy(&a.matching, cfg)?;
    let statements = read_statements(&a.statements)?;
    let word_level = a
        .word_level
        .as_ref()
        .map(|v| (v[0].as_path(), v[1].as_path()));
    let bins = a.bins.clone().unwrap_or_else(|| cfg.report.bins.clone());
    let histogram_method = a
        .histogram_method
        .clone()
        .unwrap_or_else(|| cfg.report.histogram_method.clone());
    let plan = ReportPlan {
        preds: &a.pred,
        gold: &gold,
        statements: &statements,
        word_level,
        policy,
        valid_only: valid,
        bins: bins.clone(),
        histogram_method: &histogram_method,
        out_dir: &a.out_dir,
    };
    let written = run_report(&plan)?;
    let mut m = Manifest::new(
        "report",
        &json!({ "policy": policy, "valid_only": valid, "bins": bins, "histogram_method": histogram_method }),
    )?;
    for p in a.pred.iter().chain([&gold, &a.statements]) {
        m.input(p)?;
    }
    if let Some(v) = &a.word_level {
        m.input(&v[0])?;
        m.input(&v[1])?;
    }
    for p in &written {
        m.output(p)?;
    }
    m.write(&a.out_dir.join("manifest.json"))?;
    Ok(())
}

// ---------------------------------------------------------------- pipeline

fn pipeline(a: PipelineArgs, cfg: &PipelineConfig) -> Result<()> {
    cfg.check_paths()?;
    let segments = need(None, &cfg.segments, "segments")?;
    let gold = need(None, &cfg.gold, "gold")?;
    let trees = need(None, &cfg.trees, "trees")?;
    let frames_path = need(None, &cfg.frames, "frames")?;
    let out = &a.out_dir;
    ensure_dir(out)?;
    let mut m = Manifest::new("pipeline", cfg)?;
    for p in [&segments, &gold, &trees, &frames_path] {
        m.input(p)?;
    }
    for p in cfg.dp_rules.iter().chain(&cfg.verb_lexicon) {
        m.input(p)?;
    }

    let statements_path = out.join("statements.jsonl");
    let stats_path = out.join("stats.json");
    let statements = run_ingest(
        &segments,
        &cfg.ingest.options(),
        &statements_path,
        Some(&gold),
        Some(&stats_path),
    )?;
    m.output(&statements_path)?;
    m.output(&stats_path)?;

    let rules = load_rules(cfg.dp_rules.as_deref())?;
    let dp = dp_corpus(Some(&statements), &read_conllu(&trees)?, &rules)?;
    let dp_path = out.join("dp.jsonl");
    write_annotations(&dp, &dp_path)?;

    let lexicon = load_lexicon(cfg.verb_lexicon.as_deref())?;
    let frames = read_srl_frames(&frames_path)?;
    let srl = srl_corpus(Some(&statements), &frames, &lexicon)?;
    let srl_path = out.join("srl.jsonl");
    write_annotations(&srl, &srl_path)?;

    let (ci, reports) = ci_srl_corpus(Some(&statements), &frames, &lexicon, cfg.containment)?;
    let ci_path = out.join("ci-srl.jsonl");
    write_annotations(&ci, &ci_path)?;
    let refinement_path = out.join("refinement.jsonl");
    fs::write(
        &refinement_path,
        ci_extractor::interchange::format_jsonl(&reports),
    )
    .with_context(|| format!("writing {}", refinement_path.display()))?;
    for p in [&dp_path, &srl_path, &ci_path, &refinement_path] {
        m.output(p)?;
    }

    let mut word_level = None;
    let hmm_pred_path = out.join("hmm.conll");
    if let (Some(train_path), Some(test_path)) = (&cfg.hmm_train, &cfg.hmm_test) {
        m.input(train_path)?;
        m.input(test_path)?;
        let train = read_conll2003(train_path)?;
        let (l1, l2) = if cfg.hmm.tune {
            let tuned = run_tune(&train, None, cfg.hmm.grid_step, cfg.seed)?;
            let tuned_path = out.join("hmm_tuned.json");
            write_json(&tuned_path, &tuned)?;
            m.output(&tuned_path)?;
            (tuned.lambda1, tuned.lambda2)
        } else {
            (cfg.hmm.lambda1, cfg.hmm.lambda2)
        };
        let model = HmmModel::train(&train, l1, l2)?;
        let model_path = out.join("hmm_model.json");
        write_model(&model, &model_path)?;
        let tagged = tag_all(&model, &read_conll2003(test_path)?);
        write_conll2003(&tagged, &hmm_pred_path)?;
        m.output(&model_path)?;
        m.output(&hmm_pred_path)?;
        word_level = Some((hmm_pred_path.as_path(), test_path.as_path()));
    }

    let report_dir = out.join("report");
    let preds = vec![dp_path.clone(), srl_path.clone(), ci_path.clone()];
    let plan = ReportPlan {
        preds: &preds,
        gold: &gold,
        statements: &statements,
        word_level,
        policy: cfg.match_policy.policy(),
        valid_only: cfg.report.valid_only,
        bins: cfg.report.bins.clone(),
        histogram_method: &cfg.report.histogram_method,
        out_dir: &report_dir,
    };
    for p in run_report(&plan)? {
        m.output(&p)?;
    }
    m.write(&out.join("manifest.json"))?;
    Ok(())
}
