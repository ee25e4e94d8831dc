//! Corpus ingestion: segment files, label filtering, sentence splitting and
//! tokenization, plus corpus statistics against gold annotations.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{FlowAnnotation, Statement, Token};

pub const DEFAULT_ALLOWED_LABELS: [&str; 3] = [
    "First Party Collection/Use",
    "Third Party Sharing/Collection",
    "Data Retention",
];

pub const DEFAULT_ABBREVIATIONS: [&str; 18] = [
    "e.g.", "i.e.", "etc.", "inc.", "ltd.", "co.", "corp.", "llc.", "mr.", "mrs.", "ms.", "dr.",
    "vs.", "u.s.", "no.", "st.", "jr.", "approx.",
];

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 6] = ['"', '\'', ')', ']', '\u{201d}', '\u{2019}'];
const OPENERS: [char; 5] = ['"', '\'', '(', '[', '\u{201c}'];
const TRAILING_PUNCT: [char; 12] = [
    '.', ',', ';', ':', '!', '?', '"', '\'', ')', ']', '\u{201d}', '\u{2019}',
];
const LEADING_PUNCT: [char; 6] = ['"', '\'', '(', '[', '\u{201c}', '\u{2018}'];

/// One line of a segment file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub policy_id: String,
    pub segment_id: String,
    pub label: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOptions {
    pub split_on_colon: bool,
    pub abbreviations: Vec<String>,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            split_on_colon: false,
            abbreviations: DEFAULT_ABBREVIATIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl SplitOptions {
    fn is_abbreviation(&self, word: &str) -> bool {
        let word = word.trim_start_matches(|c| OPENERS.contains(&c));
        let lower = word.to_lowercase();
        self.abbreviations
            .iter()
            .any(|a| a.eq_ignore_ascii_case(&lower))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub allowed_labels: Vec<String>,
    pub split: SplitOptions,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            allowed_labels: DEFAULT_ALLOWED_LABELS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            split: SplitOptions::default(),
        }
    }
}

impl IngestOptions {
    /// Label comparison ignores ASCII case: published label lists are not
    /// consistent about capitalization.
    pub fn allows(&self, label: &str) -> bool {
        self.allowed_labels
            .iter()
            .any(|l| l.trim().eq_ignore_ascii_case(label.trim()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub statements: Vec<Statement>,
    /// Segments dropped because their label is not allowed, per label.
    pub skipped_labels: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn skipped_segments(&self) -> usize {
        self.skipped_labels.values().sum()
    }

    pub fn get(&self, id: &str) -> Option<&Statement> {
        self.statements.iter().find(|s| s.id == id)
    }
}

/// Reads every `*.jsonl` file in `dir` (sorted by name) and turns allowed
/// segments into statements with ids `policy/segment/ordinal`.
pub fn ingest_corpus(dir: &Path, options: &IngestOptions) -> Result<Corpus> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();

    let mut corpus = Corpus::default();
    let mut seen = BTreeSet::new();
    for path in &files {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: SegmentRecord = serde_json::from_str(line)
                .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
            if !options.allows(&record.label) {
                *corpus
                    .skipped_labels
                    .entry(record.label.clone())
                    .or_default() += 1;
                continue;
            }
            for (ordinal, sentence) in split_sentences(&record.text, &options.split)
                .into_iter()
                .enumerate()
            {
                let tokens = tokenize(&sentence, &options.split);
                if tokens.is_empty() {
                    continue;
                }
                let id = format!("{}/{}/{}", record.policy_id, record.segment_id, ordinal);
                if !seen.insert(id.clone()) {
                    return Err(Error::parse(
                        path,
                        lineno + 1,
                        format!("duplicate statement id `{}`", id),
                    ));
                }
                corpus.statements.push(Statement {
                    id,
                    policy_id: record.policy_id.clone(),
                    segment_id: record.segment_id.clone(),
                    segment_label: record.label.clone(),
                    tokens,
                    raw_text: sentence,
                });
            }
        }
    }
    if corpus.skipped_segments() > 0 {
        warn!(
            "skipped {} segment(s) with labels outside the allow-list",
            corpus.skipped_segments()
        );
    }
    Ok(corpus)
}

/// Rule-based sentence splitter.
///
/// A sentence ends at `.`, `!` or `?` (plus any closing quotes or brackets)
/// when followed by whitespace and then an uppercase letter, a quote or a
/// digit. Known abbreviations never end a sentence. With `split_on_colon`, a
/// colon followed by whitespace also ends one.
pub fn split_sentences(text: &str, options: &SplitOptions) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    let byte_at = |i: usize| if i < n { chars[i].0 } else { text.len() };

    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < n {
        let c = chars[i].1;
        let is_colon = options.split_on_colon && c == ':';
        if !TERMINATORS.contains(&c) && !is_colon {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < n && (TERMINATORS.contains(&chars[j].1) || CLOSERS.contains(&chars[j].1)) {
            j += 1;
        }
        if j >= n || !chars[j].1.is_whitespace() {
            i = j;
            continue;
        }
        let mut k = j;
        while k < n && chars[k].1.is_whitespace() {
            k += 1;
        }
        if k >= n {
            break;
        }
        let next = chars[k].1;
        let opens = next.is_uppercase() || next.is_ascii_digit() || OPENERS.contains(&next);
        let boundary = if is_colon {
            true
        } else if c == '.' {
            let word_start = text[..byte_at(i)]
                .rfind(char::is_whitespace)
                .map_or(0, |p| p + 1);
            opens && !options.is_abbreviation(&text[word_start..byte_at(i + 1)])
        } else {
            opens
        };
        if boundary {
            let sentence = text[byte_at(start)..byte_at(j)].trim();
            if !sentence.is_empty() {
                sentences.push(sentence.to_owned());
            }
            start = k;
        }
        i = k;
    }
    let tail = text[byte_at(start)..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_owned());
    }
    sentences
}

/// Whitespace tokenization with leading quote/bracket and trailing
/// punctuation detached. Abbreviations keep their final period.
pub fn tokenize(sentence: &str, options: &SplitOptions) -> Vec<Token> {
    let mut texts: Vec<String> = Vec::new();
    for chunk in sentence.split_whitespace() {
        let mut core: &str = chunk;
        while core.chars().count() > 1 {
            let first = core.chars().next().unwrap();
            if !LEADING_PUNCT.contains(&first) {
                break;
            }
            texts.push(first.to_string());
            core = &core[first.len_utf8()..];
        }
        let mut trailing = Vec::new();
        while core.chars().count() > 1 && !options.is_abbreviation(core) {
            let last = core.chars().next_back().unwrap();
            if !TRAILING_PUNCT.contains(&last) {
                break;
            }
            trailing.push(last.to_string());
            core = &core[..core.len() - last.len_utf8()];
        }
        texts.push(core.to_owned());
        texts.extend(trailing.into_iter().rev());
    }
    texts
        .into_iter()
        .enumerate()
        .map(|(i, t)| Token::new(i, t))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_statements: usize,
    pub valid_statements: usize,
    pub gold_spans: usize,
    pub per_policy_valid: BTreeMap<String, usize>,
    pub min_valid_per_policy: usize,
    pub mean_valid_per_policy: f64,
    pub max_valid_per_policy: usize,
}

pub fn corpus_stats(corpus: &Corpus, gold: &[FlowAnnotation]) -> Result<CorpusStats> {
    let policy_of: BTreeMap<&str, &str> = corpus
        .statements
        .iter()
        .map(|s| (s.id.as_str(), s.policy_id.as_str()))
        .collect();

    let dangling: Vec<String> = gold
        .iter()
        .filter(|a| !policy_of.contains_key(a.statement_id.as_str()))
        .map(|a| a.statement_id.clone())
        .collect();
    if !dangling.is_empty() {
        return Err(Error::DanglingStatements(dangling));
    }

    let mut per_policy_valid: BTreeMap<String, usize> = corpus
        .statements
        .iter()
        .map(|s| (s.policy_id.clone(), 0))
        .collect();
    let mut valid_ids = BTreeSet::new();
    let mut gold_spans = 0;
    for ann in gold {
        gold_spans += ann.spans.len();
        if ann.valid == Some(true) && valid_ids.insert(ann.statement_id.as_str()) {
            *per_policy_valid
                .get_mut(policy_of[ann.statement_id.as_str()])
                .expect("policy registered above") += 1;
        }
    }

    let counts: Vec<usize> = per_policy_valid.values().copied().collect();
    let mean = if counts.is_empty() {
        0.0
    } else {
        counts.iter().sum::<usize>() as f64 / counts.len() as f64
    };
    Ok(CorpusStats {
        total_statements: corpus.statements.len(),
        valid_statements: valid_ids.len(),
        gold_spans,
        min_valid_per_policy: counts.iter().copied().min().unwrap_or(0),
        mean_valid_per_policy: mean,
        max_valid_per_policy: counts.iter().copied().max().unwrap_or(0),
        per_policy_valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_tokens, CiParam, Method, Span};
    use proptest::prelude::*;

    fn opts() -> SplitOptions {
        SplitOptions::default()
    }

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    #[test]
    fn splits_on_unambiguous_terminators() {
        assert_eq!(
            split_sentences("We collect data. We share data.", &opts()),
            vec!["We collect data.", "We share data."]
        );
        assert_eq!(
            split_sentences("Do we sell data? No! We never do.", &opts()),
            vec!["Do we sell data?", "No!", "We never do."]
        );
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(
            split_sentences("We use e.g. cookies to track you.", &opts()),
            vec!["We use e.g. cookies to track you."]
        );
        assert_eq!(
            split_sentences("We share data with Acme Inc. This is rare.", &opts()).len(),
            1
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            split_sentences("Version 2.0 of the app. then more", &opts()).len(),
            1
        );
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        assert_eq!(
            split_sentences("This is called \"personal data.\" We collect it.", &opts()),
            vec!["This is called \"personal data.\"", "We collect it."]
        );
    }

    #[test]
    fn colon_joined_statement_is_one_sentence_by_default() {
        let text = "There are two main types of information we collect about users of our \
                    online services that include (but are not limited to) the following: \
                    Information that identifies you: This is commonly referred to as \
                    \"personal information\" and includes, for example, information that you \
                    provide to us such as your name, home address, age, gender, telephone \
                    number, e-mail address, payment information (including your credit card \
                    number), and/or photos or video footage of you; and & Information that \
                    relates to you, but on its own does not identify you: Such as information \
                    about your Internet connection, the equipment you use to access our online \
                    services and information relating to your usage of those services.";
        assert_eq!(split_sentences(text, &opts()).len(), 1);
        let colon = SplitOptions {
            split_on_colon: true,
            ..opts()
        };
        assert_eq!(split_sentences(text, &colon).len(), 4);
    }

    #[test]
    fn empty_and_whitespace_inputs() {
        assert!(split_sentences("", &opts()).is_empty());
        assert!(split_sentences("   \n ", &opts()).is_empty());
        assert_eq!(
            split_sentences("no terminator", &opts()),
            vec!["no terminator"]
        );
    }

    #[test]
    fn tokenizer_detaches_punctuation() {
        let toks: Vec<String> = tokenize(
            "We collect (among others) \"usage data\", e.g., cookies.",
            &opts(),
        )
        .into_iter()
        .map(|t| t.text)
        .collect();
        assert_eq!(
            toks,
            vec![
                "We", "collect", "(", "among", "others", ")", "\"", "usage", "data", "\"", ",",
                "e.g.", ",", "cookies", "."
            ]
        );
    }

    #[test]
    fn tokenizer_keeps_internal_punctuation() {
        let toks: Vec<String> = tokenize("users' e-mail isn't 3.5", &opts())
            .into_iter()
            .map(|t| t.text)
            .collect();
        assert_eq!(toks, vec!["users", "'", "e-mail", "isn't", "3.5"]);
    }

    fn write_segments(dir: &Path, name: &str, lines: &[SegmentRecord]) {
        let body: String = lines
            .iter()
            .map(|r| serde_json::to_string(r).unwrap() + "\n")
            .collect();
        fs::write(dir.join(name), body).unwrap();
    }

    fn seg(policy: &str, id: &str, label: &str, text: &str) -> SegmentRecord {
        SegmentRecord {
            policy_id: policy.into(),
            segment_id: id.into(),
            label: label.into(),
            text: text.into(),
        }
    }

    #[test]
    fn ingest_filters_segments_by_label() {
        let dir = tempfile::tempdir().unwrap();
        write_segments(
            dir.path(),
            "acme.jsonl",
            &[
                seg(
                    "acme",
                    "s0",
                    "Policy Change",
                    "We may update this policy. We will notify you.",
                ),
                seg(
                    "acme",
                    "s1",
                    "Data Retention",
                    "We keep logs for 30 days. We delete them afterwards.",
                ),
                seg("acme", "s2", "User Choice/Control", "You can opt out."),
            ],
        );
        let corpus = ingest_corpus(dir.path(), &IngestOptions::default()).unwrap();
        assert_eq!(corpus.statements.len(), 2);
        assert_eq!(corpus.statements[0].id, "acme/s1/0");
        assert_eq!(corpus.statements[1].id, "acme/s1/1");
        assert!(corpus
            .statements
            .iter()
            .all(|s| s.segment_label == "Data Retention"));
        assert_eq!(corpus.skipped_segments(), 2);
        assert_eq!(corpus.skipped_labels["Policy Change"], 1);
    }

    #[test]
    fn ingest_label_match_ignores_case() {
        let dir = tempfile::tempdir().unwrap();
        write_segments(
            dir.path(),
            "p.jsonl",
            &[seg(
                "p",
                "1",
                "Third party sharing/collection",
                "We share data.",
            )],
        );
        let corpus = ingest_corpus(dir.path(), &IngestOptions::default()).unwrap();
        assert_eq!(corpus.statements.len(), 1);
    }

    #[test]
    fn ingest_empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = ingest_corpus(dir.path(), &IngestOptions::default()).unwrap();
        assert!(corpus.statements.is_empty());
    }

    #[test]
    fn ingest_reports_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let good = serde_json::to_string(&seg("p", "1", "Data Retention", "x.")).unwrap();
        fs::write(dir.path().join("bad.jsonl"), format!("{}\n{{oops\n", good)).unwrap();
        match ingest_corpus(dir.path(), &IngestOptions::default()) {
            Err(Error::Parse { path, line, .. }) => {
                assert!(path.ends_with("bad.jsonl"));
                assert_eq!(line, 2);
            }
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn ingest_missing_directory_is_io_error() {
        let err =
            ingest_corpus(Path::new("/nonexistent/dir"), &IngestOptions::default()).unwrap_err();
        assert!(err.is_io());
    }

    fn stmt(id: &str, policy: &str) -> Statement {
        Statement {
            id: id.into(),
            policy_id: policy.into(),
            segment_id: "s".into(),
            segment_label: "Data Retention".into(),
            tokens: vec![Token::new(0, "x")],
            raw_text: "x".into(),
        }
    }

    fn gold(id: &str, valid: bool, spans: usize) -> FlowAnnotation {
        let mut a = FlowAnnotation::new(id, Method::Gold);
        a.valid = Some(valid);
        a.spans = (0..spans)
            .map(|i| Span::new(i, i + 1, CiParam::Attribute, "gold"))
            .collect();
        a
    }

    #[test]
    fn stats_count_valid_statements_per_policy() {
        let corpus = Corpus {
            statements: vec![
                stmt("a/1", "a"),
                stmt("a/2", "a"),
                stmt("a/3", "a"),
                stmt("b/1", "b"),
                stmt("c/1", "c"),
            ],
            ..Default::default()
        };
        let gold = vec![
            gold("a/1", true, 3),
            gold("a/2", true, 2),
            gold("a/3", false, 0),
            gold("b/1", true, 4),
        ];
        let stats = corpus_stats(&corpus, &gold).unwrap();
        assert_eq!(stats.total_statements, 5);
        assert_eq!(stats.valid_statements, 3);
        assert_eq!(stats.gold_spans, 9);
        assert_eq!(stats.min_valid_per_policy, 0);
        assert_eq!(stats.max_valid_per_policy, 2);
        assert!((stats.mean_valid_per_policy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stats_without_gold() {
        let corpus = Corpus {
            statements: vec![stmt("a/1", "a")],
            ..Default::default()
        };
        let stats = corpus_stats(&corpus, &[]).unwrap();
        assert_eq!(stats.valid_statements, 0);
        assert_eq!(stats.gold_spans, 0);
    }

    #[test]
    fn stats_reject_dangling_gold() {
        let corpus = Corpus {
            statements: vec![stmt("a/1", "a")],
            ..Default::default()
        };
        let err =
            corpus_stats(&corpus, &[gold("zz/9", true, 1), gold("a/1", true, 1)]).unwrap_err();
        match err {
            Error::DanglingStatements(ids) => assert_eq!(ids, vec!["zz/9".to_string()]),
            other => panic!("unexpected {:?}", other),
        }
    }

    proptest! {
        #[test]
        fn splitting_never_drops_characters(
            text in "[A-Za-z0-9 .!?:,\"()e]{0,120}",
            colon in any::<bool>(),
        ) {
            let options = SplitOptions { split_on_colon: colon, ..SplitOptions::default() };
            let joined: String = split_sentences(&text, &options).concat();
            prop_assert_eq!(strip_ws(&joined), strip_ws(&text));
        }

        #[test]
        fn tokens_reconstruct_text(text in "[A-Za-z0-9 .,;:!?\"'()]{0,80}") {
            let tokens = tokenize(&text, &SplitOptions::default());
            prop_assert!(validate_tokens(&tokens).is_ok());
            let joined: String = tokens.iter().map(|t| t.text.as_str()).collect();
            prop_assert_eq!(joined, strip_ws(&text));
        }
    }
}
