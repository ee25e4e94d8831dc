//! Readers and writers for the formats exchanged with external taggers and
//! parsers: CoNLL-2003 token/tag columns, CoNLL-U dependency trees,
//! SRL-frame JSON-lines, and the statement/annotation JSON-lines files.
//!
//! All readers reject out-of-range indices instead of clamping them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CiParam, FlowAnnotation, Span, Statement, Token};

const SENT_ID_PREFIX: &str = "# sent_id =";

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A token sequence with one CI tag per token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub statement_id: String,
    pub tokens: Vec<Token>,
    pub tags: Vec<CiParam>,
}

impl TaggedSentence {
    pub fn new(statement_id: impl Into<String>, words: &[&str], tags: &[CiParam]) -> Self {
        assert_eq!(words.len(), tags.len(), "one tag per token");
        TaggedSentence {
            statement_id: statement_id.into(),
            tokens: words
                .iter()
                .enumerate()
                .map(|(i, w)| Token::new(i, *w))
                .collect(),
            tags: tags.to_vec(),
        }
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Runs of identical non-`O` tags as spans tagged `source_tag`.
    pub fn to_spans(&self, source_tag: &str) -> Vec<Span> {
        let mut spans = Vec::new();
        let mut i = 0;
        while i < self.tags.len() {
            let tag = self.tags[i];
            let mut j = i + 1;
            while j < self.tags.len() && self.tags[j] == tag {
                j += 1;
            }
            if tag != CiParam::O {
                spans.push(Span::new(i, j, tag, source_tag));
            }
            i = j;
        }
        spans
    }

    /// Token tags from an annotation. Where spans overlap, the parameter
    /// earliest in tagset order wins; Actor spans are ignored.
    pub fn from_annotation(tokens: &[Token], annotation: &FlowAnnotation) -> Result<Self> {
        let mut tags = vec![CiParam::O; tokens.len()];
        for param in CiParam::TAGSET.iter().rev() {
            for span in annotation.spans_for(*param) {
                if span.end > tokens.len() {
                    return Err(Error::Invalid(format!(
                        "statement `{}`: span [{}, {}) exceeds {} tokens",
                        annotation.statement_id,
                        span.start,
                        span.end,
                        tokens.len()
                    )));
                }
                tags[span.start..span.end].fill(*param);
            }
        }
        Ok(TaggedSentence {
            statement_id: annotation.statement_id.clone(),
            tokens: tokens.to_vec(),
            tags,
        })
    }
}

pub fn read_conll2003(path: &Path) -> Result<Vec<TaggedSentence>> {
    parse_conll2003(&read_text(path)?, path)
}

/// Parses two-column CoNLL-2003 text (token, CI label).
///
/// Blank lines end sentences and `-DOCSTART-` lines are skipped. A
/// `# sent_id = <id>` line names the following sentence; unnamed sentences
/// get `sent-<ordinal>`.
pub fn parse_conll2003(text: &str, source: &Path) -> Result<Vec<TaggedSentence>> {
    let mut sentences = Vec::new();
    let mut pending_id: Option<String> = None;
    let mut current = TaggedSentence {
        statement_id: String::new(),
        tokens: Vec::new(),
        tags: Vec::new(),
    };

    let mut flush = |current: &mut TaggedSentence, pending_id: &mut Option<String>| {
        if current.tokens.is_empty() {
            return;
        }
        let ordinal = sentences.len();
        current.statement_id = pending_id
            .take()
            .unwrap_or_else(|| format!("sent-{}", ordinal));
        sentences.push(std::mem::replace(
            current,
            TaggedSentence {
                statement_id: String::new(),
                tokens: Vec::new(),
                tags: Vec::new(),
            },
        ));
    };

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            flush(&mut current, &mut pending_id);
            continue;
        }
        if line.starts_with("-DOCSTART-") {
            flush(&mut current, &mut pending_id);
            pending_id = None;
            continue;
        }
        if let Some(id) = line.strip_prefix(SENT_ID_PREFIX) {
            flush(&mut current, &mut pending_id);
            pending_id = Some(id.trim().to_owned());
            continue;
        }
        let columns: Vec<&str> = line.split_whitespace().collect();
        if columns.len() != 2 {
            return Err(Error::parse(
                source,
                lineno + 1,
                format!("expected 2 columns (token, label), found {}", columns.len()),
            ));
        }
        let tag: CiParam = columns[1].parse().map_err(|_| {
            Error::parse(
                source,
                lineno + 1,
                format!("unknown label `{}`", columns[1]),
            )
        })?;
        if tag == CiParam::Actor {
            return Err(Error::parse(
                source,
                lineno + 1,
                "label `Actor` is not a token-level tag",
            ));
        }
        current
            .tokens
            .push(Token::new(current.tokens.len(), columns[0]));
        current.tags.push(tag);
    }
    flush(&mut current, &mut pending_id);
    Ok(sentences)
}

pub fn format_conll2003(sentences: &[TaggedSentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        let _ = writeln!(out, "{} {}", SENT_ID_PREFIX, sentence.statement_id);
        for (token, tag) in sentence.tokens.iter().zip(&sentence.tags) {
            let _ = writeln!(out, "{} {}", token.text, tag);
        }
        out.push('\n');
    }
    out
}

pub fn write_conll2003(sentences: &[TaggedSentence], path: &Path) -> Result<()> {
    write_text(path, &format_conll2003(sentences))
}

/// A dependency-parsed sentence. `heads[i]` is the 0-based parent of token
/// `i`, or `None` for the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepTree {
    pub statement_id: String,
    pub tokens: Vec<Token>,
    pub heads: Vec<Option<usize>>,
    pub dep_types: Vec<String>,
}

impl DepTree {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.heads.iter().position(Option::is_none)
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.heads
            .iter()
            .enumerate()
            .filter(move |(_, h)| **h == Some(index))
            .map(|(i, _)| i)
    }

    /// Exactly one root, in-range heads, and no cycles.
    pub fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        if self.heads.len() != n || self.dep_types.len() != n {
            return Err(Error::Invalid(format!(
                "sentence `{}`: {} tokens, {} heads, {} dependency types",
                self.statement_id,
                n,
                self.heads.len(),
                self.dep_types.len()
            )));
        }
        let roots = self.heads.iter().filter(|h| h.is_none()).count();
        if roots != 1 {
            return Err(Error::Invalid(format!(
                "sentence `{}`: expected exactly one root, found {}",
                self.statement_id, roots
            )));
        }
        for (i, head) in self.heads.iter().enumerate() {
            if let Some(h) = head {
                if *h >= n {
                    return Err(Error::Invalid(format!(
                        "sentence `{}`: token {} has head {} outside the sentence",
                        self.statement_id, i, h
                    )));
                }
            }
        }
        for start in 0..n {
            let mut node = start;
            let mut steps = 0;
            while let Some(h) = self.heads[node] {
                node = h;
                steps += 1;
                if steps > n {
                    return Err(Error::Invalid(format!(
                        "sentence `{}`: head links form a cycle through token {}",
                        self.statement_id, start
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn read_conllu(path: &Path) -> Result<Vec<DepTree>> {
    parse_conllu(&read_text(path)?, path)
}

fn optional_column(value: &str) -> Option<String> {
    (value != "_").then(|| value.to_owned())
}

/// Parses 10-column CoNLL-U, keeping ID, FORM, LEMMA, UPOS, HEAD and DEPREL.
/// Multiword-token and empty-node lines are skipped; every sentence needs a
/// `# sent_id =` comment.
pub fn parse_conllu(text: &str, source: &Path) -> Result<Vec<DepTree>> {
    struct Pending {
        first_line: usize,
        sent_id: Option<String>,
        tokens: Vec<Token>,
        heads: Vec<(usize, usize)>,
        dep_types: Vec<String>,
    }

    fn finish(p: Pending, source: &Path) -> Result<DepTree> {
        let statement_id = p.sent_id.ok_or_else(|| {
            Error::parse(
                source,
                p.first_line,
                "sentence has no `# sent_id =` comment",
            )
        })?;
        let n = p.tokens.len();
        let mut heads = Vec::with_capacity(n);
        for (head, line) in p.heads {
            match head {
                0 => heads.push(None),
                h if h <= n => heads.push(Some(h - 1)),
                h => {
                    return Err(Error::parse(
                        source,
                        line,
                        format!("HEAD {} is outside the sentence of {} tokens", h, n),
                    ))
                }
            }
        }
        let tree = DepTree {
            statement_id,
            tokens: p.tokens,
            heads,
            dep_types: p.dep_types,
        };
        tree.validate().map_err(|e| match e {
            Error::Invalid(msg) => Error::parse(source, p.first_line, msg),
            other => other,
        })?;
        Ok(tree)
    }

    let mut trees = Vec::new();
    let mut pending: Option<Pending> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            if let Some(p) = pending.take() {
                trees.push(finish(p, source)?);
            }
            continue;
        }
        let p = pending.get_or_insert_with(|| Pending {
            first_line: lineno,
            sent_id: None,
            tokens: Vec::new(),
            heads: Vec::new(),
            dep_types: Vec::new(),
        });
        if line.starts_with('#') {
            if let Some(id) = line.strip_prefix(SENT_ID_PREFIX) {
                p.sent_id = Some(id.trim().to_owned());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                source,
                lineno,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("bad token ID `{}`", cols[0])))?;
        if id != p.tokens.len() + 1 {
            return Err(Error::parse(
                source,
                lineno,
                format!(
                    "token ID {} out of sequence (expected {})",
                    id,
                    p.tokens.len() + 1
                ),
            ));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("bad HEAD `{}`", cols[6])))?;
        p.tokens.push(Token {
            index: id - 1,
            text: cols[1].to_owned(),
            lemma: optional_column(cols[2]),
            pos: optional_column(cols[3]),
        });
        p.heads.push((head, lineno));
        p.dep_types.push(cols[7].to_owned());
    }
    if let Some(p) = pending.take() {
        trees.push(finish(p, source)?);
    }
    Ok(trees)
}

pub fn format_conllu(trees: &[DepTree]) -> String {
    let mut out = String::new();
    for tree in trees {
        let _ = writeln!(out, "{} {}", SENT_ID_PREFIX, tree.statement_id);
        for (i, token) in tree.tokens.iter().enumerate() {
            let head = tree.heads[i].map_or(0, |h| h + 1);
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                i + 1,
                token.text,
                token.lemma.as_deref().unwrap_or("_"),
                token.pos.as_deref().unwrap_or("_"),
                head,
                tree.dep_types[i]
            );
        }
        out.push('\n');
    }
    out
}

pub fn write_conllu(trees: &[DepTree], path: &Path) -> Result<()> {
    write_text(path, &format_conllu(trees))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SrlArgument {
    pub role: String,
    pub start: usize,
    pub end: usize,
}

impl SrlArgument {
    pub fn new(role: impl Into<String>, start: usize, end: usize) -> Self {
        SrlArgument {
            role: role.into(),
            start,
            end,
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }
}

/// One predicate with its role-labeled argument spans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrlFrame {
    pub statement_id: String,
    pub sentence_len: usize,
    pub verb_index: usize,
    pub verb_lemma: String,
    pub arguments: Vec<SrlArgument>,
}

impl SrlFrame {
    pub fn validate(&self) -> Result<()> {
        if self.verb_index >= self.sentence_len {
            return Err(Error::Invalid(format!(
                "verb index {} outside sentence of length {}",
                self.verb_index, self.sentence_len
            )));
        }
        for arg in &self.arguments {
            if arg.start >= arg.end || arg.end > self.sentence_len {
                return Err(Error::Invalid(format!(
                    "argument {} [{}, {}) outside sentence of length {}",
                    arg.role, arg.start, arg.end, self.sentence_len
                )));
            }
            if arg.contains(self.verb_index) {
                return Err(Error::Invalid(format!(
                    "argument {} [{}, {}) contains its own predicate at {}",
                    arg.role, arg.start, arg.end, self.verb_index
                )));
            }
        }
        Ok(())
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        out.push((lineno + 1, item));
    }
    Ok(out)
}

pub fn format_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("serializable record"));
        out.push('\n');
    }
    out
}

fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<()> {
    write_text(path, &format_jsonl(items))
}

pub fn read_srl_frames(path: &Path) -> Result<Vec<SrlFrame>> {
    read_jsonl::<SrlFrame>(path)?
        .into_iter()
        .map(|(line, frame)| {
            frame
                .validate()
                .map_err(|e| Error::parse(path, line, e.to_string()))?;
            Ok(frame)
        })
        .collect()
}

pub fn write_srl_frames(frames: &[SrlFrame], path: &Path) -> Result<()> {
    write_jsonl(frames, path)
}

pub fn read_annotations(path: &Path) -> Result<Vec<FlowAnnotation>> {
    read_jsonl::<FlowAnnotation>(path)?
        .into_iter()
        .map(|(line, ann)| {
            ann.validate(None)
                .map_err(|e| Error::parse(path, line, e.to_string()))?;
            Ok(ann)
        })
        .collect()
}

pub fn write_annotations(annotations: &[FlowAnnotation], path: &Path) -> Result<()> {
    write_jsonl(annotations, path)
}

pub fn read_statements(path: &Path) -> Result<Vec<Statement>> {
    read_jsonl::<Statement>(path)?
        .into_iter()
        .map(|(line, s)| {
            crate::types::validate_tokens(&s.tokens)
                .map_err(|e| Error::parse(path, line, e.to_string()))?;
            Ok(s)
        })
        .collect()
}

pub fn write_statements(statements: &[Statement], path: &Path) -> Result<()> {
    write_jsonl(statements, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Method, Span};
    use proptest::prelude::*;

    fn src() -> &'static Path {
        Path::new("fixture")
    }

    #[test]
    fn conll2003_two_line_file() {
        let s = parse_conll2003("We Sender\ncollect O\n", src()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].words(), vec!["We", "collect"]);
        assert_eq!(s[0].tags, vec![CiParam::Sender, CiParam::O]);
        assert_eq!(s[0].statement_id, "sent-0");
    }

    #[test]
    fn conll2003_empty_file() {
        assert!(parse_conll2003("", src()).unwrap().is_empty());
    }

    #[test]
    fn conll2003_unknown_label_names_line() {
        let err = parse_conll2003("We Sender\nthem Recipient\n", src()).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("Recipient"));
            }
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn conll2003_column_mismatch() {
        let err = parse_conll2003("We Sender extra\n", src()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn conll2003_docstart_and_ids() {
        let text = "-DOCSTART- O\n\n# sent_id = p/1/0\nWe Receiver\ncollect O\n\nit Attribute\n";
        let s = parse_conll2003(text, src()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].statement_id, "p/1/0");
        assert_eq!(s[1].statement_id, "sent-1");
        let again = parse_conll2003(&format_conll2003(&s), src()).unwrap();
        assert_eq!(again, s);
    }

    const THREE_TOKENS: &str = "# sent_id = t1\n\
        1\tWe\twe\tPRON\t_\t_\t2\tnsubj\t_\t_\n\
        2\tcollect\tcollect\tVERB\t_\t_\t0\tROOT\t_\t_\n\
        3\tdata\tdata\tNOUN\t_\t_\t2\tdobj\t_\t_\n";

    #[test]
    fn conllu_three_tokens() {
        let trees = parse_conllu(THREE_TOKENS, src()).unwrap();
        assert_eq!(trees.len(), 1);
        let t = &trees[0];
        assert_eq!(t.statement_id, "t1");
        assert_eq!(t.heads, vec![Some(1), None, Some(1)]);
        assert_eq!(t.root(), Some(1));
        assert_eq!(t.tokens[0].pos.as_deref(), Some("PRON"));
        assert_eq!(t.children(1).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(parse_conllu(&format_conllu(&trees), src()).unwrap(), trees);
    }

    #[test]
    fn conllu_single_token_root() {
        let text = "# sent_id = one\n1\tHello\t_\tINTJ\t_\t_\t0\tROOT\t_\t_\n";
        let trees = parse_conllu(text, src()).unwrap();
        assert_eq!(trees[0].heads, vec![None]);
        assert_eq!(trees[0].tokens[0].lemma, None);
    }

    #[test]
    fn conllu_rejects_two_roots() {
        let text = "# sent_id = bad\n\
            1\tWe\t_\t_\t_\t_\t0\tROOT\t_\t_\n\
            2\tgo\t_\t_\t_\t_\t0\tROOT\t_\t_\n";
        assert!(matches!(
            parse_conllu(text, src()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn conllu_rejects_cycles() {
        let text = "# sent_id = cyc\n\
            1\ta\t_\t_\t_\t_\t2\tx\t_\t_\n\
            2\tb\t_\t_\t_\t_\t1\tx\t_\t_\n\
            3\tc\t_\t_\t_\t_\t0\tROOT\t_\t_\n";
        let err = parse_conllu(text, src()).unwrap_err();
        assert!(err.to_string().contains("cycle"), "{}", err);
    }

    #[test]
    fn conllu_requires_sent_id() {
        let text = "1\tWe\t_\t_\t_\t_\t0\tROOT\t_\t_\n";
        assert!(parse_conllu(text, src()).is_err());
    }

    #[test]
    fn conllu_rejects_out_of_range_head() {
        let text = "# sent_id = h\n1\tWe\t_\t_\t_\t_\t5\tnsubj\t_\t_\n";
        assert!(matches!(
            parse_conllu(text, src()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn conllu_skips_multiword_and_empty_nodes() {
        let text = "# sent_id = mw\n\
            1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
            1\tdo\t_\tAUX\t_\t_\t0\tROOT\t_\t_\n\
            2\tn't\t_\tPART\t_\t_\t1\tneg\t_\t_\n\
            2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n";
        let trees = parse_conllu(text, src()).unwrap();
        assert_eq!(trees[0].len(), 2);
    }

    fn collect_frame() -> SrlFrame {
        SrlFrame {
            statement_id: "ex".into(),
            sentence_len: 9,
            verb_index: 1,
            verb_lemma: "collect".into(),
            arguments: vec![
                SrlArgument::new("ARG0", 0, 1),
                SrlArgument::new("ARG1", 2, 4),
                SrlArgument::new("ARGM-TMP", 4, 9),
            ],
        }
    }

    #[test]
    fn srl_frames_read_worked_example() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frames.jsonl");
        fs::write(
            &path,
            r#"{"statement_id":"ex","sentence_len":9,"verb_index":1,"verb_lemma":"collect","arguments":[{"role":"ARG0","start":0,"end":1},{"role":"ARG1","start":2,"end":4},{"role":"ARGM-TMP","start":4,"end":9}]}
{"statement_id":"ex","sentence_len":9,"verb_index":6,"verb_lemma":"visit","arguments":[]}
"#,
        )
        .unwrap();
        let frames = read_srl_frames(&path).unwrap();
        assert_eq!(frames[0], collect_frame());
        assert!(frames[1].arguments.is_empty());
    }

    #[test]
    fn srl_frames_reject_out_of_bounds() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frames.jsonl");
        let mut frame = collect_frame();
        frame.arguments[2].end = 10;
        fs::write(&path, format_jsonl(&[collect_frame(), frame])).unwrap();
        assert!(matches!(
            read_srl_frames(&path),
            Err(Error::Parse { line: 2, .. })
        ));

        let mut frame = collect_frame();
        frame.arguments[0] = SrlArgument::new("ARG0", 0, 2);
        assert!(frame.validate().is_err());
    }

    #[test]
    fn annotations_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.jsonl");
        let mut gold = FlowAnnotation::new("p/1/0", Method::Gold);
        gold.valid = Some(true);
        gold.spans.push(Span::new(0, 1, CiParam::Receiver, "gold"));
        let mut srl = FlowAnnotation::new("p/1/1", Method::Srl);
        srl.unprocessed = true;
        write_annotations(&[gold.clone(), srl.clone()], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            r#"{"statement_id":"p/1/0","method":"gold","valid":true,"spans":[{"start":0,"end":1,"param":"Receiver","source_tag":"gold"}]}"#
        ));
        assert_eq!(read_annotations(&path).unwrap(), vec![gold, srl]);
    }

    fn arb_frame() -> impl Strategy<Value = SrlFrame> {
        (2usize..20)
            .prop_flat_map(|len| {
                let args = prop::collection::vec(
                    (
                        prop::sample::select(vec!["ARG0", "ARG1", "ARG2", "ARGM-TMP", "C-ARG1"]),
                        0..len,
                        1..=len,
                    ),
                    0..5,
                );
                (Just(len), 0..len, "[a-z]{1,8}", "[a-z0-9/]{1,10}", args)
            })
            .prop_map(|(len, verb, lemma, id, args)| SrlFrame {
                statement_id: id,
                sentence_len: len,
                verb_index: verb,
                verb_lemma: lemma,
                arguments: args
                    .into_iter()
                    .filter_map(|(role, a, b)| {
                        let (s, e) = if a < b { (a, b) } else { (b, a + 1) };
                        let arg = SrlArgument::new(role, s, e.min(len));
                        (arg.start < arg.end && !arg.contains(verb)).then_some(arg)
                    })
                    .collect(),
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn srl_frames_write_read_write_is_stable(
            frames in prop::collection::vec(arb_frame(), 50)
        ) {
            let dir = tempfile::tempdir().unwrap();
            let first = dir.path().join("a.jsonl");
            let second = dir.path().join("b.jsonl");
            write_srl_frames(&frames, &first).unwrap();
            let read = read_srl_frames(&first).unwrap();
            prop_assert_eq!(&read, &frames);
            write_srl_frames(&read, &second).unwrap();
            prop_assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
        }
    }
}
