//! Shared domain types: CI parameters, tokens, statements, spans and
//! flow annotations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Contextual Integrity parameter label.
///
/// `Actor` is produced only by the dependency mapper, which cannot tell a
/// sender from a receiver. `O` marks tokens outside every parameter and only
/// occurs in token-level tag sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CiParam {
    Sender,
    Receiver,
    Subject,
    Attribute,
    #[serde(rename = "TP")]
    Tp,
    Actor,
    O,
}

impl CiParam {
    /// Parameters that take part in per-parameter scoring.
    pub const SCORED: [CiParam; 5] = [
        CiParam::Sender,
        CiParam::Receiver,
        CiParam::Subject,
        CiParam::Attribute,
        CiParam::Tp,
    ];

    /// Token-level tagset, in tie-breaking order.
    pub const TAGSET: [CiParam; 6] = [
        CiParam::Sender,
        CiParam::Receiver,
        CiParam::Subject,
        CiParam::Attribute,
        CiParam::Tp,
        CiParam::O,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CiParam::Sender => "Sender",
            CiParam::Receiver => "Receiver",
            CiParam::Subject => "Subject",
            CiParam::Attribute => "Attribute",
            CiParam::Tp => "TP",
            CiParam::Actor => "Actor",
            CiParam::O => "O",
        }
    }

    pub fn is_span_param(self) -> bool {
        self != CiParam::O
    }
}

impl fmt::Display for CiParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CiParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Sender" => Ok(CiParam::Sender),
            "Receiver" => Ok(CiParam::Receiver),
            "Subject" => Ok(CiParam::Subject),
            "Attribute" => Ok(CiParam::Attribute),
            "TP" => Ok(CiParam::Tp),
            "Actor" => Ok(CiParam::Actor),
            "O" => Ok(CiParam::O),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<String>,
}

impl Token {
    pub fn new(index: usize, text: impl Into<String>) -> Self {
        Token {
            index,
            text: text.into(),
            lemma: None,
            pos: None,
        }
    }
}

/// Checks that token indices run contiguously from 0 and no text is empty.
pub fn validate_tokens(tokens: &[Token]) -> Result<()> {
    for (i, token) in tokens.iter().enumerate() {
        if token.index != i {
            return Err(Error::Invalid(format!(
                "token `{}` has index {}, expected {}",
                token.text, token.index, i
            )));
        }
        if token.text.is_empty() {
            return Err(Error::Invalid(format!("token {} has empty text", i)));
        }
    }
    Ok(())
}

/// One sentence-level privacy statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: String,
    pub policy_id: String,
    pub segment_id: String,
    pub segment_label: String,
    pub tokens: Vec<Token>,
    pub raw_text: String,
}

impl Statement {
    /// Tokens joined by single spaces.
    pub fn detokenized(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn span_text(&self, span: &Span) -> String {
        span_text(&self.tokens, span.start, span.end)
    }
}

pub fn span_text(tokens: &[Token], start: usize, end: usize) -> String {
    tokens[start.min(tokens.len())..end.min(tokens.len())]
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A labeled token range `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub param: CiParam,
    pub source_tag: String,
}

impl Span {
    pub fn new(start: usize, end: usize, param: CiParam, source_tag: impl Into<String>) -> Self {
        Span {
            start,
            end,
            param,
            source_tag: source_tag.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of tokens shared with `other`.
    pub fn overlap(&self, other: &Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }

    pub fn same_range(&self, other: &Span) -> bool {
        self.start == other.start && self.end == other.end
    }
}

/// Sorts spans by position and removes those that repeat an earlier
/// `(param, start, end)`; the lexicographically smallest source tag survives.
pub fn sort_dedup_spans(spans: &mut Vec<Span>) {
    spans.sort();
    spans.dedup_by(|b, a| a.start == b.start && a.end == b.end && a.param == b.param);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Hmm,
    Dp,
    Srl,
    CiSrl,
    Gold,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hmm => "hmm",
            Method::Dp => "dp",
            Method::Srl => "srl",
            Method::CiSrl => "ci-srl",
            Method::Gold => "gold",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hmm" => Ok(Method::Hmm),
            "dp" => Ok(Method::Dp),
            "srl" => Ok(Method::Srl),
            "ci-srl" => Ok(Method::CiSrl),
            "gold" => Ok(Method::Gold),
            _ => Err(Error::Invalid(format!("unknown method `{}`", s))),
        }
    }
}

/// The CI tuple for one statement, as labeled spans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowAnnotation {
    pub statement_id: String,
    pub method: Method,
    /// Gold-only: whether the statement prescribes an information exchange.
    #[serde(default)]
    pub valid: Option<bool>,
    pub spans: Vec<Span>,
    /// Subject assumed when the method produces no Subject span.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumed_subject: Option<String>,
    /// Set when the method could not process the statement at all.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unprocessed: bool,
}

impl FlowAnnotation {
    pub fn new(statement_id: impl Into<String>, method: Method) -> Self {
        FlowAnnotation {
            statement_id: statement_id.into(),
            method,
            valid: None,
            spans: Vec::new(),
            assumed_subject: None,
            unprocessed: false,
        }
    }

    pub fn spans_for(&self, param: CiParam) -> impl Iterator<Item = &Span> {
        self.spans.iter().filter(move |s| s.param == param)
    }

    /// Checks the span invariants, optionally against a sentence length.
    pub fn validate(&self, sentence_len: Option<usize>) -> Result<()> {
        let mut seen = BTreeSet::new();
        for span in &self.spans {
            let ctx = || format!("statement `{}`", self.statement_id);
            if span.param == CiParam::O {
                return Err(Error::Invalid(format!("{}: span labeled O", ctx())));
            }
            if span.param == CiParam::Actor && self.method != Method::Dp {
                return Err(Error::Invalid(format!(
                    "{}: Actor span in a `{}` annotation",
                    ctx(),
                    self.method
                )));
            }
            if span.start >= span.end {
                return Err(Error::Invalid(format!(
                    "{}: empty span [{}, {})",
                    ctx(),
                    span.start,
                    span.end
                )));
            }
            if let Some(len) = sentence_len {
                if span.end > len {
                    return Err(Error::Invalid(format!(
                        "{}: span [{}, {}) exceeds sentence length {}",
                        ctx(),
                        span.start,
                        span.end,
                        len
                    )));
                }
            }
            if !seen.insert(span.clone()) {
                return Err(Error::Invalid(format!(
                    "{}: duplicate {} span [{}, {}) from `{}`",
                    ctx(),
                    span.param,
                    span.start,
                    span.end,
                    span.source_tag
                )));
            }
        }
        if self.method != Method::Gold && self.valid.is_some() {
            return Err(Error::Invalid(format!(
                "statement `{}`: only gold annotations carry a validity flag",
                self.statement_id
            )));
        }
        Ok(())
    }
}
