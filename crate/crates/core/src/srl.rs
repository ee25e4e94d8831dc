//! Semantic-role rules: map the frames of information-exchange verbs to CI
//! parameter spans.
//!
//! Verbs are grouped into sending and receiving classes. Each class has its
//! own mapping of core arguments to Sender and Receiver; Attribute and TP
//! roles are shared by every tracked verb. Frames of untracked verbs are
//! ignored.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interchange::SrlFrame;
use crate::types::{sort_dedup_spans, CiParam, FlowAnnotation, Method, Span};

/// Subject recorded on SRL annotations, which never emit Subject spans.
pub const DEFAULT_SUBJECT: &str = "user";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerbClass {
    Sending,
    Receiving,
    Untracked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerbGroup {
    pub verbs: BTreeSet<String>,
    pub sender: String,
    pub receiver: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedRoles {
    pub attribute: BTreeSet<String>,
    pub tp: BTreeSet<String>,
}

/// Verb classes with their role maps. Stored as TOML with `[sending]`,
/// `[receiving]` and `[roles]` tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerbLexicon {
    pub sending: VerbGroup,
    pub receiving: VerbGroup,
    pub roles: SharedRoles,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for VerbLexicon {
    fn default() -> Self {
        VerbLexicon {
            sending: VerbGroup {
                verbs: set(&[
                    "send", "share", "transmit", "transfer", "disclose", "provide",
                ]),
                sender: "ARG0".into(),
                receiver: "ARG2".into(),
            },
            receiving: VerbGroup {
                verbs: set(&["collect", "gather", "receive", "acquire"]),
                sender: "ARG2".into(),
                receiver: "ARG0".into(),
            },
            roles: SharedRoles {
                attribute: set(&["ARG1", "C-ARG1"]),
                tp: set(&["ARGM-TMP", "ARGM-ADV", "ARGM-MNR", "ARGM-PNC", "ARGM-CAU"]),
            },
        }
    }
}

impl VerbLexicon {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut lexicon: VerbLexicon =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("verb lexicon: {}", e)))?;
        for group in [&mut lexicon.sending, &mut lexicon.receiving] {
            group.verbs = group.verbs.iter().map(|v| v.to_lowercase()).collect();
        }
        lexicon.validate()?;
        Ok(lexicon)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::parse(path, 1, e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("lexicon serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self
            .sending
            .verbs
            .intersection(&self.receiving.verbs)
            .next()
        {
            return Err(Error::Invalid(format!(
                "verb `{}` is both sending and receiving",
                v
            )));
        }
        for (name, group) in [("sending", &self.sending), ("receiving", &self.receiving)] {
            if group.sender == group.receiver {
                return Err(Error::Invalid(format!(
                    "{} verbs map Sender and Receiver to the same role {}",
                    name, group.sender
                )));
            }
        }
        if let Some(r) = self.roles.attribute.intersection(&self.roles.tp).next() {
            return Err(Error::Invalid(format!(
                "role {} is mapped to both Attribute and TP",
                r
            )));
        }
        Ok(())
    }

    pub fn classify_verb(&self, lemma: &str) -> VerbClass {
        let lemma = lemma.to_lowercase();
        if self.sending.verbs.contains(&lemma) {
            VerbClass::Sending
        } else if self.receiving.verbs.contains(&lemma) {
            VerbClass::Receiving
        } else {
            VerbClass::Untracked
        }
    }

    pub fn is_tracked(&self, lemma: &str) -> bool {
        self.classify_verb(lemma) != VerbClass::Untracked
    }

    pub fn is_tp_role(&self, role: &str) -> bool {
        self.roles.tp.contains(role)
    }

    /// The CI parameter a role maps to for a verb of the given class.
    pub fn param_for_role(&self, class: VerbClass, role: &str) -> Option<CiParam> {
        let group = match class {
            VerbClass::Sending => &self.sending,
            VerbClass::Receiving => &self.receiving,
            VerbClass::Untracked => return None,
        };
        if role == group.sender {
            Some(CiParam::Sender)
        } else if role == group.receiver {
            Some(CiParam::Receiver)
        } else if self.roles.attribute.contains(role) {
            Some(CiParam::Attribute)
        } else if self.roles.tp.contains(role) {
            Some(CiParam::Tp)
        } else {
            None
        }
    }
}

pub fn classify_verb(lemma: &str, lexicon: &VerbLexicon) -> VerbClass {
    lexicon.classify_verb(lemma)
}

/// Spans of one tracked frame, one per mapped argument, tagged
/// `lemma:ROLE`. Unsorted and not deduplicated.
pub(crate) fn frame_spans(frame: &SrlFrame, lexicon: &VerbLexicon) -> Result<Vec<Span>> {
    let class = lexicon.classify_verb(&frame.verb_lemma);
    if class == VerbClass::Untracked {
        return Err(Error::UntrackedVerb(frame.verb_lemma.clone()));
    }
    let lemma = frame.verb_lemma.to_lowercase();
    Ok(frame
        .arguments
        .iter()
        .filter_map(|arg| {
            lexicon.param_for_role(class, &arg.role).map(|param| {
                Span::new(arg.start, arg.end, param, format!("{}:{}", lemma, arg.role))
            })
        })
        .collect())
}

fn srl_annotation(statement_id: &str, method: Method, mut spans: Vec<Span>) -> FlowAnnotation {
    sort_dedup_spans(&mut spans);
    let mut ann = FlowAnnotation::new(statement_id, method);
    ann.spans = spans;
    ann.assumed_subject = Some(DEFAULT_SUBJECT.to_owned());
    ann
}

/// Maps one frame of a tracked verb. Untracked verbs are an error; filter
/// them first.
pub fn map_frame(frame: &SrlFrame, lexicon: &VerbLexicon) -> Result<FlowAnnotation> {
    let spans = frame_spans(frame, lexicon)?;
    Ok(srl_annotation(&frame.statement_id, Method::Srl, spans))
}

pub(crate) fn check_statement(statement_id: &str, frames: &[SrlFrame]) -> Result<()> {
    match frames.iter().find(|f| f.statement_id != statement_id) {
        Some(f) => Err(Error::StatementMismatch {
            expected: statement_id.to_owned(),
            found: f.statement_id.clone(),
        }),
        None => Ok(()),
    }
}

/// Union of [`map_frame`] over the tracked frames of one statement, with
/// identical `(param, start, end)` spans collapsed. A statement without any
/// tracked frame comes back empty and marked unprocessed.
pub fn extract_statement(
    statement_id: &str,
    frames: &[SrlFrame],
    lexicon: &VerbLexicon,
) -> Result<FlowAnnotation> {
    check_statement(statement_id, frames)?;
    let mut spans = Vec::new();
    let mut tracked = 0;
    for frame in frames.iter().filter(|f| lexicon.is_tracked(&f.verb_lemma)) {
        tracked += 1;
        spans.extend(frame_spans(frame, lexicon)?);
    }
    let mut ann = srl_annotation(statement_id, Method::Srl, spans);
    ann.unprocessed = tracked == 0;
    Ok(ann)
}
