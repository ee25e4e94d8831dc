//! Dependency-type rules: map dependency relations of a parsed statement to
//! CI parameter spans, each realized as the subtree of the relation's
//! dependent.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interchange::DepTree;
use crate::types::{CiParam, FlowAnnotation, Method, Span};

/// Source tag carried by spans from the pronoun-subject rule.
pub const PRONOUN_TAG: &str = "pron";

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DepMappingRules {
    pub attribute: BTreeSet<String>,
    pub actor: BTreeSet<String>,
    pub tp: BTreeSet<String>,
    pub subject: BTreeSet<String>,
    /// Tag pronouns in a subject relation as `Actor` (source tag `pron`).
    pub pronoun_rule: bool,
    pub pronoun_pos: BTreeSet<String>,
    pub pronoun_subject_deps: BTreeSet<String>,
}

impl Default for DepMappingRules {
    fn default() -> Self {
        DepMappingRules {
            attribute: set(&["dobj", "parataxis", "nsubjpass"]),
            actor: set(&["nsubj"]),
            tp: set(&["xcomp", "ccomp", "advcl", "oprd"]),
            subject: set(&["poss", "agent"]),
            pronoun_rule: true,
            pronoun_pos: set(&["PRON", "PRP", "WP"]),
            pronoun_subject_deps: set(&["nsubj"]),
        }
    }
}

impl DepMappingRules {
    pub fn from_toml(text: &str) -> Result<Self> {
        let rules: DepMappingRules =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("dependency rules: {}", e)))?;
        rules.validate()?;
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::parse(path, 1, e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("rules serialize")
    }

    fn groups(&self) -> [(CiParam, &BTreeSet<String>); 4] {
        [
            (CiParam::Attribute, &self.attribute),
            (CiParam::Actor, &self.actor),
            (CiParam::Tp, &self.tp),
            (CiParam::Subject, &self.subject),
        ]
    }

    /// The four dependency-type sets must be pairwise disjoint.
    pub fn validate(&self) -> Result<()> {
        let groups = self.groups();
        for (i, (pa, a)) in groups.iter().enumerate() {
            for (pb, b) in &groups[i + 1..] {
                if let Some(shared) = a.intersection(b).next() {
                    return Err(Error::Invalid(format!(
                        "dependency type `{}` is mapped to both {} and {}",
                        shared, pa, pb
                    )));
                }
            }
        }
        Ok(())
    }

    /// The parameter a source tag maps to, if any rule produces it.
    pub fn param_for(&self, dep: &str) -> Option<CiParam> {
        if self.pronoun_rule && dep == PRONOUN_TAG {
            return Some(CiParam::Actor);
        }
        self.groups()
            .into_iter()
            .find(|(_, deps)| deps.contains(dep))
            .map(|(p, _)| p)
    }
}

/// Covering interval `[min, max + 1)` of `index` and all its descendants.
pub fn subtree_span(tree: &DepTree, index: usize) -> (usize, usize) {
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    for (i, head) in tree.heads.iter().enumerate() {
        if let Some(h) = head {
            children[*h].push(i);
        }
    }
    let (mut lo, mut hi) = (index, index);
    let mut stack = vec![index];
    let mut visited = vec![false; tree.len()];
    while let Some(node) = stack.pop() {
        if std::mem::replace(&mut visited[node], true) {
            continue;
        }
        lo = lo.min(node);
        hi = hi.max(node);
        stack.extend(&children[node]);
    }
    (lo, hi + 1)
}

fn is_pronoun(tree: &DepTree, index: usize, rules: &DepMappingRules) -> bool {
    tree.tokens[index]
        .pos
        .as_deref()
        .is_some_and(|pos| rules.pronoun_pos.contains(pos))
}

/// Applies the dependency rules to one tree.
///
/// `agent` relations project the subtree of the by-phrase object rather
/// than the preposition.
pub fn map_dependencies(tree: &DepTree, rules: &DepMappingRules) -> FlowAnnotation {
    let mut spans = Vec::new();
    for (i, dep) in tree.dep_types.iter().enumerate() {
        let pronoun_subject = rules.pronoun_rule
            && is_pronoun(tree, i, rules)
            && rules.pronoun_subject_deps.contains(dep);
        if pronoun_subject {
            let (start, end) = subtree_span(tree, i);
            spans.push(Span::new(start, end, CiParam::Actor, PRONOUN_TAG));
        }
        for (param, deps) in rules.groups() {
            if !deps.contains(dep) || (pronoun_subject && param == CiParam::Actor) {
                continue;
            }
            let anchor = if dep == "agent" {
                tree.children(i)
                    .find(|&c| tree.dep_types[c] == "pobj")
                    .unwrap_or(i)
            } else {
                i
            };
            let (start, end) = subtree_span(tree, anchor);
            spans.push(Span::new(start, end, param, dep.clone()));
        }
    }
    spans.sort();
    spans.dedup();
    let mut ann = FlowAnnotation::new(tree.statement_id.clone(), Method::Dp);
    ann.spans = spans;
    ann
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interchange::parse_conllu;

    fn tree(rows: &[(&str, &str, usize, &str)]) -> DepTree {
        let mut text = String::from("# sent_id = t\n");
        for (i, (form, pos, head, dep)) in rows.iter().enumerate() {
            text.push_str(&format!(
                "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\t_\n",
                i + 1,
                form,
                pos,
                head,
                dep
            ));
        }
        parse_conllu(&text, Path::new("t")).unwrap().remove(0)
    }

    fn google() -> DepTree {
        tree(&[
            ("When", "ADV", 3, "advmod"),
            ("you", "PRON", 3, "nsubj"),
            ("use", "VERB", 9, "advcl"),
            ("Google", "PROPN", 5, "compound"),
            ("services", "NOUN", 3, "dobj"),
            (",", "PUNCT", 9, "punct"),
            ("we", "PRON", 9, "nsubj"),
            ("may", "AUX", 9, "aux"),
            ("collect", "VERB", 0, "ROOT"),
            ("and", "CCONJ", 9, "cc"),
            ("process", "VERB", 9, "conj"),
            ("information", "NOUN", 9, "dobj"),
            ("about", "ADP", 12, "prep"),
            ("your", "PRON", 16, "poss"),
            ("actual", "ADJ", 16, "amod"),
            ("location", "NOUN", 13, "pobj"),
            (".", "PUNCT", 9, "punct"),
        ])
    }

    fn text_of(tree: &DepTree, span: &Span) -> String {
        crate::types::span_text(&tree.tokens, span.start, span.end)
    }

    #[test]
    fn subtree_of_leaf_is_single_token() {
        assert_eq!(subtree_span(&google(), 13), (13, 14));
    }

    #[test]
    fn subtree_projects_prepositional_phrase() {
        let t = google();
        let (s, e) = subtree_span(&t, 11);
        assert_eq!(
            crate::types::span_text(&t.tokens, s, e),
            "information about your actual location"
        );
    }

    #[test]
    fn non_projective_subtree_uses_covering_interval() {
        // "a" (0) heads "c" (2); "b" (1) hangs off the root "d" (3).
        let t = tree(&[
            ("a", "X", 4, "dobj"),
            ("b", "X", 4, "dep"),
            ("c", "X", 1, "amod"),
            ("d", "X", 0, "ROOT"),
        ]);
        assert_eq!(subtree_span(&t, 0), (0, 3));
        assert_eq!(subtree_span(&t, 3), (0, 4));
    }

    #[test]
    fn google_example() {
        let t = google();
        let ann = map_dependencies(&t, &DepMappingRules::default());
        let found: Vec<(CiParam, String, &str)> = ann
            .spans
            .iter()
            .map(|s| (s.param, text_of(&t, s), s.source_tag.as_str()))
            .collect();
        for expected in [
            (CiParam::Tp, "When you use Google services", "advcl"),
            (CiParam::Actor, "we", "pron"),
            (
                CiParam::Attribute,
                "information about your actual location",
                "dobj",
            ),
            (CiParam::Subject, "your", "poss"),
        ] {
            assert!(
                found.contains(&(expected.0, expected.1.to_string(), expected.2)),
                "missing {:?} in {:?}",
                expected,
                found
            );
        }
        assert!(ann.validate(Some(t.len())).is_ok());
    }

    #[test]
    fn no_mapped_relations_give_empty_annotation() {
        let t = tree(&[("Hello", "INTJ", 0, "ROOT"), ("!", "PUNCT", 1, "punct")]);
        assert!(map_dependencies(&t, &DepMappingRules::default())
            .spans
            .is_empty());
    }

    #[test]
    fn passive_subject_is_attribute_and_agent_projects_object() {
        // "Your data is collected by partners ."
        let t = tree(&[
            ("Your", "PRON", 2, "poss"),
            ("data", "NOUN", 4, "nsubjpass"),
            ("is", "AUX", 4, "auxpass"),
            ("collected", "VERB", 0, "ROOT"),
            ("by", "ADP", 4, "agent"),
            ("partners", "NOUN", 5, "pobj"),
            (".", "PUNCT", 4, "punct"),
        ]);
        let ann = map_dependencies(&t, &DepMappingRules::default());
        let attr: Vec<_> = ann.spans_for(CiParam::Attribute).collect();
        assert_eq!(attr.len(), 1);
        assert_eq!((attr[0].start, attr[0].end), (0, 2));
        let subj: Vec<_> = ann
            .spans_for(CiParam::Subject)
            .map(|s| text_of(&t, s))
            .collect();
        assert_eq!(subj, vec!["Your", "partners"]);
    }

    #[test]
    fn non_pronoun_subject_keeps_dependency_tag() {
        let t = tree(&[
            ("Partners", "NOUN", 2, "nsubj"),
            ("collect", "VERB", 0, "ROOT"),
            ("data", "NOUN", 2, "dobj"),
        ]);
        let ann = map_dependencies(&t, &DepMappingRules::default());
        let actor: Vec<_> = ann.spans_for(CiParam::Actor).collect();
        assert_eq!(actor.len(), 1);
        assert_eq!(actor[0].source_tag, "nsubj");

        let rules = DepMappingRules {
            pronoun_rule: false,
            ..DepMappingRules::default()
        };
        let ann = map_dependencies(&google(), &rules);
        assert!(ann
            .spans_for(CiParam::Actor)
            .all(|s| s.source_tag == "nsubj"));
    }

    #[test]
    fn overlapping_rule_sets_are_rejected() {
        let mut rules = DepMappingRules::default();
        rules.tp.insert("dobj".into());
        assert!(rules.validate().is_err());
    }

    #[test]
    fn rules_toml_round_trip() {
        let rules = DepMappingRules::default();
        assert_eq!(DepMappingRules::from_toml(&rules.to_toml()).unwrap(), rules);
        let partial = DepMappingRules::from_toml("tp = [\"advcl\"]\n").unwrap();
        assert_eq!(partial.tp, set(&["advcl"]));
        assert_eq!(partial.attribute, DepMappingRules::default().attribute);
        assert!(DepMappingRules::from_toml("bogus = 1\n").is_err());
    }
}
