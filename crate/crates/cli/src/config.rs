//! Pipeline configuration file. Relative paths resolve against the
//! directory holding the file; command-line flags override every field.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ci_extractor::corpus::{IngestOptions, SplitOptions};
use ci_extractor::eval::{MatchCriterion, MatchPolicy, DEFAULT_BIN_EDGES};
use ci_extractor::hmm::{DEFAULT_LAMBDA1, DEFAULT_LAMBDA2};
use ci_extractor::refine::Containment;
use serde::{Deserialize, Serialize};

use crate::ValidationError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub allowed_labels: Vec<String>,
    pub split_on_colon: bool,
    pub abbreviations: Option<Vec<String>>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        let d = IngestOptions::default();
        IngestConfig {
            allowed_labels: d.allowed_labels,
            split_on_colon: false,
            abbreviations: None,
        }
    }
}

impl IngestConfig {
    pub fn options(&self) -> IngestOptions {
        let mut split = SplitOptions {
            split_on_colon: self.split_on_colon,
            ..SplitOptions::default()
        };
        if let Some(a) = &self.abbreviations {
            split.abbreviations = a.clone();
        }
        IngestOptions {
            allowed_labels: self.allowed_labels.clone(),
            split,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmmConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub grid_step: f64,
    /// Tune the weights on a held-out split of the training file first.
    pub tune: bool,
}

impl Default for HmmConfig {
    fn default() -> Self {
        HmmConfig {
            lambda1: DEFAULT_LAMBDA1,
            lambda2: DEFAULT_LAMBDA2,
            grid_step: 0.1,
            tune: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    pub criterion: MatchCriterion,
    pub overlap_threshold: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        let p = MatchPolicy::default();
        MatchConfig {
            criterion: p.criterion,
            overlap_threshold: p.overlap_threshold,
        }
    }
}

impl MatchConfig {
    pub fn policy(&self) -> MatchPolicy {
        MatchPolicy {
            criterion: self.criterion,
            overlap_threshold: self.overlap_threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub bins: Vec<f64>,
    pub valid_only: bool,
    /// Method whose per-policy F1 goes into the histogram.
    pub histogram_method: String,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            bins: DEFAULT_BIN_EDGES.to_vec(),
            valid_only: false,
            histogram_method: "ci-srl".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub segments: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub trees: Option<PathBuf>,
    pub frames: Option<PathBuf>,
    pub hmm_train: Option<PathBuf>,
    pub hmm_test: Option<PathBuf>,
    pub dp_rules: Option<PathBuf>,
    pub verb_lexicon: Option<PathBuf>,
    pub containment: Containment,
    pub seed: u64,
    pub ingest: IngestConfig,
    pub hmm: HmmConfig,
    #[serde(rename = "match")]
    pub match_policy: MatchConfig,
    pub report: ReportConfig,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| ValidationError(format!("{}: {}", path.display(), e)))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.paths_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    fn paths_mut(&mut self) -> impl Iterator<Item = &mut PathBuf> {
        [
            &mut self.segments,
            &mut self.gold,
            &mut self.trees,
            &mut self.frames,
            &mut self.hmm_train,
            &mut self.hmm_test,
            &mut self.dp_rules,
            &mut self.verb_lexicon,
        ]
        .into_iter()
        .flatten()
    }

    /// Every referenced path must exist before a run starts.
    pub fn check_paths(&self) -> Result<()> {
        let missing: Vec<String> = [
            &self.segments,
            &self.gold,
            &self.trees,
            &self.frames,
            &self.hmm_train,
            &self.hmm_test,
            &self.dp_rules,
            &self.verb_lexicon,
        ]
        .into_iter()
        .flatten()
        .filter(|p| !p.exists())
        .map(|p| p.display().to_string())
        .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            bail!(ValidationError(format!(
                "configured paths do not exist: {}",
                missing.join(", ")
            )))
        }
    }
}
