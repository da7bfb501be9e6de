//! Pipeline manifests (TOML): models, links and subscriptions.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{RuntimeError, TriggerMode};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Chords per nonlinear definition.
    pub segments: Option<usize>,
    /// Solve the nonlinear objective instead of its chord surrogate.
    #[serde(default)]
    pub exact_objective: bool,
    #[serde(default, rename = "model")]
    pub models: Vec<ModelEntry>,
    #[serde(default, rename = "link")]
    pub links: Vec<LinkEntry>,
    #[serde(default, rename = "subscription")]
    pub subscriptions: Vec<SubscriptionEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub name: String,
    /// Relative to the manifest's directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    /// `model.varpoint`
    pub from: String,
    /// `model.context`
    pub to: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubscriptionEntry {
    pub context: String,
    pub predicate: String,
    #[serde(default)]
    pub mode: TriggerMode,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, RuntimeError> {
        toml::from_str(text).map_err(|e| RuntimeError::Manifest(e.message().to_string()))
    }

    /// Reads a manifest and resolves model paths against its directory.
    pub fn load(path: &Path) -> Result<Manifest, RuntimeError> {
        let text = super::read(path)?;
        let mut m = Manifest::parse(&text)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for model in &mut m.models {
            model.path = dir.join(&model.path);
        }
        Ok(m)
    }
}
