use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use spp_core::backend::{ChatBackendConfig, ReplayMode};
use spp_core::model::{GenerationParams, Setting, Strategy, TaskKind};

use crate::CliError;

/// One experiment sweep: every method × setting × instance of one dataset.
///
/// Relative paths in a config file are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: TaskKind,
    pub dataset_path: PathBuf,
    #[serde(default)]
    pub expected_count: Option<usize>,
    #[serde(with = "strategy_names")]
    pub methods: Vec<Strategy>,
    #[serde(default = "both_settings", with = "setting_names")]
    pub system_message_settings: Vec<Setting>,
    #[serde(default)]
    pub params: GenerationParams,
    #[serde(default)]
    pub backend: ChatBackendConfig,
    pub replay_mode: ReplayMode,
    /// JSONL record/replay store. Unused in passthrough mode.
    #[serde(default)]
    pub replay_store: Option<PathBuf>,
    pub templates_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Permute trivia questions per instance using `seed`.
    #[serde(default)]
    pub shuffle_questions: bool,
    /// Only the first `limit` instances.
    #[serde(default)]
    pub limit: Option<usize>,
    pub output_dir: PathBuf,
}

fn both_settings() -> Vec<Setting> {
    Setting::BOTH.to_vec()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.dataset_path);
        join(&mut self.templates_dir);
        join(&mut self.output_dir);
        if let Some(store) = self.replay_store.as_mut() {
            join(store);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Config("methods is empty".into()));
        }
        if self.system_message_settings.is_empty() {
            return Err(CliError::Config("system_message_settings is empty".into()));
        }
        for m in &self.methods {
            m.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        self.backend.validate().map_err(CliError::Config)?;
        if self.replay_mode != ReplayMode::Passthrough && self.replay_store.is_none() {
            return Err(CliError::Config(format!("{:?} mode needs replay_store", self.replay_mode)));
        }
        if self.limit == Some(0) {
            return Err(CliError::Config("limit must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.params.temperature) || !(0.0..=1.0).contains(&self.params.top_p) {
            return Err(CliError::Config("temperature must be in [0, 2] and top_p in [0, 1]".into()));
        }
        Ok(())
    }
}

mod strategy_names {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Strategy], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|m| m.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Strategy>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|name| name.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

mod setting_names {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Setting], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|m| m.as_str()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Setting>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|name| name.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}
