//! Optional TOML configuration. Every value here can be overridden by the
//! matching flag; anything unset falls back to the library default.
//! Credentials are never read from this file: `[live] token_env` names the
//! environment variable that holds the token.

use std::path::{Path, PathBuf};

use deduce_core::fd::{LabelStrategy, ValueOrder, VarSelect};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub live: LiveSection,
    #[serde(default)]
    pub prompt: PromptSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub max_attempts: Option<u32>,
    pub temp_start: Option<f64>,
    pub temp_end: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub max_steps: Option<u64>,
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    pub label_strategy: Option<String>,
    pub occurs_check: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiveSection {
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub token_env: Option<String>,
    pub timeout_secs: Option<u64>,
    pub send_seed: Option<bool>,
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptSection {
    /// JSON list of `{"problem": .., "program": ..}` exemplars.
    pub shots: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub repeats: Option<u32>,
    pub workers: Option<usize>,
    pub formats: Option<Vec<String>>,
    /// Problem ids to evaluate, in order.
    pub subset: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

pub fn parse_label_strategy(s: &str) -> Result<LabelStrategy, CliError> {
    let (select, order) = s.split_once(':').unwrap_or((s, "up"));
    let select = match select {
        "leftmost" => VarSelect::Leftmost,
        "first-fail" | "ff" => VarSelect::FirstFail,
        _ => return Err(CliError::Usage(format!("unknown label strategy `{s}`"))),
    };
    let order = match order {
        "up" => ValueOrder::Ascending,
        "down" => ValueOrder::Descending,
        _ => return Err(CliError::Usage(format!("unknown value order in `{s}`"))),
    };
    Ok(LabelStrategy { select, order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_are_optional() {
        let cfg: FileConfig = toml::from_str("[budget]\nmax_steps = 10\n").unwrap();
        assert_eq!(cfg.budget.max_steps, Some(10));
        assert!(cfg.policy.max_attempts.is_none());
    }

    #[test]
    fn secrets_are_not_config_keys() {
        assert!(toml::from_str::<FileConfig>("[live]\napi_key = \"sk-123\"\n").is_err());
        assert!(toml::from_str::<FileConfig>("token = \"x\"\n").is_err());
    }

    #[test]
    fn label_strategies() {
        assert_eq!(parse_label_strategy("leftmost").unwrap(), LabelStrategy::default());
        assert_eq!(parse_label_strategy("first-fail").unwrap(), LabelStrategy::first_fail());
        assert_eq!(
            parse_label_strategy("leftmost:down").unwrap().order,
            ValueOrder::Descending
        );
        assert!(parse_label_strategy("random").is_err());
    }
}
