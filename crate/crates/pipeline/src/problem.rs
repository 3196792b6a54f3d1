//! Problem records and the problems-file schema.
//!
//! A problems file is a JSON list of objects with fields `id`, `category`,
//! `statement`, `answer` and the optional `entanglement`, `entry` and
//! `reference_program`. `gold` is accepted as an alias of `answer`. Unknown
//! fields are ignored.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::answer::Gold;
use crate::exec::Entry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    MathWord,
    ConstraintSatisfaction,
    AlgorithmicInstructions,
    Navigate,
    External,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::MathWord,
        Category::ConstraintSatisfaction,
        Category::AlgorithmicInstructions,
        Category::Navigate,
        Category::External,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::MathWord => "math_word",
            Category::ConstraintSatisfaction => "constraint_satisfaction",
            Category::AlgorithmicInstructions => "algorithmic_instructions",
            Category::Navigate => "navigate",
            Category::External => "external",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemRecord {
    pub id: String,
    pub category: Category,
    pub statement: String,
    #[serde(rename = "answer")]
    pub gold: Gold,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entanglement: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_program: Option<String>,
}

impl ProblemRecord {
    /// The entry query; `problem(X)` when unset. Validated at load time.
    pub fn entry(&self) -> Entry {
        match &self.entry {
            Some(e) => e.parse().unwrap_or_else(|msg| panic!("unvalidated entry: {msg}")),
            None => Entry::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate problem id `{0}`")]
    DuplicateId(String),
    #[error("unknown problem id `{0}` in subset")]
    UnknownId(String),
}

fn schema(path: String, message: impl Into<String>) -> LoadError {
    LoadError::Schema {
        path,
        message: message.into(),
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

fn record_from_value(v: &Value, at: &str) -> Result<ProblemRecord, LoadError> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema(at.to_owned(), "expected an object"))?;
    let field = |name: &str| format!("{at}.{name}");
    let string = |name: &str| -> Result<String, LoadError> {
        match obj.get(name) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(schema(field(name), "expected a string")),
            None => Err(schema(field(name), "missing field")),
        }
    };
    let opt_string = |name: &str| -> Result<Option<String>, LoadError> {
        match obj.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(schema(field(name), "expected a string")),
        }
    };
    let id = string("id")?;
    if !valid_id(&id) {
        return Err(schema(
            field("id"),
            "ids use only ASCII letters, digits, '-', '_' and '.'",
        ));
    }
    let category = string("category")?
        .parse::<Category>()
        .map_err(|m| schema(field("category"), m))?;
    let statement = string("statement")?;
    let (gold_key, gold_value) = match (obj.get("answer"), obj.get("gold")) {
        (Some(v), _) => ("answer", v),
        (None, Some(v)) => ("gold", v),
        (None, None) => return Err(schema(field("answer"), "missing field")),
    };
    let gold =
        Gold::from_json(gold_value).ok_or_else(|| schema(field(gold_key), "expected a single integer or float"))?;
    let entanglement = match obj.get("entanglement") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| schema(field("entanglement"), "expected a nonnegative integer"))?,
        ),
    };
    let entry = opt_string("entry")?;
    if let Some(e) = &entry {
        e.parse::<Entry>().map_err(|m| schema(field("entry"), m))?;
    }
    let reference_program = opt_string("reference_program")?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "id" | "category" | "statement" | "answer" | "gold" | "entanglement" | "entry" | "reference_program"
        ) {
            log::debug!("{at}: ignoring unknown field `{key}`");
        }
    }
    Ok(ProblemRecord {
        id,
        category,
        statement,
        gold,
        entanglement,
        entry,
        reference_program,
    })
}

/// Parses and validates a problems document.
pub fn parse_problems(text: &str) -> Result<Vec<ProblemRecord>, LoadError> {
    let doc: Value = serde_json::from_str(text)?;
    let items = doc
        .as_array()
        .ok_or_else(|| schema("$".into(), "expected a list of problems"))?;
    let records = items
        .iter()
        .enumerate()
        .map(|(i, v)| record_from_value(v, &format!("$[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    check_unique(&records)?;
    Ok(records)
}

pub fn check_unique(records: &[ProblemRecord]) -> Result<(), LoadError> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(LoadError::DuplicateId(r.id.clone()));
        }
    }
    Ok(())
}

/// Loads a problems file. With `include_fixtures` the built-in fixtures are
/// placed first; an id clash with them is a `DuplicateId`.
pub fn load_problems(path: &Path, include_fixtures: bool) -> Result<Vec<ProblemRecord>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let loaded = parse_problems(&text)?;
    let mut all = if include_fixtures {
        crate::fixtures::fixtures()
    } else {
        Vec::new()
    };
    all.extend(loaded);
    check_unique(&all)?;
    Ok(all)
}

/// Serializes records in the problems-file schema.
pub fn problems_to_json(records: &[ProblemRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

/// Keeps the records named in `ids`, in the order given.
pub fn select_subset(records: &[ProblemRecord], ids: &[String]) -> Result<Vec<ProblemRecord>, LoadError> {
    ids.iter()
        .map(|id| {
            records
                .iter()
                .find(|r| &r.id == id)
                .cloned()
                .ok_or_else(|| LoadError::UnknownId(id.clone()))
        })
        .collect()
}
