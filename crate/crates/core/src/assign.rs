//! `name=value` parameter assignments with short-name resolution.

use thiserror::Error;

use crate::exact::{parse_rational, Assignment, ExactError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignError {
    #[error("expected name=value, got `{0}`")]
    Syntax(String),
    #[error("unknown parameter `{name}`; known: {known}")]
    Unknown { name: String, known: String },
    #[error("parameter `{name}` is ambiguous: {candidates}")]
    Ambiguous { name: String, candidates: String },
    #[error("bad value for `{name}`: {source}")]
    Value { name: String, source: ExactError },
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| *c != '_').collect()
}

/// Full name, or the part after the group prefix with underscores dropped
/// (`d14` for `g1.d_1_4`). Must identify exactly one parameter.
pub fn resolve_param(query: &str, params: &[String]) -> Result<String, AssignError> {
    if params.iter().any(|p| p == query) {
        return Ok(query.to_string());
    }
    let q = squash(query);
    let hits: Vec<&String> = params
        .iter()
        .filter(|p| {
            let local = p.split_once('.').map_or(p.as_str(), |(_, l)| l);
            squash(p) == q || squash(local) == q
        })
        .collect();
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(AssignError::Unknown {
            name: query.to_string(),
            known: if params.is_empty() { "none".to_string() } else { params.join(", ") },
        }),
        many => Err(AssignError::Ambiguous {
            name: query.to_string(),
            candidates: many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
        }),
    }
}

pub fn parse_assignments(items: &[String], params: &[String]) -> Result<Assignment, AssignError> {
    let mut out = Assignment::new();
    for item in items {
        let (name, value) = item.split_once('=').ok_or_else(|| AssignError::Syntax(item.clone()))?;
        let full = resolve_param(name.trim(), params)?;
        let v = parse_rational(value.trim()).map_err(|source| AssignError::Value {
            name: name.to_string(),
            source,
        })?;
        out.insert(full, v);
    }
    Ok(out)
}
