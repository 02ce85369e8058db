// Copyright 2026 The chsh-concepts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! File formats: experiment, query, solution and state files, and the
//! canonical JSON writer used for everything the tool emits.
//!
//! Canonical JSON has object keys sorted, floats printed with 17
//! significant digits (shortest `%.17g` form) and two-space indentation,
//! with arrays of scalars kept on one line. Identical values always render
//! to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::amplitude::StateVector4;
use crate::chsh::{
    CoincidenceTable, CountingMode, ExperimentSuite, OutcomeCell, Setting, Sign,
};
use crate::corpus::{PairQuery, QuerySet, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::model::{ModelSolution, Provenance, SpectralFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub name: String,
    pub mode: CountingMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub tables: BTreeMap<Setting, Vec<CellRecord>>,
}

impl ExperimentFile {
    pub fn from_suite(suite: &ExperimentSuite) -> Self {
        let tables = suite
            .tables
            .iter()
            .map(|(&s, t)| {
                let cells = t
                    .cells
                    .iter()
                    .map(|c| CellRecord {
                        label: c.label.clone(),
                        count: c.count,
                        probability: Some(c.probability),
                        sign: c.sign,
                    })
                    .collect();
                (s, cells)
            })
            .collect();
        ExperimentFile {
            name: suite.name.clone(),
            mode: suite.mode,
            window: suite.window,
            tables,
        }
    }

    /// Probabilities given for every cell are used as-is; otherwise they are
    /// derived from counts, which must then be present for every cell.
    pub fn into_suite(self) -> Result<ExperimentSuite> {
        let mut tables = Vec::with_capacity(4);
        for (setting, records) in self.tables {
            let records: [CellRecord; 4] = records.try_into().map_err(|r: Vec<_>| {
                Error::InvalidTable {
                    setting,
                    reason: format!("expected 4 cells, found {}", r.len()),
                }
            })?;
            let table = if records.iter().all(|r| r.probability.is_some()) {
                let cells = records.map(|r| OutcomeCell {
                    label: r.label,
                    count: r.count,
                    probability: r.probability.expect("checked"),
                    sign: r.sign,
                });
                CoincidenceTable::new(setting, cells)?
            } else if records.iter().all(|r| r.count.is_some()) {
                let labels: [&str; 4] = std::array::from_fn(|k| records[k].label.as_str());
                let counts = std::array::from_fn(|k| records[k].count.expect("checked"));
                let signs = std::array::from_fn(|k| records[k].sign);
                CoincidenceTable::from_counts(setting, labels, counts, signs)?
            } else {
                return Err(Error::InvalidTable {
                    setting,
                    reason: "every cell needs a probability, or every cell a count".into(),
                });
            };
            tables.push(table);
        }
        let suite = ExperimentSuite::new(self.name, self.mode, tables)?;
        Ok(match self.window {
            Some(w) => suite.with_window(w),
            None => suite,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingQueryRecord {
    pub pairs: Vec<PairQuery>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub settings: BTreeMap<Setting, SettingQueryRecord>,
    pub mode: CountingMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

impl QueryFile {
    /// Builds the query set; `window_override` wins over the file's window,
    /// which wins over the default of 9.
    pub fn into_query_set(self, window_override: Option<usize>) -> Result<QuerySet> {
        let window = window_override.or(self.window).unwrap_or(DEFAULT_WINDOW);
        let mut settings = Vec::with_capacity(4);
        for (setting, rec) in self.settings {
            let pairs: [PairQuery; 4] = rec.pairs.try_into().map_err(|p: Vec<_>| {
                Error::InvalidQuery(format!("setting {setting} needs 4 pairs, found {}", p.len()))
            })?;
            settings.push((setting, pairs));
        }
        QuerySet::new(self.mode, window, settings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRecord {
    pub eigenvectors: [StateVector4; 4],
    pub outcomes: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases_deg: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<[String; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub state: StateVector4,
    pub families: BTreeMap<Setting, FamilyRecord>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<String>,
}

impl SolutionFile {
    pub fn from_solution(sol: &ModelSolution) -> Self {
        SolutionFile {
            name: sol.name.clone(),
            state: sol.state,
            families: sol
                .families
                .iter()
                .map(|(&s, f)| {
                    (
                        s,
                        FamilyRecord {
                            eigenvectors: f.eigenvectors,
                            outcomes: f.outcomes,
                            phases_deg: f.phases_deg,
                            labels: f.labels.clone(),
                        },
                    )
                })
                .collect(),
            provenance: sol.provenance,
            corrections: sol.corrections.clone(),
        }
    }

    pub fn into_solution(self) -> Result<ModelSolution> {
        if !self.state.is_finite() {
            return Err(Error::Schema("state has non-finite amplitudes".into()));
        }
        let families = self
            .families
            .into_iter()
            .map(|(setting, r)| {
                if r.eigenvectors.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Schema(format!(
                        "family {setting} has non-finite amplitudes"
                    )));
                }
                Ok((
                    setting,
                    SpectralFamily {
                        setting,
                        eigenvectors: r.eigenvectors,
                        outcomes: r.outcomes,
                        phases_deg: r.phases_deg,
                        labels: r.labels,
                    },
                ))
            })
            .collect::<Result<_>>()?;
        Ok(ModelSolution {
            name: self.name,
            state: self.state,
            families,
            provenance: self.provenance,
            corrections: self.corrections,
        })
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        what: what.to_string(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text, &format!("{what} {}", path.display()))
}

pub fn read_experiment(path: &Path) -> Result<ExperimentSuite> {
    read_json::<ExperimentFile>(path, "experiment file")?.into_suite()
}

pub fn read_solution(path: &Path) -> Result<ModelSolution> {
    read_json::<SolutionFile>(path, "solution file")?.into_solution()
}

pub fn read_query(path: &Path, window_override: Option<usize>) -> Result<QuerySet> {
    read_json::<QueryFile>(path, "query file")?.into_query_set(window_override)
}

/// A state file holds `[[re, im] × 4]`, or a solution file whose state is used.
pub fn read_state(path: &Path) -> Result<StateVector4> {
    let value: Value = read_json(path, "state file")?;
    let state_value = match value {
        Value::Object(mut map) => map
            .remove("state")
            .ok_or_else(|| Error::Schema("object without a 'state' key".into()))?,
        other => other,
    };
    let state: StateVector4 = serde_json::from_value(state_value).map_err(|source| Error::Json {
        what: format!("state in {}", path.display()),
        source,
    })?;
    if !state.is_finite() {
        return Err(Error::Schema("state has non-finite amplitudes".into()));
    }
    Ok(state)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Serializes `value` as canonical JSON, with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|source| Error::Json {
        what: "output".into(),
        source,
    })?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// `%.17g`, with a trailing `.0` on integral values so floats stay floats.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if !(-5..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let frac = if frac.is_empty() { "0" } else { frac };
        return format!("{sign}{}.{frac}e{exp}", &digits[..1]);
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        let int = &digits[..split];
        let frac = digits[split..].trim_end_matches('0');
        let frac = if frac.is_empty() { "0" } else { frac };
        format!("{sign}{int}.{frac}")
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{}", digits.trim_end_matches('0'))
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn is_inline_array(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| is_scalar(i) || is_flat_array(i)),
        _ => false,
    }
}

fn is_flat_array(v: &Value) -> bool {
    matches!(v, Value::Array(items) if items.iter().all(is_scalar))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64")));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_inline_array(v) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            out.push_str("{\n");
            for (i, (k, item)) in entries.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Data files shipped with the crate.
pub mod bundled {
    use super::*;

    pub const GOOGLE_BOOKS: &str = include_str!("../data/google_books.json");
    pub const COLLOCATES: &str = include_str!("../data/collocates.json");
    pub const GOOGLE_BOOKS_SOLUTION: &str = include_str!("../data/google_books_solution.json");
    pub const COLLOCATES_SOLUTION: &str = include_str!("../data/collocates_solution.json");
    pub const GOOGLE_BOOKS_SOLUTION_PRINTED: &str =
        include_str!("../data/google_books_solution_printed.json");
    pub const ANIMAL_ACTS_QUERY: &str = include_str!("../data/animal_acts_query.json");

    pub fn google_books() -> ExperimentSuite {
        parse_json::<ExperimentFile>(GOOGLE_BOOKS, "bundled google_books.json")
            .and_then(ExperimentFile::into_suite)
            .expect("bundled data is valid")
    }

    pub fn collocates() -> ExperimentSuite {
        parse_json::<ExperimentFile>(COLLOCATES, "bundled collocates.json")
            .and_then(ExperimentFile::into_suite)
            .expect("bundled data is valid")
    }

    fn solution(text: &str) -> ModelSolution {
        parse_json::<SolutionFile>(text, "bundled solution")
            .and_then(SolutionFile::into_solution)
            .expect("bundled data is valid")
    }

    /// Quoted Google Books solution with |p_TM⟩ = (0,0,0,−1).
    pub fn google_books_solution() -> ModelSolution {
        solution(GOOGLE_BOOKS_SOLUTION)
    }

    /// Quoted Collocates solution with |p_TM⟩ = (0,0,0,−1).
    pub fn collocates_solution() -> ModelSolution {
        solution(COLLOCATES_SOLUTION)
    }

    /// Google Books solution with |p_TM⟩ = (0,0,−1,0) as originally printed.
    pub fn google_books_solution_printed() -> ModelSolution {
        solution(GOOGLE_BOOKS_SOLUTION_PRINTED)
    }
}
