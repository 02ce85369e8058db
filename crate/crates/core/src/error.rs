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

use std::path::PathBuf;

use crate::chsh::Setting;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty coincidence operation{}", setting.map(|s| format!(" in setting {s}")).unwrap_or_default())]
    EmptyCoincidence { setting: Option<Setting> },

    #[error("vector is not normalized: squared norm {norm_sq} deviates from 1 by more than {tolerance}")]
    NotNormalized { norm_sq: f64, tolerance: f64 },

    #[error("probability {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("eigenvectors {first} and {second} are not orthonormal (residual {residual:.3e} > {tolerance})")]
    NotOrthonormal {
        first: usize,
        second: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid target probabilities: {0}")]
    InvalidTarget(String),

    #[error("ansatz inapplicable; use solve_constructive ({0})")]
    AnsatzInapplicable(String),

    #[error("missing setting {0}")]
    MissingSetting(Setting),

    #[error("invalid coincidence table for {setting}: {reason}")]
    InvalidTable { setting: Setting, reason: String },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("document {document} is not valid UTF-8: {source}")]
    Encoding {
        document: String,
        #[source]
        source: std::string::FromUtf8Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {source}")]
    Json {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid file contents: {0}")]
    Schema(String),
}
