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

//! Tolerance profiles.
//!
//! `Strict` applies to vectors produced by the solvers in this crate.
//! `Quoted` applies to vectors printed to two or three decimals, where
//! rounding alone moves a squared norm by up to ~0.005 (0.15² + 0.99² =
//! 1.0026) and a Born probability by up to ~0.0065.

use serde::{Deserialize, Serialize};

/// Excursions of a probability outside [0, 1] up to this size are clamped.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Sum-to-one tolerance for a coincidence table.
pub const TABLE_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Strict,
    Quoted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Allowed |‖v‖² − 1|.
    pub normalization: f64,
    /// Allowed |⟨vᵢ|vⱼ⟩| for i ≠ j.
    pub orthogonality: f64,
    /// Allowed |model probability − observed probability|.
    pub born: f64,
    /// A vector is a product state iff |v₁v₄ − v₂v₃| ≤ this.
    pub entanglement: f64,
}

impl Tolerances {
    pub const STRICT: Tolerances = Tolerances {
        normalization: 1e-12,
        orthogonality: 1e-12,
        born: 1e-10,
        entanglement: 1e-9,
    };

    pub const QUOTED: Tolerances = Tolerances {
        normalization: 0.01,
        orthogonality: 0.01,
        born: 0.01,
        entanglement: 0.02,
    };
}

impl Profile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            Profile::Strict => Tolerances::STRICT,
            Profile::Quoted => Tolerances::QUOTED,
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Strict => "strict",
            Profile::Quoted => "quoted",
        })
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Profile::Strict),
            "quoted" => Ok(Profile::Quoted),
            other => Err(format!("unknown profile '{other}' (expected strict or quoted)")),
        }
    }
}
