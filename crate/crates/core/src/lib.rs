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

//! CHSH analysis of coincidence data gathered from text corpora, and
//! complex Hilbert-space models that reproduce that data.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`corpus`] counts exact two-word strings or windowed collocates in a
//!    directory of plain-text documents and assembles an [`ExperimentSuite`].
//! 2. [`chsh`] turns the four coincidence tables of a suite into expectation
//!    values, the CHSH statistic and its classification against the
//!    classical bound 2 and the Tsirelson bound 2√2.
//! 3. [`model`] builds four spectral families on C⁴ = C² ⊗ C² whose Born
//!    probabilities at a pre-measurement state (the singlet by default)
//!    reproduce the tables, and verifies quoted or fitted solutions.
//!    [`entanglement`] decides which states and measurements are entangled.
//!
//! Data-parallel loops (per-document counting, per-family solving, batch
//! solves) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iterators otherwise; see [`exec`].

pub mod amplitude;
pub mod chsh;
pub mod cli;
pub mod corpus;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod io;
pub mod model;
pub mod tolerance;

pub use amplitude::{
    born_probability, inner_product, tensor_product, ComplexAmplitude, StateVector2, StateVector4,
};
pub use chsh::{
    chsh_statistic, expectation, marginal_diagnostic, probabilities_from_counts, ChshReport,
    Classification, CoincidenceTable, CountingMode, ExperimentSuite, MarginalDiagnostic,
    OutcomeCell, Setting, Sign,
};
pub use corpus::{
    build_suite, count_collocate, count_collocate_ordered, count_exact, tokenize, Corpus,
    CountQuery, PairQuery, QuerySet, TokenStream,
};
pub use entanglement::{
    build_operator, classify_measurement, product_test, reshape_to_matrix, HermitianOperator4,
    MeasurementClassification, MeasurementVerdict, SchmidtReport, Verdict,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{
    forward_probabilities, model_chsh, singlet_state, solve_ansatz, solve_constructive,
    solve_suite, verify_solution, FitTarget, ModelSolution, Provenance, SolverKind,
    SpectralFamily, VerificationReport, ZeroSlots,
};
pub use tolerance::{Profile, Tolerances};
