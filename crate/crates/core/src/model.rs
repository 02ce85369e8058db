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

//! Hilbert-space models of a CHSH experiment: a pre-measurement state on
//! C² ⊗ C² and one spectral family per coincidence setting, such that the
//! Born probabilities reproduce the observed tables.
//!
//! A family must satisfy three groups of conditions: each eigenvector is a
//! unit vector, the eigenvectors are mutually orthogonal, and
//! |⟨vₖ|p⟩|² equals the observed probability of outcome k. Written out in
//! real variables that is 4 + 12 + 4 = 20 equations in the 32 moduli and
//! phases of the four eigenvectors, so solutions are far from unique.
//!
//! Two solvers are provided:
//!
//! * [`solve_constructive`] works for any normalized state and any target.
//!   It applies a single Householder reflection that carries the (phase
//!   aligned) state onto the vector of square-root probabilities.
//! * [`solve_ansatz`] reproduces the structured solutions for the singlet
//!   state: two product eigenvectors (0,0,0,−1) and (1,0,0,0) on outcomes
//!   with zero probability, and a pair (0,B,C,0), (0,−C,B,0) spanning the
//!   middle subspace.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{born_probability, inner_product, overlap_sqr, StateVector2, StateVector4};
use crate::amplitude::tensor_product;
use crate::chsh::{
    chsh_statistic, ChshReport, CoincidenceTable, CountingMode, ExperimentSuite, OutcomeCell,
    Setting, Sign,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::tolerance::{Profile, Tolerances, TABLE_SUM_TOLERANCE};

/// Real equations and variables per family, as counted in the polar
/// parametrization.
pub const EQUATIONS_PER_FAMILY: usize = 20;
pub const VARIABLES_PER_FAMILY: usize = 32;
/// Scalar checks per family: 4 norms, 6 inner products, 4 probabilities.
pub const CHECKS_PER_FAMILY: usize = 14;

/// Target entries at or below this are treated as zero by the ansatz.
const ZERO_PROBABILITY: f64 = 1e-15;

/// (0, 1, −1, 0)/√2.
pub fn singlet_state() -> StateVector4 {
    StateVector4::real([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0])
}

/// Orthonormal eigenvectors with real outcome values, for one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFamily {
    pub setting: Setting,
    pub eigenvectors: [StateVector4; 4],
    pub outcomes: [f64; 4],
    /// Per-eigenvector global phases Θ in degrees. Metadata only: no
    /// computation reads them.
    pub phases_deg: Option<[f64; 4]>,
    pub labels: Option<[String; 4]>,
}

impl SpectralFamily {
    pub fn new(setting: Setting, eigenvectors: [StateVector4; 4], outcomes: [f64; 4]) -> Self {
        SpectralFamily {
            setting,
            eigenvectors,
            outcomes,
            phases_deg: None,
            labels: None,
        }
    }

    /// Local measurement: eigenvectors uᵢ ⊗ wⱼ in the order (0,0), (0,1),
    /// (1,0), (1,1), with outcomes ±1 given by the product of the local
    /// outcomes (+1 for index 0, −1 for index 1).
    pub fn product(setting: Setting, first: [StateVector2; 2], second: [StateVector2; 2]) -> Self {
        let eigenvectors = std::array::from_fn(|k| tensor_product(&first[k / 2], &second[k % 2]));
        Self::new(setting, eigenvectors, [1.0, -1.0, -1.0, 1.0])
    }

    pub fn with_phases_deg(mut self, phases: [f64; 4]) -> Self {
        self.phases_deg = Some(phases);
        self
    }

    pub fn with_labels(mut self, labels: [String; 4]) -> Self {
        self.labels = Some(labels);
        self
    }

    /// Eigenvectors multiplied by their stored phases e^{iΘ}.
    pub fn with_phases_applied(&self) -> Self {
        let mut out = self.clone();
        if let Some(phases) = self.phases_deg {
            for (v, theta) in out.eigenvectors.iter_mut().zip(phases) {
                *v = v.with_phase_deg(theta);
            }
        }
        out
    }

    pub fn label(&self, k: usize) -> String {
        match &self.labels {
            Some(labels) => labels[k].clone(),
            None => format!("{}#{}", self.setting, k),
        }
    }

    pub fn normalization_residuals(&self) -> [f64; 4] {
        self.eigenvectors.map(|v| v.normalization_residual())
    }

    /// |⟨vᵢ|vⱼ⟩| for the six pairs i < j, in lexicographic order.
    pub fn orthogonality_residuals(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                let r = inner_product(&self.eigenvectors[i], &self.eigenvectors[j]).norm();
                out.push((i, j, r));
            }
        }
        out
    }

    pub fn check_orthonormal(&self, tolerances: &Tolerances) -> Result<()> {
        for v in &self.eigenvectors {
            v.check_normalized(tolerances.normalization)?;
        }
        for (first, second, residual) in self.orthogonality_residuals() {
            if residual > tolerances.orthogonality {
                return Err(Error::NotOrthonormal {
                    first,
                    second,
                    residual,
                    tolerance: tolerances.orthogonality,
                });
            }
        }
        Ok(())
    }
}

/// Probabilities a family should reproduce, with the outcome values and
/// labels to attach to the fitted family.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTarget {
    pub setting: Setting,
    pub probabilities: [f64; 4],
    pub outcomes: [f64; 4],
    pub labels: Option<[String; 4]>,
}

impl FitTarget {
    /// Target for setting AB with the conventional outcomes (+1, −1, −1, +1).
    pub fn new(probabilities: [f64; 4]) -> Self {
        FitTarget {
            setting: Setting::AB,
            probabilities,
            outcomes: Sign::STANDARD.map(Sign::value),
            labels: None,
        }
    }

    pub fn from_table(table: &CoincidenceTable) -> Self {
        FitTarget {
            setting: table.setting,
            probabilities: table.probabilities(),
            outcomes: table.signs().map(Sign::value),
            labels: Some(table.labels().map(str::to_string)),
        }
    }

    fn validate(&self) -> Result<()> {
        for &p in &self.probabilities {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidTarget(format!("entry {p} is negative or not finite")));
            }
        }
        let sum: f64 = self.probabilities.iter().sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(Error::InvalidTarget(format!("entries sum to {sum}, not 1")));
        }
        Ok(())
    }

    fn family(&self, eigenvectors: [StateVector4; 4]) -> SpectralFamily {
        SpectralFamily {
            setting: self.setting,
            eigenvectors,
            outcomes: self.outcomes,
            phases_deg: None,
            labels: self.labels.clone(),
        }
    }
}

/// Born probabilities of the four outcomes, in eigenvector order.
pub fn forward_probabilities(
    state: &StateVector4,
    family: &SpectralFamily,
    tolerances: &Tolerances,
) -> Result<[f64; 4]> {
    state.check_normalized(tolerances.normalization)?;
    family.check_orthonormal(tolerances)?;
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(&family.eigenvectors) {
        *o = born_probability(v, state, tolerances.normalization)?;
    }
    Ok(out)
}

/// Fits any target at any normalized state with one Householder reflection.
///
/// With q = (√μ₁, …, √μ₄) and φ = arg⟨q|p⟩, the reflection H with
/// w = q − e^{−iφ}p maps e^{−iφ}p onto q. The eigenvectors vₖ = e^{iφ}·H·eₖ
/// are orthonormal because H is unitary, and ⟨vₖ|p⟩ = qₖ.
pub fn solve_constructive(state: &StateVector4, target: &FitTarget) -> Result<SpectralFamily> {
    target.validate()?;
    state.check_normalized(Tolerances::STRICT.normalization)?;
    let state = state.normalized().expect("normalized state is nonzero");

    let q = StateVector4::real(target.probabilities.map(f64::sqrt));
    let q = q.normalized().expect("target sums to one");

    let overlap = inner_product(&q, &state);
    let phi = if overlap.norm() == 0.0 { 0.0 } else { overlap.arg() };
    let phase = Complex64::from_polar(1.0, phi);
    let aligned = state.scale(phase.conj());
    let w = q.sub(&aligned);
    let w_norm_sq = w.norm_sqr();

    let eigenvectors = if w_norm_sq.sqrt() <= 1e-14 {
        std::array::from_fn(|k| StateVector4::basis(k).scale(phase))
    } else {
        let wa = w.amplitudes();
        std::array::from_fn(|k| {
            let coeff = wa[k].conj() * (2.0 / w_norm_sq);
            let mut col = StateVector4::basis(k);
            for (c, wi) in col.0.iter_mut().zip(wa) {
                *c -= wi * coeff;
            }
            col.scale(phase)
        })
    };
    Ok(target.family(eigenvectors))
}

/// Which zero-probability outcomes receive the product eigenvectors
/// (0,0,0,−1) and (1,0,0,0). By default the first zero outcome gets
/// (0,0,0,−1) and the last one gets (1,0,0,0).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZeroSlots {
    pub down: Option<usize>,
    pub up: Option<usize>,
}

/// Middle-subspace coefficients (B, C) with (B − C)²/2 = μ, B² + C² = 1 and
/// B ≥ 0, taking the smaller admissible B.
pub fn ansatz_coefficients(mu: f64) -> (f64, f64) {
    let mu = mu.clamp(0.0, 1.0);
    let diff = (2.0 * mu).sqrt();
    let sum_abs = (2.0 - 2.0 * mu).max(0.0).sqrt();
    // B = (diff + sum)/2 is non-negative for sum = −sum_abs only when μ ≥ 1/2
    let sum = if mu >= 0.5 { -sum_abs } else { sum_abs };
    ((diff + sum) / 2.0, (sum - diff) / 2.0)
}

/// True when `state` is the singlet up to a global phase.
fn is_singlet(state: &StateVector4) -> bool {
    (overlap_sqr(&singlet_state(), state) - 1.0).abs() <= 1e-12
        && state.normalization_residual() <= 1e-12
}

/// Structured solution at the singlet for targets with at least two zero
/// entries.
pub fn solve_ansatz(
    state: &StateVector4,
    target: &FitTarget,
    slots: ZeroSlots,
) -> Result<SpectralFamily> {
    target.validate()?;
    if !is_singlet(state) {
        return Err(Error::AnsatzInapplicable(
            "the pre-measurement state is not the singlet".into(),
        ));
    }
    let mu = target.probabilities;
    let zeros: Vec<usize> = (0..4).filter(|&k| mu[k] <= ZERO_PROBABILITY).collect();
    let nonzero: Vec<usize> = (0..4).filter(|&k| mu[k] > ZERO_PROBABILITY).collect();
    if zeros.len() < 2 {
        return Err(Error::AnsatzInapplicable(format!(
            "target for {} has {} zero entries, at least two are needed",
            target.setting,
            zeros.len()
        )));
    }

    let down = slots.down.unwrap_or(zeros[0]);
    let up = slots.up.unwrap_or(zeros[zeros.len() - 1]);
    if down == up || !zeros.contains(&down) || !zeros.contains(&up) {
        return Err(Error::AnsatzInapplicable(format!(
            "slots {down} and {up} must be distinct zero-probability outcomes"
        )));
    }

    let designated = nonzero[0];
    let partner = nonzero
        .get(1)
        .copied()
        .or_else(|| zeros.iter().copied().find(|&k| k != down && k != up))
        .expect("four outcomes");

    let (b, c) = ansatz_coefficients(mu[designated]);
    let mut eigenvectors = [StateVector4::basis(0); 4];
    eigenvectors[down] = StateVector4::real([0.0, 0.0, 0.0, -1.0]);
    eigenvectors[up] = StateVector4::real([1.0, 0.0, 0.0, 0.0]);
    eigenvectors[designated] = StateVector4::real([0.0, b, c, 0.0]);
    eigenvectors[partner] = StateVector4::real([0.0, -c, b, 0.0]);
    Ok(target.family(eigenvectors))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    Constructive,
    Ansatz,
    /// Ansatz where it applies, constructive otherwise.
    #[default]
    Auto,
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "constructive" => Ok(SolverKind::Constructive),
            "ansatz" => Ok(SolverKind::Ansatz),
            "auto" => Ok(SolverKind::Auto),
            other => Err(format!(
                "unknown solver '{other}' (expected constructive, ansatz or auto)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    PaperQuoted,
    ConstructiveSolve,
    AnsatzSolve,
    /// Some families from each solver.
    Mixed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSolution {
    pub name: Option<String>,
    pub state: StateVector4,
    pub families: BTreeMap<Setting, SpectralFamily>,
    pub provenance: Provenance,
    /// Notes on deviations from a transcribed source.
    pub corrections: Vec<String>,
}

impl ModelSolution {
    pub fn family(&self, setting: Setting) -> Result<&SpectralFamily> {
        self.families
            .get(&setting)
            .ok_or(Error::MissingSetting(setting))
    }

    pub fn with_phases_applied(&self) -> Self {
        let mut out = self.clone();
        for fam in out.families.values_mut() {
            *fam = fam.with_phases_applied();
        }
        out
    }
}

/// Fits all four settings of a suite, possibly in parallel. Results do not
/// depend on the execution strategy.
pub fn solve_suite(
    state: &StateVector4,
    suite: &ExperimentSuite,
    solver: SolverKind,
    exec: Execution,
) -> Result<ModelSolution> {
    let targets: Vec<FitTarget> = Setting::ALL
        .iter()
        .map(|&s| suite.table(s).map(FitTarget::from_table))
        .collect::<Result<_>>()?;

    let solved = exec.map(&targets, |t| -> Result<(SpectralFamily, bool)> {
        match solver {
            SolverKind::Constructive => Ok((solve_constructive(state, t)?, false)),
            SolverKind::Ansatz => Ok((solve_ansatz(state, t, ZeroSlots::default())?, true)),
            SolverKind::Auto => match solve_ansatz(state, t, ZeroSlots::default()) {
                Ok(f) => Ok((f, true)),
                Err(Error::AnsatzInapplicable(_)) => Ok((solve_constructive(state, t)?, false)),
                Err(e) => Err(e),
            },
        }
    });

    let mut families = BTreeMap::new();
    let (mut ansatz, mut constructive) = (0, 0);
    for r in solved {
        let (fam, by_ansatz) = r?;
        if by_ansatz {
            ansatz += 1;
        } else {
            constructive += 1;
        }
        families.insert(fam.setting, fam);
    }
    let provenance = match (ansatz, constructive) {
        (_, 0) => Provenance::AnsatzSolve,
        (0, _) => Provenance::ConstructiveSolve,
        _ => Provenance::Mixed,
    };
    Ok(ModelSolution {
        name: Some(suite.name.clone()),
        state: *state,
        families,
        provenance,
        corrections: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidual {
    pub first: usize,
    pub second: usize,
    pub first_label: String,
    pub second_label: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BornResidual {
    pub index: usize,
    pub label: String,
    pub model: f64,
    pub observed: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyVerification {
    pub setting: Setting,
    pub normalization_residuals: [f64; 4],
    pub orthogonality: Vec<PairResidual>,
    pub born: Vec<BornResidual>,
    /// Outcome value signs agree with the cell signs of the table.
    pub outcome_signs_match: bool,
    pub normalization_pass: bool,
    pub orthogonality_pass: bool,
    pub born_pass: bool,
    pub pass: bool,
}

impl FamilyVerification {
    pub fn max_normalization_residual(&self) -> f64 {
        self.normalization_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_orthogonality_residual(&self) -> f64 {
        self.orthogonality.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_born_residual(&self) -> f64 {
        self.born.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub profile: Profile,
    pub tolerances: Tolerances,
    pub equations_per_family: usize,
    pub variables_per_family: usize,
    pub checks_per_family: usize,
    pub state_normalization_residual: f64,
    pub families: Vec<FamilyVerification>,
    pub missing_families: Vec<Setting>,
    pub normalization_pass: bool,
    pub orthogonality_pass: bool,
    pub born_pass: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn family(&self, setting: Setting) -> Option<&FamilyVerification> {
        self.families.iter().find(|f| f.setting == setting)
    }
}

/// Checks normalization, orthogonality and Born-rule fit of every family
/// against the suite. Never fails: problems are reported, not raised.
pub fn verify_solution(
    solution: &ModelSolution,
    suite: &ExperimentSuite,
    profile: Profile,
) -> VerificationReport {
    let tol = profile.tolerances();
    let state_residual = solution.state.normalization_residual();
    let mut families = Vec::new();
    let mut missing = Vec::new();

    for setting in Setting::ALL {
        let (Some(fam), Some(table)) = (solution.families.get(&setting), suite.tables.get(&setting))
        else {
            missing.push(setting);
            continue;
        };
        let label = |k: usize| table.cells[k].label.clone();

        let normalization_residuals = fam.normalization_residuals();
        let orthogonality: Vec<PairResidual> = fam
            .orthogonality_residuals()
            .into_iter()
            .map(|(i, j, residual)| PairResidual {
                first: i,
                second: j,
                first_label: label(i),
                second_label: label(j),
                residual,
            })
            .collect();
        let born: Vec<BornResidual> = (0..4)
            .map(|k| {
                let model = overlap_sqr(&fam.eigenvectors[k], &solution.state);
                let observed = table.cells[k].probability;
                BornResidual {
                    index: k,
                    label: label(k),
                    model,
                    observed,
                    residual: (model - observed).abs(),
                }
            })
            .collect();
        let outcome_signs_match = (0..4).all(|k| Sign::of(fam.outcomes[k]) == Some(table.cells[k].sign));

        let normalization_pass = normalization_residuals.iter().all(|&r| r <= tol.normalization);
        let orthogonality_pass = orthogonality.iter().all(|r| r.residual <= tol.orthogonality);
        let born_pass = born.iter().all(|r| r.residual <= tol.born);
        families.push(FamilyVerification {
            setting,
            normalization_residuals,
            orthogonality,
            born,
            outcome_signs_match,
            normalization_pass,
            orthogonality_pass,
            born_pass,
            pass: normalization_pass && orthogonality_pass && born_pass && outcome_signs_match,
        });
    }

    let normalization_pass =
        state_residual <= tol.normalization && families.iter().all(|f| f.normalization_pass);
    let orthogonality_pass = families.iter().all(|f| f.orthogonality_pass);
    let born_pass = families.iter().all(|f| f.born_pass);
    let pass = missing.is_empty()
        && normalization_pass
        && families.iter().all(|f| f.pass);
    VerificationReport {
        profile,
        tolerances: tol,
        equations_per_family: EQUATIONS_PER_FAMILY,
        variables_per_family: VARIABLES_PER_FAMILY,
        checks_per_family: CHECKS_PER_FAMILY,
        state_normalization_residual: state_residual,
        families,
        missing_families: missing,
        normalization_pass,
        orthogonality_pass,
        born_pass,
        pass,
    }
}

/// CHSH statistic of the model's own probabilities.
///
/// Each family's Born probabilities are divided by their sum before being
/// tabulated, which is a no-op for exact solutions and absorbs the rounding
/// of quoted vectors.
pub fn model_chsh(solution: &ModelSolution) -> Result<ChshReport> {
    let mut tables = Vec::with_capacity(4);
    for setting in Setting::ALL {
        let fam = solution.family(setting)?;
        let raw = fam.eigenvectors.map(|v| overlap_sqr(&v, &solution.state));
        let total: f64 = raw.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidTable {
                setting,
                reason: "model assigns zero total probability".into(),
            });
        }
        let mut cells = Vec::with_capacity(4);
        for (k, (&value, &p)) in fam.outcomes.iter().zip(&raw).enumerate() {
            let sign = Sign::of(value).ok_or_else(|| Error::InvalidTable {
                setting,
                reason: format!("outcome {k} has value 0 and no sign"),
            })?;
            cells.push(OutcomeCell {
                label: fam.label(k),
                count: None,
                probability: (p / total).clamp(0.0, 1.0),
                sign,
            });
        }
        let cells: [OutcomeCell; 4] = cells.try_into().expect("four cells");
        tables.push(CoincidenceTable::new(setting, cells)?);
    }
    let name = solution.name.clone().unwrap_or_else(|| "model".into());
    let suite = ExperimentSuite::new(format!("{name} (model)"), CountingMode::Direct, tables)?;
    chsh_statistic(&suite)
}
