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

//! Product/entangled decisions for vectors of C² ⊗ C², and the
//! self-adjoint operators of spectral families.
//!
//! A vector v = (v₁, v₂, v₃, v₄) is reshaped into the coefficient matrix
//! [[v₁, v₂], [v₃, v₄]]. It is a product state iff that matrix has rank one,
//! i.e. iff det = v₁v₄ − v₂v₃ vanishes. In polar form this determinant is
//! ad·e^{i(α+δ)} − bc·e^{i(β+γ)}.
//!
//! For a unit vector the two Schmidt coefficients satisfy s₁² + s₂² = 1 and
//! s₁s₂ = |det|, hence
//!
//! ```text
//! s₂² = (1 − √(1 − 4|det|²)) / 2
//! ```
//!
//! which is increasing in |det|. The determinant test, a threshold on s₂ and
//! a threshold on the entanglement entropy are therefore equivalent once
//! the thresholds are mapped through this relation; see
//! [`ProductThresholds`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::StateVector4;
use crate::chsh::Setting;
use crate::error::Result;
use crate::model::SpectralFamily;
use crate::tolerance::Tolerances;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Product,
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtReport {
    /// Schmidt coefficients, descending.
    pub singular_values: [f64; 2],
    #[serde(skip)]
    pub determinant: Complex64,
    pub det_abs: f64,
    pub verdict: Verdict,
    pub entropy_bits: f64,
}

/// Thresholds on s₂ and on the entropy that agree with a determinant
/// tolerance for unit vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductThresholds {
    pub det_abs: f64,
    pub smaller_singular_value: f64,
    pub entropy_bits: f64,
}

impl ProductThresholds {
    pub fn for_det_tolerance(det_tolerance: f64) -> Self {
        let d = det_tolerance.min(0.5);
        let s2_sq = smaller_schmidt_sqr(1.0, d);
        ProductThresholds {
            det_abs: det_tolerance,
            smaller_singular_value: s2_sq.sqrt(),
            entropy_bits: binary_entropy(s2_sq),
        }
    }
}

/// [[v₁, v₂], [v₃, v₄]].
pub fn reshape_to_matrix(v: &StateVector4) -> Matrix2 {
    let a = v.amplitudes();
    [[a[0], a[1]], [a[2], a[3]]]
}

/// v₁v₄ − v₂v₃.
pub fn product_determinant(v: &StateVector4) -> Complex64 {
    let a = v.amplitudes();
    a[0] * a[3] - a[1] * a[2]
}

// Smaller eigenvalue of M†M for a 2×2 M with ‖M‖²_F = trace and |det M| = det_abs,
// written to avoid cancellation when det_abs is small.
fn smaller_schmidt_sqr(trace: f64, det_abs: f64) -> f64 {
    let disc = (trace * trace - 4.0 * det_abs * det_abs).max(0.0).sqrt();
    let larger = (trace + disc) / 2.0;
    if larger > 0.0 {
        det_abs * det_abs / larger
    } else {
        0.0
    }
}

fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    (h(p) + h(1.0 - p)).max(0.0)
}

/// Schmidt coefficients and entanglement entropy from the closed-form 2×2
/// singular values; no normalization requirement.
pub fn schmidt_report(v: &StateVector4, det_tolerance: f64) -> SchmidtReport {
    let determinant = product_determinant(v);
    let det_abs = determinant.norm();
    let trace = v.norm_sqr();
    let disc = (trace * trace - 4.0 * det_abs * det_abs).max(0.0).sqrt();
    let s1_sq = (trace + disc) / 2.0;
    let s2_sq = smaller_schmidt_sqr(trace, det_abs);
    let entropy_bits = if trace > 0.0 {
        binary_entropy(s2_sq / (s1_sq + s2_sq))
    } else {
        0.0
    };
    SchmidtReport {
        singular_values: [s1_sq.sqrt(), s2_sq.sqrt()],
        determinant,
        det_abs,
        verdict: if det_abs <= det_tolerance {
            Verdict::Product
        } else {
            Verdict::Entangled
        },
        entropy_bits,
    }
}

/// Decides product vs. entangled for a normalized vector.
pub fn product_test(v: &StateVector4, tolerances: &Tolerances) -> Result<SchmidtReport> {
    v.check_normalized(tolerances.normalization)?;
    Ok(schmidt_report(v, tolerances.entanglement))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementVerdict {
    ProductMeasurement,
    EntangledMeasurement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementClassification {
    pub setting: Setting,
    pub verdict: MeasurementVerdict,
    pub product_eigenstates: usize,
    pub eigenvectors: [SchmidtReport; 4],
}

/// A measurement is a tensor product of local measurements iff all of its
/// eigenvectors are product states.
pub fn classify_measurement(
    family: &SpectralFamily,
    tolerances: &Tolerances,
) -> Result<MeasurementClassification> {
    family.check_orthonormal(tolerances)?;
    let mut reports = Vec::with_capacity(4);
    for v in &family.eigenvectors {
        reports.push(product_test(v, tolerances)?);
    }
    let eigenvectors: [SchmidtReport; 4] = reports.try_into().expect("four eigenvectors");
    let product_eigenstates = eigenvectors
        .iter()
        .filter(|r| r.verdict == Verdict::Product)
        .count();
    Ok(MeasurementClassification {
        setting: family.setting,
        verdict: if product_eigenstates == 4 {
            MeasurementVerdict::ProductMeasurement
        } else {
            MeasurementVerdict::EntangledMeasurement
        },
        product_eigenstates,
        eigenvectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianOperator4 {
    pub entries: [[Complex64; 4]; 4],
}

impl HermitianOperator4 {
    pub fn identity() -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (k, row) in entries.iter_mut().enumerate() {
            row[k] = Complex64::new(1.0, 0.0);
        }
        HermitianOperator4 { entries }
    }

    pub fn apply(&self, v: &StateVector4) -> StateVector4 {
        let a = v.amplitudes();
        StateVector4::new(std::array::from_fn(|i| {
            (0..4).map(|j| self.entries[i][j] * a[j]).sum()
        }))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let entries = std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.entries[i][k] * other.entries[k][j]).sum())
        });
        HermitianOperator4 { entries }
    }

    /// Largest |Mᵢⱼ − conj(Mⱼᵢ)|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    /// ⟨p|ℰ|p⟩, real for a Hermitian ℰ.
    pub fn expectation(&self, state: &StateVector4) -> f64 {
        crate::amplitude::inner_product(state, &self.apply(state)).re
    }
}

/// ℰ = Σₖ λₖ |vₖ⟩⟨vₖ| for an orthonormal family.
pub fn build_operator(
    family: &SpectralFamily,
    tolerances: &Tolerances,
) -> Result<HermitianOperator4> {
    family.check_orthonormal(tolerances)?;
    let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (v, &lambda) in family.eigenvectors.iter().zip(&family.outcomes) {
        let a = v.amplitudes();
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] += a[i] * a[j].conj() * lambda;
            }
        }
    }
    Ok(HermitianOperator4 { entries })
}
