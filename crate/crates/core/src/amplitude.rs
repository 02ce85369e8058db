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

//! Small fixed-dimension complex vectors: C² factors, C⁴ = C² ⊗ C² states,
//! inner products and Born probabilities.
//!
//! Amplitudes are stored in rectangular form. The canonical basis of C⁴ is
//! identified with (1,0)⊗(1,0), (1,0)⊗(0,1), (0,1)⊗(1,0), (0,1)⊗(0,1), in
//! that order.

use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::PROBABILITY_CLAMP;

/// One complex amplitude. Serialized as `[re, im]`.
pub type ComplexAmplitude = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector2(pub [Complex64; 2]);

impl StateVector2 {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        StateVector2([a, b])
    }

    pub fn real(a: f64, b: f64) -> Self {
        StateVector2([Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector4(pub [Complex64; 4]);

impl StateVector4 {
    pub const fn new(amplitudes: [Complex64; 4]) -> Self {
        StateVector4(amplitudes)
    }

    pub fn real(v: [f64; 4]) -> Self {
        StateVector4(v.map(|x| Complex64::new(x, 0.0)))
    }

    /// Canonical basis vector `e_k`, `k` in 0..4.
    pub fn basis(k: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[k] = ONE;
        StateVector4(amps)
    }

    /// Builds a vector from moduli and phases (radians): aₖ·e^{iθₖ}.
    pub fn from_polar(moduli: [f64; 4], phases: [f64; 4]) -> Self {
        let mut amps = [ZERO; 4];
        for k in 0..4 {
            amps[k] = Complex64::from_polar(moduli[k], phases[k]);
        }
        StateVector4(amps)
    }

    /// Moduli and phases (radians, in (−π, π]) of the four components.
    pub fn to_polar(&self) -> ([f64; 4], [f64; 4]) {
        (self.0.map(|z| z.norm()), self.0.map(|z| z.arg()))
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// |‖v‖² − 1|.
    pub fn normalization_residual(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let norm_sq = self.norm_sqr();
        if (norm_sq - 1.0).abs() <= tolerance {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_sq, tolerance })
        }
    }

    /// Returns `v / ‖v‖`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        StateVector4(self.0.map(|z| z * factor))
    }

    /// Multiplies by the global phase e^{iθ}, θ in degrees.
    pub fn with_phase_deg(&self, theta_deg: f64) -> Self {
        self.scale(Complex64::from_polar(1.0, theta_deg.to_radians()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut amps = self.0;
        for (a, b) in amps.iter_mut().zip(other.0.iter()) {
            *a -= b;
        }
        StateVector4(amps)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for StateVector4 {
    type Output = Complex64;

    fn index(&self, k: usize) -> &Complex64 {
        &self.0[k]
    }
}

/// ⟨u|v⟩ = Σ conj(uₖ)·vₖ, conjugate-linear in the first argument.
pub fn inner_product(u: &StateVector4, v: &StateVector4) -> Complex64 {
    u.0.iter().zip(v.0.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// x ⊗ y with component order (x₁y₁, x₁y₂, x₂y₁, x₂y₂).
pub fn tensor_product(x: &StateVector2, y: &StateVector2) -> StateVector4 {
    let [x1, x2] = x.0;
    let [y1, y2] = y.0;
    StateVector4([x1 * y1, x1 * y2, x2 * y1, x2 * y2])
}

/// |⟨eigvec|state⟩|² with no normalization checks and no clamping.
pub fn overlap_sqr(eigvec: &StateVector4, state: &StateVector4) -> f64 {
    inner_product(eigvec, state).norm_sqr()
}

/// Born probability |⟨eigvec|state⟩|².
///
/// Both vectors must be normalized within `norm_tolerance`. Results within
/// [`PROBABILITY_CLAMP`] of [0, 1] are clamped; anything further out is an
/// error.
pub fn born_probability(
    eigvec: &StateVector4,
    state: &StateVector4,
    norm_tolerance: f64,
) -> Result<f64> {
    eigvec.check_normalized(norm_tolerance)?;
    state.check_normalized(norm_tolerance)?;
    clamp_probability(overlap_sqr(eigvec, state))
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if !(-PROBABILITY_CLAMP..=1.0 + PROBABILITY_CLAMP).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}
