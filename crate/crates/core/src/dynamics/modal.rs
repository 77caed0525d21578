use std::f64::consts::PI;

use nalgebra::SymmetricEigen;

use super::model::{Matrix6, SystemMatrices};
use crate::error::{Error, Result};

/// One undamped normal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMode {
    pub frequency_hz: f64,
    /// Mode shape in physical coordinates (z_k, φ_k, z_1, φ_1, z_2, φ_2),
    /// mass-normalized.
    pub shape: [f64; 6],
    /// Share of the modal kinetic energy carried by the carriage body.
    pub carriage_energy_fraction: f64,
}

impl NormalMode {
    pub fn is_carriage_dominated(&self) -> bool {
        self.carriage_energy_fraction > 0.5
    }
}

/// Natural frequencies [Hz] of the undamped system, ascending.
pub fn undamped_frequencies(sys: &SystemMatrices) -> Result<[f64; 6]> {
    let modes = normal_modes(sys)?;
    Ok(std::array::from_fn(|i| modes[i].frequency_hz))
}

/// Solves `K φ = ω² M φ` through the symmetric reduction
/// `M^{-1/2} K M^{-1/2}`. Modes are returned in ascending frequency.
pub fn normal_modes(sys: &SystemMatrices) -> Result<Vec<NormalMode>> {
    if sys.mass.iter().any(|&m| !m.is_finite() || m <= 0.0) {
        return Err(Error::Analysis("mass matrix must be positive".into()));
    }
    if sys.stiffness.iter().any(|v| !v.is_finite()) {
        return Err(Error::Analysis("stiffness matrix is not finite".into()));
    }
    if sys.stiffness.cholesky().is_none() {
        return Err(Error::Analysis("stiffness matrix is not positive definite".into()));
    }

    let inv_sqrt_m = sys.mass.map(|m| 1.0 / m.sqrt());
    let reduced = Matrix6::from_fn(|i, j| sys.stiffness[(i, j)] * inv_sqrt_m[i] * inv_sqrt_m[j]);
    // Symmetrize away rounding so the solver sees an exactly symmetric input.
    let reduced = (reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);

    let mut modes: Vec<NormalMode> = (0..6)
        .map(|k| {
            let lambda = eig.eigenvalues[k];
            let v = eig.eigenvectors.column(k);
            let shape: [f64; 6] = std::array::from_fn(|i| v[i] * inv_sqrt_m[i]);
            // With unit-norm v, the kinetic share of coordinate i is v_i².
            let carriage = v[0] * v[0] + v[1] * v[1];
            let total: f64 = v.iter().map(|x| x * x).sum();
            NormalMode {
                frequency_hz: lambda.max(0.0).sqrt() / (2.0 * PI),
                shape,
                carriage_energy_fraction: carriage / total,
            }
        })
        .collect();
    if modes.iter().any(|m| !m.frequency_hz.is_finite()) {
        return Err(Error::Analysis("eigen solver produced non-finite values".into()));
    }
    modes.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    Ok(modes)
}
