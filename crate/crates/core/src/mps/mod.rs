//! Translation-invariant matrix product states generated by `d` matrices of size `k x k`.

mod gamma;
mod intersection;
mod martingale;
mod relations;
mod transfer;

pub use gamma::{gamma_map, gamma_matrix, ground_space, mps_overlap, word_products, Observable};
pub use intersection::{
    chain_kernel_frame, check_intersection_property, IntersectionReport, KERNEL_SV_TOL,
};
pub use martingale::{
    martingale_coefficient, martingale_coefficient_for_family, martingale_gap_bound,
    MartingaleBound,
};
pub use relations::{check_quadratic_relations, QuadraticRelation};
pub use transfer::{
    apply_transfer, apply_weighted_transfer, isometric_normal_form, sort_spectrum, spectrum_distance, transfer_operator,
    transfer_spectrum, TransferSpectrum,
};

use crate::error::{Error, Result};
use crate::numerics::{dagger, identity, is_finite, op_norm, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct MpsFamily {
    k: usize,
    matrices: Vec<CMatrix>,
}

impl MpsFamily {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let k = matrices
            .first()
            .ok_or_else(|| Error::validation("family needs at least one matrix"))?
            .nrows();
        if k == 0 {
            return Err(Error::validation("bond dimension must be positive"));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != (k, k) {
                return Err(Error::validation(format!("matrix {i} has shape {:?}, expected {k}x{k}", m.dim())));
            }
            if !is_finite(m) {
                return Err(Error::validation(format!("matrix {i} has non-finite entries")));
            }
        }
        Ok(MpsFamily { k, matrices })
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &CMatrix {
        &self.matrices[i]
    }

    /// `‖Σ v_i† v_i − 1‖`.
    pub fn isometry_residual(&self) -> Result<f64> {
        let sum = self
            .matrices
            .iter()
            .fold(CMatrix::zeros((self.k, self.k)), |acc, v| acc + dagger(v).dot(v));
        op_norm(&(sum - identity(self.k)))
    }

    /// Family for the physical basis change `e_a ↦ Σ_b u[b, a] e_b`, i.e. `v'_b = Σ_a u[b, a] v_a`.
    pub fn change_physical_basis(&self, u: &CMatrix) -> Result<Self> {
        if u.dim() != (self.d(), self.d()) {
            return Err(Error::validation("basis change has the wrong dimension"));
        }
        let matrices = (0..self.d())
            .map(|b| {
                self.matrices
                    .iter()
                    .enumerate()
                    .fold(CMatrix::zeros((self.k, self.k)), |acc, (a, v)| acc + v * u[(b, a)])
            })
            .collect();
        MpsFamily::new(matrices)
    }

    /// Largest entrywise deviation from another family of the same shape.
    pub fn max_deviation(&self, other: &MpsFamily) -> f64 {
        if self.d() != other.d() || self.k != other.k {
            return f64::INFINITY;
        }
        self.matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| crate::numerics::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }
}
