use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eigensystem, is_finite, is_hermitian, max_abs, projector_onto, CMatrix,
    OrthonormalFrame,
};
use ndarray::s;

const PROJECTOR_TOL: f64 = 1e-10;

/// A two-site orthogonal projector `h` acting on `C^d ⊗ C^d`.
#[derive(Debug, Clone)]
pub struct NearestNeighborInteraction {
    d: usize,
    matrix: CMatrix,
    model: String,
}

impl NearestNeighborInteraction {
    pub fn new(d: usize, matrix: CMatrix, model: impl Into<String>) -> Result<Self> {
        if d == 0 || matrix.dim() != (d * d, d * d) {
            return Err(Error::validation(format!(
                "interaction must be {0}x{0}, got {1:?}",
                d * d,
                matrix.dim()
            )));
        }
        if !is_finite(&matrix) || !is_hermitian(&matrix, 1e-12) {
            return Err(Error::validation("interaction is not a finite Hermitian matrix"));
        }
        let defect = max_abs(&(matrix.dot(&matrix) - &matrix));
        if defect > PROJECTOR_TOL {
            return Err(Error::validation(format!("interaction is not idempotent (defect {defect:e})")));
        }
        Ok(NearestNeighborInteraction { d, matrix, model: model.into() })
    }

    /// Projector onto the span of `frame`.
    pub fn from_frame(d: usize, frame: &OrthonormalFrame, model: impl Into<String>) -> Result<Self> {
        Self::new(d, projector_onto(frame), model)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn rank(&self) -> usize {
        crate::numerics::trace(&self.matrix).re.round() as usize
    }

    /// Orthonormal basis of the two-site kernel.
    pub fn kernel_frame(&self) -> Result<OrthonormalFrame> {
        let eig = hermitian_eigensystem(&self.matrix)?;
        let zeros = eig.values.iter().take_while(|&&x| x < 0.5).count();
        OrthonormalFrame::new(eig.vectors.matrix().slice(s![.., ..zeros]).to_owned())
    }

    /// True when every nonzero matrix element connects two-site states with equal total charge.
    pub fn conserves(&self, charges: &[Vec<i32>]) -> bool {
        let d = self.d;
        self.matrix.indexed_iter().all(|((row, col), z)| {
            if z.norm() <= 1e-13 {
                return true;
            }
            let (a, b) = (row / d, row % d);
            let (c, e) = (col / d, col % d);
            charges[a]
                .iter()
                .zip(&charges[b])
                .zip(charges[c].iter().zip(&charges[e]))
                .all(|((x, y), (u, v))| x + y == u + v)
        })
    }

    /// Conjugation `(U ⊗ U) h (U ⊗ U)†` by a one-site unitary.
    pub fn conjugated(&self, u: &CMatrix, model: impl Into<String>) -> Result<Self> {
        let uu = crate::numerics::kron(u, u)?;
        let m = uu.dot(&self.matrix).dot(&crate::numerics::dagger(&uu));
        Self::new(self.d, m, model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{real_matrix, OrthonormalFrame};

    #[test]
    fn rejects_non_projector() {
        let m = real_matrix(&[&[2.0, 0.0, 0.0, 0.0], &[0.0; 4], &[0.0; 4], &[0.0; 4]]);
        assert!(NearestNeighborInteraction::new(2, m, "x").is_err());
    }

    #[test]
    fn kernel_of_rank_one_projector() {
        let h = NearestNeighborInteraction::from_frame(2, &OrthonormalFrame::standard_basis(4), "full")
            .unwrap();
        assert_eq!(h.kernel_frame().unwrap().rank(), 0);
        assert_eq!(h.rank(), 4);
    }
}
