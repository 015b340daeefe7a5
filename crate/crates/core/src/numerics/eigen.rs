use super::{is_finite, is_hermitian, CMatrix, CVector, OrthonormalFrame};
use crate::error::{Error, Result};
use ndarray::{Array1, ShapeBuilder};
use ndarray_linalg::{Eig, Eigh, EigValsh, UPLO};

/// Relative Hermiticity tolerance accepted by the dense solvers.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Array1<f64>,
    pub vectors: OrthonormalFrame,
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !is_finite(h) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    if !is_hermitian(h, HERMITIAN_TOL) {
        return Err(Error::validation("matrix is not Hermitian"));
    }
    Ok(())
}

pub fn hermitian_eigensystem(h: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let (values, vectors) = eigh_column_major(h)?;
    Ok(HermitianEigen {
        values,
        vectors: OrthonormalFrame::from_columns_unchecked(vectors),
    })
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Array1<f64>> {
    check_hermitian(h)?;
    Ok(h.eigvalsh(UPLO::Lower)?)
}

/// The LAPACK wrapper returns conjugated eigenvectors for row-major complex input,
/// so the solve always runs on a column-major copy.
pub(crate) fn eigh_column_major(h: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    let mut f = CMatrix::zeros(h.dim().f());
    f.assign(h);
    Ok(f.eigh(UPLO::Lower)?)
}

/// Eigenvalues and right eigenvectors (as columns) of a general square matrix.
pub fn general_eigen(a: &CMatrix) -> Result<(CVector, CMatrix)> {
    if !is_finite(a) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    Ok(a.eig()?)
}
