use super::{dagger, CMatrix, C64};
use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView1, Axis};
use ndarray_linalg::{JobSvd, SVDDC};

/// Singular values below this fraction of the largest are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const FRAME_TOL: f64 = 1e-12;

/// Orthonormal vectors stored as the columns of an `ambient x rank` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    columns: CMatrix,
}

impl OrthonormalFrame {
    pub fn empty(ambient: usize) -> Self {
        OrthonormalFrame { columns: Array2::zeros((ambient, 0)) }
    }

    pub fn standard_basis(ambient: usize) -> Self {
        OrthonormalFrame { columns: Array2::eye(ambient) }
    }

    /// Validates orthonormality of the given columns.
    pub fn new(columns: CMatrix) -> Result<Self> {
        let frame = OrthonormalFrame { columns };
        let defect = frame.orthonormality_defect();
        if defect > FRAME_TOL {
            return Err(Error::validation(format!("columns are not orthonormal (defect {defect:e})")));
        }
        Ok(frame)
    }

    pub(crate) fn from_columns_unchecked(columns: CMatrix) -> Self {
        OrthonormalFrame { columns }
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn rank(&self) -> usize {
        self.columns.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.columns
    }

    pub fn into_matrix(self) -> CMatrix {
        self.columns
    }

    pub fn vector(&self, i: usize) -> ArrayView1<'_, C64> {
        self.columns.column(i)
    }

    pub fn vectors(&self) -> impl Iterator<Item = ArrayView1<'_, C64>> {
        self.columns.axis_iter(Axis(1))
    }

    /// `max |<u_i, u_j> - delta_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = dagger(&self.columns).dot(&self.columns);
        gram.indexed_iter()
            .map(|((i, j), z)| (z - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
            .fold(0.0, f64::max)
    }

    /// Component of `v` orthogonal to the frame.
    pub fn residual(&self, v: &CMatrix) -> CMatrix {
        let coeff = dagger(&self.columns).dot(v);
        v - &self.columns.dot(&coeff)
    }
}

/// Orthonormal frame for the span of the columns of `vectors`.
pub fn orthonormal_frame_of_span(vectors: &CMatrix, rank_tol: f64) -> Result<OrthonormalFrame> {
    let (ambient, count) = vectors.dim();
    if count == 0 || ambient == 0 {
        return Ok(OrthonormalFrame::empty(ambient));
    }
    if !super::is_finite(vectors) {
        return Err(Error::validation("vectors have non-finite entries"));
    }
    let (u, s, _) = vectors.svddc(JobSvd::Some)?;
    let u = u.expect("thin left singular vectors requested");
    let top = s.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(OrthonormalFrame::empty(ambient));
    }
    let rank = s.iter().filter(|&&x| x >= rank_tol * top).count();
    Ok(OrthonormalFrame { columns: u.slice(ndarray::s![.., ..rank]).to_owned() })
}

pub fn projector_onto(frame: &OrthonormalFrame) -> CMatrix {
    frame.columns.dot(&dagger(&frame.columns))
}

/// Operator norm of the difference of the two orthogonal projectors.
///
/// Equal ranks give the sine of the largest principal angle, computed from the
/// residual of one frame against the other to keep full precision near zero.
pub fn subspace_distance(a: &OrthonormalFrame, b: &OrthonormalFrame) -> Result<f64> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::validation(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    if a.rank() != b.rank() {
        return Ok(1.0);
    }
    if a.rank() == 0 {
        return Ok(0.0);
    }
    let r1 = super::op_norm(&a.residual(&b.columns))?;
    let r2 = super::op_norm(&b.residual(&a.columns))?;
    Ok(r1.max(r2).min(1.0))
}
