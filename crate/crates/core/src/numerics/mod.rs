//! Dense complex linear algebra shared by every model.

mod eigen;
mod fit;
mod frame;
mod krylov;

pub use fit::exponential_rate;
pub use eigen::{general_eigen, hermitian_eigensystem, hermitian_eigenvalues, HermitianEigen};
pub use frame::{
    orthonormal_frame_of_span, projector_onto, subspace_distance, OrthonormalFrame,
    DEFAULT_RANK_TOL,
};
pub use krylov::{krylov_lowest_eigenpairs, krylov_lowest_eigs, KrylovOptions, KrylovResult};

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{JobSvd, SVDDC};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

/// Largest number of entries a dense matrix built here may have.
pub const MAX_DENSE_ENTRIES: usize = 1 << 27;

/// Largest Hilbert-space dimension for state vectors.
pub const MAX_STATE_DIM: usize = 1 << 22;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn from_rows(rows: &[&[C64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Array2::from_shape_fn((n, m), |(i, j)| rows[i][j])
}

pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Array2::from_shape_fn((n, m), |(i, j)| real(rows[i][j]))
}

pub fn diag(entries: &[C64]) -> CMatrix {
    let mut out = Array2::zeros((entries.len(), entries.len()));
    for (i, &z) in entries.iter().enumerate() {
        out[(i, i)] = z;
    }
    out
}

/// Checked product of dimensions against [`MAX_STATE_DIM`].
pub fn checked_power(base: usize, exp: usize) -> Result<usize> {
    let requested = (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX);
    if requested > MAX_STATE_DIM as u128 {
        return Err(Error::Size { requested, limit: MAX_STATE_DIM });
    }
    Ok(requested as usize)
}

/// Kronecker product with the first factor as the most significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let rows = (ar as u128) * (br as u128);
    let cols = (ac as u128) * (bc as u128);
    if rows * cols > MAX_DENSE_ENTRIES as u128 {
        return Err(Error::Size { requested: rows * cols, limit: MAX_DENSE_ENTRIES });
    }
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    Ok(out)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> Result<CMatrix> {
    factors
        .into_iter()
        .try_fold(identity(1), |acc, f| kron(&acc, f))
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let (_, s, _) = a.svddc(JobSvd::None)?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `max|A - A†| <= rel_tol * max|A|`.
pub fn is_hermitian(a: &CMatrix, rel_tol: f64) -> bool {
    let (n, m) = a.dim();
    if n != m {
        return false;
    }
    let scale = max_abs(a);
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev <= rel_tol * scale
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) + b.dot(a)
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diag().sum()
}
