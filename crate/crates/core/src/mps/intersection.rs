use super::{ground_space, MpsFamily};
use crate::error::Result;
use crate::interaction::NearestNeighborInteraction;
use crate::numerics::{checked_power, subspace_distance, CMatrix, OrthonormalFrame};
use ndarray::Array2;
use ndarray_linalg::{JobSvd, SVDDC};
use serde::Serialize;

/// Singular values of `h` restricted to a candidate space below this are kernel directions.
pub const KERNEL_SV_TOL: f64 = 1e-9;

const INTERSECTION_TOL: f64 = 1e-8;

/// Extends each column `f` of `frame` to the columns `f ⊗ e_i`.
pub(crate) fn extend_right(frame: &CMatrix, d: usize) -> CMatrix {
    let (rows, cols) = frame.dim();
    let mut out = Array2::zeros((rows * d, cols * d));
    for c in 0..cols {
        for i in 0..d {
            for r in 0..rows {
                out[(r * d + i, c * d + i)] = frame[(r, c)];
            }
        }
    }
    out
}

/// Applies `1 ⊗ h` (h on the last two sites) to every column.
fn apply_last_bond(h: &CMatrix, cols: &CMatrix) -> CMatrix {
    let d2 = h.nrows();
    let (rows, count) = cols.dim();
    let blocks = rows / d2;
    let mut out = Array2::zeros((rows, count));
    for c in 0..count {
        let x = cols.column(c).to_owned().into_shape_with_order((blocks, d2)).expect("row count is a multiple");
        let y = x.dot(&h.t());
        out.column_mut(c).assign(&y.into_shape_with_order(rows).expect("same size"));
    }
    out
}

/// Orthonormal frame of `∩_x ker h_{x,x+1}` on `n` sites, built one site at a time.
pub fn chain_kernel_frame(h: &NearestNeighborInteraction, n: usize) -> Result<OrthonormalFrame> {
    let d = h.d();
    checked_power(d, n)?;
    if n < 2 {
        return Ok(OrthonormalFrame::standard_basis(d.pow(n as u32)));
    }
    let mut frame = h.kernel_frame()?.into_matrix();
    for _ in 2..n {
        if frame.ncols() == 0 {
            return Ok(OrthonormalFrame::empty(frame.nrows() * d));
        }
        let candidates = extend_right(&frame, d);
        let image = apply_last_bond(h.matrix(), &candidates);
        let (rows, cols) = image.dim();
        let (_, sv, vt) = if rows >= cols { image.svddc(JobSvd::Some)? } else { image.svddc(JobSvd::All)? };
        let vt = vt.expect("right singular vectors requested");
        let mut kernel_rows = Vec::new();
        for r in 0..vt.nrows() {
            let sigma = sv.get(r).copied().unwrap_or(0.0);
            if sigma <= KERNEL_SV_TOL {
                kernel_rows.push(r);
            }
        }
        let mut coeff = Array2::zeros((cols, kernel_rows.len()));
        for (c, &r) in kernel_rows.iter().enumerate() {
            coeff.column_mut(c).assign(&vt.row(r).mapv(|z| z.conj()));
        }
        frame = candidates.dot(&coeff);
    }
    OrthonormalFrame::new(frame)
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    pub holds: bool,
    /// `‖P(Ran Γ_N) − P(∩ ker h)‖`.
    pub distance: f64,
    pub mps_dim: usize,
    pub kernel_dim: usize,
    /// Distance between `ker h` and `Ran Γ_2`.
    pub two_site_distance: f64,
    pub diagnostic: Option<String>,
}

pub fn check_intersection_property(h: &NearestNeighborInteraction, f: &MpsFamily, n: usize) -> Result<IntersectionReport> {
    let two_site = subspace_distance(&h.kernel_frame()?, &ground_space(f, 2)?)?;
    let mps = ground_space(f, n)?;
    let kernel = chain_kernel_frame(h, n)?;
    let distance = subspace_distance(&mps, &kernel)?;
    let diagnostic = if two_site > INTERSECTION_TOL {
        Some(format!("ker h differs from Ran Γ_2 by {two_site:e}"))
    } else if mps.rank() != kernel.rank() {
        Some(format!("Ran Γ_{n} has dimension {} but the chain kernel has {}", mps.rank(), kernel.rank()))
    } else {
        None
    };
    Ok(IntersectionReport {
        holds: diagnostic.is_none() && distance <= INTERSECTION_TOL,
        distance,
        mps_dim: mps.rank(),
        kernel_dim: kernel.rank(),
        two_site_distance: two_site,
        diagnostic,
    })
}
