use super::intersection::{chain_kernel_frame, extend_right};
use super::{ground_space, MpsFamily};
use crate::error::{Error, Result};
use crate::interaction::NearestNeighborInteraction;
use crate::numerics::{dagger, op_norm, CMatrix, OrthonormalFrame, DEFAULT_RANK_TOL};
use ndarray::{s, Array2};
use ndarray_linalg::{JobSvd, SVDDC};
use serde::Serialize;

/// `g_{k,N}` with ground spaces taken as the kernels of the chain Hamiltonian.
pub fn martingale_coefficient(h: &NearestNeighborInteraction, k: usize, n: usize) -> Result<f64> {
    check_range(k, n)?;
    let d = h.d();
    low_rank_norm(
        d,
        &chain_kernel_frame(h, n)?,
        &chain_kernel_frame(h, n + 1)?,
        &chain_kernel_frame(h, k)?,
    )
}

/// `g_{k,N}` with ground spaces taken as the ranges of `Γ`.
pub fn martingale_coefficient_for_family(f: &MpsFamily, k: usize, n: usize) -> Result<f64> {
    check_range(k, n)?;
    low_rank_norm(f.d(), &ground_space(f, n)?, &ground_space(f, n + 1)?, &ground_space(f, k)?)
}

fn check_range(k: usize, n: usize) -> Result<()> {
    if k < 2 || n < k {
        return Err(Error::validation(format!("need N >= k >= 2, got k={k}, N={n}")));
    }
    Ok(())
}

/// `‖(1 ⊗ G_k)(G_N ⊗ 1 − G_{N+1})‖` restricted to `Ran(G_N ⊗ 1) ⊖ Ran(G_{N+1})`.
fn low_rank_norm(
    d: usize,
    g_n: &OrthonormalFrame,
    g_next: &OrthonormalFrame,
    g_k: &OrthonormalFrame,
) -> Result<f64> {
    let extended = extend_right(g_n.matrix(), d);
    if extended.ncols() == 0 {
        return Ok(0.0);
    }
    let overlap = dagger(&extended).dot(g_next.matrix());
    let complement = orthogonal_complement(&overlap)?;
    if complement.ncols() == 0 || g_k.rank() == 0 {
        return Ok(0.0);
    }
    let y = extended.dot(&complement);
    let dim = y.nrows();
    let tail = g_k.ambient_dim();
    let head = dim / tail;
    let fk = g_k.matrix().mapv(|z| z.conj());
    let mut z = Array2::zeros((head * g_k.rank(), y.ncols()));
    for c in 0..y.ncols() {
        let block = y.column(c).to_owned().into_shape_with_order((head, tail)).expect("dimension splits");
        let proj = block.dot(&fk);
        z.column_mut(c).assign(&proj.into_shape_with_order(head * g_k.rank()).expect("same size"));
    }
    Ok(op_norm(&z)?.min(1.0))
}

/// Orthonormal basis of the complement of the column space of `m`.
fn orthogonal_complement(m: &CMatrix) -> Result<CMatrix> {
    let rows = m.nrows();
    if m.ncols() == 0 {
        return Ok(Array2::eye(rows));
    }
    let (u, sv, _) = m.svddc(JobSvd::All)?;
    let u = u.expect("left singular vectors requested");
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&x| x > DEFAULT_RANK_TOL * top.max(1.0)).count();
    Ok(u.slice(s![.., rank..]).to_owned())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MartingaleBound {
    pub value: f64,
    /// False when `ε_k ≥ 1/√k`, where the bound is vacuous.
    pub admissible: bool,
}

/// `γ_N ≥ (γ_k / (k − 1)) (1 − ε_k √k)²`.
pub fn martingale_gap_bound(gamma_k: f64, k: usize, eps_k: f64) -> MartingaleBound {
    let root = (k as f64).sqrt();
    if k < 2 || eps_k * root >= 1.0 {
        return MartingaleBound { value: 0.0, admissible: false };
    }
    MartingaleBound { value: gamma_k / (k as f64 - 1.0) * (1.0 - eps_k * root).powi(2), admissible: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, kron, projector_onto, real_matrix};

    fn dense_oracle(h: &NearestNeighborInteraction, k: usize, n: usize) -> f64 {
        let d = h.d();
        let p = |m: usize| projector_onto(&chain_kernel_frame(h, m).unwrap());
        let gn = kron(&p(n), &identity(d)).unwrap();
        let gk = kron(&identity(d.pow((n + 1 - k) as u32)), &p(k)).unwrap();
        op_norm(&gk.dot(&(gn - p(n + 1)))).unwrap()
    }

    fn pvbs_like() -> MpsFamily {
        MpsFamily::new(vec![
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.5]]),
            real_matrix(&[&[0.0, 0.75f64.sqrt()], &[0.0, 0.0]]),
        ])
        .unwrap()
    }

    fn parent(f: &MpsFamily) -> NearestNeighborInteraction {
        let g2 = ground_space(f, 2).unwrap();
        let perp = OrthonormalFrame::new(
            {
                let m = projector_onto(&g2);
                let q = identity(f.d() * f.d()) - m;
                crate::numerics::orthonormal_frame_of_span(&q, 1e-10).unwrap().into_matrix()
            },
        )
        .unwrap();
        NearestNeighborInteraction::from_frame(f.d(), &perp, "parent").unwrap()
    }

    #[test]
    fn trivial_family_gives_zero() {
        let f = MpsFamily::new(vec![real_matrix(&[&[1.0]])]).unwrap();
        assert_eq!(martingale_coefficient_for_family(&f, 2, 4).unwrap(), 0.0);
    }

    #[test]
    fn low_rank_matches_dense_projectors() {
        let f = pvbs_like();
        let h = parent(&f);
        for (k, n) in [(2, 2), (2, 4), (3, 4), (4, 5)] {
            let fast = martingale_coefficient(&h, k, n).unwrap();
            let dense = dense_oracle(&h, k, n);
            assert!((fast - dense).abs() < 1e-9, "k={k} n={n}: {fast} vs {dense}");
            let fam = martingale_coefficient_for_family(&f, k, n).unwrap();
            assert!((fam - dense).abs() < 1e-9);
        }
    }

    #[test]
    fn gap_bound_plug_in() {
        assert!((martingale_gap_bound(1.0, 4, 0.0).value - 1.0 / 3.0).abs() < 1e-15);
        let edge = martingale_gap_bound(1.0, 4, 0.5);
        assert_eq!(edge.value, 0.0);
        assert!(!edge.admissible);
        assert!(martingale_coefficient_for_family(&pvbs_like(), 3, 2).is_err());
    }
}
