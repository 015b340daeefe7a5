use super::PvbsParams;
use crate::chain::{ChainOperator, Sectors};
use crate::error::{Error, Result};
use crate::interaction::NearestNeighborInteraction;
use crate::mps::{gamma_map, mps_overlap, MpsFamily, Observable, QuadraticRelation};
use crate::numerics::{diag, kron_all, orthonormal_frame_of_span, real, real_matrix, CMatrix, CVector, C64, DEFAULT_RANK_TOL};
use ndarray::Array2;
use serde::Serialize;

fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Projector onto `span{φ^{ij} : 0 ≤ i < j ≤ n} ⊕ span{e_i ⊗ e_i : 1 ≤ i ≤ n}`.
pub fn pvbs_interaction(p: &PvbsParams) -> Result<NearestNeighborInteraction> {
    let d = p.n() + 1;
    let mut vectors = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let mut v = vec![real(0.0); d * d];
            v[i * d + j] = real(1.0);
            v[j * d + i] = -phase(p.theta(i, j)) * (p.lambda(j) / p.lambda(i));
            vectors.push(v);
        }
    }
    for i in 1..d {
        let mut v = vec![real(0.0); d * d];
        v[i * d + i] = real(1.0);
        vectors.push(v);
    }
    let m = Array2::from_shape_fn((d * d, vectors.len()), |(r, k)| vectors[k][r]);
    let frame = orthonormal_frame_of_span(&m, DEFAULT_RANK_TOL)?;
    NearestNeighborInteraction::from_frame(d, &frame, format!("pvbs(n={})", p.n()))
}

fn sigma_plus() -> CMatrix {
    real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]])
}

fn sigma_minus() -> CMatrix {
    real_matrix(&[&[0.0, 0.0], &[1.0, 0.0]])
}

/// `P_ij d_j = diag(e^{iθ_ij/2}, λ_j)`.
fn twisted_weight(p: &PvbsParams, i: usize, j: usize) -> CMatrix {
    diag(&[phase(p.theta(i, j) / 2.0), real(p.lambda(j))])
}

/// Tensor-product representation of dimension `2^n`.
pub fn pvbs_mps(p: &PvbsParams) -> Result<MpsFamily> {
    let n = p.n();
    let v0_factors: Vec<CMatrix> = (1..=n).map(|i| diag(&[phase(p.theta(0, i)), real(p.lambda(i))])).collect();
    let mut matrices = vec![kron_all(&v0_factors)?];
    for i in 1..=n {
        let factors: Vec<CMatrix> = (1..=n)
            .map(|j| if j == i { sigma_plus() } else { twisted_weight(p, i, j) })
            .collect();
        matrices.push(kron_all(&factors)?);
    }
    MpsFamily::new(matrices)
}

/// `v_i v_j = e^{iθ_ij} λ_i/λ_j v_j v_i` for `i ≠ j` and `v_i² = 0` for `i ≥ 1`.
pub fn pvbs_relations(p: &PvbsParams) -> Vec<QuadraticRelation> {
    let d = p.n() + 1;
    let mut rels = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let coeff = phase(p.theta(i, j)) * (p.lambda(i) / p.lambda(j));
            rels.push(
                QuadraticRelation::new(format!("v{i} v{j} = c v{j} v{i}"))
                    .lhs(real(1.0), i, j)
                    .rhs(coeff, j, i),
            );
        }
    }
    for i in 1..d {
        rels.push(QuadraticRelation::new(format!("v{i}^2 = 0")).lhs(real(1.0), i, i));
    }
    rels
}

/// `B^S`: `σ⁻` on the factors in `S`, `P = σ⁺σ⁻` elsewhere.
pub fn boundary_matrix(p: &PvbsParams, subset: &[usize]) -> Result<CMatrix> {
    if let Some(&bad) = subset.iter().find(|&&s| s == 0 || s > p.n()) {
        return Err(Error::validation(format!("particle type {bad} is not in 1..={}", p.n())));
    }
    let proj = real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let factors: Vec<CMatrix> = (1..=p.n())
        .map(|j| if subset.contains(&j) { sigma_minus() } else { proj.clone() })
        .collect();
    kron_all(&factors)
}

/// The ground vector with one particle of each type in `subset` on sites `a..=b`.
///
/// Scaled so a single particle of type `i` at position `x` has amplitude `(e^{iθ_i0} λ_i)^{x−a+1}`.
pub fn pvbs_ground_vector(p: &PvbsParams, a: i64, b: i64, subset: &[usize]) -> Result<CVector> {
    if b < a {
        return Err(Error::validation("empty interval"));
    }
    let n_sites = (b - a + 1) as usize;
    let boundary = boundary_matrix(p, subset)?;
    let f = pvbs_mps(p)?;
    let scale: C64 = subset
        .iter()
        .map(|&s| phase(-p.theta(0, s) * n_sites as f64) * p.lambda(s))
        .product();
    Ok(gamma_map(&f, n_sites, &boundary)? * scale)
}

/// `⟨ψ^S, A ψ^S⟩ / ⟨ψ^S, ψ^S⟩` for an observable on consecutive sites, without building `ψ^S`.
pub fn ground_vector_expectation(p: &PvbsParams, subset: &[usize], n_sites: usize, first_site: usize, op: &CMatrix) -> Result<f64> {
    let f = pvbs_mps(p)?;
    let b = boundary_matrix(p, subset)?;
    let num = mps_overlap(&f, &b, &b, n_sites, &Observable::Local { first_site, op: op.clone() })?;
    let den = mps_overlap(&f, &b, &b, n_sites, &Observable::Identity)?;
    Ok((num / den).re)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSpectrum {
    /// All `4^n` values.
    pub values: Vec<C64>,
    /// `Π_{λ_i > 1} λ_i²`.
    pub top: f64,
    pub top_simple: bool,
}

/// `{Π_j λ_j^{n_j} e^{±i δ_{n_j,1} θ_0j} : n_j ∈ {0, 1, 2}}`.
pub fn pvbs_transfer_spectrum_closed_form(p: &PvbsParams) -> ClosedFormSpectrum {
    let mut values = vec![real(1.0)];
    for j in 1..=p.n() {
        let l = p.lambda(j);
        let th = p.theta(0, j);
        let factors = [real(1.0), phase(th) * l, phase(-th) * l, real(l * l)];
        values = values.iter().flat_map(|v| factors.iter().map(move |f| v * f)).collect();
    }
    let top: f64 = p.lambdas().iter().filter(|&&l| l > 1.0).map(|l| l * l).product();
    let top_simple = values.iter().filter(|v| (*v - real(top)).norm() <= 1e-12 * top).count() == 1;
    ClosedFormSpectrum { values, top, top_simple }
}

/// One-site charges counting particles of each type.
pub fn particle_charges(p: &PvbsParams) -> Vec<Vec<i32>> {
    let n = p.n();
    (0..=n)
        .map(|i| (1..=n).map(|t| i32::from(t == i)).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    pub sectors: Sectors,
    /// Largest Hamiltonian matrix element between different sectors.
    pub off_block_residual: f64,
}

pub fn sector_decomposition(p: &PvbsParams, n_sites: usize) -> Result<SectorDecomposition> {
    let op = ChainOperator::new(&pvbs_interaction(p)?, n_sites)?;
    let sectors = Sectors::from_charges(p.n() + 1, n_sites, &particle_charges(p));
    let off_block_residual = op.off_block_residual(&sectors);
    Ok(SectorDecomposition { sectors, off_block_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{check_quadratic_relations, ground_space, spectrum_distance, transfer_operator};
    use crate::numerics::{general_eigen, inner, subspace_distance};

    fn params(lambdas: &[f64], thetas: &[(usize, usize, f64)]) -> PvbsParams {
        thetas
            .iter()
            .fold(PvbsParams::new(lambdas.to_vec()).unwrap(), |p, &(i, j, t)| p.with_theta(i, j, t).unwrap())
    }

    #[test]
    fn single_type_matrices() {
        let p = params(&[0.5], &[(0, 1, 0.3)]);
        let f = pvbs_mps(&p).unwrap();
        assert!((f.matrix(0)[(0, 0)] - phase(0.3)).norm() < 1e-15);
        assert!((f.matrix(0)[(1, 1)] - real(0.5)).norm() < 1e-15);
        assert_eq!(f.matrix(1), &sigma_plus());
    }

    #[test]
    fn no_types_is_the_scalar_family() {
        let f = pvbs_mps(&PvbsParams::new(vec![]).unwrap()).unwrap();
        assert_eq!((f.d(), f.k()), (1, 1));
        assert_eq!(f.matrix(0)[(0, 0)], real(1.0));
    }

    #[test]
    fn interaction_rank_and_kernel() {
        let cases = [
            params(&[0.5], &[]),
            params(&[0.5, 2.0], &[]),
            params(&[0.3, 1.7, 0.8], &[(0, 1, 0.4), (1, 3, -1.2), (0, 2, 2.0)]),
        ];
        for p in &cases {
            let n = p.n();
            let h = pvbs_interaction(p).unwrap();
            assert_eq!(h.rank(), n + n * (n + 1) / 2);
            let dist = subspace_distance(&h.kernel_frame().unwrap(), &ground_space(&pvbs_mps(p).unwrap(), 2).unwrap()).unwrap();
            assert!(dist <= 1e-10, "n={n}: {dist}");
            assert_eq!(h.kernel_frame().unwrap().rank(), (n + 1) * (n + 1) - h.rank());
        }
    }

    #[test]
    fn commutation_relations_hold() {
        let p = params(&[0.3, 1.7, 0.8], &[(0, 1, 0.4), (1, 3, -1.2), (0, 2, 2.0), (2, 3, 0.1)]);
        let res = check_quadratic_relations(&pvbs_mps(&p).unwrap(), &pvbs_relations(&p)).unwrap();
        assert!(res <= 1e-12, "{res}");
    }

    #[test]
    fn closed_form_spectra() {
        let cf = pvbs_transfer_spectrum_closed_form(&params(&[0.5], &[]));
        assert!(spectrum_distance(&cf.values, &[real(1.0), real(0.5), real(0.5), real(0.25)]) < 1e-15);
        assert!(cf.top_simple && cf.top == 1.0);
        let p = params(&[2.0], &[(0, 1, std::f64::consts::FRAC_PI_3)]);
        let cf = pvbs_transfer_spectrum_closed_form(&p);
        let expected = [real(1.0), phase(std::f64::consts::FRAC_PI_3) * 2.0, phase(-std::f64::consts::FRAC_PI_3) * 2.0, real(4.0)];
        assert!(spectrum_distance(&cf.values, &expected) < 1e-14);
        let p = params(&[0.5, 2.0], &[]);
        let cf = pvbs_transfer_spectrum_closed_form(&p);
        assert_eq!(cf.values.len(), 16);
        assert!(cf.top == 4.0 && cf.top_simple);
        let (num, _) = general_eigen(&transfer_operator(&pvbs_mps(&p).unwrap())).unwrap();
        assert!(spectrum_distance(&cf.values, num.as_slice().unwrap()) < 1e-9);
    }

    #[test]
    fn ground_vectors() {
        let p = params(&[0.5], &[]);
        let omega = pvbs_ground_vector(&p, 1, 3, &[]).unwrap();
        assert!((crate::numerics::norm(omega.as_slice().unwrap()) - 1.0).abs() < 1e-15);
        assert!((omega[0] - real(1.0)).norm() < 1e-15);
        let psi = pvbs_ground_vector(&p, 1, 3, &[1]).unwrap();
        // e_1 at site x has index 2^{3−x}.
        for (x, amp) in [(1, 0.5), (2, 0.25), (3, 0.125)] {
            assert!((psi[1 << (3 - x)] - real(amp)).norm() < 1e-15);
        }
        assert!(pvbs_ground_vector(&p, 1, 3, &[2]).is_err());
    }

    #[test]
    fn single_particle_phase_convention() {
        let p = params(&[0.7], &[(0, 1, 0.9)]);
        let psi = pvbs_ground_vector(&p, 1, 4, &[1]).unwrap();
        for x in 1..=4 {
            let expected = (phase(-0.9) * 0.7).powi(x);
            assert!((psi[1 << (4 - x)] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn two_particle_amplitudes_and_orthogonality() {
        let p = params(&[0.5, 3.0], &[(0, 1, 0.2), (1, 2, 0.7)]);
        let n = 4;
        let psi = pvbs_ground_vector(&p, 1, n as i64, &[1, 2]).unwrap();
        for x1 in 1..=n {
            for x2 in 1..=n {
                if x1 == x2 {
                    continue;
                }
                let idx = 1 * 3usize.pow((n - x1) as u32) + 2 * 3usize.pow((n - x2) as u32);
                let expected = 0.5f64.powi(2 * x1) * 9.0f64.powi(x2);
                assert!((psi[idx].norm_sqr() - expected).abs() <= 1e-10 * expected);
            }
        }
        let subsets: [&[usize]; 4] = [&[], &[1], &[2], &[1, 2]];
        for (i, a) in subsets.iter().enumerate() {
            for b in &subsets[i + 1..] {
                let u = pvbs_ground_vector(&p, 1, n as i64, a).unwrap();
                let v = pvbs_ground_vector(&p, 1, n as i64, b).unwrap();
                assert!(inner(u.as_slice().unwrap(), v.as_slice().unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sectors_block_diagonalize() {
        let s = sector_decomposition(&params(&[0.5], &[]), 3).unwrap();
        assert_eq!(s.sectors.sizes(), vec![1, 3, 3, 1]);
        let s = sector_decomposition(&params(&[0.5, 2.0], &[]), 2).unwrap();
        assert_eq!(s.sectors.len(), 6);
        let s = sector_decomposition(&params(&[0.5, 2.0], &[(0, 1, 0.3)]), 4).unwrap();
        assert!(s.off_block_residual <= 1e-12);
    }
}
