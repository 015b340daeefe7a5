use super::{PathPoint, PathSchedule};
use crate::error::Result;
use crate::interaction::NearestNeighborInteraction;
use crate::mps::{apply_transfer, spectrum_distance, transfer_spectrum, MpsFamily, QuadraticRelation, TransferSpectrum};
use crate::numerics::{dagger, identity, kron, max_abs, real, real_matrix, CMatrix, C64, I, ZERO};
use ndarray::Array2;

const ZERO_STATE: usize = 0;
const PLUS: usize = 1;
const MINUS: usize = 2;

/// `(S_x, S_y, S_z)` for spin 1 in the `(0, +, −)` basis.
pub fn spin_one_matrices() -> [CMatrix; 3] {
    let r2 = std::f64::consts::SQRT_2;
    let mut raise = CMatrix::zeros((3, 3));
    raise[(PLUS, ZERO_STATE)] = real(r2);
    raise[(ZERO_STATE, MINUS)] = real(r2);
    let lower = dagger(&raise);
    let sx = (&raise + &lower).mapv(|z| z * 0.5);
    let sy = (&raise - &lower).mapv(|z| z * (-0.5 * I));
    let mut sz = CMatrix::zeros((3, 3));
    sz[(PLUS, PLUS)] = real(1.0);
    sz[(MINUS, MINUS)] = real(-1.0);
    [sx, sy, sz]
}

/// `S_z` eigenvalues of the local basis, in the format expected by `ChainOperator::with_charges`.
pub fn sz_charges() -> Vec<Vec<i32>> {
    vec![vec![0], vec![1], vec![-1]]
}

/// `½ S·S + ⅙ (S·S)² + ⅓`, the projector onto total spin 2 of two neighbouring spins.
pub fn aklt_interaction() -> Result<NearestNeighborInteraction> {
    let spins = spin_one_matrices();
    let mut ss = CMatrix::zeros((9, 9));
    for s in &spins {
        ss = ss + kron(s, s)?;
    }
    let h = ss.mapv(|z| z * 0.5) + ss.dot(&ss).mapv(|z| z / 6.0) + identity(9).mapv(|z| z / 3.0);
    NearestNeighborInteraction::new(3, h, "aklt")
}

fn basis_pair(a: usize, b: usize) -> usize {
    3 * a + b
}

/// The five mutually orthogonal vectors spanning the range of `h(s)`.
fn range_vectors(p: &PathPoint) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity(5);
    let mut push = |terms: &[(usize, usize, f64)]| {
        let mut v = vec![ZERO; 9];
        for &(a, b, c) in terms {
            v[basis_pair(a, b)] += real(c);
        }
        out.push(v);
    };
    push(&[(PLUS, PLUS, 1.0)]);
    push(&[(MINUS, MINUS, 1.0)]);
    push(&[(PLUS, ZERO_STATE, 1.0), (ZERO_STATE, PLUS, p.f)]);
    push(&[(ZERO_STATE, MINUS, 1.0), (MINUS, ZERO_STATE, p.f)]);
    push(&[
        (PLUS, MINUS, 1.0),
        (ZERO_STATE, ZERO_STATE, p.g * p.sin / (p.cos * p.cos)),
        (MINUS, PLUS, p.f * p.f),
    ]);
    out
}

/// Projector onto the five-dimensional range that deforms the spin-2 subspace.
///
/// The vectors are orthogonal for every `s`, so the sum of their rank-one projectors is smooth in `s`.
pub fn path_interaction(s: f64, sched: &PathSchedule) -> Result<NearestNeighborInteraction> {
    let p = sched.point(s)?;
    let mut h = CMatrix::zeros((9, 9));
    for v in range_vectors(&p) {
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let col = Array2::from_shape_fn((9, 1), |(r, _)| v[r]);
        h = h + col.dot(&dagger(&col)).mapv(|z| z / n2);
    }
    NearestNeighborInteraction::new(3, h, format!("aklt-path(s={s})"))
}

/// `(w_0, w_+, w_−)`.
pub fn path_mps(s: f64, sched: &PathSchedule) -> Result<MpsFamily> {
    let p = sched.point(s)?;
    let w0 = real_matrix(&[&[-p.cos, 0.0], &[0.0, p.cos * p.f]]);
    let wp = real_matrix(&[&[0.0, 0.0], &[p.sin, 0.0]]);
    let wm = real_matrix(&[&[0.0, -p.g], &[0.0, 0.0]]);
    MpsFamily::new(vec![w0, wp, wm])
}

/// Quadratic relations of `w(s)`; at `s = 0` they reduce to the product-vacuum algebra.
pub fn aklt_relations(s: f64, sched: &PathSchedule) -> Result<Vec<QuadraticRelation>> {
    let p = sched.point(s)?;
    let one = real(1.0);
    Ok(vec![
        QuadraticRelation::new("f w0 w- = -w- w0").lhs(real(p.f), ZERO_STATE, MINUS).rhs(-one, MINUS, ZERO_STATE),
        QuadraticRelation::new("w0 w+ = -f w+ w0").lhs(one, ZERO_STATE, PLUS).rhs(real(-p.f), PLUS, ZERO_STATE),
        QuadraticRelation::new("w+^2 = 0").lhs(one, PLUS, PLUS),
        QuadraticRelation::new("w-^2 = 0").lhs(one, MINUS, MINUS),
        QuadraticRelation::new("w- w+ + f^2 w+ w- = -(g sin / cos^2) w0^2")
            .lhs(one, MINUS, PLUS)
            .lhs(real(p.f * p.f), PLUS, MINUS)
            .rhs(real(-p.g * p.sin / (p.cos * p.cos)), ZERO_STATE, ZERO_STATE),
    ])
}

/// Numerical transfer spectrum next to its closed form.
#[derive(Debug, Clone)]
pub struct PathTransferData {
    pub point: PathPoint,
    pub spectrum: TransferSpectrum,
    /// Greedy-matched distance between numerical and closed-form eigenvalues.
    pub eigenvalue_error: f64,
    /// Largest `‖T(R_j) − t_j R_j‖` and `‖T*(L_j) − t_j L_j‖` over the closed-form eigenvectors.
    pub eigenvector_residual: f64,
    /// `‖L_1 − ρ‖` for the numerically computed invariant state.
    pub invariant_state_error: f64,
    /// `ρ` is faithful, which fails exactly at `s = 0`.
    pub faithful: bool,
}

/// Closed-form right and left eigenvectors, in the order of `PathPoint::eigenvalues`.
fn closed_form_eigenvectors(p: &PathPoint) -> ([CMatrix; 4], [CMatrix; 4]) {
    let sp = real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let sm = real_matrix(&[&[0.0, 0.0], &[1.0, 0.0]]);
    let rho = real_matrix(&[&[p.rho1, 0.0], &[0.0, p.rho2]]);
    let r4 = real_matrix(&[&[p.rho2, 0.0], &[0.0, -p.rho1]]);
    let sz = real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]]);
    ([identity(2), sp.clone(), sm.clone(), r4], [rho, sm, sp, sz])
}

fn apply_dual_transfer(f: &MpsFamily, l: &CMatrix) -> CMatrix {
    f.matrices().iter().fold(CMatrix::zeros(l.dim()), |acc, v| acc + v.dot(l).dot(&dagger(v)))
}

pub fn path_transfer_data(s: f64, sched: &PathSchedule) -> Result<PathTransferData> {
    let p = sched.point(s)?;
    let f = path_mps(s, sched)?;
    let spectrum = transfer_spectrum(&f)?;
    let closed: Vec<C64> = p.eigenvalues().iter().map(|&t| real(t)).collect();
    let eigenvalue_error = spectrum_distance(&spectrum.eigenvalues, &closed);
    let (rights, lefts) = closed_form_eigenvectors(&p);
    let mut eigenvector_residual = 0.0f64;
    for ((t, r), l) in p.eigenvalues().iter().zip(&rights).zip(&lefts) {
        eigenvector_residual = eigenvector_residual
            .max(max_abs(&(apply_transfer(&f, r) - r.mapv(|z| z * *t))))
            .max(max_abs(&(apply_dual_transfer(&f, l) - l.mapv(|z| z * *t))));
    }
    let invariant_state_error = max_abs(&(&spectrum.left[0] - &lefts[0]));
    Ok(PathTransferData {
        point: p,
        spectrum,
        eigenvalue_error,
        eigenvector_residual,
        invariant_state_error,
        faithful: p.rho1 > 0.0 && p.rho2 > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{s0, uniform_grid};
    use super::*;
    use crate::mps::{check_intersection_property, check_quadratic_relations, ground_space};
    use crate::numerics::{op_norm, subspace_distance};
    use crate::pvbs::{pvbs_interaction, PvbsParams};
    use std::f64::consts::{PI, SQRT_2};

    fn sched() -> PathSchedule {
        PathSchedule::standard()
    }

    #[test]
    fn aklt_projector_has_rank_five() {
        let h = aklt_interaction().unwrap();
        assert_eq!(h.rank(), 5);
        let [sx, sy, sz] = spin_one_matrices();
        let casimir = sx.dot(&sx) + sy.dot(&sy) + sz.dot(&sz);
        assert!(max_abs(&(casimir - identity(3).mapv(|z| z * 2.0))) < 1e-14);
    }

    #[test]
    fn endpoints() {
        let sc = sched();
        let at_s0 = path_interaction(sc.s0, &sc).unwrap();
        assert!(op_norm(&(at_s0.matrix() - aklt_interaction().unwrap().matrix())).unwrap() <= 1e-12);
        let pv = PvbsParams::new(vec![SQRT_2, 1.0 / SQRT_2])
            .and_then(|p| p.with_theta(0, 1, PI))
            .and_then(|p| p.with_theta(0, 2, PI))
            .and_then(|p| p.with_theta(1, 2, PI))
            .unwrap();
        let at_0 = path_interaction(0.0, &sc).unwrap();
        assert!(op_norm(&(at_0.matrix() - pvbs_interaction(&pv).unwrap().matrix())).unwrap() <= 1e-12);
        assert!(path_interaction(sc.s0 + 1e-9, &sc).is_err());
    }

    #[test]
    fn mps_endpoints_and_isometry() {
        let sc = sched();
        let f = path_mps(sc.s0, &sc).unwrap();
        let a = 1.0 / 3.0f64.sqrt();
        let b = (2.0f64 / 3.0).sqrt();
        let expected = [
            real_matrix(&[&[-a, 0.0], &[0.0, a]]),
            real_matrix(&[&[0.0, 0.0], &[b, 0.0]]),
            real_matrix(&[&[0.0, -b], &[0.0, 0.0]]),
        ];
        for (m, e) in f.matrices().iter().zip(&expected) {
            assert!(max_abs(&(m - e)) < 1e-14);
        }
        assert_eq!(max_abs(path_mps(0.0, &sc).unwrap().matrix(PLUS)), 0.0);
        for s in uniform_grid(&sc, 21) {
            assert!(path_mps(s, &sc).unwrap().isometry_residual().unwrap() < 1e-14);
        }
    }

    #[test]
    fn interaction_is_lipschitz() {
        let sc = sched();
        let eps = 1e-5;
        let mut worst = 0.0f64;
        for s in uniform_grid(&sc, 41).into_iter().filter(|&s| s + eps <= sc.s0) {
            let a = path_interaction(s, &sc).unwrap();
            let b = path_interaction(s + eps, &sc).unwrap();
            worst = worst.max(op_norm(&(b.matrix() - a.matrix())).unwrap() / eps);
        }
        assert!(worst.is_finite() && worst < 10.0, "{worst}");
    }

    #[test]
    fn kernel_is_the_mps_range() {
        let sc = sched();
        for s in uniform_grid(&sc, 11).into_iter().skip(1) {
            let h = path_interaction(s, &sc).unwrap();
            let g = ground_space(&path_mps(s, &sc).unwrap(), 2).unwrap();
            assert!(subspace_distance(&h.kernel_frame().unwrap(), &g).unwrap() <= 1e-10);
            assert!(h.conserves(&sz_charges()));
        }
    }

    #[test]
    fn intersection_property_along_path() {
        let sc = sched();
        for s in [0.2, sc.delta, 0.8, sc.s0] {
            let rep =
                check_intersection_property(&path_interaction(s, &sc).unwrap(), &path_mps(s, &sc).unwrap(), 5).unwrap();
            assert!(rep.holds, "s={s}: {rep:?}");
            assert_eq!(rep.mps_dim, 4);
        }
    }

    #[test]
    fn relations_hold_on_grid() {
        let sc = sched();
        for s in uniform_grid(&sc, 11) {
            let f = path_mps(s, &sc).unwrap();
            assert!(check_quadratic_relations(&f, &aklt_relations(s, &sc).unwrap()).unwrap() <= 1e-14);
        }
    }

    #[test]
    fn transfer_closed_forms() {
        let sc = sched();
        let d = path_transfer_data(s0(), &sc).unwrap();
        assert!(d.eigenvalue_error < 1e-12);
        assert!(d.invariant_state_error < 1e-12);
        assert!((d.spectrum.left[0][(0, 0)].re - 0.5).abs() < 1e-12);
        let mut sign_change = (false, false);
        for s in uniform_grid(&sc, 50).into_iter().skip(1) {
            let d = path_transfer_data(s, &sc).unwrap();
            assert!(d.eigenvalue_error < 1e-12, "s={s}: {}", d.eigenvalue_error);
            assert!(d.eigenvector_residual < 1e-13);
            assert!(d.invariant_state_error < 1e-12);
            assert!(d.spectrum.biorthonormality_defect() < 1e-10);
            assert!(d.faithful);
            if d.point.t4 > 0.0 {
                sign_change.0 = true;
            } else {
                sign_change.1 = true;
            }
        }
        assert_eq!(sign_change, (true, true));
        let origin = path_transfer_data(0.0, &sc).unwrap();
        assert!(!origin.faithful);
        assert!((origin.point.t2 + 1.0 / SQRT_2).abs() < 1e-15);
        assert!((origin.spectrum.eigenvalues[1].norm() - 1.0 / SQRT_2).abs() < 1e-12);
    }
}
