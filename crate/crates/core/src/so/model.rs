use super::clifford::{car_creation, clifford_rep, twisted_car};
use crate::error::{Error, Result};
use crate::interaction::NearestNeighborInteraction;
use crate::mps::{ground_space, MpsFamily, QuadraticRelation};
use crate::numerics::{dagger, identity, projector_onto, real, trace, CMatrix, C64};
use serde::{Deserialize, Serialize};

/// Odd local dimension `d = 2J + 1`.
fn local_dim(j: usize) -> usize {
    2 * j + 1
}

/// `P_S`: symmetric two-site vectors minus the singlet `d^{−1/2} Σ e_i ⊗ e_i`.
pub fn so_interaction(d: usize) -> Result<NearestNeighborInteraction> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::validation(format!("SO(d) chains need odd d >= 3, got {d}")));
    }
    let n = d * d;
    let mut h = CMatrix::zeros((n, n));
    for a in 0..d {
        for b in 0..d {
            h[(a * d + b, a * d + b)] += real(0.5);
            h[(a * d + b, b * d + a)] += real(0.5);
        }
    }
    for a in 0..d {
        for b in 0..d {
            h[(a * d + a, b * d + b)] -= real(1.0 / d as f64);
        }
    }
    NearestNeighborInteraction::new(d, h, format!("so({d})"))
}

/// `γ Z_α` with `γ = −d^{−1/2}`, whose ground spaces are those of the Cartesian `P_S`.
pub fn so_cartesian_mps(j: usize) -> Result<MpsFamily> {
    let gamma = -1.0 / (local_dim(j) as f64).sqrt();
    MpsFamily::new(clifford_rep(j)?.generators.into_iter().map(|z| z.mapv(|x| x * gamma)).collect())
}

/// `V_0 = −d^{−1/2} Z_0`, `V_{2j−1} = √(2/d) a_j`, `V_{2j} = −√(2/d) a*_j`.
pub fn so_mps(j: usize) -> Result<MpsFamily> {
    let d = local_dim(j) as f64;
    let rep = clifford_rep(j)?;
    let scale = (2.0 / d).sqrt();
    let mut matrices = vec![rep.generators[0].mapv(|z| z * (-1.0 / d.sqrt()))];
    for c in car_creation(j)? {
        matrices.push(dagger(&c).mapv(|z| z * scale));
        matrices.push(c.mapv(|z| z * -scale));
    }
    MpsFamily::new(matrices)
}

/// Unitary `U` with `V_β = Σ_α conj(U_{βα}) γ Z_α`, i.e. the Cartesian-to-spherical change of basis.
pub fn spherical_unitary(j: usize) -> Result<CMatrix> {
    let d = local_dim(j);
    let gamma = -1.0 / (d as f64).sqrt();
    let z = clifford_rep(j)?.generators;
    let v = so_mps(j)?;
    let norm = gamma * (1u64 << j) as f64;
    Ok(CMatrix::from_shape_fn((d, d), |(b, a)| (trace(&z[a].dot(v.matrix(b))) / norm).conj()))
}

/// `P_S` in the basis of `so_mps`, where the Cartan `U(1)^J` charges are diagonal.
pub fn so_spherical_interaction(j: usize) -> Result<NearestNeighborInteraction> {
    let u = conj(&spherical_unitary(j)?);
    so_interaction(local_dim(j))?.conjugated(&u, format!("so({})-spherical", local_dim(j)))
}

/// Charge `+e_j` on index `2j − 1`, `−e_j` on `2j`, zero on index 0.
pub fn so_charges(j: usize) -> Vec<Vec<i32>> {
    (0..local_dim(j))
        .map(|idx| {
            (1..=j)
                .map(|m| match idx {
                    i if i == 2 * m - 1 => 1,
                    i if i == 2 * m => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// `cos(s0) = (2J + 1)^{−1/2}`.
pub fn so_s0(j: usize) -> f64 {
    (1.0 / (local_dim(j) as f64).sqrt()).acos()
}

/// `λ_j(s) = 1 − (1 − λ_j(0))(1 − s/s0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaProfile {
    pub lambda0: Vec<f64>,
}

impl LambdaProfile {
    /// `λ_j(0) = 1/2` for every mode.
    pub fn uniform(j: usize) -> Self {
        LambdaProfile { lambda0: vec![0.5; j] }
    }

    pub fn new(lambda0: Vec<f64>) -> Result<Self> {
        if let Some(bad) = lambda0.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::validation(format!("lambda0 entries must lie in (0, 1), got {bad}")));
        }
        Ok(LambdaProfile { lambda0 })
    }

    pub fn at(&self, s: f64, s0: f64) -> Vec<f64> {
        self.lambda0.iter().map(|l| 1.0 - (1.0 - l) * (1.0 - s / s0)).collect()
    }
}

/// Coefficients of the deformed family at one `s`.
#[derive(Debug, Clone, Serialize)]
pub struct SoPathPoint {
    pub j: usize,
    pub s: f64,
    pub s0: f64,
    pub lambdas: Vec<f64>,
    /// `sin(s)/√J`.
    pub alpha: f64,
    /// `−√(1 − λ_j²(1 − α²))`; the sign reproduces `so_mps` at `s0`.
    pub betas: Vec<f64>,
    /// `−cos(s)`.
    pub gamma: f64,
}

impl SoPathPoint {
    pub fn new(j: usize, s: f64, profile: &LambdaProfile) -> Result<Self> {
        if profile.lambda0.len() != j {
            return Err(Error::validation(format!("need {j} twist parameters, got {}", profile.lambda0.len())));
        }
        let s0 = so_s0(j);
        if !(0.0..=s0 + 1e-12).contains(&s) {
            return Err(Error::validation(format!("s = {s} outside [0, {s0}]")));
        }
        let s = s.min(s0);
        let lambdas = profile.at(s, s0);
        let alpha = s.sin() / (j as f64).sqrt();
        let betas = lambdas.iter().map(|l| -(1.0 - l * l * (1.0 - alpha * alpha)).sqrt()).collect();
        Ok(SoPathPoint { j, s, s0, lambdas, alpha, betas, gamma: -s.cos() })
    }

    /// `|Σ_j α_j² + γ² − 1|`.
    pub fn sphere_defect(&self) -> f64 {
        (self.j as f64 * self.alpha * self.alpha + self.gamma * self.gamma - 1.0).abs()
    }

    /// `α_j β_j / γ²`, the coefficient of `V_0²` in the pair-addition relation.
    pub fn pair_coefficient(&self, mode: usize) -> f64 {
        self.alpha * self.betas[mode] / (self.gamma * self.gamma)
    }
}

/// `V_0 = γ a_0(Λ)`, `V_{2j−1} = α a_j(Λ)`, `V_{2j} = β_j a*_j(Λ)`.
pub fn so_path_mps(j: usize, s: f64, profile: &LambdaProfile) -> Result<MpsFamily> {
    let p = SoPathPoint::new(j, s, profile)?;
    let car = twisted_car(&p.lambdas)?;
    let mut matrices = vec![car.a0.mapv(|z| z * p.gamma)];
    for m in 0..j {
        matrices.push(car.annihilation[m].mapv(|z| z * p.alpha));
        matrices.push(car.creation[m].mapv(|z| z * p.betas[m]));
    }
    MpsFamily::new(matrices)
}

/// Relations of the deformed family written in terms of `V_α(s)`.
pub fn so_path_relations(j: usize, s: f64, profile: &LambdaProfile) -> Result<Vec<QuadraticRelation>> {
    let p = SoPathPoint::new(j, s, profile)?;
    let one = real(1.0);
    let l = &p.lambdas;
    let (ann, cre) = (|m: usize| 2 * m + 1, |m: usize| 2 * m + 2);
    let mut rels = Vec::new();
    for m in 0..j {
        rels.push(QuadraticRelation::new(format!("V{}^2 = 0", ann(m))).lhs(one, ann(m), ann(m)));
        rels.push(QuadraticRelation::new(format!("V{}^2 = 0", cre(m))).lhs(one, cre(m), cre(m)));
        rels.push(
            QuadraticRelation::new(format!("pair addition, mode {}", m + 1))
                .lhs(one, cre(m), ann(m))
                .lhs(real(l[m] * l[m]), ann(m), cre(m))
                .rhs(real(p.pair_coefficient(m)), 0, 0),
        );
        rels.push(
            QuadraticRelation::new(format!("creation {} past V0", m + 1))
                .lhs(one, cre(m), 0)
                .rhs(real(-l[m]), 0, cre(m)),
        );
        rels.push(
            QuadraticRelation::new(format!("V0 past annihilation {}", m + 1))
                .lhs(one, 0, ann(m))
                .rhs(real(-l[m]), ann(m), 0),
        );
        for k in (0..j).filter(|&k| k != m) {
            rels.push(
                QuadraticRelation::new(format!("creation {} past annihilation {}", m + 1, k + 1))
                    .lhs(one, cre(m), ann(k))
                    .rhs(real(-l[m] * l[k]), ann(k), cre(m)),
            );
            rels.push(
                QuadraticRelation::new(format!("creation {} past creation {}", m + 1, k + 1))
                    .lhs(one, cre(m), cre(k))
                    .rhs(real(-l[m] / l[k]), cre(k), cre(m)),
            );
        }
    }
    Ok(rels)
}

/// Parent interaction of the deformed family: projector onto `(Ran Γ_2)^⟂`. Requires `s > 0`.
pub fn so_path_interaction(j: usize, s: f64, profile: &LambdaProfile) -> Result<NearestNeighborInteraction> {
    if s <= 0.0 {
        return Err(Error::validation(
            "the deformed family loses its annihilation matrices at s = 0; use s > 0",
        ));
    }
    let f = so_path_mps(j, s, profile)?;
    let range = ground_space(&f, 2)?;
    let d = f.d();
    let p = projector_onto(&range);
    let h = identity(d * d) - p;
    NearestNeighborInteraction::new(d, h, format!("so({})-path(s={s})", local_dim(j)))
}

/// Complex-conjugated change of basis used on the physical index.
pub(crate) fn conj(u: &CMatrix) -> CMatrix {
    u.mapv(|z: C64| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aklt::{aklt_interaction, path_mps, PathSchedule};
    use crate::mps::{check_intersection_property, check_quadratic_relations};
    use crate::numerics::{kron, op_norm, subspace_distance};
    use ndarray::Array2;
    use ndarray_linalg::{Determinant, QR};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rotation(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let m: Array2<f64> = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
        let (q, r) = m.qr().unwrap();
        let mut q = q;
        for c in 0..d {
            if r[(c, c)] < 0.0 {
                q.column_mut(c).mapv_inplace(|x| -x);
            }
        }
        let det = q.det().unwrap();
        if det < 0.0 {
            q.column_mut(0).mapv_inplace(|x| -x);
        }
        q.mapv(real)
    }

    #[test]
    fn projector_ranks_and_invariance() {
        assert_eq!(so_interaction(3).unwrap().rank(), 5);
        assert_eq!(so_interaction(5).unwrap().rank(), 14);
        assert!(so_interaction(4).is_err());
        assert!(so_interaction(1).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [3, 5] {
            let h = so_interaction(d).unwrap();
            for _ in 0..20 {
                let o = random_rotation(d, &mut rng);
                let oo = kron(&o, &o).unwrap();
                let comm = h.matrix().dot(&oo) - oo.dot(h.matrix());
                assert!(op_norm(&comm).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn spin_one_case_is_aklt() {
        let sph = so_spherical_interaction(1).unwrap();
        assert!(op_norm(&(sph.matrix() - aklt_interaction().unwrap().matrix())).unwrap() <= 1e-12);
        let sc = PathSchedule::standard();
        assert!(so_mps(1).unwrap().max_deviation(&path_mps(sc.s0, &sc).unwrap()) < 1e-14);
    }

    #[test]
    fn spherical_unitary_maps_cartesian_family() {
        for j in 1..=3 {
            let u = spherical_unitary(j).unwrap();
            let d = local_dim(j);
            assert!(op_norm(&(u.dot(&dagger(&u)) - identity(d))).unwrap() < 1e-13);
            let mapped = so_cartesian_mps(j).unwrap().change_physical_basis(&conj(&u)).unwrap();
            assert!(mapped.max_deviation(&so_mps(j).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn mps_ground_spaces_match_kernels() {
        for j in 1..=4 {
            assert!(so_mps(j).unwrap().isometry_residual().unwrap() <= 1e-14);
        }
        for j in 1..=2 {
            let cart = so_interaction(local_dim(j)).unwrap();
            let g = ground_space(&so_cartesian_mps(j).unwrap(), 2).unwrap();
            assert!(subspace_distance(&cart.kernel_frame().unwrap(), &g).unwrap() <= 1e-10);
            let sph = so_spherical_interaction(j).unwrap();
            let g = ground_space(&so_mps(j).unwrap(), 2).unwrap();
            assert!(subspace_distance(&sph.kernel_frame().unwrap(), &g).unwrap() <= 1e-10);
            assert!(sph.conserves(&so_charges(j)));
        }
    }

    #[test]
    fn path_coefficients() {
        for j in 1..=3 {
            let prof = LambdaProfile::uniform(j);
            let s0 = so_s0(j);
            let end = SoPathPoint::new(j, s0, &prof).unwrap();
            let d = local_dim(j) as f64;
            assert!((end.gamma + 1.0 / d.sqrt()).abs() < 1e-14);
            assert!((end.alpha - (2.0 / d).sqrt()).abs() < 1e-14);
            for s in [0.0, 0.3 * s0, s0] {
                assert!(SoPathPoint::new(j, s, &prof).unwrap().sphere_defect() <= 1e-14);
            }
            let p = SoPathPoint::new(j, 0.4 * s0, &prof).unwrap();
            let ratio = p.pair_coefficient(0) / (p.s.tan() / ((j as f64).sqrt() * p.s.cos()));
            assert!((ratio.abs() - p.betas[0].abs()).abs() < 1e-14);
            assert!(so_path_mps(j, s0, &prof).unwrap().max_deviation(&so_mps(j).unwrap()) < 1e-14);
        }
        assert!(SoPathPoint::new(1, so_s0(1) + 1e-9, &LambdaProfile::uniform(1)).is_err());
        assert!(LambdaProfile::new(vec![1.0]).is_err());
    }

    #[test]
    fn path_family_relations_and_origin() {
        let prof = LambdaProfile::uniform(2);
        for i in 0..=10 {
            let s = so_s0(2) * i as f64 / 10.0;
            let f = so_path_mps(2, s, &prof).unwrap();
            assert!(SoPathPoint::new(2, s, &prof).unwrap().sphere_defect() <= 1e-14);
            assert!(so_path_mps(1, so_s0(1) * i as f64 / 10.0, &LambdaProfile::uniform(1)).unwrap().isometry_residual().unwrap() <= 1e-14);
            assert!(check_quadratic_relations(&f, &so_path_relations(2, s, &prof).unwrap()).unwrap() <= 1e-12);
        }
        // Both modes occupied: `λ_1² + λ_2² − λ_1²λ_2²` instead of 1.
        let mid = so_path_mps(2, 0.5 * so_s0(2), &prof).unwrap();
        let l = 0.75f64 * 0.75;
        assert!((mid.isometry_residual().unwrap() - (1.0 - (2.0 * l - l * l))).abs() < 1e-12);
        let origin = so_path_mps(2, 0.0, &prof).unwrap();
        assert_eq!(crate::numerics::max_abs(origin.matrix(1)), 0.0);
        assert_eq!(crate::numerics::max_abs(origin.matrix(3)), 0.0);
    }

    #[test]
    fn spin_one_path_matches_aklt_path() {
        let sc = PathSchedule::standard();
        let s = 0.6;
        let prof = LambdaProfile { lambda0: vec![1.0 - (1.0 - sc.f(s)) / (1.0 - s / so_s0(1))] };
        let so = so_path_mps(1, s, &prof).unwrap();
        assert!(so.max_deviation(&path_mps(s, &sc).unwrap()) < 1e-14);
    }

    #[test]
    fn path_intersection_property() {
        for j in 1..=2 {
            let prof = LambdaProfile::uniform(j);
            let s = 0.5 * so_s0(j);
            let h = so_path_interaction(j, s, &prof).unwrap();
            let rep = check_intersection_property(&h, &so_path_mps(j, s, &prof).unwrap(), 4).unwrap();
            assert!(rep.holds, "J={j}: {rep:?}");
            assert!(h.conserves(&so_charges(j)));
        }
        assert!(so_path_interaction(1, 0.0, &LambdaProfile::uniform(1)).is_err());
    }
}
