use super::model::{path_interaction, path_mps, sz_charges};
use super::PathSchedule;
use crate::chain::{spectral_gap, ChainOperator, SolverConfig, SolverKind};
use crate::error::{Error, Result};
use crate::mps::martingale_coefficient;
use crate::numerics::{c, commutator, max_abs, op_norm, real_matrix, CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Expected ground-space dimension of the open chain anywhere on the path.
pub const PATH_KERNEL_DIM: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct PathGapRow {
    pub s: f64,
    pub f: f64,
    pub g: f64,
    pub t2: f64,
    pub t4: f64,
    pub ground_energy: f64,
    pub kernel_dim: usize,
    pub gap: Option<f64>,
    pub solver: SolverKind,
}

/// Spectral gap of the open chain on `n` sites at every grid point, after confirming a four-dimensional kernel.
pub fn gap_along_path(n: usize, grid: &[f64], sched: &PathSchedule, cfg: &SolverConfig) -> Result<Vec<PathGapRow>> {
    if n < 2 {
        return Err(Error::validation("the chain needs at least two sites"));
    }
    grid.par_iter()
        .map(|&s| {
            let p = sched.point(s)?;
            let op = ChainOperator::new(&path_interaction(s, sched)?, n)?.with_charges(sz_charges())?;
            let rep = spectral_gap(&op, Some(PATH_KERNEL_DIM), cfg).map_err(|e| match e {
                Error::Certification(msg) => Error::Certification(format!("s = {s}: {msg}")),
                other => other,
            })?;
            Ok(PathGapRow {
                s,
                f: p.f,
                g: p.g,
                t2: p.t2,
                t4: p.t4,
                ground_energy: rep.ground_energy,
                kernel_dim: rep.kernel_dim,
                gap: rep.gap,
                solver: rep.solver,
            })
        })
        .collect()
}

/// `g_{k,N}(s)` for the chain built from `h(s)`.
pub fn martingale_along_path(s: f64, k: usize, n: usize, sched: &PathSchedule) -> Result<f64> {
    martingale_coefficient(&path_interaction(s, sched)?, k, n)
}

/// `sup_s max(|t2(s)|, |t4(s)|)` over `grid`, the rate in `g_{k,N}² ≤ C(s) ε^{k−1}`.
pub fn decay_rate(sched: &PathSchedule, grid: &[f64]) -> Result<f64> {
    grid.iter().try_fold(0.0f64, |acc, &s| Ok(acc.max(sched.point(s)?.subleading())))
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdScan {
    pub s: f64,
    /// `(k, g_{k,N}²)` with `N = max(k, 2k − 2)`.
    pub values: Vec<(usize, f64)>,
    /// Smallest scanned `k` with `g² < 1/k`.
    pub first_k: Option<usize>,
}

/// Scans `k = 2..=k_max` for the first `k` where the martingale coefficient drops below `1/√k`.
pub fn empirical_threshold_k(s: f64, k_max: usize, sched: &PathSchedule) -> Result<ThresholdScan> {
    let values = (2..=k_max)
        .map(|k| {
            let n = k.max(2 * k - 2);
            martingale_along_path(s, k, n, sched).map(|g| (k, g * g))
        })
        .collect::<Result<Vec<_>>>()?;
    let first_k = values.iter().find(|(k, g2)| *g2 < 1.0 / *k as f64).map(|&(k, _)| k);
    Ok(ThresholdScan { s, values, first_k })
}

#[derive(Debug, Clone, Serialize)]
pub struct NoGoReport {
    pub trials: usize,
    /// Draws with `λ_− = λ_+`, outside the hypothesis and skipped.
    pub excluded: usize,
    /// Smallest normalized relation residual over accepted draws.
    pub min_residual: f64,
    pub counterexamples: usize,
    /// `max ‖[w_+ w_−, w_0]‖` over the path grid, implied by `C_{+0} C_{−0} = 1`.
    pub max_commutator: f64,
    /// `max ‖[w_+ w_−, w_±]‖`, reported only: `w_+ w_− w_+` does not vanish in this representation.
    pub max_commutator_charged: f64,
    /// `max |C_{+0} C_{−0} − 1|` over the path grid with `s > 0`.
    pub max_coefficient_product_error: f64,
    pub passed: bool,
}

const NO_GO_TOL: f64 = 1e-8;

fn random_su2(rng: &mut ChaCha8Rng) -> CMatrix {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let a: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let b: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let (st, ct) = t.sin_cos();
    let mut u = CMatrix::zeros((2, 2));
    u[(0, 0)] = C64::from_polar(ct, a);
    u[(0, 1)] = -C64::from_polar(st, b);
    u[(1, 0)] = C64::from_polar(st, -b);
    u[(1, 1)] = C64::from_polar(ct, -a);
    u
}

fn conj_by(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u.dot(m).dot(&crate::numerics::dagger(u))
}

/// `‖v_i v_j − c v_j v_i‖ / (‖v_i‖ ‖v_j‖)`.
fn relation_residual(vi: &CMatrix, vj: &CMatrix, coeff: C64) -> Result<f64> {
    let r = op_norm(&(vi.dot(vj) - vj.dot(vi).mapv(|z| z * coeff)))?;
    Ok(r / (op_norm(vi)? * op_norm(vj)?))
}

fn random_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// Ratio `C` with `a = C b` in the least-squares sense.
fn proportionality(a: &CMatrix, b: &CMatrix) -> C64 {
    let num: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    num / den
}

/// Randomized search for two-dimensional nilpotent representations of the two-type algebra,
/// plus the commutation identities of `w(s)` on `grid`.
///
/// Half of the draws fix `v_0` so that the `(−, 0)` relation holds exactly and take `v_+` close to `v_−`;
/// the other half are unstructured.
pub fn algebra_no_go_checks(trials: usize, seed: u64, sched: &PathSchedule, grid: &[f64]) -> Result<NoGoReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_plus = real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let mut excluded = 0;
    let mut counterexamples = 0;
    let mut min_residual = f64::INFINITY;
    for t in 0..trials {
        let lam_minus = rng.gen_range(-1.5f64..1.5).exp();
        let lam_plus = if t % 100 == 99 { lam_minus } else { rng.gen_range(-1.5f64..1.5).exp() };
        if lam_plus == lam_minus {
            excluded += 1;
            continue;
        }
        let c_m0 = random_phase(&mut rng) * lam_minus;
        let c_p0 = random_phase(&mut rng) * lam_plus;
        let c_mp = random_phase(&mut rng) * (lam_minus / lam_plus);
        let u = random_su2(&mut rng);
        let alpha = c(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0));
        let beta = c(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0));
        let v_minus = conj_by(&u, &sigma_plus).mapv(|z| z * alpha);
        let (v_plus, v_zero) = if t % 2 == 0 {
            let eps: f64 = 10f64.powf(rng.gen_range(-6.0..0.0));
            let w = random_su2(&mut rng);
            let near = (&u + &w.mapv(|z| z * eps)).mapv(|z| z / (1.0 + eps));
            let d = crate::numerics::diag(&[c(1.0, 0.0), c_m0]);
            (conj_by(&near, &sigma_plus).mapv(|z| z * beta), conj_by(&u, &d))
        } else {
            let w = random_su2(&mut rng);
            let v0 = CMatrix::from_shape_fn((2, 2), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            (conj_by(&w, &sigma_plus).mapv(|z| z * beta), v0)
        };
        let residual = relation_residual(&v_minus, &v_zero, c_m0)?
            .max(relation_residual(&v_plus, &v_zero, c_p0)?)
            .max(relation_residual(&v_minus, &v_plus, c_mp)?);
        min_residual = min_residual.min(residual);
        if residual < NO_GO_TOL {
            counterexamples += 1;
        }
    }

    let mut max_commutator = 0.0f64;
    let mut max_commutator_charged = 0.0f64;
    let mut max_coefficient_product_error = 0.0f64;
    for &s in grid {
        let f = path_mps(s, sched)?;
        let (w0, wp, wm) = (f.matrix(0), f.matrix(1), f.matrix(2));
        let pm = wp.dot(wm);
        max_commutator = max_commutator.max(max_abs(&commutator(&pm, w0)));
        for w in [wp, wm] {
            max_commutator_charged = max_commutator_charged.max(max_abs(&commutator(&pm, w)));
        }
        if s > 0.0 {
            let c_m0 = proportionality(&wm.dot(w0), &w0.dot(wm));
            let c_p0 = proportionality(&wp.dot(w0), &w0.dot(wp));
            max_coefficient_product_error = max_coefficient_product_error.max((c_m0 * c_p0 - 1.0).norm());
        }
    }
    let passed = counterexamples == 0 && max_commutator <= 1e-12 && max_coefficient_product_error <= 1e-12;
    Ok(NoGoReport {
        trials,
        excluded,
        min_residual,
        counterexamples,
        max_commutator,
        max_commutator_charged,
        max_coefficient_product_error,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{s0, uniform_grid};
    use super::*;
    use crate::pvbs::{pvbs_interaction, PvbsParams};
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn gap_at_both_ends_of_a_short_chain() {
        let sc = PathSchedule::standard();
        let cfg = SolverConfig::default();
        let rows = gap_along_path(6, &[0.0, sc.s0], &sc, &cfg).unwrap();
        for r in &rows {
            assert_eq!(r.kernel_dim, 4);
            assert!(r.gap.unwrap() > 0.0);
        }
        let pv = PvbsParams::new(vec![SQRT_2, 1.0 / SQRT_2])
            .and_then(|p| p.with_theta(0, 1, PI))
            .and_then(|p| p.with_theta(0, 2, PI))
            .and_then(|p| p.with_theta(1, 2, PI))
            .unwrap();
        let op = ChainOperator::new(&pvbs_interaction(&pv).unwrap(), 6).unwrap();
        let rep = spectral_gap(&op, Some(4), &cfg).unwrap();
        assert!((rep.gap.unwrap() - rows[0].gap.unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn martingale_decays_at_aklt_end() {
        let sc = PathSchedule::standard();
        let g3 = martingale_along_path(s0(), 3, 5, &sc).unwrap();
        let g4 = martingale_along_path(s0(), 4, 7, &sc).unwrap();
        assert!(g4 * g4 / (g3 * g3) <= 1.0 / 3.0 + 0.1, "{g3} {g4}");
    }

    #[test]
    fn decay_rate_is_attained_near_origin() {
        let sc = PathSchedule::standard();
        let eps = decay_rate(&sc, &uniform_grid(&sc, 21)).unwrap();
        assert!((eps - 1.0 / SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn no_go_search_is_clean() {
        let sc = PathSchedule::standard();
        let rep = algebra_no_go_checks(2000, 7, &sc, &uniform_grid(&sc, 11)).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.excluded, 20);
        assert!(rep.min_residual > NO_GO_TOL);
    }

    #[test]
    fn threshold_scan_near_origin() {
        let sc = PathSchedule::standard();
        let scan = empirical_threshold_k(sc.delta / 2.0, 5, &sc).unwrap();
        assert_eq!(scan.values.len(), 4);
        assert!(scan.values.iter().all(|(_, g2)| (0.0..=1.0 + 1e-12).contains(g2)));
    }
}
