use pvbs_core::aklt::{aklt_interaction, path_interaction, s0, PathSchedule};
use pvbs_core::chain::{
    assemble_by_kron, assemble_hamiltonian, spectral_gap, ChainOperator, Hamiltonian, SolverChoice, SolverConfig,
};
use pvbs_core::numerics::{op_norm, C64};
use pvbs_core::pvbs::{particle_charges, pvbs_interaction, PvbsParams};
use pvbs_core::so::{so_path_interaction, so_s0, so_spherical_interaction, LambdaProfile};
use pvbs_core::NearestNeighborInteraction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pvbs(lambdas: &[f64], thetas: &[(usize, usize, f64)]) -> PvbsParams {
    thetas
        .iter()
        .fold(PvbsParams::new(lambdas.to_vec()).unwrap(), |p, &(i, j, t)| p.with_theta(i, j, t).unwrap())
}

/// Every in-scope model with the largest chain that stays cheap densely.
fn models() -> Vec<(NearestNeighborInteraction, usize)> {
    let sched = PathSchedule::standard();
    let p1 = pvbs(&[0.5], &[(0, 1, 0.4)]);
    let p2 = pvbs(&[0.5, 3.0], &[(0, 1, 0.7), (0, 2, 1.1), (1, 2, 0.3)]);
    vec![
        (pvbs_interaction(&p1).unwrap(), 6),
        (pvbs_interaction(&p2).unwrap(), 6),
        (aklt_interaction().unwrap(), 6),
        (path_interaction(0.5 * s0(), &sched).unwrap(), 6),
        (so_path_interaction(1, 0.5 * so_s0(1), &LambdaProfile::uniform(1)).unwrap(), 6),
        (so_spherical_interaction(2).unwrap(), 4),
        (so_path_interaction(2, 0.5 * so_s0(2), &LambdaProfile::uniform(2)).unwrap(), 4),
    ]
}

#[test]
fn dense_and_matvec_assemblies_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for (h, n_max) in models() {
        for n in 2..=n_max {
            let dense = assemble_by_kron(&h, n).unwrap();
            let op = ChainOperator::new(&h, n).unwrap();
            let scale = op_norm(&dense).unwrap().max(1.0);
            for _ in 0..20 {
                let v: Vec<C64> = (0..op.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let mut y = vec![C64::new(0.0, 0.0); op.dim()];
                op.apply(&v, &mut y);
                let expected = dense.dot(&ndarray::Array1::from(v.clone()));
                let err = y.iter().zip(&expected).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(err <= 1e-12 * scale * vn, "{} N={n}: {err:e}", h.model());
            }
        }
    }
}

#[test]
fn two_sites_is_the_interaction_itself() {
    let h = aklt_interaction().unwrap();
    match assemble_hamiltonian(&h, 2, 4096).unwrap() {
        Hamiltonian::Dense(m) => assert!(op_norm(&(m - h.matrix())).unwrap() < 1e-15),
        Hamiltonian::MatVec(_) => panic!("two sites should be dense"),
    }
    assert!(matches!(assemble_hamiltonian(&h, 10, 4096).unwrap(), Hamiltonian::MatVec(_)));
}

#[test]
fn models_are_frustration_free() {
    let cfg = SolverConfig::default();
    for (h, n) in models() {
        let rep = spectral_gap(&ChainOperator::new(&h, n).unwrap(), None, &cfg).unwrap();
        assert!(rep.ground_energy.abs() <= 1e-9, "{}: {}", h.model(), rep.ground_energy);
        assert!(rep.gap.is_some_and(|g| g > 0.0));
    }
}

#[test]
fn sector_gaps_match_the_full_spectrum() {
    let with = SolverConfig { solver: SolverChoice::Dense, ..SolverConfig::default() };
    let without = SolverConfig { use_sectors: false, ..with.clone() };
    for p in [pvbs(&[0.5], &[(0, 1, 0.4)]), pvbs(&[0.5, 3.0], &[(0, 1, 0.7), (0, 2, 1.1), (1, 2, 0.3)])] {
        for n in 2..=6 {
            let op = ChainOperator::new(&pvbs_interaction(&p).unwrap(), n).unwrap().with_charges(particle_charges(&p)).unwrap();
            let a = spectral_gap(&op, None, &with).unwrap();
            let b = spectral_gap(&op, None, &without).unwrap();
            assert_eq!(a.kernel_dim, b.kernel_dim);
            assert!((a.gap.unwrap() - b.gap.unwrap()).abs() <= 1e-10, "n={} N={n}", p.n());
        }
    }
}

#[test]
fn krylov_matches_dense() {
    let h = aklt_interaction().unwrap();
    let op = ChainOperator::new(&h, 6).unwrap();
    let dense = spectral_gap(&op, Some(4), &SolverConfig { solver: SolverChoice::Dense, ..SolverConfig::default() }).unwrap();
    let krylov = spectral_gap(&op, Some(4), &SolverConfig { solver: SolverChoice::Krylov, ..SolverConfig::default() }).unwrap();
    assert!((dense.gap.unwrap() - krylov.gap.unwrap()).abs() <= 1e-8);
}

#[test]
fn kernel_mismatch_is_a_certification_failure() {
    let op = ChainOperator::new(&aklt_interaction().unwrap(), 4).unwrap();
    let err = spectral_gap(&op, Some(3), &SolverConfig::default()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
