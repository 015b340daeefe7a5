use super::{pvbs_interaction, PvbsParams};
use crate::error::{Error, Result};
use crate::interaction::NearestNeighborInteraction;
use crate::numerics::{dagger, CMatrix, C64};
use serde::Serialize;
use std::f64::consts::PI;

/// Numbers of types bound to the left (`λ < 1`) and right (`λ > 1`) edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseLabel {
    pub n_left: usize,
    pub n_right: usize,
}

pub fn classify(p: &PvbsParams) -> Result<PhaseLabel> {
    if let Some(index) = p.critical_index() {
        return Err(Error::Critical { index });
    }
    let n_left = p.lambdas().iter().filter(|&&l| l < 1.0).count();
    Ok(PhaseLabel { n_left, n_right: p.n() - n_left })
}

/// Type labels ordered left-bound first, each group by ascending `λ`; index 0 stays first.
fn canonical_order(p: &PvbsParams) -> Vec<usize> {
    let mut types: Vec<usize> = (1..=p.n()).collect();
    types.sort_by(|&a, &b| {
        (p.lambda(a) > 1.0)
            .cmp(&(p.lambda(b) > 1.0))
            .then(p.lambda(a).total_cmp(&p.lambda(b)))
            .then(a.cmp(&b))
    });
    std::iter::once(0).chain(types).collect()
}

/// Permutation matrix with `e_j ↦ e_{perm[j]}`.
fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let d = perm.len();
    let mut m = CMatrix::zeros((d, d));
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// `exp(t · log Π)` for the permutation `e_j ↦ e_{perm[j]}`, principal logarithm.
///
/// Each cycle of length `L` is diagonalized by discrete Fourier vectors with eigenvalues
/// `e^{2πiq/L}`, whose phases are taken in `(−π, π]`.
pub fn permutation_power(perm: &[usize], t: f64) -> CMatrix {
    let d = perm.len();
    let mut out = CMatrix::zeros((d, d));
    let mut seen = vec![false; d];
    for start in 0..d {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut next = perm[start];
        while next != start {
            seen[next] = true;
            cycle.push(next);
            next = perm[next];
        }
        let len = cycle.len();
        for q in 0..len {
            let mut angle = 2.0 * PI * q as f64 / len as f64;
            if angle > PI {
                angle -= 2.0 * PI;
            }
            let weight = C64::from_polar(1.0, t * angle) / len as f64;
            for (m, &a) in cycle.iter().enumerate() {
                for (l, &b) in cycle.iter().enumerate() {
                    let phase = C64::from_polar(1.0, -angle * (m as f64 - l as f64));
                    out[(a, b)] += weight * phase;
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct EquivalencePoint {
    /// `u(s)`-conjugated interaction at the interpolated parameters.
    pub interaction: NearestNeighborInteraction,
    /// Interpolated parameters in canonical type order.
    pub params: PvbsParams,
    /// `u(s) = exp((1 − s) log(Π₂ Π₁⁻¹))`, so `u(1) = 1` and `u(0)` is the relabelling.
    pub unitary: CMatrix,
}

fn relabel(p: &PvbsParams, order: &[usize]) -> Vec<(usize, usize, f64)> {
    let d = order.len();
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            out.push((a, b, p.theta(order[a], order[b])));
        }
    }
    out
}

/// Point `s ∈ [0, 1]` on a gapped path from `p2` (at `s = 0`) to `p1` (at `s = 1`).
pub fn equivalence_path(p1: &PvbsParams, p2: &PvbsParams, s: f64) -> Result<EquivalencePoint> {
    let (l1, l2) = (classify(p1)?, classify(p2)?);
    if l1 != l2 || p1.n() != p2.n() {
        return Err(Error::PhaseObstruction { from: (l1.n_left, l1.n_right), to: (l2.n_left, l2.n_right) });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::validation(format!("path parameter {s} outside [0, 1]")));
    }
    let o1 = canonical_order(p1);
    let o2 = canonical_order(p2);
    let lambdas = (1..o1.len())
        .map(|j| s * p1.lambda(o1[j]) + (1.0 - s) * p2.lambda(o2[j]))
        .collect();
    let mut params = PvbsParams::new(lambdas)?;
    for ((a, b, t1), (_, _, t2)) in relabel(p1, &o1).into_iter().zip(relabel(p2, &o2)) {
        params = params.with_theta(a, b, s * t1 + (1.0 - s) * t2)?;
    }
    let pi1 = permutation_matrix(&o1);
    let pi2 = permutation_matrix(&o2);
    let d = o1.len();
    // Π₂ Π₁⁻¹ maps e_{o1[j]} to e_{o2[j]}.
    let mut relabelling = vec![0; d];
    for j in 0..d {
        relabelling[o1[j]] = o2[j];
    }
    debug_assert!(crate::numerics::max_abs(&(permutation_matrix(&relabelling) - pi2.dot(&dagger(&pi1)))) == 0.0);
    let unitary = permutation_power(&relabelling, 1.0 - s);
    let w = unitary.dot(&pi1);
    let interaction = pvbs_interaction(&params)?.conjugated(&w, format!("pvbs-path(s={s})"))?;
    Ok(EquivalencePoint { interaction, params, unitary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, max_abs};

    #[test]
    fn labels() {
        let p = PvbsParams::new(vec![0.5, 2.0]).unwrap();
        assert_eq!(classify(&p).unwrap(), PhaseLabel { n_left: 1, n_right: 1 });
        let p = PvbsParams::new(vec![1.0 / 3.0, 0.5, 5.0]).unwrap();
        assert_eq!(classify(&p).unwrap(), PhaseLabel { n_left: 2, n_right: 1 });
        assert!(classify(&PvbsParams::new(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn permutation_power_endpoints_and_unitarity() {
        let perm = [2, 0, 1, 4, 3];
        assert!(max_abs(&(permutation_power(&perm, 0.0) - identity(5))) < 1e-14);
        assert!(max_abs(&(permutation_power(&perm, 1.0) - permutation_matrix(&perm))) < 1e-14);
        let u = permutation_power(&perm, 0.37);
        assert!(max_abs(&(u.dot(&dagger(&u)) - identity(5))) < 1e-14);
    }

    #[test]
    fn endpoints_reproduce_both_models() {
        let p1 = PvbsParams::new(vec![0.5, 2.0]).unwrap().with_theta(0, 1, 0.4).unwrap().with_theta(1, 2, -0.9).unwrap();
        let p2 = PvbsParams::new(vec![2.0, 1.0 / 3.0]).unwrap().with_theta(0, 2, 1.1).unwrap();
        let a = equivalence_path(&p1, &p2, 1.0).unwrap();
        assert!(max_abs(&(a.interaction.matrix() - pvbs_interaction(&p1).unwrap().matrix())) < 1e-12);
        assert!(max_abs(&(&a.unitary - identity(3))) < 1e-14);
        let b = equivalence_path(&p1, &p2, 0.0).unwrap();
        assert!(max_abs(&(b.interaction.matrix() - pvbs_interaction(&p2).unwrap().matrix())) < 1e-12);
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            let pt = equivalence_path(&p1, &p2, s).unwrap();
            assert!(pt.params.lambdas().iter().all(|&l| (l - 1.0).abs() > 0.0));
            assert_eq!(classify(&pt.params).unwrap(), classify(&p1).unwrap());
        }
    }

    #[test]
    fn mismatched_labels_refused() {
        let p1 = PvbsParams::new(vec![0.5]).unwrap();
        let p2 = PvbsParams::new(vec![2.0]).unwrap();
        assert!(matches!(equivalence_path(&p1, &p2, 0.5), Err(Error::PhaseObstruction { .. })));
    }
}
