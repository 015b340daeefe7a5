use super::{ground_vector_expectation, PvbsParams};
use crate::error::{Error, Result};
use crate::numerics::{exponential_rate, CMatrix};
use serde::Serialize;

/// `max_i min(λ_i, 1/λ_i)`, the slowest edge-state decay.
pub fn convergence_rate_bound(p: &PvbsParams) -> f64 {
    p.lambdas().iter().map(|&l| l.min(1.0 / l)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceFit {
    /// Number of sites added on each side of the observable.
    pub margins: Vec<usize>,
    /// `|⟨A⟩_ψ − ⟨A⟩_Ω|` per margin.
    pub deviations: Vec<f64>,
    /// Fitted `r` in `deviation ≈ C r^margin`.
    pub rate: f64,
    pub bound: f64,
}

/// Expectation of a one-site `op` on the middle site of chains with `L` sites on either side,
/// compared with its value `⟨e_0, op e_0⟩` in the product vacuum.
pub fn edge_state_convergence(p: &PvbsParams, subset: &[usize], op: &CMatrix, margins: &[usize]) -> Result<ConvergenceFit> {
    let d = p.n() + 1;
    if op.dim() != (d, d) {
        return Err(Error::validation(format!("observable must be {d}x{d}")));
    }
    let vacuum = op[(0, 0)].re;
    let deviations = margins
        .iter()
        .map(|&l| Ok((ground_vector_expectation(p, subset, 2 * l + 1, l, op)? - vacuum).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = margins.iter().map(|&l| l as f64).collect();
    Ok(ConvergenceFit {
        margins: margins.to_vec(),
        rate: exponential_rate(&xs, &deviations)?,
        deviations,
        bound: convergence_rate_bound(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real_matrix;

    #[test]
    fn single_left_particle() {
        let p = PvbsParams::new(vec![0.5]).unwrap();
        let a = real_matrix(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let fit = edge_state_convergence(&p, &[1], &a, &[2, 4, 6, 8, 10]).unwrap();
        // Occupation of the middle site is λ^{2(L+1)} / Σ_x λ^{2x}.
        for (&l, &dev) in fit.margins.iter().zip(&fit.deviations) {
            let norm: f64 = (1..=2 * l + 1).map(|x| 0.25f64.powi(x as i32)).sum();
            let exact = 0.25f64.powi(l as i32 + 1) / norm;
            assert!((dev - exact).abs() <= 1e-12 * exact);
        }
        // The finite-size normalisation bends the fit slightly at small margins.
        assert!((fit.rate - 0.25).abs() < 1e-4, "{}", fit.rate);
        assert_eq!(fit.bound, 0.5);
        assert_eq!(convergence_rate_bound(&PvbsParams::new(vec![0.5, 3.0]).unwrap()), 0.5);
    }
}
