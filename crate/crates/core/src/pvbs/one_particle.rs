use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, identity, real, CMatrix, C64};
use serde::Serialize;

/// Tridiagonal `K` with hopping `e^{∓iθ_i0}` and boundary weights `1/λ` (left) and `λ` (right).
pub fn one_particle_kernel(lambda: f64, theta_i0: f64, n_sites: usize) -> Result<CMatrix> {
    if n_sites < 2 {
        return Err(Error::validation("one-particle chain needs at least two sites"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::validation(format!("lambda must be positive, got {lambda}")));
    }
    let mut k = CMatrix::zeros((n_sites, n_sites));
    let hop = C64::from_polar(1.0, -theta_i0);
    for x in 0..n_sites - 1 {
        k[(x, x + 1)] = hop;
        k[(x + 1, x)] = hop.conj();
    }
    k[(0, 0)] = real(1.0 / lambda);
    k[(n_sites - 1, n_sites - 1)] = real(lambda);
    Ok(k)
}

/// `H = 1 − K/(λ + λ^{-1})`, the chain Hamiltonian restricted to one particle.
pub fn one_particle_hamiltonian(lambda: f64, theta_i0: f64, n_sites: usize) -> Result<CMatrix> {
    let k = one_particle_kernel(lambda, theta_i0, n_sites)?;
    Ok(identity(n_sites) - k / real(lambda + 1.0 / lambda))
}

/// Relative residual of the three-term recursion at `E = λ + 1/λ`, evaluated with `U_{N−1}, U_{N−2}`.
pub fn chebyshev_residual(lambda: f64, n: usize) -> f64 {
    let e = lambda + 1.0 / lambda;
    let x = e / 2.0;
    let mut u = vec![1.0, 2.0 * x];
    while u.len() <= n.max(2) {
        let k = u.len();
        u.push(2.0 * x * u[k - 1] - u[k - 2]);
    }
    let rhs = (1.0 / (e - lambda) + 1.0 / (e - 1.0 / lambda)) * u[n - 1]
        - u[n - 2] / ((e - 1.0 / lambda) * (e - lambda));
    (u[n] - rhs).abs() / u[n].abs().max(1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct OneParticleCertificate {
    pub lambda: f64,
    pub n_max: usize,
    /// `1 − 2/(λ + λ^{-1})`.
    pub limit: f64,
    pub min_gap: f64,
    /// Gap of `H` per chain length, starting at two sites.
    pub gaps: Vec<f64>,
    pub worst_top_error: f64,
    /// Largest second eigenvalue of `K` seen; must stay below 2.
    pub max_second_eigenvalue: f64,
    pub max_chebyshev_residual: f64,
    /// Mismatch of the `E = 2` consistency equation; zero only at `λ = 1`.
    pub e2_mismatch: f64,
    pub passed: bool,
    pub failure: Option<String>,
}

pub fn one_particle_gap_certificate(lambda: f64, n_max: usize) -> Result<OneParticleCertificate> {
    if lambda == 1.0 {
        return Err(Error::Critical { index: 1 });
    }
    if n_max < 2 {
        return Err(Error::validation("n_max must be at least 2"));
    }
    let e = lambda + 1.0 / lambda;
    let limit = 1.0 - 2.0 / e;
    let mut cert = OneParticleCertificate {
        lambda,
        n_max,
        limit,
        min_gap: f64::INFINITY,
        gaps: Vec::with_capacity(n_max - 1),
        worst_top_error: 0.0,
        max_second_eigenvalue: f64::NEG_INFINITY,
        max_chebyshev_residual: 0.0,
        e2_mismatch: (1.0 - (3.0 - e) / (5.0 - 2.0 * e)).abs(),
        passed: true,
        failure: None,
    };
    for n in 2..=n_max {
        let k = one_particle_kernel(lambda, 0.0, n)?;
        let ev = hermitian_eigenvalues(&k)?;
        let top = ev[n - 1];
        let second = ev[n - 2];
        let h_gap = 1.0 - second / e;
        cert.worst_top_error = cert.worst_top_error.max((top - e).abs());
        cert.max_second_eigenvalue = cert.max_second_eigenvalue.max(second);
        cert.min_gap = cert.min_gap.min(h_gap);
        cert.gaps.push(h_gap);
        cert.max_chebyshev_residual = cert.max_chebyshev_residual.max(chebyshev_residual(lambda, n));
        let failure = if (top - e).abs() > 1e-10 {
            Some(format!("N={n}: top eigenvalue {top} differs from {e}"))
        } else if second >= 2.0 && second < e {
            Some(format!("N={n}: eigenvalue {second} lies in [2, {e})"))
        } else if h_gap < limit - 1e-10 {
            Some(format!("N={n}: gap {h_gap} below {limit}"))
        } else {
            None
        };
        if let (true, Some(msg)) = (cert.passed, failure) {
            cert.passed = false;
            cert.failure = Some(msg);
        }
    }
    if cert.max_chebyshev_residual > 1e-10 && cert.passed {
        cert.passed = false;
        cert.failure = Some(format!("recursion residual {}", cert.max_chebyshev_residual));
    }
    Ok(cert)
}
