use super::model::path_mps;
use super::{PathPoint, PathSchedule};
use crate::error::{Error, Result};
use crate::mps::gamma_map;
use crate::numerics::{checked_power, inner, real_matrix, CMatrix, CVector, MAX_STATE_DIM};
use ndarray::Array2;

/// Where the continuous extension to `s = 0` is evaluated.
pub const ZETA_ORIGIN_S: f64 = 1e-8;

/// Powers of the transfer eigenvalues, arranged so that differences vanishing at `s = 0`
/// are computed without cancellation.
struct Powers {
    /// `(1 − sin²)^N − 1`.
    e1: f64,
    /// `f^{2N} (1 − sin²)^N − t4^N`.
    d1: f64,
    /// `t4^N`.
    t4n: f64,
    /// `f^{2N}`.
    f2n: f64,
}

impl Powers {
    fn new(p: &PathPoint, n: usize) -> Self {
        let nf = n as f64;
        let sigma = p.sin * p.sin;
        let f2 = p.f * p.f;
        let log_c2 = (-sigma).ln_1p();
        let e1 = (nf * log_c2).exp_m1();
        let f2n = f2.powi(n as i32);
        let u = sigma / (f2 * (1.0 - sigma));
        let (t4n, d1) = if u < 1.0 {
            let scale = f2n * (nf * log_c2).exp();
            let rel = (nf * (-u).ln_1p()).exp_m1();
            (scale * (1.0 + rel), -scale * rel)
        } else {
            let t4n = p.t4.powi(n as i32);
            (t4n, f2n * (1.0 + e1) - t4n)
        };
        Powers { e1, d1, t4n, f2n }
    }
}

fn neg_f_pow(p: &PathPoint, n: usize) -> f64 {
    (-p.f).powi(n as i32)
}

/// `q_N(s)`, the coefficient making `ζ¹ ⟂ ζ⁴`.
pub fn q_coefficient(p: &PathPoint, n: usize) -> f64 {
    let w = Powers::new(p, n);
    let num = neg_f_pow(p, n) * (w.e1 + p.rho2 * (1.0 - w.t4n));
    let den = w.d1 - p.rho2 * (1.0 - w.t4n);
    num / den
}

/// Closed-form `‖ζ^μ_N‖²` for `μ = 1..4`.
pub fn closed_form_norms_sq(p: &PathPoint, n: usize, q: f64) -> [f64; 4] {
    let w = Powers::new(p, n);
    let t2n = p.t2.powi(n as i32);
    let n1 = (p.rho1 + p.rho2 * w.t4n) + 2.0 * q * t2n + q * q * (p.rho2 + p.rho1 * w.t4n);
    let n2 = p.rho1 * (1.0 - w.t4n);
    // ρ2 + ρ1 t4^N + f^{2N}(ρ1 + ρ2 t4^N) − 2 (−f)^N t2^N, regrouped.
    let bracket = p.rho2 * (1.0 - w.t4n) * (1.0 - w.f2n) - w.d1 - w.f2n * w.e1;
    let n4 = p.g * p.g / (p.sin * p.sin) * bracket;
    [n1, n2, n2, n4]
}

/// Orthogonal basis of the four-dimensional ground space on `N` sites.
#[derive(Debug, Clone)]
pub struct ZetaBasis {
    pub s: f64,
    /// Differs from `s` only at the origin, see `ZETA_ORIGIN_S`.
    pub evaluated_at: f64,
    pub n: usize,
    pub q: f64,
    pub a_matrices: [CMatrix; 4],
    pub vectors: Vec<CVector>,
    pub closed_form_norms_sq: [f64; 4],
}

impl ZetaBasis {
    pub fn gram(&self) -> CMatrix {
        Array2::from_shape_fn((4, 4), |(a, b)| {
            inner(self.vectors[a].as_slice().unwrap(), self.vectors[b].as_slice().unwrap())
        })
    }

    /// Largest `|⟨ζ^μ, ζ^ν⟩|` for `μ ≠ ν`, relative to the norms.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    worst = worst.max(g[(a, b)].norm() / (g[(a, a)].re * g[(b, b)].re).sqrt());
                }
            }
        }
        worst
    }

    /// Largest `|‖ζ^μ‖² − closed form|`.
    pub fn norm_mismatch(&self) -> f64 {
        self.vectors
            .iter()
            .zip(self.closed_form_norms_sq)
            .map(|(v, cf)| (v.iter().map(|z| z.norm_sqr()).sum::<f64>() - cf).abs())
            .fold(0.0, f64::max)
    }

    /// The `4 × 3^N` matrix with the basis vectors as rows.
    pub fn as_rows(&self) -> CMatrix {
        Array2::from_shape_fn((4, self.vectors[0].len()), |(a, w)| self.vectors[a][w])
    }
}

/// The four vectors `Γ_N(A^μ_N(s))`, extended to `s = 0` by evaluating at `ZETA_ORIGIN_S`.
pub fn zeta_basis(s: f64, n: usize, sched: &PathSchedule) -> Result<ZetaBasis> {
    if n < 2 {
        return Err(Error::validation("the zeta basis needs N >= 2"));
    }
    let dim = checked_power(3, n)?;
    if dim > MAX_STATE_DIM {
        return Err(Error::Size { requested: dim as u128, limit: MAX_STATE_DIM });
    }
    sched.check(s)?;
    let at = if s == 0.0 { ZETA_ORIGIN_S } else { s };
    let p = sched.point(at)?;
    let q = q_coefficient(&p, n);
    let ratio = p.g / p.sin;
    let fn_ = neg_f_pow(&p, n);
    let a_matrices = [
        real_matrix(&[&[1.0, 0.0], &[0.0, q]]),
        real_matrix(&[&[0.0, 0.0], &[1.0, 0.0]]),
        real_matrix(&[&[0.0, ratio], &[0.0, 0.0]]),
        real_matrix(&[&[ratio * fn_, 0.0], &[0.0, -ratio]]),
    ];
    let f = path_mps(at, sched)?;
    let mut vectors = a_matrices.iter().map(|a| gamma_map(&f, n, a)).collect::<Result<Vec<_>>>()?;
    // The all-w0 word cancels exactly in ζ⁴; rounding there is amplified by g/sin.
    vectors[3][0] = num_complex::Complex64::new(0.0, 0.0);
    Ok(ZetaBasis {
        s,
        evaluated_at: at,
        n,
        q,
        a_matrices,
        vectors,
        closed_form_norms_sq: closed_form_norms_sq(&p, n, q),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{path_interaction, s0, uniform_grid};
    use super::*;
    use crate::mps::ground_space;
    use crate::numerics::{orthonormal_frame_of_span, subspace_distance, DEFAULT_RANK_TOL};

    fn sched() -> PathSchedule {
        PathSchedule::standard()
    }

    /// Direct evaluation, accurate away from the origin.
    fn q_direct(p: &PathPoint, n: usize) -> f64 {
        let (t2n, t4n, fn_) = (p.t2.powi(n as i32), p.t4.powi(n as i32), (-p.f).powi(n as i32));
        (t2n - fn_ * (p.rho1 + p.rho2 * t4n)) / (t2n * fn_ - (p.rho2 + p.rho1 * t4n))
    }

    #[test]
    fn stable_q_agrees_with_direct_formula() {
        let sc = sched();
        for s in uniform_grid(&sc, 12).into_iter().skip(1) {
            let p = sc.point(s).unwrap();
            for n in [2, 3, 7, 20] {
                let (a, b) = (q_coefficient(&p, n), q_direct(&p, n));
                assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "s={s} n={n}: {a} vs {b}");
            }
        }
        let p = sc.point(0.4).unwrap();
        assert!((q_coefficient(&p, 2) - p.f * p.f).abs() < 1e-13);
    }

    #[test]
    fn two_site_vectors_span_the_kernel() {
        let sc = sched();
        for s in [0.0, 0.2, 0.7, s0()] {
            let z = zeta_basis(s, 2, &sc).unwrap();
            let p = sc.point(z.evaluated_at).unwrap();
            let (f, g, sn, c2) = (p.f, p.g, p.sin, p.cos * p.cos);
            // Reference vectors indexed by (a, b) ↦ 3a + b with basis (0, +, −).
            let mut refs = vec![vec![0.0; 9]; 4];
            refs[0][7] = -f * f * g * sn;
            refs[0][0] = c2 * (1.0 + f.powi(4));
            refs[0][5] = -g * sn;
            refs[1][2] = -f;
            refs[1][6] = 1.0;
            refs[2][3] = -f;
            refs[2][1] = 1.0;
            refs[3][7] = 1.0;
            refs[3][5] = -f * f;
            for (v, r) in z.vectors.iter().zip(&refs) {
                let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                let nr = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                let ov: f64 = v.iter().zip(r).map(|(a, b)| a.re * b).sum();
                assert!((ov.abs() - nv * nr).abs() <= 1e-10 * nv * nr, "s={s}");
            }
            let frame = orthonormal_frame_of_span(&z.as_rows().t().to_owned(), DEFAULT_RANK_TOL).unwrap();
            let ker = path_interaction(s, &sc).unwrap().kernel_frame().unwrap();
            assert!(subspace_distance(&frame, &ker).unwrap() <= 1e-7, "s={s}");
        }
    }

    #[test]
    fn orthogonality_and_norms() {
        let sc = sched();
        for s in uniform_grid(&sc, 9).into_iter().skip(1) {
            for n in [2, 3, 4, 6] {
                let z = zeta_basis(s, n, &sc).unwrap();
                assert!(z.orthogonality_defect() <= 1e-10, "s={s} n={n}: {}", z.orthogonality_defect());
                assert!(z.norm_mismatch() <= 1e-10, "s={s} n={n}: {}", z.norm_mismatch());
                let frame = orthonormal_frame_of_span(&z.as_rows().t().to_owned(), DEFAULT_RANK_TOL).unwrap();
                let g = ground_space(&path_mps(s, &sc).unwrap(), n).unwrap();
                assert!(subspace_distance(&frame, &g).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn origin_extension_is_stable() {
        let sc = sched();
        for n in [2, 4, 5] {
            let a = zeta_basis(0.0, n, &sc).unwrap();
            let b = zeta_basis(1e-6, n, &sc).unwrap();
            assert!(a.orthogonality_defect() <= 1e-10);
            assert!(a.norm_mismatch() <= 1e-8, "{}", a.norm_mismatch());
            for (u, v) in a.vectors.iter().zip(&b.vectors) {
                let diff = u.iter().zip(v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                // The vectors move linearly in s, so the two evaluations differ by O(1e-6).
                assert!(diff <= 1e-5, "n={n}: {diff}");
            }
        }
    }

    #[test]
    fn norms_approach_one_near_the_origin_for_long_chains() {
        let sc = sched();
        let p = sc.point(1e-3).unwrap();
        let q = q_coefficient(&p, 200);
        for v in closed_form_norms_sq(&p, 200, q) {
            assert!((v.sqrt() - 1.0).abs() <= 1e-3, "{v}");
        }
    }
}
