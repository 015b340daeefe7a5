//! Block Krylov eigensolver for the low end of a Hermitian spectrum.

use super::{inner, norm, C64, CMatrix, CVector};
use crate::error::{Error, Result};
use ndarray::Array1;
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Below this dimension the operator is materialized and solved densely.
const DENSE_FALLBACK_DIM: usize = 64;

/// Vector slice handled per parallel task.
const CHUNK: usize = 4096;

/// Block Krylov steps per Rayleigh-Ritz convergence check.
const RITZ_EVERY: usize = 4;

#[derive(Debug, Clone)]
pub struct KrylovOptions {
    /// Residual bound for accepting a Ritz pair.
    pub tol: f64,
    pub seed: u64,
    /// Krylov basis size per restart cycle.
    pub max_basis: usize,
    pub max_restarts: usize,
    pub want_vectors: bool,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            tol: 1e-10,
            seed: 0xC0FFEE,
            max_basis: 60,
            max_restarts: 400,
            want_vectors: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KrylovResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Empty unless requested.
    pub vectors: Vec<CVector>,
    pub matvecs: usize,
    pub restarts: usize,
}

/// Lowest `how_many` eigenvalues of the Hermitian map `apply`.
pub fn krylov_lowest_eigs<F>(apply: F, dim: usize, how_many: usize, tol: f64, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(&[C64], &mut [C64]),
{
    let opts = KrylovOptions { tol, seed, ..KrylovOptions::default() };
    Ok(krylov_lowest_eigenpairs(apply, dim, how_many, &opts)?.values)
}

pub fn krylov_lowest_eigenpairs<F>(apply: F, dim: usize, how_many: usize, opts: &KrylovOptions) -> Result<KrylovResult>
where
    F: Fn(&[C64], &mut [C64]),
{
    if how_many == 0 || how_many > dim {
        return Err(Error::validation(format!("cannot compute {how_many} eigenvalues in dimension {dim}")));
    }
    if dim <= DENSE_FALLBACK_DIM || 4 * how_many >= dim {
        return dense_fallback(&apply, dim, how_many, opts.want_vectors);
    }
    BlockSolver::new(&apply, dim, opts).run(how_many)
}

fn dense_fallback<F>(apply: &F, dim: usize, how_many: usize, want_vectors: bool) -> Result<KrylovResult>
where
    F: Fn(&[C64], &mut [C64]),
{
    let mut h = CMatrix::zeros((dim, dim));
    let mut e = vec![C64::new(0.0, 0.0); dim];
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        e[j] = C64::new(1.0, 0.0);
        apply(&e, &mut out);
        h.column_mut(j).assign(&Array1::from(out.clone()));
        e[j] = C64::new(0.0, 0.0);
    }
    let h = (&h + &super::dagger(&h)).mapv(|z| z * 0.5);
    let (values, vectors) = super::eigen::eigh_column_major(&h)?;
    Ok(KrylovResult {
        values: values.iter().take(how_many).cloned().collect(),
        vectors: if want_vectors {
            (0..how_many).map(|j| vectors.column(j).to_owned()).collect()
        } else {
            Vec::new()
        },
        matvecs: dim,
        restarts: 0,
    })
}

/// Block Rayleigh-Ritz on a growing subspace, expanded by Ritz residuals and thick-restarted.
///
/// Without preconditioning the residual expansion spans the same block Krylov space as block
/// Lanczos; the block start resolves degenerate eigenvalues up to the block size.
struct BlockSolver<'a, F> {
    apply: &'a F,
    dim: usize,
    opts: &'a KrylovOptions,
    rng: ChaCha8Rng,
    basis: Vec<Vec<C64>>,
    images: Vec<Vec<C64>>,
    /// Projected matrix `⟨v_i, A v_j⟩`, row-major by basis index.
    projected: Vec<Vec<C64>>,
    matvecs: usize,
}

struct RitzPair {
    value: f64,
    vector: Vec<C64>,
    image: Vec<C64>,
    residual: Vec<C64>,
    residual_norm: f64,
}

impl<'a, F> BlockSolver<'a, F>
where
    F: Fn(&[C64], &mut [C64]),
{
    fn new(apply: &'a F, dim: usize, opts: &'a KrylovOptions) -> Self {
        BlockSolver {
            apply,
            dim,
            opts,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            basis: Vec::new(),
            images: Vec::new(),
            projected: Vec::new(),
            matvecs: 0,
        }
    }

    fn random_vector(&mut self) -> Vec<C64> {
        (0..self.dim)
            .map(|_| C64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0)))
            .collect()
    }

    /// Orthogonalizes `w` against the basis and appends it with its image; false if it was dependent.
    fn push(&mut self, mut w: Vec<C64>) -> bool {
        let before = norm(&w);
        if before == 0.0 {
            return false;
        }
        // Two passes of classical Gram-Schmidt.
        for _ in 0..2 {
            let coeffs: Vec<C64> = self.basis.par_iter().map(|b| inner(b, &w)).collect();
            w.par_chunks_mut(CHUNK).enumerate().for_each(|(c, part)| {
                let off = c * CHUNK;
                for (b, k) in self.basis.iter().zip(&coeffs) {
                    for (x, y) in part.iter_mut().zip(&b[off..]) {
                        *x -= k * y;
                    }
                }
            });
        }
        let after = norm(&w);
        if after <= 1e-10 * before {
            return false;
        }
        w.iter_mut().for_each(|z| *z /= after);
        let mut aw = vec![C64::new(0.0, 0.0); self.dim];
        (self.apply)(&w, &mut aw);
        self.matvecs += 1;
        let k = self.basis.len();
        let cross: Vec<(C64, C64)> =
            (0..k).into_par_iter().map(|i| (inner(&self.basis[i], &aw), inner(&w, &self.images[i]))).collect();
        for (i, &(a, b)) in cross.iter().enumerate() {
            self.projected[i].push(a);
            if i == 0 {
                self.projected.push(Vec::with_capacity(k + 1));
            }
            self.projected[k].push(b);
        }
        if k == 0 {
            self.projected.push(Vec::new());
        }
        self.projected[k].push(inner(&w, &aw));
        self.basis.push(w);
        self.images.push(aw);
        true
    }

    fn combine(columns: &[Vec<C64>], coeffs: ndarray::ArrayView1<C64>) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); columns[0].len()];
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, part)| {
            let off = c * CHUNK;
            for (col, s) in columns.iter().zip(coeffs.iter()) {
                for (x, z) in part.iter_mut().zip(&col[off..]) {
                    *x += s * z;
                }
            }
        });
        y
    }

    /// Eigen-decomposition of the projected matrix, ascending.
    fn projected_eigen(&self) -> Result<(Array1<f64>, CMatrix)> {
        let m = self.basis.len();
        let t = CMatrix::from_shape_fn((m, m), |(i, j)| 0.5 * (self.projected[i][j] + self.projected[j][i].conj()));
        super::eigen::eigh_column_major(&t)
    }

    /// Ritz pairs `0..count` from a projected eigen-decomposition.
    fn ritz(&self, values: &Array1<f64>, vectors: &CMatrix, count: usize) -> Vec<RitzPair> {
        (0..count.min(values.len()))
            .map(|i| {
                let vector = Self::combine(&self.basis, vectors.column(i));
                let image = Self::combine(&self.images, vectors.column(i));
                let residual: Vec<C64> = image.iter().zip(&vector).map(|(a, v)| a - v * values[i]).collect();
                let residual_norm = norm(&residual);
                RitzPair { value: values[i], vector, image, residual, residual_norm }
            })
            .collect()
    }

    fn restart(&mut self, kept: Vec<RitzPair>) {
        let k = kept.len();
        self.basis.clear();
        self.images.clear();
        self.projected = (0..k)
            .map(|i| (0..k).map(|j| if i == j { C64::new(kept[i].value, 0.0) } else { C64::new(0.0, 0.0) }).collect())
            .collect();
        for p in kept {
            self.basis.push(p.vector);
            self.images.push(p.image);
        }
    }

    fn run(mut self, how_many: usize) -> Result<KrylovResult> {
        let block = how_many.min(8);
        let max_basis = self.opts.max_basis.max(3 * how_many + 2 * block).min(self.dim);
        let budget = self.opts.max_restarts.saturating_mul(max_basis);
        let keep = how_many + block;
        let mut restarts = 0;
        let mut pending: Vec<Vec<C64>> = (0..block).map(|_| self.random_vector()).collect();
        let mut steps = 0;
        loop {
            let first_new = self.basis.len();
            for w in pending.drain(..) {
                if self.basis.len() < self.dim {
                    self.push(w);
                }
            }
            if self.basis.len() == first_new && self.basis.len() < self.dim {
                let w = self.random_vector();
                self.push(w);
            }
            steps += 1;
            let full = self.basis.len() == self.dim;
            // Plain block Krylov steps between Rayleigh-Ritz checks.
            if !full && steps % RITZ_EVERY != 0 && self.basis.len() + block <= max_basis {
                pending = self.images[first_new..].to_vec();
                continue;
            }
            let (values, vectors) = self.projected_eigen()?;
            let wanted = self.ritz(&values, &vectors, how_many);
            let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let tol = self.opts.tol.max(1e-13 * scale);
            let converged = wanted.len() == how_many && wanted.iter().all(|p| p.residual_norm <= tol);
            if converged || full {
                return Ok(KrylovResult {
                    values: wanted.iter().map(|p| p.value).collect(),
                    vectors: if self.opts.want_vectors {
                        wanted.into_iter().map(|p| Array1::from(p.vector)).collect()
                    } else {
                        Vec::new()
                    },
                    matvecs: self.matvecs,
                    restarts,
                });
            }
            if self.matvecs >= budget {
                let done = wanted.iter().filter(|p| p.residual_norm <= tol).count();
                return Err(Error::Solver {
                    iterations: self.matvecs,
                    reason: format!("{done} of {how_many} eigenpairs converged"),
                });
            }
            pending = wanted.iter().filter(|p| p.residual_norm > tol).take(block).map(|p| p.residual.clone()).collect();
            if self.basis.len() + pending.len() > max_basis {
                restarts += 1;
                let kept = self.ritz(&values, &vectors, keep);
                self.restart(kept);
            }
        }
    }
}
