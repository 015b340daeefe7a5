use super::model::{so_charges, so_path_interaction, so_path_mps, so_spherical_interaction, LambdaProfile};
use crate::chain::{spectral_gap, ChainOperator, SolverConfig, SolverKind};
use crate::error::{Error, Result};
use crate::mps::{isometric_normal_form, transfer_spectrum, MpsFamily};
use crate::numerics::{CMatrix, C64};
use serde::Serialize;

/// Entries below this count as negative when testing positivity.
const POSITIVITY_TOL: f64 = -1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SoTransferReport {
    pub j: usize,
    pub s: f64,
    /// Top eigenvalue, real and positive when the check passes.
    pub top_eigenvalue: C64,
    /// `‖Σ V_α† V_α − 1‖`; nonzero for `J ≥ 2` away from `s0`.
    pub isometry_residual: f64,
    pub top_simple: bool,
    /// Largest modulus among the remaining eigenvalues.
    pub second_modulus: f64,
    /// `1 − second_modulus / |top_eigenvalue|`.
    pub margin: f64,
    /// Smallest diagonal entry of the top right and left eigenvectors, after phase normalization.
    pub min_right_diagonal: f64,
    pub min_left_diagonal: f64,
    /// Most negative real part of any entry of the two top eigenvectors.
    pub most_negative_entry: f64,
    /// Irreducibility of the transfer operator restricted to diagonal matrices.
    pub irreducible: bool,
    /// Top transfer eigenvalue of the isometric normal form, when the Perron fixed point is positive definite.
    pub normal_form_top: Option<C64>,
    pub normal_form_residual: Option<f64>,
}

impl SoTransferReport {
    pub fn passed(&self) -> bool {
        self.top_simple
            && self.top_eigenvalue.re > 0.0
            && self.top_eigenvalue.im.abs() <= 1e-10
            && self.margin > 0.0
            && self.min_right_diagonal > 0.0
            && self.min_left_diagonal > 0.0
            && self.most_negative_entry >= POSITIVITY_TOL
            && self.irreducible
            && self.normal_form_top.is_some_and(|t| (t - 1.0).norm() <= 1e-10)
            && self.normal_form_residual.is_some_and(|r| r <= 1e-10)
    }
}

/// Nonnegative matrix `M[b, a] = Σ_α |V_α[a, b]|²` of the transfer operator on diagonal matrices.
fn diagonal_block(f: &MpsFamily) -> Vec<Vec<f64>> {
    let k = f.k();
    let mut m = vec![vec![0.0; k]; k];
    for v in f.matrices() {
        for a in 0..k {
            for b in 0..k {
                m[b][a] += v[(a, b)].norm_sqr();
            }
        }
    }
    m
}

/// Strong connectivity of the support graph of a nonnegative matrix.
fn is_irreducible(m: &[Vec<f64>]) -> bool {
    let k = m.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..k {
                let w = if forward { m[i][j] } else { m[j][i] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|x| x)
    };
    k == 0 || (reach(true) && reach(false))
}

/// Rotates `m` so its largest-modulus entry is real positive, then returns (min diagonal, most negative entry).
fn positivity(m: &CMatrix) -> (f64, f64) {
    let pivot = m.iter().cloned().fold(C64::new(0.0, 0.0), |acc, z| {
        if z.norm() > acc.norm() {
            z
        } else {
            acc
        }
    });
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    let r = m.mapv(|z| z * phase);
    let min_diag = (0..r.nrows()).map(|i| r[(i, i)].re).fold(f64::INFINITY, f64::min);
    let most_negative = r.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    (min_diag, most_negative)
}

/// Spectral and positivity data of the deformed family's transfer operator.
///
/// The twisted family is exactly isometric only for `J = 1` or at `s0`, so the raw top eigenvalue
/// is reported as is, the remaining spectrum is measured relative to it, and the eigenvalue 1 is
/// certified on the gauge-equivalent isometric normal form.
pub fn so_transfer_report(j: usize, s: f64, profile: &LambdaProfile) -> Result<SoTransferReport> {
    let f = so_path_mps(j, s, profile)?;
    let spec = transfer_spectrum(&f)?;
    let top = spec.eigenvalues[0];
    let second_modulus = spec.eigenvalues.get(1).map_or(0.0, |z| z.norm());
    let top_simple = second_modulus < top.norm() - 1e-10;
    let isometry_residual = f.isometry_residual()?;
    let (min_right_diagonal, neg_r) = positivity(&spec.right[0]);
    let (min_left_diagonal, neg_l) = positivity(&spec.left[0]);
    let normal = isometric_normal_form(&f).ok();
    let normal_form_top = match &normal {
        Some(g) => Some(transfer_spectrum(g)?.eigenvalues[0]),
        None => None,
    };
    let normal_form_residual = normal.as_ref().map(|g| g.isometry_residual()).transpose()?;
    Ok(SoTransferReport {
        j,
        s,
        top_eigenvalue: top,
        isometry_residual,
        top_simple,
        second_modulus,
        margin: 1.0 - second_modulus / top.norm(),
        min_right_diagonal,
        min_left_diagonal,
        most_negative_entry: neg_r.min(neg_l),
        irreducible: is_irreducible(&diagonal_block(&f)),
        normal_form_top,
        normal_form_residual,
    })
}

/// Certifies a simple, real, positive top eigenvalue with positive eigenvectors and a spectral margin.
pub fn so_transfer_check(j: usize, s: f64, profile: &LambdaProfile) -> Result<SoTransferReport> {
    let rep = so_transfer_report(j, s, profile)?;
    if !rep.passed() {
        let why = if !rep.irreducible { "diagonal block is reducible" } else { "Perron-Frobenius structure fails" };
        return Err(Error::certification(format!("transfer check at J={j}, s={s}: {why} ({rep:?})")));
    }
    Ok(rep)
}

/// `dim ker H_{[1,N]}` for the `SO(2J+1)` chain.
pub fn so_ground_space_dim(j: usize, n: usize, cfg: &SolverConfig) -> Result<usize> {
    let op = ChainOperator::new(&so_spherical_interaction(j)?, n)?.with_charges(so_charges(j))?;
    Ok(spectral_gap(&op, None, cfg)?.kernel_dim)
}

#[derive(Debug, Clone, Serialize)]
pub struct SoGapRow {
    pub s: f64,
    pub kernel_dim: usize,
    pub gap: Option<f64>,
    pub ground_energy: f64,
    pub solver: SolverKind,
}

/// Gap of the deformed chain at each `s > 0`, requiring a `4^J`-dimensional kernel.
pub fn so_gap_along_path(
    j: usize,
    n: usize,
    grid: &[f64],
    profile: &LambdaProfile,
    cfg: &SolverConfig,
) -> Result<Vec<SoGapRow>> {
    let expected = 1usize << (2 * j);
    grid.iter()
        .map(|&s| {
            let op = ChainOperator::new(&so_path_interaction(j, s, profile)?, n)?.with_charges(so_charges(j))?;
            let rep = spectral_gap(&op, Some(expected), cfg).map_err(|e| match e {
                Error::Certification(msg) => Error::Certification(format!("s = {s}: {msg}")),
                other => other,
            })?;
            Ok(SoGapRow { s, kernel_dim: rep.kernel_dim, gap: rep.gap, ground_energy: rep.ground_energy, solver: rep.solver })
        })
        .collect()
}
