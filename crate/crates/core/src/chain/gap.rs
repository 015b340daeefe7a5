use super::{ChainOperator, Sectors, DEFAULT_DENSE_CEILING};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, krylov_lowest_eigs, DEFAULT_RANK_TOL};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Dense for small blocks, Krylov otherwise.
    #[default]
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Krylov,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Dense => "dense",
            SolverKind::Krylov => "krylov",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub solver: SolverChoice,
    /// Largest block handled densely when `solver` is `Dense`.
    pub dense_ceiling: usize,
    /// Largest block handled densely when `solver` is `Auto`.
    pub dense_block_limit: usize,
    pub krylov_tol: f64,
    pub seed: u64,
    /// Eigenvalues below `cluster_rel_tol · ‖H‖` count as zero.
    pub cluster_rel_tol: f64,
    pub use_sectors: bool,
    /// Eigenvalues requested per block when no kernel dimension is expected.
    pub initial_count: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            solver: SolverChoice::Auto,
            dense_ceiling: DEFAULT_DENSE_CEILING,
            dense_block_limit: 400,
            krylov_tol: 1e-10,
            seed: 0xC0FFEE,
            cluster_rel_tol: 1e-9,
            use_sectors: true,
            initial_count: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    pub kernel_threshold: f64,
    pub krylov_tol: f64,
    pub rank_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub model_id: String,
    pub n_sites: usize,
    pub dim: usize,
    pub ground_energy: f64,
    pub kernel_dim: usize,
    /// Smallest eigenvalue above the kernel threshold; `None` if the whole space is kernel.
    pub gap: Option<f64>,
    pub solver: SolverKind,
    pub sectors: usize,
    pub tolerances: Tolerances,
    pub wall_time: f64,
}

impl SpectrumReport {
    pub fn gap_or_zero(&self) -> f64 {
        self.gap.unwrap_or(0.0)
    }
}

fn block_lowest(op: &ChainOperator, sectors: &Sectors, s: usize, count: usize, cfg: &SolverConfig) -> Result<(Vec<f64>, SolverKind)> {
    let size = sectors.members(s).len();
    let dense = match cfg.solver {
        SolverChoice::Dense => {
            if size > cfg.dense_ceiling {
                return Err(Error::Size { requested: size as u128, limit: cfg.dense_ceiling });
            }
            true
        }
        SolverChoice::Auto => size <= cfg.dense_block_limit,
        SolverChoice::Krylov => false,
    };
    if dense {
        let vals = hermitian_eigenvalues(&op.dense_block(sectors, s)?)?;
        return Ok((vals.to_vec(), SolverKind::Dense));
    }
    let seed = cfg.seed.wrapping_add(s as u64);
    let vals = krylov_lowest_eigs(|x, y| op.apply_block(sectors, s, x, y), size, count.min(size), cfg.krylov_tol, seed)?;
    Ok((vals, SolverKind::Krylov))
}

/// Kernel dimension and smallest nonzero eigenvalue of a frustration-free chain.
pub fn spectral_gap(op: &ChainOperator, expected_kernel: Option<usize>, cfg: &SolverConfig) -> Result<SpectrumReport> {
    let start = Instant::now();
    let threshold = cfg.cluster_rel_tol * op.norm_bound().max(1.0);
    let sectors = if cfg.use_sectors { op.sectors() } else { Sectors::trivial(op.dim()) };
    let target = expected_kernel.map_or(cfg.initial_count, |m| m + 1).max(1);
    let mut used = SolverKind::Dense;
    let mut all = Vec::new();
    for s in 0..sectors.len() {
        let size = sectors.members(s).len();
        let mut count = target.min(size);
        loop {
            let (vals, kind) = block_lowest(op, &sectors, s, count, cfg)?;
            if kind == SolverKind::Krylov {
                used = SolverKind::Krylov;
            }
            let all_zero = vals.iter().all(|&v| v <= threshold);
            if all_zero && vals.len() < size {
                count = (2 * count).min(size);
                continue;
            }
            all.extend(vals);
            break;
        }
    }
    all.sort_by(f64::total_cmp);
    let kernel_dim = all.iter().take_while(|&&v| v <= threshold).count();
    let report = SpectrumReport {
        model_id: op.interaction().model().to_string(),
        n_sites: op.n_sites(),
        dim: op.dim(),
        ground_energy: all[0],
        kernel_dim,
        gap: all.get(kernel_dim).copied(),
        solver: used,
        sectors: sectors.len(),
        tolerances: Tolerances { kernel_threshold: threshold, krylov_tol: cfg.krylov_tol, rank_tol: DEFAULT_RANK_TOL },
        wall_time: start.elapsed().as_secs_f64(),
    };
    if let Some(m) = expected_kernel {
        if m != kernel_dim {
            return Err(Error::certification(format!(
                "{} on {} sites: expected kernel dimension {m}, found {kernel_dim}",
                report.model_id, report.n_sites
            )));
        }
    }
    Ok(report)
}
