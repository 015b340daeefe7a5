//! Parameter sweeps over model families, one spectral-gap computation per grid point.

use crate::aklt::{path_interaction, sz_charges, PathSchedule, PATH_KERNEL_DIM};
use crate::chain::{spectral_gap, ChainOperator, SolverConfig, SolverKind};
use crate::error::{Error, Result};
use crate::interaction::NearestNeighborInteraction;
use crate::numerics::C64;
use crate::pvbs::{particle_charges, pvbs_interaction, PvbsParams};
use crate::so::{so_charges, so_path_interaction, so_s0, LambdaProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};

/// Explicit points, or a count of evenly spaced ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Points(Vec<f64>),
    Count(usize),
}

impl Grid {
    /// Evenly spaced counts cover `[0, end]` when `include_origin`, otherwise `(0, end]`.
    pub fn points(&self, end: f64, include_origin: bool) -> Vec<f64> {
        match *self {
            Grid::Points(ref p) => p.clone(),
            Grid::Count(0) => vec![],
            Grid::Count(1) => vec![end],
            Grid::Count(n) if include_origin => (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect(),
            Grid::Count(n) => (1..=n).map(|i| end * i as f64 / n as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelFamily {
    /// One chain per entry of `lambdas`, all with the same phases.
    Pvbs {
        lambdas: Vec<Vec<f64>>,
        #[serde(default)]
        theta: BTreeMap<String, f64>,
    },
    AkltPath {
        grid: Grid,
        #[serde(default)]
        delta: Option<f64>,
    },
    SoPath {
        #[serde(rename = "J")]
        j: usize,
        grid: Grid,
        #[serde(default)]
        lambda0: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(flatten)]
    pub family: ModelFamily,
    pub n_sites: Vec<usize>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

/// One model instance: its id, parameter description, interaction and charges.
struct Instance {
    model_id: String,
    parameters: String,
    s: Option<f64>,
    h: NearestNeighborInteraction,
    charges: Vec<Vec<i32>>,
    expected_kernel: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model_id: String,
    pub parameters: String,
    pub s: Option<f64>,
    pub n_sites: usize,
    pub dim: Option<usize>,
    pub ground_energy: Option<f64>,
    pub kernel_dim: Option<usize>,
    pub expected_kernel_dim: Option<usize>,
    pub gap: Option<f64>,
    pub solver: Option<SolverKind>,
    pub sectors: Option<usize>,
    pub wall_time: Option<f64>,
    /// Set when this row failed; the other result columns are then empty.
    pub error: Option<String>,
    /// Exit code of the row's error.
    #[serde(default)]
    pub error_code: Option<i32>,
}

fn format_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(" "))
}

/// `re+imi`, e.g. `0.5-0.25i`.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// Inverse of [`format_complex`].
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::validation(format!("not a complex number of the form re+imi: {s:?}"));
    let body = s.strip_suffix('i').ok_or_else(bad)?;
    // The sign separating the parts is the last '+' or '-' not following an exponent marker.
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, ch)| (ch == '+' || ch == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last()
        .ok_or_else(bad)?;
    let re = body[..split].parse().map_err(|_| bad())?;
    let im = body[split..].parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

fn instances(family: &ModelFamily) -> Result<Vec<Result<Instance>>> {
    let out: Vec<Result<Instance>> = match family {
        ModelFamily::Pvbs { lambdas, theta } => lambdas
            .iter()
            .map(|l| {
                let mut p = PvbsParams::new(l.clone())?;
                for (key, &v) in theta {
                    let (i, j) = key
                        .split_once(',')
                        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                        .ok_or_else(|| Error::validation(format!("theta key {key:?} is not of the form \"i,j\"")))?;
                    p = p.with_theta(i, j, v)?;
                }
                Ok(Instance {
                    model_id: format!("pvbs(n={})", p.n()),
                    parameters: format!("lambda={}", format_list(l)),
                    s: None,
                    h: pvbs_interaction(&p)?,
                    charges: particle_charges(&p),
                    expected_kernel: p.is_gapped_admissible().then(|| 1 << p.n()),
                })
            })
            .collect(),
        ModelFamily::AkltPath { grid, delta } => {
            let sched = match delta {
                Some(d) => PathSchedule::standard().with_delta(*d)?,
                None => PathSchedule::standard(),
            };
            grid.points(sched.s0, true)
                .into_iter()
                .map(|s| {
                    Ok(Instance {
                        model_id: "aklt-path".into(),
                        parameters: format!("delta={}", sched.delta),
                        s: Some(s),
                        h: path_interaction(s, &sched)?,
                        charges: sz_charges(),
                        expected_kernel: Some(PATH_KERNEL_DIM),
                    })
                })
                .collect()
        }
        ModelFamily::SoPath { j, grid, lambda0 } => {
            let profile = match lambda0 {
                Some(l) => LambdaProfile::new(l.clone())?,
                None => LambdaProfile::uniform(*j),
            };
            grid.points(so_s0(*j), false)
                .into_iter()
                .map(|s| {
                    Ok(Instance {
                        model_id: format!("so{}-path", 2 * j + 1),
                        parameters: format!("lambda0={}", format_list(&profile.lambda0)),
                        s: Some(s),
                        h: so_path_interaction(*j, s, &profile)?,
                        charges: so_charges(*j),
                        expected_kernel: Some(1 << (2 * j)),
                    })
                })
                .collect()
        }
    };
    if out.is_empty() {
        return Err(Error::validation("the parameter grid is empty"));
    }
    Ok(out)
}

fn run_one(inst: &Result<Instance>, n: usize, cfg: &SolverConfig) -> SweepRow {
    let mut row = SweepRow {
        model_id: String::new(),
        parameters: String::new(),
        s: None,
        n_sites: n,
        dim: None,
        ground_energy: None,
        kernel_dim: None,
        expected_kernel_dim: None,
        gap: None,
        solver: None,
        sectors: None,
        wall_time: None,
        error: None,
        error_code: None,
    };
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            row.error = Some(e.to_string());
            row.error_code = Some(e.exit_code());
            return row;
        }
    };
    row.model_id = inst.model_id.clone();
    row.parameters = inst.parameters.clone();
    row.s = inst.s;
    row.expected_kernel_dim = inst.expected_kernel;
    let report = ChainOperator::new(&inst.h, n)
        .and_then(|op| op.with_charges(inst.charges.clone()))
        .and_then(|op| spectral_gap(&op, inst.expected_kernel, cfg));
    match report {
        Ok(r) => {
            row.dim = Some(r.dim);
            row.ground_energy = Some(r.ground_energy);
            row.kernel_dim = Some(r.kernel_dim);
            row.gap = r.gap;
            row.solver = Some(r.solver);
            row.sectors = Some(r.sectors);
            row.wall_time = Some(r.wall_time);
        }
        Err(e) => {
            row.error = Some(e.to_string());
            row.error_code = Some(e.exit_code());
        }
    }
    row
}

/// Runs every (grid point, chain length) pair; failures are recorded in their row.
///
/// Rows come back in grid order, then chain-length order, independent of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.n_sites.is_empty() {
        return Err(Error::validation("n_sites is empty"));
    }
    if let Some(&n) = cfg.n_sites.iter().find(|&&n| n < 2) {
        return Err(Error::validation(format!("chains need at least two sites, got {n}")));
    }
    let insts = instances(&cfg.family)?;
    let jobs: Vec<(usize, usize)> = (0..insts.len()).flat_map(|i| cfg.n_sites.iter().map(move |&n| (i, n))).collect();
    let work = || jobs.par_iter().map(|&(i, n)| run_one(&insts[i], n, &cfg.solver)).collect();
    match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::validation(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect()
}
