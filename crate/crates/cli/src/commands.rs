use super::{Command, Common, MartingaleModel, PvbsArgs, SolverArg};
use pvbs_core::aklt::{path_interaction, path_mps, s0, sz_charges, PathSchedule, PATH_KERNEL_DIM};
use pvbs_core::chain::{spectral_gap, ChainOperator, SolverChoice, SolverConfig};
use pvbs_core::mps::{martingale_coefficient_for_family, martingale_gap_bound, spectrum_distance, transfer_spectrum};
use pvbs_core::pvbs::{
    classify, one_particle_gap_certificate, particle_charges, pvbs_interaction, pvbs_mps,
    pvbs_transfer_spectrum_closed_form, PvbsParams,
};
use pvbs_core::so::{clifford_rep, so_s0, so_transfer_report, LambdaProfile};
use pvbs_core::sweep::{format_complex, run_sweep, write_csv, Grid, ModelFamily, SweepConfig, SweepRow};
use pvbs_core::verify::{verify, Bundle, VerifyConfig};
use pvbs_core::{Error, Result};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

const CERTIFICATION_FAILURE: u8 = 3;

pub fn run(command: Command, common: &Common) -> Result<u8> {
    match command {
        Command::PvbsGap { params, sites } => {
            let family = ModelFamily::Pvbs { lambdas: vec![params.lambda.clone()], theta: theta_map(&params) };
            sweep_and_emit(family, sites, common)
        }
        Command::PvbsClassify { params } => {
            let label = classify(&build_params(&params)?)?;
            let text = format!("left-bound types: {}, right-bound types: {}", label.n_left, label.n_right);
            emit(common, serde_json::to_value(label)?, &text);
            Ok(0)
        }
        Command::PvbsOneParticle { lambda, n_max } => {
            let cert = one_particle_gap_certificate(lambda, n_max)?;
            let text = format!(
                "lambda = {lambda}: min gap {:.6} over N = 2..{n_max}, limit {:.6}, {}",
                cert.min_gap,
                cert.limit,
                if cert.passed { "certified" } else { "FAILED" }
            );
            let passed = cert.passed;
            emit(common, serde_json::to_value(cert)?, &text);
            Ok(if passed { 0 } else { CERTIFICATION_FAILURE })
        }
        Command::TransferSpectrum { lambda, thetas, s } => transfer(lambda, thetas, s, common),
        Command::AkltPath { sites, points, delta } => {
            sweep_and_emit(ModelFamily::AkltPath { grid: Grid::Count(points), delta }, sites, common)
        }
        Command::Martingale { model, k, sites, lambda, s } => martingale(model, k, &sites, lambda, s, common),
        Command::SoModels { j, sites, points, lambda0 } => so_models(j, sites, points, lambda0, common),
        Command::Sweep => {
            let path = common.config.as_ref().ok_or_else(|| Error::validation("sweep needs --config"))?;
            let mut cfg: SweepConfig = read_json(path)?;
            apply_overrides(&mut cfg.solver, common);
            let rows = run_sweep(&cfg)?;
            emit_rows(&rows, common)
        }
        Command::Verify { bundle, delta } => {
            let mut cfg: VerifyConfig = match &common.config {
                Some(path) => read_json(path)?,
                None => VerifyConfig::default(),
            };
            apply_overrides(&mut cfg.solver, common);
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if delta.is_some() {
                cfg.delta = delta;
            }
            let verdicts = verify(bundle.parse::<Bundle>()?, &cfg)?;
            let all_passed = verdicts.iter().all(|v| v.passed);
            if common.json {
                println!("{}", serde_json::to_string_pretty(&verdicts)?);
            } else {
                for v in &verdicts {
                    println!("{} {:>2} {} ({:.1}s)", if v.passed { "PASS" } else { "FAIL" }, v.id, v.name, v.seconds);
                    if !v.passed {
                        println!("     {}", v.detail);
                    }
                }
            }
            Ok(if all_passed { 0 } else { CERTIFICATION_FAILURE })
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

fn apply_overrides(cfg: &mut SolverConfig, common: &Common) {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = common.tol {
        cfg.krylov_tol = tol;
    }
    if let Some(choice) = common.solver {
        cfg.solver = match choice {
            SolverArg::Auto => SolverChoice::Auto,
            SolverArg::Dense => SolverChoice::Dense,
            SolverArg::Krylov => SolverChoice::Krylov,
        };
    }
}

/// Solver settings from `--config` (if any) with the command-line overrides applied.
fn solver_config(common: &Common) -> Result<SolverConfig> {
    let mut cfg = match &common.config {
        Some(path) => read_json(path)?,
        None => SolverConfig::default(),
    };
    apply_overrides(&mut cfg, common);
    Ok(cfg)
}

fn theta_map(p: &PvbsArgs) -> BTreeMap<String, f64> {
    p.thetas.iter().cloned().collect()
}

fn build_params(p: &PvbsArgs) -> Result<PvbsParams> {
    let raw = json!({ "lambda": p.lambda, "theta": theta_map(p) });
    Ok(serde_json::from_value(raw)?)
}

fn emit(common: &Common, value: Value, text: &str) {
    if common.json {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("{text}");
    }
}

fn sweep_and_emit(family: ModelFamily, sites: Vec<usize>, common: &Common) -> Result<u8> {
    let cfg = SweepConfig { family, n_sites: sites, solver: solver_config(common)?, workers: None };
    emit_rows(&run_sweep(&cfg)?, common)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.10}"))
}

/// Prints or saves sweep rows; the exit code is that of the first failed row.
fn emit_rows(rows: &[SweepRow], common: &Common) -> Result<u8> {
    if let Some(path) = &common.out {
        write_csv(rows, File::create(path)?)?;
    }
    if common.json {
        println!("{}", serde_json::to_string_pretty(rows)?);
    } else {
        println!("{:<16} {:>10} {:>4} {:>8} {:>6} {:>14}", "model", "s", "N", "dim", "kernel", "gap");
        for r in rows {
            match &r.error {
                Some(e) => println!("{:<16} {:>10} {:>4} error: {e}", r.model_id, fmt_s(r.s), r.n_sites),
                None => println!(
                    "{:<16} {:>10} {:>4} {:>8} {:>6} {:>14}",
                    r.model_id,
                    fmt_s(r.s),
                    r.n_sites,
                    r.dim.unwrap_or(0),
                    r.kernel_dim.unwrap_or(0),
                    fmt_opt(r.gap)
                ),
            }
        }
    }
    Ok(rows.iter().find_map(|r| r.error_code).map_or(0, |c| c as u8))
}

fn fmt_s(s: Option<f64>) -> String {
    s.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

fn transfer(lambda: Vec<f64>, thetas: Vec<(String, f64)>, s: Option<f64>, common: &Common) -> Result<u8> {
    let (numeric, closed) = match s {
        Some(s) => {
            let sched = PathSchedule::standard();
            let p = sched.point(s)?;
            let closed: Vec<_> = p.eigenvalues().iter().map(|&x| pvbs_core::numerics::C64::new(x, 0.0)).collect();
            (transfer_spectrum(&path_mps(s, &sched)?)?, closed)
        }
        None if lambda.is_empty() => return Err(Error::validation("give --lambda or --s")),
        None => {
            let p = build_params(&PvbsArgs { lambda, thetas })?;
            (transfer_spectrum(&pvbs_mps(&p)?)?, pvbs_transfer_spectrum_closed_form(&p).values)
        }
    };
    let distance = spectrum_distance(&closed, &numeric.eigenvalues);
    let values: Vec<String> = numeric.eigenvalues.iter().map(|&z| format_complex(z)).collect();
    let text = format!("eigenvalues: {}\nclosed-form distance: {distance:.3e}", values.join(", "));
    emit(common, json!({ "eigenvalues": values, "closed_form_distance": distance }), &text);
    Ok(0)
}

fn martingale(model: MartingaleModel, k: usize, sites: &[usize], lambda: f64, s: Option<f64>, common: &Common) -> Result<u8> {
    let cfg = solver_config(common)?;
    let sched = PathSchedule::standard();
    let (h, f, charges, kernel) = match model {
        MartingaleModel::Aklt | MartingaleModel::AkltPath => {
            let s = match model {
                MartingaleModel::AkltPath => s.ok_or_else(|| Error::validation("aklt-path needs --s"))?,
                _ => s0(),
            };
            (path_interaction(s, &sched)?, path_mps(s, &sched)?, sz_charges(), PATH_KERNEL_DIM)
        }
        MartingaleModel::Pvbs => {
            let p = PvbsParams::new(vec![lambda])?;
            (pvbs_interaction(&p)?, pvbs_mps(&p)?, particle_charges(&p), 2)
        }
    };
    if sites.is_empty() {
        return Err(Error::validation("give at least one chain length"));
    }
    let g = sites
        .iter()
        .map(|&n| martingale_coefficient_for_family(&f, k, n))
        .collect::<Result<Vec<f64>>>()?;
    let eps_k = g.iter().cloned().fold(0.0, f64::max);
    let op = ChainOperator::new(&h, k)?.with_charges(charges)?;
    let gamma_k = spectral_gap(&op, Some(kernel), &cfg)?.gap_or_zero();
    let bound = martingale_gap_bound(gamma_k, k, eps_k);
    let mut text: Vec<String> = sites.iter().zip(&g).map(|(n, g)| format!("g_{{{k},{n}}} = {g:.6e}")).collect();
    text.push(format!(
        "gamma_{k} = {gamma_k:.6}, eps_{k} = {eps_k:.6e}, bound = {:.6}{}",
        bound.value,
        if bound.admissible { "" } else { " (eps_k * sqrt(k) >= 1, not admissible)" }
    ));
    emit(
        common,
        json!({ "k": k, "n_sites": sites, "g": g, "gamma_k": gamma_k, "eps_k": eps_k, "bound": bound }),
        &text.join("\n"),
    );
    Ok(0)
}

fn so_models(j: usize, sites: Vec<usize>, points: usize, lambda0: Option<Vec<f64>>, common: &Common) -> Result<u8> {
    let clifford = clifford_rep(j)?.anticommutator_defect();
    let profile = match &lambda0 {
        Some(l) => LambdaProfile::new(l.clone())?,
        None => LambdaProfile::uniform(j),
    };
    if points < 2 {
        return Err(Error::validation("need at least two grid points"));
    }
    let end = so_s0(j);
    let grid: Vec<f64> = (0..points).map(|i| end * i as f64 / (points - 1) as f64).collect();
    let reports = grid
        .iter()
        .map(|&s| so_transfer_report(j, s, &profile))
        .collect::<Result<Vec<_>>>()?;
    let transfer_ok = reports.iter().skip(1).all(|r| r.passed()) && !reports[0].irreducible;
    let family = ModelFamily::SoPath { j, grid: Grid::Points(grid[1..].to_vec()), lambda0 };
    let cfg = SweepConfig { family, n_sites: sites, solver: solver_config(common)?, workers: None };
    let rows = run_sweep(&cfg)?;
    if let Some(path) = &common.out {
        write_csv(&rows, File::create(path)?)?;
    }
    let row_code = rows.iter().find_map(|r| r.error_code).map_or(0, |c| c as u8);
    if common.json {
        let value = json!({ "J": j, "clifford_defect": clifford, "transfer": reports, "rows": rows });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("SO({}) with J = {j}: Clifford defect {clifford:.1e}", 2 * j + 1);
        for r in &reports {
            println!(
                "s = {:.6}: top {} (normal form {}), margin {:.4}, irreducible {}, {}",
                r.s,
                format_complex(r.top_eigenvalue),
                r.normal_form_top.map_or_else(|| "-".into(), format_complex),
                r.margin,
                r.irreducible,
                if r.passed() { "certified" } else { "not certified" }
            );
        }
        for r in &rows {
            match &r.error {
                Some(e) => println!("s = {}, N = {}: error: {e}", fmt_s(r.s), r.n_sites),
                None => println!("s = {}, N = {}: kernel {}, gap {}", fmt_s(r.s), r.n_sites, r.kernel_dim.unwrap_or(0), fmt_opt(r.gap)),
            }
        }
    }
    Ok(match (transfer_ok, row_code) {
        (_, c) if c != 0 => c,
        (false, _) => CERTIFICATION_FAILURE,
        _ => 0,
    })
}
