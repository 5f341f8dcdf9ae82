//! Scenario execution and CSV emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use backflow_core::correlations::{
    mutual_information_continuous, mutual_information_discrete,
    mutual_information_two_qubits_discrete,
};
use backflow_core::ctime::ContinuousModel;
use backflow_core::dynamics::{classify_divisibility, eigenvalues_recurrence, CollisionModel};
use backflow_core::env::{build_chain, ChainParams};
use backflow_core::witness::{
    helstrom_trajectory, quantumness_bound_check, separable_sbfi_construction, DynamicsSource,
    HelstromEnsemble, TensorPower,
};
use rayon::prelude::*;

use crate::config::{self, ScenarioConfig};
use crate::{validate, Failure};

/// One CSV cell; integers keep their own formatting, floats are emitted at
/// full double precision (17 significant digits).
#[derive(Clone, Copy)]
pub enum Cell {
    I(i64),
    F(f64),
}

impl Cell {
    fn write(&self, out: &mut String) {
        match self {
            Cell::I(v) => out.push_str(&v.to_string()),
            Cell::F(v) => out.push_str(&format!("{v:.16e}")),
        }
    }
}

/// Writes UTF-8 comma-separated rows with a header and LF line endings.
pub fn emit_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> std::io::Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        for (k, cell) in row.iter().enumerate() {
            if k > 0 {
                text.push(',');
            }
            cell.write(&mut text);
        }
        text.push('\n');
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())
}

fn config_err(e: backflow_core::Error) -> Failure {
    Failure::Config(e.to_string())
}

pub fn run_scenario(config_path: &Path, out_dir: &Path, seed: u64) -> Result<(), Failure> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let config = config::parse(&text)?;
    match config {
        ScenarioConfig::DivisibilityScan {
            r,
            p_min,
            p_max,
            p_steps,
            ratio_steps,
            scan_depth,
            output,
        } => divisibility_scan(
            r,
            p_min,
            p_max,
            p_steps,
            ratio_steps,
            scan_depth,
            &out_dir.join(output),
        ),
        ScenarioConfig::DiscreteTrace {
            p0,
            p,
            r,
            delta,
            varphi,
            n_max,
            state,
            output,
        } => discrete_trace(p0, p, r, delta, varphi, n_max, state, &out_dir.join(output)),
        ScenarioConfig::CtimeTrace {
            gamma,
            kappa,
            t_max,
            step,
            state,
            helstrom_sigma,
            bias,
            output,
        } => ctime_trace(
            gamma,
            kappa,
            t_max,
            step,
            state,
            helstrom_sigma,
            bias,
            &out_dir.join(output),
        ),
        ScenarioConfig::Witness {
            gamma,
            kappa,
            rho,
            sigma,
            bias,
            t_max,
            step,
            tau,
            bound_stride,
            output,
        } => witness(
            gamma,
            kappa,
            &rho,
            &sigma,
            bias,
            t_max,
            step,
            tau,
            bound_stride,
            &out_dir.join(output),
        ),
        ScenarioConfig::SeparableDemo {
            a,
            s,
            t_max,
            step,
            output,
        } => separable_demo(a, s, t_max, step, &out_dir.join(output)),
        ScenarioConfig::Validate {} => validate::run_all(seed),
    }
}

fn grid(min: f64, max: f64, steps: usize, k: usize) -> f64 {
    if steps <= 1 {
        min
    } else {
        min + (max - min) * k as f64 / (steps - 1) as f64
    }
}

fn divisibility_scan(
    r: f64,
    p_min: f64,
    p_max: f64,
    p_steps: usize,
    ratio_steps: usize,
    scan_depth: usize,
    output: &Path,
) -> Result<(), Failure> {
    // Validate the grid corners before launching the scan.
    for p in [p_min, p_max] {
        ChainParams::closed(p, r, 0.0).map_err(config_err)?;
        if 1.0 - 2.0 * (p + r) <= 0.0 {
            return Err(Failure::Config(format!(
                "alpha > 0 violated at p = {p}, r = {r}"
            )));
        }
    }
    let points: Vec<(usize, usize)> = (0..p_steps)
        .flat_map(|i| (0..ratio_steps).map(move |j| (i, j)))
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(i, j)| {
            let p = grid(p_min, p_max, p_steps, i);
            let alpha = 1.0 - 2.0 * (p + r);
            let ratio_max = p / alpha;
            let delta = (grid(0.0, ratio_max, ratio_steps, j) * alpha).min(p);
            let params = ChainParams::closed(p, r, delta).expect("grid point is valid");
            let rep = classify_divisibility(&params, scan_depth)
                .unwrap_or_else(|e| panic!("divisibility mismatch at p={p}, delta={delta}: {e}"));
            vec![
                Cell::F(p),
                Cell::F(delta),
                Cell::I(rep.analytic.p_divisible as i64),
                Cell::I(rep.analytic.cp_divisible as i64),
                Cell::I(rep.analytic.tensor_p_divisible as i64),
            ]
        })
        .collect();
    emit_csv(output, &["p", "delta", "P", "CP", "tensorP"], &rows)?;
    println!(
        "divisibility-scan: {} points -> {}",
        rows.len(),
        output.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn discrete_trace(
    p0: f64,
    p: f64,
    r: f64,
    delta: f64,
    varphi: f64,
    n_max: usize,
    state: Option<config::StateSpec>,
    output: &Path,
) -> Result<(), Failure> {
    let params = ChainParams::new(p0, p, r, delta).map_err(config_err)?;
    let env = build_chain(params).map_err(config_err)?;
    let model = CollisionModel::new(env, varphi).map_err(config_err)?;
    let state = state.map(|s| s.build()).transpose()?;
    let traj = eigenvalues_recurrence(&model, n_max);
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = vec![
            Cell::I(n as i64),
            Cell::F(traj.lam(n)),
            Cell::F(traj.lam3(n)),
        ];
        if let Some(rho) = &state {
            let qmi = match rho.dim() {
                2 => mutual_information_discrete(&model, rho, n)?,
                _ => mutual_information_two_qubits_discrete(&model, rho, n)?,
            };
            row.push(Cell::F(qmi));
        }
        rows.push(row);
    }
    let header: &[&str] = if state.is_some() {
        &["n", "lambda", "lambda3", "qmi"]
    } else {
        &["n", "lambda", "lambda3"]
    };
    emit_csv(output, header, &rows)?;
    println!(
        "discrete-trace: {} steps -> {}",
        rows.len(),
        output.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn ctime_trace(
    gamma: f64,
    kappa: f64,
    t_max: f64,
    step: f64,
    state: Option<config::StateSpec>,
    helstrom_sigma: Option<config::StateSpec>,
    bias: f64,
    output: &Path,
) -> Result<(), Failure> {
    let model = ContinuousModel::new(gamma, kappa).map_err(config_err)?;
    if step <= 0.0 || t_max < 0.0 {
        return Err(Failure::Config(format!(
            "need step > 0 and t_max >= 0, got step = {step}, t_max = {t_max}"
        )));
    }
    let state = state.map(|s| s.build()).transpose()?;
    if let Some(rho) = &state {
        if kappa != 0.0 {
            return Err(Failure::Config(
                "mutual information requires kappa = 0 (the two-branch chain)".into(),
            ));
        }
        if rho.dim() != 4 {
            return Err(Failure::Config(
                "the mutual-information state must be a two-qubit state".into(),
            ));
        }
    }
    let ensemble = match (&state, helstrom_sigma) {
        (Some(rho), Some(sigma_spec)) => {
            let sigma = sigma_spec.build()?;
            Some(HelstromEnsemble::new(bias, rho.clone(), sigma).map_err(config_err)?)
        }
        (None, Some(_)) => {
            return Err(Failure::Config(
                "helstrom_sigma requires a primary state".into(),
            ));
        }
        _ => None,
    };

    let steps = (t_max / step).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| step * k as f64).collect();
    let norms = match &ensemble {
        Some(ens) => Some(
            helstrom_trajectory(
                DynamicsSource::Continuous(&model, &times),
                ens,
                TensorPower::Two,
            )?
            .norms,
        ),
        None => None,
    };

    let mut rows = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![Cell::F(t)];
        match &state {
            Some(rho) => {
                row.push(Cell::F(mutual_information_continuous(&model, rho, t)?));
                if let Some(norms) = &norms {
                    row.push(Cell::F(norms[k]));
                }
            }
            None => {
                let (lam, lam3) = model.lambda_t(t);
                row.push(Cell::F(lam));
                row.push(Cell::F(lam3));
            }
        }
        rows.push(row);
    }
    let header: &[&str] = match (&state, &norms) {
        (Some(_), Some(_)) => &["t", "qmi", "helstrom"],
        (Some(_), None) => &["t", "qmi"],
        _ => &["t", "lambda", "lambda3"],
    };
    emit_csv(output, header, &rows)?;
    println!(
        "ctime-trace: {} samples -> {}",
        rows.len(),
        output.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn witness(
    gamma: f64,
    kappa: f64,
    rho: &config::StateSpec,
    sigma: &config::StateSpec,
    bias: f64,
    t_max: f64,
    step: f64,
    tau: f64,
    bound_stride: usize,
    output: &Path,
) -> Result<(), Failure> {
    let model = ContinuousModel::new(gamma, kappa).map_err(config_err)?;
    if step <= 0.0 || t_max <= 0.0 || tau <= 0.0 || bound_stride == 0 {
        return Err(Failure::Config(
            "need step > 0, t_max > 0, tau > 0 and bound_stride >= 1".into(),
        ));
    }
    let ensemble = HelstromEnsemble::new(bias, rho.build()?, sigma.build()?).map_err(config_err)?;
    if ensemble.dim() != 4 {
        return Err(Failure::Config(
            "witness trajectories run on two-qubit ensembles".into(),
        ));
    }

    let steps = (t_max / step).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| step * k as f64).collect();
    let series = helstrom_trajectory(
        DynamicsSource::Continuous(&model, &times),
        &ensemble,
        TensorPower::Two,
    )?;
    let mut rows = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let delta_d = if k == 0 {
            0.0
        } else {
            series.differences[k - 1]
        };
        rows.push(vec![Cell::F(t), Cell::F(series.norms[k]), Cell::F(delta_d)]);
    }
    emit_csv(output, &["t", "helstrom", "delta_d"], &rows)?;

    // Quantumness bound at strided sample times, in a sibling file.
    let settings = config::default_quantumness_settings();
    let bound_rows: Vec<Vec<Cell>> = times
        .par_iter()
        .step_by(bound_stride)
        .map(|&t| {
            let check = quantumness_bound_check(&model, &ensemble, t, tau, &settings)
                .expect("bound evaluation");
            vec![
                Cell::F(t),
                Cell::F(tau),
                Cell::F(check.lhs),
                Cell::F(check.diamond_norm),
                Cell::F(check.quantumness),
                Cell::F(check.rhs),
                Cell::I(check.holds as i64),
            ]
        })
        .collect();
    let bound_path = sibling_with_suffix(output, "_bound");
    emit_csv(
        &bound_path,
        &[
            "t",
            "tau",
            "delta_d",
            "diamond",
            "quantumness",
            "bound",
            "holds",
        ],
        &bound_rows,
    )?;
    if let Some(row) = bound_rows.iter().find(|r| matches!(r[6], Cell::I(0))) {
        let t = match row[0] {
            Cell::F(t) => t,
            _ => f64::NAN,
        };
        return Err(Failure::Validation(format!(
            "quantumness bound violated at t = {t}"
        )));
    }
    println!(
        "witness: {} samples -> {}, bound at {} points -> {}",
        rows.len(),
        output.display(),
        bound_rows.len(),
        bound_path.display()
    );
    Ok(())
}

fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned());
    let name = match ext {
        Some(ext) => format!("{stem}{suffix}.{ext}"),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn separable_demo(a: f64, s: f64, t_max: f64, step: f64, output: &Path) -> Result<(), Failure> {
    let settings = config::default_quantumness_settings();
    let out = separable_sbfi_construction(a, s, t_max, step, &settings).map_err(|e| {
        // Range violations are configuration problems; anything past the
        // validity check is a computation failure.
        match e {
            backflow_core::Error::Constraint(_) => config_err(e),
            other => Failure::Validation(other.to_string()),
        }
    })?;
    let mut rows = Vec::with_capacity(out.series.times.len());
    for (k, &t) in out.series.times.iter().enumerate() {
        let delta_d = if k == 0 {
            0.0
        } else {
            out.series.differences[k - 1]
        };
        rows.push(vec![
            Cell::F(t),
            Cell::F(out.series.norms[k]),
            Cell::F(delta_d),
        ]);
    }
    emit_csv(output, &["t", "helstrom", "delta_d"], &rows)?;
    println!(
        "separable-demo: bias {:.6}, PPT minimum {:.3e}, triggered {}, quantumness {:.6} -> {}",
        out.ensemble.bias(),
        out.ppt_min_eigenvalue,
        out.triggered,
        out.quantumness,
        output.display()
    );
    if !out.triggered {
        return Err(Failure::Validation(
            "no revival found after the reference time".into(),
        ));
    }
    Ok(())
}
