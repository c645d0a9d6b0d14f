use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tunnelopt::grover::{gamma_sweep, grover_profile_options};
use tunnelopt::lindblad::RateFn;
use tunnelopt::paths::{bloch_path, BlochPath, HamiltonianPath, LinearPath, Schedule};
use tunnelopt::variational::{MassFn, ProfileOptions};
use tunnelopt::zero_tunneling::verify_density;
use tunnelopt::{
    construct_with_offset, evolve, linear_path, measured_tunneling, predicted_tunneling, quarter_circle,
    scaling_experiment, schedule_from_grid, tau_and_schedule, uniform_schedule, verify, CMatrix, Cx, DensityMatrix,
    DephasingModel, EvolveConfig, GammaRule, HermitianOperator, MassProfile,
};

use crate::config::{DephasingSpec, ExperimentConfig, MassShape, PathSpec, ScheduleSpec};
use crate::error::CliError;
use crate::output::{csv, write_atomic, write_json, Cell};

enum Built {
    Bloch { path: BlochPath<f64>, grover_n: Option<usize> },
    Linear(Arc<LinearPath<f64>>),
    Synthetic(MassShape),
}

impl Built {
    fn hamiltonian(&self) -> Result<&dyn HamiltonianPath<f64>, CliError> {
        match self {
            Built::Bloch { path, .. } => Ok(path),
            Built::Linear(p) => Ok(p.as_ref()),
            Built::Synthetic(_) => Err(CliError::Config("a synthetic mass has no Hamiltonian to simulate".into())),
        }
    }
}

fn complex_matrix(name: &str, entries: &[[f64; 2]]) -> Result<HermitianOperator<f64>, CliError> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != entries.len() {
        return Err(CliError::Config(format!("{name} must have a square number of entries, got {}", entries.len())));
    }
    let m = CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = entries[i * n + j];
        Cx::new(re, im)
    });
    Ok(HermitianOperator::new(m)?)
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator<f64> {
    let a = CMatrix::from_fn(n, n, |_, _| Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    HermitianOperator::from_hermitian_part(&a)
}

fn build_path(cfg: &ExperimentConfig) -> Result<Built, CliError> {
    let spec = cfg.path.as_ref().ok_or_else(|| CliError::Config("path is required".into()))?;
    let segment = |a: Vector3<f64>, b: Vector3<f64>| {
        let d = b - a;
        bloch_path(Arc::new(move |q| a + d * q), Arc::new(move |_| d))
    };
    let bloch = |p| Built::Bloch { path: p, grover_n: None };
    Ok(match spec {
        PathSpec::Linear { h0, h1 } => {
            Built::Linear(Arc::new(linear_path(complex_matrix("h0", h0)?, complex_matrix("h1", h1)?)?))
        }
        PathSpec::RandomLinear { dim } => {
            let seed = cfg.seed.ok_or_else(|| CliError::Config("random_linear needs a seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h0 = random_hermitian(&mut rng, *dim);
            let h1 = random_hermitian(&mut rng, *dim);
            Built::Linear(Arc::new(linear_path(h0, h1)?))
        }
        PathSpec::QuarterCircle { gap } => bloch(quarter_circle(*gap)?),
        PathSpec::Chord => bloch(segment(Vector3::z(), Vector3::x())?),
        PathSpec::Segment { start, end } => bloch(segment(Vector3::from(*start), Vector3::from(*end))?),
        PathSpec::Constant { field } => {
            let g = Vector3::from(*field);
            bloch(bloch_path(Arc::new(move |_| g), Arc::new(|_| Vector3::zeros()))?)
        }
        PathSpec::Grover { n } => Built::Bloch { path: tunnelopt::grover_path(*n)?, grover_n: Some(*n) },
        PathSpec::SyntheticMass { profile } => Built::Synthetic(*profile),
    })
}

/// Constant scalar rate, if the dephasing mode has one.
fn scalar_rate(cfg: &ExperimentConfig, built: &Built) -> Result<Option<f64>, CliError> {
    match &cfg.dephasing {
        DephasingSpec::Scalar { gamma } => Ok(Some(*gamma)),
        DephasingSpec::GroverRule { rule } => match built {
            Built::Bloch { grover_n: Some(n), .. } => Ok(Some(GammaRule::from(*rule).rate(*n)?)),
            _ => Err(CliError::Config("grover_rule dephasing needs a grover path".into())),
        },
        DephasingSpec::Unitary | DephasingSpec::Matrix { .. } => Ok(None),
    }
}

fn dephasing_model(cfg: &ExperimentConfig, built: &Built) -> Result<DephasingModel<f64>, CliError> {
    if let DephasingSpec::Matrix { gamma } = &cfg.dephasing {
        let n = gamma.len();
        if gamma.iter().any(|row| row.len() != n) {
            return Err(CliError::Config("dephasing.gamma must be square".into()));
        }
        return Ok(DephasingModel::matrix(DMatrix::from_row_slice(n, n, &gamma.concat()))?);
    }
    Ok(match scalar_rate(cfg, built)? {
        Some(g) => DephasingModel::constant(g)?,
        None => DephasingModel::unitary(),
    })
}

fn mass_profile(cfg: &ExperimentConfig, built: &Built) -> Result<Option<MassProfile<f64>>, CliError> {
    if let Built::Synthetic(shape) = built {
        let m: MassFn<f64> = match shape {
            MassShape::Constant => Arc::new(|_| 1.0),
            MassShape::Quadratic => Arc::new(|q| q * q),
        };
        return Ok(Some(MassProfile::from_fn(m, None, &ProfileOptions::default())?));
    }
    let Some(gamma) = scalar_rate(cfg, built)? else { return Ok(None) };
    let rate: RateFn<f64> = Arc::new(move |_| gamma);
    Ok(Some(match built {
        Built::Bloch { path, grover_n } => {
            let opts = grover_n.map(grover_profile_options).unwrap_or_default();
            MassProfile::for_bloch(path, rate, &opts)?
        }
        Built::Linear(p) => MassProfile::for_path(p.clone(), rate, cfg.integrator.gap_tol, &ProfileOptions::default())?,
        Built::Synthetic(_) => unreachable!("handled above"),
    }))
}

fn schedule(cfg: &ExperimentConfig, profile: Option<&MassProfile<f64>>) -> Result<(Schedule<f64>, Option<f64>), CliError> {
    match &cfg.schedule {
        ScheduleSpec::Uniform => Ok((uniform_schedule(), None)),
        ScheduleSpec::Grid { q } => Ok((schedule_from_grid(q)?, None)),
        ScheduleSpec::Optimal => {
            let mp = profile
                .ok_or_else(|| CliError::Config("the optimal schedule needs a scalar dephasing rate".into()))?;
            let opt = tau_and_schedule(mp)?;
            Ok((opt.schedule, Some(opt.tau)))
        }
    }
}

#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    command: &'static str,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    result: R,
}

fn finish<R: Serialize>(out: &Path, command: &'static str, cfg: &ExperimentConfig, table: String, result: R) -> Result<(), CliError> {
    write_atomic(out, &format!("{command}.csv"), table.as_bytes())?;
    write_json(out, &format!("{command}.json"), &Summary { command, config: cfg, result })?;
    Ok(())
}

#[derive(Serialize)]
struct ScheduleResult {
    tau: f64,
    quadrature_error: f64,
    points: usize,
    zero_mass: bool,
}

/// Mass profile and optimal schedule on the adaptive quadrature grid.
pub fn cmd_schedule(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let built = build_path(cfg)?;
    let mp = mass_profile(cfg, &built)?
        .ok_or_else(|| CliError::Config("schedule needs a scalar dephasing rate or a synthetic mass".into()))?;
    let opt = tau_and_schedule(&mp)?;
    let rows = mp
        .grid()
        .iter()
        .zip(mp.values())
        .map(|(&q, &m)| vec![Cell::from(q), Cell::from(m), Cell::from(opt.s_of_q(q))]);
    let table = csv(&["q", "M", "s_of_q"], rows);
    let result = ScheduleResult {
        tau: opt.tau,
        quadrature_error: mp.quadrature_error(),
        points: mp.grid().len(),
        zero_mass: opt.zero_mass,
    };
    finish(out, "schedule", cfg, table, result)
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct EvolveResult {
    T_final: f64,
    predicted: Option<f64>,
    ratio_error: Option<f64>,
    tau: Option<f64>,
    epsilon: f64,
    steps: usize,
    last_change: f64,
}

/// Simulates from the ground state of `H(0)` and compares with the
/// first-order prediction.
pub fn cmd_evolve(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let eps = cfg.epsilon()?;
    let built = build_path(cfg)?;
    let path = built.hamiltonian()?;
    let profile = mass_profile(cfg, &built)?;
    let (sched, tau) = schedule(cfg, profile.as_ref())?;
    let deph = dephasing_model(cfg, &built)?;
    let ec = EvolveConfig::from(&cfg.integrator);
    let rho0 = DensityMatrix::new(path.frame(0.0, ec.gap_tol)?.projection(0).clone())?;
    let traj = evolve(path, &sched, &deph, eps, &rho0, &ec)?;
    let tunneling = measured_tunneling(&traj, path, ec.gap_tol)?;
    let rows = traj.samples.iter().zip(&tunneling).map(|(smp, &(_, t))| {
        let h = smp.rho.hygiene();
        vec![Cell::from(smp.s), Cell::from(smp.q), Cell::from(t), Cell::from(h.trace_error), Cell::from(h.min_eigenvalue)]
    });
    let table = csv(&["s", "q", "T", "trace_error", "min_eig"], rows);
    let t_final = tunneling.last().map_or(0.0, |&(_, t)| t);
    let predicted = match (&profile, &cfg.dephasing) {
        (Some(mp), _) => Some(predicted_tunneling(mp, &sched, eps)?),
        (None, DephasingSpec::Unitary) => Some(0.0),
        _ => None,
    };
    let result = EvolveResult {
        T_final: t_final,
        predicted,
        ratio_error: predicted.map(|p| (t_final - p).abs() / (eps * eps)),
        tau,
        epsilon: eps,
        steps: traj.steps,
        last_change: traj.last_change,
    };
    finish(out, "evolve", cfg, table, result)
}

#[derive(Serialize)]
struct ZeroTunnelResult {
    final_fidelity: f64,
    bloch_fidelity: f64,
    deviation_bound: f64,
    deviation_actual: f64,
    rotations: usize,
    merged: usize,
    skipped: usize,
    interval_length: f64,
    total_fast_time: f64,
}

/// Piecewise-constant zero-tunneling control for a unitary 2-level path.
pub fn cmd_zerotunnel(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let eps = cfg.epsilon()?;
    if cfg.dephasing != DephasingSpec::Unitary {
        return Err(CliError::Config("zerotunnel works on unitary paths; drop the dephasing section".into()));
    }
    let Built::Bloch { path, .. } = build_path(cfg)? else {
        return Err(CliError::Config("zerotunnel needs a 2-level (Bloch) path".into()));
    };
    let (base, _) = schedule(cfg, None)?;
    let control = construct_with_offset(&path, &base, eps, cfg.offset)?;
    let rows = control.rotations.iter().enumerate().map(|(i, r)| {
        vec![
            Cell::from(i),
            Cell::from(r.q_star),
            Cell::from(r.axis.x),
            Cell::from(r.axis.y),
            Cell::from(r.axis.z),
            Cell::from(r.angle),
            Cell::from(r.duration),
        ]
    });
    let table = csv(&["i", "q_star", "axis_x", "axis_y", "axis_z", "angle", "duration"], rows);
    let result = ZeroTunnelResult {
        final_fidelity: verify_density(&control, &path, cfg.integrator.gap_tol)?,
        bloch_fidelity: verify(&control, &path),
        deviation_bound: control.deviation_bound(),
        deviation_actual: control.deviation_from_base(),
        rotations: control.rotations.len(),
        merged: control.merged,
        skipped: control.skipped,
        interval_length: control.interval_length,
        total_fast_time: control.total_fast_time(),
    };
    finish(out, "zerotunnel", cfg, table, result)
}

#[derive(Serialize)]
struct GroverResult {
    slope: f64,
    slope_stderr: Option<f64>,
    intercept: f64,
    fit_window: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_slope: Option<f64>,
}

/// `τ` against database size, and optionally against a fixed rate.
pub fn cmd_grover(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let spec = cfg.grover.as_ref().ok_or_else(|| CliError::Config("grover section is required".into()))?;
    let table = scaling_experiment(&spec.n_list, GammaRule::from(spec.rule))?;
    let rows = table.rows.iter().map(|r| vec![Cell::from(r.n), Cell::from(r.gamma), Cell::from(r.tau)]);
    let text = csv(&["N", "gamma", "tau"], rows);
    let mut gamma_slope = None;
    if let Some(sw) = &spec.gamma_sweep {
        let (rows, fit) = gamma_sweep(sw.n, &sw.gammas)?;
        let sweep = csv(&["N", "gamma", "tau"], rows.iter().map(|r| vec![Cell::from(r.n), Cell::from(r.gamma), Cell::from(r.tau)]));
        write_atomic(out, "grover_gamma.csv", sweep.as_bytes())?;
        gamma_slope = Some(fit.slope);
    }
    let result = GroverResult {
        slope: table.fit.slope,
        slope_stderr: table.fit.slope_stderr,
        intercept: table.fit.intercept,
        fit_window: table.fit_window,
        gamma_slope,
    };
    finish(out, "grover", cfg, text, result)
}
