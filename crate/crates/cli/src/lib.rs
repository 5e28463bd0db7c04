//! Batch front-end for the double-elliptic kernel: verification suites,
//! eigenvalue tables, classical flows, and special-function evaluation, all
//! with machine-readable reports and CI-friendly exit codes
//! (0 pass, 1 check failure, 2 config error, 3 numerical guard exhaustion).

#![allow(clippy::field_reassign_with_default)]

pub mod checks;
pub mod config;
pub mod report;

use checks::{run_checks, CheckContext};
use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use dell_core::classical::{integrate_flow, manakov_residual, FlowParams};
use dell_core::elliptic::{
    dedekind_eta, eisenstein_e1, jacobi_theta, jacobi_theta_d1, kronecker_phi, theta_p,
};
use dell_core::intertwiner::Positions;
use dell_core::lax::PhaseState;
use dell_core::spectrum::{eigenvalue_product, h1_eigenvalue_series, Partition};
use dell_core::{C64, KernelError};
use report::{write_atomically, CheckRecord, Environment, Report};
use serde::Serialize;
use std::path::PathBuf;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;
pub const EXIT_GUARD_EXHAUSTION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dell",
    about = "Verification and evaluation tool for the double-elliptic many-body kernel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the identity-verification suite and write a report.
    Verify(CommonArgs),
    /// Tabulate p = 0 eigenvalues over a u-grid for one Young diagram.
    Eigen(CommonArgs),
    /// Integrate a classical flow and report conservation and the L-A-B residual.
    Classical(CommonArgs),
    /// Evaluate elliptic special functions on a list of points.
    Theta(CommonArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Path to a flat JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed overriding the configured one.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated substring filters selecting checks.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<String>,
    /// Output path (written atomically); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long)]
    pub format: Option<String>,
}

struct Resolved {
    cfg: RunConfig,
    seed: u64,
    suite: Vec<String>,
    out: Option<PathBuf>,
    format: String,
}

fn resolve(args: &CommonArgs) -> Result<Resolved, String> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("config error: cannot read {}: {e}", path.display()))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let seed = args.seed.unwrap_or_else(|| cfg.seed());
    let mut suite = args.suite.clone();
    if suite.is_empty() {
        suite = cfg.suite.clone().unwrap_or_default();
    }
    let out = args.out.clone().or_else(|| cfg.out.clone().map(PathBuf::from));
    let format = args
        .format
        .clone()
        .or_else(|| cfg.format.clone())
        .unwrap_or_else(|| "json".to_string());
    if format != "json" && format != "csv" {
        return Err(format!("config error: unknown format {format:?}"));
    }
    Ok(Resolved {
        cfg,
        seed,
        suite,
        out,
        format,
    })
}

fn exit_code_for(report: &Report) -> i32 {
    if report.all_pass() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILURE
    }
}

fn kernel_exit(e: &KernelError) -> i32 {
    match e {
        KernelError::InvalidParameter(_) => EXIT_CONFIG_ERROR,
        _ => EXIT_GUARD_EXHAUSTION,
    }
}

fn emit(resolved: &Resolved, payload: &str) -> Result<(), String> {
    match &resolved.out {
        Some(path) => write_atomically(path, payload)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn environment(resolved: &Resolved) -> Environment {
    let ctl = resolved
        .cfg
        .series_control()
        .unwrap_or_else(|_| dell_core::elliptic::SeriesControl::default());
    Environment {
        seed: resolved.seed,
        max_index: ctl.max_index,
        tail_tolerance: ctl.tail_tolerance,
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Eigen(args) => run_eigen(args),
        Command::Classical(args) => run_classical(args),
        Command::Theta(args) => run_theta(args),
    };
    match result {
        Ok(code) => code,
        Err(RunError::Config(msg)) => {
            eprintln!("{msg}");
            EXIT_CONFIG_ERROR
        }
        Err(RunError::Kernel(e)) => {
            eprintln!("numerical failure: {e}");
            kernel_exit(&e)
        }
    }
}

enum RunError {
    Config(String),
    Kernel(KernelError),
}

impl From<String> for RunError {
    fn from(v: String) -> Self {
        RunError::Config(v)
    }
}

impl From<KernelError> for RunError {
    fn from(v: KernelError) -> Self {
        RunError::Kernel(v)
    }
}

fn run_verify(args: &CommonArgs) -> Result<i32, RunError> {
    let resolved = resolve(args)?;
    let cx = CheckContext {
        params: resolved.cfg.model_params()?,
        seed: resolved.seed,
    };
    let records = run_checks(&cx, &resolved.suite)?;
    let report = Report::assemble(records, environment(&resolved));
    let payload = report.render(&resolved.format)?;
    emit(&resolved, &payload)?;
    for c in &report.checks {
        eprintln!(
            "{} [{}]: residual {:.3e} vs {:.1e} -> {}",
            c.name,
            c.anchor,
            c.residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(exit_code_for(&report))
}

#[derive(Serialize)]
struct TableRow {
    label: String,
    input: [f64; 2],
    value: [f64; 2],
}

fn row(label: impl Into<String>, input: C64, value: C64) -> TableRow {
    TableRow {
        label: label.into(),
        input: [input.re, input.im],
        value: [value.re, value.im],
    }
}

#[derive(Serialize)]
struct TablePayload {
    table: Vec<TableRow>,
    checks: Vec<CheckRecord>,
    summary: report::Summary,
    environment: Environment,
}

fn render_table(payload: &TablePayload, format: &str) -> Result<String, String> {
    match format {
        "json" => Ok(serde_json::to_string_pretty(payload).expect("payload serializes")),
        "csv" => {
            let mut out = String::from("label,in_re,in_im,out_re,out_im\n");
            for r in &payload.table {
                out.push_str(&format!(
                    "{},{:e},{:e},{:e},{:e}\n",
                    r.label, r.input[0], r.input[1], r.value[0], r.value[1]
                ));
            }
            Ok(out)
        }
        other => Err(format!("config error: unknown format {other:?}")),
    }
}

fn finish_table(
    resolved: &Resolved,
    table: Vec<TableRow>,
    checks: Vec<CheckRecord>,
) -> Result<i32, RunError> {
    let report = Report::assemble(checks.clone(), environment(resolved));
    let payload = TablePayload {
        table,
        checks,
        summary: report.summary.clone(),
        environment: environment(resolved),
    };
    let rendered = render_table(&payload, &resolved.format)?;
    emit(resolved, &rendered)?;
    for c in &report.checks {
        eprintln!(
            "{}: residual {:.3e} vs {:.1e} -> {}",
            c.name,
            c.residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(exit_code_for(&report))
}

fn run_eigen(args: &CommonArgs) -> Result<i32, RunError> {
    let resolved = resolve(args)?;
    let cfg = &resolved.cfg;
    let params = cfg.model_params()?;
    let n = cfg.n.unwrap_or(2);
    let parts = cfg.partition.clone().unwrap_or_else(|| vec![1, 0]);
    let lambda = Partition::new(parts).map_err(|e| format!("config error: {e}"))?;
    if lambda.len() > n {
        return Err(RunError::Config(format!(
            "config error: partition has {} parts for n = {n}",
            lambda.len()
        )));
    }
    let order = cfg.omega_order.unwrap_or(3);
    let t = params.t_trig();
    let q = params.q_trig();
    let grid: Vec<C64> = cfg
        .u_grid
        .clone()
        .unwrap_or_else(|| vec![[0.3, 0.0], [0.5, 0.1], [0.7, -0.1]])
        .into_iter()
        .map(config::to_c64)
        .collect();

    let mut table = Vec::new();
    let mut worst_trig = 0.0f64;
    for &u in &grid {
        let series = eigenvalue_product(u, &lambda, n, t, q, order);
        let value = series.eval(params.omega);
        table.push(row("eigenvalue", u, value));
        // ω = 0 column against the plain product ∏ (1 − u t^{N−1−i} q^{λ_i})
        let omega0 = series.coeff(0);
        let mut product = C64::new(1.0, 0.0);
        for i in 0..n {
            product *= C64::new(1.0, 0.0)
                - u * t.powi((n - 1 - i) as i32)
                    * dell_core::elliptic::int_power(q, lambda.part(i) as i64);
        }
        table.push(row("eigenvalue-omega-zero", u, omega0));
        worst_trig = worst_trig.max((omega0 - product).norm() / product.norm().max(1e-30));
    }
    let h1 = h1_eigenvalue_series(&lambda, n, t, q, order)?;
    for k in 0..=order {
        table.push(row(
            format!("h1-series-omega-power-{k}"),
            C64::new(k as f64, 0.0),
            h1.coeff(k),
        ));
    }

    let mut checks = vec![CheckRecord::new(
        "eigen-omega-zero-product",
        "trig-limit-eigenvalue-product",
        worst_trig,
        1e-12,
    )];
    if n == 2 && lambda.parts() == [1] {
        let order0 = -(C64::new(1.0, 0.0) + t * q);
        let order1 = (C64::new(1.0, 0.0) + q * t) * (C64::new(1.0, 0.0) + q * q * t * t) / (q * t);
        let r = ((h1.coeff(0) - order0).norm() / order0.norm())
            .max((h1.coeff(1) - order1).norm() / order1.norm());
        checks.push(CheckRecord::new(
            "eigen-gl2-closed-form",
            "gl2-first-hamiltonian-eigenvalue",
            r,
            1e-10,
        ));
    }
    finish_table(&resolved, table, checks)
}

fn run_classical(args: &CommonArgs) -> Result<i32, RunError> {
    let resolved = resolve(args)?;
    let cfg = &resolved.cfg;
    let params = cfg.model_params()?;
    let k = cfg.k.unwrap_or(1);
    let mut flow = FlowParams {
        hamiltonian_index: k,
        z0: cfg.z(),
        ..FlowParams::default()
    };
    if let Some(r) = cfg.lambda_radius {
        flow.lambda_radius = r;
    }
    if let Some(s) = cfg.fourier_samples {
        flow.fourier_samples = s;
    }
    if let Some(h) = cfg.derivative_step {
        flow.derivative_step = h;
    }
    if let Some(dt) = cfg.dt {
        flow.integrator_step = dt;
    }
    if let Some(t) = cfg.t_horizon {
        flow.horizon = t;
    }

    let default_q = vec![[0.22, 0.05], [-0.23, 0.13]];
    let default_p = vec![[0.1, 2.4], [-0.15, -2.2]];
    let q: Vec<C64> = cfg
        .q
        .clone()
        .unwrap_or(default_q)
        .into_iter()
        .map(config::to_c64)
        .collect();
    let p: Vec<C64> = cfg
        .p
        .clone()
        .unwrap_or(default_p)
        .into_iter()
        .map(config::to_c64)
        .collect();
    let state = PhaseState::new(Positions::new(q)?, p)?;
    let probe = params.lambda;

    let manakov = manakov_residual(k, flow.z0, probe, &state, &params, &flow)?;
    let run = integrate_flow(k, flow.z0, &state, &params, &flow, probe)?;

    let mut table = Vec::new();
    for sample in &run.trajectory {
        for (i, qv) in sample.q.iter().enumerate() {
            table.push(row(
                format!("t={:.6}:q{}", sample.time, i),
                C64::new(sample.time, 0.0),
                *qv,
            ));
        }
        for (i, pv) in sample.p.iter().enumerate() {
            table.push(row(
                format!("t={:.6}:p{}", sample.time, i),
                C64::new(sample.time, 0.0),
                *pv,
            ));
        }
        table.push(row(
            format!("t={:.6}:drift", sample.time),
            C64::new(sample.time, 0.0),
            C64::new(sample.drift, 0.0),
        ));
    }

    let checks = vec![
        CheckRecord::new("conservation-drift", "det-l-conservation", run.max_drift, 1e-6),
        CheckRecord::new(
            "manakov-equation",
            "manakov-l-a-b-triple",
            manakov.residual_right_form,
            1e-6,
        ),
        CheckRecord::new(
            "manakov-trace-b",
            "manakov-traceless-b",
            manakov.trace_b.norm(),
            1e-6,
        ),
    ];
    finish_table(&resolved, table, checks)
}

fn run_theta(args: &CommonArgs) -> Result<i32, RunError> {
    let resolved = resolve(args)?;
    let cfg = &resolved.cfg;
    let modulus = cfg.modulus()?;
    let ctl = cfg.series_control()?;
    let function = cfg
        .theta_function
        .clone()
        .unwrap_or_else(|| "jacobi".to_string());
    let points: Vec<C64> = cfg
        .points
        .clone()
        .unwrap_or_else(|| vec![[0.2, 0.05], [0.35, -0.1], [0.5, 0.2]])
        .into_iter()
        .map(config::to_c64)
        .collect();

    let mut table = Vec::new();
    match function.as_str() {
        "dedekind" => {
            let v = dedekind_eta(&modulus, &ctl)?;
            table.push(row("dedekind-eta", modulus.tau(), v));
        }
        "theta_p" => {
            for &z in &points {
                table.push(row("theta-p", z, theta_p(z, &modulus, &ctl)?));
            }
        }
        "jacobi" => {
            for &z in &points {
                table.push(row("jacobi-theta", z, jacobi_theta(z, &modulus, &ctl)?));
            }
        }
        "jacobi-deriv" => {
            for &z in &points {
                table.push(row("jacobi-theta-deriv", z, jacobi_theta_d1(z, &modulus, &ctl)?));
            }
        }
        "eisenstein" => {
            for &z in &points {
                table.push(row("eisenstein-e1", z, eisenstein_e1(z, &modulus, &ctl)?));
            }
        }
        "kronecker" => {
            let u = cfg.z();
            for &z in &points {
                table.push(row("kronecker-phi", z, kronecker_phi(z, u, &modulus, &ctl)?));
            }
        }
        other => {
            return Err(RunError::Config(format!(
                "config error: unknown theta function {other:?}"
            )));
        }
    }
    // evaluation runs carry a single structural check: oddness of the series
    let zc = C64::new(0.23, 0.07);
    let odd = {
        let a = jacobi_theta(zc, &modulus, &ctl)?;
        let b = jacobi_theta(-zc, &modulus, &ctl)?;
        (a + b).norm() / a.norm()
    };
    let checks = vec![CheckRecord::new(
        "theta-oddness",
        "odd-jacobi-theta",
        odd,
        1e-12,
    )];
    finish_table(&resolved, table, checks)
}
