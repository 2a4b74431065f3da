//! Command implementations behind the `fockgen` binary.
//!
//! Each command is a pure function of its inputs returning the text for
//! standard output and an exit code, so the binary stays a thin argument
//! parser and the commands can be tested in-process.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fock::TruncationPolicy;
use crate::math::phase;
use crate::probability::{breakdown, StageRecord};
use crate::search::{
    optimize_common_t, optimize_root_order, optimize_stagewise, sweep_t, CommonOptimum,
};
use crate::simulator::run_plan;
use crate::synthesis::{compile, verify_factorization, BeamSplitter, SynthesisPlan};
use crate::target::{phase_state, PhaseStateSpec, TargetState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_COMPILE: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

/// Relative analytic/simulated disagreement that triggers [`EXIT_INCONSISTENT`].
pub const CONSISTENCY_ALARM: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    fn compile(err: Error) -> Self {
        Self {
            code: EXIT_COMPILE,
            message: err.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            code: EXIT_OK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

/// Target file contents: exactly one of `coeffs` or `phase_state`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpecFile {
    #[serde(default)]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub phase_state: Option<PhaseStateJson>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseStateJson {
    pub z: [f64; 2],
    #[serde(rename = "N")]
    pub n: usize,
}

impl TargetSpecFile {
    pub fn into_target(self) -> Result<TargetState, CliError> {
        match (self.coeffs, self.phase_state) {
            (Some(coeffs), None) => {
                let c: Vec<Complex64> = coeffs
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect();
                TargetState::new(&c).map_err(|e| CliError::parse(e.to_string()))
            }
            (None, Some(ps)) => {
                let spec = PhaseStateSpec::new(Complex64::new(ps.z[0], ps.z[1]), ps.n)
                    .map_err(|e| CliError::parse(e.to_string()))?;
                Ok(phase_state(&spec))
            }
            _ => Err(CliError::parse(
                "target file needs exactly one of `coeffs` or `phase_state`",
            )),
        }
    }
}

pub fn parse_target(json: &str) -> Result<TargetState, CliError> {
    let spec: TargetSpecFile =
        serde_json::from_str(json).map_err(|e| CliError::parse(format!("bad target file: {e}")))?;
    spec.into_target()
}

pub fn load_target(path: &Path) -> Result<TargetState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_target(&text)
}

/// Common transmittance settings shared by `plan` and `prob`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeArgs {
    pub abs_t: f64,
    pub t_phase: f64,
    /// 1-based stage order, as typed on the command line.
    pub order: Option<Vec<usize>>,
}

fn compile_scheme(target: &TargetState, args: &SchemeArgs) -> Result<SynthesisPlan, CliError> {
    if !(args.abs_t > 0.0 && args.abs_t < 1.0) {
        return Err(CliError::parse(format!(
            "--T must lie in (0, 1), got {}",
            args.abs_t
        )));
    }
    let bs = BeamSplitter::from_polar(args.abs_t, args.t_phase)
        .map_err(|e| CliError::parse(e.to_string()))?;
    let order = match &args.order {
        Some(o) => {
            if o.contains(&0) {
                return Err(CliError::parse("--order entries are 1-based"));
            }
            Some(o.iter().map(|i| i - 1).collect::<Vec<_>>())
        }
        None => None,
    };
    compile(target, &bs, order.as_deref()).map_err(|e| match e {
        Error::InvalidOrder(_) => CliError::parse(e.to_string()),
        other => CliError::compile(other),
    })
}

/// Probabilities in scientific notation with 6 significant digits.
pub fn fmt_prob(p: f64) -> String {
    format!("{p:.5e}")
}

fn fmt_angle(z: Complex64) -> String {
    format!("{:+.6}", phase(z))
}

/// `plan`: roots, displacements and stagewise probabilities in the layout
/// `k | |beta_k| | phi_beta | |alpha_k| | phi_alpha | P_k^2`.
pub fn cmd_plan(
    target: &TargetState,
    args: &SchemeArgs,
    format: Format,
) -> Result<Output, CliError> {
    let plan = compile_scheme(target, args)?;
    if format == Format::Json {
        let mut s = serde_json::to_string_pretty(&plan).expect("plan serializes");
        s.push('\n');
        return Ok(Output::ok(s));
    }
    let bd = breakdown(&plan).map_err(CliError::compile)?;
    let mut out = String::new();
    let t = plan.bs.t();
    let _ = writeln!(
        out,
        "N = {}, |T| = {:.6}, arg T = {}",
        plan.stages(),
        t.norm(),
        fmt_angle(t)
    );
    let _ = writeln!(
        out,
        "{:>3}  {:>12}  {:>10}  {:>12}  {:>10}  {:>12}",
        "k", "|beta_k|", "phi_beta", "|alpha_k|", "phi_alpha", "P_k^2"
    );
    for (i, alpha) in plan.alphas.iter().enumerate() {
        let (bm, bp) = match plan.betas.get(i) {
            Some(b) => (format!("{:.6}", b.norm()), fmt_angle(*b)),
            None => (String::new(), String::new()),
        };
        let pk = bd
            .stage_norms
            .get(i)
            .map(|p| fmt_prob(*p))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{:>3}  {:>12}  {:>10}  {:>12.6}  {:>10}  {:>12}",
            i + 1,
            bm,
            bp,
            alpha.norm(),
            fmt_angle(*alpha),
            pk
        );
    }
    let _ = writeln!(out, "P = {}", fmt_prob(bd.total));
    Ok(Output::ok(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Simulate,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbReport {
    pub method: &'static str,
    pub total: f64,
    pub fidelity: f64,
    pub stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_used: Option<usize>,
}

pub fn analytic_report(plan: &SynthesisPlan) -> Result<ProbReport, CliError> {
    let bd = breakdown(plan).map_err(CliError::compile)?;
    let fidelity = verify_factorization(&plan.target, &plan.betas).map_err(CliError::compile)?;
    Ok(ProbReport {
        method: "analytic",
        total: bd.total,
        fidelity,
        stages: bd.records(),
        cutoff_used: None,
    })
}

pub fn simulated_report(
    plan: &SynthesisPlan,
    policy: &TruncationPolicy,
) -> Result<ProbReport, CliError> {
    let sim = run_plan(plan, policy).map_err(CliError::compile)?;
    let conditionals = crate::probability::conditionals_from_norms(&sim.stage_norms_sq);
    let stages = (0..sim.stage_norms_sq.len())
        .map(|i| StageRecord {
            k: i + 1,
            gamma: sim.offsets[i],
            p_k_sq: sim.stage_norms_sq[i],
            conditional: conditionals[i],
        })
        .collect();
    Ok(ProbReport {
        method: "simulate",
        total: sim.total_prob,
        fidelity: sim.fidelity,
        stages,
        cutoff_used: Some(sim.cutoff_used),
    })
}

fn render_report(out: &mut String, r: &ProbReport) {
    let _ = writeln!(out, "method: {}", r.method);
    let _ = writeln!(
        out,
        "{:>3}  {:>12}  {:>12}  {:>12}",
        "k", "|gamma_k|", "P_k^2", "conditional"
    );
    for s in &r.stages {
        let _ = writeln!(
            out,
            "{:>3}  {:>12.6}  {:>12}  {:>12}",
            s.k,
            s.gamma.norm(),
            fmt_prob(s.p_k_sq),
            fmt_prob(s.conditional)
        );
    }
    let _ = writeln!(out, "total P = {}", fmt_prob(r.total));
    let _ = writeln!(out, "fidelity = {:.12}", r.fidelity);
    if let Some(c) = r.cutoff_used {
        let _ = writeln!(out, "cutoff used = {c}");
    }
}

pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// `prob`: closed-form and/or simulated success probability. In `Both` mode
/// the exit code is [`EXIT_INCONSISTENT`] when the totals disagree by more
/// than [`CONSISTENCY_ALARM`].
pub fn cmd_prob(
    target: &TargetState,
    args: &SchemeArgs,
    method: Method,
    format: Format,
) -> Result<Output, CliError> {
    let plan = compile_scheme(target, args)?;
    let policy = TruncationPolicy::default();
    let mut code = EXIT_OK;
    let text = match method {
        Method::Analytic | Method::Simulate => {
            let r = if method == Method::Analytic {
                analytic_report(&plan)?
            } else {
                simulated_report(&plan, &policy)?
            };
            match format {
                Format::Json => serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
                Format::Table => {
                    let mut s = String::new();
                    render_report(&mut s, &r);
                    s
                }
            }
        }
        Method::Both => {
            let a = analytic_report(&plan)?;
            let s = simulated_report(&plan, &policy)?;
            let diff = relative_difference(a.total, s.total);
            if !(diff <= CONSISTENCY_ALARM) {
                code = EXIT_INCONSISTENT;
            }
            match format {
                Format::Json => {
                    let v = serde_json::json!({
                        "analytic": a,
                        "simulate": s,
                        "relative_difference": diff,
                    });
                    serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
                }
                Format::Table => {
                    let mut out = String::new();
                    render_report(&mut out, &a);
                    out.push('\n');
                    render_report(&mut out, &s);
                    let _ = writeln!(out, "\nrelative difference = {diff:.3e}");
                    out
                }
            }
        }
    };
    Ok(Output { stdout: text, code })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepArgs {
    pub min: f64,
    pub max: f64,
    pub step: f64,
    pub t_phase: f64,
}

/// Grid `min + i * step` up to `max` inclusive.
pub fn sweep_grid(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    let SweepArgs { min, max, step, .. } = *args;
    if !(min > 0.0 && max < 1.0 && min <= max) {
        return Err(CliError::parse(format!(
            "need 0 < min <= max < 1, got min={min} max={max}"
        )));
    }
    if !(step > 0.0) {
        return Err(CliError::parse("--step must be positive"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

/// `sweep`: CSV of total probability against `|T|`.
pub fn cmd_sweep(target: &TargetState, args: &SweepArgs) -> Result<Output, CliError> {
    let grid = sweep_grid(args)?;
    let curve = sweep_t(target, &grid, args.t_phase).map_err(CliError::compile)?;
    Ok(Output::ok(curve.to_csv()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMode {
    Common,
    Stagewise,
    Order,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeArgs {
    pub mode: OptimizeMode,
    /// Transmittance used for the baseline (common mode) and for root
    /// ordering.
    pub abs_t: f64,
    pub bracket: (f64, f64),
    pub iters: usize,
    pub order_limit: usize,
}

#[derive(Serialize)]
struct CommonResult {
    mode: &'static str,
    best: CommonOptimum,
    baseline: CommonOptimum,
    improvement_ratio: f64,
}

#[derive(Serialize)]
struct StagewiseResult {
    mode: &'static str,
    abs_ts: Vec<f64>,
    alphas: Vec<Complex64>,
    prob: f64,
    baseline: CommonOptimum,
    improvement_ratio: f64,
    accepted_steps: usize,
}

#[derive(Serialize)]
struct OrderResult {
    mode: &'static str,
    abs_t: f64,
    order: Vec<usize>,
    prob: f64,
    canonical_prob: f64,
    improvement_ratio: f64,
    evaluated: usize,
}

/// `optimize`: JSON with the best parameters, best probability and the
/// baseline it is compared against.
pub fn cmd_optimize(target: &TargetState, args: &OptimizeArgs) -> Result<Output, CliError> {
    if !(args.abs_t > 0.0 && args.abs_t < 1.0) {
        return Err(CliError::parse(format!(
            "--T must lie in (0, 1), got {}",
            args.abs_t
        )));
    }
    let json = match args.mode {
        OptimizeMode::Common => {
            let best = optimize_common_t(target, args.bracket).map_err(cli_error)?;
            let bs = BeamSplitter::new(Complex64::new(args.abs_t, 0.0)).map_err(cli_error)?;
            let plan = compile(target, &bs, None).map_err(cli_error)?;
            let base = crate::probability::total_probability(&plan).map_err(cli_error)?;
            let baseline = CommonOptimum {
                abs_t: args.abs_t,
                prob: base,
            };
            serde_json::to_string_pretty(&CommonResult {
                mode: "common",
                improvement_ratio: best.prob / base,
                best,
                baseline,
            })
        }
        OptimizeMode::Stagewise => {
            let common = optimize_common_t(target, args.bracket).map_err(cli_error)?;
            let cfg = optimize_stagewise(
                target,
                common.abs_t,
                args.iters,
                &TruncationPolicy::default(),
            )
            .map_err(cli_error)?;
            serde_json::to_string_pretty(&StagewiseResult {
                mode: "stagewise",
                abs_ts: cfg.ts.iter().map(|t| t.norm()).collect(),
                alphas: cfg.alphas.clone(),
                prob: cfg.prob,
                improvement_ratio: cfg.prob / common.prob,
                baseline: common,
                accepted_steps: cfg.history.len() - 1,
            })
        }
        OptimizeMode::Order => {
            let bs = BeamSplitter::new(Complex64::new(args.abs_t, 0.0)).map_err(cli_error)?;
            let best = optimize_root_order(target, &bs, args.order_limit).map_err(cli_error)?;
            serde_json::to_string_pretty(&OrderResult {
                mode: "order",
                abs_t: args.abs_t,
                improvement_ratio: best.prob / best.canonical_prob,
                order: best.order,
                prob: best.prob,
                canonical_prob: best.canonical_prob,
                evaluated: best.evaluated,
            })
        }
    }
    .expect("result serializes");
    Ok(Output::ok(json + "\n"))
}

fn cli_error(e: Error) -> CliError {
    match e {
        Error::ValidationFailure(_) => CliError {
            code: EXIT_VALIDATION,
            message: e.to_string(),
        },
        Error::InvalidArgument(_) | Error::InvalidBeamSplitter(_) => CliError::parse(e.to_string()),
        other => CliError::compile(other),
    }
}
