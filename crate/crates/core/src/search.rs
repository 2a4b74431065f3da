//! Transmittance sweeps, common- and per-stage transmittance optimization,
//! and root-ordering search.

use std::fmt::Write as _;

use itertools::Itertools;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::TruncationPolicy;
use crate::probability::{breakdown, total_probability};
use crate::simulator::{run_cascade, run_plan};
use crate::synthesis::{
    characteristic_roots, compile_with_roots, stagewise_displacements, BeamSplitter, SynthesisPlan,
};
use crate::target::TargetState;

/// Minimum simulated fidelity for a configuration to count as producing the
/// target.
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub abs_t: f64,
    /// `None` when compilation or evaluation failed at this point.
    pub prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCurve {
    pub label: String,
    pub n: usize,
    pub samples: Vec<SweepPoint>,
}

impl SweepCurve {
    /// `absT,prob` rows with 12 significant digits; failed points read `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("absT,prob\n");
        for s in &self.samples {
            let p = s
                .prob
                .map_or_else(|| "nan".to_string(), |p| format_significant(p, 12));
            let _ = writeln!(out, "{},{}", format_significant(s.abs_t, 12), p);
        }
        out
    }

    /// Sample with the largest probability.
    pub fn maximum(&self) -> Option<SweepPoint> {
        self.samples
            .iter()
            .filter(|s| s.prob.is_some())
            .copied()
            .max_by(|a, b| a.prob.partial_cmp(&b.prob).unwrap())
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Total probability on a grid of `|T|` values at fixed transmittance phase.
pub fn sweep_t(target: &TargetState, grid: &[f64], phase_t: f64) -> Result<SweepCurve> {
    if grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::InvalidArgument(
            "grid values must lie in (0, 1)".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "grid must be strictly increasing".into(),
        ));
    }
    let roots = match target.degree() {
        0 => Vec::new(),
        _ => characteristic_roots(target)?,
    };
    let samples = grid
        .iter()
        .map(|&abs_t| {
            let prob = BeamSplitter::from_polar(abs_t, phase_t)
                .and_then(|bs| compile_with_roots(target, &bs, &roots, None))
                .and_then(|plan| breakdown(&plan))
                .map(|bd| bd.total)
                .ok();
            SweepPoint { abs_t, prob }
        })
        .collect();
    Ok(SweepCurve {
        label: describe(target),
        n: target.degree(),
        samples,
    })
}

fn describe(target: &TargetState) -> String {
    format!("target with N = {}", target.degree())
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Maximize a unimodal-on-`[lo, hi]` function by golden-section search.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommonOptimum {
    pub abs_t: f64,
    pub prob: f64,
}

/// Best common real transmittance in `bracket`: a 101-point grid followed by
/// golden-section refinement around the best grid point.
pub fn optimize_common_t(target: &TargetState, bracket: (f64, f64)) -> Result<CommonOptimum> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "bracket ({lo}, {hi}) must satisfy 0 < lo < hi < 1"
        )));
    }
    if target.degree() == 0 {
        return Ok(CommonOptimum {
            abs_t: lo,
            prob: 1.0,
        });
    }
    let roots = characteristic_roots(target)?;
    let objective = |abs_t: f64| -> f64 {
        BeamSplitter::new(Complex64::new(abs_t, 0.0))
            .and_then(|bs| compile_with_roots(target, &bs, &roots, None))
            .and_then(|plan| total_probability(&plan))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let grid = linear_grid(lo, hi, 101);
    let values: Vec<f64> = grid.iter().map(|&t| objective(t)).collect();
    let (best_i, &best_v) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    if !best_v.is_finite() {
        return Err(Error::NumericalInconsistency(
            "no grid point could be evaluated".into(),
        ));
    }
    let a = grid[best_i.saturating_sub(1)];
    let b = grid[(best_i + 1).min(grid.len() - 1)];
    let (x, fx) = golden_section_max(objective, a, b, 1e-5);
    Ok(if fx > best_v {
        CommonOptimum { abs_t: x, prob: fx }
    } else {
        CommonOptimum {
            abs_t: grid[best_i],
            prob: best_v,
        }
    })
}

/// Per-stage transmittances and the displacements that realize the target
/// with them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagewiseConfig {
    pub ts: Vec<Complex64>,
    pub alphas: Vec<Complex64>,
    pub prob: f64,
    /// Probability of the uniform starting configuration.
    pub baseline_prob: f64,
    /// Probability after each accepted coordinate update.
    pub history: Vec<f64>,
}

struct Evaluation {
    prob: f64,
    alphas: Vec<Complex64>,
}

fn evaluate_stagewise(
    target: &TargetState,
    betas: &[Complex64],
    abs_ts: &[f64],
    policy: &TruncationPolicy,
) -> Option<Evaluation> {
    let ts: Vec<Complex64> = abs_ts.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    let splitters: Vec<BeamSplitter> = ts
        .iter()
        .map(|&t| BeamSplitter::new(t))
        .collect::<Result<_>>()
        .ok()?;
    let alphas = stagewise_displacements(betas, &ts).ok()?;
    let out = run_cascade(&alphas, &splitters, policy).ok()?;
    let fidelity = out.final_state.fidelity(&target.to_fock()).ok()?;
    if fidelity < FIDELITY_FLOOR {
        return None;
    }
    // The closed form only covers a shared transmittance.
    let prob = if ts.iter().all(|t| *t == ts[0]) {
        let plan = SynthesisPlan {
            target: target.clone(),
            bs: splitters[0],
            betas: betas.to_vec(),
            alphas: alphas.clone(),
            order: (0..betas.len()).collect(),
        };
        total_probability(&plan).ok()?
    } else {
        out.total_prob
    };
    Some(Evaluation { prob, alphas })
}

/// Coordinate ascent over per-stage `|T_k|`, starting from all stages at
/// `init`. Every candidate is simulated and must reproduce the target;
/// only improving steps are accepted, and a coordinate's search window
/// halves whenever it fails to improve.
pub fn optimize_stagewise(
    target: &TargetState,
    init: f64,
    iters: usize,
    policy: &TruncationPolicy,
) -> Result<StagewiseConfig> {
    if !(init > 0.0 && init < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "initial |T| = {init} is not in (0, 1)"
        )));
    }
    let n = target.degree();
    if n == 0 {
        return Err(Error::DegreeZero);
    }
    let betas: Vec<Complex64> = characteristic_roots(target)?
        .iter()
        .map(|r| r.conj())
        .collect();
    let mut ts = vec![init; n];
    let start = evaluate_stagewise(target, &betas, &ts, policy).ok_or_else(|| {
        Error::ValidationFailure(format!(
            "uniform configuration |T| = {init} does not reproduce the target"
        ))
    })?;
    let baseline_prob = start.prob;
    let mut current = start;
    let mut history = vec![baseline_prob];
    let mut widths = vec![0.05; n];

    for _ in 0..iters {
        for k in 0..n {
            let lo = (ts[k] - widths[k]).max(1e-3);
            let hi = (ts[k] + widths[k]).min(1.0 - 1e-6);
            let mut trial = ts.clone();
            let (x, _) = golden_section_max(
                |t| {
                    trial[k] = t;
                    evaluate_stagewise(target, &betas, &trial, policy)
                        .map_or(f64::NEG_INFINITY, |e| e.prob)
                },
                lo,
                hi,
                1e-5,
            );
            let mut cand_ts = ts.clone();
            cand_ts[k] = x;
            match evaluate_stagewise(target, &betas, &cand_ts, policy) {
                Some(e) if e.prob > current.prob => {
                    ts = cand_ts;
                    history.push(e.prob);
                    current = e;
                }
                _ => widths[k] *= 0.5,
            }
        }
    }
    Ok(StagewiseConfig {
        ts: ts.iter().map(|&t| Complex64::new(t, 0.0)).collect(),
        alphas: current.alphas,
        prob: current.prob,
        baseline_prob,
        history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderOptimum {
    pub order: Vec<usize>,
    pub prob: f64,
    pub canonical_prob: f64,
    /// Number of orders evaluated.
    pub evaluated: usize,
}

/// Best assignment of characteristic roots to stages.
///
/// Exhaustive over all `N!` orders when `N <= limit`, otherwise hill
/// climbing over pairwise swaps from the canonical order. Ties keep the
/// first order found, so the canonical order wins unless beaten.
pub fn optimize_root_order(
    target: &TargetState,
    bs: &BeamSplitter,
    limit: usize,
) -> Result<OrderOptimum> {
    let n = target.degree();
    if n == 0 {
        return Ok(OrderOptimum {
            order: Vec::new(),
            prob: 1.0,
            canonical_prob: 1.0,
            evaluated: 1,
        });
    }
    let roots = characteristic_roots(target)?;
    let eval = |order: &[usize]| -> Result<f64> {
        total_probability(&compile_with_roots(target, bs, &roots, Some(order))?)
    };
    let canonical: Vec<usize> = (0..n).collect();
    let canonical_prob = eval(&canonical)?;
    let mut best = (canonical.clone(), canonical_prob);
    let mut evaluated = 1;

    if n <= limit {
        for perm in (0..n).permutations(n) {
            if perm == canonical {
                continue;
            }
            let p = eval(&perm)?;
            evaluated += 1;
            if p > best.1 {
                best = (perm, p);
            }
        }
    } else {
        loop {
            let mut improved = None;
            for i in 0..n {
                for j in i + 1..n {
                    let mut cand = best.0.clone();
                    cand.swap(i, j);
                    let p = eval(&cand)?;
                    evaluated += 1;
                    if p > improved.as_ref().map_or(best.1, |(_, q)| *q) {
                        improved = Some((cand, p));
                    }
                }
            }
            match improved {
                Some(next) => best = next,
                None => break,
            }
        }
    }

    let plan = compile_with_roots(target, bs, &roots, Some(&best.0))?;
    let sim = run_plan(&plan, &TruncationPolicy::default())?;
    if sim.fidelity < FIDELITY_FLOOR {
        return Err(Error::ValidationFailure(format!(
            "order {:?} reaches fidelity {}",
            best.0, sim.fidelity
        )));
    }
    Ok(OrderOptimum {
        order: best.0,
        prob: best.1,
        canonical_prob,
        evaluated,
    })
}
