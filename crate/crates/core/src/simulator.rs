//! Direct execution of the conditional-measurement cascade on truncated Fock
//! vectors. Independent of the closed-form probability evaluation, and used
//! as its oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{displacement_block, FockVector, TruncationPolicy};
use crate::synthesis::{BeamSplitter, SynthesisPlan};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `R a^dag T^n |s>`: the state left behind when the monitored output of a
/// beam splitter fed with one photon registers nothing.
pub fn apply_y(s: &FockVector, bs: &BeamSplitter, policy: &TruncationPolicy) -> Result<FockVector> {
    Ok(s.scale_number(bs.t()).create(policy)?.scaled(bs.r()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutcome {
    #[serde(skip)]
    pub final_state: FockVector,
    pub total_prob: f64,
    /// Fidelity of the final state with the plan's target.
    pub fidelity: f64,
    /// Squared norm of the unnormalized state after each photon addition.
    pub stage_norms_sq: Vec<f64>,
    pub cutoff_used: usize,
    /// Coherent offset carried by the state after each stage.
    #[serde(skip)]
    pub offsets: Vec<Complex64>,
}

/// Run a compiled plan with its common beam splitter.
pub fn run_plan(plan: &SynthesisPlan, policy: &TruncationPolicy) -> Result<SimOutcome> {
    let splitters = vec![plan.bs; plan.stages()];
    let mut out = run_cascade(&plan.alphas, &splitters, policy)?;
    out.fidelity = out.final_state.fidelity(&plan.target.to_fock())?;
    Ok(out)
}

/// [`run_plan`] on the dense engine, see [`run_cascade_dense`].
pub fn run_plan_dense(plan: &SynthesisPlan, policy: &TruncationPolicy) -> Result<SimOutcome> {
    let splitters = vec![plan.bs; plan.stages()];
    let mut out = run_cascade_dense(&plan.alphas, &splitters, policy)?;
    out.fidelity = out.final_state.fidelity(&plan.target.to_fock())?;
    Ok(out)
}

fn check_lengths(alphas: &[Complex64], splitters: &[BeamSplitter]) -> Result<()> {
    if alphas.len() != splitters.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} displacements for {} stages",
            alphas.len(),
            splitters.len()
        )));
    }
    Ok(())
}

/// Start from vacuum; for each stage displace by `alphas[k]` and apply `Y`
/// for `splitters[k]`; finish with the displacement `alphas[N]`.
///
/// The state is carried as `D(delta) |phi>` with `phi` a short Fock vector.
/// Displacements only move the frame, and `Y` is pushed through it with
///
/// ```text
/// T^n D(d) = exp(-(1 - |T|^2) |d|^2 / 2) D(T d) exp(c a) T^n,  c = conj(d) (conj(T) - 1/T)
/// a^dag D(b) = D(b) (a^dag + conj(b))
/// ```
///
/// so `phi` never holds a large coherent amplitude. A dense evaluation of
/// the same cascade has to resolve amplitudes far out in the Poisson tail,
/// which `T^n` then magnifies; see [`run_cascade_dense`]. Only the final
/// frame, which is near the origin for compiled plans, is expanded with a
/// real displacement. `fidelity` is left at NaN; [`run_plan`] fills it in.
pub fn run_cascade(
    alphas: &[Complex64],
    splitters: &[BeamSplitter],
    policy: &TruncationPolicy,
) -> Result<SimOutcome> {
    check_lengths(alphas, splitters)?;
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    let mut delta = ZERO;
    let mut log_norm = 0.0;
    let mut stage_norms_sq = Vec::with_capacity(splitters.len());
    let mut offsets = Vec::with_capacity(splitters.len());

    for (alpha, bs) in alphas.iter().zip(splitters) {
        // D(alpha) D(delta) = exp(i Im(alpha conj(delta))) D(alpha + delta)
        let phase = Complex64::from_polar(1.0, (alpha * delta.conj()).im);
        delta += alpha;
        let (t, r) = (bs.t(), bs.r());
        let mut pow = phase;
        for a in phi.iter_mut() {
            *a *= pow;
            pow *= t;
        }
        let phi2 = exp_lowering(&phi, delta.conj() * (t.conj() - t.inv()));
        let moved = t * delta;
        let mut next = vec![ZERO; phi2.len() + 1];
        for (n, a) in phi2.iter().enumerate() {
            next[n + 1] += a * ((n + 1) as f64).sqrt();
            next[n] += a * moved.conj();
        }
        if next.len() > policy.max_cutoff {
            return Err(Error::CutoffExceeded {
                needed: next.len(),
                max: policy.max_cutoff,
            });
        }
        let n2: f64 = next.iter().map(|a| a.norm_sqr()).sum();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        log_norm += n2.ln() + r.norm_sqr().ln() - (1.0 - t.norm_sqr()) * delta.norm_sqr();
        if log_norm < (1e-300f64).ln() {
            return Err(Error::ZeroNorm);
        }
        let inv = n2.sqrt().recip();
        phi = next.into_iter().map(|a| a * inv).collect();
        delta = moved;
        stage_norms_sq.push(log_norm.exp());
        offsets.push(delta);
    }

    let last = alphas[splitters.len()];
    let phase = Complex64::from_polar(1.0, (last * delta.conj()).im);
    let phi = FockVector::new(phi.into_iter().map(|a| a * phase).collect())?;
    let final_state = phi.displace(delta + last, policy)?.normalized()?;
    let total_prob = stage_norms_sq.last().copied().unwrap_or(1.0);
    Ok(SimOutcome {
        cutoff_used: final_state.cutoff().max(splitters.len() + 1),
        final_state,
        stage_norms_sq,
        offsets,
        total_prob,
        fidelity: f64::NAN,
    })
}

/// `exp(c a) |phi>` for a finitely supported `phi`; exact, no truncation.
fn exp_lowering(phi: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut out = phi.to_vec();
    // Horner-like accumulation: the j-th term is c^j / j! a^j phi.
    let mut term = phi.to_vec();
    for j in 1..phi.len() {
        let lowered: Vec<Complex64> = (1..term.len())
            .map(|m| term[m] * ((m as f64).sqrt() * c / j as f64))
            .collect();
        for (o, v) in out.iter_mut().zip(&lowered) {
            *o += v;
        }
        term = lowered;
    }
    out
}

/// The same cascade evaluated literally: dense displacements on an
/// adaptively truncated Fock vector, renormalizing after every stage.
///
/// Accurate while the coherent offsets stay moderate. With large offsets
/// and small `|T|` the surviving part of the state comes from a tail whose
/// amplitudes sit below double-precision resolution, and this engine loses
/// accuracy where [`run_cascade`] does not.
pub fn run_cascade_dense(
    alphas: &[Complex64],
    splitters: &[BeamSplitter],
    policy: &TruncationPolicy,
) -> Result<SimOutcome> {
    check_lengths(alphas, splitters)?;
    let mut state = FockVector::vacuum();
    let mut log_norm = 0.0;
    let mut offset = ZERO;
    let mut stage_norms_sq = Vec::with_capacity(splitters.len());
    let mut offsets = Vec::with_capacity(splitters.len());
    let mut cutoff_used = 0;

    for (alpha, bs) in alphas.iter().zip(splitters) {
        state = state.displace(*alpha, policy)?;
        cutoff_used = cutoff_used.max(state.cutoff());
        state = apply_y(&state, bs, policy)?;
        cutoff_used = cutoff_used.max(state.cutoff());

        let n2 = state.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        log_norm += n2.ln();
        if log_norm < (1e-300f64).ln() {
            return Err(Error::ZeroNorm);
        }
        state = state.scaled(Complex64::new(n2.sqrt().recip(), 0.0));
        stage_norms_sq.push(log_norm.exp());
        offset = bs.t() * (offset + alpha);
        offsets.push(offset);
    }
    state = state.displace(alphas[splitters.len()], policy)?;
    cutoff_used = cutoff_used.max(state.cutoff());
    let final_state = state.normalized()?;
    let total_prob = stage_norms_sq.last().copied().unwrap_or(1.0);
    Ok(SimOutcome {
        final_state,
        stage_norms_sq,
        offsets,
        total_prob,
        fidelity: f64::NAN,
        cutoff_used,
    })
}

/// Residual of the commutation relation
///
/// ```text
/// [D(-a) T^n D(a)] a^dag = T D(-s a) a^dag D(s a) [D(-a) T^n D(a)],  s = conj(1 - 1/T)
/// ```
///
/// evaluated with `dim`-dimensional matrices and compared on the leading
/// block unaffected by truncation. The residual is the largest absolute row
/// sum of the difference.
pub fn verify_commutation_identity(alpha: Complex64, t: Complex64, dim: usize) -> Result<f64> {
    if dim < 4 {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is too small"
        )));
    }
    let shift = (Complex64::new(1.0, 0.0) - t.inv()).conj() * alpha;
    let spread = alpha.norm().max(shift.norm());
    let buffer = (4.0 * spread * spread + 10.0 * spread + 10.0).ceil() as usize;
    if buffer >= dim {
        return Err(Error::CutoffExceeded {
            needed: buffer + dim,
            max: dim,
        });
    }
    // Work in a doubled space so products are exact on the first `dim`
    // indices, then compare the block below `dim - buffer`. T^n is diagonal
    // and a^dag a shift, so only two dense products are needed.
    let big = 2 * dim;
    let block = dim - buffer;
    let d = |a: Complex64| displacement_block(a, big, big);
    let powers: Vec<Complex64> = (0..big)
        .scan(Complex64::new(1.0, 0.0), |p, _| {
            let cur = *p;
            *p *= t;
            Some(cur)
        })
        .collect();
    let mut scaled = d(alpha);
    for (r, p) in powers.iter().enumerate() {
        let mut row = scaled.row_mut(r);
        row *= *p;
    }
    let mut sandwich = d(-alpha) * scaled;
    // X a^dag: column c of the result is sqrt(c + 1) times column c + 1 of X.
    let times_create = |x: &DMatrix<Complex64>| {
        let mut out = DMatrix::<Complex64>::zeros(x.nrows(), x.ncols());
        for c in 0..x.ncols() - 1 {
            out.set_column(
                c,
                &(x.column(c + 1) * Complex64::new(((c + 1) as f64).sqrt(), 0.0)),
            );
        }
        out
    };
    let lhs = times_create(&sandwich);
    let left = times_create(&d(-shift)) * d(shift);
    sandwich *= t;
    let rhs = left.rows(0, block) * sandwich.columns(0, block);

    let residual = (0..block)
        .map(|r| {
            (0..block)
                .map(|c| (lhs[(r, c)] - rhs[(r, c)]).norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}
