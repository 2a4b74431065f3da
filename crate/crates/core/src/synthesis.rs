//! Target state -> characteristic roots -> displacement parameters.
//!
//! A target `sum_n psi_n |n>` is proportional to
//! `prod_k (a^dag - conj(beta_k)) |0>`, where the `conj(beta_k)` are the roots
//! of `sum_n psi_n / sqrt(n!) x^n`. Each factor is a displaced creation
//! operator `D(beta) a^dag D(-beta)`, and the experimental cascade
//! `D(alpha_{N+1}) a^dag T^n D(alpha_N) ... a^dag T^n D(alpha_1) |0>`
//! reproduces it for a suitable choice of the `alpha_k`.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::math::{find_roots, poly_from_roots, Polynomial};
use crate::target::TargetState;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Transmittance and reflectance of a lossless beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    t: Complex64,
    r: Complex64,
}

impl BeamSplitter {
    /// Beam splitter with the given transmittance and a real, positive
    /// reflectance `sqrt(1 - |t|^2)`.
    pub fn new(t: Complex64) -> Result<Self> {
        let abs_t = t.norm();
        if !(abs_t > 0.0 && abs_t < 1.0) {
            return Err(Error::InvalidBeamSplitter(format!(
                "|T| = {abs_t} is not in (0, 1)"
            )));
        }
        Ok(Self {
            t,
            r: Complex64::new((1.0 - abs_t * abs_t).sqrt(), 0.0),
        })
    }

    pub fn from_polar(abs_t: f64, phase: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(abs_t, phase))
    }

    pub fn with_reflectance(t: Complex64, r: Complex64) -> Result<Self> {
        let bs = Self::new(t)?;
        if (t.norm_sqr() + r.norm_sqr() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBeamSplitter(format!(
                "|T|^2 + |R|^2 = {} is not 1",
                t.norm_sqr() + r.norm_sqr()
            )));
        }
        Ok(Self { r, ..bs })
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }
}

/// A compiled preparation scheme.
///
/// `betas[k]` is the displacement of the `k`-th factor (stored as `beta`,
/// the root of the characteristic polynomial is `conj(beta)`); `alphas` are
/// the `N + 1` experimental displacements; `order[k]` is the index into the
/// canonically sorted roots used at stage `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPlan {
    pub target: TargetState,
    pub bs: BeamSplitter,
    pub betas: Vec<Complex64>,
    pub alphas: Vec<Complex64>,
    pub order: Vec<usize>,
}

impl SynthesisPlan {
    /// Number of photon-addition stages.
    pub fn stages(&self) -> usize {
        self.betas.len()
    }
}

impl Serialize for SynthesisPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SynthesisPlan", 6)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("T", &self.bs.t)?;
        st.serialize_field("R", &self.bs.r)?;
        st.serialize_field("betas", &self.betas)?;
        st.serialize_field("alphas", &self.alphas)?;
        st.serialize_field("order", &self.order)?;
        st.end()
    }
}

/// Coefficients `psi_n / sqrt(n!)`.
pub fn characteristic_coeffs(target: &TargetState) -> Result<Polynomial> {
    if target.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let mut fact = 1.0f64;
    let coeffs = target
        .psi()
        .iter()
        .enumerate()
        .map(|(n, p)| {
            if n > 0 {
                fact *= n as f64;
            }
            p / fact.sqrt()
        })
        .collect();
    Polynomial::new(coeffs)
}

/// Canonically ordered roots `conj(beta_k)` of the characteristic polynomial.
pub fn characteristic_roots(target: &TargetState) -> Result<Vec<Complex64>> {
    find_roots(&characteristic_coeffs(target)?)
}

/// Compile with the canonical root order (`order = None`) or an explicit
/// permutation of it.
pub fn compile(
    target: &TargetState,
    bs: &BeamSplitter,
    order: Option<&[usize]>,
) -> Result<SynthesisPlan> {
    if target.degree() == 0 {
        return Ok(SynthesisPlan {
            target: target.clone(),
            bs: *bs,
            betas: Vec::new(),
            alphas: vec![ZERO],
            order: Vec::new(),
        });
    }
    let roots = characteristic_roots(target)?;
    compile_with_roots(target, bs, &roots, order)
}

/// Compile from precomputed canonical roots; avoids re-solving when many
/// orders of one target are evaluated.
pub fn compile_with_roots(
    target: &TargetState,
    bs: &BeamSplitter,
    canonical_roots: &[Complex64],
    order: Option<&[usize]>,
) -> Result<SynthesisPlan> {
    let n = canonical_roots.len();
    let order: Vec<usize> = match order {
        Some(o) => {
            validate_order(o, n)?;
            o.to_vec()
        }
        None => (0..n).collect(),
    };
    let betas: Vec<Complex64> = order.iter().map(|&i| canonical_roots[i].conj()).collect();
    let alphas = displacement_parameters(&betas, bs.t);
    Ok(SynthesisPlan {
        target: target.clone(),
        bs: *bs,
        betas,
        alphas,
        order,
    })
}

fn validate_order(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidOrder(format!(
            "expected {n} entries, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::InvalidOrder(format!(
                "{order:?} is not a permutation of 0..{n}"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Displacements for a common transmittance `t`:
///
/// - `alpha_{N+1} = beta_N`
/// - `alpha_k = conj(t)^(N-k+1) (beta_{k-1} - beta_k)` for `k = 2..N`
/// - `alpha_1 = -sum_{l=1..N} t^(-l) alpha_{l+1}`
pub fn displacement_parameters(betas: &[Complex64], t: Complex64) -> Vec<Complex64> {
    let n = betas.len();
    if n == 0 {
        return vec![ZERO];
    }
    let mut alphas = vec![ZERO; n + 1];
    alphas[n] = betas[n - 1];
    for k in 2..=n {
        alphas[k - 1] = t.conj().powi((n - k + 1) as i32) * (betas[k - 2] - betas[k - 1]);
    }
    let mut t_inv_pow = Complex64::new(1.0, 0.0);
    let mut first = ZERO;
    for a in &alphas[1..] {
        t_inv_pow /= t;
        first -= t_inv_pow * a;
    }
    alphas[0] = first;
    alphas
}

/// Displacements for stage-dependent transmittances `ts[k]`.
///
/// Works backwards from the last stage: the offset after stage `k` fixes the
/// root that stage contributes, and every later stage maps that root
/// affinely (`r -> r / T_j + (|T_j|^-2 - 1) conj(delta_j)`). With all `ts`
/// equal this reduces to [`displacement_parameters`].
pub fn stagewise_displacements(betas: &[Complex64], ts: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = betas.len();
    if ts.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} transmittances for {n} stages",
            ts.len()
        )));
    }
    if n == 0 {
        return Ok(vec![ZERO]);
    }
    if let Some(bad) = ts.iter().find(|t| !(t.norm() > 0.0 && t.norm() < 1.0)) {
        return Err(Error::InvalidBeamSplitter(format!(
            "|T| = {} is not in (0, 1)",
            bad.norm()
        )));
    }
    // offsets[k] is the coherent offset right after stage k (1-based)
    let mut offsets = vec![ZERO; n + 1];
    offsets[n] = -betas[n - 1];
    let mut slope = Complex64::new(1.0, 0.0);
    let mut shift = ZERO;
    for k in (2..=n).rev() {
        let t = ts[k - 1];
        shift += slope * (1.0 / t.norm_sqr() - 1.0) * offsets[k].conj();
        slope /= t;
        offsets[k - 1] = -((betas[k - 2].conj() - shift) / slope).conj();
    }
    let mut alphas = Vec::with_capacity(n + 1);
    for j in 1..=n {
        alphas.push(offsets[j] / ts[j - 1] - offsets[j - 1]);
    }
    alphas.push(-offsets[n]);
    Ok(alphas)
}

/// Follow the cascade symbolically, tracking the state as
/// `D(delta) prod_i (a^dag - r_i) |0>`.
///
/// Returns the factor roots `r_i` (in the stage that created them) and the
/// final coherent offset. A correct plan ends with roots `conj(beta_k)` and
/// zero offset.
pub fn trace_factors(alphas: &[Complex64], ts: &[Complex64]) -> (Vec<Complex64>, Complex64) {
    let mut offset = ZERO;
    let mut roots: Vec<Complex64> = Vec::with_capacity(ts.len());
    for (alpha, &t) in alphas.iter().zip(ts) {
        let pre = offset + alpha;
        let shift = (1.0 - t.norm_sqr()) * pre.conj();
        for r in roots.iter_mut() {
            *r = (*r + shift) / t;
        }
        offset = t * pre;
        roots.push(-offset.conj());
    }
    if let Some(last) = alphas.get(ts.len()) {
        offset += last;
    }
    (roots, offset)
}

/// Fidelity between `prod_k (a^dag - conj(beta_k)) |0>` and the target.
pub fn verify_factorization(target: &TargetState, betas: &[Complex64]) -> Result<f64> {
    let roots: Vec<Complex64> = betas.iter().map(|b| b.conj()).collect();
    let poly = poly_from_roots(&roots, Complex64::new(1.0, 0.0))?;
    let mut fact = 1.0f64;
    let amps: Vec<Complex64> = poly
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                fact *= n as f64;
            }
            c * fact.sqrt()
        })
        .collect();
    FockVector::new(amps)?.fidelity(&target.to_fock())
}

/// Local-oscillator amplitudes for displacement beam splitters of
/// reflectance `r_tilde`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoSettings {
    pub r_tilde: Complex64,
    pub alphas_lo: Vec<Complex64>,
}

pub fn lo_settings(plan: &SynthesisPlan, r_tilde: Complex64) -> Result<LoSettings> {
    if !(r_tilde.norm() > 0.0 && r_tilde.norm() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "|R~| = {} is not in (0, 1)",
            r_tilde.norm()
        )));
    }
    Ok(LoSettings {
        r_tilde,
        alphas_lo: plan.alphas.iter().map(|a| a / r_tilde).collect(),
    })
}
