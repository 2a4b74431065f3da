//! Closed-form success probability of a compiled cascade.
//!
//! After `k` stages the unnormalized state has squared norm
//!
//! ```text
//! P_k^2 = |R|^(2k) |T|^(k(k-1)) || prod_m (a^dag + conj(b_mk)) |gamma_k> ||^2
//!         * exp(-|R|^2 sum_m |sum_{j<=m} T^(m-j) alpha_j|^2)
//! ```
//!
//! The norm is expanded as a double sum over elementary symmetric
//! polynomials of the `b_mk`, weighted by antinormally ordered coherent-state
//! moments that reduce to Laguerre polynomials.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::{elementary_symmetric, laguerre};
use crate::synthesis::SynthesisPlan;

/// Largest stage count the closed form is evaluated for.
pub const MAX_STAGES: usize = 30;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_stage(plan: &SynthesisPlan, k: usize) -> Result<()> {
    let n = plan.stages();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("stage {k} outside 1..={n}")));
    }
    if k > MAX_STAGES {
        return Err(Error::DegreeTooLarge {
            degree: k,
            max: MAX_STAGES,
        });
    }
    Ok(())
}

/// `gamma_k = sum_{j=1..k} T^(k+1-j) alpha_j`.
pub fn gamma_k(plan: &SynthesisPlan, k: usize) -> Result<Complex64> {
    check_stage(plan, k)?;
    let t = plan.bs.t();
    Ok(plan.alphas[..k].iter().fold(ZERO, |acc, a| t * (acc + a)))
}

/// `b_1k = 0`, `b_mk = -sum_{j=0..m-2} conj(T)^(-j-1) alpha_{k-j}`.
pub fn b_coefficients(plan: &SynthesisPlan, k: usize) -> Result<Vec<Complex64>> {
    check_stage(plan, k)?;
    let inv = plan.bs.t().conj().inv();
    let mut out = Vec::with_capacity(k);
    out.push(ZERO);
    let mut acc = ZERO;
    let mut pow = Complex64::new(1.0, 0.0);
    for j in 0..k - 1 {
        pow *= inv;
        acc += pow * plan.alphas[k - 1 - j];
        out.push(-acc);
    }
    Ok(out)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `<gamma| a^(k-m) (a^dag)^(k-l) |gamma>`.
pub fn coherent_moment(gamma: Complex64, k: usize, m: usize, l: usize) -> Complex64 {
    let x = -gamma.norm_sqr();
    if l < m {
        let p = m - l;
        gamma.conj().powi(p as i32) * factorial(k - m) * laguerre(k - m, p, x)
    } else {
        let p = l - m;
        gamma.powi(p as i32) * factorial(k - l) * laguerre(k - l, p, x)
    }
}

/// `|| prod_m (a^dag + conj(b_m)) |gamma> ||^2` as a double sum of
/// elementary symmetric polynomials against coherent moments.
pub fn factor_norm_sq(b: &[Complex64], gamma: Complex64) -> Complex64 {
    let k = b.len();
    let e = elementary_symmetric(b);
    let mut norm = ZERO;
    for (m, em) in e.iter().enumerate() {
        for (l, el) in e.iter().enumerate() {
            norm += em * el.conj() * coherent_moment(gamma, k, m, l);
        }
    }
    norm
}

/// `P_k^2`, the squared norm after `k` displacement / photon-addition pairs.
pub fn stage_norm_sq(plan: &SynthesisPlan, k: usize) -> Result<f64> {
    let gamma = gamma_k(plan, k)?;
    let b = b_coefficients(plan, k)?;
    // a^dag D(g) = D(g) (a^dag + conj(g)): moving the coherent offset into
    // the factors leaves a vacuum expectation with only positive terms.
    // Expanding around gamma instead cancels like |gamma|^(2k).
    let shifted: Vec<Complex64> = b.iter().map(|x| x + gamma).collect();
    let norm = factor_norm_sq(&shifted, ZERO);
    if !(norm.re > 0.0) || norm.im.abs() > 1e-8 * norm.re {
        return Err(Error::NumericalInconsistency(format!(
            "stage {k}: factor norm {norm} is not a positive real"
        )));
    }

    let t = plan.bs.t();
    let r2 = plan.bs.r().norm_sqr();
    let mut running = ZERO;
    let mut exponent = 0.0;
    for a in &plan.alphas[..k] {
        running = t * running + a;
        exponent += running.norm_sqr();
    }
    let kf = k as f64;
    let log_p = kf * r2.ln() + kf * (kf - 1.0) * t.norm().ln() + norm.re.ln() - r2 * exponent;
    Ok(log_p.exp())
}

/// Every intermediate quantity of the closed-form evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityBreakdown {
    pub gammas: Vec<Complex64>,
    pub b_table: Vec<Vec<Complex64>>,
    pub stage_norms: Vec<f64>,
    pub conditionals: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub k: usize,
    pub gamma: Complex64,
    #[serde(rename = "P_k_sq")]
    pub p_k_sq: f64,
    pub conditional: f64,
}

impl ProbabilityBreakdown {
    pub fn records(&self) -> Vec<StageRecord> {
        (0..self.stage_norms.len())
            .map(|i| StageRecord {
                k: i + 1,
                gamma: self.gammas[i],
                p_k_sq: self.stage_norms[i],
                conditional: self.conditionals[i],
            })
            .collect()
    }
}

impl Serialize for ProbabilityBreakdown {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ProbabilityBreakdown", 2)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("stages", &self.records())?;
        st.end()
    }
}

/// Conditional probabilities `P_k^2 / P_{k-1}^2` from running stage norms.
pub fn conditionals_from_norms(norms: &[f64]) -> Vec<f64> {
    let mut prev = 1.0;
    norms
        .iter()
        .map(|&p| {
            let c = p / prev;
            prev = p;
            c
        })
        .collect()
}

pub fn breakdown(plan: &SynthesisPlan) -> Result<ProbabilityBreakdown> {
    let n = plan.stages();
    let mut out = ProbabilityBreakdown {
        gammas: Vec::with_capacity(n),
        b_table: Vec::with_capacity(n),
        stage_norms: Vec::with_capacity(n),
        conditionals: Vec::new(),
        total: 1.0,
    };
    for k in 1..=n {
        out.gammas.push(gamma_k(plan, k)?);
        out.b_table.push(b_coefficients(plan, k)?);
        out.stage_norms.push(stage_norm_sq(plan, k)?);
    }
    out.conditionals = conditionals_from_norms(&out.stage_norms);
    if let Some(&last) = out.stage_norms.last() {
        out.total = last;
    }
    let product: f64 = out.conditionals.iter().product();
    if (product - out.total).abs() > 1e-12 * out.total {
        return Err(Error::NumericalInconsistency(format!(
            "product of conditionals {product} differs from total {}",
            out.total
        )));
    }
    if let Some(c) = out
        .conditionals
        .iter()
        .find(|c| !(**c > 0.0 && **c <= 1.0 + 1e-12))
    {
        return Err(Error::NumericalInconsistency(format!(
            "conditional probability {c}"
        )));
    }
    Ok(out)
}

/// Total success probability `P_N^2` (1 for an empty plan).
pub fn total_probability(plan: &SynthesisPlan) -> Result<f64> {
    match plan.stages() {
        0 => Ok(1.0),
        n => stage_norm_sq(plan, n),
    }
}
