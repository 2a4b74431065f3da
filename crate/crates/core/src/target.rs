//! Target states: arbitrary finite Fock superpositions and truncated
//! coherent phase states.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::math::poly_from_roots;

/// Normalized coefficients `psi_0..psi_N` with `psi_N != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    psi: Vec<Complex64>,
}

impl Serialize for TargetState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TargetState", 2)?;
        st.serialize_field("psi", &self.psi)?;
        st.serialize_field("N", &self.degree())?;
        st.end()
    }
}

impl TargetState {
    /// Strips trailing zeros and normalizes; relative phases are kept.
    pub fn new(coeffs: &[Complex64]) -> Result<Self> {
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let len = coeffs
            .iter()
            .rposition(|c| c.norm_sqr() > 0.0)
            .ok_or(Error::AllZero)?
            + 1;
        let norm = coeffs[..len]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            psi: coeffs[..len].iter().map(|c| c / norm).collect(),
        })
    }

    /// The state proportional to `prod_k (a^dag - roots[k]) |0>`.
    pub fn from_factors(roots: &[Complex64]) -> Result<Self> {
        let poly = poly_from_roots(roots, Complex64::new(1.0, 0.0))?;
        let mut fact = 1.0f64;
        let coeffs: Vec<Complex64> = poly
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
        Self::new(&coeffs)
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    /// Highest occupied Fock index `N`.
    pub fn degree(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn to_fock(&self) -> FockVector {
        FockVector::new(self.psi.clone()).expect("target coefficients are finite and non-empty")
    }

    /// Same state with every coefficient multiplied by `e^(i theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let r = Complex64::from_polar(1.0, theta);
        Self {
            psi: self.psi.iter().map(|c| c * r).collect(),
        }
    }
}

/// Parameters of a truncated coherent phase state `|z; N>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStateSpec {
    z: Complex64,
    n: usize,
}

impl PhaseStateSpec {
    pub fn new(z: Complex64, n: usize) -> Result<Self> {
        if !(z.norm() <= 1.0) {
            return Err(Error::InvalidPhaseState(format!(
                "|z| = {} exceeds 1",
                z.norm()
            )));
        }
        Ok(Self { z, n })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Normalization constant `C(z; N)`.
    pub fn normalization(&self) -> f64 {
        let r2 = self.z.norm_sqr();
        if r2 == 1.0 {
            1.0 / ((self.n + 1) as f64).sqrt()
        } else if 1.0 - r2 < 1e-6 {
            // closed form cancels badly near the unit circle; sum the series
            let sum: f64 = (0..=self.n).map(|k| r2.powi(k as i32)).sum();
            1.0 / sum.sqrt()
        } else {
            ((1.0 - r2) / (1.0 - r2.powi(self.n as i32 + 1))).sqrt()
        }
    }
}

/// `C(z;N) sum_n z^n |n>`. A zero `z` collapses to the vacuum.
pub fn phase_state(spec: &PhaseStateSpec) -> TargetState {
    let c = spec.normalization();
    let mut pow = Complex64::new(c, 0.0);
    let mut psi = Vec::with_capacity(spec.n + 1);
    for _ in 0..=spec.n {
        psi.push(pow);
        pow *= spec.z;
    }
    while psi.len() > 1 && psi.last().is_some_and(|v| v.norm_sqr() == 0.0) {
        psi.pop();
    }
    TargetState { psi }
}
