//! Truncated single-mode Fock vectors and the elementary operators acting on
//! them: creation, number scaling `t^n`, and coherent displacement.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::laguerre_sequence_scaled;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Controls how far displaced states are allowed to spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Relative tail norm below which a displaced state counts as converged.
    pub tail_tol: f64,
    pub max_cutoff: usize,
    /// Multiplier on the converged cutoff. `1` keeps the adaptive choice;
    /// larger values pad every displaced state, which is how cutoff
    /// sensitivity is measured.
    pub oversample: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-12,
            max_cutoff: 4096,
            oversample: 1,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_tol: f64, max_cutoff: usize) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail_tol must be in (0,1), got {tail_tol}"
            )));
        }
        if max_cutoff < 1 {
            return Err(Error::InvalidArgument(
                "max_cutoff must be at least 1".into(),
            ));
        }
        Ok(Self {
            tail_tol,
            max_cutoff,
            oversample: 1,
        })
    }

    pub fn with_oversample(mut self, factor: usize) -> Self {
        self.oversample = factor.max(1);
        self
    }
}

/// Amplitudes over number states `|0>, |1>, ..., |cutoff>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument(
                "a Fock vector needs at least one amplitude".into(),
            ));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn vacuum() -> Self {
        Self::number(0)
    }

    pub fn number(n: usize) -> Self {
        let mut amps = vec![ZERO; n + 1];
        amps[n] = ONE;
        Self { amps }
    }

    /// Coherent state `|alpha>` truncated at `cutoff` (not renormalized).
    pub fn coherent(alpha: Complex64, cutoff: usize) -> Self {
        let mut amps = Vec::with_capacity(cutoff + 1);
        let mut a = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        amps.push(a);
        for n in 1..=cutoff {
            a = a * alpha / (n as f64).sqrt();
            amps.push(a);
        }
        Self { amps }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// `<self|other>`, conjugate-linear in `self`; the shorter vector is
    /// zero-padded.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &FockVector) -> Result<f64> {
        let (na, nb) = (self.norm_sqr(), other.norm_sqr());
        if na == 0.0 || nb == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.inner(other).norm_sqr() / (na * nb))
    }

    /// `a^dagger |s>`; the cutoff grows by one.
    pub fn create(&self, policy: &TruncationPolicy) -> Result<Self> {
        let new_cutoff = self.cutoff() + 1;
        if new_cutoff > policy.max_cutoff {
            return Err(Error::CutoffExceeded {
                needed: new_cutoff,
                max: policy.max_cutoff,
            });
        }
        let mut amps = Vec::with_capacity(self.amps.len() + 1);
        amps.push(ZERO);
        amps.extend(
            self.amps
                .iter()
                .enumerate()
                .map(|(n, a)| a * ((n + 1) as f64).sqrt()),
        );
        Ok(Self { amps })
    }

    /// `t^n` applied to each amplitude.
    pub fn scale_number(&self, t: Complex64) -> Self {
        let mut pow = ONE;
        let amps = self
            .amps
            .iter()
            .map(|a| {
                let v = a * pow;
                pow *= t;
                v
            })
            .collect();
        Self { amps }
    }

    /// `D(alpha) |s>` with an adaptively chosen output cutoff.
    ///
    /// The output dimension starts at `cutoff + ceil(4|a|^2 + 10|a| + 10)`
    /// and doubles until the top five amplitudes carry less than
    /// `tail_tol * |s|`; the result is then trimmed to the shortest prefix
    /// whose discarded tail is below the same threshold.
    pub fn displace(&self, alpha: Complex64, policy: &TruncationPolicy) -> Result<Self> {
        if alpha == ZERO {
            return Ok(self.clone());
        }
        let input_norm = self.norm();
        if input_norm == 0.0 {
            return Ok(self.clone());
        }
        let threshold = policy.tail_tol * input_norm;
        let a = alpha.norm();
        let extra = (4.0 * a * a + 10.0 * a + 10.0).ceil() as usize;
        let max_dim = policy.max_cutoff + 1;
        let mut dim = (self.amps.len() + extra).min(max_dim);
        let out = loop {
            let out = self.displaced_rows(alpha, dim);
            let tail: f64 = out[dim.saturating_sub(5)..]
                .iter()
                .map(|v| v.norm_sqr())
                .sum();
            if tail.sqrt() < threshold {
                break out;
            }
            if dim == max_dim {
                return Err(Error::CutoffExceeded {
                    needed: 2 * dim,
                    max: policy.max_cutoff,
                });
            }
            dim = (2 * dim).min(max_dim);
        };

        let mut keep = out.len();
        let mut tail = 0.0;
        while keep > 1 {
            let next = tail + out[keep - 1].norm_sqr();
            if next.sqrt() >= threshold {
                break;
            }
            tail = next;
            keep -= 1;
        }

        let target = keep * policy.oversample;
        let amps = if target <= out.len() {
            out[..target].to_vec()
        } else if target > max_dim {
            return Err(Error::CutoffExceeded {
                needed: target - 1,
                max: policy.max_cutoff,
            });
        } else {
            self.displaced_rows(alpha, target)
        };
        Ok(Self { amps })
    }

    fn displaced_rows(&self, alpha: Complex64, rows: usize) -> Vec<Complex64> {
        let m = displacement_block(alpha, rows, self.amps.len());
        let v = DVector::from_column_slice(&self.amps);
        (m * v).iter().copied().collect()
    }
}

/// `<m|D(alpha)|n>` for `m < dim`, `n < dim`.
pub fn displacement_matrix(
    alpha: Complex64,
    dim: usize,
    policy: &TruncationPolicy,
) -> Result<DMatrix<Complex64>> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if dim - 1 > policy.max_cutoff {
        return Err(Error::CutoffExceeded {
            needed: dim - 1,
            max: policy.max_cutoff,
        });
    }
    Ok(displacement_block(alpha, dim, dim))
}

/// Rectangular block of displacement matrix elements via the Laguerre
/// closed form, filled one diagonal at a time.
///
/// For `m >= n`: `sqrt(n!/m!) a^(m-n) e^(-|a|^2/2) L_n^(m-n)(|a|^2)`;
/// for `m < n` the same with `a -> -conj(a)` and `m`, `n` swapped.
pub(crate) fn displacement_block(alpha: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(rows, cols);
    if alpha == ZERO {
        for i in 0..rows.min(cols) {
            out[(i, i)] = ONE;
        }
        return out;
    }
    let x = alpha.norm_sqr();
    let ln_a = alpha.norm().ln();
    let big = rows.max(cols);
    let mut ln_fact = vec![0.0f64; big + 1];
    for i in 1..=big {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }

    // lower triangle (m = n + k) uses alpha, upper (n = m + k) uses -conj(alpha)
    let sides = [
        (alpha, rows, cols, false),
        (-alpha.conj(), cols, rows, true),
    ];
    for (z, long, short, transpose) in sides {
        let arg = z.arg();
        let start = if transpose { 1 } else { 0 };
        for k in start..long {
            let len = short.min(long - k);
            if len == 0 {
                continue;
            }
            let lag = laguerre_sequence_scaled(len - 1, k, x);
            let rot = Complex64::from_polar(1.0, k as f64 * arg);
            for (j, &(l_val, l_scale)) in lag.iter().enumerate() {
                if l_val == 0.0 {
                    continue;
                }
                let ln_mag = 0.5 * (ln_fact[j] - ln_fact[j + k]) + k as f64 * ln_a - 0.5 * x
                    + l_scale
                    + l_val.abs().ln();
                let mag = ln_mag.exp() * l_val.signum();
                let (r, c) = if transpose { (j, j + k) } else { (j + k, j) };
                out[(r, c)] = rot * mag;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// exp(a a^dag - conj(a) a) by Taylor series on a truncated space.
    fn taylor_displacement(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
        let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
        for n in 0..dim - 1 {
            let s = ((n + 1) as f64).sqrt();
            gen[(n + 1, n)] += alpha * s;
            gen[(n, n + 1)] -= alpha.conj() * s;
        }
        let mut term = DMatrix::<Complex64>::identity(dim, dim);
        let mut sum = term.clone();
        for k in 1..80 {
            term = &term * &gen / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn creation_ladder() {
        let p = TruncationPolicy::default();
        assert_eq!(
            FockVector::vacuum().create(&p).unwrap(),
            FockVector::number(1)
        );
        let out = FockVector::number(3).create(&p).unwrap();
        assert_eq!(out.cutoff(), 4);
        assert!((out.amps()[4] - c(2.0, 0.0)).norm() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = FockVector::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let out = s.create(&p).unwrap();
        assert_eq!(out.amps()[0], c(0.0, 0.0));
        assert!((out.amps()[1] - c(h, 0.0)).norm() < 1e-15);
        assert!((out.amps()[2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn creation_respects_max_cutoff() {
        let p = TruncationPolicy::new(1e-12, 3).unwrap();
        assert!(FockVector::number(2).create(&p).is_ok());
        assert_eq!(
            FockVector::number(3).create(&p),
            Err(Error::CutoffExceeded { needed: 4, max: 3 })
        );
    }

    #[test]
    fn number_scaling() {
        let s = FockVector::coherent(c(0.4, 0.3), 10);
        assert_eq!(s.scale_number(c(1.0, 0.0)), s);
        let out = FockVector::number(2).scale_number(c(0.99, 0.0));
        assert!((out.amps()[2].re - 0.9801).abs() < 1e-15);

        let t = c(0.8, 0.3);
        let alpha = c(1.1, -0.4);
        let scaled = FockVector::coherent(alpha, 60).scale_number(t);
        let direct = FockVector::coherent(t * alpha, 60);
        assert!((scaled.fidelity(&direct).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn displacement_matrix_basics() {
        let p = TruncationPolicy::default();
        let alpha = c(0.5, 0.0);
        let m = displacement_matrix(alpha, 10, &p).unwrap();
        assert!((m[(0, 0)].re - (-0.125f64).exp()).abs() < 1e-15);
        assert!((m[(1, 0)].re - 0.441248451292298).abs() < 1e-12);
        let id = displacement_matrix(c(0.0, 0.0), 6, &p).unwrap();
        assert_eq!(id, DMatrix::identity(6, 6));
        assert!(displacement_matrix(alpha, 0, &p).is_err());
        let small = TruncationPolicy::new(1e-12, 5).unwrap();
        assert!(matches!(
            displacement_matrix(alpha, 7, &small),
            Err(Error::CutoffExceeded { .. })
        ));
    }

    #[test]
    fn displacement_matches_taylor_oracle() {
        let p = TruncationPolicy::default();
        let alpha = c(0.5, 0.0);
        let oracle = taylor_displacement(alpha, 30);
        assert!((oracle[(1, 0)].re - 0.5 * (-0.125f64).exp()).abs() < 1e-12);
        for alpha in [c(0.5, 0.0), c(-0.3, 0.8), c(1.2, 0.7)] {
            let dim = 60;
            let oracle = taylor_displacement(alpha, dim);
            let m = displacement_matrix(alpha, dim, &p).unwrap();
            // the truncated generator is only faithful well below the edge
            for r in 0..20 {
                for col in 0..20 {
                    let d = (m[(r, col)] - oracle[(r, col)]).norm();
                    assert!(d < 1e-11, "alpha={alpha} ({r},{col}) diff {d}");
                }
            }
        }
    }

    #[test]
    fn displacement_columns_orthonormal() {
        let p = TruncationPolicy::default();
        for alpha in [c(0.7, 0.2), c(-2.0, 1.5), c(5.0, -3.0)] {
            let a: f64 = alpha.norm();
            let dim = 400;
            let conv_cols = dim - (4.0 * a * a + 10.0 * a + 10.0).ceil() as usize - 20;
            let m = displacement_matrix(alpha, dim, &p).unwrap();
            for i in 0..conv_cols.min(60) {
                for j in 0..conv_cols.min(60) {
                    let dot: Complex64 = (0..dim).map(|r| m[(r, i)].conj() * m[(r, j)]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot - c(expect, 0.0)).norm() < 1e-9,
                        "alpha={alpha} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn displace_vacuum_gives_coherent_state() {
        let p = TruncationPolicy::default();
        let alpha = c(1.0, 0.0);
        let out = FockVector::vacuum().displace(alpha, &p).unwrap();
        let coh = FockVector::coherent(alpha, 5);
        for n in 0..=5 {
            assert!((out.amps()[n] - coh.amps()[n]).norm() < 1e-10);
        }
        let back = out.displace(-alpha, &p).unwrap();
        assert!(back.fidelity(&FockVector::vacuum()).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn displace_preserves_norm() {
        let p = TruncationPolicy::default();
        let out = FockVector::number(1).displace(c(0.3, 0.0), &p).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-11);
        let s = FockVector::coherent(c(0.5, 0.5), 20).normalized().unwrap();
        let out = s.displace(c(-4.0, 2.5), &p).unwrap();
        assert!((out.norm() - 1.0).abs() < 10.0 * p.tail_tol);
    }

    #[test]
    fn displace_oversampling_pads() {
        let p = TruncationPolicy::default();
        let s = FockVector::number(2);
        let a = s.displace(c(1.5, -0.5), &p).unwrap();
        let b = s.displace(c(1.5, -0.5), &p.with_oversample(2)).unwrap();
        assert_eq!(b.amps().len(), 2 * a.amps().len());
        assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn displace_reports_cutoff_exhaustion() {
        let p = TruncationPolicy::new(1e-12, 40).unwrap();
        assert!(matches!(
            FockVector::vacuum().displace(c(6.0, 0.0), &p),
            Err(Error::CutoffExceeded { .. })
        ));
    }

    #[test]
    fn inner_product_and_fidelity() {
        let s = FockVector::coherent(c(0.3, -0.9), 25);
        assert!((s.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(
            FockVector::vacuum().inner(&FockVector::number(1)),
            c(0.0, 0.0)
        );
        let scaled = s.scaled(c(-2.0, 3.5));
        assert!((scaled.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);
        let zero = FockVector::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(zero.fidelity(&s), Err(Error::ZeroNorm));
    }

    #[test]
    fn creation_norm_identity() {
        let s = FockVector::coherent(c(0.9, 0.4), 30);
        let expect: f64 = s
            .amps()
            .iter()
            .enumerate()
            .map(|(n, a)| (n + 1) as f64 * a.norm_sqr())
            .sum();
        let out = s.create(&TruncationPolicy::default()).unwrap();
        assert!((out.norm_sqr() - expect).abs() < 1e-14 * expect);
    }
}
