//! Scalar numerical primitives: generalized Laguerre polynomials, elementary
//! symmetric polynomials and complex polynomial root finding.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Generalized Laguerre polynomial `L_n^m(x)` by forward recurrence in `n`.
pub fn laguerre(n: usize, m: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + m as f64 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + m as f64 - x) * cur - (kf + m as f64) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0^m(x), ..., L_nmax^m(x)`, each returned as a `(mantissa, log_scale)`
/// pair with value `mantissa * exp(log_scale)`.
///
/// The recurrence is rescaled whenever it grows past `1e200`, so long
/// sequences at large `m` stay finite.
pub fn laguerre_sequence_scaled(nmax: usize, m: usize, x: f64) -> Vec<(f64, f64)> {
    const BIG: f64 = 1e200;
    let ln_big = BIG.ln();
    let mf = m as f64;
    let mut out = Vec::with_capacity(nmax + 1);
    let mut scale = 0.0;
    let mut prev = 1.0;
    out.push((prev, scale));
    if nmax == 0 {
        return out;
    }
    let mut cur = 1.0 + mf - x;
    out.push((cur, scale));
    for k in 1..nmax {
        let kf = k as f64;
        let mut next = ((2.0 * kf + 1.0 + mf - x) * cur - (kf + mf) * prev) / (kf + 1.0);
        prev = cur;
        if next.abs() > BIG {
            next /= BIG;
            prev /= BIG;
            scale += ln_big;
        }
        cur = next;
        out.push((cur, scale));
    }
    out
}

/// Elementary symmetric polynomials `e_0..e_k` of `values` (Vieta expansion).
pub fn elementary_symmetric(values: &[Complex64]) -> Vec<Complex64> {
    let mut e = Vec::with_capacity(values.len() + 1);
    e.push(Complex64::new(1.0, 0.0));
    for &v in values {
        e.push(Complex64::new(0.0, 0.0));
        for m in (1..e.len()).rev() {
            let lower = e[m - 1];
            e[m] += v * lower;
        }
    }
    e
}

/// Dense univariate polynomial, coefficients in ascending degree order.
///
/// Trailing zero coefficients are stripped on construction so the leading
/// coefficient is always nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::AllZero);
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "non-finite polynomial coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value and first derivative at `x` (Horner).
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Acceptance bound on `|p(root)|` used by [`find_roots`].
    pub fn residual_bound(&self, root: Complex64) -> f64 {
        1e-10 * self.max_coeff() * root.norm().max(1.0).powi(self.degree() as i32)
    }
}

/// Expand `leading * prod(x - root)` into a polynomial.
pub fn poly_from_roots(roots: &[Complex64], leading: Complex64) -> Result<Polynomial> {
    if leading == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument(
            "leading coefficient must be nonzero".into(),
        ));
    }
    let mut coeffs = vec![leading];
    for &r in roots {
        coeffs.push(Complex64::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let lower = coeffs[i - 1];
            coeffs[i] = lower - r * coeffs[i];
        }
        coeffs[0] = -r * coeffs[0];
    }
    Polynomial::new(coeffs)
}

/// Phase in `(-pi, pi]`.
pub fn phase(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Sort by ascending modulus, ties (within `1e-9` relative) broken by
/// ascending phase.
pub fn canonical_sort(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal));
    let mut start = 0;
    while start < roots.len() {
        let mut end = start + 1;
        while end < roots.len() {
            let (lo, hi) = (roots[end - 1].norm(), roots[end].norm());
            if hi - lo > 1e-9 * hi.max(1e-300) {
                break;
            }
            end += 1;
        }
        roots[start..end]
            .sort_by(|a, b| phase(*a).partial_cmp(&phase(*b)).unwrap_or(Ordering::Equal));
        start = end;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootFinderOptions {
    pub max_sweeps: usize,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        Self { max_sweeps: 1000 }
    }
}

/// All roots of `p` with multiplicity, in canonical order.
pub fn find_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    find_roots_with(p, RootFinderOptions::default())
}

pub fn find_roots_with(p: &Polynomial, opts: RootFinderOptions) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "polynomial of degree 0 has no roots".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let zero_roots = p.coeffs.iter().take_while(|c| **c == zero).count();
    let reduced = Polynomial::new(p.coeffs[zero_roots..].to_vec())?;

    let mut roots = vec![zero; zero_roots];
    match reduced.degree() {
        0 => {}
        1 => roots.push(-reduced.coeffs[0] / reduced.coeffs[1]),
        _ => {
            let mut found = aberth(&reduced, opts.max_sweeps)?;
            for r in found.iter_mut() {
                *r = newton_polish(&reduced, *r);
            }
            merge_clusters(&reduced, &mut found);
            roots.extend(found);
        }
    }

    for &r in &roots {
        let res = p.eval(r).norm();
        if !(res <= p.residual_bound(r)) {
            return Err(Error::NonConvergence {
                sweeps: opts.max_sweeps,
            });
        }
    }
    canonical_sort(&mut roots);
    Ok(roots)
}

/// Aberth–Ehrlich simultaneous iteration on a polynomial with nonzero
/// constant term.
fn aberth(p: &Polynomial, max_sweeps: usize) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.leading().norm();
    // max_k |c_{n-k}/c_n|^{1/k}: at least half the largest root modulus.
    let radius = (1..=n)
        .map(|k| (p.coeffs[n - k].norm() / lead).powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + 0.4))
        .collect();

    let mut stalled = 0;
    let mut last_step = f64::INFINITY;
    for _ in 0..max_sweeps {
        let mut step = 0.0f64;
        for i in 0..n {
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / dv;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let delta = w / (Complex64::new(1.0, 0.0) - w * s);
            if delta.re.is_finite() && delta.im.is_finite() {
                z[i] -= delta;
                step = step.max(delta.norm() / z[i].norm().max(1.0));
            }
        }
        if step < 1e-14 {
            return Ok(z);
        }
        // Multiple roots converge only linearly and then stall at rounding
        // noise; accept once every residual is within bound.
        stalled = if step >= last_step { stalled + 1 } else { 0 };
        last_step = step;
        if stalled >= 3 && z.iter().all(|&r| p.eval(r).norm() <= p.residual_bound(r)) {
            return Ok(z);
        }
    }
    if z.iter().all(|&r| p.eval(r).norm() <= p.residual_bound(r)) {
        Ok(z)
    } else {
        Err(Error::NonConvergence { sweeps: max_sweeps })
    }
}

fn newton_polish(p: &Polynomial, mut r: Complex64) -> Complex64 {
    let mut res = p.eval(r).norm();
    for _ in 0..3 {
        let (v, dv) = p.eval_with_derivative(r);
        if dv.norm() == 0.0 {
            break;
        }
        let cand = r - v / dv;
        let cand_res = p.eval(cand).norm();
        if cand_res < res {
            r = cand;
            res = cand_res;
        } else {
            break;
        }
    }
    r
}

fn derivative(p: &Polynomial, order: usize) -> Option<Polynomial> {
    let mut c = p.coeffs.clone();
    for _ in 0..order {
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a * i as f64)
            .collect();
    }
    Polynomial::new(c).ok()
}

/// Replace clusters of numerically coincident roots (a multiple root split
/// by rounding) with their centroid, when the centroid's residual is no worse.
fn merge_clusters(p: &Polynomial, roots: &mut [Complex64]) {
    const RADIUS: f64 = 1e-4;
    let n = roots.len();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let scale = roots[i].norm().max(1.0);
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (roots[j] - roots[i]).norm() < RADIUS * scale)
            .collect();
        if members.len() < 2 {
            continue;
        }
        let mut centroid =
            members.iter().map(|&j| roots[j]).sum::<Complex64>() / members.len() as f64;
        // An m-fold root is a simple root of the (m-1)-th derivative.
        if let Some(dp) = derivative(p, members.len() - 1) {
            let mut res = dp.eval(centroid).norm();
            for _ in 0..8 {
                let (v, dv) = dp.eval_with_derivative(centroid);
                if dv.norm() == 0.0 {
                    break;
                }
                let cand = centroid - v / dv;
                let cand_res = dp.eval(cand).norm();
                if !(cand_res < res) {
                    break;
                }
                centroid = cand;
                res = cand_res;
            }
        }
        let worst = members
            .iter()
            .map(|&j| p.eval(roots[j]).norm())
            .fold(0.0, f64::max);
        // Near a multiple root every evaluation is rounding noise, so a
        // centroid inside the residual bound is as good as any member.
        if p.eval(centroid).norm() <= worst.max(p.residual_bound(centroid)) {
            for &j in &members {
                roots[j] = centroid;
                assigned[j] = true;
            }
        }
    }
}
