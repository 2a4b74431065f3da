//! Success probability against |T| for truncated phase states, as CSV plus
//! the location of the maximum.
//!
//! cargo run --release --example transmittance_sweep -- 6

use fockgen::search::{linear_grid, sweep_t};
use fockgen::{phase_state, Complex64, PhaseStateSpec};

fn main() -> fockgen::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(6);
    let target = phase_state(&PhaseStateSpec::new(Complex64::new(0.4, 0.0), n)?);
    let grid = linear_grid(0.5, 0.999, 500);
    let curve = sweep_t(&target, &grid, 0.0)?;
    print!("{}", curve.to_csv());

    let best = curve.maximum().expect("non-empty sweep");
    let last = curve
        .samples
        .last()
        .and_then(|s| s.prob)
        .unwrap_or(f64::NAN);
    eprintln!(
        "N = {n}: max P = {:.6e} at |T| = {:.3}; P(|T| = 0.999) = {last:.3e}",
        best.prob.unwrap_or(f64::NAN),
        best.abs_t
    );
    Ok(())
}
