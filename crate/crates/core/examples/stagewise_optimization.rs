//! Does giving every stage its own transmittance help? Optimize a common
//! |T| first, then each |T_k| by coordinate ascent starting from it.

use fockgen::search::{optimize_common_t, optimize_stagewise};
use fockgen::{phase_state, Complex64, PhaseStateSpec, TruncationPolicy};

fn main() -> fockgen::Result<()> {
    let target = phase_state(&PhaseStateSpec::new(Complex64::new(0.4, 0.0), 6)?);
    let common = optimize_common_t(&target, (0.05, 0.9999))?;
    println!(
        "common:    |T| = {:.5}  P = {:.6e}",
        common.abs_t, common.prob
    );

    let cfg = optimize_stagewise(&target, common.abs_t, 6, &TruncationPolicy::default())?;
    let ts: Vec<String> = cfg.ts.iter().map(|t| format!("{:.4}", t.norm())).collect();
    println!(
        "stagewise: |T_k| = [{}]  P = {:.6e}",
        ts.join(", "),
        cfg.prob
    );
    println!(
        "ratio {:.4} after {} accepted steps",
        cfg.prob / common.prob,
        cfg.history.len() - 1
    );
    Ok(())
}
