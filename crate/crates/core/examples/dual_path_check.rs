//! Evaluate one cascade two ways: the closed-form stage norms, and a direct
//! simulation on Fock vectors. They should agree to rounding.

use fockgen::probability::breakdown;
use fockgen::simulator::{run_plan, run_plan_dense};
use fockgen::{compile, BeamSplitter, Complex64, TargetState, TruncationPolicy};

fn main() -> fockgen::Result<()> {
    let c = Complex64::new;
    let target = TargetState::new(&[c(0.3, 0.1), c(-0.5, 0.2), c(0.4, 0.0), c(0.1, -0.7)])?;
    let plan = compile(&target, &BeamSplitter::from_polar(0.9, 0.4)?, None)?;

    let closed = breakdown(&plan)?;
    let policy = TruncationPolicy::default();
    let framed = run_plan(&plan, &policy)?;
    let dense = run_plan_dense(&plan, &policy)?;

    println!(" k   closed form      framed sim       dense sim");
    for k in 0..plan.stages() {
        println!(
            "{:>2}  {:.12e}  {:.12e}  {:.12e}",
            k + 1,
            closed.stage_norms[k],
            framed.stage_norms_sq[k],
            dense.stage_norms_sq[k]
        );
    }
    println!("fidelity with target: {:.15}", framed.fidelity);
    println!("dense engine needed {} Fock levels", dense.cutoff_used);
    Ok(())
}
