// The compiled state does not depend on the order in which the factors are
// added, but the success probability does.

use fockgen::search::optimize_root_order;
use fockgen::simulator::run_plan;
use fockgen::synthesis::{characteristic_roots, compile_with_roots};
use fockgen::{phase_state, BeamSplitter, Complex64, PhaseStateSpec, TruncationPolicy};

fn main() -> fockgen::Result<()> {
    let target = phase_state(&PhaseStateSpec::new(Complex64::new(0.4, 0.0), 6)?);
    let bs = BeamSplitter::new(Complex64::new(0.99, 0.0))?;

    let best = optimize_root_order(&target, &bs, 8)?;
    println!("canonical order      P = {:.6e}", best.canonical_prob);
    println!(
        "best of {} orders   P = {:.6e}  order {:?}",
        best.evaluated, best.prob, best.order
    );

    let roots = characteristic_roots(&target)?;
    let reversed: Vec<usize> = (0..roots.len()).rev().collect();
    let plan = compile_with_roots(&target, &bs, &roots, Some(&reversed))?;
    let out = run_plan(&plan, &TruncationPolicy::default())?;
    println!(
        "reversed order       P = {:.6e}  fidelity {:.12}",
        out.total_prob, out.fidelity
    );
    Ok(())
}
