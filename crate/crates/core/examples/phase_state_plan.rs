//! Compile the truncated phase state |z = 0.4; N = 6> at T = 0.99 and print
//! roots, displacements and stagewise probabilities.

use fockgen::math::phase;
use fockgen::probability::breakdown;
use fockgen::{compile, phase_state, BeamSplitter, Complex64, PhaseStateSpec};

fn main() -> fockgen::Result<()> {
    let spec = PhaseStateSpec::new(Complex64::new(0.4, 0.0), 6)?;
    let target = phase_state(&spec);
    let plan = compile(
        &target,
        &BeamSplitter::new(Complex64::new(0.99, 0.0))?,
        None,
    )?;
    let bd = breakdown(&plan)?;

    println!("C(z; N) = {:.6}", spec.normalization());
    println!(" k   |beta|    arg beta   |alpha|   arg alpha   P_k^2");
    for (k, alpha) in plan.alphas.iter().enumerate() {
        match plan.betas.get(k) {
            Some(b) => println!(
                "{:>2}  {:8.4}  {:+9.4}  {:8.4}  {:+9.4}   {:.4e}",
                k + 1,
                b.norm(),
                phase(*b),
                alpha.norm(),
                phase(*alpha),
                bd.stage_norms[k]
            ),
            None => println!(
                "{:>2}  {:>8}  {:>9}  {:8.4}  {:+9.4}",
                k + 1,
                "",
                "",
                alpha.norm(),
                phase(*alpha)
            ),
        }
    }
    println!("P = {:.4}%", 100.0 * bd.total);
    Ok(())
}
