//! The building blocks on their own: polynomial roots, Laguerre-form
//! displacement, and the photon-addition map on a coherent state.

use fockgen::math::{find_roots, laguerre, Polynomial};
use fockgen::simulator::apply_y;
use fockgen::{BeamSplitter, Complex64, FockVector, TruncationPolicy};

fn main() -> fockgen::Result<()> {
    let c = Complex64::new;

    // x^3 - 1
    let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])?;
    for r in find_roots(&p)? {
        println!("root {r:.12}");
    }
    println!("L_5^2(-3) = {}", laguerre(5, 2, -3.0));

    let policy = TruncationPolicy::default();
    let alpha = c(1.2, -0.4);
    let displaced = FockVector::vacuum().displace(alpha, &policy)?;
    let coherent = FockVector::coherent(alpha, displaced.cutoff());
    println!(
        "D(alpha)|0> kept {} levels, fidelity with |alpha> {:.15}",
        displaced.cutoff(),
        displaced.fidelity(&coherent)?
    );

    let bs = BeamSplitter::new(c(0.9, 0.0))?;
    let added = apply_y(&displaced, &bs, &policy)?;
    println!(
        "photon addition succeeds with probability {:.6}",
        added.norm_sqr()
    );
    Ok(())
}
