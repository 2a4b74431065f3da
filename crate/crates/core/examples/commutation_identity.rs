//! Numerical check of the relation used to move the number-operator
//! attenuation past a displaced creation operator:
//!
//! [D(-a) T^n D(a)] a^dag = T D(-s) a^dag D(s) [D(-a) T^n D(a)],  s = conj(1 - 1/T) a

use fockgen::simulator::verify_commutation_identity;
use fockgen::Complex64;

fn main() -> fockgen::Result<()> {
    println!("alpha     T      residual");
    for alpha in [0.3, 0.8, 1.5] {
        for t in [0.7, 0.9, 0.99] {
            let r = verify_commutation_identity(
                Complex64::new(alpha, 0.0),
                Complex64::new(t, 0.0),
                80,
            )?;
            println!("{alpha:<8}  {t:<5}  {r:.2e}");
        }
    }
    // Complex arguments work the same way.
    let r = verify_commutation_identity(
        Complex64::new(0.6, -0.9),
        Complex64::from_polar(0.85, 1.1),
        100,
    )?;
    println!("complex   -      {r:.2e}");
    Ok(())
}
