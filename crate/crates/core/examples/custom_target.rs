//! Compile an arbitrary superposition given on the command line as
//! `re,im` pairs (lowest Fock level first), simulate it, and print the
//! local-oscillator amplitudes for displacement beam splitters of
//! reflectance 0.01.
//!
//! cargo run --example custom_target -- 1,0 0,0 0.5,0.5

use fockgen::simulator::run_plan;
use fockgen::synthesis::lo_settings;
use fockgen::{compile, BeamSplitter, Complex64, TargetState, TruncationPolicy};

fn parse(arg: &str) -> Option<Complex64> {
    let (re, im) = arg.split_once(',')?;
    Some(Complex64::new(
        re.trim().parse().ok()?,
        im.trim().parse().ok()?,
    ))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut coeffs: Vec<Complex64> = std::env::args()
        .skip(1)
        .map(|a| parse(&a).ok_or(a))
        .collect::<Result<_, _>>()?;
    if coeffs.is_empty() {
        // (|0> + |3>) / sqrt(2)
        coeffs = vec![
            Complex64::new(1.0, 0.0),
            0.0.into(),
            0.0.into(),
            Complex64::new(1.0, 0.0),
        ];
    }
    let target = TargetState::new(&coeffs)?;
    let plan = compile(
        &target,
        &BeamSplitter::new(Complex64::new(0.95, 0.0))?,
        None,
    )?;
    let out = run_plan(&plan, &TruncationPolicy::default())?;
    println!(
        "N = {}, P = {:.6e}, fidelity = {:.12}",
        plan.stages(),
        out.total_prob,
        out.fidelity
    );

    let lo = lo_settings(&plan, Complex64::new(0.01, 0.0))?;
    println!("{}", serde_json::to_string_pretty(&lo)?);
    Ok(())
}
