use std::f64::consts::PI;

use proptest::prelude::*;

use fockgen::fock::displacement_matrix;
use fockgen::math::{elementary_symmetric, find_roots, laguerre, poly_from_roots};
use fockgen::probability::{breakdown, stage_norm_sq};
use fockgen::search::{linear_grid, sweep_t};
use fockgen::simulator::{run_cascade, run_cascade_dense, run_plan};
use fockgen::synthesis::{
    characteristic_roots, compile, compile_with_roots, displacement_parameters,
    stagewise_displacements, trace_factors, verify_factorization,
};
use fockgen::{BeamSplitter, Complex64, FockVector, SynthesisPlan, TargetState, TruncationPolicy};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex(radius: f64) -> impl Strategy<Value = Complex64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| c(re, im))
}

/// Coefficients with a leading term bounded away from zero so the degree is
/// what the strategy says.
fn target(max_degree: usize) -> impl Strategy<Value = TargetState> {
    (1..=max_degree)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(complex(1.0), n),
                (0.3f64..1.0, -PI..PI),
            )
        })
        .prop_map(|(mut coeffs, (r, phi))| {
            coeffs.push(Complex64::from_polar(r, phi));
            TargetState::new(&coeffs).unwrap()
        })
}

fn fidelity(a: &FockVector, b: &FockVector) -> f64 {
    a.fidelity(b).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Match each expected root to its nearest unused found root.
fn multiset_distance(found: &[Complex64], expected: &[Complex64]) -> f64 {
    let mut used = vec![false; found.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let (j, d) = found
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, f)| (j, (f - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laguerre_recurrence(n in 1usize..30, m in 0usize..=10, x in -50.0f64..0.0) {
        let l = |k| laguerre(k, m, x);
        let residual = (n + 1) as f64 * l(n + 1) - (2 * n + m + 1) as f64 * l(n) + x * l(n)
            + (n + m) as f64 * l(n - 1);
        let scale = [(n + 1) as f64 * l(n + 1), (2 * n + m + 1) as f64 * l(n), (n + m) as f64 * l(n - 1)]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assert!(residual.abs() <= 1e-10 * scale.max(1e-300), "{residual} vs {scale}");
    }

    #[test]
    fn roots_round_trip(
        seeds in prop::collection::vec((0.3f64..3.0, 0usize..12), 1..=10),
        lead in complex(2.0).prop_filter("nonzero", |z| z.norm() > 0.1),
    ) {
        // Well separated: distinct angular slots on distinct rings.
        let roots: Vec<Complex64> = seeds
            .iter()
            .enumerate()
            .map(|(i, (r, slot))| Complex64::from_polar(r + 0.5 * i as f64, 2.0 * PI * *slot as f64 / 12.0 + 0.1 * i as f64))
            .collect();
        let p = poly_from_roots(&roots, lead).unwrap();
        let found = find_roots(&p).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        let d = multiset_distance(&found, &roots);
        prop_assert!(d <= 1e-8 * roots.iter().fold(1.0f64, |a, r| a.max(r.norm())), "{d}");
    }

    #[test]
    fn elementary_symmetric_matches_subsets(values in prop::collection::vec(complex(2.0), 0..=8)) {
        let e = elementary_symmetric(&values);
        let k = values.len();
        for (m, em) in e.iter().enumerate() {
            let brute: Complex64 = (0u32..1 << k)
                .filter(|mask| mask.count_ones() as usize == m)
                .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).product::<Complex64>())
                .sum();
            prop_assert!((em - brute).norm() <= 1e-10 * brute.norm().max(1.0));
        }
    }

    #[test]
    fn displacement_composition(
        amps in prop::collection::vec(complex(1.0), 1..6),
        alpha in complex(1.4),
        beta in complex(1.4),
    ) {
        prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
        let p = TruncationPolicy::default();
        let v = FockVector::new(amps).unwrap();
        let twice = v.displace(alpha, &p).unwrap().displace(beta, &p).unwrap();
        let phase = Complex64::from_polar(1.0, (beta * alpha.conj()).im);
        let once = v.displace(alpha + beta, &p).unwrap().scaled(phase);
        prop_assert!(fidelity(&twice, &once) >= 1.0 - 1e-9);
        let overlap = twice.inner(&once) / (twice.norm() * once.norm());
        prop_assert!((overlap - 1.0).norm() < 1e-9, "{overlap}");
    }

    #[test]
    fn creation_norm(amps in prop::collection::vec(complex(1.0), 1..20)) {
        let v = FockVector::new(amps.clone()).unwrap();
        let expect: f64 = amps.iter().enumerate().map(|(n, a)| (n + 1) as f64 * a.norm_sqr()).sum();
        let got = v.create(&TruncationPolicy::default()).unwrap().norm_sqr();
        prop_assert!((got - expect).abs() <= 1e-13 * expect.max(1e-300));
    }

    #[test]
    fn compiled_plans_reproduce_target(t in target(5), abs_t in 0.7f64..0.99, phase in -PI..PI) {
        let plan = compile(&t, &BeamSplitter::from_polar(abs_t, phase).unwrap(), None).unwrap();
        prop_assert!(verify_factorization(&t, &plan.betas).unwrap() >= 1.0 - 1e-9);
        let sim = run_plan(&plan, &TruncationPolicy::default()).unwrap();
        prop_assert!(sim.fidelity >= 1.0 - 1e-9);
        prop_assert!((sim.total_prob - sim.stage_norms_sq.last().unwrap()).abs() <= 1e-12 * sim.total_prob);
    }

    #[test]
    fn traced_factors_are_the_roots(t in target(5), abs_t in 0.7f64..0.99, phase in -PI..PI) {
        let plan = compile(&t, &BeamSplitter::from_polar(abs_t, phase).unwrap(), None).unwrap();
        let ts = vec![plan.bs.t(); plan.stages()];
        let (factors, offset) = trace_factors(&plan.alphas, &ts);
        let scale = plan.betas.iter().fold(1.0f64, |a, b| a.max(b.norm()));
        prop_assert!(offset.norm() <= 1e-10 * scale);
        // Stage k ends up as the factor (a^dag - conj(beta_k)).
        let expected: Vec<Complex64> = plan.betas.iter().map(|b| b.conj()).collect();
        prop_assert!(multiset_distance(&factors, &expected) <= 1e-10 * scale);
    }

    #[test]
    fn permuted_orders_give_the_same_state(t in target(4), abs_t in 0.7f64..0.99, seed in any::<u64>()) {
        let bs = BeamSplitter::new(c(abs_t, 0.0)).unwrap();
        let roots = characteristic_roots(&t).unwrap();
        let mut order: Vec<usize> = (0..roots.len()).collect();
        // Fisher-Yates driven by the proptest seed.
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = TruncationPolicy::default();
        let canonical = run_plan(&compile(&t, &bs, None).unwrap(), &p).unwrap();
        let permuted = run_plan(&compile_with_roots(&t, &bs, &roots, Some(&order)).unwrap(), &p).unwrap();
        prop_assert!(permuted.fidelity >= 1.0 - 1e-9);
        prop_assert!(fidelity(&canonical.final_state, &permuted.final_state) >= 1.0 - 1e-9);
    }

    #[test]
    fn closed_form_matches_simulation_on_arbitrary_plans(
        alphas in prop::collection::vec(complex(1.06), 2..=6),
        abs_t in 0.7f64..0.99,
        phase in -PI..PI,
    ) {
        // Any displacements, not only compiled ones: the closed form is a
        // statement about the cascade, not about the compiler.
        let n = alphas.len() - 1;
        let bs = BeamSplitter::from_polar(abs_t, phase).unwrap();
        let plan = SynthesisPlan {
            target: TargetState::new(&[c(1.0, 0.0)]).unwrap(),
            bs,
            betas: vec![c(0.0, 0.0); n],
            alphas: alphas.clone(),
            order: (0..n).collect(),
        };
        let sim = run_cascade(&alphas, &vec![bs; n], &TruncationPolicy::default()).unwrap();
        let dense = run_cascade_dense(&alphas, &vec![bs; n], &TruncationPolicy::default()).unwrap();
        for k in 1..=n {
            let closed = stage_norm_sq(&plan, k).unwrap();
            prop_assert!(rel(closed, sim.stage_norms_sq[k - 1]) <= 1e-9, "k={k}: {closed} vs {}", sim.stage_norms_sq[k - 1]);
            prop_assert!(rel(closed, dense.stage_norms_sq[k - 1]) <= 1e-9);
        }
    }

    #[test]
    fn global_phase_does_not_change_probability(t in target(5), abs_t in 0.7f64..0.99) {
        let bs = BeamSplitter::new(c(abs_t, 0.0)).unwrap();
        let base = breakdown(&compile(&t, &bs, None).unwrap()).unwrap().total;
        for theta in [PI / 3.0, PI] {
            let rotated = breakdown(&compile(&t.rotated(theta), &bs, None).unwrap()).unwrap().total;
            prop_assert!(rel(base, rotated) <= 1e-12, "{base} vs {rotated}");
        }
    }

    #[test]
    fn stagewise_recursion_with_equal_transmittance(t in target(5), abs_t in 0.7f64..0.99, phase in -PI..PI) {
        let tt = Complex64::from_polar(abs_t, phase);
        let betas: Vec<Complex64> = characteristic_roots(&t).unwrap().iter().map(|r| r.conj()).collect();
        let common = displacement_parameters(&betas, tt);
        let staged = stagewise_displacements(&betas, &vec![tt; betas.len()]).unwrap();
        let scale = common.iter().fold(1.0f64, |a, x| a.max(x.norm()));
        for (x, y) in common.iter().zip(&staged) {
            prop_assert!((x - y).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn stagewise_recursion_reproduces_target(
        t in target(4),
        ts in prop::collection::vec((0.75f64..0.99, -0.5f64..0.5), 4),
    ) {
        let betas: Vec<Complex64> = characteristic_roots(&t).unwrap().iter().map(|r| r.conj()).collect();
        let splitters: Vec<BeamSplitter> = ts[..betas.len()]
            .iter()
            .map(|(m, p)| BeamSplitter::from_polar(*m, *p).unwrap())
            .collect();
        let tvals: Vec<Complex64> = splitters.iter().map(|b| b.t()).collect();
        let alphas = stagewise_displacements(&betas, &tvals).unwrap();
        let out = run_cascade(&alphas, &splitters, &TruncationPolicy::default()).unwrap();
        prop_assert!(out.final_state.fidelity(&t.to_fock()).unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn displacement_columns_stay_orthonormal() {
    for alpha in [c(0.3, 0.1), c(-1.5, 0.7), c(2.5, -1.0)] {
        let dim = 160;
        let m = displacement_matrix(alpha, dim, &TruncationPolicy::default()).unwrap();
        let a = alpha.norm();
        let converged = dim - (4.0 * a * a + 10.0 * a + 10.0).ceil() as usize - 20;
        for i in 0..converged.min(50) {
            for j in 0..converged.min(50) {
                let dot: Complex64 = (0..dim).map(|r| m[(r, i)].conj() * m[(r, j)]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot - expect).norm() < 1e-9,
                    "alpha={alpha} ({i},{j}) {dot}"
                );
            }
        }
    }
}

#[test]
fn probability_vanishes_as_transmittance_approaches_one() {
    let targets = [
        TargetState::new(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
        TargetState::new(&[c(0.3, 0.2), c(-0.4, 0.1), c(0.5, 0.0), c(0.2, -0.6)]).unwrap(),
        TargetState::from_factors(&[c(1.0, 0.5), c(-0.7, 0.2), c(0.1, -1.1), c(0.4, 0.4)]).unwrap(),
    ];
    let grid = linear_grid(0.5, 0.999, 500);
    for t in &targets {
        let curve = sweep_t(t, &grid, 0.0).unwrap();
        let max = curve.maximum().unwrap().prob.unwrap();
        let near_one = sweep_t(t, &[0.9999], 0.0).unwrap().samples[0].prob.unwrap();
        assert!(near_one < 1e-3 * max, "{near_one} vs {max}");
    }
}
