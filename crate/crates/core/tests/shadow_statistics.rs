use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use shadowphase_core::shadows::{estimate_pauli, sample_snapshots, single_snapshot_term};
use shadowphase_core::spin_ops::{pauli_expectation, Pauli, PauliString, StateVector};

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = StdRng::seed_from_u64(seed);
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

fn all_strings(n: usize, max_weight: usize) -> Vec<PauliString> {
    let labels = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            let v: Vec<Pauli> = (0..n)
                .map(|_| {
                    let p = labels[code % 4];
                    code /= 4;
                    p
                })
                .collect();
            PauliString::new(v)
        })
        .filter(|p| p.weight() <= max_weight)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn shadow_estimates_are_unbiased(state_seed in any::<u64>(), shadow_seed in any::<u64>()) {
        let state = random_state(2, state_seed);
        let t = 20_000;
        let ens = sample_snapshots(&state, t, shadow_seed).unwrap();
        for p in all_strings(2, 2) {
            let exact = pauli_expectation(&state, &p).unwrap();
            let terms: Vec<f64> = ens.snapshots.iter().map(|s| single_snapshot_term(s, &p).unwrap()).collect();
            let mean = estimate_pauli(&ens, &p).unwrap();
            let var = terms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
            let se = (var / t as f64).sqrt().max(1e-12);
            prop_assert!((mean - exact).abs() <= 5.0 * se + 1e-12, "{} {} {} {}", p, mean, exact, se);
        }
    }
}

#[test]
fn single_snapshot_variance_is_bounded_by_three_to_the_weight() {
    let state = random_state(3, 5);
    let t = 30_000;
    let ens = sample_snapshots(&state, t, 17).unwrap();
    for p in all_strings(3, 2) {
        let exact = pauli_expectation(&state, &p).unwrap();
        let second: f64 = ens
            .snapshots
            .iter()
            .map(|s| single_snapshot_term(s, &p).unwrap().powi(2))
            .sum::<f64>()
            / t as f64;
        // E[x^2] = 3^w exactly, so Var = 3^w - <P>^2
        let w = p.weight() as i32;
        let want = 3f64.powi(w);
        assert!((second - want).abs() <= 0.05 * want, "{p}: {second} vs {want}");
        assert!(second - exact * exact <= want * 1.05);
    }
}

#[test]
fn eigenstate_of_z_product() {
    let state = StateVector::basis(3, 0b101);
    let ens = sample_snapshots(&state, 4000, 3).unwrap();
    for s in &ens.snapshots {
        let zz: PauliString = "ZIZ".parse().unwrap();
        let term = single_snapshot_term(s, &zz).unwrap();
        assert!(term == 0.0 || term == 9.0);
    }
    let est = estimate_pauli(&ens, &"ZIZ".parse().unwrap()).unwrap();
    assert!((est - 1.0).abs() < 0.25);
}

#[test]
fn sampling_is_deterministic() {
    let state = random_state(4, 8);
    let a = sample_snapshots(&state, 500, 42).unwrap();
    let b = sample_snapshots(&state, 500, 42).unwrap();
    let c = sample_snapshots(&state, 500, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
