mod common;

use proptest::prelude::*;
use thermocap::channel::*;
use thermocap::qcore::*;
use thermocap::random;
use thermocap::sdp::*;

const EPS: f64 = 1e-7;

#[test]
fn hypothesis_testing_matches_knapsack_oracle() {
    let mut rng = random::seeded(50);
    for d in [2, 3, 5] {
        for &eps in &[0.01, 0.1, 0.3, 0.7] {
            let p = random::mixed_state(d, &mut rng).eigenvalues();
            let q = random::mixed_state(d, &mut rng).eigenvalues();
            let rho = DensityMatrix::from_diag(&p).unwrap();
            let gamma = ComplexMatrix::from_real_diag(&q);
            let sdp = hypothesis_testing_entropy(&rho, &gamma, eps).unwrap();
            let lp = common::dh_commuting(&p, &q, eps);
            assert!((sdp - lp).abs() < 1e-6, "d = {d}, ε = {eps}: {sdp} vs {lp}");
        }
    }
}

#[test]
fn hypothesis_testing_is_basis_independent() {
    let mut rng = random::seeded(51);
    let p = [0.5, 0.3, 0.2];
    let q = [0.2, 0.2, 0.6];
    let u = random::unitary(3, &mut rng);
    let rho = DensityMatrix::new(u.sandwich(&ComplexMatrix::from_real_diag(&p))).unwrap();
    let gamma = u.sandwich(&ComplexMatrix::from_real_diag(&q));
    let sdp = hypothesis_testing_entropy(&rho, &gamma, 0.2).unwrap();
    assert!((sdp - common::dh_commuting(&p, &q, 0.2)).abs() < 1e-6);
}

#[test]
fn diamond_distance_against_local_search() {
    let mut rng = random::seeded(52);
    for _ in 0..3 {
        let a = random::channel(2, 2, 2, &mut rng);
        let b = random::channel(2, 2, 2, &mut rng);
        let sdp = diamond_distance(&a, &b, EPS).unwrap();
        let lower = common::diamond_lower_bound(&a, &b, 6, &mut rng);
        assert!(lower <= sdp + 1e-6, "lower {lower} exceeds {sdp}");
        assert!(sdp - lower < 1e-4, "sdp {sdp} lower {lower}");
    }
}

#[test]
fn diamond_distance_of_unitaries() {
    // for U = diag(1, e^{iφ}) against the identity: 2 sin(φ/2) for φ ≤ π
    for phi in [0.3, 1.0, 2.5] {
        let u = ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::from_polar(1.0, phi)]);
        let d = diamond_distance(&unitary(u).unwrap(), &identity(2), EPS).unwrap();
        assert!((d - 2.0 * (phi / 2.0).sin()).abs() < 1e-6, "φ = {phi}: {d}");
    }
}

#[test]
fn diamond_distance_rejects_oversized_channels() {
    let big = identity(9);
    assert!(matches!(
        diamond_distance(&big, &big, EPS),
        Err(thermocap::Error::BudgetExceeded {
            required: 81,
            budget: 64
        })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn diamond_is_a_metric(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let a = random::channel(2, 2, 2, &mut rng);
        let b = random::channel(2, 2, 1, &mut rng);
        let c = random::channel(2, 2, 3, &mut rng);
        let ab = diamond_distance(&a, &b, EPS).unwrap();
        let ba = diamond_distance(&b, &a, EPS).unwrap();
        let bc = diamond_distance(&b, &c, EPS).unwrap();
        let ac = diamond_distance(&a, &c, EPS).unwrap();
        prop_assert!((ab - ba).abs() < 1e-5);
        prop_assert!(ac <= ab + bc + 1e-5);
        prop_assert!((0.0..=2.0).contains(&ab));
    }

    #[test]
    fn hypothesis_testing_data_processing(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let rho = random::mixed_state(3, &mut rng);
        let gamma = random::mixed_state(3, &mut rng);
        let ch = random::channel(3, 2, 2, &mut rng);
        let before = hypothesis_testing_entropy(&rho, gamma.matrix(), 0.1).unwrap();
        let after = hypothesis_testing_entropy(&ch.apply(&rho).unwrap(), ch.apply(&gamma).unwrap().matrix(), 0.1).unwrap();
        prop_assert!(after <= before + 1e-6);
    }

    #[test]
    fn hypothesis_testing_grows_with_eps(seed in any::<u64>()) {
        let mut rng = random::seeded(seed);
        let rho = random::mixed_state(3, &mut rng);
        let gamma = random::mixed_state(3, &mut rng);
        let values: Vec<f64> = [0.01, 0.05, 0.1, 0.3]
            .iter()
            .map(|&e| hypothesis_testing_entropy(&rho, gamma.matrix(), e).unwrap())
            .collect();
        prop_assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-6));
    }

    #[test]
    fn hypothesis_testing_self_distance(seed in any::<u64>(), eps in 0.01f64..0.9) {
        let mut rng = random::seeded(seed);
        let rho = random::mixed_state(3, &mut rng);
        let v = hypothesis_testing_entropy(&rho, rho.matrix(), eps).unwrap();
        prop_assert!((v + (1.0 - eps).ln()).abs() < 1e-6);
    }
}
