mod common;

use std::f64::consts::LN_2;

use thermocap::channel::*;
use thermocap::implementation::*;
use thermocap::optim::{capacity_objective, thermo_capacity};
use thermocap::qcore::*;
use thermocap::random;
use thermocap::sdp::diamond_distance;
use thermocap::typic::TypicalityParams;

fn qubit_h() -> Hamiltonian {
    Hamiltonian::diag(&[0.0, 1.0])
}

fn erasure_qubit() -> Channel {
    erasure(2).with_hamiltonian(qubit_h()).unwrap()
}

fn plus() -> DensityMatrix {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure(&[s, s]).unwrap()
}

fn test_inputs() -> Vec<DensityMatrix> {
    vec![
        DensityMatrix::basis(2, 0),
        DensityMatrix::basis(2, 1),
        plus(),
        DensityMatrix::maximally_mixed(2),
        DensityMatrix::from_diag(&[0.7, 0.3]).unwrap(),
    ]
}

#[test]
fn single_copy_erasure_keeps_weight() {
    let ctx = ThermoContext::default();
    let imp =
        build_universal_implementation(&erasure_qubit(), 1, &TypicalityParams::default().with_eta(1.0), &ctx).unwrap();
    assert!(imp.diagnostics().surviving_weight >= 0.5);
    assert!(imp.iid_accuracy(&DensityMatrix::maximally_mixed(2)).unwrap() >= 0.5);
}

#[test]
fn erasure_fidelity_floor_at_four_copies() {
    let ctx = ThermoContext::default();
    let imp =
        build_universal_implementation(&erasure_qubit(), 4, &TypicalityParams::default().with_eta(0.5), &ctx).unwrap();
    assert!(imp.iid_accuracy(&DensityMatrix::maximally_mixed(2)).unwrap() >= 0.8);
}

#[test]
fn universality_over_inputs() {
    let ctx = ThermoContext::default();
    let imp = build_universal_implementation(&erasure_qubit(), 4, &TypicalityParams::default(), &ctx).unwrap();
    for sigma in test_inputs() {
        let f = imp.iid_accuracy(&sigma).unwrap();
        assert!(f >= 0.8, "fidelity {f}");
        assert!(imp.iid_accuracy_completed(&sigma).unwrap() >= f - 1e-12);
    }
}

#[test]
fn fidelity_on_biased_input_does_not_drop() {
    let ctx = ThermoContext::default();
    let sigma = DensityMatrix::from_diag(&[0.7, 0.3]).unwrap();
    let fids: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&n| {
            build_universal_implementation(&erasure_qubit(), n, &TypicalityParams::default(), &ctx)
                .unwrap()
                .iid_accuracy(&sigma)
                .unwrap()
        })
        .collect();
    assert!(fids[1] >= 0.75);
    assert!(fids.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{fids:?}");
}

#[test]
fn landauer_cost_per_copy() {
    let ctx = ThermoContext::default();
    let ch = erasure(2).with_hamiltonian(Hamiltonian::zero(2)).unwrap();
    let gaps: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&n| {
            let imp = build_universal_implementation(&ch, n, &TypicalityParams::default(), &ctx).unwrap();
            imp.work_cost(&ctx).unwrap() - LN_2
        })
        .collect();
    assert!(gaps.iter().all(|&g| (-1e-12..1e-9).contains(&g)), "{gaps:?}");
    assert!(gaps[2] <= gaps[0] + 1e-12);
}

#[test]
fn work_cost_respects_the_capacity() {
    let ctx = ThermoContext::default();
    for ch in [
        erasure_qubit(),
        amplitude_damping(0.3).with_hamiltonian(qubit_h()).unwrap(),
    ] {
        let cap = thermo_capacity(&ch, &ctx, 1e-8).unwrap();
        let at_max = capacity_objective(&ch, &cap.maximizer, &ctx).unwrap();
        for n in 1..=4 {
            let imp = build_universal_implementation(&ch, n, &TypicalityParams::default(), &ctx).unwrap();
            let slack = 3.0 * imp.diagnostics().eta;
            assert!(imp.work_cost(&ctx).unwrap() >= at_max - slack);
            assert!(imp.contraction_excess() <= 1e-9);
            assert!(imp.diagnostics().preclip_norm <= 1.5);
        }
    }
}

#[test]
fn work_cost_is_basis_independent() {
    let ctx = ThermoContext::new(0.9).unwrap();
    let mut rng = random::seeded(70);
    let ch = amplitude_damping(0.25)
        .with_hamiltonian(Hamiltonian::diag(&[0.0, 0.8]))
        .unwrap();
    let u = random::unitary(2, &mut rng);
    // E′(ρ) = E(U†ρU) with H_in′ = U H_in U†
    let kraus: Vec<ComplexMatrix> = ch.kraus().iter().map(|k| k.matmul_adjoint(&u)).collect();
    let rotated = Channel::from_kraus(
        kraus,
        Some(Hamiltonian::new(u.sandwich(ch.h_in().unwrap().matrix())).unwrap()),
        ch.h_out().cloned(),
    )
    .unwrap();
    let params = TypicalityParams::default().with_threshold(0.05).with_eta(0.0);
    for n in 1..=3 {
        let a = build_universal_implementation(&ch, n, &params, &ctx)
            .unwrap()
            .work_cost(&ctx)
            .unwrap();
        let b = build_universal_implementation(&rotated, n, &params, &ctx)
            .unwrap()
            .work_cost(&ctx)
            .unwrap();
        assert!((a - b).abs() < 1e-9, "n = {n}: {a} vs {b}");
    }
}

#[test]
fn empty_implementation_is_the_gibbs_replacer() {
    let ctx = ThermoContext::default();
    let ch = erasure_qubit();
    let params = TypicalityParams::default()
        .with_threshold(f64::NEG_INFINITY)
        .allowing_empty();
    for n in 1..=2 {
        let imp = build_universal_implementation(&ch, n, &params, &ctx).unwrap();
        let dim = 1 << n;
        let weights = common::gibbs_weight_power(&qubit_h(), 1.0, n);
        let z = weights.trace().re;
        let kraus: Vec<ComplexMatrix> = (0..dim)
            .flat_map(|a| {
                let p = weights[(a, a)].re / z;
                (0..dim).map(move |i| {
                    ComplexMatrix::from_fn(dim, dim, |x, y| {
                        if x == a && y == i {
                            C64::new(p.sqrt(), 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                })
            })
            .collect();
        let replacer = Channel::from_kraus(kraus, None, None).unwrap();
        let target = ch.tensor_power(n, DEFAULT_BUDGET).unwrap();
        let expected = diamond_distance(&replacer, &target, 1e-7).unwrap();
        let got = imp.diamond_accuracy().unwrap();
        assert!((got - expected).abs() < 1e-6, "n = {n}: {got} vs {expected}");
    }
}

#[test]
fn completed_channel_is_trace_preserving() {
    let ctx = ThermoContext::default();
    let ch = amplitude_damping(0.3).with_hamiltonian(qubit_h()).unwrap();
    let imp = build_universal_implementation(&ch, 3, &TypicalityParams::default().with_eta(0.0), &ctx).unwrap();
    let full = imp.to_channel().unwrap();
    let mut rng = random::seeded(71);
    let rho = random::mixed_state(8, &mut rng);
    assert!((full.apply(&rho).unwrap().matrix().trace().re - 1.0).abs() < 1e-8);
    let branch = imp.apply_branch(rho.matrix()).trace().re;
    assert!(branch <= 1.0 + 1e-9);
}
