use nalgebra::{DMatrix, DVector};
use proptest::collection::vec;
use proptest::prelude::*;

use spinlab::estimation::{convolve_noise, hellinger_sq, qfi_pure, NoiseKernel, OutcomeDistribution};
use spinlab::protocols::{build_protocol, squeezing_angle, CompiledProtocol, ProtocolKind, ProtocolSpec};
use spinlab::spin::{
    apply_steps, generator_flips_parity, inverse_steps, oat_phase, rotate, Axis, BasisSpec, CollectiveOperator,
    DickeState, Step,
};
use spinlab::C64;

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

fn state(max_n: usize) -> impl Strategy<Value = DickeState> {
    (1..=max_n).prop_flat_map(|n| vec((-1.0..1.0f64, -1.0..1.0f64), n + 1)).prop_filter_map("nonzero", |v| {
        DickeState::normalized(DVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| C64::new(a, b)))).ok()
    })
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(|chi_t| Step::Oat { chi_t }),
        (axis(), -6.0..6.0f64).prop_map(|(axis, angle)| Step::Rotate { axis, angle }),
    ]
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn parity_expectation(s: &DickeState, basis: &BasisSpec) -> f64 {
    let c = basis.coordinates(s).unwrap();
    c.iter().enumerate().map(|(k, z)| basis.parity_sign(k) * z.norm_sqr()).sum()
}

fn lattice(v: Vec<f64>) -> OutcomeDistribution {
    let total: f64 = v.iter().sum();
    OutcomeDistribution::on_lattice(v.into_iter().map(|p| p / total).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn su2_commutation_relations(n in 1usize..=32) {
        let j = |a| CollectiveOperator::axis(n, a).unwrap();
        let (x, y, z) = (j(Axis::X), j(Axis::Y), j(Axis::Z));
        let i = C64::new(0.0, 1.0);
        for (a, b, c) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
            let comm = a.commutator(b).unwrap();
            prop_assert!(max_abs(&(comm - c.matrix() * i)) < 1e-10);
        }
    }

    #[test]
    fn casimir_is_scalar(n in 1usize..=32) {
        let sq = |a| {
            let m = CollectiveOperator::axis(n, a).unwrap().matrix().clone();
            &m * &m
        };
        let total = sq(Axis::X) + sq(Axis::Y) + sq(Axis::Z);
        let j = n as f64 / 2.0;
        let expected = DMatrix::<C64>::identity(n + 1, n + 1) * C64::new(j * (j + 1.0), 0.0);
        prop_assert!(max_abs(&(total - expected)) < 1e-10);
    }

    #[test]
    fn rotations_preserve_norm_and_compose(s in state(40), a in axis(), t1 in -4.0..4.0f64, t2 in -4.0..4.0f64) {
        let once = rotate(&rotate(&s, a, t1), a, t2);
        prop_assert!((once.norm_squared() - 1.0).abs() < 1e-12);
        let direct = rotate(&s, a, t1 + t2);
        prop_assert!((once.amplitudes() - direct.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn twisting_keeps_x_parity(s in state(30), chi_t in -3.0..3.0f64) {
        let basis = BasisSpec::axis(s.n_particles(), Axis::X).unwrap();
        let before = parity_expectation(&s, &basis);
        let twisted = oat_phase(&s, chi_t);
        prop_assert!((twisted.norm_squared() - 1.0).abs() < 1e-12);
        prop_assert!((parity_expectation(&twisted, &basis) - before).abs() < 1e-10);
    }

    #[test]
    fn step_then_inverse_is_identity(s in state(30), steps in vec(step(), 0..5)) {
        let back = apply_steps(&apply_steps(&s, &steps), &inverse_steps(&steps));
        prop_assert!((back.amplitudes() - s.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn transverse_generators_flip_parity(n in 1usize..=32) {
        let flips = |g, b| {
            let g = CollectiveOperator::axis(n, g).unwrap();
            generator_flips_parity(&g, &BasisSpec::axis(n, b).unwrap(), 1e-10).unwrap()
        };
        prop_assert!(flips(Axis::Y, Axis::X));
        prop_assert!(flips(Axis::X, Axis::Y));
        prop_assert!(!flips(Axis::X, Axis::X));
    }

    #[test]
    fn noise_channel_is_column_stochastic(dim in 1usize..80, sigma in 0.0..20.0f64, p in vec(0.0..1.0f64, 80)) {
        let kernel = NoiseKernel::new(dim, sigma).unwrap();
        for s in kernel.column_sums() {
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
        let mut p = p[..dim].to_vec();
        p[0] += 1e-3;
        let q = convolve_noise(&lattice(p), sigma).unwrap();
        prop_assert!((q.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(q.probabilities().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn hellinger_is_symmetric_and_bounded(pq in (1usize..40).prop_flat_map(|d| (vec(0.0..1.0f64, d), vec(0.0..1.0f64, d)))) {
        let (mut p, mut q) = pq;
        p[0] += 1e-3;
        q[0] += 1e-3;
        let (p, q) = (lattice(p), lattice(q));
        let d = hellinger_sq(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, hellinger_sq(&q, &p).unwrap());
        prop_assert!(hellinger_sq(&p, &p).unwrap() < 1e-14);
    }

    #[test]
    fn stock_readouts_share_cfi_at_zero_noise(n in 4usize..=40, chi_t in 0.01..1.0f64) {
        let qfi = CompiledProtocol::new(&build_protocol(ProtocolKind::Trivial, n, chi_t, None).unwrap(), 0.0)
            .unwrap()
            .qfi()
            .unwrap();
        for kind in [ProtocolKind::Trivial, ProtocolKind::Echo, ProtocolKind::PseudoEcho] {
            let c = CompiledProtocol::new(&build_protocol(kind, n, chi_t, None).unwrap(), 0.0).unwrap();
            let f = c.cfi(0.0).unwrap();
            prop_assert!((f - qfi).abs() <= 1e-8 * qfi, "{kind}: {f} vs {qfi}");
        }
    }

    #[test]
    fn cfi_bounded_by_qfi_and_by_noiseless_max(
        n in 4usize..=30,
        chi_t in 0.0..1.5f64,
        t2 in 0.0..1.5f64,
        phi in -1.5..1.5f64,
        sigma in 0.0..6.0f64,
    ) {
        let spec = build_protocol(ProtocolKind::Asymmetric, n, chi_t, Some(t2)).unwrap();
        let basis = BasisSpec::axis(n, Axis::X).unwrap();
        let clean = CompiledProtocol::with_basis(&spec, basis.clone(), 0.0).unwrap();
        let noisy = CompiledProtocol::with_basis(&spec, basis, sigma).unwrap();
        let qfi = clean.qfi().unwrap();
        prop_assert!(clean.cfi(phi).unwrap() <= qfi * (1.0 + 1e-8) + 1e-12);
        prop_assert!(noisy.cfi(phi).unwrap() <= qfi * (1.0 + 1e-8) + 1e-12);
        prop_assert!(noisy.cfi(phi).unwrap() <= clean.cfi(phi).unwrap() * (1.0 + 1e-8) + 1e-12);
    }

    #[test]
    fn readout_never_changes_qfi(n in 2usize..=30, chi_t in 0.0..1.5f64, readout in vec(step(), 0..4)) {
        let base = build_protocol(ProtocolKind::Trivial, n, chi_t, None).unwrap();
        let with_readout = ProtocolSpec { u2_steps: readout, ..base.clone() };
        let basis = BasisSpec::axis(n, Axis::X).unwrap();
        let a = CompiledProtocol::with_basis(&base, basis.clone(), 0.0).unwrap().qfi().unwrap();
        let b = CompiledProtocol::with_basis(&with_readout, basis, 0.0).unwrap().qfi().unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        // 4 Var of the readout-conjugated generator on the final state agrees
        let c = CompiledProtocol::with_basis(&with_readout, BasisSpec::axis(n, Axis::Z).unwrap(), 0.0).unwrap();
        let u2 = spinlab::spin::steps_unitary(n, &with_readout.u2_steps);
        let g = CollectiveOperator::custom(&u2 * c.generator().matrix() * u2.adjoint()).unwrap();
        let f = qfi_pure(&c.final_state(0.3), &g).unwrap();
        prop_assert!((f - a).abs() <= 1e-8 * a.max(1.0));
    }

    #[test]
    fn squeezing_angle_lies_in_half_turn(n in 2usize..=60, chi_t in 0.0..1.5f64) {
        let theta = squeezing_angle(n, chi_t).unwrap();
        prop_assert!((0.0..std::f64::consts::PI).contains(&theta));
    }
}
