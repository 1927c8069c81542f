use std::f64::consts::TAU;

use nalgebra::Matrix2;
use proptest::prelude::*;
use zeno_scissors::analysis::local_maxima;
use zeno_scissors::cascade::{default_a_cutoff, run_blocks, run_oracle};
use zeno_scissors::fock::{
    fidelity, hermitian_propagator, max_abs, norm_sqr, normalize, unitarity_defect, AmplitudeVector, ComplexMatrix,
ModeSpace, C64,
};
use zeno_scissors::kernel::{oscillation_period, vw_closed_form, StageParams};
use zeno_scissors::probe::{build_state, strip_vacuum, ProbeKind, ProbeStateSpec};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn hermitian(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (2..=max_dim).prop_flat_map(|d| {
        prop::collection::vec(complex(), d * d).prop_map(move |xs| {
            let m = ComplexMatrix::from_vec(d, d, xs);
            (&m + m.adjoint()).scale(0.5)
        })
    })
}

fn state_vector(max_dim: usize) -> impl Strategy<Value = AmplitudeVector> {
    (2..=max_dim).prop_flat_map(|d| {
        prop::collection::vec(complex(), d)
            .prop_filter("nonzero", |xs| xs.iter().any(|z| z.norm() > 1e-3))
            .prop_map(|xs| normalize(&AmplitudeVector::from_vec(xs)).unwrap())
    })
}

/// `M^k` for `k` stages, rebuilt from the first column `(v, w)`: the stage
/// matrix is `e^{i delta / 2}` times an SU(2) element.
fn power_from_first_column(v: C64, w: C64, stages: usize, delta: f64) -> Matrix2<C64> {
    let phase = C64::from_polar(1.0, stages as f64 * delta / 2.0);
    let (a, b) = (v / phase, w / phase);
    Matrix2::new(a, -b.conj(), b, a.conj()) * phase
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagators_are_unitary(h in hermitian(64), t in -5.0..5.0f64) {
        let u = hermitian_propagator(&h, t).unwrap();
        prop_assert!(unitarity_defect(&u) <= 1e-10);
    }

    #[test]
    fn propagator_group_law(h in hermitian(16), t1 in -3.0..3.0f64, t2 in -3.0..3.0f64) {
        let lhs = hermitian_propagator(&h, t1).unwrap() * hermitian_propagator(&h, t2).unwrap();
        let rhs = hermitian_propagator(&h, t1 + t2).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) <= 1e-10);
    }

    #[test]
    fn propagation_preserves_norm(h in hermitian(12), psi in state_vector(12), t in -4.0..4.0f64) {
        prop_assume!(h.nrows() == psi.len());
        let out = hermitian_propagator(&h, t).unwrap() * psi;
        prop_assert!((norm_sqr(&out) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(u in state_vector(8), v in state_vector(8)) {
        prop_assume!(u.len() == v.len());
        let f = fidelity(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&v, &u).unwrap()).abs() < 1e-15);
        prop_assert!((fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_amplitudes_are_unitary(
        n in 1usize..=4,
        stages in 1usize..=64,
        kappa in prop::sample::select(vec![0.1, 0.2, 1.0, 2.5]),
        m in 0usize..=10,
    ) {
        let b = vw_closed_form(&StageParams::design(n, stages, kappa).unwrap(), m);
        prop_assert!((b.norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=std::f64::consts::PI).contains(&b.eta));
    }

    #[test]
    fn halves_compose(
        n in 1usize..=4,
        half in 1usize..=32,
        kappa in 0.05..3.0f64,
        theta in 0.01..1.5f64,
        m in 0usize..=10,
    ) {
        let full = vw_closed_form(&StageParams::new(n, 2 * half, kappa, theta).unwrap(), m);
        let h = vw_closed_form(&StageParams::new(n, half, kappa, theta).unwrap(), m);
        let out = power_from_first_column(h.v, h.w, half, h.delta) * nalgebra::Vector2::new(h.v, h.w);
        prop_assert!((out[0] - full.v).norm() <= 1e-12);
        prop_assert!((out[1] - full.w).norm() <= 1e-12);
    }

    #[test]
    fn full_turn_kerr_reduces_to_rotation(
        n in 1usize..=4,
        m in 1usize..=6,
        l in 1usize..=3,
        stages in 1usize..=64,
        theta in 0.0..1.5f64,
    ) {
        let kappa = TAU * l as f64 / (n * m) as f64;
        let b = vw_closed_form(&StageParams::new(n, stages, kappa, theta).unwrap(), m);
        let nt = stages as f64 * theta;
        prop_assert!((b.v - C64::new(nt.cos(), 0.0)).norm() <= 1e-12);
        prop_assert!((b.w - C64::new(0.0, nt.sin())).norm() <= 1e-12);
    }

    #[test]
    fn strip_vacuum_norm_law(psi in state_vector(20)) {
        let s = strip_vacuum(&psi);
        prop_assert!((norm_sqr(&s.stripped) + s.alpha0.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn custom_probes_are_normalized(coeffs in prop::collection::vec(complex(), 1..20)) {
        prop_assume!(coeffs.iter().any(|z| z.norm() > 1e-3));
        let s = build_state(&ProbeStateSpec::new(ProbeKind::Custom(coeffs), 24)).unwrap();
        prop_assert!((norm_sqr(&s) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn cascade_conserves_probe_statistics(
        psi in state_vector(10),
        n in 1usize..=3,
        stages in 1usize..=24,
        kappa in 0.05..2.0f64,
    ) {
        let p = StageParams::design(n, stages, kappa).unwrap();
        let input: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let oracle = run_oracle(&p, &psi, default_a_cutoff(n)).unwrap();
        let res = run_blocks(&p, &psi).unwrap();
        let blocks = res.joint_state(default_a_cutoff(n)).unwrap();
        for joint in [&oracle.state, &blocks] {
            for (a, b) in joint.b_marginal().iter().zip(&input) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
        prop_assert!((res.emission_probability + res.postselect_probability - 1.0).abs() <= 1e-10);
        prop_assert!(res.emission_probability >= res.alpha0.norm_sqr() - 1e-12);
    }
}

#[test]
fn joint_norm_survives_many_stages() {
    let probe = build_state(&ProbeStateSpec::new(ProbeKind::Coherent(C64::new(1.2, 0.3)), 40)).unwrap();
    let p = StageParams::design(3, 64, 0.7).unwrap();
    let run = run_oracle(&p, &probe, default_a_cutoff(3)).unwrap();
    assert!((run.state.norm_sqr() - 1.0).abs() <= 1e-10);
}

/// Per-period maxima of the emission curve never grow, for Fock probes
/// whose period spans several stages.
#[test]
fn emission_peaks_decay_period_by_period() {
    for m in [1usize, 2] {
        let probe = ModeSpace::new(8).unwrap().fock(m).unwrap();
        let period = oscillation_period(&StageParams::design(2, 1, 0.2).unwrap(), m).unwrap();
        let curve = |s: usize| {
            run_blocks(&StageParams::design(2, s, 0.2).unwrap(), &probe)
                .unwrap()
                .emission_probability
        };
        let mut last = f64::INFINITY;
        for k in 2..40 {
            let lo = (k as f64 * period).round() as usize;
            let hi = ((k + 1) as f64 * period).round() as usize;
            let peak = (lo..hi).map(curve).fold(0.0, f64::max);
            assert!(peak <= last + 1e-9, "m={m} k={k}: {peak} > {last}");
            last = peak;
        }
    }
}

#[test]
fn fock_emission_is_order_inverse_square() {
    let probe = ModeSpace::new(4).unwrap().fock(1).unwrap();
    let bound = (1..=2000)
        .map(|s| {
            let p = run_blocks(&StageParams::design(2, s, 0.2).unwrap(), &probe)
                .unwrap()
                .emission_probability;
            p * (s * s) as f64
        })
        .fold(0.0, f64::max);
    // |w|^2 <= sin^2(theta) / sin^2(eta) <= (pi / 2)^2 / sin^2(0.2) / N^2
    assert!(bound <= std::f64::consts::FRAC_PI_2.powi(2) / 0.2f64.sin().powi(2) + 1e-9, "{bound}");
}

#[test]
fn fock_two_oscillates_at_half_period() {
    let probe = ModeSpace::new(6).unwrap().fock(2).unwrap();
    let curve: Vec<f64> = (1..=300)
        .map(|s| {
            run_blocks(&StageParams::design(2, s, 0.2).unwrap(), &probe)
                .unwrap()
                .emission_probability
        })
        .collect();
    let peaks = local_maxima(&curve);
    let spacing = (peaks.last().unwrap() - peaks[0]) as f64 / (peaks.len() - 1) as f64;
    assert!((spacing - 7.85398).abs() < 0.5, "{spacing}");
}

#[test]
fn per_component_asymptotic_error_is_inverse_square() {
    // each component carries an oscillating O(1/N^2) remainder, so bound N^2 * error
    for n in [50usize, 100, 200, 400, 800, 1600] {
        let p = StageParams::design(2, n, 0.2).unwrap();
        let exact = vw_closed_form(&p, 1);
        let approx = zeno_scissors::vw_asymptotic(&p, 1).unwrap();
        let scale = (n * n) as f64;
        assert!((exact.v - approx.v).norm() * scale < 60.0, "v at N={n}");
        assert!((exact.w - approx.w).norm() * scale < 60.0, "w at N={n}");
    }
}
