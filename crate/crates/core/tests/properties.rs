use proptest::prelude::*;

use renyi_core::channel::{Channel, ChannelFamily};
use renyi_core::distance::{fidelity, jordan_decomposition, trace_distance};
use renyi_core::entropy::{
    conditional_entropy_up, sandwiched_divergence, RenyiOrder, SolverConfig,
};
use renyi_core::operator::{
    matrix_power, partial_trace, tensor, HermitianOperator, PsdOperator, Subsystem,
};
use renyi_core::state::{random_density, random_psd, rng_from_seed, sample_random_state, Ensemble};

fn psd(n: usize, rank: usize, seed: u64) -> PsdOperator {
    random_psd(n, rank, &mut rng_from_seed(seed)).unwrap()
}

fn density(n: usize, seed: u64) -> PsdOperator {
    random_density(n, Ensemble::HilbertSchmidt, &mut rng_from_seed(seed))
        .unwrap()
        .psd()
        .clone()
}

fn sum(p: &PsdOperator, q: &PsdOperator) -> PsdOperator {
    PsdOperator::new(p.hermitian().add(q.hermitian()).unwrap()).unwrap()
}

fn trace_power(p: &PsdOperator, a: f64) -> f64 {
    matrix_power(p, a).unwrap().trace()
}

fn max_abs_diff(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    (a.matrix() - b.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mccarthy_inequality(seed in any::<u64>(), n in 2usize..6, a in 0.05f64..=1.0) {
        let p = psd(n, 1 + (seed % n as u64) as usize, seed);
        let q = psd(n, n, seed ^ 0x9e37);
        let lhs = trace_power(&sum(&p, &q), a);
        let rhs = trace_power(&p, a) + trace_power(&q, a);
        prop_assert!(lhs <= rhs + 1e-8 * rhs.max(1.0), "{lhs} > {rhs}");
    }

    #[test]
    fn powers_compose(seed in any::<u64>(), n in 1usize..6, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let p = density(n, seed);
        let left = matrix_power(&matrix_power(&p, a).unwrap(), b).unwrap();
        let right = matrix_power(&p, a * b).unwrap();
        let scale = right.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(max_abs_diff(left.hermitian(), right.hermitian()) <= 1e-8 * scale);
    }

    #[test]
    fn partial_trace_undoes_tensor(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let x = psd(da, da, seed);
        let y = psd(db, db, seed.wrapping_add(1));
        let t = tensor(x.hermitian(), y.hermitian()).unwrap();
        let on_a = partial_trace(&t, (da, db), Subsystem::A).unwrap();
        let on_b = partial_trace(&t, (da, db), Subsystem::B).unwrap();
        prop_assert!(max_abs_diff(&on_a, &x.hermitian().scaled(y.trace())) <= 1e-10 * (1.0 + x.trace() * y.trace()));
        prop_assert!(max_abs_diff(&on_b, &y.hermitian().scaled(x.trace())) <= 1e-10 * (1.0 + x.trace() * y.trace()));
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), n in 1usize..6) {
        let (r, s, t) = (density(n, seed), density(n, seed ^ 1), density(n, seed ^ 2));
        let d = |a: &PsdOperator, b: &PsdOperator| trace_distance(a.hermitian(), b.hermitian()).unwrap();
        prop_assert!(d(&r, &t) <= d(&r, &s) + d(&s, &t) + 1e-12);
        prop_assert!((d(&r, &s) - d(&s, &r)).abs() <= 1e-12);
        prop_assert!(d(&r, &s) <= 1.0 + 1e-12);
        prop_assert!(d(&r, &r) <= 1e-12);
    }

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), n in 1usize..6) {
        let (r, s) = (density(n, seed), density(n, seed ^ 7));
        let f = fidelity(&r, &s).unwrap();
        let t = trace_distance(r.hermitian(), s.hermitian()).unwrap();
        prop_assert!(1.0 - f <= t + 1e-10);
        prop_assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-7);
    }

    #[test]
    fn jordan_parts_are_orthogonal(seed in any::<u64>(), n in 1usize..6) {
        let (r, s) = (density(n, seed), density(n, seed ^ 3));
        let delta = r.hermitian().sub(s.hermitian()).unwrap();
        let (pos, neg) = jordan_decomposition(&delta).unwrap();
        let back = pos.hermitian().sub(neg.hermitian()).unwrap();
        prop_assert!(max_abs_diff(&back, &delta) <= 1e-12);
        let overlap = (pos.matrix() * neg.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(overlap <= 1e-12);
        let t = trace_distance(r.hermitian(), s.hermitian()).unwrap();
        prop_assert!((pos.trace() - t).abs() <= 1e-12);
        prop_assert!((neg.trace() - t).abs() <= 1e-12);
    }

    #[test]
    fn data_processing(
        seed in any::<u64>(),
        da in 1usize..4,
        db in 1usize..3,
        family in prop::sample::select(ChannelFamily::ALL.to_vec()),
        alpha in prop::sample::select(vec![0.5, 0.7, 0.99, 1.01, 2.0, 5.0, f64::INFINITY]),
    ) {
        let n = da * db;
        let p = density(n, seed);
        let q = density(n, seed ^ 5);
        let mut rng = rng_from_seed(seed ^ 11);
        let channel = Channel::sample(family, da, db, &mut rng).unwrap();
        let order = RenyiOrder::new(alpha).unwrap();
        let before = sandwiched_divergence(&p, &q, order).unwrap();
        let after = sandwiched_divergence(&channel.apply(&p).unwrap(), &channel.apply(&q).unwrap(), order).unwrap();
        prop_assert!(after <= before + 1e-7, "{after} > {before}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conditional_entropy_stays_within_dimension_limits(
        seed in any::<u64>(),
        da in 1usize..4,
        db in 1usize..4,
        alpha in prop::sample::select(vec![0.5, 0.8, 1.5, 3.0]),
    ) {
        let rho = sample_random_state(da, db, Ensemble::HilbertSchmidt, seed).unwrap();
        let h = conditional_entropy_up(&rho, RenyiOrder::new(alpha).unwrap(), &SolverConfig::default())
            .unwrap()
            .value;
        let log_d = (da as f64).log2();
        prop_assert!(h <= log_d + 1e-8 && h >= -log_d - 1e-8, "{h} outside ±{log_d}");
    }
}
