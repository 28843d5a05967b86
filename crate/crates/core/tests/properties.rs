//! Cross-module invariants as property tests.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hkt_core::bundle::ConnectionData;
use hkt_core::fields::{Dolbeault, DolbeaultD, FlatStructure, FormField, Function, PartialJ, Polynomial};
use hkt_core::hermitian::{metric_to_omega, omega_to_metric, random_qh_metric};
use hkt_core::hopf::HopfData;
use hkt_core::pointwise::{q_positive_check, raising_r, Hypercomplex};
use hkt_core::suites::{run_suite, ScenarioConfig, Suite};
use hkt_core::total_space::TotalSpaceChart;

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ddj_is_r_of_ddbar(seed in any::<u64>(), n in 1usize..=2, x in point(8)) {
        let x = &x[..4 * n];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = Polynomial::random(4 * n, 4, 5, &mut rng);
        let flat = FlatStructure::new(n);
        let f = Function(&psi);
        let dbar = DolbeaultD::new(&f, &flat, Dolbeault::Antiholomorphic);
        let ddbar = DolbeaultD::new(&dbar, &flat, Dolbeault::Holomorphic).eval(x);
        let dj = PartialJ { inner: &f, structure: &flat };
        let ddj = DolbeaultD::new(&dj, &flat, Dolbeault::Holomorphic).eval(x);
        let r = raising_r(&Hypercomplex::flat(n), &ddbar.scale(Complex64::i()));
        prop_assert!(ddj.distance(&r) <= 1e-9 * (1.0 + ddj.max_norm()));
    }

    #[test]
    fn metric_and_omega_are_inverse(seed in any::<u64>(), n in 1usize..=2) {
        let s = Hypercomplex::flat(n);
        let g = random_qh_metric(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let omega = metric_to_omega(&g, &s).unwrap();
        prop_assert!(q_positive_check(&s, &omega, true).unwrap().positive);
        let back = omega_to_metric(&omega, &s).unwrap();
        prop_assert!((&back - &g).max_abs() <= 1e-10 * (1.0 + g.max_abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn omega_tilde_is_scale_invariant(x in point(8), lambda in prop_oneof![-4.0f64..-0.1, 0.1f64..4.0]) {
        prop_assume!(x[4..].iter().map(|v| v * v).sum::<f64>() > 1e-2);
        let h = HopfData::new(TotalSpaceChart::new(ConnectionData::from_name("bpst", 1).unwrap()), 2.0).unwrap();
        prop_assert!(h.scaling_residual(&x, lambda).unwrap() <= 1e-8);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let config = ScenarioConfig { bundle: "bpst".into(), samples: 4, probes: 4, ..Default::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_suite(&config, Suite::All).unwrap().to_json())
    };
    assert_eq!(run(1), run(3));
}
