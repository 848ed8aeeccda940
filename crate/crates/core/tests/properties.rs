use hcap_core::capacity::{convergence_trace, solve, SolverConfig};
use hcap_core::entropy::{arimoto_pair, fehr_berens_pair, h_mi, hayashi_pair, shannon_pair, EntropyPair};
use hcap_core::variational::{eval_functional, q_step, FunctionalSpec, QFamily};
use hcap_core::{joint, make_pmf, posterior, Channel, Pmf};
use proptest::prelude::*;

fn weights(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, m).prop_filter("some mass", |v| v.iter().sum::<f64>() > 1e-3)
}

fn pmf(m: usize) -> impl Strategy<Value = Pmf> {
    weights(m).prop_map(|v| make_pmf(&v).unwrap())
}

fn channel(m: usize, n: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(pmf(n), m).prop_map(|rows| Channel::from_pmfs(&rows).unwrap())
}

fn setup() -> impl Strategy<Value = (Pmf, Channel)> {
    (1usize..5, 1usize..5).prop_flat_map(|(m, n)| (pmf(m), channel(m, n)))
}

fn pairs() -> Vec<EntropyPair> {
    let mut out = vec![shannon_pair()];
    for a in [0.4, 2.0, 6.0] {
        out.push(arimoto_pair(a).unwrap());
        out.push(hayashi_pair(a).unwrap());
    }
    out.push(fehr_berens_pair(1.5).unwrap());
    out.push(fehr_berens_pair(4.0).unwrap());
    out
}

fn specs() -> Vec<FunctionalSpec> {
    vec![
        FunctionalSpec::Shannon,
        FunctionalSpec::arimoto_a1(0.5).unwrap(),
        FunctionalSpec::arimoto_a2(3.0).unwrap(),
        FunctionalSpec::hayashi(2.0).unwrap(),
        FunctionalSpec::fehr_berens(2.0).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalizing_twice_changes_nothing(v in (1usize..8).prop_flat_map(weights)) {
        let once = make_pmf(&v).unwrap();
        let twice = make_pmf(once.as_slice()).unwrap();
        prop_assert!(once.max_abs_diff(&twice) <= 1e-15);
        prop_assert!((once.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn posteriors_rebuild_the_joint((p, w) in setup()) {
        let post = posterior(&p, &w).unwrap();
        let j = joint(&p, &w).unwrap();
        for y in 0..w.outputs() {
            for x in 0..w.inputs() {
                let rebuilt = post.column(y).map_or(0.0, |c| post.p_y()[y] * c[x]);
                prop_assert!((rebuilt - j.get(x, y)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn information_is_nonnegative_and_bounded((p, w) in setup()) {
        for h in pairs() {
            let r = h_mi(&h, &p, &w).unwrap();
            prop_assert!(r.mi >= -1e-10, "{}: {}", h.name(), r.mi);
            prop_assert!(r.mi <= r.h_x + 1e-10, "{}: {} > {}", h.name(), r.mi, r.h_x);
        }
    }

    #[test]
    fn processing_cannot_add_information((p, w) in setup(), n2 in 1usize..4, seed in any::<u64>()) {
        let v = hcap_core::fixtures::random_channel(seed, w.outputs(), n2);
        let wv = w.compose(&v).unwrap();
        for h in pairs() {
            let direct = h_mi(&h, &p, &w).unwrap().mi;
            let processed = h_mi(&h, &p, &wv).unwrap().mi;
            prop_assert!(processed <= direct + 1e-10, "{}: {processed} > {direct}", h.name());
        }
    }

    #[test]
    fn q_step_dominates_other_families((p, w) in setup(), seed in any::<u64>()) {
        let mut rng = hcap_core::fixtures::SplitMix64::new(seed);
        let other = QFamily::new((0..w.outputs()).map(|_| rng.pmf(w.inputs()).mix_uniform(0.1)).collect()).unwrap();
        for spec in specs() {
            let best = eval_functional(&spec, &p, &w, &q_step(&spec, &p, &w).unwrap()).unwrap();
            let rival = eval_functional(&spec, &p, &w, &other).unwrap();
            prop_assert!(rival <= best + 1e-10, "{}: {rival} > {best}", spec.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solver_traces_never_decrease(w in (1usize..4, 1usize..4).prop_flat_map(|(m, n)| channel(m, n))) {
        for spec in specs() {
            let r = solve(&SolverConfig::new(spec.clone()).max_iter(500), &w).unwrap();
            let rows = convergence_trace(&r);
            prop_assert!(rows[0].delta.is_none());
            for row in &rows[1..] {
                prop_assert!(row.delta.unwrap() >= -1e-8, "{}: step {} drops by {:?}", spec.name(), row.k, row.delta);
            }
            prop_assert!(r.capacity >= h_mi(&spec.pair(), &Pmf::uniform(w.inputs()), &w).unwrap().mi - 1e-10);
        }
    }
}
