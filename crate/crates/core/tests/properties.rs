use dynwalk::chain::{step_distribution, variance_pi};
use dynwalk::commute::{cut_sum_upper, distance_cutsets, exact_commute, nash_williams_lower};
use dynwalk::schedule::StepSource;
use dynwalk::walk::{point_mass, propagate};
use dynwalk::{generate, Distribution, Family, GraphSchedule, LikelihoodState};
use proptest::prelude::*;

fn connected_graph() -> impl Strategy<Value = dynwalk::StaticGraph> {
    (3usize..=9, 0.2f64..0.8, any::<u64>())
        .prop_map(|(n, p, seed)| generate(&Family::RandomConnected { n, p }, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lazy_step_keeps_mass_and_degree_distribution(g in connected_graph(), u in 0usize..3) {
        let p = step_distribution(&g, &point_mass::<f64>(g.n(), u));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((p[u] - 0.5).abs() < 1e-15);
        let pi = Distribution::from_degrees(&g).unwrap();
        let next = step_distribution(&g, pi.as_slice());
        for (a, b) in next.iter().zip(pi.as_slice()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn variance_never_increases_on_regular_schedules(seed in any::<u64>(), u in 0usize..12, d in 2usize..=3) {
        let n = 12;
        let s = GraphSchedule::generator(StepSource::Sample(Family::RandomRegular { n, d, connected: false }), seed);
        let pi = Distribution::uniform(n);
        let mut last = f64::INFINITY;
        for t in 0..20 {
            let p = propagate(&s, &point_mass(n, u), 0, t).unwrap();
            let v = variance_pi(LikelihoodState::new(p, &pi).unwrap().rho(), &pi);
            prop_assert!(v <= last + 1e-10, "t={t}: {v} > {last}");
            last = v;
        }
    }

    #[test]
    fn commute_is_symmetric_and_sandwiched(g in connected_graph(), a in 0usize..3, b in 3usize..9) {
        let (s, t) = (a, b % g.n());
        prop_assume!(s != t);
        let c = exact_commute(&g, s, t).unwrap();
        prop_assert!((c - exact_commute(&g, t, s).unwrap()).abs() <= 1e-9 * c);
        let lower = nash_williams_lower(&g, s, t, &distance_cutsets(&g, s, t).unwrap()).unwrap().flow;
        let upper = cut_sum_upper(&g, s, t).unwrap().flow;
        prop_assert!(lower <= c * (1.0 + 1e-9));
        prop_assert!(c <= upper * (1.0 + 1e-9));
    }

    #[test]
    fn balls_grow_to_the_whole_graph(g in connected_graph(), u in 0usize..3) {
        let diam = g.diameter().unwrap();
        let mut last = 0;
        for x in 0..=diam {
            let b = g.ball_size(u, x).unwrap();
            prop_assert!(b >= last);
            last = b;
        }
        prop_assert_eq!(last, g.n());
    }
}
