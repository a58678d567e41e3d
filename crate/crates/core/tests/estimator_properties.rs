use mixest_core::chain::{MarkovKernel, StateDistribution};
use mixest_core::estimator::{
    accumulate_counts, confidence_interval, empirical_dobrushin, empirical_kernel,
    estimate_kappa_gen, estimate_relative, solve_log_factor,
};
use mixest_core::sampler::{sample_trajectory, skip_subsample, RandomSeed, Trajectory};
use proptest::prelude::*;

fn trajectory() -> impl Strategy<Value = Trajectory> {
    (2usize..=5).prop_flat_map(|d| {
        prop::collection::vec(0..d, 2..300)
            .prop_map(move |states| Trajectory::new(states, d).unwrap())
    })
}

fn sampled(d: usize, m: usize, seed: u64) -> Trajectory {
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { 0.5 } else { 0.5 / (d - 1) as f64 })
                .collect()
        })
        .collect();
    let k = MarkovKernel::new(rows).unwrap();
    sample_trajectory(
        &k,
        &StateDistribution::uniform(d).unwrap(),
        m,
        RandomSeed(seed),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counts_are_conserved(traj in trajectory(), s_frac in 0.0f64..1.0) {
        let m = traj.len();
        let s = 1 + ((m - 2) as f64 * s_frac) as usize;
        let c = accumulate_counts(&traj, s).unwrap();
        prop_assert_eq!(c.num_steps(), ((m - 1) / s) as u64);
        prop_assert_eq!(c.visits().iter().sum::<u64>(), c.num_steps());
        for i in 0..traj.num_states() {
            prop_assert_eq!(c.transition_row(i).iter().sum::<u64>(), c.visits()[i]);
        }
        prop_assert_eq!(c.n_min(), *c.visits().iter().min().unwrap());
    }

    #[test]
    fn empirical_kernels_are_row_stochastic(
        traj in trajectory(),
        lambda in prop_oneof![Just(0.0), 0.0f64..5.0],
    ) {
        let c = accumulate_counts(&traj, 1).unwrap();
        let ek = empirical_kernel(&c, lambda).unwrap();
        for row in ek.kernel.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
            if lambda > 0.0 {
                prop_assert!(row.iter().all(|&p| p > 0.0));
            }
        }
        let k = empirical_dobrushin(&ek);
        prop_assert!((0.0..=1.0).contains(&k));
    }

    #[test]
    fn estimate_is_bounded_and_refines_with_more_skips(traj in trajectory()) {
        let limit = (traj.len() - 1).min(12);
        let mut prev = 1.0;
        for s in 1..=limit {
            let e = estimate_kappa_gen(&traj, s, 0.0).unwrap();
            prop_assert!((0.0..=1.0).contains(&e.kappa_hat));
            prop_assert!(e.kappa_hat <= prev);
            prop_assert!(e.arg_s as usize <= s);
            prop_assert_eq!(e.per_s.len(), s);
            prev = e.kappa_hat;
        }
    }

    #[test]
    fn small_smoothing_barely_moves_the_estimate(seed in any::<u64>(), d in 2usize..=4) {
        let traj = sampled(d, 2000, seed);
        let s = 4;
        prop_assume!((1..=s).all(|r| accumulate_counts(&traj, r).unwrap().n_min() > 0));
        let raw = estimate_kappa_gen(&traj, s, 0.0).unwrap().kappa_hat;
        let smooth = estimate_kappa_gen(&traj, s, 1e-9).unwrap().kappa_hat;
        prop_assert!((raw - smooth).abs() <= 1e-6);
    }

    #[test]
    fn log_factor_is_minimal_and_monotone(
        m in 2usize..1_000_000,
        r in 1usize..50,
        d in 1usize..10,
        s in 1usize..50,
        delta in 0.001f64..0.999,
    ) {
        let l = solve_log_factor(m, r, d, s, delta).unwrap();
        prop_assert!(l >= 1.0);
        let bound = |t: f64| {
            (1.0 + (2.0 * m as f64 / (t * r as f64)).ln().ceil().max(0.0))
                * (d as f64 + 1.0)
                * (-t).exp()
        };
        let target = delta / (d as f64 * s as f64);
        prop_assert!(bound(l) <= target);
        if l > 1.0 {
            prop_assert!(bound(l - 1e-9) > target);
        }
        prop_assert!(solve_log_factor(m, r, d, s, delta / 2.0).unwrap() >= l);
        prop_assert!(solve_log_factor(m, r, d + 1, s, delta).unwrap() >= l);
        prop_assert!(solve_log_factor(m, r, d, s + 1, delta).unwrap() >= l);
    }

    #[test]
    fn skip_subsample_length(traj in trajectory(), s_frac in 0.0f64..1.0) {
        let m = traj.len();
        let s = 1 + ((m - 2) as f64 * s_frac) as usize;
        let sub = skip_subsample(&traj, s).unwrap();
        prop_assert_eq!(sub.len(), (m - 1) / s + 1);
        for (k, &x) in sub.states().iter().enumerate() {
            prop_assert_eq!(x, traj.states()[k * s]);
        }
    }

    #[test]
    fn interval_is_ordered_and_below_one(seed in any::<u64>(), s in 1usize..6) {
        let traj = sampled(3, 500, seed);
        let ci = confidence_interval(&traj, s, 0.1, 0.0).unwrap();
        prop_assert!(0.0 <= ci.lower && ci.lower <= ci.upper && ci.upper < 1.0);
        prop_assert!(ci.width >= 1.0 / s as f64);
        if !ci.degenerate {
            prop_assert!(ci.contains(ci.center));
        }
    }
}

#[test]
fn adaptive_estimate_on_a_fast_chain() {
    let traj = sampled(3, 20_000, 17);
    let e = estimate_relative(&traj, 0.0).unwrap();
    // Rows (1/2, 1/4, 1/4) and permutations give κ = 1/4 at skip 1 and
    // κ_s = 4^{-s}, so the best rate is attained at s = 1.
    assert!((e.kappa_hat - 0.25).abs() < 0.05, "{}", e.kappa_hat);
    assert_eq!(e.arg_s, 1);
}
