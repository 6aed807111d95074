use disperse_core::algorithms::{AsynchFcdfs, Fcdfs};
use disperse_core::engine::*;
use disperse_core::environment::*;
use disperse_core::grid::Cell;
use disperse_core::metrics::*;
use disperse_core::Algorithm;
use proptest::prelude::*;

fn c(x: i32, y: i32) -> Cell {
    Cell::new(x, y)
}

fn sync_run(env: &Environment, alg: Algorithm) -> MetricsReport {
    let mut policy = alg.policy(env);
    let out = run(
        env,
        policy.as_mut(),
        &Schedule::Synchronous,
        100 * env.n() as u64 + 100,
        TraceDetail::Compact,
    )
    .unwrap();
    assert_eq!(out.outcome, RunOutcome::Complete);
    compute_metrics(&out.trace).unwrap()
}

#[test]
fn single_cell_metrics_and_optima() {
    let env = gen_square(1, c(0, 0)).unwrap();
    let m = sync_run(&env, Algorithm::Fcdfs);
    assert_eq!((m.makespan, m.t_total, m.e_total), (2, 0, 1));
    assert_eq!(m.robots[0].t_start, 1);
    assert_eq!(m.robots[0].t_end, 2);
    let o = optimal_baselines(&env);
    assert_eq!(
        (o.makespan, o.t_total, o.t_max, o.e_total, o.e_max),
        (2, 0, 0, 1, 1)
    );
}

#[test]
fn square_three_report() {
    let env = gen_square(3, c(0, 0)).unwrap();
    let m = sync_run(&env, Algorithm::Fcdfs);
    assert_eq!(
        (m.makespan, m.t_total, m.e_total, m.t_max, m.e_max),
        (18, 18, 27, 4, 5)
    );
    assert_eq!(m.robots.len(), 9);
    for r in &m.robots {
        assert_eq!(r.energy, r.t_end - r.t_start);
        assert_eq!(r.energy, r.travel + 1);
    }
    assert_eq!(m.robots[0].settle_cell, c(2, 2));
}

#[test]
fn bfs_tree_waits_on_path_of_three() {
    let env = gen_path(3).unwrap();
    let m = sync_run(&env, Algorithm::BfsTree);
    assert_eq!(m.t_total, 3);
    assert!(m.e_total > 5, "E_total = {}", m.e_total);
}

#[test]
fn square_sum_closed_form() {
    for k in 1..=12u32 {
        let o = optimal_baselines(&gen_square(k, c(0, 0)).unwrap());
        let k = k as u64;
        assert_eq!(o.t_total, k * k * (k - 1));
        assert_eq!(o.t_max, 2 * (k - 1));
        assert_eq!(o.e_total, k * k + o.t_total);
    }
}

#[test]
fn path_sum_closed_form() {
    for n in 1..=40u32 {
        let o = optimal_baselines(&gen_path(n).unwrap());
        let n = n as u64;
        assert_eq!(o.t_total, n * (n - 1) / 2);
        assert_eq!(o.makespan, 2 * n);
    }
}

#[test]
fn fcdfs_ratios_are_exact() {
    let env = gen_square(6, c(2, 3)).unwrap();
    let cmp = compare(&sync_run(&env, Algorithm::Fcdfs), &optimal_baselines(&env));
    assert!(cmp.all_exact());
    for (_, r) in cmp.all() {
        assert_eq!(r.value(), 1.0);
    }
    assert_eq!(cmp.makespan.to_string(), "72/72");
}

#[test]
fn dflf_travel_ratio_is_large() {
    let env = gen_square(12, c(0, 0)).unwrap();
    let cmp = compare(&sync_run(&env, Algorithm::Dflf), &optimal_baselines(&env));
    assert!(cmp.makespan.is_exact());
    assert!(cmp.t_total.value() > 3.0, "{}", cmp.t_total);
}

#[test]
fn asynch_travel_exact_energy_above() {
    let env = gen_square(6, c(0, 0)).unwrap();
    let opt = optimal_baselines(&env);
    let schedule = Schedule::bernoulli(0.5, 3).unwrap();
    let out = run(
        &env,
        &mut Local(AsynchFcdfs),
        &schedule,
        100_000,
        TraceDetail::Compact,
    )
    .unwrap();
    let cmp = compare(&compute_metrics(&out.trace).unwrap(), &opt);
    assert!(cmp.t_total.is_exact() && cmp.t_max.is_exact());
    assert!(cmp.e_total.value() > 1.0 && cmp.e_max.value() > 1.0);
    assert!(cmp.makespan.value() > 1.0);
}

#[test]
fn incomplete_trace_is_rejected() {
    let env = gen_square(3, c(0, 0)).unwrap();
    let out = run(
        &env,
        &mut Local(Fcdfs),
        &Schedule::Synchronous,
        9,
        TraceDetail::Full,
    )
    .unwrap();
    assert_eq!(out.outcome, RunOutcome::StepLimitExceeded);
    let err = compute_metrics(&out.trace).unwrap_err();
    assert_eq!(
        err,
        MetricsError::IncompleteTrace {
            settled: out.world.settled_count(),
            n: 9
        }
    );
}

#[test]
fn zero_optimum_ratio() {
    assert_eq!(
        Ratio {
            actual: 0,
            optimal: 0
        }
        .value(),
        1.0
    );
    assert!(Ratio {
        actual: 2,
        optimal: 0
    }
    .value()
    .is_infinite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Every complete trace satisfies the lower bounds, whatever the algorithm.
    #[test]
    fn lower_bounds_hold(k in 2u32..9, removals in 0u32..20, seed in any::<u64>(), alg_ix in 0usize..7, p in 0.3f64..1.0) {
        let env = gen_carved(k, removals % (k * k), seed).unwrap();
        let alg = Algorithm::ALL[alg_ix];
        let schedule = if alg.needs_synchronous() { Schedule::Synchronous } else { Schedule::bernoulli(p, seed).unwrap() };
        let mut policy = alg.policy(&env);
        let out = run(&env, policy.as_mut(), &schedule, 1_000_000, TraceDetail::Compact).unwrap();
        prop_assert_eq!(out.outcome, RunOutcome::Complete);
        let m = compute_metrics(&out.trace).unwrap();
        let n = env.n() as u64;
        let o = optimal_baselines(&env);
        prop_assert!(m.e_total - n >= m.t_total);
        prop_assert!(m.e_max > m.t_max);
        prop_assert!(m.makespan >= 2 * n);
        prop_assert!(m.t_total >= o.t_total && m.t_max >= o.t_max);
        for r in &m.robots {
            prop_assert!(r.travel < r.energy);
        }
        prop_assert_eq!(m.makespan, m.robots.iter().map(|r| r.t_end).max().unwrap());
    }
}
