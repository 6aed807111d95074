use disperse_core::algorithms::*;
use disperse_core::engine::*;
use disperse_core::environment::*;
use disperse_core::invariants::{run_monitored, Checks};
use disperse_core::metrics::{compare, compute_metrics, optimal_baselines};
use disperse_core::{Algorithm, Cell, Direction};
use proptest::prelude::*;

fn c(x: i32, y: i32) -> Cell {
    Cell::new(x, y)
}

fn sync_run(env: &Environment, alg: Algorithm) -> RunOutput {
    let limit = 50 * env.n() as u64 + 100;
    let out = run(
        env,
        alg.policy(env).as_mut(),
        &Schedule::Synchronous,
        limit,
        TraceDetail::Compact,
    )
    .unwrap_or_else(|e| panic!("{alg}: {e}"));
    assert_eq!(out.outcome, RunOutcome::Complete, "{alg}");
    out
}

/// Parks helper robots on `extra` cells (settled, or still active and
/// broadcasting when `hold` is set), admits the robot under test at the
/// source, and asks the rule for one step with the given register.
fn one_step_with<R: LocalRule>(
    rule: R,
    text: &str,
    extra: &[Cell],
    hold: bool,
    state: R::State,
) -> (Action, Option<u8>, R::State) {
    let env = from_ascii(text).unwrap();
    let mut world = World::new(env.clone());
    let mut trace = Trace::new(&env, TraceDetail::Full);
    struct Park<'a>(&'a [Cell], bool);
    impl Policy for Park<'_> {
        fn name(&self) -> &'static str {
            "park"
        }
        fn capabilities(&self) -> Capabilities {
            Capabilities {
                sensing: None,
                broadcast_bits: 1,
                state_bits: None,
            }
        }
        fn decide(&mut self, w: &World, r: RobotId) -> Result<Decision, EngineError> {
            let pos = w.robot(r).pos;
            let Some(&goal) = self.0.get(r) else {
                return Ok(Decision::new(Action::Wait));
            };
            let mut d = Decision::new(Action::Wait);
            if pos == goal {
                if !self.1 {
                    d.action = Action::Settle;
                }
            } else {
                let dist = bfs_distances(w.env().region(), goal).unwrap();
                let here = dist.get(pos).unwrap();
                let dir = Direction::CLOCKWISE
                    .into_iter()
                    .find(|&dir| dist.get(pos.step(dir)).is_some_and(|x| x + 1 == here))
                    .unwrap();
                d.action = Action::Move(dir);
            }
            if self.1 {
                d.broadcast = Some(1);
            }
            Ok(d)
        }
    }
    let mut park = Park(extra, hold);
    let ready = |w: &World| {
        w.robots().len() == extra.len() + 1
            && w.robots()
                .iter()
                .zip(extra)
                .all(|(r, g)| r.pos == *g && (hold || r.settled))
    };
    while !ready(&world) {
        world
            .step(&Schedule::Synchronous, &mut park, &mut trace)
            .unwrap();
        assert!(world.robots().len() <= extra.len() + 1);
    }
    let me = extra.len();
    assert_eq!(world.robot(me).pos, env.source());
    let view = sense(&world, me, R::CAPABILITIES).unwrap();
    let mut st = state;
    let (a, b) = rule.step(&view, &mut st);
    (a, b, st)
}

fn one_step<R: LocalRule>(
    rule: R,
    text: &str,
    extra: &[Cell],
    state: R::State,
) -> (Action, Option<u8>, R::State) {
    one_step_with(rule, text, extra, false, state)
}

#[test]
fn fresh_robot_heads_up() {
    let (a, _, st) = one_step(Fcdfs, "...\n.S.\n...", &[], FcdfsState::default());
    assert_eq!(a, Action::Move(Direction::Up));
    assert_eq!(st.primary, Some(Direction::Up));
    let (a, _, st) = one_step(Fcdfs5, "...\n.S.\n...", &[], Fcdfs5State::default());
    assert_eq!(a, Action::Move(Direction::Up));
    assert_eq!(
        (st.primary, st.b3, st.b4, st.b5),
        (Direction::Up.code(), false, true, false)
    );
}

#[test]
fn three_blocked_sides_settle() {
    let st = FcdfsState {
        primary: Some(Direction::Up),
        prev: Some(Direction::Down),
        prevprev: None,
    };
    let (a, _, _) = one_step(Fcdfs, "#.#\n#S#\n###", &[c(1, 2)], st);
    assert_eq!(a, Action::Settle);
}

#[test]
fn fake_hall_detected_from_two_steps_back() {
    // Robot at (1,1) blocked up and right; the diagonal (0,0) holds a robot and
    // the robot was there two moves ago.
    let text = "###\n.S#\n..#";
    let st = FcdfsState {
        primary: Some(Direction::Up),
        prev: Some(Direction::Down),
        prevprev: Some(c(0, 0) - c(1, 1)),
    };
    let (a, _, _) = one_step(Fcdfs, text, &[c(0, 0)], st);
    assert_eq!(a, Action::Settle);
    // Same picture without the memory: a real hall, so the robot turns left.
    let st = FcdfsState {
        primary: Some(Direction::Up),
        prev: Some(Direction::Down),
        prevprev: Some(c(1, -1) - c(1, 1)),
    };
    let (a, _, st) = one_step(Fcdfs, text, &[c(0, 0)], st);
    assert_eq!(a, Action::Move(Direction::Left));
    assert_eq!(st.primary, Some(Direction::Left));
}

#[test]
fn five_bit_secondary_move_sets_b3() {
    let st = Fcdfs5State {
        primary: Direction::Up.code(),
        b3: false,
        b4: true,
        b5: false,
    };
    let (a, _, st) = one_step(Fcdfs5, "###\n#S.\n#.#", &[], st);
    assert_eq!(a, Action::Move(Direction::Right));
    assert!(st.b3);
    assert_eq!((st.b4, st.b5), (false, true));
    let st = Fcdfs5State {
        primary: Direction::Up.code(),
        b3: true,
        b4: false,
        b5: true,
    };
    let (a, _, st) = one_step(Fcdfs5, "#.#\n#S.\n#.#", &[], st);
    assert_eq!(a, Action::Move(Direction::Up));
    assert!(!st.b3);
}

#[test]
fn asynch_waits_for_broadcasting_primary() {
    let st = AsynchState {
        moved: true,
        primary: Direction::Right,
        last: Direction::Right,
    };
    let (a, b, _) = one_step_with(AsynchFcdfs, "###\nS..\n###", &[c(1, 1)], true, st);
    assert_eq!((a, b), (Action::Wait, Some(1)));
    // A fresh robot next to an active one also waits.
    let (a, _, _) = one_step_with(
        AsynchFcdfs,
        "###\nS..\n###",
        &[c(1, 1)],
        true,
        AsynchState::default(),
    );
    assert_eq!(a, Action::Wait);
}

#[test]
fn asynch_diagonal_broadcast_means_corner() {
    // Robot at (1,1) came up from (1,0), blocked up and right by walls.
    let text = "###\n.S#\n..#";
    let st = AsynchState {
        moved: true,
        primary: Direction::Up,
        last: Direction::Up,
    };
    let (a, b, _) = one_step_with(AsynchFcdfs, text, &[c(0, 0)], true, st);
    assert_eq!((a, b), (Action::Settle, Some(1)));
    // A settled robot on the diagonal is a wall: a real hall, so turn left.
    let (a, _, st) = one_step(AsynchFcdfs, text, &[c(0, 0)], st);
    assert_eq!(a, Action::Move(Direction::Left));
    assert_eq!(st.primary, Direction::Left);
}

#[test]
fn fcdfs_square_three_metrics() {
    let env = gen_square(3, c(0, 0)).unwrap();
    let out = sync_run(&env, Algorithm::Fcdfs);
    let m = compute_metrics(&out.trace).unwrap();
    assert_eq!(
        (m.makespan, m.t_total, m.e_total, m.t_max, m.e_max),
        (18, 18, 27, 4, 5)
    );
}

#[test]
fn single_cell_metrics() {
    let env = gen_square(1, c(0, 0)).unwrap();
    let m = compute_metrics(&sync_run(&env, Algorithm::Fcdfs).trace).unwrap();
    assert_eq!((m.makespan, m.t_total, m.e_total), (2, 0, 1));
    let opt = optimal_baselines(&env);
    assert_eq!((opt.makespan, opt.t_total, opt.e_total), (2, 0, 1));
}

#[test]
fn bfs_tree_on_three_path_waits() {
    let env = gen_path(3).unwrap();
    let out = sync_run(&env, Algorithm::BfsTree);
    let m = compute_metrics(&out.trace).unwrap();
    assert_eq!((m.makespan, m.e_total, m.t_total, m.t_max), (7, 8, 3, 2));
    assert!(m.e_total > 3 + 3);
}

#[test]
fn dflf_spirals_on_corner_squares() {
    let env = gen_square(3, c(0, 0)).unwrap();
    assert_eq!(
        compute_metrics(&sync_run(&env, Algorithm::Dflf).trace)
            .unwrap()
            .makespan,
        18
    );
    let env = gen_square(12, c(0, 0)).unwrap();
    let m = compute_metrics(&sync_run(&env, Algorithm::Dflf).trace).unwrap();
    let opt = optimal_baselines(&env);
    assert!(m.t_total as f64 > 3.0 * opt.t_total as f64);
}

#[test]
fn offline_optimum_on_holes() {
    let envs = [
        gen_ring(3, 3).unwrap(),
        gen_ring(7, 4).unwrap(),
        gen_gkr(2, 1).unwrap(),
    ];
    for env in envs {
        let m = compute_metrics(&sync_run(&env, Algorithm::OfflineOpt).trace).unwrap();
        assert!(compare(&m, &optimal_baselines(&env)).all_exact());
    }
}

#[test]
fn offline_active_robots_never_adjacent() {
    let env = gen_gkr(3, 1).unwrap();
    let checks = Checks {
        separation: true,
        ..Checks::default()
    };
    let mut policy = OfflineOptimal::new();
    let m = run_monitored(
        &env,
        &mut policy,
        Schedule::Synchronous,
        10_000,
        TraceDetail::Compact,
        checks,
    )
    .unwrap();
    assert!(m.violations.is_empty(), "{:?}", &m.violations[..1]);
}

fn carved_env() -> impl Strategy<Value = Environment> {
    (2u32..12, 0.0f64..0.45, any::<u64>()).prop_map(|(k, frac, seed)| {
        let removals = ((k * k) as f64 * frac) as u32;
        gen_carved(k, removals.min(k * k - 1), seed).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn fcdfs_is_optimal_and_structured(env in carved_env()) {
        let mut policy = Local(Fcdfs);
        let m = run_monitored(&env, &mut policy, Schedule::Synchronous, 4 * env.n() as u64 + 10,
            TraceDetail::Compact, Checks::corner_following()).unwrap();
        prop_assert!(m.violations.is_empty(), "{:?}", m.violations);
        let report = compute_metrics(&m.trace).unwrap();
        prop_assert!(compare(&report, &optimal_baselines(&env)).all_exact());
        let dist = bfs_distances(env.region(), env.source()).unwrap();
        for r in &report.robots {
            prop_assert_eq!(Some(r.travel as u32), dist.get(r.settle_cell));
        }
    }

    #[test]
    fn five_bits_trace_identically(env in carved_env()) {
        let a = sync_run(&env, Algorithm::Fcdfs);
        let b = sync_run(&env, Algorithm::Fcdfs5);
        prop_assert_eq!(a.trace.to_text(), b.trace.to_text());
        prop_assert!(b.world.robots().iter().all(|r| r.register < 32));
    }

    #[test]
    fn asynch_lands_like_sync(env in carved_env(), p in 0.2f64..1.0, seed in any::<u64>()) {
        let sync = compute_metrics(&sync_run(&env, Algorithm::Fcdfs).trace).unwrap();
        let d = bfs_distances(env.region(), env.source()).unwrap().max() as usize;
        // Active robots lie on one shortest path from the source, which has d + 1 cells.
        let checks = Checks { active_limit: Some(d + 1), ..Checks::default() };
        let mut policy = Local(AsynchFcdfs);
        let m = run_monitored(&env, &mut policy, Schedule::bernoulli(p, seed).unwrap(), 1_000_000,
            TraceDetail::Compact, checks).unwrap();
        prop_assert!(m.violations.is_empty(), "{:?}", m.violations);
        let asy = compute_metrics(&m.trace).unwrap();
        let cells = |r: &disperse_core::MetricsReport| r.robots.iter().map(|x| x.settle_cell).collect::<Vec<_>>();
        prop_assert_eq!(cells(&sync), cells(&asy));
        prop_assert_eq!((sync.t_total, sync.t_max), (asy.t_total, asy.t_max));
    }

    #[test]
    fn baselines_fill_in_two_n(env in carved_env()) {
        for alg in [Algorithm::Dflf, Algorithm::Bflf, Algorithm::OfflineOpt] {
            let report = compute_metrics(&sync_run(&env, alg).trace).unwrap();
            prop_assert_eq!(report.makespan, 2 * env.n() as u64, "{}", alg);
            prop_assert_eq!(report.e_total, report.t_total + env.n() as u64, "{}", alg);
        }
    }

    #[test]
    fn bfs_tree_travels_optimally(env in carved_env()) {
        let report = compute_metrics(&sync_run(&env, Algorithm::BfsTree).trace).unwrap();
        let opt = optimal_baselines(&env);
        prop_assert_eq!((report.t_total, report.t_max), (opt.t_total, opt.t_max));
        prop_assert!(report.e_total >= opt.e_total);
    }

    #[test]
    fn offline_is_optimal_with_holes(k in 3u32..10, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut region = Region::rectangle(c(0, 0), k, k);
        for _ in 0..k {
            region.remove(c(rng.random_range(0..k as i32), rng.random_range(0..k as i32)));
        }
        let start = region.cells().next().unwrap();
        let env = Environment::component(&region, start).unwrap();
        let report = compute_metrics(&sync_run(&env, Algorithm::OfflineOpt).trace).unwrap();
        prop_assert!(compare(&report, &optimal_baselines(&env)).all_exact());
    }
}
