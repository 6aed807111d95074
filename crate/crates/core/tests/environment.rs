use std::collections::{BTreeMap, BTreeSet, VecDeque};

use disperse_core::environment::*;
use disperse_core::{Cell, Direction};
use proptest::prelude::*;

fn c(x: i32, y: i32) -> Cell {
    Cell::new(x, y)
}

/// Independent distance oracle over an explicit cell set.
fn oracle_distances(cells: &BTreeSet<Cell>, from: Cell) -> BTreeMap<Cell, u32> {
    let mut dist = BTreeMap::from([(from, 0)]);
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for d in Direction::CLOCKWISE {
            let u = v.step(d);
            if cells.contains(&u) && !dist.contains_key(&u) {
                dist.insert(u, dist[&v] + 1);
                q.push_back(u);
            }
        }
    }
    dist
}

fn cell_set(env: &Environment) -> BTreeSet<Cell> {
    env.region().cells().collect()
}

#[test]
fn ascii_two_cells() {
    let env = from_ascii("S.").unwrap();
    assert_eq!(cell_set(&env), BTreeSet::from([c(0, 0), c(1, 0)]));
    assert_eq!(env.source(), c(0, 0));
}

#[test]
fn ascii_vertical_puts_source_on_top() {
    let env = from_ascii("S\n.").unwrap();
    assert_eq!(cell_set(&env), BTreeSet::from([c(0, 1), c(0, 0)]));
    assert_eq!(env.source(), c(0, 1));
}

#[test]
fn ascii_keeps_only_source_component() {
    // Every free cell here touches the source's component.
    let env = from_ascii("S.#\n#..").unwrap();
    assert_eq!(
        cell_set(&env),
        BTreeSet::from([c(0, 1), c(1, 1), c(1, 0), c(2, 0)])
    );
    let env = from_ascii("S#.\n.#.").unwrap();
    assert_eq!(cell_set(&env), BTreeSet::from([c(0, 1), c(0, 0)]));
}

#[test]
fn ascii_errors() {
    assert_eq!(from_ascii("..").unwrap_err(), EnvError::NoSource(0));
    assert_eq!(from_ascii("S.S").unwrap_err(), EnvError::NoSource(2));
    assert_eq!(from_ascii("##").unwrap_err(), EnvError::EmptyRegion);
    assert!(matches!(
        from_ascii("S?").unwrap_err(),
        EnvError::BadChar { line: 1, ch: '?' }
    ));
}

#[test]
fn ascii_round_trip() {
    let text = "#..#\n.S..\n..##\n";
    let env = from_ascii(text).unwrap();
    assert_eq!(to_ascii(&env), text);
    assert_eq!(from_ascii(&to_ascii(&env)).unwrap(), env);
}

#[test]
fn movingai_square_and_pocket() {
    let map = "type octile\nheight 3\nwidth 3\nmap\n...\n...\n...\n";
    let env = load_movingai(map, c(1, 1)).unwrap();
    assert_eq!(env.n(), 9);

    let pocket = "type octile\nheight 5\nwidth 6\nmap\n......\n.@@@..\n.@.@..\n.@@@..\n......\n";
    let env = load_movingai(pocket, c(0, 0)).unwrap();
    let all: BTreeSet<Cell> = (0..6).flat_map(|x| (0..5).map(move |y| c(x, y))).collect();
    let walls = [
        (1, 3),
        (2, 3),
        (3, 3),
        (1, 2),
        (3, 2),
        (1, 1),
        (2, 1),
        (3, 1),
    ];
    let passable: BTreeSet<Cell> = all
        .iter()
        .copied()
        .filter(|p| !walls.contains(&(p.x, p.y)))
        .collect();
    let expected: BTreeSet<Cell> = oracle_distances(&passable, c(0, 0)).into_keys().collect();
    assert!(!expected.contains(&c(2, 2)));
    assert_eq!(cell_set(&env), expected);
}

#[test]
fn movingai_errors() {
    let short = "type octile\nheight 2\nwidth 3\nmap\n...\n...\n...\n";
    assert!(matches!(
        load_movingai(short, c(0, 0)),
        Err(EnvError::DimensionMismatch { .. })
    ));
    let wide = "type octile\nheight 1\nwidth 3\nmap\n....\n";
    assert!(matches!(
        load_movingai(wide, c(0, 0)),
        Err(EnvError::DimensionMismatch { .. })
    ));
    let header = "type octile\nheigth 1\nwidth 1\nmap\n.\n";
    assert!(matches!(
        load_movingai(header, c(0, 0)),
        Err(EnvError::MalformedHeader { line: 2, .. })
    ));
    let blocked = "type octile\nheight 1\nwidth 3\nmap\n.T.\n";
    assert_eq!(
        load_movingai(blocked, c(1, 0)).unwrap_err(),
        EnvError::SourceBlocked(c(1, 0))
    );
    let swamp = "type octile\nheight 1\nwidth 3\nmap\n.SG\n";
    assert_eq!(load_movingai(swamp, c(2, 0)).unwrap().n(), 1);
}

#[test]
fn simple_connectivity_examples() {
    assert!(is_simply_connected(
        gen_square(6, c(0, 0)).unwrap().region()
    ));
    let ring = gen_ring(3, 3).unwrap();
    assert!(!is_simply_connected(ring.region()));
    assert_eq!(hole_components(ring.region()).len(), 1);
    assert!(!is_simply_connected(gen_gkr(3, 1).unwrap().region()));
    assert!(!is_simply_connected(gen_gkr(2, 1).unwrap().region()));
    assert!(is_simply_connected(gen_gkr(1, 1).unwrap().region()));
}

#[test]
fn classify_examples() {
    // Dead end.
    let env = from_ascii("S.").unwrap();
    assert_eq!(
        classify(env.region(), c(1, 0)).unwrap(),
        VertexClass::Corner { diag: None }
    );
    // Perpendicular neighbors with free diagonal.
    let env = from_ascii("..\nS.").unwrap();
    assert_eq!(
        classify(env.region(), c(0, 0)).unwrap(),
        VertexClass::Corner {
            diag: Some(c(1, 1))
        }
    );
    // Perpendicular neighbors with a wall diagonal.
    let env = from_ascii(".#\nS.").unwrap();
    assert_eq!(
        classify(env.region(), c(0, 0)).unwrap(),
        VertexClass::Hall { diag: c(1, 1) }
    );
    // Collinear neighbors and three neighbors.
    let env = from_ascii("S..\n.#.").unwrap();
    assert_eq!(classify(env.region(), c(1, 1)).unwrap(), VertexClass::Open);
    assert_eq!(
        classify(env.region(), c(5, 5)).unwrap_err(),
        EnvError::NotInRegion(c(5, 5))
    );
}

#[test]
fn distance_examples() {
    let sq = gen_square(3, c(0, 0)).unwrap();
    let d = bfs_distances(sq.region(), c(0, 0)).unwrap();
    assert_eq!(d.get(c(0, 0)), Some(0));
    assert_eq!(d.get(c(2, 2)), Some(4));
    assert_eq!((d.sum(), d.max()), (18, 4));
    // A wall between (0,1) and (2,1) forces the detour through the bottom row.
    let u = from_ascii("S#.\n...\n").unwrap();
    let d = bfs_distances(u.region(), c(0, 1)).unwrap();
    let cells = cell_set(&u);
    assert_eq!(
        d.get(c(2, 1)),
        Some(oracle_distances(&cells, c(0, 1))[&c(2, 1)])
    );
    assert_eq!(d.get(c(2, 1)), Some(4));
    assert!(d.get(c(2, 1)).unwrap() > c(0, 1).manhattan(c(2, 1)));
    assert_eq!(
        bfs_distances(u.region(), c(1, 1)).unwrap_err(),
        EnvError::NotInRegion(c(1, 1))
    );
}

#[test]
fn square_distance_sums_match_closed_form() {
    for k in 1..=12u32 {
        let env = gen_square(k, c(0, 0)).unwrap();
        let total = bfs_distances(env.region(), env.source()).unwrap().sum();
        assert_eq!(total, (k * k * (k - 1)) as u64);
    }
    let env = gen_square(10, c(0, 0)).unwrap();
    assert_eq!(
        bfs_distances(env.region(), env.source()).unwrap().sum(),
        900
    );
}

#[test]
fn articulation_examples() {
    let p5 = gen_path(5).unwrap();
    let expected: BTreeSet<Cell> = (1..4).map(|x| c(x, 0)).collect();
    assert_eq!(articulation_points(p5.region()), expected);
    assert!(articulation_points(gen_square(3, c(0, 0)).unwrap().region()).is_empty());
}

/// Brute force: removing a cut vertex disconnects the rest.
fn oracle_cut_vertices(cells: &BTreeSet<Cell>) -> BTreeSet<Cell> {
    cells
        .iter()
        .copied()
        .filter(|&v| {
            let rest: BTreeSet<Cell> = cells.iter().copied().filter(|&u| u != v).collect();
            match rest.iter().next() {
                None => false,
                Some(&start) => oracle_distances(&rest, start).len() != rest.len(),
            }
        })
        .collect()
}

#[test]
fn generator_examples() {
    assert_eq!(gen_square(1, c(0, 0)).unwrap().n(), 1);
    assert_eq!(
        gen_square(3, c(3, 0)).unwrap_err(),
        EnvError::SourceOutOfBounds(c(3, 0))
    );
    let full = gen_carved(5, 0, 3).unwrap();
    assert_eq!(full.n(), 25);
    assert_eq!(gen_carved(5, 24, 1).unwrap().n(), 1);

    let g = gen_gkr(2, 1).unwrap();
    assert_eq!(g.source(), c(0, 0));
    let cells = cell_set(&g);
    assert_eq!((0..20).filter(|&x| cells.contains(&c(x, 0))).count(), 20);
    let column = |x: i32| (1..).take_while(|&y| cells.contains(&c(x, y))).count();
    // Tall columns run into the top row at y = 32.
    assert_eq!(column(0), 32);
    assert_eq!(column(2), 32);
    assert_eq!(column(4), 30);
    assert_eq!(column(18), 30);
    assert_eq!(oracle_distances(&cells, c(0, 0)).len(), g.n());
    assert!(matches!(gen_gkr(11, 1), Err(EnvError::BadParams(_))));
}

#[test]
fn optimal_source_examples() {
    let sq = gen_square(3, c(0, 0)).unwrap();
    let best = optimal_source(&sq);
    assert_eq!(best, c(1, 1));
    // Exhaustive oracle over every candidate.
    let cells = cell_set(&sq);
    let sums: Vec<(u32, Cell)> = cells
        .iter()
        .map(|&v| (oracle_distances(&cells, v).values().sum::<u32>(), v))
        .collect();
    assert_eq!(
        sums.iter().min_by_key(|(s, v)| (*s, v.y, v.x)).unwrap(),
        &(12, c(1, 1))
    );
    assert_eq!(optimal_source(&gen_square(1, c(0, 0)).unwrap()), c(0, 0));
    assert_eq!(optimal_source(&gen_path(5).unwrap()), c(2, 0));
}

#[test]
fn repair_examples() {
    let sq = gen_square(4, c(0, 0)).unwrap();
    assert_eq!(repair_holes(&sq), sq);
    let ring = gen_ring(3, 3).unwrap();
    assert_eq!(repair_holes(&ring), gen_square(3, c(0, 0)).unwrap());
    let two = from_ascii(".......\n.#...#.\nS......\n").unwrap();
    assert_eq!(hole_components(two.region()).len(), 2);
    let fixed = repair_holes(&two);
    assert!(is_simply_connected(fixed.region()));
    assert_eq!(fixed.n(), 21);
}

fn carved() -> impl Strategy<Value = Environment> {
    (2u32..14, 0.0f64..0.6, any::<u64>()).prop_map(|(k, frac, seed)| {
        let removals = ((k * k) as f64 * frac) as u32;
        gen_carved(k, removals.min(k * k - 1), seed).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn carved_regions_are_simply_connected(env in carved()) {
        prop_assert!(is_simply_connected(env.region()));
        prop_assert!(env.contains(env.source()));
    }

    #[test]
    fn halls_are_cut_vertices(env in carved()) {
        let cuts = articulation_points(env.region());
        let cells = cell_set(&env);
        prop_assert_eq!(&cuts, &oracle_cut_vertices(&cells));
        for v in env.region().cells() {
            if classify(env.region(), v).unwrap().is_hall() {
                prop_assert!(cuts.contains(&v));
            }
        }
    }

    #[test]
    fn at_least_two_corners(env in carved()) {
        prop_assume!(env.n() >= 2);
        prop_assert!(count_classes(env.region()).corners >= 2);
    }

    #[test]
    fn removing_a_corner_keeps_distances(env in carved(), pick in any::<prop::sample::Index>()) {
        prop_assume!(env.n() >= 2);
        let corners: Vec<Cell> = env.region().cells()
            .filter(|&v| classify(env.region(), v).unwrap().is_corner()).collect();
        let victim = *pick.get(&corners);
        let mut smaller = env.region().clone();
        smaller.remove(victim);
        prop_assert!(is_simply_connected(&smaller));
        let origin = smaller.cells().next().unwrap();
        let before = bfs_distances(env.region(), origin).unwrap();
        let after = bfs_distances(&smaller, origin).unwrap();
        for (v, d) in after.iter() {
            prop_assert_eq!(before.get(v), Some(d));
        }
        prop_assert_eq!(after.reached(), smaller.len());
    }

    #[test]
    fn distances_are_a_metric(env in carved(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), m in any::<prop::sample::Index>()) {
        let cells: Vec<Cell> = env.region().cells().collect();
        let (a, b, m) = (*a.get(&cells), *b.get(&cells), *m.get(&cells));
        let da = bfs_distances(env.region(), a).unwrap();
        let db = bfs_distances(env.region(), b).unwrap();
        let dm = bfs_distances(env.region(), m).unwrap();
        prop_assert_eq!(da.get(b), db.get(a));
        prop_assert!(da.get(b).unwrap() <= da.get(m).unwrap() + dm.get(b).unwrap());
        let oracle = oracle_distances(&cell_set(&env), a);
        for (v, d) in da.iter() {
            prop_assert_eq!(oracle[&v], d);
        }
    }

    #[test]
    fn ascii_round_trips(env in carved()) {
        let text = to_ascii(&env);
        prop_assert_eq!(from_ascii(&text).unwrap(), env);
    }

    #[test]
    fn repair_always_yields_simple_regions(k in 3u32..10, seed in any::<u64>()) {
        // Punch random holes into a square; keep the source's component.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut region = Region::rectangle(c(0, 0), k, k);
        for _ in 0..k {
            region.remove(c(rng.random_range(1..k as i32 - 1), rng.random_range(1..k as i32 - 1)));
        }
        let env = Environment::component(&region, c(0, 0)).unwrap();
        let fixed = repair_holes(&env);
        prop_assert!(is_simply_connected(fixed.region()));
        prop_assert_eq!(repair_holes(&fixed), fixed);
    }
}
