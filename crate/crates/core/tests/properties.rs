mod support;

use std::path::Path;

use proptest::prelude::*;

use udg_core::clustering::{build_r_clustering, check_invariants, ClusteringConfig};
use udg_core::diameter::{approx_diameter, DiameterConfig};
use udg_core::oracle::{Oracle, OracleConfig};
use udg_core::separator::{clique_lists, well_separated_separator};
use udg_core::shortest_paths::sssp;
use udg_core::verification::{exact_apsp, find_shattered_4set, ShatterWitness};
use udg_core::{GridIndex, Mode, Point, PointSet};

use support::*;

/// Connected point sets: a walk with steps shorter than 2, plus points
/// dropped next to earlier ones.
fn connected_points(max: usize) -> impl Strategy<Value = PointSet> {
    let step = (0.0f64..1.99, 0.0f64..std::f64::consts::TAU);
    (prop::collection::vec(step, 1..max), prop::collection::vec((any::<prop::sample::Index>(), 0.0f64..1.99, 0.0f64..std::f64::consts::TAU), 0..max))
        .prop_map(|(walk, extra)| {
            let mut pts = vec![Point::new(0.0, 0.0)];
            for (len, angle) in walk {
                let last = *pts.last().unwrap();
                pts.push(Point::new(last.x + len * angle.cos(), last.y + len * angle.sin()));
            }
            for (at, len, angle) in extra {
                let base = pts[at.index(pts.len())];
                pts.push(Point::new(base.x + len * angle.cos(), base.y + len * angle.sin()));
            }
            PointSet::new(pts).unwrap()
        })
}

fn any_points(max: usize) -> impl Strategy<Value = PointSet> {
    (1..max, 2.0f64..30.0).prop_flat_map(|(n, side)| {
        prop::collection::vec((0.0..side, 0.0..side), n)
            .prop_map(|v| PointSet::new(v.into_iter().map(|(x, y)| Point::new(x, y)).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sssp_matches_explicit_bfs(pts in any_points(120), pick in any::<prop::sample::Index>()) {
        let s = pick.index(pts.len());
        let want = bfs(&all_pairs_graph(&pts), s);
        let got = sssp(&pts, &GridIndex::new(&pts), s).unwrap();
        for (v, &w) in want.iter().enumerate() {
            let g = got.get(v);
            if w == INF {
                prop_assert!(!g.is_finite());
            } else {
                prop_assert_eq!(g.doubled(), 2 * w);
            }
        }
    }

    #[test]
    fn diameter_window(pts in connected_points(90), r in 4usize..30) {
        let ecc = eccentricities(&all_pairs_graph(&pts));
        let d = *ecc.iter().max().unwrap();
        for mode in [Mode::Plus1, Mode::Plus2] {
            let res = approx_diameter(&pts, &DiameterConfig { r: Some(r), ..DiameterConfig::new(mode) }).unwrap();
            prop_assert!(d <= res.estimate && res.estimate <= d + mode.additive_error());
            for (u, &e) in res.eccentricities.iter().enumerate() {
                prop_assert!(ecc[u] <= e && e <= ecc[u] + mode.additive_error());
            }
        }
    }

    #[test]
    fn oracle_window_both_orders(pts in connected_points(70), r in 4usize..25) {
        let exact = all_distances(&all_pairs_graph(&pts));
        for mode in [Mode::Plus1, Mode::Plus2] {
            let o = Oracle::build(&pts, &OracleConfig { r: Some(r), ..OracleConfig::new(mode) }).unwrap();
            for u in 0..pts.len() {
                for v in 0..pts.len() {
                    let a = o.query(u, v).unwrap();
                    prop_assert!(exact[u][v] <= a && a <= exact[u][v] + mode.additive_error());
                }
            }
        }
    }

    #[test]
    fn clustering_partition_and_closure(pts in connected_points(150), r in 2usize..40) {
        let grid = GridIndex::new(&pts);
        let c = build_r_clustering(&pts, &grid, r).unwrap();
        prop_assert!(check_invariants(&pts, &grid, &c, &ClusteringConfig::new(r)).is_empty());
        let adj = all_pairs_graph(&pts);
        let mut home = vec![usize::MAX; pts.len()];
        for (k, q) in c.cliques.iter().enumerate() {
            for &v in &q.members {
                home[v as usize] = k;
            }
        }
        for cl in &c.clusters {
            prop_assert!(cl.interior.len() <= r && cl.boundary.len() <= r);
            for &y in &cl.interior {
                for &z in &adj[y as usize] {
                    let inside = cl.interior.binary_search(&z).is_ok();
                    prop_assert!(inside || cl.boundary.binary_search(&(home[z as usize] as u32)).is_ok());
                }
            }
        }
    }

    #[test]
    fn separator_definition(pts in any_points(300)) {
        prop_assume!(pts.len() >= 2);
        let sep = well_separated_separator(&pts).unwrap();
        let n = pts.len();
        prop_assert!(3 * sep.side_a.len().max(sep.side_b.len()) <= 2 * n);
        for &a in &sep.side_a {
            for &b in &sep.side_b {
                let (p, q) = (pts.get(a as usize), pts.get(b as usize));
                prop_assert!((p.x - q.x).powi(2) + (p.y - q.y).powi(2) > 16.0);
            }
        }
        let all: Vec<u32> = (0..n as u32).collect();
        for (y, list) in clique_lists(&pts, &sep, &all).iter().enumerate() {
            let want: Vec<u32> = (0..sep.cliques.len() as u32)
                .filter(|&k| sep.cliques[k as usize].members.iter().any(|&m| touching(&pts, y, m as usize)))
                .collect();
            prop_assert_eq!(list, &want);
            prop_assert!(list.len() <= 16);
        }
    }

    #[test]
    fn instance_text_round_trip(pts in any_points(50)) {
        let back = PointSet::parse(&pts.to_instance_string()).unwrap();
        prop_assert_eq!(back.points(), pts.points());
    }
}

#[test]
fn archived_four_set_witness() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let pts = PointSet::read(&data.join("shatter4_instance.txt")).unwrap();
    let w: ShatterWitness =
        serde_json::from_str(&std::fs::read_to_string(data.join("shatter4_witness.json")).unwrap()).unwrap();
    assert!(w.validate(&exact_apsp(&pts).unwrap()));
    // Every subset of the 4 vertices is cut out by its ball.
    let rows = all_distances(&all_pairs_graph(&pts));
    for (m, b) in w.balls.iter().enumerate() {
        for (i, &v) in w.subset.iter().enumerate() {
            let inside = rows[b.center as usize][v as usize] <= b.radius;
            assert_eq!(inside, m >> i & 1 == 1, "ball {m} vertex {v}");
        }
    }
    assert!(find_shattered_4set(&pts).unwrap().is_some());
}
