//! Reference computations on the explicit graph, used to check the fast
//! paths: all-pairs distances, exact diameter, distances from a dummy
//! source, and the ball system with its shattering behaviour.
//!
//! Nothing here reuses the grid searches; adjacency lists are built from
//! the pairwise predicate and searched with a plain queue or heap.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridIndex, PointSet};
use crate::shortest_paths::check_connected;

/// Largest instance for which the full distance matrix is materialized.
pub const APSP_LIMIT: usize = 3000;
/// Largest instance for the shattering search.
pub const SHATTER_LIMIT: usize = 40;

const NONE: u32 = u32::MAX;

/// Adjacency lists from comparing every pair.
pub fn explicit_graph(pts: &PointSet) -> Vec<Vec<u32>> {
    let n = pts.len();
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if pts.adjacent(u, v) {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
    }
    adj
}

fn bfs_hops(adj: &[Vec<u32>], s: usize, out: &mut [u32], queue: &mut VecDeque<u32>) {
    out.fill(NONE);
    out[s] = 0;
    queue.clear();
    queue.push_back(s as u32);
    while let Some(u) = queue.pop_front() {
        let du = out[u as usize];
        for &w in &adj[u as usize] {
            if out[w as usize] == NONE {
                out[w as usize] = du + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Hop distances between all pairs; `u32::MAX` marks unreachable pairs.
#[derive(Debug, Clone)]
pub struct DistMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        let x = self.d[u * self.n + v];
        (x != NONE).then_some(x)
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> u32 {
        self.d.iter().copied().filter(|&x| x != NONE).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        !self.d.contains(&NONE)
    }
}

pub fn exact_apsp(pts: &PointSet) -> Result<DistMatrix> {
    let n = pts.len();
    if n > APSP_LIMIT {
        return Err(Error::TooLarge { what: "all-pairs distances", n, limit: APSP_LIMIT });
    }
    let adj = explicit_graph(pts);
    let mut d = vec![NONE; n * n];
    let mut q = VecDeque::new();
    for s in 0..n {
        bfs_hops(&adj, s, &mut d[s * n..(s + 1) * n], &mut q);
    }
    Ok(DistMatrix { n, d })
}

/// Exact diameter by a search from every vertex. Adjacency lists come from
/// the grid buckets and the pairwise predicate, so this scales past the
/// matrix limit.
pub fn exact_diameter(pts: &PointSet) -> Result<u32> {
    let n = pts.len();
    if n == 0 {
        return Ok(0);
    }
    let adj = GridIndex::new(pts).adjacency(pts);
    let mut row = vec![NONE; n];
    let mut q = VecDeque::new();
    let mut best = 0;
    for s in 0..n {
        bfs_hops(&adj, s, &mut row, &mut q);
        if row.contains(&NONE) {
            return Err(check_connected(pts, &GridIndex::new(pts)).expect_err("some vertex is unreached"));
        }
        best = best.max(*row.iter().max().expect("nonempty"));
    }
    Ok(best)
}

/// Doubled distances from a dummy vertex joined to each of `members` by an
/// edge of length one half, by Dijkstra on the graph with that star added.
pub fn dummy_source_distances(pts: &PointSet, members: &[u32]) -> Vec<u32> {
    let n = pts.len();
    let adj = explicit_graph(pts);
    // Node n is the dummy; doubled weights: 1 on star edges, 2 elsewhere.
    let mut dist = vec![NONE; n + 1];
    let mut heap = BinaryHeap::new();
    dist[n] = 0;
    heap.push(Reverse((0u32, n as u32)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        let edges: Box<dyn Iterator<Item = (u32, u32)>> = if u as usize == n {
            Box::new(members.iter().map(|&m| (m, 1)))
        } else {
            Box::new(adj[u as usize].iter().map(|&w| (w, 2)))
        };
        for (w, c) in edges {
            let nd = d + c;
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist.truncate(n);
    dist
}

/// A ball `{u : d(center, u) <= radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    pub center: u32,
    pub radius: u32,
}

/// All distinct balls of radius 0 up to the diameter, as vertex bitmasks,
/// each with the first (center, radius) producing it.
pub fn ball_system(apsp: &DistMatrix) -> Result<Vec<(u64, Ball)>> {
    let n = apsp.n();
    if n > 64 {
        return Err(Error::TooLarge { what: "ball system", n, limit: 64 });
    }
    let diam = apsp.diameter();
    let mut seen: HashMap<u64, Ball> = HashMap::new();
    let mut order = Vec::new();
    for c in 0..n {
        let row = apsp.row(c);
        for r in 0..=diam {
            let mask = row
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x != NONE && x <= r)
                .fold(0u64, |m, (u, _)| m | 1 << u);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(mask) {
                let b = Ball { center: c as u32, radius: r };
                e.insert(b);
                order.push((mask, b));
            }
        }
    }
    Ok(order)
}

/// A vertex set together with, for each of its subsets, a ball whose trace
/// on the set is exactly that subset. `balls[m]` realizes the subset
/// selected by the bits of `m` over `subset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShatterWitness {
    pub subset: Vec<u32>,
    pub balls: Vec<Ball>,
}

impl ShatterWitness {
    /// Re-derives every trace from a distance matrix.
    pub fn validate(&self, apsp: &DistMatrix) -> bool {
        let k = self.subset.len();
        if self.balls.len() != 1 << k {
            return false;
        }
        self.balls.iter().enumerate().all(|(m, b)| {
            self.subset.iter().enumerate().all(|(i, &v)| {
                let inside = apsp.get(b.center as usize, v as usize).is_some_and(|d| d <= b.radius);
                inside == (m >> i & 1 == 1)
            })
        })
    }
}

fn trace_index(ball: u64, subset: &[u32]) -> usize {
    subset
        .iter()
        .enumerate()
        .fold(0, |m, (i, &v)| m | (((ball >> v) & 1) as usize) << i)
}

fn shattered(balls: &[(u64, Ball)], subset: &[u32]) -> bool {
    let full: u64 = if subset.len() == 6 { u64::MAX } else { (1u64 << (1 << subset.len())) - 1 };
    let mut seen = 0u64;
    for &(b, _) in balls {
        seen |= 1 << trace_index(b, subset);
        if seen == full {
            return true;
        }
    }
    false
}

/// Every shattered vertex set of each size up to `max_size` (at most 6),
/// found level by level: a set can only be shattered if all its subsets
/// one smaller are.
pub fn shattered_sets(balls: &[(u64, Ball)], n: usize, max_size: usize) -> Vec<Vec<Vec<u32>>> {
    assert!(max_size <= 6);
    let mut levels: Vec<Vec<Vec<u32>>> = vec![vec![vec![]]];
    for size in 1..=max_size {
        let prev = &levels[size - 1];
        let prev_set: HashSet<&[u32]> = prev.iter().map(|s| s.as_slice()).collect();
        let mut next = Vec::new();
        for base in prev {
            let start = base.last().map_or(0, |&l| l + 1);
            for v in start..n as u32 {
                let mut cand = base.clone();
                cand.push(v);
                let subsets_ok = (0..cand.len()).all(|skip| {
                    let sub: Vec<u32> =
                        cand.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    prev_set.contains(sub.as_slice())
                });
                if subsets_ok && shattered(balls, &cand) {
                    next.push(cand);
                }
            }
        }
        let done = next.is_empty();
        levels.push(next);
        if done {
            break;
        }
    }
    levels
}

fn witness_for(balls: &[(u64, Ball)], subset: &[u32]) -> ShatterWitness {
    let mut pick = vec![None; 1 << subset.len()];
    for &(b, ball) in balls {
        let t = trace_index(b, subset);
        if pick[t].is_none() {
            pick[t] = Some(ball);
        }
    }
    ShatterWitness {
        subset: subset.to_vec(),
        balls: pick.into_iter().map(|b| b.expect("shattered set has every trace")).collect(),
    }
}

/// A shattered set of exactly `size` vertices, if one exists.
pub fn find_shattered(pts: &PointSet, size: usize) -> Result<Option<ShatterWitness>> {
    let n = pts.len();
    if n > SHATTER_LIMIT {
        return Err(Error::TooLarge { what: "shattering search", n, limit: SHATTER_LIMIT });
    }
    if size > 6 {
        return Err(Error::InvalidParameter("set size above 6".into()));
    }
    let apsp = exact_apsp(pts)?;
    let balls = ball_system(&apsp)?;
    let levels = shattered_sets(&balls, n, size);
    Ok(levels.get(size).and_then(|l| l.first()).map(|s| witness_for(&balls, s)))
}

pub fn find_shattered_4set(pts: &PointSet) -> Result<Option<ShatterWitness>> {
    find_shattered(pts, 4)
}

/// `Ok(None)` when no 5 vertices are shattered by balls, otherwise a witness.
pub fn check_no_5_shatter(pts: &PointSet) -> Result<Option<ShatterWitness>> {
    find_shattered(pts, 5)
}

/// One failed comparison of an answer against the exact distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowViolation {
    pub u: u32,
    pub v: u32,
    pub answer: u32,
    pub exact: Option<u32>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct WindowReport {
    pub checked: usize,
    pub violations: Vec<WindowViolation>,
}

impl WindowReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `exact <= answer <= exact + slack` for each `(u, v, answer)`.
pub fn validate_window(apsp: &DistMatrix, answers: &[(u32, u32, u32)], slack: u32) -> WindowReport {
    let mut rep = WindowReport::default();
    for &(u, v, answer) in answers {
        rep.checked += 1;
        let exact = apsp.get(u as usize, v as usize);
        let fine = exact.is_some_and(|d| d <= answer && answer <= d + slack);
        if !fine {
            rep.violations.push(WindowViolation { u, v, answer, exact });
        }
    }
    rep
}
