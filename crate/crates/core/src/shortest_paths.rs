//! Breadth-first search on the implicit unit-disk graph, driven by the grid.
//!
//! Distances are kept doubled so that fields measured from a dummy source
//! (one half unit away from every member of a clique) stay integral.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{adjacent, GridIndex, Point, PointSet};
use crate::par::Exec;

/// Doubled distance marking an unreachable vertex.
pub const UNREACHED: u32 = u32::MAX;

/// A distance in half units. `HalfDist(3)` is 1.5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfDist(pub u32);

impl HalfDist {
    pub const INF: HalfDist = HalfDist(UNREACHED);
    pub const ZERO: HalfDist = HalfDist(0);
    pub const HALF: HalfDist = HalfDist(1);

    pub fn from_hops(h: u32) -> Self {
        HalfDist(2 * h)
    }

    pub fn is_finite(self) -> bool {
        self.0 != UNREACHED
    }

    pub fn doubled(self) -> u32 {
        self.0
    }

    /// Largest integer not above this distance.
    pub fn floor(self) -> Option<u32> {
        self.is_finite().then_some(self.0 / 2)
    }

    pub fn as_f64(self) -> f64 {
        if self.is_finite() {
            self.0 as f64 / 2.0
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for HalfDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_finite() {
            f.write_str("inf")
        } else if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

impl Serialize for HalfDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_finite() {
            s.serialize_f64(self.as_f64())
        } else {
            s.serialize_none()
        }
    }
}

/// Distances from one source to every vertex of a point set, doubled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    dist: Vec<u32>,
}

impl DistanceField {
    pub fn from_doubled(dist: Vec<u32>) -> Self {
        DistanceField { dist }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, v: usize) -> HalfDist {
        HalfDist(self.dist[v])
    }

    /// Raw doubled distances; [`UNREACHED`] for unreachable vertices.
    pub fn doubled(&self) -> &[u32] {
        &self.dist
    }

    pub fn into_doubled(self) -> Vec<u32> {
        self.dist
    }

    /// Index of the first unreachable vertex, if any.
    pub fn first_unreached(&self) -> Option<usize> {
        self.dist.iter().position(|&d| d == UNREACHED)
    }

    /// Largest finite distance.
    pub fn max_finite(&self) -> HalfDist {
        HalfDist(self.dist.iter().copied().filter(|&d| d != UNREACHED).max().unwrap_or(0))
    }
}

/// For each blue point, whether some red point is within distance 2.
/// Reds are scanned in x order so only those with `|dx| <= 2` are tested.
pub fn red_blue_adjacent(red: &[Point], blue: &[Point]) -> Vec<bool> {
    let mut xs: Vec<Point> = red.to_vec();
    xs.sort_unstable_by(|a, b| a.x.total_cmp(&b.x));
    blue.iter().map(|&b| any_adjacent_sorted(&xs, b)).collect()
}

fn any_adjacent_sorted(red_by_x: &[Point], b: Point) -> bool {
    let lo = red_by_x.partition_point(|r| r.x < b.x - 2.0);
    red_by_x[lo..]
        .iter()
        .take_while(|r| r.x <= b.x + 2.0)
        .any(|&r| adjacent(r, b))
}

/// Reusable BFS state for one grid. Keeps, per cell, the points not yet
/// visited so each point is removed from consideration once reached.
pub struct Bfs<'a> {
    pts: &'a PointSet,
    grid: &'a GridIndex,
    alive: Vec<u32>,
    alive_end: Vec<u32>,
    cell_start: Vec<u32>,
    frontier: Vec<u32>,
    next: Vec<u32>,
    red: Vec<Point>,
}

const SORTED_SCAN_MIN: usize = 12;

impl<'a> Bfs<'a> {
    pub fn new(pts: &'a PointSet, grid: &'a GridIndex) -> Self {
        assert_eq!(pts.len(), grid.num_points(), "grid does not index this point set");
        let cells = grid.num_cells();
        let mut cell_start = Vec::with_capacity(cells + 1);
        let mut alive = Vec::with_capacity(pts.len());
        for c in 0..cells {
            cell_start.push(alive.len() as u32);
            alive.extend_from_slice(grid.cell_members(c));
        }
        cell_start.push(alive.len() as u32);
        Bfs {
            pts,
            grid,
            alive,
            alive_end: cell_start[1..].to_vec(),
            cell_start,
            frontier: Vec::new(),
            next: Vec::new(),
            red: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for c in 0..self.grid.num_cells() {
            let s = self.cell_start[c] as usize;
            let m = self.grid.cell_members(c);
            self.alive[s..s + m.len()].copy_from_slice(m);
            self.alive_end[c] = (s + m.len()) as u32;
        }
    }

    fn remove_alive(&mut self, v: u32) {
        let c = self.grid.cell_of(v as usize);
        let s = self.cell_start[c] as usize;
        let e = self.alive_end[c] as usize;
        if let Some(i) = self.alive[s..e].iter().position(|&x| x == v) {
            self.alive.swap(s + i, e - 1);
            self.alive_end[c] -= 1;
        }
    }

    /// Fills `dist` with doubled distances from the seed set, where every
    /// seed starts at doubled distance `offset` and each edge costs 2.
    pub fn run_into(&mut self, seeds: &[u32], offset: u32, dist: &mut Vec<u32>) {
        let n = self.pts.len();
        dist.clear();
        dist.resize(n, UNREACHED);
        self.reset();
        self.frontier.clear();
        for &s in seeds {
            if dist[s as usize] == UNREACHED {
                dist[s as usize] = offset;
                self.remove_alive(s);
                self.frontier.push(s);
            }
        }
        let cliques = self.grid.cells_are_cliques();
        let mut level = offset;
        while !self.frontier.is_empty() {
            let next_level = level + 2;
            let grid = self.grid;
            self.frontier.sort_unstable_by_key(|&v| grid.cell_of(v as usize));
            self.next.clear();
            let mut i = 0;
            while i < self.frontier.len() {
                let c = grid.cell_of(self.frontier[i] as usize);
                let mut j = i;
                self.red.clear();
                while j < self.frontier.len() && grid.cell_of(self.frontier[j] as usize) == c {
                    self.red.push(self.pts.get(self.frontier[j] as usize));
                    j += 1;
                }
                i = j;
                if self.red.len() >= SORTED_SCAN_MIN {
                    self.red.sort_unstable_by(|a, b| a.x.total_cmp(&b.x));
                }
                if cliques {
                    let s = self.cell_start[c] as usize;
                    let e = self.alive_end[c] as usize;
                    for &b in &self.alive[s..e] {
                        dist[b as usize] = next_level;
                        self.next.push(b);
                    }
                    self.alive_end[c] = s as u32;
                } else {
                    self.scan_cell(c, next_level, dist);
                }
                for k in 0..grid.near_cells(c).len() {
                    let c2 = grid.near_cells(c)[k] as usize;
                    self.scan_cell(c2, next_level, dist);
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
            level = next_level;
        }
    }

    fn scan_cell(&mut self, c: usize, next_level: u32, dist: &mut [u32]) {
        let s = self.cell_start[c] as usize;
        let mut e = self.alive_end[c] as usize;
        let mut k = s;
        let sorted = self.red.len() >= SORTED_SCAN_MIN;
        while k < e {
            let b = self.alive[k];
            let bp = self.pts.get(b as usize);
            let hit = if sorted {
                any_adjacent_sorted(&self.red, bp)
            } else {
                self.red.iter().any(|&r| adjacent(r, bp))
            };
            if hit {
                dist[b as usize] = next_level;
                self.next.push(b);
                e -= 1;
                self.alive.swap(k, e);
            } else {
                k += 1;
            }
        }
        self.alive_end[c] = e as u32;
    }

    pub fn run(&mut self, seeds: &[u32], offset: u32) -> DistanceField {
        let mut dist = Vec::new();
        self.run_into(seeds, offset, &mut dist);
        DistanceField { dist }
    }
}

/// Number of connected components.
pub fn component_count(pts: &PointSet, grid: &GridIndex) -> usize {
    let n = pts.len();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s as u32);
        while let Some(u) = stack.pop() {
            for w in grid.candidate_neighbors(u as usize) {
                if !seen[w as usize] && pts.adjacent(u as usize, w as usize) {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Fails with [`Error::Disconnected`] unless the graph is connected.
pub fn check_connected(pts: &PointSet, grid: &GridIndex) -> Result<()> {
    if pts.is_empty() {
        return Ok(());
    }
    match sssp(pts, grid, 0)?.first_unreached() {
        None => Ok(()),
        Some(unreached) => Err(Error::Disconnected { components: component_count(pts, grid), unreached }),
    }
}

/// Hop distances from `s`.
pub fn sssp(pts: &PointSet, grid: &GridIndex, s: usize) -> Result<DistanceField> {
    if s >= pts.len() {
        return Err(Error::VertexOutOfRange(s));
    }
    Ok(Bfs::new(pts, grid).run(&[s as u32], 0))
}

/// Distances from a virtual source joined to each of `sources` by an edge
/// of length `offset`. With `offset` one half this is the dummy vertex of a
/// clique.
pub fn multi_source_sssp(
    pts: &PointSet,
    grid: &GridIndex,
    sources: &[u32],
    offset: HalfDist,
) -> Result<DistanceField> {
    if let Some(&s) = sources.iter().find(|&&s| s as usize >= pts.len()) {
        return Err(Error::VertexOutOfRange(s as usize));
    }
    if !offset.is_finite() {
        return Err(Error::InvalidParameter("infinite source offset".into()));
    }
    Ok(Bfs::new(pts, grid).run(sources, offset.0))
}

/// A seed set for a batched search.
#[derive(Debug, Clone)]
pub struct Seeds {
    pub vertices: Vec<u32>,
    pub offset: u32,
}

/// Runs one search per seed set, sharing per-worker scratch state.
pub fn sssp_batch(pts: &PointSet, grid: &GridIndex, seeds: &[Seeds], exec: Exec) -> Vec<DistanceField> {
    exec.map_init(seeds, || Bfs::new(pts, grid), |bfs, s| bfs.run(&s.vertices, s.offset))
}

/// Explicit adjacency in compressed rows.
#[derive(Debug, Clone)]
pub struct Csr {
    start: Vec<usize>,
    adj: Vec<u32>,
}

impl Csr {
    /// Adjacency from grid buckets, or `None` if it would hold more than
    /// `max_arcs` directed arcs.
    pub fn build(pts: &PointSet, grid: &GridIndex, max_arcs: usize) -> Option<Csr> {
        let n = pts.len();
        let mut start = Vec::with_capacity(n + 1);
        let mut adj = Vec::new();
        start.push(0);
        for v in 0..n {
            let p = pts.get(v);
            let from = adj.len();
            adj.extend(
                grid.candidate_neighbors(v)
                    .filter(|&u| u as usize != v && adjacent(p, pts.get(u as usize))),
            );
            adj[from..].sort_unstable();
            if adj.len() > max_arcs {
                return None;
            }
            start.push(adj.len());
        }
        Some(Csr { start, adj })
    }

    pub fn num_vertices(&self) -> usize {
        self.start.len() - 1
    }

    pub fn num_arcs(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.start[v]..self.start[v + 1]]
    }
}

/// Sources searched together in one pass, one bit each.
const LANES: usize = 64;

/// Doubled distances from every seed set to every vertex, row-major: entry
/// `v * k + i` is the distance from seed set `i` to `v`.
///
/// Seed sets are grouped 64 at a time, nearby ids together, and each group
/// is searched in one breadth-first pass that carries a bit per source. A
/// vertex is expanded once per distinct distance it has from the group, so
/// groups of nearby sources cost little more than a single search.
///
/// All seed sets must share one offset.
pub fn batched_rows(csr: &Csr, seeds: &[Seeds], exec: Exec) -> Vec<u32> {
    let n = csr.num_vertices();
    let k = seeds.len();
    let offset = seeds.first().map_or(0, |s| s.offset);
    assert!(seeds.iter().all(|s| s.offset == offset), "seed sets must share one offset");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (seeds[i].vertices.iter().min().copied().unwrap_or(u32::MAX), i));
    let groups: Vec<&[usize]> = order.chunks(LANES).collect();
    let mut rows = vec![UNREACHED; n * k];
    let mut scatter = |group: &[usize], block: &LaneBlock| {
        for (w, dst) in rows.chunks_exact_mut(k).enumerate() {
            for (j, &col) in group.iter().enumerate() {
                dst[col] = block.get(w, j);
            }
        }
    };
    let block = |group: &[usize]| {
        let mut out = LaneBlock::new(n, group.len());
        lane_bfs(csr, seeds, group, offset, |w, j, level| out.set(w, j, level));
        out
    };
    if exec.is_parallel() && groups.len() > 1 {
        for (g, b) in groups.iter().zip(exec.map(&groups, |g| block(g))) {
            scatter(g, &b);
        }
    } else {
        for g in &groups {
            scatter(g, &block(g));
        }
    }
    rows
}

/// Distances of one lane group: the first level at which each vertex was
/// reached, plus a byte per lane counting further levels. Steps that do not
/// fit in a byte go to a side table.
struct LaneBlock {
    lanes: usize,
    first: Vec<u32>,
    steps: Vec<u8>,
    wide: HashMap<usize, u32>,
}

impl LaneBlock {
    /// Marks an entry that is unreached or stored in `wide`.
    const ESCAPE: u8 = u8::MAX;

    fn new(n: usize, lanes: usize) -> Self {
        LaneBlock { lanes, first: vec![UNREACHED; n], steps: vec![Self::ESCAPE; n * lanes], wide: HashMap::new() }
    }

    /// Levels arrive in nondecreasing order per vertex.
    #[inline]
    fn set(&mut self, w: usize, j: usize, level: u32) {
        if self.first[w] == UNREACHED {
            self.first[w] = level;
        }
        let step = (level - self.first[w]) / 2;
        let i = w * self.lanes + j;
        if step < Self::ESCAPE as u32 {
            self.steps[i] = step as u8;
        } else {
            self.wide.insert(i, level);
        }
    }

    #[inline]
    fn get(&self, w: usize, j: usize) -> u32 {
        let i = w * self.lanes + j;
        match self.steps[i] {
            Self::ESCAPE => self.wide.get(&i).copied().unwrap_or(UNREACHED),
            s => self.first[w] + 2 * s as u32,
        }
    }
}

/// One bit-parallel search over up to 64 seed sets. Reports each distance
/// once through `write(vertex, lane, doubled distance)`.
fn lane_bfs(csr: &Csr, seeds: &[Seeds], group: &[usize], offset: u32, mut write: impl FnMut(usize, usize, u32)) {
    let n = csr.num_vertices();
    debug_assert!(group.len() <= LANES);
    // Bits already settled, and bits arriving at the next level.
    let mut state = vec![[0u64; 2]; n];
    let mut frontier = vec![0u64; n];
    let mut active: Vec<u32> = Vec::new();
    // Each vertex is touched at most once per level; the spare slot takes
    // the unconditional store past the end.
    let mut touched = vec![0u32; n + 1];
    for (j, &i) in group.iter().enumerate() {
        let bit = 1u64 << j;
        for &v in &seeds[i].vertices {
            let v = v as usize;
            if state[v][0] & bit == 0 {
                if frontier[v] == 0 {
                    active.push(v as u32);
                }
                state[v][0] |= bit;
                frontier[v] |= bit;
                write(v, j, offset);
            }
        }
    }
    let mut level = offset;
    while !active.is_empty() {
        level += 2;
        let mut len = 0;
        for &v in &active {
            let f = std::mem::take(&mut frontier[v as usize]);
            for &w in csr.neighbors(v as usize) {
                let s = &mut state[w as usize];
                let add = f & !s[0];
                let first = (add != 0) & (s[1] == 0);
                s[1] |= add;
                touched[len] = w;
                len += first as usize;
            }
        }
        active.clear();
        for &w in &touched[..len] {
            let s = &mut state[w as usize];
            let fresh = std::mem::take(&mut s[1]);
            s[0] |= fresh;
            frontier[w as usize] = fresh;
            active.push(w);
            let mut bits = fresh;
            while bits != 0 {
                write(w as usize, bits.trailing_zeros() as usize, level);
                bits &= bits - 1;
            }
        }
    }
}

/// The subgraph induced by a vertex subset, with its own grid.
pub struct Subgraph {
    ids: Vec<u32>,
    pts: PointSet,
    grid: GridIndex,
}

impl Subgraph {
    pub fn new(pts: &PointSet, ids: &[u32]) -> Self {
        let sub = pts.subset(ids);
        let grid = GridIndex::new(&sub);
        Subgraph {
            ids: ids.to_vec(),
            pts: sub,
            grid,
        }
    }

    /// Global ids, in local index order.
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn bfs(&self) -> Bfs<'_> {
        Bfs::new(&self.pts, &self.grid)
    }
}

/// Hop distances from `s` inside the subgraph induced by `subset`. The
/// result is indexed by position in `subset`.
pub fn restricted_sssp(pts: &PointSet, subset: &[u32], s: usize) -> Result<DistanceField> {
    let local = subset
        .iter()
        .position(|&v| v as usize == s)
        .ok_or_else(|| Error::InvalidParameter(format!("source {s} is not in the subset")))?;
    if let Some(&v) = subset.iter().find(|&&v| v as usize >= pts.len()) {
        return Err(Error::VertexOutOfRange(v as usize));
    }
    let sub = Subgraph::new(pts, subset);
    Ok(sub.bfs().run(&[local as u32], 0))
}
