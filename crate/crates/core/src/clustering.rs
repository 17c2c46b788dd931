//! Clique-based r-clusterings.
//!
//! The vertex set is split into disjoint cliques and clusters. A cluster
//! owns an interior of at most `r` vertices and names at most `r` cliques as
//! its boundary; every edge leaving the interior ends in the interior or in
//! a boundary clique.
//!
//! Construction recurses on sets of disks of two kinds: regular disks not yet
//! in any clique, and representatives standing for a whole clique. Each step
//! separates the set, turns the regular disks of the separator into new
//! cliques, and splits each side (plus the separator representatives) into
//! connected pieces of an auxiliary graph. Its edges join intersecting disks
//! and join a regular disk to the representative of every clique it touches,
//! so a piece keeps all the cliques around its regular disks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{adjacent, GridIndex, Point, PointSet};
use crate::separator::{clique_lists_of, separate, SeparatorConfig};
use crate::shortest_paths::check_connected;

/// Marks a vertex that belongs to no clique.
pub const NO_CLIQUE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ClusteringConfig {
    pub r: usize,
    /// Constant in the bounds on cluster count and total boundary size.
    pub c_clu: f64,
    /// Constant in the bound on per-vertex clique lists, times log2 n.
    pub c_rho: f64,
    pub separator: SeparatorConfig,
}

impl ClusteringConfig {
    pub fn new(r: usize) -> Self {
        ClusteringConfig {
            r,
            c_clu: 12.0,
            c_rho: 8.0,
            separator: SeparatorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clique {
    /// Vertex ids, ascending.
    pub members: Vec<u32>,
    /// Smallest member.
    pub representative: u32,
    /// All members lie within distance 1 of this point.
    pub stab: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Vertices owned by the cluster, ascending.
    pub interior: Vec<u32>,
    /// Clique ids, ascending.
    pub boundary: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Clustering {
    pub r: usize,
    pub cliques: Vec<Clique>,
    pub clusters: Vec<Cluster>,
    /// Clique id of each vertex, or [`NO_CLIQUE`].
    #[serde(skip)]
    pub clique_of: Vec<u32>,
    /// Cluster id whose interior holds each vertex, or `u32::MAX`.
    #[serde(skip)]
    pub cluster_of: Vec<u32>,
    /// Longest clique list any vertex accumulated.
    pub max_clique_list: usize,
    /// Total size of the disk sets handled over the whole recursion.
    pub work: u64,
}

impl Clustering {
    /// Interior plus boundary clique members.
    pub fn cluster_vertices(&self, i: usize) -> Vec<u32> {
        let c = &self.clusters[i];
        let mut out = c.interior.clone();
        for &k in &c.boundary {
            out.extend_from_slice(&self.cliques[k as usize].members);
        }
        out.sort_unstable();
        out
    }

    pub fn total_boundary(&self) -> usize {
        self.clusters.iter().map(|c| c.boundary.len()).sum()
    }

    /// Cliques in no cluster boundary.
    pub fn orphan_cliques(&self) -> Vec<u32> {
        let mut used = vec![false; self.cliques.len()];
        for c in &self.clusters {
            for &k in &c.boundary {
                used[k as usize] = true;
            }
        }
        (0..self.cliques.len() as u32).filter(|&k| !used[k as usize]).collect()
    }
}

/// Default cluster size: the ninth root of `n`, rounded up, at least 4 and at
/// most `n`.
pub fn default_r(n: usize) -> usize {
    let r = (n as f64).powf(1.0 / 9.0).ceil() as usize;
    r.max(4).min(n.max(1))
}

/// Cluster size used by the diameter and oracle pipelines when none is
/// given: `n^0.6` rounded up, at least 4 and at most `n`. Much smaller
/// clusters leave almost every vertex in a clique, and the pipelines then
/// degrade to one search per clique.
pub fn pipeline_r(n: usize) -> usize {
    let r = (n as f64).powf(0.6).ceil() as usize;
    r.max(4).min(n.max(1))
}

pub fn build_r_clustering(pts: &PointSet, grid: &GridIndex, r: usize) -> Result<Clustering> {
    build_with(pts, grid, &ClusteringConfig::new(r))
}

struct Node {
    items: Vec<u32>,
    regular_only: bool,
}

struct Builder<'a> {
    pts: &'a PointSet,
    cfg: &'a ClusteringConfig,
    cliques: Vec<Clique>,
    clusters: Vec<Cluster>,
    clique_of: Vec<u32>,
    rho: Vec<Vec<u32>>,
    pos: Vec<u32>,
    work: u64,
}

pub fn build_with(pts: &PointSet, grid: &GridIndex, cfg: &ClusteringConfig) -> Result<Clustering> {
    let n = pts.len();
    if cfg.r == 0 {
        return Err(Error::InvalidParameter("cluster size r must be positive".into()));
    }
    if n > u32::MAX as usize / 2 {
        return Err(Error::TooLarge { what: "clustering", n, limit: u32::MAX as usize / 2 });
    }
    check_connected(pts, grid)?;
    let mut b = Builder {
        pts,
        cfg,
        cliques: Vec::new(),
        clusters: Vec::new(),
        clique_of: vec![NO_CLIQUE; n],
        rho: vec![Vec::new(); n],
        pos: vec![u32::MAX; n],
        work: 0,
    };
    if n > 0 {
        let all: Vec<u32> = (0..n as u32).collect();
        if n <= cfg.r {
            b.clusters.push(Cluster { interior: all, boundary: Vec::new() });
        } else {
            b.run(all)?;
        }
    }
    let mut cluster_of = vec![u32::MAX; n];
    for (i, c) in b.clusters.iter().enumerate() {
        for &v in &c.interior {
            cluster_of[v as usize] = i as u32;
        }
    }
    Ok(Clustering {
        r: cfg.r,
        max_clique_list: b.rho.iter().map(Vec::len).max().unwrap_or(0),
        cliques: b.cliques,
        clusters: b.clusters,
        clique_of: b.clique_of,
        cluster_of,
        work: b.work,
    })
}

impl Builder<'_> {
    fn is_regular(&self, v: u32) -> bool {
        self.clique_of[v as usize] == NO_CLIQUE
    }

    fn run(&mut self, root: Vec<u32>) -> Result<()> {
        let mut stack = vec![Node { items: root, regular_only: false }];
        while let Some(node) = stack.pop() {
            let children = self.step(node)?;
            // Reverse so the first piece is handled first.
            stack.extend(children.into_iter().rev());
        }
        Ok(())
    }

    fn step(&mut self, node: Node) -> Result<Vec<Node>> {
        let items = node.items;
        self.work += items.len() as u64;
        let parent_regular = items.iter().filter(|&&v| self.is_regular(v)).count();
        let counted: Option<Vec<bool>> =
            node.regular_only.then(|| items.iter().map(|&v| self.is_regular(v)).collect());
        let sep = separate(self.pts, &items, counted.as_deref(), &self.cfg.separator)?;

        let mut sep_reps: Vec<u32> = Vec::new();
        let first_new = self.cliques.len();
        for sc in &sep.cliques {
            let mut fresh = Vec::new();
            for &v in &sc.members {
                if self.is_regular(v) {
                    fresh.push(v);
                } else {
                    sep_reps.push(v);
                }
            }
            if !fresh.is_empty() {
                let id = self.cliques.len() as u32;
                for &v in &fresh {
                    self.clique_of[v as usize] = id;
                }
                sep_reps.push(fresh[0]);
                self.cliques.push(Clique {
                    representative: fresh[0],
                    members: fresh,
                    stab: sc.stab,
                });
            }
        }
        sep_reps.sort_unstable();

        let query: Vec<u32> = sep
            .side_a
            .iter()
            .chain(&sep.side_b)
            .copied()
            .filter(|&v| self.is_regular(v))
            .collect();
        if self.cliques.len() > first_new && !query.is_empty() {
            let fresh: Vec<&[u32]> = self.cliques[first_new..].iter().map(|c| c.members.as_slice()).collect();
            let lists = clique_lists_of(self.pts, &fresh, &query);
            for (&y, list) in query.iter().zip(lists) {
                self.rho[y as usize].extend(list.into_iter().map(|k| k + first_new as u32));
            }
        }

        let mut children = Vec::new();
        for side in [&sep.side_a, &sep.side_b] {
            let mut set: Vec<u32> = side.iter().chain(&sep_reps).copied().collect();
            set.sort_unstable();
            for comp in self.extended_components(&set) {
                let regular = comp.iter().filter(|&&v| self.is_regular(v)).count();
                if comp.len() <= self.cfg.r {
                    self.emit(&comp);
                } else if regular == 0 {
                    for piece in self.connected_pieces(&comp) {
                        self.emit(&piece);
                    }
                } else {
                    let stuck = comp.len() == items.len() && regular == parent_regular;
                    children.push(Node { items: comp, regular_only: stuck });
                }
            }
        }
        Ok(children)
    }

    fn emit(&mut self, comp: &[u32]) {
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for &v in comp {
            match self.clique_of[v as usize] {
                NO_CLIQUE => interior.push(v),
                k => boundary.push(k),
            }
        }
        boundary.sort_unstable();
        self.clusters.push(Cluster { interior, boundary });
    }

    /// Connected components of the auxiliary graph on `set`, each sorted,
    /// ordered by smallest member.
    fn extended_components(&mut self, set: &[u32]) -> Vec<Vec<u32>> {
        for (i, &v) in set.iter().enumerate() {
            self.pos[v as usize] = i as u32;
        }
        let sub = self.pts.subset(set);
        let grid = GridIndex::new(&sub);
        let mut uf = UnionFind::new(set.len());
        for i in 0..set.len() {
            let p = sub.get(i);
            for j in grid.candidate_neighbors(i) {
                if (j as usize) > i && adjacent(p, sub.get(j as usize)) {
                    uf.union(i, j as usize);
                }
            }
            let v = set[i];
            if self.is_regular(v) {
                for &k in &self.rho[v as usize] {
                    let rep = self.cliques[k as usize].representative;
                    let at = self.pos[rep as usize];
                    if at != u32::MAX && set.get(at as usize) == Some(&rep) {
                        uf.union(i, at as usize);
                    }
                }
            }
        }
        for &v in set {
            self.pos[v as usize] = u32::MAX;
        }
        group(set, &mut uf)
    }

    /// Splits a connected set of representatives into connected pieces of at
    /// most `r` each, by breadth-first growth.
    fn connected_pieces(&self, comp: &[u32]) -> Vec<Vec<u32>> {
        let sub = self.pts.subset(comp);
        let grid = GridIndex::new(&sub);
        let mut taken = vec![false; comp.len()];
        let mut pieces = Vec::new();
        for start in 0..comp.len() {
            if taken[start] {
                continue;
            }
            let mut piece = vec![start];
            taken[start] = true;
            let mut head = 0;
            while head < piece.len() && piece.len() < self.cfg.r {
                let u = piece[head];
                head += 1;
                let p = sub.get(u);
                for w in grid.candidate_neighbors(u) {
                    let w = w as usize;
                    if !taken[w] && adjacent(p, sub.get(w)) && piece.len() < self.cfg.r {
                        taken[w] = true;
                        piece.push(w);
                    }
                }
            }
            let mut ids: Vec<u32> = piece.into_iter().map(|i| comp[i]).collect();
            ids.sort_unstable();
            pieces.push(ids);
        }
        pieces
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

fn group(set: &[u32], uf: &mut UnionFind) -> Vec<Vec<u32>> {
    let mut slot = vec![u32::MAX; set.len()];
    let mut out: Vec<Vec<u32>> = Vec::new();
    for i in 0..set.len() {
        let r = uf.find(i);
        if slot[r] == u32::MAX {
            slot[r] = out.len() as u32;
            out.push(Vec::new());
        }
        out[slot[r] as usize].push(set[i]);
    }
    out
}

/// Components of the auxiliary graph on an explicit disk set: disks are
/// joined when they intersect, and a regular disk `y` is joined to each
/// representative in `lists[y]`. `representative[y]` is true for
/// representatives. Components are sorted and ordered by smallest member.
pub fn extended_components(
    pts: &PointSet,
    set: &[u32],
    representative: &[bool],
    lists: &[Vec<u32>],
) -> Vec<Vec<u32>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let index = |v: u32| sorted.binary_search(&v).ok();
    let sub = pts.subset(&sorted);
    let grid = GridIndex::new(&sub);
    let mut uf = UnionFind::new(sorted.len());
    for i in 0..sorted.len() {
        for j in grid.candidate_neighbors(i) {
            if (j as usize) > i && adjacent(sub.get(i), sub.get(j as usize)) {
                uf.union(i, j as usize);
            }
        }
        let v = sorted[i];
        if !representative[v as usize] {
            for &x in &lists[v as usize] {
                if let Some(j) = index(x) {
                    uf.union(i, j);
                }
            }
        }
    }
    group(&sorted, &mut uf)
}

/// Checks every structural property of a clustering and returns a
/// description of each violation found.
pub fn check_invariants(pts: &PointSet, grid: &GridIndex, c: &Clustering, cfg: &ClusteringConfig) -> Vec<String> {
    let n = pts.len();
    let mut bad = Vec::new();
    let r = c.r;
    let bound = cfg.c_clu * n as f64 / (r as f64).sqrt();

    let mut owner = vec![0u32; n];
    for (k, q) in c.cliques.iter().enumerate() {
        if q.members.first() != Some(&q.representative) {
            bad.push(format!("clique {k}: representative is not the smallest member"));
        }
        for (i, &u) in q.members.iter().enumerate() {
            owner[u as usize] += 1;
            if pts.get(u as usize).dist2(q.stab) > 1.0 + 1e-9 {
                bad.push(format!("clique {k}: vertex {u} is farther than 1 from the stab point"));
            }
            for &v in &q.members[i + 1..] {
                if !pts.adjacent(u as usize, v as usize) {
                    bad.push(format!("clique {k}: {u} and {v} are not adjacent"));
                }
            }
        }
    }
    for (i, cl) in c.clusters.iter().enumerate() {
        if cl.interior.len() > r {
            bad.push(format!("cluster {i}: interior of size {} exceeds r = {r}", cl.interior.len()));
        }
        if cl.boundary.len() > r {
            bad.push(format!("cluster {i}: {} boundary cliques exceed r = {r}", cl.boundary.len()));
        }
        for &v in &cl.interior {
            owner[v as usize] += 1;
        }
    }
    for (v, &o) in owner.iter().enumerate() {
        if o != 1 {
            bad.push(format!("vertex {v} is covered {o} times by interiors and cliques"));
        }
    }
    if c.clusters.len() as f64 > bound {
        bad.push(format!("{} clusters exceed {bound:.1}", c.clusters.len()));
    }
    if c.total_boundary() as f64 > bound {
        bad.push(format!("total boundary {} exceeds {bound:.1}", c.total_boundary()));
    }
    let rho_bound = cfg.c_rho * (n.max(2) as f64).log2();
    if c.max_clique_list as f64 > rho_bound {
        bad.push(format!("clique list of length {} exceeds {rho_bound:.1}", c.max_clique_list));
    }

    let mut mark = vec![u32::MAX; n];
    for (i, cl) in c.clusters.iter().enumerate() {
        let verts = c.cluster_vertices(i);
        for &v in &verts {
            mark[v as usize] = i as u32;
        }
        if !verts.is_empty() && !connected_within(pts, grid, &verts, &mark, i as u32) {
            bad.push(format!("cluster {i}: vertex set is not connected"));
        }
        for &y in &cl.interior {
            for z in grid.candidate_neighbors(y as usize) {
                if z != y && pts.adjacent(y as usize, z as usize) && mark[z as usize] != i as u32 {
                    bad.push(format!("cluster {i}: edge {y}-{z} leaves the cluster"));
                }
            }
        }
        for &v in &verts {
            mark[v as usize] = u32::MAX;
        }
    }
    bad
}

fn connected_within(pts: &PointSet, grid: &GridIndex, verts: &[u32], mark: &[u32], id: u32) -> bool {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![verts[0]];
    seen.insert(verts[0]);
    while let Some(u) = stack.pop() {
        for w in grid.candidate_neighbors(u as usize) {
            if mark[w as usize] == id && !seen.contains(&w) && pts.adjacent(u as usize, w as usize) {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    seen.len() == verts.len()
}
