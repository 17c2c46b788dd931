//! Distance patterns relative to a cluster's source sequence.
//!
//! Given sources `s_0, ..., s_{k-1}`, the pattern of `u` is the vector of
//! differences `d(u, s_i) - d(u, s_0)`. The pattern distance to `v` is
//! `min_i d(v, s_i) + p[i]`, and `d(u, s_0)` plus the pattern distance of
//! `p_u` equals `min_i d(u, s_i) + d(v, s_i)`. Everything here is kept in
//! doubled units, like the distance fields it is built from.

use std::collections::HashMap;

use crate::clustering::Clustering;
use crate::kernels::FoldBuild;
use crate::error::{Error, Result};
use crate::shortest_paths::{Seeds, UNREACHED};
use crate::Mode;

/// Seeds of the search from one clique's source: its representative, or a
/// dummy vertex half a unit from every member.
pub fn clique_seeds(clustering: &Clustering, clique: u32, mode: Mode) -> Seeds {
    let c = &clustering.cliques[clique as usize];
    match mode {
        Mode::Plus2 => Seeds { vertices: vec![c.representative], offset: 0 },
        Mode::Plus1 => Seeds { vertices: c.members.clone(), offset: 1 },
    }
}

/// Distinct patterns of all vertices of a graph relative to `k` sources.
#[derive(Debug, Clone)]
pub struct PatternTable {
    k: usize,
    /// Doubled differences, `k` per pattern; entry 0 of each is 0.
    entries: Vec<i32>,
    /// Pattern id of each vertex.
    of_vertex: Vec<u32>,
    /// Doubled distance from each vertex to `s_0`.
    base: Vec<u32>,
}

impl PatternTable {
    /// Builds patterns from one doubled distance field per source, in source
    /// order. Pattern ids follow first appearance by vertex id.
    pub fn build(fields: &[&[u32]]) -> Result<Self> {
        let k = fields.len();
        if k == 0 {
            return Err(Error::InvalidParameter("pattern table needs at least one source".into()));
        }
        let n = fields[0].len();
        if fields.iter().any(|f| f.len() != n) {
            return Err(Error::InvalidParameter("distance fields differ in length".into()));
        }
        let mut rows = vec![0u32; n * k];
        for (i, f) in fields.iter().enumerate() {
            for (u, &d) in f.iter().enumerate() {
                rows[u * k + i] = d;
            }
        }
        Self::from_rows(&rows, k)
    }

    /// Builds patterns from row-major distances: `rows[u * k + i]` is the
    /// doubled distance from source `i` to `u`.
    pub fn from_rows(rows: &[u32], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("pattern table needs at least one source".into()));
        }
        if !rows.len().is_multiple_of(k) {
            return Err(Error::InvalidParameter("row length mismatch".into()));
        }
        let n = rows.len() / k;
        let mut ids: HashMap<Box<[i32]>, u32, FoldBuild> = HashMap::default();
        let mut entries = Vec::new();
        let mut of_vertex = Vec::with_capacity(n);
        let mut base = Vec::with_capacity(n);
        let mut buf = vec![0i32; k];
        for (u, row) in rows.chunks_exact(k).enumerate() {
            let d0 = row[0];
            if row.contains(&UNREACHED) {
                return Err(Error::InvalidParameter(format!("vertex {u} is unreachable from a source")));
            }
            for (b, &d) in buf.iter_mut().zip(row) {
                *b = d as i32 - d0 as i32;
            }
            let id = match ids.get(buf.as_slice()) {
                Some(&id) => id,
                None => {
                    let id = (entries.len() / k) as u32;
                    entries.extend_from_slice(&buf);
                    ids.insert(buf.clone().into_boxed_slice(), id);
                    id
                }
            };
            of_vertex.push(id);
            base.push(d0);
        }
        Ok(PatternTable { k, entries, of_vertex, base })
    }

    pub fn num_sources(&self) -> usize {
        self.k
    }

    pub fn num_patterns(&self) -> usize {
        self.entries.len() / self.k
    }

    pub fn num_vertices(&self) -> usize {
        self.of_vertex.len()
    }

    /// Doubled differences of pattern `p`.
    pub fn pattern(&self, p: u32) -> &[i32] {
        let s = p as usize * self.k;
        &self.entries[s..s + self.k]
    }

    /// Pattern of `u` in whole units.
    pub fn pattern_of(&self, u: usize) -> Vec<i32> {
        self.pattern(self.of_vertex[u]).iter().map(|d| d / 2).collect()
    }

    pub fn pattern_id(&self, u: usize) -> u32 {
        self.of_vertex[u]
    }

    pub fn pattern_ids(&self) -> &[u32] {
        &self.of_vertex
    }

    /// Doubled distance from `u` to the first source.
    pub fn base(&self, u: usize) -> u32 {
        self.base[u]
    }

    pub fn bases(&self) -> &[u32] {
        &self.base
    }

    pub fn into_parts(self) -> (usize, Vec<i32>, Vec<u32>, Vec<u32>) {
        (self.k, self.entries, self.of_vertex, self.base)
    }
}

/// Doubled pattern distance `min_i d(v, s_i) + p[i]`, given the doubled
/// distances from `v` to each source. May be negative; `i64::MAX` when no
/// source reaches `v`.
#[inline]
pub fn pattern_distance(pattern: &[i32], to_sources: &[u32]) -> i64 {
    debug_assert_eq!(pattern.len(), to_sources.len());
    let mut best = i64::MAX;
    for (&p, &d) in pattern.iter().zip(to_sources) {
        if d != UNREACHED {
            best = best.min(d as i64 + p as i64);
        }
    }
    best
}

/// Doubled estimate `d(u, s_0) + d(p_u, v)` of the distance from `u` to `v`,
/// from the doubled source distances of both endpoints.
#[inline]
pub fn approx_distance(u_to_sources: &[u32], v_to_sources: &[u32]) -> u32 {
    let mut best = u64::MAX;
    for (&a, &b) in u_to_sources.iter().zip(v_to_sources) {
        if a != UNREACHED && b != UNREACHED {
            best = best.min(a as u64 + b as u64);
        }
    }
    if best == u64::MAX {
        UNREACHED
    } else {
        best as u32
    }
}

/// Bound on the number of distinct patterns over `k` sources pairwise within
/// `delta` of `s_0`: the sum of `C(N, i)` for `i <= 4`, where `N` counts the
/// possible values of the `k - 1` free entries. Saturates at `u64::MAX`.
pub fn sauer_shelah_bound(k: u64, delta: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    let Some(n) = (k - 1).checked_mul(delta.saturating_mul(2).saturating_add(1)) else {
        return u64::MAX;
    };
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=4u128 {
        if i > 0 {
            if (n as u128) < i {
                break;
            }
            binom = binom * (n as u128 - i + 1) / i;
        }
        total += binom;
    }
    u64::try_from(total).unwrap_or(u64::MAX)
}
