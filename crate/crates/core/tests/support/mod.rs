//! Brute-force references built straight from the coordinates, with no
//! grid, no relabelling and nothing shared with the library's own checks.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use udg_core::PointSet;

pub const INF: u32 = u32::MAX;

pub fn touching(pts: &PointSet, u: usize, v: usize) -> bool {
    let (p, q) = (pts.get(u), pts.get(v));
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    dx * dx + dy * dy <= 4.0
}

/// Adjacency lists by testing every pair.
pub fn all_pairs_graph(pts: &PointSet) -> Vec<Vec<u32>> {
    let n = pts.len();
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if touching(pts, u, v) {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
    }
    adj
}

/// Hop distances from `s`, `INF` where unreachable.
pub fn bfs(adj: &[Vec<u32>], s: usize) -> Vec<u32> {
    let mut dist = vec![INF; adj.len()];
    let mut queue = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w as usize] == INF {
                dist[w as usize] = dist[u] + 1;
                queue.push_back(w as usize);
            }
        }
    }
    dist
}

/// Every row of hop distances.
pub fn all_distances(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
    (0..adj.len()).map(|s| bfs(adj, s)).collect()
}

/// Eccentricity of every vertex; panics on a disconnected graph.
pub fn eccentricities(adj: &[Vec<u32>]) -> Vec<u32> {
    (0..adj.len())
        .map(|s| {
            let d = bfs(adj, s);
            assert!(d.iter().all(|&x| x != INF), "graph is disconnected");
            *d.iter().max().unwrap()
        })
        .collect()
}

/// Doubled distances from an extra node tied to each of `members` by a half
/// edge, by Dijkstra over the graph with whole edges of weight 2.
pub fn star_dijkstra(adj: &[Vec<u32>], members: &[u32]) -> Vec<u32> {
    let mut dist = vec![INF; adj.len()];
    let mut heap = BinaryHeap::new();
    for &m in members {
        dist[m as usize] = 1;
        heap.push(Reverse((1u32, m as usize)));
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &w in &adj[u] {
            if d + 2 < dist[w as usize] {
                dist[w as usize] = d + 2;
                heap.push(Reverse((d + 2, w as usize)));
            }
        }
    }
    dist
}

/// Number of ways to choose `i` of `n`, as u128.
pub fn choose(n: u128, i: u128) -> u128 {
    if i > n {
        return 0;
    }
    (0..i).fold(1u128, |acc, j| acc * (n - j) / (j + 1))
}
