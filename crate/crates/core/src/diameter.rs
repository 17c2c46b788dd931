//! Additive-error diameter via per-vertex eccentricity estimates.
//!
//! For each vertex the estimate is the largest of
//! - per cluster, the farthest interior vertex as seen through the cluster's
//!   patterns (and, for the cluster's own interior, also through paths
//!   inside the interior);
//! - over all cliques, the distance to the clique's source plus the slack
//!   that covers every member.
//!
//! Clusters are handled one at a time, so only the distance rows of the
//! current cluster's sources are resident. Rows are recomputed for every
//! cluster that needs them.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::clustering::{pipeline_r, Cluster};
use crate::encoding::{sauer_shelah_bound, PatternTable};
use crate::error::Result;
use crate::geometry::PointSet;
use crate::kernels::max_min_plus;
use crate::par::Exec;
use crate::pipeline::Prepared;
use crate::shortest_paths::{Subgraph, UNREACHED};
use crate::Mode;

#[derive(Debug, Clone)]
pub struct DiameterConfig {
    pub mode: Mode,
    /// Cluster size; defaults to [`pipeline_r`].
    pub r: Option<usize>,
    pub exec: Exec,
}

impl DiameterConfig {
    pub fn new(mode: Mode) -> Self {
        DiameterConfig {
            mode,
            r: None,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StageTimes {
    pub clustering: Duration,
    pub fields: Duration,
    pub patterns: Duration,
    pub farthest: Duration,
    pub interior: Duration,
}

/// Pattern count of one cluster against its cardinality bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterPatterns {
    pub cluster: usize,
    pub sources: usize,
    pub patterns: usize,
    /// Largest distance from a source to the first source, rounded up.
    pub delta: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiameterResult {
    pub estimate: u32,
    pub mode: Mode,
    pub r: usize,
    /// A vertex whose eccentricity estimate equals the result.
    pub witness: usize,
    /// Eccentricity estimate of each input vertex.
    #[serde(skip)]
    pub eccentricities: Vec<u32>,
    pub clusters: usize,
    pub cliques: usize,
    pub max_patterns: usize,
    #[serde(skip)]
    pub patterns: Vec<ClusterPatterns>,
    /// Source distance fields computed, counting repeats.
    pub searches: usize,
    #[serde(skip)]
    pub times: StageTimes,
}

/// Estimates the diameter of a connected unit-disk graph. The result lies in
/// `[D, D + 1]` in [`Mode::Plus1`] and `[D, D + 2]` in [`Mode::Plus2`].
pub fn approx_diameter(pts: &PointSet, cfg: &DiameterConfig) -> Result<DiameterResult> {
    let r = cfg.r.unwrap_or_else(|| pipeline_r(pts.len()));
    let prep = Prepared::new(pts, r)?;
    run(&prep, cfg)
}

/// Sources fetched per batch for cliques outside every cluster pass.
const SPARE_BATCH: usize = 256;

fn run(prep: &Prepared, cfg: &DiameterConfig) -> Result<DiameterResult> {
    let n = prep.n();
    let clustering = &prep.clustering;
    let mode = cfg.mode;
    let slack = match mode {
        Mode::Plus2 => 2,
        Mode::Plus1 => 1,
    };
    let mut ecc = vec![0u32; n];
    let mut times = StageTimes {
        clustering: prep.clustering_time,
        ..StageTimes::default()
    };
    let mut searches = 0usize;
    let mut patterns = Vec::new();
    let mut applied = vec![false; clustering.cliques.len()];

    // Farthest clique member, through each clique's source.
    let apply_cliques = |ecc: &mut [u32], rows: &[u32], cols: &[u32], applied: &mut [bool]| {
        let k = cols.len();
        let fresh: Vec<usize> = (0..k).filter(|&i| !applied[cols[i] as usize]).collect();
        if fresh.is_empty() {
            return;
        }
        for (e, row) in ecc.iter_mut().zip(rows.chunks_exact(k)) {
            for &i in &fresh {
                *e = (*e).max(row[i] + slack);
            }
        }
        for &i in &fresh {
            applied[cols[i] as usize] = true;
        }
    };

    for (id, cluster) in clustering.clusters.iter().enumerate() {
        if cluster.interior.is_empty() {
            continue;
        }
        let t = Instant::now();
        let sources = &cluster.boundary;
        let rows = prep.source_rows(sources, mode, cfg.exec);
        searches += sources.len();
        apply_cliques(&mut ecc, &rows, sources, &mut applied);
        times.fields += t.elapsed();
        if let Some(stats) = cluster_pass(prep, cluster, mode, &rows, &mut ecc, cfg.exec, &mut times)? {
            patterns.push(ClusterPatterns { cluster: id, ..stats });
        }
    }

    let t = Instant::now();
    let rest: Vec<u32> = (0..clustering.cliques.len() as u32).filter(|&k| !applied[k as usize]).collect();
    for chunk in rest.chunks(SPARE_BATCH) {
        let rows = prep.source_rows(chunk, mode, cfg.exec);
        searches += chunk.len();
        apply_cliques(&mut ecc, &rows, chunk, &mut applied);
    }
    times.fields += t.elapsed();

    let (witness, &best) = ecc
        .iter()
        .enumerate()
        .max_by_key(|&(i, &e)| (e, std::cmp::Reverse(prep.order[i])))
        .expect("nonempty");
    let mut eccentricities = vec![0u32; n];
    for (i, &e) in ecc.iter().enumerate() {
        eccentricities[prep.order[i] as usize] = e / 2;
    }
    Ok(DiameterResult {
        estimate: best / 2,
        mode,
        r: clustering.r,
        witness: prep.order[witness] as usize,
        eccentricities,
        clusters: clustering.clusters.len(),
        cliques: clustering.cliques.len(),
        max_patterns: patterns.iter().map(|p| p.patterns).max().unwrap_or(0),
        patterns,
        searches,
        times,
    })
}

/// Raises `ecc` with the farthest-interior estimates of one cluster, given
/// the row-major distances from its sources. Returns the cluster's pattern
/// statistics when it has sources.
fn cluster_pass(
    prep: &Prepared,
    cluster: &Cluster,
    mode: Mode,
    rows: &[u32],
    ecc: &mut [u32],
    exec: Exec,
    times: &mut StageTimes,
) -> Result<Option<ClusterPatterns>> {
    let interior = &cluster.interior;
    let k = cluster.boundary.len();
    let m = interior.len();
    // Source distances of the interior vertices.
    let mut inner = Vec::with_capacity(m * k);
    for &v in interior {
        inner.extend(rows[v as usize * k..(v as usize + 1) * k].iter().map(|&d| d as i32));
    }

    let mut stats = None;
    if k > 0 {
        let t = Instant::now();
        let table = PatternTable::from_rows(rows, k)?;
        let delta = first_source_spread(prep, cluster.boundary[0], mode, rows, k).div_ceil(2) as u64;
        stats = Some(ClusterPatterns {
            cluster: 0,
            sources: k,
            patterns: table.num_patterns(),
            delta,
            bound: sauer_shelah_bound(k as u64, delta),
        });
        times.patterns += t.elapsed();

        let t = Instant::now();
        let far: Vec<i32> = exec.map_range(table.num_patterns(), |p| max_min_plus(table.pattern(p as u32), &inner, None));
        let mut inside = vec![false; ecc.len()];
        for &v in interior {
            inside[v as usize] = true;
        }
        for (u, e) in ecc.iter_mut().enumerate() {
            if !inside[u] {
                let d = table.base(u) as i64 + far[table.pattern_id(u) as usize] as i64;
                if d > *e as i64 {
                    *e = d as u32;
                }
            }
        }
        times.farthest += t.elapsed();
    }

    let t = Instant::now();
    let sub = Subgraph::new(&prep.pts, interior);
    let locals: Vec<u32> = (0..m as u32).collect();
    let est: Vec<i32> = exec.map_init(
        &locals,
        || (sub.bfs(), Vec::new(), Vec::new()),
        |(bfs, dist, cap), &a| {
            bfs.run_into(&[a], 0, dist);
            cap.clear();
            cap.extend(dist.iter().map(|&d| if d == UNREACHED { i32::MAX } else { d as i32 }));
            let own = &inner[a as usize * k..(a as usize + 1) * k];
            max_min_plus(own, &inner, Some(cap))
        },
    );
    for (&v, e) in interior.iter().zip(est) {
        ecc[v as usize] = ecc[v as usize].max(e as u32);
    }
    times.interior += t.elapsed();
    Ok(stats)
}

/// Doubled distance from the farthest source to the first source `first`.
fn first_source_spread(prep: &Prepared, first: u32, mode: Mode, rows: &[u32], k: usize) -> u32 {
    let clique = &prep.clustering.cliques[first as usize];
    let to_first = |i: usize| match mode {
        Mode::Plus2 => rows[clique.representative as usize * k + i],
        Mode::Plus1 => clique.members.iter().map(|&x| rows[x as usize * k + i]).min().expect("clique is nonempty") + 1,
    };
    (1..k).map(to_first).max().unwrap_or(0)
}
