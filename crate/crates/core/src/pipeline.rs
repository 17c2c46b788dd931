//! Setup shared by the diameter and oracle pipelines: vertices relabelled
//! along a Z-curve, the grid, explicit adjacency when it is sparse enough,
//! and the clustering.

use std::time::{Duration, Instant};

use crate::clustering::{build_r_clustering, Clustering};
use crate::encoding::clique_seeds;
use crate::error::{Error, Result};
use crate::geometry::{spatial_order, GridIndex, PointSet};
use crate::par::Exec;
use crate::shortest_paths::{batched_rows, check_connected, sssp_batch, Csr, Seeds};
use crate::Mode;

/// Explicit adjacency is built only up to this many arcs per vertex.
const MAX_AVG_DEGREE: usize = 128;

pub(crate) struct Prepared {
    /// Original id of each relabelled vertex.
    pub order: Vec<u32>,
    /// Relabelled id of each original vertex.
    pub rank: Vec<u32>,
    pub pts: PointSet,
    pub grid: GridIndex,
    pub csr: Option<Csr>,
    pub clustering: Clustering,
    pub clustering_time: Duration,
}

impl Prepared {
    pub fn new(original: &PointSet, r: usize) -> Result<Self> {
        if original.is_empty() {
            return Err(Error::InvalidParameter("empty point set".into()));
        }
        let t = Instant::now();
        let order = spatial_order(original);
        let mut rank = vec![0u32; order.len()];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = i as u32;
        }
        let pts = original.permuted(&order);
        let grid = GridIndex::new(&pts);
        if let Err(Error::Disconnected { components, unreached }) = check_connected(&pts, &grid) {
            return Err(Error::Disconnected { components, unreached: order[unreached] as usize });
        }
        let csr = Csr::build(&pts, &grid, MAX_AVG_DEGREE * pts.len());
        let clustering = build_r_clustering(&pts, &grid, r)?;
        Ok(Prepared {
            order,
            rank,
            pts,
            grid,
            csr,
            clustering,
            clustering_time: t.elapsed(),
        })
    }

    pub fn n(&self) -> usize {
        self.pts.len()
    }

    /// Doubled distances from the sources of `cliques` to every vertex,
    /// row-major with one row per vertex.
    pub fn source_rows(&self, cliques: &[u32], mode: Mode, exec: Exec) -> Vec<u32> {
        let seeds: Vec<Seeds> = cliques.iter().map(|&k| clique_seeds(&self.clustering, k, mode)).collect();
        match &self.csr {
            Some(csr) => batched_rows(csr, &seeds, exec),
            None => {
                let n = self.n();
                let k = seeds.len();
                let mut rows = vec![0u32; n * k];
                for (i, f) in sssp_batch(&self.pts, &self.grid, &seeds, exec).into_iter().enumerate() {
                    for (v, &d) in f.doubled().iter().enumerate() {
                        rows[v * k + i] = d;
                    }
                }
                rows
            }
        }
    }
}
