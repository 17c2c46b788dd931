//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridIndex, Point, PointSet};
use crate::shortest_paths::sssp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Uniform in a square.
    Uniform,
    /// Uniform in a handful of disks whose centers are uniform in a square.
    Cluster,
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "cluster" => Ok(Distribution::Cluster),
            other => Err(Error::InvalidParameter(format!("unknown distribution {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    pub distribution: Distribution,
    /// Expected points per unit area.
    pub density: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn uniform(n: usize, seed: u64) -> Self {
        GenConfig {
            n,
            distribution: Distribution::Uniform,
            density: 2.0,
            seed,
        }
    }
}

pub fn generate(cfg: &GenConfig) -> Result<PointSet> {
    if cfg.n == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    if !(cfg.density > 0.0 && cfg.density.is_finite()) {
        return Err(Error::InvalidParameter(format!("density {} must be positive", cfg.density)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let side = (n as f64 / cfg.density).sqrt();
    let points = match cfg.distribution {
        Distribution::Uniform => (0..n)
            .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
            .collect(),
        Distribution::Cluster => {
            let k = (n / 150).max(1);
            let per = n as f64 / k as f64;
            let radius = (per / (std::f64::consts::PI * cfg.density)).sqrt();
            let span = side * 0.8;
            let centers: Vec<Point> = (0..k)
                .map(|_| Point::new(rng.gen::<f64>() * span, rng.gen::<f64>() * span))
                .collect();
            (0..n)
                .map(|_| {
                    let c = centers[rng.gen_range(0..k)];
                    let r = radius * rng.gen::<f64>().sqrt();
                    let a = rng.gen::<f64>() * std::f64::consts::TAU;
                    Point::new(c.x + r * a.cos(), c.y + r * a.sin())
                })
                .collect()
        }
    };
    PointSet::new(points)
}

pub fn is_connected(pts: &PointSet) -> bool {
    if pts.is_empty() {
        return true;
    }
    let grid = GridIndex::new(pts);
    sssp(pts, &grid, 0).map(|f| f.first_unreached().is_none()).unwrap_or(false)
}

/// Draws instances with seeds `seed`, `seed + 1`, ... until one is connected.
/// Returns the instance and the seed that produced it.
pub fn generate_connected(cfg: &GenConfig, max_attempts: usize) -> Result<(PointSet, u64)> {
    for i in 0..max_attempts as u64 {
        let seed = cfg.seed.wrapping_add(i);
        let pts = generate(&GenConfig { seed, ..cfg.clone() })?;
        if is_connected(&pts) {
            return Ok((pts, seed));
        }
    }
    Err(Error::InvalidParameter(format!(
        "no connected instance in {max_attempts} attempts; use a smaller box (higher density)"
    )))
}
