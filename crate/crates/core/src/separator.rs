//! Balanced separators made of few cliques whose removal leaves two sides
//! with every cross pair of disks far apart.
//!
//! A cut is a band of width a little over 4: either the ring between two
//! concentric squares centered on a dense square, or a vertical or
//! horizontal slab. Disks in the band are grouped by grid cells of side just
//! under sqrt(2) anchored at the band edge, so each group is a clique whose
//! members lie within distance 1 of the cell center. Among the balanced
//! cuts the one with the fewest groups wins.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{adjacent, GridIndex, Point, PointSet, CELL_SIDE};

#[derive(Debug, Clone)]
pub struct SeparatorConfig {
    /// Width of the separating band. Centers on opposite sides end up more
    /// than this far apart.
    pub band_width: f64,
    /// Side of the grid cells that group band disks into cliques.
    pub cell_side: f64,
    /// Spacing between consecutive candidate cuts of one family.
    pub step: f64,
    /// Target ratio of the dense square's count to the total.
    pub dense_fraction: f64,
    /// Relative precision of the dense square search.
    pub square_precision: f64,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        SeparatorConfig {
            band_width: 4.0 + 1e-6,
            cell_side: CELL_SIDE,
            step: CELL_SIDE / 2.0,
            dense_fraction: 1.0 / 12.0,
            square_precision: 1.0 / 32.0,
        }
    }
}

/// One clique of the separator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SepClique {
    /// Vertex ids, ascending.
    pub members: Vec<u32>,
    /// Smallest member id.
    pub representative: u32,
    /// Every member center is within distance 1 of this point.
    pub stab: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cut {
    /// Side A is strictly inside the square of the given half side.
    Square { center: Point, half_side: f64 },
    /// Side A is left of `x`.
    Vertical { x: f64 },
    /// Side A is below `y`.
    Horizontal { y: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Separator {
    pub cliques: Vec<SepClique>,
    pub side_a: Vec<u32>,
    pub side_b: Vec<u32>,
    /// Disk radius relative to the side of the dense square.
    pub scaled_radius: f64,
    pub dense_square: Square,
    pub cut: Cut,
}

impl Separator {
    pub fn separator_size(&self) -> usize {
        self.cliques.iter().map(|c| c.members.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Square {
    pub center: Point,
    pub side: f64,
}

/// Separator of the whole point set, balancing all vertices.
pub fn well_separated_separator(pts: &PointSet) -> Result<Separator> {
    let ids: Vec<u32> = (0..pts.len() as u32).collect();
    separate(pts, &ids, None, &SeparatorConfig::default())
}

/// Separator of the vertices `ids`. When `counted` is given only vertices
/// with `counted[i]` set (indexed like `ids`) are weighed for balance; each
/// side then holds at most two thirds of them.
pub fn separate(
    pts: &PointSet,
    ids: &[u32],
    counted: Option<&[bool]>,
    cfg: &SeparatorConfig,
) -> Result<Separator> {
    if ids.is_empty() {
        return Err(Error::InvalidParameter("separator of an empty set".into()));
    }
    if let Some(c) = counted {
        if c.len() != ids.len() {
            return Err(Error::InvalidParameter("weight mask length mismatch".into()));
        }
    }
    let points: Vec<Point> = ids.iter().map(|&v| pts.get(v as usize)).collect();
    let weight: Vec<u32> = match counted {
        Some(c) => c.iter().map(|&b| b as u32).collect(),
        None => vec![1; ids.len()],
    };
    let dense = dense_square(&points, &weight, cfg);
    let best = best_cut(&points, &weight, dense.center, cfg);

    let mut side_a = Vec::new();
    let mut side_b = Vec::new();
    let mut band: Vec<((i64, i64), u32)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let f = best.family.value(p, dense.center);
        if f < best.t {
            side_a.push(ids[i]);
        } else if f >= best.t + cfg.band_width {
            side_b.push(ids[i]);
        } else {
            band.push((best.key(p, dense.center, cfg.cell_side), ids[i]));
        }
    }
    side_a.sort_unstable();
    side_b.sort_unstable();
    band.sort_unstable();

    let anchor = best.anchor(dense.center);
    let mut cliques = Vec::new();
    let mut i = 0;
    while i < band.len() {
        let key = band[i].0;
        let mut members = Vec::new();
        while i < band.len() && band[i].0 == key {
            members.push(band[i].1);
            i += 1;
        }
        members.sort_unstable();
        let stab = Point::new(
            anchor.x + (key.0 as f64 + 0.5) * cfg.cell_side,
            anchor.y + (key.1 as f64 + 0.5) * cfg.cell_side,
        );
        cliques.push(SepClique {
            representative: members[0],
            members,
            stab,
        });
    }
    cliques.sort_unstable_by_key(|c| c.representative);

    let cut = match best.family {
        Family::Square => Cut::Square {
            center: dense.center,
            half_side: best.t,
        },
        Family::Vertical => Cut::Vertical { x: best.t },
        Family::Horizontal => Cut::Horizontal { y: best.t },
    };
    Ok(Separator {
        cliques,
        side_a,
        side_b,
        scaled_radius: if dense.side > 0.0 { 1.0 / dense.side } else { f64::INFINITY },
        dense_square: dense,
        cut,
    })
}

/// A square containing at least the dense fraction of the weight, with side
/// within `2 * (1 + precision)` of the smallest such square.
///
/// If a square of side `s` holds `m` points then, for any grid of cell side
/// `g >= s`, some 2x2 block of cells holds them too. So the block test passes
/// for every `g` above the optimum, and bisection between a failing and a
/// passing `g` brackets it.
pub fn dense_square(points: &[Point], weight: &[u32], cfg: &SeparatorConfig) -> Square {
    let total: u64 = weight.iter().map(|&w| w as u64).sum();
    let need = ((total as f64 * cfg.dense_fraction).ceil() as u64).max(1);
    let (lo_pt, hi_pt) = bounds(points);
    let extent = (hi_pt.x - lo_pt.x).max(hi_pt.y - lo_pt.y);
    if total == 0 || extent <= 0.0 {
        let c = Point::new((lo_pt.x + hi_pt.x) / 2.0, (lo_pt.y + hi_pt.y) / 2.0);
        return Square { center: c, side: extent.max(0.0) };
    }
    let floor = extent * 1e-9;
    let mut hi = extent.max(floor);
    let mut best = block_test(points, weight, hi, need, lo_pt).expect("whole extent holds everything");
    let mut lo = hi;
    loop {
        lo /= 2.0;
        if lo < floor {
            lo = 0.0;
            break;
        }
        match block_test(points, weight, lo, need, lo_pt) {
            Some(sq) => {
                hi = lo;
                best = sq;
            }
            None => break,
        }
    }
    while hi - lo > cfg.square_precision * hi && hi > floor {
        let mid = (lo + hi) / 2.0;
        match block_test(points, weight, mid, need, lo_pt) {
            Some(sq) => {
                hi = mid;
                best = sq;
            }
            None => lo = mid,
        }
    }
    best
}

fn bounds(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Heaviest 2x2 block of cells of side `g`; returns the block as a square if
/// it holds at least `need`. Ties go to the smallest block key.
fn block_test(points: &[Point], weight: &[u32], g: f64, need: u64, origin: Point) -> Option<Square> {
    let mut keys: Vec<((i64, i64), u32)> = points
        .iter()
        .zip(weight)
        .filter(|(_, &w)| w > 0)
        .map(|(p, &w)| {
            (
                (((p.x - origin.x) / g).floor() as i64, ((p.y - origin.y) / g).floor() as i64),
                w,
            )
        })
        .collect();
    keys.sort_unstable();
    let mut cells: Vec<((i64, i64), u64)> = Vec::new();
    for (k, w) in keys {
        match cells.last_mut() {
            Some((lk, acc)) if *lk == k => *acc += w as u64,
            _ => cells.push((k, w as u64)),
        }
    }
    let count = |k: (i64, i64)| -> u64 {
        cells
            .binary_search_by(|(ck, _)| ck.cmp(&k))
            .map(|i| cells[i].1)
            .unwrap_or(0)
    };
    let mut best: Option<((i64, i64), u64)> = None;
    for &((cx, cy), _) in &cells {
        // Every block containing this cell, keyed by its lower-left cell.
        for (bx, by) in [(cx - 1, cy - 1), (cx - 1, cy), (cx, cy - 1), (cx, cy)] {
            let w = count((bx, by)) + count((bx + 1, by)) + count((bx, by + 1)) + count((bx + 1, by + 1));
            let better = match best {
                None => true,
                Some((bk, bw)) => w > bw || (w == bw && (bx, by) < bk),
            };
            if better {
                best = Some(((bx, by), w));
            }
        }
    }
    let ((bx, by), w) = best?;
    (w >= need).then(|| Square {
        center: Point::new(origin.x + (bx as f64 + 1.0) * g, origin.y + (by as f64 + 1.0) * g),
        side: 2.0 * g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Family {
    Square,
    Vertical,
    Horizontal,
}

impl Family {
    fn value(self, p: Point, c: Point) -> f64 {
        match self {
            Family::Square => (p.x - c.x).abs().max((p.y - c.y).abs()),
            Family::Vertical => p.x,
            Family::Horizontal => p.y,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Choice {
    family: Family,
    t: f64,
    cliques: usize,
    band: usize,
}

impl Choice {
    fn anchor(&self, c: Point) -> Point {
        match self.family {
            Family::Square => Point::new(c.x - self.t, c.y - self.t),
            Family::Vertical => Point::new(self.t, 0.0),
            Family::Horizontal => Point::new(0.0, self.t),
        }
    }

    fn key(&self, p: Point, c: Point, side: f64) -> (i64, i64) {
        let a = self.anchor(c);
        (((p.x - a.x) / side).floor() as i64, ((p.y - a.y) / side).floor() as i64)
    }
}

fn best_cut(points: &[Point], weight: &[u32], center: Point, cfg: &SeparatorConfig) -> Choice {
    let mut best: Option<Choice> = None;
    for family in [Family::Square, Family::Vertical, Family::Horizontal] {
        if let Some(c) = best_in_family(points, weight, center, family, cfg) {
            let better = match best {
                None => true,
                Some(b) => (c.cliques, c.band) < (b.cliques, b.band),
            };
            if better {
                best = Some(c);
            }
        }
    }
    best.expect("a balanced cut always exists")
}

/// Scans the cuts `t_j = base + j * step` in increasing order. Side A
/// (values below `t_j`) only grows and side B only shrinks, so the balanced
/// cuts form one run, and the run covers the cut whose band holds the
/// weighted median.
fn best_in_family(
    points: &[Point],
    weight: &[u32],
    center: Point,
    family: Family,
    cfg: &SeparatorConfig,
) -> Option<Choice> {
    let n = points.len();
    let mut order: Vec<(f64, u32)> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (family.value(p, center), i as u32))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let total: u64 = weight.iter().map(|&w| w as u64).sum();
    let balanced = |side: u64| 3 * side <= 2 * total;

    let base = match family {
        Family::Square => 0.0,
        _ => order[0].0,
    };
    let w = cfg.band_width;
    let h = cfg.step;
    let t_of = |j: u64| base + j as f64 * h;

    let mut best: Option<Choice> = None;
    let mut a = 0usize; // first index with value >= t
    let mut b = 0usize; // first index with value >= t + w
    let mut in_w = 0u64;
    let mut band_w = 0u64;
    let mut j = 0u64;
    let mut keys: Vec<(i64, i64)> = Vec::new();
    loop {
        let t = t_of(j);
        while b < n && order[b].0 < t + w {
            band_w += weight[order[b].1 as usize] as u64;
            b += 1;
        }
        while a < b && order[a].0 < t {
            let wt = weight[order[a].1 as usize] as u64;
            in_w += wt;
            band_w -= wt;
            a += 1;
        }
        if !balanced(in_w) {
            break;
        }
        let out_w = total - in_w - band_w;
        if a == b {
            if balanced(out_w) {
                return Some(Choice { family, t, cliques: 0, band: 0 });
            }
            if b == n {
                break;
            }
            // Nothing changes until the next value enters the band.
            let jump = ((order[b].0 - w - base) / h).floor();
            let next = if jump.is_finite() && jump > j as f64 { jump as u64 } else { j + 1 };
            j = next.max(j + 1);
            continue;
        }
        if balanced(out_w) {
            let probe = Choice { family, t, cliques: 0, band: b - a };
            keys.clear();
            keys.extend(
                order[a..b]
                    .iter()
                    .map(|&(_, i)| probe.key(points[i as usize], center, cfg.cell_side)),
            );
            keys.sort_unstable();
            keys.dedup();
            let cand = Choice { cliques: keys.len(), ..probe };
            let better = match best {
                None => true,
                Some(bc) => (cand.cliques, cand.band) < (bc.cliques, bc.band),
            };
            if better {
                best = Some(cand);
            }
        }
        if a == n {
            break;
        }
        j += 1;
    }
    best
}

/// For each vertex in `query`, the indices of separator cliques with a
/// member adjacent to it, ascending.
pub fn clique_lists(pts: &PointSet, sep: &Separator, query: &[u32]) -> Vec<Vec<u32>> {
    clique_lists_of(pts, &sep.cliques.iter().map(|c| c.members.as_slice()).collect::<Vec<_>>(), query)
}

/// Like [`clique_lists`] for arbitrary disjoint member lists.
pub fn clique_lists_of(pts: &PointSet, cliques: &[&[u32]], query: &[u32]) -> Vec<Vec<u32>> {
    let mut ids = Vec::new();
    let mut owner = Vec::new();
    for (ci, m) in cliques.iter().enumerate() {
        for &v in m.iter() {
            ids.push(v);
            owner.push(ci as u32);
        }
    }
    let sub = pts.subset(&ids);
    let grid = GridIndex::new(&sub);
    query
        .iter()
        .map(|&y| {
            let p = pts.get(y as usize);
            let mut out: Vec<u32> = grid
                .candidates_near(p)
                .filter(|&i| adjacent(p, sub.get(i as usize)))
                .map(|i| owner[i as usize])
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}
