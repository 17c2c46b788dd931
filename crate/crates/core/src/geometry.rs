//! Points, the adjacency predicate and a bucketed grid over disk centers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted coordinate magnitude.
pub const MAX_COORD: f64 = 1e9;

/// Default grid cell side. Slightly below sqrt(2) so that two centers in one
/// cell are adjacent even after floating point rounding of the cell index.
pub const CELL_SIDE: f64 = std::f64::consts::SQRT_2 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Unit disks (radius 1) touch or overlap iff their centers are within 2.
#[inline]
pub fn adjacent(p: Point, q: Point) -> bool {
    p.dist2(q) <= 4.0
}

/// Disk centers indexed by vertex id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        for (index, p) in points.iter().enumerate() {
            for value in [p.x, p.y] {
                if !value.is_finite() || value.abs() > MAX_COORD {
                    return Err(Error::BadCoordinate { index, value });
                }
            }
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn get(&self, v: usize) -> Point {
        self.points[v]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        adjacent(self.points[u], self.points[v])
    }

    /// The points with the given ids, in the given order.
    pub fn subset(&self, ids: &[u32]) -> PointSet {
        PointSet {
            points: ids.iter().map(|&v| self.points[v as usize]).collect(),
        }
    }

    /// The same points relabelled so that vertex `i` is old vertex
    /// `order[i]`.
    pub fn permuted(&self, order: &[u32]) -> PointSet {
        self.subset(order)
    }

    /// Parses the instance format: one `x y` pair per line, `#` starts a
    /// comment line, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut coord = |name: &str| -> Result<f64> {
                let tok = fields.next().ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: format!("missing {name} coordinate"),
                })?;
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad {name} coordinate {tok:?}: {e}"),
                })
            };
            let x = coord("x")?;
            let y = coord("y")?;
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "expected exactly two coordinates".into(),
                });
            }
            points.push(Point::new(x, y));
        }
        PointSet::new(points)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        PointSet::parse(&text)
    }

    /// Serializes with shortest round-trip float formatting.
    pub fn to_instance_string(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 24);
        for p in &self.points {
            let _ = writeln!(out, "{:?} {:?}", p.x, p.y);
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_instance_string()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

/// Grid buckets over a point set. Only nonempty cells are stored; they are
/// numbered densely and each keeps the list of nonempty cells that can host
/// neighbors of its points.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_side: f64,
    origin: Point,
    neighbor_radius: i64,
    coords: Vec<(i64, i64)>,
    lookup: HashMap<(i64, i64), u32>,
    cell_start: Vec<u32>,
    members: Vec<u32>,
    point_cell: Vec<u32>,
    near_start: Vec<u32>,
    near: Vec<u32>,
}

impl GridIndex {
    /// Grid with the default cell side, anchored at the origin.
    pub fn new(pts: &PointSet) -> Self {
        Self::build(pts, CELL_SIDE, Point::new(0.0, 0.0))
    }

    pub fn build(pts: &PointSet, cell_side: f64, origin: Point) -> Self {
        assert!(cell_side > 0.0 && cell_side.is_finite(), "cell side must be positive");
        let neighbor_radius = (2.0 / cell_side).ceil() as i64;
        let key = |p: Point| {
            (
                ((p.x - origin.x) / cell_side).floor() as i64,
                ((p.y - origin.y) / cell_side).floor() as i64,
            )
        };

        let mut lookup: HashMap<(i64, i64), u32> = HashMap::new();
        let mut coords = Vec::new();
        let mut point_cell = Vec::with_capacity(pts.len());
        let mut counts: Vec<u32> = Vec::new();
        for &p in pts.points() {
            let k = key(p);
            let c = *lookup.entry(k).or_insert_with(|| {
                coords.push(k);
                counts.push(0);
                (coords.len() - 1) as u32
            });
            counts[c as usize] += 1;
            point_cell.push(c);
        }

        let mut cell_start = Vec::with_capacity(coords.len() + 1);
        let mut acc = 0u32;
        cell_start.push(0);
        for &c in &counts {
            acc += c;
            cell_start.push(acc);
        }
        let mut fill: Vec<u32> = cell_start[..coords.len()].to_vec();
        let mut members = vec![0u32; pts.len()];
        for (v, &c) in point_cell.iter().enumerate() {
            members[fill[c as usize] as usize] = v as u32;
            fill[c as usize] += 1;
        }

        let mut near_start = Vec::with_capacity(coords.len() + 1);
        let mut near = Vec::new();
        near_start.push(0);
        for &(cx, cy) in &coords {
            for dx in -neighbor_radius..=neighbor_radius {
                for dy in -neighbor_radius..=neighbor_radius {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    if let Some(&c) = lookup.get(&(cx + dx, cy + dy)) {
                        near.push(c);
                    }
                }
            }
            near_start.push(near.len() as u32);
        }

        GridIndex {
            cell_side,
            origin,
            neighbor_radius,
            coords,
            lookup,
            cell_start,
            members,
            point_cell,
            near_start,
            near,
        }
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn neighbor_radius(&self) -> i64 {
        self.neighbor_radius
    }

    /// True when any two points sharing a cell are adjacent.
    pub fn cells_are_cliques(&self) -> bool {
        self.cell_side * std::f64::consts::SQRT_2 < 2.0
    }

    pub fn num_cells(&self) -> usize {
        self.coords.len()
    }

    pub fn num_points(&self) -> usize {
        self.point_cell.len()
    }

    /// Grid coordinates of a dense cell index.
    pub fn cell_coords(&self, cell: usize) -> (i64, i64) {
        self.coords[cell]
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.point_cell[v] as usize
    }

    /// Vertices in a cell, ascending by id.
    pub fn cell_members(&self, cell: usize) -> &[u32] {
        &self.members[self.cell_start[cell] as usize..self.cell_start[cell + 1] as usize]
    }

    /// Nonempty cells, other than `cell` itself, that may hold neighbors of
    /// points in `cell`.
    pub fn near_cells(&self, cell: usize) -> &[u32] {
        &self.near[self.near_start[cell] as usize..self.near_start[cell + 1] as usize]
    }

    /// Bucket at given grid coordinates.
    pub fn bucket(&self, key: (i64, i64)) -> Option<&[u32]> {
        self.lookup.get(&key).map(|&c| self.cell_members(c as usize))
    }

    /// Grid coordinates a point would fall into.
    pub fn key_of(&self, p: Point) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell_side).floor() as i64,
            ((p.y - self.origin.y) / self.cell_side).floor() as i64,
        )
    }

    /// Every vertex that could be adjacent to `v`, including `v`.
    pub fn candidate_neighbors(&self, v: usize) -> impl Iterator<Item = u32> + '_ {
        let c = self.cell_of(v);
        std::iter::once(c as u32)
            .chain(self.near_cells(c).iter().copied())
            .flat_map(move |c| self.cell_members(c as usize).iter().copied())
    }

    /// Indexed points near an arbitrary location (within distance 2 of it
    /// could be adjacent).
    pub fn candidates_near(&self, p: Point) -> impl Iterator<Item = u32> + '_ {
        let (cx, cy) = self.key_of(p);
        let r = self.neighbor_radius;
        (-r..=r)
            .flat_map(move |dx| (-r..=r).map(move |dy| (cx + dx, cy + dy)))
            .filter_map(move |k| self.bucket(k))
            .flat_map(|s| s.iter().copied())
    }

    /// Adjacency lists of the whole graph, each sorted ascending.
    pub fn adjacency(&self, pts: &PointSet) -> Vec<Vec<u32>> {
        (0..pts.len())
            .map(|v| {
                let p = pts.get(v);
                let mut out: Vec<u32> = self
                    .candidate_neighbors(v)
                    .filter(|&u| u as usize != v && adjacent(p, pts.get(u as usize)))
                    .collect();
                out.sort_unstable();
                out
            })
            .collect()
    }
}

/// Vertex order along a Z-curve over default grid cells, so that vertices
/// close in the plane get close ids. Ties keep id order.
pub fn spatial_order(pts: &PointSet) -> Vec<u32> {
    let keys: Vec<(i64, i64)> = pts
        .points()
        .iter()
        .map(|p| ((p.x / CELL_SIDE).floor() as i64, (p.y / CELL_SIDE).floor() as i64))
        .collect();
    let min_x = keys.iter().map(|k| k.0).min().unwrap_or(0);
    let min_y = keys.iter().map(|k| k.1).min().unwrap_or(0);
    let mut order: Vec<(u64, u32)> = keys
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| (interleave((x - min_x) as u32) | interleave((y - min_y) as u32) << 1, i as u32))
        .collect();
    order.sort_unstable();
    order.into_iter().map(|(_, i)| i).collect()
}

fn interleave(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | x << 16) & 0x0000_ffff_0000_ffff;
    x = (x | x << 8) & 0x00ff_00ff_00ff_00ff;
    x = (x | x << 4) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | x << 2) & 0x3333_3333_3333_3333;
    x = (x | x << 1) & 0x5555_5555_5555_5555;
    x
}
