//! Distance oracle with constant query time.
//!
//! Per cluster the oracle keeps, for every vertex, its pattern id and its
//! distance to the first source; per pattern, the pattern distance to every
//! interior vertex and to every source; and for interior pairs the smaller
//! of the inside distance and the estimate through the sources. A query is
//! answered from one of these tables depending on where `v` lives:
//! - `u` and `v` share an interior: the pair table;
//! - `v` is a clique member: the distance from `u` to the clique's source in
//!   the clique's home cluster, plus the clique slack;
//! - otherwise: `d(u, s_0) + d(p_u, v)` in `v`'s cluster.
//!
//! Answers lie in `[d, d + 1]` in [`Mode::Plus1`] and `[d, d + 2]` in
//! [`Mode::Plus2`]. Tables hold 16-bit entries, so graphs with a diameter
//! above 16383 are rejected.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::clustering::pipeline_r;
use crate::encoding::PatternTable;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::kernels::min_plus_into;
use crate::par::Exec;
use crate::pipeline::Prepared;
use crate::shortest_paths::Subgraph;
use crate::Mode;

const MAGIC: &[u8; 4] = b"UDOR";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum Kind {
    Interior = 0,
    Member = 1,
    Representative = 2,
}

/// Where a vertex lives: its interior and position there, or its clique's
/// home cluster and the clique's column in that cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Locator {
    cluster: u32,
    index: u32,
    kind: Kind,
}

/// Tables of one cluster. Distances are doubled.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ClusterTables {
    sources: usize,
    interior: usize,
    patterns: usize,
    /// Pattern id and distance to the first source of each input vertex.
    vertex: Vec<[u32; 2]>,
    /// `patterns x interior`.
    to_interior: Vec<i16>,
    /// `patterns x sources`.
    to_sources: Vec<i16>,
    /// `interior x interior`.
    pairs: Vec<u16>,
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub mode: Mode,
    /// Cluster size; defaults to [`pipeline_r`].
    pub r: Option<usize>,
    pub exec: Exec,
}

impl OracleConfig {
    pub fn new(mode: Mode) -> Self {
        OracleConfig { mode, r: None, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    mode: Mode,
    r: usize,
    /// Indexed by input vertex id, like every per-vertex table.
    locators: Vec<Locator>,
    clusters: Vec<ClusterTables>,
}

impl Oracle {
    pub fn build(pts: &PointSet, cfg: &OracleConfig) -> Result<Oracle> {
        let r = cfg.r.unwrap_or_else(|| pipeline_r(pts.len()));
        let prep = Prepared::new(pts, r)?;
        build_from(&prep, cfg)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.locators.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Table entries held, over all tables.
    pub fn storage_entries(&self) -> usize {
        2 * self.locators.len()
            + self
                .clusters
                .iter()
                .map(|c| 2 * c.vertex.len() + c.to_interior.len() + c.to_sources.len() + c.pairs.len())
                .sum::<usize>()
    }

    /// Approximate hop distance between input vertices `u` and `v`.
    pub fn query(&self, u: usize, v: usize) -> Result<u32> {
        let n = self.locators.len();
        if u >= n {
            return Err(Error::VertexOutOfRange(u));
        }
        if v >= n {
            return Err(Error::VertexOutOfRange(v));
        }
        if u == v {
            return Ok(0);
        }
        let lv = self.locators[v];
        let t = &self.clusters[lv.cluster as usize];
        let doubled = match lv.kind {
            Kind::Interior => {
                let lu = self.locators[u];
                if lu.kind == Kind::Interior && lu.cluster == lv.cluster {
                    t.pairs[lu.index as usize * t.interior + lv.index as usize] as i64
                } else {
                    let [p, base] = t.vertex[u];
                    base as i64 + t.to_interior[p as usize * t.interior + lv.index as usize] as i64
                }
            }
            Kind::Member | Kind::Representative => {
                let [p, base] = t.vertex[u];
                let to_source = base as i64 + t.to_sources[p as usize * t.sources + lv.index as usize] as i64;
                to_source + self.clique_slack(lv.kind)
            }
        };
        Ok((doubled / 2) as u32)
    }

    /// Doubled amount added to the distance to a clique's source to cover
    /// the clique vertex itself.
    fn clique_slack(&self, kind: Kind) -> i64 {
        match (self.mode, kind) {
            (Mode::Plus1, _) => 1,
            (Mode::Plus2, Kind::Representative) => 0,
            (Mode::Plus2, _) => 2,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io { path: path.to_path_buf(), source };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        self.write_to(&mut w)?;
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Oracle> {
        let f = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Oracle::read_from(&mut BufReader::new(f))
    }

    /// Writes the little-endian binary form.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        put_u32(w, VERSION)?;
        put_u64(w, self.locators.len() as u64)?;
        put_u64(w, self.r as u64)?;
        w.write_all(&[match self.mode {
            Mode::Plus1 => 1,
            Mode::Plus2 => 2,
        }])?;
        put_u64(w, self.clusters.len() as u64)?;
        for l in &self.locators {
            put_u32(w, l.cluster)?;
            put_u32(w, l.index)?;
            w.write_all(&[l.kind as u8])?;
        }
        for t in &self.clusters {
            put_u64(w, t.sources as u64)?;
            put_u64(w, t.interior as u64)?;
            put_u64(w, t.patterns as u64)?;
            put_u32s(w, t.vertex.as_flattened())?;
            put_i16s(w, &t.to_interior)?;
            put_i16s(w, &t.to_sources)?;
            put_u16s(w, &t.pairs)?;
        }
        Ok(())
    }

    /// Reads and validates the binary form, so queries on the result cannot
    /// index out of bounds.
    pub fn read_from(r: &mut impl Read) -> Result<Oracle> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = get_u32(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = get_len(r)?;
        let rr = get_len(r)?;
        let mode = match get_u8(r)? {
            1 => Mode::Plus1,
            2 => Mode::Plus2,
            m => return Err(Error::Format(format!("unknown mode {m}"))),
        };
        let num_clusters = get_len(r)?;
        let mut locators = Vec::with_capacity(n);
        for _ in 0..n {
            let cluster = get_u32(r)?;
            let index = get_u32(r)?;
            let kind = match get_u8(r)? {
                0 => Kind::Interior,
                1 => Kind::Member,
                2 => Kind::Representative,
                k => return Err(Error::Format(format!("unknown vertex kind {k}"))),
            };
            locators.push(Locator { cluster, index, kind });
        }
        let mut clusters = Vec::with_capacity(num_clusters.min(n + 1));
        for _ in 0..num_clusters {
            let sources = get_len(r)?;
            let interior = get_len(r)?;
            let patterns = get_len(r)?;
            let vertex: Vec<[u32; 2]> = get_u32s(r, checked_area(n, 2)?)?.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            let to_interior = get_array(r, checked_area(patterns, interior)?)?.into_iter().map(i16::from_le_bytes).collect();
            let to_sources = get_array(r, checked_area(patterns, sources)?)?.into_iter().map(i16::from_le_bytes).collect();
            let pairs = get_array(r, checked_area(interior, interior)?)?.into_iter().map(u16::from_le_bytes).collect();
            if vertex.iter().any(|&[p, _]| p as usize >= patterns) {
                return Err(Error::Format("pattern id out of range".into()));
            }
            clusters.push(ClusterTables { sources, interior, patterns, vertex, to_interior, to_sources, pairs });
        }
        for l in &locators {
            let t = clusters
                .get(l.cluster as usize)
                .ok_or_else(|| Error::Format("cluster id out of range".into()))?;
            let width = if l.kind == Kind::Interior { t.interior } else { t.sources };
            if l.index as usize >= width {
                return Err(Error::Format("table index out of range".into()));
            }
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes".into()));
        }
        Ok(Oracle { mode, r: rr, locators, clusters })
    }
}

fn build_from(prep: &Prepared, cfg: &OracleConfig) -> Result<Oracle> {
    let n = prep.n();
    let c = &prep.clustering;
    // Every clique gets a home: the first cluster listing it, or a cluster
    // of its own when none does.
    let mut work: Vec<(Vec<u32>, Vec<u32>)> =
        c.clusters.iter().map(|x| (x.interior.clone(), x.boundary.clone())).collect();
    let mut home = vec![(u32::MAX, 0u32); c.cliques.len()];
    for (i, (_, boundary)) in work.iter().enumerate() {
        for (j, &q) in boundary.iter().enumerate() {
            if home[q as usize].0 == u32::MAX {
                home[q as usize] = (i as u32, j as u32);
            }
        }
    }
    for q in 0..c.cliques.len() {
        if home[q].0 == u32::MAX {
            home[q] = (work.len() as u32, 0);
            work.push((Vec::new(), vec![q as u32]));
        }
    }

    let mut locators = vec![None; n];
    for (i, (interior, _)) in work.iter().enumerate() {
        for (a, &v) in interior.iter().enumerate() {
            locators[v as usize] = Some(Locator { cluster: i as u32, index: a as u32, kind: Kind::Interior });
        }
    }
    for (q, clique) in c.cliques.iter().enumerate() {
        let (cluster, index) = home[q];
        for &v in &clique.members {
            let kind = if v == clique.representative { Kind::Representative } else { Kind::Member };
            locators[v as usize] = Some(Locator { cluster, index, kind });
        }
    }
    let locators = locators
        .into_iter()
        .enumerate()
        .map(|(v, l)| {
            l.ok_or_else(|| Error::InvalidParameter(format!("clustering leaves vertex {} uncovered", prep.order[v])))
        })
        .collect::<Result<Vec<_>>>()?;

    // Clusters are built one after another; each build is parallel inside.
    let clusters = work
        .iter()
        .map(|(interior, boundary)| cluster_tables(prep, interior, boundary, cfg))
        .collect::<Result<Vec<_>>>()?;

    let locators = prep.rank.iter().map(|&i| locators[i as usize]).collect();
    Ok(Oracle { mode: cfg.mode, r: c.r, locators, clusters })
}

fn cluster_tables(prep: &Prepared, interior: &[u32], boundary: &[u32], cfg: &OracleConfig) -> Result<ClusterTables> {
    let n = prep.n();
    let k = boundary.len();
    let m = interior.len();
    let exec = cfg.exec;

    let (patterns, entries, pattern_of, base, inner, between) = if k > 0 {
        let rows = prep.source_rows(boundary, cfg.mode, exec);
        let inner: Vec<i32> = interior
            .iter()
            .flat_map(|&v| rows[v as usize * k..(v as usize + 1) * k].iter().map(|&d| d as i32))
            .collect();
        // Row j: distances from every source to source j.
        let mut between = vec![0i32; k * k];
        for (j, &q) in boundary.iter().enumerate() {
            let clique = &prep.clustering.cliques[q as usize];
            for i in 0..k {
                between[j * k + i] = if i == j {
                    0
                } else {
                    match cfg.mode {
                        Mode::Plus2 => rows[clique.representative as usize * k + i] as i32,
                        Mode::Plus1 => {
                            clique.members.iter().map(|&x| rows[x as usize * k + i]).min().expect("clique is nonempty")
                                as i32
                                + 1
                        }
                    }
                };
            }
        }
        let table = PatternTable::from_rows(&rows, k)?;
        let patterns = table.num_patterns();
        let (_, entries, pattern_of, base) = table.into_parts();
        (patterns, entries, pattern_of, base, inner, between)
    } else {
        // Only a cluster covering the whole graph has no sources.
        (1, Vec::new(), vec![0; n], vec![0; n], Vec::new(), Vec::new())
    };

    let (to_interior, to_sources) = if k > 0 {
        let per_pattern = exec.map_range(patterns, |p| {
            let pat = &entries[p * k..(p + 1) * k];
            let mut a = Vec::with_capacity(m);
            min_plus_into(pat, &inner, &mut a);
            let mut b = Vec::with_capacity(k);
            min_plus_into(pat, &between, &mut b);
            (a, b)
        });
        let mut ti = Vec::with_capacity(patterns * m);
        let mut ts = Vec::with_capacity(patterns * k);
        for (a, b) in per_pattern {
            ti.extend(narrow(&a)?);
            ts.extend(narrow(&b)?);
        }
        (ti, ts)
    } else {
        (vec![0; m], Vec::new())
    };

    let sub = Subgraph::new(&prep.pts, interior);
    let locals: Vec<u32> = (0..m as u32).collect();
    let pair_rows = exec.map_init(
        &locals,
        || (sub.bfs(), Vec::new(), Vec::new()),
        |(bfs, dist, via), &a| {
            bfs.run_into(&[a], 0, dist);
            via.clear();
            if k > 0 {
                min_plus_into(&inner[a as usize * k..(a as usize + 1) * k], &inner, via);
            } else {
                via.resize(m, i32::MAX);
            }
            dist.iter().zip(via.iter()).map(|(&d, &e)| d.min(e as u32)).collect::<Vec<u32>>()
        },
    );
    let pairs = pair_rows
        .into_iter()
        .flatten()
        .map(|d| u16::try_from(d).map_err(|_| overflow(d as i64)))
        .collect::<Result<Vec<u16>>>()?;

    let vertex = prep.rank.iter().map(|&i| [pattern_of[i as usize], base[i as usize]]).collect();
    Ok(ClusterTables { sources: k, interior: m, patterns, vertex, to_interior, to_sources, pairs })
}

fn overflow(value: i64) -> Error {
    Error::DistanceOverflow { value, limit: i16::MAX as i64 }
}

fn narrow(xs: &[i32]) -> Result<Vec<i16>> {
    xs.iter().map(|&x| i16::try_from(x).map_err(|_| overflow(x as i64))).collect()
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("file is truncated".into())
    } else {
        Error::IoStream(e)
    }
}

fn checked_area(a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b).ok_or_else(|| Error::Format("table size overflows".into()))
}

fn put_u32(w: &mut impl Write, x: u32) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_u64(w: &mut impl Write, x: u64) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_u32s(w: &mut impl Write, xs: &[u32]) -> Result<()> {
    let bytes: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
    Ok(w.write_all(&bytes)?)
}

fn put_i16s(w: &mut impl Write, xs: &[i16]) -> Result<()> {
    let bytes: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
    Ok(w.write_all(&bytes)?)
}

fn put_u16s(w: &mut impl Write, xs: &[u16]) -> Result<()> {
    let bytes: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
    Ok(w.write_all(&bytes)?)
}

fn get_u8(r: &mut impl Read) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(b[0])
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

/// A length field, bounded so a corrupt header cannot request an absurd
/// allocation before the data runs out.
fn get_len(r: &mut impl Read) -> Result<usize> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    let x = u64::from_le_bytes(b);
    if x > u32::MAX as u64 {
        return Err(Error::Format(format!("length {x} is out of range")));
    }
    Ok(x as usize)
}

/// Reads in chunks so a lying length fails at end of file instead of
/// allocating up front.
fn get_array<const W: usize>(r: &mut impl Read, count: usize) -> Result<Vec<[u8; W]>> {
    const CHUNK: usize = 1 << 16;
    let mut out = Vec::with_capacity(count.min(CHUNK));
    let mut buf = vec![0u8; W * CHUNK];
    let mut left = count;
    while left > 0 {
        let take = left.min(CHUNK);
        r.read_exact(&mut buf[..W * take]).map_err(truncated)?;
        out.extend(buf[..W * take].chunks_exact(W).map(|c| <[u8; W]>::try_from(c).unwrap()));
        left -= take;
    }
    Ok(out)
}

fn get_u32s(r: &mut impl Read, count: usize) -> Result<Vec<u32>> {
    Ok(get_array(r, count)?.into_iter().map(u32::from_le_bytes).collect())
}
