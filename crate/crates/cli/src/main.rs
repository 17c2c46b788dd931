//! `udg`: batch front end for the unit-disk graph toolkit.

mod bench;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use udg_core::clustering::{build_r_clustering, check_invariants, pipeline_r, ClusteringConfig};
use udg_core::diameter::{approx_diameter, DiameterConfig};
use udg_core::generate::{generate, generate_connected, Distribution, GenConfig};
use udg_core::oracle::{Oracle, OracleConfig};
use udg_core::separator::well_separated_separator;
use udg_core::shortest_paths::sssp;
use udg_core::verification::{check_no_5_shatter, exact_apsp, exact_diameter, find_shattered_4set, validate_window};
use udg_core::{GridIndex, Mode, PointSet};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "udg", version, about = "Unit-disk graph diameter, distance oracle and friends")]
struct Cli {
    /// Worker threads for the parallel steps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance in the text format.
    Gen(GenArgs),
    /// Hop distances from one vertex.
    Sssp {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        source: usize,
    },
    /// Clique-based balanced separator of an instance.
    Separator { instance: PathBuf },
    /// r-clustering of an instance.
    Cluster {
        instance: PathBuf,
        /// Cluster size (default: n^0.6).
        #[arg(long)]
        r: Option<usize>,
        /// Run the invariant suite; exits nonzero on a violation.
        #[arg(long)]
        check: bool,
    },
    /// Diameter, approximate or exact.
    Diameter {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = DiameterMode::Plus1)]
        mode: DiameterMode,
        /// Cluster size (default: n^0.6).
        #[arg(long)]
        r: Option<usize>,
        /// Print per-cluster pattern counts against their bound.
        #[arg(long)]
        dump_patterns: bool,
    },
    /// Build or query a distance oracle.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Check approximate diameters of a directory of instances against exact ones.
    Verify(VerifyArgs),
    /// Search seeded small instances for a shattered set of 5 vertices.
    VcCheck {
        #[arg(long, default_value_t = 40)]
        max_n: usize,
        /// Number of instances.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also report instances with a shattered set of 4 vertices.
        #[arg(long)]
        find_4: bool,
    },
    /// Time the pipeline stages over a series of sizes; CSV output.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Side of the square the points are drawn in (overrides --density).
    #[arg(long)]
    box_side: Option<f64>,
    /// Expected points per unit area.
    #[arg(long, default_value_t = 2.0)]
    density: f64,
    #[arg(long, value_enum, default_value_t = Model::Uniform)]
    model: Model,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Redraw with seeds seed+1, seed+2, ... until the graph is connected.
    #[arg(long)]
    ensure_connected: bool,
    /// Draws allowed with --ensure-connected.
    #[arg(long, default_value_t = 100)]
    retries: usize,
    /// Output file (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Build an oracle from an instance and write it to a file.
    Build {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Plus1)]
        mode: ModeArg,
        /// Cluster size (default: n^0.6).
        #[arg(long)]
        r: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Answer "u v" lines from a pair file; prints "u v answer" lines.
    Query { oracle: PathBuf, pairs: PathBuf },
}

#[derive(Args)]
struct VerifyArgs {
    /// Ground truth to compare with.
    #[arg(long, value_enum, default_value_t = Against::Exact)]
    against: Against,
    /// Directory of instance files.
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Plus1)]
    mode: ModeArg,
    /// Allowed excess over the exact value (default: the mode's error).
    #[arg(long)]
    slack: Option<u32>,
    #[arg(long)]
    r: Option<usize>,
    /// Random oracle queries per instance to check as well.
    #[arg(long, default_value_t = 0)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Instance sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Plus1)]
    pub mode: ModeArg,
    /// Cluster size (default: n^0.6).
    #[arg(long)]
    pub r: Option<usize>,
    /// Largest size also timed with the exact diameter.
    #[arg(long, default_value_t = 4000)]
    pub brute_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Uniform,
    Cluster,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiameterMode {
    Plus1,
    Plus2,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Plus1,
    Plus2,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plus1 => Mode::Plus1,
            ModeArg::Plus2 => Mode::Plus2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Against {
    Exact,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 || !udg_core::par::set_threads(t) {
            eprintln!("warning: --threads {t} ignored");
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>().and_then(|j| j.io_error_kind()) == Some(io::ErrorKind::BrokenPipe)
    })
}

/// Runs the command; `Ok(false)` means a check failed.
fn run(cli: &Cli) -> Result<bool> {
    let json = cli.json;
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, json),
        Command::Sssp { instance, source } => cmd_sssp(instance, *source, json),
        Command::Separator { instance } => {
            let pts = read(instance)?;
            let sep = well_separated_separator(&pts)?;
            let cliques: Vec<Value> = sep
                .cliques
                .iter()
                .map(|c| json!({"members": c.members, "representative": c.representative, "stab": [c.stab.x, c.stab.y]}))
                .collect();
            emit(&json!({"schema": SCHEMA, "cliques": cliques, "sideA": sep.side_a, "sideB": sep.side_b}))?;
            Ok(true)
        }
        Command::Cluster { instance, r, check } => cmd_cluster(instance, *r, *check),
        Command::Diameter { instance, mode, r, dump_patterns } => cmd_diameter(instance, *mode, *r, *dump_patterns, json),
        Command::Oracle(OracleCommand::Build { instance, mode, r, output }) => {
            let pts = read(instance)?;
            let t = Instant::now();
            let o = Oracle::build(&pts, &OracleConfig { r: *r, ..OracleConfig::new((*mode).into()) })?;
            let build_ms = t.elapsed().as_secs_f64() * 1e3;
            o.save(output)?;
            let summary = json!({
                "schema": SCHEMA, "n": o.num_vertices(), "r": o.r(), "mode": o.mode(),
                "clusters": o.num_clusters(), "storage_entries": o.storage_entries(), "build_ms": build_ms,
            });
            if json {
                emit(&summary)?;
            } else {
                eprintln!(
                    "oracle: n={} r={} mode={} clusters={} entries={} ({build_ms:.1} ms)",
                    o.num_vertices(),
                    o.r(),
                    o.mode(),
                    o.num_clusters(),
                    o.storage_entries()
                );
            }
            Ok(true)
        }
        Command::Oracle(OracleCommand::Query { oracle, pairs }) => cmd_query(oracle, pairs, json),
        Command::Verify(a) => cmd_verify(a, json),
        Command::VcCheck { max_n, seeds, seed, find_4 } => cmd_vc_check(*max_n, *seeds, *seed, *find_4, json),
        Command::Bench(a) => bench::run(a, json),
    }
}

fn read(path: &Path) -> Result<PointSet> {
    Ok(PointSet::read(path)?)
}

fn emit(v: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_gen(a: &GenArgs, json: bool) -> Result<bool> {
    let density = match a.box_side {
        Some(side) if side > 0.0 && side.is_finite() => a.n as f64 / (side * side),
        Some(side) => bail!("box side {side} must be positive"),
        None => a.density,
    };
    let distribution = match a.model {
        Model::Uniform => Distribution::Uniform,
        Model::Cluster => Distribution::Cluster,
    };
    let cfg = GenConfig { n: a.n, distribution, density, seed: a.seed };
    let (pts, seed) = if a.ensure_connected {
        generate_connected(&cfg, a.retries)?
    } else {
        (generate(&cfg)?, a.seed)
    };
    match &a.output {
        Some(path) => pts.write(path)?,
        None => io::stdout().lock().write_all(pts.to_instance_string().as_bytes())?,
    }
    if json {
        let meta = json!({"schema": SCHEMA, "n": pts.len(), "seed": seed, "density": density});
        if a.output.is_some() {
            emit(&meta)?;
        } else {
            eprintln!("{meta}");
        }
    }
    Ok(true)
}

fn cmd_sssp(instance: &Path, source: usize, json: bool) -> Result<bool> {
    let pts = read(instance)?;
    let grid = GridIndex::new(&pts);
    let field = sssp(&pts, &grid, source)?;
    if json {
        let d: Vec<Value> = (0..field.len())
            .map(|v| {
                let h = field.get(v);
                if h.is_finite() {
                    json!(h.as_f64())
                } else {
                    Value::Null
                }
            })
            .collect();
        emit(&json!({"schema": SCHEMA, "source": source, "distances": d}))?;
    } else {
        let mut out = BufWriter::new(io::stdout().lock());
        for v in 0..field.len() {
            writeln!(out, "{v} {}", field.get(v))?;
        }
        out.flush()?;
    }
    Ok(true)
}

fn cmd_cluster(instance: &Path, r: Option<usize>, check: bool) -> Result<bool> {
    let pts = read(instance)?;
    let grid = GridIndex::new(&pts);
    let r = r.unwrap_or_else(|| pipeline_r(pts.len()));
    let c = build_r_clustering(&pts, &grid, r)?;
    let clusters: Vec<Value> =
        c.clusters.iter().map(|x| json!({"interior": x.interior, "boundary_cliques": x.boundary})).collect();
    let cliques: Vec<Value> =
        c.cliques.iter().map(|q| json!({"members": q.members, "representative": q.representative})).collect();
    let mut out = json!({"schema": SCHEMA, "r": r, "clusters": clusters, "cliques": cliques});
    let mut ok = true;
    if check {
        let violations = check_invariants(&pts, &grid, &c, &ClusteringConfig::new(r));
        ok = violations.is_empty();
        out["violations"] = json!(violations);
    }
    emit(&out)?;
    Ok(ok)
}

fn cmd_diameter(instance: &Path, mode: DiameterMode, r: Option<usize>, dump: bool, json: bool) -> Result<bool> {
    let pts = read(instance)?;
    let t = Instant::now();
    let mode = match mode {
        DiameterMode::Exact => {
            let d = exact_diameter(&pts)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            if json {
                emit(&json!({"schema": SCHEMA, "diameter": d, "mode": "exact", "n": pts.len(), "timings": {"total_ms": ms}}))?;
            } else {
                println!("{d}");
            }
            return Ok(true);
        }
        DiameterMode::Plus1 => Mode::Plus1,
        DiameterMode::Plus2 => Mode::Plus2,
    };
    let res = approx_diameter(&pts, &DiameterConfig { r, ..DiameterConfig::new(mode) })?;
    let total_ms = t.elapsed().as_secs_f64() * 1e3;
    let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
    if json {
        let mut out = json!({
            "schema": SCHEMA, "diameter": res.estimate, "mode": res.mode, "r": res.r, "n": pts.len(),
            "witness": res.witness, "clusters": res.clusters, "cliques": res.cliques, "searches": res.searches,
            "timings": {
                "clustering_ms": ms(res.times.clustering), "fields_ms": ms(res.times.fields),
                "patterns_ms": ms(res.times.patterns), "farthest_ms": ms(res.times.farthest),
                "interior_ms": ms(res.times.interior), "total_ms": total_ms,
            },
        });
        if dump {
            out["patterns"] = json!(res.patterns);
        }
        emit(&out)?;
    } else {
        println!("{}", res.estimate);
        if dump {
            for p in &res.patterns {
                println!(
                    "cluster {} sources {} patterns {} delta {} bound {}",
                    p.cluster, p.sources, p.patterns, p.delta, p.bound
                );
            }
        }
    }
    Ok(true)
}

fn cmd_query(oracle: &Path, pairs: &Path, json: bool) -> Result<bool> {
    let o = Oracle::load(oracle)?;
    let text = fs::read_to_string(pairs).with_context(|| format!("reading {}", pairs.display()))?;
    let mut answers = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(u)), Some(Ok(v)), None) = (it.next(), it.next(), it.next()) else {
            bail!("{}:{}: expected two vertex ids", pairs.display(), i + 1);
        };
        answers.push((u, v, o.query(u, v)?));
    }
    if json {
        let rows: Vec<Value> = answers.iter().map(|&(u, v, a)| json!({"u": u, "v": v, "answer": a})).collect();
        emit(&json!({"schema": SCHEMA, "mode": o.mode(), "answers": rows}))?;
    } else {
        let mut out = BufWriter::new(io::stdout().lock());
        for (u, v, a) in answers {
            writeln!(out, "{u} {v} {a}")?;
        }
        out.flush()?;
    }
    Ok(true)
}

fn cmd_verify(a: &VerifyArgs, json: bool) -> Result<bool> {
    let Against::Exact = a.against;
    let mode: Mode = a.mode.into();
    let slack = a.slack.unwrap_or(mode.additive_error());
    let mut files: Vec<PathBuf> = fs::read_dir(&a.instances)
        .with_context(|| format!("reading {}", a.instances.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    files.retain(|p| p.is_file());
    files.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for path in &files {
        let pts = read(path)?;
        let exact = exact_diameter(&pts)?;
        let est = approx_diameter(&pts, &DiameterConfig { r: a.r, ..DiameterConfig::new(mode) })?.estimate;
        let mut ok = exact <= est && est <= exact + slack;
        let mut query_violations = 0;
        if a.queries > 0 {
            let o = Oracle::build(&pts, &OracleConfig { r: a.r, ..OracleConfig::new(mode) })?;
            let apsp = exact_apsp(&pts)?;
            let n = pts.len();
            let mut answers = Vec::with_capacity(a.queries);
            for _ in 0..a.queries {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                answers.push((u as u32, v as u32, o.query(u, v)?));
            }
            let report = validate_window(&apsp, &answers, slack);
            query_violations = report.violations.len();
            ok &= report.ok();
        }
        all_ok &= ok;
        if !json {
            println!(
                "{} n={} exact={exact} estimate={est}{} {}",
                path.display(),
                pts.len(),
                if a.queries > 0 { format!(" query_violations={query_violations}") } else { String::new() },
                if ok { "ok" } else { "VIOLATION" }
            );
        }
        rows.push(json!({
            "instance": path.display().to_string(), "n": pts.len(), "exact": exact, "estimate": est,
            "query_violations": query_violations, "ok": ok,
        }));
    }
    if json {
        emit(&json!({"schema": SCHEMA, "mode": mode, "slack": slack, "instances": rows, "ok": all_ok}))?;
    }
    Ok(all_ok)
}

fn cmd_vc_check(max_n: usize, seeds: u64, first: u64, find_4: bool, json: bool) -> Result<bool> {
    if max_n < 5 {
        bail!("--max-n must be at least 5");
    }
    let mut rows = Vec::new();
    let mut all_ok = true;
    for seed in first..first + seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(10.min(max_n)..=max_n);
        let density = rng.gen_range(0.4..3.0);
        let pts = generate(&GenConfig { n, density, distribution: Distribution::Uniform, seed })?;
        let five = check_no_5_shatter(&pts)?;
        let four = if find_4 { find_shattered_4set(&pts)?.map(|w| w.subset) } else { None };
        all_ok &= five.is_none();
        if !json {
            println!(
                "seed {seed} n {n}: {}{}",
                match &five {
                    None => "no shattered 5-set".to_string(),
                    Some(w) => format!("SHATTERED 5-set {:?}", w.subset),
                },
                four.as_ref().map(|s| format!(", shattered 4-set {s:?}")).unwrap_or_default()
            );
        }
        rows.push(json!({"seed": seed, "n": n, "density": density, "shattered5": five, "shattered4": four}));
    }
    if json {
        emit(&json!({"schema": SCHEMA, "instances": rows, "ok": all_ok}))?;
    }
    Ok(all_ok)
}
