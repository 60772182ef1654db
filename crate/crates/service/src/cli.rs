//! Command line driver. Exit codes: 0 success, 1 invalid input (including
//! unreadable files), 2 internal failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use exactcsg::classification::ClassifyOptions;
use exactcsg::io::{self, IoError};
use exactcsg::kernel::Axis;
use exactcsg::topology::{check_topology, validate_mesh};
use exactcsg::{boolean, BooleanOp, BooleanOptions, Error, Mesh};

use crate::server::{self, ServeConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "exactcsg", version, about = "Exact Boolean operations on triangle meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Combine two or more closed meshes.
    Op(OpArgs),
    /// Run every pair of meshes in a directory and write a CSV of timings.
    Bench(BenchArgs),
    /// Validate a mesh and print (components, euler, manifold).
    Check(CheckArgs),
    /// Serve interactive sessions over WebSocket at /ws.
    Serve(ServeArgs),
}

#[derive(Debug, clap::Args)]
pub struct OpArgs {
    /// union, intersect or subtract
    pub op: BooleanOp,
    /// Input meshes; subtraction removes all later inputs from the first.
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write the run report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print (components, euler, manifold) of the result.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, clap::Args)]
pub struct PipelineArgs {
    /// Ray direction for classification (X, Y or Z).
    #[arg(long)]
    pub axis: Option<Axis>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reject inputs that are not closed oriented manifolds.
    #[arg(long)]
    pub validate_input: bool,
    /// With --validate-input, also scan inputs for self-intersections.
    #[arg(long)]
    pub self_intersections: bool,
    #[arg(long)]
    pub octree_leaf: Option<usize>,
    #[arg(long)]
    pub octree_depth: Option<usize>,
    /// Classify every patch with the rational fallback.
    #[arg(long)]
    pub force_exact_tier: bool,
    /// Scale each input into a unit box centered at the origin.
    #[arg(long)]
    pub normalize: bool,
}

impl PipelineArgs {
    pub fn options(&self) -> BooleanOptions {
        let mut o = BooleanOptions {
            classify: ClassifyOptions {
                axis: self.axis,
                force_exact_tier: self.force_exact_tier,
                ..Default::default()
            },
            threads: self.threads,
            validate_input: self.validate_input,
            validate_self_intersections: self.self_intersections,
            ..Default::default()
        };
        if let Some(n) = self.octree_leaf {
            o.octree.leaf_capacity = n.max(1);
        }
        if let Some(d) = self.octree_depth {
            o.octree.max_depth = d;
        }
        o
    }
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    pub corpus: PathBuf,
    /// CSV destination.
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for one JSON report per run.
    #[arg(long)]
    pub reports: Option<PathBuf>,
    /// Operators to run (default: all three).
    #[arg(long, value_delimiter = ',')]
    pub ops: Vec<BooleanOp>,
    /// Runs per pair and operator.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    pub mesh: PathBuf,
    /// Also look for self-intersections.
    #[arg(long)]
    pub self_intersections: bool,
}

#[derive(Debug, clap::Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub max_fps: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Boolean(#[from] Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Invalid(_) => EXIT_INVALID,
            CliError::Boolean(Error::InvalidInput(_) | Error::EmptyInput) => EXIT_INVALID,
            CliError::Boolean(_) | CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Op(a) => cmd_op(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Serve(a) => cmd_serve(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn load_input(path: &Path, normalize: bool) -> Result<Mesh, CliError> {
    let m = io::load(path)?;
    Ok(if normalize { io::normalize(&m) } else { m })
}

fn topology_line(triangles: &[[u32; 3]]) -> String {
    let t = check_topology(triangles);
    format!("({}, {}, {})", t.components, t.euler, t.manifold)
}

fn cmd_op(a: &OpArgs) -> Result<i32, CliError> {
    let meshes = a
        .inputs
        .iter()
        .map(|p| load_input(p, a.pipeline.normalize))
        .collect::<Result<Vec<_>, _>>()?;
    let r = boolean(&meshes, a.op, &a.pipeline.options())?;
    io::save(&a.output, &r.mesh(), Some(&r.labels))?;
    if let Some(path) = &a.report {
        fs::write(path, r.report.to_json())
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    }
    for w in &r.report.warnings {
        eprintln!("warning: {w}");
    }
    if a.check {
        println!("{}", topology_line(&r.triangles));
    }
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs) -> Result<i32, CliError> {
    let m = io::load(&a.mesh)?;
    let report = validate_mesh(&m, a.self_intersections);
    println!("{}", topology_line(&m.triangles));
    if report.is_clean() {
        Ok(EXIT_OK)
    } else {
        eprintln!("{}", report.summary());
        Ok(EXIT_INVALID)
    }
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Invalid(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| io::MeshFormat::from_path(p).is_ok())
        .collect();
    files.sort();
    Ok(files)
}

const CSV_HEADER: [&str; 17] = [
    "a", "b", "op", "run", "status", "triangles_in", "triangles_out", "components", "euler",
    "manifold", "rays", "perturbations", "preprocess", "octree", "arrangement", "classification",
    "total",
];

fn cmd_bench(a: &BenchArgs) -> Result<i32, CliError> {
    let files = corpus_files(&a.corpus)?;
    if files.len() < 2 {
        return Err(CliError::Invalid(format!(
            "{} holds fewer than two meshes",
            a.corpus.display()
        )));
    }
    let meshes = files
        .iter()
        .map(|p| load_input(p, a.pipeline.normalize))
        .collect::<Result<Vec<_>, _>>()?;
    let ops = if a.ops.is_empty() { BooleanOp::ALL.to_vec() } else { a.ops.clone() };
    let options = a.pipeline.options();
    if let Some(dir) = &a.reports {
        fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("{}: {e}", dir.display())))?;
    }
    let mut w = csv::Writer::from_path(&a.out)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", a.out.display())))?;
    let csv_err = |e: csv::Error| CliError::Internal(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut failures = 0usize;
    for i in 0..files.len() {
        for j in i + 1..files.len() {
            for &op in &ops {
                for run in 0..a.repeat.max(1) {
                    let pair = [meshes[i].clone(), meshes[j].clone()];
                    let t = Instant::now();
                    let res = boolean(&pair, op, &options);
                    let wall = t.elapsed().as_secs_f64();
                    let mut row = vec![name(&files[i]), name(&files[j]), op.to_string(), run.to_string()];
                    match res {
                        Ok(r) => {
                            let topo = check_topology(&r.triangles);
                            let rep = &r.report;
                            row.extend([
                                "ok".to_string(),
                                rep.counts.triangles_in.to_string(),
                                rep.counts.triangles_out.to_string(),
                                topo.components.to_string(),
                                topo.euler.to_string(),
                                topo.manifold.to_string(),
                                rep.counts.rays.to_string(),
                                rep.counts.perturbations.to_string(),
                                rep.times.preprocess.to_string(),
                                rep.times.octree.to_string(),
                                rep.times.arrangement.to_string(),
                                rep.times.classification.to_string(),
                                rep.times.total.to_string(),
                            ]);
                            if let Some(dir) = &a.reports {
                                let stem = |p: &Path| {
                                    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
                                };
                                let f = dir.join(format!("{}__{}__{op}__{run}.json", stem(&files[i]), stem(&files[j])));
                                fs::write(&f, rep.to_json())
                                    .map_err(|e| CliError::Invalid(format!("{}: {e}", f.display())))?;
                            }
                        }
                        Err(e) => {
                            failures += 1;
                            eprintln!("{} {} {op}: {e}", name(&files[i]), name(&files[j]));
                            row.push(format!("error: {e}"));
                            row.extend(std::iter::repeat_n(String::new(), 11));
                            row.push(wall.to_string());
                        }
                    }
                    w.write_record(&row).map_err(csv_err)?;
                }
            }
        }
    }
    w.flush().map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    let _ = std::io::stdout().flush();
    Ok(if failures == 0 { EXIT_OK } else { EXIT_INTERNAL })
}

fn cmd_serve(a: &ServeArgs) -> Result<i32, CliError> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Internal(format!("runtime: {e}")))?;
    let config = ServeConfig {
        threads: a.threads,
        max_fps: a.max_fps,
    };
    rt.block_on(async {
        let (listener, addr) = server::bind(a.port)
            .await
            .map_err(|e| CliError::Invalid(format!("cannot bind port {}: {e}", a.port)))?;
        println!("listening on ws://{addr}/ws");
        server::serve(listener, config)
            .await
            .map_err(|e| CliError::Internal(format!("server: {e}")))
    })?;
    Ok(EXIT_OK)
}
