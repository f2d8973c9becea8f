//! The `fiedcmg` command-line tool.
//!
//! [`run`] parses arguments and executes one subcommand, writing results to
//! the given output stream (or the `--out` file) and diagnostics to the error
//! stream. Every document is rendered in full before anything is written, so
//! a failing command never leaves partial output behind.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fiedcmg::gcmg::{gcmg_solve, rate_experiment, GcmgConfig, DEFAULT_COARSEST_SIDE};
use fiedcmg::{
    build_hierarchy, build_laplacian, fiedler_oracle, load_graph, solve_on_hierarchy, EdgeList,
    GraphFormat, SmootherConfig, SolverConfig,
};

mod table;

use table::Table;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for bad input, I/O failures and invalid arguments.
pub const EXIT_INPUT: i32 = 1;
/// Exit status when the finest-level smoother did not converge.
pub const EXIT_UNCONVERGED: i32 = 2;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "FIEDCMG_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fiedcmg",
    version,
    about = "Fiedler vectors by cascadic multigrid"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed for coarsening and start vectors.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Smoother stops when consecutive unit iterates satisfy uᵀv > 1 - tol.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Coarsening stops once a level has at most this many vertices.
    #[arg(long, global = true, default_value_t = fiedcmg::DEFAULT_COARSEST_SIZE)]
    pub coarsest_size: usize,
    /// Smoother iteration cap per level.
    #[arg(long, global = true, default_value_t = 1000)]
    pub max_iters: usize,
    /// Re-project iterates onto 1^⊥ every this many steps (0: only at the start).
    #[arg(long, global = true, default_value_t = 0)]
    pub reproject_every: usize,
    /// Print tables as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the main output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            coarsest_size: self.coarsest_size,
            smoother: SmootherConfig {
                tol: self.tol,
                max_iters: self.max_iters,
                reproject_every: self.reproject_every,
            },
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph file (Matrix Market or edge list).
    pub input: PathBuf,
    /// Input format; detected from the extension or header when omitted.
    #[arg(long)]
    pub format: Option<GraphFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate Fiedler vector and algebraic connectivity (JSON).
    Fiedler {
        #[command(flatten)]
        input: InputArgs,
        /// Write the vector as little-endian f64 values.
        #[arg(long)]
        vector: Option<PathBuf>,
        /// Compare against a dense eigensolver (n ≤ 2048).
        #[arg(long)]
        oracle: bool,
    },
    /// Per-level sizes and coarsening rates of the aggregation hierarchy.
    Hierarchy {
        #[command(flatten)]
        input: InputArgs,
        /// Also run the solver and report smoothing iterations per level.
        #[arg(long)]
        solve: bool,
    },
    /// Median split of the Fiedler vector (JSON).
    Bisect {
        #[command(flatten)]
        input: InputArgs,
        /// Write one part label (0 or 1) per line.
        #[arg(long)]
        parts: Option<PathBuf>,
    },
    /// Solve every graph in a directory and print one CSV row per graph and seed.
    Bench {
        dir: PathBuf,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
    },
    /// Geometric cascade on nested square grids with per-level errors.
    Gcmg {
        /// Grid points per side on the finest level.
        #[arg(long, default_value_t = 1025)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        k0: usize,
        /// Total number of levels, or `auto` to coarsen down to --coarsest.
        #[arg(long, default_value = "auto")]
        levels: String,
        /// Coarsest grid side used by `--levels auto`.
        #[arg(long, default_value_t = DEFAULT_COARSEST_SIDE)]
        coarsest: usize,
    },
    /// Observed order of the eigenvalue error in the mesh size.
    GcmgRates {
        #[arg(long, value_delimiter = ',', default_value = "65,129,257")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 8.0)]
        beta: f64,
        #[arg(long, default_value_t = 4)]
        k0: usize,
        /// Common coarsest grid side.
        #[arg(long, default_value_t = DEFAULT_COARSEST_SIDE)]
        coarsest: usize,
    },
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

impl From<fiedcmg::Error> for CliError {
    fn from(e: fiedcmg::Error) -> Self {
        Self::input(e)
    }
}

/// Rendered output of a command plus its exit status.
struct Outcome {
    body: String,
    code: i32,
}

#[derive(Debug, Serialize)]
pub struct LevelJson {
    pub level: usize,
    pub n: usize,
    pub nnz: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct OracleJson {
    pub lambda2: f64,
    pub multiplicity: usize,
    pub angle: f64,
    pub lambda2_abs_error: f64,
}

/// Result document of the `fiedler` subcommand.
#[derive(Debug, Serialize)]
pub struct FiedlerJson {
    pub n: usize,
    pub m: usize,
    pub nnz: usize,
    pub seed: u64,
    pub lambda2: f64,
    pub residual: f64,
    pub converged: bool,
    pub wall_time_s: f64,
    pub setup_time_s: f64,
    pub solve_time_s: f64,
    pub parse_time_s: f64,
    pub levels: Vec<LevelJson>,
    pub vector_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleJson>,
}

#[derive(Debug, Serialize)]
pub struct BisectJson {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub sizes: [usize; 2],
    pub cut: f64,
    pub lambda2: f64,
    pub residual: f64,
    pub converged: bool,
    pub parts_path: Option<String>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    // diagnostics are buffered because the pool needs a Send sink
    let mut diag = Vec::new();
    let outcome = match thread_pool() {
        Ok(pool) => pool.install(|| execute(&cli, &mut diag)),
        Err(e) => Err(e),
    };
    let _ = err.write_all(&diag);
    match outcome {
        Ok(o) => match emit(&cli.global.out, &o.body, out) {
            Ok(()) => o.code,
            Err(e) => {
                let _ = writeln!(err, "error: {}", e.message);
                e.code
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| {
                CliError::input(format!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            })?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(CliError::input)
}

fn emit(path: &Option<PathBuf>, body: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write output: {e}"))),
    }
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Fiedler {
            input,
            vector,
            oracle,
        } => cmd_fiedler(g, input, vector.as_deref(), *oracle),
        Command::Hierarchy { input, solve } => cmd_hierarchy(g, input, *solve),
        Command::Bisect { input, parts } => cmd_bisect(g, input, parts.as_deref()),
        Command::Bench { dir, seeds } => cmd_bench(g, dir, seeds, err),
        Command::Gcmg {
            n,
            beta,
            k0,
            levels,
            coarsest,
        } => cmd_gcmg(g, *n, *beta, *k0, levels, *coarsest),
        Command::GcmgRates {
            sizes,
            beta,
            k0,
            coarsest,
        } => cmd_gcmg_rates(g, sizes, *beta, *k0, *coarsest),
    }
}

fn load(input: &InputArgs) -> Result<(EdgeList, f64), CliError> {
    let start = Instant::now();
    let format = match input.format {
        Some(f) => f,
        None => GraphFormat::detect(&input.input)?,
    };
    let g = load_graph(&input.input, format)?;
    Ok((g, start.elapsed().as_secs_f64()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::input)?;
    s.push('\n');
    Ok(s)
}

/// Solves one loaded graph; shared by `fiedler`, `bisect` and `bench`.
fn solve_graph(
    g: &EdgeList,
    cfg: &SolverConfig,
) -> Result<(fiedcmg::SparseLaplacian, fiedcmg::FiedlerResult), CliError> {
    cfg.validate()?;
    let l = build_laplacian(g);
    if l.n() < 2 {
        return Err(fiedcmg::Error::TooSmall(l.n()).into());
    }
    let start = Instant::now();
    let h = build_hierarchy(&l, cfg.coarsest_size, cfg.seed)?;
    let setup = start.elapsed().as_secs_f64();
    let mut r = solve_on_hierarchy(&h, cfg)?;
    r.setup_time_s = setup;
    r.wall_time_s = setup + r.solve_time_s;
    log::debug!(
        "n={} levels={} setup={:.3}s solve={:.3}s",
        l.n(),
        r.per_level.len(),
        setup,
        r.solve_time_s
    );
    Ok((l, r))
}

fn cmd_fiedler(
    g: &GlobalArgs,
    input: &InputArgs,
    vector: Option<&Path>,
    oracle: bool,
) -> Result<Outcome, CliError> {
    let (graph, parse_time_s) = load(input)?;
    let (l, r) = solve_graph(&graph, &g.solver_config())?;
    let oracle = if oracle {
        let o = fiedler_oracle(&l)?;
        Some(OracleJson {
            lambda2: o.lambda2,
            multiplicity: o.basis.len(),
            angle: o.angle(&r.vector),
            lambda2_abs_error: (r.lambda2 - o.lambda2).abs(),
        })
    } else {
        None
    };
    if let Some(path) = vector {
        let bytes: Vec<u8> = r.vector.iter().flat_map(|v| v.to_le_bytes()).collect();
        fs::write(path, bytes)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    let doc = FiedlerJson {
        n: l.n(),
        m: l.num_edges(),
        nnz: l.nnz(),
        seed: r.seed,
        lambda2: r.lambda2,
        residual: r.residual,
        converged: r.converged(),
        wall_time_s: r.wall_time_s,
        setup_time_s: r.setup_time_s,
        solve_time_s: r.solve_time_s,
        parse_time_s,
        levels: r
            .per_level
            .iter()
            .map(|p| LevelJson {
                level: p.level,
                n: p.n,
                nnz: p.nnz,
                iterations: p.iterations,
                converged: p.converged,
            })
            .collect(),
        vector_path: vector.map(|p| p.display().to_string()),
        oracle,
    };
    Ok(Outcome {
        body: to_json(&doc)?,
        code: if r.converged() {
            EXIT_OK
        } else {
            EXIT_UNCONVERGED
        },
    })
}

fn cmd_hierarchy(g: &GlobalArgs, input: &InputArgs, solve: bool) -> Result<Outcome, CliError> {
    let (graph, _) = load(input)?;
    let cfg = g.solver_config();
    cfg.validate()?;
    let l = build_laplacian(&graph);
    let h = build_hierarchy(&l, cfg.coarsest_size, cfg.seed)?;
    let iterations = if solve {
        let r = solve_on_hierarchy(&h, &cfg)?;
        Some(r.per_level)
    } else {
        None
    };
    let mut header = vec!["level", "n", "nnz", "rate"];
    if iterations.is_some() {
        header.push("iterations");
    }
    let mut t = Table::new(&header);
    for s in h.stats() {
        let mut row = vec![
            s.level.to_string(),
            s.n.to_string(),
            s.nnz.to_string(),
            s.rate
                .map_or_else(|| "-".to_string(), |r| format!("{r:.4}")),
        ];
        if let Some(levels) = &iterations {
            row.push(
                levels
                    .iter()
                    .find(|p| p.level == s.level)
                    .map_or_else(|| "-".to_string(), |p| p.iterations.to_string()),
            );
        }
        t.push(row);
    }
    Ok(Outcome {
        body: t.render(g.csv),
        code: EXIT_OK,
    })
}

fn cmd_bisect(
    g: &GlobalArgs,
    input: &InputArgs,
    parts: Option<&Path>,
) -> Result<Outcome, CliError> {
    let (graph, _) = load(input)?;
    let cfg = g.solver_config();
    cfg.validate()?;
    let l = build_laplacian(&graph);
    let b = fiedcmg::spectral_bisect(&l, &cfg)?;
    if let Some(path) = parts {
        let mut s = String::with_capacity(2 * b.part.len());
        for p in &b.part {
            let _ = writeln!(s, "{p}");
        }
        fs::write(path, s)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    let converged = b.fiedler.converged();
    let doc = BisectJson {
        n: l.n(),
        m: l.num_edges(),
        seed: cfg.seed,
        sizes: b.sizes,
        cut: b.cut,
        lambda2: b.fiedler.lambda2,
        residual: b.fiedler.residual,
        converged,
        parts_path: parts.map(|p| p.display().to_string()),
    };
    Ok(Outcome {
        body: to_json(&doc)?,
        code: if converged { EXIT_OK } else { EXIT_UNCONVERGED },
    })
}

/// CSV header of the `bench` subcommand.
pub const BENCH_HEADER: &str = "name,n,m,seed,time_s,lambda2,residual,converged";

fn cmd_bench(
    g: &GlobalArgs,
    dir: &Path,
    seeds: &[u64],
    err: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::input(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut body = String::from(BENCH_HEADER);
    body.push('\n');
    for path in &files {
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        let input = InputArgs {
            input: path.clone(),
            format: None,
        };
        let graph = match load(&input) {
            Ok((graph, _)) => Some(graph),
            Err(e) => {
                let _ = writeln!(err, "{}: {}", path.display(), e.message);
                None
            }
        };
        for &seed in seeds {
            let cfg = SolverConfig {
                seed,
                ..g.solver_config()
            };
            let row = match &graph {
                None => format!("{name},0,0,{seed},NaN,NaN,NaN,false"),
                Some(graph) => match solve_graph(graph, &cfg) {
                    Ok((l, r)) => format!(
                        "{name},{},{},{seed},{:.6},{:e},{:e},{}",
                        l.n(),
                        l.num_edges(),
                        r.wall_time_s,
                        r.lambda2,
                        r.residual,
                        r.converged()
                    ),
                    Err(e) => {
                        let _ = writeln!(err, "{} (seed {seed}): {}", path.display(), e.message);
                        format!(
                            "{name},{},{},{seed},NaN,NaN,NaN,false",
                            graph.n(),
                            graph.num_edges()
                        )
                    }
                },
            };
            body.push_str(&row);
            body.push('\n');
        }
    }
    Ok(Outcome {
        body,
        code: EXIT_OK,
    })
}

fn cmd_gcmg(
    g: &GlobalArgs,
    n: usize,
    beta: f64,
    k0: usize,
    levels: &str,
    coarsest: usize,
) -> Result<Outcome, CliError> {
    let levels = match levels {
        "auto" => None,
        l => Some(l.parse::<usize>().map_err(|_| {
            CliError::input(format!("--levels expects 'auto' or a count, got '{l}'"))
        })?),
    };
    let cfg = GcmgConfig {
        n_side_finest: n,
        levels,
        beta,
        k0,
        coarsest_side: coarsest,
        seed: g.seed,
    };
    let r = gcmg_solve(&cfg)?;
    let mut t = Table::new(&["i", "N_i", "k_i", "lambda_exact", "err_pre", "err_post"]);
    for row in &r.rows {
        t.push(vec![
            row.level.to_string(),
            row.n_side.to_string(),
            row.k.to_string(),
            format!("{:.6e}", row.lambda_exact),
            format!("{:.4e}", row.err_pre),
            format!("{:.4e}", row.err_post),
        ]);
    }
    let c = &r.coarsest;
    t.push(vec![
        c.level.to_string(),
        c.n_side.to_string(),
        "-".into(),
        format!("{:.6e}", c.lambda_exact),
        "-".into(),
        format!("{:.4e}", c.err),
    ]);
    let mut body = t.render(g.csv);
    if g.csv {
        let _ = writeln!(body, "# total_work,{}", r.total_work);
    } else {
        let _ = writeln!(body, "\ntotal work (sum of k_j n_j): {}", r.total_work);
    }
    Ok(Outcome {
        body,
        code: EXIT_OK,
    })
}

fn cmd_gcmg_rates(
    g: &GlobalArgs,
    sizes: &[usize],
    beta: f64,
    k0: usize,
    coarsest: usize,
) -> Result<Outcome, CliError> {
    let r = rate_experiment(sizes, beta, k0, coarsest, g.seed)?;
    let mut t = Table::new(&["N", "h0", "levels", "error", "work"]);
    for p in &r.points {
        t.push(vec![
            p.n_side.to_string(),
            format!("{:.6e}", p.h0),
            p.levels.to_string(),
            format!("{:.6e}", p.error),
            p.work.to_string(),
        ]);
    }
    let mut body = t.render(g.csv);
    if g.csv {
        let _ = writeln!(body, "# order,{:.4}", r.order);
    } else {
        let _ = writeln!(body, "\nfitted order p: {:.4}", r.order);
    }
    Ok(Outcome {
        body,
        code: EXIT_OK,
    })
}
