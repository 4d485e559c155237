//! Command-line front end: load a graph, build one or more spreading
//! operators, and write centrality profiles, sweep profiles, partitions, and
//! certification reports — plus time-evolution traces and numerical
//! verification of the decay bounds.
//!
//! Exit codes: 0 all requested checks passed; 1 a verification check failed;
//! 2 input/output or configuration problem; 3 a solver did not converge or
//! produced inconsistent numbers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gendyn::dynamics::{
    self, mixing_bound_check, retention_check, DynamicsError, MixingReport, RetentionReport,
    StateVector,
};
use gendyn::fmt::f64_repr;
use gendyn::graph::{self, Graph, GraphError, LoadOptions, VertexSet};
use gendyn::operators::{
    build_from_config, OperatorConfig, OperatorError, OperatorSpec, SpecialCaseOptions,
};
use gendyn::partition::{certify, PartitionError};
use gendyn::spectra::{self, SpectraError};

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gendyn",
    version,
    about = "Spreading dynamics on networks: operators, spectra, partitions, and their certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: centrality, sweep profile, partition, and certification
    /// report per operator.
    Analyze(AnalyzeArgs),
    /// Evolve a state vector and print the trajectory as CSV.
    Evolve(EvolveArgs),
    /// Verify the retention and mixing bounds numerically; print JSON.
    Verify(VerifyArgs),
    /// List the external benchmark datasets with their sources.
    Fetch,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge list: `u v [weight]` per line, `#` comments allowed.
    #[arg(long)]
    input: PathBuf,
    /// Optional `vertex group` ground-truth labels, written into partition
    /// files.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// JSON array of operator configurations.
    #[arg(long)]
    ops: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Relative residual target for the eigensolvers.
    #[arg(long, default_value_t = spectra::DEFAULT_TOL)]
    tol: f64,
    /// Iteration cap for the eigensolvers (default: 10·n + 1000).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Number of operators analyzed concurrently (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Restrict the analysis to the largest connected component.
    #[arg(long)]
    giant_component: bool,
    /// Run the exhaustive conductance oracle when the graph has at most this
    /// many vertices.
    #[arg(long, default_value_t = 12)]
    oracle_max_n: usize,
    /// Raise dominant-eigenvector entries below this floor instead of
    /// rejecting them when building the replicator.
    #[arg(long)]
    replicator_clamp: Option<f64>,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// One operator configuration: inline JSON (`{...}`) or a path to a JSON
    /// file.
    #[arg(long)]
    op: String,
    /// Initial state: `delta:VERTEX` or a path to a `vertex value` file
    /// (missing vertices start at 0).
    #[arg(long)]
    theta0: String,
    /// Total evolution time.
    #[arg(long)]
    t: f64,
    /// Number of equally spaced samples after t = 0.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long)]
    giant_component: bool,
    #[arg(long)]
    replicator_clamp: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// One operator configuration: inline JSON (`{...}`) or a path to a JSON
    /// file.
    #[arg(long)]
    op: String,
    /// Vertex set for the retention check, one vertex per line.
    #[arg(long)]
    set: PathBuf,
    /// Comma-separated time grid for the retention check.
    #[arg(long, default_value = "0,0.5,1,1.5,2,2.5,3,3.5,4,4.5,5,5.5,6,6.5,7,7.5,8,8.5,9,9.5,10")]
    grid: String,
    /// Vertex pair `U,V` for the mixing check; may be given repeatedly.
    #[arg(long = "pair")]
    pairs: Vec<String>,
    /// Comma-separated times for the mixing checks.
    #[arg(long, default_value = "1,5,20")]
    mix_times: String,
    #[arg(long)]
    giant_component: bool,
    #[arg(long)]
    replicator_clamp: Option<f64>,
}

/// Everything one `analyze` run needs, resolved from the command line.
struct RunConfig {
    graph: Graph,
    labels: HashMap<String, String>,
    ops: Vec<OperatorConfig>,
    names: Vec<String>,
    out: PathBuf,
    tol: f64,
    max_iter: usize,
    oracle_max_n: usize,
    special: SpecialCaseOptions,
    ops_dir: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Failure {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Failure {
        Failure { code: EXIT_SOLVER, message: e.to_string() }
    }
}

impl From<OperatorError> for Failure {
    fn from(e: OperatorError) -> Failure {
        let code = match &e {
            OperatorError::Spectra(_) => EXIT_SOLVER,
            _ => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Failure {
        let code = match &e {
            PartitionError::BoundViolated { .. } => EXIT_SOLVER,
            _ => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Failure {
        let code = match &e {
            DynamicsError::Numeric { .. } => EXIT_SOLVER,
            DynamicsError::Partition(PartitionError::BoundViolated { .. }) => EXIT_SOLVER,
            _ => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Evolve(args) => run_evolve(args),
        Command::Verify(args) => run_verify(args),
        Command::Fetch => run_fetch(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_graph(path: &Path, giant: bool) -> Result<Graph, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let g = graph::load_edge_list(std::io::BufReader::new(file), LoadOptions::default())?;
    if giant {
        Ok(graph::giant_component(&g)?)
    } else {
        Ok(g)
    }
}

/// Parse `vertex group` lines; vertices not present in the graph are ignored
/// so a full-dataset label file still works after component extraction.
fn load_label_map(path: &Path) -> Result<HashMap<String, String>, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(Failure::io(format!(
                "{}: line {}: expected `vertex group`, found {} tokens",
                path.display(),
                lineno + 1,
                tokens.len()
            )));
        }
        map.insert(tokens[0].to_string(), tokens[1].to_string());
    }
    Ok(map)
}

/// Inline JSON if the argument looks like an object, otherwise a file path.
fn parse_op_arg(arg: &str) -> Result<OperatorConfig, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        Ok(serde_json::from_str(trimmed)?)
    } else {
        let text = fs::read_to_string(arg)
            .map_err(|e| Failure::io(format!("{arg}: {e}")))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn parse_float_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Failure::io(format!("unparsable number {tok:?} in list")))
        })
        .collect()
}

fn vertex_index(g: &Graph, label: &str) -> Result<usize, Failure> {
    g.index_of(label)
        .ok_or_else(|| Failure::io(format!("unknown vertex {label:?}")))
}

/// Unique output name per operator: the kind, with `_2`, `_3`, … appended to
/// repeats so files never collide.
fn assign_names(ops: &[OperatorConfig]) -> Vec<String> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    ops.iter()
        .map(|config| {
            let base = config.kind.name();
            let count = seen.entry(base).or_insert(0);
            *count += 1;
            if *count == 1 {
                base.to_string()
            } else {
                format!("{base}_{count}")
            }
        })
        .collect()
}

fn run_analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let graph = load_graph(&args.input, args.giant_component)?;
    let labels = match &args.labels {
        Some(path) => load_label_map(path)?,
        None => HashMap::new(),
    };
    let ops_text = fs::read_to_string(&args.ops)
        .map_err(|e| Failure::io(format!("{}: {e}", args.ops.display())))?;
    let ops: Vec<OperatorConfig> = serde_json::from_str(&ops_text)?;
    if ops.is_empty() {
        return Err(Failure::io("operator list is empty; configure at least one operator"));
    }
    let names = assign_names(&ops);
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::io(format!("{}: {e}", args.out.display())))?;
    let max_iter = args.max_iter.unwrap_or_else(|| spectra::default_max_iter(graph.n()));
    let special = SpecialCaseOptions {
        replicator_clamp: args.replicator_clamp,
        ..SpecialCaseOptions::default()
    };
    let ops_dir = args.ops.parent().unwrap_or(Path::new(".")).to_path_buf();
    let config = RunConfig {
        graph,
        labels,
        ops,
        names,
        out: args.out,
        tol: args.tol,
        max_iter,
        oracle_max_n: args.oracle_max_n,
        special,
        ops_dir,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::io(e.to_string()))?;

    // the shared x-axis for every centrality profile: degree order of the
    // plain graph
    let order = centrality_order(&config.graph);

    let results: Vec<Result<(String, bool), Failure>> = pool.install(|| {
        use rayon::prelude::*;
        config
            .ops
            .par_iter()
            .zip(config.names.par_iter())
            .map(|(op_config, name)| analyze_one(&config, op_config, name, &order))
            .collect()
    });

    let mut all_pass = true;
    let mut worst: u8 = 0;
    for result in &results {
        match result {
            Ok((summary, pass)) => {
                println!("{summary}");
                all_pass &= pass;
            }
            Err(f) => {
                eprintln!("error: {}", f.message);
                worst = worst.max(f.code);
            }
        }
    }
    if worst > 0 {
        return Ok(worst);
    }
    Ok(if all_pass { 0 } else { EXIT_CHECKS_FAILED })
}

fn analyze_one(
    config: &RunConfig,
    op_config: &OperatorConfig,
    name: &str,
    order: &[usize],
) -> Result<(String, bool), Failure> {
    let g = &config.graph;
    let op = build_from_config(g, op_config, &config.special, &config.ops_dir)?;
    let (mut partition, profile, report) =
        certify(g, &op, config.tol, config.max_iter, Some(config.oracle_max_n))?;
    partition.operator = name.to_string();

    write_file(
        &config.out.join(format!("centrality_{name}.csv")),
        &centrality_csv(g, order, &op),
    )?;
    write_file(&config.out.join(format!("sweep_{name}.csv")), &sweep_csv(g, &profile))?;
    write_file(
        &config.out.join(format!("partition_{name}.csv")),
        &partition_csv(g, &config.labels, &partition.s),
    )?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_file(&config.out.join(format!("cheeger_{name}.json")), &json)?;

    let summary = format!(
        "{name}: lambda2={:.12e} h_sweep={:.12e} epsilon={:.3e} pass={}",
        report.lambda2,
        report.h_sweep,
        report.epsilon,
        report.pass
    );
    Ok((summary, report.pass))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn centrality_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| g.degree(b).total_cmp(&g.degree(a)).then(a.cmp(&b)));
    order
}

/// `rank,vertex,value` with values min-max rescaled to [0,1]; a constant
/// profile maps to 1.0 everywhere.
fn centrality_csv(g: &Graph, order: &[usize], op: &OperatorSpec) -> String {
    let c = dynamics::generalized_centrality(op).values;
    let min = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::from("rank,vertex,value\n");
    for (rank, &i) in order.iter().enumerate() {
        let value = if max > min { (c[i] - min) / (max - min) } else { 1.0 };
        let _ = writeln!(out, "{},{},{}", rank + 1, g.label(i), f64_repr(value));
    }
    out
}

fn sweep_csv(g: &Graph, profile: &gendyn::partition::SweepProfile) -> String {
    let mut out = String::from("i,vertex,cut,volS,volSbar,h\n");
    for k in 0..profile.h.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            k + 1,
            g.label(profile.order[k]),
            f64_repr(profile.cut[k]),
            f64_repr(profile.vol_s[k]),
            f64_repr(profile.vol_sbar[k]),
            f64_repr(profile.h[k])
        );
    }
    out
}

fn partition_csv(g: &Graph, labels: &HashMap<String, String>, s: &VertexSet) -> String {
    let mut out = String::from("vertex,label,side\n");
    for i in 0..g.n() {
        let name = g.label(i);
        let group = labels.get(name).map(String::as_str).unwrap_or("");
        let side = if s.contains(i) { 1 } else { 0 };
        let _ = writeln!(out, "{name},{group},{side}");
    }
    out
}

fn run_evolve(args: EvolveArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.input, args.giant_component)?;
    let op_config = parse_op_arg(&args.op)?;
    let special = SpecialCaseOptions {
        replicator_clamp: args.replicator_clamp,
        ..SpecialCaseOptions::default()
    };
    let op = build_from_config(&g, &op_config, &special, Path::new("."))?;
    if !(args.t.is_finite() && args.t >= 0.0) {
        return Err(Failure::io(format!("--t must be non-negative, got {}", args.t)));
    }
    if args.samples < 1 {
        return Err(Failure::io("--samples must be at least 1"));
    }

    let mut state = parse_theta0(&g, &op, &args.theta0)?;
    let dt = args.t / args.samples as f64;
    let mut out = String::from("t,vertex,value\n");
    append_trajectory_rows(&mut out, &g, &state);
    for _ in 0..args.samples {
        state = dynamics::evolve(&op, &state, dt, 1)?;
        append_trajectory_rows(&mut out, &g, &state);
    }
    print!("{out}");
    Ok(0)
}

fn append_trajectory_rows(out: &mut String, g: &Graph, state: &StateVector) {
    for i in 0..g.n() {
        let _ = writeln!(out, "{},{},{}", f64_repr(state.t), g.label(i), f64_repr(state.values[i]));
    }
}

fn parse_theta0(g: &Graph, op: &OperatorSpec, arg: &str) -> Result<StateVector, Failure> {
    if let Some(label) = arg.strip_prefix("delta:") {
        let idx = vertex_index(g, label)?;
        return Ok(StateVector::delta(g.n(), idx, op.rho())?);
    }
    let file = fs::File::open(arg).map_err(|e| Failure::io(format!("{arg}: {e}")))?;
    let mut values = vec![0.0; g.n()];
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(Failure::io(format!(
                "{arg}: line {}: expected `vertex value`",
                lineno + 1
            )));
        }
        let idx = vertex_index(g, tokens[0])?;
        values[idx] = tokens[1]
            .parse::<f64>()
            .map_err(|_| Failure::io(format!("{arg}: line {}: bad value", lineno + 1)))?;
    }
    Ok(StateVector::new(values, op.rho(), 0.0)?)
}

fn parse_vertex_set(g: &Graph, path: &Path) -> Result<VertexSet, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let mut indices = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        for token in content.split_whitespace() {
            indices.push(vertex_index(g, token)?);
        }
    }
    Ok(VertexSet::from_indices(g.n(), indices.into_iter()))
}

#[derive(serde::Serialize)]
struct VerifyOutput {
    retention: RetentionReport,
    mixing: Vec<MixingReport>,
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.input, args.giant_component)?;
    let op_config = parse_op_arg(&args.op)?;
    let special = SpecialCaseOptions {
        replicator_clamp: args.replicator_clamp,
        ..SpecialCaseOptions::default()
    };
    let op = build_from_config(&g, &op_config, &special, Path::new("."))?;
    let set = parse_vertex_set(&g, &args.set)?;
    let grid = parse_float_list(&args.grid)?;
    let mix_times = parse_float_list(&args.mix_times)?;

    let retention = retention_check(&op, &set, &grid)?;
    let mut mixing = Vec::new();
    for pair in &args.pairs {
        let parts: Vec<&str> = pair.split(',').collect();
        if parts.len() != 2 {
            return Err(Failure::io(format!("--pair expects `U,V`, got {pair:?}")));
        }
        let u = vertex_index(&g, parts[0].trim())?;
        let v = vertex_index(&g, parts[1].trim())?;
        for &t in &mix_times {
            mixing.push(mixing_bound_check(&op, u, v, t)?);
        }
    }

    let all_pass = retention.pass && mixing.iter().all(|m| m.pass);
    let output = VerifyOutput { retention, mixing };
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(if all_pass { 0 } else { EXIT_CHECKS_FAILED })
}

fn run_fetch() -> Result<u8, Failure> {
    print!(
        "\
Bundled with the repository under data/:
  karate      34 vertices / 78 edges       data/karate.edges (+ .labels)
  football    115 vertices / 613 edges     data/football.edges (+ .labels)

Larger benchmark graphs are not bundled. Download and convert them to
whitespace `u v [weight]` edge lists, then pass them to `gendyn analyze`:

  house       434 vertices / 51033 edges
              co-voting similarity network of the US House of Representatives;
              construct it from the public roll-call records at
              https://voteview.com/data

  blogs       1490 vertices / 16714 edges
              political blog hyperlinks (undirected); the giant component has
              1222 vertices / 19087 edges when duplicate links are summed
              http://www-personal.umich.edu/~mejn/netdata/polblogs.zip

  facebook    4039 vertices / 88234 edges
              merged ego networks
              https://snap.stanford.edu/data/ego-Facebook.html

  powergrid   4941 vertices / 6594 edges
              western US power grid
              http://www-personal.umich.edu/~mejn/netdata/power.zip
"
    );
    Ok(0)
}
