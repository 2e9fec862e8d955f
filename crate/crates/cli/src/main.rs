use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use tspg::baselines::{build_tspg_by_enumeration, dt_tsg, enumerate_tsp, es_tsg, format_path, tg_tsg, EnumerationLimits};
use tspg::io::{load_edge_list, to_json, write_dot, write_edge_list, LoadOptions, LoadReport};
use tspg::synth::{layered_dag, random_graph, ring_with_chords};
use tspg::workload::{generate_queries, ratio_table, read_queries, run_experiment, write_csv, ExperimentOptions, Method, WorkloadSpec};
use tspg::{run_vug, Query, ResultGraph, TemporalGraph, Timestamp, VugOptions};

/// Exit code when `--oracle` finds a mismatch.
const ORACLE_MISMATCH: u8 = 2;

#[derive(Parser)]
#[command(name = "tspg", version, about = "Temporal simple path graph queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the temporal simple path graph of one query.
    Query(QueryArgs),
    /// Run a random query workload and report times and upper-bound ratios.
    Bench(BenchArgs),
    /// Generate a synthetic temporal graph.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Print basic statistics of a graph file.
    Stats { graph: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    EdgeList,
    Dot,
    Json,
}

#[derive(clap::Args)]
struct QueryArgs {
    graph: PathBuf,
    /// Source vertex: an id from the file or an alias.
    source: String,
    /// Target vertex: an id from the file or an alias.
    target: String,
    tau_b: Timestamp,
    tau_e: Timestamp,
    #[arg(long, value_enum, default_value = "edge-list")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// VUG, EPdtTSG, EPesTSG or EPtgTSG.
    #[arg(long, default_value = "VUG")]
    method: String,
    /// Cross-check the result against path enumeration; exits with 2 on
    /// mismatch.
    #[arg(long)]
    oracle: bool,
    /// Write Gq, Gt, polarity times and TCV tables into this directory.
    #[arg(long)]
    stages: Option<PathBuf>,
    /// Print one line per verified edge with the rule that confirmed it.
    #[arg(long)]
    trace: bool,
    /// Write every temporal simple path, one per line.
    #[arg(long)]
    paths: Option<PathBuf>,
    /// Give up after this many seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(clap::Args)]
struct BenchArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value_t = 6)]
    theta: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read queries (`s t tau_b tau_e` lines) instead of sampling them.
    #[arg(long)]
    query_file: Option<PathBuf>,
    /// Comma-separated methods, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    /// Seconds per (query, method) before the run is marked INF.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also count temporal simple paths per query.
    #[arg(long)]
    count_paths: bool,
    /// Accept queries whose source cannot reach the target.
    #[arg(long)]
    no_filter: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the sampled queries to this file.
    #[arg(long)]
    save_queries: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Uniform random temporal graph G(n, m, T).
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long = "T")]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Layered DAG with w vertices per layer and L layers.
    Layered {
        #[arg(long)]
        w: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Directed ring plus random chords.
    Ring {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        chords: usize,
        #[arg(long = "T")]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<(TemporalGraph, LoadReport)> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let (g, report) = load_edge_list(BufReader::new(file), &LoadOptions::default())
        .with_context(|| format!("cannot load {}", path.display()))?;
    log::info!(
        "{}: {} vertices, {} edges ({} duplicates, {} self-loops dropped)",
        path.display(),
        g.vertex_count(),
        g.edge_count(),
        report.duplicates_dropped,
        report.self_loops_dropped
    );
    Ok((g, report))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_result(result: &ResultGraph, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::EdgeList => write_edge_list(result.graph(), out)?,
        Format::Dot => write_dot(result, "tspg", out)?,
        Format::Json => writeln!(out, "{}", to_json(result))?,
    }
    Ok(())
}

fn deadline(seconds: Option<f64>) -> Result<Option<Instant>> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Some(Instant::now() + Duration::from_secs_f64(s))),
        Some(s) => bail!("invalid timeout {s}"),
    }
}

fn cmd_query(args: QueryArgs) -> Result<ExitCode> {
    let (g, report) = load(&args.graph)?;
    let vertex = |name: &str| report.resolve(name).with_context(|| format!("unknown vertex {name:?}"));
    let q = Query::from_external(&g, vertex(&args.source)?, vertex(&args.target)?, args.tau_b, args.tau_e)?;
    let method: Method = args.method.parse()?;
    let deadline = deadline(args.timeout)?;

    let want_stages = args.stages.is_some();
    let options = VugOptions { keep_stages: want_stages, trace: args.trace && method == Method::Vug, deadline };
    let vug_out = if method == Method::Vug || want_stages {
        Some(run_vug(&g, &q, &options).context("query timed out")?)
    } else {
        None
    };

    let tspg = match method {
        Method::Vug => vug_out.as_ref().unwrap().tspg.clone(),
        _ => {
            let ubg = match method {
                Method::EpDt => dt_tsg(&g, &q),
                Method::EpEs => es_tsg(&g, &q),
                _ => tg_tsg(&g, &q),
            };
            let limits = EnumerationLimits { max_paths: None, deadline };
            build_tspg_by_enumeration(ubg.graph(), &q, limits)?.0
        }
    };

    if let Some(dir) = &args.stages {
        let stages = vug_out.as_ref().and_then(|o| o.stages.as_ref()).unwrap();
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        write_edge_list(stages.gq.graph(), File::create(dir.join("gq.txt"))?)?;
        write_edge_list(stages.gt.graph(), File::create(dir.join("gt.txt"))?)?;
        fs::write(dir.join("polarity.txt"), stages.polarity.dump(&g))?;
        fs::write(dir.join("tcv.txt"), stages.tcv.dump(&g))?;
    }
    if let Some(trace) = vug_out.as_ref().and_then(|o| o.trace.as_ref()) {
        eprint!("{}", trace.render(&g));
    }
    if let Some(path) = &args.paths {
        let mut out = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
        let mut err = Ok(());
        enumerate_tsp(tspg.graph(), &q, EnumerationLimits { max_paths: None, deadline }, |p| {
            if err.is_ok() {
                err = writeln!(out, "{}", format_path(&g, p));
            }
        });
        err?;
        out.flush()?;
    }

    let mut out = output(args.out.as_deref())?;
    write_result(&tspg, args.format, &mut out)?;
    out.flush()?;

    if args.oracle {
        let limits = EnumerationLimits { max_paths: None, deadline };
        let (reference, paths) = build_tspg_by_enumeration(dt_tsg(&g, &q).graph(), &q, limits)?;
        if !reference.same_as(&tspg) || reference.vertices() != tspg.vertices() {
            eprintln!(
                "oracle mismatch: {} edges from {method}, {} from enumeration over {paths} paths",
                tspg.edge_count(),
                reference.edge_count()
            );
            return Ok(ExitCode::from(ORACLE_MISMATCH));
        }
        log::info!("oracle agrees: {} edges, {paths} paths", reference.edge_count());
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_methods(list: &str) -> Result<Vec<Method>> {
    if list.eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    let mut methods = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = name.parse()?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        bail!("no methods selected");
    }
    Ok(methods)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let (g, _) = load(&args.graph)?;
    let methods = parse_methods(&args.methods)?;
    let queries = match &args.query_file {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            read_queries(&g, BufReader::new(file))?
        }
        None => {
            let spec = WorkloadSpec {
                query_count: args.queries,
                theta: args.theta,
                seed: args.seed,
                reachability_filter: !args.no_filter,
                ..Default::default()
            };
            generate_queries(&g, &spec)?
        }
    };
    if let Some(path) = &args.save_queries {
        tspg::workload::write_queries(&g, &queries, BufWriter::new(File::create(path)?))?;
    }
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        bail!("invalid timeout {}", args.timeout);
    }
    let options = ExperimentOptions {
        methods,
        timeout: Duration::from_secs_f64(args.timeout),
        count_paths: args.count_paths,
        jobs: args.jobs.max(1),
    };
    let report = run_experiment(&g, &queries, &options)?;

    if let Some(path) = &args.csv {
        write_csv(&report, BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))?;
    }
    if let Some(path) = &args.json {
        fs::write(path, tspg::workload::to_json(&report)).with_context(|| format!("cannot write {}", path.display()))?;
    }

    let name = args.graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut stdout = io::stdout().lock();
    write!(stdout, "{}", ratio_table(&name, &report.aggregate))?;
    for m in &report.aggregate.methods {
        let mean = m.mean_ms.map_or("-".to_string(), |x| format!("{x:.3}"));
        writeln!(stdout, "{:<8} total {} ms, mean {mean} ms, {} timeouts", m.method.to_string(), m.total_ms, m.timeouts)?;
    }
    if report.aggregate.inconsistent > 0 {
        writeln!(stdout, "warning: {} queries with disagreeing methods", report.aggregate.inconsistent)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(family: Family) -> Result<ExitCode> {
    let (g, header, out) = match family {
        Family::Random { n, m, t, seed, out } => (random_graph(n, m, t, seed)?, format!("# random n={n} m={m} T={t} seed={seed}\n"), out),
        Family::Layered { w, l, out } => {
            let (g, q) = layered_dag(w, l)?;
            let header = format!(
                "# layered w={w} L={l}\n# query: {} {} {} {}\n",
                g.external_id(q.source()),
                g.external_id(q.target()),
                q.begin(),
                q.end()
            );
            (g, header, out)
        }
        Family::Ring { n, chords, t, seed, out } => {
            (ring_with_chords(n, chords, t, seed)?, format!("# ring n={n} chords={chords} T={t} seed={seed}\n"), out)
        }
    };
    let mut w = output(out.as_deref())?;
    w.write_all(header.as_bytes())?;
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(path: &Path) -> Result<ExitCode> {
    let (g, _) = load(path)?;
    let s = tspg::stats(&g);
    println!("vertices {}", s.vertices);
    println!("edges {}", s.edges);
    println!("distinct timestamps {}", s.distinct_timestamps);
    println!("max degree {}", s.max_degree);
    if let Some((lo, hi)) = s.time_range {
        println!("time range {lo} {hi}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TSPG_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen { family } => cmd_gen(family),
        Command::Stats { graph } => cmd_stats(&graph),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
