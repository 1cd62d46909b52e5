//! `ringmix` command-line driver.
//!
//! Every verb first echoes its resolved configuration as `# key=value` lines,
//! then writes plain CSV. Exit codes: 0 success, 2 usage or configuration
//! error, 3 computation error.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flate2::write::GzEncoder;
use flate2::Compression;
use log::{info, warn};

use ringmix::chain::{self, ChainParams, TransitionMatrix};
use ringmix::conductance::{self, ConductanceEstimate, CutResult};
use ringmix::lab::{self, SweepConfig, SweepRecord, Summary};
use ringmix::mixing::{self, MixingOptions, MixingResult};
use ringmix::topology::{self, LongRangeGraph, Model};

#[derive(Parser, Debug)]
#[command(name = "ringmix", version, about = "Markov chains on a cycle with random long-range edges")]
struct Cli {
    /// Worker threads for data-parallel work (default: all cores).
    #[arg(long, global = true, env = "RINGMIX_WORKERS")]
    workers: Option<usize>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random graph and write it in the text graph format.
    Generate(GenerateArgs),
    /// Build the homogeneous chain of a graph and dump its matrix.
    Chain(ChainArgs),
    /// Conductance of the chain on a graph.
    Conductance(ConductanceArgs),
    /// Exact mixing time of the chain on a graph.
    Mixing(MixingArgs),
    /// Run a seeded sweep and write records, summary, fits and plot data.
    Sweep(SweepArgs),
    /// Fit log-log slopes to a records CSV or to two-column `n value` data.
    Fit(FitArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_model)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    /// Output file (default: standard output, with the summary on stderr).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ChainFlags {
    /// Graph file written by `generate`.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    q_c: f64,
    #[arg(long, default_value_t = 0.1)]
    q_l: f64,
    /// Clockwise drift.
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Long-range divisor (default: ⌈2/(α−1)⌉ of the graph's α).
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[command(flatten)]
    chain: ChainFlags,
    /// Write the `i j p` matrix dump here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    /// Exhaustive up to 20 states, connected sets up to 40, arc bound beyond.
    Auto,
    Exact,
    Connected,
    Arc,
}

#[derive(Args, Debug)]
struct ConductanceArgs {
    #[command(flatten)]
    chain: ChainFlags,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
}

#[derive(Args, Debug)]
struct MixingArgs {
    #[command(flatten)]
    chain: ChainFlags,
    #[arg(long, default_value_t = 0.125)]
    epsilon: f64,
    /// Step ceiling before giving up.
    #[arg(long, default_value_t = mixing::DEFAULT_CEILING)]
    ceiling: usize,
    /// Write the worst start's `start,k,d` profile here (gzip if it ends in .gz).
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Flat `key=value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<Model>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated cycle sizes.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated drift values.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    q_c: Option<f64>,
    #[arg(long)]
    q_l: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Base seed (required here or in the configuration file).
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction trimmed from each tail.
    #[arg(long)]
    trim: Option<f64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    /// Only compute conductance estimates.
    #[arg(long)]
    phi_only: bool,
    /// Fill the wall_time_ms column (makes reruns differ).
    #[arg(long)]
    wall_time: bool,
    /// Directory for records.csv, summary.csv, fits.csv and plot data.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Records CSV from `sweep`, or whitespace-separated `n value` lines.
    #[arg(long)]
    input: PathBuf,
    /// Fraction trimmed from each tail when fitting records.
    #[arg(long, default_value_t = 0.05)]
    trim: f64,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse::<Model>().map_err(|e| e.to_string())
}

/// A failed run: usage and configuration problems exit with 2, computation
/// failures with 3.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = configure_workers(cli.workers) {
        eprintln!("error: {}", message(&e));
        return ExitCode::from(e.code());
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out).and_then(|()| out.flush().map_err(runtime)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", message(&e));
            ExitCode::from(e.code())
        }
    }
}

fn message(f: &Failure) -> &str {
    match f {
        Failure::Usage(m) | Failure::Runtime(m) => m,
    }
}

#[cfg(feature = "parallel")]
fn configure_workers(workers: Option<usize>) -> Outcome {
    if let Some(w) = workers {
        if w == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().map_err(runtime)?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(workers: Option<usize>) -> Outcome {
    if workers.is_some_and(|w| w > 1) {
        warn!("built without the parallel feature; running on one thread");
    }
    Ok(())
}

fn run(command: Command, out: &mut impl Write) -> Outcome {
    match command {
        Command::Generate(a) => generate(a, out),
        Command::Chain(a) => chain_cmd(a, out),
        Command::Conductance(a) => conductance_cmd(a, out),
        Command::Mixing(a) => mixing_cmd(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Fit(a) => fit(a, out),
    }
}

fn echo(out: &mut impl Write, pairs: &[(&str, String)]) -> Outcome {
    for (k, v) in pairs {
        writeln!(out, "# {k}={v}").map_err(runtime)?;
    }
    Ok(())
}

fn generate(a: GenerateArgs, out: &mut impl Write) -> Outcome {
    let g = topology::generate(a.model, a.n, a.alpha, a.seed).map_err(usage)?;
    let summary = format!("edges,max_degree\n{},{}\n", g.edges().len(), g.max_long_range_degree());
    let config = [
        ("model", a.model.to_string()),
        ("n", a.n.to_string()),
        ("alpha", a.alpha.to_string()),
        ("seed", a.seed.to_string()),
    ];
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = BufWriter::new(file);
            g.write_to(&mut w).and_then(|()| w.flush()).map_err(|e| io_err(path, e))?;
            echo(out, &config)?;
            echo(out, &[("out", path.display().to_string())])?;
            out.write_all(summary.as_bytes()).map_err(runtime)
        }
        None => {
            let mut err = io::stderr();
            echo(&mut err, &config)?;
            err.write_all(summary.as_bytes()).map_err(runtime)?;
            g.write_to(out).map_err(runtime)
        }
    }
}

fn load_graph(path: &Path) -> Result<LongRangeGraph, Failure> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    LongRangeGraph::read_from(BufReader::new(file))
        .map_err(|e| io_err(path, e))?
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Loads the graph and builds its chain, echoing the resolved parameters.
fn build(flags: &ChainFlags, out: &mut impl Write) -> Result<(LongRangeGraph, ChainParams, TransitionMatrix), Failure> {
    let g = load_graph(&flags.graph)?;
    let d = match flags.d {
        Some(d) => d,
        None => topology::degree_cap(g.alpha()).map_err(usage)?,
    };
    let params = ChainParams::new(flags.q_c, flags.q_l, flags.r, d).map_err(usage)?;
    echo(
        out,
        &[
            ("graph", flags.graph.display().to_string()),
            ("n", g.n().to_string()),
            ("alpha", g.alpha().to_string()),
            ("model", g.model().to_string()),
            ("seed", g.seed().to_string()),
            ("q_c", params.q_c.to_string()),
            ("q_l", params.q_l.to_string()),
            ("r", params.r.to_string()),
            ("d", params.d.to_string()),
        ],
    )?;
    let p = chain::build_homogeneous(&g, &params).map_err(usage)?;
    Ok((g, params, p))
}

fn chain_cmd(a: ChainArgs, out: &mut impl Write) -> Outcome {
    let (_, _, p) = build(&a.chain, out)?;
    let reversible = chain::is_reversible(&p, chain::STOCHASTIC_TOL).map_err(runtime)?;
    if let Some(path) = &a.out {
        fs::write(path, p.dump()).map_err(|e| io_err(path, e))?;
        echo(out, &[("out", path.display().to_string())])?;
    }
    writeln!(out, "n,nonzeros,lazy,doubly_stochastic,reversible").map_err(runtime)?;
    writeln!(
        out,
        "{},{},{},{},{reversible}",
        p.n(),
        p.offdiagonal_nnz() + p.holds().iter().filter(|&&h| h > 0.0).count(),
        chain::is_lazy(&p),
        chain::is_doubly_stochastic(&p, chain::STOCHASTIC_TOL),
    )
    .map_err(runtime)
}

fn conductance_cmd(a: ConductanceArgs, out: &mut impl Write) -> Outcome {
    let (g, _, p) = build(&a.chain, out)?;
    let est: ConductanceEstimate = match a.method {
        Method::Auto => conductance::best_estimate(&p, &g, Default::default()),
        Method::Exact => conductance::conductance_exact(&p),
        Method::Connected => conductance::conductance_connected(&p),
        Method::Arc => conductance::conductance_arc_upper(&p, &g),
    }
    .map_err(usage)?;
    echo(out, &[("method", format!("{:?}", a.method).to_lowercase()), ("kind", est.kind.to_string())])?;
    writeln!(out, "{}", CutResult::CSV_HEADER).map_err(runtime)?;
    if let Some(w) = &est.witness {
        writeln!(out, "{}", w.csv_row()).map_err(runtime)?;
    }
    Ok(())
}

fn mixing_cmd(a: MixingArgs, out: &mut impl Write) -> Outcome {
    let (_, _, p) = build(&a.chain, out)?;
    echo(out, &[("epsilon", a.epsilon.to_string()), ("ceiling", a.ceiling.to_string())])?;
    let opts = MixingOptions { ceiling: a.ceiling, ..Default::default() };
    let reversible = chain::is_reversible(&p, chain::STOCHASTIC_TOL).map_err(runtime)?;
    let result = mixing::mixing_time_with(&p, a.epsilon, &opts).map_err(mixing_failure)?;
    let mut rows: Vec<(&str, MixingResult)> = vec![("input", result)];
    if !reversible {
        let rev = chain::reversibilize(&p).map_err(runtime)?;
        rows.push(("reversibilized", mixing::mixing_time_with(&rev, a.epsilon, &opts).map_err(mixing_failure)?));
    }
    writeln!(out, "chain,{}", MixingResult::CSV_HEADER).map_err(runtime)?;
    for (name, r) in &rows {
        writeln!(out, "{name},{}", r.csv_row()).map_err(runtime)?;
    }
    if let Some(path) = &a.profile {
        let worst = &rows[0].1;
        write_maybe_gz(path, |w| {
            writeln!(w, "{}", mixing::PROFILE_CSV_HEADER)?;
            w.write_all(mixing::profile_csv_rows(worst.worst_start, &worst.profile).as_bytes())
        })?;
    }
    Ok(())
}

fn mixing_failure(e: mixing::MixingError) -> Failure {
    match e {
        mixing::MixingError::InvalidEpsilon(_) => usage(e),
        _ => runtime(e),
    }
}

fn write_maybe_gz(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let gz = path.extension().is_some_and(|e| e == "gz");
    let result = if gz {
        let mut w = GzEncoder::new(BufWriter::new(file), Compression::default());
        body(&mut w).and_then(|()| w.finish()?.flush())
    } else {
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|()| w.flush())
    };
    result.map_err(|e| io_err(path, e))
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut config = SweepConfig::new(Model::M2, 1.5, Vec::new(), 20, 0);
    let mut seeded = false;
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        seeded = text
            .lines()
            .filter_map(|l| l.split('#').next()?.split_once('='))
            .any(|(k, _)| matches!(k.trim(), "seed" | "base_seed"));
        config.apply_kv(&text).map_err(usage)?;
    }
    let mut set = |k: &str, v: Option<String>| match v {
        Some(v) => config.set(k, &v).map_err(usage),
        None => Ok(()),
    };
    set("model", a.model.map(|m| m.to_string()))?;
    set("alpha", a.alpha.map(|x| x.to_string()))?;
    set("sizes", a.sizes.clone())?;
    set("trials", a.trials.map(|x| x.to_string()))?;
    set("r", a.r.clone())?;
    set("q_c", a.q_c.map(|x| x.to_string()))?;
    set("q_l", a.q_l.map(|x| x.to_string()))?;
    set("d", a.d.map(|x| x.to_string()))?;
    set("epsilon", a.epsilon.map(|x| x.to_string()))?;
    set("seed", a.seed.map(|x| x.to_string()))?;
    set("trim", a.trim.map(|x| x.to_string()))?;
    set("max_attempts", a.max_attempts.map(|x| x.to_string()))?;
    if a.phi_only {
        config.compute_mixing = false;
    }
    if a.wall_time {
        config.record_wall_time = true;
    }
    if !seeded && a.seed.is_none() {
        return Err(usage("sweep needs an explicit seed (--seed or seed= in the configuration)"));
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn sweep(a: SweepArgs, out: &mut impl Write) -> Outcome {
    let config = sweep_config(&a)?;
    for line in config.to_kv().lines() {
        writeln!(out, "# {line}").map_err(runtime)?;
    }
    echo(out, &[("out_dir", a.out_dir.display().to_string())])?;
    fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
    let records = lab::run_sweep(&config).map_err(|e| match e {
        lab::LabError::InvalidConfig(_) => usage(e),
        _ => runtime(e),
    })?;
    let skipped = records.iter().filter(|r| r.is_skipped()).count();
    let path = a.out_dir.join("records.csv");
    let mut buf = Vec::new();
    lab::write_records_csv(&mut buf, &config, &records).map_err(runtime)?;
    fs::write(&path, buf).map_err(|e| io_err(&path, e))?;
    let summary = lab::summarize(&records, config.trim_fraction);
    write_summary(&a.out_dir, &summary)?;
    info!("{} records, {skipped} skipped", records.len());
    writeln!(out, "records,skipped\n{},{skipped}", records.len()).map_err(runtime)?;
    out.write_all(summary.fits_csv().as_bytes()).map_err(runtime)
}

fn write_summary(dir: &Path, summary: &Summary) -> Outcome {
    let write = |name: String, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    };
    write("summary.csv".into(), summary.groups_csv())?;
    write("fits.csv".into(), summary.fits_csv())?;
    for r in summary.r_values() {
        write(format!("plot_t_mix_r{r}.dat"), summary.plot_data(r, "t_mix"))?;
        write(format!("plot_phi_r{r}.dat"), summary.plot_data(r, "phi"))?;
    }
    Ok(())
}

fn fit(a: FitArgs, out: &mut impl Write) -> Outcome {
    let text = fs::read_to_string(&a.input).map_err(|e| io_err(&a.input, e))?;
    echo(out, &[("input", a.input.display().to_string()), ("trim", a.trim.to_string())])?;
    let is_records = text.lines().find(|l| !l.starts_with('#')).is_some_and(|l| l.trim() == SweepRecord::CSV_HEADER);
    if is_records {
        let records = lab::read_records_csv(&text).map_err(usage)?;
        if !(0.0..0.5).contains(&a.trim) {
            return Err(usage(format!("trim fraction {} outside [0, 0.5)", a.trim)));
        }
        let summary = lab::summarize(&records, a.trim);
        if summary.fits.is_empty() {
            warn!("fewer than three sizes with data; nothing to fit");
        }
        return out.write_all(summary.fits_csv().as_bytes()).map_err(runtime);
    }
    let mut points = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| usage(format!("line {}: {e}", ln + 1)))?;
        if nums.len() != 2 {
            return Err(usage(format!("line {}: expected `n value`", ln + 1)));
        }
        points.push((nums[0], nums[1]));
    }
    let f = lab::fit_exponent(&points).map_err(usage)?;
    writeln!(out, "slope,intercept,residual\n{},{},{}", f.slope, f.intercept, f.residual).map_err(runtime)
}
