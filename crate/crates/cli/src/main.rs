use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qddlab_core::io::{self, RunManifest};
use qddlab_core::metrics::NormKind;
use qddlab_core::model::{sample_bath, DEFAULT_BATH_QUBITS};
use qddlab_core::plot;
use qddlab_core::scaling::{
    compare_tables, fit_aggregates, fit_intermediate, log_grid, predicted_exponents, realization_seed, run_sweep,
    DigitsSetting, FitOptions, ScalingError, SweepConfig,
};
use qddlab_core::sequence::Protocol;

const EXIT_MISMATCH: u8 = 3;
const EXIT_PRECISION: u8 = 4;

#[derive(Parser)]
#[command(name = "qddlab", version, about = "Nested Uhrig decoupling sweeps, exponent fits and plots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve every sequence over a J tau grid and bath realizations.
    Sweep(SweepArgs),
    /// Fit scaling exponents to an aggregates.csv.
    Fit(FitArgs),
    /// Print the closed-form exponents of QDD(n1,n2).
    Predict(PredictArgs),
    /// Fit an aggregates.csv and compare against the closed form.
    Compare(CompareArgs),
    /// Errors at every checkpoint of a sequence.
    Intermediate(IntermediateArgs),
    /// Render aggregates.csv or intermediate.csv as SVG charts.
    Plot(PlotArgs),
    /// Print the compiled pulse schedule of a sequence as JSON.
    Schedule(ScheduleArgs),
    /// Print the coupling coefficients of a bath realization as JSON.
    Bath(BathArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Number of bath realizations.
    #[arg(long, default_value_t = 50)]
    realizations: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Working precision in decimal digits, or `auto`.
    #[arg(long, default_value = "auto")]
    digits: DigitsSetting,
    /// Norm of the single-axis errors: nuclear or hs.
    #[arg(long, default_value = "nuclear")]
    norm: NormKind,
    /// System-bath coupling strength J.
    #[arg(long, default_value_t = 1e-4)]
    coupling: f64,
    /// Pure-bath strength.
    #[arg(long, default_value_t = 1e-6)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_BATH_QUBITS)]
    bath_qubits: usize,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "QDDLAB_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = -9.0, allow_hyphen_values = true)]
    jtau_log_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    jtau_log_max: f64,
    #[arg(long, default_value_t = 1.0)]
    jtau_log_step: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Sequence: QDD(a,b), UDD(X|Z,n), NEST(...), FREE, or QDD to expand over --n1/--n2.
    #[arg(long)]
    seq: Vec<String>,
    /// Inner orders of the QDD grid.
    #[arg(long, value_delimiter = ',')]
    n1: Vec<u32>,
    /// Outer orders of the QDD grid.
    #[arg(long, value_delimiter = ',')]
    n2: Vec<u32>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Also record errors at every checkpoint.
    #[arg(long)]
    intermediate: bool,
    /// Rerun the configuration recorded in a manifest.json.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct FitOpts {
    /// Fixed fit window `lo:hi` in log10(J tau).
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
    /// Ignore errors with log10 at or below this value.
    #[arg(long, allow_hyphen_values = true)]
    floor: Option<f64>,
}

impl FitOpts {
    fn options(&self) -> FitOptions {
        FitOptions {
            window: self.window,
            floor_log10: self.floor.unwrap_or(f64::NEG_INFINITY),
            ..FitOptions::default()
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Input aggregates.csv.
    #[arg(long, default_value = "aggregates.csv")]
    aggregates: PathBuf,
    #[command(flatten)]
    fit: FitOpts,
    /// Output fits.csv.
    #[arg(long, default_value = "fits.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    n1: u32,
    #[arg(long)]
    n2: u32,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, default_value = "aggregates.csv")]
    aggregates: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    n1: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    n2: Vec<u32>,
    #[command(flatten)]
    fit: FitOpts,
    /// Directory for report.txt and fits.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct IntermediateArgs {
    #[arg(long)]
    seq: String,
    /// Grid points in log10(J tau); overrides the grid flags.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    jtau: Vec<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long, conflicts_with = "intermediate")]
    aggregates: Option<PathBuf>,
    #[arg(long)]
    intermediate: Option<PathBuf>,
    /// Leave out the distance series.
    #[arg(long)]
    no_d: bool,
    #[command(flatten)]
    fit: FitOpts,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    seq: String,
}

#[derive(Args)]
struct BathArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Realization index under the master seed; without it the seed is used directly.
    #[arg(long)]
    realization: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BATH_QUBITS)]
    bath_qubits: usize,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err("window needs lo < hi".into());
    }
    Ok((lo, hi))
}

fn parse_protocol(s: &str) -> Result<Protocol> {
    s.parse().with_context(|| format!("invalid sequence {s:?}"))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn config_from(run: &RunArgs, sequences: Vec<Protocol>, grid: Vec<f64>, intermediate: bool) -> SweepConfig {
    SweepConfig {
        sequences,
        log_jtau_grid: grid,
        realizations: run.realizations,
        seed: run.seed,
        coupling: run.coupling,
        beta: run.beta,
        digits: run.digits,
        norm_kind: run.norm,
        n_bath_qubits: run.bath_qubits,
        intermediate,
    }
}

fn grid_from(g: &GridArgs) -> Result<Vec<f64>> {
    Ok(log_grid(g.jtau_log_min, g.jtau_log_max, g.jtau_log_step)?)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    set_threads(args.run.threads)?;
    let config = match &args.replay {
        Some(path) => RunManifest::read(path)?.config,
        None => {
            let mut sequences = Vec::new();
            let mut qdd_grid = !args.n1.is_empty() || !args.n2.is_empty();
            for s in &args.seq {
                if s.trim().eq_ignore_ascii_case("qdd") {
                    qdd_grid = true;
                } else {
                    sequences.push(parse_protocol(s)?);
                }
            }
            if qdd_grid {
                if args.n1.is_empty() || args.n2.is_empty() {
                    bail!("a QDD grid needs both --n1 and --n2");
                }
                sequences.extend(SweepConfig::qdd_cells(&args.n1, &args.n2)?);
            }
            if sequences.is_empty() {
                bail!("nothing to run: give --seq or --n1/--n2");
            }
            config_from(&args.run, sequences, grid_from(&args.grid)?, args.intermediate)
        }
    };
    create_dir(&args.run.out)?;
    let started = unix_now();
    let result = run_sweep(&config)?;
    let finished = unix_now();
    let out = &args.run.out;
    io::write_samples(&out.join("samples.csv"), &result.samples)?;
    io::write_aggregates(&out.join("aggregates.csv"), &result.aggregates)?;
    if config.intermediate {
        io::write_intermediate(&out.join("intermediate.csv"), &result.intermediate)?;
    }
    RunManifest::new(&result, started, finished).write(&out.join("manifest.json"))?;
    eprintln!(
        "{} samples at {} digits written to {}",
        result.samples.len(),
        result.precision.digits(),
        out.display()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let aggregates = io::read_aggregates(&args.aggregates)?;
    let fits = fit_aggregates(&aggregates, &args.fit.options());
    io::write_fits(&args.out, &fits)?;
    for f in &fits {
        match &f.fit {
            Ok(fit) => println!(
                "{} {}: n_hat={} slope={:.4} window=[{}, {}]{}",
                f.sequence,
                f.measure,
                fit.n_hat,
                fit.slope_raw,
                fit.window.0,
                fit.window.1,
                if fit.flagged() { " (flagged)" } else { "" }
            ),
            Err(e) => println!("{} {}: {e}", f.sequence, f.measure),
        }
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    if args.n1 == 0 || args.n2 == 0 {
        bail!("orders must be positive");
    }
    let e = predicted_exponents(args.n1, args.n2);
    println!("n_x={} n_y={} n_z={} n_D={}", e.x, e.y, e.z, e.d);
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode> {
    let aggregates = io::read_aggregates(&args.aggregates)?;
    let fits = fit_aggregates(&aggregates, &args.fit.options());
    let mut cells = Vec::new();
    for &n1 in &args.n1 {
        for &n2 in &args.n2 {
            if n1 == 0 || n2 == 0 {
                bail!("orders must be positive");
            }
            cells.push((n1, n2));
        }
    }
    let report = compare_tables(&fits, &cells)?;
    create_dir(&args.out)?;
    io::write_fits(&args.out.join("fits.csv"), &fits)?;
    let text = report.render();
    fs::write(args.out.join("report.txt"), &text).context("writing report.txt")?;
    print!("{text}");
    Ok(if report.all_match() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    })
}

fn cmd_intermediate(args: IntermediateArgs) -> Result<()> {
    set_threads(args.run.threads)?;
    let protocol = parse_protocol(&args.seq)?;
    if protocol.spec().is_none() {
        bail!("free evolution has no checkpoints");
    }
    let grid = if args.jtau.is_empty() {
        grid_from(&args.grid)?
    } else {
        let mut g = args.jtau.clone();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    };
    let config = config_from(&args.run, vec![protocol], grid, true);
    create_dir(&args.run.out)?;
    let result = run_sweep(&config)?;
    let out = &args.run.out;
    io::write_intermediate(&out.join("intermediate.csv"), &result.intermediate)?;
    if config.log_jtau_grid.len() > 1 {
        let fits = fit_intermediate(&result.intermediate, &FitOptions::for_precision(&result.precision));
        io::write_intermediate_fits(&out.join("intermediate_fits.csv"), &fits)?;
    }
    eprintln!("checkpoint errors written to {}", out.display());
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let panels = match (&args.aggregates, &args.intermediate) {
        (_, Some(path)) => plot::intermediate_panels(&io::read_intermediate(path)?)?,
        (Some(path), None) => {
            let aggregates = io::read_aggregates(path)?;
            let fits = fit_aggregates(&aggregates, &args.fit.options());
            plot::aggregate_panels(&aggregates, &fits, !args.no_d)?
        }
        (None, None) => bail!("give --aggregates or --intermediate"),
    };
    let rendered = panels
        .iter()
        .map(|(stem, panel)| Ok((stem, panel.render()?)))
        .collect::<Result<Vec<_>, plot::PlotError>>()?;
    create_dir(&args.out)?;
    for (stem, svg) in rendered {
        let path = args.out.join(format!("{stem}.svg"));
        fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_schedule(args: ScheduleArgs) -> Result<()> {
    println!("{}", parse_protocol(&args.seq)?.schedule().to_json());
    Ok(())
}

fn cmd_bath(args: BathArgs) -> Result<()> {
    let seed = match args.realization {
        Some(r) => realization_seed(args.seed, r),
        None => args.seed,
    };
    println!("{}", sample_bath(seed, args.bath_qubits)?.to_json());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep(a) => cmd_sweep(a)?,
        Command::Fit(a) => cmd_fit(a)?,
        Command::Predict(a) => cmd_predict(a)?,
        Command::Compare(a) => return cmd_compare(a),
        Command::Intermediate(a) => cmd_intermediate(a)?,
        Command::Plot(a) => cmd_plot(a)?,
        Command::Schedule(a) => cmd_schedule(a)?,
        Command::Bath(a) => cmd_bath(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<ScalingError>() {
                Some(e) if e.is_precision_failure() => {
                    eprintln!("hint: rerun with a larger --digits");
                    ExitCode::from(EXIT_PRECISION)
                }
                Some(ScalingError::InvalidConfig(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
