//! `qfluct`: evaluate oscillatory vacuum-energy spectra, recover the finite
//! energies by damped integration and extrapolation, check the contraction
//! combinatorics, and sample the skewed distribution of the time-averaged
//! squared field.
//!
//! Exit codes: 0 success, 2 argument or configuration error, 3 numerical
//! non-convergence.

mod config;
mod svg;

use clap::{Args, Parser, Subcommand};
use qfluct_core::{abel, field2d, quadform, spectra, stats, wick};
use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qfluct", version, about = "Vacuum fluctuation spectra and distributions")]
struct Cli {
    /// Optional key=value config file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV/SVG files (default: $QFLUCT_OUT_DIR or `.`).
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a frequency spectrum to CSV (and optionally SVG).
    Spectrum(SpectrumArgs),
    /// Damped-integral table, extrapolated limit and closed-form reference.
    Energy(EnergyArgs),
    /// Contraction-counting tables with PASS/FAIL checks.
    Wick(WickArgs),
    /// Moments of the time-averaged squared field and the skewness ratio.
    Moments(MomentsArgs),
    /// Sample the discretized quadratic operator: histogram and shape CSVs.
    Sample(SampleArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Spectrum kind: casimir | cp
    #[arg(long)]
    model: Option<String>,
    /// Periodicity length (casimir)
    #[arg(long = "L")]
    periodicity: Option<f64>,
    /// Transverse area (casimir)
    #[arg(long = "A")]
    area: Option<f64>,
    /// Wall distance (cp)
    #[arg(long)]
    z: Option<f64>,
    /// Largest omega in the table
    #[arg(long)]
    omega_max: Option<f64>,
    /// Number of rows
    #[arg(long)]
    samples: Option<usize>,
    /// Rescale columns for plotting (casimir: omega in 2pi/L, sigma in 2A/L)
    #[arg(long)]
    normalized: bool,
    /// Also write an SVG polyline plot
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct EnergyArgs {
    /// Spectrum kind: casimir | cp
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "L")]
    periodicity: Option<f64>,
    #[arg(long = "A")]
    area: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    /// Static polarizability (cp)
    #[arg(long)]
    alpha0: Option<f64>,
    /// Comma-separated decreasing damping sequence (default: eight geometric
    /// levels below the oscillation scale)
    #[arg(long)]
    beta_seq: Option<String>,
    /// Acceptable relative deviation from the closed form
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the beta,value table as CSV
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct WickArgs {
    /// Largest vertex count in the tables (capacity: 6)
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct MomentsArgs {
    /// Effective inverse-time scale
    #[arg(long)]
    mu: Option<f64>,
    /// Sampling interval duration
    #[arg(long = "T")]
    duration: Option<f64>,
    /// Comma-separated methods (closed-form, leading-log, quadrature, trace)
    #[arg(long)]
    methods: Option<String>,
    /// Grid size for the trace method
    #[arg(long = "N")]
    points: Option<usize>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "T")]
    duration: Option<f64>,
    /// Time-grid size of the discretized kernel
    #[arg(long = "N")]
    points: Option<usize>,
    /// Number of Monte Carlo draws
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram bins
    #[arg(long)]
    bins: Option<usize>,
    /// Worker threads (default: all cores); output is thread-count invariant
    #[arg(long)]
    threads: Option<usize>,
    /// Also write an SVG of the histogram density
    #[arg(long)]
    svg: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<qfluct_core::Error> for CliError {
    fn from(e: qfluct_core::Error) -> Self {
        match e {
            qfluct_core::Error::NonConvergence { .. }
            | qfluct_core::Error::NotPositiveSemidefinite { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Flag-over-config resolution for one subcommand's parameters.
struct Settings {
    cfg: BTreeMap<String, String>,
}

impl Settings {
    fn new(config_path: Option<&Path>, allowed: &[&str]) -> CliResult<Self> {
        let cfg = match config_path {
            Some(p) => config::load(p).map_err(CliError::Usage)?,
            None => BTreeMap::new(),
        };
        let mut allowed = allowed.to_vec();
        allowed.push("out-dir");
        config::validate_keys(&cfg, &allowed).map_err(CliError::Usage)?;
        Ok(Self { cfg })
    }

    fn parse<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.cfg.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`"))
            }),
        }
    }

    fn require<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.parse(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `--{key}`")))
    }

    fn or_default<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        Ok(self.parse(flag, key)?.unwrap_or(default))
    }
}

fn out_dir(cli_flag: Option<&Path>, settings: &Settings) -> PathBuf {
    if let Some(p) = cli_flag {
        return p.to_path_buf();
    }
    if let Some(p) = settings.cfg.get("out-dir") {
        return PathBuf::from(p);
    }
    if let Ok(p) = std::env::var("QFLUCT_OUT_DIR") {
        if !p.is_empty() {
            return PathBuf::from(p);
        }
    }
    PathBuf::from(".")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, contents))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn build_model(
    settings: &Settings,
    model: Option<String>,
    periodicity: Option<f64>,
    area: Option<f64>,
    z: Option<f64>,
) -> CliResult<spectra::SpectrumModel> {
    let kind: String = settings.require(model, "model")?;
    match kind.as_str() {
        "casimir" => {
            let area = settings.or_default(area, "A", 1.0)?;
            let periodicity = settings.or_default(periodicity, "L", 1.0)?;
            Ok(spectra::SpectrumModel::Casimir(
                spectra::CasimirGeometry::new(area, periodicity)?,
            ))
        }
        "cp" => {
            let z = settings.or_default(z, "z", 1.0)?;
            // polarizability only scales the final potential; the table and
            // damped integrals use the raw spectrum
            Ok(spectra::SpectrumModel::CasimirPolder(
                spectra::CasimirPolderSetup::new(1.0, z)?,
            ))
        }
        other => Err(CliError::Usage(format!(
            "unknown model `{other}` (expected casimir | cp)"
        ))),
    }
}

fn cmd_spectrum(args: SpectrumArgs, settings: &Settings, dir: &Path) -> CliResult<()> {
    let model = build_model(settings, args.model, args.periodicity, args.area, args.z)?;
    let default_omega_max = 4.0 * model.oscillation_scale();
    let omega_max = settings.or_default(args.omega_max, "omega-max", default_omega_max)?;
    let samples = settings.or_default(args.samples, "samples", 2000)?;
    let table = spectra::tabulate_spectrum(&model, omega_max, samples, args.normalized)?;

    let base = format!("spectrum_{}", model.kind_name());
    let csv_path = write_file(dir, &format!("{base}.csv"), &table.to_csv())?;
    println!("wrote {}", csv_path.display());
    if args.svg {
        let (x_label, y_label) = match (&model, args.normalized) {
            (spectra::SpectrumModel::Casimir(_), true) => ("omega L / 2 pi", "sigma L / 2A"),
            (spectra::SpectrumModel::CasimirPolder(_), true) => ("2 omega z", "sigma"),
            _ => ("omega", "sigma"),
        };
        let plot = svg::polyline_plot(&base, x_label, y_label, &table.rows);
        let svg_path = write_file(dir, &format!("{base}.svg"), &plot)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn parse_beta_seq(raw: &str) -> CliResult<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("malformed beta sequence entry `{s}`")))
        })
        .collect()
}

fn cmd_energy(args: EnergyArgs, settings: &Settings, dir: &Path) -> CliResult<()> {
    let alpha0 = settings.or_default(args.alpha0, "alpha0", 1.0)?;
    let model = build_model(
        settings,
        args.model.clone(),
        args.periodicity,
        args.area,
        args.z,
    )?;
    // fold the polarizability into the reported potential for the cp model
    let model = match model {
        spectra::SpectrumModel::CasimirPolder(s) => spectra::SpectrumModel::CasimirPolder(
            spectra::CasimirPolderSetup::new(alpha0, s.wall_distance)?,
        ),
        m => m,
    };
    let tol: f64 = settings.or_default(args.tol, "tol", 1e-6)?;
    let beta_seq = match settings.parse(args.beta_seq, "beta-seq")? {
        Some(raw) => parse_beta_seq(&raw)?,
        None => abel::default_beta_sequence(&model),
    };

    let result = abel::abel_limit(&model, &beta_seq, 1e-10)?;
    let closed = match &model {
        spectra::SpectrumModel::Casimir(g) => spectra::casimir_energy_closed(g),
        spectra::SpectrumModel::CasimirPolder(s) => spectra::cp_potential_closed(s),
    };
    let deviation = ((result.limit - closed) / closed).abs();

    println!("beta,value");
    for &(beta, value) in &result.points {
        println!("{beta},{value}");
    }
    println!("extrapolated = {}", result.limit);
    println!("error_estimate = {}", result.error_estimate);
    println!("closed_form = {closed}");
    println!("relative_deviation = {deviation}");

    if args.csv {
        let path = write_file(
            dir,
            &format!("energy_{}.csv", model.kind_name()),
            &result.to_csv(),
        )?;
        println!("wrote {}", path.display());
    }

    if deviation <= tol {
        println!("status = PASS (tolerance {tol})");
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "extrapolated limit deviates from the closed form by {deviation} (> {tol})"
        )))
    }
}

fn cmd_wick(args: WickArgs, settings: &Settings) -> CliResult<()> {
    let n_max = settings.or_default(args.n_max, "n-max", 6)?;
    if n_max > 6 {
        return Err(CliError::Usage(format!(
            "n-max {n_max} exceeds the exhaustive capacity 6"
        )));
    }
    let mut all_pass = true;
    println!("family,n,count,formula,status");
    for n in 1..=n_max.min(5) {
        let count = wick::enumerate_pairings(n)?.len() as u128;
        let formula = wick::odd_double_factorial(n as u32);
        let ok = count == formula;
        all_pass &= ok;
        println!(
            "pairings,{n},{count},{formula},{}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    for n in 2..=n_max {
        let count = wick::enumerate_vertex_matchings(n)?.len() as u128;
        let formula = wick::matching_count_formula(n as u32);
        let cycle_mass: u128 = wick::cycle_partitions(n)?
            .iter()
            .map(|p| p.multiplicity)
            .sum();
        let ok = count == formula && cycle_mass == count;
        all_pass &= ok;
        println!(
            "matchings,{n},{count},{formula},{}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Numerical(
            "counting identities failed".to_string(),
        ))
    }
}

fn cmd_moments(args: MomentsArgs, settings: &Settings) -> CliResult<()> {
    let mu = settings.or_default(args.mu, "mu", 0.01)?;
    let duration = settings.or_default(args.duration, "T", 1.0)?;
    let points = settings.or_default(args.points, "N", 2000)?;
    let params = field2d::ModelParams::new(mu, duration)?;
    if params.mu_t() >= 1.0 {
        return Err(CliError::Usage(format!(
            "mu T = {} must be < 1",
            params.mu_t()
        )));
    }
    let methods_raw = settings
        .parse(args.methods, "methods")?
        .unwrap_or_else(|| "closed-form,leading-log,quadrature,trace".to_string());

    let mut second: Vec<field2d::MomentResult> = Vec::new();
    let mut third: Vec<field2d::MomentResult> = Vec::new();
    for name in methods_raw.split(',').map(str::trim) {
        match name {
            "closed-form" | "closed_form" => {
                second.push(field2d::second_moment(
                    &params,
                    field2d::MomentMethod::ClosedForm,
                )?);
            }
            "leading-log" | "leading_log" => {
                second.push(field2d::second_moment(
                    &params,
                    field2d::MomentMethod::LeadingLog,
                )?);
                third.push(field2d::third_moment(
                    &params,
                    field2d::MomentMethod::LeadingLog,
                )?);
            }
            "quadrature" => {
                second.push(field2d::second_moment(
                    &params,
                    field2d::MomentMethod::Quadrature,
                )?);
                third.push(field2d::third_moment(
                    &params,
                    field2d::MomentMethod::Quadrature,
                )?);
            }
            "trace" => {
                third.push(field2d::third_moment(
                    &params,
                    field2d::MomentMethod::Trace { points },
                )?);
            }
            other => {
                return Err(CliError::Usage(format!("unknown method `{other}`")));
            }
        }
    }

    print!("{}", field2d::MOMENT_CSV_HEADER);
    println!();
    for r in &second {
        print!("{}", field2d::moment_csv_row(params.mu_t(), 2, r));
    }
    for r in &third {
        print!("{}", field2d::moment_csv_row(params.mu_t(), 3, r));
    }

    let ratio = field2d::skewness_ratio(&params)?;
    println!("skewness_ratio = {ratio}");
    println!("sqrt2_reference = {SQRT_2}");
    println!("ratio_deviation = {}", (ratio - SQRT_2).abs());
    Ok(())
}

fn cmd_sample(args: SampleArgs, settings: &Settings, dir: &Path) -> CliResult<()> {
    let mu = settings.or_default(args.mu, "mu", 0.01)?;
    let duration = settings.or_default(args.duration, "T", 1.0)?;
    let points = settings.or_default(args.points, "N", 200)?;
    let count = settings.or_default(args.count, "count", 1_000_000)?;
    let seed = settings.or_default(args.seed, "seed", 0)?;
    let bins = settings.or_default(args.bins, "bins", 200)?;
    let threads = settings.parse(args.threads, "threads")?;

    let params = field2d::ModelParams::new(mu, duration)?;
    let grid = quadform::TimeGrid::new(params.duration, points)?;
    let kernel = quadform::build_kernel(&grid, params.mu)?;
    let model = quadform::eigen_lambdas(&kernel, 1e-10)?;

    let batch = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| quadform::sample_quadratic(&model, count, seed)),
        None => quadform::sample_quadratic(&model, count, seed),
    };

    let est = stats::shape(&batch.values)?;
    let range = stats::default_histogram_range(&est, batch.lower_bound);
    let hist = stats::histogram(&batch.values, bins, range)?;

    let hist_path = write_file(dir, "sample_histogram.csv", &hist.to_csv())?;
    let shape_path = write_file(dir, "sample_shape.csv", &est.to_csv())?;
    let summary_path = write_file(dir, "sample_summary.csv", &batch.summary_csv()?)?;
    println!("wrote {}", hist_path.display());
    println!("wrote {}", shape_path.display());
    println!("wrote {}", summary_path.display());

    if args.svg {
        let series: Vec<(f64, f64)> = (0..hist.counts.len())
            .map(|i| {
                let mid = hist.lo + (i as f64 + 0.5) * hist.bin_width();
                (mid, hist.density(i))
            })
            .collect();
        let plot = svg::polyline_plot("sample density", "value", "density", &series);
        let svg_path = write_file(dir, "sample_histogram.svg", &plot)?;
        println!("wrote {}", svg_path.display());
    }

    println!(
        "lambdas = {}, lower_bound = {}, frac_negative = {}",
        model.lambdas.len(),
        batch.lower_bound,
        est.frac_below_zero
    );
    Ok(())
}

fn run() -> CliResult<()> {
    let cli = Cli::parse();
    let allowed: &[&str] = match &cli.command {
        Command::Spectrum(_) => &["model", "L", "A", "z", "omega-max", "samples"],
        Command::Energy(_) => &["model", "L", "A", "z", "alpha0", "beta-seq", "tol"],
        Command::Wick(_) => &["n-max"],
        Command::Moments(_) => &["mu", "T", "methods", "N"],
        Command::Sample(_) => &["mu", "T", "N", "count", "seed", "bins", "threads"],
    };
    let settings = Settings::new(cli.config.as_deref(), allowed)?;
    let dir = out_dir(cli.out_dir.as_deref(), &settings);
    match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args, &settings, &dir),
        Command::Energy(args) => cmd_energy(args, &settings, &dir),
        Command::Wick(args) => cmd_wick(args, &settings),
        Command::Moments(args) => cmd_moments(args, &settings),
        Command::Sample(args) => cmd_sample(args, &settings, &dir),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
