//! Command-line surface: `simulate`, `rs`, `sweep` and `render`.
//!
//! All tabular output is CSV, byte-stable for fixed flags. Seeds are always
//! explicit so every artifact is reproducible. Exit codes: 0 success,
//! 1 usage error, 2 runtime/I/O error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis;
use crate::automaton::{self, Grid, SimParams};
use crate::error::Error;
use crate::experiments::{self, SweepSpec, DEFAULT_REALIZATIONS};

#[derive(Debug, Parser)]
#[command(
    name = "callgrid",
    about = "Cellular-automaton telephone-network simulator with R/S self-similarity analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write the busy-count series as CSV.
    Simulate(SimulateArgs),
    /// Compute an R/S curve and Hurst estimate from a series CSV or a fresh run.
    Rs(RsArgs),
    /// Sweep a (lambda, mu) grid over many seeded realizations.
    Sweep(SweepArgs),
    /// Emit periodic grid frames (ASCII counters or portable pixmap).
    Render(RenderArgs),
}

#[derive(Debug, Args, Clone)]
pub struct SimArgs {
    /// Call rate lambda (standby times are Exp(lambda)).
    #[arg(long)]
    pub lambda: f64,
    /// Service rate mu (holding times are Exp(mu)).
    #[arg(long)]
    pub mu: f64,
    #[arg(long, default_value_t = 15)]
    pub width: usize,
    #[arg(long, default_value_t = 15)]
    pub height: usize,
    #[arg(long, default_value_t = 10_000)]
    pub cycles: usize,
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    /// RNG seed; explicit so runs are reproducible.
    #[arg(long)]
    pub seed: u64,
}

impl SimArgs {
    fn to_params(&self) -> SimParams {
        SimParams {
            lambda: self.lambda,
            mu: self.mu,
            width: self.width,
            height: self.height,
            cycles: self.cycles,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RsArgs {
    /// Series CSV to analyse (last comma-separated field per row; a
    /// non-numeric header row is skipped). Mutually exclusive with --lambda.
    #[arg(long, conflicts_with_all = ["lambda", "mu", "seed"])]
    pub input: Option<PathBuf>,

    #[arg(long, required_unless_present = "input")]
    pub lambda: Option<f64>,
    #[arg(long, required_unless_present = "input")]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 15)]
    pub width: usize,
    #[arg(long, default_value_t = 15)]
    pub height: usize,
    #[arg(long, default_value_t = 10_000)]
    pub cycles: usize,
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    #[arg(long, required_unless_present = "input")]
    pub seed: Option<u64>,

    /// Smallest prefix length of the R/S curve.
    #[arg(long, default_value_t = experiments::DEFAULT_MIN_N)]
    pub min_n: usize,
    #[arg(long, default_value_t = experiments::DEFAULT_POINTS_PER_DECADE)]
    pub points_per_decade: usize,
    /// Curve CSV path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated lambda grid.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    /// Comma-separated mu grid.
    #[arg(long, value_delimiter = ',')]
    pub mus: Vec<f64>,
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long, default_value_t = 15)]
    pub width: usize,
    #[arg(long, default_value_t = 15)]
    pub height: usize,
    #[arg(long, default_value_t = 10_000)]
    pub cycles: usize,
    #[arg(long, default_value_t = 500)]
    pub burn_in: usize,
    #[arg(long)]
    pub seed_base: Option<u64>,
    /// key=value spec file (lambdas, mus, realizations, width, height,
    /// cycles, burn_in, seed_base); flags override file values.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Append a comment line with the fitted load constant.
    #[arg(long)]
    pub fit_c: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameFormat {
    Ascii,
    Ppm,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Cycles between rendered frames.
    #[arg(long, default_value_t = 100)]
    pub frame_every: usize,
    #[arg(long, value_enum, default_value_t = FrameFormat::Ascii)]
    pub format: FrameFormat,
    /// Directory receiving frame_NNNNNN.{txt,ppm} files.
    #[arg(long)]
    pub output: PathBuf,
}

/// Process exit status for `main`.
pub enum ExitStatus {
    Success,
    Usage(String),
    Runtime(String),
}

impl ExitStatus {
    pub fn code(&self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Usage(_) => 1,
            ExitStatus::Runtime(_) => 2,
        }
    }
}

fn classify(err: Error) -> ExitStatus {
    match err {
        Error::Io(e) => ExitStatus::Runtime(format!("i/o error: {e}")),
        other => ExitStatus::Usage(other.to_string()),
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), Error> {
    match path {
        Some(path) => fs::write(path, contents).map_err(Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(Error::from)
        }
    }
}

pub fn execute(cli: Cli) -> ExitStatus {
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Rs(args) => cmd_rs(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Render(args) => cmd_render(&args),
    };
    match result {
        Ok(()) => ExitStatus::Success,
        Err(e) => classify(e),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let params = args.sim.to_params();
    params.validate()?;
    let series = automaton::run(&params)?;
    let mut csv = String::from("cycle,busy_count\n");
    for (i, z) in series.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, z));
    }
    write_output(args.output.as_deref(), &csv)
}

fn read_series_csv(path: &Path) -> Result<Vec<f64>, Error> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            // A non-numeric first row is a header.
            Err(_) if lineno == 0 => continue,
            Err(_) => {
                return Err(Error::InvalidParameter {
                    name: "input",
                    reason: format!("line {}: not a number: {field:?}", lineno + 1),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::InvalidParameter {
            name: "input",
            reason: "no numeric rows found".into(),
        });
    }
    Ok(values)
}

pub fn cmd_rs(args: &RsArgs) -> Result<(), Error> {
    let series: Vec<f64> = match &args.input {
        Some(path) => read_series_csv(path)?,
        None => {
            let params = SimParams {
                lambda: args.lambda.expect("enforced by clap"),
                mu: args.mu.expect("enforced by clap"),
                width: args.width,
                height: args.height,
                cycles: args.cycles,
                burn_in: args.burn_in,
                seed: args.seed.expect("enforced by clap"),
            };
            params.validate()?;
            let series = automaton::run(&params)?;
            series[params.burn_in..].iter().map(|&z| z as f64).collect()
        }
    };

    let curve = analysis::rs_curve(&series, args.min_n, args.points_per_decade)?;
    let estimate = analysis::estimate_hurst(&curve)?;

    let mut csv = String::from("n,rs,log2_half_n,log2_rs\n");
    for p in &curve.points {
        csv.push_str(&format!(
            "{},{:.6},{:.6},{:.6}\n",
            p.n,
            p.rs,
            (p.n as f64 / 2.0).log2(),
            p.rs.log2()
        ));
    }
    write_output(args.output.as_deref(), &csv)?;
    println!(
        "H={:.6} intercept={:.6} r2={:.6} points={}",
        estimate.h, estimate.intercept, estimate.r_squared, estimate.n_points
    );
    Ok(())
}

fn parse_spec_file(path: &Path) -> Result<std::collections::HashMap<String, String>, Error> {
    let text = fs::read_to_string(path)?;
    let mut map = std::collections::HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter {
                name: "spec",
                reason: format!("line {}: expected key=value, got {line:?}", lineno + 1),
            })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_list(raw: &str, name: &'static str) -> Result<Vec<f64>, Error> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter {
                    name,
                    reason: format!("not a number: {s:?}"),
                })
        })
        .collect()
}

fn build_sweep_spec(args: &SweepArgs) -> Result<SweepSpec, Error> {
    let file = match &args.spec {
        Some(path) => parse_spec_file(path)?,
        None => Default::default(),
    };
    let get_num = |key: &str, name: &'static str| -> Result<Option<u64>, Error> {
        file.get(key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| Error::InvalidParameter {
                    name,
                    reason: format!("not an integer: {v:?}"),
                })
            })
            .transpose()
    };

    let lambdas = if args.lambdas.is_empty() {
        match file.get("lambdas") {
            Some(raw) => parse_list(raw, "lambdas")?,
            None => {
                return Err(Error::InvalidParameter {
                    name: "lambdas",
                    reason: "missing (use --lambdas or a spec file)".into(),
                })
            }
        }
    } else {
        args.lambdas.clone()
    };
    let mus = if args.mus.is_empty() {
        match file.get("mus") {
            Some(raw) => parse_list(raw, "mus")?,
            None => {
                return Err(Error::InvalidParameter {
                    name: "mus",
                    reason: "missing (use --mus or a spec file)".into(),
                })
            }
        }
    } else {
        args.mus.clone()
    };

    let realizations = match args.realizations {
        Some(r) => r,
        None => get_num("realizations", "realizations")?
            .map(|v| v as usize)
            .unwrap_or(DEFAULT_REALIZATIONS),
    };
    let seed_base = match args.seed_base {
        Some(s) => s,
        None => get_num("seed_base", "seed_base")?.ok_or(Error::InvalidParameter {
            name: "seed_base",
            reason: "missing (seeds must be explicit)".into(),
        })?,
    };
    let width = get_num("width", "width")?
        .map(|v| v as usize)
        .unwrap_or(args.width);
    let height = get_num("height", "height")?
        .map(|v| v as usize)
        .unwrap_or(args.height);
    let cycles = get_num("cycles", "cycles")?
        .map(|v| v as usize)
        .unwrap_or(args.cycles);
    let burn_in = get_num("burn_in", "burn_in")?
        .map(|v| v as usize)
        .unwrap_or(args.burn_in);

    let mut lambdas = lambdas;
    let mut mus = mus;
    lambdas.sort_by(|a, b| a.total_cmp(b));
    mus.sort_by(|a, b| a.total_cmp(b));

    Ok(SweepSpec {
        lambdas,
        mus,
        realizations,
        base_params: SimParams {
            lambda: 1.0,
            mu: 1.0,
            width,
            height,
            cycles,
            burn_in,
            seed: 0,
        },
        seed_base,
    })
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let spec = build_sweep_spec(args)?;
    spec.validate()?;
    let result = experiments::sweep(&spec)?;

    let mut csv = String::from("lambda,mu,mean_z,std_z,mean_h,std_h,realizations_used\n");
    for row in &result.rows {
        csv.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{}\n",
            row.lambda, row.mu, row.mean_z, row.std_z, row.mean_h, row.std_h, row.realizations_used
        ));
    }
    if args.fit_c {
        let cells = spec.base_params.width * spec.base_params.height;
        let fit = experiments::fit_load_constant(&result, cells)?;
        csv.push_str(&format!("# C={:.6} rms={:.6}\n", fit.c, fit.rms_residual));
    }
    write_output(args.output.as_deref(), &csv)
}

/// ASCII frame: signed counters, positive while busy, negative while free.
pub fn ascii_frame(grid: &Grid) -> String {
    let mut out = String::new();
    for row in 0..grid.height {
        let line: Vec<String> = (0..grid.width)
            .map(|col| format!("{:>5}", grid.cell(row, col).signed_counter()))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Plain-text portable pixmap, busy cells dark, free cells light.
pub fn ppm_frame(grid: &Grid) -> String {
    const BUSY: (u8, u8, u8) = (139, 26, 26);
    const FREE: (u8, u8, u8) = (176, 196, 222);
    let mut out = format!("P3\n{} {}\n255\n", grid.width, grid.height);
    for row in 0..grid.height {
        for col in 0..grid.width {
            let (r, g, b) = if grid.cell(row, col).is_busy() {
                BUSY
            } else {
                FREE
            };
            out.push_str(&format!("{r} {g} {b} "));
        }
        out.push('\n');
    }
    out
}

pub fn cmd_render(args: &RenderArgs) -> Result<(), Error> {
    let params = args.sim.to_params();
    params.validate()?;
    if args.frame_every == 0 {
        return Err(Error::InvalidParameter {
            name: "frame_every",
            reason: "must be >= 1".into(),
        });
    }
    fs::create_dir_all(&args.output)?;
    let format = args.format;
    let dir = args.output.clone();
    automaton::run_with_frames(&params, args.frame_every, |grid| {
        let (ext, contents) = match format {
            FrameFormat::Ascii => ("txt", ascii_frame(grid)),
            FrameFormat::Ppm => ("ppm", ppm_frame(grid)),
        };
        let path = dir.join(format!("frame_{:06}.{ext}", grid.cycle));
        fs::write(path, contents).map_err(Error::from)
    })?;
    Ok(())
}
