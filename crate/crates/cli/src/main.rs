//! `qtunnel`: run tunneling simulations and compare their densities.
//!
//! Exit codes: 0 success, 1 invalid input (config, flags, unreadable runs),
//! 2 runtime failure (propagation abort, output I/O).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qtunnel::io::report::{to_json_line, write_density_csv, write_json};
use qtunnel::io::{dump_config, load_config, load_trajectory, save_trajectory};
use qtunnel::phase_space::DEFAULT_GRID_BINS;
use qtunnel::propagator::DEFAULT_SEED;
use qtunnel::stats::{SamplingPolicy, DEFAULT_DENSITY_FLOOR, DEFAULT_SAMPLES};
use qtunnel::{analyze_run, compare_runs, evolve, plane_wave_transmission, scattering_report, wkb_transmission, Error};
use serde_json::json;

const TRAJECTORY_FILE: &str = "trajectory.qtt";
const AFTER_HELP: &str = "Exit codes: 0 success, 1 invalid input, 2 runtime failure.";

#[derive(Parser)]
#[command(name = "qtunnel", version, about = "1D quantum tunneling simulator and density statistics", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a wavepacket and write trajectory, scattering report and manifest.
    #[command(after_help = AFTER_HELP)]
    Simulate {
        /// Configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Dephasing seed, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress progress and the summary line.
        #[arg(long)]
        quiet: bool,
        /// Also write per-frame |psi|^2 as densities.csv.
        #[arg(long)]
        csv: bool,
    },
    /// Sample one run and report density statistics and phase-space measures.
    #[command(after_help = AFTER_HELP)]
    Analyze {
        /// Run directory written by `simulate`.
        #[arg(long)]
        run: PathBuf,
        /// Report path [default: <RUN>/analysis.json].
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Compare the density distributions of two runs.
    #[command(after_help = AFTER_HELP)]
    Compare {
        #[arg(long)]
        run_a: PathBuf,
        #[arg(long)]
        run_b: PathBuf,
        /// Report path; printed to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Analytic transmission references, printed as JSON.
    #[command(subcommand, after_help = AFTER_HELP)]
    Reference(Reference),
    /// Parse and validate a configuration without running it.
    #[command(after_help = AFTER_HELP)]
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct SamplingArgs {
    /// Total sampled grid points across all frames.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Sampling seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Lattice size per axis for the 2D entropy and mutual information.
    #[arg(long = "bins-2d", default_value_t = DEFAULT_GRID_BINS)]
    bins_2d: usize,
}

impl SamplingArgs {
    fn policy(&self) -> Result<SamplingPolicy, Error> {
        if self.samples == 0 {
            return Err(Error::Contract("--samples must be at least 1".into()));
        }
        Ok(SamplingPolicy {
            n_total: self.samples,
            seed: self.seed,
            density_floor: DEFAULT_DENSITY_FLOOR,
        })
    }
}

#[derive(Subcommand)]
enum Reference {
    /// Rectangular barrier, exact plane-wave transmission.
    PlaneWave {
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        v0: f64,
        #[arg(long)]
        width: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
    },
    /// WKB tunneling probability through the potential of a config file.
    Wkb {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        energy: f64,
    },
}

fn run_id(dir: &Path) -> String {
    dir.file_name()
        .map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Write {
        path: path.to_path_buf(),
        source,
    }
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>, quiet: bool, csv: bool) -> Result<(), Error> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.dephasing.seed = s;
    }
    std::fs::create_dir_all(out).map_err(write_err(out))?;
    if !quiet {
        eprintln!(
            "simulating {} steps on {} points",
            cfg.stepping.n_steps(),
            cfg.grid.n_points
        );
    }
    let start = Instant::now();
    let trajectory = evolve::<f64>(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = scattering_report(&cfg, &trajectory)?;

    save_trajectory(&trajectory, out.join(TRAJECTORY_FILE))?;
    write_json("scattering", &report, out.join("scattering.json"))?;
    let cfg_copy = out.join("config.cfg");
    std::fs::write(&cfg_copy, dump_config(&cfg)).map_err(write_err(&cfg_copy))?;
    let manifest = json!({
        "config_source": config.display().to_string(),
        "config_copy": "config.cfg",
        "trajectory": TRAJECTORY_FILE,
        "n_steps": cfg.stepping.n_steps(),
        "n_frames": trajectory.frames.len(),
        "dephasing_seed": cfg.dephasing.seed,
        "wall_seconds": elapsed,
        "qtunnel_version": env!("CARGO_PKG_VERSION"),
    });
    write_json("manifest", &manifest, out.join("manifest.json"))?;
    if csv {
        write_density_csv(&trajectory, out.join("densities.csv"))?;
    }
    if !quiet {
        println!(
            "T = {:.6}  R = {:.6}  A = {:.6}  total = {:.6}  ({:?}, {elapsed:.1} s)",
            report.transmission, report.reflection, report.absorbed, report.total, report.quality
        );
    }
    Ok(())
}

fn analyze(run: &Path, out: Option<PathBuf>, sampling: &SamplingArgs) -> Result<(), Error> {
    let policy = sampling.policy()?;
    let trajectory = load_trajectory(run.join(TRAJECTORY_FILE))?;
    let analysis = analyze_run(&trajectory, &policy, sampling.bins_2d, &run_id(run))?;
    write_json("analysis", &analysis, out.unwrap_or_else(|| run.join("analysis.json")))
}

fn compare(a: &Path, b: &Path, out: Option<PathBuf>, sampling: &SamplingArgs) -> Result<(), Error> {
    let policy = sampling.policy()?;
    let ta = load_trajectory(a.join(TRAJECTORY_FILE))?;
    let tb = load_trajectory(b.join(TRAJECTORY_FILE))?;
    let report = compare_runs((&ta, &run_id(a)), (&tb, &run_id(b)), &policy, sampling.bins_2d)?;
    match out {
        Some(path) => write_json("comparison", &report, path),
        None => {
            print!("{}", qtunnel::io::to_json_string("comparison", &report)?);
            Ok(())
        }
    }
}

fn reference(r: &Reference) -> Result<(), Error> {
    let result = match r {
        Reference::PlaneWave {
            energy,
            v0,
            width,
            mass,
        } => plane_wave_transmission(*energy, *v0, *width, *mass)?,
        Reference::Wkb { config, energy } => {
            let cfg = load_config(config)?;
            wkb_transmission(&cfg.potential, *energy, cfg.units.mass)?
        }
    };
    println!("{}", to_json_line(&result)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            quiet,
            csv,
        } => simulate(&config, &out, seed, quiet, csv),
        Command::Analyze { run, out, sampling } => analyze(&run, out, &sampling),
        Command::Compare {
            run_a,
            run_b,
            out,
            sampling,
        } => compare(&run_a, &run_b, out, &sampling),
        Command::Reference(r) => reference(&r),
        Command::Validate { config } => {
            load_config(&config)?;
            eprintln!("{}: ok", config.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
