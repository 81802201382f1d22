use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use midepth::cli::{self, BodySpecFile, ProfileOptions, Run};
use midepth::Error;

#[derive(Parser)]
#[command(name = "midepth", version, about = "Mixed-integer volume, halfspace depth and centerpoints")]
struct Args {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed-integer volume of a body.
    Mivol {
        body: PathBuf,
        #[arg(long)]
        list_fibers: bool,
        /// Also run the layer-cake check and write its level profile as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sampled halfspace depth of a point of S.
    Depth {
        body: PathBuf,
        /// Comma-separated coordinates, e.g. `3,0.5`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1000)]
        dirs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the direction sweep as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Centroid-rounding centerpoint with an optional depth check.
    Centerpoint {
        body: PathBuf,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value_t = 0)]
        verify_dirs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed forms for the ball-fiber family.
    Necessity {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: Option<usize>,
        /// Range of m such as `6..60`; the sweep goes to --csv or stdout.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Seeded property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_body(path: &PathBuf) -> Result<BodySpecFile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    BodySpecFile::parse(&text)
}

fn write(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn execute(args: &Args) -> Result<Run, Error> {
    let (run, csv_path) = match &args.command {
        Command::Mivol { body, list_fibers, profile, grid, samples, seed } => {
            let opts = ProfileOptions { grid: *grid, samples: *samples, seed: *seed };
            let run = cli::cmd_mivol(&read_body(body)?, *list_fibers, profile.as_ref().map(|_| &opts))?;
            (run, profile.clone())
        }
        Command::Depth { body, point, dirs, seed, csv } => {
            let point = cli::parse_point(point)?;
            (cli::cmd_depth(&read_body(body)?, &point, *dirs, *seed, csv.is_some())?, csv.clone())
        }
        Command::Centerpoint { body, k, verify_dirs, seed } => {
            (cli::cmd_centerpoint(&read_body(body)?, *k, *verify_dirs, *seed)?, None)
        }
        Command::Necessity { alpha, k, m, grid, csv } => {
            let grid = grid.as_deref().map(cli::parse_range).transpose()?;
            let run = cli::cmd_necessity(*alpha, *k, *m, grid)?;
            if csv.is_none() {
                if let Some(text) = &run.csv {
                    print!("{text}");
                    return Ok(Run { csv: None, ..run });
                }
            }
            (run, csv.clone())
        }
        Command::Verify { suite, trials, seed } => (cli::cmd_verify(suite, *trials, *seed)?, None),
    };
    if let (Some(path), Some(text)) = (&csv_path, &run.csv) {
        write(path, text)?;
    }
    let json = cli::render(&run.report);
    match &args.out {
        Some(path) => write(path, &json)?,
        None if matches!(args.command, Command::Necessity { grid: Some(_), csv: None, .. }) => {}
        None => print!("{json}"),
    }
    Ok(run)
}

fn threads_from_env() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("MIDEPTH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    threads_from_env();
    match execute(&args) {
        Ok(Run { failure: Some(msg), .. }) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(4)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
