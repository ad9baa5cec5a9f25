use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gifzs::Algorithm;
use gifzs_cli::commands::{self, ApproximateArgs, DistanceArgs, RenderArgs, VerifyArgs};

/// Fuzzy attractors of generalized iterated function systems on a grid.
#[derive(Parser)]
#[command(name = "gifzs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a system to its attractor and write it as a PGM image.
    Render {
        config: PathBuf,
        /// Output image.
        #[arg(short, long)]
        out: PathBuf,
        /// Decay trace; defaults to the image path with a `.tsv` extension.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Route::Suppush)]
        algorithm: Route,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Draw a 1-D attractor as a bar plot this many rows high.
        #[arg(long)]
        bars: Option<usize>,
    },
    /// Print the sup-over-cuts Hausdorff distance between two images.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        domain: DomainFlags,
    },
    /// Fit a system whose attractor is within epsilon of an image.
    Approximate {
        image: PathBuf,
        #[arg(short, long)]
        epsilon: f64,
        /// Where to write the system config.
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        domain: DomainFlags,
    },
    /// Check the cut, collage, monotonicity and contraction properties.
    Verify {
        config: PathBuf,
        /// Random samples for the collage and contraction checks.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct DomainFlags {
    /// Lower box corner, comma separated. Defaults to 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lo: Option<Vec<f64>>,
    /// Upper box corner, comma separated. Defaults to 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    hi: Option<Vec<f64>>,
    /// Identify opposite faces of the box.
    #[arg(long)]
    wrap: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Suppush,
    Levelset,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let mut err = io::stderr();
    let result = match cli.command {
        Command::Render {
            config,
            out: image,
            trace,
            algorithm,
            max_iter,
            tol,
            bars,
        } => {
            let algorithm = match algorithm {
                Route::Suppush => Algorithm::SupPush,
                Route::Levelset => Algorithm::LevelSet,
            };
            let args = RenderArgs {
                config,
                out: image,
                trace,
                algorithm,
                max_iter,
                tol,
                bars,
            };
            commands::render(&args, &mut out, &mut err)
        }
        Command::Distance { a, b, domain } => {
            let args = DistanceArgs {
                a,
                b,
                lo: domain.lo,
                hi: domain.hi,
                wrap: domain.wrap,
            };
            commands::distance(&args, &mut out).map(|_| ())
        }
        Command::Approximate {
            image,
            epsilon,
            out: config,
            domain,
        } => {
            let args = ApproximateArgs {
                image,
                epsilon,
                out: config,
                lo: domain.lo,
                hi: domain.hi,
                wrap: domain.wrap,
            };
            commands::approximate(&args, &mut out)
        }
        Command::Verify {
            config,
            samples,
            seed,
        } => commands::verify(
            &VerifyArgs {
                config,
                samples,
                seed,
            },
            &mut out,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            use std::io::Write;
            let _ = writeln!(err, "gifzs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
