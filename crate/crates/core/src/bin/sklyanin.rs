use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sklyanin::cli::{run, Command, Config, ConfigError, Format, HilbertTarget};

#[derive(Parser)]
#[command(name = "sklyanin", version, about = "Exact checks for the Sklyanin algebra and its cocycle twist")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// key=value configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "P/Q")]
    alpha: Option<String>,
    #[arg(long, global = true, value_name = "P/Q")]
    beta: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    max_degree: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum HilbertArg {
    Q,
    Qtilde,
    Btilde,
    KoszulDual,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the parameters and print the derived constants
    Params,
    /// Hilbert functions of Q, Q̃, B̃ or the Koszul duals
    Hilbert {
        #[arg(value_enum)]
        which: HilbertArg,
    },
    /// Centrality of Ω, Ω', Θ, Θ'
    Center,
    /// The cocycle twist of Q and its action on central elements
    Twist,
    /// The twenty points of the point scheme of Q̃
    Points,
    /// Sampling E, singular quadrics, translations, cross-ratios
    Curve,
    /// Line modules attached to the 2-torsion points
    Lines,
    /// Fat point modules of multiplicity two
    Fatpoints,
    /// First cohomology of the Klein group with values in μ₂ × μ₂
    Cohomology,
    /// Strong grading of M_n(k) by clock and shift matrices
    Torsor {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Every check
    VerifyAll,
}

fn config(args: &Args) -> Result<Config, ConfigError> {
    let mut c = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    if let Some(a) = &args.alpha {
        c.set("alpha", a)?;
    }
    if let Some(b) = &args.beta {
        c.set("beta", b)?;
    }
    if let Some(n) = args.max_degree {
        c.max_degree = n;
    }
    if let Some(n) = args.samples {
        c.samples = n;
    }
    if let Some(f) = args.format {
        c.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Md => Format::Markdown,
        };
    }
    c.validate()?;
    Ok(c)
}

fn command(c: &Cmd) -> Command {
    match c {
        Cmd::Params => Command::Params,
        Cmd::Hilbert { which } => Command::Hilbert(match which {
            HilbertArg::Q => HilbertTarget::Q,
            HilbertArg::Qtilde => HilbertTarget::Qtilde,
            HilbertArg::Btilde => HilbertTarget::Btilde,
            HilbertArg::KoszulDual => HilbertTarget::KoszulDual,
        }),
        Cmd::Center => Command::Center,
        Cmd::Twist => Command::Twist,
        Cmd::Points => Command::Points,
        Cmd::Curve => Command::Curve,
        Cmd::Lines => Command::Lines,
        Cmd::Fatpoints => Command::Fatpoints,
        Cmd::Cohomology => Command::Cohomology,
        Cmd::Torsor { n } => Command::Torsor(*n),
        Cmd::VerifyAll => Command::VerifyAll,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(command(&args.command), &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(cfg.format);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}

