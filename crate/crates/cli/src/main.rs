use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hopf_cyclic_cli::cache::Cache;
use hopf_cyclic_cli::fixtures::shipped;
use hopf_cyclic_cli::run::default_cache_dir;
use hopf_cyclic_cli::{parse_spec, run, CliError, Command, CupChoice, Flags};

#[derive(Parser)]
#[command(name = "hopf-cyclic", version, about = "Hopf-cyclic cohomology and cup products over the rationals")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Truncation degree N of the complexes (overrides `params max_degree`).
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Seed for the basis-permutation check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Do not read or write the complex cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Report format; only text is supported.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Coalgebra,
    Crossed,
    Relative,
    Traces,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every object in the spec against its axioms.
    Validate { spec: PathBuf },
    /// Certify the cocyclic identities and the (b,B) structure of every complex.
    Identities { spec: PathBuf },
    /// HH, HC and HP dimensions.
    Cohomology { spec: PathBuf },
    /// Cup products of cyclic cocycle representatives.
    Cup {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Every check.
    Audit { spec: PathBuf },
    /// The tasks listed under `params tasks=`.
    Run { spec: PathBuf },
    /// Write the shipped fixture specs.
    Fixtures {
        #[arg(long = "dir", default_value = "fixtures")]
        dir: PathBuf,
    },
}

fn io(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let (path, command) = match cli.command {
        Cmd::Fixtures { dir } => {
            fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
            for (name, text) in shipped() {
                let p = dir.join(name);
                fs::write(&p, text).map_err(|e| io(&p, e))?;
                println!("{}", p.display());
            }
            return Ok(0);
        }
        Cmd::Validate { spec } => (spec, Command::Validate),
        Cmd::Identities { spec } => (spec, Command::Identities),
        Cmd::Cohomology { spec } => (spec, Command::Cohomology),
        Cmd::Audit { spec } => (spec, Command::Audit),
        Cmd::Run { spec } => (spec, Command::Tasks),
        Cmd::Cup { spec, kind, p, q } => {
            let kind = match kind {
                Kind::Coalgebra => CupChoice::Coalgebra,
                Kind::Crossed => CupChoice::Crossed,
                Kind::Relative => CupChoice::Relative,
                Kind::Traces => CupChoice::Traces,
            };
            (spec, Command::Cup { kind, p, q })
        }
    };
    let text = fs::read_to_string(&path).map_err(|e| io(&path, e))?;
    let spec = parse_spec(&text)?;
    let cache = if cli.no_cache {
        Cache::disabled()
    } else {
        Cache::new(cli.cache_dir.unwrap_or_else(default_cache_dir))
    };
    let flags = Flags {
        max_degree: cli.max_degree,
        seed: cli.seed,
        cache,
    };
    let report = run(&spec, &command, &flags)?;
    let out = match cli.format {
        Format::Text => report.to_text(),
    };
    match &cli.out {
        Some(p) => fs::write(p, &out).map_err(|e| io(p, e))?,
        None => print!("{out}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
