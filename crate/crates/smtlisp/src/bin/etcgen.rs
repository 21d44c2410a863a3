use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use smtlisp::apps::etc::{generate, hex_line};
use smtlisp::cli::{init_logging, SolverArgs};
use smtlisp::core::etc::ElementCatalog;
use smtlisp::{CheckResult, Session};

/// Generate frames of an exact byte size from an element catalog. Frames
/// are written one per line in hex.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    catalog_file: PathBuf,
    /// Frame size in bytes.
    #[arg(long, value_name = "BYTES")]
    size: u64,
    /// Number of frames to generate.
    #[arg(long, value_name = "K")]
    count: usize,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Write frames here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn run(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let text =
        std::fs::read_to_string(&cli.catalog_file).map_err(|e| format!("{}: {e}", cli.catalog_file.display()))?;
    let catalog = ElementCatalog::parse(&text)?;
    let mut session = Session::open(cli.solver.config())?;
    let generated = generate(&mut session, &catalog, cli.size, cli.count, cli.seed)?;
    session.close();

    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    for frame in &generated.frames {
        writeln!(out, "{}", hex_line(frame))?;
    }
    out.flush()?;
    eprintln!("{}: {} frame(s) of {} bytes", generated.status, generated.frames.len(), cli.size);
    Ok(match generated.status {
        CheckResult::Sat => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    run(&cli).unwrap_or_else(|e| {
        eprintln!("etcgen: {e}");
        ExitCode::from(2)
    })
}
