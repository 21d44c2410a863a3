use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use smtlisp::apps::sudoku::{SudokuOutcome, SudokuSolver};
use smtlisp::cli::{init_logging, SolverArgs};
use smtlisp::core::sudoku::SudokuGrid;
use smtlisp::Session;

/// Solve an n²×n² Sudoku puzzle. Cells are whitespace separated, `_` marks
/// a blank.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    puzzle_file: PathBuf,
    /// Box dimension; inferred from the cell count when omitted.
    #[arg(long, value_name = "K")]
    n: Option<usize>,
    /// Use an enumeration sort for cell values instead of bounded integers.
    #[arg(long)]
    enum_sorts: bool,
    /// Also report whether the solution is unique.
    #[arg(long)]
    check_unique: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

fn run(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(&cli.puzzle_file).map_err(|e| format!("{}: {e}", cli.puzzle_file.display()))?;
    let grid = SudokuGrid::parse(&text, cli.n)?;
    let mut session = Session::open(cli.solver.config())?;
    let solver = SudokuSolver::install(&mut session, grid.n(), cli.enum_sorts)?;
    let code = match solver.solve_grid(&mut session, &grid)? {
        SudokuOutcome::Solved(solution) => {
            print!("{solution}");
            if cli.check_unique {
                let unique = solver.check_unique(&mut session, &grid, &solution)?;
                println!("{}", if unique { "unique" } else { "not unique" });
            }
            ExitCode::SUCCESS
        }
        SudokuOutcome::Unsat => {
            println!("unsat");
            ExitCode::from(1)
        }
        SudokuOutcome::Unknown(reason) => {
            println!("unknown{}", reason.map(|r| format!(" ({r})")).unwrap_or_default());
            ExitCode::from(1)
        }
    };
    session.close();
    Ok(code)
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    run(&cli).unwrap_or_else(|e| {
        eprintln!("sudoku: {e}");
        ExitCode::from(2)
    })
}
