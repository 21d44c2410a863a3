//! Pieces shared by the command-line tools.

use clap::Args;

use crate::config::SessionConfig;

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Solver command line, e.g. "z3 -in". Overrides SMT_SOLVER_PATH.
    #[arg(long, value_name = "PATH+ARGS")]
    pub solver: Option<String>,
    /// Response timeout in milliseconds.
    #[arg(long, value_name = "MS", default_value_t = 60_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout: u64,
}

impl SolverArgs {
    pub fn config(&self) -> SessionConfig {
        SessionConfig {
            cli_solver: self.solver.clone(),
            timeout: std::time::Duration::from_millis(self.timeout),
            ..Default::default()
        }
    }
}

pub fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
}
