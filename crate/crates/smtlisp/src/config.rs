use std::time::Duration;

use smtlisp_core::sexpr::SExpr;

/// Environment variable naming the solver command line.
pub const SOLVER_ENV: &str = "SMT_SOLVER_PATH";

/// Command used when nothing else names a solver.
pub const DEFAULT_SOLVER: &[&str] = &["z3", "-in"];

pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(60_000);

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Executable followed by its arguments.
    pub solver: Option<Vec<String>>,
    /// Value of a `--solver` command-line flag, split like a shell would.
    pub cli_solver: Option<String>,
    /// Extra `(set-option ...)` pairs sent after the standard ones.
    pub options: Vec<(String, SExpr)>,
    pub timeout: Duration,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { solver: None, cli_solver: None, options: Vec::new(), timeout: DEFAULT_TIMEOUT }
    }
}

impl SessionConfig {
    /// Config for an explicit command line such as `"z3 -in"`.
    pub fn with_command(command: &str) -> Self {
        SessionConfig { cli_solver: Some(command.to_owned()), ..Default::default() }
    }

    pub fn option(mut self, key: impl Into<String>, value: SExpr) -> Self {
        self.options.push((key.into(), value));
        self
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// The command to run: `solver`, else `cli_solver`, else
    /// `SMT_SOLVER_PATH`, else `z3 -in`.
    pub fn resolve_command(&self) -> Result<Vec<String>, String> {
        resolve_command(self.solver.as_deref(), self.cli_solver.as_deref(), std::env::var(SOLVER_ENV).ok().as_deref())
    }
}

pub fn resolve_command(
    explicit: Option<&[String]>,
    cli: Option<&str>,
    env: Option<&str>,
) -> Result<Vec<String>, String> {
    if let Some(cmd) = explicit.filter(|c| !c.is_empty()) {
        return Ok(cmd.to_vec());
    }
    for text in [cli, env].into_iter().flatten() {
        if text.trim().is_empty() {
            continue;
        }
        return shlex::split(text).filter(|v| !v.is_empty()).ok_or_else(|| text.to_owned());
    }
    Ok(DEFAULT_SOLVER.iter().map(|s| (*s).to_owned()).collect())
}
