//! Solver sessions over the SMT-LIB2 text protocol, plus the Sudoku and
//! frame-generator applications built on them.
//!
//! ```no_run
//! use smtlisp::Session;
//!
//! let mut s = Session::open_default()?;
//! s.assert_str("(x :bool y :int)", "(and x (>= y 5))")?;
//! assert!(s.check_sat()?.is_sat());
//! println!("{}", s.model_as_assignment()?);
//! # Ok::<(), smtlisp::SessionError>(())
//! ```

pub mod apps;
pub mod cli;
pub mod config;
pub mod default;
mod process;
pub mod session;

pub use config::SessionConfig;
pub use session::{CheckResult, Session, SessionError, StatValue};
pub use smtlisp_core as core;
