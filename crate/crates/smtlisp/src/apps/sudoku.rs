//! Sudoku on a solver session. Base constraints are asserted once at the
//! base level; every puzzle is solved inside its own pushed scope.

use smtlisp_core::model::HostValue;
use smtlisp_core::sexpr::SExpr;
use smtlisp_core::sudoku::{
    base_constraints, base_constraints_enum, cell_var, exclusion_constraint, input_constraints, square_labels,
    SudokuGrid, SQUARE_SORT,
};

use crate::session::{CheckResult, Result, Session, SessionError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SudokuOutcome {
    Solved(SudokuGrid),
    Unsat,
    Unknown(Option<String>),
}

#[derive(Clone, Debug)]
pub struct SudokuSolver {
    n: usize,
    enum_sorts: bool,
}

impl SudokuSolver {
    /// Declares the cells of an `n²×n²` grid and asserts the base
    /// constraints at the session's current level.
    pub fn install(session: &mut Session, n: usize, enum_sorts: bool) -> Result<Self> {
        let base = if enum_sorts {
            session.register_enum(SQUARE_SORT, &square_labels(n))?;
            base_constraints_enum(n)
        } else {
            base_constraints(n)
        };
        session.declare(&base.specifiers)?;
        session.assert_all(&base.constraints)?;
        Ok(SudokuSolver { n, enum_sorts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_grid(&self, grid: &SudokuGrid) -> Result<()> {
        if grid.n() != self.n {
            return Err(SessionError::UnexpectedResponse {
                command: "solve-grid".into(),
                response: format!("grid has box dimension {}, solver was set up for {}", grid.n(), self.n),
            });
        }
        Ok(())
    }

    fn read_grid(&self, session: &mut Session) -> Result<SudokuGrid> {
        let vars: Vec<SExpr> = (0..self.n.pow(4)).map(|i| SExpr::sym(cell_var(i))).collect();
        let values = session.eval_all(&vars)?;
        let cells = values
            .iter()
            .map(|v| match v {
                HostValue::Int(_) => v.as_i64().and_then(|x| u32::try_from(x).ok()),
                HostValue::EnumMember { label: SExpr::Int(i), .. } if self.enum_sorts => u32::try_from(i).ok(),
                _ => None,
            })
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| SessionError::UnexpectedResponse {
                command: "get-value".into(),
                response: "non-integer cell value".into(),
            })?;
        SudokuGrid::new(self.n, cells.into_iter().map(Some).collect())
            .map_err(|e| SessionError::UnexpectedResponse { command: "get-value".into(), response: e.to_string() })
    }

    /// Solves one puzzle; the session is left at the depth it started at.
    pub fn solve_grid(&self, session: &mut Session, grid: &SudokuGrid) -> Result<SudokuOutcome> {
        self.check_grid(grid)?;
        session.scoped(|s| {
            s.assert_all(&input_constraints(grid))?;
            Ok(match s.check_sat()? {
                CheckResult::Sat => SudokuOutcome::Solved(self.read_grid(s)?),
                CheckResult::Unsat => SudokuOutcome::Unsat,
                CheckResult::Unknown(r) => SudokuOutcome::Unknown(r),
            })
        })
    }

    /// True iff `solution` is the only completion of `grid`.
    pub fn check_unique(&self, session: &mut Session, grid: &SudokuGrid, solution: &SudokuGrid) -> Result<bool> {
        self.check_grid(grid)?;
        session.scoped(|s| {
            s.assert_all(&input_constraints(grid))?;
            s.assert_term(None, &exclusion_constraint(solution))?;
            Ok(s.check_sat()?.is_unsat())
        })
    }
}
