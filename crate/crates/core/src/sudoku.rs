//! n×n Sudoku: grids, the constraint encoding and a solution checker.
//!
//! A grid with box dimension `n` has side `n²` and `n⁴` cells, numbered
//! row-major. Cell `i` is the solver variable `C<i>`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::sexpr::SExpr;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("malformed grid: {0}")]
    MalformedGrid(String),
}

fn malformed(msg: impl Into<String>) -> GridError {
    GridError::MalformedGrid(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SudokuGrid {
    n: usize,
    cells: Vec<Option<u32>>,
}

impl SudokuGrid {
    pub fn new(n: usize, cells: Vec<Option<u32>>) -> Result<Self, GridError> {
        if n == 0 {
            return Err(malformed("box dimension must be at least 1"));
        }
        let count = n.checked_pow(4).ok_or_else(|| malformed("box dimension too large"))?;
        if cells.len() != count {
            return Err(malformed(format!("expected {count} cells, found {}", cells.len())));
        }
        let side = (n * n) as u32;
        if let Some((i, v)) =
            cells.iter().enumerate().find_map(|(i, c)| c.filter(|v| !(1..=side).contains(v)).map(|v| (i, v)))
        {
            return Err(malformed(format!("cell {i} holds {v}, outside 1..={side}")));
        }
        Ok(SudokuGrid { n, cells })
    }

    pub fn empty(n: usize) -> Result<Self, GridError> {
        let count = n.checked_pow(4).ok_or_else(|| malformed("box dimension too large"))?;
        SudokuGrid::new(n, alloc::vec![None; count])
    }

    /// Parses whitespace-separated tokens, `_` for a blank, row-major.
    /// Text after `;` on a line is ignored. `n` is inferred from the token
    /// count unless given.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Self, GridError> {
        let tokens: Vec<&str> =
            text.lines().map(|l| l.split(';').next().unwrap_or("")).flat_map(str::split_whitespace).collect();
        let n = match n {
            Some(n) => n,
            None => (1..=16usize)
                .find(|k| k.pow(4) == tokens.len())
                .ok_or_else(|| malformed(format!("{} cells is not n^4 for any n", tokens.len())))?,
        };
        let cells = tokens
            .iter()
            .map(|t| match *t {
                "_" => Ok(None),
                t => t.parse::<u32>().map(Some).map_err(|_| malformed(format!("bad token `{t}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        SudokuGrid::new(n, cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        self.n * self.n
    }

    pub fn cells(&self) -> &[Option<u32>] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u32> {
        self.cells[row * self.side() + col]
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// Whether every given cell of `self` holds the same value in `other`.
    pub fn agrees_with(&self, other: &SudokuGrid) -> bool {
        self.n == other.n && self.cells.iter().zip(&other.cells).all(|(a, b)| a.is_none() || a == b)
    }
}

impl fmt::Display for SudokuGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = self.side();
        let width = format!("{side}").len();
        for row in self.cells.chunks(side) {
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                match c {
                    Some(v) => write!(f, "{v:>width$}")?,
                    None => write!(f, "{:>width$}", "_")?,
                }
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

pub fn cell_var(index: usize) -> String {
    format!("C{index}")
}

/// Index of the top-left cell of every box.
pub fn box_starts(n: usize) -> Vec<usize> {
    let side = n * n;
    (0..n).flat_map(|br| (0..n).map(move |bc| br * n * side + bc * n)).collect()
}

/// Offsets of a box's cells from its top-left cell.
pub fn box_offsets(n: usize) -> Vec<usize> {
    let side = n * n;
    (0..n).flat_map(|r| (0..n).map(move |c| r * side + c)).collect()
}

/// Rows, then columns, then boxes, each as a list of cell indices.
pub fn groups(n: usize) -> Vec<Vec<usize>> {
    let side = n * n;
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(3 * side);
    out.extend((0..side).map(|r| (0..side).map(|c| r * side + c).collect()));
    out.extend((0..side).map(|c| (0..side).map(|r| r * side + c).collect()));
    let offsets = box_offsets(n);
    out.extend(box_starts(n).into_iter().map(|s| offsets.iter().map(|o| s + o).collect()));
    out
}

/// The puzzle-independent part of the encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseConstraints {
    /// Inline specifier list `(C0 <sort> C1 <sort> ...)`.
    pub specifiers: SExpr,
    pub constraints: Vec<SExpr>,
}

fn distincts(n: usize) -> impl Iterator<Item = SExpr> {
    groups(n).into_iter().filter(|g| g.len() >= 2).map(|g| {
        let mut items = alloc::vec![SExpr::sym("distinct")];
        items.extend(g.into_iter().map(|i| SExpr::sym(cell_var(i))));
        SExpr::List(items)
    })
}

fn specifiers(n: usize, sort: &str) -> SExpr {
    SExpr::List((0..n.pow(4)).flat_map(|i| [SExpr::sym(cell_var(i)), SExpr::sym(sort)]).collect())
}

/// Integer cells ranging over `1..=n²` and distinct rows, columns and boxes.
///
/// The range is written as `(or (= C 1) ... (= C n²))`. z3 solves 9x9 grids
/// an order of magnitude faster this way than with a pair of bounds.
pub fn base_constraints(n: usize) -> BaseConstraints {
    let side = (n * n) as u64;
    let mut constraints: Vec<SExpr> = Vec::new();
    for i in 0..n.pow(4) {
        let var = SExpr::sym(cell_var(i));
        let eq = |v: u64| SExpr::list([SExpr::sym("="), var.clone(), SExpr::int(v)]);
        constraints.push(if side == 1 {
            eq(1)
        } else {
            SExpr::List(core::iter::once(SExpr::sym("or")).chain((1..=side).map(eq)).collect())
        });
    }
    constraints.extend(distincts(n));
    BaseConstraints { specifiers: specifiers(n, ":int"), constraints }
}

/// Name of the enumeration sort used by [`base_constraints_enum`].
pub const SQUARE_SORT: &str = ":square";

/// Labels `1..=n²` of the enumeration sort.
pub fn square_labels(n: usize) -> Vec<SExpr> {
    (1..=(n * n) as u64).map(SExpr::int).collect()
}

/// Cells of the enumeration sort [`SQUARE_SORT`]; the range is implied by
/// the sort.
pub fn base_constraints_enum(n: usize) -> BaseConstraints {
    BaseConstraints { specifiers: specifiers(n, SQUARE_SORT), constraints: distincts(n).collect() }
}

/// One `(= C<i> v)` per given cell.
pub fn input_constraints(grid: &SudokuGrid) -> Vec<SExpr> {
    grid.cells
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|v| SExpr::list([SExpr::sym("="), SExpr::sym(cell_var(i)), SExpr::int(v)])))
        .collect()
}

/// `(not (and (= C0 v0) ...))` over every cell of a complete grid.
pub fn exclusion_constraint(solution: &SudokuGrid) -> SExpr {
    let mut eqs = alloc::vec![SExpr::sym("and")];
    eqs.extend(input_constraints(solution));
    SExpr::list([SExpr::sym("not"), SExpr::List(eqs)])
}

/// True iff the grid is complete and every group is a permutation of
/// `1..=n²`.
pub fn verify_grid(grid: &SudokuGrid) -> bool {
    if !grid.is_complete() {
        return false;
    }
    let side = grid.side();
    groups(grid.n).iter().all(|g| {
        let mut seen = alloc::vec![false; side + 1];
        g.iter().all(|&i| {
            let v = grid.cells[i].unwrap() as usize;
            !core::mem::replace(&mut seen[v], true)
        })
    })
}
