pub mod etc;
pub mod sudoku;
