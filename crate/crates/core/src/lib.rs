//! Solver-independent core: S-expressions, sorts, declarations, typed
//! terms, model decoding and the two demonstration encodings.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod etc;
pub mod model;
pub mod scope;
pub mod sexpr;
pub mod sort;
pub mod sudoku;
pub mod term;
