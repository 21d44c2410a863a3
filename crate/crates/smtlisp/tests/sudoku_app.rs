mod common;

use common::{oracle_solutions, puzzle_files, random_4x4_puzzles, z3};
use smtlisp::apps::sudoku::{SudokuOutcome, SudokuSolver};
use smtlisp::core::sudoku::{verify_grid, SudokuGrid};

fn load(path: &std::path::Path) -> SudokuGrid {
    SudokuGrid::parse(&std::fs::read_to_string(path).unwrap(), None).unwrap()
}

#[test]
fn corpus_puzzles_are_well_formed() {
    let files = puzzle_files();
    assert!(files.len() >= 5);
    for f in files {
        let grid = load(&f);
        assert_eq!(grid.n(), 3);
        assert_eq!(oracle_solutions(&grid, 2).len(), 1, "{}", f.display());
    }
}

#[test]
fn corpus_solutions_match_the_oracle() {
    for enum_sorts in [false, true] {
        let mut s = z3();
        let solver = SudokuSolver::install(&mut s, 3, enum_sorts).unwrap();
        for f in puzzle_files() {
            let grid = load(&f);
            let SudokuOutcome::Solved(solution) = solver.solve_grid(&mut s, &grid).unwrap() else {
                panic!("{} not solved", f.display())
            };
            assert!(verify_grid(&solution));
            assert!(grid.agrees_with(&solution));
            assert_eq!(solution, oracle_solutions(&grid, 1).remove(0));
            assert!(solver.check_unique(&mut s, &grid, &solution).unwrap());
        }
        assert_eq!(s.depth(), 1);
    }
}

#[test]
fn contradictory_puzzle_is_unsat() {
    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 3, false).unwrap();
    let mut cells = vec![None; 81];
    cells[0] = Some(5);
    cells[4] = Some(5);
    let grid = SudokuGrid::new(3, cells).unwrap();
    assert_eq!(solver.solve_grid(&mut s, &grid).unwrap(), SudokuOutcome::Unsat);
    assert_eq!(s.depth(), 1);
}

#[test]
fn uniqueness_edge_cases() {
    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 3, false).unwrap();
    let classic = load(&puzzle_files()[0]);
    let solution = oracle_solutions(&classic, 1).remove(0);
    assert!(solver.check_unique(&mut s, &solution, &solution).unwrap());
    // rows of a blank band can be permuted freely
    let mut cells = solution.cells().to_vec();
    cells[..27].fill(None);
    let band = SudokuGrid::new(3, cells).unwrap();
    assert!(oracle_solutions(&band, 2).len() > 1);
    assert!(!solver.check_unique(&mut s, &band, &solution).unwrap());
}

#[test]
fn empty_grid_has_many_solutions() {
    for enum_sorts in [false, true] {
        let mut s = z3();
        let solver = SudokuSolver::install(&mut s, 3, enum_sorts).unwrap();
        let empty = SudokuGrid::empty(3).unwrap();
        let SudokuOutcome::Solved(any) = solver.solve_grid(&mut s, &empty).unwrap() else { panic!() };
        assert!(verify_grid(&any));
        assert!(!solver.check_unique(&mut s, &empty, &any).unwrap());
    }

    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 2, false).unwrap();
    let empty = SudokuGrid::empty(2).unwrap();
    let SudokuOutcome::Solved(any) = solver.solve_grid(&mut s, &empty).unwrap() else { panic!() };
    assert!(!solver.check_unique(&mut s, &empty, &any).unwrap());
}

#[test]
fn degenerate_grid() {
    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 1, false).unwrap();
    let SudokuOutcome::Solved(g) = solver.solve_grid(&mut s, &SudokuGrid::empty(1).unwrap()).unwrap() else { panic!() };
    assert_eq!(g.cells(), &[Some(1)]);
}

#[test]
fn random_4x4_against_backtracking() {
    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 2, false).unwrap();
    for grid in random_4x4_puzzles(50, 11) {
        let expected = oracle_solutions(&grid, 2);
        match solver.solve_grid(&mut s, &grid).unwrap() {
            SudokuOutcome::Unsat => assert!(expected.is_empty(), "{grid}"),
            SudokuOutcome::Solved(sol) => {
                assert!(!expected.is_empty(), "{grid}");
                assert!(verify_grid(&sol) && grid.agrees_with(&sol));
                if expected.len() == 1 {
                    assert_eq!(sol, expected[0]);
                }
                assert_eq!(solver.check_unique(&mut s, &grid, &sol).unwrap(), expected.len() == 1);
            }
            other => panic!("{other:?}"),
        }
    }
    assert_eq!(s.depth(), 1);
}

#[test]
fn hundred_sequential_solves_keep_depth() {
    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 2, false).unwrap();
    for grid in random_4x4_puzzles(100, 3) {
        solver.solve_grid(&mut s, &grid).unwrap();
        assert_eq!(s.depth(), 1);
    }
}

#[test]
fn wrong_dimension_is_rejected() {
    let mut s = z3();
    let solver = SudokuSolver::install(&mut s, 2, false).unwrap();
    assert!(solver.solve_grid(&mut s, &SudokuGrid::empty(3).unwrap()).is_err());
    assert_eq!(s.depth(), 1);
}
