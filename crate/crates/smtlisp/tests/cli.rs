mod common;

use std::process::Command;

use common::{data_dir, puzzle_files, sample_catalog};
use smtlisp::core::etc::parse_frame;
use smtlisp::core::sudoku::{verify_grid, SudokuGrid};

fn sudoku() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sudoku"));
    c.env_remove("SMT_SOLVER_PATH");
    c
}

fn etcgen() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_etcgen"));
    c.env_remove("SMT_SOLVER_PATH");
    c
}

#[test]
fn sudoku_solves_and_checks_uniqueness() {
    let out = sudoku().arg(&puzzle_files()[0]).arg("--check-unique").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let (grid, verdict) = text.trim_end().rsplit_once('\n').unwrap();
    assert_eq!(verdict, "unique");
    assert!(verify_grid(&SudokuGrid::parse(grid, Some(3)).unwrap()));
}

#[test]
fn sudoku_enum_sorts_agree() {
    let plain = sudoku().arg(&puzzle_files()[1]).output().unwrap();
    let enums = sudoku().arg(&puzzle_files()[1]).arg("--enum-sorts").output().unwrap();
    assert!(plain.status.success() && enums.status.success());
    assert_eq!(plain.stdout, enums.stdout);
}

#[test]
fn sudoku_explicit_n_and_unsat() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "1 1 _ _  _ _ _ _  _ _ _ _  _ _ _ _").unwrap();
    let out = sudoku().arg(&path).args(["--n", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "unsat");
    let out = sudoku().arg(&path).args(["--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_selection() {
    let puzzle = &puzzle_files()[0];
    let out = sudoku().arg(puzzle).args(["--solver", "/nonexistent/z3 -in"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver not found"));

    let out = sudoku().arg(puzzle).env("SMT_SOLVER_PATH", "/nonexistent/z3").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // the flag wins over the environment
    let out =
        sudoku().arg(puzzle).env("SMT_SOLVER_PATH", "/nonexistent/z3").args(["--solver", "z3 -in"]).output().unwrap();
    assert!(out.status.success());

    let out = sudoku().arg(puzzle).env("SMT_SOLVER_PATH", "z3 -in").output().unwrap();
    assert!(out.status.success());
}

#[test]
fn etcgen_writes_hex_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("frames.hex");
    let catalog_path = data_dir().join("probe_request.catalog");
    let out = etcgen()
        .arg(&catalog_path)
        .args(["--size", "80", "--count", "4", "--seed", "9", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let catalog = sample_catalog();
    for line in lines {
        assert_eq!(line.len(), 160);
        let bytes: Vec<u8> =
            (0..line.len()).step_by(2).map(|i| u8::from_str_radix(&line[i..i + 2], 16).unwrap()).collect();
        parse_frame(&catalog, &bytes).unwrap();
    }

    // same seed, same frames
    let again = etcgen().arg(&catalog_path).args(["--size", "80", "--count", "4", "--seed", "9"]).output().unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn etcgen_reports_unsat() {
    let out =
        etcgen().arg(data_dir().join("probe_request.catalog")).args(["--size", "3", "--count", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("unsat"));
}
