#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use smtlisp::core::etc::ElementCatalog;
use smtlisp::core::sexpr::SExpr;
use smtlisp::core::sudoku::SudokuGrid;
use smtlisp::{Session, SessionConfig};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn puzzle_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data_dir().join("puzzles"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    files.sort();
    files
}

pub fn sample_catalog() -> ElementCatalog {
    ElementCatalog::parse(&std::fs::read_to_string(data_dir().join("probe_request.catalog")).unwrap()).unwrap()
}

pub fn z3() -> Session {
    Session::open(SessionConfig::with_command("z3 -in")).expect("z3 on PATH")
}

/// A cvc5 command line: `CVC5_PATH`, a `cvc5` binary on PATH, or the
/// bundled Python front end.
pub fn cvc5_command() -> Option<String> {
    if let Ok(p) = std::env::var("CVC5_PATH") {
        if !p.trim().is_empty() {
            return Some(p);
        }
    }
    let on_path = std::env::var_os("PATH")
        .into_iter()
        .flat_map(|p| std::env::split_paths(&p).collect::<Vec<_>>())
        .any(|d| d.join("cvc5").is_file());
    if on_path {
        return Some("cvc5 --incremental --lang=smt2".into());
    }
    let shim = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../tools/cvc5-smt2");
    let shim = shim.canonicalize().ok()?;
    let probe = std::process::Command::new("python3")
        .args(["-c", "import cvc5"])
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .ok()?;
    probe.success().then(|| shim.display().to_string())
}

pub fn cvc5() -> Option<Session> {
    let cmd = cvc5_command()?;
    match Session::open(SessionConfig::with_command(&cmd)) {
        Ok(s) => Some(s),
        Err(e) => {
            eprintln!("cvc5 unavailable ({cmd}): {e}");
            None
        }
    }
}

pub fn p(text: &str) -> SExpr {
    smtlisp::core::sexpr::parse_one(text).unwrap()
}

// ---- Sudoku oracle ---------------------------------------------------------

fn candidates(cells: &[u32], n: usize, i: usize) -> Vec<u32> {
    let side = n * n;
    let (r, c) = (i / side, i % side);
    let (br, bc) = (r / n * n, c / n * n);
    let mut used = vec![false; side + 1];
    for k in 0..side {
        used[cells[r * side + k] as usize] = true;
        used[cells[k * side + c] as usize] = true;
        used[cells[(br + k / n) * side + bc + k % n] as usize] = true;
    }
    (1..=side as u32).filter(|v| !used[*v as usize]).collect()
}

fn search(cells: &mut Vec<u32>, n: usize, limit: usize, found: &mut Vec<Vec<u32>>) {
    if found.len() >= limit {
        return;
    }
    let mut best: Option<(usize, Vec<u32>)> = None;
    for i in 0..cells.len() {
        if cells[i] == 0 {
            let cs = candidates(cells, n, i);
            if cs.is_empty() {
                return;
            }
            if best.as_ref().is_none_or(|(_, b)| cs.len() < b.len()) {
                best = Some((i, cs));
            }
        }
    }
    let Some((i, cs)) = best else {
        found.push(cells.clone());
        return;
    };
    for v in cs {
        cells[i] = v;
        search(cells, n, limit, found);
        cells[i] = 0;
    }
}

/// Up to `limit` completions of `grid`, found by backtracking.
pub fn oracle_solutions(grid: &SudokuGrid, limit: usize) -> Vec<SudokuGrid> {
    let n = grid.n();
    let mut cells: Vec<u32> = grid.cells().iter().map(|c| c.unwrap_or(0)).collect();
    // givens that already clash have no completion
    for i in 0..cells.len() {
        if cells[i] != 0 {
            let v = std::mem::replace(&mut cells[i], 0);
            let ok = candidates(&cells, n, i).contains(&v);
            cells[i] = v;
            if !ok {
                return Vec::new();
            }
        }
    }
    let mut found = Vec::new();
    search(&mut cells, n, limit, &mut found);
    found.into_iter().map(|c| SudokuGrid::new(n, c.into_iter().map(Some).collect()).unwrap()).collect()
}

/// Random 4x4 puzzles: blanked solutions, with every third one given a
/// random extra clue that may contradict.
pub fn random_4x4_puzzles(count: usize, seed: u64) -> Vec<SudokuGrid> {
    let mut rng = StdRng::seed_from_u64(seed);
    let empty = SudokuGrid::empty(2).unwrap();
    let all = oracle_solutions(&empty, usize::MAX);
    (0..count)
        .map(|k| {
            let solution = all.choose(&mut rng).unwrap();
            let keep = rng.random_range(0..=10);
            let mut idx: Vec<usize> = (0..16).collect();
            idx.shuffle(&mut rng);
            let mut cells = vec![None; 16];
            for &i in &idx[..keep] {
                cells[i] = solution.cells()[i];
            }
            if k % 3 == 2 {
                cells[idx[15]] = Some(rng.random_range(1..=4));
            }
            SudokuGrid::new(2, cells).unwrap()
        })
        .collect()
}

// ---- catalog oracle --------------------------------------------------------

/// Every total size reachable by some include vector, from the per-subset
/// intervals.
pub fn feasible_sizes(catalog: &ElementCatalog) -> std::collections::BTreeSet<u64> {
    let optional: Vec<_> = catalog.elements.iter().filter(|e| e.optional).collect();
    let required: Vec<_> = catalog.elements.iter().filter(|e| !e.optional).collect();
    let mut sizes = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << optional.len()) {
        let chosen =
            required.iter().chain(optional.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e));
        let (mut lo, mut hi) = (u64::from(catalog.header_size), u64::from(catalog.header_size));
        for e in chosen {
            lo += u64::from(catalog.overhead + e.body_min);
            hi += u64::from(catalog.overhead + e.body_max);
        }
        sizes.extend(lo..=hi);
    }
    sizes
}

/// Number of (include, length) vectors with total `target`, by brute force.
pub fn count_layouts(catalog: &ElementCatalog, target: u64) -> usize {
    fn go(catalog: &ElementCatalog, i: usize, remaining: i64) -> usize {
        let Some(e) = catalog.elements.get(i) else { return usize::from(remaining == 0) };
        let mut total = 0;
        if e.optional {
            total += go(catalog, i + 1, remaining);
        }
        for len in e.body_min..=e.body_max {
            total += go(catalog, i + 1, remaining - i64::from(catalog.overhead + len));
        }
        total
    }
    go(catalog, 0, target as i64 - i64::from(catalog.header_size))
}

// ---- random formulas -------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Bool,
    Int,
    Bv,
}

pub struct FormulaGen {
    rng: StdRng,
    vars: Vec<(String, Kind)>,
}

fn app(head: &str, args: Vec<SExpr>) -> SExpr {
    let mut items = vec![SExpr::sym(head)];
    items.extend(args);
    SExpr::List(items)
}

impl FormulaGen {
    pub fn new(seed: u64) -> Self {
        FormulaGen { rng: StdRng::seed_from_u64(seed), vars: Vec::new() }
    }

    /// Picks fresh variables; returns the inline specifier list.
    pub fn variables(&mut self) -> SExpr {
        let n = self.rng.random_range(1..=6);
        self.vars = (0..n)
            .map(|i| {
                let kind = [Kind::Bool, Kind::Int, Kind::Bv][self.rng.random_range(0..3)];
                (format!("v{i}"), kind)
            })
            .collect();
        SExpr::List(
            self.vars
                .iter()
                .flat_map(|(name, k)| {
                    let spec = match k {
                        Kind::Bool => SExpr::sym(":bool"),
                        Kind::Int => SExpr::sym(":int"),
                        Kind::Bv => app(":bv", vec![SExpr::int(8)]),
                    };
                    [SExpr::sym(name.clone()), spec]
                })
                .collect(),
        )
    }

    pub fn assertions(&mut self) -> Vec<SExpr> {
        let n = self.rng.random_range(1..=8);
        (0..n).map(|_| self.term(Kind::Bool, 3)).collect()
    }

    fn var_of(&mut self, kind: Kind) -> Option<SExpr> {
        let names: Vec<&String> = self.vars.iter().filter(|(_, k)| *k == kind).map(|(n, _)| n).collect();
        if names.is_empty() {
            return None;
        }
        Some(SExpr::sym(names[self.rng.random_range(0..names.len())].clone()))
    }

    fn leaf(&mut self, kind: Kind) -> SExpr {
        if self.rng.random_bool(0.7) {
            if let Some(v) = self.var_of(kind) {
                return v;
            }
        }
        match kind {
            Kind::Bool => SExpr::sym(if self.rng.random_bool(0.5) { "true" } else { "false" }),
            Kind::Int => SExpr::int(self.rng.random_range(-10i64..=10)),
            Kind::Bv => SExpr::bitvec(8, self.rng.random_range(0u32..256)).unwrap(),
        }
    }

    pub fn term(&mut self, kind: Kind, depth: u32) -> SExpr {
        if depth == 0 || self.rng.random_bool(0.25) {
            return self.leaf(kind);
        }
        let d = depth - 1;
        match kind {
            Kind::Bool => match self.rng.random_range(0..9) {
                0 => app("and", vec![self.term(Kind::Bool, d), self.term(Kind::Bool, d)]),
                1 => app("or", vec![self.term(Kind::Bool, d), self.term(Kind::Bool, d)]),
                2 => app("not", vec![self.term(Kind::Bool, d)]),
                3 => app("=>", vec![self.term(Kind::Bool, d), self.term(Kind::Bool, d)]),
                4 => {
                    let op = ["<=", "<", ">=", ">"][self.rng.random_range(0..4)];
                    app(op, vec![self.term(Kind::Int, d), self.term(Kind::Int, d)])
                }
                5 => {
                    let op = ["bvult", "bvule"][self.rng.random_range(0..2)];
                    app(op, vec![self.term(Kind::Bv, d), self.term(Kind::Bv, d)])
                }
                6 => {
                    let k = [Kind::Bool, Kind::Int, Kind::Bv][self.rng.random_range(0..3)];
                    app("=", vec![self.term(k, d), self.term(k, d)])
                }
                7 => {
                    let k = [Kind::Int, Kind::Bv][self.rng.random_range(0..2)];
                    app("distinct", vec![self.term(k, d), self.term(k, d), self.term(k, d)])
                }
                _ => app("ite", vec![self.term(Kind::Bool, d), self.term(Kind::Bool, d), self.term(Kind::Bool, d)]),
            },
            Kind::Int => match self.rng.random_range(0..5) {
                0 => app("+", vec![self.term(Kind::Int, d), self.term(Kind::Int, d)]),
                1 => app("-", vec![self.term(Kind::Int, d), self.term(Kind::Int, d)]),
                2 => app("*", vec![SExpr::int(self.rng.random_range(-3i64..=3)), self.term(Kind::Int, d)]),
                3 => app("abs", vec![self.term(Kind::Int, d)]),
                _ => app("ite", vec![self.term(Kind::Bool, d), self.term(Kind::Int, d), self.term(Kind::Int, d)]),
            },
            Kind::Bv => {
                let op = ["bvadd", "bvand", "bvxor", "bvor"][self.rng.random_range(0..4)];
                if self.rng.random_bool(0.2) {
                    app("bvnot", vec![self.term(Kind::Bv, d)])
                } else {
                    app(op, vec![self.term(Kind::Bv, d), self.term(Kind::Bv, d)])
                }
            }
        }
    }
}
