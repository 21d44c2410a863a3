//! Size-constrained frame generation: layouts come from the solver, bytes
//! from the deterministic filler.

use std::collections::HashSet;

use smtlisp_core::etc::{
    blocking_clause, element_constraints, fill_layout, include_var, layout_specifiers, length_var, size_constraint,
    CatalogError, ElementCatalog, FrameLayout,
};
use smtlisp_core::sexpr::SExpr;
use thiserror::Error;

use crate::session::{CheckResult, Session, SessionError};

#[derive(Debug, Error)]
pub enum EtcError {
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

pub type Result<T> = std::result::Result<T, EtcError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    /// Result of the first layout check.
    pub status: CheckResult,
    pub frames: Vec<Vec<u8>>,
}

fn install(session: &mut Session, catalog: &ElementCatalog, target: u64) -> Result<()> {
    session.declare(&layout_specifiers(catalog))?;
    session.assert_all(&element_constraints(catalog))?;
    session.assert_term(None, &size_constraint(catalog, target))?;
    Ok(())
}

fn read_layout(session: &mut Session, catalog: &ElementCatalog) -> Result<FrameLayout> {
    let vars: Vec<SExpr> = catalog
        .elements
        .iter()
        .flat_map(|e| [SExpr::sym(include_var(e.kind)), SExpr::sym(length_var(e.kind))])
        .collect();
    let values = session.eval_all(&vars)?;
    let bad = || CatalogError::LayoutInvariantViolation("solver returned a non-layout value".into());
    let mut parts = Vec::new();
    for (e, pair) in catalog.elements.iter().zip(values.chunks(2)) {
        let included = pair[0].as_bool().ok_or_else(bad)?;
        let len = pair[1].as_i64().and_then(|v| u32::try_from(v).ok()).ok_or_else(bad)?;
        if included {
            parts.push((e.kind, len));
        }
    }
    let layout = FrameLayout { parts };
    layout.validate(catalog)?;
    Ok(layout)
}

/// Layouts of total size `target`, found one check at a time with blocking
/// clauses, up to `limit`. Returns the first check's status.
pub fn enumerate_layouts(
    session: &mut Session,
    catalog: &ElementCatalog,
    target: u64,
    limit: usize,
) -> Result<(CheckResult, Vec<FrameLayout>)> {
    let mut status = None;
    let mut layouts = Vec::new();
    scoped(session, |s| {
        install(s, catalog, target)?;
        while layouts.len() < limit || status.is_none() {
            let result = s.check_sat()?;
            let sat = result.is_sat();
            status.get_or_insert(result);
            if !sat || layouts.len() >= limit {
                break;
            }
            let layout = read_layout(s, catalog)?;
            s.assert_term(None, &blocking_clause(catalog, &layout))?;
            layouts.push(layout);
        }
        Ok(())
    })?;
    Ok((status.expect("at least one check"), layouts))
}

/// One layout of size `target`, if any.
pub fn solve_layout(
    session: &mut Session,
    catalog: &ElementCatalog,
    target: u64,
) -> Result<(CheckResult, Option<FrameLayout>)> {
    let (status, mut layouts) = enumerate_layouts(session, catalog, target, 1)?;
    Ok((status, layouts.pop()))
}

fn scoped(session: &mut Session, f: impl FnOnce(&mut Session) -> Result<()>) -> Result<()> {
    let mut inner = None;
    let outer = session.scoped(|s| {
        inner = Some(f(s));
        Ok(())
    });
    inner.unwrap_or(Ok(()))?;
    Ok(outer?)
}

fn round_seed(seed: u64, round: u64) -> u64 {
    seed.wrapping_add(round.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `count` pairwise-distinct frames of exactly `target` bytes. New layouts
/// are preferred; once they run out, known layouts are refilled with
/// fresh seeds. Fewer frames come back only when no more distinct frames
/// exist.
pub fn generate(
    session: &mut Session,
    catalog: &ElementCatalog,
    target: u64,
    count: usize,
    seed: u64,
) -> Result<Generated> {
    let mut status = None;
    let mut frames = Vec::new();
    let mut seen = HashSet::new();
    scoped(session, |s| {
        install(s, catalog, target)?;
        let mut layouts: Vec<FrameLayout> = Vec::new();
        while frames.len() < count || status.is_none() {
            let result = s.check_sat()?;
            let sat = result.is_sat();
            status.get_or_insert(result);
            if !sat || frames.len() >= count {
                break;
            }
            let layout = read_layout(s, catalog)?;
            s.assert_term(None, &blocking_clause(catalog, &layout))?;
            let frame = fill_layout(catalog, &layout, seed)?;
            if seen.insert(frame.clone()) {
                frames.push(frame);
            }
            layouts.push(layout);
        }
        let refillable: Vec<&FrameLayout> = layouts.iter().filter(|l| l.parts.iter().any(|(_, n)| *n > 0)).collect();
        let mut round = 1u64;
        while frames.len() < count && !refillable.is_empty() && round <= 64 + count as u64 {
            for layout in &refillable {
                if frames.len() >= count {
                    break;
                }
                let frame = fill_layout(catalog, layout, round_seed(seed, round))?;
                if seen.insert(frame.clone()) {
                    frames.push(frame);
                }
            }
            round += 1;
        }
        Ok(())
    })?;
    Ok(Generated { status: status.expect("at least one check"), frames })
}

/// Hex encoding of a frame, two lowercase digits per byte.
pub fn hex_line(frame: &[u8]) -> String {
    frame.iter().map(|b| format!("{b:02x}")).collect()
}
