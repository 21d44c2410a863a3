//! Size-constrained frames: element catalogs, the layout encoding and the
//! deterministic byte filler.
//!
//! A frame is a header followed by elements. Each element is a kind byte, a
//! big-endian body length of `overhead - 1` bytes, and the body.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sexpr::{parse, SExpr, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("malformed catalog: {0}")]
    Malformed(String),
    #[error("element kind {0} is listed twice")]
    DuplicateKind(u8),
    #[error("element kind {kind}: body bounds {min}..{max} are inverted")]
    InvertedBounds { kind: u8, min: u32, max: u32 },
    #[error("element kind {kind}: body of {max} bytes does not fit a {width}-byte length field")]
    BodyTooLarge { kind: u8, max: u32, width: u32 },
    #[error("layout does not match the catalog: {0}")]
    LayoutInvariantViolation(String),
}

fn malformed(msg: impl Into<String>) -> CatalogError {
    CatalogError::Malformed(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ElementSpec {
    pub kind: u8,
    pub body_min: u32,
    pub body_max: u32,
    pub optional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementCatalog {
    pub header_size: u32,
    /// Bytes per element besides the body: the kind byte plus the length
    /// field.
    pub overhead: u32,
    pub elements: Vec<ElementSpec>,
}

fn field<'a>(item: &'a SExpr, name: &str) -> Option<&'a [SExpr]> {
    match item.as_list()? {
        [head, rest @ ..] if head.is_symbol(name) => Some(rest),
        _ => None,
    }
}

fn uint(form: &SExpr, what: &str) -> Result<u32, CatalogError> {
    match form {
        SExpr::Int(n) => u32::try_from(n).map_err(|_| malformed(format!("{what} out of range: {n}"))),
        other => Err(malformed(format!("{what} must be a non-negative integer, got {other}"))),
    }
}

impl ElementCatalog {
    pub fn new(header_size: u32, overhead: u32, elements: Vec<ElementSpec>) -> Result<Self, CatalogError> {
        if !(2..=5).contains(&overhead) {
            return Err(malformed(format!("overhead must be between 2 and 5 bytes, got {overhead}")));
        }
        let width = overhead - 1;
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].iter().any(|o| o.kind == e.kind) {
                return Err(CatalogError::DuplicateKind(e.kind));
            }
            if e.body_min > e.body_max {
                return Err(CatalogError::InvertedBounds { kind: e.kind, min: e.body_min, max: e.body_max });
            }
            if width < 4 && u64::from(e.body_max) >= 1u64 << (8 * width) {
                return Err(CatalogError::BodyTooLarge { kind: e.kind, max: e.body_max, width });
            }
        }
        Ok(ElementCatalog { header_size, overhead, elements })
    }

    /// Parses
    /// `(catalog (header 24) (overhead 2) (element (kind 0) (body 0 32) required) ...)`.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let forms = parse(text)?;
        let [root] = forms.as_slice() else {
            return Err(malformed("expected exactly one (catalog ...) form"));
        };
        let items = field(root, "catalog").ok_or_else(|| malformed("top-level form must be (catalog ...)"))?;
        let mut header = None;
        let mut overhead = None;
        let mut elements = Vec::new();
        for item in items {
            if let Some(args) = field(item, "header") {
                let [v] = args else { return Err(malformed("(header <bytes>)")) };
                header = Some(uint(v, "header")?);
            } else if let Some(args) = field(item, "overhead") {
                let [v] = args else { return Err(malformed("(overhead <bytes>)")) };
                overhead = Some(uint(v, "overhead")?);
            } else if let Some(args) = field(item, "element") {
                elements.push(parse_element(args)?);
            } else {
                return Err(malformed(format!("unexpected catalog entry {item}")));
            }
        }
        let header = header.ok_or_else(|| malformed("missing (header ...)"))?;
        let overhead = overhead.ok_or_else(|| malformed("missing (overhead ...)"))?;
        ElementCatalog::new(header, overhead, elements)
    }

    pub fn element(&self, kind: u8) -> Option<&ElementSpec> {
        self.elements.iter().find(|e| e.kind == kind)
    }

    fn length_width(&self) -> usize {
        (self.overhead - 1) as usize
    }
}

fn parse_element(args: &[SExpr]) -> Result<ElementSpec, CatalogError> {
    let mut kind = None;
    let mut body = None;
    let mut optional = None;
    for a in args {
        if let Some(v) = field(a, "kind") {
            let [v] = v else { return Err(malformed("(kind <id>)")) };
            let k = uint(v, "kind")?;
            kind = Some(u8::try_from(k).map_err(|_| malformed(format!("kind {k} does not fit a byte")))?);
        } else if let Some(v) = field(a, "body") {
            let [lo, hi] = v else { return Err(malformed("(body <min> <max>)")) };
            body = Some((uint(lo, "body min")?, uint(hi, "body max")?));
        } else if a.is_symbol("required") {
            optional = Some(false);
        } else if a.is_symbol("optional") {
            optional = Some(true);
        } else {
            return Err(malformed(format!("unexpected element field {a}")));
        }
    }
    let kind = kind.ok_or_else(|| malformed("element without (kind ...)"))?;
    let (body_min, body_max) = body.ok_or_else(|| malformed(format!("element {kind} without (body ...)")))?;
    let optional = optional.ok_or_else(|| malformed(format!("element {kind} must be `required` or `optional`")))?;
    Ok(ElementSpec { kind, body_min, body_max, optional })
}

pub fn include_var(kind: u8) -> String {
    format!("inc_{kind}")
}

pub fn length_var(kind: u8) -> String {
    format!("len_{kind}")
}

fn sym(s: impl Into<String>) -> SExpr {
    SExpr::sym(s)
}

fn app(head: &str, args: impl IntoIterator<Item = SExpr>) -> SExpr {
    let mut items = alloc::vec![sym(head)];
    items.extend(args);
    SExpr::List(items)
}

/// Inline specifiers for the layout variables.
pub fn layout_specifiers(catalog: &ElementCatalog) -> SExpr {
    SExpr::List(
        catalog
            .elements
            .iter()
            .flat_map(|e| [sym(include_var(e.kind)), sym(":bool"), sym(length_var(e.kind)), sym(":int")])
            .collect(),
    )
}

/// Per-element bounds, independent of the target size.
pub fn element_constraints(catalog: &ElementCatalog) -> Vec<SExpr> {
    let mut out = Vec::new();
    for e in &catalog.elements {
        let inc = sym(include_var(e.kind));
        let len = sym(length_var(e.kind));
        if !e.optional {
            out.push(inc.clone());
        }
        out.push(app(
            "=>",
            [
                inc.clone(),
                app(
                    "and",
                    [
                        app("<=", [SExpr::int(e.body_min), len.clone()]),
                        app("<=", [len.clone(), SExpr::int(e.body_max)]),
                    ],
                ),
            ],
        ));
        out.push(app("=>", [app("not", [inc]), app("=", [len, SExpr::int(0)])]));
    }
    out
}

/// `(= (+ header (ite inc_k (+ overhead len_k) 0) ...) target)`
pub fn size_constraint(catalog: &ElementCatalog, target: u64) -> SExpr {
    let mut sum = alloc::vec![SExpr::int(catalog.header_size)];
    sum.extend(catalog.elements.iter().map(|e| {
        app(
            "ite",
            [
                sym(include_var(e.kind)),
                app("+", [SExpr::int(catalog.overhead), sym(length_var(e.kind))]),
                SExpr::int(0),
            ],
        )
    }));
    app("=", [app("+", sum), SExpr::int(target)])
}

/// Included elements with their body lengths, in catalog order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameLayout {
    pub parts: Vec<(u8, u32)>,
}

impl FrameLayout {
    pub fn total_size(&self, catalog: &ElementCatalog) -> u64 {
        u64::from(catalog.header_size)
            + self.parts.iter().map(|(_, len)| u64::from(catalog.overhead) + u64::from(*len)).sum::<u64>()
    }

    pub fn length_of(&self, kind: u8) -> Option<u32> {
        self.parts.iter().find(|(k, _)| *k == kind).map(|(_, l)| *l)
    }

    /// Checks every part against the catalog bounds and requirements.
    pub fn validate(&self, catalog: &ElementCatalog) -> Result<(), CatalogError> {
        let violation = |m: String| Err(CatalogError::LayoutInvariantViolation(m));
        let mut last: Option<usize> = None;
        for (kind, len) in &self.parts {
            let Some(pos) = catalog.elements.iter().position(|e| e.kind == *kind) else {
                return violation(format!("kind {kind} is not in the catalog"));
            };
            if last.is_some_and(|l| pos <= l) {
                return violation(format!("kind {kind} is out of catalog order"));
            }
            last = Some(pos);
            let e = &catalog.elements[pos];
            if !(e.body_min..=e.body_max).contains(len) {
                return violation(format!(
                    "kind {kind} has body length {len}, outside {}..={}",
                    e.body_min, e.body_max
                ));
            }
        }
        if let Some(e) = catalog.elements.iter().find(|e| !e.optional && self.length_of(e.kind).is_none()) {
            return violation(format!("required kind {} is missing", e.kind));
        }
        Ok(())
    }
}

/// `(not (and (= inc_k b) (= len_k l) ...))` for every catalog element.
pub fn blocking_clause(catalog: &ElementCatalog, layout: &FrameLayout) -> SExpr {
    let mut eqs = alloc::vec![sym("and")];
    for e in &catalog.elements {
        let len = layout.length_of(e.kind);
        let inc = if len.is_some() { "true" } else { "false" };
        eqs.push(app("=", [sym(include_var(e.kind)), sym(inc)]));
        eqs.push(app("=", [sym(length_var(e.kind)), SExpr::int(len.unwrap_or(0))]));
    }
    app("not", [SExpr::List(eqs)])
}

fn element_rng(seed: u64, kind: u8, position: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(kind) << 32) | position as u64);
    rng
}

/// Renders a layout as bytes. Bodies come from a generator seeded by
/// `(seed, kind, position)`; the header is bytes `0, 1, 2, ...`.
pub fn fill_layout(catalog: &ElementCatalog, layout: &FrameLayout, seed: u64) -> Result<Vec<u8>, CatalogError> {
    layout.validate(catalog)?;
    let total = usize::try_from(layout.total_size(catalog))
        .map_err(|_| CatalogError::LayoutInvariantViolation("frame too large".into()))?;
    let mut out = Vec::with_capacity(total);
    out.extend((0..catalog.header_size).map(|i| i as u8));
    let width = catalog.length_width();
    for (position, (kind, len)) in layout.parts.iter().enumerate() {
        out.push(*kind);
        out.extend_from_slice(&len.to_be_bytes()[4 - width.min(4)..]);
        if width > 4 {
            out.splice(out.len() - 4..out.len() - 4, core::iter::repeat_n(0, width - 4));
        }
        let start = out.len();
        out.resize(start + *len as usize, 0);
        element_rng(seed, *kind, position).fill_bytes(&mut out[start..]);
    }
    if out.len() != total {
        return Err(CatalogError::LayoutInvariantViolation(format!(
            "rendered {} bytes, layout says {total}",
            out.len()
        )));
    }
    Ok(out)
}

/// Reads a frame back into its layout.
pub fn parse_frame(catalog: &ElementCatalog, bytes: &[u8]) -> Result<FrameLayout, CatalogError> {
    let bad = |m: &str| CatalogError::LayoutInvariantViolation(m.into());
    let width = catalog.length_width();
    let mut rest = bytes.get(catalog.header_size as usize..).ok_or_else(|| bad("frame shorter than its header"))?;
    let mut parts = Vec::new();
    while let Some((&kind, tail)) = rest.split_first() {
        let len_bytes = tail.get(..width).ok_or_else(|| bad("truncated length field"))?;
        let len = len_bytes.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b));
        let len = u32::try_from(len).map_err(|_| bad("length field too large"))?;
        rest = tail.get(width + len as usize..).ok_or_else(|| bad("truncated body"))?;
        parts.push((kind, len));
    }
    let layout = FrameLayout { parts };
    layout.validate(catalog)?;
    Ok(layout)
}
