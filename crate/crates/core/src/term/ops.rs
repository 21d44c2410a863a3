//! Builtin operator table.

use alloc::string::String;
use core::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl Arity {
    pub fn admits(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::AtLeast(k) => n >= k,
        }
    }
}

impl core::fmt::Display for Arity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Arity::Exactly(k) => write!(f, "{k}"),
            Arity::AtLeast(k) => write!(f, "{k}+"),
        }
    }
}

/// How an operator's result sort follows from its argument sorts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Bool* -> Bool
    Bools,
    /// T* -> Bool, all arguments of one sort
    Uniform,
    /// Bool T T -> T
    Ite,
    /// numeric* -> Int or Real
    Arith,
    /// numeric* -> Bool
    ArithCmp,
    /// numeric* -> Real
    RealDiv,
    /// Int* -> Int
    Ints,
    ToReal,
    ToInt,
    IsInt,
    /// (BitVec w)* -> BitVec w
    Bvs,
    /// (BitVec w)* -> Bool
    BvCmp,
    Concat,
    Extract,
    SeqUnit,
    SeqConcat,
    SeqLen,
    SeqAt,
    /// S S -> Bool for a sequence or String sort S
    SeqPred,
    Select,
    Store,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    /// Name to emit when the first argument has sort `String`.
    pub string_name: Option<&'static str>,
    pub arity: Arity,
    pub indices: usize,
    pub rule: Rule,
    pub signature: &'static str,
}

const fn op(name: &'static str, arity: Arity, rule: Rule, signature: &'static str) -> OperatorEntry {
    OperatorEntry { name, aliases: &[], string_name: None, arity, indices: 0, rule, signature }
}

const fn aliased(
    name: &'static str,
    aliases: &'static [&'static str],
    arity: Arity,
    rule: Rule,
    signature: &'static str,
) -> OperatorEntry {
    OperatorEntry { name, aliases, string_name: None, arity, indices: 0, rule, signature }
}

const fn seq_op(
    name: &'static str,
    string_name: &'static str,
    arity: Arity,
    rule: Rule,
    signature: &'static str,
) -> OperatorEntry {
    OperatorEntry { name, aliases: &[], string_name: Some(string_name), arity, indices: 0, rule, signature }
}

use Arity::{AtLeast, Exactly};

pub static OPERATORS: &[OperatorEntry] = &[
    op("and", AtLeast(0), Rule::Bools, "Bool* -> Bool"),
    op("or", AtLeast(0), Rule::Bools, "Bool* -> Bool"),
    op("not", Exactly(1), Rule::Bools, "Bool -> Bool"),
    op("xor", AtLeast(2), Rule::Bools, "Bool Bool+ -> Bool"),
    aliased("=>", &["implies"], AtLeast(2), Rule::Bools, "Bool Bool+ -> Bool"),
    aliased("ite", &["if"], Exactly(3), Rule::Ite, "Bool T T -> T"),
    op("=", AtLeast(1), Rule::Uniform, "T T* -> Bool"),
    op("distinct", AtLeast(1), Rule::Uniform, "T T* -> Bool"),
    op("+", AtLeast(0), Rule::Arith, "N* -> N"),
    op("-", AtLeast(1), Rule::Arith, "N N* -> N"),
    op("*", AtLeast(0), Rule::Arith, "N* -> N"),
    op("/", AtLeast(2), Rule::RealDiv, "N N+ -> Real"),
    op("div", AtLeast(2), Rule::Ints, "Int Int+ -> Int"),
    op("mod", Exactly(2), Rule::Ints, "Int Int -> Int"),
    op("rem", Exactly(2), Rule::Ints, "Int Int -> Int"),
    op("abs", Exactly(1), Rule::Ints, "Int -> Int"),
    op("<=", AtLeast(2), Rule::ArithCmp, "N N+ -> Bool"),
    op("<", AtLeast(2), Rule::ArithCmp, "N N+ -> Bool"),
    op(">=", AtLeast(2), Rule::ArithCmp, "N N+ -> Bool"),
    op(">", AtLeast(2), Rule::ArithCmp, "N N+ -> Bool"),
    op("to_real", Exactly(1), Rule::ToReal, "Int -> Real"),
    op("to_int", Exactly(1), Rule::ToInt, "Real -> Int"),
    op("is_int", Exactly(1), Rule::IsInt, "Real -> Bool"),
    op("bvadd", AtLeast(2), Rule::Bvs, "(BitVec w) (BitVec w)+ -> (BitVec w)"),
    op("bvsub", Exactly(2), Rule::Bvs, "(BitVec w) (BitVec w) -> (BitVec w)"),
    op("bvmul", AtLeast(2), Rule::Bvs, "(BitVec w) (BitVec w)+ -> (BitVec w)"),
    op("bvudiv", Exactly(2), Rule::Bvs, "(BitVec w) (BitVec w) -> (BitVec w)"),
    op("bvurem", Exactly(2), Rule::Bvs, "(BitVec w) (BitVec w) -> (BitVec w)"),
    op("bvshl", Exactly(2), Rule::Bvs, "(BitVec w) (BitVec w) -> (BitVec w)"),
    op("bvlshr", Exactly(2), Rule::Bvs, "(BitVec w) (BitVec w) -> (BitVec w)"),
    op("bvand", AtLeast(2), Rule::Bvs, "(BitVec w) (BitVec w)+ -> (BitVec w)"),
    op("bvor", AtLeast(2), Rule::Bvs, "(BitVec w) (BitVec w)+ -> (BitVec w)"),
    op("bvxor", AtLeast(2), Rule::Bvs, "(BitVec w) (BitVec w)+ -> (BitVec w)"),
    op("bvnot", Exactly(1), Rule::Bvs, "(BitVec w) -> (BitVec w)"),
    op("bvneg", Exactly(1), Rule::Bvs, "(BitVec w) -> (BitVec w)"),
    op("bvult", Exactly(2), Rule::BvCmp, "(BitVec w) (BitVec w) -> Bool"),
    op("bvule", Exactly(2), Rule::BvCmp, "(BitVec w) (BitVec w) -> Bool"),
    op("bvugt", Exactly(2), Rule::BvCmp, "(BitVec w) (BitVec w) -> Bool"),
    op("bvuge", Exactly(2), Rule::BvCmp, "(BitVec w) (BitVec w) -> Bool"),
    op("bvslt", Exactly(2), Rule::BvCmp, "(BitVec w) (BitVec w) -> Bool"),
    op("bvsle", Exactly(2), Rule::BvCmp, "(BitVec w) (BitVec w) -> Bool"),
    op("concat", Exactly(2), Rule::Concat, "(BitVec a) (BitVec b) -> (BitVec a+b)"),
    OperatorEntry {
        name: "extract",
        aliases: &[],
        string_name: None,
        arity: Exactly(1),
        indices: 2,
        rule: Rule::Extract,
        signature: "(_ extract i j): (BitVec w) -> (BitVec i-j+1), w > i >= j",
    },
    op("seq.unit", Exactly(1), Rule::SeqUnit, "T -> (Seq T)"),
    OperatorEntry { aliases: &["str.++"], ..seq_op("seq.++", "str.++", AtLeast(2), Rule::SeqConcat, "S S+ -> S") },
    OperatorEntry { aliases: &["str.len"], ..seq_op("seq.len", "str.len", Exactly(1), Rule::SeqLen, "S -> Int") },
    OperatorEntry { aliases: &["str.at"], ..seq_op("seq.at", "str.at", Exactly(2), Rule::SeqAt, "S Int -> S") },
    OperatorEntry {
        aliases: &["str.contains"],
        ..seq_op("seq.contains", "str.contains", Exactly(2), Rule::SeqPred, "S S -> Bool")
    },
    OperatorEntry {
        aliases: &["str.prefixof"],
        ..seq_op("seq.prefixof", "str.prefixof", Exactly(2), Rule::SeqPred, "S S -> Bool")
    },
    OperatorEntry {
        aliases: &["str.suffixof"],
        ..seq_op("seq.suffixof", "str.suffixof", Exactly(2), Rule::SeqPred, "S S -> Bool")
    },
    op("select", Exactly(2), Rule::Select, "(Array I E) I -> E"),
    op("store", Exactly(3), Rule::Store, "(Array I E) I E -> (Array I E)"),
];

/// Names handled by the builder itself rather than the table.
pub const SPECIAL_FORMS: &[(&str, &str)] = &[
    ("forall", "((x S)+) Bool -> Bool"),
    ("exists", "((x S)+) Bool -> Bool"),
    ("seq.empty", "(seq.empty S) or (as seq.empty (Seq S)) -> (Seq S)"),
    ("(_ bvN w)", "bitvector literal of width w"),
];

/// Case-insensitive lookup over canonical names and aliases.
pub fn lookup(name: &str) -> Option<&'static OperatorEntry> {
    OPERATORS
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name) || e.aliases.iter().any(|a| a.eq_ignore_ascii_case(name)))
}

/// The name to emit for `entry` given whether its first argument is a
/// `String`.
pub fn wire_name(entry: &OperatorEntry, on_string: bool) -> &'static str {
    match entry.string_name {
        Some(s) if on_string => s,
        _ => entry.name,
    }
}

/// Plain-text description of every operator, one per line.
pub fn operator_document() -> String {
    let mut out = String::new();
    out.push_str("# Operators accepted by the term builder\n");
    out.push_str("# Lookup is case-insensitive over names and aliases.\n");
    out.push_str("# N is Int or Real (mixed operands are coerced to Real); S is String or (Seq T).\n");
    out.push_str("#\n# name\taliases\tarity\tsignature\n");
    for e in OPERATORS {
        let aliases = if e.aliases.is_empty() { String::from("-") } else { e.aliases.join(",") };
        let _ = writeln!(out, "{}\t{}\t{}\t{}", e.name, aliases, e.arity, e.signature);
    }
    out.push_str("#\n# special forms\n");
    for (name, sig) in SPECIAL_FORMS {
        let _ = writeln!(out, "{name}\t-\t-\t{sig}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn lookup_is_case_insensitive_and_alias_aware() {
        assert_eq!(lookup("distinct").unwrap().name, "distinct");
        assert_eq!(lookup("DISTINCT").unwrap().name, "distinct");
        assert_eq!(lookup("implies").unwrap().name, "=>");
        assert_eq!(lookup("str.++").unwrap().name, "seq.++");
        assert!(lookup("frobnicate").is_none());
    }

    #[test]
    fn names_and_aliases_are_disjoint() {
        let mut all: Vec<String> = Vec::new();
        for e in OPERATORS {
            for n in core::iter::once(&e.name).chain(e.aliases.iter()) {
                let n = n.to_ascii_lowercase();
                assert!(!all.contains(&n), "{n} listed twice");
                all.push(n);
            }
        }
    }

    #[test]
    fn distinct_is_variadic_uniform() {
        let e = lookup("distinct").unwrap();
        assert_eq!(e.rule, Rule::Uniform);
        assert!(e.arity.admits(9));
    }
}
