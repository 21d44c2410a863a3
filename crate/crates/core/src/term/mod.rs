//! Sort-checked terms built from constraint S-expressions.

pub mod ops;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use thiserror::Error;

use crate::scope::{EnvStack, Signature};
use crate::sexpr::SExpr;
use crate::sort::{Sort, SortError, SortRegistry};

pub use ops::{lookup as operator_lookup, operator_document, Arity, OperatorEntry, Rule, OPERATORS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Bool(bool),
    Int(BigInt),
    /// Decimal spelling, possibly with a leading `-`.
    Decimal(String),
    Rational {
        numer: BigInt,
        denom: BigInt,
    },
    /// Unescaped text.
    Str(String),
    Bitvec {
        width: u32,
        value: BigUint,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    Builtin {
        op: &'static OperatorEntry,
        indices: Vec<u64>,
    },
    Function(String),
    Constructor(String),
    Accessor(String),
    /// The empty sequence of the term's sort.
    SeqEmpty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Const(String),
    Bound(String),
    Literal(Literal),
    App { head: Head, args: Vec<TypedTerm> },
    Binder { quantifier: Quantifier, vars: Vec<(String, Sort)>, body: Box<TypedTerm> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedTerm {
    pub node: Node,
    pub sort: Sort,
}

impl TypedTerm {
    fn literal(lit: Literal, sort: Sort) -> Self {
        TypedTerm { node: Node::Literal(lit), sort }
    }

    pub fn bool(b: bool) -> Self {
        TypedTerm::literal(Literal::Bool(b), Sort::bool())
    }

    fn builtin(op: &'static OperatorEntry, args: Vec<TypedTerm>, sort: Sort) -> Self {
        TypedTerm { node: Node::App { head: Head::Builtin { op, indices: Vec::new() }, args }, sort }
    }

    /// Renders the term in SMT-LIB2 syntax.
    pub fn lower(&self) -> SExpr {
        lower(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("`{0}` is not declared")]
    UndeclaredName(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("argument {position} of `{operator}` should be {expected}, got {got}")]
    SortMismatch { operator: String, position: usize, expected: String, got: Sort },
    #[error("`{operator}` takes {expected} argument(s), got {got}")]
    BadArity { operator: String, expected: String, got: usize },
    #[error("malformed term `{0}`")]
    Malformed(SExpr),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// Stack of quantifier-bound variables; the innermost binding wins.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundScope {
    vars: Vec<(String, Sort)>,
}

impl BoundScope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, sort: Sort) {
        self.vars.push((name.into(), sort));
    }

    pub fn lookup(&self, name: &str) -> Option<&Sort> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    fn len(&self) -> usize {
        self.vars.len()
    }

    fn truncate(&mut self, n: usize) {
        self.vars.truncate(n);
    }
}

/// Builds a sort-checked term from `form`.
pub fn build(form: &SExpr, env: &EnvStack, registry: &SortRegistry) -> Result<TypedTerm, BuildError> {
    build_in(form, env, &mut BoundScope::new(), registry)
}

/// Like [`build`] with an explicit scope of bound variables.
pub fn build_in(
    form: &SExpr,
    env: &EnvStack,
    bound: &mut BoundScope,
    registry: &SortRegistry,
) -> Result<TypedTerm, BuildError> {
    Builder { env, registry, bound }.term(form, None)
}

/// Builds a term that must have sort `Bool`.
pub fn build_formula(form: &SExpr, env: &EnvStack, registry: &SortRegistry) -> Result<TypedTerm, BuildError> {
    let t = build(form, env, registry)?;
    if !t.sort.is_bool() {
        return Err(BuildError::SortMismatch {
            operator: "assert".into(),
            position: 1,
            expected: "Bool".into(),
            got: t.sort,
        });
    }
    Ok(t)
}

/// Whether `name` is taken by the operator table or the core syntax.
pub fn is_reserved_symbol(name: &str) -> bool {
    const RESERVED: &[&str] =
        &["true", "false", "forall", "exists", "let", "as", "_", "!", "par", "match", "lambda", "seq.empty"];
    ops::lookup(name).is_some() || RESERVED.iter().any(|r| r.eq_ignore_ascii_case(name))
}

struct Builder<'a> {
    env: &'a EnvStack,
    registry: &'a SortRegistry,
    bound: &'a mut BoundScope,
}

fn mismatch(operator: &str, position: usize, expected: impl Into<String>, got: &Sort) -> BuildError {
    BuildError::SortMismatch { operator: operator.into(), position, expected: expected.into(), got: got.clone() }
}

fn bad_arity(operator: &str, expected: impl ToString, got: usize) -> BuildError {
    BuildError::BadArity { operator: operator.into(), expected: expected.to_string(), got }
}

fn to_real(t: TypedTerm) -> TypedTerm {
    if t.sort.is_int() {
        TypedTerm::builtin(ops::lookup("to_real").unwrap(), alloc::vec![t], Sort::real())
    } else {
        t
    }
}

/// Wraps Int arguments in `to_real` when any numeric argument is Real.
fn unify_numeric(args: Vec<TypedTerm>, force_real: bool) -> Vec<TypedTerm> {
    let numeric = args.iter().all(|a| a.sort.is_numeric());
    let any_real = args.iter().any(|a| a.sort.is_real());
    if numeric && (any_real || force_real) {
        args.into_iter().map(to_real).collect()
    } else {
        args
    }
}

fn int_literal(n: i64) -> TypedTerm {
    TypedTerm::literal(Literal::Int(BigInt::from(n)), Sort::int())
}

impl Builder<'_> {
    fn term(&mut self, form: &SExpr, expected: Option<&Sort>) -> Result<TypedTerm, BuildError> {
        if let Some(e) = expected.and_then(Sort::as_enum) {
            if !matches!(form, SExpr::List(_)) && !self.resolves_as_symbol(form) {
                if let Some(ctor) = e.constructor_for(form) {
                    return Ok(TypedTerm {
                        node: Node::App { head: Head::Constructor(ctor.into()), args: Vec::new() },
                        sort: expected.unwrap().clone(),
                    });
                }
            }
        }
        match form {
            SExpr::Int(n) => Ok(TypedTerm::literal(Literal::Int(n.clone()), Sort::int())),
            SExpr::Decimal(d) => Ok(TypedTerm::literal(Literal::Decimal(d.clone()), Sort::real())),
            SExpr::Rational { numer, denom } => {
                Ok(TypedTerm::literal(Literal::Rational { numer: numer.clone(), denom: denom.clone() }, Sort::real()))
            }
            SExpr::String(s) => Ok(TypedTerm::literal(Literal::Str(s.clone()), Sort::string())),
            SExpr::Bitvec { width, value } => {
                Ok(TypedTerm::literal(Literal::Bitvec { width: *width, value: value.clone() }, Sort::bitvec(*width)))
            }
            SExpr::Symbol(name) => self.symbol(name),
            SExpr::List(items) => self.list(form, items, expected),
        }
    }

    /// Does `form` name a bound variable, declaration, constructor or
    /// boolean constant?
    fn resolves_as_symbol(&self, form: &SExpr) -> bool {
        let Some(name) = form.as_symbol() else { return false };
        self.bound.lookup(name).is_some()
            || self.env.get(name).is_some()
            || self.registry.lookup_constructor(name).is_some()
            || name.eq_ignore_ascii_case("true")
            || name.eq_ignore_ascii_case("false")
    }

    fn symbol(&mut self, name: &str) -> Result<TypedTerm, BuildError> {
        if let Some(sort) = self.bound.lookup(name) {
            return Ok(TypedTerm { node: Node::Bound(name.into()), sort: sort.clone() });
        }
        if let Some(decl) = self.env.get(name) {
            return match &decl.signature {
                Signature::Const(sort) => Ok(TypedTerm { node: Node::Const(name.into()), sort: sort.clone() }),
                Signature::Fun(rank) if rank.params.is_empty() => Ok(TypedTerm {
                    node: Node::App { head: Head::Function(name.into()), args: Vec::new() },
                    sort: rank.ret.clone(),
                }),
                Signature::Fun(rank) => Err(bad_arity(name, rank.params.len(), 0)),
            };
        }
        if let Some(sort) = self.registry.lookup_constructor(name) {
            let arity = sort.as_tuple().map_or(0, |t| t.fields.len());
            if arity != 0 {
                return Err(bad_arity(name, arity, 0));
            }
            return Ok(TypedTerm {
                node: Node::App { head: Head::Constructor(name.into()), args: Vec::new() },
                sort: sort.clone(),
            });
        }
        if name.eq_ignore_ascii_case("true") {
            return Ok(TypedTerm::bool(true));
        }
        if name.eq_ignore_ascii_case("false") {
            return Ok(TypedTerm::bool(false));
        }
        Err(BuildError::UndeclaredName(name.into()))
    }

    fn list(&mut self, form: &SExpr, items: &[SExpr], expected: Option<&Sort>) -> Result<TypedTerm, BuildError> {
        let Some((head, args)) = items.split_first() else {
            return Err(BuildError::Malformed(form.clone()));
        };
        match head {
            SExpr::Symbol(name) => {
                if name == "_" {
                    return self.indexed_literal(form, args);
                }
                if name == "as" {
                    return self.annotated(form, args);
                }
                if name.eq_ignore_ascii_case("forall") {
                    return self.binder(form, Quantifier::Forall, args);
                }
                if name.eq_ignore_ascii_case("exists") {
                    return self.binder(form, Quantifier::Exists, args);
                }
                if name.eq_ignore_ascii_case("seq.empty") && self.env.get(name).is_none() {
                    let [elem] = args else { return Err(bad_arity("seq.empty", 1, args.len())) };
                    let elem = self.registry.resolve_sort(elem)?;
                    return Ok(TypedTerm {
                        node: Node::App { head: Head::SeqEmpty, args: Vec::new() },
                        sort: Sort::seq(elem),
                    });
                }
                self.application(name, args, expected)
            }
            SExpr::List(inner) if inner.first().is_some_and(|h| h.is_symbol("_")) => {
                let Some(name) = inner.get(1).and_then(SExpr::as_symbol) else {
                    return Err(BuildError::Malformed(form.clone()));
                };
                let entry = ops::lookup(name)
                    .filter(|e| e.indices > 0)
                    .ok_or_else(|| BuildError::UnknownOperator(name.into()))?;
                let indices = inner[2..]
                    .iter()
                    .map(|i| match i {
                        SExpr::Int(n) => u64::try_from(n).ok(),
                        _ => None,
                    })
                    .collect::<Option<Vec<u64>>>()
                    .filter(|v| v.len() == entry.indices)
                    .ok_or_else(|| BuildError::Malformed(head.clone()))?;
                self.operator(entry, indices, args, expected)
            }
            _ => Err(BuildError::Malformed(form.clone())),
        }
    }

    /// `(_ bvN w)`
    fn indexed_literal(&mut self, form: &SExpr, args: &[SExpr]) -> Result<TypedTerm, BuildError> {
        let malformed = || BuildError::Malformed(form.clone());
        let [SExpr::Symbol(name), SExpr::Int(width)] = args else { return Err(malformed()) };
        let digits = name.strip_prefix("bv").ok_or_else(malformed)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let value: BigUint = digits.parse().map_err(|_| malformed())?;
        let width = u32::try_from(width).ok().filter(|w| *w > 0).ok_or_else(malformed)?;
        if value.bits() > u64::from(width) {
            return Err(malformed());
        }
        Ok(TypedTerm::literal(Literal::Bitvec { width, value }, Sort::bitvec(width)))
    }

    /// `(as seq.empty S)`
    fn annotated(&mut self, form: &SExpr, args: &[SExpr]) -> Result<TypedTerm, BuildError> {
        let [name, sort] = args else { return Err(BuildError::Malformed(form.clone())) };
        if !name.as_symbol().is_some_and(|n| n.eq_ignore_ascii_case("seq.empty")) {
            return Err(BuildError::Malformed(form.clone()));
        }
        let sort = self.registry.resolve_sort(sort)?;
        if sort.seq_element().is_none() && !sort.is_string() {
            return Err(mismatch("as", 2, "a sequence sort", &sort));
        }
        Ok(TypedTerm { node: Node::App { head: Head::SeqEmpty, args: Vec::new() }, sort })
    }

    fn binder(&mut self, form: &SExpr, quantifier: Quantifier, args: &[SExpr]) -> Result<TypedTerm, BuildError> {
        let malformed = || BuildError::Malformed(form.clone());
        let [vars, body] = args else { return Err(malformed()) };
        let vars = vars.as_list().filter(|v| !v.is_empty()).ok_or_else(malformed)?;
        let mut resolved = Vec::with_capacity(vars.len());
        for v in vars {
            match v.as_list() {
                Some([SExpr::Symbol(name), spec]) if !name.starts_with(':') => {
                    resolved.push((name.clone(), self.registry.resolve_sort(spec)?));
                }
                _ => return Err(malformed()),
            }
        }
        let mark = self.bound.len();
        for (name, sort) in &resolved {
            self.bound.push(name.clone(), sort.clone());
        }
        let body = self.term(body, None);
        self.bound.truncate(mark);
        let body = body?;
        if !body.sort.is_bool() {
            let name = if quantifier == Quantifier::Forall { "forall" } else { "exists" };
            return Err(mismatch(name, 2, "Bool", &body.sort));
        }
        Ok(TypedTerm { node: Node::Binder { quantifier, vars: resolved, body: Box::new(body) }, sort: Sort::bool() })
    }

    fn application(&mut self, name: &str, args: &[SExpr], expected: Option<&Sort>) -> Result<TypedTerm, BuildError> {
        if self.bound.lookup(name).is_some() {
            return Err(bad_arity(name, 0, args.len()));
        }
        if let Some(decl) = self.env.get(name) {
            let rank = match &decl.signature {
                Signature::Const(_) => return Err(bad_arity(name, 0, args.len())),
                Signature::Fun(rank) => rank.clone(),
            };
            if rank.params.len() != args.len() {
                return Err(bad_arity(name, rank.params.len(), args.len()));
            }
            let built = self.checked_args(name, &rank.params, args)?;
            return Ok(TypedTerm {
                node: Node::App { head: Head::Function(name.into()), args: built },
                sort: rank.ret,
            });
        }
        if let Some(sort) = self.registry.lookup_constructor(name).cloned() {
            let params: Vec<Sort> = match sort.as_tuple() {
                Some(t) => t.fields.iter().map(|f| f.sort.clone()).collect(),
                None => Vec::new(),
            };
            if params.len() != args.len() {
                return Err(bad_arity(name, params.len(), args.len()));
            }
            let built = self.checked_args(name, &params, args)?;
            return Ok(TypedTerm { node: Node::App { head: Head::Constructor(name.into()), args: built }, sort });
        }
        if let Some((sort, index)) = self.registry.lookup_accessor(name) {
            let sort = sort.clone();
            let field_sort = sort.as_tuple().unwrap().fields[index].sort.clone();
            let [arg] = args else { return Err(bad_arity(name, 1, args.len())) };
            let built = self.checked_args(name, core::slice::from_ref(&sort), core::slice::from_ref(arg))?;
            return Ok(TypedTerm {
                node: Node::App { head: Head::Accessor(name.into()), args: built },
                sort: field_sort,
            });
        }
        let entry = ops::lookup(name).ok_or_else(|| BuildError::UnknownOperator(name.into()))?;
        if entry.indices > 0 {
            return Err(BuildError::Malformed(SExpr::sym(name)));
        }
        self.operator(entry, Vec::new(), args, expected)
    }

    /// Builds arguments against known parameter sorts.
    fn checked_args(&mut self, operator: &str, params: &[Sort], args: &[SExpr]) -> Result<Vec<TypedTerm>, BuildError> {
        let mut built = Vec::with_capacity(args.len());
        for (i, (param, arg)) in params.iter().zip(args).enumerate() {
            let mut t = self.term(arg, Some(param))?;
            if param.is_real() && t.sort.is_int() {
                t = to_real(t);
            }
            if &t.sort != param {
                return Err(mismatch(operator, i + 1, param.to_string(), &t.sort));
            }
            built.push(t);
        }
        Ok(built)
    }

    /// Could `form` be an enum label awaiting an expected sort?
    fn label_candidate(&self, form: &SExpr) -> bool {
        match form {
            SExpr::Int(_) | SExpr::String(_) => true,
            SExpr::Symbol(_) => !self.resolves_as_symbol(form),
            SExpr::List(items) => match items.as_slice() {
                [SExpr::Symbol(h), _, a, b] if ops::lookup(h).is_some_and(|e| e.rule == Rule::Ite) => {
                    self.env.get(h).is_none() && self.label_candidate(a) && self.label_candidate(b)
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// Builds arguments that must share a sort, letting enum labels pick up
    /// the sort of their siblings.
    fn uniform_args(&mut self, forms: &[SExpr], hint: Option<&Sort>) -> Result<Vec<TypedTerm>, BuildError> {
        let mut built: Vec<Option<TypedTerm>> = Vec::with_capacity(forms.len());
        for f in forms {
            built.push(if self.label_candidate(f) { None } else { Some(self.term(f, hint)?) });
        }
        let target = hint
            .filter(|s| s.as_enum().is_some())
            .cloned()
            .or_else(|| built.iter().flatten().map(|t| &t.sort).find(|s| s.as_enum().is_some()).cloned());
        forms
            .iter()
            .zip(built)
            .map(|(f, b)| match b {
                Some(t) => Ok(t),
                None => self.term(f, target.as_ref().or(hint)),
            })
            .collect()
    }

    fn operator(
        &mut self,
        entry: &'static OperatorEntry,
        indices: Vec<u64>,
        forms: &[SExpr],
        expected: Option<&Sort>,
    ) -> Result<TypedTerm, BuildError> {
        let name = entry.name;
        if !entry.arity.admits(forms.len()) {
            return Err(bad_arity(name, entry.arity, forms.len()));
        }
        match (name, forms.len()) {
            ("and", 0) => return Ok(TypedTerm::bool(true)),
            ("or", 0) => return Ok(TypedTerm::bool(false)),
            ("+", 0) => return Ok(int_literal(0)),
            ("*", 0) => return Ok(int_literal(1)),
            _ => {}
        }
        let args = match entry.rule {
            Rule::Uniform => self.uniform_args(forms, None)?,
            Rule::Ite => {
                let cond = self.term(&forms[0], None)?;
                let mut branches = self.uniform_args(&forms[1..], expected)?;
                branches.insert(0, cond);
                branches
            }
            Rule::Select | Rule::Store => {
                let array = self.term(&forms[0], None)?;
                let parts = array.sort.array_parts().map(|(i, e)| (i.clone(), e.clone()));
                let mut args = alloc::vec![array];
                for (k, f) in forms[1..].iter().enumerate() {
                    let hint = parts.as_ref().map(|(i, e)| if k == 0 { i } else { e });
                    args.push(self.term(f, hint)?);
                }
                args
            }
            _ => forms.iter().map(|f| self.term(f, None)).collect::<Result<Vec<_>, _>>()?,
        };
        self.apply(entry, indices, args)
    }

    fn apply(
        &mut self,
        entry: &'static OperatorEntry,
        indices: Vec<u64>,
        args: Vec<TypedTerm>,
    ) -> Result<TypedTerm, BuildError> {
        let name = entry.name;
        let same_sort = |args: &[TypedTerm], from: usize| -> Result<(), BuildError> {
            let first = &args[from].sort;
            for (i, a) in args.iter().enumerate().skip(from + 1) {
                if &a.sort != first {
                    return Err(mismatch(name, i + 1, first.to_string(), &a.sort));
                }
            }
            Ok(())
        };
        let require = |args: &[TypedTerm], pred: &dyn Fn(&Sort) -> bool, what: &str| -> Result<(), BuildError> {
            for (i, a) in args.iter().enumerate() {
                if !pred(&a.sort) {
                    return Err(mismatch(name, i + 1, what, &a.sort));
                }
            }
            Ok(())
        };
        let sort = match entry.rule {
            Rule::Bools => {
                require(&args, &Sort::is_bool, "Bool")?;
                if args.len() == 1 && (name == "and" || name == "or") {
                    return Ok(args.into_iter().next().unwrap());
                }
                Sort::bool()
            }
            Rule::Uniform => {
                let args = unify_numeric(args, false);
                same_sort(&args, 0)?;
                if args.len() == 1 {
                    return Ok(TypedTerm::bool(true));
                }
                return Ok(TypedTerm::builtin(entry, args, Sort::bool()));
            }
            Rule::Ite => {
                if !args[0].sort.is_bool() {
                    return Err(mismatch(name, 1, "Bool", &args[0].sort));
                }
                let mut rest = args;
                let cond = rest.remove(0);
                let mut branches = unify_numeric(rest, false);
                same_sort(&branches, 0)?;
                let sort = branches[0].sort.clone();
                branches.insert(0, cond);
                return Ok(TypedTerm::builtin(entry, branches, sort));
            }
            Rule::Arith | Rule::ArithCmp | Rule::RealDiv => {
                require(&args, &Sort::is_numeric, "Int or Real")?;
                let args = unify_numeric(args, entry.rule == Rule::RealDiv);
                if args.len() == 1 && (name == "+" || name == "*") {
                    return Ok(args.into_iter().next().unwrap());
                }
                let sort = match entry.rule {
                    Rule::ArithCmp => Sort::bool(),
                    _ => args[0].sort.clone(),
                };
                return Ok(TypedTerm::builtin(entry, args, sort));
            }
            Rule::Ints => {
                require(&args, &Sort::is_int, "Int")?;
                Sort::int()
            }
            Rule::ToReal => {
                require(&args, &Sort::is_int, "Int")?;
                Sort::real()
            }
            Rule::ToInt => {
                require(&args, &Sort::is_real, "Real")?;
                Sort::int()
            }
            Rule::IsInt => {
                require(&args, &Sort::is_real, "Real")?;
                Sort::bool()
            }
            Rule::Bvs | Rule::BvCmp => {
                require(&args, &|s: &Sort| s.bitvec_width().is_some(), "a bitvector")?;
                same_sort(&args, 0)?;
                if entry.rule == Rule::BvCmp {
                    Sort::bool()
                } else {
                    args[0].sort.clone()
                }
            }
            Rule::Concat => {
                require(&args, &|s: &Sort| s.bitvec_width().is_some(), "a bitvector")?;
                let total = args.iter().map(|a| u64::from(a.sort.bitvec_width().unwrap())).sum::<u64>();
                let total =
                    u32::try_from(total).map_err(|_| mismatch(name, 2, "a narrower bitvector", &args[1].sort))?;
                Sort::bitvec(total)
            }
            Rule::Extract => {
                let w = args[0].sort.bitvec_width().ok_or_else(|| mismatch(name, 1, "a bitvector", &args[0].sort))?;
                let (i, j) = (indices[0], indices[1]);
                if !(i >= j && i < u64::from(w)) {
                    return Err(mismatch(name, 1, format!("a bitvector wider than {i} bits"), &args[0].sort));
                }
                Sort::bitvec((i - j + 1) as u32)
            }
            Rule::SeqUnit => Sort::seq(args[0].sort.clone()),
            Rule::SeqConcat | Rule::SeqPred => {
                require(&args, &|s: &Sort| s.is_string() || s.seq_element().is_some(), "a sequence")?;
                same_sort(&args, 0)?;
                if entry.rule == Rule::SeqPred {
                    Sort::bool()
                } else {
                    args[0].sort.clone()
                }
            }
            Rule::SeqLen => {
                require(&args, &|s: &Sort| s.is_string() || s.seq_element().is_some(), "a sequence")?;
                Sort::int()
            }
            Rule::SeqAt => {
                let s = &args[0].sort;
                if !(s.is_string() || s.seq_element().is_some()) {
                    return Err(mismatch(name, 1, "a sequence", s));
                }
                if !args[1].sort.is_int() {
                    return Err(mismatch(name, 2, "Int", &args[1].sort));
                }
                s.clone()
            }
            Rule::Select | Rule::Store => {
                let (index, elem) = args[0]
                    .sort
                    .array_parts()
                    .map(|(i, e)| (i.clone(), e.clone()))
                    .ok_or_else(|| mismatch(name, 1, "an array", &args[0].sort))?;
                if args[1].sort != index {
                    return Err(mismatch(name, 2, index.to_string(), &args[1].sort));
                }
                if entry.rule == Rule::Select {
                    elem
                } else {
                    if args[2].sort != elem {
                        return Err(mismatch(name, 3, elem.to_string(), &args[2].sort));
                    }
                    args[0].sort.clone()
                }
            }
        };
        Ok(TypedTerm { node: Node::App { head: Head::Builtin { op: entry, indices }, args }, sort })
    }
}

/// Escapes text for an SMT-LIB2 string literal: backslashes and characters
/// outside printable ASCII become `\u{..}`.
pub fn escape_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if c == '\\' || !(' '..='~').contains(&c) {
            out.push_str(&format!("\\u{{{:x}}}", c as u32));
        } else {
            out.push(c);
        }
    }
    out
}

/// Inverse of [`escape_string`]; also accepts the `\uXXXX` form. Unknown
/// escapes are kept verbatim.
pub fn unescape_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find("\\u") {
        out.push_str(&rest[..i]);
        let tail = &rest[i + 2..];
        let parsed = if let Some(braced) = tail.strip_prefix('{') {
            braced.find('}').and_then(|end| {
                let hex = &braced[..end];
                (1..=5).contains(&hex.len()).then_some(())?;
                let code = u32::from_str_radix(hex, 16).ok()?;
                Some((char::from_u32(code)?, end + 2))
            })
        } else {
            tail.get(..4).and_then(|hex| {
                if !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
                    return None;
                }
                let code = u32::from_str_radix(hex, 16).ok()?;
                Some((char::from_u32(code)?, 4))
            })
        };
        match parsed {
            Some((c, used)) => {
                out.push(c);
                rest = &tail[used..];
            }
            None => {
                out.push_str("\\u");
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    out
}

fn lower_int(n: &BigInt) -> SExpr {
    if n.is_negative() {
        SExpr::list([SExpr::sym("-"), SExpr::Int(-n)])
    } else {
        SExpr::Int(n.clone())
    }
}

fn lower_literal(lit: &Literal) -> SExpr {
    match lit {
        Literal::Bool(b) => SExpr::sym(if *b { "true" } else { "false" }),
        Literal::Int(n) => lower_int(n),
        Literal::Decimal(d) => match d.strip_prefix('-') {
            Some(abs) => SExpr::list([SExpr::sym("-"), SExpr::Decimal(abs.into())]),
            None => SExpr::Decimal(d.clone()),
        },
        Literal::Rational { numer, denom } => {
            let div = SExpr::list([SExpr::sym("/"), SExpr::Int(numer.abs()), SExpr::Int(denom.clone())]);
            if numer.is_negative() {
                SExpr::list([SExpr::sym("-"), div])
            } else {
                div
            }
        }
        Literal::Str(s) => SExpr::String(escape_string(s)),
        Literal::Bitvec { width, value } => SExpr::Bitvec { width: *width, value: value.clone() },
    }
}

fn apply_or_symbol(name: &str, args: &[TypedTerm]) -> SExpr {
    if args.is_empty() {
        SExpr::sym(name)
    } else {
        let mut items = alloc::vec![SExpr::sym(name)];
        items.extend(args.iter().map(lower));
        SExpr::List(items)
    }
}

/// Renders a term in SMT-LIB2 syntax.
pub fn lower(term: &TypedTerm) -> SExpr {
    match &term.node {
        Node::Const(name) | Node::Bound(name) => SExpr::sym(name.clone()),
        Node::Literal(lit) => lower_literal(lit),
        Node::App { head, args } => match head {
            Head::Builtin { op, indices } => {
                let on_string = args.first().is_some_and(|a| a.sort.is_string());
                let name = ops::wire_name(op, on_string);
                let head = if indices.is_empty() {
                    SExpr::sym(name)
                } else {
                    let mut h = alloc::vec![SExpr::sym("_"), SExpr::sym(name)];
                    h.extend(indices.iter().map(|i| SExpr::int(*i)));
                    SExpr::List(h)
                };
                let mut items = alloc::vec![head];
                items.extend(args.iter().map(lower));
                SExpr::List(items)
            }
            Head::Function(name) | Head::Constructor(name) => apply_or_symbol(name, args),
            Head::Accessor(name) => apply_or_symbol(name, args),
            Head::SeqEmpty => {
                if term.sort.is_string() {
                    SExpr::string("")
                } else {
                    SExpr::list([SExpr::sym("as"), SExpr::sym("seq.empty"), term.sort.emit()])
                }
            }
        },
        Node::Binder { quantifier, vars, body } => {
            let q = match quantifier {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            let vars = vars.iter().map(|(n, s)| SExpr::list([SExpr::sym(n.clone()), s.emit()]));
            SExpr::list([SExpr::sym(q), SExpr::list(vars), lower(body)])
        }
    }
}

/// The escape hatch: a raw form passed to the solver without sort checking.
pub fn lower_unchecked(form: &SExpr) -> SExpr {
    form.clone()
}
