//! Decoding solver models and values into host values.

pub mod algebraic;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::scope::{EnvStack, Signature};
use crate::sexpr::{rational_to_decimal, SExpr};
use crate::sort::{FuncRank, Sort, SortRegistry};
use crate::term::unescape_string;

/// A decoded value.
#[derive(Clone, Debug, PartialEq)]
pub enum HostValue {
    Bool(bool),
    Int(BigInt),
    Rational(BigRational),
    /// A real known only approximately, such as an irrational algebraic
    /// number.
    Approx(f64),
    Text(String),
    Bitvec {
        width: u32,
        value: BigUint,
    },
    Sequence(Vec<HostValue>),
    EnumMember {
        sort: String,
        label: SExpr,
    },
    Tuple {
        sort: String,
        fields: Vec<(String, HostValue)>,
    },
    Function(FunctionTable),
}

impl HostValue {
    pub fn is_approximate(&self) -> bool {
        match self {
            HostValue::Approx(_) => true,
            HostValue::Sequence(items) => items.iter().any(HostValue::is_approximate),
            HostValue::Tuple { fields, .. } => fields.iter().any(|(_, v)| v.is_approximate()),
            HostValue::Function(f) => {
                f.default.is_approximate()
                    || f.entries.iter().any(|(k, v)| v.is_approximate() || k.iter().any(HostValue::is_approximate))
            }
            _ => false,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            HostValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            HostValue::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_int()?.to_i64()
    }

    /// Renders the value as an S-expression.
    pub fn to_sexpr(&self) -> SExpr {
        match self {
            HostValue::Bool(b) => SExpr::sym(if *b { "true" } else { "false" }),
            HostValue::Int(n) => SExpr::Int(n.clone()),
            HostValue::Rational(q) => {
                if q.is_integer() {
                    SExpr::Int(q.to_integer())
                } else if let Some(d) = rational_to_decimal(q) {
                    SExpr::Decimal(d)
                } else {
                    SExpr::Rational { numer: q.numer().clone(), denom: q.denom().clone() }
                }
            }
            HostValue::Approx(v) => {
                let mut text = format!("{v}");
                if !text.contains('.') {
                    text.push_str(".0");
                }
                SExpr::Decimal(text)
            }
            HostValue::Text(s) => SExpr::String(s.clone()),
            HostValue::Bitvec { width, value } => SExpr::Bitvec { width: *width, value: value.clone() },
            HostValue::Sequence(items) => SExpr::List(items.iter().map(HostValue::to_sexpr).collect()),
            HostValue::EnumMember { label, .. } => label.clone(),
            HostValue::Tuple { sort, fields } => {
                let mut items = alloc::vec![SExpr::sym(sort.clone())];
                items.extend(fields.iter().map(|(n, v)| SExpr::list([SExpr::sym(n.clone()), v.to_sexpr()])));
                SExpr::List(items)
            }
            HostValue::Function(f) => f.to_sexpr(),
        }
    }
}

/// Finite map from argument tuples to values plus a default.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable {
    pub entries: Vec<(Vec<HostValue>, HostValue)>,
    pub default: Box<HostValue>,
}

impl FunctionTable {
    /// The first matching entry's value, else the default.
    pub fn apply(&self, args: &[HostValue]) -> &HostValue {
        self.entries.iter().find(|(k, _)| k.as_slice() == args).map_or(&*self.default, |(_, v)| v)
    }

    /// `(((a1 ...) v1) ... (:default d))`
    pub fn to_sexpr(&self) -> SExpr {
        let mut items: Vec<SExpr> = self
            .entries
            .iter()
            .map(|(k, v)| SExpr::list([SExpr::List(k.iter().map(HostValue::to_sexpr).collect()), v.to_sexpr()]))
            .collect();
        items.push(SExpr::list([SExpr::sym(":default"), self.default.to_sexpr()]));
        SExpr::List(items)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("cannot decode the interpretation of `{name}`: {form}")]
    UnsupportedInterpretation { name: String, form: SExpr },
}

fn unsupported(form: &SExpr) -> DecodeError {
    DecodeError::UnsupportedInterpretation { name: String::new(), form: form.clone() }
}

fn named(name: &str) -> impl Fn(DecodeError) -> DecodeError + '_ {
    move |DecodeError::UnsupportedInterpretation { form, .. }| DecodeError::UnsupportedInterpretation {
        name: name.into(),
        form,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelEntry {
    pub name: String,
    pub signature: Signature,
    pub value: HostValue,
    pub raw: SExpr,
    /// Set for names the solver introduced itself.
    pub auxiliary: bool,
    order: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    entries: Vec<ModelEntry>,
}

impl Model {
    pub fn entries(&self) -> &[ModelEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&HostValue> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.value)
    }

    /// Non-auxiliary bindings in declaration order.
    pub fn as_assignment(&self) -> Vec<(String, HostValue)> {
        let mut user: Vec<&ModelEntry> = self.entries.iter().filter(|e| !e.auxiliary).collect();
        user.sort_by_key(|e| e.order);
        user.into_iter().map(|e| (e.name.clone(), e.value.clone())).collect()
    }

    /// `((x true) (y 5) (f (((1) 10) (:default 0))))`
    pub fn render_assignment(&self) -> SExpr {
        SExpr::List(self.as_assignment().into_iter().map(|(n, v)| SExpr::list([SExpr::sym(n), v.to_sexpr()])).collect())
    }
}

struct RawDef<'a> {
    name: &'a str,
    params: &'a [SExpr],
    ret: &'a SExpr,
    body: &'a SExpr,
    form: &'a SExpr,
}

fn raw_def(form: &SExpr) -> Option<RawDef<'_>> {
    match form.as_list()? {
        [head, SExpr::Symbol(name), SExpr::List(params), ret, body] if head.is_symbol("define-fun") => {
            Some(RawDef { name, params, ret, body, form })
        }
        _ => None,
    }
}

/// Decodes a `(get-model)` response, with or without a leading `model`.
pub fn decode_model(raw: &SExpr, registry: &SortRegistry, env: &EnvStack) -> Result<Model, DecodeError> {
    let items = raw.as_list().ok_or_else(|| unsupported(raw))?;
    let items = match items.first() {
        Some(h) if h.is_symbol("model") => &items[1..],
        _ => items,
    };
    let defs: Vec<RawDef<'_>> = items.iter().filter_map(raw_def).collect();
    let mut entries = Vec::with_capacity(defs.len());
    for def in &defs {
        match env.get(def.name) {
            Some(decl) => {
                let value = decode_definition(def, &decl.signature, &defs, registry).map_err(named(def.name))?;
                entries.push(ModelEntry {
                    name: def.name.into(),
                    signature: decl.signature.clone(),
                    value,
                    raw: def.form.clone(),
                    auxiliary: false,
                    order: Some(decl.order),
                });
            }
            None => {
                let Some(signature) = reported_signature(def, registry) else { continue };
                if let Ok(value) = decode_definition(def, &signature, &defs, registry) {
                    entries.push(ModelEntry {
                        name: def.name.into(),
                        signature,
                        value,
                        raw: def.form.clone(),
                        auxiliary: true,
                        order: None,
                    });
                }
            }
        }
    }
    Ok(Model { entries })
}

fn reported_signature(def: &RawDef<'_>, registry: &SortRegistry) -> Option<Signature> {
    let ret = registry.resolve_sort(def.ret).ok()?;
    if def.params.is_empty() {
        return Some(Signature::Const(ret));
    }
    let params = def
        .params
        .iter()
        .map(|p| match p.as_list()? {
            [_, s] => registry.resolve_sort(s).ok(),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Signature::Fun(FuncRank { params, ret }))
}

fn decode_definition(
    def: &RawDef<'_>,
    signature: &Signature,
    defs: &[RawDef<'_>],
    registry: &SortRegistry,
) -> Result<HostValue, DecodeError> {
    match signature {
        Signature::Const(sort) if def.params.is_empty() => decode_value(def.body, sort, registry),
        Signature::Fun(rank) if rank.params.is_empty() && def.params.is_empty() => {
            decode_value(def.body, &rank.ret, registry)
        }
        Signature::Fun(rank) if rank.params.len() == def.params.len() => {
            let names = def
                .params
                .iter()
                .map(|p| match p.as_list() {
                    Some([SExpr::Symbol(n), _]) => Ok(n.clone()),
                    _ => Err(unsupported(def.form)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let body = inline_auxiliary(def.body, &names, defs);
            let params: Vec<(String, Sort)> = names.into_iter().zip(rank.params.iter().cloned()).collect();
            decode_fn_interp(&params, &body, &rank.ret, registry).map(HostValue::Function)
        }
        _ => Err(unsupported(def.form)),
    }
}

/// Replaces a body of the form `(g p1 ... pn)`, where `g` is another
/// definition in the same model, by `g`'s body.
fn inline_auxiliary(body: &SExpr, params: &[String], defs: &[RawDef<'_>]) -> SExpr {
    let mut body = body.clone();
    for _ in 0..8 {
        let Some([SExpr::Symbol(g), args @ ..]) = body.as_list() else { break };
        let forwards = args.len() == params.len() && args.iter().zip(params).all(|(a, p)| a.is_symbol(p));
        let Some(target) = defs.iter().find(|d| d.name == g) else { break };
        if !forwards || target.params.len() != params.len() {
            break;
        }
        let mut renaming = BTreeMap::new();
        for (tp, p) in target.params.iter().zip(params) {
            if let Some([SExpr::Symbol(n), _]) = tp.as_list() {
                renaming.insert(n.clone(), p.clone());
            }
        }
        body = rename(target.body, &renaming);
    }
    body
}

fn rename(form: &SExpr, map: &BTreeMap<String, String>) -> SExpr {
    match form {
        SExpr::Symbol(s) => SExpr::Symbol(map.get(s).cloned().unwrap_or_else(|| s.clone())),
        SExpr::List(items) => SExpr::List(items.iter().map(|i| rename(i, map)).collect()),
        other => other.clone(),
    }
}

enum RealValue {
    Exact(BigRational),
    Approx(f64),
}

fn real_value(form: &SExpr) -> Option<RealValue> {
    if let Some(v) = form.as_rational() {
        return Some(RealValue::Exact(v));
    }
    let items = form.as_list()?;
    let (head, args) = items.split_first()?;
    match (head.as_symbol()?, args) {
        ("-", [x]) => match real_value(x)? {
            RealValue::Exact(v) => Some(RealValue::Exact(-v)),
            RealValue::Approx(v) => Some(RealValue::Approx(-v)),
        },
        ("/", [a, b]) => match (real_value(a)?, real_value(b)?) {
            (RealValue::Exact(a), RealValue::Exact(b)) if !b.is_zero() => Some(RealValue::Exact(a / b)),
            _ => None,
        },
        ("to_real", [x]) => real_value(x),
        ("root-obj", [poly, SExpr::Int(k)]) => {
            let poly = algebraic::parse_poly(poly)?;
            algebraic::real_root(&poly, k.to_usize()?).map(RealValue::Approx)
        }
        _ => None,
    }
}

/// Strips `(as v S)` annotations other than the empty sequence.
fn strip_as(mut form: &SExpr) -> &SExpr {
    while let Some([head, inner, _]) = form.as_list() {
        if !head.is_symbol("as") || inner.is_symbol("seq.empty") {
            break;
        }
        form = inner;
    }
    form
}

/// Decodes a value at a known sort.
pub fn decode_value(form: &SExpr, sort: &Sort, registry: &SortRegistry) -> Result<HostValue, DecodeError> {
    let form = strip_as(form);
    let fail = || unsupported(form);
    if sort.is_bool() {
        return match form.as_symbol() {
            Some("true") => Ok(HostValue::Bool(true)),
            Some("false") => Ok(HostValue::Bool(false)),
            _ => Err(fail()),
        };
    }
    if sort.is_int() {
        return match real_value(form) {
            Some(RealValue::Exact(v)) if v.is_integer() => Ok(HostValue::Int(v.to_integer())),
            _ => Err(fail()),
        };
    }
    if sort.is_real() {
        return match real_value(form) {
            Some(RealValue::Exact(v)) => Ok(HostValue::Rational(v)),
            Some(RealValue::Approx(v)) if v.is_finite() => Ok(HostValue::Approx(v)),
            _ => Err(fail()),
        };
    }
    if sort.is_string() {
        return match form {
            SExpr::String(s) => Ok(HostValue::Text(unescape_string(s))),
            _ => Err(fail()),
        };
    }
    if let Some(width) = sort.bitvec_width() {
        return match form {
            SExpr::Bitvec { width: w, value } if *w == width => Ok(HostValue::Bitvec { width, value: value.clone() }),
            SExpr::List(items) => match items.as_slice() {
                [u, SExpr::Symbol(bv), SExpr::Int(w)] if u.is_symbol("_") && w == &BigInt::from(width) => {
                    let value: BigUint = bv.strip_prefix("bv").and_then(|d| d.parse().ok()).ok_or_else(fail)?;
                    Ok(HostValue::Bitvec { width, value })
                }
                _ => Err(fail()),
            },
            _ => Err(fail()),
        };
    }
    if let Some(elem) = sort.seq_element() {
        let mut out = Vec::new();
        decode_seq(form, elem, registry, &mut out)?;
        return Ok(HostValue::Sequence(out));
    }
    if let Some(e) = sort.as_enum() {
        let ctor = form.as_symbol().ok_or_else(fail)?;
        let member = e.member_for_constructor(ctor).ok_or_else(fail)?;
        return Ok(HostValue::EnumMember { sort: e.name.clone(), label: member.label.clone() });
    }
    if let Some(t) = sort.as_tuple() {
        let args: &[SExpr] = match form {
            SExpr::Symbol(s) if *s == t.constructor && t.fields.is_empty() => &[],
            SExpr::List(items) if items.first().is_some_and(|h| h.is_symbol(&t.constructor)) => &items[1..],
            _ => return Err(fail()),
        };
        if args.len() != t.fields.len() {
            return Err(fail());
        }
        let fields = t
            .fields
            .iter()
            .zip(args)
            .map(|(f, a)| Ok((f.name.clone(), decode_value(a, &f.sort, registry)?)))
            .collect::<Result<Vec<_>, DecodeError>>()?;
        return Ok(HostValue::Tuple { sort: t.name.clone(), fields });
    }
    Err(fail())
}

fn decode_seq(form: &SExpr, elem: &Sort, registry: &SortRegistry, out: &mut Vec<HostValue>) -> Result<(), DecodeError> {
    let form = strip_as(form);
    let items = form.as_list().ok_or_else(|| unsupported(form))?;
    match items {
        [h, x] if h.is_symbol("seq.unit") => {
            out.push(decode_value(x, elem, registry)?);
            Ok(())
        }
        [h, parts @ ..] if h.is_symbol("seq.++") => {
            for p in parts {
                decode_seq(p, elem, registry, out)?;
            }
            Ok(())
        }
        [h, e, _] if h.is_symbol("as") && e.is_symbol("seq.empty") => Ok(()),
        _ => Err(unsupported(form)),
    }
}

type Conditions = Vec<(usize, HostValue)>;

/// Reads an ite condition as a conjunction of `param = value` tests.
fn read_condition(cond: &SExpr, params: &[(String, Sort)], registry: &SortRegistry) -> Result<Conditions, DecodeError> {
    let param_index = |s: &SExpr| s.as_symbol().and_then(|n| params.iter().position(|(p, _)| p == n));
    if let Some(i) = param_index(cond) {
        if params[i].1.is_bool() {
            return Ok(alloc::vec![(i, HostValue::Bool(true))]);
        }
    }
    let items = cond.as_list().ok_or_else(|| unsupported(cond))?;
    match items {
        [h, x] if h.is_symbol("not") => match param_index(x) {
            Some(i) if params[i].1.is_bool() => Ok(alloc::vec![(i, HostValue::Bool(false))]),
            _ => Err(unsupported(cond)),
        },
        [h, a, b] if h.is_symbol("=") => {
            let (i, lit) = match (param_index(a), param_index(b)) {
                (Some(i), None) => (i, b),
                (None, Some(i)) => (i, a),
                _ => return Err(unsupported(cond)),
            };
            Ok(alloc::vec![(i, decode_value(lit, &params[i].1, registry)?)])
        }
        [h, parts @ ..] if h.is_symbol("and") => {
            let mut all = Vec::new();
            for p in parts {
                all.extend(read_condition(p, params, registry)?);
            }
            Ok(all)
        }
        _ => Err(unsupported(cond)),
    }
}

struct Path {
    conditions: Conditions,
    leaf: HostValue,
}

fn collect_paths(
    body: &SExpr,
    params: &[(String, Sort)],
    ret: &Sort,
    registry: &SortRegistry,
    taken: &Conditions,
    out: &mut Vec<Path>,
) -> Result<(), DecodeError> {
    if let Some([h, cond, then, els]) = body.as_list() {
        if h.is_symbol("ite") {
            let extra = read_condition(cond, params, registry)?;
            let mut merged = taken.clone();
            let mut consistent = true;
            for (i, v) in extra {
                match merged.iter().find(|(j, _)| *j == i) {
                    Some((_, existing)) => consistent &= *existing == v,
                    None => merged.push((i, v)),
                }
            }
            if consistent {
                collect_paths(then, params, ret, registry, &merged, out)?;
            }
            return collect_paths(els, params, ret, registry, taken, out);
        }
    }
    out.push(Path { conditions: taken.clone(), leaf: decode_value(body, ret, registry)? });
    Ok(())
}

/// Evaluates an ite decision tree on concrete arguments.
fn evaluate<'a>(paths: &'a [Path], args: &[HostValue]) -> &'a HostValue {
    // paths are in first-match order and the last one has no conditions
    paths
        .iter()
        .find(|p| p.conditions.iter().all(|(i, v)| &args[*i] == v))
        .map(|p| &p.leaf)
        .unwrap_or(&paths[paths.len() - 1].leaf)
}

/// Decodes a function interpretation body: a nest of `ite`s testing
/// parameters against literals, ending in literal leaves.
pub fn decode_fn_interp(
    params: &[(String, Sort)],
    body: &SExpr,
    ret: &Sort,
    registry: &SortRegistry,
) -> Result<FunctionTable, DecodeError> {
    let mut paths = Vec::new();
    collect_paths(body, params, ret, registry, &Vec::new(), &mut paths)?;
    let default = paths.last().map(|p| p.leaf.clone()).ok_or_else(|| unsupported(body))?;
    let mut entries: Vec<(Vec<HostValue>, HostValue)> = Vec::new();
    for path in &paths[..paths.len() - 1] {
        if path.conditions.len() < params.len() {
            if path.leaf != default {
                return Err(unsupported(body));
            }
            continue;
        }
        let mut key: Vec<Option<HostValue>> = alloc::vec![None; params.len()];
        for (i, v) in &path.conditions {
            key[*i] = Some(v.clone());
        }
        let key: Vec<HostValue> = key.into_iter().map(Option::unwrap).collect();
        if entries.iter().any(|(k, _)| *k == key) {
            continue;
        }
        let value = evaluate(&paths, &key).clone();
        entries.push((key, value));
    }
    Ok(FunctionTable { entries, default: Box::new(default) })
}

/// Decodes a `get-value` response against the sorts of the queried terms.
pub fn decode_values(
    response: &SExpr,
    sorts: &[Sort],
    registry: &SortRegistry,
) -> Result<Vec<(SExpr, HostValue)>, DecodeError> {
    let pairs = response.as_list().ok_or_else(|| unsupported(response))?;
    if pairs.len() != sorts.len() {
        return Err(unsupported(response));
    }
    pairs
        .iter()
        .zip(sorts)
        .map(|(pair, sort)| match pair.as_list() {
            Some([term, value]) => Ok((term.clone(), decode_value(value, sort, registry)?)),
            _ => Err(unsupported(pair)),
        })
        .collect()
}

impl core::fmt::Display for HostValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}
