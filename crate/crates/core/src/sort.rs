//! Sorts, sort specifiers and the registry of user-defined datatypes.
//!
//! Sort names compare case-insensitively and ignore any `pkg:` style prefix,
//! so `int`, `:int` and `Int` all denote the same builtin sort. User sorts
//! are stored under their upper-cased name, which is also the name the
//! solver sees.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::sexpr::{needs_quoting, SExpr};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SortIndex {
    Num(u64),
    Sym(String),
}

impl SortIndex {
    fn to_sexpr(&self) -> SExpr {
        match self {
            SortIndex::Num(n) => SExpr::int(*n),
            SortIndex::Sym(s) => SExpr::sym(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnumMember {
    /// The label as the user wrote it: an integer, symbol or string.
    pub label: SExpr,
    pub constructor: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnumSort {
    pub name: String,
    pub members: Vec<EnumMember>,
}

impl EnumSort {
    pub fn constructor_for(&self, label: &SExpr) -> Option<&str> {
        let key = label_key(label)?;
        self.members
            .iter()
            .find(|m| label_key(&m.label).as_deref() == Some(key.as_str()))
            .map(|m| m.constructor.as_str())
    }

    pub fn member_for_constructor(&self, constructor: &str) -> Option<&EnumMember> {
        self.members.iter().find(|m| m.constructor == constructor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleField {
    pub name: String,
    pub accessor: String,
    pub sort: Sort,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleSort {
    pub name: String,
    pub constructor: String,
    pub fields: Vec<TupleField>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    /// `Bool`, `Int`, `Real`, `String` or `RegLan`.
    Builtin(String),
    Indexed {
        name: String,
        indices: Vec<SortIndex>,
    },
    Parametric {
        name: String,
        args: Vec<Sort>,
    },
    Enum(Arc<EnumSort>),
    Tuple(Arc<TupleSort>),
}

impl Sort {
    pub fn bool() -> Self {
        Sort::Builtin("Bool".into())
    }
    pub fn int() -> Self {
        Sort::Builtin("Int".into())
    }
    pub fn real() -> Self {
        Sort::Builtin("Real".into())
    }
    pub fn string() -> Self {
        Sort::Builtin("String".into())
    }
    pub fn reglan() -> Self {
        Sort::Builtin("RegLan".into())
    }
    pub fn bitvec(width: u32) -> Self {
        Sort::Indexed { name: "BitVec".into(), indices: alloc::vec![SortIndex::Num(width.into())] }
    }
    pub fn seq(elem: Sort) -> Self {
        Sort::Parametric { name: "Seq".into(), args: alloc::vec![elem] }
    }
    pub fn array(index: Sort, elem: Sort) -> Self {
        Sort::Parametric { name: "Array".into(), args: alloc::vec![index, elem] }
    }

    fn is_builtin(&self, name: &str) -> bool {
        matches!(self, Sort::Builtin(n) if n == name)
    }
    pub fn is_bool(&self) -> bool {
        self.is_builtin("Bool")
    }
    pub fn is_int(&self) -> bool {
        self.is_builtin("Int")
    }
    pub fn is_real(&self) -> bool {
        self.is_builtin("Real")
    }
    pub fn is_numeric(&self) -> bool {
        self.is_int() || self.is_real()
    }
    pub fn is_string(&self) -> bool {
        self.is_builtin("String")
    }

    pub fn bitvec_width(&self) -> Option<u32> {
        match self {
            Sort::Indexed { name, indices } if name == "BitVec" => match indices.as_slice() {
                [SortIndex::Num(w)] => u32::try_from(*w).ok(),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn seq_element(&self) -> Option<&Sort> {
        match self {
            Sort::Parametric { name, args } if name == "Seq" => args.first(),
            _ => None,
        }
    }

    pub fn array_parts(&self) -> Option<(&Sort, &Sort)> {
        match self {
            Sort::Parametric { name, args } if name == "Array" && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn as_enum(&self) -> Option<&EnumSort> {
        match self {
            Sort::Enum(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&TupleSort> {
        match self {
            Sort::Tuple(t) => Some(t),
            _ => None,
        }
    }

    /// SMT-LIB2 rendering. Also a valid sort specifier that resolves back to
    /// this sort.
    pub fn emit(&self) -> SExpr {
        match self {
            Sort::Builtin(name) => SExpr::sym(name.clone()),
            Sort::Indexed { name, indices } => {
                let mut items = alloc::vec![SExpr::sym("_"), SExpr::sym(name.clone())];
                items.extend(indices.iter().map(SortIndex::to_sexpr));
                SExpr::List(items)
            }
            Sort::Parametric { name, args } => {
                let mut items = alloc::vec![SExpr::sym(name.clone())];
                items.extend(args.iter().map(Sort::emit));
                SExpr::List(items)
            }
            Sort::Enum(e) => SExpr::sym(e.name.clone()),
            Sort::Tuple(t) => SExpr::sym(t.name.clone()),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.emit())
    }
}

/// Parameter sorts plus return sort of a declared function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncRank {
    pub params: Vec<Sort>,
    pub ret: Sort,
}

impl fmt::Display for FuncRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") -> {}", self.ret)
    }
}

/// What a sort specifier denotes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolved {
    Sort(Sort),
    Rank(FuncRank),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("sort `{name}` takes {expected} argument(s), got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("malformed sort specifier `{0}`")]
    MalformedSpecifier(SExpr),
    #[error("a sort named `{0}` already exists")]
    DuplicateSortName(String),
    #[error("enum sort `{sort}` lists member `{member}` twice")]
    DuplicateMember { sort: String, member: String },
    #[error("enum sort `{0}` has no members")]
    EmptyEnum(String),
    #[error("tuple sort `{sort}` lists field `{field}` twice")]
    DuplicateFieldName { sort: String, field: String },
    #[error("datatype symbol `{0}` is already taken")]
    SymbolClash(String),
}

/// Canonical (upper-cased, prefix-free) form of a sort name.
pub fn canonical_sort_name(name: &str) -> String {
    let bare = match name.rfind(':') {
        Some(i) => &name[i + 1..],
        None => name,
    };
    bare.to_uppercase()
}

/// Stringified enum label used for mangling and lookup.
pub fn label_key(label: &SExpr) -> Option<String> {
    match label {
        SExpr::Int(n) => Some(n.to_string()),
        SExpr::Symbol(s) => Some(s.clone()),
        SExpr::String(s) => Some(s.clone()),
        _ => None,
    }
}

const BUILTIN_NULLARY: [&str; 5] = ["Bool", "Int", "Real", "String", "RegLan"];

fn builtin_nullary(canon: &str) -> Option<&'static str> {
    BUILTIN_NULLARY.iter().copied().find(|b| b.to_uppercase() == canon)
}

fn parametric_arity(canon: &str) -> Option<(&'static str, usize)> {
    match canon {
        "SEQ" => Some(("Seq", 1)),
        "ARRAY" => Some(("Array", 2)),
        _ => None,
    }
}

fn is_bitvec_name(canon: &str) -> bool {
    matches!(canon, "BITVEC" | "BV")
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct UserSort {
    sort: Sort,
    level: usize,
}

/// Builtin sort table plus user-registered enumeration and tuple sorts.
///
/// Registrations are tagged with the assertion level they were made at and
/// are dropped when that level is popped, mirroring what the solver does
/// with the matching `declare-datatypes`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortRegistry {
    user: Vec<UserSort>,
    pending: Vec<SExpr>,
    level: usize,
}

impl SortRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn user_sorts(&self) -> impl Iterator<Item = &Sort> {
        self.user.iter().map(|u| &u.sort)
    }

    pub fn lookup_user(&self, name: &str) -> Option<&Sort> {
        let canon = canonical_sort_name(name);
        self.user.iter().map(|u| &u.sort).find(|s| match s {
            Sort::Enum(e) => e.name == canon,
            Sort::Tuple(t) => t.name == canon,
            _ => false,
        })
    }

    /// Resolves a sort specifier to a sort or a function rank.
    pub fn resolve(&self, spec: &SExpr) -> Result<Resolved, SortError> {
        if let Some(items) = spec.as_list() {
            if let Some(head) = items.first().and_then(SExpr::as_symbol) {
                if canonical_sort_name(head) == "FN" {
                    return self.resolve_rank(spec, &items[1..]).map(Resolved::Rank);
                }
            }
        }
        self.resolve_sort(spec).map(Resolved::Sort)
    }

    /// Resolves a specifier that must denote a sort (not a function rank).
    pub fn resolve_sort(&self, spec: &SExpr) -> Result<Sort, SortError> {
        match spec {
            SExpr::Symbol(name) => {
                let canon = canonical_sort_name(name);
                if let Some(b) = builtin_nullary(&canon) {
                    return Ok(Sort::Builtin(b.into()));
                }
                if let Some(s) = self.lookup_user(name) {
                    return Ok(s.clone());
                }
                if let Some((pname, arity)) = parametric_arity(&canon) {
                    return Err(SortError::ArityMismatch { name: pname.into(), expected: arity, got: 0 });
                }
                if is_bitvec_name(&canon) {
                    return Err(SortError::ArityMismatch { name: "BitVec".into(), expected: 1, got: 0 });
                }
                Err(SortError::UnknownSort(name.clone()))
            }
            SExpr::List(items) => {
                let Some(head) = items.first().and_then(SExpr::as_symbol) else {
                    return Err(SortError::MalformedSpecifier(spec.clone()));
                };
                if head == "_" {
                    let Some(name) = items.get(1).and_then(SExpr::as_symbol) else {
                        return Err(SortError::MalformedSpecifier(spec.clone()));
                    };
                    return self.resolve_indexed(spec, name, &items[2..]);
                }
                let canon = canonical_sort_name(head);
                if is_bitvec_name(&canon) {
                    return self.resolve_indexed(spec, head, &items[1..]);
                }
                if let Some((pname, arity)) = parametric_arity(&canon) {
                    let args = &items[1..];
                    if args.len() != arity {
                        return Err(SortError::ArityMismatch { name: pname.into(), expected: arity, got: args.len() });
                    }
                    let args = args.iter().map(|a| self.resolve_sort(a)).collect::<Result<_, _>>()?;
                    return Ok(Sort::Parametric { name: pname.into(), args });
                }
                if canon == "FN" {
                    return Err(SortError::MalformedSpecifier(spec.clone()));
                }
                if builtin_nullary(&canon).is_some() || self.lookup_user(head).is_some() {
                    return Err(SortError::MalformedSpecifier(spec.clone()));
                }
                Err(SortError::UnknownSort(head.into()))
            }
            _ => Err(SortError::MalformedSpecifier(spec.clone())),
        }
    }

    fn resolve_indexed(&self, spec: &SExpr, name: &str, indices: &[SExpr]) -> Result<Sort, SortError> {
        if !is_bitvec_name(&canonical_sort_name(name)) {
            return Err(SortError::UnknownSort(name.into()));
        }
        if indices.len() != 1 {
            return Err(SortError::ArityMismatch { name: "BitVec".into(), expected: 1, got: indices.len() });
        }
        match &indices[0] {
            SExpr::Int(n) => match u32::try_from(n) {
                Ok(w) if w > 0 => Ok(Sort::bitvec(w)),
                _ => Err(SortError::MalformedSpecifier(spec.clone())),
            },
            _ => Err(SortError::MalformedSpecifier(spec.clone())),
        }
    }

    fn resolve_rank(&self, spec: &SExpr, rest: &[SExpr]) -> Result<FuncRank, SortError> {
        let [params, ret] = rest else {
            return Err(SortError::MalformedSpecifier(spec.clone()));
        };
        let Some(params) = params.as_list() else {
            return Err(SortError::MalformedSpecifier(spec.clone()));
        };
        let params = params.iter().map(|p| self.resolve_sort(p)).collect::<Result<_, _>>()?;
        let ret = self.resolve_sort(ret)?;
        Ok(FuncRank { params, ret })
    }

    fn name_taken(&self, canon: &str) -> bool {
        builtin_nullary(canon).is_some()
            || parametric_arity(canon).is_some()
            || is_bitvec_name(canon)
            || self.lookup_user(canon).is_some()
    }

    /// Is `symbol` already used as a constructor or accessor?
    fn datatype_symbol_taken(&self, symbol: &str) -> bool {
        self.lookup_constructor(symbol).is_some() || self.lookup_accessor(symbol).is_some()
    }

    /// Registers an enumeration sort and queues its `declare-datatypes`
    /// command, which is also returned.
    pub fn register_enum(&mut self, name: &str, labels: &[SExpr]) -> Result<SExpr, SortError> {
        let canon = canonical_sort_name(name);
        if self.name_taken(&canon) {
            return Err(SortError::DuplicateSortName(canon));
        }
        if labels.is_empty() {
            return Err(SortError::EmptyEnum(canon));
        }
        let mut members: Vec<EnumMember> = Vec::with_capacity(labels.len());
        let mut keys: Vec<String> = Vec::with_capacity(labels.len());
        for label in labels {
            let Some(key) = label_key(label) else {
                return Err(SortError::MalformedSpecifier(label.clone()));
            };
            if keys.contains(&key) {
                return Err(SortError::DuplicateMember { sort: canon, member: key });
            }
            let plain = matches!(label, SExpr::Symbol(_))
                && !needs_quoting(&key)
                && !key.starts_with(':')
                && !crate::term::is_reserved_symbol(&key)
                && !self.datatype_symbol_taken(&key)
                && !members.iter().any(|m| m.constructor == key);
            let constructor = if plain { key.clone() } else { alloc::format!("{canon}.{key}") };
            if self.datatype_symbol_taken(&constructor) || members.iter().any(|m| m.constructor == constructor) {
                return Err(SortError::SymbolClash(constructor));
            }
            keys.push(key);
            members.push(EnumMember { label: label.clone(), constructor });
        }
        let sort = EnumSort { name: canon, members };
        let ctors =
            SExpr::List(sort.members.iter().map(|m| SExpr::list([SExpr::sym(m.constructor.clone())])).collect());
        let command = declare_datatype(&sort.name, ctors);
        self.user.push(UserSort { sort: Sort::Enum(Arc::new(sort)), level: self.level });
        self.pending.push(command.clone());
        Ok(command)
    }

    /// Registers a tuple sort with accessors named `<SORT>.<field>` and a
    /// constructor named `mk-<SORT>`.
    pub fn register_tuple(&mut self, name: &str, fields: &[(String, SExpr)]) -> Result<SExpr, SortError> {
        let canon = canonical_sort_name(name);
        if self.name_taken(&canon) {
            return Err(SortError::DuplicateSortName(canon));
        }
        let mut resolved: Vec<TupleField> = Vec::with_capacity(fields.len());
        for (field, spec) in fields {
            if resolved.iter().any(|f| &f.name == field) {
                return Err(SortError::DuplicateFieldName { sort: canon, field: field.clone() });
            }
            let sort = self.resolve_sort(spec)?;
            let accessor = alloc::format!("{canon}.{field}");
            if self.datatype_symbol_taken(&accessor) {
                return Err(SortError::SymbolClash(accessor));
            }
            resolved.push(TupleField { name: field.clone(), accessor, sort });
        }
        let constructor = alloc::format!("mk-{canon}");
        if self.datatype_symbol_taken(&constructor) {
            return Err(SortError::SymbolClash(constructor));
        }
        let mut ctor = alloc::vec![SExpr::sym(constructor.clone())];
        ctor.extend(resolved.iter().map(|f| SExpr::list([SExpr::sym(f.accessor.clone()), f.sort.emit()])));
        let command = declare_datatype(&canon, SExpr::list([SExpr::List(ctor)]));
        let sort = TupleSort { name: canon, constructor, fields: resolved };
        self.user.push(UserSort { sort: Sort::Tuple(Arc::new(sort)), level: self.level });
        self.pending.push(command.clone());
        Ok(command)
    }

    /// Declaration commands queued since the last call.
    pub fn take_pending(&mut self) -> Vec<SExpr> {
        core::mem::take(&mut self.pending)
    }

    /// Drops queued commands without sending them.
    pub fn discard_pending(&mut self) {
        self.pending.clear();
    }

    pub fn push_level(&mut self) {
        self.level += 1;
    }

    /// Drops every registration made at the current level.
    pub fn pop_level(&mut self) {
        let level = self.level;
        self.user.retain(|u| u.level < level);
        self.level = level.saturating_sub(1);
    }

    /// Finds the enum or tuple sort owning constructor `name`.
    pub fn lookup_constructor(&self, name: &str) -> Option<&Sort> {
        self.user_sorts().find(|s| match s {
            Sort::Enum(e) => e.member_for_constructor(name).is_some(),
            Sort::Tuple(t) => t.constructor == name,
            _ => false,
        })
    }

    /// Finds the tuple sort and field index for accessor `name`.
    pub fn lookup_accessor(&self, name: &str) -> Option<(&Sort, usize)> {
        self.user_sorts().find_map(|s| match s {
            Sort::Tuple(t) => t.fields.iter().position(|f| f.accessor == name).map(|i| (s, i)),
            _ => None,
        })
    }
}

fn declare_datatype(name: &str, constructors: SExpr) -> SExpr {
    SExpr::list([
        SExpr::sym("declare-datatypes"),
        SExpr::list([SExpr::list([SExpr::sym(name), SExpr::int(0)])]),
        SExpr::list([constructors]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;
    use alloc::string::ToString;
    use alloc::vec;

    fn spec(text: &str) -> SExpr {
        parse_one(text).unwrap()
    }

    #[test]
    fn keyword_and_plain_spellings_agree() {
        let reg = SortRegistry::new();
        assert_eq!(reg.resolve(&spec("int")).unwrap(), Resolved::Sort(Sort::int()));
        assert_eq!(reg.resolve(&spec(":int")).unwrap(), Resolved::Sort(Sort::int()));
        assert_eq!(reg.resolve(&spec("Int")).unwrap(), Resolved::Sort(Sort::int()));
        assert_eq!(reg.resolve(&spec("z3:INT")).unwrap(), Resolved::Sort(Sort::int()));
    }

    #[test]
    fn parametric_and_indexed() {
        let reg = SortRegistry::new();
        assert_eq!(reg.resolve_sort(&spec("(:seq :int)")).unwrap(), Sort::seq(Sort::int()));
        assert_eq!(reg.resolve_sort(&spec("(_ BitVec 3)")).unwrap(), Sort::bitvec(3));
        assert_eq!(reg.resolve_sort(&spec("(:bv 8)")).unwrap(), Sort::bitvec(8));
        assert_eq!(reg.resolve_sort(&spec("(:array :int :bool)")).unwrap(), Sort::array(Sort::int(), Sort::bool()));
    }

    #[test]
    fn function_rank() {
        let reg = SortRegistry::new();
        assert_eq!(
            reg.resolve(&spec("(:fn (:int) :string)")).unwrap(),
            Resolved::Rank(FuncRank { params: vec![Sort::int()], ret: Sort::string() })
        );
        assert_eq!(
            reg.resolve(&spec("(:fn () :bool)")).unwrap(),
            Resolved::Rank(FuncRank { params: vec![], ret: Sort::bool() })
        );
        assert!(reg.resolve(&spec("(:fn (:int))")).is_err());
        // rank payloads must be plain sorts
        assert!(reg.resolve(&spec("(:fn ((:fn () :int)) :int)")).is_err());
    }

    #[test]
    fn specifier_errors() {
        let reg = SortRegistry::new();
        assert_eq!(reg.resolve_sort(&spec("float")), Err(SortError::UnknownSort("float".into())));
        assert_eq!(
            reg.resolve_sort(&spec("(:seq :int :int)")),
            Err(SortError::ArityMismatch { name: "Seq".into(), expected: 1, got: 2 })
        );
        assert_eq!(
            reg.resolve_sort(&spec(":seq")),
            Err(SortError::ArityMismatch { name: "Seq".into(), expected: 1, got: 0 })
        );
        assert!(matches!(reg.resolve_sort(&spec("(_ BitVec 0)")), Err(SortError::MalformedSpecifier(_))));
        assert!(matches!(reg.resolve_sort(&spec("5")), Err(SortError::MalformedSpecifier(_))));
        assert!(matches!(reg.resolve_sort(&spec("(:int)")), Err(SortError::MalformedSpecifier(_))));
    }

    #[test]
    fn emitted_sorts() {
        assert_eq!(Sort::bitvec(3).emit().to_string(), "(_ BitVec 3)");
        assert_eq!(Sort::seq(Sort::int()).emit().to_string(), "(Seq Int)");
        assert_eq!(Sort::bool().emit().to_string(), "Bool");
    }

    #[test]
    fn square_enum_is_mangled() {
        let mut reg = SortRegistry::new();
        let labels: Vec<SExpr> = (1..=9).map(SExpr::int).collect();
        let cmd = reg.register_enum(":square", &labels).unwrap();
        let sort = reg.resolve_sort(&spec(":square")).unwrap();
        let e = sort.as_enum().unwrap();
        assert_eq!(e.name, "SQUARE");
        let ctors: Vec<&str> = e.members.iter().map(|m| m.constructor.as_str()).collect();
        assert_eq!(
            ctors,
            [
                "SQUARE.1", "SQUARE.2", "SQUARE.3", "SQUARE.4", "SQUARE.5", "SQUARE.6", "SQUARE.7", "SQUARE.8",
                "SQUARE.9"
            ]
        );
        assert_eq!(e.constructor_for(&SExpr::int(3)), Some("SQUARE.3"));
        assert_eq!(
            cmd.to_string(),
            "(declare-datatypes ((SQUARE 0)) (((SQUARE.1) (SQUARE.2) (SQUARE.3) (SQUARE.4) (SQUARE.5) (SQUARE.6) (SQUARE.7) (SQUARE.8) (SQUARE.9))))"
        );
        assert_eq!(reg.take_pending(), vec![cmd]);
        assert!(reg.take_pending().is_empty());
    }

    #[test]
    fn symbol_labels_stay_plain() {
        let mut reg = SortRegistry::new();
        reg.register_enum("rgb", &[SExpr::sym("red"), SExpr::sym("green"), SExpr::sym("blue")]).unwrap();
        let sort = reg.resolve_sort(&spec("RGB")).unwrap();
        let ctors: Vec<&str> = sort.as_enum().unwrap().members.iter().map(|m| m.constructor.as_str()).collect();
        assert_eq!(ctors, ["red", "green", "blue"]);
        // a second enum reusing `red` gets a mangled constructor
        reg.register_enum("light", &[SExpr::sym("red"), SExpr::sym("and")]).unwrap();
        let light = reg.resolve_sort(&spec("light")).unwrap();
        let ctors: Vec<&str> = light.as_enum().unwrap().members.iter().map(|m| m.constructor.as_str()).collect();
        assert_eq!(ctors, ["LIGHT.red", "LIGHT.and"]);
    }

    #[test]
    fn enum_errors() {
        let mut reg = SortRegistry::new();
        reg.register_enum(":square", &[SExpr::int(1)]).unwrap();
        assert_eq!(reg.register_enum("SQUARE", &[SExpr::int(1)]), Err(SortError::DuplicateSortName("SQUARE".into())));
        assert_eq!(reg.register_enum("int", &[SExpr::int(1)]), Err(SortError::DuplicateSortName("INT".into())));
        assert_eq!(reg.register_enum("e", &[]), Err(SortError::EmptyEnum("E".into())));
        assert_eq!(
            reg.register_enum("d", &[SExpr::int(1), SExpr::string("1")]),
            Err(SortError::DuplicateMember { sort: "D".into(), member: "1".into() })
        );
    }

    #[test]
    fn person_tuple() {
        let mut reg = SortRegistry::new();
        let cmd =
            reg.register_tuple(":person", &[("age".into(), spec(":int")), ("name".into(), spec(":string"))]).unwrap();
        assert_eq!(
            cmd.to_string(),
            "(declare-datatypes ((PERSON 0)) (((mk-PERSON (PERSON.age Int) (PERSON.name String)))))"
        );
        let sort = reg.resolve_sort(&spec("Person")).unwrap();
        let t = sort.as_tuple().unwrap();
        assert_eq!(t.fields.len(), 2);
        assert_eq!(reg.lookup_accessor("PERSON.name").map(|(_, i)| i), Some(1));
        assert!(reg.lookup_constructor("mk-PERSON").is_some());
    }

    #[test]
    fn degenerate_and_bad_tuples() {
        let mut reg = SortRegistry::new();
        let cmd = reg.register_tuple("unit", &[]).unwrap();
        assert_eq!(cmd.to_string(), "(declare-datatypes ((UNIT 0)) (((mk-UNIT))))");
        assert_eq!(
            reg.register_tuple("pair", &[("a".into(), spec("Int")), ("a".into(), spec("Bool"))]),
            Err(SortError::DuplicateFieldName { sort: "PAIR".into(), field: "a".into() })
        );
        assert_eq!(
            reg.register_tuple("p2", &[("a".into(), spec("nosuch"))]),
            Err(SortError::UnknownSort("nosuch".into()))
        );
        assert!(reg.lookup_user("pair").is_none());
    }

    #[test]
    fn registrations_are_level_scoped() {
        let mut reg = SortRegistry::new();
        reg.register_enum("a", &[SExpr::sym("x")]).unwrap();
        reg.push_level();
        reg.register_enum("b", &[SExpr::sym("y")]).unwrap();
        assert!(reg.lookup_user("b").is_some());
        reg.pop_level();
        assert!(reg.lookup_user("b").is_none());
        assert!(reg.lookup_user("a").is_some());
        // the name is free again
        reg.register_enum("b", &[SExpr::sym("y")]).unwrap();
    }
}
