//! The environment stack: declared names per assertion level.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::sexpr::SExpr;
use crate::sort::{FuncRank, Resolved, Sort, SortError, SortRegistry};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    Const(Sort),
    Fun(FuncRank),
}

impl From<Resolved> for Signature {
    fn from(r: Resolved) -> Self {
        match r {
            Resolved::Sort(s) => Signature::Const(s),
            Resolved::Rank(r) => Signature::Fun(r),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signature::Const(s) => write!(f, "{s}"),
            Signature::Fun(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub signature: Signature,
    pub level: usize,
    /// Position in overall declaration order, used to order model output.
    pub order: u64,
}

impl Declaration {
    /// The `declare-const` / `declare-fun` command for this declaration.
    pub fn command(&self) -> SExpr {
        declaration_command(&self.name, &self.signature)
    }
}

pub fn declaration_command(name: &str, signature: &Signature) -> SExpr {
    match signature {
        Signature::Const(sort) => SExpr::list([SExpr::sym("declare-const"), SExpr::sym(name), sort.emit()]),
        Signature::Fun(rank) => SExpr::list([
            SExpr::sym("declare-fun"),
            SExpr::sym(name),
            SExpr::List(rank.params.iter().map(Sort::emit).collect()),
            rank.ret.emit(),
        ]),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("`{name}` is already declared as {existing}, cannot redeclare it as {attempted}")]
    ConflictingDeclaration { name: String, existing: Box<Signature>, attempted: Box<Signature> },
    #[error("`{0}` is not declared")]
    UndeclaredName(String),
    #[error("cannot pop the base assertion level")]
    PopOnBaseLevel,
    #[error("malformed specifier list `{0}`")]
    MalformedSpecifierList(SExpr),
    #[error(transparent)]
    Sort(#[from] SortError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Level {
    decls: Vec<Declaration>,
    commands: Vec<SExpr>,
}

/// Stack of assertion levels. Level 0 always exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvStack {
    levels: Vec<Level>,
    next_order: u64,
}

impl Default for EnvStack {
    fn default() -> Self {
        Self::new()
    }
}

impl EnvStack {
    pub fn new() -> Self {
        EnvStack { levels: alloc::vec![Level::default()], next_order: 0 }
    }

    /// Number of live levels, counting the base level.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn current_level(&self) -> usize {
        self.levels.len() - 1
    }

    fn find(&self, name: &str) -> Option<&Declaration> {
        self.levels.iter().flat_map(|l| l.decls.iter()).find(|d| d.name == name)
    }

    pub fn lookup(&self, name: &str) -> Result<&Declaration, ScopeError> {
        self.find(name).ok_or_else(|| ScopeError::UndeclaredName(name.into()))
    }

    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.find(name)
    }

    /// Every live declaration in declaration order.
    pub fn declarations(&self) -> impl Iterator<Item = &Declaration> {
        self.levels.iter().flat_map(|l| l.decls.iter())
    }

    fn check(&self, name: &str, signature: &Signature) -> Result<bool, ScopeError> {
        match self.find(name) {
            None => Ok(true),
            Some(d) if &d.signature == signature => Ok(false),
            Some(d) => Err(ScopeError::ConflictingDeclaration {
                name: name.into(),
                existing: Box::new(d.signature.clone()),
                attempted: Box::new(signature.clone()),
            }),
        }
    }

    fn insert(&mut self, name: &str, signature: Signature) -> SExpr {
        let level = self.current_level();
        let decl = Declaration { name: name.into(), signature, level, order: self.next_order };
        self.next_order += 1;
        let command = decl.command();
        let top = self.levels.last_mut().unwrap();
        top.decls.push(decl);
        top.commands.push(command.clone());
        command
    }

    /// Declares `name` at the current level. Returns the command to send, or
    /// `None` when an identical declaration already exists.
    pub fn declare(&mut self, name: &str, signature: Signature) -> Result<Option<SExpr>, ScopeError> {
        if self.check(name, &signature)? {
            Ok(Some(self.insert(name, signature)))
        } else {
            Ok(None)
        }
    }

    /// Declares every `name spec` pair of an inline specifier list such as
    /// `(x :bool y :int)`. Nothing is declared unless every pair succeeds.
    pub fn merge_inline_specifiers(
        &mut self,
        specifiers: &SExpr,
        registry: &SortRegistry,
    ) -> Result<Vec<SExpr>, ScopeError> {
        let malformed = || ScopeError::MalformedSpecifierList(specifiers.clone());
        let items = specifiers.as_list().ok_or_else(malformed)?;
        if items.len() % 2 != 0 {
            return Err(malformed());
        }
        let mut staged: Vec<(String, Signature)> = Vec::new();
        for pair in items.chunks(2) {
            let name = match &pair[0] {
                SExpr::Symbol(s) if !pair[0].is_keyword() => s,
                _ => return Err(malformed()),
            };
            let spec = &pair[1];
            if !(spec.is_keyword() || matches!(spec, SExpr::List(_))) {
                return Err(malformed());
            }
            let signature = Signature::from(registry.resolve(spec)?);
            if let Some((_, earlier)) = staged.iter().find(|(n, _)| n == name) {
                if earlier != &signature {
                    return Err(ScopeError::ConflictingDeclaration {
                        name: name.clone(),
                        existing: Box::new(earlier.clone()),
                        attempted: Box::new(signature),
                    });
                }
                continue;
            }
            if self.check(name, &signature)? {
                staged.push((name.clone(), signature));
            }
        }
        Ok(staged.into_iter().map(|(name, sig)| self.insert(&name, sig)).collect())
    }

    /// Records a command (typically an assertion) at the current level.
    pub fn record(&mut self, command: SExpr) {
        self.levels.last_mut().unwrap().commands.push(command);
    }

    /// Commands recorded at `level`, in issue order.
    pub fn commands_at(&self, level: usize) -> &[SExpr] {
        self.levels.get(level).map(|l| l.commands.as_slice()).unwrap_or(&[])
    }

    pub fn push_level(&mut self) {
        self.levels.push(Level::default());
    }

    pub fn pop_level(&mut self) -> Result<(), ScopeError> {
        if self.levels.len() <= 1 {
            return Err(ScopeError::PopOnBaseLevel);
        }
        self.levels.pop();
        Ok(())
    }
}
