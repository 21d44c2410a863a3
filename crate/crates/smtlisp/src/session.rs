use std::fmt;
use std::io;
use std::time::Duration;

use num_rational::BigRational;
use num_traits::Signed;
use smtlisp_core::model::{decode_model, decode_value, DecodeError, HostValue, Model};
use smtlisp_core::scope::{EnvStack, ScopeError, Signature};
use smtlisp_core::sexpr::{parse_one, rational_to_decimal, SExpr, SyntaxError};
use smtlisp_core::sort::{Sort, SortError, SortRegistry};
use smtlisp_core::term::{build, build_formula, lower_unchecked, BuildError};
use thiserror::Error;

use crate::config::SessionConfig;
use crate::process::{SolverProcess, WireError};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("solver not found: {0}")]
    SolverNotFound(String),
    #[error("solver rejected option {option}: {message}")]
    SolverRejectedOption { option: String, message: String },
    #[error("solver did not answer during startup")]
    StartupTimeout,
    #[error("no response from the solver within {0:?}")]
    ResponseTimeout(Duration),
    #[error("solver error: {0}")]
    SolverError(String),
    #[error("solver process exited: {0}")]
    SolverExited(String),
    #[error("unexpected response to {command}: {response}")]
    UnexpectedResponse { command: String, response: String },
    #[error("no model available; the last check was not sat or the state changed since")]
    NoModelAvailable,
    #[error("session is closed")]
    SessionClosed,
    #[error("cannot pop the base assertion level")]
    PopOnBaseLevel,
    #[error("soft constraint weight {0} must be positive with a finite decimal expansion")]
    InvalidWeight(BigRational),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

pub type Result<T, E = SessionError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Sat,
    Unsat,
    /// The solver's reason, when it gives one.
    Unknown(Option<String>),
}

impl CheckResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, CheckResult::Sat)
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, CheckResult::Unsat)
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckResult::Sat => f.write_str("sat"),
            CheckResult::Unsat => f.write_str("unsat"),
            CheckResult::Unknown(None) => f.write_str("unknown"),
            CheckResult::Unknown(Some(r)) => write!(f, "unknown ({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatValue {
    Number(f64),
    Text(String),
}

impl StatValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            StatValue::Number(v) => Some(*v),
            StatValue::Text(_) => None,
        }
    }
}

/// A running solver plus the client-side mirror of its assertion stack.
pub struct Session {
    process: Option<SolverProcess>,
    env: EnvStack,
    registry: SortRegistry,
    timeout: Duration,
    last_result: Option<CheckResult>,
    model_available: bool,
    checks: usize,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("live", &self.process.is_some())
            .field("depth", &self.env.depth())
            .field("last_result", &self.last_result)
            .finish_non_exhaustive()
    }
}

const STANDARD_OPTIONS: [(&str, &str); 3] =
    [("print-success", "true"), ("produce-models", "true"), ("global-declarations", "false")];

fn command(head: &str, args: impl IntoIterator<Item = SExpr>) -> SExpr {
    let mut items = vec![SExpr::sym(head)];
    items.extend(args);
    SExpr::List(items)
}

fn error_message(form: &SExpr) -> Option<String> {
    match form.as_list()? {
        [head, SExpr::String(msg)] if head.is_symbol("error") => Some(msg.clone()),
        [head, ..] if head.is_symbol("error") => Some(form.to_string()),
        _ => None,
    }
}

impl Session {
    pub fn open(config: SessionConfig) -> Result<Self> {
        let cmd = config.resolve_command().map_err(SessionError::SolverNotFound)?;
        let process = SolverProcess::spawn(&cmd).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound | io::ErrorKind::PermissionDenied => {
                SessionError::SolverNotFound(format!("{} ({e})", cmd.join(" ")))
            }
            _ => SessionError::SolverExited(e.to_string()),
        })?;
        let mut session = Session {
            process: Some(process),
            env: EnvStack::new(),
            registry: SortRegistry::new(),
            timeout: config.timeout,
            last_result: None,
            model_available: false,
            checks: 0,
        };
        let standard = STANDARD_OPTIONS.iter().map(|(k, v)| ((*k).to_owned(), SExpr::sym(*v)));
        for (key, value) in standard.chain(config.options.iter().cloned()) {
            match session.set_option(&key, value) {
                Ok(()) => {}
                Err(SessionError::ResponseTimeout(_)) => return Err(SessionError::StartupTimeout),
                Err(SessionError::SolverExited(msg)) if msg.is_empty() => {
                    return Err(SessionError::SolverNotFound(cmd.join(" ")))
                }
                Err(e) => return Err(e),
            }
        }
        log::info!("solver session started: {}", cmd.join(" "));
        Ok(session)
    }

    /// Opens a session on the default solver resolution chain.
    pub fn open_default() -> Result<Self> {
        Session::open(SessionConfig::default())
    }

    pub fn is_closed(&self) -> bool {
        self.process.is_none()
    }

    pub fn env(&self) -> &EnvStack {
        &self.env
    }

    pub fn registry(&self) -> &SortRegistry {
        &self.registry
    }

    /// Number of assertion levels, 1 when nothing is pushed.
    pub fn depth(&self) -> usize {
        self.env.depth()
    }

    pub fn last_result(&self) -> Option<&CheckResult> {
        self.last_result.as_ref()
    }

    /// Raw text of the most recent solver response.
    pub fn last_response_text(&self) -> Option<String> {
        self.process.as_ref().map(SolverProcess::last_text)
    }

    pub fn set_timeout(&mut self, timeout: Duration) {
        self.timeout = timeout;
    }

    fn invalidate(&mut self) {
        self.last_result = None;
        self.model_available = false;
    }

    fn wire_failure(&mut self, e: WireError) -> SessionError {
        let process = self.process.take();
        let stderr = process.as_ref().map(SolverProcess::stderr_text).unwrap_or_default();
        if let Some(mut p) = process {
            p.shutdown(Duration::from_millis(100));
        }
        match e {
            WireError::Timeout => {
                log::warn!("solver timed out; session terminated");
                SessionError::ResponseTimeout(self.timeout)
            }
            WireError::Closed => SessionError::SolverExited(stderr.trim().to_owned()),
            WireError::Io(e) => SessionError::SolverExited(e.to_string()),
            WireError::Syntax(msg) => SessionError::UnexpectedResponse { command: "read".into(), response: msg },
        }
    }

    /// Sends one command and reads exactly one response form.
    fn exchange(&mut self, cmd: &SExpr) -> Result<SExpr> {
        let timeout = self.timeout;
        let process = self.process.as_mut().ok_or(SessionError::SessionClosed)?;
        let outcome = process.send(&cmd.to_string()).and_then(|()| process.read(timeout));
        outcome.map_err(|e| self.wire_failure(e))
    }

    /// Sends a command that answers `success`.
    fn run(&mut self, cmd: &SExpr) -> Result<()> {
        let response = self.exchange(cmd)?;
        if response.is_symbol("success") {
            return Ok(());
        }
        Err(self.unexpected(cmd, response))
    }

    fn unexpected(&self, cmd: &SExpr, response: SExpr) -> SessionError {
        match error_message(&response) {
            Some(msg) => SessionError::SolverError(msg),
            None => SessionError::UnexpectedResponse { command: cmd.to_string(), response: response.to_string() },
        }
    }

    /// Sends a command whose answer is a form, failing on `(error ...)`.
    fn query(&mut self, cmd: &SExpr) -> Result<SExpr> {
        let response = self.exchange(cmd)?;
        match error_message(&response) {
            Some(msg) => Err(SessionError::SolverError(msg)),
            None => Ok(response),
        }
    }

    pub fn set_option(&mut self, key: &str, value: SExpr) -> Result<()> {
        let key = key.trim_start_matches(':');
        let cmd = command("set-option", [SExpr::sym(format!(":{key}")), value]);
        self.invalidate();
        self.run(&cmd).map_err(|e| match e {
            SessionError::SolverError(message) => {
                SessionError::SolverRejectedOption { option: key.to_owned(), message }
            }
            other => other,
        })
    }

    /// Sends declarations produced by the env, undoing the env's record of
    /// any the solver refuses.
    fn send_declarations(&mut self, commands: Vec<SExpr>, before: EnvStack) -> Result<()> {
        for (i, cmd) in commands.iter().enumerate() {
            if let Err(e) = self.run(cmd) {
                let accepted: Vec<(String, Signature)> = commands[..i]
                    .iter()
                    .filter_map(|c| c.as_list()?.get(1)?.as_symbol().map(str::to_owned))
                    .filter_map(|n| self.env.get(&n).map(|d| (n, d.signature.clone())))
                    .collect();
                self.env = before;
                for (name, sig) in accepted {
                    self.env.declare(&name, sig)?;
                }
                return Err(e);
            }
        }
        Ok(())
    }

    /// Declares every `name spec` pair of an inline specifier list.
    pub fn declare(&mut self, specifiers: &SExpr) -> Result<()> {
        let before = self.env.clone();
        let commands = self.env.merge_inline_specifiers(specifiers, &self.registry)?;
        if !commands.is_empty() {
            self.invalidate();
        }
        self.send_declarations(commands, before)
    }

    pub fn declare_str(&mut self, specifiers: &str) -> Result<()> {
        self.declare(&parse_one(specifiers)?)
    }

    fn send_registration(&mut self, before: SortRegistry) -> Result<()> {
        self.invalidate();
        for cmd in self.registry.take_pending() {
            if let Err(e) = self.run(&cmd) {
                self.registry = before;
                return Err(e);
            }
        }
        Ok(())
    }

    /// Registers an enumeration sort such as `:square` with the given labels
    /// and declares it to the solver.
    pub fn register_enum(&mut self, name: &str, labels: &[SExpr]) -> Result<Sort> {
        let before = self.registry.clone();
        self.registry.register_enum(name, labels)?;
        self.send_registration(before)?;
        Ok(self.registry.resolve_sort(&SExpr::sym(name))?)
    }

    /// Registers a tuple sort with `(field, sort-specifier)` pairs.
    pub fn register_tuple(&mut self, name: &str, fields: &[(String, SExpr)]) -> Result<Sort> {
        let before = self.registry.clone();
        self.registry.register_tuple(name, fields)?;
        self.send_registration(before)?;
        Ok(self.registry.resolve_sort(&SExpr::sym(name))?)
    }

    fn assert_lowered(&mut self, lowered: SExpr) -> Result<()> {
        let cmd = command("assert", [lowered]);
        self.invalidate();
        self.run(&cmd)?;
        self.env.record(cmd);
        Ok(())
    }

    /// Declares `specifiers`, sort-checks `form` as a formula and asserts
    /// it. Nothing is sent when building fails.
    pub fn assert_term(&mut self, specifiers: Option<&SExpr>, form: &SExpr) -> Result<()> {
        let before = self.env.clone();
        let commands = match specifiers {
            Some(s) => self.env.merge_inline_specifiers(s, &self.registry)?,
            None => Vec::new(),
        };
        let term = match build_formula(form, &self.env, &self.registry) {
            Ok(t) => t,
            Err(e) => {
                self.env = before;
                return Err(e.into());
            }
        };
        self.send_declarations(commands, before)?;
        self.assert_lowered(term.lower())
    }

    /// [`Session::assert_term`] on text, e.g.
    /// `assert_str("(x :bool y :int)", "(and x (>= y 5))")`.
    pub fn assert_str(&mut self, specifiers: &str, form: &str) -> Result<()> {
        let specs = if specifiers.trim().is_empty() { None } else { Some(parse_one(specifiers)?) };
        self.assert_term(specs.as_ref(), &parse_one(form)?)
    }

    /// Asserts every form in order; stops at the first failure.
    pub fn assert_all<'a>(&mut self, forms: impl IntoIterator<Item = &'a SExpr>) -> Result<()> {
        forms.into_iter().try_for_each(|f| self.assert_term(None, f))
    }

    /// Asserts `form` without sort checking. Names must still be declared
    /// through `specifiers` or earlier.
    pub fn assert_unchecked(&mut self, specifiers: Option<&SExpr>, form: &SExpr) -> Result<()> {
        if let Some(s) = specifiers {
            self.declare(s)?;
        }
        self.assert_lowered(lower_unchecked(form))
    }

    pub fn check_sat(&mut self) -> Result<CheckResult> {
        let cmd = command("check-sat", []);
        self.invalidate();
        let response = self.query(&cmd)?;
        self.checks += 1;
        let result = match response.as_symbol() {
            Some("sat") => CheckResult::Sat,
            Some("unsat") => CheckResult::Unsat,
            Some("unknown") => CheckResult::Unknown(self.reason_unknown()),
            _ => return Err(self.unexpected(&cmd, response)),
        };
        self.model_available = result.is_sat();
        self.last_result = Some(result.clone());
        Ok(result)
    }

    fn reason_unknown(&mut self) -> Option<String> {
        let response = self.query(&command("get-info", [SExpr::sym(":reason-unknown")])).ok()?;
        match response.as_list()? {
            [key, value] if key.is_symbol(":reason-unknown") => Some(match value {
                SExpr::String(s) => s.clone(),
                other => other.to_string(),
            }),
            _ => None,
        }
    }

    pub fn push(&mut self) -> Result<()> {
        self.invalidate();
        self.run(&command("push", [SExpr::int(1)]))?;
        self.env.push_level();
        self.registry.push_level();
        Ok(())
    }

    pub fn pop(&mut self) -> Result<()> {
        if self.env.depth() <= 1 {
            return Err(SessionError::PopOnBaseLevel);
        }
        self.invalidate();
        self.run(&command("pop", [SExpr::int(1)]))?;
        self.env.pop_level()?;
        self.registry.pop_level();
        Ok(())
    }

    /// Runs `f` inside a pushed scope that is popped on every path.
    pub fn scoped<T>(&mut self, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        self.push()?;
        let out = f(self);
        let popped = if self.is_closed() { Ok(()) } else { self.pop() };
        let value = out?;
        popped?;
        Ok(value)
    }

    fn require_model(&self) -> Result<()> {
        if self.process.is_none() {
            return Err(SessionError::SessionClosed);
        }
        if !self.model_available {
            return Err(SessionError::NoModelAvailable);
        }
        Ok(())
    }

    /// The raw `(get-model)` response.
    pub fn get_model(&mut self) -> Result<SExpr> {
        self.require_model()?;
        self.query(&command("get-model", []))
    }

    pub fn model(&mut self) -> Result<Model> {
        let raw = self.get_model()?;
        Ok(decode_model(&raw, &self.registry, &self.env)?)
    }

    /// The current model as `((name value) ...)` in declaration order.
    pub fn model_as_assignment(&mut self) -> Result<SExpr> {
        Ok(self.model()?.render_assignment())
    }

    fn value_query(&mut self, forms: &[SExpr]) -> Result<(Vec<Sort>, Vec<SExpr>)> {
        self.require_model()?;
        let terms = forms.iter().map(|f| build(f, &self.env, &self.registry)).collect::<Result<Vec<_>, _>>()?;
        if terms.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        let cmd = command("get-value", [SExpr::List(terms.iter().map(|t| t.lower()).collect())]);
        let response = self.query(&cmd)?;
        let values = match response.as_list() {
            Some(pairs) if pairs.len() == terms.len() => pairs
                .iter()
                .map(|p| match p.as_list() {
                    Some([_, v]) => Some(v.clone()),
                    _ => None,
                })
                .collect::<Option<Vec<_>>>(),
            _ => None,
        };
        let values = values.ok_or_else(|| self.unexpected(&cmd, response))?;
        Ok((terms.into_iter().map(|t| t.sort).collect(), values))
    }

    /// `(get-value ...)`: each form paired with the solver's raw value.
    pub fn get_value(&mut self, forms: &[SExpr]) -> Result<Vec<(SExpr, SExpr)>> {
        let (_, values) = self.value_query(forms)?;
        Ok(forms.iter().cloned().zip(values).collect())
    }

    /// Evaluates each form under the current model and decodes the results.
    pub fn eval_all(&mut self, forms: &[SExpr]) -> Result<Vec<HostValue>> {
        let (sorts, values) = self.value_query(forms)?;
        values.iter().zip(&sorts).map(|(v, s)| decode_value(v, s, &self.registry).map_err(Into::into)).collect()
    }

    pub fn eval(&mut self, form: &SExpr) -> Result<HostValue> {
        Ok(self.eval_all(std::slice::from_ref(form))?.remove(0))
    }

    pub fn eval_str(&mut self, form: &str) -> Result<HostValue> {
        self.eval(&parse_one(form)?)
    }

    fn objective(&mut self, head: &str, form: &SExpr) -> Result<()> {
        let term = build(form, &self.env, &self.registry)?;
        if !(term.sort.is_numeric() || term.sort.bitvec_width().is_some()) {
            return Err(BuildError::SortMismatch {
                operator: head.to_owned(),
                position: 1,
                expected: "Int, Real or BitVec".into(),
                got: term.sort,
            }
            .into());
        }
        self.invalidate();
        self.run(&command(head, [term.lower()]))
    }

    pub fn maximize(&mut self, form: &SExpr) -> Result<()> {
        self.objective("maximize", form)
    }

    pub fn minimize(&mut self, form: &SExpr) -> Result<()> {
        self.objective("minimize", form)
    }

    /// `(assert-soft form :weight w)`. The weight is written as a numeral
    /// or a decimal.
    pub fn assert_soft(&mut self, form: &SExpr, weight: &BigRational) -> Result<()> {
        if !weight.is_positive() {
            return Err(SessionError::InvalidWeight(weight.clone()));
        }
        let weight_form = if weight.is_integer() {
            SExpr::Int(weight.to_integer())
        } else {
            rational_to_decimal(weight)
                .and_then(SExpr::decimal)
                .ok_or_else(|| SessionError::InvalidWeight(weight.clone()))?
        };
        let term = build_formula(form, &self.env, &self.registry)?;
        self.invalidate();
        self.run(&command("assert-soft", [term.lower(), SExpr::sym(":weight"), weight_form]))
    }

    /// `(get-objectives)` as `(term value)` pairs; unbounded objectives
    /// come back as the solver writes them, e.g. `oo`.
    pub fn get_objectives(&mut self) -> Result<Vec<(SExpr, SExpr)>> {
        let cmd = command("get-objectives", []);
        let response = self.query(&cmd)?;
        let pairs = match response.as_list() {
            Some([head, rest @ ..]) if head.is_symbol("objectives") => rest,
            _ => return Err(self.unexpected(&cmd, response)),
        };
        pairs
            .iter()
            .map(|p| match p.as_list() {
                Some([t, v]) => Ok((t.clone(), v.clone())),
                _ => Err(self.unexpected(&cmd, response.clone())),
            })
            .collect()
    }

    /// `(get-info :all-statistics)` as name/value pairs.
    pub fn statistics(&mut self) -> Result<Vec<(String, StatValue)>> {
        let response = self.query(&command("get-info", [SExpr::sym(":all-statistics")]))?;
        Ok(parse_statistics(&response))
    }

    /// Number of `check-sat` commands issued.
    pub fn checks_issued(&self) -> usize {
        self.checks
    }

    /// Sends `(exit)` and stops the process. Closing twice is a no-op.
    pub fn close(&mut self) {
        let Some(mut process) = self.process.take() else { return };
        if process.send("(exit)").is_ok() {
            // the acknowledgment may never arrive
            let _ = process.read(Duration::from_millis(500));
        }
        process.shutdown(Duration::from_millis(500));
        self.invalidate();
        log::info!("solver session closed");
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        self.close();
    }
}

fn stat_value(form: &SExpr) -> StatValue {
    match form {
        SExpr::Int(_) | SExpr::Decimal(_) | SExpr::Rational { .. } => {
            match form.as_rational().and_then(|r| num_traits::ToPrimitive::to_f64(&r)) {
                Some(v) => StatValue::Number(v),
                None => StatValue::Text(form.to_string()),
            }
        }
        SExpr::String(s) | SExpr::Symbol(s) => StatValue::Text(s.clone()),
        other => StatValue::Text(other.to_string()),
    }
}

fn stat_name(form: &SExpr) -> Option<String> {
    match form {
        SExpr::Symbol(s) => Some(s.trim_start_matches(':').to_owned()),
        SExpr::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Reads either a flat attribute list `(:key value ...)` or a nested
/// `(:all-statistics ((name value) ...))`.
pub fn parse_statistics(response: &SExpr) -> Vec<(String, StatValue)> {
    let Some(items) = response.as_list() else { return Vec::new() };
    if let [key, SExpr::List(pairs)] = items {
        if key.is_symbol(":all-statistics") {
            return pairs
                .iter()
                .filter_map(|p| match p.as_list()? {
                    [name, value] => Some((stat_name(name)?, stat_value(value))),
                    _ => None,
                })
                .collect();
        }
    }
    items
        .chunks(2)
        .filter_map(|pair| match pair {
            [key, value] if key.is_keyword() => Some((stat_name(key)?, stat_value(value))),
            _ => None,
        })
        .collect()
}
