//! S-expressions shared by the constraint language, the data files and the
//! SMT-LIB2 wire protocol.

mod parse;
mod print;
mod reader;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use parse::{parse, parse_one, SourcePosition, SyntaxError, SyntaxErrorKind};
pub use print::needs_quoting;
pub use reader::{ByteSource, FormReader, ReadError, SliceSource};

/// A parsed S-expression.
///
/// Symbol names never contain `|`; the lexer cannot produce one and the
/// printer has no way to quote it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SExpr {
    Symbol(String),
    Int(BigInt),
    /// `numer/denom` with `denom > 0`. Not reduced.
    Rational {
        numer: BigInt,
        denom: BigInt,
    },
    /// Decimal literal in its original spelling, e.g. `1.50`.
    Decimal(String),
    String(String),
    /// `value < 2^width`, `width > 0`.
    Bitvec {
        width: u32,
        value: BigUint,
    },
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn sym(name: impl Into<String>) -> Self {
        SExpr::Symbol(name.into())
    }

    pub fn int(value: impl Into<BigInt>) -> Self {
        SExpr::Int(value.into())
    }

    pub fn string(value: impl Into<String>) -> Self {
        SExpr::String(value.into())
    }

    pub fn list(items: impl IntoIterator<Item = SExpr>) -> Self {
        SExpr::List(items.into_iter().collect())
    }

    /// Builds a rational literal, moving the sign onto the numerator.
    /// Returns `None` for a zero denominator.
    pub fn rational(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Option<Self> {
        let (mut numer, mut denom) = (numer.into(), denom.into());
        if denom.is_zero() {
            return None;
        }
        if denom.is_negative() {
            numer = -numer;
            denom = -denom;
        }
        Some(SExpr::Rational { numer, denom })
    }

    /// Builds a decimal literal after checking its spelling.
    pub fn decimal(text: impl Into<String>) -> Option<Self> {
        let text = text.into();
        parse::is_decimal(&text).then_some(SExpr::Decimal(text))
    }

    pub fn bitvec(width: u32, value: impl Into<BigUint>) -> Option<Self> {
        let value = value.into();
        (width > 0 && value.bits() <= u64::from(width)).then_some(SExpr::Bitvec { width, value })
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.as_symbol() == Some(name)
    }

    /// Keywords are symbols written with a leading colon.
    pub fn is_keyword(&self) -> bool {
        matches!(self, SExpr::Symbol(s) if s.len() > 1 && s.starts_with(':'))
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }

    /// Exact rational reading of a numeric literal.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            SExpr::Int(n) => Some(BigRational::from_integer(n.clone())),
            SExpr::Rational { numer, denom } => Some(BigRational::new(numer.clone(), denom.clone())),
            SExpr::Decimal(text) => Some(decimal_value(text)),
            _ => None,
        }
    }
}

/// Rational value of a well-formed decimal spelling such as `-12.034`.
pub fn decimal_value(text: &str) -> BigRational {
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let mut all = String::with_capacity(whole.len() + frac.len());
    all.push_str(whole);
    all.push_str(frac);
    let numer: BigInt = all.parse().unwrap_or_default();
    let denom = num_traits::pow(BigInt::from(10u8), frac.len());
    let value = BigRational::new(numer, denom);
    if negative {
        -value
    } else {
        value
    }
}

/// Shortest decimal spelling of `value` if its expansion terminates.
pub fn rational_to_decimal(value: &BigRational) -> Option<String> {
    let denom = value.denom().clone();
    let mut d = denom.clone();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let places = twos.max(fives).max(1);
    let scale = num_traits::pow(BigInt::from(10u8), places);
    let scaled = (value.numer() * &scale) / &denom;
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = if digits.len() <= places {
        let mut padded = "0".repeat(places + 1 - digits.len());
        padded.push_str(&digits);
        padded
    } else {
        digits
    };
    let (whole, frac) = digits.split_at(digits.len() - places);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(whole);
    out.push('.');
    out.push_str(frac);
    Some(out)
}
