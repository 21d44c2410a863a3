use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Num, Zero};
use thiserror::Error;

use super::SExpr;

/// 1-based line and column of a character in the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourcePosition {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourcePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    UnexpectedClose,
    UnexpectedEnd,
    MalformedLiteral(String),
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxErrorKind::UnexpectedClose => f.write_str("unbalanced `)`"),
            SyntaxErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            SyntaxErrorKind::MalformedLiteral(tok) => write!(f, "malformed literal `{tok}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct SyntaxError {
    pub position: SourcePosition,
    pub kind: SyntaxErrorKind,
}

/// Parses every top-level form in `text`.
pub fn parse(text: &str) -> Result<Vec<SExpr>, SyntaxError> {
    let mut lexer = Lexer::new(text);
    let mut stack: Vec<(SourcePosition, Vec<SExpr>)> = Vec::new();
    let mut forms = Vec::new();
    while let Some((pos, token)) = lexer.next_token()? {
        let done = match token {
            Token::Open => {
                stack.push((pos, Vec::new()));
                continue;
            }
            Token::Close => match stack.pop() {
                Some((_, items)) => SExpr::List(items),
                None => return Err(SyntaxError { position: pos, kind: SyntaxErrorKind::UnexpectedClose }),
            },
            Token::Atom(atom) => atom,
        };
        match stack.last_mut() {
            Some((_, items)) => items.push(done),
            None => forms.push(done),
        }
    }
    if let Some((pos, _)) = stack.pop() {
        return Err(SyntaxError { position: pos, kind: SyntaxErrorKind::UnexpectedEnd });
    }
    Ok(forms)
}

/// Parses text that must hold exactly one form.
pub fn parse_one(text: &str) -> Result<SExpr, SyntaxError> {
    let mut forms = parse(text)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(SyntaxError { position: SourcePosition { line: 1, column: 1 }, kind: SyntaxErrorKind::UnexpectedEnd }),
        _ => Err(SyntaxError {
            position: SourcePosition { line: 1, column: 1 },
            kind: SyntaxErrorKind::MalformedLiteral(String::from("more than one form")),
        }),
    }
}

enum Token {
    Open,
    Close,
    Atom(SExpr),
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    column: u32,
}

pub(crate) fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';' | '|')
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn pos(&self) -> SourcePosition {
        SourcePosition { line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn next_token(&mut self) -> Result<Option<(SourcePosition, Token)>, SyntaxError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let start = self.pos();
        let c = self.bump().unwrap();
        let token = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            '"' => Token::Atom(SExpr::String(self.string_body(start)?)),
            '|' => {
                let mut name = String::new();
                loop {
                    match self.bump() {
                        Some('|') => break,
                        Some(c) => name.push(c),
                        None => return Err(SyntaxError { position: start, kind: SyntaxErrorKind::UnexpectedEnd }),
                    }
                }
                Token::Atom(SExpr::Symbol(name))
            }
            first => {
                let mut text = String::new();
                text.push(first);
                while let Some(&c) = self.chars.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                let atom = classify(&text).map_err(|kind| SyntaxError { position: start, kind })?;
                Token::Atom(atom)
            }
        };
        Ok(Some((start, token)))
    }

    fn string_body(&mut self, start: SourcePosition) -> Result<String, SyntaxError> {
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => {
                    if self.chars.peek() == Some(&'"') {
                        self.bump();
                        out.push('"');
                    } else {
                        return Ok(out);
                    }
                }
                Some(c) => out.push(c),
                None => return Err(SyntaxError { position: start, kind: SyntaxErrorKind::UnexpectedEnd }),
            }
        }
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn unsigned_part(text: &str) -> &str {
    text.strip_prefix('-').unwrap_or(text)
}

pub(crate) fn is_integer(text: &str) -> bool {
    all_digits(unsigned_part(text))
}

pub(crate) fn is_decimal(text: &str) -> bool {
    match unsigned_part(text).split_once('.') {
        Some((whole, frac)) => all_digits(whole) && all_digits(frac),
        None => false,
    }
}

pub(crate) fn is_rational(text: &str) -> bool {
    match unsigned_part(text).split_once('/') {
        Some((n, d)) => all_digits(n) && all_digits(d),
        None => false,
    }
}

/// Turns a bare token into an atom. Tokens that look like no literal
/// become symbols, including digit-led junk such as `0ms`, which some
/// solvers emit in statistics.
fn classify(text: &str) -> Result<SExpr, SyntaxErrorKind> {
    let malformed = || SyntaxErrorKind::MalformedLiteral(String::from(text));
    if let Some(rest) = text.strip_prefix('#') {
        let (radix, bits_per_digit, digits) = if let Some(d) = rest.strip_prefix('b') {
            (2, 1u32, d)
        } else if let Some(d) = rest.strip_prefix('x') {
            (16, 4u32, d)
        } else {
            return Err(malformed());
        };
        if digits.is_empty() || !digits.chars().all(|c| c.is_digit(radix)) {
            return Err(malformed());
        }
        let width =
            u32::try_from(digits.len()).ok().and_then(|n| n.checked_mul(bits_per_digit)).ok_or_else(malformed)?;
        let value = BigUint::from_str_radix(digits, radix).map_err(|_| malformed())?;
        return Ok(SExpr::Bitvec { width, value });
    }
    if is_integer(text) {
        return text.parse::<BigInt>().map(SExpr::Int).map_err(|_| malformed());
    }
    if is_decimal(text) {
        return Ok(SExpr::Decimal(String::from(text)));
    }
    if is_rational(text) {
        let (n, d) = text.split_once('/').unwrap();
        let numer: BigInt = n.parse().map_err(|_| malformed())?;
        let denom: BigInt = d.parse().map_err(|_| malformed())?;
        if denom.is_zero() {
            return Err(malformed());
        }
        return Ok(SExpr::Rational { numer, denom });
    }
    Ok(SExpr::Symbol(String::from(text)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sym(s: &str) -> SExpr {
        SExpr::sym(s)
    }

    #[test]
    fn usage_example_parses() {
        let forms = parse("(and x (>= y 5))").unwrap();
        assert_eq!(
            forms,
            vec![SExpr::list([sym("and"), sym("x"), SExpr::list([sym(">="), sym("y"), SExpr::int(5)]),])]
        );
    }

    #[test]
    fn empty_list() {
        assert_eq!(parse("()").unwrap(), vec![SExpr::List(vec![])]);
    }

    #[test]
    fn bitvector_literals() {
        assert_eq!(parse_one("#b101").unwrap(), SExpr::bitvec(3, 5u8).unwrap());
        assert_eq!(parse_one("#x1F").unwrap(), SExpr::bitvec(8, 31u8).unwrap());
        assert_eq!(parse_one("#b0000").unwrap(), SExpr::bitvec(4, 0u8).unwrap());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_one("-5").unwrap(), SExpr::int(-5));
        assert_eq!(parse_one("1.50").unwrap(), SExpr::Decimal("1.50".into()));
        assert_eq!(parse_one("-3/4").unwrap(), SExpr::rational(-3, 4).unwrap());
        assert_eq!(
            parse_one("123456789012345678901234567890").unwrap(),
            SExpr::Int("123456789012345678901234567890".parse().unwrap())
        );
        // `(- 5)` stays an application
        assert_eq!(parse_one("(- 5)").unwrap(), SExpr::list([sym("-"), SExpr::int(5)]));
        assert_eq!(parse_one("-").unwrap(), sym("-"));
    }

    #[test]
    fn strings_and_quoted_symbols() {
        assert_eq!(parse_one(r#""a""b""#).unwrap(), SExpr::string("a\"b"));
        assert_eq!(parse_one(r#""""#).unwrap(), SExpr::string(""));
        assert_eq!(parse_one("|hello world|").unwrap(), sym("hello world"));
        assert_eq!(parse_one("|SQUARE.1|").unwrap(), sym("SQUARE.1"));
        assert_eq!(parse_one("MixedCase").unwrap(), sym("MixedCase"));
    }

    #[test]
    fn comments_are_stripped() {
        let forms = parse("; header\n(a ; inline\n b)\n; trailing").unwrap();
        assert_eq!(forms, vec![SExpr::list([sym("a"), sym("b")])]);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("(a\n  (b c)").unwrap_err();
        assert_eq!(err.kind, SyntaxErrorKind::UnexpectedEnd);
        assert_eq!(err.position, SourcePosition { line: 1, column: 1 });

        let err = parse("a)\n").unwrap_err();
        assert_eq!(err.kind, SyntaxErrorKind::UnexpectedClose);
        assert_eq!(err.position, SourcePosition { line: 1, column: 2 });

        let err = parse("(x #b102)").unwrap_err();
        assert!(matches!(err.kind, SyntaxErrorKind::MalformedLiteral(_)));
        assert_eq!(err.position.column, 4);

        assert!(parse("\"open").is_err());
        assert!(parse("|open").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("#q1").is_err());
    }

    #[test]
    fn digit_led_junk_becomes_symbol() {
        assert_eq!(parse_one("0ms").unwrap(), sym("0ms"));
        assert_eq!(parse_one("-nan").unwrap(), sym("-nan"));
    }
}
