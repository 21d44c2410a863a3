use core::fmt::{self, Write};

use super::parse::{is_decimal, is_integer, is_rational};
use super::SExpr;

fn is_simple_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/:".contains(c) || !c.is_ascii()
}

/// Whether `name` must be written as `|name|` to read back as the same
/// symbol.
pub fn needs_quoting(name: &str) -> bool {
    let Some(first) = name.chars().next() else {
        return true;
    };
    !name.chars().all(is_simple_char)
        || first.is_ascii_digit()
        || is_integer(name)
        || is_decimal(name)
        || is_rational(name)
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Symbol(name) => {
                if needs_quoting(name) {
                    write!(f, "|{name}|")
                } else {
                    f.write_str(name)
                }
            }
            SExpr::Int(n) => write!(f, "{n}"),
            SExpr::Rational { numer, denom } => write!(f, "{numer}/{denom}"),
            SExpr::Decimal(text) => f.write_str(text),
            SExpr::String(s) => {
                f.write_char('"')?;
                for c in s.chars() {
                    if c == '"' {
                        f.write_str("\"\"")?;
                    } else {
                        f.write_char(c)?;
                    }
                }
                f.write_char('"')
            }
            SExpr::Bitvec { width, value } => {
                write!(f, "#b{:0>width$}", value.to_str_radix(2), width = *width as usize)
            }
            SExpr::List(items) => {
                f.write_char('(')?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_char(' ')?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_char(')')
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn renders_applications() {
        let e = SExpr::list([SExpr::sym("="), SExpr::sym("x"), SExpr::int(10)]);
        assert_eq!(e.to_string(), "(= x 10)");
    }

    #[test]
    fn doubles_quotes_in_strings() {
        assert_eq!(SExpr::string("a\"b").to_string(), "\"a\"\"b\"");
    }

    #[test]
    fn bitvectors_print_in_binary() {
        assert_eq!(SExpr::bitvec(3, 5u8).unwrap().to_string(), "#b101");
        assert_eq!(SExpr::bitvec(8, 1u8).unwrap().to_string(), "#b00000001");
    }

    #[test]
    fn quoting_rules() {
        for plain in ["x", "seq.++", ":weight", "SQUARE.1", "=>", "x!0", "-"] {
            assert!(!needs_quoting(plain), "{plain}");
        }
        for quoted in ["", "a b", "1", "-5", "1.5", "1/2", "9lives", "#b1", "(", "a\"b"] {
            assert!(needs_quoting(quoted), "{quoted}");
        }
        assert_eq!(SExpr::sym("a b").to_string(), "|a b|");
        assert_eq!(SExpr::sym("-5").to_string(), "|-5|");
    }
}
