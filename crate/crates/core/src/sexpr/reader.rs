use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::parse::{parse_one, SyntaxError};
use super::SExpr;

/// A blocking source of bytes, such as a solver's standard output.
pub trait ByteSource {
    type Error;

    /// The next byte, or `None` once the source is exhausted.
    fn next_byte(&mut self) -> Result<Option<u8>, Self::Error>;
}

/// In-memory byte source.
#[derive(Clone, Debug)]
pub struct SliceSource<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> SliceSource<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        SliceSource { bytes, pos: 0 }
    }

    pub fn remaining(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }
}

impl ByteSource for SliceSource<'_> {
    type Error = core::convert::Infallible;

    fn next_byte(&mut self) -> Result<Option<u8>, Self::Error> {
        let b = self.bytes.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
        }
        Ok(b)
    }
}

#[derive(Debug, Error)]
pub enum ReadError<E> {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("stream closed in the middle of a form")]
    StreamClosed,
    #[error("byte source failed")]
    Source(E),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Plain,
    Str,
    Quoted,
    Comment,
}

/// Reads one balanced form at a time from a [`ByteSource`].
///
/// Never consumes past the delimiter that ends a form: a list ends at its
/// `)`, an atom at the first whitespace or structural byte (the latter is
/// held back for the next read).
pub struct FormReader<S> {
    source: S,
    held: Option<u8>,
}

impl<S: ByteSource> FormReader<S> {
    pub fn new(source: S) -> Self {
        FormReader { source, held: None }
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn source_mut(&mut self) -> &mut S {
        &mut self.source
    }

    pub fn into_source(self) -> S {
        self.source
    }

    fn next(&mut self) -> Result<Option<u8>, ReadError<S::Error>> {
        match self.held.take() {
            Some(b) => Ok(Some(b)),
            None => self.source.next_byte().map_err(ReadError::Source),
        }
    }

    /// Reads the next form. `Ok(None)` means the source ended cleanly
    /// between forms.
    pub fn try_read_form(&mut self) -> Result<Option<SExpr>, ReadError<S::Error>> {
        let mut buf: Vec<u8> = Vec::new();
        let mut depth = 0usize;
        let mut state = State::Plain;
        loop {
            let Some(b) = self.next()? else {
                if buf.iter().all(u8::is_ascii_whitespace) || state == State::Comment && depth == 0 {
                    return Ok(None);
                }
                if depth == 0 && state == State::Plain {
                    break;
                }
                return Err(ReadError::StreamClosed);
            };
            match state {
                State::Comment => {
                    if b == b'\n' {
                        state = State::Plain;
                    }
                    continue;
                }
                State::Str => {
                    buf.push(b);
                    if b == b'"' {
                        if depth == 0 {
                            // `""` continues the string
                            match self.next()? {
                                Some(b'"') => buf.push(b'"'),
                                other => {
                                    self.held = other;
                                    break;
                                }
                            }
                        } else {
                            state = State::Plain;
                        }
                    }
                    continue;
                }
                State::Quoted => {
                    buf.push(b);
                    if b == b'|' {
                        state = State::Plain;
                        if depth == 0 {
                            break;
                        }
                    }
                    continue;
                }
                State::Plain => {}
            }
            let in_atom = depth == 0 && !buf.is_empty();
            match b {
                b';' => {
                    if in_atom {
                        self.held = Some(b);
                        break;
                    }
                    state = State::Comment;
                }
                b'(' => {
                    if in_atom {
                        self.held = Some(b);
                        break;
                    }
                    depth += 1;
                    buf.push(b);
                }
                b')' => {
                    if in_atom {
                        self.held = Some(b);
                        break;
                    }
                    // a stray `)` is left for parse_one to report
                    buf.push(b);
                    if depth <= 1 {
                        break;
                    }
                    depth -= 1;
                }
                b'"' => {
                    if in_atom {
                        self.held = Some(b);
                        break;
                    }
                    buf.push(b);
                    state = State::Str;
                }
                b'|' => {
                    if in_atom {
                        self.held = Some(b);
                        break;
                    }
                    buf.push(b);
                    state = State::Quoted;
                }
                b if b.is_ascii_whitespace() => {
                    if in_atom {
                        break;
                    }
                    if depth > 0 {
                        buf.push(b);
                    }
                }
                b => buf.push(b),
            }
        }
        let text = String::from_utf8_lossy(&buf);
        parse_one(&text).map(Some).map_err(ReadError::Syntax)
    }

    /// Reads the next form, treating a cleanly ended source as an error.
    pub fn read_form(&mut self) -> Result<SExpr, ReadError<S::Error>> {
        self.try_read_form()?.ok_or(ReadError::StreamClosed)
    }
}
