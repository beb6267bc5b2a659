use super::{PatternKind, PatternSpec};
use crate::error::{Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        match self.peek() {
            Some(x) if x == b => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.error(format!("expected `{}`, found `{}`", b as char, x as char)),
            None => self.error(format!("expected `{}`, found end of input", b as char)),
        }
    }

    fn term(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.peek() {
                Some(x) => self.error(format!("expected a nonnegative integer, found `{}`", x as char)),
                None => self.error("expected a nonnegative integer, found end of input"),
            };
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        digits.parse::<u64>().map_err(|_| Error::Syntax {
            position: start,
            message: format!("term `{digits}` does not fit in 64 bits"),
        })
    }
}

/// Parses the pattern DSL into a validated [`PatternSpec`].
pub fn parse_pattern(text: &str) -> Result<PatternSpec> {
    if text.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0 };
    let kind = match text.chars().next().and_then(PatternKind::from_prefix) {
        Some(kind) => kind,
        None => return cur.error("expected pattern kind `e`, `u`, `l` or `o`"),
    };
    cur.pos = 1;
    cur.expect(b':')?;
    if cur.peek().is_none() {
        return Err(Error::EmptyPattern);
    }
    let mut blocks = Vec::new();
    loop {
        if cur.peek() == Some(b'[') {
            cur.pos += 1;
            let mut block = vec![cur.term()?];
            while cur.peek() == Some(b',') {
                cur.pos += 1;
                block.push(cur.term()?);
            }
            cur.expect(b']')?;
            blocks.push(block);
        } else {
            blocks.push(vec![cur.term()?]);
        }
        match cur.peek() {
            None => break,
            Some(b',') => cur.pos += 1,
            Some(x) => return cur.error(format!("expected `,` or end of input, found `{}`", x as char)),
        }
    }
    PatternSpec::new(kind, blocks)
}
