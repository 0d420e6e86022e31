use crate::error::ParseError;

/// Character cursor reporting 1-based columns.
pub(crate) struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0 }
    }

    pub fn column(&self) -> usize {
        self.pos + 1
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        let want: Vec<char> = s.chars().collect();
        if self.chars[self.pos..].starts_with(&want) {
            self.pos += want.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    pub fn error(&self, message: &str) -> ParseError {
        ParseError::new(1, self.column(), message)
    }

    pub fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError::new(1, start + 1, "expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| ParseError::new(1, start + 1, "number out of range"))
    }

    pub fn is_digit_next(&self) -> bool {
        self.peek().is_some_and(|c| c.is_ascii_digit())
    }
}

/// An optional `src:tgt` prefix.
pub(crate) fn optional_dims(cur: &mut Cursor) -> Result<Option<(usize, usize)>, ParseError> {
    if !cur.is_digit_next() {
        return Ok(None);
    }
    let start = cur.pos;
    let src = cur.number()?;
    if !cur.eat(':') {
        cur.pos = start;
        return Ok(None);
    }
    let tgt = cur.number()?;
    Ok(Some((src, tgt)))
}

/// `*` (the basepoint, `None`) or a positive element.
pub(crate) fn point(cur: &mut Cursor) -> Result<Option<usize>, ParseError> {
    if cur.eat('*') {
        return Ok(None);
    }
    let col = cur.column();
    let n = cur.number()?;
    if n == 0 {
        return Err(ParseError::new(1, col, "elements are numbered from 1; write '*' for the basepoint"));
    }
    Ok(Some(n))
}
