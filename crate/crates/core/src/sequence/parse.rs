//! Recursive-descent parser for
//!
//! ```text
//! spec  := "UDD" "(" axis "," int ")"
//!        | "QDD" "(" int "," int ")"
//!        | "NEST" "(" axis ":" int ("," axis ":" int)* ")"     outermost first
//! axis  := "X" | "Z"
//! ```
//!
//! Keywords and axes are case-insensitive; whitespace is allowed between any
//! two tokens. Positions in errors are byte offsets into the input.

use super::{Axis, Level, SequenceError, SequenceSpec, MAX_ORDER};

pub fn parse(text: &str) -> Result<SequenceSpec, SequenceError> {
    let mut p = Parser { text, pos: 0 };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(spec)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> SequenceError {
        SequenceError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn expect(&mut self, c: char) -> Result<(), SequenceError> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        self.pos += len;
        (start, self.text[start..self.pos].to_ascii_uppercase())
    }

    fn axis(&mut self) -> Result<Axis, SequenceError> {
        let (start, w) = self.word();
        match w.as_str() {
            "X" => Ok(Axis::X),
            "Z" => Ok(Axis::Z),
            _ => {
                self.pos = start;
                Err(self.error("expected axis X or Z"))
            }
        }
    }

    fn order(&mut self) -> Result<u32, SequenceError> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a non-negative integer"));
        }
        self.pos += len;
        let digits = &self.text[start..self.pos];
        match digits.parse::<u64>() {
            Ok(n) if (1..=u64::from(MAX_ORDER)).contains(&n) => Ok(n as u32),
            Ok(n) => Err(SequenceError::Order(n)),
            Err(_) => Err(SequenceError::Order(u64::MAX)),
        }
    }

    fn spec(&mut self) -> Result<SequenceSpec, SequenceError> {
        let (start, keyword) = self.word();
        match keyword.as_str() {
            "UDD" => {
                self.expect('(')?;
                let axis = self.axis()?;
                self.expect(',')?;
                let order = self.order()?;
                self.expect(')')?;
                SequenceSpec::udd(axis, order)
            }
            "QDD" => {
                self.expect('(')?;
                let n1 = self.order()?;
                self.expect(',')?;
                let n2 = self.order()?;
                self.expect(')')?;
                SequenceSpec::qdd(n1, n2)
            }
            "NEST" => {
                self.expect('(')?;
                let mut outer_first = Vec::new();
                loop {
                    let axis = self.axis()?;
                    self.expect(':')?;
                    let order = self.order()?;
                    outer_first.push(Level { axis, order });
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(')')?;
                outer_first.reverse();
                SequenceSpec::new(outer_first)
            }
            _ => {
                self.pos = start;
                Err(self.error("expected UDD, QDD or NEST"))
            }
        }
    }
}
