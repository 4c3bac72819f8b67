//! Whitespace tokenizer shared by the GM and UG text formats.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
}

pub(crate) struct Tokens<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    /// Lines whose first non-blank character is `#` are skipped.
    pub fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut last_line = 1;
        for (i, line) in text.lines().enumerate() {
            last_line = i + 1;
            if line.trim_start().starts_with('#') {
                continue;
            }
            tokens.extend(line.split_whitespace().map(|text| Token { text, line: i + 1 }));
        }
        Tokens {
            tokens,
            pos: 0,
            last_line,
        }
    }

    pub fn next(&mut self, what: &str) -> Result<Token<'a>> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Parse {
            line: self.last_line,
            message: format!("unexpected end of input, expected {what}"),
        })?;
        self.pos += 1;
        Ok(tok)
    }

    pub fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    pub fn keyword(&mut self, word: &str) -> Result<usize> {
        let tok = self.next(word)?;
        if tok.text != word {
            return Err(Error::Parse {
                line: tok.line,
                message: format!("malformed header: expected `{word}`, found `{}`", tok.text),
            });
        }
        Ok(tok.line)
    }

    pub fn parse<T: FromStr>(&mut self, what: &str) -> Result<(T, usize)> {
        let tok = self.next(what)?;
        tok.text.parse::<T>().map(|v| (v, tok.line)).map_err(|_| Error::Parse {
            line: tok.line,
            message: format!("expected {what}, found `{}`", tok.text),
        })
    }

    pub fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(tok) => Err(Error::Parse {
                line: tok.line,
                message: format!("trailing token `{}`", tok.text),
            }),
        }
    }
}

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
