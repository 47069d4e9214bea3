//! Recursive-descent parser for the formula text syntax.
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->`, `<->`. Both arrows are
//! right-associative; `&` and `|` chains become a single n-ary node.

use std::fmt;

use thiserror::Error;

use super::formula::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: found {}, expected one of {}",
            self.offset,
            self.found,
            self.expected.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("atom `{name}`"),
            Token::True => "`true`".into(),
            Token::False => "`false`".into(),
            Token::Not => "`!`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::Iff => "`<->`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &["atom", "true", "false", "!", "("];
const BINARY_OPS: &[&str] = &["&", "|", "->", "<->"];

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let token = match c {
            b'!' => {
                i += 1;
                Token::Not
            }
            b'&' => {
                i += 1;
                Token::And
            }
            b'|' => {
                i += 1;
                Token::Or
            }
            b'(' => {
                i += 1;
                Token::LParen
            }
            b')' => {
                i += 1;
                Token::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Token::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                Token::Iff
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                if bytes.get(i) == Some(&b'_') {
                    i += 1;
                    let digits = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == digits {
                        return Err(ParseError {
                            offset: i,
                            expected: vec!["timestep digits"],
                            found: describe_char(text, i),
                        });
                    }
                }
                match &text[start..i] {
                    "true" => Token::True,
                    "false" => Token::False,
                    name if name.starts_with("true_") || name.starts_with("false_") => {
                        return Err(ParseError {
                            offset: start,
                            expected: OPERAND.to_vec(),
                            found: format!("`{name}`"),
                        })
                    }
                    name => Token::Ident(name.to_string()),
                }
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    expected: [OPERAND, BINARY_OPS, &[")"]].concat(),
                    found: describe_char(text, start),
                })
            }
        };
        out.push((start, token));
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

fn describe_char(text: &str, offset: usize) -> String {
    match text[offset..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if t != Token::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        let (offset, token) = &self.tokens[self.pos];
        ParseError {
            offset: *offset,
            expected,
            found: token.describe(),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Token::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Token::Or {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Token::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Token::True => {
                self.bump();
                Ok(Formula::Const(true))
            }
            Token::False => {
                self.bump();
                Ok(Formula::Const(false))
            }
            Token::Ident(_) => {
                let Token::Ident(name) = self.bump() else {
                    unreachable!()
                };
                // the lexer only produces names matching the atom grammar
                Ok(Formula::Atom(Atom::new(name).expect("lexer checked atom")))
            }
            Token::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error([BINARY_OPS, &[")"]].concat()));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(OPERAND.to_vec())),
        }
    }
}

/// Parses formula text into an AST.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let f = parser.iff()?;
    if *parser.peek() != Token::End {
        return Err(parser.error([BINARY_OPS, &["end of input"]].concat()));
    }
    Ok(f)
}
