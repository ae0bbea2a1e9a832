//! Recursive descent parser for the concrete formula syntax.
//!
//! ```text
//! iff     := imp ('<->' iff)?
//! imp     := or ('->' imp)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' unary | 'E' group unary | 'A' group unary
//!          | 'H' group '>' group unary | atom | '(' iff ')'
//! group   := '{' IDENT (',' IDENT)* '}'
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::formula::{is_ident_char, Agent, Formula, Group};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnknownToken(char),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected {
        found: String,
        expected: &'static str,
    },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("empty group")]
    EmptyGroup,
    #[error("trailing input {0}")]
    Trailing(String),
}

/// A syntax error with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Brings,
    Attempts,
    Assists,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Gt,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => alloc::format!("identifier {s:?}"),
            Tok::True => "'true'".into(),
            Tok::False => "'false'".into(),
            Tok::Brings => "'E'".into(),
            Tok::Attempts => "'A'".into(),
            Tok::Assists => "'H'".into(),
            Tok::Not => "'~'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Implies => "'->'".into(),
            Tok::Iff => "'<->'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::Gt => "'>'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if is_ident_char(c) {
            let mut end = pos;
            while let Some(&(i, c)) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let word = &text[pos..end];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                "E" => Tok::Brings,
                "A" => Tok::Attempts,
                "H" => Tok::Assists,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((pos, tok));
            continue;
        }
        chars.next();
        let tok = match c {
            '~' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '>' => Tok::Gt,
            '-' if matches!(chars.peek(), Some((_, '>'))) => {
                chars.next();
                Tok::Implies
            }
            '<' if text[pos..].starts_with("<->") => {
                chars.next();
                chars.next();
                Tok::Iff
            }
            other => {
                return Err(ParseError {
                    position: pos,
                    kind: ParseErrorKind::UnknownToken(other),
                })
            }
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::Unexpected {
                found: t.describe(),
                expected,
            },
            None => ParseErrorKind::UnexpectedEnd(expected),
        };
        ParseError {
            position: self.offset(),
            kind,
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let expected = "a formula";
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Brings) => {
                self.pos += 1;
                let g = self.group()?;
                Ok(Formula::Brings(g, Box::new(self.unary()?)))
            }
            Some(Tok::Attempts) => {
                self.pos += 1;
                let g = self.group()?;
                Ok(Formula::Attempts(g, Box::new(self.unary()?)))
            }
            Some(Tok::Assists) => {
                self.pos += 1;
                let c1 = self.group()?;
                self.expect(Tok::Gt, "'>' between assistance groups")?;
                let c2 = self.group()?;
                Ok(Formula::Assists(c1, c2, Box::new(self.unary()?)))
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Tok::Ident(name)) => Ok(Formula::Atom(name)),
                _ => unreachable!(),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.error(expected)),
        }
    }

    fn group(&mut self) -> Result<Group, ParseError> {
        self.expect(Tok::LBrace, "'{' opening a group")?;
        if self.peek() == Some(&Tok::RBrace) {
            return Err(ParseError {
                position: self.offset(),
                kind: ParseErrorKind::EmptyGroup,
            });
        }
        let mut members = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(name)) => {
                    // lexer guarantees a valid, non-reserved identifier
                    members.push(Agent::new(name.clone()).expect("lexed identifier"));
                    self.pos += 1;
                }
                _ => return Err(self.error("an agent name")),
            }
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("',' or '}'")),
            }
        }
        Ok(Group::new(members).expect("nonempty by construction"))
    }
}

/// Parses a formula from its concrete syntax.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.iff()?;
    if let Some(t) = p.peek() {
        return Err(ParseError {
            position: p.offset(),
            kind: ParseErrorKind::Trailing(t.describe()),
        });
    }
    Ok(f)
}

/// Parses a comma separated agent list such as `1,2,3` into a group.
pub fn parse_group(text: &str) -> Result<Group, ParseError> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .unwrap_or(trimmed);
    let braced = alloc::format!("{{{inner}}}");
    let toks = lex(&braced)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: braced.len(),
    };
    let g = p.group()?;
    if p.peek().is_some() {
        return Err(p.error("end of group"));
    }
    Ok(g)
}
