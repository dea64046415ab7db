//! Recursive-descent parser for the formula grammar
//!
//! ```text
//! φ ::= R "(" v ("," v)* ")" | v "=" v | "!" φ
//!     | "(" φ (("&" | "|" | "->") φ)* ")"
//!     | ("exists" | "forall") v "." φ | "true" | "false"
//! ```
//!
//! Relation symbols start with an upper-case letter, variables match
//! `[a-z][a-z0-9]*`. A chain `(a & b & c)` nests to the left and may not mix
//! operators.

use super::Formula;
use crate::error::{Error, Result};
use crate::structures::Vocabulary;

const KEYWORDS: [&str; 4] = ["exists", "forall", "true", "false"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    Sym(String),
    Kw(&'static str),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Equals,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut col = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, cl) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l, col: cl });
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            if c.is_ascii_uppercase() {
                push(&mut out, Tok::Sym(word));
            } else if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                push(&mut out, Tok::Kw(kw));
            } else if word.chars().all(|ch| ch.is_ascii_lowercase() || ch.is_ascii_digit()) {
                push(&mut out, Tok::Var(word));
            } else {
                return Err(parse_err(l, cl, format!("invalid variable name {word:?}")));
            }
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '=' => Tok::Equals,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                col += 1;
                Tok::Arrow
            }
            other => return Err(parse_err(l, cl, format!("unexpected character {other:?}"))),
        };
        push(&mut out, tok);
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

fn parse_err(line: usize, column: usize, message: String) -> Error {
    Error::Parse { line, column, message }
}

struct Parser<'v> {
    toks: Vec<Token>,
    pos: usize,
    vocab: &'v Vocabulary,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(parse_err(t.line, t.col, msg.into()))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        if self.peek().tok == want {
            Ok(self.bump())
        } else {
            self.fail(format!("expected {what}, found {}", describe(&self.peek().tok)))
        }
    }

    fn var(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Var(v) => {
                let v = v.clone();
                self.bump();
                Ok(v)
            }
            Tok::Kw(k) => self.fail(format!("reserved word {k:?} used as a variable")),
            other => self.fail(format!("expected a variable, found {}", describe(other))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Kw("true") => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Kw(q @ ("exists" | "forall")) => {
                self.bump();
                let v = self.var()?;
                self.expect(Tok::Dot, "'.' after the quantified variable")?;
                let body = self.formula()?;
                Ok(if q == "exists" {
                    Formula::exists(&v, body)
                } else {
                    Formula::forall(&v, body)
                })
            }
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.formula()?))
            }
            Tok::Sym(name) => {
                self.bump();
                self.expect(Tok::LParen, "'(' after the relation symbol")?;
                let mut args = vec![self.var()?];
                while self.peek().tok == Tok::Comma {
                    self.bump();
                    args.push(self.var()?);
                }
                self.expect(Tok::RParen, "')' closing the argument list")?;
                match self.vocab.index_of(&name) {
                    None => Err(parse_err(t.line, t.col, format!("unknown relation symbol {name}"))),
                    Some(i) if self.vocab.symbols()[i].arity != args.len() => Err(Error::Arity {
                        symbol: name,
                        expected: self.vocab.symbols()[i].arity,
                        found: args.len(),
                    }),
                    Some(_) => Ok(Formula::Atom { symbol: name, args }),
                }
            }
            Tok::Var(a) => {
                self.bump();
                self.expect(Tok::Equals, "'=' after a variable")?;
                let b = self.var()?;
                Ok(Formula::Eq(a, b))
            }
            Tok::LParen => {
                self.bump();
                let mut acc = self.formula()?;
                let mut op: Option<Tok> = None;
                loop {
                    let next = self.peek().tok.clone();
                    match next {
                        Tok::RParen => {
                            self.bump();
                            return Ok(acc);
                        }
                        Tok::Amp | Tok::Pipe | Tok::Arrow => {
                            if let Some(prev) = &op {
                                if *prev != next || next == Tok::Arrow {
                                    return self.fail("add parentheses to combine different connectives");
                                }
                            }
                            self.bump();
                            let rhs = self.formula()?;
                            acc = match next {
                                Tok::Amp => Formula::and(acc, rhs),
                                Tok::Pipe => Formula::or(acc, rhs),
                                _ => Formula::implies(acc, rhs),
                            };
                            op = Some(next);
                        }
                        other => {
                            return self.fail(format!(
                                "expected a connective or ')', found {}",
                                describe(&other)
                            ))
                        }
                    }
                }
            }
            other => self.fail(format!("expected a formula, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Var(v) => format!("variable {v:?}"),
        Tok::Sym(s) => format!("symbol {s:?}"),
        Tok::Kw(k) => format!("{k:?}"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
        Tok::Bang => "'!'".into(),
        Tok::Amp => "'&'".into(),
        Tok::Pipe => "'|'".into(),
        Tok::Arrow => "'->'".into(),
        Tok::Equals => "'='".into(),
        Tok::End => "end of input".into(),
    }
}

fn parse_at(text: &str, vocab: &Vocabulary, first_line: usize) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text, first_line)?,
        pos: 0,
        vocab,
    };
    let f = p.formula()?;
    if p.peek().tok != Tok::End {
        return p.fail(format!("trailing input: {}", describe(&p.peek().tok)));
    }
    Ok(f)
}

/// Parse one formula; symbols are checked against `vocab`.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    parse_at(text, vocab, 1)
}

/// Parse a formula over `{E, S}`.
pub fn parse_graph_formula(text: &str) -> Result<Formula> {
    parse(text, &Vocabulary::graph_with_successor())
}

/// Parse a formula file: one formula per line, blank lines and `#` comments
/// skipped. Returns `(line number, formula)` pairs.
pub fn parse_lines(text: &str, vocab: &Vocabulary) -> Result<Vec<(usize, Formula)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push((i + 1, parse_at(body, vocab, i + 1)?));
    }
    Ok(out)
}
