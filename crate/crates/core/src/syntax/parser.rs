//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: `!`; `&` and `^` (left); `|` (left);
//! `->` and `~>` (right, freely mixed); `<->` (left).
//!
//! The parser is generic over an [`Algebra`] so the classical target
//! language can reuse it with pair atoms `a<φ, ψ>`.

use super::{Connective, Formula};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Letter(u32),
    Top,
    Bottom,
    Not,
    And,
    RelConj,
    Or,
    Imp,
    RelImp,
    Iff,
    LParen,
    RParen,
    PairOpen,
    Comma,
    Gt,
}

fn describe(tok: Option<&Tok>) -> String {
    match tok {
        None => "end of input".to_string(),
        Some(Tok::Letter(i)) => format!("letter p{i}"),
        Some(t) => format!("{t:?}"),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let peek = |i: usize| chars.get(i).map(|&(_, c)| c);
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '^' | '△' => Tok::RelConj,
            '|' | '∨' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '>' => Tok::Gt,
            '→' => Tok::Imp,
            '↪' => Tok::RelImp,
            '↔' => Tok::Iff,
            '⊤' | 'T' => Tok::Top,
            '⊥' | 'F' => Tok::Bottom,
            '-' if peek(i + 1) == Some('>') => {
                i += 1;
                Tok::Imp
            }
            '~' if peek(i + 1) == Some('>') => {
                i += 1;
                Tok::RelImp
            }
            '<' if peek(i + 1) == Some('-') && peek(i + 2) == Some('>') => {
                i += 2;
                Tok::Iff
            }
            'a' if peek(i + 1) == Some('<') => {
                i += 1;
                Tok::PairOpen
            }
            'p' if peek(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                let mut index: u64 = 0;
                while let Some(d) = peek(j).and_then(|d| d.to_digit(10)) {
                    index = index * 10 + d as u64;
                    if index > u32::MAX as u64 {
                        return Err(Error::Parse {
                            pos,
                            msg: "letter index too large".into(),
                        });
                    }
                    j += 1;
                }
                i = j - 1;
                Tok::Letter(index as u32)
            }
            'p' => Tok::Letter(1),
            'q' => Tok::Letter(2),
            'r' => Tok::Letter(3),
            's' => Tok::Letter(4),
            't' => Tok::Letter(5),
            other => {
                return Err(Error::Parse {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

/// Target of parsing: builds values of `Out` from the grammar's pieces.
pub trait Algebra {
    type Out;
    fn letter(&self, index: u32) -> Self::Out;
    fn neg(&self, inner: Self::Out) -> Self::Out;
    /// `None` rejects the connective in this language.
    fn bin(&self, op: Connective, left: Self::Out, right: Self::Out) -> Option<Self::Out>;
    fn pair_atom(&self, first: Formula, second: Formula) -> Option<Self::Out>;
}

struct FormulaAlgebra;

impl Algebra for FormulaAlgebra {
    type Out = Formula;

    fn letter(&self, index: u32) -> Formula {
        Formula::letter(index)
    }

    fn neg(&self, inner: Formula) -> Formula {
        Formula::neg(inner)
    }

    fn bin(&self, op: Connective, left: Formula, right: Formula) -> Option<Formula> {
        Some(Formula::bin(op, left, right))
    }

    fn pair_atom(&self, _: Formula, _: Formula) -> Option<Formula> {
        None
    }
}

/// Tokenized input with a cursor.
pub struct TokenStream {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl TokenStream {
    pub fn new(text: &str) -> Result<TokenStream> {
        Ok(TokenStream {
            toks: tokenize(text)?,
            pos: 0,
            len: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            let found = describe(self.peek());
            self.error(format!("expected {tok:?}, found {found}"))
        }
    }

    /// Parses a complete input; trailing tokens are an error.
    pub fn parse_all<A: Algebra>(&mut self, alg: &A) -> Result<A::Out> {
        let out = self.iff(alg)?;
        if self.peek().is_some() {
            let found = describe(self.peek());
            return self.error(format!("unexpected {found}"));
        }
        Ok(out)
    }

    fn combine<A: Algebra>(&self, alg: &A, op: Connective, l: A::Out, r: A::Out) -> Result<A::Out> {
        match alg.bin(op, l, r) {
            Some(x) => Ok(x),
            None => self.error(format!("connective {} not allowed here", op.symbol())),
        }
    }

    fn iff<A: Algebra>(&mut self, alg: &A) -> Result<A::Out> {
        let mut left = self.imp(alg)?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let right = self.imp(alg)?;
            left = self.combine(alg, Connective::Iff, left, right)?;
        }
        Ok(left)
    }

    fn imp<A: Algebra>(&mut self, alg: &A) -> Result<A::Out> {
        let left = self.disj(alg)?;
        let op = match self.peek() {
            Some(Tok::Imp) => Connective::Imp,
            Some(Tok::RelImp) => Connective::RelImp,
            _ => return Ok(left),
        };
        self.pos += 1;
        let right = self.imp(alg)?;
        self.combine(alg, op, left, right)
    }

    fn disj<A: Algebra>(&mut self, alg: &A) -> Result<A::Out> {
        let mut left = self.conj(alg)?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let right = self.conj(alg)?;
            left = self.combine(alg, Connective::Or, left, right)?;
        }
        Ok(left)
    }

    fn conj<A: Algebra>(&mut self, alg: &A) -> Result<A::Out> {
        let mut left = self.neg(alg)?;
        loop {
            let op = match self.peek() {
                Some(Tok::And) => Connective::And,
                Some(Tok::RelConj) => Connective::RelConj,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.neg(alg)?;
            left = self.combine(alg, op, left, right)?;
        }
    }

    fn neg<A: Algebra>(&mut self, alg: &A) -> Result<A::Out> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                let inner = self.neg(alg)?;
                Ok(alg.neg(inner))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.iff(alg)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Letter(i)) => {
                self.pos += 1;
                Ok(alg.letter(i))
            }
            Some(Tok::Top) => {
                self.pos += 1;
                Ok(self.embed(alg, &Formula::top()))
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(self.embed(alg, &Formula::bottom()))
            }
            Some(Tok::PairOpen) => {
                let start = self.offset();
                self.pos += 1;
                let first = self.iff(&FormulaAlgebra)?;
                self.expect(Tok::Comma)?;
                let second = self.iff(&FormulaAlgebra)?;
                self.expect(Tok::Gt)?;
                match alg.pair_atom(first, second) {
                    Some(x) => Ok(x),
                    None => Err(Error::Parse {
                        pos: start,
                        msg: "pair atoms are only allowed in classical formulas".into(),
                    }),
                }
            }
            other => self.error(format!(
                "expected a formula, found {}",
                describe(other.as_ref())
            )),
        }
    }

    /// Rebuilds a (classical) formula in the target algebra.
    fn embed<A: Algebra>(&self, alg: &A, phi: &Formula) -> A::Out {
        use super::FormulaKind;
        match phi.kind() {
            FormulaKind::Letter(i) => alg.letter(*i),
            FormulaKind::Neg(x) => alg.neg(self.embed(alg, x)),
            FormulaKind::Bin(op, l, r) => alg
                .bin(*op, self.embed(alg, l), self.embed(alg, r))
                .expect("constants use classical connectives only"),
        }
    }
}

/// Parses a formula. `T` and `F` expand to `p0 | !p0` and `!(p0 | !p0)`.
pub fn parse(text: &str) -> Result<Formula> {
    TokenStream::new(text)?.parse_all(&FormulaAlgebra)
}
