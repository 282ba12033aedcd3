//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?          right-associative
//! atom  := NUMBER | IDENT | '(' expr ')'
//! ```
//!
//! `NUMBER` is an integer, a decimal (`0.25`) or a rational literal (`3/4`, no
//! spaces). Exponents must evaluate to nonnegative integer constants.

use num_traits::{Signed, ToPrimitive, Zero};

use super::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::rational;

const MAX_EXPONENT: u32 = 1000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '^' | '(' | ')' => {
                out.push((
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                    pos,
                ));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                let mut lit: String = chars[start..i].iter().map(|(_, c)| c).collect();
                if i + 1 < chars.len() && chars[i].1 == '/' && chars[i + 1].1.is_ascii_digit() {
                    i += 1;
                    let den_start = i;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                    let den: String = chars[den_start..i].iter().map(|(_, c)| c).collect();
                    if lit.contains('.') {
                        return Err(Error::Syntax { pos, msg: "rational literal needs an integer numerator".into() });
                    }
                    lit = format!("{lit}/{den}");
                }
                let value = rational::parse_rational(&lit)
                    .ok_or_else(|| Error::Syntax { pos, msg: format!("malformed number `{lit}`") })?;
                out.push((Tok::Num(value), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect()), pos));
            }
            other => return Err(Error::Syntax { pos, msg: format!("unexpected character `{other}`") }),
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exp = self.unary()?;
        if !exp.is_constant() {
            return Err(Error::InvalidExponent { pos, msg: "exponent must be a constant".into() });
        }
        let value = exp.coefficient(&super::Exponent::zero(exp.nvars()));
        if value.is_negative() {
            return Err(Error::InvalidExponent { pos, msg: format!("negative exponent {value}") });
        }
        if !value.is_integer() {
            return Err(Error::InvalidExponent { pos, msg: format!("non-integer exponent {value}") });
        }
        let k = value
            .to_integer()
            .to_u32()
            .filter(|&k| k <= MAX_EXPONENT)
            .ok_or_else(|| Error::InvalidExponent { pos, msg: format!("exponent {value} exceeds {MAX_EXPONENT}") })?;
        if k == 0 && base.is_zero() {
            // 0^0 follows the usual convention of the empty product.
            return Ok(Polynomial::constant(self.vars, Rational::from_integer(1.into())));
        }
        Ok(base.pow(k))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(if v.is_zero() { Polynomial::zero(self.vars) } else { Polynomial::constant(self.vars, v) }),
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(j) => Ok(Polynomial::var(self.vars, j)),
                None => Err(Error::UnknownVariable { name, pos }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(inner),
                    (_, p) => Err(Error::Syntax { pos: p, msg: "expected `)`".into() }),
                }
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            other => Err(Error::Syntax { pos, msg: format!("unexpected token {other:?}") }),
        }
    }
}

/// Parses `text` over the ordered variable list `var_names` and expands it into sparse form.
pub fn parse(text: &str, var_names: &[String]) -> Result<Polynomial> {
    if var_names.is_empty() {
        return Err(Error::InvalidProblem("at least one variable is required".into()));
    }
    for (i, v) in var_names.iter().enumerate() {
        let valid = v.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::InvalidProblem(format!("invalid variable name `{v}`")));
        }
        if var_names[..i].contains(v) {
            return Err(Error::InvalidProblem(format!("duplicate variable name `{v}`")));
        }
    }
    let mut p = Parser { toks: lex(text)?, at: 0, vars: var_names };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Syntax { pos: p.pos(), msg: format!("unexpected token {:?}", p.peek()) });
    }
    Ok(out)
}
