//! Recursive-descent parser. Precedence, loosest first: `+ -`, `* /`,
//! unary `-`, `^` (right associative, integer exponents only).

use num_traits::Zero;

use super::{ExprAst, Func, Node};
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let end = t.0 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if b.is_ascii_digit() || b == b'.' {
            return self.number(start);
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
            return Ok((Tok::Ident(s.to_string()), start));
        }
        if b"+-*/^()".contains(&b) {
            self.pos += 1;
            return Ok((Tok::Op(b as char), start));
        }
        Err(Error::Syntax { pos: start, msg: format!("unexpected character `{}`", b as char) })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize)> {
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_digit() {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax { pos: start, msg: "malformed number".into() });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let v: f64 = s
            .parse()
            .map_err(|_| Error::Syntax { pos: start, msg: format!("malformed number `{s}`") })?;
        Ok((Tok::Num(v), start))
    }
}

struct Parser<T: Real> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    _t: std::marker::PhantomData<T>,
}

const PROBES: [(f64, f64); 3] = [(0.3, 0.1), (-0.2, 0.45), (0.05, -0.6)];

impl<T: Real> Parser<T> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax { pos: self.pos(), msg: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<Node<T>> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node<T>> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    let pos = self.pos();
                    let den = self.unary()?;
                    if identically_zero(&den) {
                        return Err(Error::ZeroDenominator { pos });
                    }
                    lhs = Node::Div(Box::new(lhs), Box::new(den));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node<T>> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node<T>> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exp = self.unary()?;
        let m = integer_exponent(&exp).ok_or_else(|| Error::Syntax {
            pos,
            msg: "exponent must be a constant integer".into(),
        })?;
        Ok(Node::Pow(Box::new(base), m))
    }

    fn primary(&mut self) -> Result<Node<T>> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(Node::Const(cx(v, 0.0))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() != Tok::Op('(') {
                        return Err(Error::Syntax {
                            pos: self.pos(),
                            msg: format!("`{name}` must be followed by `(`"),
                        });
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "z" => Ok(Node::Var),
                    "i" => Ok(Node::Const(cx(0.0, 1.0))),
                    "pi" => Ok(Node::Const(cx(std::f64::consts::PI, 0.0))),
                    "e" => Ok(Node::Const(cx(std::f64::consts::E, 0.0))),
                    _ => Err(Error::UnknownIdentifier { name, pos }),
                }
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(Error::Syntax { pos, msg: format!("unexpected `{c}`") }),
        }
    }
}

fn eval_at<T: Real>(n: &Node<T>, z: Cx<T>) -> Option<Cx<T>> {
    ExprAst::new(n.clone()).eval(z).ok()
}

/// Zero polynomial check: constant zero, or exactly zero at every probe point.
fn identically_zero<T: Real>(n: &Node<T>) -> bool {
    if !n.contains_var() {
        return eval_at(n, Cx::<T>::zero()).is_some_and(|v| v.is_zero());
    }
    PROBES
        .iter()
        .all(|&(x, y)| eval_at(n, cx(x, y)).is_some_and(|v| v.is_zero()))
}

fn integer_exponent<T: Real>(n: &Node<T>) -> Option<i32> {
    if n.contains_var() {
        return None;
    }
    let v = eval_at(n, Cx::<T>::zero())?;
    let r = v.re.as_f64();
    if v.im != T::zero() || r.fract() != 0.0 || r.abs() > 4096.0 {
        return None;
    }
    Some(r as i32)
}

/// Parses an expression in `z` over the grammar described in the crate docs.
pub fn parse_expr<T: Real>(text: &str) -> Result<ExprAst<T>> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser::<T> { toks, at: 0, _t: std::marker::PhantomData };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Syntax { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(ExprAst::new(root))
}
