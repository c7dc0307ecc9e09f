//! Symbol expression mini-language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | number 'i' | 'i' | 'z1' | 'z2' | 'z' | 'cay' '(' expr ')' | '(' expr ')'
//! ```
//! `z` is an alias of `z1`; `2i` is the imaginary literal `2 * i`.

use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    Z1,
    Z2,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Cay(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Z1 => z1,
            Expr::Z2 => z2,
            Expr::Neg(a) => -a.eval(z1, z2),
            Expr::Add(a, b) => a.eval(z1, z2) + b.eval(z1, z2),
            Expr::Sub(a, b) => a.eval(z1, z2) - b.eval(z1, z2),
            Expr::Mul(a, b) => a.eval(z1, z2) * b.eval(z1, z2),
            Expr::Div(a, b) => a.eval(z1, z2) / b.eval(z1, z2),
            Expr::Pow(a, n) => a.eval(z1, z2).powi(*n),
            Expr::Cay(a) => {
                let z = a.eval(z1, z2);
                (z - C64::i()) / (z + C64::i())
            }
        }
    }

    /// (uses z1, uses z2)
    pub fn variables(&self) -> (bool, bool) {
        match self {
            Expr::Const(_) => (false, false),
            Expr::Z1 => (true, false),
            Expr::Z2 => (false, true),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Cay(a) => a.variables(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (x, y) = (a.variables(), b.variables());
                (x.0 || y.0, x.1 || y.1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v: f64 = text.parse().map_err(|_| Error::Usage(format!("bad number '{text}' in symbol expression")))?;
            let imag =
                k < chars.len() && chars[k] == 'i' && !(k + 1 < chars.len() && chars[k + 1].is_ascii_alphanumeric());
            if imag {
                k += 1;
                out.push(Tok::Imag(v));
            } else {
                out.push(Tok::Num(v));
            }
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_alphanumeric() {
                k += 1;
            }
            out.push(Tok::Ident(chars[start..k].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(Error::Usage(format!("unexpected character '{c}' in symbol expression")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let neg = self.eat_op('-');
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 1e6 => {
                    self.pos += 1;
                    let n = if neg { -(v as i32) } else { v as i32 };
                    return Ok(Expr::Pow(Box::new(base), n));
                }
                _ => return Err(Error::Usage("exponent must be an integer literal".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Usage("unexpected end of symbol expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(C64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Expr::Const(C64::new(0.0, v))),
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::Const(C64::i())),
                "z1" | "z" => Ok(Expr::Z1),
                "z2" => Ok(Expr::Z2),
                "cay" => {
                    if !self.eat_op('(') {
                        return Err(Error::Usage("cay must be followed by '('".into()));
                    }
                    let inner = self.expr()?;
                    if !self.eat_op(')') {
                        return Err(Error::Usage("missing ')' after cay argument".into()));
                    }
                    Ok(Expr::Cay(Box::new(inner)))
                }
                other => Err(Error::Usage(format!("unknown identifier '{other}' in symbol expression"))),
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Usage("missing ')'".into()));
                }
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Usage(format!("unexpected '{c}' in symbol expression"))),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Usage(format!("trailing input in symbol expression '{src}'")));
    }
    Ok(e)
}
