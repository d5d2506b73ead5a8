//! Rational expressions in `z`, `z̄` and their real parts.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' int | '^' '(' int ')')?
//! int     := ('-' | '+')? digits
//! primary := number | number 'i' | 'i' | 'pi' | ident | '(' expr ')'
//! ident   := z | z1 | z2 | zbar | zbar1 | zbar2 | x | y | x1 | y1 | x2 | y2
//! ```
//!
//! `z` and `z1` name the same coordinate. Real coordinates are rewritten as
//! `x = (z + z̄)/2`, `y = (z − z̄)/(2i)`, so every expression is a rational
//! function of the independent symbols `z_k`, `z̄_k` and Wirtinger
//! derivatives are plain symbolic derivatives.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{cl, czero, CPoint, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Z(usize),
    Zbar(usize),
}

impl Var {
    pub fn coord(self) -> usize {
        match self {
            Var::Z(k) | Var::Zbar(k) => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr<T: Real> {
    Const(C<T>),
    Var(Var),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Neg(Box<Expr<T>>),
    Pow(Box<Expr<T>>, i32),
}

impl<T: Real> Expr<T> {
    pub fn constant(c: C<T>) -> Self {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    fn as_const(&self) -> Option<C<T>> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c == czero())
    }

    fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c == C::new(T::one(), T::zero()))
    }

    pub fn add(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            _ if b.is_zero() => a,
            _ if a.is_zero() => Expr::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ if a.is_zero() || b.is_zero() => Expr::Const(czero()),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != czero() => Expr::Const(x / y),
            _ if a.is_zero() => Expr::Const(czero()),
            _ if b.is_one() => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Self) -> Self {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn pow(a: Self, n: i32) -> Self {
        match (a.as_const(), n) {
            (_, 0) => Expr::Const(C::new(T::one(), T::zero())),
            (_, 1) => a,
            (Some(c), n) if n > 0 || c != czero() => Expr::Const(c.powi(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    /// Symbolic partial derivative with respect to one of the independent
    /// symbols.
    pub fn derivative(&self, v: Var) -> Self {
        match self {
            Expr::Const(_) => Expr::Const(czero()),
            Expr::Var(w) => Expr::Const(if *w == v { cl(1.0, 0.0) } else { czero() }),
            Expr::Add(a, b) => Expr::add(a.derivative(v), b.derivative(v)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(v), b.derivative(v)),
            Expr::Mul(a, b) => {
                Expr::add(Expr::mul(a.derivative(v), (**b).clone()), Expr::mul((**a).clone(), b.derivative(v)))
            }
            Expr::Div(a, b) => {
                // (a'b − ab') / b²
                let num =
                    Expr::sub(Expr::mul(a.derivative(v), (**b).clone()), Expr::mul((**a).clone(), b.derivative(v)));
                Expr::div(num, Expr::pow((**b).clone(), 2))
            }
            Expr::Neg(a) => Expr::neg(a.derivative(v)),
            Expr::Pow(a, n) => {
                let da = a.derivative(v);
                if da.is_zero() {
                    return Expr::Const(czero());
                }
                let coef = Expr::Const(C::new(T::lit(*n as f64), T::zero()));
                Expr::mul(Expr::mul(coef, Expr::pow((**a).clone(), n - 1)), da)
            }
        }
    }

    /// Every symbol occurring in the expression.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
        }
    }

    /// True when no conjugate symbol occurs.
    pub fn is_holomorphic(&self) -> bool {
        self.vars().iter().all(|v| matches!(v, Var::Z(_)))
    }

    /// Highest coordinate index referenced, plus one.
    pub fn dim_used(&self) -> usize {
        self.vars().iter().map(|v| v.coord() + 1).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &CPoint<T>) -> C<T> {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::Z(k)) => z[*k],
            Expr::Var(Var::Zbar(k)) => z[*k].conj(),
            Expr::Add(a, b) => a.eval(z) + b.eval(z),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Mul(a, b) => a.eval(z) * b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Neg(a) => -a.eval(z),
            Expr::Pow(a, n) => a.eval(z).powi(*n),
        }
    }

    pub fn compile(&self) -> Result<Program<T>> {
        Program::new(self)
    }
}

impl<T: Real> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.im == T::zero() {
                    write!(f, "{:?}", c.re.to_f64_lossy())
                } else {
                    write!(f, "({:?}+{:?}i)", c.re.to_f64_lossy(), c.im.to_f64_lossy())
                }
            }
            Expr::Var(Var::Z(k)) => write!(f, "z{}", k + 1),
            Expr::Var(Var::Zbar(k)) => write!(f, "zbar{}", k + 1),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, n) => write!(f, "({a}^({n}))"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op<T: Real> {
    Push(C<T>),
    Load(Var),
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Powi(i32),
}

const STACK: usize = 48;

/// Stack-machine form of an [`Expr`], cheap to evaluate in quadrature loops.
#[derive(Clone, Debug, PartialEq)]
pub struct Program<T: Real> {
    ops: Vec<Op<T>>,
}

impl<T: Real> Program<T> {
    fn new(e: &Expr<T>) -> Result<Self> {
        let mut ops = Vec::new();
        let depth = Self::emit(e, &mut ops);
        if depth > STACK {
            return Err(Error::Unsupported(format!("expression needs evaluation depth {depth} > {STACK}")));
        }
        Ok(Program { ops })
    }

    fn emit(e: &Expr<T>, ops: &mut Vec<Op<T>>) -> usize {
        match e {
            Expr::Const(c) => {
                ops.push(Op::Push(*c));
                1
            }
            Expr::Var(v) => {
                ops.push(Op::Load(*v));
                1
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let da = Self::emit(a, ops);
                let db = Self::emit(b, ops);
                ops.push(match e {
                    Expr::Add(..) => Op::Add,
                    Expr::Sub(..) => Op::Sub,
                    Expr::Mul(..) => Op::Mul,
                    _ => Op::Div,
                });
                da.max(db + 1)
            }
            Expr::Neg(a) => {
                let d = Self::emit(a, ops);
                ops.push(Op::Neg);
                d
            }
            Expr::Pow(a, n) => {
                let d = Self::emit(a, ops);
                ops.push(Op::Powi(*n));
                d
            }
        }
    }

    #[inline]
    pub fn eval(&self, z: &CPoint<T>) -> C<T> {
        let mut stack = [czero::<T>(); STACK];
        let mut sp = 0usize;
        for op in &self.ops {
            match *op {
                Op::Push(c) => {
                    stack[sp] = c;
                    sp += 1;
                }
                Op::Load(Var::Z(k)) => {
                    stack[sp] = z[k];
                    sp += 1;
                }
                Op::Load(Var::Zbar(k)) => {
                    stack[sp] = z[k].conj();
                    sp += 1;
                }
                Op::Neg => stack[sp - 1] = -stack[sp - 1],
                Op::Powi(n) => stack[sp - 1] = powi(stack[sp - 1], n),
                bin => {
                    let b = stack[sp - 1];
                    let a = stack[sp - 2];
                    sp -= 1;
                    stack[sp - 1] = match bin {
                        Op::Add => a + b,
                        Op::Sub => a - b,
                        Op::Mul => a * b,
                        _ => a / b,
                    };
                }
            }
        }
        stack[0]
    }
}

#[inline]
fn powi<T: Real>(z: C<T>, n: i32) -> C<T> {
    match n {
        0 => C::new(T::one(), T::zero()),
        1 => z,
        2 => z * z,
        -1 => C::new(T::one(), T::zero()) / z,
        -2 => C::new(T::one(), T::zero()) / (z * z),
        _ => z.powi(n),
    }
}

/// Parses an expression; `max_dim` bounds the coordinates that may be named.
pub fn parse<T: Real>(src: &str, max_dim: usize) -> Result<Expr<T>> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, max_dim };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    max_dim: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr<T: Real>(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term<T: Real>(&mut self) -> Result<Expr<T>> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat(b'/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary<T: Real>(&mut self) -> Result<Expr<T>> {
        if self.eat(b'-') {
            Ok(Expr::neg(self.unary()?))
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power<T: Real>(&mut self) -> Result<Expr<T>> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let n = self.integer()?;
        if paren && !self.eat(b')') {
            return Err(self.err("expected ')' after exponent"));
        }
        Ok(Expr::pow(base, n))
    }

    fn integer(&mut self) -> Result<i32> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("exponent must be an integer literal"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: i32 = text.parse().map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -n } else { n })
    }

    fn primary<T: Real>(&mut self) -> Result<Expr<T>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number<T: Real>(&mut self) -> Result<Expr<T>> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut q = self.pos + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                while q < s.len() && s[q].is_ascii_digit() {
                    q += 1;
                }
                self.pos = q;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap();
        let v: f64 =
            text.parse().map_err(|_| Error::Parse { pos: start, msg: format!("bad numeric literal '{text}'") })?;
        // imaginary suffix: `2i`, `0.5i`, but not `2im...`
        if self.pos < s.len() && s[self.pos] == b'i' && !s.get(self.pos + 1).is_some_and(|c| c.is_ascii_alphanumeric())
        {
            self.pos += 1;
            return Ok(Expr::Const(cl(0.0, v)));
        }
        Ok(Expr::Const(cl(v, 0.0)))
    }

    fn ident<T: Real>(&mut self) -> Result<Expr<T>> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let coord = |k: usize| -> Result<usize> {
            if k < self.max_dim {
                Ok(k)
            } else {
                Err(Error::Parse { pos: start, msg: format!("variable '{name}' exceeds dimension {}", self.max_dim) })
            }
        };
        let z = |k| Expr::Var(Var::Z(k));
        let zb = |k| Expr::Var(Var::Zbar(k));
        let half = || Expr::Const(cl(0.5, 0.0));
        let re = |k| Expr::mul(half(), Expr::add(z(k), zb(k)));
        // y = (z − z̄)/(2i) = −(i/2)(z − z̄)
        let im = |k| Expr::mul(Expr::Const(cl(0.0, -0.5)), Expr::sub(z(k), zb(k)));
        Ok(match name {
            "i" => Expr::Const(cl(0.0, 1.0)),
            "pi" => Expr::Const(C::new(T::PI(), T::zero())),
            "z" | "z1" => z(coord(0)?),
            "z2" => z(coord(1)?),
            "zbar" | "zbar1" => zb(coord(0)?),
            "zbar2" => zb(coord(1)?),
            "x" | "x1" => re(coord(0)?),
            "y" | "y1" => im(coord(0)?),
            "x2" => re(coord(1)?),
            "y2" => im(coord(1)?),
            _ => return Err(Error::Parse { pos: start, msg: format!("unknown identifier '{name}'") }),
        })
    }
}
