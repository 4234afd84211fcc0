//! Growth functions ℕ→ℕ as a small closed expression family:
//! integer literals, the variable `M`, `+`, `*`, `^`, `max(a,b)`,
//! parentheses, and composition written as application `(expr)(expr)`.
//! Evaluation is exact over big integers.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Int;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthExpr {
    Const(Int),
    Var,
    Add(Box<GrowthExpr>, Box<GrowthExpr>),
    Mul(Box<GrowthExpr>, Box<GrowthExpr>),
    Pow(Box<GrowthExpr>, Box<GrowthExpr>),
    Max(Box<GrowthExpr>, Box<GrowthExpr>),
    /// Composition: Compose(f, g) is M ↦ f(g(M)).
    Compose(Box<GrowthExpr>, Box<GrowthExpr>),
}

impl GrowthExpr {
    pub fn eval(&self, m: &Int) -> Result<Int> {
        match self {
            GrowthExpr::Const(c) => Ok(c.clone()),
            GrowthExpr::Var => Ok(m.clone()),
            GrowthExpr::Add(a, b) => Ok(a.eval(m)? + b.eval(m)?),
            GrowthExpr::Mul(a, b) => Ok(a.eval(m)? * b.eval(m)?),
            GrowthExpr::Pow(a, b) => {
                let base = a.eval(m)?;
                let exp = b.eval(m)?;
                if exp.is_negative() {
                    return Err(Error::Precondition("negative exponent".into()));
                }
                let exp = exp.to_u32().ok_or(Error::CapExceeded {
                    what: "growth exponent".into(),
                    cap: u32::MAX as u64,
                })?;
                Ok(base.pow(exp))
            }
            GrowthExpr::Max(a, b) => Ok(a.eval(m)?.max(b.eval(m)?)),
            GrowthExpr::Compose(f, g) => f.eval(&g.eval(m)?),
        }
    }

    pub fn eval_u64(&self, m: u64) -> Result<u64> {
        self.eval(&Int::from(m))?.to_u64().ok_or(Error::CapExceeded {
            what: "growth value".into(),
            cap: u64::MAX,
        })
    }

    /// M ↦ max(self(M), M): the normalization the arguments of the
    /// structure theorem are always put through.
    pub fn or_identity(&self) -> GrowthExpr {
        GrowthExpr::Max(Box::new(self.clone()), Box::new(GrowthExpr::Var))
    }

    /// Samples nondecreasingness on 0..=hi (a sanity check, not a proof).
    pub fn is_nondecreasing_on(&self, hi: u64) -> Result<bool> {
        let mut prev = self.eval(&Int::zero())?;
        for m in 1..=hi {
            let cur = self.eval(&Int::from(m))?;
            if cur < prev {
                return Ok(false);
            }
            prev = cur;
        }
        Ok(true)
    }
}

impl fmt::Display for GrowthExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthExpr::Const(c) => write!(f, "{c}"),
            GrowthExpr::Var => write!(f, "M"),
            GrowthExpr::Add(a, b) => write!(f, "({a} + {b})"),
            GrowthExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            GrowthExpr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            GrowthExpr::Max(a, b) => write!(f, "max({a}, {b})"),
            GrowthExpr::Compose(a, b) => write!(f, "({a})({b})"),
        }
    }
}

impl FromStr for GrowthExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            input: s.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.input.len() {
            return Err(p.fail("trailing input"));
        }
        Ok(e)
    }
}

pub fn parse(s: &str) -> Result<GrowthExpr> {
    s.parse()
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn fail(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.input.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(&format!("expected '{}'", c as char)))
        }
    }

    // expr := term ('+' term)*
    fn expr(&mut self) -> Result<GrowthExpr> {
        let mut e = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            e = GrowthExpr::Add(Box::new(e), Box::new(self.term()?));
        }
        Ok(e)
    }

    // term := power ('*' power)*
    fn term(&mut self) -> Result<GrowthExpr> {
        let mut e = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            e = GrowthExpr::Mul(Box::new(e), Box::new(self.power()?));
        }
        Ok(e)
    }

    // power := postfix ('^' power)?   (right associative)
    fn power(&mut self) -> Result<GrowthExpr> {
        let base = self.postfix()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.power()?;
            return Ok(GrowthExpr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    // postfix := atom ('(' expr ')')*   — application is composition
    fn postfix(&mut self) -> Result<GrowthExpr> {
        let mut e = self.atom()?;
        while self.peek() == Some(b'(') {
            self.pos += 1;
            let arg = self.expr()?;
            self.eat(b')')?;
            e = GrowthExpr::Compose(Box::new(e), Box::new(arg));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<GrowthExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(b')')?;
                Ok(e)
            }
            Some(b'M') => {
                self.pos += 1;
                Ok(GrowthExpr::Var)
            }
            Some(b'm') if self.input[self.pos..].starts_with(b"max") => {
                self.pos += 3;
                self.eat(b'(')?;
                let a = self.expr()?;
                self.eat(b',')?;
                let b = self.expr()?;
                self.eat(b')')?;
                Ok(GrowthExpr::Max(Box::new(a), Box::new(b)))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.input.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                Ok(GrowthExpr::Const(
                    lit.parse().map_err(|_| self.fail("bad integer"))?,
                ))
            }
            _ => Err(self.fail("expected integer, 'M', 'max' or '('")),
        }
    }
}
