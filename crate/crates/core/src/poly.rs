//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are global indices. By convention the coordinates of the group
//! argument `n` occupy indices `0..arity` and everything above is a symbolic
//! shift parameter, so "constant in n" is a pure index-range check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Var = u32;
pub type Rat = BigRational;
pub type Int = BigInt;

/// Product of variable powers, sorted by variable index, exponents > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_where(&self, keep: impl Fn(Var) -> bool) -> u32 {
        self.0
            .iter()
            .filter(|&&(v, _)| keep(v))
            .map(|&(_, e)| e)
            .sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = self.0[i];
            let (vb, eb) = other.0[j];
            match va.cmp(&vb) {
                std::cmp::Ordering::Less => {
                    out.push((va, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((vb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

/// A sparse polynomial; invariant: no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(c: impl Into<Int>) -> Self {
        Poly::constant(Rat::from_integer(c.into()))
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), Rat::one());
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the value when the polynomial has no variables at all.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    fn insert_term(terms: &mut BTreeMap<Monomial, Rat>, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_term(&mut terms, m.clone(), c.clone());
        }
        Poly { terms }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Self::insert_term(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        Poly { terms }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn max_var(&self) -> Option<Var> {
        self.vars().into_iter().max()
    }

    pub fn depends_on(&self, keep: impl Fn(Var) -> bool) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|&(v, _)| keep(v)))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_where(&self, keep: impl Fn(Var) -> bool + Copy) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_where(keep))
            .max()
            .unwrap_or(0)
    }

    /// Full evaluation; every variable must be bound.
    pub fn eval(&self, bind: &impl Fn(Var) -> Option<Rat>) -> Result<Rat, Var> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = bind(v).ok_or(v)?;
                for _ in 0..e {
                    t *= &x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes variables by polynomials; unmapped variables stay.
    pub fn subst(&self, map: &BTreeMap<Var, Poly>) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for &(v, e) in m.factors() {
                let repl = match map.get(&v) {
                    Some(p) => p.clone(),
                    None => Poly::var(v),
                };
                t = t.mul(&repl.pow(e));
            }
            acc = acc.add(&t);
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                let mut sep = "";
                for &(v, e) in m.factors() {
                    if e == 1 {
                        write!(f, "{sep}x{v}")?;
                    } else {
                        write!(f, "{sep}x{v}^{e}")?;
                    }
                    sep = "*";
                }
            }
        }
        Ok(())
    }
}

fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().ok()?;
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => {
            let p: Int = s.trim().parse().ok()?;
            Some(Rat::from_integer(p))
        }
    }
}

// JSON form: sparse {"e0,e1,...": "coeff"} with a dense exponent vector key.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let width = self.max_var().map(|v| v as usize + 1).unwrap_or(0);
        let mut map = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; width];
            for &(v, e) in m.factors() {
                exps[v as usize] = e;
            }
            let key = exps
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",");
            map.insert(key, rat_to_string(c));
        }
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, String> = BTreeMap::deserialize(deserializer)?;
        let mut poly = Poly::zero();
        for (key, val) in raw {
            let coeff =
                rat_from_string(&val).ok_or_else(|| D::Error::custom("bad coefficient"))?;
            let mut mono = Poly::constant(coeff);
            if !key.trim().is_empty() {
                for (v, e) in key.split(',').enumerate() {
                    let e: u32 = e.trim().parse().map_err(D::Error::custom)?;
                    if e > 0 {
                        mono = mono.mul(&Poly::var(v as Var).pow(e));
                    }
                }
            }
            poly = poly.add(&mono);
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> Poly {
        Poly::var(0)
    }

    #[test]
    fn arithmetic_basics() {
        let p = n().mul(&n()).add(&Poly::from_int(1)); // n^2 + 1
        let q = n().sub(&Poly::from_int(1)); // n - 1
        let r = p.mul(&q);
        let at = |x: i64| {
            r.eval(&|_| Some(Rat::from_integer(Int::from(x))))
                .unwrap()
        };
        assert_eq!(at(3), Rat::from_integer(Int::from((9 + 1) * 2)));
        assert_eq!(at(0), Rat::from_integer(Int::from(-1)));
    }

    #[test]
    fn subst_composes() {
        // p(n) = n^2, n -> n + a  =>  n^2 + 2an + a^2
        let p = n().pow(2);
        let mut map = BTreeMap::new();
        map.insert(0, n().add(&Poly::var(1)));
        let q = p.subst(&map);
        let expect = n()
            .pow(2)
            .add(&n().mul(&Poly::var(1)).scale(&Rat::from_integer(Int::from(2))))
            .add(&Poly::var(1).pow(2));
        assert_eq!(q, expect);
    }

    #[test]
    fn json_round_trip() {
        let p = n().pow(2).mul(&Poly::var(2)).sub(&Poly::constant(Rat::new(
            Int::from(1),
            Int::from(2),
        )));
        let s = serde_json::to_string(&p).unwrap();
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn degree_filters() {
        let p = n().pow(3).mul(&Poly::var(5)); // x0^3 * x5
        assert_eq!(p.total_degree(), 4);
        assert_eq!(p.degree_where(|v| v < 1), 3);
        assert!(p.depends_on(|v| v == 5));
        assert!(!p.depends_on(|v| v == 4));
    }
}
