//! Polynomial maps Γ → G with exact symbolic entries, the discrete
//! derivative calculus and the polynomiality verifier.
//!
//! UT-valued maps carry a matrix of polynomials in the coordinates of the
//! argument (variables `0..arity`) and in symbolic shift parameters
//! (variables `>= arity`). Finite permutation targets are words in base
//! permutations with polynomial exponents, checked by exhaustive evaluation
//! over a declared period lattice.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FreshVars, GammaArg, GroupModel};
use crate::nilgroup::{self, GroupElement, Length, Prefiltration};
use crate::poly::{Int, Poly, Rat, Var};

/// Unitriangular matrix over the polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMatrix {
    pub dim: usize,
    pub entries: Vec<Poly>, // row-major
}

impl PolyMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Poly::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Poly::one();
        }
        PolyMatrix { dim, entries }
    }

    pub fn new(dim: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch("matrix entry count".into()));
        }
        let m = PolyMatrix { dim, entries };
        for i in 0..dim {
            if !m.at(i, i).is_one() {
                return Err(Error::InvalidElement("diagonal entry not 1".into()));
            }
            for j in 0..i {
                if !m.at(i, j).is_zero() {
                    return Err(Error::InvalidElement("nonzero below diagonal".into()));
                }
            }
        }
        Ok(m)
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.dim + j] = p;
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "UT({}) vs UT({})",
                self.dim, other.dim
            )));
        }
        let d = self.dim;
        let mut out = PolyMatrix::identity(d);
        for i in 0..d {
            for j in i..d {
                let mut s = Poly::zero();
                for k in i..=j {
                    s = s.add(&self.at(i, k).mul(other.at(k, j)));
                }
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    /// Exact inverse via the nilpotent Neumann series.
    pub fn inv(&self) -> PolyMatrix {
        let d = self.dim;
        let mut n = self.clone();
        for i in 0..d {
            n.set(i, i, Poly::zero());
        }
        let mut out = PolyMatrix::identity(d);
        let mut power = n.clone();
        let mut negate = true;
        for _ in 1..d {
            for i in 0..d {
                for j in (i + 1)..d {
                    let e = if negate {
                        out.at(i, j).sub(power.at(i, j))
                    } else {
                        out.at(i, j).add(power.at(i, j))
                    };
                    out.set(i, j, e);
                }
            }
            power = power.mul(&n).expect("same dim");
            negate = !negate;
        }
        out
    }

    pub fn subst(&self, map: &BTreeMap<Var, Poly>) -> PolyMatrix {
        PolyMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|p| p.subst(map)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| {
                let p = self.at(i, j);
                if i == j {
                    p.is_one()
                } else {
                    p.is_zero()
                }
            })
        })
    }

    pub fn max_var(&self) -> Option<Var> {
        self.entries.iter().filter_map(Poly::max_var).max()
    }

    pub fn eval(&self, bind: &impl Fn(Var) -> Option<Rat>) -> Result<GroupElement> {
        let d = self.dim;
        let mut rows = vec![vec![Int::zero(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let v = self
                    .at(i, j)
                    .eval(bind)
                    .map_err(Error::UnboundParameter)?;
                if !v.denom().is_one() {
                    return Err(Error::NonInteger(v.to_string()));
                }
                rows[i][j] = v.numer().clone();
            }
        }
        GroupElement::ut(d, rows)
    }

    /// Do the symbolic entries satisfy the offset-k superdiagonal pattern?
    pub fn satisfies_offset(&self, k: usize) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in (i + 1)..d {
                if j - i < k && !self.at(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// One factor of a permutation word: a base permutation raised to a
/// polynomial exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermFactor {
    pub base: Vec<usize>,
    pub exponent: Poly,
}

/// Permutation-valued map given as a word with polynomial exponents,
/// together with the period of every exponent datum per Γ-coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermWord {
    pub degree: usize,
    pub factors: Vec<PermFactor>,
    pub period: u64,
}

fn perm_order(p: &[usize]) -> u64 {
    let mut ord: u64 = 1;
    let mut seen = vec![false; p.len()];
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        loop {
            seen[x] = true;
            len += 1;
            x = p[x];
            if x == start {
                break;
            }
        }
        ord = ord.lcm(&len);
    }
    ord
}

fn perm_pow(p: &[usize], e: &Int) -> Vec<usize> {
    let ord = perm_order(p) as i64;
    let mut e = (e % Int::from(ord)).to_i64().unwrap();
    if e < 0 {
        e += ord;
    }
    let mut acc: Vec<usize> = (0..p.len()).collect();
    for _ in 0..e {
        acc = acc.iter().map(|&x| p[x]).collect();
    }
    acc
}

/// The target side of a polynomial map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "ut")]
    Ut(PolyMatrix),
    #[serde(rename = "perm")]
    Perm(PermWord),
}

/// A polynomial map Γ → G.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMap {
    pub model: GroupModel,
    pub target: Target,
}

/// Outcome of the polynomiality verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified(CertTrace),
    Refuted(RefutedWitness),
    Inconclusive,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified(_))
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertTrace {
    /// One line per recursion level: the pattern verified and the fresh
    /// symbolic shift variables introduced there.
    pub steps: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutedWitness {
    pub depth: usize,
    pub detail: String,
}

impl PolyMap {
    pub fn identity(model: GroupModel, dim: usize) -> Self {
        PolyMap {
            model,
            target: Target::Ut(PolyMatrix::identity(dim)),
        }
    }

    pub fn from_matrix(model: GroupModel, m: PolyMatrix) -> Self {
        PolyMap {
            model,
            target: Target::Ut(m),
        }
    }

    /// Map n ↦ E_{ij}(p(n)) built from one elementary slot.
    pub fn elementary(model: GroupModel, dim: usize, i: usize, j: usize, p: Poly) -> Result<Self> {
        if i >= j || j >= dim {
            return Err(Error::InvalidElement("elementary position".into()));
        }
        let mut m = PolyMatrix::identity(dim);
        m.set(i, j, p);
        Ok(PolyMap::from_matrix(model, m))
    }

    /// Map n ↦ h^{p(n)} for a fixed UT element h, entries via the exact
    /// binomial expansion of (1 + N)^p.
    pub fn power_of(model: GroupModel, h: &GroupElement, p: &Poly) -> Result<Self> {
        let (dim, entries) = match h {
            GroupElement::Ut { dim, entries } => (*dim, entries),
            _ => return Err(Error::Unsupported("power_of needs a UT element".into())),
        };
        let mut nil = PolyMatrix::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = if i == j { Int::zero() } else { entries[i][j].clone() };
                nil.set(i, j, Poly::from_int(v));
            }
            nil.set(i, i, Poly::zero());
        }
        let mut acc = PolyMatrix::identity(dim);
        let mut power = PolyMatrix::identity(dim); // N^k, starting at k=0
        let mut falling = Poly::one(); // p(p-1)...(p-k+1)/k!
        for k in 1..dim {
            power = power.mul(&nil)?;
            let step = p.sub(&Poly::from_int(Int::from(k as i64 - 1)));
            falling = falling
                .mul(&step)
                .scale(&Rat::new(Int::one(), Int::from(k)));
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let add = power.at(i, j).mul(&falling);
                    acc.set(i, j, acc.at(i, j).add(&add));
                }
            }
        }
        Ok(PolyMap::from_matrix(model, acc))
    }

    pub fn perm_word(model: GroupModel, degree: usize, factors: Vec<PermFactor>, period: u64) -> Result<Self> {
        if period == 0 {
            return Err(Error::Precondition("period lattice must be nonempty".into()));
        }
        for f in &factors {
            GroupElement::perm(f.base.clone())?;
            if f.base.len() != degree {
                return Err(Error::DimensionMismatch("perm degree".into()));
            }
        }
        Ok(PolyMap {
            model,
            target: Target::Perm(PermWord { degree, factors, period }),
        })
    }

    pub fn is_identity_map(&self) -> bool {
        match &self.target {
            Target::Ut(m) => m.is_identity(),
            Target::Perm(w) => {
                self.perm_exhaustive(|g| g.is_identity()).unwrap_or(false) && w.degree > 0
            }
        }
    }

    pub fn max_var(&self) -> Var {
        let used = match &self.target {
            Target::Ut(m) => m.max_var(),
            Target::Perm(w) => w.factors.iter().filter_map(|f| f.exponent.max_var()).max(),
        };
        let floor = self.model.arity().saturating_sub(1) as Var;
        used.map(|v| v.max(floor)).unwrap_or(floor)
    }

    pub fn fresh_vars(&self) -> FreshVars {
        FreshVars::starting_above(self.max_var())
    }

    /// Full evaluation at a concrete point, with symbolic parameters bound
    /// through `params`.
    pub fn evaluate(&self, n: &[Int], params: &BTreeMap<Var, Int>) -> Result<GroupElement> {
        if n.len() != self.model.arity() {
            return Err(Error::ModelMismatch(format!(
                "expected {} coordinates",
                self.model.arity()
            )));
        }
        let bind = |v: Var| -> Option<Rat> {
            if (v as usize) < n.len() {
                Some(Rat::from_integer(n[v as usize].clone()))
            } else {
                params.get(&v).map(|x| Rat::from_integer(x.clone()))
            }
        };
        match &self.target {
            Target::Ut(m) => m.eval(&bind),
            Target::Perm(w) => {
                let mut acc = GroupElement::perm_identity(w.degree);
                for f in &w.factors {
                    let e = f.exponent.eval(&bind).map_err(Error::UnboundParameter)?;
                    if !e.denom().is_one() {
                        return Err(Error::NonInteger(e.to_string()));
                    }
                    let pw = GroupElement::Perm {
                        images: perm_pow(&f.base, e.numer()),
                    };
                    acc = nilgroup::mul(&acc, &pw)?;
                }
                Ok(acc)
            }
        }
    }

    /// T_{a,b} g (n) = g(a n b).
    pub fn translate(&self, a: &GammaArg, b: &GammaArg) -> Result<PolyMap> {
        let ap = a.polys(&self.model);
        let bp = b.polys(&self.model);
        let np = self.model.argument_polys();
        let coords = self
            .model
            .compose_polys(&self.model.compose_polys(&ap, &np)?, &bp)?;
        let map: BTreeMap<Var, Poly> = coords
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i as Var, p))
            .collect();
        let target = match &self.target {
            Target::Ut(m) => Target::Ut(m.subst(&map)),
            Target::Perm(w) => Target::Perm(PermWord {
                degree: w.degree,
                factors: w
                    .factors
                    .iter()
                    .map(|f| PermFactor {
                        base: f.base.clone(),
                        exponent: f.exponent.subst(&map),
                    })
                    .collect(),
                period: w.period,
            }),
        };
        Ok(PolyMap { model: self.model, target })
    }

    pub fn right_translate(&self, b: &GammaArg) -> Result<PolyMap> {
        self.translate(&GammaArg::Identity, b)
    }

    /// D_{a,b} g (n) = g(n)^{-1} g(a n b).
    pub fn derivative(&self, a: &GammaArg, b: &GammaArg) -> Result<PolyMap> {
        self.pointwise_inv()?.pointwise_mul(&self.translate(a, b)?)
    }

    pub fn right_derivative(&self, b: &GammaArg) -> Result<PolyMap> {
        self.derivative(&GammaArg::Identity, b)
    }

    pub fn pointwise_mul(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.model != other.model {
            return Err(Error::ModelMismatch("pointwise_mul across models".into()));
        }
        let target = match (&self.target, &other.target) {
            (Target::Ut(a), Target::Ut(b)) => Target::Ut(a.mul(b)?),
            (Target::Perm(a), Target::Perm(b)) => {
                if a.degree != b.degree {
                    return Err(Error::DimensionMismatch("perm degree".into()));
                }
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                Target::Perm(PermWord {
                    degree: a.degree,
                    factors,
                    period: a.period.lcm(&b.period),
                })
            }
            _ => return Err(Error::VariantMismatch("UT vs Perm target".into())),
        };
        Ok(PolyMap { model: self.model, target })
    }

    pub fn pointwise_inv(&self) -> Result<PolyMap> {
        let target = match &self.target {
            Target::Ut(m) => Target::Ut(m.inv()),
            Target::Perm(w) => Target::Perm(PermWord {
                degree: w.degree,
                factors: w
                    .factors
                    .iter()
                    .rev()
                    .map(|f| PermFactor {
                        base: f.base.clone(),
                        exponent: f.exponent.neg(),
                    })
                    .collect(),
                period: w.period,
            }),
        };
        Ok(PolyMap { model: self.model, target })
    }

    /// True when no entry depends on the Γ-coordinates of n (symbolic shift
    /// parameters are treated as constants).
    pub fn is_constant_in_n(&self) -> Result<bool> {
        let arity = self.model.arity() as Var;
        match &self.target {
            Target::Ut(m) => Ok(m.entries.iter().all(|p| !p.depends_on(|v| v < arity))),
            Target::Perm(_) => {
                let id = self.model.identity_point();
                let base = self.evaluate(&id, &BTreeMap::new())?;
                self.perm_exhaustive(|g| *g == base)
            }
        }
    }

    fn period_box(&self, period: u64) -> Vec<Vec<Int>> {
        let arity = self.model.arity();
        let mut points = vec![vec![]];
        for _ in 0..arity {
            let mut next = Vec::new();
            for p in &points {
                for c in 0..period {
                    let mut q: Vec<Int> = p.clone();
                    q.push(Int::from(c));
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }

    fn perm_exhaustive(&self, pred: impl Fn(&GroupElement) -> bool) -> Result<bool> {
        let w = match &self.target {
            Target::Perm(w) => w,
            _ => return Err(Error::Unsupported("perm_exhaustive on UT target".into())),
        };
        if (self.max_var() as usize) >= self.model.arity() {
            return Err(Error::UnboundParameter(self.max_var()));
        }
        for n in self.period_box(w.period) {
            let g = self.evaluate(&n, &BTreeMap::new())?;
            if !pred(&g) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Default recursion cap for the polynomiality verifier.
    pub fn default_depth_cap(&self, pf: &Prefiltration) -> usize {
        let len = match pf.length() {
            Length::MinusInf => 0,
            Length::Fin(d) => d,
        };
        let arity = self.model.arity() as Var;
        let deg = match &self.target {
            Target::Ut(m) => m
                .entries
                .iter()
                .map(|p| p.degree_where(|v| v < arity))
                .max()
                .unwrap_or(0),
            Target::Perm(w) => w
                .factors
                .iter()
                .map(|f| f.exponent.degree_where(|v| v < arity))
                .max()
                .unwrap_or(0),
        };
        (len + 1) * (1 + deg as usize)
    }

    /// Recursive polynomiality certificate with fresh symbolic shifts at
    /// every level (Definition of Gb-polynomial maps).
    pub fn is_polynomial(&self, pf: &Prefiltration, depth_cap: usize) -> Result<Verdict> {
        match &self.target {
            Target::Ut(_) => {
                let mut fresh = self.fresh_vars();
                Ok(self.is_poly_ut(pf, depth_cap, 0, &mut fresh, &mut Vec::new()))
            }
            Target::Perm(_) => {
                // Finite targets: exhaustive scalar-degree check over the
                // declared period lattice; the chain length of `pf` plays
                // the role of the scalar degree.
                let d = match pf.length() {
                    Length::MinusInf => {
                        return Ok(if self.is_identity_map() {
                            Verdict::Certified(CertTrace {
                                steps: vec!["identity at length -inf".into()],
                            })
                        } else {
                            Verdict::Refuted(RefutedWitness {
                                depth: 0,
                                detail: "nonidentity map at length -inf".into(),
                            })
                        });
                    }
                    Length::Fin(d) => d,
                };
                if self.scalar_degree_check(d)? {
                    Ok(Verdict::Certified(CertTrace {
                        steps: vec![format!("exhaustive scalar degree <= {d} over period")],
                    }))
                } else {
                    Ok(Verdict::Refuted(RefutedWitness {
                        depth: d + 1,
                        detail: format!("({})-fold derivative nonvanishing on period lattice", d + 1),
                    }))
                }
            }
        }
    }

    fn is_poly_ut(
        &self,
        pf: &Prefiltration,
        depth_cap: usize,
        depth: usize,
        fresh: &mut FreshVars,
        steps: &mut Vec<String>,
    ) -> Verdict {
        let m = match &self.target {
            Target::Ut(m) => m,
            _ => unreachable!(),
        };
        match pf.length() {
            Length::MinusInf => {
                if m.is_identity() {
                    steps.push(format!("level {depth}: identity at length -inf"));
                    Verdict::Certified(CertTrace { steps: steps.clone() })
                } else {
                    Verdict::Refuted(RefutedWitness {
                        depth,
                        detail: format!(
                            "nonidentity map at length -inf: entry {}",
                            first_bad_entry(m, m.dim)
                        ),
                    })
                }
            }
            Length::Fin(_) => {
                let k0 = pf.offset_at(0);
                if !m.satisfies_offset(k0) {
                    return Verdict::Refuted(RefutedWitness {
                        depth,
                        detail: format!(
                            "value outside level-0 pattern (offset {k0}): entry {}",
                            first_bad_entry(m, k0)
                        ),
                    });
                }
                if depth >= depth_cap {
                    return Verdict::Inconclusive;
                }
                let a = fresh.gamma_symbol(&self.model);
                let b = fresh.gamma_symbol(&self.model);
                steps.push(format!("level {depth}: pattern offset {k0}, fresh shifts {a:?}, {b:?}"));
                let dg = match self.derivative(&a, &b) {
                    Ok(dg) => dg,
                    Err(e) => {
                        return Verdict::Refuted(RefutedWitness {
                            depth,
                            detail: format!("derivative failed: {e}"),
                        })
                    }
                };
                dg.is_poly_ut(&pf.shift(1), depth_cap, depth + 1, fresh, steps)
            }
        }
    }

    /// Do all (d+1)-fold discrete derivatives vanish identically?
    pub fn scalar_degree_check(&self, d: usize) -> Result<bool> {
        match &self.target {
            Target::Ut(_) => {
                let mut fresh = self.fresh_vars();
                let mut g = self.clone();
                for _ in 0..=d {
                    let a = fresh.gamma_symbol(&self.model);
                    let b = fresh.gamma_symbol(&self.model);
                    g = g.derivative(&a, &b)?;
                }
                match &g.target {
                    Target::Ut(m) => Ok(m.is_identity()),
                    _ => unreachable!(),
                }
            }
            Target::Perm(w) => self.perm_scalar_degree_check(d, w.period),
        }
    }

    fn perm_scalar_degree_check(&self, d: usize, period: u64) -> Result<bool> {
        // Exhaustive over the period lattice: shifts and the argument only
        // matter modulo the period in these Z^r-periodic data.
        let shift_box = self.period_box(period);
        let mut stack: Vec<(PolyMap, usize)> = vec![(self.clone(), 0)];
        while let Some((g, level)) = stack.pop() {
            if level == d + 1 {
                if !g.perm_exhaustive(|h| h.is_identity())? {
                    return Ok(false);
                }
                continue;
            }
            for a in &shift_box {
                for b in &shift_box {
                    let dg = g.derivative(&GammaArg::Point(a.clone()), &GammaArg::Point(b.clone()))?;
                    stack.push((dg, level + 1));
                }
            }
        }
        Ok(true)
    }
}

fn first_bad_entry(m: &PolyMatrix, offset: usize) -> String {
    for i in 0..m.dim {
        for j in (i + 1)..m.dim {
            if j - i < offset && !m.at(i, j).is_zero() {
                return format!("({i},{j}) = {}", m.at(i, j));
            }
        }
    }
    for i in 0..m.dim {
        for j in 0..m.dim {
            let want_one = i == j;
            let p = m.at(i, j);
            if (want_one && !p.is_one()) || (!want_one && i < j && offset >= m.dim && !p.is_zero())
            {
                return format!("({i},{j}) = {p}");
            }
        }
    }
    "(none)".into()
}

/// The dihedral D3 counterexample data: σ and σδ as period-2 sequences on Z.
pub fn dihedral_sequences() -> (PolyMap, PolyMap) {
    // D3 inside S3: delta = (0 1 2), sigma = (0 1) reflection.
    let sigma = vec![1usize, 0, 2];
    let sigma_delta = {
        // sigma * delta with (p*q)(x) = p(q(x)), delta = rotation 0->1->2->0
        let delta = [1usize, 2, 0];
        let s = &sigma;
        (0..3).map(|x| s[delta[x]]).collect::<Vec<_>>()
    };
    let n = Poly::var(0);
    let g1 = PolyMap::perm_word(
        GroupModel::Zr(1),
        3,
        vec![PermFactor { base: sigma, exponent: n.clone() }],
        2,
    )
    .unwrap();
    let g2 = PolyMap::perm_word(
        GroupModel::Zr(1),
        3,
        vec![PermFactor { base: sigma_delta, exponent: n }],
        6,
    )
    .unwrap();
    (g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GammaArg;

    fn z() -> GroupModel {
        GroupModel::Zr(1)
    }

    fn e13_nsq() -> PolyMap {
        PolyMap::elementary(z(), 3, 0, 2, Poly::var(0).pow(2)).unwrap()
    }

    fn pt(v: &[i64]) -> GammaArg {
        GammaArg::Point(v.iter().map(|&x| Int::from(x)).collect())
    }

    #[test]
    fn evaluate_direct() {
        let g = e13_nsq();
        let at3 = g.evaluate(&[Int::from(3)], &BTreeMap::new()).unwrap();
        assert_eq!(at3, GroupElement::elementary(3, 0, 2, 9).unwrap());
    }

    #[test]
    fn translate_shifts_argument() {
        let g = e13_nsq();
        let t = g.translate(&pt(&[1]), &pt(&[1])).unwrap();
        let at1 = t.evaluate(&[Int::from(1)], &BTreeMap::new()).unwrap();
        // (n+2)^2 at n=1 is 9
        assert_eq!(at1, GroupElement::elementary(3, 0, 2, 9).unwrap());
        // translating by identities is a no-op
        let t0 = g
            .translate(&GammaArg::Identity, &GammaArg::Identity)
            .unwrap();
        assert_eq!(t0, g);
    }

    #[test]
    fn derivative_drops_degree() {
        // D_{a,b} E13(n^2) = E13(2n(a+b) + (a+b)^2)
        let g = e13_nsq();
        let d = g.derivative(&pt(&[2]), &pt(&[3])).unwrap();
        for n in -5i64..5 {
            let got = d.evaluate(&[Int::from(n)], &BTreeMap::new()).unwrap();
            let expect = GroupElement::elementary(3, 0, 2, 2 * n * 5 + 25).unwrap();
            assert_eq!(got, expect);
        }
        // two-sided check against evaluate-then-compare at random points
        let a = pt(&[2]);
        let b = pt(&[3]);
        let d2 = g.derivative(&a, &b).unwrap();
        for n in -10i64..10 {
            let gn = g.evaluate(&[Int::from(n)], &BTreeMap::new()).unwrap();
            let gshift = g.evaluate(&[Int::from(n + 5)], &BTreeMap::new()).unwrap();
            let expect = nilgroup::mul(&nilgroup::inv(&gn), &gshift).unwrap();
            assert_eq!(d2.evaluate(&[Int::from(n)], &BTreeMap::new()).unwrap(), expect);
        }
    }

    #[test]
    fn constant_map_has_identity_derivative() {
        let mut m = PolyMatrix::identity(3);
        m.set(0, 2, Poly::from_int(7));
        let g = PolyMap::from_matrix(z(), m);
        let d = g.derivative(&pt(&[1]), &pt(&[4])).unwrap();
        assert!(d.is_identity_map());
    }

    #[test]
    fn homomorphism_derivative_is_constant() {
        // g(n) = h^n with h = E12(1): D_{a,b} g = h^{a+b}, constant in n
        let h = GroupElement::elementary(3, 0, 1, 1).unwrap();
        let g = PolyMap::power_of(z(), &h, &Poly::var(0)).unwrap();
        let d = g.derivative(&pt(&[2]), &pt(&[3])).unwrap();
        assert!(d.is_constant_in_n().unwrap());
        let expect = g.evaluate(&[Int::from(5)], &BTreeMap::new()).unwrap();
        assert_eq!(d.evaluate(&[Int::from(42)], &BTreeMap::new()).unwrap(), expect);
    }

    #[test]
    fn right_derivative_matches_two_sided() {
        let g = e13_nsq();
        let rd = g.right_derivative(&pt(&[4])).unwrap();
        let d = g.derivative(&GammaArg::Identity, &pt(&[4])).unwrap();
        assert_eq!(rd, d);
    }

    #[test]
    fn cocycle_identity() {
        // T_{a,b} g = g * D_{a,b} g symbolically
        let g = e13_nsq();
        let mut fresh = g.fresh_vars();
        let a = fresh.gamma_symbol(&z());
        let b = fresh.gamma_symbol(&z());
        let t = g.translate(&a, &b).unwrap();
        let gd = g.pointwise_mul(&g.derivative(&a, &b).unwrap()).unwrap();
        assert_eq!(t, gd);
    }

    #[test]
    fn pointwise_inverse_cancels() {
        let g = e13_nsq();
        let prod = g.pointwise_mul(&g.pointwise_inv().unwrap()).unwrap();
        assert!(prod.is_identity_map());
    }

    #[test]
    fn verifier_certifies_square_map() {
        let g = e13_nsq();
        let pf = crate::nilgroup::refine_scalar(&crate::nilgroup::lcs(3), 2).unwrap();
        let cap = g.default_depth_cap(&pf);
        assert!(g.is_polynomial(&pf, cap).unwrap().is_certified());
        // degree-1 refinement refutes the square
        assert!(g.scalar_degree_check(2).unwrap());
        assert!(!g.scalar_degree_check(1).unwrap());
    }

    #[test]
    fn heisenberg_coordinate_map_certified() {
        // Γ = Z^2, g(n1,n2) = E12(n1) E23(n2) E13(n1 n2)
        let m = GroupModel::Zr(2);
        let n1 = Poly::var(0);
        let n2 = Poly::var(1);
        let g = PolyMap::elementary(m, 3, 0, 1, n1.clone())
            .unwrap()
            .pointwise_mul(&PolyMap::elementary(m, 3, 1, 2, n2.clone()).unwrap())
            .unwrap()
            .pointwise_mul(&PolyMap::elementary(m, 3, 0, 2, n1.mul(&n2)).unwrap())
            .unwrap();
        let pf = crate::nilgroup::refine_scalar(&crate::nilgroup::lcs(3), 2).unwrap();
        let cap = g.default_depth_cap(&pf);
        assert!(g.is_polynomial(&pf, cap).unwrap().is_certified());
    }

    #[test]
    fn dihedral_product_fails_degree_one() {
        let (g1, g2) = dihedral_sequences();
        assert!(g1.scalar_degree_check(1).unwrap());
        assert!(g2.scalar_degree_check(1).unwrap());
        let prod = g1.pointwise_mul(&g2).unwrap();
        assert!(!prod.scalar_degree_check(1).unwrap());
        // verifier form of the same statement
        let pf = Prefiltration::new(3, vec![1, 1, 3]).unwrap(); // length 1 chain marker
        assert!(prod.is_polynomial(&pf, 8).unwrap().is_refuted());
    }

    #[test]
    fn antihomomorphism_right_derivative_of_inverse() {
        // For an antihomomorphism g (here: homomorphism on abelian Z),
        // D_b(g^{-1})(n) = g(b)^{-1}, constant.
        let h = GroupElement::elementary(3, 1, 2, 1).unwrap();
        let g = PolyMap::power_of(z(), &h, &Poly::var(0)).unwrap();
        let gi = g.pointwise_inv().unwrap();
        let d = gi.right_derivative(&pt(&[7])).unwrap();
        assert!(d.is_constant_in_n().unwrap());
        let gb = g.evaluate(&[Int::from(7)], &BTreeMap::new()).unwrap();
        assert_eq!(
            d.evaluate(&[Int::from(3)], &BTreeMap::new()).unwrap(),
            nilgroup::inv(&gb)
        );
    }

    #[test]
    fn heisenberg_translate_cross_term() {
        // Heisenberg coordinate identity map; translate must match direct
        // group-law composition at random points.
        let m = GroupModel::Heis;
        let x = Poly::var(0);
        let y = Poly::var(1);
        let zc = Poly::var(2);
        let g = PolyMap::elementary(m, 3, 0, 1, x.clone())
            .unwrap()
            .pointwise_mul(&PolyMap::elementary(m, 3, 1, 2, y).unwrap())
            .unwrap()
            .pointwise_mul(&PolyMap::elementary(m, 3, 0, 2, zc).unwrap())
            .unwrap();
        let a = vec![Int::from(1), Int::from(0), Int::from(0)];
        let b = vec![Int::from(0), Int::from(1), Int::from(0)];
        let t = g
            .translate(&GammaArg::Point(a.clone()), &GammaArg::Point(b.clone()))
            .unwrap();
        for s in 0..100i64 {
            let n = vec![Int::from(s % 7 - 3), Int::from(s % 5 - 2), Int::from(s % 11 - 5)];
            let anb = m
                .compose_points(&m.compose_points(&a, &n).unwrap(), &b)
                .unwrap();
            assert_eq!(
                t.evaluate(&n, &BTreeMap::new()).unwrap(),
                g.evaluate(&anb, &BTreeMap::new()).unwrap()
            );
        }
    }
}
