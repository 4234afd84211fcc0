//! Concrete discrete group models for the acting group Γ: the lattices Z^r
//! and the discrete Heisenberg group H3(Z), with coordinate group laws that
//! work both on exact points and on polynomial coordinate words.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Int, Poly, Rat, Var};

/// Γ as a coordinate model. Heisenberg coordinates (x, y, z) multiply as
/// (x, y, z)·(x', y', z') = (x + x', y + y', z + z' + x·y').
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupModel {
    #[serde(rename = "zr")]
    Zr(usize),
    #[serde(rename = "heis")]
    Heis,
}

impl GroupModel {
    pub fn arity(&self) -> usize {
        match self {
            GroupModel::Zr(r) => *r,
            GroupModel::Heis => 3,
        }
    }

    pub fn identity_point(&self) -> Vec<Int> {
        vec![Int::zero(); self.arity()]
    }

    pub fn compose_polys(&self, u: &[Poly], v: &[Poly]) -> Result<Vec<Poly>> {
        self.check_arity(u.len())?;
        self.check_arity(v.len())?;
        match self {
            GroupModel::Zr(_) => Ok(u.iter().zip(v).map(|(a, b)| a.add(b)).collect()),
            GroupModel::Heis => Ok(vec![
                u[0].add(&v[0]),
                u[1].add(&v[1]),
                u[2].add(&v[2]).add(&u[0].mul(&v[1])),
            ]),
        }
    }

    pub fn inverse_polys(&self, u: &[Poly]) -> Result<Vec<Poly>> {
        self.check_arity(u.len())?;
        match self {
            GroupModel::Zr(_) => Ok(u.iter().map(Poly::neg).collect()),
            GroupModel::Heis => Ok(vec![
                u[0].neg(),
                u[1].neg(),
                u[2].neg().add(&u[0].mul(&u[1])),
            ]),
        }
    }

    pub fn compose_points(&self, u: &[Int], v: &[Int]) -> Result<Vec<Int>> {
        let up: Vec<Poly> = u.iter().map(|x| Poly::from_int(x.clone())).collect();
        let vp: Vec<Poly> = v.iter().map(|x| Poly::from_int(x.clone())).collect();
        let out = self.compose_polys(&up, &vp)?;
        out.into_iter().map(point_coord).collect()
    }

    pub fn inverse_point(&self, u: &[Int]) -> Result<Vec<Int>> {
        let up: Vec<Poly> = u.iter().map(|x| Poly::from_int(x.clone())).collect();
        let out = self.inverse_polys(&up)?;
        out.into_iter().map(point_coord).collect()
    }

    /// The coordinate word of the group argument itself: vars 0..arity.
    pub fn argument_polys(&self) -> Vec<Poly> {
        (0..self.arity() as Var).map(Poly::var).collect()
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.arity() {
            return Err(Error::ModelMismatch(format!(
                "expected {} coordinates, got {got}",
                self.arity()
            )));
        }
        Ok(())
    }
}

fn point_coord(p: Poly) -> Result<Int> {
    let c = p
        .constant_value()
        .ok_or_else(|| Error::InvalidElement("coordinate is not constant".into()))?;
    if !c.denom().is_one() {
        return Err(Error::NonInteger(c.to_string()));
    }
    Ok(c.numer().clone())
}

/// A Γ-element used as a translation argument: a concrete point or a
/// symbolic element whose coordinates are fresh variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaArg {
    Point(Vec<Int>),
    Symbol(Vec<Var>),
    Identity,
}

impl GammaArg {
    pub fn polys(&self, model: &GroupModel) -> Vec<Poly> {
        match self {
            GammaArg::Point(coords) => coords
                .iter()
                .map(|c| Poly::from_int(c.clone()))
                .collect(),
            GammaArg::Symbol(vars) => vars.iter().map(|&v| Poly::var(v)).collect(),
            GammaArg::Identity => vec![Poly::zero(); model.arity()],
        }
    }
}

/// Deterministic source of fresh symbolic coordinate variables.
#[derive(Clone, Debug)]
pub struct FreshVars {
    next: Var,
}

impl FreshVars {
    pub fn starting_above(max_used: Var) -> Self {
        FreshVars { next: max_used + 1 }
    }

    pub fn gamma_symbol(&mut self, model: &GroupModel) -> GammaArg {
        let vars: Vec<Var> = (0..model.arity())
            .map(|_| {
                let v = self.next;
                self.next += 1;
                v
            })
            .collect();
        GammaArg::Symbol(vars)
    }
}

/// Binding of variables to exact rational values for full evaluation.
pub fn binder(map: &BTreeMap<Var, Rat>) -> impl Fn(Var) -> Option<Rat> + '_ {
    move |v| map.get(&v).cloned()
}

pub fn int_bindings(coords: &[Int]) -> BTreeMap<Var, Rat> {
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| (i as Var, BigRational::from_integer(c.clone())))
        .collect()
}
