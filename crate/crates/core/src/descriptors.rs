//! Serde-friendly JSON descriptors for maps, systems and actions, shared
//! by the CLI and the Python bindings. Unknown fields are rejected.

use serde::Deserialize;

use crate::dynamics::{ActionAssignment, FiniteMPSpace, Observable};
use crate::error::{Error, Result};
use crate::model::GroupModel;
use crate::poly::Poly;
use crate::polymap::{PermFactor, PolyMap};
use crate::systems::System;
use crate::Rat;

pub fn parse_model(s: &str) -> Result<GroupModel> {
    match s {
        "z1" => Ok(GroupModel::Zr(1)),
        "z2" => Ok(GroupModel::Zr(2)),
        "z3" => Ok(GroupModel::Zr(3)),
        "heis" => Ok(GroupModel::Heis),
        other => Err(Error::Parse(format!(
            "unknown model {other:?}: expected z1, z2, z3 or heis"
        ))),
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    s.parse::<Rat>()
        .map_err(|e| Error::Parse(format!("cannot parse {s:?} as p/q: {e}")))
}

/// One monomial: coeff · ∏ n_var^exp.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDesc {
    pub coeff: String,
    #[serde(default)]
    pub powers: Vec<(u32, u32)>,
}

pub fn build_poly(terms: &[TermDesc], arity: usize) -> Result<Poly> {
    let mut p = Poly::from_int(0);
    for t in terms {
        let mut mono = Poly::from_int(1);
        for &(v, e) in &t.powers {
            if v as usize >= arity {
                return Err(Error::Parse(format!(
                    "poly references variable {v} but the model has arity {arity}"
                )));
            }
            mono = mono.mul(&Poly::var(v).pow(e));
        }
        p = p.add(&mono.scale(&parse_rat(&t.coeff)?));
    }
    Ok(p)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementaryDesc {
    pub row: usize,
    pub col: usize,
    pub poly: Vec<TermDesc>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermFactorDesc {
    pub base: Vec<usize>,
    pub exponent: Vec<TermDesc>,
}

/// Either a product of elementary UT(dim) maps or a permutation word.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDesc {
    pub model: String,
    pub dim: usize,
    #[serde(default)]
    pub factors: Vec<ElementaryDesc>,
    #[serde(default)]
    pub perm_factors: Vec<PermFactorDesc>,
    /// required with perm_factors: common period of the exponent data
    #[serde(default)]
    pub period: Option<u64>,
}

fn elementary_product(
    model: GroupModel,
    dim: usize,
    factors: &[ElementaryDesc],
) -> Result<PolyMap> {
    let mut m = PolyMap::identity(model, dim);
    for f in factors {
        let p = build_poly(&f.poly, model.arity())?;
        let e = PolyMap::elementary(model, dim, f.row, f.col, p)?;
        m = m.pointwise_mul(&e)?;
    }
    Ok(m)
}

impl MapDesc {
    pub fn build(&self) -> Result<PolyMap> {
        let model = parse_model(&self.model)?;
        if !self.perm_factors.is_empty() {
            if !self.factors.is_empty() {
                return Err(Error::Parse(
                    "a map has either factors or perm_factors, not both".into(),
                ));
            }
            let period = self
                .period
                .ok_or_else(|| Error::Parse("perm_factors requires a period".into()))?;
            let mut factors = Vec::new();
            for f in &self.perm_factors {
                factors.push(PermFactor {
                    base: f.base.clone(),
                    exponent: build_poly(&f.exponent, model.arity())?,
                });
            }
            return PolyMap::perm_word(model, self.dim, factors, period);
        }
        elementary_product(model, self.dim, &self.factors)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDesc {
    pub model: String,
    pub dim: usize,
    /// each map is a list of elementary factors; first must be empty (g₀ ≡ 1)
    pub maps: Vec<Vec<ElementaryDesc>>,
}

impl SystemDesc {
    pub fn build(&self) -> Result<System> {
        let model = parse_model(&self.model)?;
        let mut maps = Vec::new();
        for factors in &self.maps {
            maps.push(elementary_product(model, self.dim, factors)?);
        }
        System::new(maps)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDesc {
    pub weights: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionMapDesc {
    #[serde(default)]
    pub factors: Vec<PermFactorDesc>,
    pub period: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDesc {
    pub model: String,
    pub space: SpaceDesc,
    pub maps: Vec<ActionMapDesc>,
    /// one exact-rational value vector per map
    pub observables: Vec<Vec<String>>,
}

impl ActionDesc {
    pub fn build(&self) -> Result<(ActionAssignment, Vec<Observable>)> {
        let model = parse_model(&self.model)?;
        let weights: Result<Vec<Rat>> = self.space.weights.iter().map(|w| parse_rat(w)).collect();
        let space = FiniteMPSpace::new(weights?)?;
        let degree = self.space.weights.len();
        let mut maps = Vec::new();
        for m in &self.maps {
            let mut factors = Vec::new();
            for f in &m.factors {
                factors.push(PermFactor {
                    base: f.base.clone(),
                    exponent: build_poly(&f.exponent, model.arity())?,
                });
            }
            maps.push(PolyMap::perm_word(model, degree, factors, m.period)?);
        }
        let action = ActionAssignment::new(space, maps)?;
        if self.observables.len() != action.maps.len() {
            return Err(Error::Parse(format!(
                "need one observable per map: got {} observables for {} maps",
                self.observables.len(),
                action.maps.len()
            )));
        }
        let mut fs = Vec::new();
        for vals in &self.observables {
            if vals.len() != degree {
                return Err(Error::Parse(format!(
                    "observable has {} values but the space has {} points",
                    vals.len(),
                    degree
                )));
            }
            let values: Result<Vec<Rat>> = vals.iter().map(|v| parse_rat(v)).collect();
            fs.push(Observable { values: values? });
        }
        Ok((action, fs))
    }
}
