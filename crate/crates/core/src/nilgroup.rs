//! Exact arithmetic in the ambient groups: upper-unitriangular integer
//! matrices UT(n, Z) and finite permutation groups, plus prefiltration
//! bookkeeping via superdiagonal zero patterns.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Int;

/// An exact group element: unitriangular integer matrix or permutation.
///
/// Permutation product convention: `mul(p, q)` applies `q` first, then `p`,
/// i.e. `(p*q)(x) = p(q(x))`.
///
/// JSON form: `{"ut": {"dim": n, "entries": [[...]]}}` with entries as
/// decimal strings, or `{"perm": [images]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElement {
    Ut { dim: usize, entries: Vec<Vec<Int>> },
    Perm { images: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
struct UtRepr {
    dim: usize,
    entries: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
enum ElementRepr {
    #[serde(rename = "ut")]
    Ut(UtRepr),
    #[serde(rename = "perm")]
    Perm(Vec<usize>),
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            GroupElement::Ut { dim, entries } => ElementRepr::Ut(UtRepr {
                dim: *dim,
                entries: entries
                    .iter()
                    .map(|r| r.iter().map(|e| e.to_string()).collect())
                    .collect(),
            }),
            GroupElement::Perm { images } => ElementRepr::Perm(images.clone()),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ElementRepr::deserialize(d)? {
            ElementRepr::Ut(r) => {
                let entries = r
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| e.trim().parse::<Int>().map_err(D::Error::custom))
                            .collect::<std::result::Result<Vec<_>, _>>()
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                GroupElement::ut(r.dim, entries).map_err(D::Error::custom)
            }
            ElementRepr::Perm(images) => GroupElement::perm(images).map_err(D::Error::custom),
        }
    }
}

impl GroupElement {
    pub fn ut(dim: usize, entries: Vec<Vec<Int>>) -> Result<Self> {
        if entries.len() != dim || entries.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidElement("matrix shape".into()));
        }
        for i in 0..dim {
            if !entries[i][i].is_one() {
                return Err(Error::InvalidElement("diagonal entry not 1".into()));
            }
            for j in 0..i {
                if !entries[i][j].is_zero() {
                    return Err(Error::InvalidElement("nonzero below diagonal".into()));
                }
            }
        }
        Ok(GroupElement::Ut { dim, entries })
    }

    pub fn ut_identity(dim: usize) -> Self {
        let entries = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Int::one() } else { Int::zero() })
                    .collect()
            })
            .collect();
        GroupElement::Ut { dim, entries }
    }

    /// Elementary matrix with `value` at position (i, j), i < j.
    pub fn elementary(dim: usize, i: usize, j: usize, value: impl Into<Int>) -> Result<Self> {
        if i >= j || j >= dim {
            return Err(Error::InvalidElement("elementary position".into()));
        }
        let mut e = Self::ut_identity(dim);
        if let GroupElement::Ut { entries, .. } = &mut e {
            entries[i][j] = value.into();
        }
        Ok(e)
    }

    pub fn perm(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidElement("not a bijection".into()));
            }
            seen[x] = true;
        }
        Ok(GroupElement::Perm { images })
    }

    pub fn perm_identity(degree: usize) -> Self {
        GroupElement::Perm {
            images: (0..degree).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Ut { dim, entries } => (0..*dim)
                .all(|i| (0..*dim).all(|j| entries[i][j] == if i == j { Int::one() } else { Int::zero() })),
            GroupElement::Perm { images } => images.iter().enumerate().all(|(i, &x)| i == x),
        }
    }

    pub fn identity_like(&self) -> Self {
        match self {
            GroupElement::Ut { dim, .. } => Self::ut_identity(*dim),
            GroupElement::Perm { images } => Self::perm_identity(images.len()),
        }
    }
}

pub fn mul(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    match (g, h) {
        (
            GroupElement::Ut { dim: da, entries: a },
            GroupElement::Ut { dim: db, entries: b },
        ) => {
            if da != db {
                return Err(Error::DimensionMismatch(format!("UT({da}) vs UT({db})")));
            }
            let d = *da;
            let mut out = vec![vec![Int::zero(); d]; d];
            for i in 0..d {
                for j in i..d {
                    let mut s = Int::zero();
                    for k in i..=j {
                        s += &a[i][k] * &b[k][j];
                    }
                    out[i][j] = s;
                }
            }
            Ok(GroupElement::Ut { dim: d, entries: out })
        }
        (GroupElement::Perm { images: p }, GroupElement::Perm { images: q }) => {
            if p.len() != q.len() {
                return Err(Error::DimensionMismatch(format!(
                    "perm degree {} vs {}",
                    p.len(),
                    q.len()
                )));
            }
            Ok(GroupElement::Perm {
                images: q.iter().map(|&x| p[x]).collect(),
            })
        }
        _ => Err(Error::VariantMismatch("UT vs Perm".into())),
    }
}

pub fn inv(g: &GroupElement) -> GroupElement {
    match g {
        GroupElement::Ut { dim, entries } => {
            // (I + N)^{-1} = I - N + N^2 - ..., N strictly upper triangular.
            let d = *dim;
            let id = GroupElement::ut_identity(d);
            let mut n = entries.clone();
            for i in 0..d {
                n[i][i] = Int::zero();
            }
            let mut out = match &id {
                GroupElement::Ut { entries, .. } => entries.clone(),
                _ => unreachable!(),
            };
            // power = (-N)^k accumulated
            let mut power = n.clone();
            let mut sign_neg = true;
            for _ in 1..d {
                for i in 0..d {
                    for j in 0..d {
                        if sign_neg {
                            out[i][j] -= &power[i][j];
                        } else {
                            out[i][j] += &power[i][j];
                        }
                    }
                }
                // power <- power * N
                let mut next = vec![vec![Int::zero(); d]; d];
                for i in 0..d {
                    for j in 0..d {
                        let mut s = Int::zero();
                        for k in 0..d {
                            s += &power[i][k] * &n[k][j];
                        }
                        next[i][j] = s;
                    }
                }
                power = next;
                sign_neg = !sign_neg;
            }
            GroupElement::Ut { dim: d, entries: out }
        }
        GroupElement::Perm { images } => {
            let mut out = vec![0; images.len()];
            for (i, &x) in images.iter().enumerate() {
                out[x] = i;
            }
            GroupElement::Perm { images: out }
        }
    }
}

/// Commutator g^{-1} h^{-1} g h.
pub fn commutator(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    let gi = inv(g);
    let hi = inv(h);
    mul(&mul(&gi, &hi)?, &mul(g, h)?)
}

/// A descending chain of UT subgroups given by superdiagonal zero patterns:
/// level `i` consists of matrices with entries vanishing at offsets
/// `0 < j - i < offsets[i]`. Offset >= dim means the trivial group; levels
/// beyond the stored list are trivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prefiltration {
    pub dim: usize,
    pub levels: Vec<usize>,
}

/// Prefiltration length: d with level d+1 trivial, or -infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Length {
    MinusInf,
    Fin(usize),
}

impl Prefiltration {
    pub fn new(dim: usize, levels: Vec<usize>) -> Result<Self> {
        if levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidElement(
                "prefiltration offsets must be nondecreasing".into(),
            ));
        }
        Ok(Prefiltration { dim, levels })
    }

    pub fn offset_at(&self, i: usize) -> usize {
        self.levels.get(i).copied().unwrap_or(self.dim).min(self.dim)
    }

    pub fn level_is_trivial(&self, i: usize) -> bool {
        self.offset_at(i) >= self.dim
    }

    pub fn length(&self) -> Length {
        if self.level_is_trivial(0) {
            return Length::MinusInf;
        }
        let mut d = 0;
        while !self.level_is_trivial(d + 1) {
            d += 1;
        }
        Length::Fin(d)
    }

    /// The shifted prefiltration Gb[+t].
    pub fn shift(&self, t: usize) -> Prefiltration {
        Prefiltration {
            dim: self.dim,
            levels: self.levels.iter().skip(t).copied().collect(),
        }
    }
}

pub fn member(g: &GroupElement, pf: &Prefiltration, level: usize) -> Result<bool> {
    match g {
        GroupElement::Ut { dim, entries } => {
            if *dim != pf.dim {
                return Err(Error::DimensionMismatch(format!(
                    "UT({dim}) vs prefiltration on UT({})",
                    pf.dim
                )));
            }
            let k = pf.offset_at(level);
            for i in 0..*dim {
                for j in (i + 1)..*dim {
                    if j - i < k && !entries[i][j].is_zero() {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        GroupElement::Perm { .. } => Err(Error::Unsupported(
            "prefiltration membership is defined for UT elements".into(),
        )),
    }
}

/// Lower central series of UT(dim, Z) as a filtration:
/// G0 = G1 = UT, G_i = offset-i pattern, G_dim trivial.
pub fn lcs(dim: usize) -> Prefiltration {
    let mut levels = Vec::with_capacity(dim + 1);
    levels.push(1);
    for i in 1..=dim {
        levels.push(i);
    }
    Prefiltration { dim, levels }
}

/// Repeats each nontrivial level of a filtration `d` times (after level 0),
/// the refinement certifying scalar degree <= d.
pub fn refine_scalar(pf: &Prefiltration, d: usize) -> Result<Prefiltration> {
    if d == 0 {
        return Err(Error::Precondition("refinement multiplicity d >= 1".into()));
    }
    let mut levels = vec![pf.offset_at(0)];
    let mut i = 1;
    while !pf.level_is_trivial(i) {
        for _ in 0..d {
            levels.push(pf.offset_at(i));
        }
        i += 1;
    }
    levels.push(pf.dim);
    Prefiltration::new(pf.dim, levels)
}
