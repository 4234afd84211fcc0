//! Finite measure-preserving systems, multiple ergodic averages,
//! metastability scanning, Σ-seminorms, uniform reducibility, and the
//! inverse-theorem witness construction.
//!
//! Everything is exact rational. The L² norm of a rational vector is
//! irrational in general, so all L² comparisons are performed on squares.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folner::{self, FolnerSet};
use crate::nilgroup::{self, GroupElement};
use crate::poly::{Int, Rat};
use crate::polymap::{PolyMap, Target};
use crate::simplex::{self, LpOutcome};

/// Finite probability space over points 0..|X|.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMPSpace {
    pub weights: Vec<Rat>,
}

impl FiniteMPSpace {
    pub fn new(weights: Vec<Rat>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Precondition("weights must be positive".into()));
        }
        let total: Rat = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Precondition("weights must sum to 1".into()));
        }
        Ok(FiniteMPSpace { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("empty space".into()));
        }
        Self::new(vec![Rat::new(Int::one(), Int::from(n)); n])
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn inner(&self, f: &Observable, g: &Observable) -> Rat {
        self.weights
            .iter()
            .zip(f.values.iter().zip(&g.values))
            .map(|(w, (a, b))| w * &(a * b))
            .sum()
    }

    pub fn l2_sq(&self, f: &Observable) -> Rat {
        self.inner(f, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observable {
    pub values: Vec<Rat>,
}

impl Observable {
    pub fn constant(n: usize, v: Rat) -> Self {
        Observable {
            values: vec![v; n],
        }
    }

    pub fn indicator(n: usize, points: &[usize]) -> Self {
        let mut values = vec![Rat::zero(); n];
        for &p in points {
            values[p] = Rat::one();
        }
        Observable { values }
    }

    pub fn norm_inf(&self) -> Rat {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &Observable) -> Observable {
        Observable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Observable) -> Observable {
        Observable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Observable) -> Observable {
        Observable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Observable {
        Observable {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }
}

/// (g f)(x) = f(P x) for a permutation P: composition operators are
/// isometric algebra homomorphisms on the function algebra.
pub fn apply(g: &GroupElement, f: &Observable) -> Result<Observable> {
    match g {
        GroupElement::Perm { images } => {
            if images.len() != f.values.len() {
                return Err(Error::DimensionMismatch("permutation degree".into()));
            }
            Ok(Observable {
                values: images.iter().map(|&x| f.values[x].clone()).collect(),
            })
        }
        _ => Err(Error::Unsupported("actions are permutation words".into())),
    }
}

/// Concrete realization of a system on a finite space: maps[i] is the
/// permutation word implementing g_i (maps[0] the identity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionAssignment {
    pub space: FiniteMPSpace,
    pub maps: Vec<PolyMap>,
}

impl ActionAssignment {
    pub fn new(space: FiniteMPSpace, maps: Vec<PolyMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Precondition("need at least g_0".into()));
        }
        if !maps[0].is_identity_map() {
            return Err(Error::Precondition("g_0 must be the identity map".into()));
        }
        let model = maps[0].model;
        for map in &maps {
            if map.model != model {
                return Err(Error::ModelMismatch("mixed group models".into()));
            }
            match &map.target {
                Target::Perm(w) => {
                    if w.degree != space.size() {
                        return Err(Error::DimensionMismatch(
                            "permutation degree vs space size".into(),
                        ));
                    }
                    for f in &w.factors {
                        for (x, &y) in f.base.iter().enumerate() {
                            if space.weights[x] != space.weights[y] {
                                return Err(Error::Precondition(
                                    "base permutation does not preserve the measure".into(),
                                ));
                            }
                        }
                    }
                }
                Target::Ut(_) => {
                    return Err(Error::Unsupported(
                        "actions must use permutation targets".into(),
                    ))
                }
            }
        }
        Ok(ActionAssignment { space, maps })
    }

    pub fn j(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn model(&self) -> crate::model::GroupModel {
        self.maps[0].model
    }

    pub fn op_at(&self, i: usize, n: &[Int]) -> Result<GroupElement> {
        self.maps[i].evaluate(n, &BTreeMap::new())
    }

    /// lcm of the declared periods of all maps.
    pub fn period(&self) -> u64 {
        use num_integer::Integer;
        self.maps
            .iter()
            .map(|m| match &m.target {
                Target::Perm(w) => w.period,
                Target::Ut(_) => 1,
            })
            .fold(1u64, |acc, p| acc.lcm(&p))
    }

    /// Av_I[f_0,...,f_j] = E_{n in I} prod_i g_i(n) f_i.
    pub fn av(&self, i_set: &FolnerSet, fs: &[Observable]) -> Result<Observable> {
        if fs.len() != self.maps.len() {
            return Err(Error::DimensionMismatch(
                "one observable per system map".into(),
            ));
        }
        let members = i_set.members();
        self.average_over(members.iter().map(|p| folner::to_int_point(p)), fs)
    }

    fn average_over(
        &self,
        points: impl Iterator<Item = Vec<Int>>,
        fs: &[Observable],
    ) -> Result<Observable> {
        let n_points = self.space.size();
        let mut acc = Observable::constant(n_points, Rat::zero());
        let mut count = 0u64;
        for n in points {
            let mut prod = Observable::constant(n_points, Rat::one());
            for (i, f) in fs.iter().enumerate() {
                let g = self.op_at(i, &n)?;
                prod = prod.mul(&apply(&g, f)?);
            }
            acc = acc.add(&prod);
            count += 1;
        }
        if count == 0 {
            return Err(Error::Precondition("empty averaging set".into()));
        }
        Ok(acc.scale(&Rat::new(Int::one(), Int::from(count))))
    }

    pub fn av_diff(
        &self,
        i1: &FolnerSet,
        i2: &FolnerSet,
        fs: &[Observable],
    ) -> Result<Observable> {
        Ok(self.av(i1, fs)?.sub(&self.av(i2, fs)?))
    }

    /// The exact limit of Av_I as ⌊I⌋ → ∞: the average over one full
    /// period box. Errors when the box exceeds `cap` points.
    pub fn limit_oracle(&self, fs: &[Observable], cap: u64) -> Result<Observable> {
        if fs.len() != self.maps.len() {
            return Err(Error::DimensionMismatch(
                "one observable per system map".into(),
            ));
        }
        let period = self.period();
        let arity = self.model().arity() as u32;
        let total = period.checked_pow(arity).filter(|&t| t <= cap).ok_or(
            Error::CapExceeded {
                what: "period box".into(),
                cap,
            },
        )?;
        let _ = total;
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
        self.average_over(points.into_iter(), fs)
    }
}

/// ‖f‖_Σ as an exact LP over the atom coefficients; None encodes +∞
/// (f outside the span of Σ).
pub fn sigma_norm(space: &FiniteMPSpace, f: &Observable, atoms: &[Observable]) -> Result<Option<Rat>> {
    let n_points = space.size();
    if f.values.len() != n_points || atoms.iter().any(|a| a.values.len() != n_points) {
        return Err(Error::DimensionMismatch("observable length".into()));
    }
    if atoms.is_empty() {
        return Ok(if f.is_zero() { Some(Rat::zero()) } else { None });
    }
    // lambda = p - q with p, q >= 0; minimize sum(p) + sum(q)
    let t = atoms.len();
    let mut a = vec![vec![Rat::zero(); 2 * t]; n_points];
    for (k, atom) in atoms.iter().enumerate() {
        for x in 0..n_points {
            a[x][k] = atom.values[x].clone();
            a[x][t + k] = -&atom.values[x];
        }
    }
    let c = vec![Rat::one(); 2 * t];
    match simplex::solve(&a, &f.values, &c)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
    }
}

/// ‖f‖_Σ^* = max over atoms of |<f, σ>|.
pub fn sigma_dual(space: &FiniteMPSpace, f: &Observable, atoms: &[Observable]) -> Rat {
    atoms
        .iter()
        .map(|a| space.inner(f, a).abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// A candidate witness for Definition 8.1: an averaging set J, a left
/// shift a, and functions b_0..b_{j-1} bounded by one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceWitness {
    pub j_set: Vec<Vec<Int>>,
    pub a: Vec<Int>,
    pub bs: Vec<Observable>,
}

/// E_{m in J} prod_{i<j} <g_j|g_i>_{a,m}(l) b_i at a concrete l.
fn reduced_average(
    action: &ActionAssignment,
    w: &ReduceWitness,
    l: &[Int],
) -> Result<Observable> {
    let j = action.j();
    let model = action.model();
    let n_points = action.space.size();
    let mut acc = Observable::constant(n_points, Rat::zero());
    for m in &w.j_set {
        // alm = a * l * m
        let al = model.compose_points(&w.a, l)?;
        let alm = model.compose_points(&al, m)?;
        let gj_l = action.op_at(j, l)?;
        let gj_alm_inv = nilgroup::inv(&action.op_at(j, &alm)?);
        let mut prod = Observable::constant(n_points, Rat::one());
        for i in 0..j {
            // <g_j|g_i>_{a,m}(l) = g_j(l) g_j(alm)^{-1} g_i(alm)
            let op = nilgroup::mul(
                &nilgroup::mul(&gj_l, &gj_alm_inv)?,
                &action.op_at(i, &alm)?,
            )?;
            prod = prod.mul(&apply(&op, &w.bs[i])?);
        }
        acc = acc.add(&prod);
    }
    if w.j_set.is_empty() {
        return Err(Error::Precondition("witness set J is empty".into()));
    }
    Ok(acc.scale(&Rat::new(Int::one(), Int::from(w.j_set.len()))))
}

/// Sampled verdict for uniform (g, γ, N)-reducibility: every probe set
/// must be covered by some witness from the candidate list, checking
/// inequality 8.1 exhaustively over l in the probe.
pub fn is_reducible(
    action: &ActionAssignment,
    sigma: &Observable,
    gamma: &Rat,
    probes: &[FolnerSet],
    witnesses: &[ReduceWitness],
) -> Result<bool> {
    if sigma.norm_inf() > Rat::one() {
        return Err(Error::Precondition("sigma must be bounded by one".into()));
    }
    let j = action.j();
    for w in witnesses {
        if w.bs.len() != j {
            return Err(Error::DimensionMismatch("witness needs j functions".into()));
        }
    }
    for probe in probes {
        let mut covered = false;
        'witness: for w in witnesses {
            for l in probe.members() {
                let l = folner::to_int_point(&l);
                let lhs = apply(&action.op_at(j, &l)?, sigma)?;
                let rhs = reduced_average(action, w, &l)?;
                if &lhs.sub(&rhs).norm_inf() >= gamma {
                    continue 'witness;
                }
            }
            covered = true;
            break;
        }
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum InverseOutcome {
    Witness {
        sigma: Observable,
        witness: ReduceWitness,
        /// <u, sigma> = ‖Av‖₂² / ‖u‖_∞, exact.
        correlation: Rat,
    },
    PremiseFailed(String),
}

/// Theorem 8.2 witness: σ = E_{m in F_N} prod_{i<j} g_j(amb)^{-1} g_i(amb) b_i
/// with b_0 = Av_I[f_0..f_{j-1}, u] f_0 / ‖u‖_∞ and b_i = f_i.
pub fn inverse_witness(
    action: &ActionAssignment,
    i_set: &FolnerSet,
    fs: &[Observable],
    u: &Observable,
    c_bound: &Rat,
    eps: &Rat,
) -> Result<InverseOutcome> {
    let j = action.j();
    if fs.len() != j {
        return Err(Error::DimensionMismatch(
            "need f_0..f_{j-1} for a system of size j".into(),
        ));
    }
    let u_inf = u.norm_inf();
    if u_inf > Rat::from_integer(Int::from(3)) * c_bound {
        return Ok(InverseOutcome::PremiseFailed(format!(
            "‖u‖_∞ = {u_inf} exceeds 3C"
        )));
    }
    if u_inf.is_zero() {
        return Ok(InverseOutcome::PremiseFailed("u = 0".into()));
    }
    for (i, f) in fs.iter().enumerate() {
        if f.norm_inf() > Rat::one() {
            return Ok(InverseOutcome::PremiseFailed(format!(
                "‖f_{i}‖_∞ > 1"
            )));
        }
    }
    let mut all = fs.to_vec();
    all.push(u.clone());
    let avg = action.av(i_set, &all)?;
    let av_sq = action.space.l2_sq(&avg);
    let threshold = eps / Rat::from_integer(Int::from(6));
    if av_sq <= &threshold * &threshold {
        return Ok(InverseOutcome::PremiseFailed(format!(
            "‖Av‖₂² = {av_sq} <= (ε/6)²"
        )));
    }
    let mut bs = Vec::with_capacity(j);
    bs.push(avg.mul(&fs[0]).scale(&(Rat::one() / &u_inf)));
    bs.extend(fs[1..].iter().cloned());

    let model = action.model();
    let a_int = folner::to_int_point(&i_set.a);
    let b_int = folner::to_int_point(&i_set.b);
    let j_set: Vec<Vec<Int>> = folner::canonical_members(&model, i_set.floor())
        .iter()
        .map(|m| {
            let am = model.compose_points(&a_int, &folner::to_int_point(m))?;
            model.compose_points(&am, &b_int)
        })
        .collect::<Result<_>>()?;

    let n_points = action.space.size();
    let mut sigma = Observable::constant(n_points, Rat::zero());
    for amb in &j_set {
        let gj_inv = nilgroup::inv(&action.op_at(j, amb)?);
        let mut prod = Observable::constant(n_points, Rat::one());
        for (i, b) in bs.iter().enumerate() {
            let op = nilgroup::mul(&gj_inv, &action.op_at(i, amb)?)?;
            prod = prod.mul(&apply(&op, b)?);
        }
        sigma = sigma.add(&prod);
    }
    sigma = sigma.scale(&Rat::new(Int::one(), Int::from(j_set.len())));

    let correlation = action.space.inner(u, &sigma);
    // the displayed chain: <u, σ> = ‖Av‖₂² / ‖u‖_∞
    debug_assert_eq!(correlation, &av_sq / &u_inf);
    let witness = ReduceWitness {
        j_set,
        a: a_int,
        bs,
    };
    Ok(InverseOutcome::Witness {
        sigma,
        witness,
        correlation,
    })
}

/// Parameters for the structure-decomposition verifier.
pub struct DecompositionParams<'a> {
    pub delta: Rat,
    pub c_i: Rat,
    pub eta_of_c_i: Rat,
    pub sigma_b_atoms: &'a [Observable],
    pub sigma_m_atoms: &'a [Observable],
}

/// Theorem 7.2 verifier: f = σ + u + v with ‖σ‖_B < C_i,
/// ‖u‖_A^* < η(C_i), ‖v‖₂ < δ.
pub fn verify_decomposition(
    space: &FiniteMPSpace,
    f: &Observable,
    sigma: &Observable,
    u: &Observable,
    v: &Observable,
    params: &DecompositionParams,
) -> Result<bool> {
    if f != &sigma.add(u).add(v) {
        return Ok(false);
    }
    let b_norm = match sigma_norm(space, sigma, params.sigma_b_atoms)? {
        Some(n) => n,
        None => return Ok(false),
    };
    if b_norm >= params.c_i {
        return Ok(false);
    }
    if sigma_dual(space, u, params.sigma_m_atoms) >= params.eta_of_c_i {
        return Ok(false);
    }
    Ok(space.l2_sq(v) < &params.delta * &params.delta)
}

/// Lemma 7.1 verifier: <f, φ> >= 1 and <v, φ> < 1/c_i on every sample.
pub fn separation_verify(
    space: &FiniteMPSpace,
    f: &Observable,
    phi: &Observable,
    v_samples: &[Vec<Observable>],
    cs: &[Rat],
) -> Result<bool> {
    if v_samples.len() != cs.len() {
        return Err(Error::DimensionMismatch("one c_i per sample family".into()));
    }
    if space.inner(f, phi) < Rat::one() {
        return Ok(false);
    }
    for (vs, c) in v_samples.iter().zip(cs) {
        if !c.is_positive() {
            return Err(Error::Precondition("c_i > 0".into()));
        }
        let bound = Rat::one() / c;
        for v in vs {
            if space.inner(v, phi) >= bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanEntry {
    pub m: u64,
    pub pass: bool,
    pub pairs_checked: u64,
    pub max_osc_sq: Rat,
    /// (N, N', shift indices) achieving the maximum oscillation.
    pub worst_pair: Option<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    pub least_passing: Option<u64>,
}

/// Metastability scan: for each M in the window, checks every pair of
/// Følner sets I = a F_N b, I' = a' F_{N'} b' with floors in [M, F(M)],
/// shifts from the declared window, and ⌈I,I'⌉_γ <= F(M).
pub fn metastability_scan(
    action: &ActionAssignment,
    fs: &[Observable],
    eps: &Rat,
    growth: &dyn Fn(u64) -> u64,
    m_window: &[u64],
    gamma: &Rat,
    shifts: &[Vec<i64>],
) -> Result<ScanReport> {
    let model = action.model();
    let id_shift = vec![0i64; model.arity()];
    let mut shift_list: Vec<Vec<i64>> = vec![id_shift];
    shift_list.extend(shifts.iter().cloned());
    let eps_sq = eps * eps;
    let mut entries = Vec::new();
    let mut least_passing = None;
    for &m in m_window {
        let fm = growth(m).max(m);
        let mut candidates: Vec<FolnerSet> = Vec::new();
        for n in m..=fm {
            for a in &shift_list {
                for b in &shift_list {
                    candidates.push(FolnerSet::translated(model, n, a.clone(), b.clone())?);
                }
            }
        }
        let mut pass = true;
        let mut pairs_checked = 0u64;
        let mut max_osc_sq = Rat::zero();
        let mut worst_pair = None;
        for (idx, i1) in candidates.iter().enumerate() {
            for i2 in &candidates[idx..] {
                match folner::ceil(i1, i2, gamma, fm) {
                    Ok(r) if r.n0 <= fm => {}
                    _ => continue, // pair does not qualify
                }
                pairs_checked += 1;
                let osc_sq = action.space.l2_sq(&action.av_diff(i1, i2, fs)?);
                if osc_sq > max_osc_sq {
                    max_osc_sq = osc_sq.clone();
                    worst_pair = Some((i1.floor(), i2.floor()));
                }
                if osc_sq >= eps_sq {
                    pass = false;
                }
            }
        }
        if pass && least_passing.is_none() {
            least_passing = Some(m);
        }
        entries.push(ScanEntry {
            m,
            pass,
            pairs_checked,
            max_osc_sq,
            worst_pair,
        });
    }
    Ok(ScanReport {
        entries,
        least_passing,
    })
}
