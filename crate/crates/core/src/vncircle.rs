//! Constructive quantitative von Neumann theorem for multiplicators on
//! the circle: regions A/B/E, the rapidly growing M-sequence, pigeonhole
//! decomposition, and metastability verification.
//!
//! Measures are atomic; points are stored as exact rational angles in
//! turns, so powers of atoms are computed by exact angle arithmetic and
//! only the final exponential map runs in 256-bit floats.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::growth::GrowthExpr;
use crate::poly::{Int, Rat};

pub const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

fn parse_bf(s: &str) -> BigFloat {
    // Consts is an empty on-demand cache; creating one here is cheap.
    let mut cc = Consts::new().expect("constants cache");
    BigFloat::parse(s, astro_float::Radix::Dec, PREC, RM, &mut cc)
}

/// Comparison margin, far below every ε/6 threshold in use.
pub fn margin() -> BigFloat {
    parse_bf("1e-30")
}

pub fn rat_to_bf(r: &Rat) -> BigFloat {
    let n = parse_bf(&r.numer().to_string());
    let d = parse_bf(&r.denom().to_string());
    n.div(&d, PREC, RM)
}

pub fn int_to_bf(i: &Int) -> BigFloat {
    parse_bf(&i.to_string())
}

/// Complex number in 256-bit floats.
#[derive(Clone, Debug)]
pub struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn zero() -> Cx {
        Cx {
            re: BigFloat::from_i8(0, PREC),
            im: BigFloat::from_i8(0, PREC),
        }
    }

    pub fn one() -> Cx {
        Cx {
            re: BigFloat::from_i8(1, PREC),
            im: BigFloat::from_i8(0, PREC),
        }
    }

    pub fn real(r: &Rat) -> Cx {
        Cx {
            re: rat_to_bf(r),
            im: BigFloat::from_i8(0, PREC),
        }
    }

    pub fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.add(&o.re, PREC, RM),
            im: self.im.add(&o.im, PREC, RM),
        }
    }

    pub fn sub(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.sub(&o.re, PREC, RM),
            im: self.im.sub(&o.im, PREC, RM),
        }
    }

    pub fn mul(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.mul(&o.re, PREC, RM).sub(&self.im.mul(&o.im, PREC, RM), PREC, RM),
            im: self.re.mul(&o.im, PREC, RM).add(&self.im.mul(&o.re, PREC, RM), PREC, RM),
        }
    }

    pub fn div(&self, o: &Cx) -> Cx {
        let den = o.abs_sq();
        let conj = Cx {
            re: o.re.clone(),
            im: o.im.neg(),
        };
        let num = self.mul(&conj);
        Cx {
            re: num.re.div(&den, PREC, RM),
            im: num.im.div(&den, PREC, RM),
        }
    }

    pub fn scale(&self, s: &BigFloat) -> Cx {
        Cx {
            re: self.re.mul(s, PREC, RM),
            im: self.im.mul(s, PREC, RM),
        }
    }

    pub fn abs_sq(&self) -> BigFloat {
        self.re
            .mul(&self.re, PREC, RM)
            .add(&self.im.mul(&self.im, PREC, RM), PREC, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.abs_sq().sqrt(PREC, RM)
    }
}

/// exp(2πi θ) for θ in turns.
pub fn unit_point(theta: &Rat, cc: &mut Consts) -> Cx {
    let two_pi = cc.pi(PREC, RM).mul(&BigFloat::from_i8(2, PREC), PREC, RM);
    let arg = rat_to_bf(theta).mul(&two_pi, PREC, RM);
    Cx {
        re: arg.cos(PREC, RM, cc),
        im: arg.sin(PREC, RM, cc),
    }
}

fn frac_part(r: &Rat) -> Rat {
    let f = r - r.floor();
    debug_assert!(!f.is_negative() && f < Rat::from_integer(Int::from(1)));
    f
}

/// Atomic Borel measure on the circle: points exp(2πi θ_k), θ_k rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicMeasure {
    /// angles in turns, normalized into [0, 1)
    pub angles: Vec<Rat>,
    pub weights: Vec<Rat>,
}

impl AtomicMeasure {
    pub fn new(angles: Vec<Rat>, weights: Vec<Rat>) -> Result<Self> {
        if angles.len() != weights.len() || angles.is_empty() {
            return Err(Error::DimensionMismatch("angles vs weights".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Precondition("weights must be positive".into()));
        }
        let total: Rat = weights.iter().sum();
        if total != Rat::from_integer(Int::from(1)) {
            return Err(Error::Precondition("weights must sum to 1".into()));
        }
        Ok(AtomicMeasure {
            angles: angles.iter().map(frac_part).collect(),
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// true when λ_k = 1 exactly.
    pub fn is_one(&self, k: usize) -> bool {
        self.angles[k].is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct CircleObservable {
    pub values: Vec<Cx>,
}

impl CircleObservable {
    pub fn constant_real(n: usize, r: &Rat) -> Self {
        CircleObservable {
            values: vec![Cx::real(r); n],
        }
    }

    pub fn indicator(n: usize, atoms: &[usize]) -> Self {
        let mut values = vec![Cx::zero(); n];
        for &k in atoms {
            values[k] = Cx::one();
        }
        CircleObservable { values }
    }

    pub fn sub(&self, o: &CircleObservable) -> CircleObservable {
        CircleObservable {
            values: self
                .values
                .iter()
                .zip(&o.values)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn add(&self, o: &CircleObservable) -> CircleObservable {
        CircleObservable {
            values: self
                .values
                .iter()
                .zip(&o.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> BigFloat {
        let mut best = BigFloat::from_i8(0, PREC);
        for v in &self.values {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
        best
    }
}

/// ‖f‖₂² = Σ w_k |f(λ_k)|².
pub fn norm2_sq(mu: &AtomicMeasure, f: &CircleObservable) -> BigFloat {
    let mut acc = BigFloat::from_i8(0, PREC);
    for (w, v) in mu.weights.iter().zip(&f.values) {
        acc = acc.add(&rat_to_bf(w).mul(&v.abs_sq(), PREC, RM), PREC, RM);
    }
    acc
}

pub fn norm2(mu: &AtomicMeasure, f: &CircleObservable) -> BigFloat {
    norm2_sq(mu, f).sqrt(PREC, RM)
}

/// (1/N) Σ_{n=1}^{N} λ^n at the atom with angle θ, closed form.
fn geometric_avg(theta: &Rat, n: &Int, cc: &mut Consts) -> Cx {
    if theta.is_zero() {
        return Cx::one();
    }
    let lambda = unit_point(theta, cc);
    // λ^N by exact angle arithmetic: angle Nθ mod 1
    let pow_angle = frac_part(&(theta * Rat::from_integer(n.clone())));
    let lambda_n = unit_point(&pow_angle, cc);
    // λ (λ^N - 1) / (N (λ - 1))
    let num = lambda.mul(&lambda_n.sub(&Cx::one()));
    let den = Cx {
        re: lambda.re.sub(&BigFloat::from_i8(1, PREC), PREC, RM),
        im: lambda.im.clone(),
    };
    num.div(&den).scale(&BigFloat::from_i8(1, PREC).div(&int_to_bf(n), PREC, RM))
}

/// a_N = (1/N) Σ_{n=1}^{N} U^n f by the geometric closed form.
pub fn ergodic_avg(
    f: &CircleObservable,
    mu: &AtomicMeasure,
    n: &Int,
    cc: &mut Consts,
) -> Result<CircleObservable> {
    if !n.is_positive() {
        return Err(Error::Precondition("N >= 1".into()));
    }
    if f.values.len() != mu.len() {
        return Err(Error::DimensionMismatch("observable vs measure".into()));
    }
    Ok(CircleObservable {
        values: mu
            .angles
            .iter()
            .zip(&f.values)
            .map(|(theta, v)| v.mul(&geometric_avg(theta, n, cc)))
            .collect(),
    })
}

/// Direct-summation oracle for `ergodic_avg`.
pub fn ergodic_avg_direct(
    f: &CircleObservable,
    mu: &AtomicMeasure,
    n: u64,
    cc: &mut Consts,
) -> Result<CircleObservable> {
    if n == 0 {
        return Err(Error::Precondition("N >= 1".into()));
    }
    if f.values.len() != mu.len() {
        return Err(Error::DimensionMismatch("observable vs measure".into()));
    }
    let inv_n = BigFloat::from_i8(1, PREC).div(&BigFloat::from_u64(n, PREC), PREC, RM);
    Ok(CircleObservable {
        values: mu
            .angles
            .iter()
            .zip(&f.values)
            .map(|(theta, v)| {
                let lambda = unit_point(theta, cc);
                let mut pow = Cx::one();
                let mut acc = Cx::zero();
                for _ in 0..n {
                    pow = pow.mul(&lambda);
                    acc = acc.add(&pow);
                }
                v.mul(&acc.scale(&inv_n))
            })
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    A,
    B,
    E,
}

/// |1 - λ|² = 2 - 2 cos(2πθ), the chordal distance squared to 1.
pub fn chord_sq(theta: &Rat, cc: &mut Consts) -> BigFloat {
    let lambda = unit_point(theta, cc);
    let two = BigFloat::from_i8(2, PREC);
    two.sub(&two.mul(&lambda.re, PREC, RM), PREC, RM)
}

/// Region radii: A is the disc of radius ε/(6 F(M)) around 1, B the
/// complement of the disc of radius 12/(ε M).
pub fn region_radii(eps: &Rat, f_of_m: &Int, m: &Int) -> Result<(Rat, Rat)> {
    if !eps.is_positive() || !m.is_positive() || !f_of_m.is_positive() {
        return Err(Error::Precondition("eps > 0, M >= 1, F(M) >= 1".into()));
    }
    let r_a = eps / Rat::from_integer(Int::from(6) * f_of_m);
    let r_b = Rat::from_integer(Int::from(12)) / (eps * Rat::from_integer(m.clone()));
    Ok((r_a, r_b))
}

/// Region from a precomputed chordal distance squared and squared radii.
pub fn classify_sq(d_sq: &BigFloat, r_a_sq: &BigFloat, r_b_sq: &BigFloat) -> Region {
    if d_sq <= r_a_sq {
        return Region::A;
    }
    if d_sq >= r_b_sq {
        return Region::B;
    }
    Region::E
}

/// Classifies an atom; precedence A, then B, so the three regions
/// partition the circle even for degenerate radii.
pub fn classify(theta: &Rat, eps: &Rat, f_of_m: &Int, m: &Int, cc: &mut Consts) -> Result<Region> {
    let (r_a, r_b) = region_radii(eps, f_of_m, m)?;
    let d_sq = chord_sq(theta, cc);
    Ok(classify_sq(
        &d_sq,
        &rat_to_bf(&(&r_a * &r_a)),
        &rat_to_bf(&(&r_b * &r_b)),
    ))
}

/// All a_N for N in [from, from+count], sharing work: per atom one
/// exact-angle power then incremental partial sums.
pub fn ergodic_window(
    f: &CircleObservable,
    mu: &AtomicMeasure,
    from: &Int,
    count: u64,
    cc: &mut Consts,
) -> Result<Vec<CircleObservable>> {
    if !from.is_positive() {
        return Err(Error::Precondition("N >= 1".into()));
    }
    let n_atoms = mu.len();
    let mut out =
        vec![
            CircleObservable {
                values: vec![Cx::zero(); n_atoms]
            };
            count as usize + 1
        ];
    for (k, theta) in mu.angles.iter().enumerate() {
        let lambda = unit_point(theta, cc);
        // S_from = sum_{n=1}^{from} λ^n, then extend incrementally
        let mut pow = unit_point(&frac_part(&(theta * Rat::from_integer(from.clone()))), cc);
        let mut sum = if theta.is_zero() {
            Cx {
                re: int_to_bf(from),
                im: BigFloat::from_i8(0, PREC),
            }
        } else {
            // λ (λ^from - 1)/(λ - 1)
            let num = lambda.mul(&pow.sub(&Cx::one()));
            let den = Cx {
                re: lambda.re.sub(&BigFloat::from_i8(1, PREC), PREC, RM),
                im: lambda.im.clone(),
            };
            num.div(&den)
        };
        for (d, slot) in out.iter_mut().enumerate() {
            if d > 0 {
                pow = pow.mul(&lambda);
                sum = sum.add(&pow);
            }
            let n_bf = int_to_bf(&(from + Int::from(d)));
            slot.values[k] = f.values[k].mul(&sum.scale(&BigFloat::from_i8(1, PREC).div(
                &n_bf,
                PREC,
                RM,
            )));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct VnSequence {
    /// M₁ ≤ M₂ ≤ … ≤ M_K
    pub ms: Vec<Int>,
    pub k: usize,
}

/// K = ⌊36/ε²⌋ + 1 disjoint regions force min_i ‖f E_{M_i}‖₂ < ε/6.
pub fn pigeonhole_count(eps: &Rat) -> Result<usize> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps > 0".into()));
    }
    let k = (Rat::from_integer(Int::from(36)) / (eps * eps)).floor() + Rat::from_integer(Int::from(1));
    k.to_integer()
        .to_usize()
        .ok_or(Error::CapExceeded {
            what: "pigeonhole count".into(),
            cap: usize::MAX as u64,
        })
}

/// M₁ = M_•, M_{i+1} = ⌊72 F(M_i)/ε²⌋ + 1: the least integer with
/// 12/(ε M_{i+1}) < ε/(6 F(M_i)).
pub fn vn_sequence(eps: &Rat, f: &GrowthExpr, m0: &Int) -> Result<VnSequence> {
    if !m0.is_positive() {
        return Err(Error::Precondition("M_• >= 1".into()));
    }
    let k = pigeonhole_count(eps)?;
    let mut ms = Vec::with_capacity(k);
    let mut m = m0.clone();
    for _ in 0..k {
        ms.push(m.clone());
        let fm = f.eval(&m)?.max(m.clone());
        let next = (Rat::from_integer(Int::from(72) * fm) / (eps * eps)).floor().to_integer()
            + Int::from(1);
        m = next.max(m);
    }
    Ok(VnSequence { ms, k })
}

/// Exact disjointness check: E_{M_{i+1}} lies strictly inside the inner
/// radius of E_{M_i}, i.e. 12/(ε M_{i+1}) < ε/(6 F(M_i)).
pub fn regions_disjoint(eps: &Rat, f: &GrowthExpr, seq: &VnSequence) -> Result<bool> {
    for w in seq.ms.windows(2) {
        let fm = f.eval(&w[0])?.max(w[0].clone());
        let lhs = Rat::from_integer(Int::from(12)) / (eps * Rat::from_integer(w[1].clone()));
        let rhs = eps / Rat::from_integer(Int::from(6) * fm);
        if lhs >= rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// 1-based pigeonholed index
    pub i: usize,
    pub sigma: CircleObservable,
    pub u: CircleObservable,
    pub v: CircleObservable,
    pub seq: VnSequence,
}

/// f = σ + u + v with σ = f·1_A, u = f·1_B, v = f·1_E at the index
/// minimizing ‖f E_{M_i}‖₂; the pigeonhole guarantees ‖v‖₂ < ε/6
/// whenever ‖f‖₂ ≤ 1.
pub fn pigeonhole_decompose(
    f: &CircleObservable,
    mu: &AtomicMeasure,
    eps: &Rat,
    growth: &GrowthExpr,
    m0: &Int,
    cc: &mut Consts,
) -> Result<Decomposition> {
    let seq = vn_sequence(eps, growth, m0)?;
    let mut best: Option<(usize, BigFloat)> = None;
    let regions_at = |i: usize, cc: &mut Consts| -> Result<Vec<Region>> {
        let m = &seq.ms[i];
        let fm = growth.eval(m)?.max(m.clone());
        mu.angles
            .iter()
            .map(|theta| classify(theta, eps, &fm, m, cc))
            .collect()
    };
    for i in 0..seq.k {
        let regions = regions_at(i, cc)?;
        let mut e_sq = BigFloat::from_i8(0, PREC);
        for (k, r) in regions.iter().enumerate() {
            if *r == Region::E {
                e_sq = e_sq.add(
                    &rat_to_bf(&mu.weights[k]).mul(&f.values[k].abs_sq(), PREC, RM),
                    PREC,
                    RM,
                );
            }
        }
        match &best {
            Some((_, b)) if *b <= e_sq => {}
            _ => best = Some((i, e_sq)),
        }
    }
    let (i, _) = best.expect("k >= 1");
    let regions = regions_at(i, cc)?;
    let n = mu.len();
    let mut sigma = CircleObservable {
        values: vec![Cx::zero(); n],
    };
    let mut u = sigma.clone();
    let mut v = sigma.clone();
    for (k, r) in regions.iter().enumerate() {
        let slot = match r {
            Region::A => &mut sigma,
            Region::B => &mut u,
            Region::E => &mut v,
        };
        slot.values[k] = f.values[k].clone();
    }
    Ok(Decomposition {
        i: i + 1,
        sigma,
        u,
        v,
        seq,
    })
}

#[derive(Clone, Debug)]
pub struct MetastabilityReport {
    pub pass: bool,
    /// observed maximum (exhaustive) or rigorous upper bound (envelope)
    pub max_oscillation: BigFloat,
    pub exhaustive: bool,
}

/// Windows small enough to check pair by pair.
const EXHAUSTIVE_WINDOW: u64 = 512;

/// Verifies ‖a_N - a_{N'}‖₂ < ε for all M_i ≤ N, N' ≤ F(M_i).
/// Small windows are checked exhaustively; otherwise a rigorous
/// per-atom envelope is used:
/// |a_N(λ) - a_{N'}(λ)| ≤ |f(λ)| · min(2, 4/(M|1-λ|), 2 F(M)|1-λ|).
pub fn check_metastability(
    f: &CircleObservable,
    mu: &AtomicMeasure,
    eps: &Rat,
    m_i: &Int,
    growth: &GrowthExpr,
    cc: &mut Consts,
) -> Result<MetastabilityReport> {
    let fm = growth.eval(m_i)?.max(m_i.clone());
    let eps_bf = rat_to_bf(eps);
    let window = (&fm - m_i).to_u64();
    if let Some(w) = window.filter(|&w| w <= EXHAUSTIVE_WINDOW) {
        let avgs = ergodic_window(f, mu, m_i, w, cc)?;
        let mut max_osc = BigFloat::from_i8(0, PREC);
        for (x, a) in avgs.iter().enumerate() {
            for b in &avgs[x + 1..] {
                let osc = norm2(mu, &a.sub(b));
                if osc > max_osc {
                    max_osc = osc;
                }
            }
        }
        let pass = max_osc.add(&margin(), PREC, RM) < eps_bf;
        return Ok(MetastabilityReport {
            pass,
            max_oscillation: max_osc,
            exhaustive: true,
        });
    }
    // envelope bound
    let two = BigFloat::from_i8(2, PREC);
    let four = BigFloat::from_i8(4, PREC);
    let m_bf = int_to_bf(m_i);
    let fm_bf = int_to_bf(&fm);
    let mut bound_sq = BigFloat::from_i8(0, PREC);
    for (k, theta) in mu.angles.iter().enumerate() {
        let env = if mu.is_one(k) {
            BigFloat::from_i8(0, PREC)
        } else {
            let d = chord_sq(theta, cc).sqrt(PREC, RM);
            let tail = four.div(&m_bf.mul(&d, PREC, RM), PREC, RM);
            let near = two.mul(&fm_bf, PREC, RM).mul(&d, PREC, RM);
            let mut e = two.clone();
            if tail < e {
                e = tail;
            }
            if near < e {
                e = near;
            }
            e
        };
        let term = rat_to_bf(&mu.weights[k])
            .mul(&f.values[k].abs_sq(), PREC, RM)
            .mul(&env.mul(&env, PREC, RM), PREC, RM);
        bound_sq = bound_sq.add(&term, PREC, RM);
    }
    let bound = bound_sq.sqrt(PREC, RM);
    let pass = bound.add(&margin(), PREC, RM) < eps_bf;
    Ok(MetastabilityReport {
        pass,
        max_oscillation: bound,
        exhaustive: false,
    })
}
