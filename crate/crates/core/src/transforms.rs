//! Global rank-one twists, the formal Fourier transform (kernel `e^{-tτ}`)
//! assembled from local stationary-phase legs, middle convolution through
//! the Fourier route, and the matrix-level middle convolution used as an
//! independent oracle in the tame case.
//!
//! Exponents at `∞` refer to the coordinate `w = 1/t`, so the Kummer
//! sheaf `t^a` has exponent `a` at `0` and `−a` at `∞`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cyclo::{lcm, CycloNum};
use crate::error::{Error, Result};
use crate::formal::{is_quasi_unipotent, reduce_mod, ExpFactor, FormalType, Location, Problem, RegularPart};
use crate::linalg::{span_basis, Matrix};
use crate::puiseux::PolarPart;
use crate::radical::RadicalCoeff;
use crate::rigidity::rig_index;
use crate::series::PowerSeries;
use crate::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn one() -> Rational {
    Rational::one()
}

/// Rank-one formal data `(ψ_x, b_x)` at some points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RankOneData {
    pub points: BTreeMap<Location, (PolarPart, Rational)>,
}

impl RankOneData {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, loc: Location, psi: PolarPart, b: Rational) -> Self {
        self.points.insert(loc, (psi, b));
        self
    }

    pub fn inverse(&self) -> RankOneData {
        RankOneData { points: self.points.iter().map(|(l, (psi, b))| (l.clone(), (psi.neg(), -b))).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.points.values().all(|(psi, b)| psi.is_zero() && b.is_integer())
    }
}

/// Tensor with rank-one data, pointwise.
pub fn twist_global(p: &Problem, l: &RankOneData) -> Result<Problem> {
    let mut out = p.clone();
    for (loc, (psi, b)) in &l.points {
        let t = out.points.get_mut(loc).ok_or_else(|| Error::UnknownLocation(loc.to_string()))?;
        *t = t.twist(psi, b)?;
    }
    let order = lcm(p.order as u64, out.exponent_order() as u64) as u32;
    Problem::new(order, out.points)
}

/// A local stationary-phase leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leg {
    /// A factor at the finite point `x`, landing at `τ = ∞`.
    FiniteToInf(CycloNum),
    /// A factor of slope `> 1` at `∞`, landing at `τ = ∞`.
    InfToInf,
    /// A factor of slope `≤ 1` at `∞`, landing at `τ = c` for its linear
    /// head `c t`.
    InfToFinite,
}

/// Result of one leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegOutput {
    pub location: Location,
    pub factor: ExpFactor,
}

fn slope_error(phi: &PolarPart) -> Error {
    Error::SlopeLegMismatch { slope: phi.slope().to_string() }
}

/// Polar part of a stationary-phase leg: coefficients of `v^{-e}` where
/// `v` is the `m`-th root local coordinate at the target. See the module
/// tests for the hand-computed cases.
///
/// With `φ = Σ a_j u^{-j}` (`u^p` the source coordinate, top index `q`):
/// `g = Σ_{j<q} (j a_j)/(q a_q) u^{q−j}`, `h = u (1+g)^{σ/m}`, `U = h^{-1}`,
/// `R = U(w)/w`; then `[v^{-e}] = κ^{-e} Σ_j b_j [R^{-j}]_{j−e}` with
/// `κ = K^{-1/m}`.
fn stationary_phase(
    phi: &PolarPart,
    m: u32,
    k_const: &RadicalCoeff,
    sigma: i64,
    b: impl Fn(u32) -> Rational,
    extra: usize,
) -> Result<BTreeMap<u32, RadicalCoeff>> {
    let q_top = phi.pole_order();
    let terms = phi.terms();
    let aq = terms.get(&q_top).expect("top term");
    let inv_qaq =
        aq.scale_cyclo(&CycloNum::from_int(q_top as i64)).inv().map_err(|_| Error::NonInvertibleLeadingTerm(aq.to_string()))?;
    let n = q_top as usize + 1 + extra;
    let mut g = vec![RadicalCoeff::zero(); n];
    g[0] = RadicalCoeff::one();
    for (j, a) in terms {
        if *j < q_top {
            g[(q_top - j) as usize] = a.scale_cyclo(&CycloNum::from_int(*j as i64)) * &inv_qaq;
        }
    }
    let one_plus_g = PowerSeries::new(g, n);
    let h = one_plus_g.pow_rational(&q(sigma, m as i64))?.shift_up(1).truncate(n);
    let big_u = h.reversion()?;
    let r = big_u.shift_down(1).expect("reversion vanishes at 0");
    let kappa_inv = k_const.pow(&q(1, m as i64))?;
    let mut out: BTreeMap<u32, RadicalCoeff> = BTreeMap::new();
    for (j, a) in terms {
        let bj = a.scale_cyclo(&CycloNum::from_rational(b(*j)));
        if bj.is_zero() {
            continue;
        }
        let rj = r.pow_rational(&Rational::from_integer((-(*j as i64)).into()))?;
        for e in 1..=*j {
            let c = rj.coeff((j - e) as usize);
            if c.is_zero() {
                continue;
            }
            let entry = out.entry(e).or_insert_with(RadicalCoeff::zero);
            *entry = &*entry + &(&bj * &c);
        }
    }
    let mut result = BTreeMap::new();
    for (e, c) in out {
        if c.is_zero() {
            continue;
        }
        result.insert(e, &c * &kappa_inv.pow(&Rational::from_integer((e as i64).into()))?);
    }
    Ok(result)
}

/// The same computation at a larger working precision must agree.
fn audited(
    phi: &PolarPart,
    m: u32,
    k_const: &RadicalCoeff,
    sigma: i64,
    b: impl Fn(u32) -> Rational + Copy,
) -> Result<BTreeMap<u32, RadicalCoeff>> {
    let first = stationary_phase(phi, m, k_const, sigma, b, 0)?;
    let doubled = stationary_phase(phi, m, k_const, sigma, b, phi.pole_order() as usize + 1)?;
    if first != doubled {
        return Err(Error::TruncationAudit);
    }
    Ok(first)
}

/// Exponent rule for ramified legs: `α' = (pα + q/2)/m`.
fn leg_blocks(reg: &RegularPart, p: u32, q_top: u32, m: u32) -> Vec<(Rational, u32)> {
    reg.blocks()
        .iter()
        .map(|(a, k)| {
            let beta = a * Rational::from_integer(p.into()) + q(q_top as i64, 2);
            (beta / Rational::from_integer(m.into()), *k)
        })
        .collect()
}

fn nonzero_blocks(blocks: impl Iterator<Item = (Rational, u32)>) -> Vec<(Rational, u32)> {
    blocks.filter(|(_, k)| *k > 0).collect()
}

/// One stationary-phase leg applied to a factor.
pub fn local_fourier(leg: &Leg, f: &ExpFactor) -> Result<LegOutput> {
    let phi = &f.phi;
    let p = phi.ram();
    let q_top = phi.pole_order();
    let pq = Rational::from_integer(p.into());
    match leg {
        Leg::FiniteToInf(x) => {
            let head = PolarPart::monomial(RadicalCoeff::from(-x), 1, 1);
            if phi.is_zero() {
                // vanishing cycles: drop one from each eigenvalue-1 block
                let blocks =
                    nonzero_blocks(f.reg.blocks().iter().map(|(a, k)| (a.clone(), if a.is_zero() { k - 1 } else { *k })));
                return Ok(LegOutput { location: Location::Infinity, factor: ExpFactor::new(head, blocks) });
            }
            let m = p + q_top;
            let aq = phi.leading_coeff().expect("nonzero");
            let k_const = aq
                .scale_cyclo(&CycloNum::from_int(q_top as i64))
                .inv()
                .map_err(|_| Error::NonInvertibleLeadingTerm(aq.to_string()))?
                .scale_cyclo(&CycloNum::from_int(-(p as i64)));
            let terms = audited(phi, m, &k_const, -1, |j| one() + Rational::from_integer(j.into()) / &pq)?;
            let out_phi = PolarPart::new(m, terms).add(&head.ramify(1));
            let blocks = leg_blocks(&f.reg, p, q_top, m);
            Ok(LegOutput { location: Location::Infinity, factor: ExpFactor::new(out_phi, blocks) })
        }
        Leg::InfToInf => {
            if q_top <= p {
                return Err(slope_error(phi));
            }
            let m = q_top - p;
            let aq = phi.leading_coeff().expect("nonzero");
            let k_const = aq
                .scale_cyclo(&CycloNum::from_int(q_top as i64))
                .inv()
                .map_err(|_| Error::NonInvertibleLeadingTerm(aq.to_string()))?
                .scale_cyclo(&CycloNum::from_int(p as i64));
            let terms = audited(phi, m, &k_const, -1, |j| one() - Rational::from_integer(j.into()) / &pq)?;
            let blocks = leg_blocks(&f.reg, p, q_top, m);
            Ok(LegOutput { location: Location::Infinity, factor: ExpFactor::new(PolarPart::new(m, terms), blocks) })
        }
        Leg::InfToFinite => {
            if q_top > p {
                return Err(slope_error(phi));
            }
            // split off the linear head c·w^{-1}
            let c = phi.terms().get(&p).cloned().unwrap_or_else(RadicalCoeff::zero);
            let location = match c.as_cyclo() {
                Some(cc) => Location::Finite(cc),
                None => return Err(Error::NonCyclotomicLocation(c.to_string())),
            };
            let rest = phi.sub(&PolarPart::monomial(c, 1, 1));
            if rest.is_zero() {
                let blocks = f.reg.blocks().iter().map(|(a, k)| (a.clone(), if a.is_zero() { k + 1 } else { *k })).collect();
                return Ok(LegOutput { location, factor: ExpFactor::regular(blocks) });
            }
            let p0 = rest.ram();
            let q0 = rest.pole_order();
            let p0q = Rational::from_integer(p0.into());
            let m = p0 - q0;
            let aq = rest.leading_coeff().expect("nonzero");
            let k_const = aq.scale_cyclo(&CycloNum::from_rational(q(q0 as i64, p0 as i64)));
            let terms = audited(&rest, m, &k_const, 1, |j| one() - Rational::from_integer(j.into()) / &p0q)?;
            let blocks = leg_blocks(&f.reg, p0, q0, m);
            Ok(LegOutput { location, factor: ExpFactor::new(PolarPart::new(m, terms), blocks) })
        }
    }
}

/// Which leg a factor at `loc` takes.
pub fn leg_for(loc: &Location, f: &ExpFactor) -> Leg {
    match loc {
        Location::Finite(x) => Leg::FiniteToInf(x.clone()),
        Location::Infinity => {
            if f.phi.pole_order() > f.phi.ram() {
                Leg::InfToInf
            } else {
                Leg::InfToFinite
            }
        }
    }
}

/// The formal Fourier transform with kernel `e^{-tτ}`.
pub fn fourier_global(p: &Problem) -> Result<Problem> {
    if p.infinity().is_none() {
        return Err(Error::NotLocalizedAtInfinity);
    }
    let mut at_inf: Vec<ExpFactor> = Vec::new();
    let mut finite: BTreeMap<Location, Vec<ExpFactor>> = BTreeMap::new();
    for (loc, t) in &p.points {
        for f in t.factors() {
            let out = local_fourier(&leg_for(loc, f), f)?;
            if out.location.is_infinity() {
                at_inf.push(out.factor);
            } else {
                finite.entry(out.location).or_default().push(out.factor);
            }
        }
    }
    let inf_type = FormalType::new(at_inf);
    let r = inf_type.rank();
    if r == 0 {
        return Err(Error::RankZeroOutput);
    }
    let mut points = BTreeMap::new();
    points.insert(Location::Infinity, inf_type);
    for (loc, factors) in finite {
        let t = FormalType::new(factors);
        if t.rank() > r {
            return Err(Error::PunctualMismatch { location: loc.to_string(), needed: t.rank() as usize, available: r as usize });
        }
        let t = t.padded(r)?;
        if !t.is_apparent() {
            points.insert(loc, t);
        }
    }
    let mut out = Problem { order: p.order, points };
    out.order = lcm(p.order as u64, out.exponent_order() as u64) as u32;
    Ok(out)
}

/// Pullback along `t ↦ −t`.
pub fn negate(p: &Problem) -> Result<Problem> {
    let mut points = BTreeMap::new();
    for (loc, t) in &p.points {
        let new_loc = match loc {
            Location::Finite(x) => Location::Finite(-x),
            Location::Infinity => Location::Infinity,
        };
        let factors = t
            .factors()
            .iter()
            .map(|f| {
                let pr = f.phi.ram();
                let terms = f.phi.terms().iter().map(|(j, a)| (*j, a * &RadicalCoeff::zeta(2 * pr, -(*j as i64)))).collect();
                ExpFactor::new(PolarPart::new(pr, terms), f.reg.blocks().to_vec())
            })
            .collect();
        points.insert(new_loc, FormalType::new(factors));
    }
    Problem::new(p.order, points)
}

/// Inverse of [`fourier_global`]: `F^{-1} = negate ∘ F`.
pub fn inverse_fourier(p: &Problem) -> Result<Problem> {
    negate(&fourier_global(p)?)
}

/// Number of Jordan blocks with exponent `α` in the regular part.
pub fn z_count(t: &FormalType, alpha: &Rational) -> u32 {
    t.regular_part().map(|r| r.sizes_at(alpha).len() as u32).unwrap_or(0)
}

/// Rank of `MC_χ(P)`, `χ = e^{2πic}`: `Σ_{x finite}(Irr_x + r − z_x(1))
/// + (Irr_∞ + r − z_∞(χ)) − r`.
pub fn predicted_mc_rank(p: &Problem, c: &Rational) -> i64 {
    let r = p.rank() as i64;
    let zero = Rational::zero();
    let mut total = -r;
    for (loc, t) in &p.points {
        let z = if loc.is_infinity() { z_count(t, c) } else { z_count(t, &zero) };
        total += t.irregularity() as i64 + r - z as i64;
    }
    if p.infinity().is_none() {
        // an absent ∞ is trivial: Irr = 0 and z_∞(χ) = 0 for χ ≠ 1
        total += r;
    }
    total
}

fn finite_irregular_values(p: &Problem) -> BTreeMap<Location, Vec<PolarPart>> {
    p.points
        .iter()
        .filter(|(l, _)| !l.is_infinity())
        .map(|(l, t)| (l.clone(), t.factors().iter().filter(|f| !f.phi.is_zero()).map(|f| f.phi.clone()).collect()))
        .filter(|(_, v): &(Location, Vec<PolarPart>)| !v.is_empty())
        .collect()
}

/// Middle convolution with `χ = e^{2πic}`: Fourier, Kummer twist by
/// `τ^{-c}` at `0` and `∞` of the dual line, inverse Fourier.
pub fn middle_convolution(p: &Problem, c: &Rational) -> Result<Problem> {
    let c = reduce_mod(c, &one());
    if c.is_zero() {
        return Err(Error::TrivialChi);
    }
    let p = if p.infinity().is_none() { p.with_apparent(Location::Infinity) } else { p.clone() };
    if !p.infinity().expect("present").is_regular() {
        return Err(Error::NotScalarAtInfinity);
    }
    let predicted = predicted_mc_rank(&p, &c);
    let f = fourier_global(&p)?;
    let f = f.with_apparent(Location::int(0));
    let kummer = RankOneData::new().with(Location::int(0), PolarPart::zero(), -c.clone()).with(
        Location::Infinity,
        PolarPart::zero(),
        c.clone(),
    );
    let twisted = twist_global(&f, &kummer)?;
    let out = inverse_fourier(&twisted)?;
    let order = lcm(p.order as u64, c.denom().try_into().unwrap_or(1u64)) as u32;
    let out = Problem { order: lcm(order as u64, out.exponent_order() as u64) as u32, points: out.points };
    check_mc_invariants(&p, &out, predicted, order)?;
    Ok(out)
}

fn check_mc_invariants(input: &Problem, out: &Problem, predicted: i64, order: u32) -> Result<()> {
    if out.rank() as i64 != predicted {
        return Err(Error::InvariantViolation(format!(
            "middle convolution has rank {} but {} was predicted",
            out.rank(),
            predicted
        )));
    }
    let (a, b) = (rig_index(input), rig_index(out));
    if a != b {
        return Err(Error::InvariantViolation(format!("rigidity index changed from {} to {}", a, b)));
    }
    if finite_irregular_values(input) != finite_irregular_values(out) {
        return Err(Error::InvariantViolation("irregular values at finite points changed".into()));
    }
    let probe = Problem { order, points: out.points.clone() };
    if is_quasi_unipotent(&Problem { order, points: input.points.clone() }) && !is_quasi_unipotent(&probe) {
        return Err(Error::InvariantViolation(format!("exponents left (1/{})Z", order)));
    }
    Ok(())
}

pub type CycloMatrix = Matrix<CycloNum>;

/// Local monodromies `A_1 … A_n` at finite points; the monodromy at `∞`
/// is `(A_n ⋯ A_1)^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    pub mats: Vec<CycloMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CycloMatrix>) -> Self {
        MatrixTuple { mats }
    }

    pub fn rank(&self) -> usize {
        self.mats.first().map(|m| m.rows()).unwrap_or(0)
    }

    pub fn infinity(&self) -> Result<CycloMatrix> {
        let r = self.rank();
        let prod = self.mats.iter().fold(CycloMatrix::identity(r), |acc, a| a.mul(&acc));
        prod.inverse().ok_or(Error::DivisionByZero)
    }

    /// Formal data with `A_i` at `locations[i]` and `∞`; all eigenvalues
    /// must lie in `μ_m`.
    pub fn formal_data(&self, locations: &[Location], m: u32) -> Result<Problem> {
        let mut points = Vec::new();
        for (a, loc) in self.mats.iter().zip(locations) {
            points.push((loc.clone(), FormalType::regular(jordan_type(a, m)?)));
        }
        points.push((Location::Infinity, FormalType::regular(jordan_type(&self.infinity()?, m)?)));
        Problem::from_points(m, points)
    }
}

/// Jordan blocks `(k/m, size)` of a matrix with eigenvalues in `μ_m`.
pub fn jordan_type(a: &CycloMatrix, m: u32) -> Result<Vec<(Rational, u32)>> {
    let mut blocks = Vec::new();
    for k in 0..m {
        let lambda = CycloNum::zeta(m, k as i64);
        for s in a.jordan_blocks(&lambda) {
            blocks.push((q(k as i64, m as i64), s as u32));
        }
    }
    let total: u32 = blocks.iter().map(|(_, s)| s).sum();
    if total as usize != a.rows() {
        return Err(Error::InvariantViolation(format!("eigenvalues outside μ_{}", m)));
    }
    Ok(blocks)
}

/// Middle convolution of a matrix tuple in the additive-free form of
/// Dettweiler–Reiter.
pub fn dr_mc_oracle(t: &MatrixTuple, lambda: &CycloNum) -> Result<MatrixTuple> {
    if lambda.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = t.mats.len();
    let r = t.rank();
    let dim = n * r;
    let id = CycloMatrix::identity(r);
    let mut bs = Vec::with_capacity(n);
    for k in 0..n {
        let b = CycloMatrix::from_fn(dim, dim, |row, col| {
            let (bi, i) = (row / r, row % r);
            let (bj, j) = (col / r, col % r);
            let delta = if row == col { CycloNum::one() } else { CycloNum::zero() };
            if bi != k {
                return delta;
            }
            let aj = &t.mats[bj];
            let entry = if bj < k {
                &aj[(i, j)] - &id[(i, j)]
            } else if bj == k {
                &(lambda * &aj[(i, j)]) - &id[(i, j)]
            } else {
                lambda * &(&aj[(i, j)] - &id[(i, j)])
            };
            &delta + &entry
        });
        bs.push(b);
    }
    // K = ⊕ ker(A_j − 1) in slot j; L = ∩ ker(B_k − 1)
    let mut k_vecs = Vec::new();
    for (j, a) in t.mats.iter().enumerate() {
        for v in a.shift(&CycloNum::one()).kernel() {
            let mut w = vec![CycloNum::zero(); dim];
            for (i, x) in v.into_iter().enumerate() {
                w[j * r + i] = x;
            }
            k_vecs.push(w);
        }
    }
    let stacked = CycloMatrix::from_fn(n * dim, dim, |row, col| {
        let b = &bs[row / dim];
        let i = row % dim;
        let d = if i == col { CycloNum::one() } else { CycloNum::zero() };
        &b[(i, col)] - &d
    });
    let l_vecs = stacked.kernel();
    let mut sub = k_vecs;
    sub.extend(l_vecs);
    let basis = span_basis(dim, &sub);
    let s = basis.len();
    if s == dim {
        return Err(Error::DegenerateQuotient);
    }
    // complete to a basis of W with standard vectors
    let mut full = basis.clone();
    for i in 0..dim {
        let mut e = vec![CycloNum::zero(); dim];
        e[i] = CycloNum::one();
        let mut cand = full.clone();
        cand.push(e);
        if CycloMatrix::from_columns(dim, &cand).rank() == cand.len() {
            full = cand;
        }
    }
    let smat = CycloMatrix::from_columns(dim, &full);
    let sinv = smat.inverse().ok_or(Error::DivisionByZero)?;
    let qd = dim - s;
    let mats = bs
        .iter()
        .map(|b| {
            let conj = sinv.mul(b).mul(&smat);
            CycloMatrix::from_fn(qd, qd, |i, j| conj[(s + i, s + j)].clone())
        })
        .collect();
    Ok(MatrixTuple { mats })
}
