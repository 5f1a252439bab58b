//! Levelt–Turrittin formal types at a puncture and global formal data.
//!
//! A [`FormalType`] is a multiset of factors `El(φ) ⊗ R`, where `φ` is a
//! minimal polar part (stored as its canonical Galois representative) and
//! `R` a regular part given by Jordan blocks `(α, k)`. Since
//! `El(φ) ⊗ R_α ≅ El(φ) ⊗ R_{α+1/p}` when `φ` has ramification `p`, block
//! exponents of such a factor are reduced into `[0, 1/p)`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::cyclo::{lcm, CycloNum};
use crate::error::{Error, Result};
use crate::puiseux::{diff_pole_order, PolarPart};
use crate::Rational;

/// `x mod m` into `[0, m)`.
pub fn reduce_mod(x: &Rational, m: &Rational) -> Rational {
    let k = (x / m).floor();
    x - k * m
}

fn unit_fraction(p: u32) -> Rational {
    Rational::new(1.into(), (p as i64).into())
}

/// Jordan blocks of a regular formal connection.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegularPart {
    blocks: Vec<(Rational, u32)>,
}

impl RegularPart {
    /// Blocks with exponents reduced mod 1 and sorted.
    pub fn new(blocks: Vec<(Rational, u32)>) -> Self {
        Self::with_period(blocks, 1)
    }

    /// Blocks with exponents reduced mod `1/p`.
    pub fn with_period(blocks: Vec<(Rational, u32)>, p: u32) -> Self {
        let m = unit_fraction(p);
        let mut blocks: Vec<(Rational, u32)> =
            blocks.into_iter().filter(|(_, k)| *k > 0).map(|(a, k)| (reduce_mod(&a, &m), k)).collect();
        blocks.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        RegularPart { blocks }
    }

    /// `r` trivial blocks `(0, 1)`.
    pub fn trivial(r: u32) -> Self {
        RegularPart { blocks: vec![(Rational::zero(), 1); r as usize] }
    }

    pub fn blocks(&self) -> &[(Rational, u32)] {
        &self.blocks
    }

    pub fn rank(&self) -> u32 {
        self.blocks.iter().map(|(_, k)| k).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn shifted(&self, b: &Rational, p: u32) -> RegularPart {
        Self::with_period(self.blocks.iter().map(|(a, k)| (a + b, *k)).collect(), p)
    }

    /// Sizes of blocks with exponent `α` (mod 1).
    pub fn sizes_at(&self, alpha: &Rational) -> Vec<u32> {
        let a = reduce_mod(alpha, &Rational::from_integer(1.into()));
        self.blocks.iter().filter(|(e, _)| *e == a).map(|(_, k)| *k).collect()
    }
}

/// One Levelt–Turrittin factor `El(φ) ⊗ R`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpFactor {
    pub phi: PolarPart,
    pub reg: RegularPart,
}

impl ExpFactor {
    /// Canonicalises `φ` and reduces the exponents mod `1/ram(φ)`.
    pub fn new(phi: PolarPart, blocks: Vec<(Rational, u32)>) -> Self {
        let phi = phi.canonical();
        let reg = RegularPart::with_period(blocks, phi.ram());
        ExpFactor { phi, reg }
    }

    pub fn regular(blocks: Vec<(Rational, u32)>) -> Self {
        Self::new(PolarPart::zero(), blocks)
    }

    pub fn ram(&self) -> u32 {
        self.phi.ram()
    }

    pub fn rank(&self) -> u32 {
        self.ram() * self.reg.rank()
    }

    pub fn irregularity(&self) -> u32 {
        self.phi.pole_order() * self.reg.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalType {
    factors: Vec<ExpFactor>,
}

impl FormalType {
    /// Merges factors with equal canonical `φ` and sorts.
    pub fn new(factors: Vec<ExpFactor>) -> Self {
        let mut merged: BTreeMap<PolarPart, Vec<(Rational, u32)>> = BTreeMap::new();
        for f in factors {
            let phi = f.phi.canonical();
            merged.entry(phi).or_default().extend(f.reg.blocks.iter().cloned());
        }
        let factors = merged
            .into_iter()
            .map(|(phi, blocks)| {
                let p = phi.ram();
                ExpFactor { phi, reg: RegularPart::with_period(blocks, p) }
            })
            .filter(|f| !f.reg.is_empty())
            .collect();
        FormalType { factors }
    }

    /// A regular type from `(α, k)` blocks.
    pub fn regular(blocks: Vec<(Rational, u32)>) -> Self {
        Self::new(vec![ExpFactor::regular(blocks)])
    }

    /// `r` copies of the trivial rank-one connection.
    pub fn apparent(r: u32) -> Self {
        Self::new(vec![ExpFactor { phi: PolarPart::zero(), reg: RegularPart::trivial(r) }])
    }

    pub fn factors(&self) -> &[ExpFactor] {
        &self.factors
    }

    pub fn rank(&self) -> u32 {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    pub fn irregularity(&self) -> u32 {
        self.factors.iter().map(|f| f.irregularity()).sum()
    }

    pub fn is_regular(&self) -> bool {
        self.factors.iter().all(|f| f.phi.is_zero())
    }

    /// Trivial data: only `(0, 1)` blocks on the zero polar part.
    pub fn is_apparent(&self) -> bool {
        self.factors.iter().all(|f| f.phi.is_zero() && f.reg.blocks.iter().all(|(a, k)| a.is_zero() && *k == 1))
    }

    pub fn max_ram(&self) -> u32 {
        self.factors.iter().map(|f| f.ram()).max().unwrap_or(1)
    }

    /// The regular (`φ = 0`) part, if any.
    pub fn regular_part(&self) -> Option<&RegularPart> {
        self.factors.iter().find(|f| f.phi.is_zero()).map(|f| &f.reg)
    }

    /// Formal-monodromy exponents `{α + k/p}` with multiplicity.
    pub fn monodromy_exponents(&self) -> Vec<Rational> {
        let one = Rational::from_integer(1.into());
        let mut out = Vec::new();
        for f in &self.factors {
            let p = f.ram();
            for (a, s) in &f.reg.blocks {
                for k in 0..p {
                    let e = reduce_mod(&(a + Rational::new((k as i64).into(), (p as i64).into())), &one);
                    for _ in 0..*s {
                        out.push(e.clone());
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// `φ + ψ` on every factor and exponents shifted by `b`.
    pub fn twist(&self, psi: &PolarPart, b: &Rational) -> Result<FormalType> {
        if psi.ram() != 1 {
            return Err(Error::RamifiedTwist);
        }
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let phi = f.phi.add(psi);
                let blocks = f.reg.blocks.iter().map(|(a, k)| (a + b, *k)).collect();
                ExpFactor::new(phi, blocks)
            })
            .collect();
        Ok(FormalType::new(factors))
    }

    /// The same data with every block of the regular part listed, and
    /// `(0, 1)` blocks added to reach rank `r`.
    pub fn padded(&self, r: u32) -> Result<FormalType> {
        let have = self.rank();
        if have > r {
            return Err(Error::PunctualMismatch { location: String::new(), needed: have as usize, available: r as usize });
        }
        let mut factors = self.factors.clone();
        factors.push(ExpFactor { phi: PolarPart::zero(), reg: RegularPart::trivial(r - have) });
        Ok(FormalType::new(factors))
    }
}

/// Irregularity of `Hom(M, N)`.
pub fn hom_irregularity(m: &FormalType, n: &FormalType) -> u32 {
    let e = m.factors.iter().chain(n.factors.iter()).fold(1u64, |acc, f| lcm(acc, f.ram() as u64)) as u32;
    let mut total: u64 = 0;
    for fi in &m.factors {
        let phis_i: Vec<PolarPart> = (0..fi.ram() as i64).map(|s| fi.phi.galois_act_unchecked(s)).collect();
        for fj in &n.factors {
            let weight = (fi.reg.rank() * fj.reg.rank()) as u64;
            for a in &phis_i {
                for s in 0..fj.ram() as i64 {
                    let b = fj.phi.galois_act_unchecked(s);
                    let level = lcm(a.ram() as u64, b.ram() as u64);
                    total += weight * diff_pole_order(a, &b) as u64 * (e as u64 / level);
                }
            }
        }
    }
    assert!(total % e as u64 == 0, "irregularity of Hom is not integral");
    (total / e as u64) as u32
}

/// Dimension of horizontal sections of `Hom(M, N)`.
pub fn hom_h0(m: &FormalType, n: &FormalType) -> u32 {
    let mut total = 0;
    for fi in &m.factors {
        for fj in &n.factors {
            if fi.phi != fj.phi {
                continue;
            }
            // exponents are already reduced mod 1/p, so congruence is equality
            for (a, k) in &fi.reg.blocks {
                for (b, l) in &fj.reg.blocks {
                    if a == b {
                        total += k.min(l);
                    }
                }
            }
        }
    }
    total
}

/// A point of the projective line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Finite(CycloNum),
    Infinity,
}

impl Location {
    pub fn finite(c: impl Into<CycloNum>) -> Self {
        Location::Finite(c.into())
    }

    pub fn int(n: i64) -> Self {
        Location::Finite(CycloNum::from_int(n))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Location::Infinity)
    }

    pub fn value(&self) -> Option<&CycloNum> {
        match self {
            Location::Finite(c) => Some(c),
            Location::Infinity => None,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Finite(c) => write!(f, "{}", c),
            Location::Infinity => write!(f, "inf"),
        }
    }
}

/// Formal data of a connection on the projective line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Problem {
    pub order: u32,
    pub points: BTreeMap<Location, FormalType>,
}

impl Problem {
    /// Checks: at least one point, a common positive rank.
    pub fn new(order: u32, points: BTreeMap<Location, FormalType>) -> Result<Problem> {
        if order == 0 {
            return Err(Error::InvalidProblem("quasi-unipotency order must be positive".into()));
        }
        let mut ranks = points.values().map(|t| t.rank());
        let Some(r) = ranks.next() else {
            return Err(Error::InvalidProblem("a problem needs at least one point".into()));
        };
        if r == 0 {
            return Err(Error::InvalidProblem("rank must be positive".into()));
        }
        if let Some((loc, t)) = points.iter().find(|(_, t)| t.rank() != r) {
            return Err(Error::InvalidProblem(format!("point {} has rank {} but {} was expected", loc, t.rank(), r)));
        }
        Ok(Problem { order, points })
    }

    pub fn from_points(order: u32, points: Vec<(Location, FormalType)>) -> Result<Problem> {
        let n = points.len();
        let map: BTreeMap<Location, FormalType> = points.into_iter().collect();
        if map.len() != n {
            return Err(Error::InvalidProblem("duplicate location".into()));
        }
        Self::new(order, map)
    }

    pub fn rank(&self) -> u32 {
        self.points.values().next().map(|t| t.rank()).unwrap_or(0)
    }

    pub fn at(&self, loc: &Location) -> Option<&FormalType> {
        self.points.get(loc)
    }

    pub fn infinity(&self) -> Option<&FormalType> {
        self.points.get(&Location::Infinity)
    }

    pub fn finite_points(&self) -> impl Iterator<Item = (&CycloNum, &FormalType)> {
        self.points.iter().filter_map(|(l, t)| l.value().map(|c| (c, t)))
    }

    /// Removes points carrying trivial data.
    pub fn without_apparent(&self) -> Problem {
        let points: BTreeMap<Location, FormalType> =
            self.points.iter().filter(|(_, t)| !t.is_apparent()).map(|(l, t)| (l.clone(), t.clone())).collect();
        if points.is_empty() {
            // keep one point so the rank survives
            let (l, t) = self.points.iter().next().expect("nonempty problem");
            return Problem { order: self.order, points: [(l.clone(), t.clone())].into_iter().collect() };
        }
        Problem { order: self.order, points }
    }

    /// The problem with an apparent singularity at `loc` (no-op if present).
    pub fn with_apparent(&self, loc: Location) -> Problem {
        let mut p = self.clone();
        let r = self.rank();
        p.points.entry(loc).or_insert_with(|| FormalType::apparent(r));
        p
    }

    /// Same formal data, ignoring apparent points and `N`.
    pub fn same_data(&self, other: &Problem) -> bool {
        self.without_apparent().points == other.without_apparent().points
    }

    /// Smallest `N` with every monodromy exponent in `(1/N)Z`.
    pub fn exponent_order(&self) -> u32 {
        let mut n: u64 = 1;
        for t in self.points.values() {
            for e in t.monodromy_exponents() {
                n = n.lcm(&e.denom().try_into().unwrap_or(1u64));
            }
        }
        n as u32
    }
}

/// Whether every formal-monodromy eigenvalue lies in `μ_N`.
pub fn is_quasi_unipotent(p: &Problem) -> bool {
    let n = Rational::from_integer((p.order as i64).into());
    p.points.values().all(|t| t.monodromy_exponents().iter().all(|e| (e * &n).is_integer()))
}

/// The sum of all monodromy exponents over all points (mod nothing).
pub fn exponent_sum(p: &Problem) -> Rational {
    p.points.values().flat_map(|t| t.monodromy_exponents()).fold(Rational::zero(), |a, e| a + e)
}

/// Whether `x` is a nonnegative rational below 1.
pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x < Rational::from_integer(1.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RadicalCoeff;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pp(p: u32, j: u32, c: i64) -> PolarPart {
        PolarPart::monomial(RadicalCoeff::from_int(c), j, p)
    }

    #[test]
    fn ranks() {
        let t = FormalType::new(vec![ExpFactor::new(pp(2, 1, 1), vec![(q(0, 1), 1)]), ExpFactor::regular(vec![(q(0, 1), 1)])]);
        assert_eq!(t.rank(), 3);
        assert_eq!(FormalType::regular(vec![(q(1, 3), 2)]).rank(), 2);
        assert_eq!(FormalType::new(vec![ExpFactor::new(pp(3, 1, 1), vec![(q(0, 1), 1)])]).rank(), 3);
    }

    #[test]
    fn irregularities() {
        let t = FormalType::new(vec![ExpFactor::new(pp(2, 3, 1), vec![(q(0, 1), 1)])]);
        assert_eq!(t.irregularity(), 3);
        assert_eq!(FormalType::regular(vec![(q(0, 1), 2)]).irregularity(), 0);
        let t = FormalType::new(vec![ExpFactor::new(pp(3, 1, 1), vec![(q(0, 1), 1), (q(1, 7), 1)])]);
        assert_eq!(t.irregularity(), 2);
    }

    #[test]
    fn exponents() {
        assert_eq!(FormalType::regular(vec![(q(1, 5), 1)]).monodromy_exponents(), vec![q(1, 5)]);
        let t = FormalType::new(vec![ExpFactor::new(pp(2, 1, 1), vec![(q(1, 3), 1)])]);
        // 1/3 is reduced mod 1/2 to 1/3; the set is {1/3, 5/6}
        assert_eq!(t.monodromy_exponents(), vec![q(1, 3), q(5, 6)]);
        let t = FormalType::new(vec![ExpFactor::new(pp(3, 1, 1), vec![(q(0, 1), 1)])]);
        assert_eq!(t.monodromy_exponents(), vec![q(0, 1), q(1, 3), q(2, 3)]);
        assert_eq!(t.monodromy_exponents().len() as u32, t.rank());
    }

    #[test]
    fn hom_invariants() {
        let el = FormalType::new(vec![ExpFactor::new(pp(2, 1, 1), vec![(q(0, 1), 1)])]);
        let reg1 = FormalType::regular(vec![(q(0, 1), 1)]);
        assert_eq!(hom_irregularity(&el, &el), 1);
        assert_eq!(hom_irregularity(&reg1, &reg1), 0);
        assert_eq!(hom_irregularity(&el, &reg1), 1);
        assert_eq!(hom_irregularity(&reg1, &el), 1);
        assert_eq!(hom_h0(&FormalType::regular(vec![(q(0, 1), 2)]), &FormalType::regular(vec![(q(0, 1), 2)])), 2);
        let ela = FormalType::new(vec![ExpFactor::new(pp(2, 1, 1), vec![(q(1, 5), 1)])]);
        assert_eq!(hom_h0(&ela, &ela), 1);
        let el2 = FormalType::new(vec![ExpFactor::new(pp(2, 1, 1), vec![(q(0, 1), 1), (q(1, 2), 1)])]);
        assert_eq!(hom_h0(&el2, &el2), 4);
    }

    #[test]
    fn twisting() {
        let t = FormalType::regular(vec![(q(1, 3), 1), (q(0, 1), 1)]);
        assert_eq!(t.twist(&PolarPart::zero(), &q(0, 1)).unwrap(), t);
        assert_eq!(
            FormalType::regular(vec![(q(1, 3), 1)]).twist(&PolarPart::zero(), &q(1, 2)).unwrap(),
            FormalType::regular(vec![(q(5, 6), 1)])
        );
        // removing an unramified head
        let head = pp(1, 2, 3);
        let phi = head.add(&pp(2, 3, 1));
        let el = FormalType::new(vec![ExpFactor::new(phi, vec![(q(0, 1), 1)])]);
        let tw = el.twist(&head.neg(), &q(0, 1)).unwrap();
        assert_eq!(tw.factors()[0].phi.canonical(), pp(2, 3, 1).canonical());
        assert!(matches!(el.twist(&pp(2, 1, 1), &q(0, 1)), Err(Error::RamifiedTwist)));
    }

    #[test]
    fn quasi_unipotency() {
        let mk = |t: FormalType, n: u32| Problem::from_points(n, vec![(Location::int(0), t)]).unwrap();
        assert!(is_quasi_unipotent(&mk(FormalType::regular(vec![(q(0, 1), 1), (q(1, 2), 1)]), 2)));
        assert!(!is_quasi_unipotent(&mk(FormalType::regular(vec![(q(1, 3), 1)]), 2)));
        let el = FormalType::new(vec![ExpFactor::new(pp(2, 1, 1), vec![(q(0, 1), 1)])]);
        assert!(is_quasi_unipotent(&mk(el, 2)));
    }

    #[test]
    fn problem_validation() {
        let a = FormalType::regular(vec![(q(0, 1), 1)]);
        let b = FormalType::regular(vec![(q(0, 1), 2)]);
        assert!(matches!(
            Problem::from_points(1, vec![(Location::int(0), a.clone()), (Location::Infinity, b)]),
            Err(Error::InvalidProblem(_))
        ));
        assert!(matches!(
            Problem::from_points(1, vec![(Location::int(0), a.clone()), (Location::int(0), a)]),
            Err(Error::InvalidProblem(_))
        ));
    }
}
