//! The Stokes order `ψ ≤_θ φ` on directions of the `p`-fold cover circle
//! and dimension bookkeeping for graded Stokes-filtered local systems.
//!
//! Directions are measured in turns of `u = z^{1/p}`. Away from `ψ = φ`
//! only the leading term `a u^{-q}` of `ψ − φ` matters:
//! `Re(a ε^{-q} e^{-2πiqθ}) < 0` exactly on `q` open arcs of length
//! `1/(2q)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cyclo::{lcm, Angle};
use crate::error::{Error, Result};
use crate::puiseux::PolarPart;
use crate::radical::{zeta_turns, RadicalCoeff};
use crate::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// An open arc `(start, end)`; `end − start` is its length in turns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
}

impl Arc {
    /// Whether an exact direction lies inside; `None` when an enclosure
    /// endpoint is too wide to tell.
    pub fn contains(&self, theta: &Rational) -> Option<bool> {
        let (slo, shi) = bounds(&self.start);
        let (elo, ehi) = bounds(&self.end);
        let x = theta - (theta - &slo).floor();
        if x > shi && x < elo {
            Some(true)
        } else if x < slo || x > ehi || (x == slo && slo == shi) || (x == elo && elo == ehi) {
            Some(false)
        } else {
            None
        }
    }
}

fn bounds(a: &Angle) -> (Rational, Rational) {
    match a {
        Angle::Exact(t) => (t.clone(), t.clone()),
        Angle::Enclosure { lo, hi } => (lo.clone(), hi.clone()),
    }
}

/// `θ ↦ (θ + c)/k`.
fn affine(a: &Angle, c: &Rational, k: u32) -> Angle {
    let k = Rational::from_integer(k.into());
    match a {
        Angle::Exact(t) => Angle::Exact((t + c) / &k),
        Angle::Enclosure { lo, hi } => Angle::Enclosure { lo: (lo + c) / &k, hi: (hi + c) / &k },
    }
}

/// The locus `ψ <_θ φ` together with its boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderArcs {
    pub ram: u32,
    /// `ψ = φ`: the whole circle, no strict arcs.
    pub equal: bool,
    /// Arcs with midpoints in `[−1/2, 1/2)`, sorted.
    pub strict: Vec<Arc>,
    /// The `2q` directions where `Re(ψ − φ)` changes sign.
    pub boundary: Vec<Angle>,
}

/// Both polar parts rewritten at a common ramification.
fn common(psi: &PolarPart, phi: &PolarPart) -> (u32, BTreeMap<u32, RadicalCoeff>) {
    let p = lcm(psi.ram() as u64, phi.ram() as u64) as u32;
    let mut d = psi.terms_at(p);
    for (j, c) in phi.terms_at(p) {
        let e = d.entry(j).or_insert_with(RadicalCoeff::zero);
        *e = &*e - &c;
    }
    d.retain(|_, c| !c.is_zero());
    (p, d)
}

/// Leading `(q, a)` of `ψ − φ` at ramification `p`.
fn leading(psi: &PolarPart, phi: &PolarPart) -> (u32, Option<(u32, RadicalCoeff)>) {
    let (p, d) = common(psi, phi);
    (p, d.into_iter().next_back())
}

pub fn order_arcs(psi: &PolarPart, phi: &PolarPart) -> Result<OrderArcs> {
    let (p, lead) = leading(psi, phi);
    let Some((qq, a)) = lead else {
        return Ok(OrderArcs { ram: p, equal: true, strict: Vec::new(), boundary: Vec::new() });
    };
    let alpha = a.angle()?;
    // midpoints (α − 1/2 + k)/q
    let mut mids: Vec<Angle> = (0..qq as i64).map(|k| affine(&alpha, &(q(k, 1) - q(1, 2)), qq)).collect();
    for m in mids.iter_mut() {
        let (lo, _) = bounds(m);
        let shift = -(&lo + q(1, 2)).floor();
        *m = affine(m, &shift, 1);
    }
    mids.sort_by(|x, y| bounds(x).0.cmp(&bounds(y).0));
    let half = q(1, 4 * qq as i64);
    let strict: Vec<Arc> = mids.iter().map(|m| Arc { start: affine(m, &-half.clone(), 1), end: affine(m, &half, 1) }).collect();
    let mut boundary: Vec<Angle> = strict.iter().flat_map(|a| [a.start.clone(), a.end.clone()]).collect();
    boundary.sort_by(|x, y| bounds(x).0.cmp(&bounds(y).0));
    Ok(OrderArcs { ram: p, equal: false, strict, boundary })
}

/// Exact decision of `ψ <_θ φ` at one direction.
pub fn strictly_less(psi: &PolarPart, phi: &PolarPart, theta: &Rational) -> Result<bool> {
    let (_, lead) = leading(psi, phi);
    let Some((qq, a)) = lead else { return Ok(false) };
    let rot = zeta_turns(&(-theta * Rational::from_integer(qq.into())));
    let v = &a * &RadicalCoeff::from_cyclo(rot);
    if let Angle::Exact(t) = a.angle()? {
        // boundary iff 4(α − qθ) is an odd integer
        let x = (t - theta * Rational::from_integer(qq.into())) * Rational::from_integer(4.into());
        if x.is_integer() && x.to_integer() % 2 != num_bigint::BigInt::zero() {
            return Err(Error::BoundaryDirection);
        }
    }
    match v.real_part_sign() {
        Ok(Ordering::Less) => Ok(true),
        Ok(Ordering::Greater) => Ok(false),
        Ok(Ordering::Equal) => Err(Error::BoundaryDirection),
        Err(e) => Err(e),
    }
}

pub fn less_or_equal(psi: &PolarPart, phi: &PolarPart, theta: &Rational) -> Result<bool> {
    if common(psi, phi).1.is_empty() {
        return Ok(true);
    }
    strictly_less(psi, phi, theta)
}

/// Ranks of the graded pieces `L_{p,φ}`, indexed by polar parts at a
/// common ramification `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedStokes {
    pub ram: u32,
    dims: BTreeMap<PolarPart, u32>,
}

impl GradedStokes {
    pub fn new(entries: impl IntoIterator<Item = (PolarPart, u32)>) -> Result<Self> {
        let entries: Vec<(PolarPart, u32)> = entries.into_iter().collect();
        let ram = entries.iter().fold(1u64, |acc, (phi, _)| lcm(acc, phi.ram() as u64)) as u32;
        let mut dims = BTreeMap::new();
        for (phi, d) in entries {
            *dims.entry(PolarPart::raw(ram, phi.terms_at(ram))).or_insert(0) += d;
        }
        let g = GradedStokes { ram, dims };
        if g.total() == 0 {
            return Err(Error::InvalidProblem("graded Stokes data of total rank 0".into()));
        }
        Ok(g)
    }

    pub fn dims(&self) -> &BTreeMap<PolarPart, u32> {
        &self.dims
    }

    pub fn dim(&self, phi: &PolarPart) -> u32 {
        self.dims.get(&PolarPart::raw(self.ram, phi.terms_at(self.ram))).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.dims.values().sum()
    }
}

/// `φ ↦ (dim L_{≤φ,θ}, dim L_{<φ,θ})`.
pub fn filtration_dims(g: &GradedStokes, theta: &Rational) -> Result<BTreeMap<PolarPart, (u32, u32)>> {
    let mut out = BTreeMap::new();
    for phi in g.dims.keys() {
        let mut le = 0;
        let mut lt = 0;
        for (psi, d) in &g.dims {
            if psi == phi {
                le += d;
            } else if strictly_less(psi, phi, theta)? {
                le += d;
                lt += d;
            }
        }
        out.insert(phi.clone(), (le, lt));
    }
    Ok(out)
}

/// Whether the dimensions are invariant under the Galois relabeling
/// `σ_m` (the index set must be closed under it) and the order arcs
/// rotate by `−m/p`.
pub fn check_galois_equivariance(g: &GradedStokes, m: i64) -> Result<bool> {
    let p = g.ram as i64;
    let m = m.rem_euclid(p);
    if m == 0 {
        return Ok(true);
    }
    let act = |phi: &PolarPart| phi.galois_act(m);
    for phi in g.dims.keys() {
        if !g.dims.contains_key(&act(phi)?) {
            return Err(Error::IndexNotClosed);
        }
    }
    for (phi, d) in &g.dims {
        if g.dims[&act(phi)?] != *d {
            return Ok(false);
        }
    }
    let keys: Vec<&PolarPart> = g.dims.keys().collect();
    let rot = q(-m, p);
    for psi in &keys {
        for phi in &keys {
            if psi == phi {
                continue;
            }
            let before = order_arcs(psi, phi)?;
            let after = order_arcs(&act(psi)?, &act(phi)?)?;
            if !same_arcs(&rotate(&before, &rot), &after) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rotates arcs by `r` turns and renormalizes midpoints.
pub fn rotate(a: &OrderArcs, r: &Rational) -> OrderArcs {
    let re = |x: &Angle| affine(x, r, 1);
    let mut strict: Vec<Arc> = a
        .strict
        .iter()
        .map(|arc| {
            let (s, e) = (re(&arc.start), re(&arc.end));
            let mid = (bounds(&s).0 + bounds(&e).0) / Rational::from_integer(2.into());
            let shift = -(mid + q(1, 2)).floor();
            Arc { start: affine(&s, &shift, 1), end: affine(&e, &shift, 1) }
        })
        .collect();
    strict.sort_by(|x, y| bounds(&x.start).0.cmp(&bounds(&y.start).0));
    let mut boundary: Vec<Angle> = strict.iter().flat_map(|a| [a.start.clone(), a.end.clone()]).collect();
    boundary.sort_by(|x, y| bounds(x).0.cmp(&bounds(y).0));
    OrderArcs { ram: a.ram, equal: a.equal, strict, boundary }
}

/// Exact equality for exact endpoints; overlap for enclosures.
fn same_arcs(a: &OrderArcs, b: &OrderArcs) -> bool {
    let same = |x: &Angle, y: &Angle| match (x, y) {
        (Angle::Exact(s), Angle::Exact(t)) => s == t,
        _ => {
            let ((a0, a1), (b0, b1)) = (bounds(x), bounds(y));
            a0 <= b1 && b0 <= a1
        }
    };
    a.equal == b.equal
        && a.strict.len() == b.strict.len()
        && a.strict.iter().zip(&b.strict).all(|(x, y)| same(&x.start, &y.start) && same(&x.end, &y.end))
}

/// A direction strictly inside every arc-free gap, useful for sampling:
/// midpoints between consecutive exact boundary points of all pairs.
pub fn admissible_directions(g: &GradedStokes) -> Result<Vec<Rational>> {
    let mut pts: Vec<Rational> = Vec::new();
    let keys: Vec<&PolarPart> = g.dims.keys().collect();
    for psi in &keys {
        for phi in &keys {
            if psi < phi {
                for b in order_arcs(psi, phi)?.boundary {
                    let (lo, hi) = bounds(&b);
                    for x in [lo, hi] {
                        pts.push(&x - x.floor());
                    }
                }
            }
        }
    }
    pts.sort();
    pts.dedup();
    if pts.is_empty() {
        return Ok(vec![Rational::zero()]);
    }
    let mut out = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        let next = pts.get(i + 1).cloned().unwrap_or_else(|| &pts[0] + Rational::one());
        out.push((x + &next) / Rational::from_integer(2.into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(c: i64, j: u32, p: u32) -> PolarPart {
        PolarPart::monomial(RadicalCoeff::from_int(c), j, p)
    }

    #[test]
    fn basic_arc() {
        let a = order_arcs(&PolarPart::zero(), &mono(1, 1, 1)).unwrap();
        assert_eq!(a.strict, vec![Arc { start: Angle::Exact(q(-1, 4)), end: Angle::Exact(q(1, 4)) }]);
        assert_eq!(a.boundary.len(), 2);
        assert!(order_arcs(&mono(1, 1, 1), &mono(1, 1, 1)).unwrap().equal);
    }

    #[test]
    fn boundary_counts() {
        for qq in 1..=3 {
            let a = order_arcs(&mono(1, qq, 1), &PolarPart::zero()).unwrap();
            assert_eq!(a.boundary.len() as u32, 2 * qq);
            assert_eq!(a.strict.len() as u32, qq);
        }
    }

    #[test]
    fn trichotomy() {
        let (x, y) = (mono(2, 3, 2), mono(-1, 1, 2));
        let ab = order_arcs(&x, &y).unwrap();
        let ba = order_arcs(&y, &x).unwrap();
        for k in 0..48 {
            let theta = q(2 * k + 1, 96);
            let (l, r) = (strictly_less(&x, &y, &theta).unwrap(), strictly_less(&y, &x, &theta).unwrap());
            assert!(l ^ r);
            assert_eq!(ab.strict.iter().any(|a| a.contains(&theta) == Some(true)), l);
            assert_eq!(ba.strict.iter().any(|a| a.contains(&theta) == Some(true)), r);
        }
        assert!(matches!(strictly_less(&PolarPart::zero(), &mono(1, 1, 1), &q(1, 4)), Err(Error::BoundaryDirection)));
    }

    #[test]
    fn filtration_example() {
        let g = GradedStokes::new([(PolarPart::zero(), 1), (mono(1, 1, 1), 1)]).unwrap();
        let f = filtration_dims(&g, &Rational::zero()).unwrap();
        assert_eq!(f[&mono(1, 1, 1)], (2, 1));
        assert_eq!(f[&PolarPart::zero()], (1, 0));
        let single = GradedStokes::new([(mono(1, 1, 1), 3)]).unwrap();
        assert_eq!(filtration_dims(&single, &q(1, 3)).unwrap()[&mono(1, 1, 1)], (3, 0));
    }

    #[test]
    fn equivariance() {
        let (a, b) = (mono(1, 1, 2), mono(-1, 1, 2));
        let sym = GradedStokes::new([(a.clone(), 1), (b.clone(), 1)]).unwrap();
        assert!(check_galois_equivariance(&sym, 0).unwrap());
        assert!(check_galois_equivariance(&sym, 1).unwrap());
        let asym = GradedStokes::new([(a.clone(), 2), (b, 1)]).unwrap();
        assert!(!check_galois_equivariance(&asym, 1).unwrap());
        let open = GradedStokes::new([(a, 1)]).unwrap();
        assert!(matches!(check_galois_equivariance(&open, 1), Err(Error::IndexNotClosed)));
    }

    #[test]
    fn rotation_is_exact() {
        let psi = PolarPart::new(3, [(2, RadicalCoeff::zeta(5, 1)), (1, RadicalCoeff::from_int(1))].into_iter().collect());
        let phi = mono(1, 1, 3);
        for m in 0..3 {
            let before = order_arcs(&psi, &phi).unwrap();
            let after = order_arcs(&psi.galois_act(m).unwrap(), &phi.galois_act(m).unwrap()).unwrap();
            assert_eq!(rotate(&before, &q(-m, 3)), after);
        }
    }
}
