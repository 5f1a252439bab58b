//! Pushforward of formal data along `t ↦ (at + b)/(ct + d)`.
//!
//! Near a point the source coordinate is a Möbius function of the target
//! coordinate fixing `0`, `z = κ z'/(1 + β z')`. Polar parts are expanded
//! with the binomial series and cut at exponent `0`; exponents of the
//! regular part do not move.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::formal::{ExpFactor, FormalType, Location, Problem};
use crate::puiseux::PolarPart;
use crate::radical::{cyclo_pow, RadicalCoeff};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moebius {
    pub a: CycloNum,
    pub b: CycloNum,
    pub c: CycloNum,
    pub d: CycloNum,
}

impl Moebius {
    pub fn new(a: CycloNum, b: CycloNum, c: CycloNum, d: CycloNum) -> Result<Self> {
        let m = Moebius { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Moebius { a: CycloNum::one(), b: CycloNum::zero(), c: CycloNum::zero(), d: CycloNum::one() }
    }

    pub fn translation(s: CycloNum) -> Self {
        Moebius { a: CycloNum::one(), b: s, c: CycloNum::zero(), d: CycloNum::one() }
    }

    /// `t ↦ 1/(t − x)`, sending `x` to `∞` and `∞` to `0`.
    pub fn to_infinity(x: &CycloNum) -> Self {
        Moebius { a: CycloNum::zero(), b: CycloNum::one(), c: CycloNum::one(), d: -x }
    }

    pub fn det(&self) -> CycloNum {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn inverse(&self) -> Self {
        Moebius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Moebius) -> Self {
        Moebius {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn apply(&self, loc: &Location) -> Location {
        match loc {
            Location::Infinity => {
                if self.c.is_zero() {
                    Location::Infinity
                } else {
                    Location::Finite(self.a.div(&self.c).expect("c ≠ 0"))
                }
            }
            Location::Finite(x) => {
                let den = &(&self.c * x) + &self.d;
                if den.is_zero() {
                    Location::Infinity
                } else {
                    Location::Finite((&(&self.a * x) + &self.b).div(&den).expect("nonzero"))
                }
            }
        }
    }

    /// `(κ, β)` with `z = κ z'/(1 + β z')`, where `z` is the local
    /// coordinate at `source` and `z'` the one at its image.
    pub fn local_map(&self, source: &Location) -> (CycloNum, CycloNum) {
        let target = self.apply(source);
        // h: target variable ↦ source variable
        let mut h = self.inverse();
        let swap = Moebius { a: CycloNum::zero(), b: CycloNum::one(), c: CycloNum::one(), d: CycloNum::zero() };
        let y = match &target {
            Location::Infinity => {
                h = h.compose(&swap);
                CycloNum::zero()
            }
            Location::Finite(y) => y.clone(),
        };
        if source.is_infinity() {
            h = swap.compose(&h);
        }
        let den = &(&h.c * &y) + &h.d;
        let kappa = h.det().div(&(&den * &den)).expect("regular at y");
        let beta = h.c.div(&den).expect("regular at y");
        (kappa, beta)
    }
}

fn binomial(s: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..n {
        acc = acc * (s - Rational::from_integer(i.into())) / Rational::from_integer((i + 1).into());
    }
    acc
}

/// Rewrite `φ(z)` in `z'` for `z = κ z'/(1 + β z')`.
pub fn substitute(phi: &PolarPart, kappa: &CycloNum, beta: &CycloNum) -> Result<PolarPart> {
    let p = phi.ram();
    let root = cyclo_pow(kappa, &Rational::new((-1).into(), p.into()))?;
    let mut terms: BTreeMap<u32, RadicalCoeff> = BTreeMap::new();
    for (j, a) in phi.terms() {
        let base = a * &root.pow(&Rational::from_integer((*j as i64).into()))?;
        let s = Rational::new((*j as i64).into(), p.into());
        let mut n = 0u32;
        while n * p < *j {
            let coef = binomial(&s, n);
            if !coef.is_zero() {
                let c = base.scale_cyclo(&(&CycloNum::from_rational(coef) * &beta.pow(n as i64)?));
                let e = j - n * p;
                let entry = terms.entry(e).or_insert_with(RadicalCoeff::zero);
                *entry = &*entry + &c;
            }
            n += 1;
        }
    }
    Ok(PolarPart::new(p, terms))
}

pub fn transform_type(m: &Moebius, loc: &Location, t: &FormalType) -> Result<FormalType> {
    let (kappa, beta) = m.local_map(loc);
    let factors = t
        .factors()
        .iter()
        .map(|f| Ok(ExpFactor::new(substitute(&f.phi, &kappa, &beta)?, f.reg.blocks().to_vec())))
        .collect::<Result<Vec<_>>>()?;
    Ok(FormalType::new(factors))
}

pub fn transform_problem(m: &Moebius, p: &Problem) -> Result<Problem> {
    let mut points = BTreeMap::new();
    for (loc, t) in &p.points {
        points.insert(m.apply(loc), transform_type(m, loc, t)?);
    }
    Problem::new(p.order, points)
}
