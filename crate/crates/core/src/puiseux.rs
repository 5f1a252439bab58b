//! Ramified polar parts `φ = Σ_j a_j t^{-j/p}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::cyclo::lcm;
use crate::error::{Error, Result};
use crate::radical::RadicalCoeff;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolarPart {
    ram: u32,
    terms: BTreeMap<u32, RadicalCoeff>,
}

impl PolarPart {
    /// Polar part in normal form (ramification reduced by the gcd of the
    /// exponent numerators).
    pub fn new(ram: u32, terms: BTreeMap<u32, RadicalCoeff>) -> Self {
        Self::raw(ram, terms).normalized()
    }

    /// Polar part exactly as given; only zero coefficients are dropped.
    pub fn raw(ram: u32, terms: BTreeMap<u32, RadicalCoeff>) -> Self {
        assert!(ram > 0, "ramification must be positive");
        let terms = terms.into_iter().filter(|(j, c)| *j > 0 && !c.is_zero()).collect();
        PolarPart { ram, terms }
    }

    pub fn zero() -> Self {
        PolarPart { ram: 1, terms: BTreeMap::new() }
    }

    /// `c · t^{-j/p}`.
    pub fn monomial(c: RadicalCoeff, j: u32, p: u32) -> Self {
        Self::new(p, [(j, c)].into_iter().collect())
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn terms(&self) -> &BTreeMap<u32, RadicalCoeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest exponent numerator, 0 for the zero polar part.
    pub fn pole_order(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> Option<&RadicalCoeff> {
        self.terms.values().next_back()
    }

    pub fn slope(&self) -> Rational {
        Rational::new((self.pole_order() as i64).into(), (self.ram as i64).into())
    }

    fn gcd_all(&self) -> u32 {
        self.terms.keys().fold(self.ram, |g, &j| g.gcd(&j))
    }

    pub fn is_minimal(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolarPart);
        }
        Ok(self.gcd_all() == 1)
    }

    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let g = self.gcd_all();
        if g == 1 {
            return self.clone();
        }
        PolarPart { ram: self.ram / g, terms: self.terms.iter().map(|(j, c)| (j / g, c.clone())).collect() }
    }

    /// Terms rewritten at ramification `e`, a multiple of `ram`.
    pub fn terms_at(&self, e: u32) -> BTreeMap<u32, RadicalCoeff> {
        assert!(e % self.ram == 0, "ramification {} does not divide {}", self.ram, e);
        let f = e / self.ram;
        self.terms.iter().map(|(j, c)| (j * f, c.clone())).collect()
    }

    /// Pullback along `t = u^q`: exponents `j/p` become `jq/p`.
    pub fn ramify(&self, q: u32) -> Self {
        Self::new(self.ram, self.terms.iter().map(|(j, c)| (j * q, c.clone())).collect())
    }

    pub fn add(&self, o: &PolarPart) -> PolarPart {
        let e = lcm(self.ram as u64, o.ram as u64) as u32;
        let mut terms = self.terms_at(e);
        for (j, c) in o.terms_at(e) {
            let entry = terms.entry(j).or_insert_with(RadicalCoeff::zero);
            *entry = &*entry + &c;
        }
        Self::new(e, terms)
    }

    pub fn neg(&self) -> PolarPart {
        PolarPart { ram: self.ram, terms: self.terms.iter().map(|(j, c)| (*j, -c)).collect() }
    }

    pub fn sub(&self, o: &PolarPart) -> PolarPart {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &RadicalCoeff) -> PolarPart {
        Self::new(self.ram, self.terms.iter().map(|(j, a)| (*j, a * c)).collect())
    }

    /// `a_j ↦ a_j ζ_p^{-jm}`: the polar part seen after `t^{1/p} ↦ ζ_p t^{1/p}`.
    pub fn galois_act(&self, m: i64) -> Result<PolarPart> {
        let p = self.ram as i64;
        if m < 0 || m >= p {
            return Err(Error::OutOfRange { value: m, bound: p });
        }
        Ok(self.galois_act_unchecked(m))
    }

    pub(crate) fn galois_act_unchecked(&self, m: i64) -> PolarPart {
        let p = self.ram;
        let terms = self.terms.iter().map(|(j, c)| (*j, c * &RadicalCoeff::zeta(p, -(*j as i64) * m))).collect();
        PolarPart { ram: p, terms }
    }

    /// Orbit minimum under the Galois action, and the witness `m` with
    /// `galois_act(result, m) = self`.
    pub fn canonical_rep(&self) -> Result<(PolarPart, i64)> {
        if self.is_zero() {
            return Ok((Self::zero(), 0));
        }
        if !self.is_minimal()? {
            return Err(Error::NotMinimal);
        }
        let p = self.ram as i64;
        let (m0, best) =
            (0..p).map(|m| (m, self.galois_act_unchecked(m))).min_by(|a, b| a.1.cmp(&b.1)).expect("orbit is nonempty");
        // best = σ^{m0} self, so self = σ^{-m0} best
        Ok((best, (-m0).rem_euclid(p)))
    }

    /// Canonical representative of the normal form.
    pub fn canonical(&self) -> PolarPart {
        self.normalized().canonical_rep().expect("normal form is minimal").0
    }

    /// The Galois orbit (normal form assumed).
    pub fn orbit(&self) -> Vec<PolarPart> {
        let mut out: Vec<PolarPart> = (0..self.ram as i64).map(|m| self.galois_act_unchecked(m)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Terms with integral exponents, as an unramified polar part.
    pub fn integral_head(&self) -> PolarPart {
        let p = self.ram;
        Self::new(1, self.terms.iter().filter(|(j, _)| *j % p == 0).map(|(j, c)| (j / p, c.clone())).collect())
    }

    /// What remains after removing the integral-exponent terms.
    pub fn without_integral_terms(&self) -> PolarPart {
        let p = self.ram;
        Self::new(p, self.terms.iter().filter(|(j, _)| *j % p != 0).map(|(j, c)| (*j, c.clone())).collect())
    }

    /// Whether every coefficient is cyclotomic (no radicals).
    pub fn is_cyclotomic(&self) -> bool {
        self.terms.values().all(|c| c.as_cyclo().is_some())
    }
}

/// Pole order of `φ − ψ` measured at the common ramification.
pub fn diff_pole_order(phi: &PolarPart, psi: &PolarPart) -> u32 {
    let e = lcm(phi.ram as u64, psi.ram as u64) as u32;
    let mut terms = phi.terms_at(e);
    for (j, c) in psi.terms_at(e) {
        let entry = terms.entry(j).or_insert_with(RadicalCoeff::zero);
        *entry = &*entry - &c;
    }
    terms.iter().rev().find(|(_, c)| !c.is_zero()).map(|(j, _)| *j).unwrap_or(0)
}

impl Ord for PolarPart {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ram.cmp(&other.ram).then_with(|| {
            let a = self.terms.iter().rev();
            let b = other.terms.iter().rev();
            a.cmp(b)
        })
    }
}

impl PartialOrd for PolarPart {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn exponent_string(j: u32, p: u32) -> String {
    let g = j.gcd(&p);
    let (j, p) = (j / g, p / g);
    if p == 1 {
        format!("-{}", j)
    } else {
        format!("-{}/{}", j, p)
    }
}

impl fmt::Display for PolarPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (j, c)) in self.terms.iter().rev().enumerate() {
            let atom = format!("t^({})", exponent_string(*j, self.ram));
            let cs = c.to_string();
            let compound = cs.chars().skip(1).collect::<String>().contains([' ']);
            let neg = c.is_zero() == false && cs.starts_with('-') && !compound;
            let body = if cs == "1" {
                atom
            } else if cs == "-1" {
                "-".to_string() + &atom
            } else if compound {
                format!("({})*{}", cs, atom)
            } else {
                format!("{}*{}", cs, atom)
            };
            if i == 0 {
                write!(f, "{}", body)?;
            } else if neg || body.starts_with('-') {
                write!(f, " - {}", &body[1..])?;
            } else {
                write!(f, " + {}", body)?;
            }
        }
        Ok(())
    }
}
