//! Cyclotomic numbers extended by radicals.
//!
//! A [`RadicalCoeff`] is a finite sum `Σ c_m · m` of cyclotomic coefficients
//! times radical monomials `m = Π r_i^{e_i}`. Radicands are either primes,
//! with exponents in `[0, 1/2)` (square roots of primes are cyclotomic and
//! get folded into the coefficient), or cyclotomic numbers that have no
//! exact polar form, with exponents in `[0, 1)`.
//!
//! For prime radicands the normal form is unique: distinct monomials are
//! linearly independent over the cyclotomic closure. Cyclotomic radicands
//! are only compared through a bounded perfect-power search, so hidden
//! multiplicative relations between them can escape detection.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{arg_turns, cos_sin_turns, pow_rational, ComplexBall, RealBall};
use crate::cyclo::{factorize, lcm, CycloNum};
use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};
use crate::Rational;

/// Search bound for exact polar forms of cyclotomic numbers.
pub const EXACT_FORM_BOUND: u32 = 24;
/// Search bound for perfect-power relations between cyclotomic radicands.
pub const RELATION_BOUND: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radicand {
    Prime(u64),
    Cyclo(CycloNum),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadicalMonomial(BTreeMap<Radicand, Rational>);

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadicalCoeff {
    terms: BTreeMap<RadicalMonomial, CycloNum>,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// The positive square root of a prime, as a cyclotomic number.
pub fn sqrt_prime(p: u64) -> CycloNum {
    if p == 2 {
        return CycloNum::zeta(8, 1) + CycloNum::zeta(8, 7);
    }
    let level = p as u32;
    let mut gauss = CycloNum::zero();
    for a in 1..p {
        let symbol = mod_pow(a, (p - 1) / 2, p);
        let z = CycloNum::zeta(level, a as i64);
        gauss = if symbol == 1 { gauss + z } else { gauss - z };
    }
    if p % 4 == 1 {
        gauss
    } else {
        // the Gauss sum is i·√p
        -(CycloNum::zeta(4, 1) * gauss)
    }
}

/// `ρ^s` for a positive rational `ρ`, as a monomial over prime radicands.
/// Large `ρ` usually come from exact forms `c^L`, so perfect powers are
/// extracted first.
fn positive_rational_power(rho: &Rational, s: &Rational) -> Result<RadicalCoeff> {
    debug_assert!(rho.is_positive());
    let (mut num, mut den, mut s) = (rho.numer().clone(), rho.denom().clone(), s.clone());
    for e in (2..=128u32).rev() {
        while num.bits() > 63 || den.bits() > 63 {
            let (rn, rd) = (num.nth_root(e), den.nth_root(e));
            if rn.pow(e) == num && rd.pow(e) == den {
                num = rn;
                den = rd;
                s = s * Rational::from_integer(e.into());
            } else {
                break;
            }
        }
    }
    let mut out = RadicalCoeff::one();
    for (value, sign) in [(&num, 1i64), (&den, -1i64)] {
        let n = value.to_u64().ok_or_else(|| Error::NonMonomial(format!("radicand {} too large to factor", value)))?;
        for (p, v) in factorize(n) {
            let e = &s * Rational::from_integer((sign * v as i64).into());
            out = out.mul_ref(&RadicalCoeff::factor_power(&Radicand::Prime(p), &e));
        }
    }
    Ok(out)
}

/// Gcd of numerators over lcm of denominators: the positive rational that
/// makes the coordinates primitive integers.
fn content(coeffs: &[Rational]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    Rational::new(num, den)
}

/// A chosen `s`-th power of a nonzero cyclotomic number. The choice is
/// coherent: `pow(c, s) · pow(c, s') = pow(c, s + s')` and `pow(c, 1) = c`.
pub fn cyclo_pow(c: &CycloNum, s: &Rational) -> Result<RadicalCoeff> {
    if c.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if s.is_integer() {
        let k = s.to_integer().to_i64().ok_or(Error::OutOfRange { value: i64::MAX, bound: i64::MAX })?;
        return Ok(RadicalCoeff::from(c.pow(k)?));
    }
    if let Some((rho_l, l, t)) = c.exact_form(EXACT_FORM_BOUND)? {
        let modulus = positive_rational_power(&rho_l.abs(), &(s / Rational::from_integer(l.into())))?;
        let angle = &t * s;
        let rot = zeta_turns(&angle);
        return Ok(modulus.mul_ref(&RadicalCoeff::from(rot)));
    }
    let (level, coords) = c.normal_form();
    let k0 = content(coords);
    let primitive = c.scale_q(&k0.recip());
    let m = lcm(2, level as u64) as i64;
    let mut best: Option<(CycloNum, i64)> = None;
    for k in 0..m {
        let cand = &primitive * &CycloNum::zeta(m as u32, k);
        if best.as_ref().is_none_or(|(b, _)| cand.cmp_canonical(b) == Ordering::Less) {
            best = Some((cand, k));
        }
    }
    let (mut base, mut k) = best.expect("at least one candidate");
    if base == base.conj() && base.real_sign()? == Ordering::Less {
        base = -base;
        k += m / 2;
    }
    // c = k0 · ζ_m^{-k} · base
    let rot = zeta_turns(&(-(Rational::from_integer(k.into()) * s) / Rational::from_integer(m.into())));
    let radical = RadicalCoeff::factor_power(&Radicand::Cyclo(base.simplified()), s);
    Ok(positive_rational_power(&k0, s)?.mul_ref(&RadicalCoeff::from(rot)).mul_ref(&radical))
}

/// `exp(2πi t)` for rational `t`.
pub fn zeta_turns(t: &Rational) -> CycloNum {
    let den = t.denom().to_u32().expect("root of unity order must fit in 32 bits");
    let num = t.numer().mod_floor(t.denom()).to_i64().expect("fits");
    CycloNum::zeta(den, num)
}

fn add_into(map: &mut BTreeMap<RadicalMonomial, CycloNum>, m: RadicalMonomial, c: CycloNum) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c.simplified());
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum.simplified();
            }
        }
    }
}

impl RadicalMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Radicand, &Rational)> {
        self.0.iter()
    }

    fn embed_ball(&self, bits: u32) -> Result<ComplexBall> {
        let mut acc = ComplexBall::exact(Rational::one(), Rational::zero());
        for (r, e) in &self.0 {
            let factor = match r {
                Radicand::Prime(p) => ComplexBall::from_real(
                    pow_rational(&RealBall::exact(Rational::from_integer((*p).into())), e, bits + 8)
                        .expect("primes are positive"),
                ),
                Radicand::Cyclo(b) => principal_power_ball(b, e, bits + 8)?,
            };
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }
}

/// Principal value `exp(e · Log b)` as a ball.
fn principal_power_ball(b: &CycloNum, e: &Rational, bits: u32) -> Result<ComplexBall> {
    let w = bits + 16;
    let z = b.embed_ball(w);
    let norm = z.norm_sqr();
    let modulus = pow_rational(&norm, &(e / Rational::from_integer(2.into())), w).ok_or(Error::UndecidedSign { bits: w })?;
    let (theta, halfwidth) = if *b == b.conj() {
        let t = if b.real_sign()? == Ordering::Less { q(1, 2) } else { Rational::zero() };
        (t, Rational::zero())
    } else {
        let (lo, hi) = arg_turns(&z, w)?;
        let half = Rational::new(1.into(), 2.into());
        let (lo, hi) = if lo > half { (lo - Rational::one(), hi - Rational::one()) } else { (lo, hi) };
        ((&lo + &hi) / Rational::from_integer(2.into()), (&hi - &lo) / Rational::from_integer(2.into()))
    };
    let (c, s) = cos_sin_turns(&(&theta * e), w);
    // d/dθ of a unit vector has length 2π < 7
    let slack = halfwidth * e.abs() * Rational::from_integer(7.into());
    let rot = ComplexBall { re: RealBall::new(c.mid, c.rad + &slack), im: RealBall::new(s.mid, s.rad + &slack) };
    Ok(ComplexBall::from_real(modulus).mul(&rot))
}

impl RadicalCoeff {
    pub fn from_cyclo(c: CycloNum) -> Self {
        let mut terms = BTreeMap::new();
        add_into(&mut terms, RadicalMonomial::one(), c);
        RadicalCoeff { terms }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::from_cyclo(CycloNum::from_rational(q))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_cyclo(CycloNum::from_int(n))
    }

    pub fn zeta(n: u32, k: i64) -> Self {
        Self::from_cyclo(CycloNum::zeta(n, k))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RadicalMonomial, &CycloNum)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value as a plain cyclotomic number, if no radicals remain.
    pub fn as_cyclo(&self) -> Option<CycloNum> {
        match self.terms.len() {
            0 => Some(CycloNum::zero()),
            1 => self.terms.get(&RadicalMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.as_cyclo()?.to_rational()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// `r^e` for an arbitrary rational `e`, normalised into a cyclotomic
    /// factor times an in-range radical power.
    fn factor_power(r: &Radicand, e: &Rational) -> RadicalCoeff {
        match r {
            Radicand::Prime(p) => {
                let two_e = e * Rational::from_integer(2.into());
                let n = two_e.floor().to_integer().to_i64().expect("exponent fits");
                let rest = e - Rational::new(n.into(), 2.into());
                let pr = CycloNum::from_int(*p as i64);
                let half_pow = n.div_euclid(2);
                let mut coeff = pr.pow(half_pow).expect("prime is nonzero");
                if n.rem_euclid(2) == 1 {
                    coeff = coeff * sqrt_prime(*p);
                }
                Self::single(coeff, r, rest)
            }
            Radicand::Cyclo(b) => {
                let n = e.floor().to_integer().to_i64().expect("exponent fits");
                let rest = e - Rational::from_integer(n.into());
                Self::single(b.pow(n).expect("radicand is nonzero"), r, rest)
            }
        }
    }

    fn single(coeff: CycloNum, r: &Radicand, e: Rational) -> RadicalCoeff {
        let mut m = RadicalMonomial::one();
        if !e.is_zero() {
            m.0.insert(r.clone(), e);
        }
        let mut terms = BTreeMap::new();
        add_into(&mut terms, m, coeff);
        RadicalCoeff { terms }
    }

    fn mono_mul(a: &RadicalMonomial, b: &RadicalMonomial) -> RadicalCoeff {
        let mut exps = a.0.clone();
        for (r, e) in &b.0 {
            *exps.entry(r.clone()).or_insert_with(Rational::zero) += e;
        }
        let mut out = RadicalCoeff::one();
        for (r, e) in exps {
            out = out.mul_plain(&Self::factor_power(&r, &e));
        }
        out
    }

    /// Product without the radicand-relation pass; `factor_power` results
    /// have disjoint radicands so this cannot recurse.
    fn mul_plain(&self, o: &RadicalCoeff) -> RadicalCoeff {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let coef = ca * cb;
                if ma.is_one() || mb.is_one() {
                    let m = if ma.is_one() { mb.clone() } else { ma.clone() };
                    add_into(&mut terms, m, coef);
                    continue;
                }
                let disjoint = mb.0.keys().all(|r| !ma.0.contains_key(r));
                if disjoint {
                    let mut m = ma.clone();
                    m.0.extend(mb.0.iter().map(|(r, e)| (r.clone(), e.clone())));
                    add_into(&mut terms, m, coef);
                } else {
                    for (m, c) in Self::mono_mul(ma, mb).terms {
                        add_into(&mut terms, m, &c * &coef);
                    }
                }
            }
        }
        RadicalCoeff { terms }
    }

    fn add_ref(&self, o: &RadicalCoeff) -> RadicalCoeff {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            add_into(&mut terms, m.clone(), c.clone());
        }
        RadicalCoeff { terms }.merge_radicands()
    }

    fn mul_ref(&self, o: &RadicalCoeff) -> RadicalCoeff {
        self.mul_plain(o).merge_radicands()
    }

    fn neg_ref(&self) -> RadicalCoeff {
        RadicalCoeff { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale_cyclo(&self, c: &CycloNum) -> RadicalCoeff {
        let mut terms = BTreeMap::new();
        for (m, a) in &self.terms {
            add_into(&mut terms, m.clone(), a * c);
        }
        RadicalCoeff { terms }
    }

    fn cyclo_radicands(&self) -> Vec<CycloNum> {
        let mut out: Vec<CycloNum> = Vec::new();
        for m in self.terms.keys() {
            for r in m.0.keys() {
                if let Radicand::Cyclo(b) = r {
                    if !out.contains(b) {
                        out.push(b.clone());
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Rewrite radicands that are perfect powers of one another (up to an
    /// exact-form unit) in terms of the smaller root.
    fn merge_radicands(self) -> RadicalCoeff {
        let rads = self.cyclo_radicands();
        if rads.len() < 2 {
            return self;
        }
        for (i, a) in rads.iter().enumerate() {
            for b in rads.iter().skip(i + 1) {
                for (big, small) in [(a, b), (b, a)] {
                    if let Some((k, unit)) = power_relation(big, small) {
                        return self.substitute(big, small, k, &unit).merge_radicands();
                    }
                }
            }
        }
        self
    }

    /// Replace every `big^e` by `small^{ke} · unit^e`, where
    /// `big = small^k · unit`.
    fn substitute(&self, big: &CycloNum, small: &CycloNum, k: u32, unit: &CycloNum) -> RadicalCoeff {
        let mut out = RadicalCoeff::zero();
        for (m, c) in &self.terms {
            let mut term = RadicalCoeff::from_cyclo(c.clone());
            for (r, e) in &m.0 {
                let factor = match r {
                    Radicand::Cyclo(b) if b == big => {
                        let ke = e * Rational::from_integer(k.into());
                        RadicalCoeff::factor_power(&Radicand::Cyclo(small.clone()), &ke)
                            .mul_plain(&cyclo_pow(unit, e).expect("unit is nonzero"))
                    }
                    _ => RadicalCoeff::factor_power(r, e),
                };
                term = term.mul_plain(&factor);
            }
            for (m2, c2) in term.terms {
                add_into(&mut out.terms, m2, c2);
            }
        }
        out
    }

    /// Multiplicative inverse; only monomials are invertible here.
    pub fn inv(&self) -> Result<RadicalCoeff> {
        self.pow(&-Rational::one())
    }

    pub fn div(&self, o: &RadicalCoeff) -> Result<RadicalCoeff> {
        Ok(self.mul_ref(&o.inv()?))
    }

    /// A coherent choice of `self^s` for a monomial.
    pub fn pow(&self, s: &Rational) -> Result<RadicalCoeff> {
        if self.is_zero() {
            return if s.is_positive() { Ok(RadicalCoeff::zero()) } else { Err(Error::DivisionByZero) };
        }
        if !self.is_monomial() {
            if s.is_integer() && !s.is_negative() {
                let mut acc = RadicalCoeff::one();
                for _ in 0..s.to_integer().to_u64().unwrap_or(0) {
                    acc = acc.mul_ref(self);
                }
                return Ok(acc);
            }
            return Err(Error::NonMonomial(self.to_string()));
        }
        let (m, c) = self.terms.iter().next().expect("monomial");
        let mut out = cyclo_pow(c, s)?;
        for (r, e) in &m.0 {
            out = out.mul_plain(&Self::factor_power(r, &(e * s)));
        }
        Ok(out.merge_radicands())
    }

    /// A chosen `n`-th root of a monomial.
    pub fn root(&self, n: u32) -> Result<RadicalCoeff> {
        self.pow(&Rational::new(1.into(), n.into()))
    }

    pub fn embed_ball(&self, bits: u32) -> Result<ComplexBall> {
        let mut acc = ComplexBall::zero();
        for (m, c) in &self.terms {
            let t = c.embed_ball(bits + 16).mul(&m.embed_ball(bits + 16)?);
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Certified sign of the real part, refining precision as needed.
    pub fn real_part_sign(&self) -> Result<Ordering> {
        if let Some(c) = self.as_cyclo() {
            let re = (&c + &c.conj()).scale_q(&q(1, 2));
            return re.real_sign();
        }
        let mut bits = crate::ball::DEFAULT_PRECISION;
        loop {
            if let Some(s) = self.embed_ball(bits)?.re.sign() {
                return Ok(s);
            }
            if bits >= crate::ball::MAX_PRECISION {
                return Err(Error::UndecidedSign { bits });
            }
            bits *= 2;
        }
    }

    /// Exact argument in turns for a monomial whose radicands are all
    /// primes (a positive real times a cyclotomic coefficient).
    pub fn angle(&self) -> Result<crate::cyclo::Angle> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if self.is_monomial() {
            let (m, c) = self.terms.iter().next().expect("monomial");
            if m.0.keys().all(|r| matches!(r, Radicand::Prime(_))) {
                return c.angle_exact(EXACT_FORM_BOUND);
            }
        }
        let bits = crate::ball::DEFAULT_PRECISION;
        let (lo, hi) = arg_turns(&self.embed_ball(bits)?, bits)?;
        Ok(crate::cyclo::Angle::Enclosure { lo, hi })
    }

    /// Approximate complex value, for diagnostics.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        match self.embed_ball(64) {
            Ok(b) => (b.re.mid.to_f64().unwrap_or(f64::NAN), b.im.mid.to_f64().unwrap_or(f64::NAN)),
            Err(_) => (f64::NAN, f64::NAN),
        }
    }
}

/// `Some((k, unit))` with `big = small^k · unit` and `unit` of exact polar
/// form, for `1 ≤ k ≤ RELATION_BOUND`.
fn power_relation(big: &CycloNum, small: &CycloNum) -> Option<(u32, CycloNum)> {
    let inv = small.inv().ok()?;
    let mut ratio = big.clone();
    for k in 1..=RELATION_BOUND {
        ratio = &ratio * &inv;
        if let Ok(Some(_)) = ratio.exact_form(4) {
            return Some((k, ratio.simplified()));
        }
    }
    None
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radicand::Prime(p) => write!(f, "{}", p),
            Radicand::Cyclo(c) => write!(f, "{}", c),
        }
    }
}

fn format_term(m: &RadicalMonomial, c: &CycloNum) -> String {
    let cs = c.to_string();
    let single = !cs[1..].contains(" + ") && !cs[1..].contains(" - ");
    let mut parts: Vec<String> = Vec::new();
    let mut sign = "";
    if m.is_one() {
        return cs;
    }
    if c.is_one() {
    } else if (-c).is_one() {
        sign = "-";
    } else if single {
        parts.push(cs);
    } else {
        parts.push(format!("({})", cs));
    }
    for (r, e) in &m.0 {
        parts.push(format!("[{}]^({})", r, e));
    }
    format!("{}{}", sign, parts.join("*"))
}

impl fmt::Display for RadicalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let t = format_term(m, c);
            if i == 0 {
                write!(f, "{}", t)?;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else if m.is_one() || c.to_string().contains(' ') && !t.starts_with('(') {
                write!(f, " + ({})", t)?;
            } else {
                write!(f, " + {}", t)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RadicalCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadicalCoeff({})", self)
    }
}

impl Zero for RadicalCoeff {
    fn zero() -> Self {
        RadicalCoeff::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for RadicalCoeff {
    fn one() -> Self {
        RadicalCoeff::from_int(1)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait for RadicalCoeff {
            type Output = RadicalCoeff;
            fn $method(self, rhs: RadicalCoeff) -> RadicalCoeff {
                $body(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a RadicalCoeff> for &'a RadicalCoeff {
            type Output = RadicalCoeff;
            fn $method(self, rhs: &'a RadicalCoeff) -> RadicalCoeff {
                $body(self, rhs)
            }
        }
        impl<'a> $trait<&'a RadicalCoeff> for RadicalCoeff {
            type Output = RadicalCoeff;
            fn $method(self, rhs: &'a RadicalCoeff) -> RadicalCoeff {
                $body(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &RadicalCoeff, b: &RadicalCoeff| a.add_ref(b));
forward_binop!(Sub, sub, |a: &RadicalCoeff, b: &RadicalCoeff| a.add_ref(&b.neg_ref()));
forward_binop!(Mul, mul, |a: &RadicalCoeff, b: &RadicalCoeff| a.mul_ref(b));

impl Neg for RadicalCoeff {
    type Output = RadicalCoeff;
    fn neg(self) -> RadicalCoeff {
        self.neg_ref()
    }
}

impl<'a> Neg for &'a RadicalCoeff {
    type Output = RadicalCoeff;
    fn neg(self) -> RadicalCoeff {
        self.neg_ref()
    }
}

impl From<CycloNum> for RadicalCoeff {
    fn from(c: CycloNum) -> Self {
        RadicalCoeff::from_cyclo(c)
    }
}

impl From<Rational> for RadicalCoeff {
    fn from(q: Rational) -> Self {
        RadicalCoeff::from_rational(q)
    }
}

impl From<i64> for RadicalCoeff {
    fn from(n: i64) -> Self {
        RadicalCoeff::from_int(n)
    }
}

impl Ring for RadicalCoeff {
    fn from_rational(q: &Rational) -> Self {
        RadicalCoeff::from_rational(q.clone())
    }
    fn scale(&self, q: &Rational) -> Self {
        self.scale_cyclo(&CycloNum::from_rational(q.clone()))
    }
}

impl Field for RadicalCoeff {
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_roots_of_primes_are_cyclotomic() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let s = sqrt_prime(p);
            assert_eq!(&s * &s, CycloNum::from_int(p as i64), "p = {}", p);
            assert_eq!(s.real_sign().unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn cube_root_of_two_cubes_back() {
        let two = RadicalCoeff::from_int(2);
        let r = two.root(3).unwrap();
        assert!(!r.as_cyclo().is_some());
        assert_eq!(&(&r * &r) * &r, two);
        let inv = r.inv().unwrap();
        assert_eq!(&r * &inv, RadicalCoeff::one());
    }

    #[test]
    fn root_of_negative_rational_uses_a_root_of_unity() {
        let m2 = RadicalCoeff::from_int(-2);
        let r = m2.root(3).unwrap();
        assert_eq!(r.pow(&q(3, 1)).unwrap(), m2);
        assert_eq!(r.to_string(), "z(6)*[2]^(1/3)");
        let b = r.embed_ball(64).unwrap();
        // 2^{1/3} e^{iπ/3}
        assert!(b.re.contains(&Rational::zero()) == false);
    }

    #[test]
    fn sqrt_of_eight_folds() {
        let r = RadicalCoeff::from_int(8).root(2).unwrap();
        assert!(r.as_cyclo().is_some());
        assert_eq!(&r * &r, RadicalCoeff::from_int(8));
        let r6 = RadicalCoeff::from_int(8).root(6).unwrap();
        assert!(r6.as_cyclo().is_some());
    }

    #[test]
    fn distinct_radicals_do_not_cancel() {
        let a = RadicalCoeff::from_int(2).root(3).unwrap();
        let b = RadicalCoeff::from_int(3).root(3).unwrap();
        let s = &a + &b;
        assert_eq!(s.num_terms(), 2);
        assert_eq!(&s - &b, a);
        assert!((&a - &a).is_zero());
        assert!(matches!(s.inv(), Err(Error::NonMonomial(_))));
    }

    #[test]
    fn generic_radicand_roots() {
        let c = CycloNum::from_int(3) + CycloNum::zeta(3, 1);
        let r = cyclo_pow(&c, &q(1, 2)).unwrap();
        assert_eq!(&r * &r, RadicalCoeff::from(c.clone()));
        let r3 = cyclo_pow(&c, &q(1, 3)).unwrap();
        assert_eq!(r3.pow(&q(3, 1)).unwrap(), RadicalCoeff::from(c.clone()));
        // c^2 meets c: the relation pass rewrites in terms of one radicand
        let c2 = &c * &c;
        let s = cyclo_pow(&c2, &q(1, 4)).unwrap();
        assert_eq!(s.pow(&q(4, 1)).unwrap(), RadicalCoeff::from(c2.clone()));
        let prod = &s * &r3;
        assert!(prod.cyclo_radicands().len() <= 1);
        assert_eq!(prod.pow(&q(12, 1)).unwrap(), RadicalCoeff::from(c2.pow(3).unwrap() * c.pow(4).unwrap()));
    }

    #[test]
    fn embedding_of_cube_root() {
        let r = RadicalCoeff::from_int(2).root(3).unwrap();
        let b = r.embed_ball(64).unwrap();
        let cube = b.mul(&b).mul(&b);
        assert!(cube.re.contains(&Rational::from_integer(2.into())));
        assert!(cube.im.contains(&Rational::zero()));
    }
}
