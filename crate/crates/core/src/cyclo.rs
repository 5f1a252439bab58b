//! Exact arithmetic in cyclotomic fields `Q(ζ_N)`.
//!
//! An element is stored at some level `N` as its coordinates in the power
//! basis `1, ζ, …, ζ^{φ(N)-1}` modulo the cyclotomic polynomial `Φ_N`.
//! Binary operations move both operands to the lcm level. Equality is
//! level independent; ordering, hashing and printing go through the
//! minimal-level normal form, which is computed once and cached.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{arg_turns, cos_sin_turns, ComplexBall, RealBall};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Field, Ring};
use crate::Rational;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

type Poly = Arc<Vec<BigInt>>;

/// Coefficients of `Φ_n`, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Poly {
    static CACHE: OnceLock<Mutex<HashMap<u32, Poly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in divisors(n as u64) {
        if d == n as u64 {
            continue;
        }
        let divisor = cyclotomic_polynomial(d as u32);
        poly = divide_monic(&poly, &divisor);
    }
    let poly = Arc::new(poly);
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

fn divide_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Reduce a polynomial in `ζ_n` modulo `Φ_n`.
fn reduce(mut poly: Vec<Rational>, n: u32) -> Vec<Rational> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if poly.len() <= deg {
        poly.resize(deg, Rational::zero());
        return poly;
    }
    for i in (deg..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[i], Rational::zero());
        if c.is_zero() {
            continue;
        }
        for (j, pj) in phi.iter().enumerate().take(deg) {
            if !pj.is_zero() {
                poly[i - deg + j] -= &c * pj;
            }
        }
    }
    poly.truncate(deg);
    poly
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Argument of a nonzero number, in turns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Angle {
    Exact(Rational),
    Enclosure { lo: Rational, hi: Rational },
}

impl Angle {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Angle::Exact(t) => Some(t),
            Angle::Enclosure { .. } => None,
        }
    }
}

#[derive(Clone)]
pub struct CycloNum {
    level: u32,
    coeffs: Vec<Rational>,
    normal: OnceLock<Arc<(u32, Vec<Rational>)>>,
}

impl CycloNum {
    /// Element of `Q(ζ_level)` from power-basis coefficients of any length.
    pub fn from_coeffs(level: u32, coeffs: Vec<Rational>) -> Self {
        assert!(level > 0, "cyclotomic level must be positive");
        let coeffs = reduce(coeffs, level);
        CycloNum { level, coeffs, normal: OnceLock::new() }.demote_rational()
    }

    pub fn from_rational(q: Rational) -> Self {
        CycloNum { level: 1, coeffs: vec![q], normal: OnceLock::new() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    /// `ζ_n^k` where `ζ_n = exp(2πi/n)`.
    pub fn zeta(n: u32, k: i64) -> Self {
        let e = k.rem_euclid(n as i64) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = Rational::one();
        Self::from_coeffs(n, c)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn demote_rational(self) -> Self {
        if self.level != 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Self::from_rational(self.coeffs[0].clone())
        } else {
            self
        }
    }

    pub fn is_rational(&self) -> bool {
        self.level == 1 || self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// The same element written at level `m`, which must be a multiple of
    /// the current level.
    pub fn at_level(&self, m: u32) -> CycloNum {
        if m == self.level {
            return self.clone();
        }
        assert!(m % self.level == 0, "level {} does not divide {}", self.level, m);
        let step = (m / self.level) as usize;
        let mut poly = vec![Rational::zero(); step * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        CycloNum { level: m, coeffs: reduce(poly, m), normal: OnceLock::new() }
    }

    fn coerce(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        let m = lcm(a.level as u64, b.level as u64) as u32;
        (a.at_level(m), b.at_level(m))
    }

    fn add_ref(&self, o: &CycloNum) -> CycloNum {
        if self.level == o.level {
            let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
            return CycloNum { level: self.level, coeffs, normal: OnceLock::new() }.demote_rational();
        }
        let (a, b) = Self::coerce(self, o);
        a.add_ref(&b)
    }

    fn mul_ref(&self, o: &CycloNum) -> CycloNum {
        if self.level == 1 {
            return o.scale_q(&self.coeffs[0]);
        }
        if o.level == 1 {
            return self.scale_q(&o.coeffs[0]);
        }
        if self.level != o.level {
            let (a, b) = Self::coerce(self, o);
            return a.mul_ref(&b);
        }
        let mut poly = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(self.level, poly)
    }

    pub fn scale_q(&self, q: &Rational) -> CycloNum {
        let coeffs = self.coeffs.iter().map(|c| c * q).collect();
        CycloNum { level: self.level, coeffs, normal: OnceLock::new() }.demote_rational()
    }

    pub fn pow(&self, k: i64) -> Result<CycloNum> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = CycloNum::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_ref(&sq);
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse, by solving `self * x = 1` in the power basis.
    pub fn inv(&self) -> Result<CycloNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        let n = self.coeffs.len();
        let columns: Vec<Vec<Rational>> =
            (0..n).map(|j| self.mul_ref(&Self::zeta(self.level, j as i64)).at_level(self.level).coeffs).collect();
        let m = Matrix::from_columns(n, &columns);
        let mut rhs = vec![Rational::zero(); n];
        rhs[0] = Rational::one();
        let x = m.solve(&rhs).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_coeffs(self.level, x))
    }

    pub fn div(&self, o: &CycloNum) -> Result<CycloNum> {
        Ok(self.mul_ref(&o.inv()?))
    }

    /// The Galois automorphism `ζ ↦ ζ^k`; `k` must be prime to the level.
    pub fn galois_apply(&self, k: i64) -> Result<CycloNum> {
        let n = self.level as i64;
        if k.gcd(&n) != 1 {
            return Err(Error::NotCoprime { k, level: self.level });
        }
        let mut poly = vec![Rational::zero(); self.level as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = (i as i64 * k).rem_euclid(n) as usize;
            poly[e] += c;
        }
        Ok(Self::from_coeffs(self.level, poly))
    }

    /// Complex conjugate.
    pub fn conj(&self) -> CycloNum {
        self.galois_apply(-1).expect("-1 is prime to every level")
    }

    /// Minimal level and coordinates there.
    pub fn normal_form(&self) -> (u32, &[Rational]) {
        let nf = self.normal.get_or_init(|| Arc::new(self.compute_normal()));
        (nf.0, &nf.1)
    }

    fn compute_normal(&self) -> (u32, Vec<Rational>) {
        if self.is_rational() {
            return (1, vec![self.coeffs[0].clone()]);
        }
        let n = self.level;
        for d in divisors(n as u64) {
            let d = d as u32;
            if d == 1 {
                continue;
            }
            if d == n {
                break;
            }
            let dim = totient(d as u64) as usize;
            let columns: Vec<Vec<Rational>> = (0..dim).map(|j| Self::zeta(d, j as i64).at_level(n).coeffs).collect();
            let m = Matrix::from_columns(self.coeffs.len(), &columns);
            if let Some(x) = m.solve(&self.coeffs) {
                return (d, x);
            }
        }
        (n, self.coeffs.clone())
    }

    /// The element rewritten at its minimal level.
    pub fn simplified(&self) -> CycloNum {
        let (d, c) = self.normal_form();
        if d == self.level {
            return self.clone();
        }
        CycloNum { level: d, coeffs: c.to_vec(), normal: OnceLock::new() }
    }

    /// Complex embedding for `ζ_N = exp(2πi/N)` with radius at most
    /// `2^-bits * max(1, |self|)`.
    pub fn embed_ball(&self, bits: u32) -> ComplexBall {
        let size: Rational = self.coeffs.iter().map(|c| c.abs()).sum::<Rational>() + Rational::one();
        let extra = size.to_integer().bits() as u32 + self.coeffs.len().ilog2() + 8;
        let w = bits + extra;
        let mut acc = ComplexBall::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (cs, sn) = cos_sin_turns(&Rational::new((i as i64).into(), (self.level as i64).into()), w);
            acc = acc.add(&ComplexBall { re: cs.scale(c), im: sn.scale(c) });
        }
        acc.round(bits + 4)
    }

    /// Embedding of a real element as a real ball.
    pub fn embed_real(&self, bits: u32) -> RealBall {
        self.embed_ball(bits).re
    }

    /// Exact polar form: `(q, l, t)` with `self^l = q ∈ Q` and
    /// `arg(self) = t` turns, `t ∈ [0, 1)`. Only powers `self^{2·lcm(2,N)·m}`
    /// with `m ≤ max_power` are tried.
    pub fn exact_form(&self, max_power: u32) -> Result<Option<(Rational, u32, Rational)>> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if let Some(q) = self.to_rational() {
            let t = if q.is_negative() { Rational::new(1.into(), 2.into()) } else { Rational::zero() };
            return Ok(Some((q, 1, t)));
        }
        let me = self.simplified();
        let base_exp = 2 * lcm(2, me.level as u64) as i64;
        let b = me.pow(base_exp)?;
        let mut c = b.clone();
        for m in 1..=max_power as i64 {
            if m > 1 {
                c = c.mul_ref(&b);
            }
            if let Some(q) = c.to_rational() {
                let l = base_exp * m;
                let t = me.pick_angle(2 * l)?;
                return Ok(Some((q, l as u32, t)));
            }
        }
        Ok(None)
    }

    /// Argument in turns: exact when `self` is a root of unity times a
    /// positive real radical of a rational, otherwise a certified enclosure.
    pub fn angle_exact(&self, max_power: u32) -> Result<Angle> {
        if let Some((_, _, t)) = self.exact_form(max_power)? {
            return Ok(Angle::Exact(t));
        }
        let bits = crate::ball::DEFAULT_PRECISION;
        let (lo, hi) = arg_turns(&self.embed_ball(bits), bits)?;
        Ok(Angle::Enclosure { lo, hi })
    }

    /// The argument is known to be `k / denom`; narrow `k` with balls, then
    /// confirm the survivor exactly (`self * ζ^{-k}` real and positive).
    fn pick_angle(&self, denom: i64) -> Result<Rational> {
        let bits = 2 * (64 - denom.leading_zeros()) + 24;
        let z = self.embed_ball(bits);
        let (lo, hi) = arg_turns(&z, bits)?;
        let k_lo = (&lo * int(denom)).ceil().to_integer().to_i64().unwrap_or(0);
        let k_hi = (&hi * int(denom)).floor().to_integer().to_i64().unwrap_or(denom);
        for k in k_lo..=k_hi {
            let w = self * &CycloNum::zeta(denom as u32, -k);
            if w == w.conj() && w.real_sign()? == Ordering::Greater {
                let t = Rational::new(k.into(), denom.into());
                return Ok(&t - t.floor());
            }
        }
        Err(Error::InvariantViolation("argument enclosure misses every candidate".into()))
    }

    /// Certified sign of the real part difference-free test `self == 0`
    /// is exact; this decides the sign of a real element.
    pub fn real_sign(&self) -> Result<Ordering> {
        if let Some(q) = self.to_rational() {
            return Ok(q.cmp(&Rational::zero()));
        }
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        let mut bits = crate::ball::DEFAULT_PRECISION;
        loop {
            if let Some(s) = self.embed_real(bits).sign() {
                return Ok(s);
            }
            if bits >= crate::ball::MAX_PRECISION {
                return Err(Error::UndecidedSign { bits });
            }
            bits *= 2;
        }
    }

    /// Approximate complex value, for diagnostics.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let b = self.embed_ball(64);
        (b.re.mid.to_f64().unwrap_or(f64::NAN), b.im.mid.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum({})", self)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mut level, coeffs) = self.normal_form();
        let mut coeffs = coeffs.to_vec();
        // odd levels: Q(ζ_d) = Q(ζ_2d), and the level-2d basis is often
        // sparser (1 + ζ_3 = ζ_6)
        if level % 2 == 1 && level > 1 {
            let doubled = self.at_level(level * 2);
            let count = |c: &[Rational]| c.iter().filter(|x| !x.is_zero()).count();
            if count(&doubled.coeffs) < count(&coeffs) {
                level *= 2;
                coeffs = doubled.coeffs;
            }
        }
        let mut first = true;
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", mag)?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            if k == 1 {
                write!(f, "z({})", level)?;
            } else {
                write!(f, "z({})^{}", level, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.level == other.level {
            return self.coeffs == other.coeffs;
        }
        self.sub_ref(other).is_zero()
    }
}

impl Eq for CycloNum {}

impl CycloNum {
    fn sub_ref(&self, o: &CycloNum) -> CycloNum {
        self.add_ref(&o.neg_ref())
    }

    fn neg_ref(&self) -> CycloNum {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        CycloNum { level: self.level, coeffs, normal: OnceLock::new() }
    }

    /// Sort key: minimal level, then coordinates there.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let (la, ca) = self.normal_form();
        let (lb, cb) = other.normal_form();
        la.cmp(&lb).then_with(|| ca.cmp(cb))
    }
}

impl Ord for CycloNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_canonical(other)
    }
}

impl PartialOrd for CycloNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for CycloNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let (l, c) = self.normal_form();
        l.hash(state);
        c.hash(state);
    }
}

impl Zero for CycloNum {
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for CycloNum {
    fn one() -> Self {
        Self::from_int(1)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: CycloNum) -> CycloNum {
                self.$inner(&rhs)
            }
        }
        impl<'a> $trait<&'a CycloNum> for &'a CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: &'a CycloNum) -> CycloNum {
                self.$inner(rhs)
            }
        }
        impl<'a> $trait<&'a CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: &'a CycloNum) -> CycloNum {
                self.$inner(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        self.neg_ref()
    }
}

impl<'a> Neg for &'a CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        self.neg_ref()
    }
}

impl Ring for CycloNum {
    fn from_rational(q: &Rational) -> Self {
        CycloNum::from_rational(q.clone())
    }
    fn scale(&self, q: &Rational) -> Self {
        self.scale_q(q)
    }
}

impl Field for CycloNum {
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl From<Rational> for CycloNum {
    fn from(q: Rational) -> Self {
        CycloNum::from_rational(q)
    }
}

impl From<i64> for CycloNum {
    fn from(n: i64) -> Self {
        CycloNum::from_int(n)
    }
}
