//! Certified real and complex balls with exact rational centers.
//!
//! Centers and radii are stored as rationals; transcendental constants are
//! produced by fixed-point series at a working precision with explicit error
//! accounting, then rounded to dyadic rationals.

use std::cmp::Ordering;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Precision at which sign decisions give up.
pub const MAX_PRECISION: u32 = 2048;

#[derive(Clone, Debug, PartialEq)]
pub struct RealBall {
    pub mid: Rational,
    pub rad: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn ulp(bits: u32) -> Rational {
    Rational::new(BigInt::one(), pow2(bits))
}

/// Largest dyadic `k / 2^bits` not above `x`.
pub fn floor_dyadic(x: &Rational, bits: u32) -> Rational {
    let scaled = x.numer() * pow2(bits);
    Rational::new(scaled.div_floor(x.denom()), pow2(bits))
}

/// Smallest dyadic `k / 2^bits` not below `x`.
pub fn ceil_dyadic(x: &Rational, bits: u32) -> Rational {
    let scaled = x.numer() * pow2(bits);
    Rational::new(scaled.div_ceil(x.denom()), pow2(bits))
}

impl RealBall {
    pub fn exact(x: Rational) -> Self {
        RealBall { mid: x, rad: Rational::zero() }
    }

    pub fn new(mid: Rational, rad: Rational) -> Self {
        debug_assert!(!rad.is_negative());
        RealBall { mid, rad }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn lower(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn contains(&self, x: &Rational) -> bool {
        (&self.mid - x).abs() <= self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    /// Certified sign, or `None` when the ball straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.rad.is_zero() {
            return Some(self.mid.cmp(&Rational::zero()));
        }
        if self.lower().is_positive() {
            Some(Ordering::Greater)
        } else if self.upper().is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn add(&self, o: &RealBall) -> RealBall {
        RealBall::new(&self.mid + &o.mid, &self.rad + &o.rad)
    }

    pub fn sub(&self, o: &RealBall) -> RealBall {
        RealBall::new(&self.mid - &o.mid, &self.rad + &o.rad)
    }

    pub fn neg(&self) -> RealBall {
        RealBall::new(-&self.mid, self.rad.clone())
    }

    pub fn mul(&self, o: &RealBall) -> RealBall {
        let rad = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        RealBall::new(&self.mid * &o.mid, rad)
    }

    pub fn scale(&self, q: &Rational) -> RealBall {
        RealBall::new(&self.mid * q, &self.rad * q.abs())
    }

    /// Round the center to `bits` fractional bits, enlarging the radius.
    pub fn round(&self, bits: u32) -> RealBall {
        let mid = floor_dyadic(&self.mid, bits);
        let err = (&self.mid - &mid).abs();
        let rad = ceil_dyadic(&(&self.rad + err), bits);
        RealBall::new(mid, rad)
    }

    /// Upper bound on `|x|` for every `x` in the ball.
    pub fn abs_upper(&self) -> Rational {
        self.mid.abs() + &self.rad
    }

    /// Whether `self` lies inside `outer`.
    pub fn is_within(&self, outer: &RealBall) -> bool {
        outer.lower() <= self.lower() && self.upper() <= outer.upper()
    }
}

impl ComplexBall {
    pub fn exact(re: Rational, im: Rational) -> Self {
        ComplexBall { re: RealBall::exact(re), im: RealBall::exact(im) }
    }

    pub fn from_real(re: RealBall) -> Self {
        ComplexBall { re, im: RealBall::zero() }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero(), Rational::zero())
    }

    pub fn add(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)), im: self.re.mul(&o.im).add(&self.im.mul(&o.re)) }
    }

    pub fn scale(&self, q: &Rational) -> ComplexBall {
        ComplexBall { re: self.re.scale(q), im: self.im.scale(q) }
    }

    pub fn round(&self, bits: u32) -> ComplexBall {
        ComplexBall { re: self.re.round(bits), im: self.im.round(bits) }
    }

    pub fn max_rad(&self) -> Rational {
        std::cmp::max(self.re.rad.clone(), self.im.rad.clone())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn is_within(&self, outer: &ComplexBall) -> bool {
        self.re.is_within(&outer.re) && self.im.is_within(&outer.im)
    }

    /// Upper bound on the modulus.
    pub fn abs_upper(&self) -> Rational {
        self.re.abs_upper() + self.im.abs_upper()
    }

    /// Squared modulus as a real ball.
    pub fn norm_sqr(&self) -> RealBall {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
}

/// `atan(1/x)` scaled by `2^bits`, with an error bound in ulps.
fn atan_inv_fixed(x: u32, bits: u32) -> (BigInt, u64) {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = pow2(bits) / &x;
    let mut sum = power.clone();
    let mut k: u64 = 1;
    loop {
        power /= &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    (sum, 2 * k + 2)
}

/// Ball around pi with radius at most `2^-bits`.
pub fn pi(bits: u32) -> RealBall {
    static CACHE: OnceLock<Mutex<Option<(u32, RealBall)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cache.lock().unwrap();
    if let Some((b, ball)) = guard.as_ref() {
        if *b >= bits {
            return ball.round(bits + 4);
        }
    }
    let fresh = pi_uncached(bits.max(512));
    *guard = Some((bits.max(512), fresh.clone()));
    fresh.round(bits + 4)
}

fn pi_uncached(bits: u32) -> RealBall {
    let w = bits + 16;
    let (a, ea) = atan_inv_fixed(5, w);
    let (b, eb) = atan_inv_fixed(239, w);
    let value = a * 16 - b * 4;
    let err = 16 * ea + 4 * eb;
    RealBall::new(Rational::new(value, pow2(w)), Rational::new(BigInt::from(err), pow2(w)))
}

/// Balls around `cos(2 pi t)` and `sin(2 pi t)`.
pub fn cos_sin_turns(t: &Rational, bits: u32) -> (RealBall, RealBall) {
    // reduce to [-1/2, 1/2)
    let half = Rational::new(1.into(), 2.into());
    let shifted = t + &half;
    let t = &shifted - shifted.floor() - &half;
    let four_t = &t * Rational::from_integer(4.into());
    if four_t.is_integer() {
        let q = four_t.to_integer();
        let (c, s) = match q.mod_floor(&BigInt::from(4)).to_string().as_str() {
            "0" => (1, 0),
            "1" => (0, 1),
            "2" => (-1, 0),
            _ => (0, -1),
        };
        return (RealBall::exact(Rational::from_integer(c.into())), RealBall::exact(Rational::from_integer(s.into())));
    }
    let w = bits + 40;
    let p = pi(w);
    let two_t = &t * Rational::from_integer(2.into());
    let theta_exact = &p.mid * &two_t;
    let theta = floor_dyadic(&theta_exact, w);
    let theta_err = &p.rad * two_t.abs() + ulp(w);

    let mut cos_sum = Rational::one();
    let mut sin_sum = Rational::zero();
    let mut term = Rational::one();
    let two = Rational::from_integer(2.into());
    let bound = theta.abs() * &two + &two;
    let mut n: u64 = 0;
    loop {
        n += 1;
        term = floor_dyadic(&(&term * &theta / Rational::from_integer(n.into())), w);
        match n % 4 {
            1 => sin_sum += &term,
            2 => cos_sum -= &term,
            3 => sin_sum -= &term,
            _ => cos_sum += &term,
        }
        if term.abs() < ulp(w) && Rational::from_integer(n.into()) > bound {
            break;
        }
    }
    let n2 = Rational::from_integer((n * n * 64 + 16).into());
    let rad = n2 * ulp(w) + &theta_err + term.abs() * &two;
    (RealBall::new(cos_sum, rad.clone()).round(bits + 8), RealBall::new(sin_sum, rad).round(bits + 8))
}

/// Ball containing the positive real `n`-th root of every point of `x`.
/// Requires `x` to be certified positive.
pub fn nth_root(x: &RealBall, n: u32, bits: u32) -> Option<RealBall> {
    if x.sign() != Some(Ordering::Greater) {
        return None;
    }
    if n == 1 {
        return Some(x.clone());
    }
    let w = bits + 8;
    let scale = pow2(n * w);
    let lo = x.lower();
    let hi = x.upper();
    let lo_int = (lo.numer() * &scale).div_floor(lo.denom());
    let hi_int = (hi.numer() * &scale).div_ceil(hi.denom());
    let r_lo = lo_int.nth_root(n);
    let r_hi = hi_int.nth_root(n) + 1u32;
    let lo = Rational::new(r_lo, pow2(w));
    let hi = Rational::new(r_hi, pow2(w));
    let two = Rational::from_integer(2.into());
    Some(RealBall::new((&lo + &hi) / &two, (&hi - &lo) / &two))
}

/// `x^e` for a certified-positive ball and rational `e`.
pub fn pow_rational(x: &RealBall, e: &Rational, bits: u32) -> Option<RealBall> {
    if x.sign() != Some(Ordering::Greater) {
        return None;
    }
    let num = e.numer().clone();
    let den: u32 = e.denom().try_into().ok()?;
    let k: u32 = num.abs().try_into().ok()?;
    let mut lo = x.lower().pow(k as i32);
    let mut hi = x.upper().pow(k as i32);
    if num.sign() == Sign::Minus {
        let (l, h) = (hi.recip(), lo.recip());
        lo = l;
        hi = h;
    }
    let two = Rational::from_integer(2.into());
    let powered = RealBall::new((&lo + &hi) / &two, (&hi - &lo) / &two);
    nth_root(&powered, den, bits)
}

/// Certified enclosure `[lo, hi]` of `arg(z) / 2 pi`, with `lo` in `[0, 1)`.
///
/// Refines by bisection until the width is at most `2^-bits`, or until the
/// side of a test direction can no longer be certified.
pub fn arg_turns(z: &ComplexBall, bits: u32) -> Result<(Rational, Rational)> {
    let quarter = Rational::new(1.into(), 4.into());
    let half = Rational::new(1.into(), 2.into());
    let (mut lo, mut hi) = match (z.re.sign(), z.im.sign()) {
        (Some(Ordering::Greater), _) => (-quarter.clone(), quarter.clone()),
        (Some(Ordering::Less), _) => (quarter.clone(), &quarter * Rational::from_integer(3.into())),
        (_, Some(Ordering::Greater)) => (Rational::zero(), half.clone()),
        (_, Some(Ordering::Less)) => (-half.clone(), Rational::zero()),
        _ => return Err(Error::ZeroArgument),
    };
    let target = ulp(bits);
    while &hi - &lo > target {
        let m = (&lo + &hi) / Rational::from_integer(2.into());
        let (c, s) = cos_sin_turns(&m, bits + 8);
        let cross = c.mul(&z.im).sub(&s.mul(&z.re));
        match cross.sign() {
            Some(Ordering::Greater) => lo = m,
            Some(Ordering::Less) => hi = m,
            Some(Ordering::Equal) => {
                lo = m.clone();
                hi = m;
            }
            None => break,
        }
    }
    let shift = lo.floor();
    Ok((&lo - &shift, &hi - &shift))
}
