//! Truncated power series and Puiseux series.
//!
//! A [`PowerSeries`] of precision `n` stores the coefficients of
//! `x^0 … x^{n-1}`; everything beyond is unknown, and every operation
//! returns a result that is correct to the stated precision.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::radical::RadicalCoeff;
use crate::scalar::{Field, Ring};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Ring> PowerSeries<C> {
    pub fn new(mut coeffs: Vec<C>, precision: usize) -> Self {
        coeffs.resize(precision, C::zero());
        PowerSeries { coeffs }
    }

    pub fn zero(precision: usize) -> Self {
        Self::new(Vec::new(), precision)
    }

    pub fn one(precision: usize) -> Self {
        Self::new(vec![C::one()], precision)
    }

    /// The series `x`.
    pub fn var(precision: usize) -> Self {
        Self::new(vec![C::zero(), C::one()], precision)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn truncate(&self, precision: usize) -> Self {
        Self::new(self.coeffs.iter().take(precision).cloned().collect(), precision)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        Self::new((0..n).map(|i| self.coeffs[i].clone() + o.coeffs[i].clone()).collect(), n)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        Self::new((0..n).map(|i| self.coeffs[i].clone() - o.coeffs[i].clone()).collect(), n)
    }

    pub fn scale(&self, c: &C) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        let mut out = vec![C::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        PowerSeries { coeffs: out }
    }

    /// Multiply by `x^k`, keeping the precision window at `x^0 … x^{n-1}`
    /// shifted accordingly (the result has precision `n + k`).
    pub fn shift_up(&self, k: usize) -> Self {
        let mut c = vec![C::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        PowerSeries { coeffs: c }
    }

    /// Divide by `x^k`; the first `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Option<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return None;
        }
        Some(PowerSeries { coeffs: self.coeffs.iter().skip(k).cloned().collect() })
    }

    /// `self^r` for a series with constant term 1, via
    /// `n h_n = Σ_{k=1}^{n} (r k − (n − k)) f_k h_{n−k}`.
    pub fn pow_rational(&self, r: &Rational) -> Result<Self> {
        if !self.coeff(0).is_one() {
            return Err(Error::NonInvertibleLeadingTerm(format!("{:?}", self.coeff(0))));
        }
        let n = self.precision();
        let mut h: Vec<C> = Vec::with_capacity(n);
        if n == 0 {
            return Ok(PowerSeries { coeffs: h });
        }
        h.push(C::one());
        for m in 1..n {
            let mut acc = C::zero();
            for k in 1..=m {
                let f = &self.coeffs[k];
                if f.is_zero() {
                    continue;
                }
                let w = r * Rational::from_integer((k as i64).into()) - Rational::from_integer(((m - k) as i64).into());
                acc = acc + (f.clone() * h[m - k].clone()).scale(&w);
            }
            h.push(acc.scale(&Rational::new(1.into(), (m as i64).into())));
        }
        Ok(PowerSeries { coeffs: h })
    }

    /// `self(g)`; `g` must have zero constant term.
    pub fn compose(&self, g: &Self) -> Self {
        assert!(g.coeff(0).is_zero(), "inner series must vanish at 0");
        let n = self.precision().min(g.precision());
        let mut acc = Self::zero(n);
        for c in self.coeffs.iter().take(n).rev() {
            acc = acc.mul(g);
            acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let n = self.precision();
        let c = (1..n).map(|i| self.coeffs[i].scale(&Rational::from_integer((i as i64).into()))).collect();
        Self::new(c, n.saturating_sub(1))
    }
}

impl<C: Field> PowerSeries<C> {
    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.precision();
        let c0 = self.coeff(0);
        let inv0 = c0.try_inv().ok_or_else(|| Error::NonInvertibleLeadingTerm(format!("{:?}", c0)))?;
        let mut out = vec![C::zero(); n];
        if n == 0 {
            return Ok(PowerSeries { coeffs: out });
        }
        out[0] = inv0.clone();
        for m in 1..n {
            let mut acc = C::zero();
            for k in 1..=m {
                acc = acc + self.coeffs[k].clone() * out[m - k].clone();
            }
            out[m] = -(acc * inv0.clone());
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// Compositional inverse `g` with `self(g(x)) = x`, by Newton
    /// iteration `g ← g − (self(g) − x) / self'(g)`, doubling the number
    /// of correct terms each round. Requires `self(0) = 0` and an
    /// invertible linear coefficient.
    pub fn reversion(&self) -> Result<Self> {
        let n = self.precision();
        if !self.coeff(0).is_zero() {
            return Err(Error::NonInvertibleLeadingTerm("series does not vanish at 0".into()));
        }
        let c1 = self.coeff(1);
        let inv1 = c1.try_inv().ok_or_else(|| Error::NonInvertibleLeadingTerm(format!("{:?}", c1)))?;
        let deriv = self.derivative();
        let mut g = Self::new(vec![C::zero(), inv1], n.min(2));
        let mut prec = 2;
        while prec < n {
            prec = (2 * prec).min(n);
            let gp = Self::new(g.coeffs.clone(), prec);
            let f_of_g = self.truncate(prec).compose(&gp);
            let residual = f_of_g.sub(&Self::var(prec));
            let d = Self::new(deriv.coeffs.iter().take(prec).cloned().collect(), prec).compose(&gp);
            let step = residual.mul(&d.inverse()?);
            g = gp.sub(&step);
        }
        Ok(g.truncate(n))
    }
}

/// A truncated Puiseux series `Σ_k c_k x^{k/ram}`: every term with
/// `k < truncation` is present (or known to be zero); nothing is claimed
/// at or beyond it.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<C> {
    pub ram: u32,
    pub terms: BTreeMap<i64, C>,
    pub truncation: i64,
}

impl<C: Ring> PuiseuxSeries<C> {
    pub fn new(ram: u32, terms: BTreeMap<i64, C>, truncation: i64) -> Self {
        let terms = terms.into_iter().filter(|(k, c)| !c.is_zero() && *k < truncation).collect();
        PuiseuxSeries { ram, terms, truncation }
    }

    pub fn leading(&self) -> Option<(i64, &C)> {
        self.terms.iter().next().map(|(k, c)| (*k, c))
    }

    /// `c · x^{k/ram}` summed over known terms.
    pub fn coeff(&self, k: i64) -> C {
        self.terms.get(&k).cloned().unwrap_or_else(C::zero)
    }

    /// The same series written with ramification `ram * q`.
    pub fn ramify(&self, q: u32) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k * q as i64, c.clone())).collect();
        PuiseuxSeries { ram: self.ram * q, terms, truncation: self.truncation * q as i64 }
    }

    /// Product, with the truncation bound of a product of two fronts.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.ram, o.ram, "multiply Puiseux series at one ramification");
        let (Some((la, _)), Some((lb, _))) = (self.leading(), o.leading()) else {
            let t = self.truncation.min(o.truncation);
            return PuiseuxSeries::new(self.ram, BTreeMap::new(), t);
        };
        let trunc = (self.truncation + lb).min(o.truncation + la);
        let mut terms: BTreeMap<i64, C> = BTreeMap::new();
        for (ka, a) in &self.terms {
            for (kb, b) in &o.terms {
                if ka + kb < trunc {
                    let e = terms.entry(ka + kb).or_insert_with(C::zero);
                    *e = e.clone() + a.clone() * b.clone();
                }
            }
        }
        PuiseuxSeries::new(self.ram, terms, trunc)
    }
}

/// Result of [`invert_series`]: the expansion variable is `τ` itself when
/// the input's leading exponent is positive, and `w = 1/τ` when it is
/// negative (then `z` is small as `τ → ∞`).
#[derive(Clone, Debug, PartialEq)]
pub struct Inversion {
    pub series: PuiseuxSeries<RadicalCoeff>,
    pub in_reciprocal: bool,
}

/// Solve `τ = s(z)` for `z`, where `s` is a Puiseux series in `z` with a
/// nonzero leading term of nonzero exponent. At least `target_terms`
/// terms of the answer are certified.
pub fn invert_series(s: &PuiseuxSeries<RadicalCoeff>, target_terms: usize) -> Result<Inversion> {
    let (k0, c) =
        s.leading().map(|(k, c)| (k, c.clone())).ok_or_else(|| Error::NonInvertibleLeadingTerm("zero series".into()))?;
    if k0 == 0 {
        return Err(Error::NonInvertibleLeadingTerm("leading exponent is zero".into()));
    }
    let p = s.ram as i64;
    let m = k0.unsigned_abs() as u32;
    let sigma: i64 = if k0 > 0 { 1 } else { -1 };
    // s = c y^{k0} (1 + U(y)) with y = z^{1/p}
    let known = (s.truncation - k0).max(1) as usize;
    let n = target_terms.max(1).min(known) + 1;
    let cinv = c.inv().map_err(|_| Error::NonInvertibleLeadingTerm(c.to_string()))?;
    let u: Vec<RadicalCoeff> = (0..n).map(|i| &s.coeff(k0 + i as i64) * &cinv).collect();
    let one_plus_u = PowerSeries::new(u, n);
    let factor = one_plus_u.pow_rational(&Rational::new(sigma.into(), (m as i64).into()))?;
    // h(y) = y (1+U)^{σ/m}; y = H(v), v = (τ/c)^{σ/m}
    let h = factor.shift_up(1).truncate(n);
    let big_h = h.reversion()?;
    // z = y^p = H(v)^p = v^p (H(v)/v)^p
    let ratio = big_h.shift_down(1).expect("reversion vanishes at 0");
    let zp = ratio.pow_rational(&Rational::from_integer(p.into()))?;
    // v = κ τ^{σ/m} with κ = c^{−σ/m}
    let kappa = c.pow(&Rational::new((-sigma).into(), (m as i64).into()))?;
    let mut terms = BTreeMap::new();
    let mut kpow = kappa.pow(&Rational::from_integer(p.into()))?;
    for (i, coef) in zp.coeffs().iter().enumerate() {
        if !coef.is_zero() {
            terms.insert(p + i as i64, coef * &kpow);
        }
        kpow = &kpow * &kappa;
    }
    let series = PuiseuxSeries::new(m, terms, p + zp.precision() as i64);
    Ok(Inversion { series, in_reciprocal: sigma < 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn qs(v: &[i64], n: usize) -> PowerSeries<Rational> {
        PowerSeries::new(v.iter().map(|&c| q(c, 1)).collect(), n)
    }

    #[test]
    fn inverse_of_one_minus_x() {
        let s = qs(&[1, -1], 6);
        assert_eq!(s.inverse().unwrap(), qs(&[1, 1, 1, 1, 1, 1], 6));
    }

    #[test]
    fn square_root_squares_back() {
        let s = qs(&[1, 3, -2, 5], 8);
        let r = s.pow_rational(&q(1, 2)).unwrap();
        assert_eq!(r.mul(&r), s);
        let inv = s.pow_rational(&q(-1, 1)).unwrap();
        assert_eq!(inv, s.inverse().unwrap());
    }

    #[test]
    fn reversion_of_x_plus_x_squared() {
        // inverse of x + x^2 has Catalan coefficients with alternating signs
        let f = qs(&[0, 1, 1], 7);
        let g = f.reversion().unwrap();
        assert_eq!(g, qs(&[0, 1, -1, 2, -5, 14, -42], 7));
        assert_eq!(f.compose(&g), PowerSeries::var(7));
    }

    #[test]
    fn reversion_over_floats_too() {
        let f: PowerSeries<f64> = PowerSeries::new(vec![0.0, 2.0, 0.0, 1.0], 4);
        let g = f.reversion().unwrap();
        let back = f.compose(&g);
        assert!((back.coeff(1) - 1.0).abs() < 1e-12 && back.coeff(3).abs() < 1e-12);
    }

    fn rc(n: i64) -> RadicalCoeff {
        RadicalCoeff::from_int(n)
    }

    #[test]
    fn invert_linear() {
        let s = PuiseuxSeries::new(1, [(1, rc(2))].into_iter().collect(), 10);
        let inv = invert_series(&s, 4).unwrap();
        assert!(!inv.in_reciprocal);
        assert_eq!(inv.series.ram, 1);
        assert_eq!(inv.series.terms.get(&1), Some(&RadicalCoeff::from_rational(q(1, 2))));
        assert_eq!(inv.series.terms.len(), 1);
    }

    #[test]
    fn invert_square_introduces_ramification() {
        let s = PuiseuxSeries::new(1, [(2, rc(1))].into_iter().collect(), 10);
        let inv = invert_series(&s, 4).unwrap();
        assert_eq!(inv.series.ram, 2);
        assert_eq!(inv.series.terms.len(), 1);
        assert_eq!(inv.series.terms.get(&1), Some(&rc(1)));
    }

    #[test]
    fn invert_pole_series_back_substitutes() {
        // τ = z^{-2} + z^{-1}; z = w^{1/2}(1 + …) with w = 1/τ
        let s = PuiseuxSeries::new(1, [(-2, rc(1)), (-1, rc(1))].into_iter().collect(), 12);
        let inv = invert_series(&s, 6).unwrap();
        assert!(inv.in_reciprocal);
        assert_eq!(inv.series.ram, 2);
        assert_eq!(inv.series.leading(), Some((1, &rc(1))));
        // back-substitute: z^{-2} + z^{-1} in powers of w^{1/2} must equal w^{-1}
        let z = &inv.series;
        let zs = PowerSeries::new((1..z.truncation).map(|k| z.coeff(k)).collect(), (z.truncation - 1) as usize);
        // z = w^{1/2} · zs(w^{1/2}); z^{-1} = w^{-1/2} zs^{-1}, z^{-2} = w^{-1} zs^{-2}
        let zi = zs.inverse().unwrap();
        let zi2 = zi.mul(&zi);
        // w · (z^{-2} + z^{-1}) = zi2 + w^{1/2} zi  must be 1
        let total = zi2.add(&zi.shift_up(1).truncate(zi2.precision()));
        assert_eq!(total.coeff(0), rc(1));
        for k in 1..total.precision() {
            assert!(total.coeff(k).is_zero(), "coefficient {} = {}", k, total.coeff(k));
        }
    }
}
