//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use num_traits::{One, Zero};
use rigid_core::transforms::{dr_mc_oracle, middle_convolution, MatrixTuple};
use rigid_core::{CycloMatrix, CycloNum, ExpFactor, FormalType, Location, PolarPart, Problem, RadicalCoeff, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn sixth(r: &mut ChaCha8Rng) -> Rational {
    q(r.gen_range(0..6), 6)
}

fn small_coeff(r: &mut ChaCha8Rng) -> RadicalCoeff {
    match r.gen_range(0..4) {
        0 => RadicalCoeff::from_int(*[-2, -1, 1, 2, 3].choose(r).unwrap()),
        1 => RadicalCoeff::zeta(4, r.gen_range(0..4)),
        2 => RadicalCoeff::zeta(3, r.gen_range(1..3)),
        _ => RadicalCoeff::from_rational(q(*[-1, 1, 3].choose(r).unwrap(), 2)),
    }
}

/// Random rank-one data on at most five points, exponents in `(1/6)Z`,
/// irregular parts drawn from a palette of at most three.
pub fn random_rank_one(r: &mut ChaCha8Rng) -> Problem {
    let mut locs = vec![Location::int(0), Location::int(1), Location::Infinity, Location::int(-1), Location::int(2)];
    locs.truncate(r.gen_range(1..=5));
    let palette: Vec<PolarPart> =
        (0..r.gen_range(0..=3)).map(|_| PolarPart::monomial(small_coeff(r), r.gen_range(1..=3), 1)).collect();
    let points = locs
        .into_iter()
        .map(|l| {
            let phi = match palette.choose(r) {
                Some(p) if r.gen_bool(0.5) => p.clone(),
                _ => PolarPart::zero(),
            };
            (l, FormalType::new(vec![ExpFactor::new(phi, vec![(sixth(r), 1)])]))
        })
        .collect();
    Problem::from_points(6, points).unwrap()
}

fn regular_blocks(r: &mut ChaCha8Rng, s: u32) -> Vec<(Rational, u32)> {
    let mut out = Vec::new();
    let mut left = s;
    while left > 0 {
        let k = if left > 1 && r.gen_bool(0.3) { 2 } else { 1 };
        out.push((sixth(r), k));
        left -= k;
    }
    out
}

/// A random type of rank `rank`; `at_inf` allows slopes above one.
fn random_type(r: &mut ChaCha8Rng, rank: u32, irregular: bool, at_inf: bool) -> FormalType {
    let mut factors = Vec::new();
    let mut left = rank;
    while left > 0 {
        let kind = if irregular { r.gen_range(0..4) } else { 0 };
        match kind {
            1 if left >= 1 => {
                let j = if at_inf { r.gen_range(1..=2) } else { 1 };
                factors.push(ExpFactor::new(PolarPart::monomial(small_coeff(r), j, 1), vec![(sixth(r), 1)]));
                left -= 1;
            }
            2 if left >= 2 => {
                let j = *[1, 3].choose(r).unwrap();
                factors.push(ExpFactor::new(PolarPart::monomial(small_coeff(r), j, 2), vec![(q(r.gen_range(0..3), 6), 1)]));
                left -= 2;
            }
            3 if left >= 3 => {
                let j = *[1, 2].choose(r).unwrap();
                factors.push(ExpFactor::new(
                    PolarPart::monomial(RadicalCoeff::from_int(1), j, 3),
                    vec![(q(r.gen_range(0..2), 6), 1)],
                ));
                left -= 3;
            }
            _ => {
                factors.push(ExpFactor::regular(regular_blocks(r, 1)));
                left -= 1;
            }
        }
    }
    FormalType::new(factors)
}

/// Random problems of rank ≤ 3 on `{0, 1, ∞}` (plus `−1` sometimes),
/// tame or irregular.
pub fn random_problem(r: &mut ChaCha8Rng, irregular: bool) -> Problem {
    let rank = r.gen_range(1..=3);
    let mut locs = vec![Location::int(0), Location::int(1)];
    if r.gen_bool(0.3) {
        locs.push(Location::int(-1));
    }
    let mut points: Vec<(Location, FormalType)> = locs
        .into_iter()
        .map(|l| {
            let irr = irregular && r.gen_bool(0.5);
            let t = random_type(r, rank, irr, false);
            (l, t)
        })
        .collect();
    points.push((Location::Infinity, random_type(r, rank, irregular, true)));
    Problem::from_points(6, points).unwrap()
}

pub fn zeta(n: u32, k: i64) -> CycloNum {
    CycloNum::zeta(n, k)
}

pub fn companion(r1: u32, r2: u32) -> CycloMatrix {
    let (a, b) = (CycloNum::zeta(6, r1 as i64), CycloNum::zeta(6, r2 as i64));
    let s = &a + &b;
    let p = &a * &b;
    CycloMatrix::from_vec(2, 2, vec![CycloNum::zero(), -&p, CycloNum::one(), s])
}

/// Every irreducible Levelt pair with eigenvalues in μ6, the second
/// matrix scaled by `γ ∈ μ6` so that all irreducible rank-two triples
/// occur, and every `χ ∈ μ6 ∖ {1}`.
pub fn levelt_grid() -> Vec<(MatrixTuple, u32)> {
    let pairs: Vec<(u32, u32)> = (0..6).flat_map(|i| (i..6).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for &(a1, a2) in &pairs {
        for &(b1, b2) in &pairs {
            if [a1, a2].iter().any(|a| [b1, b2].contains(a)) {
                continue;
            }
            let a = companion(a1, a2);
            let b = companion(b1, b2);
            let a1m = a.inverse().unwrap().mul(&b);
            for g in 0..6 {
                let scaled = a1m.scale(&CycloNum::zeta(6, g));
                for k in 1..6 {
                    out.push((MatrixTuple::new(vec![a.clone(), scaled.clone()]), k));
                }
            }
        }
    }
    out
}

pub fn mc_check(t: &MatrixTuple, k: u32, locs: &[Location]) -> Result<(), String> {
    let p = t.formal_data(locs, 6).map_err(|e| e.to_string())?;
    let c = Rational::new(k.into(), 6.into());
    let formal = middle_convolution(&p, &c);
    let dr = dr_mc_oracle(t, &CycloNum::zeta(6, k as i64));
    match (formal, dr) {
        (Ok(f), Ok(d)) => {
            let oracle = d.formal_data(locs, 6).map_err(|e| e.to_string())?;
            if f.same_data(&oracle) {
                Ok(())
            } else {
                Err(format!("input {:?}\nχ = {}/6\nformal {:?}\noracle {:?}", p, k, f, oracle))
            }
        }
        (f, d) => Err(format!("input {:?}, χ = {}/6: formal {:?}, oracle {:?}", p, k, f.map(|x| x.rank()), d.map(|x| x.rank()))),
    }
}

/// The rank-one grid: `a, b ∈ μ6` at `0, 1`, `χ = k/6`, reducible cases
/// (a trivial point, or trivial resulting `∞`) excluded.
pub fn rank_one_grid() -> Vec<(MatrixTuple, u32)> {
    let mut out = Vec::new();
    for a in 1..6 {
        for b in 1..6 {
            for k in 1..6u32 {
                if (a + b + k as i64) % 6 == 0 {
                    continue;
                }
                let t = MatrixTuple::new(vec![
                    CycloMatrix::from_vec(1, 1, vec![CycloNum::zeta(6, a)]),
                    CycloMatrix::from_vec(1, 1, vec![CycloNum::zeta(6, b)]),
                ]);
                out.push((t, k));
            }
        }
    }
    out
}
