//! Finite enumeration of quasi-unipotent formal data with bounded rank,
//! and certification of the rigid ones.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::adk::{run_adk, Certificate, Outcome};
use crate::formal::{exponent_sum, is_quasi_unipotent, ExpFactor, FormalType, Location, Problem};
use crate::puiseux::PolarPart;
use crate::rigidity::rig_index;
use crate::Rational;

/// Partitions of `n` in decreasing lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All regular parts of rank `s` with exponents from `exps`.
fn regular_parts(exps: &[Rational], s: u32) -> Vec<Vec<(Rational, u32)>> {
    fn go(exps: &[Rational], s: u32, acc: &mut Vec<(Rational, u32)>, out: &mut Vec<Vec<(Rational, u32)>>) {
        let Some((a, rest)) = exps.split_first() else {
            if s == 0 {
                out.push(acc.clone());
            }
            return;
        };
        for m in (0..=s).rev() {
            if m == 0 {
                go(rest, s, acc, out);
                continue;
            }
            for part in partitions(m) {
                let n = acc.len();
                acc.extend(part.iter().map(|k| (a.clone(), *k)));
                go(rest, s - m, acc, out);
                acc.truncate(n);
            }
        }
    }
    let mut out = Vec::new();
    go(exps, s, &mut Vec::new(), &mut out);
    out
}

/// Canonical representatives of `Φ ∪ {0}`.
pub fn factor_heads(phis: &[PolarPart]) -> Vec<PolarPart> {
    let set: BTreeSet<PolarPart> = phis.iter().map(|p| p.canonical()).chain([PolarPart::zero()]).collect();
    set.into_iter().collect()
}

/// Every formal type of rank `r` at one point.
pub fn point_types(heads: &[PolarPart], n: u32, r: u32) -> Vec<FormalType> {
    fn go(heads: &[PolarPart], n: u32, rem: u32, acc: &mut Vec<ExpFactor>, out: &mut BTreeSet<FormalType>) {
        let Some((phi, rest)) = heads.split_first() else {
            if rem == 0 {
                out.insert(FormalType::new(acc.clone()));
            }
            return;
        };
        let p = phi.ram();
        // exponents in (1/N)Z ∩ [0, 1/p)
        let exps: Vec<Rational> = (0..n)
            .map(|k| Rational::new(k.into(), n.into()))
            .filter(|a| a * Rational::from_integer(p.into()) < Rational::from_integer(1.into()))
            .collect();
        for s in 0..=rem / p {
            if s == 0 {
                go(rest, n, rem, acc, out);
                continue;
            }
            for blocks in regular_parts(&exps, s) {
                acc.push(ExpFactor::new(phi.clone(), blocks));
                go(rest, n, rem - p * s, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(heads, n, r, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Candidates in canonical order: the cartesian product of per-point
/// types, filtered by integrality of the total exponent sum.
pub fn enumerate_candidates(locations: &[Location], phis: &[PolarPart], n: u32, r: u32) -> impl Iterator<Item = Problem> {
    let locs: Vec<Location> = locations.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let heads = factor_heads(phis);
    let types = if r == 0 || n == 0 { Vec::new() } else { point_types(&heads, n, r) };
    let k = locs.len();
    let total = if k == 0 { 0 } else { types.len().checked_pow(k as u32).unwrap_or(usize::MAX) };
    (0..total).filter_map(move |mut idx| {
        let mut choice = vec![0usize; k];
        for slot in (0..k).rev() {
            choice[slot] = idx % types.len();
            idx /= types.len();
        }
        let points: BTreeMap<Location, FormalType> = locs.iter().cloned().zip(choice.iter().map(|i| types[*i].clone())).collect();
        let p = Problem { order: n, points };
        exponent_sum(&p).is_integer().then_some(p)
    })
}

/// Per-candidate verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified(Certificate),
    /// `rig = 2` but the reduction did not reach rank one.
    Unresolved(String),
    NotRigid(i64),
}

pub fn certify(p: &Problem, max_steps: usize) -> Verdict {
    let rig = rig_index(p);
    if rig != 2 {
        return Verdict::NotRigid(rig);
    }
    match run_adk(p, max_steps) {
        Ok(Outcome::Certified(c)) => {
            debug_assert!(is_quasi_unipotent(p));
            Verdict::Certified(c)
        }
        Ok(Outcome::NotRigid { rig, stuck: false }) => Verdict::NotRigid(rig),
        Ok(Outcome::NotRigid { stuck: true, .. }) => Verdict::Unresolved("no rank-decreasing step".into()),
        Ok(Outcome::Undecided { steps }) => Verdict::Unresolved(format!("step budget {} exhausted", steps)),
        Err(e) => Verdict::Unresolved(e.to_string()),
    }
}

/// Certifies candidates in parallel; output keeps candidate order.
pub fn certify_all(cands: Vec<Problem>, max_steps: usize) -> Vec<(Problem, Verdict)> {
    cands
        .into_par_iter()
        .map(|p| {
            let v = certify(&p, max_steps);
            (p, v)
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RigidCount {
    pub certified: Vec<(Problem, Certificate)>,
    pub rig2_unresolved: Vec<Problem>,
    pub non_rigid_count: usize,
}

pub fn count_rigid(locations: &[Location], phis: &[PolarPart], n: u32, r: u32, max_steps: usize) -> RigidCount {
    let cands: Vec<Problem> = enumerate_candidates(locations, phis, n, r).collect();
    let mut out = RigidCount::default();
    for (p, v) in certify_all(cands, max_steps) {
        match v {
            Verdict::Certified(c) => out.certified.push((p, c)),
            Verdict::Unresolved(_) => out.rig2_unresolved.push(p),
            Verdict::NotRigid(_) => out.non_rigid_count += 1,
        }
    }
    out
}

/// `|Φ-selections| · N^{n−1}` for rank one, with `n` points.
pub fn rank_one_count(phis: &[PolarPart], n: u32, points: u32) -> u64 {
    let sel = factor_heads(phis).iter().filter(|p| p.ram() == 1).count() as u64;
    if points == 0 {
        return 0;
    }
    sel.pow(points) * (n as u64).pow(points - 1)
}
