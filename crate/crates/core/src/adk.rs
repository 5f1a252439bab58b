//! The reduction driver: normalize, pick a rank-decreasing twist followed
//! by a middle convolution or a Fourier transform, repeat until rank one,
//! and record every move so it can be undone.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::formal::{reduce_mod, FormalType, Location, Problem};
use crate::moebius::{transform_problem, Moebius};
use crate::puiseux::PolarPart;
use crate::rigidity::rig_index;
use crate::transforms::{fourier_global, inverse_fourier, middle_convolution, predicted_mc_rank, twist_global, RankOneData};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// The Möbius map sending these three locations to `0, 1, ∞`.
    Moebius([Location; 3]),
    AddApparent(Location),
    Twist(RankOneData),
    /// Middle convolution with `χ = e^{2πic}`.
    Mc(Rational),
    Fourier,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    /// Rank after the step.
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub initial: Problem,
    pub steps: Vec<Step>,
    pub terminal: Problem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Certified(Certificate),
    /// `stuck` marks a search failure at `rig = 2`, which is not a proof
    /// of non-rigidity.
    NotRigid {
        rig: i64,
        stuck: bool,
    },
    Undecided {
        steps: usize,
    },
}

/// Maps `x0, x1, x∞` to `0, 1, ∞`.
pub fn normalizing_map(locs: &[Location; 3]) -> Result<Moebius> {
    let m1 = match &locs[2] {
        Location::Finite(x) => Moebius::to_infinity(x),
        Location::Infinity => Moebius::identity(),
    };
    let y = |l: &Location| match m1.apply(l) {
        Location::Finite(v) => Ok(v),
        Location::Infinity => Err(Error::InvalidProblem("normalizing locations coincide".into())),
    };
    let (y0, y1) = (y(&locs[0])?, y(&locs[1])?);
    let m2 = Moebius::new(CycloNum::one(), -&y0, CycloNum::zero(), &y1 - &y0)?;
    Ok(m2.compose(&m1))
}

/// `0, 1, −1, 2, −2, …`
fn candidate_locations() -> impl Iterator<Item = Location> {
    (0..).flat_map(|k: i64| if k == 0 { vec![Location::int(0)] } else { vec![Location::int(k), Location::int(-k)] })
}

fn first_unused(p: &Problem) -> Location {
    candidate_locations().find(|l| !p.points.contains_key(l)).expect("infinite supply")
}

fn special_points(p: &Problem) -> Vec<Location> {
    p.points.iter().filter(|(_, t)| t.max_ram() >= 2).map(|(l, _)| l.clone()).collect()
}

fn apply(p: &Problem, kind: &StepKind) -> Result<Problem> {
    match kind {
        StepKind::Moebius(locs) => transform_problem(&normalizing_map(locs)?, p),
        StepKind::AddApparent(l) => Ok(p.with_apparent(l.clone())),
        StepKind::Twist(l) => twist_global(p, l),
        StepKind::Mc(c) => middle_convolution(p, c),
        StepKind::Fourier => fourier_global(p),
    }
}

fn push(p: &mut Problem, steps: &mut Vec<Step>, kind: StepKind) -> Result<()> {
    *p = apply(p, &kind)?;
    steps.push(Step { kind, rank: p.rank() });
    Ok(())
}

/// At least `0, 1, ∞` present; the special point (a ramified factor) or
/// else an apparent singularity at `∞`.
pub fn normalize_problem(p: &Problem) -> Result<(Problem, Vec<Step>)> {
    let special = special_points(p);
    if special.len() > 1 {
        return Err(Error::TwoSpecialPoints);
    }
    let mut cur = p.clone();
    let mut steps = Vec::new();
    let x_inf = match special.first() {
        Some(s) => s.clone(),
        None => match cur.infinity() {
            Some(t) if t.is_apparent() => Location::Infinity,
            _ => {
                let l = first_unused(&cur);
                push(&mut cur, &mut steps, StepKind::AddApparent(l.clone()))?;
                l
            }
        },
    };
    let mut others: Vec<Location> = cur.points.keys().filter(|l| **l != x_inf).cloned().collect();
    while others.len() < 2 {
        let l = first_unused(&cur);
        push(&mut cur, &mut steps, StepKind::AddApparent(l.clone()))?;
        others.push(l);
    }
    let pick = |want: Location, others: &mut Vec<Location>| {
        let i = others.iter().position(|l| *l == want).unwrap_or(0);
        others.remove(i)
    };
    let x0 = pick(Location::int(0), &mut others);
    let x1 = pick(Location::int(1), &mut others);
    let locs = [x0, x1, x_inf];
    if locs != [Location::int(0), Location::int(1), Location::Infinity] {
        push(&mut cur, &mut steps, StepKind::Moebius(locs))?;
    }
    Ok((cur, steps))
}

/// Choices `(φ_x, α_x)` at a finite point: an unramified factor and one
/// of its exponents.
fn point_options(t: &FormalType) -> Vec<(PolarPart, Rational)> {
    let mut out = Vec::new();
    for f in t.factors() {
        if f.ram() != 1 {
            continue;
        }
        let mut exps: Vec<Rational> = f.reg.blocks().iter().map(|(a, _)| a.clone()).collect();
        exps.dedup();
        for a in exps {
            out.push((f.phi.clone(), a));
        }
    }
    out
}

fn mc_candidates(p: &Problem) -> Vec<(RankOneData, Rational, i64)> {
    let finite: Vec<(&Location, Vec<(PolarPart, Rational)>)> =
        p.points.iter().filter(|(l, _)| !l.is_infinity()).map(|(l, t)| (l, point_options(t))).collect();
    if finite.iter().any(|(_, o)| o.is_empty()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; finite.len()];
    loop {
        let mut l = RankOneData::new();
        let mut sum = Rational::zero();
        for (k, (loc, opts)) in finite.iter().enumerate() {
            let (phi, a) = &opts[idx[k]];
            l = l.with((*loc).clone(), phi.neg(), -a.clone());
            sum += a;
        }
        let inf_psi = PolarPart::zero();
        l = l.with(Location::Infinity, inf_psi, sum);
        if let Ok(tw) = twist_global(p, &l) {
            let mut cs: Vec<Rational> = tw
                .infinity()
                .and_then(|t| t.regular_part())
                .map(|r| r.blocks().iter().map(|(a, _)| reduce_mod(a, &Rational::from_integer(1.into()))).collect())
                .unwrap_or_default();
            cs.sort();
            cs.dedup();
            for c in cs.into_iter().filter(|c| !c.is_zero()) {
                let rank = predicted_mc_rank(&tw, &c);
                out.push((l.clone(), c, rank));
            }
        }
        // odometer over the product of options
        let mut k = 0;
        loop {
            if k == finite.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < finite[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn fourier_candidates(p: &Problem) -> Vec<RankOneData> {
    let mut psis = vec![PolarPart::zero()];
    if let Some(t) = p.infinity() {
        for f in t.factors() {
            let h = f.phi.integral_head();
            if !h.is_zero() {
                psis.push(h.neg());
            }
        }
    }
    let mut shifts: Vec<Option<(Location, Rational)>> = vec![None];
    for (l, t) in &p.points {
        if l.is_infinity() {
            continue;
        }
        for (phi, a) in point_options(t) {
            if phi.is_zero() && !a.is_zero() {
                shifts.push(Some((l.clone(), a)));
            }
        }
    }
    let mut out = Vec::new();
    for psi in &psis {
        for s in &shifts {
            let mut l = RankOneData::new();
            let mut b = Rational::zero();
            if let Some((loc, a)) = s {
                l = l.with(loc.clone(), PolarPart::zero(), -a.clone());
                b = a.clone();
            }
            l = l.with(Location::Infinity, psi.clone(), b);
            if !out.contains(&l) {
                out.push(l);
            }
        }
    }
    out
}

fn try_fourier(p: &Problem) -> Result<Option<(Vec<StepKind>, u32)>> {
    let r = p.rank();
    let mut best: Option<(RankOneData, u32)> = None;
    for l in fourier_candidates(p) {
        let tw = twist_global(p, &l)?;
        let rank = match fourier_global(&tw) {
            Ok(f) => f.rank(),
            Err(e) if inconsistent(&e) => continue,
            Err(e) => return Err(e),
        };
        if rank < r && best.as_ref().map_or(true, |(_, b)| rank < *b) {
            best = Some((l, rank));
        }
    }
    Ok(best.map(|(l, rank)| {
        let mut kinds = Vec::new();
        if !l.is_trivial() {
            kinds.push(StepKind::Twist(l));
        }
        kinds.push(StepKind::Fourier);
        (kinds, rank)
    }))
}

fn try_mc(p: &Problem) -> Result<Option<(Vec<StepKind>, u32)>> {
    let r = p.rank() as i64;
    let mut cands: Vec<(RankOneData, Rational, i64)> =
        mc_candidates(p).into_iter().filter(|(_, _, rank)| *rank >= 1 && *rank < r).collect();
    cands.sort_by_key(|(_, _, rank)| *rank);
    for (l, c, rank) in cands {
        let tw = twist_global(p, &l)?;
        match middle_convolution(&tw, &c) {
            Ok(_) => {
                let mut kinds = Vec::new();
                if !l.is_trivial() {
                    kinds.push(StepKind::Twist(l));
                }
                kinds.push(StepKind::Mc(c));
                return Ok(Some((kinds, rank as u32)));
            }
            Err(e) if inconsistent(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Errors meaning the candidate's formal data cannot come from an
/// irreducible connection (so the candidate is discarded).
fn inconsistent(e: &Error) -> bool {
    matches!(e, Error::PunctualMismatch { .. } | Error::RankZeroOutput | Error::NonCyclotomicLocation(_))
}

/// One compound step on a normalized problem; `None` when stuck.
pub fn reduce_step(p: &Problem) -> Result<Option<(Problem, Vec<Step>)>> {
    let rig = rig_index(p);
    if rig != 2 {
        return Err(Error::PreconditionRig(rig));
    }
    let ramified_at_inf = p.infinity().is_some_and(|t| t.max_ram() >= 2);
    let choice = if ramified_at_inf {
        try_fourier(p)?
    } else {
        match try_mc(p)? {
            Some(c) => Some(c),
            None => try_fourier(p)?,
        }
    };
    let Some((kinds, _)) = choice else { return Ok(None) };
    let mut cur = p.clone();
    let mut steps = Vec::new();
    for k in kinds {
        push(&mut cur, &mut steps, k)?;
    }
    Ok(Some((cur, steps)))
}

pub fn run_adk(p: &Problem, max_steps: usize) -> Result<Outcome> {
    let rig = rig_index(p);
    if rig != 2 {
        return Ok(Outcome::NotRigid { rig, stuck: false });
    }
    let mut cur = p.clone();
    let mut steps = Vec::new();
    let mut compound = 0;
    while cur.rank() > 1 {
        if compound >= max_steps {
            return Ok(Outcome::Undecided { steps: compound });
        }
        let (normal, mut s) = normalize_problem(&cur)?;
        steps.append(&mut s);
        let before = normal.rank();
        match reduce_step(&normal)? {
            None => return Ok(Outcome::NotRigid { rig: 2, stuck: true }),
            Some((next, mut s)) => {
                if next.rank() >= before {
                    return Err(Error::InvariantViolation("reduction step did not lower the rank".into()));
                }
                let rig = rig_index(&next);
                if rig != 2 {
                    return Ok(Outcome::NotRigid { rig, stuck: false });
                }
                steps.append(&mut s);
                cur = next;
            }
        }
        compound += 1;
        if compound as u32 > p.rank() - 1 {
            return Err(Error::InvariantViolation("more compound steps than rank drops".into()));
        }
    }
    Ok(Outcome::Certified(Certificate { initial: p.clone(), steps, terminal: cur }))
}

fn undo(p: &Problem, kind: &StepKind) -> Result<Problem> {
    match kind {
        StepKind::Moebius(locs) => transform_problem(&normalizing_map(locs)?.inverse(), p),
        StepKind::AddApparent(l) => {
            let mut out = p.clone();
            match out.points.get(l) {
                Some(t) if !t.is_apparent() => {
                    return Err(Error::ReplayMismatch(format!("{} carries data but was added as apparent", l)))
                }
                Some(_) => {
                    out.points.remove(l);
                }
                None => {}
            }
            Ok(out)
        }
        StepKind::Twist(l) => {
            let mut base = p.clone();
            for loc in l.points.keys() {
                base = base.with_apparent(loc.clone());
            }
            twist_global(&base, &l.inverse())
        }
        StepKind::Mc(c) => middle_convolution(p, &-c.clone()),
        StepKind::Fourier => inverse_fourier(p),
    }
}

fn diff(expected: &Problem, got: &Problem) -> String {
    let (e, g) = (expected.without_apparent(), got.without_apparent());
    let mut locs: Vec<&Location> = e.points.keys().chain(g.points.keys()).collect();
    locs.sort();
    locs.dedup();
    let mut lines = Vec::new();
    for l in locs {
        let (a, b) = (e.points.get(l), g.points.get(l));
        if a != b {
            let show = |t: Option<&FormalType>| t.map_or("absent".to_string(), |t| format!("{:?}", t));
            lines.push(format!("at {}: expected {}, replayed {}", l, show(a), show(b)));
        }
    }
    lines.join("; ")
}

/// Undo every step from the terminal problem; the result must be the
/// initial problem.
pub fn replay_certificate(c: &Certificate) -> Result<Problem> {
    let mut cur = c.terminal.clone();
    for (i, step) in c.steps.iter().enumerate().rev() {
        if cur.rank() != step.rank {
            return Err(Error::ReplayMismatch(format!("step {} should leave rank {}, found {}", i, step.rank, cur.rank())));
        }
        cur = undo(&cur, &step.kind).map_err(|e| match e {
            Error::ReplayMismatch(m) => Error::ReplayMismatch(m),
            e => Error::ReplayMismatch(format!("step {} cannot be undone: {}", i, e)),
        })?;
    }
    if !cur.same_data(&c.initial) {
        return Err(Error::ReplayMismatch(diff(&c.initial, &cur)));
    }
    // apparent points and N carry no data; report them as given
    let mut points: BTreeMap<Location, FormalType> = cur.without_apparent().points;
    for (l, t) in &c.initial.points {
        points.entry(l.clone()).or_insert_with(|| t.clone());
    }
    let out = Problem { order: c.initial.order, points };
    if out != c.initial {
        return Err(Error::ReplayMismatch(diff(&c.initial, &out)));
    }
    Ok(out)
}
