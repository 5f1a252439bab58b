//! One line per acceptance criterion; exits non-zero if any fails or
//! overruns its time budget.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{levelt_grid, mc_check, q, rank_one_grid};
use num_traits::{One, Zero};
use rigid_core::enumerate::{count_rigid, rank_one_count};
use rigid_core::formal::{hom_h0, hom_irregularity};
use rigid_core::stokes::{order_arcs, rotate, Arc};
use rigid_core::transforms::{dr_mc_oracle, local_fourier, negate, Leg, MatrixTuple};
use rigid_core::{
    enumerate_candidates, fourier_global, replay_certificate, rig_index, run_adk, Angle, Certificate, CycloMatrix, CycloNum,
    Error, ExpFactor, FormalType, Location, Outcome, PolarPart, Problem, RadicalCoeff, RegularPart, StepKind,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reg(blocks: &[(i64, i64, u32)]) -> FormalType {
    FormalType::regular(blocks.iter().map(|(n, d, k)| (q(*n, *d), *k)).collect())
}

fn mono(c: i64, j: u32, p: u32) -> PolarPart {
    PolarPart::monomial(RadicalCoeff::from_int(c), j, p)
}

fn three() -> Vec<Location> {
    vec![Location::int(0), Location::int(1), Location::Infinity]
}

fn hypergeometric() -> Problem {
    Problem::from_points(
        6,
        vec![
            (Location::int(0), reg(&[(1, 6, 1), (1, 3, 1)])),
            (Location::int(1), reg(&[(0, 1, 1), (1, 2, 1)])),
            (Location::Infinity, reg(&[(1, 2, 2)])),
        ],
    )
    .unwrap()
}

fn kloosterman() -> Problem {
    Problem::from_points(
        2,
        vec![
            (Location::int(0), reg(&[(0, 1, 2)])),
            (Location::Infinity, FormalType::new(vec![ExpFactor::new(mono(1, 1, 2), vec![(q(0, 1), 1)])])),
        ],
    )
    .unwrap()
}

fn certify(p: &Problem) -> Result<Certificate, String> {
    match run_adk(p, 12) {
        Ok(Outcome::Certified(c)) => Ok(c),
        other => Err(format!("{:?} not certified: {:?}", p, other)),
    }
}

fn replays(c: &Certificate) -> Result<(), String> {
    let back = replay_certificate(c).map_err(|e| format!("replay failed for {:?}: {}", c.initial, e))?;
    ensure(back == c.initial, || format!("replay gave {:?}, expected {:?}", back, c.initial))
}

fn rank_one_rigidity() -> Check {
    let mut r = common::rng(1);
    for _ in 0..100 {
        let p = common::random_rank_one(&mut r);
        ensure(rig_index(&p) == 2, || format!("rig {} for {:?}", rig_index(&p), p))?;
    }
    Ok("100 problems, rig = 2".into())
}

fn hypergeometric_check() -> Check {
    let p = hypergeometric();
    ensure(rig_index(&p) == 2, || format!("rig {}", rig_index(&p)))?;
    let c = certify(&p)?;
    replays(&c)?;
    Ok(format!("certified in {} steps, replay exact", c.steps.len()))
}

fn kloosterman_check() -> Check {
    let p = kloosterman();
    let inf = p.infinity().unwrap();
    let (irr, h0) = (hom_irregularity(inf, inf), hom_h0(inf, inf));
    ensure(irr == 1 && h0 == 1, || format!("Irr(End) = {}, h0(End) = {} at ∞", irr, h0))?;
    let zero = p.at(&Location::int(0)).unwrap();
    ensure(hom_h0(zero, zero) == 2, || format!("h0(End) = {} at 0", hom_h0(zero, zero)))?;
    ensure(rig_index(&p) == 2, || format!("rig {}", rig_index(&p)))?;
    Ok("Irr(End) = 1, h0(End) = 1 at ∞, rig = 2".into())
}

/// Problems of the Fourier battery whose transform is defined.
fn fourier_battery() -> (Vec<(Problem, Problem)>, usize, usize) {
    let mut r = common::rng(7);
    let (mut out, mut skipped, mut irregular) = (Vec::new(), 0, 0);
    for i in 0..300 {
        let p = common::random_problem(&mut r, i % 2 == 1);
        match fourier_global(&p) {
            Ok(f) => {
                if p.points.values().any(|t| t.irregularity() > 0) {
                    irregular += 1;
                }
                out.push((p, f));
            }
            Err(Error::PunctualMismatch { .. }) | Err(Error::RankZeroOutput) => skipped += 1,
            Err(e) => panic!("fourier failed on {:?}: {}", p, e),
        }
    }
    (out, skipped, irregular)
}

fn fourier_rig() -> Check {
    let (battery, skipped, irregular) = fourier_battery();
    ensure(battery.len() >= 50 && irregular > 0 && irregular < battery.len(), || {
        format!("battery too small or unmixed: {} ({} irregular)", battery.len(), irregular)
    })?;
    for (p, f) in &battery {
        ensure(rig_index(p) == rig_index(f), || format!("rig {} -> {} for {:?}", rig_index(p), rig_index(f), p))?;
    }
    Ok(format!("{} problems ({} irregular, {} skipped as not transformable)", battery.len(), irregular, skipped))
}

fn fourier_involution() -> Check {
    let (battery, _, _) = fourier_battery();
    for (p, f) in &battery {
        let back = fourier_global(f).and_then(|g| negate(&g)).map_err(|e| format!("{:?}: {}", p, e))?;
        ensure(back.same_data(p), || format!("{:?} came back as {:?}", p, back))?;
    }
    Ok(format!("{} problems, [−1]^* F F = id", battery.len()))
}

fn dr_scalar_example() -> Result<(), String> {
    let (a, b, lambda) = (CycloNum::zeta(6, 1), CycloNum::zeta(3, 1), CycloNum::zeta(4, 1));
    let t = MatrixTuple::new(vec![CycloMatrix::from_vec(1, 1, vec![a.clone()]), CycloMatrix::from_vec(1, 1, vec![b.clone()])]);
    let out = dr_mc_oracle(&t, &lambda).map_err(|e| e.to_string())?;
    ensure(out.rank() == 2, || format!("rank {}", out.rank()))?;
    let b1 = &out.mats[0];
    ensure(b1.jordan_blocks(&(&lambda * &a)) == vec![1] && b1.jordan_blocks(&CycloNum::one()) == vec![1], || {
        "B1 eigenvalues are not {λa, 1}".into()
    })?;
    let prod = out.mats[1].mul(&out.mats[0]);
    let det = &(&prod[(0, 0)] * &prod[(1, 1)]) - &(&prod[(0, 1)] * &prod[(1, 0)]);
    ensure(prod.trace() == &lambda * &(&(&a * &b) + &CycloNum::one()), || "trace of B∞ mismatch".into())?;
    ensure(det == &(&lambda * &lambda) * &(&a * &b), || "det of B∞ mismatch".into())
}

fn oracle_agreement() -> Check {
    dr_scalar_example()?;
    let locs = [Location::int(0), Location::int(1)];
    let one = rank_one_grid();
    let two = levelt_grid();
    for (t, k) in one.iter().chain(two.iter()) {
        mc_check(t, *k, &locs)?;
    }
    Ok(format!("{} rank-one and {} rank-two cases, scalar example", one.len(), two.len()))
}

fn desk_scale_count() -> Check {
    let res = count_rigid(&three(), &[], 2, 1, 10);
    ensure(res.certified.len() == 4 && res.rig2_unresolved.is_empty() && res.non_rigid_count == 0, || {
        format!("{} certified, {} unresolved, {} not rigid", res.certified.len(), res.rig2_unresolved.len(), res.non_rigid_count)
    })?;
    for (_, c) in &res.certified {
        replays(c)?;
    }
    let locs = [Location::int(0), Location::int(1), Location::Infinity, Location::int(-1)];
    let phi_sets: [Vec<PolarPart>; 3] = [vec![], vec![mono(1, 1, 1)], vec![mono(1, 1, 1), mono(2, 2, 1), mono(1, 1, 2)]];
    let mut checked = 0;
    for phis in &phi_sets {
        for n in 1..=4u32 {
            for order in 1..=3u32 {
                let brute = enumerate_candidates(&locs[..n as usize], phis, order, 1).count() as u64;
                let closed = rank_one_count(phis, order, n);
                ensure(brute == closed, || {
                    format!("n = {}, N = {}, |Φ| = {}: brute {} vs closed {}", n, order, phis.len(), brute, closed)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("4 candidates certified; closed form matches on {} (n, N, Φ) cases", checked))
}

fn stokes_arcs() -> Check {
    for qq in 1..=3u32 {
        let a = order_arcs(&PolarPart::zero(), &mono(1, qq, 1)).map_err(|e| e.to_string())?;
        ensure(a.boundary.len() as u32 == 2 * qq, || format!("q = {}: {} boundary directions", qq, a.boundary.len()))?;
    }
    let basic = order_arcs(&PolarPart::zero(), &mono(1, 1, 1)).map_err(|e| e.to_string())?;
    let expected = vec![Arc { start: Angle::Exact(q(-1, 4)), end: Angle::Exact(q(1, 4)) }];
    ensure(basic.strict == expected, || format!("strict arcs {:?}", basic.strict))?;
    let psi = PolarPart::new(3, [(2, RadicalCoeff::zeta(5, 1)), (1, RadicalCoeff::from_int(1))].into_iter().collect());
    let phi = mono(1, 1, 3);
    let before = order_arcs(&psi, &phi).map_err(|e| e.to_string())?;
    for m in 0..3 {
        let after = order_arcs(&psi.galois_act(m).unwrap(), &phi.galois_act(m).unwrap()).map_err(|e| e.to_string())?;
        ensure(rotate(&before, &q(-m, 3)) == after, || format!("rotation by {} not equivariant", m))?;
    }
    Ok("2q boundaries for q = 1, 2, 3; arc (−1/4, 1/4); rotation exact".into())
}

fn stationary_phase() -> Check {
    let gauss = ExpFactor::new(mono(1, 2, 1), vec![(q(0, 1), 1)]);
    let out = local_fourier(&Leg::InfToInf, &gauss).map_err(|e| e.to_string())?;
    let expected = PolarPart::monomial(RadicalCoeff::from_rational(q(-1, 4)), 2, 1);
    ensure(out.location == Location::Infinity && out.factor.phi == expected, || format!("E^{{t²}} ↦ {:?}", out))?;

    let a = q(1, 3);
    let kummer = ExpFactor::regular(vec![(a.clone(), 1)]);
    let out = local_fourier(&Leg::FiniteToInf(CycloNum::zero()), &kummer).map_err(|e| e.to_string())?;
    ensure(out.factor.phi.is_zero() && out.factor.reg == RegularPart::new(vec![(&a + q(1, 1), 1)]), || {
        format!("exponent {} ↦ {:?}", a, out.factor)
    })?;

    let slope = ExpFactor::new(mono(1, 1, 2), vec![(q(0, 1), 1)]);
    let out = local_fourier(&Leg::FiniteToInf(CycloNum::zero()), &slope).map_err(|e| e.to_string())?;
    ensure(out.factor.ram() == 3 && out.factor.phi.slope() == q(1, 3), || {
        format!("(2,1) ↦ ramification {}, slope {}", out.factor.ram(), out.factor.phi.slope())
    })?;
    Ok("E^{t²} ↦ E^{−τ²/4}; a ↦ a+1; slope 1/2 ↦ ramification 3, slope 1/3".into())
}

fn corruptions(c: &Certificate) -> Vec<Certificate> {
    let mut out = Vec::new();
    let mut bad = c.clone();
    bad.terminal = bad.terminal.with_apparent(Location::int(7));
    *bad.terminal.points.get_mut(&Location::int(7)).unwrap() = reg(&[(1, 2, 1)]);
    out.push(bad);
    for (i, s) in c.steps.iter().enumerate() {
        let mut bad = c.clone();
        match &s.kind {
            StepKind::Mc(x) => bad.steps[i].kind = StepKind::Mc(x + q(1, 6)),
            _ => bad.steps[i].rank += 1,
        }
        out.push(bad);
    }
    // dropping an apparent point changes nothing, so drop a step with content
    if let Some(i) = c.steps.iter().position(|s| !matches!(s.kind, StepKind::AddApparent(_))) {
        let mut bad = c.clone();
        bad.steps.remove(i);
        out.push(bad);
    }
    out
}

fn certificate_replay() -> Check {
    let mut certs = vec![certify(&hypergeometric())?];
    let locs = [Location::int(0), Location::int(1)];
    let mut seen = std::collections::BTreeSet::new();
    for (t, _) in rank_one_grid().iter().chain(levelt_grid().iter()) {
        let p = t.formal_data(&locs, 6).map_err(|e| e.to_string())?;
        if seen.insert(p.clone()) {
            if let Ok(Outcome::Certified(c)) = run_adk(&p, 12) {
                certs.push(c);
            }
        }
    }
    let grid_certs = certs.len() - 1;
    for (_, c) in count_rigid(&three(), &[], 2, 1, 10).certified {
        certs.push(c);
    }
    let mut rejected = 0;
    for c in &certs {
        replays(c)?;
        for bad in corruptions(c) {
            match replay_certificate(&bad) {
                Err(Error::ReplayMismatch(_)) => rejected += 1,
                other => return Err(format!("corrupted certificate of {:?} gave {:?}", c.initial, other.map(|_| ()))),
            }
        }
    }
    ensure(grid_certs > 0, || "no grid problem certified".into())?;
    Ok(format!("{} certificates replayed ({} from the grid), {} corruptions rejected", certs.len(), grid_certs, rejected))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 10] = [
        ("rank-one rigidity", 1, rank_one_rigidity),
        ("hypergeometric", 1, hypergeometric_check),
        ("Kloosterman", 1, kloosterman_check),
        ("Fourier preserves rig", 30, fourier_rig),
        ("Fourier involution", 30, fourier_involution),
        ("MC vs matrix oracle", 120, oracle_agreement),
        ("desk-scale count", 10, desk_scale_count),
        ("Stokes arcs", 1, stokes_arcs),
        ("stationary-phase golden values", 1, stationary_phase),
        ("certificate replay", 30, certificate_replay),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let took = start.elapsed();
        let res = res.and_then(|m| {
            if took > Duration::from_secs(*budget) {
                Err(format!("{} (over the {} s budget)", m, budget))
            } else {
                Ok(m)
            }
        });
        match res {
            Ok(m) => println!("PASS {:>2} {}: {} [{:.2} s]", i + 1, name, m, took.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {}: {} [{:.2} s]", i + 1, name, m, took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
