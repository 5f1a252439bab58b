//! JSON problem and certificate files. Every number is an exact string in
//! the text syntax; nothing is stored as floating point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adk::{Certificate, Step, StepKind};
use crate::error::{Error, Result};
use crate::formal::{ExpFactor, FormalType, Problem};
use crate::text::{parse_location, parse_polar, parse_rational, relocate};
use crate::transforms::RankOneData;
use crate::Rational;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    #[serde(rename = "N")]
    pub order: u32,
    pub points: Vec<PointFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub loc: String,
    pub factors: Vec<FactorFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FactorFile {
    pub phi: String,
    pub reg: Vec<BlockFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub exp: String,
    pub blocks: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TwistEntry {
    pub loc: String,
    pub psi: String,
    pub exp: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepFile {
    Moebius { locations: [String; 3], rank: u32 },
    AddApparent { location: String, rank: u32 },
    Twist { data: Vec<TwistEntry>, rank: u32 },
    Mc { chi: String, rank: u32 },
    Fourier { rank: u32 },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub version: u32,
    pub initial: ProblemFile,
    pub steps: Vec<StepFile>,
    pub terminal: ProblemFile,
}

/// A rank-one twist file: `{"version": 1, "points": [{loc, psi, exp}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TwistFile {
    pub version: u32,
    pub points: Vec<TwistEntry>,
}

pub fn problem_to_file(p: &Problem) -> ProblemFile {
    let points = p
        .points
        .iter()
        .map(|(loc, t)| PointFile {
            loc: loc.to_string(),
            factors: t
                .factors()
                .iter()
                .map(|f| {
                    let mut by_exp: BTreeMap<Rational, Vec<u32>> = BTreeMap::new();
                    for (a, k) in f.reg.blocks() {
                        by_exp.entry(a.clone()).or_default().push(*k);
                    }
                    FactorFile {
                        phi: f.phi.to_string(),
                        reg: by_exp
                            .into_iter()
                            .map(|(a, mut ks)| {
                                ks.sort_unstable_by(|x, y| y.cmp(x));
                                BlockFile { exp: a.to_string(), blocks: ks }
                            })
                            .collect(),
                    }
                })
                .collect(),
        })
        .collect();
    ProblemFile { version: FORMAT_VERSION, order: p.order, points }
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::SemanticError(format!("unsupported format version {}", v)));
    }
    Ok(())
}

pub fn problem_from_file(f: &ProblemFile, source: &str) -> Result<Problem> {
    check_version(f.version)?;
    let at = |e: Error, expr: &str| relocate(e, source, expr);
    let mut points = Vec::new();
    for pt in &f.points {
        let loc = parse_location(&pt.loc).map_err(|e| at(e, &pt.loc))?;
        let mut factors = Vec::new();
        for fac in &pt.factors {
            let phi = parse_polar(&fac.phi).map_err(|e| at(e, &fac.phi))?;
            let mut blocks = Vec::new();
            for b in &fac.reg {
                let a = parse_rational(&b.exp).map_err(|e| at(e, &b.exp))?;
                if b.blocks.iter().any(|k| *k == 0) {
                    return Err(Error::SemanticError(format!("zero block size at {}", pt.loc)));
                }
                blocks.extend(b.blocks.iter().map(|k| (a.clone(), *k)));
            }
            if blocks.is_empty() {
                return Err(Error::SemanticError(format!("factor {} at {} has an empty regular part", fac.phi, pt.loc)));
            }
            if !phi.is_zero() && !phi.is_minimal()? {
                return Err(Error::NotMinimal);
            }
            factors.push(ExpFactor::new(phi, blocks));
        }
        points.push((loc, FormalType::new(factors)));
    }
    Problem::from_points(f.order, points).map_err(|e| match e {
        Error::InvalidProblem(m) => Error::SemanticError(m),
        e => e,
    })
}

fn json_error(e: serde_json::Error) -> Error {
    Error::ParseError { line: e.line(), column: e.column(), message: e.to_string() }
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    let f: ProblemFile = serde_json::from_str(text).map_err(json_error)?;
    problem_from_file(&f, text)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// The canonical printed form.
pub fn print_problem(p: &Problem) -> String {
    pretty(&problem_to_file(p))
}

fn twist_to_entries(l: &RankOneData) -> Vec<TwistEntry> {
    l.points.iter().map(|(loc, (psi, b))| TwistEntry { loc: loc.to_string(), psi: psi.to_string(), exp: b.to_string() }).collect()
}

fn twist_from_entries(entries: &[TwistEntry], source: &str) -> Result<RankOneData> {
    let mut l = RankOneData::new();
    for e in entries {
        let loc = parse_location(&e.loc).map_err(|x| relocate(x, source, &e.loc))?;
        let psi = parse_polar(&e.psi).map_err(|x| relocate(x, source, &e.psi))?;
        let b = parse_rational(&e.exp).map_err(|x| relocate(x, source, &e.exp))?;
        if l.points.insert(loc, (psi, b)).is_some() {
            return Err(Error::SemanticError(format!("duplicate twist location {}", e.loc)));
        }
    }
    Ok(l)
}

pub fn parse_twist(text: &str) -> Result<RankOneData> {
    let f: TwistFile = serde_json::from_str(text).map_err(json_error)?;
    check_version(f.version)?;
    twist_from_entries(&f.points, text)
}

pub fn print_twist(l: &RankOneData) -> String {
    pretty(&TwistFile { version: FORMAT_VERSION, points: twist_to_entries(l) })
}

pub fn certificate_to_file(c: &Certificate) -> CertificateFile {
    let steps = c
        .steps
        .iter()
        .map(|s| match &s.kind {
            StepKind::Moebius(l) => StepFile::Moebius { locations: l.clone().map(|x| x.to_string()), rank: s.rank },
            StepKind::AddApparent(l) => StepFile::AddApparent { location: l.to_string(), rank: s.rank },
            StepKind::Twist(l) => StepFile::Twist { data: twist_to_entries(l), rank: s.rank },
            StepKind::Mc(c) => StepFile::Mc { chi: c.to_string(), rank: s.rank },
            StepKind::Fourier => StepFile::Fourier { rank: s.rank },
        })
        .collect();
    CertificateFile {
        version: FORMAT_VERSION,
        initial: problem_to_file(&c.initial),
        steps,
        terminal: problem_to_file(&c.terminal),
    }
}

pub fn certificate_from_file(f: &CertificateFile, source: &str) -> Result<Certificate> {
    check_version(f.version)?;
    let loc = |s: &String| parse_location(s).map_err(|e| relocate(e, source, s));
    let mut steps = Vec::new();
    for s in &f.steps {
        let (kind, rank) = match s {
            StepFile::Moebius { locations, rank } => {
                (StepKind::Moebius([loc(&locations[0])?, loc(&locations[1])?, loc(&locations[2])?]), *rank)
            }
            StepFile::AddApparent { location, rank } => (StepKind::AddApparent(loc(location)?), *rank),
            StepFile::Twist { data, rank } => (StepKind::Twist(twist_from_entries(data, source)?), *rank),
            StepFile::Mc { chi, rank } => (StepKind::Mc(parse_rational(chi).map_err(|e| relocate(e, source, chi))?), *rank),
            StepFile::Fourier { rank } => (StepKind::Fourier, *rank),
        };
        steps.push(Step { kind, rank });
    }
    Ok(Certificate { initial: problem_from_file(&f.initial, source)?, steps, terminal: problem_from_file(&f.terminal, source)? })
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let f: CertificateFile = serde_json::from_str(text).map_err(json_error)?;
    certificate_from_file(&f, text)
}

pub fn print_certificate(c: &Certificate) -> String {
    pretty(&certificate_to_file(c))
}
