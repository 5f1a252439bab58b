//! The `rigid` command line: thin dispatch over `rigid-core`.
//!
//! Every subcommand writes its report to the given writers and returns the
//! process exit code, so tests drive it without spawning a process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Deserialize;
use serde_json::{json, Value};

use rigid_core::enumerate::{certify_all, Verdict};
use rigid_core::io::{parse_certificate, parse_problem, parse_twist, print_certificate, print_problem, problem_to_file};
use rigid_core::stokes::{order_arcs, Arc};
use rigid_core::text::{parse_location, parse_polar, parse_rational, relocate};
use rigid_core::{
    enumerate_candidates, fourier_global, middle_convolution, replay_certificate, rig_index, run_adk, twist_global, Angle, Error,
    Location, Outcome, PolarPart, Rational,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_RIGID: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

/// Candidates certified per batch before their lines are flushed.
const ENUMERATE_BATCH: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "rigid", version, about = "Formal local data of connections on the projective line")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the rigidity index.
    Rig { file: PathBuf },
    /// Run the reduction algorithm and report the verdict.
    Reduce {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        /// Write the certificate here when the problem is certified.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Global Fourier transform.
    Fourier { file: PathBuf },
    /// Middle convolution with χ = exp(2πi·CHI).
    Mc {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        chi: String,
    },
    /// Tensor with rank-one data.
    Twist { file: PathBuf, twist: PathBuf },
    /// Enumerate candidate data and certify the rigid ones (JSON lines).
    Enumerate {
        /// Comma-separated locations, e.g. `0,1,inf`.
        #[arg(long)]
        points: String,
        /// JSON file `{"version": 1, "phi": [..]}` of irregular heads.
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        rank: u32,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
    /// Stokes arcs for every pair of exponential factors at a point.
    StokesArcs {
        file: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Check a certificate by running it backwards.
    Replay { cert: PathBuf },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiFile {
    version: u32,
    phi: Vec<String>,
}

/// A failure with its exit code; the message goes to stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UndecidedSign { .. } | Error::TruncationAudit => EXIT_UNDECIDED,
            Error::TwoSpecialPoints | Error::PreconditionRig(_) => EXIT_NOT_RIGID,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

type Ran = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {}", path.display(), e) })
}

/// Attach the file name to parse errors.
fn in_file<T>(path: &Path, r: rigid_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let f = Failure::from(e);
        Failure { code: f.code, message: format!("{}: {}", path.display(), f.message) }
    })
}

fn emit(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"))
}

/// Parse `argv` (including the program name) and run the command.
pub fn execute_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{}", text) } else { write!(err, "{}", text) };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Ran {
    match &cli.command {
        Command::Rig { file } => {
            let p = in_file(file, parse_problem(&read(file)?))?;
            let rig = rig_index(&p);
            if cli.json {
                emit(out, &json!({ "rig": rig }))?;
            } else {
                writeln!(out, "{}", rig)?;
            }
            Ok(EXIT_OK)
        }
        Command::Reduce { file, max_steps, cert } => reduce(cli.json, file, *max_steps, cert.as_deref(), out),
        Command::Fourier { file } => {
            let p = in_file(file, parse_problem(&read(file)?))?;
            write!(out, "{}", print_problem(&fourier_global(&p)?))?;
            Ok(EXIT_OK)
        }
        Command::Mc { file, chi } => {
            let p = in_file(file, parse_problem(&read(file)?))?;
            let c = parse_rational(chi)?;
            write!(out, "{}", print_problem(&middle_convolution(&p, &c)?))?;
            Ok(EXIT_OK)
        }
        Command::Twist { file, twist } => {
            let p = in_file(file, parse_problem(&read(file)?))?;
            let l = in_file(twist, parse_twist(&read(twist)?))?;
            write!(out, "{}", print_problem(&twist_global(&p, &l)?))?;
            Ok(EXIT_OK)
        }
        Command::Enumerate { points, phi, order, rank, max_steps } => {
            enumerate(points, phi.as_deref(), *order, *rank, *max_steps, out)
        }
        Command::StokesArcs { file, point } => stokes(file, point, out),
        Command::Replay { cert } => {
            let text = read(cert)?;
            let c = in_file(cert, parse_certificate(&text))?;
            let p = replay_certificate(&c)?;
            if cli.json {
                emit(out, &json!({ "replay": "ok", "steps": c.steps.len(), "problem": problem_to_file(&p) }))?;
            } else {
                writeln!(out, "Replay OK ({} steps): certificate reproduces its initial problem", c.steps.len())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn reduce(json_out: bool, file: &Path, max_steps: usize, cert: Option<&Path>, out: &mut dyn Write) -> Ran {
    let p = in_file(file, parse_problem(&read(file)?))?;
    let outcome = run_adk(&p, max_steps)?;
    let (code, report, text) = match &outcome {
        Outcome::Certified(c) => {
            if let Some(path) = cert {
                fs::write(path, print_certificate(c))?;
            }
            (
                EXIT_OK,
                json!({ "verdict": "certified", "rig": rig_index(&p), "steps": c.steps.len() }),
                format!("Certified rigid ({} steps to rank {})", c.steps.len(), c.terminal.rank()),
            )
        }
        Outcome::NotRigid { rig, stuck: false } => {
            (EXIT_NOT_RIGID, json!({ "verdict": "not_rigid", "rig": rig }), format!("NotRigid (rig={})", rig))
        }
        // a greedy search failure at rig 2 is not a proof
        Outcome::NotRigid { rig, stuck: true } => (
            EXIT_UNDECIDED,
            json!({ "verdict": "stuck", "rig": rig, "caveat": "no reducing step found; not a proof of non-rigidity" }),
            format!("Stuck (rig={}): no reducing step found; not a proof of non-rigidity", rig),
        ),
        Outcome::Undecided { steps } => (
            EXIT_UNDECIDED,
            json!({ "verdict": "undecided", "rig": rig_index(&p), "steps": steps }),
            format!("Undecided after {} steps (raise --max-steps)", steps),
        ),
    };
    if json_out {
        emit(out, &report)?;
    } else {
        writeln!(out, "{}", text)?;
    }
    Ok(code)
}

fn parse_points(list: &str) -> Result<Vec<Location>, Failure> {
    let mut locs = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let loc = parse_location(item)?;
        if locs.contains(&loc) {
            return Err(Failure { code: EXIT_INPUT, message: format!("duplicate point {}", item) });
        }
        locs.push(loc);
    }
    if locs.is_empty() {
        return Err(Failure { code: EXIT_INPUT, message: "--points needs at least one location".into() });
    }
    Ok(locs)
}

fn parse_phi_file(path: &Path) -> Result<Vec<PolarPart>, Failure> {
    let text = read(path)?;
    let f: PhiFile = serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: parse error at {}:{}: {}", path.display(), e.line(), e.column(), e),
    })?;
    if f.version != 1 {
        return Err(Failure { code: EXIT_INPUT, message: format!("{}: unsupported version {}", path.display(), f.version) });
    }
    f.phi.iter().map(|s| in_file(path, parse_polar(s).map_err(|e| relocate(e, &text, s)))).collect()
}

fn enumerate(points: &str, phi: Option<&Path>, order: u32, rank: u32, max_steps: usize, out: &mut dyn Write) -> Ran {
    let locs = parse_points(points)?;
    let phis = match phi {
        Some(p) => parse_phi_file(p)?,
        None => Vec::new(),
    };
    if order == 0 || rank == 0 {
        return Err(Failure { code: EXIT_INPUT, message: "--order and --rank must be positive".into() });
    }
    let mut cands = enumerate_candidates(&locs, &phis, order, rank).peekable();
    while cands.peek().is_some() {
        let batch: Vec<_> = cands.by_ref().take(ENUMERATE_BATCH).collect();
        for (p, v) in certify_all(batch, max_steps) {
            let line = match v {
                Verdict::Certified(c) => {
                    json!({ "problem": problem_to_file(&p), "verdict": "certified", "steps": c.steps.len() })
                }
                Verdict::NotRigid(rig) => json!({ "problem": problem_to_file(&p), "verdict": "not_rigid", "rig": rig }),
                Verdict::Unresolved(why) => {
                    json!({ "problem": problem_to_file(&p), "verdict": "unresolved", "rig": 2, "reason": why })
                }
            };
            writeln!(out, "{}", serde_json::to_string(&line).expect("serializable"))?;
        }
        out.flush()?;
    }
    Ok(EXIT_OK)
}

/// `x` as a decimal string rounded towards `−∞` (or `+∞` when `up`).
fn decimal(x: &Rational, up: bool) -> String {
    const DIGITS: u32 = 12;
    let scale = BigInt::from(10u32).pow(DIGITS);
    let scaled = x * Rational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let n = n.abs();
    let (int, frac) = (&n / &scale, &n % &scale);
    format!("{}{}.{:0>width$}", sign, int, frac.to_string(), width = DIGITS as usize)
}

fn angle_json(a: &Angle) -> Value {
    match a {
        Angle::Exact(t) => json!(t.to_string()),
        Angle::Enclosure { lo, hi } => json!({ "lo": decimal(lo, false), "hi": decimal(hi, true) }),
    }
}

fn arc_json(a: &Arc) -> Value {
    json!({ "start": angle_json(&a.start), "end": angle_json(&a.end) })
}

fn stokes(file: &Path, point: &str, out: &mut dyn Write) -> Ran {
    let p = in_file(file, parse_problem(&read(file)?))?;
    let loc = parse_location(point)?;
    let t =
        p.at(&loc).ok_or_else(|| Failure { code: EXIT_INPUT, message: format!("no point {} in {}", point, file.display()) })?;
    let mut heads: Vec<PolarPart> = Vec::new();
    for f in t.factors() {
        for m in 0..f.ram() as i64 {
            let g = f.phi.galois_act(m)?;
            if !heads.contains(&g) {
                heads.push(g);
            }
        }
    }
    let mut pairs = Vec::new();
    for psi in &heads {
        for phi in &heads {
            if psi == phi {
                continue;
            }
            let a = order_arcs(psi, phi)?;
            pairs.push(json!({
                "psi": psi.to_string(),
                "phi": phi.to_string(),
                "ram": a.ram,
                "strict": a.strict.iter().map(arc_json).collect::<Vec<_>>(),
                "boundary": a.boundary.iter().map(angle_json).collect::<Vec<_>>(),
            }));
        }
    }
    let zero_free = heads.iter().filter(|h| !h.is_zero()).count();
    emit(out, &json!({ "point": loc.to_string(), "factors": heads.len(), "irregular": zero_free, "pairs": pairs }))?;
    Ok(EXIT_OK)
}
