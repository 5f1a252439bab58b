//! Formal local data of meromorphic connections on the projective line.
//!
//! A connection is represented by its Levelt–Turrittin type at finitely
//! many points: exponential factors `El(φ) ⊗ R` with `φ` a minimally
//! ramified polar part and `R` a regular part given by Jordan blocks of
//! exponents. On such data the crate computes the rigidity index, the
//! Arinkin–Deligne–Katz moves (rank-one twist, middle convolution, formal
//! Fourier transform by stationary phase), a reduction to rank one with a
//! replayable certificate, bounded enumeration, and Stokes order arcs.
//!
//! All arithmetic is exact: cyclotomic numbers, cyclotomic combinations of
//! radicals for stationary-phase coefficients, and interval balls only to
//! decide signs and angles.

pub mod adk;
pub mod ball;
pub mod cyclo;
pub mod enumerate;
pub mod error;
pub mod formal;
pub mod io;
pub mod linalg;
pub mod moebius;
pub mod puiseux;
pub mod radical;
pub mod rigidity;
pub mod scalar;
pub mod series;
pub mod stokes;
pub mod text;
pub mod transforms;

pub use adk::{normalize_problem, reduce_step, replay_certificate, run_adk, Certificate, Outcome, Step, StepKind};
pub use cyclo::{Angle, CycloNum};
pub use enumerate::{count_rigid, enumerate_candidates};
pub use error::{Error, Result};
pub use formal::{ExpFactor, FormalType, Location, Problem, RegularPart};
pub use linalg::Matrix;
pub use puiseux::PolarPart;
pub use radical::RadicalCoeff;
pub use rigidity::rig_index;
pub use scalar::{Field, Ring};
pub use transforms::{fourier_global, middle_convolution, twist_global, CycloMatrix, RankOneData};

pub type Rational = num_rational::BigRational;
pub type QMatrix = Matrix<Rational>;
