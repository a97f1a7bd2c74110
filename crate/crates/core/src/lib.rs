//! Nabla fractional differentiation on time scales.
//!
//! The engine evaluates the backward (nabla) fractional derivative of order
//! `alpha` in `(0, 1]` for real functions restricted to arbitrary time
//! scales: exact backward-difference quotients at left-scattered points,
//! shrinking two-sided or one-sided limits at left-dense points. On top of
//! the derivative it provides local extremum classification, Rolle and mean
//! value witness searches, two chain rules with certificates, image-scale
//! composition, and product and power-sum identities with exact rational
//! verification paths.
//!
//! Modules:
//! - [`timescale`]: closed subsets of the line and their jump operators.
//! - [`expr`]: the expression grammar, evaluation, symbolic derivatives.
//! - [`fracdiff`]: orders, signed powers, and the nabla derivative itself.
//! - [`extrema`]: left extrema, extreme values, and witness searches.
//! - [`chain`]: chain rules, image scales, inverse derivatives.
//! - [`series`]: product rule for many factors, power sums, expansions.
//! - [`verify`]: seeded randomized property suites.

pub mod chain;
pub mod error;
pub mod expr;
pub mod extrema;
pub mod fracdiff;
pub mod series;
pub mod timescale;
pub mod verify;

pub use chain::{chain_c_point, chain_integral, compose_monotone, image_timescale, inverse_nabla, ChainPointCert};
pub use error::{Error, Result};
pub use series::{backward_expansion, general_product_rule, power_sum, power_sum_bruteforce, PowerSum};
pub use verify::{parse_suites, run_suite, Suite, SuiteReport, DEFAULT_CASES};
pub use expr::{parse_function, Expr, RealFunction};
pub use extrema::{ExtremumKind, ExtremumReport, WitnessPair};
pub use fracdiff::{nabla, FracOrder, Method, NablaConfig, NablaResult, OrderClass};
pub use timescale::{Piece, PointClass, Region, TimeScale};
