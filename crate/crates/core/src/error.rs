//! Shared error type for the engine.
//!
//! Every fallible operation in this crate reports through [`Error`]. The
//! variants are grouped by how a front end should treat them: input text
//! problems ([`Error::Parse`]), domain and precondition violations (most of
//! the rest), and searches that terminated without a definite answer
//! ([`Error::Inconclusive`]). Display output is a single line.

use std::fmt;

/// Side of a point on the real line, used when reporting missing approach
/// points for a one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(out, "left"),
            Side::Right => write!(out, "right"),
        }
    }
}

/// One sampled difference quotient from a shrinking-limit evaluation:
/// the approach point `s` and the quotient value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSample {
    pub s: f64,
    pub quotient: f64,
}

/// Error surfaced while evaluating an expression at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalError {
    /// Division with an exactly zero denominator.
    DivisionByZero,
    /// `sqrt` of a negative argument.
    SqrtNegative(f64),
    /// `ln` of a non-positive argument.
    LnNonPositive(f64),
    /// `^` applied to a negative base with a non-integer exponent, or a
    /// negative exponent at zero.
    PowDomain { base: f64, exponent: f64 },
    /// An intermediate value overflowed or was otherwise not finite.
    NonFinite,
}

impl fmt::Display for EvalError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::DivisionByZero => write!(out, "division by zero"),
            EvalError::SqrtNegative(x) => write!(out, "sqrt of negative argument {x}"),
            EvalError::LnNonPositive(x) => write!(out, "ln of non-positive argument {x}"),
            EvalError::PowDomain { base, exponent } => {
                write!(out, "power {base}^{exponent} is not a real number")
            }
            EvalError::NonFinite => write!(out, "evaluation produced a non-finite value"),
        }
    }
}

/// Unified error type for the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Text input (time scale, function, or order) failed to parse.
    /// `position` is a 1-based column in the offending string.
    Parse { position: usize, message: String },
    /// A time scale constructor was handed invalid data.
    InvalidScale(String),
    /// The point is not a member of the time scale.
    NotInScale(f64),
    /// The point is a member of the scale but not of the differentiability
    /// region (the scale minus a right-scattered minimum).
    NotInTk(f64),
    /// The requested order p/q is outside (0, 1] or has a zero denominator.
    InvalidOrder { p: i64, q: i64 },
    /// A negative base was raised to a power that is only real for
    /// odd-reciprocal orders.
    NonRealPower { base: f64 },
    /// Function evaluation failed at the given point.
    Eval { at: f64, source: EvalError },
    /// A left-dense point has no scale members on the side the limit needs.
    NoApproachPoints { t: f64, side: Side },
    /// The shrinking-limit evaluation did not settle; the sampled quotient
    /// trace is attached for diagnosis.
    NonDifferentiable { t: f64, trace: Vec<QuotientSample> },
    /// A stated hypothesis of the operation failed (equal endpoint values,
    /// positive denominator derivative, and similar).
    Hypothesis(String),
    /// Fractional-order mean value search visited a left-dense point, where
    /// the graininess correction is undefined.
    LeftDenseRequiresScattered { t: f64 },
    /// A sampled monotonicity check found an order violation between the two
    /// given arguments.
    NotMonotone { x1: f64, x2: f64 },
    /// The backward orbit of the start point never reaches the anchor.
    UnreachableAnchor { t: f64, r: f64 },
    /// A denominator that the closed form divides by is zero.
    DegenerateDenominator,
    /// A search over a continuous region ended without a certificate. The
    /// best candidate and its residual are attached.
    Inconclusive { candidate: f64, residual: f64 },
    /// Adaptive quadrature failed to converge.
    Quadrature,
    /// An enumeration (interior points, backward orbit) exceeded its cap.
    EnumerationTooLarge { cap: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { position, message } => {
                write!(out, "syntax error at column {position}: {message}")
            }
            Error::InvalidScale(msg) => write!(out, "invalid time scale: {msg}"),
            Error::NotInScale(t) => write!(out, "point {t} is not in the time scale"),
            Error::NotInTk(t) => write!(out, "t not in T^k (t = {t})"),
            Error::InvalidOrder { p, q } => {
                write!(out, "order {p}/{q} is not in (0, 1]")
            }
            Error::NonRealPower { base } => {
                write!(out, "negative base {base} has no real power for this order")
            }
            Error::Eval { at, source } => write!(out, "evaluation failed at {at}: {source}"),
            Error::NoApproachPoints { t, side } => {
                write!(out, "no approach points on the {side} of {t} in the time scale")
            }
            Error::NonDifferentiable { t, trace } => write!(
                out,
                "difference quotients at {t} did not converge after {} samples",
                trace.len()
            ),
            Error::Hypothesis(msg) => write!(out, "hypothesis violated: {msg}"),
            Error::LeftDenseRequiresScattered { t } => write!(
                out,
                "fractional-order mean value search requires left-scattered points, but {t} is left-dense"
            ),
            Error::NotMonotone { x1, x2 } => {
                write!(out, "function is not strictly increasing: check failed at ({x1}, {x2})")
            }
            Error::UnreachableAnchor { t, r } => {
                write!(out, "anchor {r} is not on the backward orbit of {t}")
            }
            Error::DegenerateDenominator => {
                write!(out, "degenerate denominator: the closed form requires a nonzero backward difference")
            }
            Error::Inconclusive { candidate, residual } => write!(
                out,
                "search inconclusive: best candidate {candidate} has residual {residual}"
            ),
            Error::Quadrature => write!(out, "adaptive quadrature did not converge"),
            Error::EnumerationTooLarge { cap } => {
                write!(out, "enumeration exceeded the cap of {cap} points")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
