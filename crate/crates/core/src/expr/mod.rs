//! Real functions given by expression text: parsing, evaluation, symbolic
//! derivatives, and sampled monotonicity checks.
//!
//! [`RealFunction`] owns a parsed body together with its ordinary symbolic
//! derivative, computed once at construction. The derivative is the classical
//! one on the real line; the backward time-scale derivatives are built on top
//! of plain evaluation in [`crate::fracdiff`] and reduce to this derivative
//! on continuous scales.

mod ast;
mod calculus;
mod parse;

pub use ast::{pow_rational, Expr, Func, Rational};
pub use calculus::{differentiate, simplify};

use num::BigRational;

use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// A function of `t` with its symbolic derivative and an optional
/// monotonicity claim over a stated window.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFunction {
    body: Expr,
    derivative: Expr,
    monotone_claim: Option<(f64, f64)>,
}

impl RealFunction {
    /// Wraps an expression tree, computing its symbolic derivative.
    pub fn from_expr(body: Expr) -> Self {
        let derivative = calculus::simplify(calculus::differentiate(&body));
        RealFunction { body, derivative, monotone_claim: None }
    }

    /// Parses function text in the variable `t`.
    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::from_expr(parse::parse_expr(src)?))
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn derivative(&self) -> &Expr {
        &self.derivative
    }

    /// Evaluates the function at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.body.eval(x).map_err(|source| Error::Eval { at: x, source })
    }

    /// Evaluates the symbolic derivative at `x`.
    pub fn eval_derivative(&self, x: f64) -> Result<f64> {
        self.derivative.eval(x).map_err(|source| Error::Eval { at: x, source })
    }

    /// The composite `self ∘ inner`, with its own symbolic derivative
    /// computed from the substituted tree.
    pub fn compose(&self, inner: &RealFunction) -> RealFunction {
        Self::from_expr(self.body.substitute(&inner.body))
    }

    /// Attaches a claim that the function is strictly increasing on
    /// `[lo, hi]`; verify it against a scale with [`Self::verify_claim`].
    pub fn with_monotone_claim(mut self, lo: f64, hi: f64) -> Self {
        self.monotone_claim = Some((lo, hi));
        self
    }

    pub fn monotone_claim(&self) -> Option<(f64, f64)> {
        self.monotone_claim
    }

    /// Checks the attached claim against a scale by sampling.
    pub fn verify_claim(&self, ts: &TimeScale) -> Result<()> {
        match self.monotone_claim {
            Some((lo, hi)) => verify_strictly_increasing(self, ts, lo, hi),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for RealFunction {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "{}", self.body)
    }
}

/// Parses function text; alias for [`RealFunction::parse`].
pub fn parse_function(src: &str) -> Result<RealFunction> {
    RealFunction::parse(src)
}

/// Number of ordered sample pairs checked by the monotonicity test.
const MONOTONE_SAMPLE_PAIRS: usize = 200;

/// Verifies by sampling that `f` is strictly increasing on the members of
/// `ts` between `lo` and `hi`: up to 200 consecutive ordered pairs drawn
/// from the window must increase strictly.
pub fn verify_strictly_increasing(
    f: &RealFunction,
    ts: &TimeScale,
    lo: f64,
    hi: f64,
) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Hypothesis(format!("bad monotonicity window [{lo}, {hi}]")));
    }
    let mut xs: Vec<f64> = Vec::with_capacity(MONOTONE_SAMPLE_PAIRS + 1);
    for i in 0..=MONOTONE_SAMPLE_PAIRS {
        let target = lo + (hi - lo) * (i as f64) / (MONOTONE_SAMPLE_PAIRS as f64);
        if let Some(x) = ts.floor_point(target) {
            if x >= lo && x <= hi {
                xs.push(x);
            }
        }
    }
    if let Some(x) = ts.ceil_point(lo) {
        if x <= hi {
            xs.push(x);
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    xs.dedup();
    for pair in xs.windows(2) {
        let (y1, y2) = (f.eval(pair[0])?, f.eval(pair[1])?);
        if !(y1 < y2) {
            return Err(Error::NotMonotone { x1: pair[0], x2: pair[1] });
        }
    }
    Ok(())
}

/// Maximum polynomial degree tracked by the exact-coefficient extraction.
const MAX_POLY_DEG: usize = 120;

/// Dense coefficient list (constant term first) when the tree is a
/// polynomial in `t`: sums, differences, products, negation, division by a
/// literal constant, and nonnegative integer powers. Coefficients are exact
/// rationals recovered from the stored f64 values.
pub fn poly_coeffs(e: &Expr) -> Option<Vec<BigRational>> {
    let zero = BigRational::from_integer(0.into());
    match e {
        Expr::Const(c) => Some(vec![BigRational::from_float(*c)?]),
        Expr::Var => Some(vec![zero, BigRational::from_integer(1.into())]),
        Expr::Neg(u) => Some(poly_coeffs(u)?.into_iter().map(|c| -c).collect()),
        Expr::Add(u, v) | Expr::Sub(u, v) => {
            let a = poly_coeffs(u)?;
            let b = poly_coeffs(v)?;
            let negate = matches!(e, Expr::Sub(..));
            let mut out = vec![zero; a.len().max(b.len())];
            for (i, c) in a.into_iter().enumerate() {
                out[i] += c;
            }
            for (i, c) in b.into_iter().enumerate() {
                if negate {
                    out[i] -= c;
                } else {
                    out[i] += c;
                }
            }
            Some(out)
        }
        Expr::Mul(u, v) => poly_mul(&poly_coeffs(u)?, &poly_coeffs(v)?),
        Expr::Div(u, v) => match **v {
            Expr::Const(c) if c != 0.0 => {
                let d = BigRational::from_float(c)?;
                Some(poly_coeffs(u)?.into_iter().map(|x| x / &d).collect())
            }
            _ => None,
        },
        Expr::Pow(u, r) => {
            if !r.is_integer() || *r.numer() < 0 {
                return None;
            }
            let base = poly_coeffs(u)?;
            let mut out = vec![BigRational::from_integer(1.into())];
            for _ in 0..*r.numer() {
                out = poly_mul(&out, &base)?;
            }
            Some(out)
        }
        Expr::Call(..) => None,
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Option<Vec<BigRational>> {
    if a.len() + b.len() > MAX_POLY_DEG + 2 {
        return None;
    }
    let zero = BigRational::from_integer(0.into());
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Some(out)
}

/// Horner evaluation of an exact coefficient list.
pub fn eval_poly_exact(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::from_integer(0.into());
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn f(src: &str) -> RealFunction {
        RealFunction::parse(src).unwrap()
    }

    #[test]
    fn linear_function_has_constant_derivative() {
        let g = f("2*t + 3");
        assert_eq!(g.derivative(), &Expr::Const(2.0));
        assert_eq!(g.eval(5.0).unwrap(), 13.0);
        assert_eq!(g.eval_derivative(100.0).unwrap(), 2.0);
    }

    #[test]
    fn square_derivative_at_scaled_point() {
        let g = f("t^2");
        let x = 4.0 * 2.0_f64.sqrt();
        let d = g.eval_derivative(x).unwrap();
        assert!((d - 11.313708498984761).abs() < 1e-12);
        let h = 1e-6;
        let central = (g.eval(x + h).unwrap() - g.eval(x - h).unwrap()) / (2.0 * h);
        assert!((d - central).abs() < 1e-7 * (1.0 + d.abs()));
    }

    #[test]
    fn double_star_is_a_syntax_error_at_column_three() {
        match RealFunction::parse("2**t") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn nonconstant_exponent_is_rejected() {
        assert!(matches!(RealFunction::parse("2^t"), Err(Error::Parse { .. })));
        assert!(matches!(RealFunction::parse("t^pi"), Err(Error::Parse { .. })));
        assert!(RealFunction::parse("t^(1/2)").is_ok());
        assert!(RealFunction::parse("t^-2").is_ok());
    }

    #[test]
    fn cbrt_accepts_negative_arguments() {
        let g = f("cbrt(t)");
        assert_eq!(g.eval(-8.0).unwrap(), -2.0);
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cbrt_derivative_fails_at_zero() {
        let g = f("cbrt(t)");
        assert!(matches!(
            g.eval_derivative(0.0),
            Err(Error::Eval { source: crate::error::EvalError::DivisionByZero, .. })
        ));
        let d = g.eval_derivative(8.0).unwrap();
        assert!((d - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn domain_violations_are_errors_not_nan() {
        assert!(f("sqrt(t)").eval(-1.0).is_err());
        assert!(f("ln(t)").eval(0.0).is_err());
        assert!(f("1/t").eval(0.0).is_err());
        assert!(f("t^(1/2)").eval(-4.0).is_err());
        assert!(f("exp(t)").eval(1000.0).is_err());
    }

    #[test]
    fn integer_powers_allow_negative_bases() {
        assert_eq!(f("t^3").eval(-2.0).unwrap(), -8.0);
        assert_eq!(f("t^-2").eval(-2.0).unwrap(), 0.25);
        assert_eq!(f("(t-5)^2").eval(3.0).unwrap(), 4.0);
    }

    #[test]
    fn pi_and_trig_evaluate() {
        let g = f("sin(pi*t)");
        assert!(g.eval(1.0).unwrap().abs() < 1e-12);
        assert!((f("cos(t)").eval(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compose_substitutes_the_variable() {
        let outer = f("t^2");
        let inner = f("2*t");
        let c = outer.compose(&inner);
        assert_eq!(c.eval(3.0).unwrap(), 36.0);
        assert_eq!(c.eval_derivative(3.0).unwrap(), 24.0);
    }

    #[test]
    fn monotonicity_check_accepts_increasing_and_rejects_decreasing() {
        let ts = TimeScale::interval(0.0, 10.0).unwrap();
        assert!(verify_strictly_increasing(&f("t^3"), &ts, 0.0, 10.0).is_ok());
        assert!(matches!(
            verify_strictly_increasing(&f("2-t"), &ts, 0.0, 10.0),
            Err(Error::NotMonotone { .. })
        ));
        let z = TimeScale::integers();
        assert!(verify_strictly_increasing(&f("t^3"), &z, -20.0, 20.0).is_ok());
    }

    #[test]
    fn poly_coeffs_recovers_exact_coefficients() {
        let g = f("(t-1)^2/4 + t");
        let coeffs = poly_coeffs(g.body()).unwrap();
        let quarters: Vec<BigRational> =
            ["1/4", "1/2", "1/4"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(coeffs, quarters);
        assert!(poly_coeffs(f("sin(t)").body()).is_none());
        assert!(poly_coeffs(f("1/t").body()).is_none());
        let x = BigRational::from_integer(3.into());
        assert_eq!(eval_poly_exact(&coeffs, &x), BigRational::from_integer(4.into()));
    }

    #[test]
    fn finite_differences_corroborate_symbolic_derivatives() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pool = [
            "t^3 - 2*t + 1",
            "sin(t) * cos(2*t)",
            "exp(t/4)",
            "ln(t^2 + 3)",
            "sqrt(t^2 + 1)",
            "(t^2 + 1) / (t^2 + 2)",
            "cbrt(t^2 + 5)",
            "t^4/8 - sin(3*t)",
        ];
        let mut checked = 0;
        while checked < 1000 {
            let src = pool[rng.gen_range(0..pool.len())];
            let g = f(src);
            let x: f64 = rng.gen_range(-5.0..5.0);
            let d = g.eval_derivative(x).unwrap();
            let h = 1e-5;
            let central = (g.eval(x + h).unwrap() - g.eval(x - h).unwrap()) / (2.0 * h);
            assert!(
                (d - central).abs() <= 1e-4 * (1.0 + d.abs()),
                "{src} at {x}: symbolic {d} vs central {central}"
            );
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn printed_trees_reparse_structurally(tree in expr_strategy()) {
            let text = tree.to_string();
            if let Ok(parsed) = parse_function(&text) {
                let reparsed = parse_function(&parsed.to_string()).unwrap();
                prop_assert_eq!(reparsed.body(), parsed.body());
            }
        }

        #[test]
        fn cube_of_cbrt_recovers_the_argument(x in -1e6f64..1e6) {
            let v = x.cbrt().powi(3);
            prop_assert!((v - x).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    fn expr_strategy() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-100.0f64..100.0).prop_map(Expr::Const),
            Just(Expr::Var),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), -3i64..6, 1i64..4).prop_map(|(a, p, q)| {
                    Expr::Pow(Box::new(a), Rational::new(p, q))
                }),
                (inner, prop_oneof![
                    Just(Func::Sqrt), Just(Func::Cbrt), Just(Func::Abs),
                    Just(Func::Exp), Just(Func::Ln), Just(Func::Sin), Just(Func::Cos),
                ]).prop_map(|(a, func)| Expr::Call(func, Box::new(a))),
            ]
        })
    }
}
