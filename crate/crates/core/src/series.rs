//! Finite-series identities: the m-fold product rule, closed-form power
//! sums with an exact-rational fast path, and the backward telescoping
//! expansion of a function from an anchor on its backward orbit.

use num::ToPrimitive;
// Re-exported because it appears in the public `PowerSum` type.
pub use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::expr::{eval_poly_exact, poly_coeffs, RealFunction};
use crate::fracdiff::{nabla, signed_power, FracOrder, NablaConfig};
use crate::timescale::TimeScale;

/// Iteration cap before the backward expansion declares its anchor
/// unreachable.
const EXPANSION_CAP: u64 = 1_000_000;

/// The m-fold product rule
///
/// ```text
/// ∇^α (f₁⋯f_m)(t) = Σ_{i=1}^{m} [∏_{j<i} f_j(ρ(t))] · ∇^α f_i(t) · [∏_{j>i} f_j(t)]
/// ```
///
/// with empty products equal to 1. For m = 2 this is term-for-term the
/// two-factor product rule.
pub fn general_product_rule(
    ts: &TimeScale,
    fs: &[RealFunction],
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    if fs.len() < 2 {
        return Err(Error::Hypothesis(
            "the general product rule needs at least two factors".into(),
        ));
    }
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let rho = ts.rho(t)?;
    let mut sum = 0.0;
    let mut prefix = 1.0;
    for (i, f) in fs.iter().enumerate() {
        let mut term = prefix * nabla(ts, f, t, alpha, cfg)?.value;
        for g in &fs[i + 1..] {
            term *= g.eval(t)?;
        }
        sum += term;
        prefix *= f.eval(rho)?;
    }
    Ok(sum)
}

/// A power-sum value together with its exact rational form when the
/// function is a rational-coefficient polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum {
    pub value: f64,
    pub exact: Option<BigRational>,
}

fn br_pow(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::from_integer(1.into());
    for _ in 0..n {
        acc *= x;
    }
    acc
}

fn exact_point(f: &RealFunction, x: f64) -> Option<(Vec<BigRational>, BigRational)> {
    let coeffs = poly_coeffs(f.body())?;
    let x = BigRational::from_float(x)?;
    Some((coeffs, x))
}

/// The closed form of the backward power sum
///
/// ```text
/// Σ_{i=0}^{m} f(ρ(t))^i f(t)^(m−i)
///   = ( [f(ρ(t)) + ν^α ∇^α f(t)]^(m+1) − f(ρ(t))^(m+1) ) / (ν^α ∇^α f(t)),
/// ```
///
/// defined when the denominator `ν^α ∇^α f(t)` is nonzero (so `t` must be
/// left-scattered with a nonzero backward difference). Polynomial `f`
/// evaluates in exact rational arithmetic, where the denominator reduces
/// algebraically to `f(t) − f(ρ(t))` for every order; this sidesteps the
/// subtractive cancellation of the large powers.
pub fn power_sum(
    ts: &TimeScale,
    f: &RealFunction,
    t: f64,
    alpha: FracOrder,
    m: u32,
    cfg: &NablaConfig,
) -> Result<PowerSum> {
    if m == 0 {
        return Err(Error::Hypothesis("the power-sum exponent must be at least 1".into()));
    }
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let rho = ts.rho(t)?;
    if let Some((coeffs, tq)) = exact_point(f, t) {
        let rq = BigRational::from_float(rho).expect("finite member");
        let fv = eval_poly_exact(&coeffs, &tq);
        let pv = eval_poly_exact(&coeffs, &rq);
        let d = &fv - &pv;
        if d == BigRational::from_integer(0.into()) {
            return Err(Error::DegenerateDenominator);
        }
        let exact = (br_pow(&fv, m + 1) - br_pow(&pv, m + 1)) / d;
        let value = exact.to_f64().ok_or(Error::Eval {
            at: t,
            source: crate::error::EvalError::NonFinite,
        })?;
        return Ok(PowerSum { value, exact: Some(exact) });
    }
    let d = signed_power(ts.nu(t)?, alpha)? * nabla(ts, f, t, alpha, cfg)?.value;
    if d == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let p = f.eval(rho)?;
    let top = p + d;
    let value = (top.powi(m as i32 + 1) - p.powi(m as i32 + 1)) / d;
    Ok(PowerSum { value, exact: None })
}

/// Direct summation `Σ_{i=0}^{m} f(ρ(t))^i f(t)^(m−i)`, the oracle for
/// [`power_sum`]. Defined for every `t` (the m = 0 sum is the single
/// term 1).
pub fn power_sum_bruteforce(
    ts: &TimeScale,
    f: &RealFunction,
    t: f64,
    m: u32,
) -> Result<PowerSum> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let rho = ts.rho(t)?;
    if let Some((coeffs, tq)) = exact_point(f, t) {
        let rq = BigRational::from_float(rho).expect("finite member");
        let fv = eval_poly_exact(&coeffs, &tq);
        let pv = eval_poly_exact(&coeffs, &rq);
        let mut exact = BigRational::from_integer(0.into());
        for i in 0..=m {
            exact += br_pow(&pv, i) * br_pow(&fv, m - i);
        }
        let value = exact.to_f64().ok_or(Error::Eval {
            at: t,
            source: crate::error::EvalError::NonFinite,
        })?;
        return Ok(PowerSum { value, exact: Some(exact) });
    }
    let fv = f.eval(t)?;
    let pv = f.eval(rho)?;
    let mut value = 0.0;
    for i in 0..=m {
        value += pv.powi(i as i32) * fv.powi((m - i) as i32);
    }
    Ok(PowerSum { value, exact: None })
}

/// Reconstructs `f(t)` by telescoping backward differences from an anchor
/// `r` on the backward orbit of `t`:
///
/// ```text
/// f(t) = f(r) + Σ_{j=0}^{n−1} ν(ρ^j(t))^α · ∇^α f(ρ^j(t)),   r = ρ^n(t).
/// ```
///
/// Left-dense steps contribute nothing (`ν = 0`), so an orbit that
/// stabilizes before reaching `r` makes the anchor unreachable. The walk
/// gives up after 10^6 steps.
pub fn backward_expansion(
    ts: &TimeScale,
    f: &RealFunction,
    t: f64,
    r: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let r = ts.canonical(r).ok_or(Error::NotInScale(r))?;
    // Derivatives are taken at t and strictly between r and t, never at r,
    // so the anchor itself may be the scale minimum.
    if !ts.tk_contains(t)? {
        return Err(Error::NotInTk(t));
    }
    if r > t {
        return Err(Error::UnreachableAnchor { t, r });
    }
    let mut sum = 0.0;
    let mut cur = t;
    for _ in 0..EXPANSION_CAP {
        let nu = ts.nu(cur)?;
        // A zero-graininess step multiplies the derivative by zero; skip
        // the derivative evaluation rather than force a dense limit.
        if nu > 0.0 {
            sum += signed_power(nu, alpha)? * nabla(ts, f, cur, alpha, cfg)?.value;
        }
        let next = ts.rho(cur)?;
        if next == r {
            return Ok(f.eval(r)? + sum);
        }
        if next == cur || next < r {
            return Err(Error::UnreachableAnchor { t, r });
        }
        cur = next;
    }
    Err(Error::UnreachableAnchor { t, r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_function, Expr};
    use crate::fracdiff::product_nabla;

    fn cfg() -> NablaConfig {
        NablaConfig::default()
    }

    fn f(src: &str) -> RealFunction {
        parse_function(src).unwrap()
    }

    fn one() -> FracOrder {
        FracOrder::one()
    }

    #[test]
    fn triple_product_of_identities_gives_the_cubic_derivative() {
        let ts = TimeScale::integers();
        let fs = [f("t"), f("t"), f("t")];
        for t in [-3.0, 0.0, 1.0, 5.0] {
            let v = general_product_rule(&ts, &fs, t, one(), &cfg()).unwrap();
            assert_eq!(v, 3.0 * t * t - 3.0 * t + 1.0, "t = {t}");
            let cubic = nabla(&ts, &f("t^3"), t, one(), &cfg()).unwrap().value;
            assert_eq!(v, cubic);
        }
    }

    #[test]
    fn product_rule_with_a_zero_factor_is_zero() {
        let ts = TimeScale::integers();
        let fs = [f("t^2"), f("0")];
        let v = general_product_rule(&ts, &fs, 4.0, one(), &cfg()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn two_factor_case_matches_the_product_rule_exactly() {
        let ts = TimeScale::integers();
        let a = f("t^2 - 3");
        let b = f("2*t + 1");
        for t in [-2.0, 3.0, 7.0] {
            let general = general_product_rule(
                &ts,
                &[a.clone(), b.clone()],
                t,
                one(),
                &cfg(),
            )
            .unwrap();
            let two = product_nabla(&ts, &a, &b, t, one(), &cfg()).unwrap();
            assert_eq!(general, two, "t = {t}");
        }
        let pair = general_product_rule(&ts, &[f("t"), f("t")], 3.0, one(), &cfg()).unwrap();
        assert_eq!(pair, 5.0);
    }

    #[test]
    fn product_rule_requires_two_factors() {
        let ts = TimeScale::integers();
        assert!(matches!(
            general_product_rule(&ts, &[f("t")], 1.0, one(), &cfg()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn fractional_order_product_rule_matches_the_expanded_product() {
        let ts = TimeScale::h_integers(2.0).unwrap();
        let alpha = FracOrder::new(1, 3).unwrap();
        let fs = [f("t + 1"), f("t^2")];
        let product = RealFunction::from_expr(Expr::Mul(
            Box::new(fs[0].body().clone()),
            Box::new(fs[1].body().clone()),
        ));
        for t in [-2.0, 4.0, 8.0] {
            let v = general_product_rule(&ts, &fs, t, alpha, &cfg()).unwrap();
            let direct = nabla(&ts, &product, t, alpha, &cfg()).unwrap().value;
            assert!((v - direct).abs() <= 1e-12 * (1.0 + direct.abs()), "t = {t}");
        }
    }

    #[test]
    fn power_sum_on_squares_small_case() {
        let ts = TimeScale::integers();
        let ps = power_sum(&ts, &f("t^2"), 2.0, one(), 1, &cfg()).unwrap();
        assert_eq!(ps.value, 5.0);
        assert_eq!(ps.exact, Some(BigRational::from_integer(5.into())));
    }

    #[test]
    fn power_sum_matches_the_even_power_quotient() {
        let ts = TimeScale::integers();
        let sq = f("t^2");
        for t in [-4i64, -1, 2, 3, 7] {
            for m in 1u32..=4 {
                let ps = power_sum(&ts, &sq, t as f64, one(), m, &cfg()).unwrap();
                let tq = BigRational::from_integer(t.into());
                let pq = BigRational::from_integer((t - 1).into());
                let expect = (br_pow(&tq, 2 * m + 2) - br_pow(&pq, 2 * m + 2))
                    / (BigRational::from_integer((2 * t - 1).into()));
                assert_eq!(ps.exact, Some(expect), "t = {t}, m = {m}");
            }
        }
    }

    #[test]
    fn power_sum_agrees_with_brute_force_exactly() {
        let ts = TimeScale::h_integers(0.5).unwrap();
        let poly = f("t^3 - 2*t + 1/4");
        for t in [-2.0, 0.5, 1.5, 3.0] {
            for m in 1u32..=6 {
                let closed = power_sum(&ts, &poly, t, one(), m, &cfg()).unwrap();
                let brute = power_sum_bruteforce(&ts, &poly, t, m).unwrap();
                assert_eq!(closed.exact, brute.exact, "t = {t}, m = {m}");
            }
        }
    }

    #[test]
    fn power_sum_exact_path_is_order_independent() {
        let ts = TimeScale::integers();
        let half = FracOrder::new(1, 2).unwrap();
        let a = power_sum(&ts, &f("t^2"), 5.0, one(), 3, &cfg()).unwrap();
        let b = power_sum(&ts, &f("t^2"), 5.0, half, 3, &cfg()).unwrap();
        assert_eq!(a.exact, b.exact);
        let brute = power_sum_bruteforce(&ts, &f("t^2"), 5.0, 3).unwrap();
        assert_eq!(a.exact, brute.exact);
    }

    #[test]
    fn first_power_sum_is_the_two_point_sum() {
        let ts = TimeScale::integers();
        let ps = power_sum(&ts, &f("t^3"), 4.0, one(), 1, &cfg()).unwrap();
        assert_eq!(ps.value, 27.0 + 64.0);
    }

    #[test]
    fn float_path_used_for_transcendental_functions() {
        let ts = TimeScale::integers();
        let e = f("exp(t)");
        let closed = power_sum(&ts, &e, 2.0, one(), 2, &cfg()).unwrap();
        assert!(closed.exact.is_none());
        let brute = power_sum_bruteforce(&ts, &e, 2.0, 2).unwrap();
        assert!((closed.value - brute.value).abs() <= 1e-9 * (1.0 + brute.value.abs()));
    }

    #[test]
    fn brute_force_constant_and_zeroth_cases() {
        let ts = TimeScale::integers();
        let c = power_sum_bruteforce(&ts, &f("3"), 5.0, 4).unwrap();
        assert_eq!(c.value, 5.0 * 81.0);
        let zero = power_sum_bruteforce(&ts, &f("t^2"), 5.0, 0).unwrap();
        assert_eq!(zero.value, 1.0);
    }

    #[test]
    fn power_sum_rejects_degenerate_denominators() {
        let dense = TimeScale::interval(0.0, 1.0).unwrap();
        assert!(matches!(
            power_sum(&dense, &f("t^2"), 0.5, one(), 2, &cfg()),
            Err(Error::DegenerateDenominator)
        ));
        let ts = TimeScale::integers();
        // t^2 - t takes the same value at 1 and at 0.
        assert!(matches!(
            power_sum(&ts, &f("t^2 - t"), 1.0, one(), 2, &cfg()),
            Err(Error::DegenerateDenominator)
        ));
        assert!(matches!(
            power_sum(&ts, &f("t^2"), 3.0, one(), 0, &cfg()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn backward_expansion_reproduces_the_cube_sum_identity() {
        let ts = TimeScale::naturals();
        let cubic = f("(t^3 - t)/3");
        let v = backward_expansion(&ts, &cubic, 4.0, 1.0, one(), &cfg()).unwrap();
        assert_eq!(v, 20.0);
        assert_eq!(v, cubic.eval(4.0).unwrap());
        // The individual steps are j(j−1) for j = 2, 3, 4: 2 + 6 + 12.
        assert_eq!(v - cubic.eval(1.0).unwrap(), 2.0 + 6.0 + 12.0);
    }

    #[test]
    fn backward_expansion_telescopes_on_finite_sets() {
        let ts = TimeScale::finite(vec![-1.5, 0.25, 1.0, 2.5, 4.0]).unwrap();
        let g = f("t^3 - 2*t^2 + t - 5");
        for (t, r) in [(4.0, -1.5), (2.5, 0.25), (1.0, 0.25)] {
            let v = backward_expansion(&ts, &g, t, r, one(), &cfg()).unwrap();
            let expect = g.eval(t).unwrap();
            assert!((v - expect).abs() <= 1e-12 * (1.0 + expect.abs()), "t = {t}, r = {r}");
        }
    }

    #[test]
    fn single_step_expansion_is_the_shift_identity() {
        let ts = TimeScale::h_integers(2.0).unwrap();
        let g = f("t^2 + t");
        let alpha = FracOrder::new(1, 3).unwrap();
        let v = backward_expansion(&ts, &g, 6.0, 4.0, alpha, &cfg()).unwrap();
        let direct = g.eval(4.0).unwrap()
            + signed_power(2.0, alpha).unwrap()
                * nabla(&ts, &g, 6.0, alpha, &cfg()).unwrap().value;
        assert_eq!(v, direct);
        assert!((v - g.eval(6.0).unwrap()).abs() <= 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn dense_orbits_make_anchors_unreachable() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        assert!(matches!(
            backward_expansion(&ts, &f("t"), 0.5, 0.2, one(), &cfg()),
            Err(Error::UnreachableAnchor { .. })
        ));
    }

    #[test]
    fn off_orbit_anchors_are_rejected() {
        let ts = TimeScale::integers();
        assert!(matches!(
            backward_expansion(&ts, &f("t"), 5.0, 6.0, one(), &cfg()),
            Err(Error::UnreachableAnchor { .. })
        ));
        let even = TimeScale::h_integers(2.0).unwrap();
        assert!(matches!(
            backward_expansion(&even, &f("t"), 6.0, 6.0, one(), &cfg()),
            Err(Error::UnreachableAnchor { .. })
        ));
    }
}
