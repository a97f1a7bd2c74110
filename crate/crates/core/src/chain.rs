//! Chain rules for backward fractional derivatives, image time scales
//! under strictly increasing maps, composition across the image scale, and
//! the inverse-function derivative.
//!
//! The naive product `f'(g(t))·∇^α g(t)` is wrong on scattered scales; the
//! correct forms either average `f'` over the backward jump (the integral
//! form computed by [`chain_integral`]) or evaluate it at an intermediate
//! point `c ∈ [ρ(t), t]` found by [`chain_c_point`].

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::expr::{Expr, RealFunction};
use crate::fracdiff::{nabla, signed_power, FracOrder, NablaConfig};
use crate::timescale::{Piece, TimeScale};

/// Relative tolerance of the adaptive quadrature fallback.
const QUAD_TOL: f64 = 1e-10;
/// Maximum halving depth of the adaptive quadrature.
const QUAD_MAX_DEPTH: u32 = 24;
/// Cells scanned for a sign change of the intermediate-point residual.
const C_SCAN_CELLS: usize = 1024;
/// Bisection iteration cap for the intermediate point.
const C_BISECT_ITERS: usize = 200;
/// Acceptable certificate residual, relative to the derivative size.
const CERT_RESIDUAL_TOL: f64 = 1e-8;
/// Guard when checking that an inverted point reproduces its image.
const INVERT_CHECK_TOL: f64 = 1e-9;
/// Enumeration guard for materialized image scales.
const IMAGE_CAP: usize = 100_000;

/// 32-node Gauss–Legendre rule on [0, 1]: exact for polynomials up to
/// degree 63. Nodes are found once by Newton iteration on the Legendre
/// polynomial.
fn gauss_nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        const N: usize = 32;
        let mut out = Vec::with_capacity(N);
        for i in 1..=N {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_N and P_N' by the three-term recurrence.
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=N {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map from [−1, 1] to [0, 1].
            out.push(((x + 1.0) / 2.0, w / 2.0));
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
        out
    })
}

fn gauss_pass(value: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    let mut acc = 0.0;
    for &(x, w) in gauss_nodes() {
        acc += w * value(a + (b - a) * x)?;
    }
    Ok(acc * (b - a))
}

/// Integrates over [a, b], halving any span whose two-panel refinement
/// disagrees with its single-panel estimate.
fn adaptive_gauss(
    value: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    depth: u32,
) -> Result<f64> {
    let whole = gauss_pass(value, a, b)?;
    let mid = 0.5 * (a + b);
    let halves = gauss_pass(value, a, mid)? + gauss_pass(value, mid, b)?;
    if (whole - halves).abs() <= QUAD_TOL * (1.0 + halves.abs()) {
        return Ok(halves);
    }
    if depth == 0 {
        return Err(Error::Quadrature);
    }
    Ok(adaptive_gauss(value, a, mid, depth - 1)? + adaptive_gauss(value, mid, b, depth - 1)?)
}

/// The integral-form chain rule: averages `f'` along the backward jump of
/// `g` and multiplies by `∇^α g(t)`:
///
/// ```text
/// [∫₀¹ f'( g(ρ(t)) + φ·ν(t)^α·∇^α g(t) ) dφ] · ∇^α g(t)
/// ```
///
/// At a left-dense point the jump vanishes and this is the classical
/// product `f'(g(t))·∇^α g(t)`. Polynomial `f` integrates exactly in one
/// Gauss pass; other integrands go through the adaptive refinement.
pub fn chain_integral(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let dg = nabla(ts, g, t, alpha, cfg)?.value;
    let base = g.eval(ts.rho(t)?)?;
    let jump = signed_power(ts.nu(t)?, alpha)? * dg;
    let deriv = f.derivative();
    let mut integrand = |phi: f64| {
        deriv
            .eval(base + phi * jump)
            .map_err(|source| Error::Eval { at: base + phi * jump, source })
    };
    let polynomial = f.body().poly_degree().is_some();
    let integral = if polynomial {
        gauss_pass(&mut integrand, 0.0, 1.0)?
    } else {
        adaptive_gauss(&mut integrand, 0.0, 1.0, QUAD_MAX_DEPTH)?
    };
    Ok(integral * dg)
}

/// An intermediate-point certificate for the pointwise chain rule: a point
/// `c ∈ [ρ(t), t]` with `∇^α(f∘g)(t) = f'(g(c))·∇^α g(t)` up to `residual`.
#[derive(Debug, Clone, Copy)]
pub struct ChainPointCert {
    pub c: f64,
    /// `∇^α (f∘g)(t)`.
    pub lhs: f64,
    /// `f'(g(c)) · ∇^α g(t)`.
    pub rhs: f64,
    pub residual: f64,
}

/// Finds the intermediate point of the pointwise chain rule.
///
/// At a left-dense `t` the point is `t` itself. At a left-scattered `t`
/// the residual `h(c) = f'(g(c))·∇^α g(t) − ∇^α(f∘g)(t)` is scanned over
/// `[ρ(t), t]` and the leftmost sign change is bisected. A scan without a
/// sign change falls back to the smallest-residual cell and is reported
/// inconclusive if that residual is not negligible.
pub fn chain_c_point(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<ChainPointCert> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let composite = f.compose(g);
    let lhs = nabla(ts, &composite, t, alpha, cfg)?.value;
    let dg = nabla(ts, g, t, alpha, cfg)?.value;
    let rho = ts.rho(t)?;
    let deriv = f.derivative();
    let rhs_at = |c: f64| -> Result<f64> {
        let gc = g.eval(c)?;
        Ok(deriv.eval(gc).map_err(|source| Error::Eval { at: gc, source })? * dg)
    };
    let accept = CERT_RESIDUAL_TOL * (1.0 + lhs.abs());
    if rho == t {
        let rhs = rhs_at(t)?;
        return Ok(ChainPointCert { c: t, lhs, rhs, residual: (lhs - rhs).abs() });
    }

    let h = (t - rho) / C_SCAN_CELLS as f64;
    let mut prev: Option<(f64, f64)> = None;
    let mut best: Option<(f64, f64)> = None;
    let mut bracket: Option<((f64, f64), (f64, f64))> = None;
    for i in 0..=C_SCAN_CELLS {
        let c = if i == C_SCAN_CELLS { t } else { rho + h * i as f64 };
        let val = rhs_at(c)? - lhs;
        if val == 0.0 {
            let rhs = rhs_at(c)?;
            return Ok(ChainPointCert { c, lhs, rhs, residual: (lhs - rhs).abs() });
        }
        if best.map_or(true, |(_, r)| val.abs() < r) {
            best = Some((c, val.abs()));
        }
        if let Some((pc, pv)) = prev {
            if pv.signum() != val.signum() {
                bracket = Some(((pc, pv), (c, val)));
                break;
            }
        }
        prev = Some((c, val));
    }

    let c = match bracket {
        Some(((mut lo, lo_val), (mut hi, _))) => {
            let width_tol = 1e-12 * (1.0 + t.abs());
            let mut lo_sign = lo_val.signum();
            for _ in 0..C_BISECT_ITERS {
                if hi - lo <= width_tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let val = rhs_at(mid)? - lhs;
                if val == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if val.signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
                lo_sign = (rhs_at(lo)? - lhs).signum();
            }
            0.5 * (lo + hi)
        }
        None => {
            let (c, residual) = best.expect("scan evaluated at least one cell");
            if residual > accept {
                return Err(Error::Inconclusive { candidate: c, residual });
            }
            c
        }
    };
    let rhs = rhs_at(c)?;
    let residual = (lhs - rhs).abs();
    if residual > accept {
        return Err(Error::Inconclusive { candidate: c, residual });
    }
    Ok(ChainPointCert { c, lhs, rhs, residual })
}

/// The range of a strictly increasing function on a scale, as a scale.
///
/// The map is checked by sampling before use. Finite material maps
/// pointwise and intervals map end-to-end. A uniform grid maps to a grid
/// when the function is affine; otherwise its image is materialized, which
/// on an unbounded grid requires the explicit `window` (restriction is
/// applied before mapping whenever `window` is given).
pub fn image_timescale(
    ts: &TimeScale,
    g: &RealFunction,
    window: Option<(f64, f64)>,
) -> Result<TimeScale> {
    let ts = match window {
        Some((lo, hi)) => {
            let lo = ts
                .ceil_point(lo)
                .ok_or_else(|| Error::InvalidScale(format!("window start {lo} after scale end")))?;
            let hi = ts.floor_point(hi).ok_or_else(|| {
                Error::InvalidScale(format!("window end {hi} before scale start"))
            })?;
            ts.restrict(lo, hi)?
        }
        None => ts.clone(),
    };
    check_increasing(g, &ts)?;
    map_scale(&ts, g)
}

fn check_increasing(g: &RealFunction, ts: &TimeScale) -> Result<()> {
    // An exactly constant positive derivative certifies monotonicity
    // without sampling, which matters on unbounded scales.
    if let Expr::Const(c) = g.derivative() {
        if *c > 0.0 {
            return Ok(());
        }
    }
    let (lo, hi) = match (ts.min(), ts.max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => (-100.0, 100.0),
    };
    crate::expr::verify_strictly_increasing(g, ts, lo, hi)
}

fn map_scale(ts: &TimeScale, g: &RealFunction) -> Result<TimeScale> {
    match ts {
        TimeScale::FiniteSet(vs) => {
            let mut mapped = Vec::with_capacity(vs.len());
            for v in vs {
                mapped.push(g.eval(*v)?);
            }
            TimeScale::finite(mapped)
        }
        TimeScale::UniformGrid { anchor, step, lower, upper } => {
            if let Expr::Const(slope) = g.derivative() {
                if *slope > 0.0 {
                    return Ok(TimeScale::UniformGrid {
                        anchor: g.eval(*anchor)?,
                        step: slope * step,
                        lower: lower.map(|v| g.eval(v)).transpose()?,
                        upper: upper.map(|v| g.eval(v)).transpose()?,
                    });
                }
            }
            match ts.enumerate_within(
                ts.min().unwrap_or(f64::NEG_INFINITY),
                ts.max().unwrap_or(f64::INFINITY),
                true,
                true,
                IMAGE_CAP,
            ) {
                Ok(Some(points)) => {
                    let mut mapped = Vec::with_capacity(points.len());
                    for v in points {
                        mapped.push(g.eval(v)?);
                    }
                    TimeScale::finite(mapped)
                }
                _ => Err(Error::Hypothesis(
                    "the image of an unbounded grid under a nonaffine map needs a working window"
                        .into(),
                )),
            }
        }
        TimeScale::ContinuousInterval { a, b } => TimeScale::interval(g.eval(*a)?, g.eval(*b)?),
        TimeScale::PieceUnion(pieces) => {
            let mut mapped = Vec::with_capacity(pieces.len());
            for p in pieces {
                mapped.push(match p {
                    Piece::Point(v) => Piece::Point(g.eval(*v)?),
                    Piece::Interval(lo, hi) => Piece::Interval(g.eval(*lo)?, g.eval(*hi)?),
                });
            }
            TimeScale::union(mapped)
        }
    }
}

/// The composition rule across the image scale: the order-1 backward
/// derivative of `f` on the image of `g`, evaluated at `g(t)`, times
/// `∇^α g(t)`. A bounded neighborhood of `t` is imaged internally, which
/// is enough backward material for the derivative of `f` at `g(t)`.
pub fn compose_monotone(
    ts: &TimeScale,
    g: &RealFunction,
    f: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let dg = nabla(ts, g, t, alpha, cfg)?.value;
    let local = backward_neighborhood(ts, t)?;
    let image = image_timescale(&local, g, None)?;
    let df = nabla(&image, f, g.eval(t)?, FracOrder::one(), cfg)?.value;
    Ok(df * dg)
}

/// A compact sub-scale around `t`: several backward steps (a unit of dense
/// material when the backward neighborhood is continuous) plus a unit of
/// forward material, which keeps two-sided dense limits available on the
/// image.
fn backward_neighborhood(ts: &TimeScale, t: f64) -> Result<TimeScale> {
    let reach = ts.iterate_rho(t, 4)?.min(t - 1.0);
    let lo = ts.floor_point(reach).or(ts.min()).unwrap_or(t);
    let hi = ts.floor_point(t + 1.0).unwrap_or(t).max(t);
    if lo < hi {
        ts.restrict(lo, hi)
    } else {
        TimeScale::finite(vec![t])
    }
}

/// The inverse-function derivative on the image scale: for `y = f(x)` with
/// `f` strictly increasing,
/// `∇^α (f⁻¹)(y) = ν̃(y)^(1−α) / ∇^(1) f(x)` where `ν̃` is the graininess
/// of the image scale (the factor is 1 for α = 1).
pub fn inverse_nabla(
    ts: &TimeScale,
    f: &RealFunction,
    y: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    check_increasing(f, ts)?;
    let x = invert_monotone(ts, f, y)?;
    if !ts.tk_contains(x)? {
        return Err(Error::NotInTk(y));
    }
    let d = nabla(ts, f, x, FracOrder::one(), cfg)?.value;
    if d == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    if alpha.is_one() {
        Ok(1.0 / d)
    } else {
        let nu_image = y - f.eval(ts.rho(x)?)?;
        Ok(nu_image.max(0.0).powf(1.0 - alpha.as_f64()) / d)
    }
}

/// Finds the scale member whose image under increasing `f` is `y`, by real
/// bisection followed by snapping to the scale.
fn invert_monotone(ts: &TimeScale, f: &RealFunction, y: f64) -> Result<f64> {
    let no_preimage =
        || Error::Hypothesis(format!("y = {y} is not the image of a scale member"));
    let mut lo;
    let mut hi;
    match (ts.min(), ts.max()) {
        (Some(a), Some(b)) => {
            lo = a;
            hi = b;
        }
        _ => {
            // Expand a bracket around the origin until it straddles y.
            let mut span = 1.0;
            loop {
                lo = ts.min().unwrap_or(-span);
                hi = ts.max().unwrap_or(span);
                let spans_low = f.eval(lo)? <= y;
                let spans_high = f.eval(hi)? >= y;
                if spans_low && spans_high {
                    break;
                }
                span *= 4.0;
                if span > 1e18 {
                    return Err(no_preimage());
                }
            }
        }
    }
    if f.eval(lo)? > y || f.eval(hi)? < y {
        return Err(no_preimage());
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f.eval(mid)? <= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Snap the real root to the nearest member on either side; exact-match
    // membership would reject a root that is off by one rounding step.
    let root = 0.5 * (lo + hi);
    let mut best: Option<(f64, f64)> = None;
    for cand in [ts.floor_point(root), ts.ceil_point(root)].into_iter().flatten() {
        let gap = (f.eval(cand)? - y).abs();
        if gap <= INVERT_CHECK_TOL * (1.0 + y.abs())
            && best.map_or(true, |(_, prev)| gap < prev)
        {
            best = Some((cand, gap));
        }
    }
    best.map(|(x, _)| x).ok_or_else(no_preimage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_function;

    fn alpha(p: i64, q: i64) -> FracOrder {
        FracOrder::new(p, q).unwrap()
    }

    fn cfg() -> NablaConfig {
        NablaConfig::default()
    }

    fn f(src: &str) -> RealFunction {
        parse_function(src).unwrap()
    }

    #[test]
    fn gauss_rule_integrates_high_degree_polynomials_exactly() {
        // ∫₀¹ x^10 dx = 1/11 and ∫₀¹ (2x−1)^63 dx = 0.
        let mut p10 = |x: f64| Ok(x.powi(10));
        let v = gauss_pass(&mut p10, 0.0, 1.0).unwrap();
        assert!((v - 1.0 / 11.0).abs() < 1e-15);
        let mut odd = |x: f64| Ok((2.0 * x - 1.0f64).powi(63));
        let v = gauss_pass(&mut odd, 0.0, 1.0).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn adaptive_quadrature_handles_transcendental_integrands() {
        let mut e = |x: f64| Ok(x.exp());
        let v = adaptive_gauss(&mut e, 0.0, 1.0, QUAD_MAX_DEPTH).unwrap();
        assert!((v - (1.0f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn chain_integral_on_even_grid_matches_the_composite() {
        let ts = TimeScale::h_integers(2.0).unwrap();
        let fo = f("t^2");
        let go = f("sqrt(2)*t");
        for t in [-4.0, -2.0, 0.0, 2.0, 4.0, 6.0] {
            let v = chain_integral(&ts, &fo, &go, t, FracOrder::one(), &cfg()).unwrap();
            let expect = 2.0 * (2.0 * t - 2.0);
            assert!((v - expect).abs() <= 1e-10, "t = {t}: {v} vs {expect}");
            let composite = fo.compose(&go);
            let direct = nabla(&ts, &composite, t, FracOrder::one(), &cfg()).unwrap().value;
            assert!((v - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
        }
        // The naive pointwise product is wrong at every point of the grid.
        let t = 2.0;
        let naive = fo.derivative().eval(go.eval(t).unwrap()).unwrap()
            * nabla(&ts, &go, t, FracOrder::one(), &cfg()).unwrap().value;
        assert!((naive - 8.0).abs() < 1e-12);
        let correct = chain_integral(&ts, &fo, &go, t, FracOrder::one(), &cfg()).unwrap();
        assert!((correct - 4.0).abs() < 1e-12);
    }

    #[test]
    fn chain_integral_reduces_to_the_ordinary_rule_on_the_continuum() {
        let ts = TimeScale::interval(-2.0, 2.0).unwrap();
        let v = chain_integral(&ts, &f("t^2"), &f("t^3"), 1.0, FracOrder::one(), &cfg()).unwrap();
        assert!((v - 6.0).abs() < 1e-6, "value {v}");
    }

    #[test]
    fn chain_integral_is_zero_for_a_constant_inner_function() {
        let ts = TimeScale::integers();
        let v = chain_integral(&ts, &f("exp(t)"), &f("5"), 3.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn intermediate_point_on_even_grid_is_one_step_back() {
        let ts = TimeScale::h_integers(2.0).unwrap();
        let cert =
            chain_c_point(&ts, &f("t^2"), &f("sqrt(2)*t"), 4.0, FracOrder::one(), &cfg()).unwrap();
        assert!((cert.c - 3.0).abs() < 1e-10, "c = {}", cert.c);
        assert!(cert.residual <= CERT_RESIDUAL_TOL * (1.0 + cert.lhs.abs()));
        assert!(cert.c >= 2.0 && cert.c <= 4.0);
    }

    #[test]
    fn intermediate_point_for_constant_inner_function_is_the_backward_jump() {
        let ts = TimeScale::integers();
        let cert = chain_c_point(&ts, &f("t^3"), &f("2"), 5.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(cert.c, 4.0);
        assert_eq!(cert.residual, 0.0);
    }

    #[test]
    fn intermediate_point_at_dense_points_is_the_point_itself() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        let cert = chain_c_point(&ts, &f("t^2"), &f("t^3"), 1.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(cert.c, 1.0);
        assert!(cert.residual <= 1e-8 * (1.0 + cert.lhs.abs()), "residual {}", cert.residual);
    }

    #[test]
    fn image_of_integers_under_doubling_is_the_even_grid() {
        let ts = TimeScale::integers();
        let image = image_timescale(&ts, &f("2*t"), Some((-5.0, 5.0))).unwrap();
        for v in [-10.0, -8.0, 0.0, 10.0] {
            assert!(image.contains(v), "missing {v}");
        }
        assert!(!image.contains(3.0));
        assert_eq!(image.min(), Some(-10.0));
        assert_eq!(image.max(), Some(10.0));
    }

    #[test]
    fn image_of_naturals_under_square_is_the_squares() {
        let ts = TimeScale::naturals();
        let image = image_timescale(&ts, &f("t^2"), Some((1.0, 10.0))).unwrap();
        let expect: Vec<f64> = (1..=10).map(|k| (k * k) as f64).collect();
        assert_eq!(image, TimeScale::finite(expect).unwrap());
    }

    #[test]
    fn image_of_an_interval_is_the_mapped_interval() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let image = image_timescale(&ts, &f("t^3"), None).unwrap();
        assert_eq!(image, TimeScale::interval(0.0, 1.0).unwrap());
    }

    #[test]
    fn image_requires_monotonicity_and_windows_where_needed() {
        let ts = TimeScale::integers();
        assert!(matches!(
            image_timescale(&ts, &f("2-t"), Some((-5.0, 5.0))),
            Err(Error::NotMonotone { .. })
        ));
        assert!(image_timescale(&ts, &f("t^3"), None).is_err());
    }

    #[test]
    fn composition_across_the_image_matches_the_direct_derivative() {
        let ts = TimeScale::integers();
        let g = f("2*t");
        let ff = f("t^2");
        for t in [-1.0, 2.0, 5.0] {
            let v = compose_monotone(&ts, &g, &ff, t, FracOrder::one(), &cfg()).unwrap();
            assert!((v - (8.0 * t - 4.0)).abs() < 1e-9, "t = {t}: {v}");
            let direct = nabla(&ts, &f("4*t^2"), t, FracOrder::one(), &cfg()).unwrap().value;
            assert!((v - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn composition_with_identity_outer_function_returns_inner_derivative() {
        let ts = TimeScale::naturals();
        let v = compose_monotone(&ts, &f("t^2"), &f("t"), 4.0, alpha(1, 2), &cfg()).unwrap();
        let dg = nabla(&ts, &f("t^2"), 4.0, alpha(1, 2), &cfg()).unwrap().value;
        assert!((v - dg).abs() <= 1e-12 * (1.0 + dg.abs()));
    }

    #[test]
    fn composition_reduces_to_the_ordinary_chain_rule_when_dense() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        let v = compose_monotone(&ts, &f("t^2"), &f("t^3"), 1.0, FracOrder::one(), &cfg()).unwrap();
        assert!((v - 6.0).abs() < 1e-5, "value {v}");
    }

    #[test]
    fn inverse_derivative_on_the_squares() {
        let ts = TimeScale::naturals();
        let v = inverse_nabla(&ts, &f("t^2"), 9.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(v, 0.2);
        let half = inverse_nabla(&ts, &f("t^2"), 9.0, alpha(1, 2), &cfg()).unwrap();
        assert!((half - 5.0f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn inverse_derivative_on_the_continuum() {
        let ts = TimeScale::interval(1.0, 3.0).unwrap();
        let v = inverse_nabla(&ts, &f("t^3"), 8.0, FracOrder::one(), &cfg()).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-8, "value {v}");
    }

    #[test]
    fn inverse_consistency_identity() {
        let ts = TimeScale::integers();
        let ff = f("t^3 + t");
        for t in [-2.0, 1.0, 3.0] {
            let y = ff.eval(t).unwrap();
            let inv = inverse_nabla(&ts, &ff, y, FracOrder::one(), &cfg()).unwrap();
            let d = nabla(&ts, &ff, t, FracOrder::one(), &cfg()).unwrap().value;
            assert!((inv * d - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_rejects_points_outside_the_image() {
        let ts = TimeScale::naturals();
        assert!(inverse_nabla(&ts, &f("t^2"), 10.0, FracOrder::one(), &cfg()).is_err());
        // y = 1 is the image of the scale minimum, which is outside T^k.
        assert!(matches!(
            inverse_nabla(&ts, &f("t^2"), 1.0, FracOrder::one(), &cfg()),
            Err(Error::NotInTk(_))
        ));
    }
}
