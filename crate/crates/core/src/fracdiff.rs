//! The backward fractional derivative of order α = p/q in (0, 1].
//!
//! At a left-scattered point the derivative is the exact quotient
//! `(f(t) − f(ρ(t))) / ν(t)^α`. At a left-dense point it is the limit of
//! `(f(t) − f(s)) / (t − s)^α` as `s → t` through the scale: two-sided when
//! the order is an odd reciprocal (negative bases then have real powers),
//! left-only otherwise. The limit is estimated by halving offsets and
//! declaring convergence when three consecutive quotients agree, with an
//! auxiliary geometric-decay detector for quotients that shrink to zero at
//! a stable rate, as they do for α < 1 wherever the function is Lipschitz.

use crate::error::{Error, EvalError, QuotientSample, Result, Side};
use crate::expr::RealFunction;
use crate::timescale::TimeScale;

/// Classification of the order α = p/q.
///
/// `OddReciprocal` means p = 1 with q odd (α = 1 included). These are the
/// orders for which `x^α` is real for negative `x`, so dense limits may be
/// approached from both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderClass {
    OddReciprocal,
    General,
}

impl OrderClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderClass::OddReciprocal => "odd-reciprocal",
            OrderClass::General => "general",
        }
    }
}

/// An exact rational order α = p/q with 0 < α ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FracOrder {
    p: i64,
    q: i64,
}

impl FracOrder {
    /// Builds the reduced order p/q, rejecting values outside (0, 1].
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 || p == 0 || (p < 0) != (q < 0) {
            return Err(Error::InvalidOrder { p, q });
        }
        let (mut p, mut q) = (p.abs(), q.abs());
        let g = num::integer::gcd(p, q);
        p /= g;
        q /= g;
        if p > q {
            return Err(Error::InvalidOrder { p, q });
        }
        Ok(FracOrder { p, q })
    }

    pub fn one() -> Self {
        FracOrder { p: 1, q: 1 }
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    pub fn as_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn is_one(self) -> bool {
        self.p == self.q
    }

    pub fn classify(self) -> OrderClass {
        if self.p == 1 && self.q % 2 == 1 {
            OrderClass::OddReciprocal
        } else {
            OrderClass::General
        }
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.q == 1 {
            write!(out, "{}", self.p)
        } else {
            write!(out, "{}/{}", self.p, self.q)
        }
    }
}

impl std::str::FromStr for FracOrder {
    type Err = Error;

    /// Accepts `p/q` or a bare integer numerator (in practice `1`).
    fn from_str(src: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { position: 1, message: msg.into() };
        let src = src.trim();
        match src.split_once('/') {
            Some((num, den)) => {
                let p = num.trim().parse().map_err(|_| bad("order numerator is not an integer"))?;
                let q = den.trim().parse().map_err(|_| bad("order denominator is not an integer"))?;
                FracOrder::new(p, q)
            }
            None => {
                let p = src.parse().map_err(|_| bad("order is not an integer or p/q"))?;
                FracOrder::new(p, 1)
            }
        }
    }
}

/// `x^α` extended to negative bases for odd-reciprocal orders: the real
/// q-th root `−|x|^(1/q)`. Negative bases with any other order have no real
/// power and are rejected.
pub fn signed_power(x: f64, alpha: FracOrder) -> Result<f64> {
    if alpha.is_one() {
        return Ok(x);
    }
    if x >= 0.0 {
        Ok(x.powf(alpha.as_f64()))
    } else {
        match alpha.classify() {
            OrderClass::OddReciprocal => Ok(-(-x).powf(alpha.as_f64())),
            OrderClass::General => Err(Error::NonRealPower { base: x }),
        }
    }
}

/// Tunables for the dense-limit estimator.
#[derive(Debug, Clone, Copy)]
pub struct NablaConfig {
    /// Convergence tolerance: three consecutive quotients must agree within
    /// `tol·(1+|q|)`, and two-sided estimates within ten times that.
    pub tol: f64,
    /// Number of times the initial offset is halved before giving up.
    pub max_halvings: u32,
}

impl Default for NablaConfig {
    fn default() -> Self {
        NablaConfig { tol: 1e-7, max_halvings: 40 }
    }
}

/// How a derivative value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Left-scattered point: the exact backward quotient.
    ExactScattered,
    /// Left-dense point, limit taken from the left only.
    DenseLimitLeft,
    /// Left-dense point with no left neighbors (a scale minimum), limit
    /// taken from the right; only possible for odd-reciprocal orders.
    DenseLimitRight,
    /// Left-dense point, both one-sided limits computed and averaged.
    DenseLimitTwoSided,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactScattered => "exact-scattered",
            Method::DenseLimitLeft => "dense-limit-left",
            Method::DenseLimitRight => "dense-limit-right",
            Method::DenseLimitTwoSided => "dense-limit-two-sided",
        }
    }
}

/// A derivative value with provenance and a numeric quality estimate.
#[derive(Debug, Clone, Copy)]
pub struct NablaResult {
    pub value: f64,
    pub method: Method,
    /// Zero for exact quotients; for limits, the spread of the final
    /// quotients (or the last magnitude when a decay to zero was detected).
    pub error_estimate: f64,
    /// Number of difference quotients evaluated.
    pub samples_used: usize,
}

/// Initial dense-limit offset, before clamping to the boundary distance.
const BASE_OFFSET: f64 = 0.1;
/// Consecutive quotient ratios required by the geometric-decay detector.
const DECAY_RATIOS: usize = 6;
/// Ratio band accepted by the decay detector: `2^(α−1)` lies in this band
/// for every fractional α up to ≈ 0.93, and a halving first-order term for
/// α = 1 sits at 0.5.
const DECAY_BAND: (f64, f64) = (0.30, 0.95);
/// Maximum spread of the ratios accepted as one stable geometric rate.
const DECAY_SPREAD: f64 = 0.05;
/// Multiplier for the rounding-noise allowance added to the agreement
/// threshold. One quotient carries evaluation noise of roughly
/// `ε·(|f(t)| + |f(s)|)` amplified by the rounding steps of the expression
/// tree (dozens, more under cancellation), all divided by the offset
/// power. Without this allowance a smooth function whose values are large
/// relative to its derivative can never satisfy a purely relative spread
/// bound, because the quotient noise `ε·|f|/δ` outgrows it before the
/// truncation term `f''·δ` shrinks into it. Generous on purpose: it only
/// widens the acceptance band by the amount rounding makes unobservable.
const NOISE_K: f64 = 2048.0;

/// The backward derivative of order α at `t`.
pub fn nabla(
    ts: &TimeScale,
    f: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<NablaResult> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    if !ts.tk_contains(t)? {
        return Err(Error::NotInTk(t));
    }
    let rho = ts.rho(t)?;
    if rho < t {
        let f_t = eval_at(f, t)?;
        let f_rho = eval_at(f, rho)?;
        let value = (f_t - f_rho) / signed_power(t - rho, alpha)?;
        if !value.is_finite() {
            return Err(Error::Eval { at: t, source: EvalError::NonFinite });
        }
        return Ok(NablaResult {
            value,
            method: Method::ExactScattered,
            error_estimate: 0.0,
            samples_used: 1,
        });
    }

    let left_ok = ts.min().map_or(true, |m| t > m);
    let right_ok = ts.sigma(t)? == t && ts.max().map_or(true, |m| t < m);
    let two_sided = alpha.classify() == OrderClass::OddReciprocal;

    if !left_ok && !(two_sided && right_ok) {
        return Err(Error::NoApproachPoints { t, side: Side::Left });
    }

    let left = if left_ok { Some(run_side(ts, f, t, alpha, cfg, Side::Left)?) } else { None };
    let right = if two_sided && right_ok {
        Some(run_side(ts, f, t, alpha, cfg, Side::Right)?)
    } else {
        None
    };

    match (left, right) {
        (Some(l), Some(r)) => {
            let samples_used = l.samples.len() + r.samples.len();
            match (l.outcome, r.outcome) {
                (Some(lv), Some(rv)) => {
                    let rough = 0.5 * (lv.value + rv.value);
                    // A side accepted at its noise floor stops at a larger
                    // offset and so carries a truncation error of the same
                    // size as that floor, with opposite signs on the two
                    // sides; the consistency gap has to absorb both.
                    let gap_allowance = 10.0 * cfg.tol * (1.0 + rough.abs())
                        + 2.0 * (lv.noise + rv.noise);
                    if (lv.value - rv.value).abs() > gap_allowance {
                        return Err(Error::NonDifferentiable {
                            t,
                            trace: merged_trace(&l, &r),
                        });
                    }
                    // Prefer averaging the two quotients taken at the same
                    // offset index: on a continuous piece they sit at t ∓ δ,
                    // so the odd error terms cancel and the average is more
                    // accurate than either one-sided estimate.
                    let value = match matched_average(&l, &r) {
                        Some(v) if !lv.by_decay && !rv.by_decay => v,
                        _ => rough,
                    };
                    let error_estimate = lv
                        .error_estimate
                        .max(rv.error_estimate)
                        .max(0.5 * (lv.value - rv.value).abs());
                    Ok(NablaResult {
                        value,
                        method: Method::DenseLimitTwoSided,
                        error_estimate,
                        samples_used,
                    })
                }
                _ => Err(Error::NonDifferentiable { t, trace: merged_trace(&l, &r) }),
            }
        }
        (Some(l), None) => finish_one_sided(t, l, Method::DenseLimitLeft),
        (None, Some(r)) => finish_one_sided(t, r, Method::DenseLimitRight),
        (None, None) => unreachable!("guarded by the approach-point check"),
    }
}

fn finish_one_sided(t: f64, run: SideRun, method: Method) -> Result<NablaResult> {
    let samples_used = run.samples.len();
    match run.outcome {
        Some(est) => Ok(NablaResult {
            value: est.value,
            method,
            error_estimate: est.error_estimate,
            samples_used,
        }),
        None => Err(Error::NonDifferentiable {
            t,
            trace: run.samples.into_iter().map(|(_, s)| s).collect(),
        }),
    }
}

#[derive(Debug, Clone, Copy)]
struct SideEstimate {
    value: f64,
    error_estimate: f64,
    /// Rounding-noise allowance active when the side was accepted; the
    /// two-sided consistency gap must absorb it too, because a side that
    /// stops at the noise floor still carries a truncation error of that
    /// size.
    noise: f64,
    by_decay: bool,
}

#[derive(Debug)]
struct SideRun {
    samples: Vec<(u32, QuotientSample)>,
    outcome: Option<SideEstimate>,
}

fn merged_trace(l: &SideRun, r: &SideRun) -> Vec<QuotientSample> {
    l.samples.iter().chain(r.samples.iter()).map(|(_, s)| s.clone()).collect()
}

/// Average of the two side quotients taken at the same offset index, at
/// the most accurate index available.
///
/// On a continuous piece the two quotients sit at `t ∓ δ`, so averaging
/// cancels the odd error terms: the truncation of the average shrinks
/// four-fold per halving while its rounding noise doubles. Successive
/// differences of the averages therefore shrink through the truncation
/// regime and grow once noise dominates. The average at that crossover is
/// the accurate one, so the scan accepts the first non-improving step that
/// follows at least two improving steps (a lone early dip can be a
/// higher-order cancellation artifact, not the noise floor). If no such
/// crossover appears, a still-shrinking tail means truncation-limited
/// averages (take the last), and a wiggling tail means noise from the
/// start (take the first, where noise is smallest).
fn matched_average(l: &SideRun, r: &SideRun) -> Option<f64> {
    let mut averages = Vec::new();
    for (k, sample) in &l.samples {
        if let Some((_, other)) = r.samples.iter().find(|(rk, _)| rk == k) {
            averages.push(0.5 * (sample.quotient + other.quotient));
        }
    }
    if averages.len() < 3 {
        return averages.last().copied();
    }
    let mut prev_step = f64::INFINITY;
    let mut shrinking = 0u32;
    for pair in averages.windows(2) {
        let step = (pair[1] - pair[0]).abs();
        if step >= prev_step && shrinking >= 2 {
            return Some(pair[0]);
        }
        shrinking = if step < prev_step { shrinking + 1 } else { 0 };
        prev_step = step;
    }
    if shrinking >= 2 {
        averages.last().copied()
    } else {
        averages.first().copied()
    }
}

fn eval_at(f: &RealFunction, x: f64) -> Result<f64> {
    f.eval(x)
}

/// Runs the halving-offset estimator on one side of `t`. A `SideRun` with
/// `outcome: None` means the quotients neither settled nor decayed.
fn run_side(
    ts: &TimeScale,
    f: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
    side: Side,
) -> Result<SideRun> {
    let boundary = match side {
        Side::Left => ts.min().map(|m| t - m),
        Side::Right => ts.max().map(|m| m - t),
    };
    let delta0 = boundary.map_or(BASE_OFFSET, |d| d.min(BASE_OFFSET));
    if !(delta0 > 0.0) {
        return Err(Error::NoApproachPoints { t, side });
    }
    let f_t = eval_at(f, t)?;
    let mut run = SideRun { samples: Vec::new(), outcome: None };
    let mut noise_floors: Vec<f64> = Vec::new();
    for k in 0..=cfg.max_halvings {
        let delta = delta0 * (0.5f64).powi(k as i32);
        let s = match side {
            Side::Left => ts.floor_point(t - delta),
            Side::Right => ts.ceil_point(t + delta),
        };
        let s = match s {
            Some(s) if s != t => s,
            _ => continue,
        };
        if run.samples.last().is_some_and(|(_, prev)| prev.s == s) {
            continue;
        }
        let f_s = eval_at(f, s)?;
        let w = signed_power(t - s, alpha)?;
        let quotient = (f_t - f_s) / w;
        if !quotient.is_finite() {
            return Err(Error::Eval { at: s, source: EvalError::NonFinite });
        }
        run.samples.push((k, QuotientSample { s, quotient }));
        noise_floors.push(NOISE_K * f64::EPSILON * (1.0 + f_t.abs() + f_s.abs()) / w.abs());
        if let Some(est) = check_agreement(&run.samples, &noise_floors, cfg).or_else(|| {
            check_geometric_decay(&run.samples)
        }) {
            run.outcome = Some(est);
            return Ok(run);
        }
    }
    run.outcome = tail_decay_fallback(&run.samples);
    Ok(run)
}

/// Three consecutive quotients pairwise within `tol·(1+|latest|)`, padded
/// by the rounding-noise allowance of the three quotients involved (see
/// [`NOISE_K`]).
fn check_agreement(
    samples: &[(u32, QuotientSample)],
    noise_floors: &[f64],
    cfg: &NablaConfig,
) -> Option<SideEstimate> {
    let n = samples.len();
    if n < 3 {
        return None;
    }
    let (a, b, c) =
        (samples[n - 3].1.quotient, samples[n - 2].1.quotient, samples[n - 1].1.quotient);
    let spread = (a - b).abs().max((b - c).abs()).max((a - c).abs());
    let noise = noise_floors[n - 3].max(noise_floors[n - 2]).max(noise_floors[n - 1]);
    if spread <= cfg.tol * (1.0 + c.abs()) + noise {
        Some(SideEstimate { value: c, error_estimate: spread, noise, by_decay: false })
    } else {
        None
    }
}

/// Detects quotients shrinking to zero at one stable geometric rate.
///
/// For α < 1 at a left-dense point the quotient behaves like `C·δ^(1−α)`,
/// whose halving ratio `2^(α−1)` is a constant inside [`DECAY_BAND`]; such
/// sequences cannot pass the three-in-agreement test in any reasonable
/// number of halvings, but their limit is certainly zero. A sequence
/// approaching a nonzero limit has ratios drifting toward 1, which the
/// spread bound rejects.
fn check_geometric_decay(samples: &[(u32, QuotientSample)]) -> Option<SideEstimate> {
    let n = samples.len();
    if n < DECAY_RATIOS + 1 {
        return None;
    }
    let window: Vec<f64> =
        samples[n - (DECAY_RATIOS + 1)..].iter().map(|(_, s)| s.quotient).collect();
    if window.iter().any(|v| *v == 0.0) {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for pair in window.windows(2) {
        let r = pair[1] / pair[0];
        if !(r >= DECAY_BAND.0 && r <= DECAY_BAND.1) {
            return None;
        }
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if hi - lo <= DECAY_SPREAD {
        Some(SideEstimate {
            value: 0.0,
            error_estimate: window.last().unwrap().abs(),
            noise: 0.0,
            by_decay: true,
        })
    } else {
        None
    }
}

/// Last-resort zero detection after the halving budget is exhausted: the
/// whole quotient history shrank monotonically to at most half its starting
/// magnitude without a sign change. Catches decay rates just outside
/// [`DECAY_BAND`] (α barely below 1); noise-dominated sequences fail the
/// monotonicity requirement.
fn tail_decay_fallback(samples: &[(u32, QuotientSample)]) -> Option<SideEstimate> {
    if samples.len() < 20 {
        return None;
    }
    let values: Vec<f64> = samples.iter().map(|(_, s)| s.quotient).collect();
    let first = values[0];
    let last = *values.last().unwrap();
    if first == 0.0 || last.signum() != first.signum() {
        return None;
    }
    let monotone = values.windows(2).all(|w| w[1].abs() < w[0].abs());
    if monotone && last.abs() <= 0.5 * first.abs() {
        Some(SideEstimate { value: 0.0, error_estimate: last.abs(), noise: 0.0, by_decay: true })
    } else {
        None
    }
}

/// Residual of the backward shift identity
/// `f(ρ(t)) = f(t) − ν(t)^α · ∇^α f(t)`; zero (to rounding) wherever the
/// derivative exists.
pub fn shift_residual(
    ts: &TimeScale,
    f: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let d = nabla(ts, f, t, alpha, cfg)?;
    let w = signed_power(ts.nu(t)?, alpha)?;
    Ok(f.eval(ts.rho(t)?)? - (f.eval(t)? - w * d.value))
}

/// `λ·∇^α f(t) + ω·∇^α g(t)`, the right-hand side of the linearity rule.
pub fn linear_combo(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    lambda: f64,
    omega: f64,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let df = nabla(ts, f, t, alpha, cfg)?.value;
    let dg = nabla(ts, g, t, alpha, cfg)?.value;
    Ok(lambda * df + omega * dg)
}

/// `f(ρ(t))·∇^α g(t) + g(t)·∇^α f(t)`, the two-factor product rule.
pub fn product_nabla(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    let df = nabla(ts, f, t, alpha, cfg)?.value;
    let dg = nabla(ts, g, t, alpha, cfg)?.value;
    Ok(f.eval(ts.rho(t)?)? * dg + g.eval(t)? * df)
}

/// The derivative of any constant function: zero at every point of T^k.
pub fn constant_rule(ts: &TimeScale, t: f64, _alpha: FracOrder) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    if !ts.tk_contains(t)? {
        return Err(Error::NotInTk(t));
    }
    Ok(0.0)
}

/// The derivative of the identity function: `1` for α = 1 and `ν(t)^(1−α)`
/// otherwise (zero at left-dense points since 1 − α > 0).
pub fn identity_rule(ts: &TimeScale, t: f64, alpha: FracOrder) -> Result<f64> {
    let t = ts.canonical(t).ok_or(Error::NotInScale(t))?;
    if !ts.tk_contains(t)? {
        return Err(Error::NotInTk(t));
    }
    if alpha.is_one() {
        Ok(1.0)
    } else {
        Ok(ts.nu(t)?.powf(1.0 - alpha.as_f64()))
    }
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

    #[test]
    fn order_construction_and_classification() {
        assert_eq!(alpha(1, 3).classify(), OrderClass::OddReciprocal);
        assert_eq!(alpha(1, 1).classify(), OrderClass::OddReciprocal);
        assert_eq!(alpha(1, 2).classify(), OrderClass::General);
        assert_eq!(alpha(2, 3).classify(), OrderClass::General);
        assert_eq!(alpha(2, 4), alpha(1, 2));
        assert_eq!(alpha(-1, -3), alpha(1, 3));
        assert!(FracOrder::new(3, 2).is_err());
        assert!(FracOrder::new(0, 5).is_err());
        assert!(FracOrder::new(1, 0).is_err());
        assert!(FracOrder::new(-1, 3).is_err());
        assert_eq!("1/3".parse::<FracOrder>().unwrap(), alpha(1, 3));
        assert_eq!("1".parse::<FracOrder>().unwrap(), FracOrder::one());
        assert!("2/1".parse::<FracOrder>().is_err());
        assert_eq!(alpha(1, 3).to_string(), "1/3");
        assert_eq!(FracOrder::one().to_string(), "1");
    }

    #[test]
    fn signed_power_handles_odd_roots() {
        assert_eq!(signed_power(-8.0, alpha(1, 3)).unwrap(), -2.0);
        assert_eq!(signed_power(9.0, alpha(1, 2)).unwrap(), 3.0);
        assert!(matches!(
            signed_power(-4.0, alpha(1, 2)),
            Err(Error::NonRealPower { base }) if base == -4.0
        ));
        assert_eq!(signed_power(-3.5, FracOrder::one()).unwrap(), -3.5);
    }

    #[test]
    fn integer_scale_square_is_exact() {
        let ts = TimeScale::integers();
        let f = parse_function("t^2").unwrap();
        let r = nabla(&ts, &f, 3.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(r.value, 5.0);
        assert_eq!(r.method, Method::ExactScattered);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn scaled_identity_on_even_grid() {
        let ts = TimeScale::h_integers(2.0).unwrap();
        let f = parse_function("sqrt(2)*t").unwrap();
        for t in [-4.0, 0.0, 6.0] {
            let r = nabla(&ts, &f, t, FracOrder::one(), &cfg()).unwrap();
            let expect = 2.0_f64.sqrt();
            assert!((r.value - expect).abs() <= 1e-15 * expect, "value {}", r.value);
        }
    }

    #[test]
    fn half_order_identity_on_even_grid() {
        let ts = TimeScale::h_integers(2.0).unwrap();
        let f = parse_function("t").unwrap();
        let r = nabla(&ts, &f, 4.0, alpha(1, 2), &cfg()).unwrap();
        assert!((r.value - 2.0_f64.sqrt()).abs() < 1e-14);
        let rule = identity_rule(&ts, 4.0, alpha(1, 2)).unwrap();
        assert!((rule - r.value).abs() <= 1e-15 * rule);
        assert_eq!(identity_rule(&ts, 4.0, FracOrder::one()).unwrap(), 1.0);
    }

    #[test]
    fn cube_root_at_zero_has_two_sided_limit_one() {
        let ts = TimeScale::interval(-1.0, 1.0).unwrap();
        let f = parse_function("cbrt(t)").unwrap();
        let r = nabla(&ts, &f, 0.0, alpha(1, 3), &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "value {}", r.value);
        assert_eq!(r.method, Method::DenseLimitTwoSided);
    }

    #[test]
    fn decreasing_line_has_zero_third_order_derivative() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        let f = parse_function("2 - t").unwrap();
        let r = nabla(&ts, &f, 1.0, alpha(1, 3), &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.method, Method::DenseLimitTwoSided);
    }

    #[test]
    fn fractional_order_at_minimum_uses_right_side() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        let f = parse_function("t^2").unwrap();
        let r = nabla(&ts, &f, 0.0, alpha(1, 3), &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.method, Method::DenseLimitRight);
        assert!(matches!(
            nabla(&ts, &f, 0.0, alpha(1, 2), &cfg()),
            Err(Error::NoApproachPoints { side: Side::Left, .. })
        ));
    }

    #[test]
    fn continuous_scale_order_one_matches_classical_derivative() {
        let ts = TimeScale::interval(0.0, 10.0).unwrap();
        let f = parse_function("t^2").unwrap();
        let r = nabla(&ts, &f, 5.0, FracOrder::one(), &cfg()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-6 * 10.0, "value {}", r.value);
        assert_eq!(r.method, Method::DenseLimitTwoSided);
        let endpoint = nabla(&ts, &f, 10.0, FracOrder::one(), &cfg()).unwrap();
        assert!((endpoint.value - 20.0).abs() < 2e-5, "value {}", endpoint.value);
        assert_eq!(endpoint.method, Method::DenseLimitLeft);
    }

    #[test]
    fn absolute_value_is_not_differentiable_at_zero()  {
        let ts = TimeScale::interval(-1.0, 1.0).unwrap();
        let f = parse_function("abs(t)").unwrap();
        match nabla(&ts, &f, 0.0, FracOrder::one(), &cfg()) {
            Err(Error::NonDifferentiable { t, trace }) => {
                assert_eq!(t, 0.0);
                assert!(!trace.is_empty());
            }
            other => panic!("expected non-differentiable, got {other:?}"),
        }
    }

    #[test]
    fn minimum_outside_tk_is_rejected() {
        let ts = TimeScale::naturals();
        let f = parse_function("t").unwrap();
        assert!(matches!(
            nabla(&ts, &f, 1.0, FracOrder::one(), &cfg()),
            Err(Error::NotInTk(t)) if t == 1.0
        ));
        assert!(matches!(
            nabla(&ts, &f, 1.5, FracOrder::one(), &cfg()),
            Err(Error::NotInScale(_))
        ));
    }

    #[test]
    fn shift_identity_residual_vanishes() {
        let ts = TimeScale::integers();
        let f = parse_function("t^2").unwrap();
        assert_eq!(shift_residual(&ts, &f, 3.0, alpha(1, 2), &cfg()).unwrap(), 0.0);
        let dense = TimeScale::interval(0.0, 2.0).unwrap();
        let g = parse_function("t^2 - 3*t").unwrap();
        assert_eq!(shift_residual(&dense, &g, 1.0, FracOrder::one(), &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn linearity_example_on_integers() {
        let ts = TimeScale::integers();
        let f = parse_function("t^2").unwrap();
        let g = parse_function("t").unwrap();
        let v = linear_combo(&ts, &f, &g, 1.0, 2.0, 3.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(v, 7.0);
        let combo = parse_function("t^2 + 2*t").unwrap();
        assert_eq!(nabla(&ts, &combo, 3.0, FracOrder::one(), &cfg()).unwrap().value, v);
    }

    #[test]
    fn product_rule_example_on_integers() {
        let ts = TimeScale::integers();
        let f = parse_function("t").unwrap();
        let g = parse_function("t^2").unwrap();
        let v = product_nabla(&ts, &f, &g, 2.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(v, 7.0);
        let cube = parse_function("t^3").unwrap();
        assert_eq!(nabla(&ts, &cube, 2.0, FracOrder::one(), &cfg()).unwrap().value, v);
        let c = parse_function("4").unwrap();
        let scaled = product_nabla(&ts, &g, &c, 2.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(scaled, 4.0 * 3.0);
    }

    #[test]
    fn constant_rule_is_zero_everywhere() {
        let ts = TimeScale::h_integers(0.5).unwrap();
        assert_eq!(constant_rule(&ts, 2.0, alpha(1, 2)).unwrap(), 0.0);
        let dense = TimeScale::interval(0.0, 1.0).unwrap();
        assert_eq!(constant_rule(&dense, 0.25, alpha(2, 3)).unwrap(), 0.0);
    }

    #[test]
    fn scattered_points_match_the_closed_form_quotient() {
        let points = [-3.0, -1.5, 0.0, 0.25, 1.0, 4.0, 7.5];
        let ts = TimeScale::finite(points.to_vec()).unwrap();
        let f = parse_function("t^3 - 2*t + 1").unwrap();
        for a in [FracOrder::one(), alpha(1, 2), alpha(1, 3), alpha(2, 3)] {
            for w in points.windows(2) {
                let (prev, t) = (w[0], w[1]);
                let r = nabla(&ts, &f, t, a, &cfg()).unwrap();
                let expect = (f.eval(t).unwrap() - f.eval(prev).unwrap())
                    / (t - prev).powf(a.as_f64());
                assert!((r.value - expect).abs() <= 1e-15 * (1.0 + expect.abs()));
                assert_eq!(r.method, Method::ExactScattered);
            }
        }
    }
}
