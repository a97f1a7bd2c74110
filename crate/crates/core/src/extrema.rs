//! Local left-extrema, extreme values on compact windows, and certified
//! witness pairs for the Rolle, mean value, and generalized mean value
//! statements of the backward fractional calculus.
//!
//! All searches are deterministic: candidates are visited in increasing
//! order and the smallest valid witness is returned. Finite windows are
//! scanned exhaustively; continuous pieces are grid-scanned and refined,
//! and a failed search there is reported as inconclusive rather than as a
//! counterexample, since sampling cannot prove absence.

use crate::error::{Error, Result};
use crate::expr::RealFunction;
use crate::fracdiff::{nabla, FracOrder, NablaConfig};
use crate::timescale::{PointClass, Region, TimeScale};

/// Derivative magnitudes below this are treated as zero when classifying.
pub const SIGN_TOL: f64 = 1e-9;
/// Certification slack for witness inequality chains.
pub const CERT_TOL: f64 = 1e-9;
/// Absolute tolerance for endpoint value equality `f(a) = f(b)`.
const VALUE_TOL: f64 = 1e-12;
/// Width of the sampled backward neighborhood at a left-dense point.
const DENSE_DELTA: f64 = 1e-3;
/// Sample count per neighborhood pass.
const DENSE_SAMPLES: usize = 64;
/// Witness-scan resolution per continuous piece.
const SCAN_POINTS: usize = 1024;
/// Extreme-value grid resolution per continuous piece.
const EXTREME_SCAN: usize = 512;
/// Golden-section iterations; brackets shrink far below f64 resolution.
const GOLDEN_ITERS: usize = 90;
/// Enumeration guard for materialized windows.
const CANDIDATE_CAP: usize = 100_000;

/// Classification of a point against the backward-neighborhood extremum
/// conditions. `Both` is the locally constant case in which the maximum
/// and minimum conditions hold simultaneously.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    LeftMax,
    LeftMin,
    Both,
    Neither,
}

impl ExtremumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremumKind::LeftMax => "left-max",
            ExtremumKind::LeftMin => "left-min",
            ExtremumKind::Both => "left-max-and-left-min",
            ExtremumKind::Neither => "neither",
        }
    }
}

/// Full report of the left-extremum test at one point.
///
/// `kind` follows the derivative-sign characterization: a positive backward
/// derivative marks a left-maximum, a negative one a left-minimum, and a
/// vanishing one is an extremum only when the neighborhood comparison shows
/// the function locally constant. The raw neighborhood comparisons are
/// reported separately as `left_max_condition` / `left_min_condition`
/// (non-strict inequalities, exact at scattered points, sampled at dense
/// ones), so a monotone slide through the point shows `Neither` while its
/// one-sided value condition stays visible.
#[derive(Debug, Clone, Copy)]
pub struct ExtremumReport {
    pub kind: ExtremumKind,
    /// The backward derivative at the point, when it exists.
    pub derivative: Option<f64>,
    /// Whether `f(s) ≤ f(t0)` held at every backward comparison point.
    pub left_max_condition: bool,
    /// Whether `f(s) ≥ f(t0)` held at every backward comparison point.
    pub left_min_condition: bool,
    /// True when the conditions were sampled (dense case) rather than
    /// decided exactly from `f(ρ(t0))`.
    pub sampled: bool,
}

/// Tests the left-extremum conditions at `t0`.
pub fn local_left_extremum(
    ts: &TimeScale,
    f: &RealFunction,
    t0: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<ExtremumReport> {
    let t0 = ts.canonical(t0).ok_or(Error::NotInScale(t0))?;
    if !ts.tk_contains(t0)? {
        return Err(Error::NotInTk(t0));
    }
    match ts.classify_point(t0)? {
        PointClass::LeftScattered => {
            let f_t = f.eval(t0)?;
            let f_rho = f.eval(ts.rho(t0)?)?;
            let derivative = Some(nabla(ts, f, t0, alpha, cfg)?.value);
            let (kind, max_cond, min_cond) = match f_rho.partial_cmp(&f_t) {
                Some(std::cmp::Ordering::Less) => (ExtremumKind::LeftMax, true, false),
                Some(std::cmp::Ordering::Greater) => (ExtremumKind::LeftMin, false, true),
                _ => (ExtremumKind::Both, true, true),
            };
            Ok(ExtremumReport {
                kind,
                derivative,
                left_max_condition: max_cond,
                left_min_condition: min_cond,
                sampled: false,
            })
        }
        PointClass::LeftDense => {
            let (max_cond, min_cond) = sampled_conditions(ts, f, t0)?;
            let derivative = match nabla(ts, f, t0, alpha, cfg) {
                Ok(r) => Some(r.value),
                Err(Error::NonDifferentiable { .. }) | Err(Error::NoApproachPoints { .. }) => {
                    None
                }
                Err(e) => return Err(e),
            };
            let kind = match derivative {
                Some(d) if d > SIGN_TOL => ExtremumKind::LeftMax,
                Some(d) if d < -SIGN_TOL => ExtremumKind::LeftMin,
                Some(_) => {
                    if max_cond && min_cond {
                        ExtremumKind::Both
                    } else {
                        ExtremumKind::Neither
                    }
                }
                None => match (max_cond, min_cond) {
                    (true, true) => ExtremumKind::Both,
                    (true, false) => ExtremumKind::LeftMax,
                    (false, true) => ExtremumKind::LeftMin,
                    (false, false) => ExtremumKind::Neither,
                },
            };
            Ok(ExtremumReport {
                kind,
                derivative,
                left_max_condition: max_cond,
                left_min_condition: min_cond,
                sampled: true,
            })
        }
    }
}

/// Samples two shrinking backward neighborhoods of a left-dense point and
/// reports whether the non-strict maximum / minimum comparisons held at
/// every sampled member. An empty backward neighborhood (a dense scale
/// minimum) leaves both conditions vacuously true.
fn sampled_conditions(ts: &TimeScale, f: &RealFunction, t0: f64) -> Result<(bool, bool)> {
    let f0 = f.eval(t0)?;
    let tol = VALUE_TOL * (1.0 + f0.abs());
    let ratio = (1e-5f64).powf(1.0 / (DENSE_SAMPLES as f64 - 1.0));
    let mut max_cond = true;
    let mut min_cond = true;
    for delta in [DENSE_DELTA, DENSE_DELTA / 16.0] {
        let mut last = f64::NAN;
        let mut offset = delta;
        for _ in 0..DENSE_SAMPLES {
            if let Some(s) = ts.floor_point(t0 - offset) {
                if s > t0 - delta && s < t0 && s != last {
                    last = s;
                    let fs = f.eval(s)?;
                    max_cond &= fs <= f0 + tol;
                    min_cond &= fs >= f0 - tol;
                }
            }
            offset *= ratio;
        }
    }
    Ok((max_cond, min_cond))
}

/// Points of `[a, b] ∩ T` attaining the global minimum and maximum, as
/// `(argmin, argmax)`. Finite windows are scanned exhaustively; continuous
/// pieces are grid-scanned and refined by golden-section search. Ties keep
/// the smallest point, so a constant function yields `(a, a)`.
pub fn extreme_values(
    ts: &TimeScale,
    f: &RealFunction,
    a: f64,
    b: f64,
) -> Result<(f64, f64)> {
    let a = ts.canonical(a).ok_or(Error::NotInScale(a))?;
    let b = ts.canonical(b).ok_or(Error::NotInScale(b))?;
    if a >= b {
        return Err(Error::Hypothesis(format!("needs a < b, got a = {a}, b = {b}")));
    }
    let regions = ts.regions_within(a, b, true, true, CANDIDATE_CAP)?;
    let mut min: Option<(f64, f64)> = None;
    let mut max: Option<(f64, f64)> = None;
    let consider = |t: f64, v: f64, min: &mut Option<(f64, f64)>, max: &mut Option<(f64, f64)>| {
        if min.map_or(true, |(_, best)| v < best) {
            *min = Some((t, v));
        }
        if max.map_or(true, |(_, best)| v > best) {
            *max = Some((t, v));
        }
    };
    for region in &regions {
        match *region {
            Region::Point(t) => {
                let v = f.eval(t)?;
                consider(t, v, &mut min, &mut max);
            }
            Region::Segment { lo, hi, .. } => {
                let mut grid_min: Option<(usize, f64)> = None;
                let mut grid_max: Option<(usize, f64)> = None;
                let h = (hi - lo) / EXTREME_SCAN as f64;
                for i in 0..=EXTREME_SCAN {
                    let t = if i == EXTREME_SCAN { hi } else { lo + h * i as f64 };
                    let v = f.eval(t)?;
                    if grid_min.map_or(true, |(_, best)| v < best) {
                        grid_min = Some((i, v));
                    }
                    if grid_max.map_or(true, |(_, best)| v > best) {
                        grid_max = Some((i, v));
                    }
                }
                let bracket = |i: usize| {
                    let lo_i = lo + h * i.saturating_sub(1) as f64;
                    let hi_i = (lo + h * (i + 1) as f64).min(hi);
                    (lo_i, hi_i)
                };
                let (i_min, _) = grid_min.expect("nonempty grid");
                let (lo_m, hi_m) = bracket(i_min);
                let (t_min, v_min) = golden_search(&mut |x| f.eval(x), lo_m, hi_m, false)?;
                consider(t_min, v_min, &mut min, &mut max);
                let (i_max, _) = grid_max.expect("nonempty grid");
                let (lo_m, hi_m) = bracket(i_max);
                let (t_max, v_max) = golden_search(&mut |x| f.eval(x), lo_m, hi_m, true)?;
                consider(t_max, v_max, &mut min, &mut max);
            }
        }
    }
    match (min, max) {
        (Some((t1, _)), Some((t2, _))) => Ok((t1, t2)),
        _ => Err(Error::Hypothesis(format!("window [{a}, {b}] has no members"))),
    }
}

/// Golden-section search for the minimum (or maximum when `maximize`) of a
/// function on `[lo, hi]`. The endpoints themselves also compete, so
/// monotone sections return an endpoint.
fn golden_search(
    value: &mut dyn FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    maximize: bool,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let sign = if maximize { -1.0 } else { 1.0 };
    let (orig_lo, orig_hi) = (lo, hi);
    let f_lo = sign * value(lo)?;
    let f_hi = sign * value(hi)?;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = sign * value(c)?;
    let mut fd = sign * value(d)?;
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = sign * value(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = sign * value(d)?;
        }
    }
    let mut best = (orig_lo, f_lo);
    for cand in [(orig_hi, f_hi), (c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok((best.0, sign * best.1))
}

/// A certified inequality chain `lhs ≤ mid ≤ rhs` produced at two interior
/// witness points.
#[derive(Debug, Clone, Copy)]
pub struct WitnessPair {
    pub t1: f64,
    pub t2: f64,
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub alpha: FracOrder,
}

impl WitnessPair {
    /// Whether the chain holds within `tol·(1 + |mid|)`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        let slack = tol * (1.0 + self.mid.abs());
        self.lhs <= self.mid + slack && self.mid <= self.rhs + slack
    }
}

struct Window {
    a: f64,
    b: f64,
    /// Interior regions of `(a, b) ∩ T`, in increasing order.
    regions: Vec<Region>,
}

fn open_window(ts: &TimeScale, a: f64, b: f64) -> Result<Window> {
    let a = ts.canonical(a).ok_or(Error::NotInScale(a))?;
    let b = ts.canonical(b).ok_or(Error::NotInScale(b))?;
    if a >= b {
        return Err(Error::Hypothesis(format!("needs a < b, got a = {a}, b = {b}")));
    }
    let regions = ts.regions_within(a, b, false, false, CANDIDATE_CAP)?;
    if regions.is_empty() {
        return Err(Error::Hypothesis(format!("the open interval ({a}, {b}) has no members")));
    }
    Ok(Window { a, b, regions })
}

/// Result of a directed witness scan.
struct Hit {
    t: f64,
    value: f64,
}

/// Finds the smallest interior point whose value passes the one-sided test
/// against `target`: `value ≤ target` when `want_le`, `value ≥ target`
/// otherwise, with `CERT_TOL` slack. Exhaustive over point regions;
/// grid-scanned with golden refinement over segments.
fn directed_search(
    regions: &[Region],
    value: &mut dyn FnMut(f64) -> Result<f64>,
    target: f64,
    want_le: bool,
) -> Result<Hit> {
    let slack = CERT_TOL * (1.0 + target.abs());
    let passes = |v: f64| if want_le { v <= target + slack } else { v >= target - slack };
    let mut best: Option<(f64, f64)> = None;
    let mut saw_segment = false;
    let track = |t: f64, v: f64, best: &mut Option<(f64, f64)>| {
        let excess = if want_le { v - target } else { target - v };
        if best.map_or(true, |(_, e)| excess < e) {
            *best = Some((t, excess));
        }
    };
    for region in regions {
        match *region {
            Region::Point(t) => {
                let v = value(t)?;
                if passes(v) {
                    return Ok(Hit { t, value: v });
                }
                track(t, v, &mut best);
            }
            Region::Segment { lo, hi, lo_closed, hi_closed } => {
                saw_segment = true;
                let h = (hi - lo) / SCAN_POINTS as f64;
                let mut dip: Option<(usize, f64)> = None;
                for i in 0..=SCAN_POINTS {
                    if (i == 0 && !lo_closed) || (i == SCAN_POINTS && !hi_closed) {
                        continue;
                    }
                    let t = if i == SCAN_POINTS { hi } else { lo + h * i as f64 };
                    let v = value(t)?;
                    if passes(v) {
                        return Ok(Hit { t, value: v });
                    }
                    track(t, v, &mut best);
                    let signed = if want_le { v } else { -v };
                    if dip.map_or(true, |(_, d)| signed < d) {
                        dip = Some((i, signed));
                    }
                }
                // The grid may straddle a narrow dip; refine around the
                // best grid point before giving up on this segment.
                if let Some((i, _)) = dip {
                    let r_lo = (lo + h * i.saturating_sub(1) as f64).max(lo);
                    let r_hi = (lo + h * (i + 1) as f64).min(hi);
                    let (t, v) = golden_search(value, r_lo, r_hi, !want_le)?;
                    if passes(v) {
                        return Ok(Hit { t, value: v });
                    }
                    track(t, v, &mut best);
                }
            }
        }
    }
    let (candidate, residual) = best.expect("nonempty interior");
    if saw_segment {
        Err(Error::Inconclusive { candidate, residual })
    } else {
        Err(Error::Hypothesis(format!(
            "no interior witness: the {} condition fails at every point of the open interval",
            if want_le { "lower" } else { "upper" },
        )))
    }
}

/// Rolle witnesses: interior points with derivative of each sign around 0.
///
/// Requires `f(a) = f(b)` (absolute tolerance 1e−12) and a nonempty open
/// interval. Returns the smallest `t1` with `∇^α f(t1) ≤ 0` and smallest
/// `t2` with `∇^α f(t2) ≥ 0` (`lhs`/`rhs` are those derivatives, `mid` 0).
pub fn rolle_witnesses(
    ts: &TimeScale,
    f: &RealFunction,
    a: f64,
    b: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<WitnessPair> {
    let w = open_window(ts, a, b)?;
    let fa = f.eval(w.a)?;
    let fb = f.eval(w.b)?;
    if (fa - fb).abs() > VALUE_TOL {
        return Err(Error::Hypothesis(format!(
            "endpoint values differ: f({}) = {fa} but f({}) = {fb}",
            w.a, w.b
        )));
    }
    let mut value = |t: f64| nabla(ts, f, t, alpha, cfg).map(|r| r.value);
    let low = directed_search(&w.regions, &mut value, 0.0, true)?;
    let high = directed_search(&w.regions, &mut value, 0.0, false)?;
    Ok(WitnessPair {
        t1: low.t,
        t2: high.t,
        lhs: low.value,
        mid: 0.0,
        rhs: high.value,
        alpha,
    })
}

/// Mean value witnesses: derivative values sandwiching the mean slope
/// `(f(b) − f(a)) / (b − a)`.
///
/// For α = 1 the certified quantity is `∇^(1) f`. For α < 1 it is
/// `∇^α f(t) / ν(t)^(1−α)`, which requires left-scattered points, so the
/// search is restricted to the scattered members of the interior and fails
/// if there are none.
pub fn mvt_witnesses(
    ts: &TimeScale,
    f: &RealFunction,
    a: f64,
    b: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<WitnessPair> {
    let mut w = open_window(ts, a, b)?;
    if !alpha.is_one() {
        w.regions = scattered_only(ts, &w.regions)?;
    }
    let mid = (f.eval(w.b)? - f.eval(w.a)?) / (w.b - w.a);
    let mut value = |t: f64| -> Result<f64> {
        let d = nabla(ts, f, t, alpha, cfg)?.value;
        if alpha.is_one() {
            Ok(d)
        } else {
            Ok(d / ts.nu(t)?.powf(1.0 - alpha.as_f64()))
        }
    };
    let low = directed_search(&w.regions, &mut value, mid, true)?;
    let high = directed_search(&w.regions, &mut value, mid, false)?;
    Ok(WitnessPair { t1: low.t, t2: high.t, lhs: low.value, mid, rhs: high.value, alpha })
}

/// Keeps only left-scattered members of the interior: every point region
/// that is left-scattered, plus a segment's closed left end when that end
/// has a gap before it. Fails naming a left-dense point when nothing
/// scattered remains.
fn scattered_only(ts: &TimeScale, regions: &[Region]) -> Result<Vec<Region>> {
    let mut kept = Vec::new();
    let mut first_dense: Option<f64> = None;
    for region in regions {
        match *region {
            Region::Point(t) => {
                if ts.classify_point(t)? == PointClass::LeftScattered {
                    kept.push(Region::Point(t));
                } else if first_dense.is_none() {
                    first_dense = Some(t);
                }
            }
            Region::Segment { lo, lo_closed, hi, .. } => {
                if lo_closed && ts.classify_point(lo)? == PointClass::LeftScattered {
                    kept.push(Region::Point(lo));
                    if first_dense.is_none() {
                        // The segment body past lo is left-dense.
                        first_dense = Some(hi);
                    }
                } else if first_dense.is_none() {
                    first_dense = Some(lo);
                }
            }
        }
    }
    if kept.is_empty() {
        let t = first_dense.expect("empty interior regions are rejected earlier");
        return Err(Error::LeftDenseRequiresScattered { t });
    }
    Ok(kept)
}

/// Generalized mean value witnesses: ratios `∇^α f / ∇^α g` sandwiching
/// `(f(b) − f(a)) / (g(b) − g(a))`. Every searched point must satisfy
/// `∇^α g > 0`, and `g(a) ≠ g(b)` is required.
pub fn gmvt_witnesses(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    a: f64,
    b: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<WitnessPair> {
    let w = open_window(ts, a, b)?;
    let mid = gmvt_mid(f, g, w.a, w.b)?;
    let mut value = |t: f64| gmvt_ratio(ts, f, g, t, alpha, cfg);
    let low = directed_search(&w.regions, &mut value, mid, true)?;
    let high = directed_search(&w.regions, &mut value, mid, false)?;
    Ok(WitnessPair { t1: low.t, t2: high.t, lhs: low.value, mid, rhs: high.value, alpha })
}

/// All valid witness points of the generalized mean value chain on a
/// finite interior: the set of `t` with ratio ≤ mid and the set with
/// ratio ≥ mid. Windows containing a continuous piece cannot be
/// enumerated and are rejected.
pub fn gmvt_witness_sets(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    a: f64,
    b: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = open_window(ts, a, b)?;
    let points = ts
        .enumerate_within(w.a, w.b, false, false, CANDIDATE_CAP)?
        .ok_or_else(|| Error::Hypothesis(
            "witness sets need a finite interior, but the window contains a continuous piece"
                .into(),
        ))?;
    let mid = gmvt_mid(f, g, w.a, w.b)?;
    let slack = CERT_TOL * (1.0 + mid.abs());
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for t in points {
        let v = gmvt_ratio(ts, f, g, t, alpha, cfg)?;
        if v <= mid + slack {
            lows.push(t);
        }
        if v >= mid - slack {
            highs.push(t);
        }
    }
    Ok((lows, highs))
}

fn gmvt_mid(f: &RealFunction, g: &RealFunction, a: f64, b: f64) -> Result<f64> {
    let ga = g.eval(a)?;
    let gb = g.eval(b)?;
    if (ga - gb).abs() <= VALUE_TOL {
        return Err(Error::Hypothesis(format!(
            "g takes the same value at both endpoints: g({a}) = {ga}, g({b}) = {gb}"
        )));
    }
    Ok((f.eval(b)? - f.eval(a)?) / (gb - ga))
}

fn gmvt_ratio(
    ts: &TimeScale,
    f: &RealFunction,
    g: &RealFunction,
    t: f64,
    alpha: FracOrder,
    cfg: &NablaConfig,
) -> Result<f64> {
    let dg = nabla(ts, g, t, alpha, cfg)?.value;
    if !(dg > 0.0) {
        return Err(Error::Hypothesis(format!(
            "the denominator derivative must be positive on the interior, but it is {dg} at t = {t}"
        )));
    }
    let df = nabla(ts, f, t, alpha, cfg)?.value;
    Ok(df / dg)
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
    fn monotone_slide_is_neither_despite_zero_derivative() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        let report = local_left_extremum(&ts, &f("2 - t"), 1.0, alpha(1, 3), &cfg()).unwrap();
        assert_eq!(report.kind, ExtremumKind::Neither);
        assert_eq!(report.derivative, Some(0.0));
        assert!(report.left_min_condition);
        assert!(!report.left_max_condition);
        assert!(report.sampled);
    }

    #[test]
    fn scattered_peak_is_a_left_max() {
        let ts = TimeScale::naturals();
        let report =
            local_left_extremum(&ts, &f("-(t-5)^2"), 5.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(report.kind, ExtremumKind::LeftMax);
        assert_eq!(report.derivative, Some(1.0));
        assert!(report.left_max_condition && !report.left_min_condition);
        assert!(!report.sampled);
    }

    #[test]
    fn constant_function_meets_both_conditions() {
        let ts = TimeScale::integers();
        let report = local_left_extremum(&ts, &f("3"), 2.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(report.kind, ExtremumKind::Both);
        let dense = TimeScale::interval(0.0, 1.0).unwrap();
        let report = local_left_extremum(&dense, &f("3"), 0.5, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(report.kind, ExtremumKind::Both);
        assert!(report.left_max_condition && report.left_min_condition);
    }

    #[test]
    fn dense_interior_maximum_reports_sign() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let g = f("t*(1-t)");
        let rising = local_left_extremum(&ts, &g, 0.25, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(rising.kind, ExtremumKind::LeftMax);
        let falling = local_left_extremum(&ts, &g, 0.75, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(falling.kind, ExtremumKind::LeftMin);
    }

    #[test]
    fn extreme_values_on_natural_windows() {
        let ts = TimeScale::naturals();
        assert_eq!(extreme_values(&ts, &f("2*t+3"), 1.0, 10.0).unwrap(), (1.0, 10.0));
        assert_eq!(extreme_values(&ts, &f("(t-5)^2"), 1.0, 10.0).unwrap(), (5.0, 10.0));
        assert_eq!(extreme_values(&ts, &f("7"), 1.0, 10.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn extreme_values_on_a_continuous_window() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let (t_min, t_max) = extreme_values(&ts, &f("t*(1-t)"), 0.0, 1.0).unwrap();
        assert_eq!(t_min, 0.0);
        assert!((t_max - 0.5).abs() < 1e-6, "t_max {t_max}");
    }

    #[test]
    fn rolle_on_naturals_returns_smallest_witnesses() {
        let ts = TimeScale::naturals();
        let p = rolle_witnesses(&ts, &f("(t-5)^2"), 1.0, 9.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!((p.t1, p.t2), (2.0, 6.0));
        assert_eq!(p.lhs, -7.0);
        assert_eq!(p.rhs, 1.0);
        assert!(p.chain_holds(CERT_TOL));
    }

    #[test]
    fn rolle_with_constant_function_uses_first_interior_point() {
        let ts = TimeScale::naturals();
        let p = rolle_witnesses(&ts, &f("4"), 1.0, 5.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!((p.t1, p.t2), (2.0, 2.0));
        assert_eq!((p.lhs, p.rhs), (0.0, 0.0));
    }

    #[test]
    fn rolle_on_a_continuous_interval() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        let p = rolle_witnesses(&ts, &f("t*(1-t)"), 0.0, 1.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(p.t1, 0.5);
        assert!(p.t2 > 0.0 && p.t2 < 0.5);
        assert!(p.chain_holds(CERT_TOL));
    }

    #[test]
    fn rolle_hypothesis_violations_are_reported() {
        let ts = TimeScale::naturals();
        assert!(matches!(
            rolle_witnesses(&ts, &f("t"), 1.0, 9.0, FracOrder::one(), &cfg()),
            Err(Error::Hypothesis(_))
        ));
        let z = TimeScale::integers();
        assert!(matches!(
            rolle_witnesses(&z, &f("(t-1)^2"), 0.0, 1.0, FracOrder::one(), &cfg()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn rolle_can_fail_when_extrema_sit_on_the_endpoints() {
        // Three points with the peak at the only interior point: the
        // backward derivative there is positive, so no interior point has
        // a nonpositive derivative and the lower search must fail.
        let ts = TimeScale::finite(vec![0.0, 1.0, 2.0]).unwrap();
        let result = rolle_witnesses(&ts, &f("t*(2-t)"), 0.0, 2.0, FracOrder::one(), &cfg());
        assert!(matches!(result, Err(Error::Hypothesis(_))), "got {result:?}");
    }

    #[test]
    fn mvt_on_naturals_matches_counted_slopes() {
        let ts = TimeScale::naturals();
        let p = mvt_witnesses(&ts, &f("t^2"), 1.0, 10.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!(p.mid, 11.0);
        assert_eq!((p.t1, p.t2), (2.0, 6.0));
        assert!(p.chain_holds(CERT_TOL));
        let half = mvt_witnesses(&ts, &f("t^2"), 1.0, 10.0, alpha(1, 2), &cfg()).unwrap();
        assert_eq!((half.t1, half.t2), (2.0, 6.0));
        assert!((half.lhs - p.lhs).abs() < 1e-12);
        assert!(half.chain_holds(CERT_TOL));
    }

    #[test]
    fn mvt_with_linear_function_accepts_the_first_point() {
        let ts = TimeScale::naturals();
        let p = mvt_witnesses(&ts, &f("3*t - 1"), 1.0, 8.0, FracOrder::one(), &cfg()).unwrap();
        assert_eq!((p.t1, p.t2), (2.0, 2.0));
        assert_eq!(p.mid, 3.0);
    }

    #[test]
    fn fractional_mvt_requires_scattered_points() {
        let ts = TimeScale::interval(0.0, 2.0).unwrap();
        assert!(matches!(
            mvt_witnesses(&ts, &f("t^2"), 0.0, 2.0, alpha(1, 2), &cfg()),
            Err(Error::LeftDenseRequiresScattered { .. })
        ));
    }

    #[test]
    fn gmvt_reproduces_the_counted_example() {
        let ts = TimeScale::naturals();
        let p = gmvt_witnesses(&ts, &f("2*t+3"), &f("t^2"), 1.0, 10.0, FracOrder::one(), &cfg())
            .unwrap();
        assert_eq!(p.mid, 18.0 / 99.0);
        assert_eq!((p.t1, p.t2), (6.0, 2.0));
        assert!(p.chain_holds(CERT_TOL));
        let (lows, highs) = gmvt_witness_sets(
            &ts,
            &f("2*t+3"),
            &f("t^2"),
            1.0,
            10.0,
            FracOrder::one(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(lows, vec![6.0, 7.0, 8.0, 9.0]);
        assert_eq!(highs, vec![2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn gmvt_with_equal_functions_is_the_trivial_chain() {
        let ts = TimeScale::naturals();
        let p = gmvt_witnesses(&ts, &f("t^2"), &f("t^2"), 1.0, 10.0, FracOrder::one(), &cfg())
            .unwrap();
        assert_eq!((p.lhs, p.mid, p.rhs), (1.0, 1.0, 1.0));
        assert_eq!((p.t1, p.t2), (2.0, 2.0));
    }

    #[test]
    fn gmvt_checks_its_preconditions() {
        let ts = TimeScale::naturals();
        assert!(matches!(
            gmvt_witnesses(&ts, &f("t"), &f("-t"), 1.0, 10.0, FracOrder::one(), &cfg()),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            gmvt_witnesses(&ts, &f("t"), &f("(t-5.5)^2"), 1.0, 10.0, FracOrder::one(), &cfg()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn mvt_slope_example_on_a_mixed_scale() {
        let ts = TimeScale::union(vec![
            crate::timescale::Piece::Point(0.0),
            crate::timescale::Piece::Point(1.0),
            crate::timescale::Piece::Interval(2.0, 3.0),
        ])
        .unwrap();
        // With α = 1/2 only the scattered members 1 and 2 qualify.
        let p = mvt_witnesses(&ts, &f("t^2"), 0.0, 3.0, alpha(1, 2), &cfg()).unwrap();
        assert!(p.t1 == 1.0 || p.t1 == 2.0);
        assert!(p.chain_holds(CERT_TOL));
    }
}
