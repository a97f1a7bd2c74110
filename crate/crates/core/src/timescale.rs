//! Time scales: nonempty closed subsets of the real line.
//!
//! A [`TimeScale`] is stored in one of four representations. Finite sets and
//! unions of points and closed intervals are kept in a sorted normal form
//! (disjoint pieces with positive gaps, adjacent pieces merged); unbounded
//! arithmetic grids are kept lazily and never materialized, with the backward
//! and forward jumps computed arithmetically.
//!
//! Jump operators follow the backward calculus conventions: `rho(t)` is the
//! supremum of members strictly below `t`, and at the scale minimum it
//! returns the minimum itself, so the graininess `nu` vanishes there. The
//! differentiability region `T^k` is the scale minus a right-scattered
//! minimum, tested by [`TimeScale::tk_contains`].
//!
//! Membership on intervals and grids absorbs parsing round-off with an
//! absolute tolerance of [`MEMBERSHIP_TOL`]; finite-set membership is exact
//! on stored values.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for membership on intervals and grids.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Bounded grid slices at or below this many points materialize into a
/// finite set when restricted.
const MATERIALIZE_CAP: usize = 100_000;

/// Largest grid index magnitude we resolve before points stop being
/// distinguishable in f64.
const MAX_GRID_INDEX: f64 = 4.0e15;

/// One component of a piecewise scale: an isolated point or a closed
/// interval with positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Point(f64),
    Interval(f64, f64),
}

impl Piece {
    /// Smallest member of the piece.
    pub fn lo(&self) -> f64 {
        match *self {
            Piece::Point(v) => v,
            Piece::Interval(a, _) => a,
        }
    }

    /// Largest member of the piece.
    pub fn hi(&self) -> f64 {
        match *self {
            Piece::Point(v) => v,
            Piece::Interval(_, b) => b,
        }
    }
}

/// Classification of a member by its backward jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// `rho(t) = t`: members accumulate from the left, or `t` is the minimum.
    LeftDense,
    /// `rho(t) < t`: there is a gap below `t`.
    LeftScattered,
}

impl PointClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointClass::LeftDense => "left-dense",
            PointClass::LeftScattered => "left-scattered",
        }
    }
}

/// A region of a scale window: either an isolated member or a continuous run.
///
/// Produced by [`TimeScale::regions_within`] for search routines. Segment
/// endpoints carry closedness flags: an open endpoint is adjacent to the
/// window boundary and is not itself part of the region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Point(f64),
    Segment { lo: f64, hi: f64, lo_closed: bool, hi_closed: bool },
}

/// A nonempty closed subset of the real line.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeScale {
    /// Strictly increasing list of members.
    FiniteSet(Vec<f64>),
    /// `{ anchor + k * step : k integer }` clipped to the optional bounds.
    /// Bounds, when present, lie on the grid.
    UniformGrid {
        anchor: f64,
        step: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    },
    /// The closed interval `[a, b]` with `a < b`.
    ContinuousInterval { a: f64, b: f64 },
    /// Sorted disjoint pieces with positive gaps; at least two pieces, not
    /// all of them points.
    PieceUnion(Vec<Piece>),
}

impl TimeScale {
    // ------------------------------------------------------------------
    // Constructors. All of them normalize into the piecewise normal form
    // or the lazy grid representation.
    // ------------------------------------------------------------------

    /// The integer lattice.
    pub fn integers() -> Self {
        TimeScale::UniformGrid { anchor: 0.0, step: 1.0, lower: None, upper: None }
    }

    /// The positive integers `{1, 2, 3, ...}`.
    pub fn naturals() -> Self {
        TimeScale::UniformGrid { anchor: 1.0, step: 1.0, lower: Some(1.0), upper: None }
    }

    /// The lattice `h * Z` for a positive step `h`.
    pub fn h_integers(h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidScale(format!("grid step must be positive, got {h}")));
        }
        Ok(TimeScale::UniformGrid { anchor: 0.0, step: h, lower: None, upper: None })
    }

    /// The closed interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidScale(format!("interval needs a < b, got [{a}, {b}]")));
        }
        Ok(TimeScale::ContinuousInterval { a, b })
    }

    /// A finite set of points; duplicates collapse, order is irrelevant.
    pub fn finite(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidScale("finite set members must be finite".into()));
        }
        values.sort_by(|x, y| x.partial_cmp(y).expect("finite values are ordered"));
        values.dedup();
        if values.is_empty() {
            return Err(Error::InvalidScale("a time scale must be nonempty".into()));
        }
        Ok(TimeScale::FiniteSet(values))
    }

    /// Builds the normal form of a union of pieces: sorts them, merges
    /// overlapping or touching neighbors, and collapses degenerate shapes
    /// into the simpler representations.
    pub fn union(pieces: Vec<Piece>) -> Result<Self> {
        let mut spans: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for p in &pieces {
            let (lo, hi) = (p.lo(), p.hi());
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidScale(format!("bad piece [{lo}, {hi}]")));
            }
            spans.push((lo, hi));
        }
        if spans.is_empty() {
            return Err(Error::InvalidScale("a time scale must be nonempty".into()));
        }
        spans.sort_by(|x, y| x.partial_cmp(y).expect("finite spans are ordered"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
        for (lo, hi) in spans {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() == 1 {
            let (lo, hi) = merged[0];
            return if lo == hi { Self::finite(vec![lo]) } else { Self::interval(lo, hi) };
        }
        if merged.iter().all(|&(lo, hi)| lo == hi) {
            return Self::finite(merged.into_iter().map(|(lo, _)| lo).collect());
        }
        let pieces = merged
            .into_iter()
            .map(|(lo, hi)| if lo == hi { Piece::Point(lo) } else { Piece::Interval(lo, hi) })
            .collect();
        Ok(TimeScale::PieceUnion(pieces))
    }

    // ------------------------------------------------------------------
    // Text grammar.
    // ------------------------------------------------------------------

    /// Parses the scale grammar: `Z`, `N`, `hZ:<step>`, `interval:<a>:<b>`,
    /// `finite:<v1>,<v2>,...`, or `union:(<piece>;...)` where a piece is
    /// `point:<v>` or `interval:<a>:<b>`. Case-sensitive.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "Z" => return Ok(Self::integers()),
            "N" => return Ok(Self::naturals()),
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("hZ:") {
            let h = parse_number(rest, 4)?;
            return Self::h_integers(h);
        }
        if let Some(rest) = text.strip_prefix("interval:") {
            let (a, b) = parse_interval_body(rest, 10)?;
            return Self::interval(a, b);
        }
        if let Some(rest) = text.strip_prefix("finite:") {
            let mut values = Vec::new();
            let mut col = 8;
            for part in rest.split(',') {
                values.push(parse_number(part, col)?);
                col += part.len() + 1;
            }
            return Self::finite(values);
        }
        if let Some(rest) = text.strip_prefix("union:") {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse {
                    position: 7,
                    message: "union pieces must be wrapped in parentheses".into(),
                })?;
            let mut pieces = Vec::new();
            let mut col = 8;
            for part in inner.split(';') {
                if let Some(body) = part.strip_prefix("point:") {
                    pieces.push(Piece::Point(parse_number(body, col + 6)?));
                } else if let Some(body) = part.strip_prefix("interval:") {
                    let (a, b) = parse_interval_body(body, col + 9)?;
                    pieces.push(Piece::Interval(a, b));
                } else {
                    return Err(Error::Parse {
                        position: col,
                        message: format!("expected point: or interval:, got {part:?}"),
                    });
                }
                col += part.len() + 1;
            }
            return Self::union(pieces);
        }
        Err(Error::Parse {
            position: 1,
            message: format!("unknown time scale {text:?}"),
        })
    }

    // ------------------------------------------------------------------
    // Membership.
    // ------------------------------------------------------------------

    /// Snaps `t` to the member it denotes: the stored value for finite sets,
    /// the nearest lattice point within tolerance for grids, `t` itself
    /// clamped into the piece for intervals. `None` when `t` is not a member.
    pub fn canonical(&self, t: f64) -> Option<f64> {
        if !t.is_finite() {
            return None;
        }
        match self {
            TimeScale::FiniteSet(vs) => {
                let i = vs.partition_point(|v| *v < t);
                (i < vs.len() && vs[i] == t).then_some(t)
            }
            TimeScale::UniformGrid { anchor, step, lower, upper } => {
                let idx = (t - anchor) / step;
                if idx.abs() > MAX_GRID_INDEX {
                    return None;
                }
                let k = idx.round();
                let g = anchor + k * step;
                if (t - g).abs() > MEMBERSHIP_TOL {
                    return None;
                }
                if let Some(lo) = lower {
                    if g < *lo - MEMBERSHIP_TOL {
                        return None;
                    }
                }
                if let Some(hi) = upper {
                    if g > *hi + MEMBERSHIP_TOL {
                        return None;
                    }
                }
                Some(g)
            }
            TimeScale::ContinuousInterval { a, b } => {
                (*a - MEMBERSHIP_TOL <= t && t <= *b + MEMBERSHIP_TOL).then(|| t.clamp(*a, *b))
            }
            TimeScale::PieceUnion(pieces) => {
                let i = pieces.partition_point(|p| p.hi() < t - MEMBERSHIP_TOL);
                let p = pieces.get(i)?;
                (p.lo() - MEMBERSHIP_TOL <= t && t <= p.hi() + MEMBERSHIP_TOL)
                    .then(|| t.clamp(p.lo(), p.hi()))
            }
        }
    }

    /// Membership test with the documented tolerances.
    pub fn contains(&self, t: f64) -> bool {
        self.canonical(t).is_some()
    }

    fn member(&self, t: f64) -> Result<f64> {
        self.canonical(t).ok_or(Error::NotInScale(t))
    }

    // ------------------------------------------------------------------
    // Jump operators.
    // ------------------------------------------------------------------

    /// Backward jump: the supremum of members strictly below `t`, or `t`
    /// itself at the scale minimum and at left-dense points.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let t = self.member(t)?;
        Ok(match self {
            TimeScale::FiniteSet(vs) => {
                let i = vs.partition_point(|v| *v < t);
                if i == 0 { t } else { vs[i - 1] }
            }
            TimeScale::UniformGrid { anchor, step, lower, .. } => {
                if lower.is_some_and(|lo| t <= lo) {
                    t
                } else {
                    let k = ((t - anchor) / step).round();
                    anchor + (k - 1.0) * step
                }
            }
            TimeScale::ContinuousInterval { .. } => t,
            TimeScale::PieceUnion(pieces) => {
                let i = pieces.partition_point(|p| p.hi() < t);
                match pieces[i] {
                    Piece::Interval(lo, _) if t > lo => t,
                    _ if i == 0 => t,
                    _ => pieces[i - 1].hi(),
                }
            }
        })
    }

    /// Forward jump: the infimum of members strictly above `t`, or `t`
    /// itself at the scale maximum and at right-dense points.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let t = self.member(t)?;
        Ok(match self {
            TimeScale::FiniteSet(vs) => {
                let i = vs.partition_point(|v| *v <= t);
                if i == vs.len() { t } else { vs[i] }
            }
            TimeScale::UniformGrid { anchor, step, upper, .. } => {
                if upper.is_some_and(|hi| t >= hi) {
                    t
                } else {
                    let k = ((t - anchor) / step).round();
                    anchor + (k + 1.0) * step
                }
            }
            TimeScale::ContinuousInterval { .. } => t,
            TimeScale::PieceUnion(pieces) => {
                let i = pieces.partition_point(|p| p.hi() < t);
                match pieces[i] {
                    Piece::Interval(_, hi) if t < hi => t,
                    _ if i + 1 == pieces.len() => t,
                    _ => pieces[i + 1].lo(),
                }
            }
        })
    }

    /// Backward graininess `t - rho(t)`; zero exactly at left-dense points.
    pub fn nu(&self, t: f64) -> Result<f64> {
        let t = self.member(t)?;
        Ok(t - self.rho(t)?)
    }

    /// Classifies a member by its backward jump.
    pub fn classify_point(&self, t: f64) -> Result<PointClass> {
        let t = self.member(t)?;
        Ok(if self.rho(t)? < t { PointClass::LeftScattered } else { PointClass::LeftDense })
    }

    /// Whether `t` lies in the differentiability region `T^k`: the scale with
    /// a right-scattered minimum removed.
    pub fn tk_contains(&self, t: f64) -> Result<bool> {
        let t = self.member(t)?;
        if let Some(m) = self.min() {
            if t == m && self.sigma(m)? > m {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Applies `rho` repeatedly, `n` times, short-circuiting at a fixed point.
    pub fn iterate_rho(&self, t: f64, n: u64) -> Result<f64> {
        let mut cur = self.member(t)?;
        for _ in 0..n {
            let prev = self.rho(cur)?;
            if prev == cur {
                break;
            }
            cur = prev;
        }
        Ok(cur)
    }

    // ------------------------------------------------------------------
    // Bounds and order queries.
    // ------------------------------------------------------------------

    /// Smallest member, if the scale is bounded below.
    pub fn min(&self) -> Option<f64> {
        match self {
            TimeScale::FiniteSet(vs) => Some(vs[0]),
            TimeScale::UniformGrid { lower, .. } => *lower,
            TimeScale::ContinuousInterval { a, .. } => Some(*a),
            TimeScale::PieceUnion(pieces) => Some(pieces[0].lo()),
        }
    }

    /// Largest member, if the scale is bounded above.
    pub fn max(&self) -> Option<f64> {
        match self {
            TimeScale::FiniteSet(vs) => Some(*vs.last().expect("nonempty")),
            TimeScale::UniformGrid { upper, .. } => *upper,
            TimeScale::ContinuousInterval { b, .. } => Some(*b),
            TimeScale::PieceUnion(pieces) => Some(pieces.last().expect("nonempty").hi()),
        }
    }

    /// Largest member `<= x` (within tolerance), if any.
    pub fn floor_point(&self, x: f64) -> Option<f64> {
        if !x.is_finite() {
            return None;
        }
        match self {
            TimeScale::FiniteSet(vs) => {
                let i = vs.partition_point(|v| *v <= x);
                (i > 0).then(|| vs[i - 1])
            }
            TimeScale::UniformGrid { anchor, step, lower, upper } => {
                let idx = (x - anchor) / step;
                if idx.abs() > MAX_GRID_INDEX {
                    return None;
                }
                let mut k = idx.floor() + 1.0;
                while anchor + k * step > x + MEMBERSHIP_TOL {
                    k -= 1.0;
                }
                let g = anchor + k * step;
                if let Some(lo) = lower {
                    if g < *lo - MEMBERSHIP_TOL {
                        return None;
                    }
                }
                match upper {
                    Some(hi) if g > *hi => Some(*hi),
                    _ => Some(g),
                }
            }
            TimeScale::ContinuousInterval { a, b } => {
                if x < *a - MEMBERSHIP_TOL {
                    None
                } else {
                    Some(x.clamp(*a, *b))
                }
            }
            TimeScale::PieceUnion(pieces) => {
                let i = pieces.partition_point(|p| p.lo() <= x + MEMBERSHIP_TOL);
                (i > 0).then(|| {
                    let p = pieces[i - 1];
                    x.clamp(p.lo(), p.hi())
                })
            }
        }
    }

    /// Smallest member `>= x` (within tolerance), if any.
    pub fn ceil_point(&self, x: f64) -> Option<f64> {
        if !x.is_finite() {
            return None;
        }
        match self {
            TimeScale::FiniteSet(vs) => {
                let i = vs.partition_point(|v| *v < x);
                vs.get(i).copied()
            }
            TimeScale::UniformGrid { anchor, step, lower, upper } => {
                let idx = (x - anchor) / step;
                if idx.abs() > MAX_GRID_INDEX {
                    return None;
                }
                let mut k = idx.ceil() - 1.0;
                while anchor + k * step < x - MEMBERSHIP_TOL {
                    k += 1.0;
                }
                let g = anchor + k * step;
                if let Some(hi) = upper {
                    if g > *hi + MEMBERSHIP_TOL {
                        return None;
                    }
                }
                match lower {
                    Some(lo) if g < *lo => Some(*lo),
                    _ => Some(g),
                }
            }
            TimeScale::ContinuousInterval { a, b } => {
                if x > *b + MEMBERSHIP_TOL {
                    None
                } else {
                    Some(x.clamp(*a, *b))
                }
            }
            TimeScale::PieceUnion(pieces) => {
                let i = pieces.partition_point(|p| p.hi() < x - MEMBERSHIP_TOL);
                pieces.get(i).map(|p| x.clamp(p.lo(), p.hi()))
            }
        }
    }

    /// Whether the scale has members strictly below `t`.
    pub fn has_left_neighbors(&self, t: f64) -> bool {
        self.min().map_or(true, |m| t > m)
    }

    /// Whether the scale has members strictly above `t`.
    pub fn has_right_neighbors(&self, t: f64) -> bool {
        self.max().map_or(true, |m| t < m)
    }

    // ------------------------------------------------------------------
    // Restriction and window decomposition.
    // ------------------------------------------------------------------

    /// The compact scale `[a, b] ∩ T`. Both ends must be members and the
    /// result must be nonempty. Bounded grid slices materialize into finite
    /// sets when small enough to enumerate.
    pub fn restrict(&self, a: f64, b: f64) -> Result<TimeScale> {
        let a = self.member(a)?;
        let b = self.member(b)?;
        if a >= b {
            return Err(Error::InvalidScale(format!("restriction needs a < b, got [{a}, {b}]")));
        }
        match self {
            TimeScale::FiniteSet(vs) => {
                let lo = vs.partition_point(|v| *v < a);
                let hi = vs.partition_point(|v| *v <= b);
                TimeScale::finite(vs[lo..hi].to_vec())
            }
            TimeScale::UniformGrid { anchor, step, .. } => {
                let ka = ((a - anchor) / step).round();
                let kb = ((b - anchor) / step).round();
                let count = (kb - ka) as usize + 1;
                if count <= MATERIALIZE_CAP {
                    let vs = (0..count).map(|i| anchor + (ka + i as f64) * step).collect();
                    TimeScale::finite(vs)
                } else {
                    Ok(TimeScale::UniformGrid {
                        anchor: *anchor,
                        step: *step,
                        lower: Some(a),
                        upper: Some(b),
                    })
                }
            }
            TimeScale::ContinuousInterval { .. } => TimeScale::interval(a, b),
            TimeScale::PieceUnion(pieces) => {
                let mut clipped = Vec::new();
                for p in pieces {
                    let lo = p.lo().max(a);
                    let hi = p.hi().min(b);
                    if lo > hi {
                        continue;
                    }
                    clipped.push(if lo == hi { Piece::Point(lo) } else { Piece::Interval(lo, hi) });
                }
                TimeScale::union(clipped)
            }
        }
    }

    /// Decomposes the members of the window between `lo` and `hi` into
    /// isolated points and continuous segments, in increasing order. The
    /// closedness flags state whether each window end is itself included.
    /// Grid windows enumerate their points; `cap` bounds that enumeration.
    pub fn regions_within(
        &self,
        lo: f64,
        hi: f64,
        include_lo: bool,
        include_hi: bool,
        cap: usize,
    ) -> Result<Vec<Region>> {
        let keep = |v: f64| -> bool {
            (v > lo || (include_lo && v == lo)) && (v < hi || (include_hi && v == hi))
        };
        let mut regions = Vec::new();
        match self {
            TimeScale::FiniteSet(vs) => {
                for &v in vs {
                    if keep(v) {
                        regions.push(Region::Point(v));
                    }
                }
            }
            TimeScale::UniformGrid { anchor, step, lower, upper } => {
                let from = lower.map_or(lo, |m| m.max(lo));
                let to = upper.map_or(hi, |m| m.min(hi));
                let ka = ((from - anchor) / step).ceil() - 1.0;
                let kb = ((to - anchor) / step).floor() + 1.0;
                if kb - ka > cap as f64 {
                    return Err(Error::EnumerationTooLarge { cap });
                }
                let mut k = ka;
                while k <= kb {
                    let v = anchor + k * step;
                    if self.contains(v) && keep(v) {
                        regions.push(Region::Point(v));
                    }
                    k += 1.0;
                }
            }
            TimeScale::ContinuousInterval { a, b } => {
                push_segment(&mut regions, *a, *b, lo, hi, include_lo, include_hi);
            }
            TimeScale::PieceUnion(pieces) => {
                for p in pieces {
                    match *p {
                        Piece::Point(v) => {
                            if keep(v) {
                                regions.push(Region::Point(v));
                            }
                        }
                        Piece::Interval(a, b) => {
                            push_segment(&mut regions, a, b, lo, hi, include_lo, include_hi);
                        }
                    }
                }
            }
        }
        Ok(regions)
    }

    /// Enumerates the members of the window between `lo` and `hi` when they
    /// form a finite list; `None` if any continuous segment intersects it.
    pub fn enumerate_within(
        &self,
        lo: f64,
        hi: f64,
        include_lo: bool,
        include_hi: bool,
        cap: usize,
    ) -> Result<Option<Vec<f64>>> {
        let regions = self.regions_within(lo, hi, include_lo, include_hi, cap)?;
        let mut points = Vec::with_capacity(regions.len());
        for r in regions {
            match r {
                Region::Point(v) => points.push(v),
                Region::Segment { .. } => return Ok(None),
            }
        }
        if points.len() > cap {
            return Err(Error::EnumerationTooLarge { cap });
        }
        Ok(Some(points))
    }
}

/// Clips the closed interval `[a, b]` by the window and appends the result.
fn push_segment(
    regions: &mut Vec<Region>,
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
    include_lo: bool,
    include_hi: bool,
) {
    let s_lo = a.max(lo);
    let s_hi = b.min(hi);
    if s_lo > s_hi {
        return;
    }
    let lo_closed = s_lo > lo || include_lo;
    let hi_closed = s_hi < hi || include_hi;
    if s_lo == s_hi {
        if lo_closed && hi_closed {
            regions.push(Region::Point(s_lo));
        }
        return;
    }
    regions.push(Region::Segment { lo: s_lo, hi: s_hi, lo_closed, hi_closed });
}

fn parse_number(text: &str, position: usize) -> Result<f64> {
    let v: f64 = text.trim().parse().map_err(|_| Error::Parse {
        position,
        message: format!("expected a number, got {text:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse { position, message: format!("number {text:?} is not finite") });
    }
    Ok(v)
}

fn parse_interval_body(text: &str, position: usize) -> Result<(f64, f64)> {
    let (a_text, b_text) = text.split_once(':').ok_or_else(|| Error::Parse {
        position,
        message: "interval needs two endpoints separated by a colon".into(),
    })?;
    let a = parse_number(a_text, position)?;
    let b = parse_number(b_text, position + a_text.len() + 1)?;
    Ok((a, b))
}

impl fmt::Display for TimeScale {
    /// Prints in the text grammar where the representation allows it, so
    /// printed scales re-parse to an equal scale.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeScale::FiniteSet(vs) => {
                write!(out, "finite:")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(out, ",")?;
                    }
                    write!(out, "{v}")?;
                }
                Ok(())
            }
            TimeScale::UniformGrid { anchor, step, lower, upper } => {
                match (anchor, step, lower, upper) {
                    (0.0, 1.0, None, None) => write!(out, "Z"),
                    (1.0, 1.0, Some(1.0), None) => write!(out, "N"),
                    (0.0, _, None, None) => write!(out, "hZ:{step}"),
                    _ => write!(out, "grid(anchor={anchor},step={step},lower={lower:?},upper={upper:?})"),
                }
            }
            TimeScale::ContinuousInterval { a, b } => write!(out, "interval:{a}:{b}"),
            TimeScale::PieceUnion(pieces) => {
                write!(out, "union:(")?;
                for (i, p) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(out, ";")?;
                    }
                    match p {
                        Piece::Point(v) => write!(out, "point:{v}")?,
                        Piece::Interval(a, b) => write!(out, "interval:{a}:{b}")?,
                    }
                }
                write!(out, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn union_012() -> TimeScale {
        TimeScale::union(vec![Piece::Interval(0.0, 1.0), Piece::Point(2.0)]).unwrap()
    }

    fn union_0124() -> TimeScale {
        TimeScale::union(vec![
            Piece::Interval(0.0, 1.0),
            Piece::Point(2.0),
            Piece::Interval(3.0, 4.0),
        ])
        .unwrap()
    }

    #[test]
    fn rho_on_finite_set_steps_back() {
        let ts = TimeScale::finite(vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(ts.rho(4.0).unwrap(), 1.0);
        assert_eq!(ts.rho(1.0).unwrap(), 0.0);
    }

    #[test]
    fn rho_at_minimum_is_identity() {
        let ts = TimeScale::finite(vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(ts.rho(0.0).unwrap(), 0.0);
        let n = TimeScale::naturals();
        assert_eq!(n.rho(1.0).unwrap(), 1.0);
    }

    #[test]
    fn grid_jumps_are_arithmetic() {
        let ts = TimeScale::h_integers(0.5).unwrap();
        assert_eq!(ts.rho(2.0).unwrap(), 1.5);
        assert_eq!(ts.sigma(2.0).unwrap(), 2.5);
        assert_eq!(ts.nu(2.0).unwrap(), 0.5);
        let z = TimeScale::integers();
        assert_eq!(z.rho(-3.0).unwrap(), -4.0);
        let n = TimeScale::naturals();
        assert_eq!(n.sigma(3.0).unwrap(), 4.0);
    }

    #[test]
    fn interval_points_are_dense() {
        let ts = TimeScale::interval(0.0, 1.0).unwrap();
        assert_eq!(ts.rho(0.5).unwrap(), 0.5);
        assert_eq!(ts.nu(0.5).unwrap(), 0.0);
        assert_eq!(ts.nu(0.0).unwrap(), 0.0);
        assert_eq!(ts.classify_point(0.5).unwrap(), PointClass::LeftDense);
    }

    #[test]
    fn union_jump_and_graininess() {
        let ts = union_012();
        assert_eq!(ts.rho(2.0).unwrap(), 1.0);
        assert_eq!(ts.nu(2.0).unwrap(), 1.0);
        assert_eq!(ts.classify_point(1.0).unwrap(), PointClass::LeftDense);
        assert_eq!(ts.classify_point(2.0).unwrap(), PointClass::LeftScattered);
        assert_eq!(ts.sigma(1.0).unwrap(), 2.0);
    }

    #[test]
    fn lattice_points_are_left_scattered() {
        let z = TimeScale::integers();
        assert_eq!(z.classify_point(7.0).unwrap(), PointClass::LeftScattered);
        assert_eq!(z.nu(7.0).unwrap(), 1.0);
    }

    #[test]
    fn tk_excludes_right_scattered_minimum() {
        let n = TimeScale::naturals();
        assert!(!n.tk_contains(1.0).unwrap());
        assert!(n.tk_contains(2.0).unwrap());
        let iv = TimeScale::interval(0.0, 1.0).unwrap();
        assert!(iv.tk_contains(0.0).unwrap());
        let z = TimeScale::integers();
        assert!(z.tk_contains(-100.0).unwrap());
    }

    #[test]
    fn restrict_materializes_small_grid_windows() {
        let n = TimeScale::naturals();
        let r = n.restrict(1.0, 10.0).unwrap();
        assert_eq!(r, TimeScale::FiniteSet((1..=10).map(|k| k as f64).collect()));
    }

    #[test]
    fn restrict_keeps_interval_representation() {
        let ts = TimeScale::interval(0.0, 5.0).unwrap();
        assert_eq!(ts.restrict(1.0, 3.0).unwrap(), TimeScale::interval(1.0, 3.0).unwrap());
    }

    #[test]
    fn restrict_clips_unions() {
        let ts = union_0124();
        assert_eq!(ts.restrict(0.0, 2.0).unwrap(), union_012());
    }

    #[test]
    fn restrict_requires_member_endpoints() {
        let n = TimeScale::naturals();
        assert!(matches!(n.restrict(1.5, 10.0), Err(Error::NotInScale(_))));
    }

    #[test]
    fn iterate_rho_walks_and_stops() {
        let n = TimeScale::naturals();
        assert_eq!(n.iterate_rho(4.0, 3).unwrap(), 1.0);
        assert_eq!(n.iterate_rho(4.0, 10).unwrap(), 1.0);
        let iv = TimeScale::interval(0.0, 1.0).unwrap();
        assert_eq!(iv.iterate_rho(0.5, 2).unwrap(), 0.5);
    }

    #[test]
    fn membership_tolerates_round_off_on_grids() {
        let ts = TimeScale::h_integers(0.1).unwrap();
        assert!(ts.contains(0.30000000000000004));
        assert_eq!(ts.canonical(0.30000000000000004), Some(0.1 * 3.0));
        assert!(!ts.contains(0.35));
        let fs = TimeScale::finite(vec![0.1 * 3.0]).unwrap();
        assert!(!fs.contains(0.3));
    }

    #[test]
    fn union_normalizes_and_merges() {
        let ts = TimeScale::union(vec![
            Piece::Interval(1.0, 2.0),
            Piece::Interval(0.0, 1.0),
            Piece::Point(1.5),
        ])
        .unwrap();
        assert_eq!(ts, TimeScale::interval(0.0, 2.0).unwrap());
        let pts = TimeScale::union(vec![Piece::Point(3.0), Piece::Point(1.0)]).unwrap();
        assert_eq!(pts, TimeScale::finite(vec![1.0, 3.0]).unwrap());
    }

    #[test]
    fn parse_round_trips_grammar_forms() {
        for text in [
            "Z",
            "N",
            "hZ:0.5",
            "interval:-1:1",
            "finite:1,2,3.5",
            "union:(interval:0:1;point:2)",
        ] {
            let ts = TimeScale::parse(text).unwrap();
            assert_eq!(TimeScale::parse(&ts.to_string()).unwrap(), ts, "round trip {text}");
        }
    }

    #[test]
    fn parse_rejects_malformed_text() {
        assert!(TimeScale::parse("z").is_err());
        assert!(TimeScale::parse("hZ:0").is_err());
        assert!(TimeScale::parse("interval:2:1").is_err());
        assert!(TimeScale::parse("finite:").is_err());
        assert!(TimeScale::parse("union:point:1").is_err());
    }

    #[test]
    fn floor_and_ceil_points() {
        let ts = union_0124();
        assert_eq!(ts.floor_point(2.5), Some(2.0));
        assert_eq!(ts.floor_point(0.5), Some(0.5));
        assert_eq!(ts.floor_point(-0.5), None);
        assert_eq!(ts.ceil_point(2.5), Some(3.0));
        assert_eq!(ts.ceil_point(4.5), None);
        let z = TimeScale::integers();
        assert_eq!(z.floor_point(2.7), Some(2.0));
        assert_eq!(z.ceil_point(2.2), Some(3.0));
    }

    #[test]
    fn regions_split_open_windows() {
        let ts = union_0124();
        let rs = ts.regions_within(0.0, 4.0, false, false, 10_000).unwrap();
        assert_eq!(
            rs,
            vec![
                Region::Segment { lo: 0.0, hi: 1.0, lo_closed: false, hi_closed: true },
                Region::Point(2.0),
                Region::Segment { lo: 3.0, hi: 4.0, lo_closed: true, hi_closed: false },
            ]
        );
        let n = TimeScale::naturals();
        let pts = n.enumerate_within(1.0, 10.0, false, false, 10_000).unwrap().unwrap();
        assert_eq!(pts, (2..=9).map(|k| k as f64).collect::<Vec<_>>());
    }
}
