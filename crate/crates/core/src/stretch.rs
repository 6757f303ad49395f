//! Exact optimal stretch sets by sweeping over lattice-point windows in `s`.
//!
//! For the p-ellipse, `h(s) = (j·s)ᵖ + (k/s)ᵖ` is unimodal in `s`, so each
//! lattice point `(j, k)` lies inside `rΓ(s)` for one closed interval of `s`
//! (its *window*). `N(r, ·)` is the depth of the window arrangement, so its
//! maximizers and (after adding axis windows) the minimizers of `𝒩(r, ·)` are
//! read off a single sorted pass over the endpoints.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bracket_basic, improved_threshold};
use crate::counting::{check_rs, count_closed, count_interior, MembershipPolicy, PLevel};
use crate::curve::{make_p_ellipse, CurveKind, CurveModel};
use crate::error::{Error, Result};

/// Endpoints closer than this (relative) are treated as one event.
const MERGE_TOL: f64 = 1e-12;

/// Initial cells of the grid search used for curves without a window formula.
const HEURISTIC_CELLS: usize = 10_000;

/// Closed `s`-interval during which `(j, k)` lies inside or on `rΓ(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StretchWindow {
    pub j: u64,
    pub k: u64,
    pub s_lo: f64,
    pub s_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizeMode {
    /// Maximize `N(r, s)` over `s`.
    MaxInterior,
    /// Minimize `𝒩(r, s)` over `s`.
    MinClosed,
}

impl OptimizeMode {
    pub fn name(self) -> &'static str {
        match self {
            OptimizeMode::MaxInterior => "max-interior",
            OptimizeMode::MinClosed => "min-closed",
        }
    }
}

/// An interval of `s`; `lo == hi` with both ends closed is a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl SInterval {
    pub fn contains(&self, s: f64) -> bool {
        let above = if self.lo_closed { s >= self.lo } else { s > self.lo };
        let below = if self.hi_closed { s <= self.hi } else { s < self.hi };
        above && below
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumReport {
    pub r: f64,
    pub p: Option<f64>,
    pub mode: OptimizeMode,
    pub best_count: u64,
    /// Sorted, disjoint intervals on which `best_count` is attained.
    pub optimizer: Vec<SInterval>,
    /// `sup |s − 1|` over the optimizer.
    pub dist_to_one: f64,
    pub witness_s: f64,
    /// Found by grid search rather than by the exact sweep.
    pub heuristic: bool,
}

/// Membership of `(j, k)` in `rΓ(s)` for the unit p-circle, the same
/// predicate the counters use.
#[derive(Debug, Clone, Copy)]
struct Inside {
    p: f64,
    threshold: f64,
    policy: MembershipPolicy,
}

impl Inside {
    fn new(p: f64, r: f64, policy: MembershipPolicy) -> Self {
        Self::with_threshold(p, r.powf(p), policy)
    }

    fn with_threshold(p: f64, threshold: f64, policy: MembershipPolicy) -> Self {
        Self {
            p,
            threshold,
            policy,
        }
    }

    fn level(&self) -> f64 {
        PLevel::new(self.p, 1.0, self.threshold, self.policy).level
    }

    fn at(&self, s: f64, j: u64, k: u64) -> bool {
        PLevel::new(self.p, s, self.threshold, self.policy).contains(j, k)
    }
}

/// Moves from `guess` to the point where `inside` flips, to full precision.
///
/// `lower` means the inside region lies to the right of the boundary.
/// `anchor` is a point known to be inside. Returns the inside-side endpoint.
fn polish<F: Fn(f64) -> bool>(inside: F, guess: f64, anchor: f64, lower: bool) -> f64 {
    // Direction (in log s) that leads out of the window.
    let out_dir: f64 = if lower { -1.0 } else { 1.0 };
    let (mut inn, mut out);
    let mut step: f64 = 1e-10;
    if inside(guess) {
        inn = guess;
        loop {
            let cand = guess * (out_dir * step).exp();
            if !inside(cand) {
                out = cand;
                break;
            }
            inn = cand;
            step *= 2.0;
            if step > 700.0 {
                return inn;
            }
        }
    } else {
        out = guess;
        loop {
            let mut cand = guess * (-out_dir * step).exp();
            let past_anchor = if lower { cand >= anchor } else { cand <= anchor };
            if past_anchor {
                cand = anchor;
            }
            if inside(cand) {
                inn = cand;
                break;
            }
            out = cand;
            step *= 2.0;
            if past_anchor {
                return anchor;
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (inn + out);
        if mid == inn || mid == out {
            break;
        }
        if inside(mid) {
            inn = mid;
        } else {
            out = mid;
        }
    }
    inn
}

fn window_for(inside: &Inside, j: u64, k: u64) -> Option<StretchWindow> {
    let s0 = (k as f64 / j as f64).sqrt();
    if !inside.at(s0, j, k) {
        return None;
    }
    // (js)ᵖ + (k/s)ᵖ = T with u = sᵖ: jᵖu² − Tu + kᵖ = 0.
    let p = inside.p;
    let (jp, kp) = ((j as f64).powf(p), (k as f64).powf(p));
    let t = inside.level();
    let disc = (t * t - 4.0 * jp * kp).max(0.0);
    let q = 0.5 * (t + disc.sqrt());
    let u_hi = q / jp;
    let u_lo = kp / q;
    let guess_lo = u_lo.powf(1.0 / p).min(s0);
    let guess_hi = u_hi.powf(1.0 / p).max(s0);
    let member = |s: f64| inside.at(s, j, k);
    let s_lo = polish(member, guess_lo, s0, true);
    let s_hi = polish(member, guess_hi, s0, false);
    Some(StretchWindow {
        j,
        k,
        s_lo: s_lo.min(s0),
        s_hi: s_hi.max(s0),
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// Every nonempty window of the unit p-circle at radius `r`, ordered by `(j, k)`.
pub fn enumerate_windows(p: f64, r: f64, policy: MembershipPolicy) -> Result<Vec<StretchWindow>> {
    check_p(p)?;
    check_rs(r, 1.0)?;
    Ok(windows_of(Inside::new(p, r, policy)))
}

fn windows_of(inside: Inside) -> Vec<StretchWindow> {
    let p = inside.p;
    // A window exists only if 2(jk)^{p/2} ≤ level, i.e. jk ≤ (level/2)^{2/p}.
    let bound = (0.5 * inside.level()).powf(2.0 / p) * (1.0 + 1e-9);
    if bound < 1.0 {
        return Vec::new();
    }
    let j_max = bound.floor() as u64 + 1;
    let per_column: Vec<Vec<StretchWindow>> = (1..=j_max)
        .into_par_iter()
        .map(|j| {
            let k_max = (bound / j as f64).floor() as u64 + 1;
            (1..=k_max).filter_map(|k| window_for(&inside, j, k)).collect()
        })
        .collect();
    per_column.into_iter().flatten().collect()
}

/// Points where the depth changes, with the depth on and after each.
#[derive(Debug, Clone)]
struct Cluster {
    lo: f64,
    hi: f64,
    last_start: Option<f64>,
    first_end: Option<f64>,
    last_end: Option<f64>,
    first_start: Option<f64>,
    point_depth: u64,
    after_depth: u64,
}

/// Piecewise-constant depth of a family of closed intervals.
#[derive(Debug, Clone)]
struct Profile {
    base: u64,
    clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    /// The open gap before cluster `i` (`i == len` is the gap after the last).
    Gap(usize),
    Point(usize),
}

impl Profile {
    /// `base` intervals cover everything left of the first event; each
    /// `(lo, hi)` with `lo = None` is one of them and `hi = None` never ends.
    fn build(base: u64, intervals: &[(Option<f64>, Option<f64>)]) -> Self {
        let mut events: Vec<(f64, bool)> = Vec::with_capacity(2 * intervals.len());
        for &(lo, hi) in intervals {
            if let Some(lo) = lo {
                events.push((lo, true));
            }
            if let Some(hi) = hi {
                events.push((hi, false));
            }
        }
        events.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));

        let mut clusters: Vec<Cluster> = Vec::new();
        let mut depth = base + intervals.iter().filter(|iv| iv.0.is_none()).count() as u64;
        let base = depth;
        let mut i = 0;
        while i < events.len() {
            let start = events[i].0;
            let mut c = Cluster {
                lo: start,
                hi: start,
                last_start: None,
                first_end: None,
                last_end: None,
                first_start: None,
                point_depth: 0,
                after_depth: 0,
            };
            let (mut starts, mut ends) = (0u64, 0u64);
            let mut prev = start;
            while i < events.len() && events[i].0 <= prev * (1.0 + MERGE_TOL) {
                let (x, is_start) = events[i];
                if is_start {
                    starts += 1;
                    c.first_start.get_or_insert(x);
                    c.last_start = Some(x);
                } else {
                    ends += 1;
                    c.first_end.get_or_insert(x);
                    c.last_end = Some(x);
                }
                c.hi = x;
                prev = x;
                i += 1;
            }
            c.point_depth = depth + starts;
            depth = c.point_depth - ends;
            c.after_depth = depth;
            clusters.push(c);
        }
        Profile { base, clusters }
    }

    fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        (0..self.clusters.len())
            .flat_map(|i| [Piece::Gap(i), Piece::Point(i)])
            .chain(std::iter::once(Piece::Gap(self.clusters.len())))
    }

    fn depth(&self, piece: Piece) -> u64 {
        match piece {
            Piece::Point(i) => self.clusters[i].point_depth,
            Piece::Gap(0) => self.base,
            Piece::Gap(i) => self.clusters[i - 1].after_depth,
        }
    }

    fn depth_at(&self, s: f64) -> u64 {
        let idx = self.clusters.partition_point(|c| c.hi < s);
        if idx < self.clusters.len() && self.clusters[idx].lo <= s {
            return self.clusters[idx].point_depth;
        }
        self.depth(Piece::Gap(idx))
    }

    /// Maximal runs of pieces whose depth satisfies `keep`, as intervals.
    fn runs<K: Fn(u64) -> bool>(&self, keep: K) -> Vec<SInterval> {
        let mut out = Vec::new();
        let mut run: Option<(Piece, Piece)> = None;
        for piece in self.pieces() {
            if keep(self.depth(piece)) {
                run = Some(match run {
                    Some((first, _)) => (first, piece),
                    None => (piece, piece),
                });
            } else if let Some((first, last)) = run.take() {
                out.push(self.run_interval(first, last));
            }
        }
        if let Some((first, last)) = run {
            out.push(self.run_interval(first, last));
        }
        out
    }

    fn run_interval(&self, first: Piece, last: Piece) -> SInterval {
        let (lo, lo_closed) = match first {
            Piece::Point(i) => {
                let c = &self.clusters[i];
                (c.last_start.unwrap_or(c.lo), true)
            }
            Piece::Gap(0) => (0.0, false),
            Piece::Gap(i) => {
                let c = &self.clusters[i - 1];
                (c.last_end.unwrap_or(c.hi), false)
            }
        };
        let (hi, hi_closed) = match last {
            Piece::Point(i) => {
                let c = &self.clusters[i];
                (c.first_end.unwrap_or(c.hi), true)
            }
            Piece::Gap(i) if i == self.clusters.len() => (f64::INFINITY, false),
            Piece::Gap(i) => {
                let c = &self.clusters[i];
                (c.first_start.unwrap_or(c.lo), false)
            }
        };
        SInterval {
            lo,
            hi: hi.max(lo),
            lo_closed,
            hi_closed,
        }
    }
}

/// Depth profile of `N(r, ·)` or `𝒩(r, ·)` for the unit p-circle.
#[derive(Debug, Clone)]
pub struct StretchProfile {
    p: f64,
    r: f64,
    mode: OptimizeMode,
    profile: Profile,
    /// In min mode, depths above this are lower bounds only.
    exact_up_to: u64,
}

impl StretchProfile {
    pub fn new(p: f64, r: f64, mode: OptimizeMode, policy: MembershipPolicy) -> Result<Self> {
        check_p(p)?;
        check_rs(r, 1.0)?;
        let windows = enumerate_windows(p, r, policy)?;
        let mut intervals: Vec<(Option<f64>, Option<f64>)> =
            windows.iter().map(|w| (Some(w.s_lo), Some(w.s_hi))).collect();
        let (base, exact_up_to) = match mode {
            OptimizeMode::MaxInterior => (0, u64::MAX),
            OptimizeMode::MinClosed => {
                // Any s where one axis alone exceeds 𝒩(r, 1) cannot be a
                // minimizer, so axis windows past that index are dropped.
                let curve = make_p_ellipse(p)?;
                let cap = count_closed(&curve, r, 1.0, policy)?;
                let inside = Inside::new(p, r, policy);
                let c = (1.0 + policy.tol_rel()).powf(1.0 / p);
                let axis: Vec<(f64, f64)> = (1..=cap + 1)
                    .into_par_iter()
                    .map(|m| {
                        let x_end = r * c / m as f64;
                        let x_end = polish(|s| inside.at(s, m, 0), x_end, x_end * 1e-3, false);
                        let y_start = m as f64 / (r * c);
                        let y_start = polish(|s| inside.at(s, 0, m), y_start, y_start * 1e3, true);
                        (x_end, y_start)
                    })
                    .collect();
                for (x_end, y_start) in axis {
                    intervals.push((None, Some(x_end)));
                    intervals.push((Some(y_start), None));
                }
                (1, cap)
            }
        };
        Ok(Self {
            p,
            r,
            mode,
            profile: Profile::build(base, &intervals),
            exact_up_to,
        })
    }

    /// Profile of `#{(j, k) ≥ 1 : (j·s)ᵖ + (k/s)ᵖ ≤ threshold}` over `s`.
    pub(crate) fn interior_below(p: f64, threshold: f64, policy: MembershipPolicy) -> Self {
        let windows = windows_of(Inside::with_threshold(p, threshold, policy));
        let intervals: Vec<_> = windows.iter().map(|w| (Some(w.s_lo), Some(w.s_hi))).collect();
        Self {
            p,
            r: threshold.powf(1.0 / p),
            mode: OptimizeMode::MaxInterior,
            profile: Profile::build(0, &intervals),
            exact_up_to: u64::MAX,
        }
    }

    pub(crate) fn max_depth(&self) -> u64 {
        self.profile.pieces().map(|pc| self.profile.depth(pc)).max().unwrap_or(0)
    }

    /// The set of `s` where the depth is at least `n`.
    pub fn superlevel_set(&self, n: u64) -> Vec<SInterval> {
        self.profile.runs(|d| d >= n)
    }

    /// The count at `s` implied by the sweep. In min mode the value is exact
    /// whenever it does not exceed `𝒩(r, 1)`; larger values are lower bounds.
    pub fn depth_at(&self, s: f64) -> u64 {
        self.profile.depth_at(s)
    }

    pub fn exact_up_to(&self) -> u64 {
        self.exact_up_to
    }

    pub fn report(&self) -> Result<OptimumReport> {
        let depths = self.profile.pieces().map(|pc| self.profile.depth(pc));
        let best = match self.mode {
            OptimizeMode::MaxInterior => depths.max().unwrap_or(0),
            OptimizeMode::MinClosed => depths.min().unwrap_or(0),
        };
        if self.mode == OptimizeMode::MaxInterior && best == 0 {
            return Err(Error::NoLatticePoint { r: self.r });
        }
        let optimizer = self.profile.runs(|d| d == best);
        if optimizer.iter().any(|iv| iv.lo <= 0.0 || !iv.hi.is_finite()) {
            return Err(Error::Degenerate(format!(
                "optimizer at r = {} is unbounded",
                self.r
            )));
        }
        Ok(finish_report(self.r, Some(self.p), self.mode, best, optimizer, false))
    }
}

fn finish_report(
    r: f64,
    p: Option<f64>,
    mode: OptimizeMode,
    best_count: u64,
    optimizer: Vec<SInterval>,
    heuristic: bool,
) -> OptimumReport {
    let dist_to_one = optimizer
        .iter()
        .map(|iv| (iv.lo - 1.0).abs().max((iv.hi - 1.0).abs()))
        .fold(0.0, f64::max);
    let witness_s = optimizer
        .iter()
        .fold(None::<&SInterval>, |best, iv| match best {
            Some(b) if b.width() >= iv.width() => Some(b),
            _ => Some(iv),
        })
        .map(SInterval::midpoint)
        .unwrap_or(1.0);
    OptimumReport {
        r,
        p,
        mode,
        best_count,
        optimizer,
        dist_to_one,
        witness_s,
        heuristic,
    }
}

/// `S(r)`: the stretch factors maximizing `N(r, s)` for the unit p-circle.
pub fn argmax_interior(p: f64, r: f64, policy: MembershipPolicy) -> Result<OptimumReport> {
    StretchProfile::new(p, r, OptimizeMode::MaxInterior, policy)?.report()
}

/// `𝒮(r)`: the stretch factors minimizing `𝒩(r, s)` for the unit p-circle.
pub fn argmin_closed(p: f64, r: f64, policy: MembershipPolicy) -> Result<OptimumReport> {
    StretchProfile::new(p, r, OptimizeMode::MinClosed, policy)?.report()
}

/// Optimizes over `s` for any curve. P-ellipses use the exact sweep; other
/// curves use a grid search over `[(rM)⁻¹, rL]` and are flagged heuristic.
pub fn optimize(
    curve: &CurveModel,
    r: f64,
    mode: OptimizeMode,
    policy: MembershipPolicy,
) -> Result<OptimumReport> {
    check_rs(r, 1.0)?;
    if let CurveKind::PEllipse { p, radius, stretch } = curve.kind() {
        // N_curve(r, s) = N_unit(r·radius, s·stretch).
        let mut report = StretchProfile::new(p, r * radius, mode, policy)?.report()?;
        report.r = r;
        for iv in &mut report.optimizer {
            iv.lo /= stretch;
            iv.hi /= stretch;
        }
        return Ok(finish_report(
            r,
            Some(p),
            mode,
            report.best_count,
            report.optimizer,
            false,
        ));
    }
    grid_search(curve, r, mode, policy)
}

fn grid_search(
    curve: &CurveModel,
    r: f64,
    mode: OptimizeMode,
    policy: MembershipPolicy,
) -> Result<OptimumReport> {
    let (a, b) = ((1.0 / (r * curve.m())).ln(), (r * curve.l()).ln());
    let (a, b) = (a.min(b), a.max(b));
    let score = |t: f64| -> Result<i64> {
        let s = t.exp();
        Ok(match mode {
            OptimizeMode::MaxInterior => count_interior(curve, r, s, policy)? as i64,
            OptimizeMode::MinClosed => -(count_closed(curve, r, s, policy)? as i64),
        })
    };
    let ts: Vec<f64> = (0..=HEURISTIC_CELLS)
        .map(|i| a + (b - a) * i as f64 / HEURISTIC_CELLS as f64)
        .collect();
    let scores: Vec<i64> = ts.par_iter().map(|&t| score(t)).collect::<Result<_>>()?;
    let (best_i, &grid_best) = scores
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .expect("grid is nonempty");
    let mut best = (ts[best_i], grid_best);
    // Golden-section refinement over the neighbouring cells.
    let (mut lo, mut hi) = (ts[best_i.saturating_sub(1)], ts[(best_i + 1).min(HEURISTIC_CELLS)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = hi - inv_phi * (hi - lo);
        let d = lo + inv_phi * (hi - lo);
        let (sc, sd) = (score(c)?, score(d)?);
        for (t, v) in [(c, sc), (d, sd)] {
            if v > best.1 {
                best = (t, v);
            }
        }
        if sc >= sd {
            hi = d;
        } else {
            lo = c;
        }
    }
    let s = best.0.exp();
    let count = best.1.unsigned_abs();
    let point = SInterval {
        lo: s,
        hi: s,
        lo_closed: true,
        hi_closed: true,
    };
    Ok(finish_report(r, None, mode, count, vec![point], true))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub r: f64,
    pub dist_to_one: Option<f64>,
    pub best_count: Option<u64>,
    pub predicted_count: f64,
    pub residual: Option<f64>,
    pub bracket_lo: Option<f64>,
    pub bracket_hi: Option<f64>,
    /// Error text for rows whose optimization failed.
    pub flag: Option<String>,
}

/// Runs the optimizer for each `r` of an increasing grid.
///
/// `predicted_count` is `r²·Area − r` in max mode and `r²·Area + r` in min
/// mode. In max mode for `0 < p < 1` the row carries the improved bracket
/// when `r` is past its threshold, otherwise the basic one when valid.
pub fn sweep(
    p: f64,
    mode: OptimizeMode,
    r_grid: &[f64],
    policy: MembershipPolicy,
) -> Result<Vec<SweepRecord>> {
    check_p(p)?;
    if r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument("every r must be positive and finite".into()));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("the r grid must be strictly increasing".into()));
    }
    let curve = make_p_ellipse(p)?;
    let area = curve.area();
    let improved = (mode == OptimizeMode::MaxInterior && p < 1.0).then(|| improved_threshold(&curve));
    let records = r_grid
        .par_iter()
        .map(|&r| {
            let perimeter = match mode {
                OptimizeMode::MaxInterior => -r,
                OptimizeMode::MinClosed => r,
            };
            let predicted_count = r * r * area + perimeter;
            let (bracket_lo, bracket_hi) = match improved {
                Some(c) if r >= c => (Some(2.0 / r), Some(0.5 * r)),
                Some(_) => match bracket_basic(&curve, r) {
                    Ok(b) => (Some(b.lo), Some(b.hi)),
                    Err(_) => (None, None),
                },
                None => (None, None),
            };
            let outcome = StretchProfile::new(p, r, mode, policy).and_then(|prof| prof.report());
            match outcome {
                Ok(rep) => SweepRecord {
                    r,
                    dist_to_one: Some(rep.dist_to_one),
                    best_count: Some(rep.best_count),
                    predicted_count,
                    residual: Some(rep.best_count as f64 - predicted_count),
                    bracket_lo,
                    bracket_hi,
                    flag: None,
                },
                Err(e) => SweepRecord {
                    r,
                    dist_to_one: None,
                    best_count: None,
                    predicted_count,
                    residual: None,
                    bracket_lo,
                    bracket_hi,
                    flag: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(records)
}

/// `n` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lo < hi and n >= 2, got lo = {lo}, hi = {hi}, n = {n}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Least-squares slope of `log dist_to_one` against `log r`.
    pub exponent: f64,
    pub intercept: f64,
    /// Smallest `K` with `dist_to_one ≤ K·r^{-e}` on every used record.
    pub envelope_constant: f64,
    pub n_used: usize,
}

/// Fits `dist_to_one ≈ C·r^{slope}` over the records with positive distance.
pub fn fit_decay(records: &[SweepRecord], e: f64) -> Result<DecayFit> {
    let usable: Vec<(f64, f64)> = records
        .iter()
        .filter(|rec| rec.flag.is_none())
        .filter_map(|rec| rec.dist_to_one.map(|d| (rec.r, d)))
        .filter(|(_, d)| d.is_finite())
        .collect();
    if !usable.is_empty() && usable.iter().all(|&(_, d)| d == 0.0) {
        return Err(Error::AlreadyBalanced);
    }
    let points: Vec<(f64, f64)> = usable.into_iter().filter(|&(_, d)| d > 0.0).collect();
    if points.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 10 records with positive distance, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(r, d)| (r.ln(), d.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all records share one r".into()));
    }
    let exponent = sxy / sxx;
    let envelope_constant = points
        .iter()
        .map(|&(r, d)| d * r.powf(e))
        .fold(0.0, f64::max);
    Ok(DecayFit {
        exponent,
        intercept: my - exponent * mx,
        envelope_constant,
        n_used: points.len(),
    })
}
