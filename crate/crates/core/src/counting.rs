//! Exact lattice point counts for `rΓ(s)`.
//!
//! Every counter in this module (and the event sweeps in
//! [`stretch`](crate::stretch)) decides membership through one predicate
//! parameterised by a [`MembershipPolicy`]. Points within the policy's
//! relative tolerance of the curve count as inside.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{CurveKind, CurveModel};
use crate::error::{Error, Result};

/// Column sums above this length are split across threads.
const PARALLEL_COLUMNS: u64 = 1 << 14;

/// Largest `r·max(s, 1/s)·max(L, M)` accepted by [`brute_force_count`].
pub const BRUTE_FORCE_LIMIT: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipPolicy {
    tol_rel: f64,
}

impl MembershipPolicy {
    pub const DEFAULT_TOL: f64 = 1e-9;
    pub const MAX_TOL: f64 = 1e-6;

    pub fn new(tol_rel: f64) -> Result<Self> {
        if !(0.0..=Self::MAX_TOL).contains(&tol_rel) {
            return Err(Error::InvalidArgument(format!(
                "tol_rel must lie in [0, {}], got {tol_rel}",
                Self::MAX_TOL
            )));
        }
        Ok(Self { tol_rel })
    }

    /// Strict real-arithmetic comparison, no inward rounding.
    pub fn exact() -> Self {
        Self { tol_rel: 0.0 }
    }

    pub fn tol_rel(&self) -> f64 {
        self.tol_rel
    }
}

impl Default for MembershipPolicy {
    fn default() -> Self {
        Self {
            tol_rel: Self::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticePoint {
    pub j: u64,
    pub k: u64,
}

pub(crate) fn check_rs(r: f64, s: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) || !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "r and s must be positive and finite, got r = {r}, s = {s}"
        )));
    }
    Ok(())
}

/// The sublevel set `{(j, k) : (j·s)ᵖ + (k/s)ᵖ ≤ level}`.
///
/// `level` already includes the policy's inward rounding.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PLevel {
    pub p: f64,
    pub s: f64,
    /// The curve itself: `(r·radius)ᵖ`.
    pub threshold: f64,
    pub level: f64,
}

impl PLevel {
    pub fn new(p: f64, s: f64, threshold: f64, policy: MembershipPolicy) -> Self {
        Self {
            p,
            s,
            threshold,
            level: threshold * (1.0 + policy.tol_rel),
        }
    }

    #[inline]
    pub fn value(&self, j: u64, k: u64) -> f64 {
        (j as f64 * self.s).powf(self.p) + (k as f64 / self.s).powf(self.p)
    }

    #[inline]
    pub fn contains(&self, j: u64, k: u64) -> bool {
        self.value(j, k) <= self.level
    }

    /// Largest `k ≥ 0` with `(j, k)` inside, `None` when `(j, 0)` is outside.
    pub fn column_height(&self, j: u64) -> Option<u64> {
        let rest = self.level - (j as f64 * self.s).powf(self.p);
        if rest < 0.0 {
            return None;
        }
        let mut k = (self.s * rest.powf(1.0 / self.p)).floor() as u64;
        while self.contains(j, k + 1) {
            k += 1;
        }
        while k > 0 && !self.contains(j, k) {
            k -= 1;
        }
        Some(k)
    }

    /// Largest `j ≥ 0` with `(j, 0)` inside.
    pub fn max_column(&self) -> u64 {
        let mut j = (self.level.powf(1.0 / self.p) / self.s).floor() as u64;
        while self.contains(j + 1, 0) {
            j += 1;
        }
        while j > 0 && !self.contains(j, 0) {
            j -= 1;
        }
        j
    }
}

/// Membership in `rΓ(s)` for one `(curve, r, s, policy)`.
#[derive(Clone, Copy)]
pub(crate) enum Membership<'a> {
    Implicit(PLevel),
    Graph {
        curve: &'a CurveModel,
        r: f64,
        s: f64,
        grow: f64,
    },
}

impl<'a> Membership<'a> {
    pub fn new(curve: &'a CurveModel, r: f64, s: f64, policy: MembershipPolicy) -> Self {
        match curve.kind() {
            CurveKind::PEllipse { p, radius, stretch } => {
                let rr = r * radius;
                Membership::Implicit(PLevel::new(p, s * stretch, rr.powf(p), policy))
            }
            CurveKind::Custom => Membership::Graph {
                curve,
                r,
                s,
                grow: 1.0 + policy.tol_rel,
            },
        }
    }

    fn graph_height(curve: &CurveModel, r: f64, s: f64, j: u64) -> f64 {
        r * s * curve.f(j as f64 * s / r)
    }

    pub fn contains(&self, j: u64, k: u64) -> bool {
        match *self {
            Membership::Implicit(level) => level.contains(j, k),
            Membership::Graph { curve, r, s, grow } => {
                j as f64 * s <= r * curve.l() * grow
                    && k as f64 <= Self::graph_height(curve, r, s, j) * grow
            }
        }
    }

    pub fn column_height(&self, j: u64) -> Option<u64> {
        match *self {
            Membership::Implicit(level) => level.column_height(j),
            Membership::Graph { curve, r, s, grow } => {
                if j as f64 * s > r * curve.l() * grow {
                    return None;
                }
                Some((Self::graph_height(curve, r, s, j) * grow).floor() as u64)
            }
        }
    }

    /// Number of lattice points `(j, 0)` with `j ≥ 1` inside.
    pub fn x_axis(&self) -> u64 {
        match *self {
            Membership::Implicit(level) => level.max_column(),
            Membership::Graph { curve, r, s, grow } => {
                let mut j = (r * curve.l() * grow / s).floor() as u64;
                while self.contains(j + 1, 0) {
                    j += 1;
                }
                while j > 0 && !self.contains(j, 0) {
                    j -= 1;
                }
                j
            }
        }
    }

    /// Number of lattice points `(0, k)` with `k ≥ 1` inside.
    pub fn y_axis(&self) -> u64 {
        self.column_height(0).unwrap_or(0)
    }

    /// Whether `(j, k)` lies within `tol` (relative) of the curve itself.
    pub fn near_curve(&self, j: u64, k: u64, tol: f64) -> bool {
        match *self {
            Membership::Implicit(level) => {
                (level.value(j, k) - level.threshold).abs() <= tol * level.threshold
            }
            Membership::Graph { curve, r, s, .. } => {
                if j as f64 * s > r * curve.l() {
                    return k == 0 && (j as f64 * s - r * curve.l()).abs() <= tol * r * curve.l();
                }
                let y = Self::graph_height(curve, r, s, j);
                (k as f64 - y).abs() <= tol * y.max(1.0)
            }
        }
    }

    fn interior_sum(&self, columns: u64) -> u64 {
        let height = |j: u64| self.column_height(j).unwrap_or(0);
        if columns >= PARALLEL_COLUMNS {
            (1..=columns).into_par_iter().map(height).sum()
        } else {
            (1..=columns).map(height).sum()
        }
    }
}

/// `N(r, s)`: positive-integer lattice points inside or on `rΓ(s)`.
pub fn count_interior(curve: &CurveModel, r: f64, s: f64, policy: MembershipPolicy) -> Result<u64> {
    check_rs(r, s)?;
    let member = Membership::new(curve, r, s, policy);
    Ok(member.interior_sum(member.x_axis()))
}

/// `𝒩(r, s)`: nonnegative-integer lattice points inside or on `rΓ(s)`,
/// assembled as `N + (x-axis points) + (y-axis points) + 1`.
pub fn count_closed(curve: &CurveModel, r: f64, s: f64, policy: MembershipPolicy) -> Result<u64> {
    check_rs(r, s)?;
    let member = Membership::new(curve, r, s, policy);
    let x_axis = member.x_axis();
    Ok(member.interior_sum(x_axis) + x_axis + member.y_axis() + 1)
}

/// Lattice points on the positive axes inside `rΓ(s)`: `(x-axis, y-axis)`.
pub fn axis_counts(curve: &CurveModel, r: f64, s: f64, policy: MembershipPolicy) -> Result<(u64, u64)> {
    check_rs(r, s)?;
    let member = Membership::new(curve, r, s, policy);
    Ok((member.x_axis(), member.y_axis()))
}

/// `#{(j, k) ≥ 1 : (j·s)ᵖ + (k/s)ᵖ ≤ threshold}` under `policy`.
///
/// For the p-ellipse this is `N(threshold^{1/p}, s)`; the spectra module
/// uses it with `threshold = λ`.
pub fn count_below_level(p: f64, s: f64, threshold: f64, policy: MembershipPolicy) -> Result<u64> {
    if !(p > 0.0) || !(s > 0.0) || !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need p > 0, s > 0, threshold >= 0; got p = {p}, s = {s}, threshold = {threshold}"
        )));
    }
    let level = PLevel::new(p, s, threshold, policy);
    let member = Membership::Implicit(level);
    Ok(member.interior_sum(level.max_column()))
}

/// Definitional count: tests every lattice point of the bounding box.
pub fn brute_force_count(
    curve: &CurveModel,
    r: f64,
    s: f64,
    closed: bool,
    policy: MembershipPolicy,
) -> Result<u64> {
    check_rs(r, s)?;
    let size = r * s.max(1.0 / s) * curve.l().max(curve.m());
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "r·max(s, 1/s)·max(L, M) = {size} exceeds {BRUTE_FORCE_LIMIT}"
        )));
    }
    let member = Membership::new(curve, r, s, policy);
    let j_max = (r * curve.l() / s * (1.0 + 1e-6)).ceil() as u64 + 1;
    let k_max = (r * s * curve.m() * (1.0 + 1e-6)).ceil() as u64 + 1;
    let start = if closed { 0 } else { 1 };
    let mut count = 0;
    for j in start..=j_max {
        for k in start..=k_max {
            if member.contains(j, k) {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityOutcome {
    Pass,
    Fail,
    /// The dilated curve passes (within tolerance) through a lattice point.
    Degenerate,
}

/// Both sides of the rectangle identity
/// `⌊L'⌋·⌊M'⌋ = N + Ñ + ⌈L̃⌉ + ⌈M̃⌉ − 1` for `L' = rL/s`, `M' = rsM`.
#[derive(Debug, Clone, Serialize)]
pub struct ComplementReport {
    pub outcome: IdentityOutcome,
    pub width: u64,
    pub height: u64,
    pub interior: u64,
    pub complement: u64,
    pub l_tilde: f64,
    pub m_tilde: f64,
    pub lhs: u64,
    pub rhs: i64,
    pub incidence: Option<LatticePoint>,
}

/// Checks the complementary-rectangle counting identity for `rΓ(s)`.
///
/// `Ñ` counts the positive-integer points under the complementary curve
/// (origin moved to `(⌊L'⌋, ⌊M'⌋)`, axes reversed), i.e. the points of
/// `[0, ⌊L'⌋−1] × [0, ⌊M'⌋−1]` strictly above `rΓ(s)`. The identity needs the
/// corner `(⌊L'⌋, ⌊M'⌋)` strictly above the curve and both floors positive;
/// otherwise the check is not applicable.
pub fn complement_identity_check(
    curve: &CurveModel,
    r: f64,
    s: f64,
    policy: MembershipPolicy,
) -> Result<ComplementReport> {
    check_rs(r, s)?;
    let member = Membership::new(curve, r, s, policy);
    let l_rs = r * curve.l() / s;
    let m_rs = r * s * curve.m();
    let width = l_rs.floor() as u64;
    let height = m_rs.floor() as u64;
    if width == 0 || height == 0 {
        return Err(Error::NotApplicable(format!(
            "the rectangle [0, {width}] x [0, {height}] holds no positive lattice point"
        )));
    }
    if member.contains(width, height) {
        return Err(Error::NotApplicable(format!(
            "the corner ({width}, {height}) lies inside the curve"
        )));
    }

    let f_rs = |x: f64| r * s * curve.f(s * x / r);
    let g_rs = |y: f64| r / s * curve.g(y / (r * s));
    let l_tilde = width as f64 - g_rs(height as f64);
    let m_tilde = height as f64 - f_rs(width as f64);

    let incidence_tol = policy.tol_rel.max(1e-12);
    let incidence = find_incidence(&member, member.x_axis() + 1, incidence_tol);

    let interior = member.interior_sum(member.x_axis());
    let mut complement = 0u64;
    for j in 0..width {
        let inside = member.column_height(j).map_or(0, |h| (h + 1).min(height));
        complement += height - inside;
    }
    let lhs = width * height;
    let rhs = interior as i64 + complement as i64 + l_tilde.ceil() as i64 + m_tilde.ceil() as i64 - 1;
    let outcome = if incidence.is_some() {
        IdentityOutcome::Degenerate
    } else if lhs as i64 == rhs {
        IdentityOutcome::Pass
    } else {
        IdentityOutcome::Fail
    };
    Ok(ComplementReport {
        outcome,
        width,
        height,
        interior,
        complement,
        l_tilde,
        m_tilde,
        lhs,
        rhs,
        incidence,
    })
}

/// First lattice point `(j, k)` with `j ≤ columns` lying on the curve within
/// relative tolerance `tol`.
pub(crate) fn find_incidence(member: &Membership<'_>, columns: u64, tol: f64) -> Option<LatticePoint> {
    for j in 0..=columns {
        let base = member.column_height(j).unwrap_or(0);
        for k in [base, base + 1] {
            if member.near_curve(j, k, tol) {
                return Some(LatticePoint { j, k });
            }
        }
    }
    None
}

/// Lattice point of `rΓ(s)` (axes included) lying on the curve within the
/// policy tolerance, if any.
pub fn lattice_incidence(
    curve: &CurveModel,
    r: f64,
    s: f64,
    policy: MembershipPolicy,
) -> Result<Option<LatticePoint>> {
    check_rs(r, s)?;
    let member = Membership::new(curve, r, s, policy);
    Ok(find_incidence(&member, member.x_axis() + 1, policy.tol_rel.max(1e-12)))
}
