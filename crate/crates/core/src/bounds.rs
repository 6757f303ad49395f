//! Explicit inequalities as checkable certificates.
//!
//! - [`upper_bound_interior`]: `N(r,s) ≤ r²·Area − ½·f(L/2)·r·s` for `r ≥ 2s/L`.
//! - [`lower_bound_closed`]: `𝒩(r,s) ≥ r²·Area + ½·M·r·s`.
//! - [`two_term_budget`] / [`two_term_budget_unscaled`]: the remainder estimate
//!   for `|N − r²·Area + r(L/s + sM)/2|`, term by term.
//! - [`bracket_basic`] / [`bracket_improved`]: intervals of `s` that must
//!   contain every maximizer of `N(r, ·)` once `r` is large enough.
//! - [`square_completion`]: `s + 1/s ≤ 2 + t ⇒ |s − 1| ≤ 3√t`.

use serde::Serialize;

use crate::counting::{check_rs, count_interior, lattice_incidence, MembershipPolicy};
use crate::curve::{curvature_integral, CurveModel};
use crate::error::{Error, Result};

/// Upper bound on `N(r, s)`, valid whenever `r ≥ 2s/L`.
pub fn upper_bound_interior(curve: &CurveModel, r: f64, s: f64) -> Result<f64> {
    check_rs(r, s)?;
    let threshold = 2.0 * s / curve.l();
    if r < threshold {
        return Err(Error::NotApplicable(format!(
            "the upper bound needs r >= 2s/L = {threshold}, got r = {r}"
        )));
    }
    Ok(r * r * curve.area() - 0.5 * curve.f(0.5 * curve.l()) * r * s)
}

/// Lower bound on `𝒩(r, s)`, valid for all `r, s > 0`.
pub fn lower_bound_closed(curve: &CurveModel, r: f64, s: f64) -> Result<f64> {
    check_rs(r, s)?;
    Ok(r * r * curve.area() + 0.5 * curve.m() * r * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetTerm {
    pub name: &'static str,
    pub value: f64,
}

/// The remainder estimate evaluated term by term.
#[derive(Debug, Clone, Serialize)]
pub struct RemainderBudget {
    pub count: u64,
    pub lhs: f64,
    pub terms: Vec<BudgetTerm>,
    pub rhs: f64,
    pub slack: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// `δ(r)` or `ε(r)` was capped below its raw value.
    pub cutoff_clamped: bool,
}

impl RemainderBudget {
    fn assemble(count: u64, lhs: f64, terms: Vec<BudgetTerm>, delta: f64, epsilon: f64, clamped: bool) -> Self {
        let rhs = terms.iter().map(|t| t.value).sum::<f64>();
        RemainderBudget {
            count,
            lhs,
            rhs,
            slack: rhs - lhs,
            terms,
            delta,
            epsilon,
            cutoff_clamped: clamped,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

/// Curve-only ingredients of the remainder estimate, computed once.
#[derive(Debug, Clone)]
pub struct BudgetEvaluator<'a> {
    curve: &'a CurveModel,
    curvature: (f64, f64),
    /// `Σ_{i<m} f''(αᵢ)^{-1/2}` and `Σ_{i<n} g''(βᵢ)^{-1/2}`.
    inv_sqrt_curvature: (f64, f64),
    /// `Σ_{i<m} |f'(αᵢ)|` and `Σ_{i<n} |g'(βᵢ)|`.
    slopes: (f64, f64),
    pieces: usize,
}

impl<'a> BudgetEvaluator<'a> {
    pub fn new(curve: &'a CurveModel) -> Result<Self> {
        let h = curve.hypothesis()?;
        let curvature = curvature_integral(curve)?;
        let alphas = &h.alpha_partition[..h.m()];
        let betas = &h.beta_partition[..h.n()];
        let inv_sqrt = |v: f64| {
            if v > 0.0 {
                Ok(v.sqrt().recip())
            } else {
                Err(Error::HypothesisViolated(format!(
                    "second derivative {v} at a partition point is not positive"
                )))
            }
        };
        let mut inv_f = 0.0;
        let mut slope_f = 0.0;
        for &a in alphas {
            inv_f += inv_sqrt(curve.f2(a))?;
            slope_f += curve.f1(a).abs();
        }
        let mut inv_g = 0.0;
        let mut slope_g = 0.0;
        for &b in betas {
            inv_g += inv_sqrt(curve.g2(b))?;
            slope_g += curve.g1(b).abs();
        }
        Ok(Self {
            curve,
            curvature,
            inv_sqrt_curvature: (inv_f, inv_g),
            slopes: (slope_f, slope_g),
            pieces: h.m() + h.n(),
        })
    }

    pub fn curvature(&self) -> (f64, f64) {
        self.curvature
    }

    /// The estimate for `N(r, s)` on `rΓ(s)`, valid when `rL/s ≥ 1` and `rsM ≥ 1`.
    pub fn scaled(&self, r: f64, s: f64, policy: MembershipPolicy) -> Result<RemainderBudget> {
        check_rs(r, s)?;
        let curve = self.curve;
        let (l, m) = (curve.l(), curve.m());
        if r * l / s < 1.0 || r * s * m < 1.0 {
            return Err(Error::NotApplicable(format!(
                "needs rL/s >= 1 and rsM >= 1, got {} and {}",
                r * l / s,
                r * s * m
            )));
        }
        let h = curve.hypothesis()?;
        let raw_delta = (h.delta_fn)(r);
        let raw_eps = (h.epsilon_fn)(r);
        let delta = raw_delta;
        let epsilon = raw_eps;
        if !(delta > 0.0 && delta < l / 2.0 - h.alpha && epsilon > 0.0 && epsilon < m / 2.0 - h.beta) {
            return Err(Error::HypothesisViolated(format!(
                "cut-offs out of range: δ = {delta}, ε = {epsilon}"
            )));
        }
        let clamped = cutoff_is_clamped(curve, r);

        let count = count_interior(curve, r, s, policy)?;
        let lhs = (count as f64 - r * r * curve.area() + 0.5 * r * (l / s + s * m)).abs();

        let s32 = s.powf(1.5);
        let rt = r.sqrt();
        let f2_end = positive(curve.f2(l - delta), "f''(L − δ)")?;
        let g2_end = positive(curve.g2(m - epsilon), "g''(M − ε)")?;
        let terms = vec![
            BudgetTerm {
                name: "curvature-integral",
                value: 6.0 * r.powf(2.0 / 3.0) * (self.curvature.0 + self.curvature.1),
            },
            BudgetTerm {
                name: "endpoint-curvature",
                value: 175.0 * rt * (1.0 / (s32 * f2_end.sqrt()) + s32 / g2_end.sqrt()),
            },
            BudgetTerm {
                name: "partition-curvature",
                value: 525.0 * rt * (self.inv_sqrt_curvature.0 / s32 + s32 * self.inv_sqrt_curvature.1),
            },
            BudgetTerm {
                name: "partition-slope",
                value: 0.25 * (s * s * self.slopes.0 + self.slopes.1 / (s * s)),
            },
            BudgetTerm {
                name: "cutoff",
                value: 0.5 * r * (delta / s + s * epsilon),
            },
            BudgetTerm {
                name: "piece-count",
                value: 3.0 * self.pieces as f64 + 5.0,
            },
            BudgetTerm {
                name: "aspect",
                value: l / (m * s * s) + s * s * m / l,
            },
        ];
        Ok(RemainderBudget::assemble(count, lhs, terms, delta, epsilon, clamped))
    }

    /// The estimate for the curve itself with explicit cut-offs `δ`, `ε`:
    /// bounds `|N − Area + (L + M)/2|` where `N` counts positive-integer
    /// points under the curve. The curve must avoid every lattice point.
    pub fn unscaled(&self, delta: f64, epsilon: f64, policy: MembershipPolicy) -> Result<RemainderBudget> {
        let curve = self.curve;
        let h = curve.hypothesis()?;
        let (l, m) = (curve.l(), curve.m());
        let (lf, mf) = (l.floor(), m.floor());
        if !(h.alpha < lf && h.beta < mf) {
            return Err(Error::NotApplicable(format!(
                "needs alpha < floor(L) and beta < floor(M), got alpha = {}, beta = {}, L = {l}, M = {m}",
                h.alpha, h.beta
            )));
        }
        if !(delta > 0.0 && delta < lf - h.alpha && epsilon > 0.0 && epsilon < mf - h.beta) {
            return Err(Error::NotApplicable(format!(
                "needs 0 < δ < floor(L) − α and 0 < ε < floor(M) − β, got δ = {delta}, ε = {epsilon}"
            )));
        }
        if let Some(pt) = lattice_incidence(curve, 1.0, 1.0, policy)? {
            return Err(Error::Degenerate(format!(
                "the curve passes through the lattice point ({}, {})",
                pt.j, pt.k
            )));
        }
        let count = count_interior(curve, 1.0, 1.0, policy)?;
        let lhs = (count as f64 - curve.area() + 0.5 * (l + m)).abs();
        let f2_end = positive(curve.f2(l - delta), "f''(L − δ)")?;
        let g2_end = positive(curve.g2(m - epsilon), "g''(M − ε)")?;
        let terms = vec![
            BudgetTerm {
                name: "curvature-integral",
                value: 6.0 * (self.curvature.0 + self.curvature.1),
            },
            BudgetTerm {
                name: "endpoint-curvature",
                value: 175.0 * (1.0 / f2_end.sqrt() + 1.0 / g2_end.sqrt()),
            },
            BudgetTerm {
                name: "partition-curvature",
                value: 525.0 * (self.inv_sqrt_curvature.0 + self.inv_sqrt_curvature.1),
            },
            BudgetTerm {
                name: "partition-slope",
                value: 0.25 * (self.slopes.0 + self.slopes.1),
            },
            BudgetTerm {
                name: "cutoff",
                value: 0.5 * (delta + epsilon),
            },
            BudgetTerm {
                name: "piece-count",
                value: 3.0 * self.pieces as f64 + 5.0,
            },
            BudgetTerm {
                name: "aspect",
                value: l / m + m / l,
            },
        ];
        Ok(RemainderBudget::assemble(count, lhs, terms, delta, epsilon, false))
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::HypothesisViolated(format!("{what} = {v} is not positive")))
    }
}

fn cutoff_is_clamped(curve: &CurveModel, r: f64) -> bool {
    match curve.kind() {
        crate::curve::CurveKind::PEllipse { p, .. } => {
            curve.hypothesis().map(|h| (h.delta_fn)(r) < r.powf(-p)).unwrap_or(false)
        }
        crate::curve::CurveKind::Custom => false,
    }
}

/// Remainder estimate for `N(r, s)`, requires `rL/s ≥ 1` and `rsM ≥ 1`.
pub fn two_term_budget(
    curve: &CurveModel,
    r: f64,
    s: f64,
    policy: MembershipPolicy,
) -> Result<RemainderBudget> {
    BudgetEvaluator::new(curve)?.scaled(r, s, policy)
}

/// Remainder estimate for the curve itself with fixed cut-offs.
pub fn two_term_budget_unscaled(
    curve: &CurveModel,
    delta: f64,
    epsilon: f64,
    policy: MembershipPolicy,
) -> Result<RemainderBudget> {
    BudgetEvaluator::new(curve)?.unscaled(delta, epsilon, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketKind {
    Basic,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StretchBracket {
    pub lo: f64,
    pub hi: f64,
    pub kind: BracketKind,
    /// Smallest `r` at which the bracket is guaranteed.
    pub validity_threshold: f64,
}

impl StretchBracket {
    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }
}

const GOLDEN_TOL: f64 = 1e-10;

/// Golden-section search for a maximum of `h` on `[a, b]`.
fn golden_max<H: Fn(f64) -> f64>(h: H, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    while (b - a).abs() > GOLDEN_TOL * (1.0 + a.abs().max(b.abs())) {
        if hc >= hd {
            b = d;
            d = c;
            hd = hc;
            c = b - inv_phi * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + inv_phi * (b - a);
            hd = h(d);
        }
    }
    let mut best = (0.5 * (a + b), h(0.5 * (a + b)));
    for x in [a, b, c, d] {
        let v = h(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Grid scan followed by golden-section refinement around the best cell.
fn refined_max<H: Fn(f64) -> f64>(h: H, a: f64, b: f64, cells: usize) -> (f64, f64) {
    let xs: Vec<f64> = (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect();
    let (best_i, _) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, h(x)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let lo = xs[best_i.saturating_sub(1)];
    let hi = xs[(best_i + 1).min(cells)];
    let grid_best = (xs[best_i], h(xs[best_i]));
    let refined = golden_max(&h, lo, hi);
    if refined.1 >= grid_best.1 {
        refined
    } else {
        grid_best
    }
}

/// `max_Γ x·y` and the maximizing `x`.
pub fn max_xy(curve: &CurveModel) -> (f64, f64) {
    let (x, v) = refined_max(|x| x * curve.f(x), 0.0, curve.l(), 1000);
    (v, x)
}

/// `δ₁ = min_{L/2 ≤ x ≤ L} (f(x/2) − f(x))` and `δ₂` likewise for `g`.
pub fn bracket_deltas(curve: &CurveModel) -> (f64, f64) {
    let (l, m) = (curve.l(), curve.m());
    let d1 = -refined_max(|x| -(curve.f(0.5 * x) - curve.f(x)), 0.5 * l, l, 10_000).1;
    let d2 = -refined_max(|y| -(curve.g(0.5 * y) - curve.g(y)), 0.5 * m, m, 10_000).1;
    (d1, d2)
}

/// `C = max(√(8/(L·δ₁)), √(8/(M·δ₂)))`.
pub fn improved_threshold(curve: &CurveModel) -> f64 {
    let (d1, d2) = bracket_deltas(curve);
    (8.0 / (curve.l() * d1)).sqrt().max((8.0 / (curve.m() * d2)).sqrt())
}

/// `[(rM)⁻¹, rL]`, valid once `r² ≥ 1/max_Γ xy`.
pub fn bracket_basic(curve: &CurveModel, r: f64) -> Result<StretchBracket> {
    check_rs(r, 1.0)?;
    let threshold = max_xy(curve).0.recip().sqrt();
    if r < threshold {
        return Err(Error::BracketNotValid { r, threshold });
    }
    Ok(StretchBracket {
        lo: 1.0 / (r * curve.m()),
        hi: r * curve.l(),
        kind: BracketKind::Basic,
        validity_threshold: threshold,
    })
}

/// `[2(rM)⁻¹, rL/2]`, valid once `r ≥ C`.
pub fn bracket_improved(curve: &CurveModel, r: f64) -> Result<StretchBracket> {
    check_rs(r, 1.0)?;
    let threshold = improved_threshold(curve);
    if r < threshold {
        return Err(Error::BracketNotValid { r, threshold });
    }
    Ok(StretchBracket {
        lo: 2.0 / (r * curve.m()),
        hi: 0.5 * r * curve.l(),
        kind: BracketKind::Improved,
        validity_threshold: threshold,
    })
}

/// Returns whether `s + 1/s ≤ 2 + t` holds, and the bound `3√t` on `|s − 1|`
/// that the premise implies.
pub fn square_completion(s: f64, t: f64) -> Result<(bool, f64)> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("t must lie in (0, 1), got {t}")));
    }
    Ok((s + 1.0 / s <= 2.0 + t, 3.0 * t.sqrt()))
}
