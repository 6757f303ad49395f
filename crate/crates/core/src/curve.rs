//! Convex decreasing curves in the first quadrant.
//!
//! A [`CurveModel`] bundles the graph `f` of the curve, its inverse `g`, the
//! first two derivatives of both, the enclosed area and (optionally) the
//! convexity hypothesis data used by the remainder estimates: a point
//! `(α, β)` on the curve, partitions on which the second derivatives are
//! monotonic, the cut-off functions `δ(r)`, `ε(r)` and the decay exponents.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_singular_right, QuadConfig};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Decay exponents `a1, a2, b1, b2` of the hypothesis data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Exponents {
    /// `e = min(1/6, a1, a2, b1, b2)`.
    pub fn e(&self) -> f64 {
        [1.0 / 6.0, self.a1, self.a2, self.b1, self.b2]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone)]
pub struct ConvexHypothesis {
    pub alpha: f64,
    pub beta: f64,
    /// `α = α₀ < α₁ < … < α_m = L`.
    pub alpha_partition: Vec<f64>,
    /// `β = β₀ < β₁ < … < β_n = M`.
    pub beta_partition: Vec<f64>,
    pub delta_fn: RealFn,
    pub epsilon_fn: RealFn,
    pub exponents: Exponents,
}

impl ConvexHypothesis {
    /// Number of subintervals `m` of the α-partition.
    pub fn m(&self) -> usize {
        self.alpha_partition.len().saturating_sub(1)
    }

    /// Number of subintervals `n` of the β-partition.
    pub fn n(&self) -> usize {
        self.beta_partition.len().saturating_sub(1)
    }
}

impl fmt::Debug for ConvexHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexHypothesis")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("alpha_partition", &self.alpha_partition)
            .field("beta_partition", &self.beta_partition)
            .field("exponents", &self.exponents)
            .finish_non_exhaustive()
    }
}

/// Which closed forms, if any, back the curve.
///
/// A p-ellipse carries its own dilation so that `radius·Γ(stretch)` of the
/// unit p-circle can be tested through the implicit equation
/// `(x·stretch)ᵖ + (y/stretch)ᵖ ≤ radiusᵖ` instead of through `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    PEllipse { p: f64, radius: f64, stretch: f64 },
    Custom,
}

/// User-supplied curve data for [`CurveModel::custom`].
#[derive(Clone)]
pub struct CustomCurve {
    pub l: f64,
    pub m: f64,
    pub f: RealFn,
    pub g: RealFn,
    pub f1: RealFn,
    pub f2: RealFn,
    pub g1: RealFn,
    pub g2: RealFn,
    pub hypothesis: Option<ConvexHypothesis>,
}

#[derive(Clone)]
pub struct CurveModel {
    l: f64,
    m: f64,
    f: RealFn,
    g: RealFn,
    f1: RealFn,
    f2: RealFn,
    g1: RealFn,
    g2: RealFn,
    area: f64,
    hypothesis: Option<ConvexHypothesis>,
    kind: CurveKind,
}

impl fmt::Debug for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveModel")
            .field("l", &self.l)
            .field("m", &self.m)
            .field("area", &self.area)
            .field("kind", &self.kind)
            .field("hypothesis", &self.hypothesis)
            .finish_non_exhaustive()
    }
}

impl CurveModel {
    /// Builds a curve from user-supplied callables and checks the sampled
    /// invariants (intercepts, monotonicity, inverse roundtrip, derivative
    /// signs and partition monotonicity when hypothesis data is present).
    pub fn custom(data: CustomCurve) -> Result<Self> {
        if !(data.l > 0.0 && data.l.is_finite() && data.m > 0.0 && data.m.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "intercepts must be positive and finite, got L = {}, M = {}",
                data.l, data.m
            )));
        }
        let mut curve = CurveModel {
            l: data.l,
            m: data.m,
            f: data.f,
            g: data.g,
            f1: data.f1,
            f2: data.f2,
            g1: data.g1,
            g2: data.g2,
            area: 0.0,
            hypothesis: data.hypothesis,
            kind: CurveKind::Custom,
        };
        curve.area = area_of_curve(&curve)?;
        curve.validate()?;
        Ok(curve)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// `f(x)`, clamped to the intercepts outside `[0, L]`.
    pub fn f(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.m
        } else if x >= self.l {
            0.0
        } else {
            (self.f)(x)
        }
    }

    /// `g(y)`, clamped to the intercepts outside `[0, M]`.
    pub fn g(&self, y: f64) -> f64 {
        if y <= 0.0 {
            self.l
        } else if y >= self.m {
            0.0
        } else {
            (self.g)(y)
        }
    }

    pub fn f1(&self, x: f64) -> f64 {
        (self.f1)(x)
    }

    pub fn f2(&self, x: f64) -> f64 {
        (self.f2)(x)
    }

    pub fn g1(&self, y: f64) -> f64 {
        (self.g1)(y)
    }

    pub fn g2(&self, y: f64) -> f64 {
        (self.g2)(y)
    }

    /// The convexity hypothesis data, when the curve has it.
    pub fn hypothesis(&self) -> Result<&ConvexHypothesis> {
        self.hypothesis.as_ref().ok_or_else(|| match self.kind {
            CurveKind::PEllipse { p, .. } => Error::HypothesisUnavailable(format!(
                "the p-ellipse with p = {p} is not strictly convex (needs 0 < p < 1)"
            )),
            CurveKind::Custom => {
                Error::HypothesisUnavailable("custom curve built without hypothesis data".into())
            }
        })
    }

    /// The curve `rΓ(s)`: the graph of `x ↦ r·s·f(s·x/r)`, with every
    /// derivative, the area and the hypothesis data rescaled to match.
    ///
    /// Hypothesis cut-offs become constants: `δ ↦ r·δ(r)/s`, `ε ↦ r·s·ε(r)`.
    pub fn dilate(&self, r: f64, s: f64) -> Result<CurveModel> {
        if !(r > 0.0 && r.is_finite() && s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation needs r > 0 and s > 0, got r = {r}, s = {s}"
            )));
        }
        let (f, g, f1, f2, g1, g2) = (
            self.f.clone(),
            self.g.clone(),
            self.f1.clone(),
            self.f2.clone(),
            self.g1.clone(),
            self.g2.clone(),
        );
        let (l, m) = (self.l, self.m);
        let fx: RealFn = Arc::new(move |x| {
            let u = s * x / r;
            if u <= 0.0 {
                r * s * m
            } else if u >= l {
                0.0
            } else {
                r * s * f(u)
            }
        });
        let gy: RealFn = Arc::new(move |y| {
            let v = y / (r * s);
            if v <= 0.0 {
                r * l / s
            } else if v >= m {
                0.0
            } else {
                r / s * g(v)
            }
        });
        let f1x: RealFn = Arc::new(move |x| s * s * f1(s * x / r));
        let f2x: RealFn = Arc::new(move |x| s * s * s / r * f2(s * x / r));
        let g1y: RealFn = Arc::new(move |y| g1(y / (r * s)) / (s * s));
        let g2y: RealFn = Arc::new(move |y| g2(y / (r * s)) / (r * s * s * s));

        let hypothesis = self.hypothesis.as_ref().map(|h| {
            let delta = r * (h.delta_fn)(r) / s;
            let epsilon = r * s * (h.epsilon_fn)(r);
            ConvexHypothesis {
                alpha: r * h.alpha / s,
                beta: r * s * h.beta,
                alpha_partition: h.alpha_partition.iter().map(|a| r * a / s).collect(),
                beta_partition: h.beta_partition.iter().map(|b| r * s * b).collect(),
                delta_fn: Arc::new(move |_| delta),
                epsilon_fn: Arc::new(move |_| epsilon),
                exponents: h.exponents,
            }
        });
        let kind = match self.kind {
            CurveKind::PEllipse { p, radius, stretch } => CurveKind::PEllipse {
                p,
                radius: radius * r,
                stretch: stretch * s,
            },
            CurveKind::Custom => CurveKind::Custom,
        };
        Ok(CurveModel {
            l: r * l / s,
            m: r * s * m,
            f: fx,
            g: gy,
            f1: f1x,
            f2: f2x,
            g1: g1y,
            g2: g2y,
            area: r * r * self.area,
            hypothesis,
            kind,
        })
    }

    /// Checks the sampled invariants on a 1000-point grid.
    pub fn validate(&self) -> Result<()> {
        const GRID: usize = 1000;
        let (l, m) = (self.l, self.m);
        let at0 = (self.f)(0.0);
        let at_l = (self.f)(l);
        if (at0 - m).abs() > 1e-9 * m || at_l.abs() > 1e-9 * m {
            return Err(Error::HypothesisViolated(format!(
                "intercepts mismatch: f(0) = {at0}, f(L) = {at_l}, expected {m} and 0"
            )));
        }
        let mut prev = f64::INFINITY;
        for i in 1..GRID {
            let x = l * i as f64 / GRID as f64;
            let y = (self.f)(x);
            if !(y < prev) {
                return Err(Error::HypothesisViolated(format!(
                    "f is not strictly decreasing near x = {x}"
                )));
            }
            prev = y;
            let back = (self.g)(y);
            if (back - x).abs() > 1e-9 * l {
                return Err(Error::HypothesisViolated(format!(
                    "g is not the inverse of f at x = {x}: g(f(x)) = {back}"
                )));
            }
        }

        let Some(h) = &self.hypothesis else {
            return Ok(());
        };
        if !(h.alpha > 0.0 && h.alpha < l / 2.0 && h.beta > 0.0 && h.beta < m / 2.0) {
            return Err(Error::HypothesisViolated(format!(
                "need 0 < alpha < L/2 and 0 < beta < M/2, got alpha = {}, beta = {}",
                h.alpha, h.beta
            )));
        }
        check_side(&*self.f1, &*self.f2, &h.alpha_partition, h.alpha, l, "f")?;
        check_side(&*self.g1, &*self.g2, &h.beta_partition, h.beta, m, "g")?;
        Ok(())
    }
}

fn check_side(
    d1: &(dyn Fn(f64) -> f64 + Send + Sync),
    d2: &(dyn Fn(f64) -> f64 + Send + Sync),
    partition: &[f64],
    start: f64,
    end: f64,
    name: &str,
) -> Result<()> {
    const GRID: usize = 1000;
    if partition.len() < 2
        || partition[0] != start
        || *partition.last().unwrap() != end
        || partition.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(Error::HypothesisViolated(format!(
            "{name}-partition must increase strictly from {start} to {end}"
        )));
    }
    for w in partition.windows(2) {
        let (a, b) = (w[0], w[1]);
        let samples: Vec<f64> = (0..GRID)
            .map(|i| a + (b - a) * (i as f64 + 0.5) / GRID as f64)
            .collect();
        let mut second = Vec::with_capacity(GRID);
        for &x in &samples {
            let (v1, v2) = (d1(x), d2(x));
            if !(v1 < 0.0) || !(v2 > 0.0) {
                return Err(Error::HypothesisViolated(format!(
                    "{name}' < 0 < {name}'' fails at {x}: ({v1}, {v2})"
                )));
            }
            second.push(v2);
        }
        let slack = |v: f64| 1e-12 * v.abs().max(1.0);
        let nondecreasing = second.windows(2).all(|p| p[1] >= p[0] - slack(p[0]));
        let nonincreasing = second.windows(2).all(|p| p[1] <= p[0] + slack(p[0]));
        if !(nondecreasing || nonincreasing) {
            return Err(Error::HypothesisViolated(format!(
                "{name}'' is not monotonic on ({a}, {b})"
            )));
        }
    }
    Ok(())
}

/// Parameters of the p-circle `|x|ᵖ + |y|ᵖ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PEllipseParams {
    pub p: f64,
}

impl PEllipseParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must be positive, got {p}")));
        }
        Ok(Self { p })
    }

    /// Convexity theory applies only for `0 < p < 1`.
    pub fn is_convex(&self) -> bool {
        self.p < 1.0
    }

    /// `α = β = 2^{-1/p}`, the point of the p-circle on the diagonal.
    pub fn alpha(&self) -> f64 {
        2f64.powf(-1.0 / self.p)
    }

    /// Zero of `f'''` in `(α, 1)` when `1/2 < p < 1`.
    pub fn alpha_1(&self) -> Option<f64> {
        let p = self.p;
        (p > 0.5 && p < 1.0).then(|| ((2.0 - p) / (1.0 + p)).powf(1.0 / p))
    }

    /// `e = min(1/6, p/2)`.
    pub fn e(&self) -> f64 {
        (1.0 / 6.0f64).min(self.p / 2.0)
    }
}

/// Fraction of `1/2 − α` that the cut-off `δ(r) = r^{-p}` may not exceed.
const CUTOFF_CAP: f64 = 0.999;

/// The unit p-circle `xᵖ + yᵖ = 1` in the first quadrant.
///
/// For `0 < p < 1` the curve also carries hypothesis data: `α = β = 2^{-1/p}`,
/// the partition `{α, 1}` (or `{α, α₁, 1}` when `p > 1/2`),
/// `δ(r) = ε(r) = r^{-p}` capped below `1/2 − α`, and `a1 = a2 = b1 = b2 = p/2`.
pub fn make_p_ellipse(p: f64) -> Result<CurveModel> {
    let params = PEllipseParams::new(p)?;
    let f: RealFn = Arc::new(move |x: f64| {
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            (1.0 - x.powf(p)).powf(1.0 / p)
        }
    });
    let f1: RealFn = Arc::new(move |x: f64| -x.powf(p - 1.0) * (1.0 - x.powf(p)).powf(1.0 / p - 1.0));
    let f2: RealFn =
        Arc::new(move |x: f64| (1.0 - p) * x.powf(p - 2.0) * (1.0 - x.powf(p)).powf(1.0 / p - 2.0));

    let hypothesis = params.is_convex().then(|| {
        let alpha = params.alpha();
        let mut partition = vec![alpha];
        partition.extend(params.alpha_1());
        partition.push(1.0);
        let cap = CUTOFF_CAP * (0.5 - alpha);
        let cutoff: RealFn = Arc::new(move |r: f64| r.powf(-p).min(cap));
        ConvexHypothesis {
            alpha,
            beta: alpha,
            alpha_partition: partition.clone(),
            beta_partition: partition,
            delta_fn: cutoff.clone(),
            epsilon_fn: cutoff,
            exponents: Exponents {
                a1: p / 2.0,
                a2: p / 2.0,
                b1: p / 2.0,
                b2: p / 2.0,
            },
        }
    });

    let mut curve = CurveModel {
        l: 1.0,
        m: 1.0,
        g: f.clone(),
        g1: f1.clone(),
        g2: f2.clone(),
        f,
        f1,
        f2,
        area: 0.0,
        hypothesis,
        kind: CurveKind::PEllipse {
            p,
            radius: 1.0,
            stretch: 1.0,
        },
    };
    // Keep the closed form so exact arithmetic like 81·(1/6) stays exact; the
    // quadrature guards it.
    let quad = area_of_curve(&curve)?;
    let closed = p_ellipse_area(p);
    if !(((quad - closed) / closed).abs() <= 1e-8) {
        return Err(Error::QuadratureNotConverged {
            panels: QuadConfig::default().max_panels,
            error: (quad - closed).abs(),
        });
    }
    curve.area = closed;
    Ok(curve)
}

/// `Γ(1 + 1/p)² / Γ(1 + 2/p)`, the area under the unit p-circle.
fn p_ellipse_area(p: f64) -> f64 {
    let (a, b) = (libm::tgamma(1.0 + 1.0 / p), libm::tgamma(1.0 + 2.0 / p));
    if a.is_finite() && b.is_finite() {
        a * a / b
    } else {
        (2.0 * libm::lgamma(1.0 + 1.0 / p) - libm::lgamma(1.0 + 2.0 / p)).exp()
    }
}

/// `Area(Γ) = ∫₀ᴸ f(x) dx`.
pub fn area_of_curve(curve: &CurveModel) -> Result<f64> {
    area_of_curve_with(curve, &QuadConfig::default())
}

pub fn area_of_curve_with(curve: &CurveModel, cfg: &QuadConfig) -> Result<f64> {
    let l = curve.l;
    let f = curve.f.clone();
    // Bisect at the midpoint first so the two possible endpoint features
    // (infinite slope at 0, flat contact at L) sit in separate panels.
    let left = integrate(|x| f(x), 0.0, 0.5 * l, cfg)?;
    let right = integrate(|x| f(x), 0.5 * l, l, cfg)?;
    Ok(left.value + right.value)
}

/// `(∫_α^L f''^{1/3} dx, ∫_β^M g''^{1/3} dy)`.
pub fn curvature_integral(curve: &CurveModel) -> Result<(f64, f64)> {
    curvature_integral_with(curve, &QuadConfig::default())
}

pub fn curvature_integral_with(curve: &CurveModel, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let h = curve.hypothesis()?;
    let fx = cube_root_integral(&*curve.f2, h.alpha, curve.l, cfg, "f")?;
    let gy = cube_root_integral(&*curve.g2, h.beta, curve.m, cfg, "g")?;
    Ok((fx, gy))
}

fn cube_root_integral(
    d2: &(dyn Fn(f64) -> f64 + Send + Sync),
    a: f64,
    b: f64,
    cfg: &QuadConfig,
    name: &str,
) -> Result<f64> {
    let negative = std::cell::Cell::new(None);
    let est = integrate_singular_right(
        |x| {
            let v = d2(x);
            if v < 0.0 {
                negative.set(Some(x));
                0.0
            } else {
                v.cbrt()
            }
        },
        a,
        b,
        cfg,
    )?;
    if let Some(x) = negative.get() {
        return Err(Error::HypothesisViolated(format!(
            "{name}'' is negative at {x}"
        )));
    }
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_area(p: f64) -> f64 {
        p_ellipse_area(p)
    }

    #[test]
    fn half_ellipse_closed_forms() {
        let c = make_p_ellipse(0.5).unwrap();
        let h = c.hypothesis().unwrap();
        assert_eq!(h.alpha, 0.25);
        assert_eq!((c.l(), c.m()), (1.0, 1.0));
        assert_eq!(h.exponents.e(), 1.0 / 6.0);
        assert_eq!(h.alpha_partition, vec![0.25, 1.0]);
        assert!((c.area() - 1.0 / 6.0).abs() < 1e-8 / 6.0);
    }

    #[test]
    fn three_quarter_partition_has_interior_point() {
        let c = make_p_ellipse(0.75).unwrap();
        let part = &c.hypothesis().unwrap().alpha_partition;
        assert_eq!(part.len(), 3);
        let expected = (1.25f64 / 1.75).powf(4.0 / 3.0);
        assert!((part[1] - expected).abs() < 1e-15);
        assert!((part[1] - 0.6385).abs() < 5e-5);
    }

    #[test]
    fn third_derivative_changes_sign_at_alpha_1() {
        let p = 0.75;
        let a1 = PEllipseParams::new(p).unwrap().alpha_1().unwrap();
        let f3 = |x: f64| {
            (1.0 - p) * x.powf(p - 3.0) * (1.0 - x.powf(p)).powf(1.0 / p - 3.0)
                * ((1.0 + p) * x.powf(p) + p - 2.0)
        };
        assert!(f3(a1 - 1e-6) < 0.0);
        assert!(f3(a1 + 1e-6) > 0.0);
    }

    #[test]
    fn areas_match_gamma_closed_form() {
        for p in [0.3, 0.4, 0.5, 0.75, 0.9, 1.0, 2.0, 3.0] {
            let c = make_p_ellipse(p).unwrap();
            let exact = gamma_area(p);
            let quad = area_of_curve(&c).unwrap();
            assert!(((quad - exact) / exact).abs() < 1e-8, "p = {p}: {quad} vs {exact}");
            assert_eq!(c.area(), exact);
        }
        assert!((make_p_ellipse(2.0).unwrap().area() - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
        assert!((make_p_ellipse(1.0).unwrap().area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_p() {
        assert!(make_p_ellipse(0.0).is_err());
        assert!(make_p_ellipse(-1.0).is_err());
        assert!(make_p_ellipse(f64::NAN).is_err());
    }

    #[test]
    fn no_hypothesis_for_p_at_least_one() {
        for p in [1.0, 2.0] {
            let c = make_p_ellipse(p).unwrap();
            assert!(matches!(c.hypothesis(), Err(Error::HypothesisUnavailable(_))));
            assert!(curvature_integral(&c).is_err());
        }
    }

    #[test]
    fn inverse_roundtrip_and_validation() {
        for p in [0.3, 0.5, 0.75, 0.9, 2.0] {
            let c = make_p_ellipse(p).unwrap();
            c.validate().unwrap();
            for i in 1..1000 {
                let x = i as f64 / 1000.0;
                assert!((c.g(c.f(x)) - x).abs() <= 1e-9, "p = {p}, x = {x}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for p in [0.3, 0.5, 0.75, 0.9] {
            let c = make_p_ellipse(p).unwrap();
            for i in 1..50 {
                let x = 0.1 + 0.8 * i as f64 / 50.0;
                let h = 1e-6;
                let d1 = (c.f(x + h) - c.f(x - h)) / (2.0 * h);
                let d2 = (c.f1(x + h) - c.f1(x - h)) / (2.0 * h);
                assert!(((d1 - c.f1(x)) / c.f1(x)).abs() < 1e-5, "p={p} x={x}");
                assert!(((d2 - c.f2(x)) / c.f2(x)).abs() < 1e-4, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn sign_facts_on_dense_grid() {
        for p in [0.3, 0.5, 0.75, 0.9] {
            let c = make_p_ellipse(p).unwrap();
            let alpha = c.hypothesis().unwrap().alpha;
            for i in 0..10_000 {
                let x = alpha + (1.0 - alpha) * (i as f64 + 0.5) / 10_000.0;
                assert!(c.f1(x) < 0.0 && c.f2(x) > 0.0, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn cutoff_is_clamped_into_open_interval() {
        for p in [0.3, 0.5, 0.75] {
            let c = make_p_ellipse(p).unwrap();
            let h = c.hypothesis().unwrap();
            for r in [1e-3, 0.5, 1.0, 10.0, 1e6] {
                let d = (h.delta_fn)(r);
                assert!(d > 0.0 && d < 0.5 - h.alpha, "p={p} r={r} d={d}");
            }
        }
    }

    #[test]
    fn hypothesis_decay_rate() {
        // 1/f''(1 − δ(r)) = O(r^{1−2p}); K frozen from a one-off run
        // (largest ratio ≈ 9.09, at p = 0.9, r = 1000).
        const K: f64 = 10.0;
        for p in [0.3, 0.5, 0.75, 0.9] {
            let c = make_p_ellipse(p).unwrap();
            let h = c.hypothesis().unwrap();
            for r in [10.0, 100.0, 1000.0] {
                let d = (h.delta_fn)(r);
                let ratio = 1.0 / c.f2(1.0 - d) / r.powf(1.0 - 2.0 * p);
                assert!(ratio <= K, "p={p} r={r} ratio={ratio}");
            }
        }
    }

    #[test]
    fn curvature_integral_is_symmetric_and_bounded() {
        for p in [0.4, 0.5, 0.75] {
            let c = make_p_ellipse(p).unwrap();
            let (a, b) = curvature_integral(&c).unwrap();
            assert!(a > 0.0 && a.is_finite());
            assert!((a - b).abs() < 1e-6);
            let h = c.hypothesis().unwrap();
            let holder = (1.0 - h.alpha).powf(2.0 / 3.0) * (-c.f1(h.alpha)).cbrt();
            assert!(a <= holder * (1.0 + 1e-9), "p={p}: {a} > {holder}");
        }
    }

    #[test]
    fn curvature_integral_self_convergence() {
        let c = make_p_ellipse(0.5).unwrap();
        let coarse = QuadConfig {
            rel_tol: 1e-8,
            ..QuadConfig::default()
        };
        let fine = QuadConfig {
            rel_tol: 1e-13,
            ..QuadConfig::default()
        };
        let (a, _) = curvature_integral_with(&c, &coarse).unwrap();
        let (b, _) = curvature_integral_with(&c, &fine).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn custom_curve_roundtrip_through_validation() {
        // Hyperbola-like convex curve y = (1 − x)² on [0, 1].
        let curve = CurveModel::custom(CustomCurve {
            l: 1.0,
            m: 1.0,
            f: Arc::new(|x| (1.0 - x) * (1.0 - x)),
            g: Arc::new(|y: f64| 1.0 - y.sqrt()),
            f1: Arc::new(|x| -2.0 * (1.0 - x)),
            f2: Arc::new(|_| 2.0),
            g1: Arc::new(|y: f64| -0.5 / y.sqrt()),
            g2: Arc::new(|y: f64| 0.25 * y.powf(-1.5)),
            hypothesis: None,
        })
        .unwrap();
        assert!((curve.area() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn custom_curve_rejects_wrong_inverse() {
        let res = CurveModel::custom(CustomCurve {
            l: 1.0,
            m: 1.0,
            f: Arc::new(|x| (1.0 - x) * (1.0 - x)),
            g: Arc::new(|y: f64| 1.0 - y),
            f1: Arc::new(|x| -2.0 * (1.0 - x)),
            f2: Arc::new(|_| 2.0),
            g1: Arc::new(|_| -1.0),
            g2: Arc::new(|_| 0.0),
            hypothesis: None,
        });
        assert!(matches!(res, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn dilation_rescales_intercepts_area_and_derivatives() {
        let c = make_p_ellipse(0.5).unwrap();
        let d = c.dilate(9.0, 2.0).unwrap();
        assert_eq!((d.l(), d.m()), (4.5, 18.0));
        assert!((d.area() - 81.0 * c.area()).abs() < 1e-12);
        let x = 1.3;
        assert!((d.f(x) - 18.0 * c.f(2.0 * x / 9.0)).abs() < 1e-12);
        assert!((d.g(d.f(x)) - x).abs() < 1e-9);
        let h = 1e-5;
        let fd = (d.f1(x + h) - d.f1(x - h)) / (2.0 * h);
        assert!(((fd - d.f2(x)) / d.f2(x)).abs() < 1e-5);
        assert_eq!(
            d.kind(),
            CurveKind::PEllipse {
                p: 0.5,
                radius: 9.0,
                stretch: 2.0
            }
        );
    }
}
