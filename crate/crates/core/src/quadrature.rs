//! Adaptive Gauss–Kronrod quadrature.
//!
//! [`integrate`] bisects the panel with the largest error estimate until the
//! total estimate meets the tolerance. [`integrate_singular_right`] handles
//! integrands that blow up (integrably) at the right endpoint by cutting the
//! interval into geometrically shrinking panels toward it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panels alive at once before giving up.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_panels: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` by adaptive bisection of 15-point panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidArgument(format!(
            "integration limits must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }

    let first = gauss_kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut total_err = first.error;
    // Panels too narrow to split keep contributing but leave the heap.
    let mut settled_value = 0.0;
    let mut settled_err = 0.0;
    heap.push(first);

    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            settled_value += worst.value;
            settled_err += worst.error;
            continue;
        }
        if heap.len() + 2 > cfg.max_panels {
            return Err(Error::QuadratureNotConverged {
                panels: heap.len() + 1,
                error: total_err,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from scratch so the running updates leave no drift behind.
    let panels = heap.len();
    let mut value = settled_value;
    let mut error = settled_err;
    for panel in heap.into_iter() {
        value += panel.value;
        error += panel.error;
    }
    if !value.is_finite() {
        return Err(Error::QuadratureNotConverged {
            panels,
            error: f64::INFINITY,
        });
    }
    Ok(Estimate {
        value,
        error,
        panels,
    })
}

/// Integrates `f` over `[a, b]` when `f` may blow up at `b`.
///
/// The interval is cut at `b - h`, `b - h/2`, `b - h/4`, … and each piece is
/// integrated with [`integrate`]. Splitting stops once three consecutive
/// pieces contribute less than the relative tolerance or the pieces reach
/// floating-point resolution at `b`.
pub fn integrate_singular_right<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidArgument(format!(
            "integration limits must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let min_width = 4.0 * f64::EPSILON * b.abs().max(1.0);
    let mut h = 0.5 * (b - a);
    let bulk = integrate(&f, a, b - h, cfg)?;
    let mut value = bulk.value;
    let mut error = bulk.error;
    let mut panels = bulk.panels;
    let mut quiet = 0;
    let mut last = 0.0_f64;

    while h > min_width {
        let lo = b - h;
        let hi = b - 0.5 * h;
        // Pieces near `b` only need accuracy relative to the whole integral.
        let piece_cfg = QuadConfig {
            abs_tol: cfg.abs_tol.max(0.01 * cfg.rel_tol * value.abs()),
            ..*cfg
        };
        let piece = integrate(&f, lo, hi, &piece_cfg)?;
        value += piece.value;
        error += piece.error;
        panels += piece.panels;
        last = piece.value.abs();
        if last <= cfg.rel_tol * value.abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        h *= 0.5;
    }
    // The skipped tail is of the order of the last piece.
    error += last;
    if !value.is_finite() {
        return Err(Error::QuadratureNotConverged {
            panels,
            error: f64::INFINITY,
        });
    }
    Ok(Estimate {
        value,
        error,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((est.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint() {
        let est = integrate(f64::sqrt, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_cube_root_blowup() {
        // ∫_0^1 (1 - x)^{-1/3} dx = 3/2
        let est =
            integrate_singular_right(|x| (1.0 - x).powf(-1.0 / 3.0), 0.0, 1.0, &QuadConfig::default())
                .unwrap();
        assert!((est.value - 1.5).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadConfig {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_panels: 3,
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn rejects_reversed_limits() {
        assert!(integrate(|x| x, 1.0, 0.0, &QuadConfig::default()).is_err());
    }
}
