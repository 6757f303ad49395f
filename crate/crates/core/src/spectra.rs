//! Dirichlet eigenvalues of rectangles and approximate eigenvalues of
//! product domains.
//!
//! The rectangle `R(s) = (0, π/s) × (0, sπ)` has eigenvalues
//! `(j·s)² + (k/s)²`, `j, k ≥ 1`. For a product of two `d`-dimensional
//! domains the first-order Weyl substitution gives the approximate
//! eigenvalues `s^{2/d}·j^{2/d} + s^{-2/d}·k^{2/d}`. Both are the values of
//! `(j·s)ᵖ + (k/s)ᵖ`, with `p = 2` and `p = 2/d`, so counting them is
//! p-ellipse lattice counting. Everything here compares values exactly
//! (no membership tolerance).

use serde::Serialize;

use crate::counting::{count_below_level, MembershipPolicy, PLevel};
use crate::error::{Error, Result};
use crate::stretch::{SInterval, StretchProfile};

/// Bisection on `λ` stops once the shell `(lo, hi]` holds this many values.
const SHELL_TARGET: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SpectrumMode {
    Rectangle,
    /// Approximate spectrum of a product of two `d`-dimensional factors.
    Product { d: u32 },
}

impl SpectrumMode {
    pub fn p(self) -> f64 {
        match self {
            SpectrumMode::Rectangle => 2.0,
            SpectrumMode::Product { d } => 2.0 / d as f64,
        }
    }

    pub fn is_approximate(self) -> bool {
        matches!(self, SpectrumMode::Product { .. })
    }
}

fn check(p: f64, s: f64, n: u64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) || !(s > 0.0 && s.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need p > 0, s > 0 and n >= 1, got p = {p}, s = {s}, n = {n}"
        )));
    }
    Ok(())
}

/// `#{(j, k) ≥ 1 : (j·s)ᵖ + (k/s)ᵖ ≤ λ}`.
pub fn value_count(p: f64, s: f64, lambda: f64) -> Result<u64> {
    count_below_level(p, s, lambda, MembershipPolicy::exact())
}

/// The `n`-th smallest value, with multiplicity, of `(j·s)ᵖ + (k/s)ᵖ`.
pub fn nth_value(p: f64, s: f64, n: u64) -> Result<f64> {
    check(p, s, n)?;
    let count = |lambda: f64| value_count(p, s, lambda);
    let mut hi = s.powf(p) + s.powf(-p);
    while count(hi)? < n {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    let mut below = 0;
    loop {
        let above = count(hi)?;
        if above - below <= SHELL_TARGET {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = count(mid)?;
        if c >= n {
            hi = mid;
        } else {
            lo = mid;
            below = c;
        }
    }
    // Resolve among the values in the shell (lo, hi].
    let level_lo = PLevel::new(p, s, lo, MembershipPolicy::exact());
    let level_hi = PLevel::new(p, s, hi, MembershipPolicy::exact());
    let mut shell = Vec::new();
    for j in 1..=level_hi.max_column() {
        let top = level_hi.column_height(j).unwrap_or(0);
        let bottom = level_lo.column_height(j).unwrap_or(0);
        shell.extend((bottom + 1..=top).map(|k| level_hi.value(j, k)));
    }
    shell.sort_by(f64::total_cmp);
    let idx = (n - below - 1) as usize;
    shell.get(idx).copied().ok_or_else(|| {
        Error::BracketFailure(format!("eigenvalue {n} not found in its bracket at s = {s}"))
    })
}

/// `λₙ(R(s))`.
pub fn rectangle_eigenvalue(s: f64, n: u64) -> Result<f64> {
    nth_value(2.0, s, n)
}

/// The `n`-th approximate eigenvalue of the `d`-dimensional product domain.
pub fn approximate_product_eigenvalue(d: u32, s: f64, n: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("product mode needs d >= 2, got {d}")));
    }
    nth_value(2.0 / d as f64, s, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AspectOptimum {
    pub n: u64,
    pub mode: SpectrumMode,
    pub s_star: f64,
    pub lambda_star: f64,
    /// Every `s` with `λₙ(s)` within rounding of the minimum.
    pub argmin: Vec<SInterval>,
    /// Product mode works with approximate eigenvalues.
    pub approximate: bool,
}

/// `min_s λₙ(s)` and a minimizer.
///
/// Uses `min_s λₙ(s) ≤ λ ⇔ max_s #{values ≤ λ} ≥ n`: the minimum is found by
/// bisecting `λ` with an exact sweep over `s`, and the minimizers are the
/// `s` where at least `n` values sit below the converged `λ`. The reported
/// `s_star` is the midpoint of the minimizing component nearest to 1
/// (in `|log s|`).
pub fn minimizing_aspect(n: u64, mode: SpectrumMode) -> Result<AspectOptimum> {
    if let SpectrumMode::Product { d } = mode {
        if d < 3 {
            return Err(Error::InvalidArgument(format!(
                "product-mode aspect optimization needs d >= 3, got {d}"
            )));
        }
    }
    let p = mode.p();
    check(p, 1.0, n)?;
    let reaches = |lambda: f64| StretchProfile::interior_below(p, lambda, MembershipPolicy::exact()).max_depth() >= n;

    let mut hi = nth_value(p, 1.0, n)?;
    let mut lo = 0.5 * hi;
    while reaches(lo) {
        hi = lo;
        lo *= 0.5;
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let argmin = StretchProfile::interior_below(p, hi, MembershipPolicy::exact()).superlevel_set(n);
    let limit = (2.0 * n as f64).sqrt();
    if argmin.is_empty() || argmin.iter().any(|iv| iv.lo < 1.0 / limit || iv.hi > limit) {
        return Err(Error::BracketFailure(format!(
            "minimizer for n = {n} not inside [1/√(2n), √(2n)] = [{}, {limit}]",
            1.0 / limit
        )));
    }
    // Mirror images s and 1/s tie up to rounding; prefer s ≥ 1.
    let mids: Vec<f64> = argmin.iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect();
    let closest = mids.iter().map(|m| m.ln().abs()).fold(f64::INFINITY, f64::min);
    let nearest = mids
        .iter()
        .copied()
        .filter(|m| m.ln().abs() <= closest + 1e-9)
        .fold(0.0, f64::max);
    let lambda_star = nth_value(p, nearest, n)?;
    Ok(AspectOptimum {
        n,
        mode,
        s_star: nearest,
        lambda_star,
        argmin,
        approximate: mode.is_approximate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_interior;
    use crate::curve::make_p_ellipse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_values(p: f64, s: f64, limit: u64) -> Vec<f64> {
        let mut v: Vec<f64> = (1..=limit)
            .flat_map(|j| (1..=limit).map(move |k| (j as f64 * s).powf(p) + (k as f64 / s).powf(p)))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn unit_square_values() {
        assert_eq!(rectangle_eigenvalue(1.0, 1).unwrap(), 2.0);
        assert_eq!(rectangle_eigenvalue(1.0, 2).unwrap(), 5.0);
        assert_eq!(rectangle_eigenvalue(1.0, 3).unwrap(), 5.0);
        assert_eq!(rectangle_eigenvalue(1.0, 4).unwrap(), 8.0);
        let expected = 1.5f64.powi(2) + 1.5f64.powi(-2);
        assert!((rectangle_eigenvalue(1.5, 1).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 2.6944).abs() < 1e-4);
    }

    #[test]
    fn matches_enumeration() {
        for (p, s) in [(2.0, 1.0), (2.0, 0.73), (2.0 / 3.0, 1.2), (0.5, 2.1)] {
            let all = brute_values(p, s, 200);
            for n in [1, 2, 7, 50, 333, 1000] {
                assert_eq!(nth_value(p, s, n).unwrap(), all[n as usize - 1], "p={p} s={s} n={n}");
            }
        }
    }

    #[test]
    fn counting_duality() {
        let circle = make_p_ellipse(2.0).unwrap();
        let exact = MembershipPolicy::exact();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let s = rng.random_range(-1.0f64..1.0).exp();
            let lambda: f64 = rng.random_range(2.0..400.0);
            let m = count_interior(&circle, lambda.sqrt(), s, exact).unwrap();
            assert_eq!(m, value_count(2.0, s, lambda).unwrap());
            if m > 0 {
                assert!(rectangle_eigenvalue(s, m).unwrap() <= lambda);
            }
            assert!(rectangle_eigenvalue(s, m + 1).unwrap() > lambda);
        }
    }

    #[test]
    fn reflection_and_monotonicity() {
        let mut prev = 0.0;
        for n in 1..=200 {
            let a = rectangle_eigenvalue(1.7, n).unwrap();
            let b = rectangle_eigenvalue(1.0 / 1.7, n).unwrap();
            assert!((a - b).abs() <= 1e-12 * a);
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn weyl_ratio_is_close_to_one() {
        let lambda = rectangle_eigenvalue(1.0, 5000).unwrap();
        let ratio = lambda * std::f64::consts::PI / (4.0 * 5000.0);
        assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn first_aspect_is_the_square() {
        let opt = minimizing_aspect(1, SpectrumMode::Rectangle).unwrap();
        assert!((opt.s_star - 1.0).abs() < 1e-6, "{opt:?}");
        assert!((opt.lambda_star - 2.0).abs() < 1e-12);
        assert!(!opt.approximate);
    }

    #[test]
    fn aspect_optimum_beats_a_scan() {
        for (n, mode) in [(7, SpectrumMode::Rectangle), (30, SpectrumMode::Rectangle), (12, SpectrumMode::Product { d: 3 })] {
            let opt = minimizing_aspect(n, mode).unwrap();
            let p = mode.p();
            for i in 0..400 {
                let s = (-1.5 + 3.0 * i as f64 / 399.0).exp();
                assert!(nth_value(p, s, n).unwrap() >= opt.lambda_star * (1.0 - 1e-12));
            }
            assert_eq!(opt.approximate, mode.is_approximate());
        }
    }

    #[test]
    fn rejects_planar_product_mode() {
        assert!(minimizing_aspect(10, SpectrumMode::Product { d: 2 }).is_err());
        assert!(approximate_product_eigenvalue(1, 1.0, 1).is_err());
        assert!(nth_value(2.0, 1.0, 0).is_err());
    }
}
