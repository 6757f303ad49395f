//! Exact lattice point counting under stretched convex curves.
//!
//! A curve `Γ` is the graph of a convex, strictly decreasing `f` on `[0, L]`
//! with `f(0) = M` and `f(L) = 0`. Stretching by `s` and dilating by `r`
//! gives the curve `rΓ(s)`, the graph of `x ↦ r·s·f(s·x/r)`. This crate
//! counts the positive-integer lattice points `N(r, s)` and the
//! nonnegative-integer lattice points `𝒩(r, s)` on or under that curve,
//! finds the exact stretch sets maximizing `N` and minimizing `𝒩`, and
//! evaluates the explicit two-term bounds that control those optima.
//!
//! The modules, bottom up:
//!
//! - [`quadrature`]: adaptive Gauss–Kronrod integration with geometric
//!   splitting toward a singular endpoint.
//! - [`curve`]: the [`CurveModel`](curve::CurveModel) abstraction and the
//!   built-in p-ellipse family.
//! - [`counting`]: exact column-sum counters, a brute-force oracle and the
//!   complementary-rectangle identity.
//! - [`bounds`]: upper/lower two-term bounds, the remainder budget and the
//!   stretch-factor brackets.
//! - [`stretch`]: event sweeps over `s` giving exact optimizing sets, and
//!   r-sweeps with power-law decay fits.
//! - [`spectra`]: Dirichlet eigenvalues of rectangles and approximate
//!   eigenvalues of product domains.
//! - [`cli`]: the command-line front end.

pub mod bounds;
pub mod cli;
pub mod counting;
pub mod curve;
pub mod error;
pub mod quadrature;
pub mod spectra;
pub mod stretch;

pub use counting::{count_closed, count_interior, MembershipPolicy};
pub use curve::{make_p_ellipse, CurveModel};
pub use error::{Error, Result};
pub use stretch::{argmax_interior, argmin_closed, OptimizeMode, OptimumReport};

