//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line
//! each, and exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use lattice_stretch::bounds::{
    bracket_improved, improved_threshold, lower_bound_closed, square_completion, two_term_budget,
    upper_bound_interior, BudgetEvaluator,
};
use lattice_stretch::counting::{brute_force_count, complement_identity_check, IdentityOutcome};
use lattice_stretch::spectra::{
    minimizing_aspect, nth_value, rectangle_eigenvalue, value_count, SpectrumMode,
};
use lattice_stretch::stretch::{fit_decay, log_grid, sweep, SweepRecord};
use lattice_stretch::{
    argmax_interior, count_closed, count_interior, make_p_ellipse, MembershipPolicy, OptimizeMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn err(e: lattice_stretch::Error) -> String {
    e.to_string()
}

fn log_uniform(rng: &mut ChaCha8Rng, spread: f64) -> f64 {
    rng.random_range(-spread..spread).exp()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let policy = MembershipPolicy::default();
    let mut cases = 0;
    for p in [0.4, 0.5, 0.75, 2.0] {
        let curve = make_p_ellipse(p).map_err(err)?;
        for r in 1..=30 {
            let r = r as f64;
            for s in [0.3, 0.7, 1.0, 1.9, 3.1] {
                let fast = count_interior(&curve, r, s, policy).map_err(err)?;
                let slow = brute_force_count(&curve, r, s, false, policy).map_err(err)?;
                ensure(fast == slow, || format!("N mismatch p={p} r={r} s={s}: {fast} vs {slow}"))?;
                let fast = count_closed(&curve, r, s, policy).map_err(err)?;
                let slow = brute_force_count(&curve, r, s, true, policy).map_err(err)?;
                ensure(fast == slow, || format!("closed mismatch p={p} r={r} s={s}: {fast} vs {slow}"))?;
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {}", secs(elapsed)))?;
    Ok(format!("{cases} cases, 0 mismatches in {}", secs(elapsed)))
}

fn hand_counts() -> Outcome {
    let curve = make_p_ellipse(0.5).map_err(err)?;
    let policy = MembershipPolicy::default();
    let n = count_interior(&curve, 9.0, 1.0, policy).map_err(err)?;
    let closed = count_closed(&curve, 9.0, 1.0, policy).map_err(err)?;
    ensure(n == 8 && closed == 27, || format!("N = {n}, closed = {closed}"))?;
    // (1, 4) and (4, 1) sit exactly on the curve: √1 + √4 = √9.
    let without = count_interior(&curve, 9.0, 1.0, MembershipPolicy::exact()).map_err(err)?;
    let shrunk = count_interior(&curve, 9.0 * (1.0 - 1e-7), 1.0, policy).map_err(err)?;
    ensure(shrunk == n - 2, || format!("shrinking r drops {} points, expected 2", n - shrunk))?;
    Ok(format!(
        "N(9,1) = {n}, closed = {closed}; boundary points counted (exact predicate gives {without}, r(1-1e-7) gives {shrunk})"
    ))
}

fn explicit_bounds() -> Outcome {
    let start = Instant::now();
    let policy = MembershipPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for p in [0.4, 0.6] {
        let curve = make_p_ellipse(p).map_err(err)?;
        for _ in 0..1000 {
            let s = log_uniform(&mut rng, 1.5);
            let r = rng.random_range((2.0 * s / curve.l()).max(0.5)..150.0);
            let bound = upper_bound_interior(&curve, r, s).map_err(err)?;
            let n = count_interior(&curve, r, s, policy).map_err(err)?;
            ensure(n as f64 <= bound, || format!("upper: p={p} r={r} s={s}: {n} > {bound}"))?;
        }
        for _ in 0..1000 {
            let s = log_uniform(&mut rng, 1.5);
            let r = rng.random_range(0.5..150.0);
            let bound = lower_bound_closed(&curve, r, s).map_err(err)?;
            let n = count_closed(&curve, r, s, policy).map_err(err)?;
            ensure(n as f64 >= bound, || format!("lower: p={p} r={r} s={s}: {n} < {bound}"))?;
        }
        checked += 2000;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {}", secs(elapsed)))?;
    Ok(format!("{checked} samples, 0 violations in {}", secs(elapsed)))
}

fn two_term_budget_slack() -> Outcome {
    let policy = MembershipPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_slack = f64::INFINITY;
    for p in [0.4, 0.5, 0.75] {
        let curve = make_p_ellipse(p).map_err(err)?;
        let eval = BudgetEvaluator::new(&curve).map_err(err)?;
        for _ in 0..1000 {
            let s = log_uniform(&mut rng, 1.0);
            let r_lo = (s / curve.l()).max(1.0 / (s * curve.m()));
            let r = rng.random_range(r_lo..r_lo + 150.0);
            let b = eval.scaled(r, s, policy).map_err(err)?;
            ensure(b.slack >= 0.0, || format!("p={p} r={r} s={s}: lhs {} > rhs {}", b.lhs, b.rhs))?;
            min_slack = min_slack.min(b.slack);
        }
    }
    let curve = make_p_ellipse(0.5).map_err(err)?;
    let b = two_term_budget(&curve, 9.0, 1.0, policy).map_err(err)?;
    ensure(b.lhs == 3.5, || format!("lhs at (1/2, 9, 1) is {}", b.lhs))?;
    Ok(format!("3000 samples, min slack {min_slack:.4}; lhs(1/2, 9, 1) = {}", b.lhs))
}

fn exact_optimizer() -> Outcome {
    // Endpoints are compared with the exact predicate: the default membership
    // tolerance widens each window by O(tol).
    let rep = argmax_interior(0.5, 5.0, MembershipPolicy::exact()).map_err(err)?;
    let (lo, hi) = ((3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0);
    ensure(rep.best_count == 1 && rep.optimizer.len() == 1, || format!("{rep:?}"))?;
    let iv = rep.optimizer[0];
    let worst = (iv.lo - lo).abs().max((iv.hi - hi).abs());
    ensure(worst <= 1e-9, || format!("endpoints [{}, {}] off by {worst:e}", iv.lo, iv.hi))?;
    Ok(format!("best_count = 1, optimizer [{:.12}, {:.12}], max error {worst:.1e}", iv.lo, iv.hi))
}

fn bracket_containment() -> Outcome {
    let curve = make_p_ellipse(0.5).map_err(err)?;
    let c = improved_threshold(&curve);
    ensure((c - 9.657).abs() <= 1e-3, || format!("threshold C = {c}"))?;
    for r in [10.0, 20.0, 50.0, 100.0] {
        let bracket = bracket_improved(&curve, r).map_err(err)?;
        ensure((bracket.lo - 2.0 / r).abs() < 1e-15 && (bracket.hi - r / 2.0).abs() < 1e-12, || {
            format!("bracket at r={r}: [{}, {}]", bracket.lo, bracket.hi)
        })?;
        let rep = argmax_interior(0.5, r, MembershipPolicy::default()).map_err(err)?;
        for iv in &rep.optimizer {
            ensure(bracket.contains(iv.lo) && bracket.contains(iv.hi), || {
                format!("r={r}: maximizer [{}, {}] outside [{}, {}]", iv.lo, iv.hi, bracket.lo, bracket.hi)
            })?;
        }
    }
    Ok(format!("C = {c:.6}; all maximizers inside [2/r, r/2] for r = 10, 20, 50, 100"))
}

struct Sweeps {
    max: Vec<SweepRecord>,
    min: Vec<SweepRecord>,
    max_time: Duration,
    min_time: Duration,
}

fn run_sweeps() -> Result<Sweeps, String> {
    let grid = log_grid(20.0, 300.0, 48).map_err(err)?;
    let policy = MembershipPolicy::default();
    let start = Instant::now();
    let max = sweep(0.5, OptimizeMode::MaxInterior, &grid, policy).map_err(err)?;
    let max_time = start.elapsed();
    let start = Instant::now();
    let min = sweep(0.5, OptimizeMode::MinClosed, &grid, policy).map_err(err)?;
    let min_time = start.elapsed();
    Ok(Sweeps {
        max,
        min,
        max_time,
        min_time,
    })
}

/// Balancing trend: the maximum of `dist_to_one` over each trailing window
/// `[r_i, r_max]` must be nonincreasing in `i` and must actually fall, and
/// the fitted log-log slope must be at most `-1/6 + 0.15`.
fn balancing_trend(records: &[SweepRecord], elapsed: Duration) -> Outcome {
    if let Some(bad) = records.iter().find(|r| r.flag.is_some()) {
        return Err(format!("r={} flagged: {}", bad.r, bad.flag.as_deref().unwrap_or("")));
    }
    let dist: Vec<f64> = records.iter().map(|r| r.dist_to_one.unwrap_or(f64::NAN)).collect();
    let mut trailing = dist.clone();
    for i in (0..trailing.len() - 1).rev() {
        trailing[i] = trailing[i].max(trailing[i + 1]);
    }
    ensure(trailing.windows(2).all(|w| w[1] <= w[0]), || format!("trailing maxima {trailing:?}"))?;
    let quarter = dist.len() / 4;
    let head = dist[..quarter].iter().copied().fold(0.0, f64::max);
    let tail = dist[dist.len() - quarter..].iter().copied().fold(0.0, f64::max);
    ensure(tail < head, || format!("last-quarter max {tail} not below first-quarter max {head}"))?;
    let fit = fit_decay(records, 1.0 / 6.0).map_err(err)?;
    let limit = -1.0 / 6.0 + 0.15;
    ensure(fit.exponent <= limit, || format!("slope {} > {limit}", fit.exponent))?;
    let blocks: Vec<String> = dist
        .chunks(quarter.max(1))
        .map(|c| format!("{:.3}", c.iter().copied().fold(0.0, f64::max)))
        .collect();
    Ok(format!(
        "{} radii, slope {:.3} (limit {limit:.4}), quarter maxima [{}], sweep {}",
        records.len(),
        fit.exponent,
        blocks.join(", "),
        secs(elapsed)
    ))
}

/// Residual envelope: `|best_count − predicted| ≤ K·r^{2/3}` with one `K`.
fn count_envelope(records: &[SweepRecord]) -> Outcome {
    let ks: Vec<f64> = records
        .iter()
        .map(|rec| rec.residual.map_or(f64::INFINITY, |d| d.abs() / rec.r.powf(2.0 / 3.0)))
        .collect();
    let k = ks.iter().copied().fold(0.0, f64::max);
    ensure(k.is_finite(), || "a sweep row has no count".into())?;
    let half = ks.len() / 2;
    let head = ks[..half].iter().copied().fold(0.0, f64::max);
    let tail = ks[half..].iter().copied().fold(0.0, f64::max);
    Ok(format!("K = {k:.4} (r <= {:.0}: {head:.4}, beyond: {tail:.4})", records[half].r))
}

fn minimizing_case(records: &[SweepRecord], elapsed: Duration) -> Outcome {
    let trend = balancing_trend(records, elapsed)?;
    let envelope = count_envelope(records)?;
    Ok(format!("{trend}; residual against r²/6 + r: {envelope}"))
}

fn rectangle_identity() -> Outcome {
    let policy = MembershipPolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut skipped = 0;
    for p in [0.5, 2.0] {
        let curve = make_p_ellipse(p).map_err(err)?;
        let mut done = 0;
        while done < 200 {
            let s = log_uniform(&mut rng, 1.0);
            let r = rng.random_range(2.0..80.0);
            let rep = match complement_identity_check(&curve, r, s, policy) {
                Ok(rep) if rep.outcome != IdentityOutcome::Degenerate => rep,
                Ok(_) | Err(lattice_stretch::Error::NotApplicable(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(err(e)),
            };
            ensure(rep.outcome == IdentityOutcome::Pass, || {
                format!("p={p} r={r} s={s}: {} != {}", rep.lhs, rep.rhs)
            })?;
            done += 1;
        }
    }
    Ok(format!("400 identities hold ({skipped} degenerate or inapplicable samples redrawn)"))
}

fn spectra() -> Outcome {
    let l1 = rectangle_eigenvalue(1.0, 1).map_err(err)?;
    let l2 = rectangle_eigenvalue(1.0, 2).map_err(err)?;
    ensure(l1 == 2.0 && l2 == 5.0, || format!("λ1 = {l1}, λ2 = {l2}"))?;

    let circle = make_p_ellipse(2.0).map_err(err)?;
    let exact = MembershipPolicy::exact();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let s = log_uniform(&mut rng, 1.0);
        let lambda = rng.random_range(2.0..2000.0);
        let m = value_count(2.0, s, lambda).map_err(err)?;
        let n = count_interior(&circle, f64::sqrt(lambda), s, exact).map_err(err)?;
        ensure(m == n, || format!("s={s} λ={lambda}: {m} eigenvalues vs {n} lattice points"))?;
        if m > 0 {
            let below = nth_value(2.0, s, m).map_err(err)?;
            ensure(below <= lambda, || format!("λ_{m}({s}) = {below} > {lambda}"))?;
        }
        let above = nth_value(2.0, s, m + 1).map_err(err)?;
        ensure(above > lambda, || format!("λ_{}({s}) = {above} <= {lambda}", m + 1))?;
    }

    let mut trends = Vec::new();
    for (label, mode) in [("rectangle", SpectrumMode::Rectangle), ("product d=3", SpectrumMode::Product { d: 3 })] {
        let small = minimizing_aspect(50, mode).map_err(err)?;
        let large = minimizing_aspect(5000, mode).map_err(err)?;
        let (a, b) = ((small.s_star - 1.0).abs(), (large.s_star - 1.0).abs());
        ensure(b < a, || format!("{label}: |s_5000 - 1| = {b} not below |s_50 - 1| = {a}"))?;
        trends.push(format!("{label} |s-1|: {a:.4} -> {b:.4}"));
    }
    Ok(format!("λ1 = 2, λ2 = 5, 1000 duality queries agree; {}", trends.join(", ")))
}

fn square_completion_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut premises = 0;
    for i in 0..1_000_000u32 {
        let t = rng.random_range(f64::MIN_POSITIVE..1.0);
        // Half the draws concentrate near s = 1 so the premise is often met.
        let s = if i % 2 == 0 {
            log_uniform(&mut rng, 3.0)
        } else {
            log_uniform(&mut rng, 4.0 * t.sqrt())
        };
        let (premise, bound) = square_completion(s, t).map_err(err)?;
        if premise {
            premises += 1;
            ensure((s - 1.0).abs() <= bound, || format!("s={s} t={t}: |s-1| > 3√t = {bound}"))?;
        }
    }
    Ok(format!("10^6 pairs ({premises} meeting the premise), no counterexample"))
}

fn main() {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS criterion {id:>2} ({name}): {detail}"),
        Err(detail) => {
            failures += 1;
            println!("FAIL criterion {id:>2} ({name}): {detail}");
        }
    };
    report(1, "oracle equivalence", oracle_equivalence());
    report(2, "hand-checkable counts", hand_counts());
    report(3, "explicit bounds", explicit_bounds());
    report(4, "two-term budget", two_term_budget_slack());
    report(5, "exact optimizer", exact_optimizer());
    report(6, "bracket containment", bracket_containment());
    match run_sweeps() {
        Ok(s) => {
            report(7, "asymptotic balancing", balancing_trend(&s.max, s.max_time));
            report(8, "count asymptotics", count_envelope(&s.max));
            report(9, "minimizing case", minimizing_case(&s.min, s.min_time));
        }
        Err(e) => {
            for (id, name) in [(7, "asymptotic balancing"), (8, "count asymptotics"), (9, "minimizing case")] {
                report(id, name, Err(e.clone()));
            }
        }
    }
    report(10, "rectangle identity", rectangle_identity());
    report(11, "spectra", spectra());
    report(12, "square completion", square_completion_check());
    println!("{} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
