//! Inclusion lengths from scans for ε-almost periods.
//!
//! A scan walks the grid `τ_i = i·step` of `[0, W]`. The quality bound of a
//! trigonometric polynomial is `Lip(P)`-Lipschitz in `τ`, so from a point of
//! quality `q > ε` the next `⌊(q - ε)/(Lip·step)⌋` grid points cannot be hits
//! and are skipped; symmetrically inside a run of hits. The hit set is
//! therefore exactly the set of grid points with quality `≤ ε`, independent
//! of the chunking used for parallelism.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apfun::{ComposedTrajectory, SampledTrajectory, TrigPolynomial};
use crate::contfrac::{big_ratio, ContinuedFraction};
use crate::error::{Error, Result};

/// Default cap on quality evaluations per scan.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;
const CHUNK: u64 = 1 << 14;
/// Runs longer than this are crossed with Lipschitz jumps instead of point by point.
const DENSE_RUN: u64 = 4096;
const SKIP_SAFETY: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanSource {
    Polynomial,
    Sampled,
    Composed,
}

/// A maximal run of consecutive hits `[start, end]` and its best point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub start: f64,
    pub end: f64,
    pub tau: f64,
    pub quality: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodScan {
    pub epsilon: f64,
    pub window: f64,
    pub step: f64,
    pub clusters: Vec<Cluster>,
    /// Gaps between consecutive clusters, window edges included.
    pub gaps: Vec<f64>,
    pub l_hat: f64,
    /// At least three clusters (τ = 0 plus two more) lie in the window.
    pub reliable: bool,
    pub evaluations: u64,
    /// Half-width of the uncertainty on qualities (0 when certified).
    pub band: f64,
    /// Grid points decided by measurement rather than certification.
    pub measured_points: u64,
    pub source: ScanSource,
}

impl PeriodScan {
    pub fn periods(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.tau).collect()
    }

    pub fn n_periods(&self) -> usize {
        self.clusters.len()
    }

    fn build(
        epsilon: f64,
        window: f64,
        step: f64,
        clusters: Vec<Cluster>,
        evaluations: u64,
        band: f64,
        measured_points: u64,
        source: ScanSource,
    ) -> Self {
        let mut gaps = Vec::with_capacity(clusters.len() + 1);
        match clusters.first() {
            None => gaps.push(window),
            Some(first) => {
                gaps.push(first.start);
                for w in clusters.windows(2) {
                    gaps.push(w[1].start - w[0].end);
                }
                gaps.push(window - clusters[clusters.len() - 1].end);
            }
        }
        let l_hat = gaps.iter().cloned().fold(step, f64::max).min(window);
        let reliable = clusters.len() >= 3;
        PeriodScan { epsilon, window, step, clusters, gaps, l_hat, reliable, evaluations, band, measured_points, source }
    }
}

/// One probe of the engine: the quality at a grid index, whether it is a
/// hit, and how many following indices share that state for certain.
struct Probe {
    value: f64,
    hit: bool,
    same: u64,
    measured: bool,
}

#[derive(Clone, Debug)]
struct Run {
    start: u64,
    end: u64,
    best: u64,
    best_value: f64,
}

struct Engine {
    n: u64,
    budget: u64,
}

impl Engine {
    fn run(&self, probe: impl Fn(u64) -> Probe + Sync) -> Result<(Vec<Run>, u64, u64)> {
        let evals = AtomicU64::new(0);
        let measured = AtomicU64::new(0);
        let nchunks = (self.n + 1).div_ceil(CHUNK);
        let budget = self.budget;
        let parts: Vec<Option<Vec<Run>>> = (0..nchunks)
            .into_par_iter()
            .map(|c| {
                let a = c * CHUNK;
                let b = ((c + 1) * CHUNK - 1).min(self.n);
                let mut runs: Vec<Run> = Vec::new();
                let mut open: Option<Run> = None;
                let mut i = a;
                let mut local = 0u64;
                let mut local_measured = 0u64;
                while i <= b {
                    let p = probe(i);
                    local += 1;
                    local_measured += u64::from(p.measured);
                    if local % 4096 == 0 && evals.fetch_add(4096, AtomicOrdering::Relaxed) > budget {
                        return None;
                    }
                    if p.hit {
                        let run = open.get_or_insert(Run { start: i, end: i, best: i, best_value: p.value });
                        run.end = i;
                        if p.value < run.best_value {
                            run.best = i;
                            run.best_value = p.value;
                        }
                        let len = i - run.start;
                        let jump = if len >= DENSE_RUN { (p.same / 2).max(1) } else { 1 };
                        let last = (i + jump - 1).min(b);
                        run.end = last;
                        i += jump;
                    } else {
                        if let Some(run) = open.take() {
                            runs.push(run);
                        }
                        i += p.same.max(1);
                    }
                }
                if let Some(run) = open.take() {
                    runs.push(run);
                }
                evals.fetch_add(local % 4096, AtomicOrdering::Relaxed);
                measured.fetch_add(local_measured, AtomicOrdering::Relaxed);
                Some(runs)
            })
            .collect();
        let total = evals.load(AtomicOrdering::Relaxed);
        if parts.iter().any(Option::is_none) || total > budget {
            return Err(Error::BudgetExceeded { needed: total.max(budget + 1), budget });
        }
        let mut merged: Vec<Run> = Vec::new();
        for run in parts.into_iter().flatten().flatten() {
            match merged.last_mut() {
                Some(last) if last.end + 1 == run.start => {
                    last.end = run.end;
                    if run.best_value < last.best_value {
                        last.best = run.best;
                        last.best_value = run.best_value;
                    }
                }
                _ => merged.push(run),
            }
        }
        Ok((merged, total, measured.load(AtomicOrdering::Relaxed)))
    }
}

fn clusters_from_runs(runs: &[Run], step: f64) -> Vec<Cluster> {
    runs.iter()
        .map(|r| Cluster {
            start: r.start as f64 * step,
            end: r.end as f64 * step,
            tau: r.best as f64 * step,
            quality: r.best_value,
        })
        .collect()
}

/// `ε / (2 Lip)` snapped down to a power of two.
pub fn scan_step(epsilon: f64, lipschitz: f64) -> f64 {
    let raw = epsilon / (2.0 * lipschitz.max(f64::MIN_POSITIVE));
    2f64.powi(raw.log2().floor() as i32)
}

fn check_args(epsilon: f64, window: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::Validation(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(window > 0.0) {
        return Err(Error::Validation(format!("window must be positive, got {window}")));
    }
    Ok(())
}

/// Scan of `P` at resolution `ε/(2 Lip(P))` over `[0, W]`.
pub fn scan(p: &TrigPolynomial, epsilon: f64, window: f64, budget: u64) -> Result<PeriodScan> {
    scan_with_step(p, epsilon, window, scan_step(epsilon, p.lipschitz()), budget)
}

/// Scan on an explicit grid step (shared by ladders so that hit sets nest).
pub fn scan_with_step(p: &TrigPolynomial, epsilon: f64, window: f64, step: f64, budget: u64) -> Result<PeriodScan> {
    check_args(epsilon, window)?;
    if window > p.certified_horizon() {
        return Err(Error::PrecisionExhausted(format!("window {window} exceeds the phase horizon")));
    }
    let n = (window / step).floor() as u64;
    let per_index = p.lipschitz() * step;
    let engine = Engine { n, budget };
    let (runs, evaluations, _) = engine.run(|i| {
        let tau = i as f64 * step;
        let value = p.quality_hi(tau) + p.distance_slack(tau);
        let hit = value <= epsilon;
        let margin = (value - epsilon).abs();
        let same = if per_index > 0.0 { (margin / per_index * SKIP_SAFETY).floor() as u64 } else { u64::MAX / 4 };
        Probe { value, hit, same: same.max(1), measured: false }
    })?;
    let clusters = clusters_from_runs(&runs, step);
    Ok(PeriodScan::build(epsilon, window, step, clusters, evaluations, 0.0, 0, ScanSource::Polynomial))
}

/// Smallest window (doubling from `start`) holding at least `min_clusters`
/// clusters and at least five inclusion lengths, capped at `max_window`.
pub fn adaptive_scan(
    p: &TrigPolynomial,
    epsilon: f64,
    start: f64,
    max_window: f64,
    min_clusters: usize,
    budget: u64,
) -> Result<PeriodScan> {
    let mut w = start.max(1.0);
    loop {
        let s = scan(p, epsilon, w, budget)?;
        if (s.clusters.len() >= min_clusters && w >= 5.0 * s.l_hat) || w >= max_window {
            return Ok(s);
        }
        w = (w * 2.0).min(max_window);
    }
}

/// Scans a strictly decreasing or increasing ε ladder on one shared grid and
/// window, so that `l_hat` is non-increasing in ε.
pub fn scan_ladder(p: &TrigPolynomial, ladder: &[f64], window: Option<f64>, budget: u64) -> Result<Vec<PeriodScan>> {
    validate_ladder(ladder)?;
    let eps_min = ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    let window = match window {
        Some(w) => w,
        None => adaptive_scan(p, eps_min, 16.0 / eps_min, 1e7, 10, budget)?.window,
    };
    let step = scan_step(eps_min, p.lipschitz());
    ladder.iter().map(|&e| scan_with_step(p, e, window, step, budget)).collect()
}

/// Ladders must be strictly monotone and hold at least two positive values.
pub fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 2 {
        return Err(Error::Validation(format!("a ladder needs at least 2 points, got {}", ladder.len())));
    }
    if ladder.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Validation("ladder values must be positive and finite".into()));
    }
    let inc = ladder.windows(2).all(|w| w[0] < w[1]);
    let dec = ladder.windows(2).all(|w| w[0] > w[1]);
    if !(inc || dec) {
        return Err(Error::Validation("ladder must be strictly monotone".into()));
    }
    Ok(())
}

/// `ε = first · ratio^k`, `k < count`.
pub fn geometric_ladder(first: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| first * ratio.powi(k as i32)).collect()
}

/// Scan of a uniformly sampled trajectory.
///
/// Shifts are whole sample multiples `τ = m·h` in `[0, W]`; the quality at
/// `τ` is the largest `|x(t+τ) - x(t)|` over the first `measure` time units.
/// Hits are measured, not certified: qualities carry a band of one step
/// modulus, reported in [`PeriodScan::band`].
pub fn scan_sampled(
    samples: &SampledTrajectory,
    epsilon: f64,
    window: f64,
    measure: f64,
    budget: u64,
) -> Result<PeriodScan> {
    check_args(epsilon, window)?;
    let h = samples.step();
    let mm = (window / h).floor() as u64;
    let len_measure = ((measure / h).floor() as usize).max(1);
    if mm as usize + len_measure > samples.len() {
        return Err(Error::Validation(format!(
            "{} samples cannot cover a window of {window} plus a measurement span of {measure}",
            samples.len()
        )));
    }
    let modulus = samples.step_modulus();
    if modulus > epsilon / 4.0 {
        return Err(Error::Undersampled(format!(
            "step modulus {modulus:.3e} exceeds ε/4 = {:.3e}",
            epsilon / 4.0
        )));
    }
    let engine = Engine { n: mm, budget: budget / len_measure as u64 + 1 };
    let (runs, evaluations, _) = engine.run(|m| {
        let m = m as usize;
        let value = (0..len_measure).map(|i| samples.distance(i + m, i)).fold(0.0, f64::max);
        let hit = value <= epsilon;
        let margin = (value - epsilon).abs();
        // |q(m+1) - q(m)| ≤ step modulus
        let same = if modulus > 0.0 { (margin / modulus * SKIP_SAFETY).floor() as u64 } else { u64::MAX / 4 };
        Probe { value, hit, same: same.max(1), measured: true }
    })?;
    let clusters = clusters_from_runs(&runs, h);
    Ok(PeriodScan::build(epsilon, window, h, clusters, evaluations, modulus, evaluations, ScanSource::Sampled))
}

/// Scan of `χ∘P`.
///
/// Shifts where `C d^α ≤ ε` (with `d` the certified shift distance of `P`)
/// are certified hits, shifts with `d > L_inv ε` are certified misses. The
/// band in between is decided by a torus measurement of `χ∘P` itself.
/// Candidate intervals come from a Lipschitz walk on `d`; inside each one
/// the measured quality is minimised and the hit interval located by
/// bisection.
pub fn scan_composed(c: &ComposedTrajectory, epsilon: f64, window: f64, budget: u64) -> Result<PeriodScan> {
    check_args(epsilon, window)?;
    let p = c.poly();
    if !p.has_exact_shift_distance() {
        return Err(Error::Validation("composed scans need a scalar polynomial with independent exponents".into()));
    }
    let l_inv = c
        .inverse_lipschitz()
        .ok_or_else(|| Error::Validation("composed scans need an inverse Lipschitz bound".into()))?;
    let t = c.transfer();
    let reach = l_inv * epsilon;
    // candidate intervals: d ≤ L_inv ε, found on the grid of P at resolution reach/(2 Lip)
    let step = scan_step(reach, p.lipschitz());
    let cand = scan_with_step(p, reach, window, step, budget)?;
    let mut measured = 0u64;
    let mut clusters = Vec::new();
    for cl in &cand.clusters {
        let (a, b) = ((cl.start - step).max(0.0), (cl.end + step).min(window));
        let d_best = p.quality_hi(cl.tau);
        if cl.tau == 0.0 || t.image_epsilon(d_best) <= epsilon {
            // certified hit at the representative; extend by bisection on the measured quality
            let s = edge(c, a, cl.tau, epsilon, &mut measured);
            let e = edge(c, b, cl.tau, epsilon, &mut measured);
            clusters.push(Cluster { start: s, end: e, tau: cl.tau, quality: c.measured_distance(cl.tau) });
            continue;
        }
        let (tau, q) = minimise(c, a, b, &mut measured);
        if q <= epsilon {
            let s = edge(c, a, tau, epsilon, &mut measured);
            let e = edge(c, b, tau, epsilon, &mut measured);
            clusters.push(Cluster { start: s, end: e, tau, quality: q });
        }
    }
    Ok(PeriodScan::build(
        epsilon,
        window,
        step,
        clusters,
        cand.evaluations + measured,
        0.0,
        measured,
        ScanSource::Composed,
    ))
}

/// Golden-section search for the smallest measured quality on `[a, b]`,
/// seeded by a coarse sweep.
fn minimise(c: &ComposedTrajectory, a: f64, b: f64, count: &mut u64) -> (f64, f64) {
    let n = 16;
    let pts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = pts.par_iter().map(|&x| c.measured_distance(x)).collect();
    *count += pts.len() as u64;
    let k = (0..vals.len()).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let (mut lo, mut hi) = (pts[k.saturating_sub(1)], pts[(k + 1).min(n)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = c.measured_distance(x1);
    let mut f2 = c.measured_distance(x2);
    *count += 2;
    while hi - lo > 1e-9 * (1.0 + hi.abs()) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = c.measured_distance(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = c.measured_distance(x2);
        }
        *count += 1;
    }
    let (x, f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if vals[k] <= f {
        (pts[k], vals[k])
    } else {
        (x, f)
    }
}

/// Boundary of the hit interval between `outer` and a hit `inner`.
fn edge(c: &ComposedTrajectory, outer: f64, inner: f64, epsilon: f64, count: &mut u64) -> f64 {
    if c.measured_distance(outer) <= epsilon {
        *count += 1;
        return outer;
    }
    let (mut miss, mut hit) = (outer, inner);
    while (miss - hit).abs() > 1e-9 * (1.0 + hit.abs()) {
        let mid = 0.5 * (miss + hit);
        if c.measured_distance(mid) <= epsilon {
            hit = mid;
        } else {
            miss = mid;
        }
        *count += 1;
    }
    hit
}

/// One rung `(ε_k, L_k)` of the theoretical inclusion-length ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaitoPoint {
    pub k: usize,
    pub q_next: f64,
    pub epsilon: f64,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaitoLadder {
    pub points: Vec<NaitoPoint>,
    pub omega_tilde: f64,
    pub c_omega_tilde: f64,
    pub alpha2: f64,
    pub c_h: f64,
}

/// Theoretical ladder for `h(ωt, t)`: with `ω̃ = 1/ω`,
/// `ε_k = C_h / (1 + C_ω̃^{-α₂}) · q_{k+1}^{-α₂}` and `L_k = q_{k+1} ω̃`,
/// `q_k` the convergent denominators of `ω̃`, for `k = 1..=count`.
pub fn naito_ladder(omega: &ContinuedFraction, alpha2: f64, c_h: f64, count: usize) -> Result<NaitoLadder> {
    if !(alpha2 > 0.0 && alpha2 <= 1.0) || !(c_h > 0.0) {
        return Err(Error::Validation(format!("need 0 < α₂ ≤ 1 and C_h > 0, got {alpha2}, {c_h}")));
    }
    let tilde = omega.reciprocal()?;
    let depth = (count + 2).max(8);
    let tilde = if tilde.len() < depth + 1 { tilde.with_depth(depth + 1)? } else { tilde };
    let profile = tilde.classify(depth)?;
    let Some(c_omega) = profile.g_constant else {
        return Err(Error::Validation("ω̃ lacks the G-property on the computed prefix".into()));
    };
    let omega_tilde = tilde.to_f64();
    let conv = tilde.convergents(count + 1)?;
    let factor = c_h / (1.0 + c_omega.powf(-alpha2));
    let points = (1..=count)
        .map(|k| {
            let q = big_ratio(&conv[k + 1].q, &1.into());
            NaitoPoint { k, q_next: q, epsilon: factor * q.powf(-alpha2), length: q * omega_tilde }
        })
        .collect();
    Ok(NaitoLadder { points, omega_tilde, c_omega_tilde: c_omega, alpha2, c_h })
}

impl NaitoLadder {
    /// Bound on the inclusion length at `ε ∈ [ε_{k0+1}, ε_{k0})`: `L_{k0+1}`,
    /// or `L_{k0}` for the uncorrected indexing.
    pub fn bound(&self, epsilon: f64, corrected: bool) -> Option<f64> {
        let pts = &self.points;
        if let Some(first) = pts.first() {
            if epsilon >= first.epsilon {
                return Some(first.length);
            }
        }
        for w in pts.windows(2) {
            if w[1].epsilon <= epsilon && epsilon < w[0].epsilon {
                return Some(if corrected { w[1].length } else { w[0].length });
            }
        }
        None
    }

    /// Least-squares slope of `ln L_k` against `ln(1/ε_k)`.
    pub fn slope(&self) -> f64 {
        let xs: Vec<f64> = self.points.iter().map(|p| (1.0 / p.epsilon).ln()).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.length.ln()).collect();
        crate::dimension::least_squares(&xs, &ys).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_freq() -> TrigPolynomial {
        TrigPolynomial::unit_sum(&["1", "sqrt2"]).unwrap()
    }

    #[test]
    fn periods_near_convergent_denominators() {
        let p = two_freq();
        let s = scan(&p, 0.2, 500.0, DEFAULT_BUDGET).unwrap();
        let reps = s.periods();
        for q in [12.0, 29.0, 41.0] {
            assert!(reps.iter().any(|&t| (t - q).abs() < 0.05), "{q} not in {reps:?}");
        }
        for c in &s.clusters {
            assert!(p.quality_hi(c.tau) <= 0.2);
        }
    }

    #[test]
    fn hit_set_matches_dense_grid() {
        let p = two_freq();
        let s = scan(&p, 0.3, 60.0, DEFAULT_BUDGET).unwrap();
        let n = (60.0 / s.step) as u64;
        let mut runs = vec![];
        let mut open: Option<(u64, u64)> = None;
        for i in 0..=n {
            let tau = i as f64 * s.step;
            if p.quality_hi(tau) + p.distance_slack(tau) <= 0.3 {
                open = Some(open.map_or((i, i), |(a, _)| (a, i)));
            } else if let Some(r) = open.take() {
                runs.push(r);
            }
        }
        runs.extend(open);
        let got: Vec<(f64, f64)> = s.clusters.iter().map(|c| (c.start, c.end)).collect();
        let want: Vec<(f64, f64)> = runs.iter().map(|&(a, b)| (a as f64 * s.step, b as f64 * s.step)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn huge_epsilon_covers_everything() {
        let p = two_freq();
        let s = scan(&p, 4.0, 100.0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.l_hat, s.step);
    }

    #[test]
    fn ladder_is_monotone() {
        let p = two_freq();
        let scans = scan_ladder(&p, &[0.4, 0.2, 0.1], Some(2000.0), DEFAULT_BUDGET).unwrap();
        assert!(scans[0].l_hat <= scans[1].l_hat && scans[1].l_hat <= scans[2].l_hat);
        assert!(scans.iter().all(|s| s.reliable));
    }

    #[test]
    fn ladder_validation() {
        assert!(validate_ladder(&[0.1]).is_err());
        assert!(validate_ladder(&[0.1, 0.2, 0.15]).is_err());
        assert!(validate_ladder(&[0.4, 0.2]).is_ok());
    }

    #[test]
    fn budget_is_enforced() {
        let p = two_freq();
        assert!(matches!(scan(&p, 0.01, 1e5, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn sampled_sine_has_period_two_pi() {
        let h = 0.01;
        let s = SampledTrajectory::from_fn(0.0, h, 5000, f64::sin);
        let r = scan_sampled(&s, 0.1, 20.0, 10.0, DEFAULT_BUDGET).unwrap();
        let reps = r.periods();
        for k in 1..=3 {
            let target = std::f64::consts::TAU * k as f64;
            assert!(reps.iter().any(|&t| (t - target).abs() < h), "{target} in {reps:?}");
        }
        assert_eq!(r.clusters.len(), 4);
    }

    #[test]
    fn sampled_constant_is_everywhere_periodic() {
        let s = SampledTrajectory::from_fn(0.0, 0.1, 300, |_| 1.5);
        let r = scan_sampled(&s, 0.1, 10.0, 5.0, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert!((r.l_hat - 0.1).abs() < 1e-12);
    }

    #[test]
    fn sampled_rejects_coarse_samples() {
        let s = SampledTrajectory::from_fn(0.0, 0.5, 300, f64::sin);
        assert!(matches!(scan_sampled(&s, 0.1, 10.0, 5.0, DEFAULT_BUDGET), Err(Error::Undersampled(_))));
    }

    #[test]
    fn sampled_reproduces_polynomial_scan() {
        let p = two_freq();
        let h = 1.0 / 512.0;
        let samples = p.sample(0.0, h, ((200.0 + 100.0) / h) as usize + 2).unwrap();
        let direct = scan(&p, 0.3, 200.0, DEFAULT_BUDGET).unwrap();
        let sampled = scan_sampled(&samples, 0.3, 200.0, 100.0, DEFAULT_BUDGET).unwrap();
        // the finite measurement span can only make more shifts qualify
        for c in &direct.clusters {
            assert!(sampled.clusters.iter().any(|d| d.start <= c.tau + h && c.tau - h <= d.end), "{c:?}");
        }
    }

    #[test]
    fn naito_ladder_shape() {
        let cf = ContinuedFraction::parse("sqrt2", 30).unwrap();
        let l = naito_ladder(&cf, 1.0, std::f64::consts::TAU, 8).unwrap();
        assert!((l.omega_tilde - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        for w in l.points.windows(2) {
            assert!(w[1].epsilon < w[0].epsilon && w[1].length > w[0].length);
        }
        assert!((l.slope() - 1.0).abs() < 0.05, "{}", l.slope());
        let e = 0.5 * (l.points[2].epsilon + l.points[3].epsilon);
        assert_eq!(l.bound(e, true), Some(l.points[3].length));
        assert_eq!(l.bound(e, false), Some(l.points[2].length));
    }
}
