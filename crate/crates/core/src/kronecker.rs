//! Solutions of the homogeneous Kronecker system `‖ν_j τ‖ < δ`.
//!
//! [`solve_one_freq`] walks the integer solutions of `‖qω‖ < δ` with the
//! three-gap return rule: from a solution with residue `r`, the next one is
//! `q + m` for the first valid `m ∈ {m⁺, m⁻, m⁺ + m⁻}`, where `m⁺` (`m⁻`) is
//! the least denominator whose residue lies in `(0, 2δ)` (`(-2δ, 0)`); both
//! are semiconvergent denominators. Every comparison is made on exact
//! rational enclosures of `ω`. [`solve_grid`] is the exhaustive oracle.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::apfun::{FrequencyBasis, TorusPoint};
use crate::contfrac::{expand_certified, ContinuedFraction};
use crate::error::{Error, Result};
use crate::exact::{dist_to_int, f64_to_rational, rational_to_f64, DoubleDouble, RatInterval};

const MAX_DEPTH: usize = 4096;

#[derive(Clone, Debug)]
pub struct KroneckerSystem {
    pub basis: FrequencyBasis,
    pub delta: f64,
    pub target: TorusPoint,
}

impl KroneckerSystem {
    pub fn homogeneous(basis: FrequencyBasis, delta: f64) -> Result<Self> {
        let n = basis.len();
        KroneckerSystem::new(basis, delta, TorusPoint::zero(n))
    }

    pub fn new(basis: FrequencyBasis, delta: f64, target: TorusPoint) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::Validation(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        if target.dim() != basis.len() {
            return Err(Error::Validation("target dimension differs from the basis".into()));
        }
        Ok(KroneckerSystem { basis, delta, target })
    }

    pub fn is_homogeneous(&self) -> bool {
        self.target.coords().iter().all(|&x| x == 0.0)
    }

    /// `max_j ‖ν_j τ - target_j‖`.
    pub fn quality(&self, tau: f64) -> f64 {
        self.basis
            .frequencies()
            .iter()
            .zip(self.target.coords())
            .map(|(f, &c)| dist_to_int(f.phase(tau) - c))
            .fold(0.0, f64::max)
    }

    /// Rounding bound on [`KroneckerSystem::quality`] at `τ`.
    pub fn quality_error(&self, tau: f64) -> f64 {
        let e = self.basis.errors().iter().cloned().fold(0.0, f64::max);
        e * tau.abs() + 8.0 * f64::EPSILON
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Convergent,
    GridScan,
}

/// A solution interval of real `τ` around `center`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    /// `max_j ‖ν_j · center‖`.
    pub quality: f64,
    /// The center is an integer that satisfies the system on its own.
    pub on_lattice: bool,
}

impl Solution {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub window: f64,
    pub delta: f64,
    pub max_gap: f64,
    pub method: SolveMethod,
}

impl SolutionSet {
    fn new(solutions: Vec<Solution>, window: f64, delta: f64, method: SolveMethod) -> Self {
        let centers: Vec<f64> = solutions.iter().map(|s| s.center).collect();
        let max_gap = max_gap(&centers, window);
        SolutionSet { solutions, window, delta, max_gap, method }
    }

    pub fn centers(&self) -> Vec<f64> {
        self.solutions.iter().map(|s| s.center).collect()
    }

    /// Integer centers that satisfy the system themselves.
    pub fn lattice_centers(&self) -> Vec<u64> {
        self.solutions.iter().filter(|s| s.on_lattice).map(|s| s.center as u64).collect()
    }

    pub fn off_lattice(&self) -> usize {
        self.solutions.iter().filter(|s| !s.on_lattice).count()
    }
}

/// Largest gap between consecutive points of `[0, window]`, edges included.
pub fn max_gap(sorted: &[f64], window: f64) -> f64 {
    let Some(&first) = sorted.first() else { return window };
    let inner = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    inner.max(first).max(window - sorted[sorted.len() - 1])
}

/// Exact enclosure of `ω`, deepened on demand.
struct Enclosure {
    cf: ContinuedFraction,
    iv: RatInterval,
    fast: DoubleDouble,
    fast_err: f64,
}

impl Enclosure {
    fn new(cf: &ContinuedFraction) -> Result<Self> {
        let cf = expand_certified(cf.source(), cf.len().max(64))?;
        let iv = cf.enclosure();
        let (fast, fast_err) = fast_value(&iv);
        Ok(Enclosure { cf, iv, fast, fast_err })
    }

    fn deepen(&mut self) -> Result<()> {
        let depth = self.cf.len() * 2;
        if depth > MAX_DEPTH {
            return Err(Error::DepthExhausted(format!("ω needs more than {MAX_DEPTH} terms to decide")));
        }
        let cf = expand_certified(self.cf.source(), depth)?;
        if cf.len() <= self.cf.len() {
            return Err(Error::PrecisionExhausted("the seed of ω cannot separate the residue from δ".into()));
        }
        self.iv = cf.enclosure();
        (self.fast, self.fast_err) = fast_value(&self.iv);
        self.cf = cf;
        Ok(())
    }

    /// Signed residue `mω - round(mω)` as a certified interval.
    fn residue(&mut self, m: &BigInt) -> Result<RatInterval> {
        loop {
            if let Some((_, r)) = self.iv.scale_int(m).centered_residue() {
                if !(r.lo.is_zero() && r.hi.is_zero()) {
                    return Ok(r);
                }
            }
            self.deepen()?;
        }
    }

    /// Orders the residue of `m` against `c`; exact arithmetic only when
    /// the double-double residue is within its error bound of `c`.
    fn compare(&mut self, m: &BigInt, c: f64) -> Result<Ordering> {
        if let Some(mf) = m.to_f64().filter(|x| *x < 2f64.powi(50)) {
            let x = self.fast.frac_mul(mf);
            let r = if x > 0.5 { x - 1.0 } else { x };
            let err = self.fast_err * mf + 8.0 * f64::EPSILON;
            if r.abs() < 0.5 - err {
                if r + err < c {
                    return Ok(Ordering::Less);
                }
                if r - err > c {
                    return Ok(Ordering::Greater);
                }
            }
        }
        let c = f64_to_rational(c);
        let c = &c;
        loop {
            let r = self.residue(m)?;
            if &r.hi < c {
                return Ok(Ordering::Less);
            }
            if &r.lo > c {
                return Ok(Ordering::Greater);
            }
            self.deepen()?;
        }
    }

    fn in_open(&mut self, m: &BigInt, lo: f64, hi: f64) -> Result<bool> {
        Ok(self.compare(m, lo)? == Ordering::Greater && self.compare(m, hi)? == Ordering::Less)
    }

    /// Semiconvergent denominators `q_{k-1} + j q_k` in increasing order, up to `limit`.
    fn semiconvergents(&mut self, limit: &BigInt) -> Result<Vec<BigInt>> {
        loop {
            let conv = self.cf.all_convergents();
            let mut out = vec![];
            let mut q_prev = BigInt::zero();
            let mut reached = false;
            for k in 0..conv.len() {
                let qk = conv[k].q.clone();
                if k + 1 < conv.len() {
                    let a = self.cf.term(k + 1).clone();
                    let mut j = BigInt::from(1);
                    while j <= a {
                        let d = &q_prev + &j * &qk;
                        if &d > limit {
                            reached = true;
                            break;
                        }
                        out.push(d);
                        j += 1;
                    }
                } else if &qk > limit {
                    reached = true;
                }
                if reached {
                    break;
                }
                q_prev = qk;
            }
            if reached {
                out.insert(0, BigInt::from(1));
                out.sort();
                out.dedup();
                return Ok(out);
            }
            self.deepen()?;
        }
    }
}

fn fast_value(iv: &RatInterval) -> (DoubleDouble, f64) {
    let mid = iv.midpoint();
    let err = rational_to_f64(&iv.width()) * 0.5 * (1.0 + 1e-9) + rational_to_f64(&mid).abs() * 2f64.powi(-100);
    (DoubleDouble::from_rational(&mid), err)
}

/// Least `m ≤ limit` whose residue lies in `(lo, hi)`, among semiconvergents.
fn least_in(enc: &mut Enclosure, cands: &[BigInt], lo: f64, hi: f64) -> Result<Option<BigInt>> {
    for m in cands {
        if enc.in_open(m, lo, hi)? {
            return Ok(Some(m.clone()));
        }
    }
    Ok(None)
}

/// Integer solutions `q ∈ (0, W]` of `‖qω‖ < δ`, each widened to the real
/// interval of `τ` near `q` with `‖τ‖ < δ` and `‖τω‖ < δ`.
pub fn solve_one_freq(omega: &ContinuedFraction, delta: f64, window: f64) -> Result<SolutionSet> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Validation(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    if !(window > 0.0) {
        return Err(Error::Validation("window must be positive".into()));
    }
    if omega.a0().is_negative() {
        return Err(Error::Domain("ω must be positive".into()));
    }
    let w = BigInt::from(window.floor() as u64);
    let mut enc = Enclosure::new(omega)?;
    let cands = enc.semiconvergents(&(&w + 1))?;
    let m_plus = least_in(&mut enc, &cands, 0.0, 2.0 * delta)?;
    let m_minus = least_in(&mut enc, &cands, -2.0 * delta, 0.0)?;
    let steps: Vec<BigInt> = {
        let mut s: Vec<BigInt> = [m_plus.clone(), m_minus.clone()].into_iter().flatten().collect();
        if let (Some(a), Some(b)) = (&m_plus, &m_minus) {
            s.push(a + b);
        }
        s.sort();
        s
    };
    let omega_f = rational_to_f64(&enc.iv.midpoint());
    let mut found = Vec::new();
    // the walk starts from q = 0 (residue 0) and never exceeds the window
    let complete = m_plus.is_some() && m_minus.is_some();
    let mut q = BigInt::zero();
    loop {
        let mut next = None;
        let mut beyond = false;
        for m in &steps {
            let cand = &q + m;
            if cand > w {
                beyond = true;
                break;
            }
            if enc.in_open(&cand, -delta, delta)? {
                next = Some(cand);
                break;
            }
        }
        let Some(cand) = next else {
            // a missing m± exceeds the window, and so does any return that needs it
            if beyond || !complete {
                break;
            }
            return Err(Error::DepthExhausted(format!("no three-gap return from q = {q}")));
        };
        let qf = cand.to_f64().unwrap_or(f64::INFINITY);
        let x = enc.fast.frac_mul(qf);
        let rf = if x > 0.5 { x - 1.0 } else { x };
        // |x| < δ and |r + xω| < δ
        let lo = (-delta).max((-delta - rf) / omega_f);
        let hi = delta.min((delta - rf) / omega_f);
        found.push(Solution { center: qf, lo: qf + lo, hi: qf + hi, quality: rf.abs(), on_lattice: true });
        q = cand;
    }
    Ok(SolutionSet::new(found, window, delta, SolveMethod::Convergent))
}

/// Exhaustive scan of `τ ∈ (0, W]` on the grid `i · step`.
///
/// `step` must satisfy `step ≤ δ / (2 max_j |ν_j|)`; it is snapped down to a
/// power of two so that integers are grid points. With an exact unit
/// frequency in a homogeneous system every cluster is labelled by the
/// integer inside it that solves the system; clusters without one are kept
/// with `on_lattice = false`.
pub fn solve_grid(system: &KroneckerSystem, window: f64, step: f64, budget: u64) -> Result<SolutionSet> {
    let max_nu = system.basis.max_abs();
    let bound = system.delta / (2.0 * max_nu);
    if !(step > 0.0) || step > bound {
        return Err(Error::Validation(format!("grid step {step} exceeds δ/(2 max|ν|) = {bound}")));
    }
    let step = 2f64.powi(step.log2().floor() as i32);
    let n = (window / step).floor() as u64;
    if n > budget {
        return Err(Error::BudgetExceeded { needed: n, budget });
    }
    if system.quality_error(window) > 1e-9 {
        return Err(Error::PrecisionExhausted("frequencies are too coarse for the window".into()));
    }
    let delta = system.delta;
    let chunk = 1u64 << 16;
    let nchunks = n.div_ceil(chunk);
    let runs: Vec<(u64, u64)> = (0..nchunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let a = c * chunk + 1;
            let b = ((c + 1) * chunk).min(n);
            let mut runs = Vec::new();
            let mut open: Option<u64> = None;
            for i in a..=b {
                let hit = system.quality(i as f64 * step) < delta;
                match (hit, open) {
                    (true, None) => open = Some(i),
                    (false, Some(s)) => {
                        runs.push((s, i - 1));
                        open = None;
                    }
                    _ => {}
                }
            }
            if let Some(s) = open {
                runs.push((s, b));
            }
            runs
        })
        .collect();
    let mut merged: Vec<(u64, u64)> = Vec::new();
    for (s, e) in runs {
        match merged.last_mut() {
            Some(last) if last.1 + 1 == s => last.1 = e,
            _ => merged.push((s, e)),
        }
    }
    let lattice = system.is_homogeneous() && system.basis.has_unit_frequency();
    let per_unit = (1.0 / step) as u64;
    let solutions = merged
        .into_iter()
        .map(|(s, e)| {
            let (lo, hi) = (s as f64 * step, e as f64 * step);
            if lattice {
                let first = s.div_ceil(per_unit);
                let last = e / per_unit;
                let hit = (first..=last).find(|&q| system.quality(q as f64) < delta);
                if let Some(q) = hit {
                    let center = q as f64;
                    return Solution { center, lo, hi, quality: system.quality(center), on_lattice: true };
                }
            }
            let best = (s..=e)
                .map(|i| (system.quality(i as f64 * step), i))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .expect("non-empty run");
            let center = best.1 as f64 * step;
            Solution { center, lo, hi, quality: best.0, on_lattice: false }
        })
        .collect();
    Ok(SolutionSet::new(solutions, window, delta, SolveMethod::GridScan))
}

/// Brute-force integer solutions of `‖qω‖ < δ` for `q ≤ limit`, in f64.
pub fn brute_force_centers(omega: f64, delta: f64, limit: u64) -> Vec<u64> {
    (1..=limit).filter(|&q| dist_to_int(q as f64 * omega) < delta).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> ContinuedFraction {
        ContinuedFraction::parse("sqrt2", 40).unwrap()
    }

    #[test]
    fn smallest_centers_for_sqrt2() {
        let s = solve_one_freq(&sqrt2(), 0.05, 100.0).unwrap();
        assert_eq!(&s.lattice_centers()[..5], &[12, 17, 29, 41, 53]);
        let s = solve_one_freq(&sqrt2(), 0.08, 30.0).unwrap();
        assert_eq!(s.lattice_centers(), vec![5, 12, 17, 24, 29]);
        assert!((s.solutions[1].quality - 0.0294372515228594).abs() < 1e-12);
    }

    #[test]
    fn one_qualifies_when_delta_exceeds_omega_distance() {
        let cf = ContinuedFraction::parse("phi", 30).unwrap();
        let s = solve_one_freq(&cf, 0.39, 10.0).unwrap();
        assert_eq!(s.lattice_centers()[0], 1);
    }

    #[test]
    fn matches_brute_force() {
        for name in ["sqrt2", "phi", "sqrt(3)", "sqrt(11)", "[0; 5, 1000, (1)]"] {
            let cf = ContinuedFraction::parse(name, 30).unwrap();
            let w = cf.to_f64();
            for &delta in &[0.3, 0.2, 0.11, 0.05, 0.013, 0.004] {
                let s = solve_one_freq(&cf, delta, 3000.0).unwrap();
                assert_eq!(s.lattice_centers(), brute_force_centers(w, delta, 3000), "{name} δ={delta}");
            }
        }
    }

    #[test]
    fn empty_window() {
        let s = solve_one_freq(&sqrt2(), 0.05, 10.0).unwrap();
        assert!(s.solutions.is_empty());
        assert_eq!(s.max_gap, 10.0);
    }

    #[test]
    fn intervals_contain_their_centers_and_satisfy_the_system() {
        let s = solve_one_freq(&sqrt2(), 0.05, 500.0).unwrap();
        for sol in &s.solutions {
            assert!(sol.lo < sol.center && sol.center < sol.hi);
            let mid = (sol.lo + sol.hi) / 2.0;
            assert!(dist_to_int(mid) < 0.05 && dist_to_int(mid * std::f64::consts::SQRT_2) < 0.05);
        }
    }

    #[test]
    fn grid_agrees_with_convergents() {
        let basis = FrequencyBasis::parse(&["1", "sqrt2"]).unwrap();
        let sys = KroneckerSystem::homogeneous(basis, 0.05).unwrap();
        let g = solve_grid(&sys, 200.0, 0.05 / (2.0 * 1.5), 1 << 30).unwrap();
        let c = solve_one_freq(&sqrt2(), 0.05, 200.0).unwrap();
        assert_eq!(g.lattice_centers(), c.lattice_centers());
    }

    #[test]
    fn grid_rejects_coarse_step_and_budget() {
        let basis = FrequencyBasis::parse(&["1", "sqrt2"]).unwrap();
        let sys = KroneckerSystem::homogeneous(basis, 0.05).unwrap();
        assert!(matches!(solve_grid(&sys, 100.0, 0.1, 1 << 30), Err(Error::Validation(_))));
        assert!(matches!(solve_grid(&sys, 1e4, 0.01, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn nearly_unconstrained() {
        let s = solve_one_freq(&sqrt2(), 0.4999, 1000.0).unwrap();
        assert!(s.max_gap <= 2.0);
    }

    #[test]
    fn max_gap_helper() {
        assert_eq!(max_gap(&[], 7.0), 7.0);
        assert_eq!(max_gap(&[2.0, 3.0, 8.0], 9.0), 5.0);
    }
}
