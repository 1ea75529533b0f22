//! Quasiperiodic trigonometric polynomials.
//!
//! `P(t) = Σ_k A_k e^{iλ_k t}` with `λ_k = 2π Σ_j a_j^{(k)} ν_j` over a
//! [`FrequencyBasis`], amplitudes `A_k ∈ ℂ^d` with the Euclidean norm, and
//! the representing torus function `h(θ) = Σ_k A_k e^{i2π a^{(k)}·θ}` so that
//! `P(t) = h(ν_1 t, ..., ν_n t)`.

mod basis;
mod holder;
mod polyfile;
mod sampled;

pub use basis::{rows_independent, Frequency, FrequencyBasis};
pub use holder::{empirical_holder_constant, holder_compose, ComposedTrajectory, HolderMap, MapKind, PeriodTransfer};
pub use polyfile::{FrequencySpec, PolyFile, TermSpec};
pub use sampled::SampledTrajectory;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Maximum phase error tolerated by [`TrigPolynomial::evaluate`].
pub const PHASE_TOLERANCE: f64 = 1e-12;
/// Grid points per axis are chosen so that the torus grid stays below this size.
pub const DEFAULT_TORUS_GRID_POINTS: usize = 1 << 16;

/// Point of the flat torus `𝕋^n = ℝ^n/ℤ^n`, coordinates reduced to `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Self {
        TorusPoint(coords.into_iter().map(reduce_unit).collect())
    }

    pub fn zero(n: usize) -> Self {
        TorusPoint(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `max_j min(|θ'_j - θ''_j|, 1 - |θ'_j - θ''_j|)`.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let d = (a - b).abs();
                d.min(1.0 - d)
            })
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b))
    }

    pub fn add(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b))
    }
}

fn reduce_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// One Fourier term: integer exponent row over the basis and a vector amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exponents: Vec<i64>,
    pub amplitude: Vec<Complex64>,
}

impl Term {
    pub fn new(exponents: Vec<i64>, amplitude: Vec<Complex64>) -> Self {
        Term { exponents, amplitude }
    }

    pub fn scalar(exponents: Vec<i64>, amplitude: Complex64) -> Self {
        Term { exponents, amplitude: vec![amplitude] }
    }

    pub fn norm(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Certified enclosure `[lo, hi]` of a sup-distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftDistance {
    pub lo: f64,
    pub hi: f64,
    /// True when `lo` and `hi` come from the closed form for independent
    /// exponents and coincide up to rounding.
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    VerifiedYes,
    VerifiedNo,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct TrigPolynomial {
    basis: FrequencyBasis,
    terms: Vec<Term>,
    dim: usize,
    /// `λ_k / 2π = Σ_j a_j ν_j` in cycles per unit time.
    cycles: Vec<f64>,
    norms: Vec<f64>,
    lipschitz: f64,
    independent: bool,
    /// `Σ_j |a_j^{(k)}| e_j` per term: phase error per unit time.
    phase_error_rate: Vec<f64>,
}

impl TrigPolynomial {
    pub fn new(basis: FrequencyBasis, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Validation("a trigonometric polynomial needs at least one term".into()));
        }
        let n = basis.len();
        let dim = terms[0].amplitude.len();
        if dim == 0 {
            return Err(Error::Validation("amplitudes must have at least one coordinate".into()));
        }
        for (k, t) in terms.iter().enumerate() {
            if t.exponents.len() != n {
                return Err(Error::Validation(format!(
                    "term {k}: {} exponents for a basis of {n} frequencies",
                    t.exponents.len()
                )));
            }
            if t.amplitude.len() != dim {
                return Err(Error::Validation(format!("term {k}: amplitude dimension differs from {dim}")));
            }
            if t.norm() == 0.0 {
                return Err(Error::Validation(format!("term {k}: zero amplitude")));
            }
            if t.exponents.iter().all(|&a| a == 0) {
                // a constant term is allowed; it never moves under shifts
            }
        }
        for i in 0..terms.len() {
            for j in 0..i {
                if terms[i].exponents == terms[j].exponents {
                    return Err(Error::Validation(format!("terms {j} and {i} share the exponent row")));
                }
            }
        }
        let freqs: Vec<f64> = basis.frequencies().iter().map(|f| f.to_f64()).collect();
        let errs = basis.errors();
        let cycles: Vec<f64> = terms
            .iter()
            .map(|t| t.exponents.iter().zip(&freqs).map(|(&a, &f)| a as f64 * f).sum())
            .collect();
        let norms: Vec<f64> = terms.iter().map(Term::norm).collect();
        let lipschitz = norms.iter().zip(&cycles).map(|(a, c)| a * TAU * c.abs()).sum();
        let rows: Vec<Vec<i64>> = terms.iter().map(|t| t.exponents.clone()).collect();
        let independent = rows_independent(&rows);
        let phase_error_rate = terms
            .iter()
            .map(|t| t.exponents.iter().zip(&errs).map(|(&a, e)| a.unsigned_abs() as f64 * e).sum())
            .collect();
        Ok(TrigPolynomial { basis, terms, dim, cycles, norms, lipschitz, independent, phase_error_rate })
    }

    /// `Σ_k e^{i2π ν_k t}` with unit scalar amplitudes, one basis frequency per term.
    pub fn unit_sum(frequencies: &[&str]) -> Result<Self> {
        let basis = FrequencyBasis::parse(frequencies)?;
        let n = basis.len();
        let terms = (0..n)
            .map(|k| {
                let mut e = vec![0; n];
                e[k] = 1;
                Term::scalar(e, Complex64::new(1.0, 0.0))
            })
            .collect();
        TrigPolynomial::new(basis, terms)
    }

    pub fn basis(&self) -> &FrequencyBasis {
        &self.basis
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Lip(P) = Σ_k |A_k| |λ_k|`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Angular exponents `λ_k`.
    pub fn exponents(&self) -> Vec<f64> {
        self.cycles.iter().map(|c| TAU * c).collect()
    }

    pub fn amplitude_sum(&self) -> f64 {
        self.norms.iter().sum()
    }

    pub fn exponents_independent(&self) -> bool {
        self.independent
    }

    /// Closed form `sup_t |P(t+τ) - P(t)| = Σ_k |A_k||e^{iλ_kτ} - 1|` holds.
    pub fn has_exact_shift_distance(&self) -> bool {
        self.dim == 1 && self.independent
    }

    /// Per-coordinate bound on `|∂h/∂θ_j|`.
    pub fn coordinate_lipschitz(&self) -> Vec<f64> {
        (0..self.basis.len())
            .map(|j| {
                self.terms.iter().zip(&self.norms).map(|(t, a)| a * TAU * t.exponents[j].unsigned_abs() as f64).sum()
            })
            .collect()
    }

    /// Largest `|t|` at which the phases stay within [`PHASE_TOLERANCE`].
    pub fn certified_horizon(&self) -> f64 {
        let rate = self.phase_error_rate.iter().cloned().fold(0.0, f64::max);
        let by_precision = if rate > 0.0 { PHASE_TOLERANCE / rate } else { f64::INFINITY };
        // the double-double reduction needs |ν t| < 2^52
        let by_range = 2f64.powi(50) / self.basis.max_abs();
        by_precision.min(by_range)
    }

    /// Phase error bound (in cycles) at time `t`, including rounding.
    pub fn phase_error(&self, t: f64) -> f64 {
        let rate = self.phase_error_rate.iter().cloned().fold(0.0, f64::max);
        let amax = self.terms.iter().flat_map(|t| t.exponents.iter()).map(|a| a.unsigned_abs()).max().unwrap_or(1) as f64;
        rate * t.abs() + 8.0 * f64::EPSILON * amax * self.basis.len() as f64
    }

    /// Term phases `a^{(k)}·θ mod 1` at time `t`.
    fn term_phases(&self, t: f64) -> Vec<f64> {
        let theta = self.basis.torus_point(t);
        self.terms.iter().map(|term| lattice_phase(&term.exponents, &theta)).collect()
    }

    /// `P(t)`.
    pub fn evaluate(&self, t: f64) -> Result<Vec<Complex64>> {
        let horizon = self.certified_horizon();
        if t.abs() > horizon {
            return Err(Error::PrecisionExhausted(format!(
                "t = {t} exceeds the certified phase horizon {horizon:.3e}"
            )));
        }
        let phases = self.term_phases(t);
        Ok(self.combine(&phases))
    }

    fn combine(&self, phases: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (term, &ph) in self.terms.iter().zip(phases) {
            let e = Complex64::from_polar(1.0, TAU * ph);
            for (o, a) in out.iter_mut().zip(&term.amplitude) {
                *o += a * e;
            }
        }
        out
    }

    /// `h(θ)`.
    pub fn representing_function(&self, theta: &TorusPoint) -> Vec<Complex64> {
        let phases: Vec<f64> = self.terms.iter().map(|t| lattice_phase(&t.exponents, theta.coords())).collect();
        self.combine(&phases)
    }

    fn representing_raw(&self, theta: &[f64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for term in &self.terms {
            let e = Complex64::from_polar(1.0, TAU * lattice_phase(&term.exponents, theta));
            for (o, a) in out.iter_mut().zip(&term.amplitude) {
                *o += a * e;
            }
        }
    }

    /// Torus displacement `Δ = (ν_1 τ, ..., ν_n τ) mod 1`.
    pub fn displacement(&self, tau: f64) -> TorusPoint {
        TorusPoint(self.basis.torus_point(tau))
    }

    /// Triangle bound `Σ_k |A_k| 2|sin(π a^{(k)}·Δ)|` of the shift quality.
    /// This is the closed form used by scans; it is Lipschitz in `τ` with
    /// constant `Lip(P)`.
    pub fn quality_hi(&self, tau: f64) -> f64 {
        let theta = self.basis.torus_point(tau);
        self.terms
            .iter()
            .zip(&self.norms)
            .map(|(t, a)| a * 2.0 * (PI * lattice_phase(&t.exponents, &theta)).sin().abs())
            .sum()
    }

    /// Rounding and phase-precision slack to add to any distance at shift `τ`.
    pub fn distance_slack(&self, tau: f64) -> f64 {
        TAU * self.phase_error(tau) * self.amplitude_sum() + 1e-14 * self.amplitude_sum()
    }

    /// Enclosure of `sup_θ |h(θ + Δ) - h(θ)|` (the hull distance of a torus shift).
    pub fn displacement_distance(&self, delta: &TorusPoint) -> ShiftDistance {
        let c: Vec<f64> = self
            .terms
            .iter()
            .map(|t| 2.0 * (PI * lattice_phase(&t.exponents, delta.coords())).sin().abs())
            .collect();
        let hi: f64 = self.norms.iter().zip(&c).map(|(a, c)| a * c).sum();
        if self.has_exact_shift_distance() {
            return ShiftDistance { lo: hi, hi, exact: true };
        }
        let lo = self.cheap_lower_bound(&c);
        let (grid_max, grid_hi) = self.displacement_distance_grid(delta, self.default_grid());
        ShiftDistance { lo: lo.max(grid_max), hi: hi.min(grid_hi), exact: false }
    }

    /// Per-coordinate closed form, a valid lower bound when exponents are independent.
    fn cheap_lower_bound(&self, c: &[f64]) -> f64 {
        if !self.independent {
            return 0.0;
        }
        (0..self.dim)
            .map(|i| self.terms.iter().zip(c).map(|(t, c)| t.amplitude[i].norm() * c).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn default_grid(&self) -> usize {
        let n = self.basis.len() as f64;
        ((DEFAULT_TORUS_GRID_POINTS as f64).powf(1.0 / n).floor() as usize).max(2)
    }

    /// `(max over a g^n torus grid, grid max + modulus-of-continuity bound)`.
    pub fn displacement_distance_grid(&self, delta: &TorusPoint, g: usize) -> (f64, f64) {
        let n = self.basis.len();
        let total = g.pow(n as u32);
        let c: Vec<Complex64> = self
            .terms
            .iter()
            .map(|t| Complex64::from_polar(1.0, TAU * lattice_phase(&t.exponents, delta.coords())) - 1.0)
            .collect();
        let grid_max = (0..total)
            .into_par_iter()
            .map_init(
                || (vec![0.0; n], vec![Complex64::new(0.0, 0.0); self.dim]),
                |(theta, acc), idx| {
                    let mut r = idx;
                    for th in theta.iter_mut() {
                        *th = (r % g) as f64 / g as f64;
                        r /= g;
                    }
                    acc.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
                    for (term, ck) in self.terms.iter().zip(&c) {
                        let e = Complex64::from_polar(1.0, TAU * lattice_phase(&term.exponents, theta)) * ck;
                        for (o, a) in acc.iter_mut().zip(&term.amplitude) {
                            *o += a * e;
                        }
                    }
                    acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
                },
            )
            .reduce(|| 0.0, f64::max);
        // |∂D/∂θ_j| ≤ Σ_k |A_k||c_k| 2π|a_j|; any θ lies within 1/(2g) of the grid per axis
        let modulus: f64 = (0..n)
            .map(|j| {
                self.terms
                    .iter()
                    .zip(&self.norms)
                    .zip(&c)
                    .map(|((t, a), ck)| a * ck.norm() * TAU * t.exponents[j].unsigned_abs() as f64)
                    .sum::<f64>()
            })
            .sum::<f64>()
            / (2.0 * g as f64);
        (grid_max, grid_max + modulus)
    }

    /// Certified enclosure of `sup_t |P(t+τ) - P(t)|`.
    pub fn shift_distance(&self, tau: f64) -> ShiftDistance {
        let d = self.displacement_distance(&self.displacement(tau));
        let slack = self.distance_slack(tau);
        ShiftDistance { lo: (d.lo - slack).max(0.0), hi: d.hi + slack, exact: d.exact }
    }

    /// Shift distance with an explicit torus grid resolution (for refinement studies).
    pub fn shift_distance_grid(&self, tau: f64, g: usize) -> ShiftDistance {
        let (lo, hi) = self.displacement_distance_grid(&self.displacement(tau), g);
        let slack = self.distance_slack(tau);
        ShiftDistance { lo: (lo - slack).max(0.0), hi: hi + slack, exact: false }
    }

    /// Decides `sup_t |P(t+τ) - P(t)| ≤ ε`.
    pub fn is_almost_period(&self, tau: f64, eps: f64) -> Verdict {
        if tau == 0.0 {
            return Verdict::VerifiedYes;
        }
        let d = self.shift_distance(tau);
        verdict(d, eps)
    }

    /// Hull metric `ρ'(θ', θ'') = sup_θ |h(θ + θ') - h(θ + θ'')|`.
    pub fn hull_metric_distance(&self, a: &TorusPoint, b: &TorusPoint) -> ShiftDistance {
        self.displacement_distance(&a.sub(b))
    }

    /// Uniform samples `P(t0 + i·step)`, `i < n`.
    pub fn sample(&self, t0: f64, step: f64, n: usize) -> Result<SampledTrajectory> {
        let last = t0 + step * n as f64;
        if last.abs().max(t0.abs()) > self.certified_horizon() {
            return Err(Error::PrecisionExhausted(format!("sampling to t = {last} exceeds the phase horizon")));
        }
        let values: Vec<Complex64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| self.combine(&self.term_phases(t0 + step * i as f64)))
            .collect();
        Ok(SampledTrajectory::new(t0, step, self.dim, values))
    }

    /// Evaluates `h` on a torus point into a caller buffer (hot loops).
    pub fn representing_into(&self, theta: &[f64], out: &mut [Complex64]) {
        self.representing_raw(theta, out)
    }

    /// Real part `Re P(t)` per coordinate.
    pub fn evaluate_real(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.evaluate(t)?.into_iter().map(|z| z.re).collect())
    }

    /// The polynomial `Σ_k (A_k ∘ f) e^{iλ_k t}` for an amplitude map `f`.
    pub fn map_amplitudes(&self, f: impl Fn(Complex64) -> Complex64) -> Result<TrigPolynomial> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.exponents.clone(), t.amplitude.iter().map(|&a| f(a)).collect()))
            .collect();
        TrigPolynomial::new(self.basis.clone(), terms)
    }
}

pub(crate) fn verdict(d: ShiftDistance, eps: f64) -> Verdict {
    if d.hi <= eps {
        Verdict::VerifiedYes
    } else if d.lo > eps {
        Verdict::VerifiedNo
    } else {
        Verdict::Undecided
    }
}

/// `a·θ mod 1` in `[0, 1)`.
fn lattice_phase(a: &[i64], theta: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&aj, &th) in a.iter().zip(theta) {
        if aj != 0 {
            let x = aj as f64 * th;
            s += x - x.floor();
        }
    }
    reduce_unit(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_freq() -> TrigPolynomial {
        TrigPolynomial::unit_sum(&["1", "sqrt2"]).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn evaluate_at_zero_and_half() {
        let p = two_freq();
        assert!(close(p.evaluate(0.0).unwrap()[0], Complex64::new(2.0, 0.0), 1e-15));
        // -1 + e^{iπ√2}, reference from a 60-digit evaluation
        let v = p.evaluate(0.5).unwrap()[0];
        let reference = Complex64::new(-1.266255342041415488608932607, -0.963902532849877330288336855);
        assert!(close(v, reference, 1e-14), "{v}");
    }

    #[test]
    fn evaluate_bounded_by_amplitude_sum() {
        let p = two_freq();
        for i in 0..1000 {
            let t = i as f64 * 7.31;
            assert!(p.evaluate(t).unwrap()[0].norm() <= p.amplitude_sum() + 1e-12);
        }
    }

    #[test]
    fn representing_function_values() {
        let p = two_freq();
        let z = p.representing_function(&TorusPoint::zero(2))[0];
        assert!(close(z, Complex64::new(2.0, 0.0), 1e-15));
        let z = p.representing_function(&TorusPoint::new([0.5, 0.5]))[0];
        assert!(close(z, Complex64::new(-2.0, 0.0), 1e-15));
        for &t in &[0.3, 17.25, 1234.5, 98765.4321] {
            let theta = p.displacement(t);
            let a = p.representing_function(&theta)[0];
            let b = p.evaluate(t).unwrap()[0];
            assert!(close(a, b, 1e-10));
        }
    }

    #[test]
    fn shift_distance_at_twelve() {
        let p = two_freq();
        let d = p.shift_distance(12.0);
        assert!(d.exact);
        // 2|sin(12π√2)| from a 60-digit reference
        assert!((d.hi - 0.184696173606694148).abs() < 1e-12, "{d:?}");
        assert!(d.hi - d.lo < 1e-11);
        assert_eq!(p.shift_distance(0.0).hi < 1e-12, true);
    }

    #[test]
    fn shift_distance_against_dense_time_grid() {
        // independent check: brute-force sup over t ∈ [0, 10^4]
        let p = two_freq();
        let tau = 12.0;
        let mut best: f64 = 0.0;
        let n = 2_000_000;
        for i in 0..n {
            let t = i as f64 * (1e4 / n as f64);
            let a = p.evaluate(t + tau).unwrap()[0];
            let b = p.evaluate(t).unwrap()[0];
            best = best.max((a - b).norm());
        }
        let d = p.shift_distance(tau);
        // t + τ is rounded at t ~ 10^4, so the brute-force side carries ~1e-11 error
        assert!(best <= d.hi + 1e-10, "{best} {d:?}");
        assert!(d.hi - best < 1e-3, "grid sup {best} vs {d:?}");
    }

    #[test]
    fn almost_period_verdicts() {
        let p = two_freq();
        assert_eq!(p.is_almost_period(12.0, 0.2), Verdict::VerifiedYes);
        assert_eq!(p.is_almost_period(12.0, 0.1), Verdict::VerifiedNo);
        assert_eq!(p.is_almost_period(0.0, 1e-9), Verdict::VerifiedYes);
    }

    #[test]
    fn hi_bounded_by_twice_amplitude_sum() {
        let p = two_freq();
        for i in 0..500 {
            assert!(p.shift_distance(i as f64 * 0.913).hi <= 2.0 * p.amplitude_sum() + 1e-9);
        }
    }

    #[test]
    fn hull_metric_half_turn_on_first_coordinate() {
        let p = two_freq();
        let a = TorusPoint::new([0.5, 0.0]);
        let b = TorusPoint::zero(2);
        let d = p.hull_metric_distance(&a, &b);
        assert!((d.hi - 2.0).abs() < 1e-12 && (d.lo - 2.0).abs() < 1e-12);
        assert_eq!(p.hull_metric_distance(&b, &b).hi, 0.0);
    }

    #[test]
    fn hull_metric_lipschitz_in_torus_distance() {
        let p = two_freq();
        let lip = p.coordinate_lipschitz().iter().cloned().fold(0.0, f64::max);
        for i in 0..200 {
            let a = TorusPoint::new([i as f64 * 0.137, i as f64 * 0.291]);
            let b = TorusPoint::new([i as f64 * 0.071, i as f64 * 0.513]);
            let d = p.hull_metric_distance(&a, &b).hi;
            assert!(d <= lip * a.distance(&b) * 2.0 + 1e-12);
        }
    }

    #[test]
    fn vector_valued_enclosure_tightens_with_grid() {
        let basis = FrequencyBasis::parse(&["1", "sqrt2"]).unwrap();
        let terms = vec![
            Term::new(vec![1, 0], vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)]),
            Term::new(vec![0, 1], vec![Complex64::new(0.3, 0.0), Complex64::new(1.0, 0.0)]),
        ];
        let p = TrigPolynomial::new(basis, terms).unwrap();
        assert!(!p.has_exact_shift_distance());
        let d = p.shift_distance(3.3);
        assert!(d.lo <= d.hi);
        let coarse = p.shift_distance_grid(3.3, 16);
        let fine = p.shift_distance_grid(3.3, 256);
        assert!(fine.hi - fine.lo <= coarse.hi - coarse.lo);
        assert!(fine.lo <= d.hi + 1e-12 && d.lo <= fine.hi + 1e-12);
    }

    #[test]
    fn evaluation_beyond_horizon_fails() {
        let p = TrigPolynomial::new(
            FrequencyBasis::new(vec![Frequency::decimal("1.41421356", 8).unwrap()]).unwrap(),
            vec![Term::scalar(vec![1], Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        // eight digits leave a horizon of 10^-12 / 10^-8
        assert!(p.evaluate(5e-5).is_ok());
        assert!(matches!(p.evaluate(1.0), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn rejects_bad_terms() {
        let basis = FrequencyBasis::parse(&["1", "sqrt2"]).unwrap();
        let dup = vec![
            Term::scalar(vec![1, 0], Complex64::new(1.0, 0.0)),
            Term::scalar(vec![1, 0], Complex64::new(2.0, 0.0)),
        ];
        assert!(TrigPolynomial::new(basis.clone(), dup).is_err());
        let zero = vec![Term::scalar(vec![1, 0], Complex64::new(0.0, 0.0))];
        assert!(TrigPolynomial::new(basis, zero).is_err());
    }
}
