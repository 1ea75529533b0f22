//! Strongly monotone ODEs `u' + A(u) = f(t)` on `ℝ^m` with almost periodic
//! forcing `f = Re P`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apfun::{PolyFile, SampledTrajectory, TrigPolynomial};
use crate::dimension::least_squares;
use crate::error::{Error, Result};

pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;
pub const TRANSIENT_TOLERANCE: f64 = 1e-8;

/// Autonomous operators acting componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Operator {
    /// `A(u) = λ u`.
    Linear { lambda: f64 },
    /// `A(u) = c1 u + c2 u³`.
    Cubic { c1: f64, c2: f64 },
}

impl Operator {
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(u) {
            *o = match *self {
                Operator::Linear { lambda } => lambda * x,
                Operator::Cubic { c1, c2 } => c1 * x + c2 * x * x * x,
            };
        }
    }

    /// Declared `(M, α)` with `⟨Au - Av, u - v⟩ ≥ M |u - v|^α`.
    pub fn monotonicity(&self) -> Result<(f64, f64)> {
        match *self {
            Operator::Linear { lambda } if lambda > 0.0 => Ok((lambda, 2.0)),
            Operator::Cubic { c1, c2 } if c1 > 0.0 && c2 >= 0.0 => Ok((c1, 2.0)),
            other => Err(Error::Validation(format!("{other:?} is not strongly monotone"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionProblem {
    pub state_dim: usize,
    pub operator: Operator,
    pub m_const: f64,
    pub mono_alpha: f64,
    pub forcing: TrigPolynomial,
    pub step: f64,
    pub horizon: f64,
    pub initial: Vec<f64>,
}

impl EvolutionProblem {
    pub fn new(operator: Operator, forcing: TrigPolynomial, step: f64, horizon: f64) -> Result<Self> {
        let (m_const, mono_alpha) = operator.monotonicity()?;
        let state_dim = forcing.dim();
        if !(step > 0.0 && horizon > step) {
            return Err(Error::Validation(format!("need 0 < step < horizon, got {step}, {horizon}")));
        }
        let p = EvolutionProblem {
            state_dim,
            operator,
            m_const,
            mono_alpha,
            forcing,
            step,
            horizon,
            initial: vec![0.0; state_dim],
        };
        p.spot_check_monotonicity(2000, 0x6d6f6e6f)?;
        Ok(p)
    }

    pub fn with_initial(mut self, u0: Vec<f64>) -> Result<Self> {
        if u0.len() != self.state_dim {
            return Err(Error::Validation("initial state has the wrong dimension".into()));
        }
        self.initial = u0;
        Ok(self)
    }

    /// Radius of the box where trajectories live once the transient is over.
    pub fn sampling_radius(&self) -> f64 {
        2.0 * self.forcing.amplitude_sum() / self.m_const + 1.0
    }

    pub fn spot_check_monotonicity(&self, pairs: usize, seed: u64) -> Result<()> {
        let r = self.sampling_radius();
        let m = self.state_dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut au, mut av) = (vec![0.0; m], vec![0.0; m]);
        for _ in 0..pairs {
            let u: Vec<f64> = (0..m).map(|_| rng.random_range(-r..r)).collect();
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(-r..r)).collect();
            self.operator.apply(&u, &mut au);
            self.operator.apply(&v, &mut av);
            let lhs: f64 = (0..m).map(|i| (au[i] - av[i]) * (u[i] - v[i])).sum();
            let d: f64 = (0..m).map(|i| (u[i] - v[i]).powi(2)).sum::<f64>().sqrt();
            let rhs = self.m_const * d.powf(self.mono_alpha);
            if lhs < rhs * (1.0 - 1e-12) {
                return Err(Error::MonotonicityViolation { lhs, rhs });
            }
        }
        Ok(())
    }

    fn forcing_at(&self, t: f64) -> Result<Vec<f64>> {
        self.forcing.evaluate_real(t)
    }

    /// Classical RK4 with fixed step `h`, sampled every step.
    fn rk4(&self, u0: &[f64], h: f64, n: usize) -> Result<Vec<f64>> {
        let m = self.state_dim;
        let mut out = Vec::with_capacity((n + 1) * m);
        let mut u = u0.to_vec();
        out.extend_from_slice(&u);
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut tmp = vec![0.0; m];
        let rhs = |t: f64, x: &[f64], k: &mut [f64]| -> Result<()> {
            self.operator.apply(x, k);
            let f = self.forcing_at(t)?;
            for (ki, fi) in k.iter_mut().zip(f) {
                *ki = fi - *ki;
            }
            Ok(())
        };
        for i in 0..n {
            let t = i as f64 * h;
            rhs(t, &u, &mut k1)?;
            for j in 0..m {
                tmp[j] = u[j] + 0.5 * h * k1[j];
            }
            rhs(t + 0.5 * h, &tmp, &mut k2)?;
            for j in 0..m {
                tmp[j] = u[j] + 0.5 * h * k2[j];
            }
            rhs(t + 0.5 * h, &tmp, &mut k3)?;
            for j in 0..m {
                tmp[j] = u[j] + h * k3[j];
            }
            rhs(t + h, &tmp, &mut k4)?;
            for j in 0..m {
                u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            if !u.iter().all(|x| x.is_finite()) {
                return Err(Error::NonConvergent(format!("state blew up at t = {}", t + h)));
            }
            out.extend_from_slice(&u);
        }
        Ok(out)
    }
}

/// Forcing given by path (relative to the problem file) or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForcingSpec {
    Path(PathBuf),
    Inline(PolyFile),
}

/// TOML description of an evolution problem.
///
/// ```toml
/// operator = { kind = "linear", lambda = 2.0 }
/// forcing = "forcing.toml"
/// step = 0.01
/// horizon = 400.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub operator: Operator,
    pub forcing: ForcingSpec,
    pub step: f64,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    /// Measurement span for transfer pairs; a quarter of the settled part by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))
    }

    /// Loads the file and inlines a forcing given by path.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        let mut pf = ProblemFile::parse(&text)?;
        if let ForcingSpec::Path(p) = &pf.forcing {
            let full = path.parent().unwrap_or(Path::new("")).join(p);
            pf.forcing = ForcingSpec::Inline(PolyFile::load(&full)?);
        }
        Ok(pf)
    }

    pub fn build(&self) -> Result<EvolutionProblem> {
        let ForcingSpec::Inline(poly) = &self.forcing else {
            return Err(Error::Validation("forcing path was not resolved".into()));
        };
        let p = EvolutionProblem::new(self.operator, poly.build()?, self.step, self.horizon)?;
        match &self.initial {
            Some(u0) => p.with_initial(u0.clone()),
            None => Ok(p),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionRun {
    pub samples: SampledTrajectory,
    /// First sample time after which runs from different initial states agree.
    pub transient_end: f64,
    pub transient_index: usize,
    /// Post-transient sup difference between step `h` and step `h/2`.
    pub convergence_error: f64,
    /// `(t, |u₁(t) - u₂(t)|)` for the two contraction runs, every 1/10 time unit.
    pub contraction: Vec<(f64, f64)>,
}

impl EvolutionRun {
    pub fn tail(&self) -> SampledTrajectory {
        self.samples.tail(self.transient_index)
    }
}

fn sup_diff(a: &[f64], b: &[f64], m: usize, from: usize) -> f64 {
    a.chunks(m)
        .zip(b.chunks(m))
        .skip(from)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Integrates on `[0, T]`, checks step convergence and locates the end of
/// the transient by comparing against a run from a shifted initial state.
pub fn integrate(problem: &EvolutionProblem) -> Result<EvolutionRun> {
    let h = problem.step;
    let n = (problem.horizon / h).round() as usize;
    let m = problem.state_dim;
    let shifted: Vec<f64> = problem.initial.iter().map(|x| x + problem.sampling_radius()).collect();
    let (main, (fine, other)) = rayon::join(
        || problem.rk4(&problem.initial, h, n),
        || rayon::join(|| problem.rk4(&problem.initial, h / 2.0, 2 * n), || problem.rk4(&shifted, h, n)),
    );
    let (main, fine, other) = (main?, fine?, other?);
    let diffs: Vec<f64> = main
        .chunks(m)
        .zip(other.chunks(m))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
        .collect();
    let Some(transient_index) = (0..diffs.len()).find(|&i| diffs[i..].iter().all(|&d| d < TRANSIENT_TOLERANCE)) else {
        return Err(Error::TransientNotSettled(format!("runs still differ by {:.3e} at T", diffs[diffs.len() - 1])));
    };
    if transient_index + 1 >= diffs.len() {
        return Err(Error::TransientNotSettled("runs agree only at the final sample".into()));
    }
    let fine_on_coarse: Vec<f64> = fine.chunks(m).step_by(2).flatten().copied().collect();
    let convergence_error = sup_diff(&main, &fine_on_coarse, m, transient_index);
    if convergence_error >= CONVERGENCE_TOLERANCE {
        return Err(Error::NonConvergent(format!(
            "halving the step changes the trajectory by {convergence_error:.3e}"
        )));
    }
    let every = ((0.1 / h).round() as usize).max(1);
    let contraction = diffs.iter().enumerate().step_by(every).map(|(i, &d)| (i as f64 * h, d)).collect();
    let values = main.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(EvolutionRun {
        samples: SampledTrajectory::new(0.0, h, m, values),
        transient_end: transient_index as f64 * h,
        transient_index,
        convergence_error,
        contraction,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferPair {
    pub tau: f64,
    pub eps_f: f64,
    pub eps_u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub pairs: Vec<TransferPair>,
    /// `ε_u ≈ C ε_f^{1/(α-1)}` with the exponent fixed by the monotonicity exponent.
    pub fitted_c: f64,
    /// Largest `ln ε_u - ln(C ε_f^{1/(α-1)})` over the pairs.
    pub residual_band: f64,
    /// Free log-log slope of `ε_u` against `ε_f`.
    pub exponent_fit: f64,
    pub exponent_expected: f64,
    /// The transfer exponent uses the monotonicity exponent for both symbols.
    pub note: String,
}

/// Largest `|u(t+τ) - u(t)|` over the samples `i ∈ [0, span)` of a tail, `τ = m·h`.
pub fn sampled_shift_quality(tail: &SampledTrajectory, m: usize, span: usize) -> Result<f64> {
    if m + span > tail.len() {
        return Err(Error::Validation(format!("shift {m} plus span {span} exceeds {} samples", tail.len())));
    }
    Ok((0..span).into_par_iter().map(|i| tail.distance(i + m, i)).reduce(|| 0.0, f64::max))
}

/// Measures `ε_u` at verified almost periods `τ` of the forcing.
///
/// Each `τ` is moved to the nearest sample multiple and its forcing quality
/// recomputed there from the certified bound of `P`.
pub fn transfer_check(problem: &EvolutionProblem, run: &EvolutionRun, taus: &[f64], span: f64) -> Result<TransferReport> {
    let tail = run.tail();
    let h = tail.step();
    let span_n = (span / h).round() as usize;
    let p = &problem.forcing;
    let mut pairs = Vec::new();
    for &tau in taus {
        let m = (tau / h).round() as usize;
        if m == 0 {
            continue;
        }
        let tau_grid = m as f64 * h;
        let eps_f = p.shift_distance(tau_grid).hi;
        let eps_u = sampled_shift_quality(&tail, m, span_n)?;
        pairs.push(TransferPair { tau: tau_grid, eps_f, eps_u });
    }
    if pairs.len() < 2 {
        return Err(Error::InsufficientLadder { points: pairs.len(), required: 2 });
    }
    let expo = 1.0 / (problem.mono_alpha - 1.0);
    let xs: Vec<f64> = pairs.iter().map(|q| q.eps_f.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|q| q.eps_u.max(1e-300).ln()).collect();
    let (exponent_fit, _, _) = least_squares(&xs, &ys);
    let ln_c = xs.iter().zip(&ys).map(|(x, y)| y - expo * x).sum::<f64>() / xs.len() as f64;
    let residual_band = xs.iter().zip(&ys).map(|(x, y)| y - expo * x - ln_c).fold(0.0, f64::max);
    Ok(TransferReport {
        pairs,
        fitted_c: ln_c.exp(),
        residual_band,
        exponent_fit,
        exponent_expected: expo,
        note: format!("exponent 1/(μ-1) evaluated with μ = α = {}", problem.mono_alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apfun::{FrequencyBasis, Term};

    fn sine_forcing() -> TrigPolynomial {
        // Re(-i e^{it}) = sin t, frequency 1/(2π) cycles per unit time
        let basis = FrequencyBasis::new(vec![crate::apfun::Frequency::parse("inv2pi").unwrap()]).unwrap();
        TrigPolynomial::new(basis, vec![Term::scalar(vec![1], Complex64::new(0.0, -1.0))]).unwrap()
    }

    #[test]
    fn linear_closed_form() {
        let p = EvolutionProblem::new(Operator::Linear { lambda: 2.0 }, sine_forcing(), 0.01, 40.0).unwrap();
        let run = integrate(&p).unwrap();
        let tail = run.tail();
        let err = (0..tail.len())
            .map(|i| {
                let t = tail.time(i);
                (tail.sample(i)[0].re - (2.0 * t.sin() - t.cos()) / 5.0).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn contraction_is_monotone() {
        let p = EvolutionProblem::new(Operator::Cubic { c1: 2.0, c2: 1.0 }, sine_forcing(), 0.01, 30.0).unwrap();
        let run = integrate(&p).unwrap();
        let d: Vec<f64> = run.contraction.iter().map(|c| c.1).filter(|&x| x > 1e-13).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
        // rate at least e^{-M t}
        for &(t, x) in &run.contraction {
            assert!(x <= run.contraction[0].1 * (-2.0 * t).exp() * 1.0001 + 1e-12);
        }
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(EvolutionProblem::new(Operator::Linear { lambda: -1.0 }, sine_forcing(), 0.01, 10.0).is_err());
    }
}
