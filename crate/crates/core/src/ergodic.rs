//! Birkhoff averages of `u(t) = e^{i2πt} + e^{i2πωt}` and the closeness of
//! a Liouville-type trajectory to its rational neighbour.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apfun::TrigPolynomial;
use crate::contfrac::ContinuedFraction;
use crate::error::{Error, Result};
use crate::exact::rational_to_f64;

pub const QUADRATURE_TOLERANCE: f64 = 1e-4;
pub const BOUNDARY_SLACK: f64 = 1e-12;
const MAX_HALVINGS: usize = 10;
const SUM_CHUNK: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// `Re(z e^{-iφ}) > 0`.
    HalfPlane { phi: f64 },
    /// `r1 < |z| < r2`.
    Annulus { r1: f64, r2: f64 },
    /// `arg z ∈ (φ1, φ2)` measured counter-clockwise from `φ1`.
    Sector { phi1: f64, phi2: f64 },
}

impl Region {
    /// Signed distance-like margin: positive inside, negative outside.
    pub fn margin(&self, z: Complex64) -> f64 {
        match *self {
            Region::HalfPlane { phi } => (z * Complex64::from_polar(1.0, -phi)).re,
            Region::Annulus { r1, r2 } => {
                let r = z.norm();
                (r - r1).min(r2 - r)
            }
            Region::Sector { phi1, phi2 } => {
                let r = z.norm();
                if r == 0.0 {
                    return 0.0;
                }
                let width = (phi2 - phi1).rem_euclid(TAU);
                let a = (z.arg() - phi1).rem_euclid(TAU);
                if a < width {
                    r * (a.min(width - a)).min(PI / 2.0).sin()
                } else {
                    -r * ((a - width).min(TAU - a)).min(PI / 2.0).sin()
                }
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.margin(z) > 0.0
    }

    /// Indicator with boundary points weighted 1/2.
    fn weight(&self, z: Complex64) -> f64 {
        let m = self.margin(z);
        if m > BOUNDARY_SLACK {
            1.0
        } else if m < -BOUNDARY_SLACK {
            0.0
        } else {
            0.5
        }
    }

    pub fn catalog() -> Vec<(String, Region)> {
        vec![
            ("half-plane".into(), Region::HalfPlane { phi: 0.0 }),
            ("annulus-0.5-1.5".into(), Region::Annulus { r1: 0.5, r2: 1.5 }),
            ("sector-0-pi/2".into(), Region::Sector { phi1: 0.0, phi2: PI / 2.0 }),
            ("sector-0-pi/8".into(), Region::Sector { phi1: 0.0, phi2: PI / 8.0 }),
            ("sector-pi/3-pi/3+0.1".into(), Region::Sector { phi1: PI / 3.0, phi2: PI / 3.0 + 0.1 }),
        ]
    }
}

/// Fixed-chunk sum, independent of thread scheduling.
fn chunked_sum(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    let parts: Vec<f64> = (0..n.div_ceil(SUM_CHUNK))
        .into_par_iter()
        .map(|c| (c * SUM_CHUNK..((c + 1) * SUM_CHUNK).min(n)).map(&f).sum::<f64>())
        .collect();
    parts.iter().sum()
}

/// `μ(C)`: area of `{θ ∈ 𝕋² : e^{i2πθ₁} + e^{i2πθ₂} ∈ C}` on a `g × g` midpoint grid.
pub fn torus_oracle(region: &Region, g: usize) -> f64 {
    let w = chunked_sum(g * g, |idx| {
        let (i, j) = (idx / g, idx % g);
        let z = Complex64::from_polar(1.0, TAU * (i as f64 + 0.5) / g as f64)
            + Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / g as f64);
        region.weight(z)
    });
    w / (g * g) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffRun {
    pub omega: String,
    pub region: Region,
    pub horizons: Vec<f64>,
    pub averages: Vec<f64>,
    pub reference: f64,
    pub errors: Vec<f64>,
    /// Final quadrature step per horizon.
    pub steps: Vec<f64>,
}

/// Midpoint rule for `(1/T) ∫₀ᵀ χ_C(u(t)) dt` with `n` nodes.
fn midpoint_average(u: &TrigPolynomial, region: &Region, horizon: f64, n: usize) -> Result<f64> {
    let h = horizon / n as f64;
    if horizon > u.certified_horizon() {
        return Err(Error::PrecisionExhausted(format!("horizon {horizon} exceeds the phase horizon")));
    }
    let s = chunked_sum(n, |i| {
        let t = (i as f64 + 0.5) * h;
        region.weight(u.evaluate(t).expect("inside the horizon")[0])
    });
    Ok(s / n as f64)
}

/// Time averages of the canonical trajectory for `ω`, against the torus oracle.
pub fn birkhoff(omega: &str, region: Region, horizons: &[f64], initial_step: f64, oracle_grid: usize) -> Result<BirkhoffRun> {
    let u = TrigPolynomial::unit_sum(&["1", omega])?;
    if horizons.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Validation("horizons must be positive".into()));
    }
    let mut averages = Vec::new();
    let mut steps = Vec::new();
    for &t in horizons {
        let mut n = ((t / initial_step).ceil() as usize).max(16);
        let mut prev = midpoint_average(&u, &region, t, n)?;
        let mut converged = false;
        for _ in 0..MAX_HALVINGS {
            n *= 2;
            let next = midpoint_average(&u, &region, t, n)?;
            let change = (next - prev).abs();
            prev = next;
            if change < QUADRATURE_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Undersampled(format!("quadrature at T = {t} did not settle")));
        }
        averages.push(prev);
        steps.push(t / n as f64);
    }
    let reference = torus_oracle(&region, oracle_grid);
    let errors = averages.iter().map(|a| (a - reference).abs()).collect();
    Ok(BirkhoffRun { omega: omega.to_string(), region, horizons: horizons.to_vec(), averages, reference, errors, steps })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub k: usize,
    pub p: String,
    pub q: String,
    pub horizon: f64,
    /// Certified `(lo, hi)` for `|ω - p_k/q_k|`.
    pub gap: (f64, f64),
    /// `2π · gap_hi · T`.
    pub bound: f64,
    /// `2π · 10⁻⁹ · T`, the looser intermediate bound.
    pub loose_bound: f64,
    /// Largest `|u(t) - g(t)|` over the samples.
    pub measured: f64,
    pub samples: usize,
}

/// Compares `u(t) = e^{i2πt} + e^{i2πωt}` with `g(t) = e^{i2πt} + e^{i2π(p_k/q_k)t}` on `[0, T]`.
pub fn liouville_closeness(omega: &ContinuedFraction, k: usize, horizon: f64, samples: usize) -> Result<LiouvilleReport> {
    if !(horizon >= 0.0) {
        return Err(Error::Validation("horizon must be non-negative".into()));
    }
    let conv = omega.convergents(k + 1)?;
    let (lo, hi) = omega.approximation_gap(k)?;
    let c = &conv[k];
    let frac = BigRational::new(c.p.clone(), c.q.clone());
    let u = TrigPolynomial::new(
        crate::apfun::FrequencyBasis::new(vec![
            crate::apfun::Frequency::parse("1")?,
            crate::apfun::Frequency::from_cf(omega)?,
        ])?,
        unit_terms(),
    )?;
    let g = TrigPolynomial::new(
        crate::apfun::FrequencyBasis::new(vec![
            crate::apfun::Frequency::parse("1")?,
            crate::apfun::Frequency::rational(frac),
        ])?,
        unit_terms(),
    )?;
    let gap = (rational_to_f64(&lo), rational_to_f64(&hi));
    let n = samples.max(2);
    let measured = if horizon == 0.0 {
        0.0
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let t = horizon * i as f64 / (n - 1) as f64;
                let a = u.evaluate(t).map(|v| v[0]);
                let b = g.evaluate(t).map(|v| v[0]);
                match (a, b) {
                    (Ok(a), Ok(b)) => Ok((a - b).norm()),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                }
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max)
    };
    Ok(LiouvilleReport {
        k,
        p: c.p.to_string(),
        q: c.q.to_string(),
        horizon,
        gap,
        bound: TAU * gap.1 * horizon,
        loose_bound: TAU * 1e-9 * horizon,
        measured,
        samples: n,
    })
}

fn unit_terms() -> Vec<crate::apfun::Term> {
    vec![
        crate::apfun::Term::scalar(vec![1, 0], Complex64::new(1.0, 0.0)),
        crate::apfun::Term::scalar(vec![0, 1], Complex64::new(1.0, 0.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_plane_measure_is_one_half() {
        let m = torus_oracle(&Region::HalfPlane { phi: 0.0 }, 512);
        assert!((m - 0.5).abs() < 1e-12, "{m}");
    }

    #[test]
    fn sector_margins() {
        let s = Region::Sector { phi1: 0.0, phi2: PI / 2.0 };
        assert!(s.contains(Complex64::new(1.0, 1.0)));
        assert!(!s.contains(Complex64::new(-1.0, 1.0)));
        assert!(!s.contains(Complex64::new(1.0, -0.1)));
        let wrap = Region::Sector { phi1: 3.0 * PI / 2.0, phi2: PI / 4.0 };
        assert!(wrap.contains(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn annulus_measure_matches_area_fraction() {
        // |z| = 2|cos(π(θ₁-θ₂))|, so |z| < r has measure (2/π) asin(r/2)
        let m = torus_oracle(&Region::Annulus { r1: 0.0, r2: 1.0 }, 1024);
        let want = 2.0 / PI * (0.5f64).asin();
        assert!((m - want).abs() < 2e-3, "{m} vs {want}");
    }

    #[test]
    fn zero_horizon_is_zero_distance() {
        let cf = ContinuedFraction::parse("[0; 5, 10^9, (1)]", 10).unwrap();
        let r = liouville_closeness(&cf, 1, 0.0, 10).unwrap();
        assert_eq!(r.measured, 0.0);
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn sqrt2_average_approaches_reference() {
        let r = birkhoff("sqrt2", Region::HalfPlane { phi: 0.0 }, &[100.0, 1000.0], 0.01, 256).unwrap();
        assert!(r.errors[1] < 0.02, "{:?}", r.errors);
        assert!(r.averages.iter().all(|a| (0.0..=1.0).contains(a)));
    }
}
