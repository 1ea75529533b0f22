//! Pointwise Hölder maps `χ: ℂ → ℂ` and their action on almost periods.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SampledTrajectory, ShiftDistance, TorusPoint, TrigPolynomial};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    Identity,
    /// `z |z|^{-1/2}`: halves the modulus exponent, keeps the argument.
    RadialSqrt,
    /// `a z + b z̄`, bi-Lipschitz when `|a| ≠ |b|`.
    RealLinear { a: f64, b: f64 },
}

/// A map applied coordinatewise with `|χ(x) - χ(y)| ≤ C |x - y|^α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderMap {
    pub kind: MapKind,
    pub alpha: f64,
    pub constant: f64,
}

impl HolderMap {
    pub fn identity() -> Self {
        HolderMap { kind: MapKind::Identity, alpha: 1.0, constant: 1.0 }
    }

    pub fn radial_sqrt() -> Self {
        HolderMap { kind: MapKind::RadialSqrt, alpha: 0.5, constant: std::f64::consts::SQRT_2 }
    }

    pub fn real_linear(a: f64, b: f64) -> Result<Self> {
        if a.abs() == b.abs() {
            return Err(Error::Validation("a z + b z̄ needs |a| ≠ |b| to be invertible".into()));
        }
        Ok(HolderMap { kind: MapKind::RealLinear { a, b }, alpha: 1.0, constant: a.abs() + b.abs() })
    }

    /// Same map with a caller-declared `(C, α)`.
    pub fn declared(kind: MapKind, alpha: f64, constant: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) || constant <= 0.0 {
            return Err(Error::Validation(format!("need 0 < α ≤ 1 and C > 0, got α = {alpha}, C = {constant}")));
        }
        Ok(HolderMap { kind, alpha, constant })
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        match self.kind {
            MapKind::Identity => z,
            MapKind::RadialSqrt => {
                let r = z.norm();
                if r == 0.0 {
                    z
                } else {
                    z / r.sqrt()
                }
            }
            MapKind::RealLinear { a, b } => z * a + z.conj() * b,
        }
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().map(|&z| self.apply(z)).collect()
    }

    /// Constant for the Euclidean norm on `ℂ^d` when applied coordinatewise.
    pub fn constant_for_dim(&self, d: usize) -> f64 {
        self.constant * (d as f64).powf((1.0 - self.alpha) / 2.0)
    }

    /// Lipschitz constant of `χ^{-1}` on the image of the ball `|z| ≤ radius`.
    pub fn inverse_lipschitz(&self, radius: f64) -> Option<f64> {
        match self.kind {
            MapKind::Identity => Some(1.0),
            // inverse w ↦ w|w| on |w| ≤ √radius
            MapKind::RadialSqrt => Some(2.0 * radius.sqrt()),
            MapKind::RealLinear { a, b } => Some(1.0 / (a.abs() - b.abs()).abs()),
        }
    }

    pub fn is_bi_lipschitz(&self) -> bool {
        matches!(self.kind, MapKind::Identity | MapKind::RealLinear { .. })
    }

    /// Checks the declared bound on `pairs` random pairs drawn from `values`.
    pub fn spot_check(&self, values: &[Complex64], dim: usize, pairs: usize, seed: u64) -> Result<f64> {
        let n = values.len() / dim;
        if n < 2 {
            return Ok(0.0);
        }
        let c = self.constant_for_dim(dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let (x, y) = (&values[i * dim..(i + 1) * dim], &values[j * dim..(j + 1) * dim]);
            let dx = euclid(x, y);
            if dx == 0.0 {
                continue;
            }
            let lhs = euclid(&self.apply_vec(x), &self.apply_vec(y));
            let rhs = c * dx.powf(self.alpha);
            if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::HolderViolation { lhs, rhs });
            }
            worst = worst.max(lhs / rhs);
        }
        Ok(worst)
    }

    pub fn transfer(&self, dim: usize) -> PeriodTransfer {
        PeriodTransfer { alpha: self.alpha, constant: self.constant_for_dim(dim) }
    }
}

fn euclid(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Every `δ`-almost period of `u` is a `C δ^α`-almost period of `χ∘u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodTransfer {
    pub alpha: f64,
    pub constant: f64,
}

impl PeriodTransfer {
    /// Quality guaranteed for `χ∘u` at a shift of quality `delta` for `u`.
    pub fn image_epsilon(&self, delta: f64) -> f64 {
        self.constant * delta.powf(self.alpha)
    }

    /// Quality of `u` needed for a `C ε`-almost period of `χ∘u`: `ε^{1/α}`.
    pub fn source_epsilon(&self, eps: f64) -> f64 {
        eps.powf(1.0 / self.alpha)
    }
}

/// Applies `χ` to samples after spot-checking the declared Hölder bound.
pub fn holder_compose(
    samples: &SampledTrajectory,
    map: &HolderMap,
    pairs: usize,
    seed: u64,
) -> Result<(SampledTrajectory, PeriodTransfer)> {
    map.spot_check(samples.values(), samples.dim(), pairs, seed)?;
    let values = samples.values().iter().map(|&z| map.apply(z)).collect();
    let out = SampledTrajectory::new(samples.t0(), samples.step(), samples.dim(), values);
    Ok((out, map.transfer(samples.dim())))
}

/// `χ∘P` for a trigonometric polynomial `P`, measured on the torus.
#[derive(Clone, Debug)]
pub struct ComposedTrajectory {
    poly: TrigPolynomial,
    map: HolderMap,
    transfer: PeriodTransfer,
    inverse_lipschitz: Option<f64>,
    grid: usize,
}

impl ComposedTrajectory {
    pub fn new(poly: TrigPolynomial, map: HolderMap) -> Result<Self> {
        let d = poly.dim();
        let grid = 48usize.min(poly.default_grid());
        // spot check on the range of h
        let n = poly.basis().len();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut vals = Vec::with_capacity(4096 * d);
        for _ in 0..4096 {
            let th = TorusPoint::new((0..n).map(|_| rng.random::<f64>()));
            vals.extend(poly.representing_function(&th));
        }
        map.spot_check(&vals, d, 20_000, 0x5eed)?;
        let radius = poly.amplitude_sum();
        Ok(ComposedTrajectory {
            transfer: map.transfer(d),
            inverse_lipschitz: map.inverse_lipschitz(radius).map(|l| l * (d as f64).sqrt()),
            poly,
            map,
            grid,
        })
    }

    pub fn poly(&self) -> &TrigPolynomial {
        &self.poly
    }

    pub fn map(&self) -> &HolderMap {
        &self.map
    }

    pub fn transfer(&self) -> PeriodTransfer {
        self.transfer
    }

    pub fn inverse_lipschitz(&self) -> Option<f64> {
        self.inverse_lipschitz
    }

    /// `χ(P(t))`.
    pub fn evaluate(&self, t: f64) -> Result<Vec<Complex64>> {
        Ok(self.map.apply_vec(&self.poly.evaluate(t)?))
    }

    /// Enclosure of `sup_t |χ(P(t+τ)) - χ(P(t))|` from the shift distance of `P`:
    /// `lo = d_lo / L_inv`, `hi = C d_hi^α`.
    pub fn transferred_distance(&self, tau: f64) -> ShiftDistance {
        let d = self.poly.shift_distance(tau);
        let hi = self.transfer.image_epsilon(d.hi);
        let lo = self.inverse_lipschitz.map_or(0.0, |l| d.lo / l);
        ShiftDistance { lo, hi, exact: false }
    }

    /// Torus-grid measurement of the sup (a lower estimate), refined locally.
    pub fn measured_distance(&self, tau: f64) -> f64 {
        self.measured_displacement(&self.poly.displacement(tau))
    }

    pub fn measured_displacement(&self, delta: &TorusPoint) -> f64 {
        let n = self.poly.basis().len();
        let g = self.grid;
        let total = g.pow(n as u32);
        let f = |theta: &[f64]| -> f64 {
            let d = self.poly.dim();
            let mut a = vec![Complex64::new(0.0, 0.0); d];
            let mut b = vec![Complex64::new(0.0, 0.0); d];
            let shifted: Vec<f64> = theta.iter().zip(delta.coords()).map(|(x, y)| x + y).collect();
            self.poly.representing_into(theta, &mut a);
            self.poly.representing_into(&shifted, &mut b);
            euclid(&self.map.apply_vec(&a), &self.map.apply_vec(&b))
        };
        let (best, arg) = (0..total)
            .into_par_iter()
            .map(|idx| {
                let mut r = idx;
                let theta: Vec<f64> = (0..n)
                    .map(|_| {
                        let v = (r % g) as f64 / g as f64;
                        r /= g;
                        v
                    })
                    .collect();
                (f(&theta), idx)
            })
            .reduce(|| (f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        // compass search from the best grid point
        let mut r = arg;
        let mut theta: Vec<f64> = (0..n)
            .map(|_| {
                let v = (r % g) as f64 / g as f64;
                r /= g;
                v
            })
            .collect();
        let mut value = best;
        let mut h = 0.5 / g as f64;
        while h > 1e-7 {
            let mut improved = false;
            for j in 0..n {
                for s in [-1.0, 1.0] {
                    let mut cand = theta.clone();
                    cand[j] += s * h;
                    let v = f(&cand);
                    if v > value {
                        value = v;
                        theta = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                h /= 2.0;
            }
        }
        value
    }
}

/// Largest `|χ(z) - χ(w)| / |z - w|^α` seen on a polar grid of the disk of radius `r`.
pub fn empirical_holder_constant(map: &HolderMap, radius: f64, n: usize) -> f64 {
    let pts: Vec<Complex64> = (0..n)
        .flat_map(|i| {
            let r = radius * (i as f64 + 0.5) / n as f64;
            (0..n).map(move |j| Complex64::from_polar(r, TAU * j as f64 / n as f64))
        })
        .chain(std::iter::once(Complex64::new(0.0, 0.0)))
        .collect();
    pts.par_iter()
        .map(|&z| {
            pts.iter()
                .filter(|&&w| w != z)
                .map(|&w| (map.apply(z) - map.apply(w)).norm() / (z - w).norm().powf(map.alpha))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_sqrt_values() {
        let m = HolderMap::radial_sqrt();
        let z = m.apply(Complex64::new(4.0, 0.0));
        assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let z = m.apply(Complex64::new(-4.0, 0.0));
        assert!((z - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.apply(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn radial_sqrt_constant_is_sufficient() {
        let m = HolderMap::radial_sqrt();
        let c = empirical_holder_constant(&m, 2.0, 40);
        assert!(c <= m.constant + 1e-12, "{c}");
        assert!(c > 1.3);
    }

    #[test]
    fn inverse_lipschitz_of_radial_sqrt() {
        let m = HolderMap::radial_sqrt();
        let l = m.inverse_lipschitz(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let z = Complex64::from_polar(2.0 * rng.random::<f64>(), TAU * rng.random::<f64>());
            let w = Complex64::from_polar(2.0 * rng.random::<f64>(), TAU * rng.random::<f64>());
            assert!((z - w).norm() <= l * (m.apply(z) - m.apply(w)).norm() + 1e-12);
        }
    }

    #[test]
    fn violation_is_reported() {
        let bad = HolderMap::declared(MapKind::RadialSqrt, 1.0, 1.0).unwrap();
        let vals: Vec<Complex64> = (0..200).map(|i| Complex64::new(i as f64 * 1e-4, 0.0)).collect();
        assert!(matches!(bad.spot_check(&vals, 1, 5000, 1), Err(Error::HolderViolation { .. })));
    }

    #[test]
    fn identity_transfer_is_identity() {
        let t = HolderMap::identity().transfer(1);
        assert_eq!(t.image_epsilon(0.3), 0.3);
        assert_eq!(t.source_epsilon(0.3), 0.3);
    }

    #[test]
    fn composed_distance_enclosure() {
        let p = TrigPolynomial::unit_sum(&["1", "sqrt2"]).unwrap();
        let c = ComposedTrajectory::new(p, HolderMap::radial_sqrt()).unwrap();
        for &tau in &[0.7, 5.0, 12.0, 29.0] {
            let d = c.transferred_distance(tau);
            let m = c.measured_distance(tau);
            assert!(d.lo <= m + 1e-9 && m <= d.hi + 1e-9, "{tau}: {d:?} {m}");
        }
    }
}
