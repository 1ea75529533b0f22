use num_complex::Complex64;

/// Uniform samples `x(t0 + i·step)` of a trajectory in `ℂ^d`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrajectory {
    t0: f64,
    step: f64,
    dim: usize,
    values: Vec<Complex64>,
}

impl SampledTrajectory {
    pub fn new(t0: f64, step: f64, dim: usize, values: Vec<Complex64>) -> Self {
        assert!(dim > 0 && values.len() % dim == 0, "values must hold whole samples");
        assert!(step > 0.0, "sample step must be positive");
        SampledTrajectory { t0, step, dim, values }
    }

    pub fn from_real(t0: f64, step: f64, dim: usize, values: &[f64]) -> Self {
        SampledTrajectory::new(t0, step, dim, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(t0: f64, step: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let v: Vec<f64> = (0..n).map(|i| f(t0 + step * i as f64)).collect();
        SampledTrajectory::from_real(t0, step, 1, &v)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn sample(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.step * i as f64
    }

    /// `|x_i - x_j|`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.sample(i).iter().zip(self.sample(j)).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest distance between neighbouring samples.
    pub fn step_modulus(&self) -> f64 {
        (1..self.len()).map(|i| self.distance(i - 1, i)).fold(0.0, f64::max)
    }

    /// Samples from index `start` on.
    pub fn tail(&self, start: usize) -> SampledTrajectory {
        SampledTrajectory::new(self.time(start), self.step, self.dim, self.values[start * self.dim..].to_vec())
    }

    /// Every `k`-th sample.
    pub fn stride(&self, k: usize) -> SampledTrajectory {
        let values = (0..self.len()).step_by(k.max(1)).flat_map(|i| self.sample(i).to_vec()).collect();
        SampledTrajectory::new(self.t0, self.step * k.max(1) as f64, self.dim, values)
    }

    /// Flattened real and imaginary parts, one `2d` row per sample.
    pub fn real_points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.sample(i).iter().flat_map(|z| [z.re, z.im]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_modulus() {
        let s = SampledTrajectory::from_fn(0.0, 0.5, 5, |t| t);
        assert_eq!(s.len(), 5);
        assert!((s.step_modulus() - 0.5).abs() < 1e-15);
        assert_eq!(s.tail(2).time(0), 1.0);
        assert_eq!(s.stride(2).len(), 3);
    }
}
