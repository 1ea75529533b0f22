//! Log-log slope estimates of Diophantine and box-counting dimensions.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apfun::{ShiftDistance, TorusPoint, TrigPolynomial};
use crate::error::{Error, Result};
use crate::periods::PeriodScan;

pub const MIN_LADDER: usize = 4;
/// Relative count change allowed between a half sample and the full sample.
pub const DENSITY_TOLERANCE: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EstimateKind {
    Diophantine,
    LowerDiophantine,
    Box,
    Generalized { d: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub kind: EstimateKind,
    /// `(ε, value)` sorted from the coarsest scale down.
    pub ladder: Vec<(f64, f64)>,
    pub slope_upper: f64,
    pub slope_lower: f64,
    pub fit_slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the tail fit.
    pub residual: f64,
    pub tail_start: usize,
    /// Consecutive two-point slopes over the tail.
    pub slopes: Vec<f64>,
}

/// `(slope, intercept, rms residual)` of the least-squares line.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Default tail: drop the two coarsest scales, keeping at least three points.
pub fn default_tail_start(len: usize) -> usize {
    2.min(len.saturating_sub(3))
}

/// Slopes of `ln value` against `(ln 1/ε)^d`.
pub fn estimate_from_ladder(
    ladder: &[(f64, f64)],
    kind: EstimateKind,
    tail_start: Option<usize>,
) -> Result<DimensionEstimate> {
    if ladder.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { points: ladder.len(), required: MIN_LADDER });
    }
    if ladder.iter().any(|&(e, v)| !(e > 0.0 && e < 1.0) || !(v > 0.0)) {
        return Err(Error::Validation("ladder needs 0 < ε < 1 and positive values".into()));
    }
    let mut ladder = ladder.to_vec();
    ladder.sort_by(|a, b| b.0.total_cmp(&a.0));
    if ladder.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Validation("ladder scales must be distinct".into()));
    }
    let d = match kind {
        EstimateKind::Generalized { d } if d > 0.0 => d,
        EstimateKind::Generalized { d } => return Err(Error::Validation(format!("d must be positive, got {d}"))),
        _ => 1.0,
    };
    let tail_start = tail_start.unwrap_or_else(|| default_tail_start(ladder.len()));
    if ladder.len() - tail_start.min(ladder.len()) < 2 {
        return Err(Error::InsufficientLadder { points: ladder.len() - tail_start.min(ladder.len()), required: 2 });
    }
    let xs: Vec<f64> = ladder[tail_start..].iter().map(|&(e, _)| (1.0 / e).ln().powf(d)).collect();
    let ys: Vec<f64> = ladder[tail_start..].iter().map(|&(_, v)| v.ln()).collect();
    let slopes: Vec<f64> = (1..xs.len()).map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])).collect();
    let slope_upper = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let slope_lower = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let (fit_slope, intercept, residual) = least_squares(&xs, &ys);
    Ok(DimensionEstimate { kind, ladder, slope_upper, slope_lower, fit_slope, intercept, residual, tail_start, slopes })
}

fn scan_ladder_points(scans: &[PeriodScan]) -> Result<Vec<(f64, f64)>> {
    if scans.len() < MIN_LADDER {
        return Err(Error::InsufficientLadder { points: scans.len(), required: MIN_LADDER });
    }
    if let Some(s) = scans.iter().find(|s| !s.reliable) {
        return Err(Error::UnreliableScan {
            epsilon: s.epsilon,
            reason: format!("only {} clusters in a window of {}", s.clusters.len(), s.window),
        });
    }
    Ok(scans.iter().map(|s| (s.epsilon, s.l_hat)).collect())
}

/// `ln l_hat` against `ln 1/ε`: `slope_upper` estimates the Diophantine
/// dimension, `slope_lower` its lower variant.
pub fn diophantine_estimate(scans: &[PeriodScan]) -> Result<DimensionEstimate> {
    estimate_from_ladder(&scan_ladder_points(scans)?, EstimateKind::Diophantine, None)
}

/// `ln l_hat` against `(ln 1/ε)^d`.
pub fn generalized_estimate(scans: &[PeriodScan], d: f64) -> Result<DimensionEstimate> {
    estimate_from_ladder(&scan_ladder_points(scans)?, EstimateKind::Generalized { d }, None)
}

/// Number of occupied half-open boxes `∏ [k_j ε, (k_j+1) ε)`.
pub fn box_count(points: &[Vec<f64>], eps: f64) -> usize {
    let cells: HashSet<Vec<i64>> =
        points.par_iter().map(|p| p.iter().map(|x| (x / eps).floor() as i64).collect()).collect();
    cells.len()
}

/// Fails when half of the sample occupies visibly fewer boxes than the
/// whole sample at the finest scale.
pub fn density_check(points: &[Vec<f64>], finest: f64, count: impl Fn(&[Vec<f64>], f64) -> usize) -> Result<f64> {
    let full = count(points, finest);
    let half: Vec<Vec<f64>> = points.iter().step_by(2).cloned().collect();
    let part = count(&half, finest);
    let change = 1.0 - part as f64 / full.max(1) as f64;
    if change > DENSITY_TOLERANCE {
        return Err(Error::Undersampled(format!(
            "half the sample covers {part} of {full} boxes at ε = {finest:.3e} ({:.1}% change)",
            100.0 * change
        )));
    }
    Ok(change)
}

/// Box-counting slopes from axis-aligned grids.
pub fn box_dimension(points: &[Vec<f64>], ladder: &[f64]) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::Validation("empty point sample".into()));
    }
    let finest = ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    density_check(points, finest, box_count)?;
    let pairs: Vec<(f64, f64)> = ladder.iter().map(|&e| (e, box_count(points, e) as f64)).collect();
    estimate_from_ladder(&pairs, EstimateKind::Box, Some(0))
}

/// Metrics on `ℝ^m` for covering numbers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Metric {
    Euclidean,
    Chebyshev,
    /// `ρ^α` of a base metric.
    EuclideanPower { alpha: f64 },
}

impl Metric {
    fn base(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Chebyshev => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
            _ => a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt(),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::EuclideanPower { alpha } => self.base(a, b).powf(*alpha),
            _ => self.base(a, b),
        }
    }

    /// Base-metric radius of a ball of radius `eps`.
    fn base_radius(&self, eps: f64) -> f64 {
        match self {
            Metric::EuclideanPower { alpha } => eps.powf(1.0 / alpha),
            _ => eps,
        }
    }
}

/// Size of a greedy `ε`-net (points taken in sample order), computed with
/// a hash grid of cell size equal to the base radius.
pub fn covering_number(points: &[Vec<f64>], metric: Metric, eps: f64) -> usize {
    use std::collections::HashMap;
    let r = metric.base_radius(eps);
    let m = points.first().map_or(0, Vec::len);
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut centers = 0usize;
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(m as u32))
        .map(|mut k| {
            (0..m)
                .map(|_| {
                    let o = (k % 3) as i64 - 1;
                    k /= 3;
                    o
                })
                .collect()
        })
        .collect();
    for (idx, p) in points.iter().enumerate() {
        let cell: Vec<i64> = p.iter().map(|x| (x / r).floor() as i64).collect();
        let covered = offsets.iter().any(|o| {
            let key: Vec<i64> = cell.iter().zip(o).map(|(c, d)| c + d).collect();
            grid.get(&key).is_some_and(|list| list.iter().any(|&j| metric.distance(p, &points[j]) <= eps))
        });
        if !covered {
            grid.entry(cell).or_default().push(idx);
            centers += 1;
        }
    }
    centers
}

/// Covering-number slopes under one of the catalogued metrics.
pub fn box_dimension_metric(points: &[Vec<f64>], metric: Metric, ladder: &[f64]) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::Validation("empty point sample".into()));
    }
    let finest = ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    density_check(points, finest, |p, e| covering_number(p, metric, e))?;
    let pairs: Vec<(f64, f64)> = ladder.iter().map(|&e| (e, covering_number(points, metric, e) as f64)).collect();
    estimate_from_ladder(&pairs, EstimateKind::Box, Some(0))
}

/// Greedy net size for an arbitrary distance function (quadratic time).
pub fn covering_number_with<T: Sync>(points: &[T], eps: f64, dist: impl Fn(&T, &T) -> f64 + Sync) -> usize {
    let mut centers: Vec<&T> = Vec::new();
    for p in points {
        let covered = centers.par_iter().any(|c| dist(c, p) <= eps);
        if !covered {
            centers.push(p);
        }
    }
    centers.len()
}

pub fn box_dimension_with<T: Sync>(
    points: &[T],
    ladder: &[f64],
    dist: impl Fn(&T, &T) -> f64 + Sync,
) -> Result<DimensionEstimate> {
    let pairs: Vec<(f64, f64)> = ladder.iter().map(|&e| (e, covering_number_with(points, e, &dist) as f64)).collect();
    estimate_from_ladder(&pairs, EstimateKind::Box, Some(0))
}

/// Hull metric `ρ'(θ', θ'') = sup_θ |h(θ+θ') - h(θ+θ'')|`.
pub fn hull_metric_distance(p: &TrigPolynomial, a: &TorusPoint, b: &TorusPoint) -> ShiftDistance {
    p.hull_metric_distance(a, b)
}

/// Box-counting slopes of the hull, sampled through torus points, under
/// the upper end of the hull-metric enclosure.
pub fn hull_box_dimension(p: &TrigPolynomial, torus: &[TorusPoint], ladder: &[f64]) -> Result<DimensionEstimate> {
    box_dimension_with(torus, ladder, |a, b| p.hull_metric_distance(a, b).hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Holds,
    MeasurementInadequate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    /// Measured box slope of the hull.
    pub box_slope: f64,
    /// Measured lower Diophantine dimension (smallest tail slope).
    pub lower_diophantine: f64,
    /// `min_ε ln(1/δ(ε)) / ln(1/ε)` over the tail of the ladder.
    pub modulus_term: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub note: String,
}

/// Compares the hull box slope against `𝔡i + liminf ln(1/δ(ε))/ln(1/ε)`.
pub fn lower_bound_check(
    scans: &[PeriodScan],
    box_estimate: &DimensionEstimate,
    modulus: impl Fn(f64) -> f64,
    tolerance: f64,
) -> LowerBoundReport {
    let inadequate = |note: String| LowerBoundReport {
        box_slope: box_estimate.fit_slope,
        lower_diophantine: f64::NAN,
        modulus_term: f64::NAN,
        rhs: f64::NAN,
        tolerance,
        status: CheckStatus::MeasurementInadequate,
        note,
    };
    let est = match diophantine_estimate(scans) {
        Ok(e) => e,
        Err(e) => return inadequate(e.to_string()),
    };
    let modulus_term = est.ladder[est.tail_start..]
        .iter()
        .map(|&(e, _)| (1.0 / modulus(e)).ln() / (1.0 / e).ln())
        .fold(f64::INFINITY, f64::min);
    let rhs = est.slope_lower + modulus_term;
    let ok = box_estimate.fit_slope <= rhs + tolerance;
    LowerBoundReport {
        box_slope: box_estimate.fit_slope,
        lower_diophantine: est.slope_lower,
        modulus_term,
        rhs,
        tolerance,
        status: if ok { CheckStatus::Holds } else { CheckStatus::MeasurementInadequate },
        note: if ok {
            String::new()
        } else {
            "measured box slope exceeds the bound; scales or windows are too coarse".into()
        },
    }
}
