//! Frequencies with a certified precision budget.
//!
//! Frequencies are stored in cycles per unit time: a basis `(1, √2)`
//! describes `e^{i2πt}` and `e^{i2π√2 t}`. The torus coordinate of `t` is
//! `θ_j = ν_j t mod 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::contfrac::{expand_certified, ContinuedFraction, TermSource};
use crate::error::{Error, Result};
use crate::exact::{parse_decimal, parse_fraction, rational_to_f64, DoubleDouble, RatInterval};

/// Depth used to pin quadratic and rule-based frequencies.
const MAX_CF_DEPTH: usize = 400;
/// Target enclosure width for frequencies with an exact term rule.
const TARGET_WIDTH_LOG2: u64 = 140;

#[derive(Clone, Debug)]
pub struct Frequency {
    label: String,
    value: DoubleDouble,
    /// Certified bound on `|ν - value|`.
    error: f64,
    cf: Option<ContinuedFraction>,
}

impl Frequency {
    /// Exact rational frequency.
    pub fn rational(r: BigRational) -> Self {
        let value = DoubleDouble::from_rational(&r);
        let error = rational_to_f64(&r).abs() * 2f64.powi(-104);
        Frequency { label: r.to_string(), value, error, cf: None }
    }

    /// Parses a frequency: integers and `p/q` are exact, decimal literals
    /// carry one unit in the last digit, anything else goes through
    /// [`TermSource::parse`] (`sqrt2`, `phi`, `[0; 5, 10^9, (1)]`, `pi`, ...).
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') && !t.starts_with('[') {
            return Ok(Frequency::rational(parse_fraction(t)?));
        }
        if let Ok(i) = t.parse::<BigInt>() {
            return Ok(Frequency::rational(BigRational::from_integer(i)));
        }
        let source = TermSource::parse(t)?;
        let mut f = Frequency::from_source(&source)?;
        f.label = t.to_string();
        Ok(f)
    }

    /// Decimal literal with an explicitly declared number of correct
    /// fractional digits.
    pub fn decimal(s: &str, digits: u32) -> Result<Self> {
        let seed = parse_decimal(s)?;
        let ulp = BigRational::new(1.into(), crate::exact::pow10(digits));
        let iv = RatInterval::new(&seed.value - &ulp, &seed.value + &ulp);
        let mut f = Frequency::from_interval(&iv, None);
        f.label = s.to_string();
        Ok(f)
    }

    pub fn from_source(source: &TermSource) -> Result<Self> {
        if let TermSource::Numeric { seed } = source {
            return Ok(Frequency::from_interval(seed, None));
        }
        // deepen until the convergent enclosure is far below the f64 phase budget
        let mut depth = 16;
        loop {
            let cf = expand_certified(source, depth)?;
            let enc = cf.enclosure();
            let w = enc.width();
            let tight = w.is_zero() || w.denom().bits() > w.numer().bits() + TARGET_WIDTH_LOG2;
            if tight || depth >= MAX_CF_DEPTH || cf.len() < depth {
                return Ok(Frequency::from_interval(&enc, Some(cf)));
            }
            depth *= 2;
        }
    }

    pub fn from_cf(cf: &ContinuedFraction) -> Result<Self> {
        let mut f = Frequency::from_source(cf.source())?;
        f.label = cf.to_string();
        Ok(f)
    }

    fn from_interval(iv: &RatInterval, cf: Option<ContinuedFraction>) -> Self {
        let mid = iv.midpoint();
        let value = DoubleDouble::from_rational(&mid);
        let half = rational_to_f64(&iv.width()) / 2.0;
        let error = half * (1.0 + 1e-12) + rational_to_f64(&mid).abs() * 2f64.powi(-104);
        Frequency { label: mid.to_string(), value, error, cf }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self) -> DoubleDouble {
        self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn continued_fraction(&self) -> Option<&ContinuedFraction> {
        self.cf.as_ref()
    }

    /// `ν t mod 1`.
    pub fn phase(&self, t: f64) -> f64 {
        self.value.frac_mul(t)
    }
}

/// Rationally independent frequencies `ν_1..ν_n` (a declared precondition).
#[derive(Clone, Debug)]
pub struct FrequencyBasis {
    freqs: Vec<Frequency>,
}

impl FrequencyBasis {
    pub fn new(freqs: Vec<Frequency>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::Validation("frequency basis must be non-empty".into()));
        }
        if freqs.iter().any(|f| f.to_f64() == 0.0) {
            return Err(Error::Validation("basis frequencies must be non-zero".into()));
        }
        Ok(FrequencyBasis { freqs })
    }

    pub fn parse(items: &[&str]) -> Result<Self> {
        FrequencyBasis::new(items.iter().map(|s| Frequency::parse(s)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn frequencies(&self) -> &[Frequency] {
        &self.freqs
    }

    pub fn get(&self, j: usize) -> &Frequency {
        &self.freqs[j]
    }

    /// Torus point `(ν_1 t, ..., ν_n t) mod 1`.
    pub fn torus_point(&self, t: f64) -> Vec<f64> {
        self.freqs.iter().map(|f| f.phase(t)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.freqs.iter().map(|f| f.to_f64().abs()).fold(0.0, f64::max)
    }

    /// True when some basis element is exactly the integer 1.
    pub fn has_unit_frequency(&self) -> bool {
        self.freqs.iter().any(|f| f.value == DoubleDouble::from_f64(1.0) && f.error < 1e-30)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.freqs.iter().map(|f| f.error).collect()
    }
}

/// Full row rank of an integer matrix over ℚ (fraction-free elimination).
pub fn rows_independent(rows: &[Vec<i64>]) -> bool {
    if rows.is_empty() {
        return true;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let (a, b) = (m[rank][col].clone(), m[r][col].clone());
                for c in 0..ncols {
                    let v = &m[r][c] * &a - &m[rank][c] * &b;
                    m[r][c] = v;
                }
            }
        }
        rank += 1;
    }
    rank == rows.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_fraction_are_exact() {
        let one = Frequency::parse("1").unwrap();
        assert_eq!(one.to_f64(), 1.0);
        assert!(one.error() < 1e-30);
        let f = Frequency::parse("3/7").unwrap();
        assert!((f.to_f64() - 3.0 / 7.0).abs() < 1e-16);
    }

    #[test]
    fn quadratic_frequency_is_tight() {
        let f = Frequency::parse("sqrt2").unwrap();
        // the enclosure is far tighter; what remains is double-double rounding
        assert!(f.error() < 1e-31, "{}", f.error());
        assert!((f.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-16);
        // phase at large t keeps its digits: ‖10^6 √2‖ from a 60-digit reference
        let x = f.phase(1e6);
        assert!((x - 0.562373095048801688).abs() < 1e-9, "{x}");
    }

    #[test]
    fn decimal_frequency_error_matches_digits() {
        let f = Frequency::decimal("0.1591549430918953357688837633725143620344596457", 40).unwrap();
        assert!(f.error() >= 1e-40 && f.error() < 1e-31);
        let coarse = Frequency::decimal("0.1591549430918953357688837633725143620344596457", 10).unwrap();
        assert!(coarse.error() > 0.99e-10 && coarse.error() < 1.01e-10);
    }

    #[test]
    fn independence_of_exponent_rows() {
        assert!(rows_independent(&[vec![1, 0], vec![0, 1]]));
        assert!(!rows_independent(&[vec![1, 0], vec![-1, 0]]));
        assert!(!rows_independent(&[vec![1, 2], vec![2, 4], vec![0, 1]]));
        assert!(rows_independent(&[vec![1, 1]]));
    }
}
