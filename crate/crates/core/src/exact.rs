//! Exact rational intervals and the double-double phase arithmetic used to
//! reduce `ν·t mod 1` without losing the fractional part at large `t`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    /// Interval spanning two values given in either order.
    pub fn spanning(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `lo < x < hi` for every x in `self`.
    pub fn strictly_inside(&self, lo: &BigRational, hi: &BigRational) -> bool {
        lo < &self.lo && &self.hi < hi
    }

    pub fn intersect(&self, other: &RatInterval) -> Option<RatInterval> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| RatInterval::new(lo.clone(), hi.clone()))
    }

    pub fn add_scalar(&self, c: &BigRational) -> RatInterval {
        RatInterval::new(&self.lo + c, &self.hi + c)
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn scale_int(&self, m: &BigInt) -> RatInterval {
        let m = BigRational::from_integer(m.clone());
        RatInterval::spanning(&self.lo * &m, &self.hi * &m)
    }

    /// `{|x| : x ∈ self}`.
    pub fn abs(&self) -> RatInterval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = if -self.lo.clone() > self.hi { -self.lo.clone() } else { self.hi.clone() };
            RatInterval::new(BigRational::zero(), m)
        } else {
            RatInterval::spanning(self.lo.abs(), self.hi.abs())
        }
    }

    /// Reciprocal of a strictly positive interval.
    pub fn recip_positive(&self) -> Result<RatInterval> {
        if !self.lo.is_positive() {
            return Err(Error::Domain("reciprocal of an interval containing 0".into()));
        }
        Ok(RatInterval::new(self.hi.recip(), self.lo.recip()))
    }

    /// `⌊x⌋` when it is the same integer across the whole interval.
    pub fn floor_if_constant(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }

    /// Signed distance interval of `x - round(x)`, provided the nearest
    /// integer is constant across the interval.
    pub fn centered_residue(&self) -> Option<(BigInt, RatInterval)> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let n = (&self.lo + &half).floor().to_integer();
        let n2 = (&self.hi + &half).floor().to_integer();
        if n != n2 {
            return None;
        }
        let c = BigRational::from_integer(n.clone());
        Some((n, RatInterval::new(&self.lo - &c, &self.hi - &c)))
    }

    pub fn lo_f64(&self) -> f64 {
        rational_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational_to_f64(&self.hi)
    }
}

fn ldexp(x: f64, exp: i64) -> f64 {
    let mut x = x;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Nearest f64 (within one ulp) of an exact rational of any size.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().abs();
    let shift = n.bits() as i64 - d.bits() as i64 - 64;
    let q = if shift >= 0 {
        &n / (&d << shift as usize)
    } else {
        (&n << (-shift) as usize) / &d
    };
    let v = ldexp(q.to_f64().unwrap_or(f64::INFINITY), shift);
    if neg {
        -v
    } else {
        v
    }
}

/// Exact rational value of a finite f64.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// A decimal literal read as a certified real: `value ± ulp` where `ulp`
/// is one unit in the last written digit.
#[derive(Clone, Debug, PartialEq)]
pub struct DecimalSeed {
    pub value: BigRational,
    pub ulp: BigRational,
    pub digits: u32,
}

impl DecimalSeed {
    pub fn interval(&self) -> RatInterval {
        RatInterval::new(&self.value - &self.ulp, &self.value + &self.ulp)
    }
}

/// Parses `[-]ddd[.ddd][e±dd]`.
pub fn parse_decimal(s: &str) -> Result<DecimalSeed> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a decimal literal: {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = all_digits.parse().map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let scale = exp - frac_part.len() as i64;
    let (value, ulp) = if scale >= 0 {
        let p = pow10(scale as u32);
        (BigRational::from_integer(n * &p), BigRational::from_integer(p))
    } else {
        let p = pow10((-scale) as u32);
        (BigRational::new(n, p.clone()), BigRational::new(BigInt::one(), p))
    };
    let digits = (all_digits.trim_start_matches('0').len()).max(1) as u32;
    Ok(DecimalSeed { value, ulp, digits })
}

/// Parses `p/q` as an exact rational.
pub fn parse_fraction(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a fraction: {s:?}"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Domain("zero denominator".into()));
    }
    Ok(BigRational::new(p, q))
}

/// Unevaluated sum `hi + lo` carrying about 106 significant bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn from_rational(r: &BigRational) -> Self {
        let hi = rational_to_f64(r);
        let rest = r - f64_to_rational(hi);
        DoubleDouble { hi, lo: rational_to_f64(&rest) }
    }

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// `(self · t) mod 1` in `[0, 1)`. The rounding error is a few ulps of 1
    /// as long as `|self.hi · t| < 2^52`.
    pub fn frac_mul(self, t: f64) -> f64 {
        let p = self.hi * t;
        let e = self.hi.mul_add(t, -p);
        let r = p - p.floor();
        let mut x = r + (e + self.lo * t);
        x -= x.floor();
        if x >= 1.0 {
            x -= 1.0;
        }
        x
    }
}

/// Distance from `x` to the nearest integer, `‖x‖ ∈ [0, 1/2]`.
pub fn dist_to_int(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

/// `gcd` of two big integers, always non-negative.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn decimal_literal_ulp() {
        let d = parse_decimal("1.4142").unwrap();
        assert_eq!(d.value, r(14142, 10000));
        assert_eq!(d.ulp, r(1, 10000));
        assert_eq!(d.digits, 5);
        let d = parse_decimal("-2.5e-3").unwrap();
        assert_eq!(d.value, r(-25, 10000));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
    }

    #[test]
    fn rational_to_f64_round_trips() {
        for &x in &[1.0, -0.1, 1e-300, 3.5e250, std::f64::consts::PI] {
            let back = rational_to_f64(&f64_to_rational(x));
            assert!((back - x).abs() <= x.abs() * 2.0 * f64::EPSILON, "{x} -> {back}");
        }
        assert_eq!(rational_to_f64(&r(1, 3)), 1.0 / 3.0);
    }

    #[test]
    fn floor_requires_constant_integer_part() {
        let i = RatInterval::new(r(7, 5), r(8, 5));
        assert_eq!(i.floor_if_constant(), Some(BigInt::from(1)));
        let i = RatInterval::new(r(9, 10), r(11, 10));
        assert_eq!(i.floor_if_constant(), None);
    }

    #[test]
    fn frac_mul_keeps_fraction_at_large_t() {
        // 1/3 * 3e15 is an integer; plain f64 leaves a visible residue.
        let third = DoubleDouble::from_rational(&r(1, 3));
        let x = third.frac_mul(3.0e15);
        assert!(dist_to_int(x) < 1e-15, "{x}");
        let x = third.frac_mul(1.0e6 + 1.0);
        assert!((x - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn abs_of_straddling_interval() {
        let i = RatInterval::new(r(-3, 1), r(2, 1)).abs();
        assert_eq!(i, RatInterval::new(r(0, 1), r(3, 1)));
    }
}
