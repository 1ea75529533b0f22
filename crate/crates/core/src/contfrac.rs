//! Continued-fraction expansion, convergents and Diophantine classification.
//!
//! Expansions are exact: quadratic irrationals come from their periodic
//! term rule, decimal seeds are expanded by the Gauss map on rational
//! intervals and stop as soon as a partial quotient is no longer certified.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{parse_decimal, parse_fraction, rational_to_f64, RatInterval};

/// Default G-property threshold: `min b_k ≥ 1 + G_THRESHOLD_EPS`.
pub const G_THRESHOLD_EPS: f64 = 1e-9;

/// Sixty-digit decimal seeds of the named transcendental constants.
const NAMED_DECIMALS: &[(&str, &str)] = &[
    ("pi", "3.14159265358979323846264338327950288419716939937510582097494"),
    ("e", "2.71828182845904523536028747135266249775724709369995957496697"),
    ("ln2", "0.69314718055994530941723212145817656807550013436025525412068"),
    ("zeta3", "1.20205690315959428539973816151144999076498629234049888179227"),
    ("gamma", "0.577215664901532860606512090082402431042159335939923598805767"),
    ("cbrt2", "1.25992104989487316476721060727822835057025146470150798008198"),
    ("catalan", "0.915965594177219015054603514932384110774149374281672134266498"),
    ("inv2pi", "0.159154943091895335768883763372514362034459645740456448747667"),
    ("epi", "23.140692632779269005729086367948547380266106242600211993445"),
    ("log10_2", "0.301029995663981195213738894724493026768189881462108541310427"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Periodic,
    Explicit,
    Numeric,
    /// Terms generated from the convergent denominators, `a_{k+1} = q_k^s`.
    Rule,
}

/// Where partial quotients come from.
#[derive(Clone, Debug, PartialEq)]
pub enum TermSource {
    /// `[a0; prefix..., (period...)]`, eventually periodic.
    Periodic { a0: BigInt, prefix: Vec<BigInt>, period: Vec<BigInt> },
    /// A finite, known prefix of some irrational.
    Explicit { a0: BigInt, terms: Vec<BigInt> },
    /// Certified real enclosed by a rational interval (a point for exact rationals).
    Numeric { seed: RatInterval },
    /// `[a0; prefix..., a_{k+1} = q_k^power, ...]`.
    DenominatorRule { a0: BigInt, prefix: Vec<BigInt>, power: u32 },
    /// `[a1; a2, ...]` of the inner expansion.
    Shifted(Box<TermSource>),
    /// `[0; a0, a1, ...]` of the inner expansion.
    Prepended(Box<TermSource>),
}

impl TermSource {
    /// Parses a number description:
    ///
    /// * named constants: `sqrt2`, `phi`, `sqrt(N)`, `pi`, `e`, `ln2`, ...
    /// * term rules: `[1; 2, 2, (2)]` (parenthesised group repeats), `[0; 5, 1000000000]`
    /// * the denominator rule `qrule` or `qrule^s` (`a_{k+1} = q_k^s`)
    /// * exact fractions `p/q` and decimal literals (certified to the last digit).
    pub fn parse(s: &str) -> Result<TermSource> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "sqrt2" => return Ok(sqrt_rule(2)?),
            "sqrt3" => return Ok(sqrt_rule(3)?),
            "sqrt5" => return Ok(sqrt_rule(5)?),
            "phi" | "golden" => {
                return Ok(TermSource::Periodic {
                    a0: BigInt::one(),
                    prefix: vec![],
                    period: vec![BigInt::one()],
                })
            }
            _ => {}
        }
        if let Some(inner) = lower.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let n: u64 = inner.trim().parse().map_err(|_| Error::Parse(format!("bad sqrt argument in {t:?}")))?;
            return sqrt_rule(n);
        }
        if let Some(rest) = lower.strip_prefix("qrule") {
            let power = match rest.strip_prefix('^') {
                Some(p) => p.parse().map_err(|_| Error::Parse(format!("bad rule power in {t:?}")))?,
                None if rest.is_empty() => 1,
                None => return Err(Error::Parse(format!("unknown rule {t:?}"))),
            };
            return Ok(TermSource::DenominatorRule { a0: BigInt::zero(), prefix: vec![], power });
        }
        if let Some(&(_, digits)) = NAMED_DECIMALS.iter().find(|(n, _)| *n == lower) {
            return Ok(TermSource::Numeric { seed: parse_decimal(digits)?.interval() });
        }
        if t.starts_with('[') {
            return parse_term_list(t);
        }
        if t.contains('/') {
            return Ok(TermSource::Numeric { seed: RatInterval::point(parse_fraction(t)?) });
        }
        Ok(TermSource::Numeric { seed: parse_decimal(t)?.interval() })
    }

    pub fn kind(&self) -> SourceKind {
        match self {
            TermSource::Periodic { .. } => SourceKind::Periodic,
            TermSource::Explicit { .. } => SourceKind::Explicit,
            TermSource::Numeric { .. } => SourceKind::Numeric,
            TermSource::DenominatorRule { .. } => SourceKind::Rule,
            TermSource::Shifted(inner) | TermSource::Prepended(inner) => inner.kind(),
        }
    }

    /// `a_0` and up to `depth` partial quotients. Rational inputs and
    /// uncertifiable numeric seeds may return fewer, with the reason.
    fn generate(&self, depth: usize) -> (BigInt, Vec<BigInt>, Option<Error>) {
        match self {
            TermSource::Periodic { a0, prefix, period } => {
                let mut terms: Vec<BigInt> = prefix.iter().take(depth).cloned().collect();
                if !period.is_empty() {
                    let mut i = 0;
                    while terms.len() < depth {
                        terms.push(period[i % period.len()].clone());
                        i += 1;
                    }
                }
                let err = (terms.len() < depth)
                    .then(|| Error::InsufficientTerms { needed: depth, available: terms.len() });
                (a0.clone(), terms, err)
            }
            TermSource::Explicit { a0, terms } => {
                let t: Vec<BigInt> = terms.iter().take(depth).cloned().collect();
                let err = (t.len() < depth)
                    .then(|| Error::InsufficientTerms { needed: depth, available: t.len() });
                (a0.clone(), t, err)
            }
            TermSource::Numeric { seed } => gauss_expand(seed, depth),
            TermSource::DenominatorRule { a0, prefix, power } => {
                let mut terms = Vec::with_capacity(depth);
                let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
                for k in 0..depth {
                    let a = if k < prefix.len() { prefix[k].clone() } else { num_traits::pow(q.clone(), *power as usize) };
                    let next = &a * &q + &q_prev;
                    q_prev = std::mem::replace(&mut q, next);
                    terms.push(a);
                }
                (a0.clone(), terms, None)
            }
            TermSource::Shifted(inner) => {
                let (_, mut t, err) = inner.generate(depth + 1);
                if t.is_empty() {
                    return (BigInt::zero(), t, Some(err.unwrap_or(Error::InsufficientTerms { needed: 1, available: 0 })));
                }
                let a0 = t.remove(0);
                (a0, t, err)
            }
            TermSource::Prepended(inner) => {
                if depth == 0 {
                    return (BigInt::zero(), vec![], None);
                }
                let (a0, mut t, err) = inner.generate(depth - 1);
                t.insert(0, a0);
                (BigInt::zero(), t, err)
            }
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    let s = s.trim();
    let cleaned: String = s.chars().filter(|c| *c != '_').collect();
    if let Some((m, e)) = cleaned.split_once("e") {
        let m: BigInt = m.parse().map_err(|_| Error::Parse(format!("bad term {s:?}")))?;
        let e: u32 = e.parse().map_err(|_| Error::Parse(format!("bad term {s:?}")))?;
        return Ok(m * crate::exact::pow10(e));
    }
    if let Some((b, e)) = cleaned.split_once('^') {
        let b: BigInt = b.parse().map_err(|_| Error::Parse(format!("bad term {s:?}")))?;
        let e: usize = e.parse().map_err(|_| Error::Parse(format!("bad term {s:?}")))?;
        return Ok(num_traits::pow(b, e));
    }
    cleaned.parse().map_err(|_| Error::Parse(format!("bad term {s:?}")))
}

/// `[a0; a1, a2, (p1, p2)]`. Terms accept `10^9` and `1e9` notation.
fn parse_term_list(s: &str) -> Result<TermSource> {
    let body = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("unbalanced brackets in {s:?}")))?;
    let (a0, rest) = match body.split_once(';') {
        Some((a, r)) => (parse_int(a)?, r),
        None => (parse_int(body)?, ""),
    };
    let (fixed, period) = match rest.find('(') {
        Some(i) => {
            let p = rest[i + 1..]
                .strip_suffix(')')
                .or_else(|| rest[i + 1..].trim_end().strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("unbalanced period in {s:?}")))?;
            (&rest[..i], Some(p))
        }
        None => (rest, None),
    };
    let list = |x: &str| -> Result<Vec<BigInt>> {
        x.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse_int).collect()
    };
    let prefix = list(fixed)?;
    let check = |v: &[BigInt]| -> Result<()> {
        if v.iter().any(|a| !a.is_positive()) {
            return Err(Error::Domain("partial quotients a_k (k ≥ 1) must be positive".into()));
        }
        Ok(())
    };
    check(&prefix)?;
    match period {
        Some(p) => {
            let period = list(p)?;
            check(&period)?;
            if period.is_empty() {
                return Err(Error::Parse("empty period".into()));
            }
            Ok(TermSource::Periodic { a0, prefix, period })
        }
        None => Ok(TermSource::Explicit { a0, terms: prefix }),
    }
}

/// Periodic expansion of `sqrt(n)` for non-square `n`.
pub fn sqrt_rule(n: u64) -> Result<TermSource> {
    let a0 = n.sqrt();
    if a0 * a0 == n {
        return Ok(TermSource::Numeric {
            seed: RatInterval::point(BigRational::from_integer(BigInt::from(a0))),
        });
    }
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let mut period = Vec::new();
    loop {
        m = d * a - m;
        d = (n - m * m) / d;
        a = (a0 + m) / d;
        period.push(BigInt::from(a));
        if a == 2 * a0 {
            break;
        }
    }
    Ok(TermSource::Periodic { a0: BigInt::from(a0), prefix: vec![], period })
}

/// Gauss-map iteration on a rational interval.
fn gauss_expand(seed: &RatInterval, depth: usize) -> (BigInt, Vec<BigInt>, Option<Error>) {
    let Some(a0) = seed.floor_if_constant() else {
        return (
            seed.lo.floor().to_integer(),
            vec![],
            Some(Error::PrecisionExhausted("integer part of the seed is not certified".into())),
        );
    };
    let mut x = seed.add_scalar(&-BigRational::from_integer(a0.clone()));
    let mut terms = Vec::new();
    while terms.len() < depth {
        if x.lo.is_zero() {
            let err = if x.is_point() {
                Error::RationalInput { terms: terms.len() }
            } else {
                Error::PrecisionExhausted(format!("seed cannot certify term {}", terms.len() + 1))
            };
            return (a0, terms, Some(err));
        }
        let inv = match x.recip_positive() {
            Ok(i) => i,
            Err(e) => return (a0, terms, Some(e)),
        };
        let Some(a) = inv.floor_if_constant() else {
            let err = Error::PrecisionExhausted(format!("seed cannot certify term {}", terms.len() + 1));
            return (a0, terms, Some(err));
        };
        x = inv.add_scalar(&-BigRational::from_integer(a.clone()));
        terms.push(a);
    }
    (a0, terms, None)
}

/// Certified prefix `[a0; a1, ..., a_n]` of a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    a0: BigInt,
    terms: Vec<BigInt>,
    source: TermSource,
}

/// `p_k/q_k`, with `k = -2, -1` the recurrence seeds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub k: i64,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiophantineProfile {
    pub nu_hat: f64,
    pub g_property: bool,
    pub g_constant: Option<f64>,
    /// `b_k = q_{k+1}/q_k` for `k = 1..depth-1`.
    pub growth_ratios: Vec<f64>,
    pub depth: usize,
    /// First index of the tail over which `nu_hat` is maximised.
    pub tail_start: usize,
}

/// Expands `source` to exactly `depth` partial quotients.
pub fn expand(source: &TermSource, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::Validation("depth must be at least 1".into()));
    }
    let (a0, terms, err) = source.generate(depth);
    if terms.len() < depth {
        return Err(err.unwrap_or(Error::InsufficientTerms { needed: depth, available: terms.len() }));
    }
    Ok(ContinuedFraction { a0, terms, source: source.clone() })
}

/// Expands as far as the source certifies, up to `max_depth` terms.
pub fn expand_certified(source: &TermSource, max_depth: usize) -> Result<ContinuedFraction> {
    let (a0, terms, err) = source.generate(max_depth);
    match err {
        Some(e @ Error::RationalInput { .. }) => Err(e),
        Some(e) if terms.is_empty() => Err(e),
        _ => Ok(ContinuedFraction { a0, terms, source: source.clone() }),
    }
}

impl ContinuedFraction {
    pub fn parse(s: &str, depth: usize) -> Result<Self> {
        expand(&TermSource::parse(s)?, depth)
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn source(&self) -> &TermSource {
        &self.source
    }

    pub fn source_kind(&self) -> SourceKind {
        self.source.kind()
    }

    /// `a_k`, with `a_0` the integer part.
    pub fn term(&self, k: usize) -> &BigInt {
        if k == 0 {
            &self.a0
        } else {
            &self.terms[k - 1]
        }
    }

    /// Re-expands the same source to a different depth.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        expand(&self.source, depth)
    }

    /// `(p_k, q_k)` for `k = 0..=k_max`.
    pub fn convergents(&self, k_max: usize) -> Result<Vec<Convergent>> {
        if k_max > self.terms.len() {
            return Err(Error::InsufficientTerms { needed: k_max, available: self.terms.len() });
        }
        let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
        let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
        let mut out = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let a = self.term(k);
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            out.push(Convergent { k: k as i64, p, q });
        }
        Ok(out)
    }

    /// All convergents the prefix supports.
    pub fn all_convergents(&self) -> Vec<Convergent> {
        self.convergents(self.terms.len()).expect("prefix length")
    }

    /// Certified open interval `(1/(q_k(q_{k+1}+q_k)), 1/(q_{k+1}q_k))`
    /// containing `|ω - p_k/q_k|`.
    pub fn approximation_gap(&self, k: usize) -> Result<(BigRational, BigRational)> {
        let c = self.convergents(k + 1)?;
        let (qk, qk1) = (&c[k].q, &c[k + 1].q);
        let lo = BigRational::new(BigInt::one(), qk * (qk1 + qk));
        let hi = BigRational::new(BigInt::one(), qk1 * qk);
        Ok((lo, hi))
    }

    /// Interval containing the number for every admissible continuation
    /// of the prefix (intersected with the seed for numeric sources).
    pub fn enclosure(&self) -> RatInterval {
        let c = self.all_convergents();
        let n = c.len() - 1;
        let enc = if n == 0 {
            let a0 = BigRational::from_integer(self.a0.clone());
            RatInterval::new(a0.clone(), a0 + BigRational::one())
        } else {
            let last = c[n].value();
            let mediant = BigRational::new(&c[n].p + &c[n - 1].p, &c[n].q + &c[n - 1].q);
            RatInterval::spanning(last, mediant)
        };
        match numeric_seed(&self.source) {
            Some(seed) => enc.intersect(&seed).unwrap_or(enc),
            None => enc,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.enclosure().midpoint())
    }

    /// Finite-depth Diophantine profile from `q_0..q_depth`.
    pub fn classify(&self, depth: usize) -> Result<DiophantineProfile> {
        if depth < 3 {
            return Err(Error::Validation("classify needs at least 3 convergents".into()));
        }
        let c = self.convergents(depth)?;
        let q: Vec<&BigInt> = c.iter().map(|c| &c.q).collect();
        let growth_ratios: Vec<f64> = (1..depth).map(|k| big_ratio(q[k + 1], q[k])).collect();
        let tail_start = (depth / 2).max(1);
        let nu_hat = (tail_start..depth)
            .filter(|&k| q[k] > &BigInt::one())
            .map(|k| big_ln(q[k + 1]) / big_ln(q[k]) - 1.0)
            .fold(0.0_f64, f64::max);
        let min_b = growth_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let g_property = min_b >= 1.0 + G_THRESHOLD_EPS;
        Ok(DiophantineProfile {
            nu_hat,
            g_property,
            g_constant: g_property.then_some(min_b),
            growth_ratios,
            depth,
            tail_start,
        })
    }

    /// `1/ω = [a_1; a_2, ...]` for `ω = [0; a_1, a_2, ...]`.
    pub fn invert(&self) -> Result<ContinuedFraction> {
        if !self.a0.is_zero() {
            return Err(Error::Domain(format!("invert needs a0 = 0, got {}", self.a0)));
        }
        if self.terms.is_empty() {
            return Err(Error::InsufficientTerms { needed: 1, available: 0 });
        }
        Ok(ContinuedFraction {
            a0: self.terms[0].clone(),
            terms: self.terms[1..].to_vec(),
            source: TermSource::Shifted(Box::new(self.source.clone())),
        })
    }

    /// `1/ω` for any positive `ω`: shifts when `a0 = 0`, prepends a zero otherwise.
    pub fn reciprocal(&self) -> Result<ContinuedFraction> {
        if self.a0.is_zero() {
            return self.invert();
        }
        if self.a0.is_negative() {
            return Err(Error::Domain("reciprocal of a negative expansion".into()));
        }
        let mut terms = vec![self.a0.clone()];
        terms.extend(self.terms.iter().cloned());
        Ok(ContinuedFraction {
            a0: BigInt::zero(),
            terms,
            source: TermSource::Prepended(Box::new(self.source.clone())),
        })
    }
}

fn numeric_seed(source: &TermSource) -> Option<RatInterval> {
    match source {
        TermSource::Numeric { seed } => Some(seed.clone()),
        TermSource::Shifted(inner) => {
            // 1/(x - a0) for the inner seed, valid only when the inner a0 is certified
            let s = numeric_seed(inner)?;
            let a0 = s.floor_if_constant()?;
            s.add_scalar(&-BigRational::from_integer(a0)).recip_positive().ok()
        }
        TermSource::Prepended(inner) => numeric_seed(inner)?.recip_positive().ok(),
        _ => None,
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.a0)?;
        for (i, a) in self.terms.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { "; " } else { ", " }, a)?;
        }
        write!(f, "]")
    }
}

/// Natural log of a positive big integer without overflowing f64.
pub fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift as usize).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a/b` as f64 for positive big integers of any size.
pub fn big_ratio(a: &BigInt, b: &BigInt) -> f64 {
    rational_to_f64(&BigRational::new(a.clone(), b.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pq(c: &[Convergent]) -> Vec<(i64, i64)> {
        c.iter().map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap())).collect()
    }

    #[test]
    fn sqrt2_expansion() {
        let cf = ContinuedFraction::parse("sqrt2", 5).unwrap();
        assert_eq!(cf.a0(), &BigInt::from(1));
        assert_eq!(cf.terms(), &ints(&[2, 2, 2, 2, 2])[..]);
        assert_eq!(cf.source_kind(), SourceKind::Periodic);
    }

    #[test]
    fn liouville_rule_expansion() {
        let cf = ContinuedFraction::parse("[0; 5, 10^9]", 2).unwrap();
        assert_eq!(cf.terms(), &ints(&[5, 1_000_000_000])[..]);
        assert!(ContinuedFraction::parse("[0; 5, 10^9]", 3).is_err());
    }

    #[test]
    fn rational_input_is_rejected() {
        match ContinuedFraction::parse("1/2", 3) {
            Err(Error::RationalInput { terms }) => assert_eq!(terms, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decimal_seed_runs_out_of_precision() {
        match ContinuedFraction::parse("1.4142135623", 30) {
            Err(Error::PrecisionExhausted(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
        let cf = expand_certified(&TermSource::parse("1.4142135623").unwrap(), 30).unwrap();
        assert!(cf.len() >= 5 && cf.len() < 30);
        assert!(cf.terms().iter().all(|a| a == &BigInt::from(2)));
    }

    #[test]
    fn convergents_by_hand() {
        let cf = ContinuedFraction::parse("sqrt2", 4).unwrap();
        let c = cf.convergents(4).unwrap();
        assert_eq!(pq(&c), vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);

        let cf = ContinuedFraction::parse("[0; 5, 10^9]", 2).unwrap();
        let c = cf.convergents(2).unwrap();
        assert_eq!(pq(&c), vec![(0, 1), (1, 5), (1_000_000_000, 5_000_000_001)]);
    }

    #[test]
    fn zeroth_convergent_is_integer_part() {
        for s in ["sqrt(7)", "pi", "[3; 1, 4]"] {
            let cf = ContinuedFraction::parse(s, 2).unwrap();
            let c = cf.convergents(0).unwrap();
            assert_eq!(c[0].p, cf.a0().clone());
            assert_eq!(c[0].q, BigInt::one());
        }
    }

    #[test]
    fn gap_for_sqrt2_k1() {
        let cf = ContinuedFraction::parse("sqrt2", 10).unwrap();
        let (lo, hi) = cf.approximation_gap(1).unwrap();
        assert_eq!(lo, BigRational::new(1.into(), 14.into()));
        assert_eq!(hi, BigRational::new(1.into(), 10.into()));
        let err = (std::f64::consts::SQRT_2 - 1.5).abs();
        assert!(rational_to_f64(&lo) < err && err < rational_to_f64(&hi));
    }

    #[test]
    fn gap_sharpens_liouville_claim() {
        let cf = ContinuedFraction::parse("[0; 5, 10^9, (1)]", 6).unwrap();
        let (lo, hi) = cf.approximation_gap(1).unwrap();
        assert!(lo < hi);
        assert_eq!(hi, BigRational::new(1.into(), BigInt::from(5) * BigInt::from(5_000_000_001_i64)));
        assert!(rational_to_f64(&hi) < 4e-11);
    }

    #[test]
    fn classify_sqrt2_and_phi() {
        let p = ContinuedFraction::parse("sqrt2", 20).unwrap().classify(20).unwrap();
        // the tail surrogate decays like ln(1+√2)/ln q_k
        assert!(p.nu_hat < 0.11, "{}", p.nu_hat);
        let deeper = ContinuedFraction::parse("sqrt2", 60).unwrap().classify(60).unwrap();
        assert!(deeper.nu_hat < p.nu_hat && deeper.nu_hat < 0.04, "{}", deeper.nu_hat);
        assert!(p.g_property);
        assert!((p.g_constant.unwrap() - (1.0 + 2f64.sqrt())).abs() < 0.02);

        let p = ContinuedFraction::parse("phi", 20).unwrap().classify(20).unwrap();
        assert!(p.g_property);
        // min over k >= 1 is b_2 = 3/2; the ratios converge to the golden ratio
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.g_constant.unwrap() - phi).abs() < 0.15);
        assert!((p.growth_ratios.last().unwrap() - phi).abs() < 1e-6);
    }

    #[test]
    fn denominator_rule_has_exponent_one() {
        let cf = ContinuedFraction::parse("qrule", 9).unwrap();
        assert_eq!(&cf.terms()[..6], &ints(&[1, 1, 2, 5, 27, 734])[..]);
        for depth in 4..=9 {
            let nu = cf.classify(depth).unwrap().nu_hat;
            assert!(nu >= 0.99, "depth {depth}: {nu}");
        }
    }

    #[test]
    fn invert_shifts_terms() {
        let cf = ContinuedFraction::parse("[0; (2)]", 6).unwrap();
        let inv = cf.invert().unwrap();
        assert_eq!(inv.a0(), &BigInt::from(2));
        assert_eq!(inv.terms(), &ints(&[2, 2, 2, 2, 2])[..]);
        let deeper = inv.with_depth(10).unwrap();
        assert_eq!(deeper.len(), 10);
        assert!((deeper.to_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-9);

        let cf = ContinuedFraction::parse("[0; 5, 10^9, (1)]", 4).unwrap();
        let inv = cf.invert().unwrap();
        assert_eq!(inv.a0(), &BigInt::from(5));
        assert_eq!(inv.terms()[0], BigInt::from(1_000_000_000));

        assert!(matches!(
            ContinuedFraction::parse("sqrt2", 4).unwrap().invert(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn reciprocal_of_numeric_seed_keeps_certified_enclosure() {
        let cf = ContinuedFraction::parse("pi", 10).unwrap();
        let r = cf.reciprocal().unwrap();
        assert_eq!(r.a0(), &BigInt::zero());
        let enc = r.enclosure();
        let x = 1.0 / std::f64::consts::PI;
        assert!(enc.lo_f64() <= x + 1e-15 && x - 1e-15 <= enc.hi_f64());
    }

    #[test]
    fn sqrt_rules() {
        let cf = ContinuedFraction::parse("sqrt(7)", 8).unwrap();
        assert_eq!(cf.a0(), &BigInt::from(2));
        assert_eq!(cf.terms(), &ints(&[1, 1, 1, 4, 1, 1, 1, 4])[..]);
        assert!((cf.with_depth(30).unwrap().to_f64() - 7f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_terms_rejected() {
        assert!(TermSource::parse("[1; 2, 0, 3]").is_err());
    }
}
