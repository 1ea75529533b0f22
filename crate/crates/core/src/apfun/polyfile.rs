//! TOML description of a trigonometric polynomial.
//!
//! ```toml
//! frequencies = ["1", "sqrt2", { decimal = "0.7071067811865475", digits = 16 }]
//!
//! [[terms]]
//! exponents = [1, 0]
//! amplitude = [[1.0, 0.0]]
//!
//! [[terms]]
//! exponents = [0, 1]
//! amplitude = [[1.0, 0.0]]
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Frequency, FrequencyBasis, Term, TrigPolynomial};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencySpec {
    Named(String),
    Decimal { decimal: String, digits: u32 },
}

impl FrequencySpec {
    pub fn resolve(&self) -> Result<Frequency> {
        match self {
            FrequencySpec::Named(s) => Frequency::parse(s),
            FrequencySpec::Decimal { decimal, digits } => Frequency::decimal(decimal, *digits),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub exponents: Vec<i64>,
    /// One `[re, im]` pair per coordinate.
    pub amplitude: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub frequencies: Vec<FrequencySpec>,
    pub terms: Vec<TermSpec>,
}

impl PolyFile {
    /// `Σ_j e^{i2π ν_j t}` over the given frequencies.
    pub fn unit_sum(frequencies: &[&str]) -> Self {
        let n = frequencies.len();
        PolyFile {
            frequencies: frequencies.iter().map(|s| FrequencySpec::Named(s.to_string())).collect(),
            terms: (0..n)
                .map(|k| TermSpec {
                    exponents: (0..n).map(|j| i64::from(j == k)).collect(),
                    amplitude: vec![[1.0, 0.0]],
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("polynomial file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        PolyFile::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("polynomial file serializes")
    }

    pub fn build(&self) -> Result<TrigPolynomial> {
        let basis = FrequencyBasis::new(self.frequencies.iter().map(FrequencySpec::resolve).collect::<Result<_>>()?)?;
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.exponents.clone(), t.amplitude.iter().map(|&[re, im]| Complex64::new(re, im)).collect()))
            .collect();
        TrigPolynomial::new(basis, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_build() {
        let text = r#"
frequencies = ["1", "sqrt2", { decimal = "0.7071067811865475", digits = 16 }]

[[terms]]
exponents = [1, 0, 0]
amplitude = [[1.0, 0.0]]

[[terms]]
exponents = [0, 1, 2]
amplitude = [[0.5, -0.5]]
"#;
        let f = PolyFile::parse(text).unwrap();
        assert_eq!(PolyFile::parse(&f.to_toml()).unwrap(), f);
        let p = f.build().unwrap();
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.basis().len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PolyFile::parse("frequencies = [\"1\"]\nterms = []\nextra = 1").is_err());
    }

    #[test]
    fn unit_sum_matches_constructor() {
        let p = PolyFile::unit_sum(&["1", "sqrt2"]).build().unwrap();
        let q = TrigPolynomial::unit_sum(&["1", "sqrt2"]).unwrap();
        assert_eq!(p.evaluate(3.7).unwrap(), q.evaluate(3.7).unwrap());
    }
}
