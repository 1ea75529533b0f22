//! Experiment configuration, stored as TOML.
//!
//! ```toml
//! kind = "full-pipeline"
//! epsilon_ladder = [0.25, 0.125, 0.0625, 0.03125]
//! budget = 2000000000
//! out = "results"
//!
//! [inputs]
//! poly = "sqrt2.toml"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periods::{validate_ladder, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Cf,
    Eval,
    Shiftdist,
    Kron,
    Periods,
    Dim,
    Evolve,
    Liouville,
    FullPipeline,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Cf => "cf",
            ExperimentKind::Eval => "eval",
            ExperimentKind::Shiftdist => "shiftdist",
            ExperimentKind::Kron => "kron",
            ExperimentKind::Periods => "periods",
            ExperimentKind::Dim => "dim",
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Liouville => "liouville",
            ExperimentKind::FullPipeline => "full-pipeline",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KronMethod {
    Convergent,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emit {
    Csv,
    Json,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateChoice {
    Diophantine,
    Generalized,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Polynomial description file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<PathBuf>,
    /// Evolution problem file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<PathBuf>,
    /// `summary.json` or `ladder.csv` from a periods run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<PathBuf>,
}

impl Inputs {
    pub fn paths(&self) -> Vec<(&'static str, &PathBuf)> {
        [("poly", &self.poly), ("problem", &self.problem), ("periods", &self.periods)]
            .into_iter()
            .filter_map(|(k, p)| p.as_ref().map(|p| (k, p)))
            .collect()
    }

    fn is_empty(&self) -> bool {
        self.paths().is_empty()
    }
}

fn default_precision() -> u32 {
    40
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn is_empty_vec(v: &[f64]) -> bool {
    v.is_empty()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Inputs::is_empty")]
    pub inputs: Inputs,
    /// Number description (`sqrt2`, `[0; 5, 10^9, (1)]`, `0.4142`, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "is_empty_vec")]
    pub epsilon_ladder: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "is_empty_vec")]
    pub delta_ladder: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_empty_vec")]
    pub horizons: Vec<f64>,
    /// Evaluation times for `eval`, shifts for `shiftdist`.
    #[serde(default, skip_serializing_if = "is_empty_vec")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<KronMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergent_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<Emit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateChoice>,
    /// Exponent `d` of the generalized estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generalized_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_start: Option<usize>,
    #[serde(default = "default_precision")]
    pub precision_digits: u32,
    /// Largest number of candidate evaluations per scan.
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            inputs: Inputs::default(),
            number: None,
            depth: None,
            epsilon: None,
            epsilon_ladder: vec![],
            delta: None,
            delta_ladder: vec![],
            horizons: vec![],
            times: vec![],
            window: None,
            method: None,
            region: None,
            convergent_index: None,
            quadrature_step: None,
            emit: None,
            estimate: None,
            generalized_d: None,
            tail_start: None,
            precision_digits: default_precision(),
            budget: default_budget(),
            out: default_out(),
            seed: 0,
            threads: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Loads a config; relative input paths are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.inputs.poly, &mut cfg.inputs.problem, &mut cfg.inputs.periods].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Validation("budget must be positive".into()));
        }
        // TOML integers are signed
        for (name, v) in [("budget", self.budget), ("seed", self.seed)] {
            if v > i64::MAX as u64 {
                return Err(Error::Validation(format!("{name} must not exceed {}", i64::MAX)));
            }
        }
        if self.precision_digits == 0 {
            return Err(Error::Validation("precision_digits must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Validation("threads must be positive".into()));
        }
        for ladder in [&self.epsilon_ladder, &self.delta_ladder] {
            if !ladder.is_empty() {
                validate_ladder(ladder)?;
            }
        }
        if !self.horizons.is_empty() {
            if self.horizons.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                return Err(Error::Validation("horizons must be positive".into()));
            }
            if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation("horizons must be strictly increasing".into()));
            }
        }
        for (name, v) in [("epsilon", self.epsilon), ("window", self.window), ("quadrature_step", self.quadrature_step)] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::Validation(format!("{name} must be positive, got {x}")));
                }
            }
        }
        for (name, p) in self.inputs.paths() {
            if !p.is_file() {
                return Err(Error::Validation(format!("{name} input {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::new(ExperimentKind::FullPipeline);
        c.epsilon_ladder = vec![0.25, 0.125, 0.1 / 3.0];
        c.inputs.poly = Some("p.toml".into());
        c.region = Some("sector:0,0.5".into());
        c.method = Some(KronMethod::Grid);
        c.threads = Some(3);
        let back = ExperimentConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn one_point_ladder_rejected() {
        let mut c = ExperimentConfig::new(ExperimentKind::Periods);
        c.epsilon_ladder = vec![0.1];
        assert!(matches!(c.validate(), Err(Error::Validation(_))));
        c.epsilon_ladder = vec![0.1, 0.2, 0.15];
        assert!(c.validate().is_err());
        c.epsilon_ladder = vec![0.2, 0.1];
        c.validate().unwrap();
    }

    #[test]
    fn integers_beyond_toml_range_rejected() {
        let mut c = ExperimentConfig::new(ExperimentKind::Cf);
        c.budget = u64::MAX;
        assert!(matches!(c.validate(), Err(Error::Validation(_))));
        c.budget = 1;
        c.seed = 1 << 63;
        assert!(matches!(c.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(ExperimentConfig::parse("kind = \"cf\"\nfoo = 1\n").is_err());
    }
}
