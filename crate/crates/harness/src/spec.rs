//! Run descriptions and suite files.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Where a run starts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "StartRepr", into = "StartRepr")]
pub enum Start {
    /// The problem's default start, carried through the reformulation.
    #[default]
    Default,
    /// An explicit vector in the solver's coordinates.
    Explicit(Vec<f64>),
    /// Uniform draws on `[0, 1)` from the given seed.
    Seeded(u64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StartRepr {
    Keyword(String),
    Vector(Vec<f64>),
    Seeded { seed: u64 },
}

impl TryFrom<StartRepr> for Start {
    type Error = String;

    fn try_from(r: StartRepr) -> std::result::Result<Self, String> {
        match r {
            StartRepr::Keyword(k) if k == "default" => Ok(Start::Default),
            StartRepr::Keyword(k) => Err(format!("unknown start {k:?}")),
            StartRepr::Vector(v) => Ok(Start::Explicit(v)),
            StartRepr::Seeded { seed } => Ok(Start::Seeded(seed)),
        }
    }
}

impl From<Start> for StartRepr {
    fn from(s: Start) -> Self {
        match s {
            Start::Default => StartRepr::Keyword("default".into()),
            Start::Explicit(v) => StartRepr::Vector(v),
            Start::Seeded(seed) => StartRepr::Seeded { seed },
        }
    }
}

/// Solver settings that replace the defaults for one run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_function_evals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_memory: Option<usize>,
}

/// One cell of an experiment grid.
///
/// `reformulation` is a `+`-separated chain applied left to right, for
/// example `loo+identity` or `mask:last=0.02`. `method` is `spg`, `vm`,
/// `cg`, `nm` or `qp`; SPG takes an optional projection suffix such as
/// `spg+simplex`. `gradient` defaults to `analytic` when the problem has a
/// gradient and `central` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub problem: String,
    pub n: usize,
    #[serde(default = "default_reformulation")]
    pub reformulation: String,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<(f64, f64)>,
    #[serde(default)]
    pub start: Start,
    #[serde(default)]
    pub overrides: Overrides,
}

fn default_reformulation() -> String {
    "none".into()
}

impl RunSpec {
    pub fn new(problem: &str, n: usize, reformulation: &str, method: &str) -> Self {
        Self {
            problem: problem.into(),
            n,
            reformulation: reformulation.into(),
            method: method.into(),
            gradient: None,
            bounds: None,
            start: Start::Default,
            overrides: Overrides::default(),
        }
    }

    pub fn gradient(mut self, mode: &str) -> Self {
        self.gradient = Some(mode.into());
        self
    }

    pub fn bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = Some((lo, hi));
        self
    }

    pub fn start(mut self, start: Start) -> Self {
        self.start = start;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub runs: Vec<RunSpec>,
}

impl Suite {
    /// Parses a suite document; errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_start_forms() {
        let s = Suite::parse(
            r#"{"runs": [
                {"problem": "nll", "n": 5, "method": "vm", "bounds": [0, 1]},
                {"problem": "snll", "n": 3, "method": "cg", "start": [1, 2, 3]},
                {"problem": "pr0", "n": 5, "method": "nm", "start": {"seed": 7}},
                {"problem": "pr0", "n": 5, "method": "nm", "start": "default"}
            ]}"#,
        )
        .unwrap();
        assert_eq!(s.runs.len(), 4);
        assert_eq!(s.runs[0].bounds, Some((0.0, 1.0)));
        assert_eq!(s.runs[0].reformulation, "none");
        assert_eq!(s.runs[1].start, Start::Explicit(vec![1.0, 2.0, 3.0]));
        assert_eq!(s.runs[2].start, Start::Seeded(7));
        assert_eq!(s.runs[3].start, Start::Default);
    }

    #[test]
    fn errors_report_line() {
        let err = Suite::parse("{\n  \"runs\": [\n    {\"problem\": \"nll\", \"n\": }\n  ]\n}").unwrap_err();
        match err {
            HarnessError::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Suite::parse(r#"{"runs": [{"problem": "nll", "n": 5, "method": "vm", "colour": 1}]}"#).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let spec = RunSpec::new("nll", 100, "loo+identity", "vm").bounds(0.0, 1.0).start(Start::Seeded(3));
        let text = serde_json::to_string(&Suite { runs: vec![spec.clone()] }).unwrap();
        assert_eq!(Suite::parse(&text).unwrap().runs, vec![spec]);
    }
}
