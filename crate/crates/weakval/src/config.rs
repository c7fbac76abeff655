//! JSON scenario files.
//!
//! Complex numbers are `[re, im]` pairs. States and operators are either a
//! preset name (see [`crate::presets`]) or written out explicitly.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which procedure a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    #[serde(rename = "weakvalue")]
    WeakValue,
    Impulsive,
    WeakEnsemble,
    #[serde(rename = "postselect")]
    PostSelect,
    Protective,
    #[serde(rename = "nonhermitian")]
    NonHermitian,
    #[serde(rename = "protect2sv")]
    Protect2sv,
    KaonToy,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::WeakValue,
        Kind::Impulsive,
        Kind::WeakEnsemble,
        Kind::PostSelect,
        Kind::Protective,
        Kind::NonHermitian,
        Kind::Protect2sv,
        Kind::KaonToy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::WeakValue => "weakvalue",
            Kind::Impulsive => "impulsive",
            Kind::WeakEnsemble => "weak-ensemble",
            Kind::PostSelect => "postselect",
            Kind::Protective => "protective",
            Kind::NonHermitian => "nonhermitian",
            Kind::Protect2sv => "protect2sv",
            Kind::KaonToy => "kaon-toy",
        }
    }
}

/// A complex number written as `[re, im]`.
pub type ComplexPair = [f64; 2];

/// A preset name or explicit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Explicit(Vec<ComplexPair>),
}

/// A preset name (sums like `"sigma_x+sigma_z"` allowed) or an explicit
/// matrix given row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Named(String),
    Explicit(Vec<Vec<ComplexPair>>),
}

/// `"pauli"`, `"spin-<j>"`, or an explicit Hamiltonian matrix.
pub type SystemSpec = OperatorSpec;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    /// Overrides a Hamiltonian implied by `system`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub ancilla_spin: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// RK4 steps per ramp; automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Number of T-doublings in convergence scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doublings: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
}

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BINS: usize = 64;

impl ScenarioConfig {
    pub fn new(kind: Kind) -> Self {
        ScenarioConfig {
            kind,
            system: None,
            hamiltonian: None,
            pre_state: None,
            post_state: None,
            observable: None,
            delta: None,
            total_time: None,
            ancilla_spin: None,
            lambda: None,
            theta: None,
            epsilon: None,
            grid: None,
            samples: None,
            seed: None,
            output: None,
            steps: None,
            doublings: None,
            bins: None,
        }
    }

    /// Fields each kind cannot run without.
    pub fn required_fields(kind: Kind) -> &'static [&'static str] {
        match kind {
            Kind::WeakValue => &["pre_state", "post_state", "observable"],
            Kind::Impulsive | Kind::WeakEnsemble => &["pre_state", "observable", "delta"],
            Kind::PostSelect => &["pre_state", "post_state", "observable", "delta"],
            Kind::Protective => &["hamiltonian", "observable", "delta", "T"],
            Kind::NonHermitian => &["hamiltonian", "pre_state", "observable", "delta", "T"],
            Kind::Protect2sv => &["N", "lambda", "observable", "delta", "T"],
            Kind::KaonToy => &["epsilon"],
        }
    }

    fn has(&self, field: &str) -> bool {
        match field {
            "pre_state" => self.pre_state.is_some(),
            "post_state" => self.post_state.is_some(),
            "observable" => self.observable.is_some(),
            "delta" => self.delta.is_some(),
            "T" => self.total_time.is_some(),
            "N" => self.ancilla_spin.is_some(),
            "lambda" => self.lambda.is_some(),
            "epsilon" => self.epsilon.is_some(),
            "hamiltonian" => {
                self.hamiltonian.is_some() || matches!(self.system, Some(OperatorSpec::Explicit(_)))
            }
            _ => false,
        }
    }

    /// Structural checks: required fields present, numbers in range,
    /// explicit matrices square. Dimension consistency is checked when
    /// presets are resolved.
    pub fn validate(&self) -> Result<(), CliError> {
        for field in Self::required_fields(self.kind) {
            if !self.has(field) {
                let constraint = if *field == "hamiltonian" {
                    "is required (explicit `system` matrix or `hamiltonian`)"
                } else {
                    "is required"
                };
                return Err(CliError::validation(field, format!("{constraint} for kind {}", self.kind.name())));
            }
        }
        positive("delta", self.delta)?;
        positive("T", self.total_time)?;
        if let Some(n) = self.ancilla_spin {
            if n == 0 {
                return Err(CliError::validation("N", "must be at least 1"));
            }
        }
        finite("lambda", self.lambda)?;
        finite("theta", self.theta)?;
        if let Some(e) = self.epsilon {
            if !(e.abs() < 1.0) {
                return Err(CliError::validation("epsilon", "must satisfy |epsilon| < 1"));
            }
        }
        if let Some(g) = self.grid {
            if let Some(m) = g.points {
                if m < 64 || !m.is_power_of_two() {
                    return Err(CliError::validation("grid.M", "must be a power of two, at least 64"));
                }
            }
            positive("grid.L", g.extent)?;
        }
        if self.samples == Some(0) && matches!(self.kind, Kind::Impulsive | Kind::WeakEnsemble) {
            return Err(CliError::validation("samples", "must be at least 1"));
        }
        if let Some(s) = self.steps {
            if s < weakval_core::adiabatic::MIN_STEPS {
                return Err(CliError::validation("steps", "must be at least 1000"));
            }
        }
        if self.bins == Some(0) {
            return Err(CliError::validation("bins", "must be at least 1"));
        }
        for (field, spec) in [
            ("system", &self.system),
            ("hamiltonian", &self.hamiltonian),
            ("observable", &self.observable),
        ] {
            if let Some(OperatorSpec::Explicit(rows)) = spec {
                check_square(field, rows)?;
            }
        }
        for (field, spec) in [("pre_state", &self.pre_state), ("post_state", &self.post_state)] {
            if let Some(StateSpec::Explicit(v)) = spec {
                if v.is_empty() {
                    return Err(CliError::validation(field, "must have at least one amplitude"));
                }
                if v.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(CliError::validation(field, "amplitudes must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Copy with every default the run would use written in.
    pub fn with_defaults(&self) -> Self {
        let mut c = self.clone();
        match c.kind {
            Kind::Impulsive | Kind::WeakEnsemble => {
                c.samples.get_or_insert(DEFAULT_SAMPLES);
                c.seed.get_or_insert(DEFAULT_SEED);
                c.bins.get_or_insert(DEFAULT_BINS);
            }
            Kind::NonHermitian => {
                c.samples.get_or_insert(0);
                c.seed.get_or_insert(DEFAULT_SEED);
            }
            Kind::Protective | Kind::Protect2sv => {
                c.doublings.get_or_insert(0);
            }
            _ => {}
        }
        c.output.get_or_insert_with(|| PathBuf::from(format!("{}.csv", c.kind.name())));
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

fn positive(field: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::validation(field, "must be positive and finite")),
        _ => Ok(()),
    }
}

fn finite(field: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !x.is_finite() => Err(CliError::validation(field, "must be finite")),
        _ => Ok(()),
    }
}

fn check_square(field: &str, rows: &[Vec<ComplexPair>]) -> Result<(), CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        let cols = rows.first().map_or(0, Vec::len);
        return Err(CliError::validation(field, format!("must be square, got {n}x{cols}")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::validation(field, "entries must be finite"));
    }
    Ok(())
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_weakvalue() {
        let cfg = parse_scenario(
            r#"{"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_z"}"#,
        )
        .unwrap();
        assert_eq!(cfg.kind, Kind::WeakValue);
        assert_eq!(cfg.pre_state, Some(StateSpec::Named("up_x".into())));
    }

    #[test]
    fn missing_delta_is_named() {
        let err = parse_scenario(
            r#"{"kind": "postselect", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_x"}"#,
        )
        .unwrap_err();
        assert!(matches!(&err, CliError::Validation { field, .. } if field == "delta"), "{err}");
    }

    #[test]
    fn non_square_matrix() {
        let err = parse_scenario(
            r#"{"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y",
                "observable": [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]]]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("square"), "{err}");
    }

    #[test]
    fn unknown_keys_and_bad_json() {
        let err = parse_scenario(r#"{"kind": "kaon-toy", "epsilon": 0.1, "colour": 3}"#).unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
        let err = parse_scenario("{\n  \"kind\": ").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn kind_names_round_trip() {
        for k in Kind::ALL {
            let s = serde_json::to_string(&k).unwrap();
            assert_eq!(s, format!("\"{}\"", k.name()));
        }
    }
}
