//! Run configuration: JSON document to validated protocol inputs.

use serde::Deserialize;
use thiserror::Error;

use twophoton_core::auxprep::INPUT;
use twophoton_core::measurement::{Assignment, ProjectorFamily, TwoPhotonBasis};
use twophoton_core::protocol::{AnalyzerModel, Mode};
use twophoton_core::statevec::{DEFAULT_TOL, DEGENERATE_NORM};
use twophoton_core::{Amplitude, Ket};

use crate::ket::{parse_ket, KetError};

#[derive(Debug, Error)]
pub enum ConfigError {
    /// The document or an embedded ket expression could not be read.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input describing something invalid.
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    fn ket(field: &str, text: &str, err: KetError) -> Self {
        ConfigError::Parse(format!("{field}: cannot parse {text:?} at {err}"))
    }
}

impl From<twophoton_core::Error> for ConfigError {
    fn from(err: twophoton_core::Error) -> Self {
        ConfigError::Invalid(err.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StateSpec {
    Expression(String),
    Components(Vec<ComplexSpec>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitFamily {
    basis: Vec<StateSpec>,
    assignment: Vec<Vec<u8>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FamilySpec {
    Preset(String),
    Explicit(ExplicitFamily),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    input_state: StateSpec,
    family: FamilySpec,
    mode: String,
    #[serde(default)]
    analyzer: Option<String>,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Unit input state on photons 1, 2.
    pub input: Ket,
    pub family: ProjectorFamily,
    /// Name of the preset the family came from, if any.
    pub preset: Option<String>,
    pub mode: Mode,
    pub analyzer: AnalyzerModel,
    pub tol: f64,
    /// Notes for the error stream, e.g. about normalization.
    pub warnings: Vec<String>,
}

impl StateSpec {
    fn components(&self, field: &str) -> Result<[Amplitude; 4], ConfigError> {
        match self {
            StateSpec::Expression(text) => {
                parse_ket(text).map_err(|e| ConfigError::ket(field, text, e))
            }
            StateSpec::Components(list) => {
                if list.len() != 4 {
                    return Err(ConfigError::Invalid(format!(
                        "{field}: expected 4 components (HH, HV, VH, VV), got {}",
                        list.len()
                    )));
                }
                let mut out = [Amplitude::new(0.0, 0.0); 4];
                for (slot, spec) in out.iter_mut().zip(list) {
                    *slot = match spec {
                        ComplexSpec::Real(re) => Amplitude::new(*re, 0.0),
                        ComplexSpec::Pair([re, im]) => Amplitude::new(*re, *im),
                    };
                }
                Ok(out)
            }
        }
    }
}

/// Reads a config from JSON text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(format!("config: {e}")))?;

    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ConfigError::Invalid(format!(
            "tol must be positive, got {tol}"
        )));
    }

    let mode = Mode::from_name(&raw.mode).ok_or_else(|| {
        ConfigError::Invalid(format!(
            "unknown mode {:?}, expected general, parity5 or parity4",
            raw.mode
        ))
    })?;

    let analyzer = match raw.analyzer.as_deref() {
        None | Some("linear") => AnalyzerModel::linear(),
        Some("ideal") => AnalyzerModel::ideal(),
        Some(other) => {
            return Err(ConfigError::Invalid(format!(
                "unknown analyzer {other:?}, expected linear or ideal"
            )))
        }
    };

    let mut warnings = Vec::new();
    let comps = raw.input_state.components("input_state")?;
    let norm = comps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm <= DEGENERATE_NORM {
        return Err(ConfigError::Invalid(format!(
            "input_state has norm {norm:e} and cannot be normalized"
        )));
    }
    let mut input = Ket::from_pair(INPUT, comps)?;
    if (norm - 1.0).abs() > tol {
        warnings.push(format!(
            "input_state has norm {norm}, normalizing before the run"
        ));
        input = input.normalize()?;
    }

    let (family, preset) = match raw.family {
        FamilySpec::Preset(name) if name == "parity" => (ProjectorFamily::parity(), Some(name)),
        FamilySpec::Preset(name) => {
            return Err(ConfigError::Invalid(format!(
                "unknown family preset {name:?}, expected \"parity\""
            )))
        }
        FamilySpec::Explicit(explicit) => (explicit_family(&explicit)?, None),
    };

    Ok(RunConfig {
        input,
        family,
        preset,
        mode,
        analyzer,
        tol,
        warnings,
    })
}

fn explicit_family(spec: &ExplicitFamily) -> Result<ProjectorFamily, ConfigError> {
    if spec.basis.len() != 4 {
        return Err(ConfigError::Invalid(format!(
            "family.basis: expected 4 states, got {}",
            spec.basis.len()
        )));
    }
    let mut states = [[Amplitude::new(0.0, 0.0); 4]; 4];
    for (i, (slot, s)) in states.iter_mut().zip(&spec.basis).enumerate() {
        *slot = s.components(&format!("family.basis[{i}]"))?;
    }
    let basis = TwoPhotonBasis::new(states)?;
    let assignment = Assignment::from_matrix(&spec.assignment)?;
    Ok(ProjectorFamily::new(basis, assignment)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_config() {
        let cfg = parse_config(r#"{"input_state": "|HH>", "family": "parity", "mode": "parity5"}"#)
            .unwrap();
        assert_eq!(cfg.mode, Mode::Parity5);
        assert_eq!(cfg.analyzer, AnalyzerModel::linear());
        assert_eq!(cfg.tol, DEFAULT_TOL);
        assert_eq!(cfg.preset.as_deref(), Some("parity"));
        assert!(cfg.warnings.is_empty());
    }

    #[test]
    fn unnormalized_input_is_rescaled_with_warning() {
        let cfg = parse_config(
            r#"{"input_state": [1, [1, 0], 0, 0], "family": "parity", "mode": "general"}"#,
        )
        .unwrap();
        assert!((cfg.input.norm() - 1.0).abs() < 1e-15);
        assert_eq!(cfg.warnings.len(), 1);
    }

    #[test]
    fn classifies_failures() {
        let cases = [
            (r#"{"input_state": "|HH>", "family": "parity""#, true),
            (
                r#"{"input_state": "|HX>", "family": "parity", "mode": "general"}"#,
                true,
            ),
            (
                r#"{"input_state": "|HH>", "family": "parity", "mode": "general", "x": 1}"#,
                true,
            ),
            (
                r#"{"input_state": "|HH>", "family": "bogus", "mode": "general"}"#,
                false,
            ),
            (
                r#"{"input_state": "|HH>", "family": "parity", "mode": "fast"}"#,
                false,
            ),
            (
                r#"{"input_state": "0*|HH>", "family": "parity", "mode": "general"}"#,
                false,
            ),
            (
                r#"{"input_state": [1, 0, 0], "family": "parity", "mode": "general"}"#,
                false,
            ),
            (
                r#"{"input_state": "|HH>", "family": "parity", "mode": "general", "tol": -1}"#,
                false,
            ),
        ];
        for (text, is_parse) in cases {
            match parse_config(text) {
                Err(ConfigError::Parse(_)) => assert!(is_parse, "{text}"),
                Err(ConfigError::Invalid(_)) => assert!(!is_parse, "{text}"),
                Ok(_) => panic!("accepted {text}"),
            }
        }
    }

    #[test]
    fn explicit_family_goes_through_validation() {
        let good = r#"{
            "input_state": "|HV>",
            "family": {
                "basis": ["|HH>", "|HV>", "|VH>", "|VV>"],
                "assignment": [[1, 0], [0, 1], [0, 1], [1, 0]]
            },
            "mode": "parity4"
        }"#;
        let cfg = parse_config(good).unwrap();
        assert!(cfg.family.is_parity());
        assert_eq!(cfg.preset, None);

        let skewed = good.replace(r#""|HV>", "|VH>""#, r#""|HV>", "|HV> + |VH>""#);
        let err = parse_config(&skewed).unwrap_err();
        assert!(
            matches!(err, ConfigError::Invalid(ref m) if m.contains("orthonormal")),
            "{err}"
        );
    }
}
