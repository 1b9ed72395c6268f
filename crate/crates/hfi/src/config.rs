//! Run configuration: JSON file, then command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hfi_core::collision::CollisionOptions;
use hfi_core::krein::KreinFormula;
use hfi_core::{builtin, CustomModel, ModelParams, ModelSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelChoice>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub n_max: Option<u32>,
    pub branch: Option<u8>,
    pub formula: Option<String>,
    #[serde(default)]
    pub collision: CollisionConfig,
    #[serde(default)]
    pub wave: WaveConfig,
    #[serde(default)]
    pub hill: HillConfig,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum ModelChoice {
    Builtin(String),
    Custom(CustomConfig),
}

// Not `untagged`: serde's buffering for untagged enums cannot hand
// arbitrary-precision numbers back as f64, so `params` would never parse.
impl<'de> Deserialize<'de> for ModelChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(id) => Ok(ModelChoice::Builtin(id)),
            v @ serde_json::Value::Object(_) => serde_json::from_value(v)
                .map(ModelChoice::Custom)
                .map_err(D::Error::custom),
            _ => Err(D::Error::custom(
                "model must be a built-in id or a custom model object",
            )),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    pub kind: String,
    pub omega1: Option<String>,
    pub omega2: Option<String>,
    pub c_squared: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub at_zero: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionConfig {
    pub grid_points: Option<usize>,
    pub residual_tol: Option<f64>,
    pub lambda_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub amplitude: Option<f64>,
    pub modes: Option<usize>,
    pub steps: Option<usize>,
    pub mean: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HillConfig {
    pub mu_count: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub refine: Option<bool>,
    pub threshold: Option<f64>,
}

/// Reads a config file; syntax and schema errors carry line, column and
/// byte offset.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        CliError::Config(format!(
            "invalid config at line {} column {} (offset {offset}): {e}",
            e.line(),
            e.column()
        ))
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Flag values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub params: Vec<(&'static str, f64)>,
    pub n: Option<u32>,
    pub n_max: Option<u32>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = &o.model {
            self.model = Some(ModelChoice::Builtin(m.clone()));
        }
        for &(name, value) in &o.params {
            match &mut self.model {
                Some(ModelChoice::Custom(c)) => {
                    c.params.insert(name.into(), value);
                }
                _ => {
                    self.params.insert(name.into(), value);
                }
            }
        }
        if o.n.is_some() {
            self.n = o.n;
        }
        if o.n_max.is_some() {
            self.n_max = o.n_max;
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
    }

    pub fn model_spec(&self) -> Result<ModelSpec, CliError> {
        match &self.model {
            None => Err(CliError::Config("no model given (use --model or `model`)".into())),
            Some(ModelChoice::Builtin(id)) => {
                let params = to_params(&self.params)?;
                Ok(builtin(id, &params)?)
            }
            Some(ModelChoice::Custom(c)) => {
                if !self.params.is_empty() {
                    return Err(CliError::Config(
                        "custom models take their parameters inside `model.params`".into(),
                    ));
                }
                let custom = CustomModel {
                    kind: c.kind.clone(),
                    omega1: c.omega1.clone(),
                    omega2: c.omega2.clone(),
                    c_squared: c.c_squared.clone(),
                    params: to_params(&c.params)?,
                    at_zero: c.at_zero,
                };
                Ok(custom.build()?)
            }
        }
    }

    pub fn n(&self) -> Result<u32, CliError> {
        match self.n.unwrap_or(1) {
            0 => Err(CliError::Config("N must be at least 1".into())),
            n => Ok(n),
        }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max.unwrap_or(10)
    }

    pub fn branch(&self) -> u8 {
        self.branch.unwrap_or(1)
    }

    pub fn formula(&self) -> Result<KreinFormula, CliError> {
        match &self.formula {
            None => Ok(KreinFormula::Direct),
            Some(name) => KreinFormula::from_name(name)
                .ok_or_else(|| CliError::Config(format!("unknown signature formula `{name}`"))),
        }
    }

    pub fn collision_options(&self) -> CollisionOptions {
        let d = CollisionOptions::default();
        CollisionOptions {
            grid_points: self.collision.grid_points.unwrap_or(d.grid_points),
            residual_tol: self.collision.residual_tol.unwrap_or(d.residual_tol),
            lambda_tol: self.collision.lambda_tol.unwrap_or(d.lambda_tol),
        }
    }
}

fn to_params(map: &BTreeMap<String, f64>) -> Result<ModelParams, CliError> {
    let mut p = ModelParams::new();
    for (k, &v) in map {
        p.set(k, v).map_err(|e| CliError::Config(format!("parameter `{k}`: {e}")))?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = parse("{\n  \"model\": \"kdv\",\n  \"speed\": 1\n}").unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("offset"), "{msg}");
    }

    #[test]
    fn flags_override_file() {
        let mut c = parse(r#"{"model": "water-waves", "params": {"g": 2, "h": 3}, "N": 2}"#).unwrap();
        c.apply(&Overrides {
            params: vec![("h", 5.0)],
            n: Some(1),
            ..Overrides::default()
        });
        assert_eq!(c.params["g"], 2.0);
        assert_eq!(c.params["h"], 5.0);
        assert_eq!(c.n().unwrap(), 1);
        c.model_spec().unwrap();
    }

    #[test]
    fn custom_model_from_config() {
        let c = parse(
            r#"{"model": {"kind": "scalar", "omega1": "-k^3", "params": {"sigma": 1.5}, "at_zero": 0.0}}"#,
        )
        .unwrap();
        let m = c.model_spec().unwrap();
        assert_eq!(m.omega(1, 2.0).unwrap(), -8.0);
        assert!(parse(r#"{"model": 3}"#).is_err());
        assert!(parse(r#"{"model": {"kind": "scalar", "extra": 1}}"#).is_err());
    }

    #[test]
    fn offsets_point_into_the_text() {
        let text = "{\n\"a\": x}";
        assert_eq!(byte_offset(text, 2, 6), 7);
        assert_eq!(&text[7..8], "x");
    }
}
