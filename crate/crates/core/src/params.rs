use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::fmt;

/// Named real parameters of a model (`g`, `h`, `alpha`, `beta`, `sigma`, ...).
///
/// All stored values are finite; `g` and `h`, when present, are positive.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelParams {
    values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamError {
    NonFinite { name: String, value: f64 },
    NotPositive { name: String, value: f64 },
    Missing(String),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::NonFinite { name, value } => {
                write!(f, "parameter `{name}` must be finite, got {value}")
            }
            ParamError::NotPositive { name, value } => {
                write!(f, "parameter `{name}` must be positive, got {value}")
            }
            ParamError::Missing(name) => write!(f, "missing parameter `{name}`"),
        }
    }
}

impl core::error::Error for ParamError {}

impl ModelParams {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insert that validates the value.
    pub fn with(mut self, name: &str, value: f64) -> Result<Self, ParamError> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ParamError> {
        if !value.is_finite() {
            return Err(ParamError::NonFinite {
                name: name.to_string(),
                value,
            });
        }
        if matches!(name, "g" | "h") && value <= 0.0 {
            return Err(ParamError::NotPositive {
                name: name.to_string(),
                value,
            });
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<f64, ParamError> {
        self.get(name)
            .ok_or_else(|| ParamError::Missing(name.to_string()))
    }

    /// Value of `name`, panicking if absent. Only used by built-in symbols whose
    /// constructors guarantee the parameter exists.
    pub(crate) fn at(&self, name: &str) -> f64 {
        match self.values.get(name) {
            Some(v) => *v,
            None => panic!("built-in model is missing parameter `{name}`"),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
