use super::{IoError, Result};
use crate::field::{is_prime, Field};
use crate::regions::Mode;
use crate::schemes::{MssVariant, SchemeInstance, SchemeKind, SourceProfile};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// An instance as written in a TOML file:
///
/// ```toml
/// scheme = "chain"
/// mode = "mss"
/// L = 3
/// s = 2
/// q = 5          # optional
/// lengths = [0, 2, 3]
/// seed = 7       # optional
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub scheme: String,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(rename = "L", alias = "encoders")]
    pub encoders: usize,
    pub s: usize,
    #[serde(default)]
    pub q: Option<u32>,
    pub lengths: Vec<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_mode() -> Mode {
    Mode::Mss
}

impl InstanceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| IoError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    /// The scheme id. A bare `pseudo-sup` picks the chain layering when it
    /// applies (`L < 2s`) and the general one otherwise.
    pub fn kind(&self) -> Result<SchemeKind> {
        if self.scheme == "pseudo-sup" {
            let v = if self.encoders < 2 * self.s {
                MssVariant::Chain
            } else {
                MssVariant::General
            };
            return Ok(SchemeKind::PseudoSup(v));
        }
        Ok(self.scheme.parse()?)
    }

    /// `q` if given, else GF(2) for corner schemes and the smallest field
    /// with `L` distinct nonzero points otherwise.
    pub fn field(&self) -> Result<Field> {
        match (self.q, self.kind()?) {
            (Some(q), _) => Field::new(q).map_err(|e| IoError::Config(e.to_string())),
            (None, SchemeKind::Corner(_)) => Ok(Field::new(2).unwrap()),
            (None, _) => Field::for_encoders(self.encoders).map_err(|e| IoError::Config(e.to_string())),
        }
    }

    /// Field for file sources: `q` if given (it must be 2 or at least 257),
    /// else GF(2) for corners and the smallest prime `>= max(257, L + 1)`.
    pub fn file_field(&self) -> Result<Field> {
        let q = match (self.q, self.kind()?) {
            (Some(q), _) => q,
            (None, SchemeKind::Corner(_)) => 2,
            (None, _) => (257.max(self.encoders as u32 + 1)..).find(|&n| is_prime(n)).unwrap(),
        };
        if q != 2 && q < 257 {
            return Err(IoError::Unsupported(format!("GF({q}); use q = 2 or q >= 257")));
        }
        Field::new(q).map_err(|e| IoError::Config(e.to_string()))
    }

    pub fn instance(&self) -> Result<SchemeInstance> {
        self.instance_over(self.field()?)
    }

    pub fn instance_over(&self, field: Field) -> Result<SchemeInstance> {
        let profile = SourceProfile::new(self.encoders, self.s, field, self.lengths.clone(), self.mode)?;
        Ok(SchemeInstance::new(self.kind()?, profile)?)
    }
}
