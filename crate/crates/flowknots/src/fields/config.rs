//! Field configuration files.
//!
//! One `key=value` pair per line; blank lines and text after `#` are
//! ignored. Keys:
//!
//! | key       | values                                        | default |
//! |-----------|-----------------------------------------------|---------|
//! | field     | `tube_pair`, `rotation_torus`, `beltrami_ball` | required |
//! | v0        | tube speed on the core (tube_pair)            | 1.0     |
//! | r         | tube radius in (0, 0.4] (tube_pair)           | 0.4     |
//! | radius    | ball radius (beltrami_ball)                   | 1.0     |
//! | diffeo    | `identity`, `shear`, `rotation`               | identity |
//! | amplitude | a in x ↦ x + a sin z (shear)                  | 0.2     |
//! | axis      | `x,y,z` components (rotation)                 | 0,0,1   |
//! | angle     | radians (rotation)                            | required |
//!
//! Unknown keys, repeated keys and keys that do not apply to the chosen
//! field or diffeomorphism are errors.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use super::{pushforward, FieldError, VectorField, VolumeDiffeo};
use crate::vec3::Vec3;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConfigError {
    #[error("config not found: {0}")]
    NotFound(String),
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}` does not apply to {context}")]
    Inapplicable { key: String, context: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    TubePair { v0: f64, r: f64 },
    RotationTorus,
    BeltramiBall { radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiffeoSpec {
    Identity,
    Shear { amplitude: f64 },
    Rotation { axis: [f64; 3], angle: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldConfig {
    pub field: FieldSpec,
    pub diffeo: DiffeoSpec,
}

const KEYS: [&str; 8] = ["field", "v0", "r", "radius", "diffeo", "amplitude", "axis", "angle"];

impl FieldConfig {
    pub fn build(&self) -> Result<VectorField<f64>, ConfigError> {
        let base = match self.field {
            FieldSpec::TubePair { v0, r } => VectorField::tube_pair(v0, r)?,
            FieldSpec::RotationTorus => VectorField::rigid_rotation(),
            FieldSpec::BeltramiBall { radius } => VectorField::beltrami_ball(radius)?,
        };
        let g = match self.diffeo {
            DiffeoSpec::Identity => VolumeDiffeo::Identity,
            DiffeoSpec::Shear { amplitude } => VolumeDiffeo::shear(0, 2, amplitude, 1.0)?,
            DiffeoSpec::Rotation { axis, angle } => VolumeDiffeo::rotation(Vec3::from_f64(axis), angle)?,
        };
        Ok(pushforward(&base, &g))
    }
}

fn number(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| ConfigError::BadValue { key: key.into(), message: format!("`{v}` is not a number") })?;
    if !x.is_finite() {
        return Err(ConfigError::BadValue { key: key.into(), message: "must be finite".into() });
    }
    Ok(x)
}

pub fn parse_field_config(text: &str) -> Result<FieldConfig, ConfigError> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("expected key=value, got `{line}`") });
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey(k.into()));
        }
        if v.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("empty value for `{k}`") });
        }
        if kv.insert(k.into(), v.into()).is_some() {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("repeated key `{k}`") });
        }
    }
    let mut take = |k: &str| kv.remove(k);
    let field_name = take("field").ok_or_else(|| ConfigError::Missing("field".into()))?;
    let num_or = |v: Option<String>, k: &str, d: f64| v.map_or(Ok(d), |s| number(k, &s));
    let field = match field_name.as_str() {
        "tube_pair" => FieldSpec::TubePair { v0: num_or(take("v0"), "v0", 1.0)?, r: num_or(take("r"), "r", 0.4)? },
        "rotation_torus" => FieldSpec::RotationTorus,
        "beltrami_ball" => FieldSpec::BeltramiBall { radius: num_or(take("radius"), "radius", 1.0)? },
        other => {
            return Err(ConfigError::BadValue { key: "field".into(), message: format!("unknown field `{other}`") });
        }
    };
    let diffeo_name = take("diffeo").unwrap_or_else(|| "identity".into());
    let diffeo = match diffeo_name.as_str() {
        "identity" => DiffeoSpec::Identity,
        "shear" => DiffeoSpec::Shear { amplitude: num_or(take("amplitude"), "amplitude", 0.2)? },
        "rotation" => {
            let axis = match take("axis") {
                None => [0.0, 0.0, 1.0],
                Some(s) => {
                    let parts: Vec<f64> = s.split(',').map(|c| number("axis", c.trim())).collect::<Result<_, _>>()?;
                    <[f64; 3]>::try_from(parts).map_err(|_| ConfigError::BadValue {
                        key: "axis".into(),
                        message: "expected three comma-separated numbers".into(),
                    })?
                }
            };
            let angle = number("angle", &take("angle").ok_or_else(|| ConfigError::Missing("angle".into()))?)?;
            DiffeoSpec::Rotation { axis, angle }
        }
        other => {
            return Err(ConfigError::BadValue { key: "diffeo".into(), message: format!("unknown diffeomorphism `{other}`") });
        }
    };
    if let Some(k) = kv.keys().next() {
        return Err(ConfigError::Inapplicable { key: k.clone(), context: format!("field={field_name}, diffeo={diffeo_name}") });
    }
    Ok(FieldConfig { field, diffeo })
}

pub fn read_field_config(path: &Path) -> Result<FieldConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ConfigError::NotFound(path.display().to_string()),
        _ => ConfigError::Io { path: path.display().to_string(), message: e.to_string() },
    })?;
    parse_field_config(&text)
}
