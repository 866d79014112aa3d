//! Problem-definition files.
//!
//! A config is a TOML document. Top-level scalars come first, then the
//! `[operator]`, `[region]`, `[body]` and `[tolerances]` tables; the full
//! grammar is documented in `docs/config.md`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use zerocert::operators::Params;
use zerocert::{make_catalog_operator, ConvexBody, OperatorHandle, Tolerances, Vector};

use crate::CliError;

pub const DEFAULT_RESOLUTION: usize = 16;

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

/// A catalog operator reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: Params,
}

/// A convex body as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Segment { a: Vec<f64>, b: Vec<f64> },
    Polytope { vertices: Vec<Vec<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Singleton { point: Vec<f64> },
}

impl BodySpec {
    pub fn to_body(&self) -> Result<ConvexBody, CliError> {
        let v = |x: &Vec<f64>| Vector::new(x.clone());
        Ok(match self {
            BodySpec::Segment { a, b } => ConvexBody::segment(v(a), v(b))?,
            BodySpec::Polytope { vertices } => ConvexBody::polytope(vertices.iter().map(v).collect())?,
            BodySpec::Ball { center, radius } => ConvexBody::ball(v(center), *radius)?,
            BodySpec::Box { lo, hi } => ConvexBody::axis_box(&v(lo), &v(hi))?,
            BodySpec::Singleton { point } => ConvexBody::singleton(v(point))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub seed: u64,
    /// User-asserted Lipschitz constant of the derivative; certificates
    /// built on it are watermarked as conditional.
    #[serde(rename = "L_override", default, skip_serializing_if = "Option::is_none")]
    pub l_override: Option<f64>,
    /// Membership evaluations spent by `search`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Rows emitted by `example11`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    /// Random pairs drawn by the convexity check in `gap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    /// The region V.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<BodySpec>,
    /// The body X; commands fall back to the region when it is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            resolution: DEFAULT_RESOLUTION,
            seed: 0,
            l_override: None,
            budget: None,
            n_max: None,
            trials: None,
            operator: None,
            region: None,
            body: None,
            tolerances: BTreeMap::new(),
        }
    }
}

impl ProblemConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: ProblemConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked without running a command.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.resolution == 0 {
            return Err(CliError::Config("resolution must be at least 1".into()));
        }
        self.tolerances()?;
        if let Some(l) = self.l_override {
            if !(l.is_finite() && l >= 0.0) {
                return Err(CliError::Config(format!("L_override must be nonnegative and finite, got {l}")));
            }
        }
        if self.operator.is_some() {
            self.operator()?;
        }
        for spec in [&self.region, &self.body].into_iter().flatten() {
            spec.to_body()?;
        }
        Ok(())
    }

    /// Library defaults with the config's overrides applied.
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut tols = Tolerances::default();
        for (name, value) in &self.tolerances {
            tols.set(name, *value)?;
        }
        Ok(tols)
    }

    /// The configured operator, restricted to the region and carrying the
    /// asserted constant when `L_override` is set.
    pub fn operator(&self) -> Result<OperatorHandle, CliError> {
        let spec = self
            .operator
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [operator] section".into()))?;
        let mut op = make_catalog_operator(&spec.name, &spec.params)?;
        if let Some(region) = &self.region {
            op = op.with_domain(region.to_body()?)?;
        }
        if let Some(l) = self.l_override {
            op = op.with_asserted_lipschitz(l)?;
        }
        Ok(op)
    }

    pub fn region(&self) -> Result<ConvexBody, CliError> {
        self.region
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [region] section".into()))?
            .to_body()
    }

    /// The body X, or the region when no body is given.
    pub fn body(&self) -> Result<ConvexBody, CliError> {
        match &self.body {
            Some(spec) => spec.to_body(),
            None => self
                .region()
                .map_err(|_| CliError::Config("missing [body] or [region] section".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"
resolution = 32
seed = 7

[operator]
name = "prop11_circle"

[operator.params]
x1 = [0.0, 0.0]
x2 = [1.0, 0.0]

[region]
kind = "box"
lo = [-1.0, -1.0]
hi = [2.0, 1.0]

[body]
kind = "segment"
a = [0.0, 0.0]
b = [1.0, 0.0]

[tolerances]
hull = 1e-9
"#;

    #[test]
    fn parses_and_builds() {
        let config = ProblemConfig::from_toml(CIRCLE).unwrap();
        assert_eq!(config.resolution, 32);
        assert_eq!(config.tolerances().unwrap().hull, 1e-9);
        let op = config.operator().unwrap();
        assert!(op.grad_lipschitz().unwrap() > 0.0);
        assert!(matches!(config.body().unwrap(), ConvexBody::Segment { .. }));
        assert!(matches!(config.region().unwrap(), ConvexBody::Polytope { ref vertices } if vertices.len() == 4));
    }

    #[test]
    fn toml_round_trip() {
        let config = ProblemConfig::from_toml(CIRCLE).unwrap();
        let back = ProblemConfig::from_toml(&config.to_toml().unwrap()).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn defaults_and_rejections() {
        let c = ProblemConfig::from_toml("").unwrap();
        assert_eq!(c, ProblemConfig::default());
        assert!(ProblemConfig::from_toml("resolution = 0").is_err());
        assert!(ProblemConfig::from_toml("colour = 1").is_err());
        assert!(ProblemConfig::from_toml("[tolerances]\nhul = 1e-3").is_err());
        assert!(ProblemConfig::from_toml("[operator]\nname = \"nope\"").is_err());
        assert!(ProblemConfig::from_toml("[region]\nkind = \"ball\"\ncenter = [0.0, 0.0]\nradius = -1.0").is_err());
        assert!(ProblemConfig::from_toml("L_override = -2.0").is_err());
    }
}
