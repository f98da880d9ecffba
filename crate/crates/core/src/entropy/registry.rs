//! Entropy measures as named strategies.
//!
//! A measure is addressed by a spec string `family[:order]`, e.g.
//! `shannon`, `renyi:0.1`, `tsallis:0.5`. The built-in registry knows the
//! three families; callers may register more.

use super::{check_order, renyi_entropy, shannon_entropy, tsallis_entropy, EntropyKind, EntropyValue};
use crate::error::{Error, Result};
use crate::inference::{renyi_variance, shannon_variance};
use crate::wishart::ModelSummary;
use std::collections::BTreeMap;
use std::fmt;

/// One member of the entropy family.
pub trait EntropyMeasure: fmt::Debug + Send + Sync {
    fn kind(&self) -> EntropyKind;

    fn evaluate(&self, model: &ModelSummary) -> Result<EntropyValue>;

    /// Asymptotic variance `σ²_H` of `√N (H(θ̂) − H(θ))`.
    fn asymptotic_variance(&self, _model: &ModelSummary) -> Result<f64> {
        Err(Error::Unsupported(format!(
            "no tractable asymptotic variance for {} entropy",
            self.kind()
        )))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShannonMeasure;

impl EntropyMeasure for ShannonMeasure {
    fn kind(&self) -> EntropyKind {
        EntropyKind::Shannon
    }
    fn evaluate(&self, model: &ModelSummary) -> Result<EntropyValue> {
        shannon_entropy(model)
    }
    fn asymptotic_variance(&self, model: &ModelSummary) -> Result<f64> {
        shannon_variance(model)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenyiMeasure {
    pub beta: f64,
}

impl EntropyMeasure for RenyiMeasure {
    fn kind(&self) -> EntropyKind {
        EntropyKind::Renyi(self.beta)
    }
    fn evaluate(&self, model: &ModelSummary) -> Result<EntropyValue> {
        renyi_entropy(model, self.beta)
    }
    fn asymptotic_variance(&self, model: &ModelSummary) -> Result<f64> {
        renyi_variance(model, self.beta)
    }
}

/// Restricted Tsallis entropy. Point values only.
#[derive(Debug, Clone, Copy)]
pub struct TsallisMeasure {
    pub beta: f64,
}

impl EntropyMeasure for TsallisMeasure {
    fn kind(&self) -> EntropyKind {
        EntropyKind::Tsallis(self.beta)
    }
    fn evaluate(&self, model: &ModelSummary) -> Result<EntropyValue> {
        tsallis_entropy(model, self.beta)
    }
}

/// Builds a measure from its optional order parameter.
pub type MeasureFactory = fn(Option<f64>) -> Result<Box<dyn EntropyMeasure>>;

fn shannon_factory(order: Option<f64>) -> Result<Box<dyn EntropyMeasure>> {
    match order {
        None => Ok(Box::new(ShannonMeasure)),
        Some(b) => Err(Error::InvalidParameter(format!("shannon takes no order, got {b}"))),
    }
}

fn ordered(order: Option<f64>, family: &str) -> Result<f64> {
    let beta = order.ok_or_else(|| Error::InvalidParameter(format!("{family} needs an order, e.g. {family}:0.5")))?;
    check_order(beta)?;
    Ok(beta)
}

fn renyi_factory(order: Option<f64>) -> Result<Box<dyn EntropyMeasure>> {
    Ok(Box::new(RenyiMeasure {
        beta: ordered(order, "renyi")?,
    }))
}

fn tsallis_factory(order: Option<f64>) -> Result<Box<dyn EntropyMeasure>> {
    Ok(Box::new(TsallisMeasure {
        beta: ordered(order, "tsallis")?,
    }))
}

/// Name → factory table for entropy measures.
#[derive(Clone, Default)]
pub struct MeasureRegistry {
    factories: BTreeMap<String, MeasureFactory>,
}

impl MeasureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register("shannon", shannon_factory);
        r.register("renyi", renyi_factory);
        r.register("tsallis", tsallis_factory);
        r
    }

    pub fn register(&mut self, name: &str, factory: MeasureFactory) {
        self.factories.insert(name.to_ascii_lowercase(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    /// Resolves `family[:order]`.
    pub fn resolve(&self, spec: &str) -> Result<Box<dyn EntropyMeasure>> {
        let spec = spec.trim();
        let (name, order) = match spec.split_once(':') {
            Some((n, o)) => {
                let beta = o
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad entropy order in '{spec}'")))?;
                (n.trim(), Some(beta))
            }
            None => (spec, None),
        };
        let factory = self
            .factories
            .get(&name.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownStrategy {
                registry: "entropy",
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })?;
        factory(order)
    }

    /// Resolves a comma-separated list of specs.
    pub fn resolve_list(&self, specs: &str) -> Result<Vec<Box<dyn EntropyMeasure>>> {
        specs.split(',').filter(|s| !s.trim().is_empty()).map(|s| self.resolve(s)).collect()
    }
}

impl fmt::Debug for MeasureRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.factories.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_builtin_specs() {
        let r = MeasureRegistry::builtin();
        assert_eq!(r.resolve("shannon").unwrap().kind(), EntropyKind::Shannon);
        assert_eq!(r.resolve(" Renyi:0.1 ").unwrap().kind(), EntropyKind::Renyi(0.1));
        assert_eq!(r.resolve("tsallis:0.5").unwrap().kind(), EntropyKind::Tsallis(0.5));
        let list = r.resolve_list("shannon,renyi:0.8,renyi:0.1").unwrap();
        assert_eq!(list.len(), 3);
        let err = r.resolve("havrda").unwrap_err().to_string();
        assert!(err.contains("renyi") && err.contains("tsallis"));
    }

    #[test]
    fn tsallis_variance_is_unsupported() {
        let m = ModelSummary::from_scalars(3, 4.0, 10.0).unwrap();
        let t = MeasureRegistry::builtin().resolve("tsallis:0.5").unwrap();
        assert!(matches!(t.asymptotic_variance(&m), Err(Error::Unsupported(_))));
    }

    #[derive(Debug)]
    struct Constant;
    impl EntropyMeasure for Constant {
        fn kind(&self) -> EntropyKind {
            EntropyKind::Shannon
        }
        fn evaluate(&self, _: &ModelSummary) -> Result<EntropyValue> {
            Ok(EntropyValue {
                value: 42.0,
                kind: EntropyKind::Shannon,
                q: None,
            })
        }
    }

    #[test]
    fn custom_registration() {
        let mut r = MeasureRegistry::new();
        r.register("constant", |_| Ok(Box::new(Constant)));
        let m = ModelSummary::from_scalars(1, 1.0, 0.0).unwrap();
        assert_eq!(r.resolve("constant").unwrap().evaluate(&m).unwrap().value, 42.0);
        assert!(r.resolve("shannon").is_err());
    }
}
