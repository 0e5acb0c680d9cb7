//! Scenario documents: a single JSON object, matrices row-major with
//! complex entries as [re, im] pairs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex;
use qtopos::contexts::{build_poset, ClassicalObservable, PosetOptions, SeedContext};
use qtopos::linops::{ComplexMatrix, DensityMatrix, Projection};
use qtopos::spectral::Flavor;
use qtopos::{Poset, Scalar};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Entries are kept loose here so that shape errors surface as validation
/// errors rather than parse errors.
pub type RawMatrix = Vec<Vec<Vec<f64>>>;
pub type RawVector = Vec<Vec<f64>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dimension: usize,
    #[serde(default)]
    pub observables: BTreeMap<String, RawMatrix>,
    #[serde(default)]
    pub seed_contexts: BTreeMap<String, Vec<RawMatrix>>,
    #[serde(default)]
    pub states: BTreeMap<String, StateSpec>,
    #[serde(default)]
    pub projections: BTreeMap<String, RawMatrix>,
    #[serde(default)]
    pub r_values: Vec<f64>,
    #[serde(default)]
    pub commands: Vec<Command>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Vector(RawVector),
    Density(RawMatrix),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub epsilon: Option<f64>,
    pub max_contexts: Option<usize>,
    pub guard: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlavorSpec {
    #[default]
    Presheaf,
    Sheaf,
}

impl From<FlavorSpec> for Flavor {
    fn from(f: FlavorSpec) -> Self {
        match f {
            FlavorSpec::Presheaf => Flavor::Presheaf,
            FlavorSpec::Sheaf => Flavor::Sheaf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum TheoremSpec {
    One(u8),
    All(AllTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllTag {
    All,
}

impl TheoremSpec {
    pub fn theorems(self) -> Vec<u8> {
        match self {
            TheoremSpec::One(n) => vec![n],
            TheoremSpec::All(_) => vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Daseinize {
        projection: String,
        #[serde(default)]
        flavor: FlavorSpec,
    },
    Assign {
        projection: String,
        state: String,
        r: Option<f64>,
        #[serde(default)]
        flavor: FlavorSpec,
    },
    Translate {
        projection: String,
        state: String,
        r: Option<f64>,
    },
    Verify {
        theorem: TheoremSpec,
    },
    KsCheck {
        fixture: Option<String>,
        expect: Option<usize>,
    },
    Dot {
        file: String,
        #[serde(default)]
        highlight: Vec<String>,
    },
}

/// Options after command-line overrides.
#[derive(Debug, Clone)]
pub struct Settings {
    pub epsilon: f64,
    pub max_contexts: usize,
    pub guard: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_GUARD: usize = 5_000_000;

impl Settings {
    pub fn resolve(options: &Options, overrides: &Overrides) -> Self {
        let defaults = PosetOptions::<f64>::default();
        Self {
            epsilon: overrides.epsilon.or(options.epsilon).unwrap_or(defaults.epsilon),
            max_contexts: overrides.max_contexts.or(options.max_contexts).unwrap_or(defaults.max_contexts),
            guard: overrides.guard.or(options.guard).unwrap_or(DEFAULT_GUARD),
            seed: overrides.seed.or(options.seed).unwrap_or(defaults.seed),
            out: overrides.out.clone().or_else(|| options.out.clone()),
        }
    }
}

/// Values given on the command line; they win over the scenario's options.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub max_contexts: Option<usize>,
    pub guard: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn parse(text: &str) -> CliResult<Scenario> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn complex(entry: &[f64], what: &str) -> CliResult<Complex<f64>> {
    match entry {
        [re, im] if re.is_finite() && im.is_finite() => Ok(Complex::new(*re, *im)),
        _ => Err(invalid(format!("{what}: entries must be finite [re, im] pairs"))),
    }
}

pub fn matrix(raw: &RawMatrix, dim: usize, what: &str) -> CliResult<ComplexMatrix> {
    if raw.len() != dim || raw.iter().any(|row| row.len() != dim) {
        return Err(invalid(format!("{what}: expected a {dim}x{dim} matrix")));
    }
    let data = raw.iter().flatten().map(|e| complex(e, what)).collect::<CliResult<Vec<_>>>()?;
    Ok(ComplexMatrix::from_row_major(dim, data)?)
}

pub fn vector(raw: &RawVector, dim: usize, what: &str) -> CliResult<Vec<Complex<f64>>> {
    if raw.len() != dim {
        return Err(invalid(format!("{what}: expected {dim} entries")));
    }
    raw.iter().map(|e| complex(e, what)).collect()
}

/// Everything a scenario names, validated and built.
pub struct Model {
    pub poset: Poset,
    pub states: BTreeMap<String, DensityMatrix>,
    pub projections: BTreeMap<String, Projection>,
}

impl Scenario {
    pub fn build(&self, settings: &Settings) -> CliResult<Model> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if !(settings.epsilon > 0.0 && settings.epsilon.is_finite()) {
            return Err(invalid("epsilon must be positive"));
        }
        let eps = settings.epsilon;
        let observables = self
            .observables
            .iter()
            .map(|(name, raw)| {
                let m = matrix(raw, dim, &format!("observable {name}"))?;
                Ok(ClassicalObservable::new(name.clone(), m, eps)?)
            })
            .collect::<CliResult<Vec<_>>>()?;
        let seeds = self
            .seed_contexts
            .iter()
            .map(|(name, gens)| {
                let gens =
                    gens.iter().map(|raw| matrix(raw, dim, &format!("seed context {name}"))).collect::<CliResult<Vec<_>>>()?;
                Ok(SeedContext::new(name.clone(), gens))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let options = PosetOptions { epsilon: eps, max_contexts: settings.max_contexts, seed: settings.seed };
        let poset = build_poset(dim, observables, &seeds, &options)?;

        let mut states = BTreeMap::new();
        for (name, spec) in &self.states {
            let what = format!("state {name}");
            let rho = match spec {
                StateSpec::Vector(raw) => {
                    let v = vector(raw, dim, &what)?;
                    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > f64::rank_tolerance() {
                        return Err(invalid(format!("{what}: vector must have unit norm")));
                    }
                    DensityMatrix::pure(&v, eps)?
                }
                StateSpec::Density(raw) => DensityMatrix::new(matrix(raw, dim, &what)?, eps)?,
            };
            states.insert(name.clone(), rho);
        }
        let projections = self
            .projections
            .iter()
            .map(|(name, raw)| {
                let m = matrix(raw, dim, &format!("projection {name}"))?;
                Ok((name.clone(), Projection::new(m, eps)?))
            })
            .collect::<CliResult<BTreeMap<_, _>>>()?;
        for &r in &self.r_values {
            check_r(r)?;
        }
        Ok(Model { poset, states, projections })
    }
}

pub fn check_r(r: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(invalid(format!("r = {r} outside [0, 1]")))
    }
}
