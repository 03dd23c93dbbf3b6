//! Recipe runner behind the `perc-range` binary.
//!
//! A run takes a recipe name and a flat TOML parameter file, validates every
//! parameter before doing any work, and returns a [`RunReport`] together with
//! its CSV/JSON artifacts. Nothing touches the disk until the recipe has
//! finished; the report is reproducible from its embedded spec and seed
//! manifest, and only `wall_clock_seconds` varies between reruns.

mod recipes;
mod spec;

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use spec::{ExperimentSpec, RECIPES};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no recipe given")]
    EmptyRecipe,
    #[error("unknown recipe `{0}`; expected one of: {list}", list = RECIPES.join(", "))]
    UnknownRecipe(String),
    #[error("config names recipe `{config}` but `{requested}` was requested")]
    RecipeMismatch { config: String, requested: String },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("{context}: {message}")]
    Operation { context: String, message: String },
    #[error("writing artifacts: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn op<T, E: Display>(result: Result<T, E>, context: impl Into<String>) -> Result<T, HarnessError> {
    result.map_err(|e| HarnessError::Operation { context: context.into(), message: e.to_string() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub recipe: String,
    pub spec: ExperimentSpec,
    pub seed_manifest: Vec<u64>,
    pub outputs: Vec<String>,
    pub assertions: Vec<Assertion>,
    pub summary: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its wall-clock time, for comparing reruns.
    pub fn canonical_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value.as_object_mut().expect("object").remove("wall_clock_seconds");
        serde_json::to_string_pretty(&value).expect("value serializes")
    }
}

/// A finished run: the report plus named artifact contents.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub artifacts: Vec<(String, Vec<u8>)>,
}

impl RunOutput {
    /// Writes every artifact and `report.json` under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.artifacts {
            fs::write(dir.join(name), bytes)?;
        }
        fs::write(dir.join("report.json"), self.report.to_json())?;
        Ok(())
    }
}

/// Collects what a recipe produces.
#[derive(Default)]
pub(crate) struct Context {
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub assertions: Vec<Assertion>,
    pub summary: serde_json::Map<String, serde_json::Value>,
    pub manifest: Vec<u64>,
}

impl Context {
    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.into(), passed, detail: detail.into() });
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).expect("summary value serializes"));
    }

    pub fn artifact(&mut self, name: &str, bytes: Vec<u8>) {
        self.artifacts.push((name.into(), bytes));
    }
}

/// Validates `spec` for `recipe` and runs it. The config may name the recipe
/// itself; if it does, the names must agree.
pub fn run(recipe: &str, spec: &ExperimentSpec) -> Result<RunOutput, HarnessError> {
    let recipe = recipe.trim();
    if recipe.is_empty() {
        return Err(HarnessError::EmptyRecipe);
    }
    if !RECIPES.contains(&recipe) {
        return Err(HarnessError::UnknownRecipe(recipe.into()));
    }
    if let Some(named) = &spec.recipe {
        if named != recipe {
            return Err(HarnessError::RecipeMismatch { config: named.clone(), requested: recipe.into() });
        }
    }
    spec.validate(recipe)?;
    let start = Instant::now();
    let mut ctx = Context::default();
    recipes::dispatch(recipe, spec, &mut ctx)?;
    let report = RunReport {
        recipe: recipe.into(),
        spec: spec.clone(),
        seed_manifest: ctx.manifest,
        outputs: ctx.artifacts.iter().map(|(n, _)| n.clone()).collect(),
        assertions: ctx.assertions,
        summary: serde_json::Value::Object(ctx.summary),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutput { report, artifacts: ctx.artifacts })
}

/// Runs with a thread pool of `workers` threads (all cores when `None`).
pub fn run_with_workers(recipe: &str, spec: &ExperimentSpec, workers: Option<usize>) -> Result<RunOutput, HarnessError> {
    match workers {
        Some(0) => Err(HarnessError::Invalid("workers must be at least 1".into())),
        Some(k) => {
            let pool = op(rayon::ThreadPoolBuilder::new().num_threads(k).build(), "building thread pool")?;
            pool.install(|| run(recipe, spec))
        }
        None => run(recipe, spec),
    }
}
