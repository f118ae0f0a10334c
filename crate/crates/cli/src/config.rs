use std::fs;
use std::path::{Path, PathBuf};

use chainstat::montecarlo::TailModel;
use chainstat::potentials::{Potential, PotentialConfig, PotentialKind};
use chainstat::quadrature::QuadOptions;
use chainstat::validation::ValidationConfig;
use serde::Deserialize;

use crate::error::{in_module, CliError};

pub const DEFAULT_TEMPERATURES: [f64; 4] = [0.0025, 0.005, 0.01, 0.02];
pub const DEFAULT_FORCES: [f64; 5] = [-1e-3, -5e-4, 0.0, 5e-4, 1e-3];
pub const DEFAULT_N_GRID: [usize; 3] = [100, 1_000, 10_000];

/// The JSON document passed with `--config`. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    /// Inline potential object, or a path to a JSON file holding one
    /// (relative paths resolve against the config file's directory).
    potential: Option<serde_json::Value>,
    temperatures: Option<Vec<f64>>,
    forces: Option<Vec<f64>>,
    temperature: Option<f64>,
    beta: Option<f64>,
    force: Option<f64>,
    #[serde(alias = "N")]
    n: Option<usize>,
    replicas: Option<usize>,
    seed: Option<u64>,
    rel_tol: Option<f64>,
    tail_model: Option<TailModel>,
    a: Option<f64>,
    n_grid: Option<Vec<usize>>,
    seeds: Option<usize>,
    check_tolerance_scale: Option<f64>,
    output: Option<PathBuf>,
}

/// Resolved run settings; command line flags have been applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: Potential,
    pub temperatures: Vec<f64>,
    pub forces: Vec<f64>,
    pub temperature: f64,
    pub force: f64,
    pub n: usize,
    pub replicas: usize,
    pub seed: u64,
    pub quadrature: QuadOptions,
    /// Quadrature tolerance given by flag or config, if any.
    pub rel_tol: Option<f64>,
    pub tail_model: TailModel,
    pub a: f64,
    pub n_grid: Vec<usize>,
    pub seeds: usize,
    pub check_tolerance_scale: f64,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let (raw, base) = match path {
            Some(p) => {
                let text = read(p)?;
                let raw: RawConfig = serde_json::from_str(&text).map_err(|e| {
                    CliError::usage(format!("{}: invalid config: {e}", p.display()))
                })?;
                (raw, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (RawConfig::default(), PathBuf::new()),
        };
        Self::resolve(raw, &base, overrides)
    }

    fn resolve(raw: RawConfig, base: &Path, o: &Overrides) -> Result<Self, CliError> {
        let potential = match raw.potential {
            None => in_module(
                "potentials",
                Potential::with_default_wall(PotentialKind::LennardJones { sigma: 1.0 }),
            )?,
            Some(serde_json::Value::String(file)) => {
                let path = base.join(file);
                let text = read(&path)?;
                potential_from_json(&text)
                    .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
            }
            Some(value) => potential_from_value(value)?,
        };

        let temperature = match (raw.temperature, raw.beta) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage("give either temperature or beta, not both"))
            }
            (Some(t), None) => t,
            (None, Some(b)) => {
                positive("beta", b)?;
                1.0 / b
            }
            (None, None) => 0.01,
        };
        positive("temperature", temperature)?;

        let temperatures = raw
            .temperatures
            .unwrap_or_else(|| DEFAULT_TEMPERATURES.to_vec());
        increasing("temperatures", &temperatures)?;
        for &t in &temperatures {
            positive("temperatures", t)?;
        }
        let forces = raw.forces.unwrap_or_else(|| DEFAULT_FORCES.to_vec());
        increasing("forces", &forces)?;
        let n_grid = raw.n_grid.unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
        let as_f: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
        increasing("n_grid", &as_f)?;

        let rel_tol = o.rel_tol.or(raw.rel_tol);
        let quadrature = match rel_tol {
            Some(t) => {
                positive("tolerance", t)?;
                QuadOptions::default().with_rel_tol(t)
            }
            None => QuadOptions::default(),
        };
        let check_tolerance_scale = raw.check_tolerance_scale.unwrap_or(1.0);
        if !(check_tolerance_scale >= 0.0 && check_tolerance_scale.is_finite()) {
            return Err(CliError::usage(
                "check_tolerance_scale must be finite and non-negative",
            ));
        }

        let n = raw.n.unwrap_or(10_000);
        let replicas = raw.replicas.unwrap_or(1);
        let seeds = raw.seeds.unwrap_or(100);
        if n == 0 || replicas == 0 || seeds == 0 {
            return Err(CliError::usage("n, replicas and seeds must be at least 1"));
        }
        let a = raw.a.unwrap_or(1.0);
        positive("a", a)?;
        let force = raw.force.unwrap_or(0.0);
        if !force.is_finite() {
            return Err(CliError::usage("force must be finite"));
        }

        Ok(RunConfig {
            potential,
            temperatures,
            forces,
            temperature,
            force,
            n,
            replicas,
            seed: o
                .seed
                .or(raw.seed)
                .unwrap_or(ValidationConfig::default().seed),
            quadrature,
            rel_tol,
            tail_model: raw.tail_model.unwrap_or(TailModel::Gaussian { s: 1.0 }),
            a,
            n_grid,
            seeds,
            check_tolerance_scale,
            output: o.output.clone().or(raw.output),
        })
    }

    /// Settings for the validation run; an explicit tolerance overrides the
    /// validation default.
    pub fn validation(&self) -> ValidationConfig {
        let mut v = ValidationConfig {
            seed: self.seed,
            tolerance_scale: self.check_tolerance_scale,
            ..ValidationConfig::default()
        };
        if let Some(t) = self.rel_tol {
            v.quadrature = v.quadrature.with_rel_tol(t);
        }
        v
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn potential_from_json(text: &str) -> Result<Potential, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::usage(format!("invalid potential: {e}")))?;
    potential_from_value(value)
}

fn potential_from_value(value: serde_json::Value) -> Result<Potential, CliError> {
    let config: PotentialConfig = serde_json::from_value(value)
        .map_err(|e| CliError::usage(format!("invalid potential: {e}")))?;
    in_module("potentials", Potential::from_config(&config))
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn increasing(name: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.is_empty() {
        return Err(CliError::usage(format!("{name}: grid is empty")));
    }
    if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::usage(format!(
            "{name}: grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}
