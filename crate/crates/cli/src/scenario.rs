//! Scenario files and the command-line flags that override them.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use clap::Args;
use serde::{Deserialize, Serialize};

use lrinv_core::oracle::{default_grid, Grid};
use lrinv_core::{Method, ModelConfig};

/// A problem in the scenario file or flags: reported as a usage error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: Option<f64>,
    pub xmax: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    pub steps: Option<usize>,
}

/// Quantum numbers: a single value, a list, or a string such as "0..5"
/// (inclusive) or "0,2,4".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Levels {
    One(usize),
    List(Vec<usize>),
    Text(String),
}

impl Levels {
    pub fn expand(&self) -> anyhow::Result<Vec<usize>> {
        match self {
            Levels::One(n) => Ok(vec![*n]),
            Levels::List(v) if !v.is_empty() => Ok(v.clone()),
            Levels::List(_) => usage("empty list of quantum numbers"),
            Levels::Text(s) => parse_levels(s),
        }
    }
}

fn parse_levels(s: &str) -> anyhow::Result<Vec<usize>> {
    let parse = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| UsageError(format!("bad quantum number '{p}' in '{s}'")))
    };
    let mut out = Vec::new();
    for part in s.split(',') {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if b < a {
                return usage(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse(part)?);
        }
    }
    Ok(out)
}

/// Everything a subcommand needs; every field is optional so that a file and
/// flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Option<String>,
    pub m: Option<f64>,
    pub omega: Option<f64>,
    pub tau: Option<f64>,
    #[serde(rename = "E0")]
    pub e0: Option<f64>,
    pub c_kappa: Option<f64>,
    #[serde(rename = "Omega")]
    pub big_omega: Option<f64>,
    pub ell: Option<u32>,
    pub hbar: Option<f64>,
    pub n: Option<Levels>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub time: TimeSpec,
    pub methods: Option<Vec<String>>,
}

/// Scenario flags; each mirrors a key of the JSON scenario file.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Model: A (Stark + quadratic coupling) or B (Goldman-Krivchenko)
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "E0", allow_hyphen_values = true)]
    pub e0: Option<f64>,
    #[arg(long)]
    pub c_kappa: Option<f64>,
    #[arg(long = "Omega")]
    pub big_omega: Option<f64>,
    #[arg(long)]
    pub ell: Option<u32>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Quantum numbers, e.g. 3, 0..5 or 0,2,4
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    #[arg(long = "N")]
    pub grid_n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Comma-separated methods: exact, perturbative, wkb, oracle
    #[arg(long = "method", alias = "methods", value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
}

impl Scenario {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read scenario {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("bad scenario {}: {e}", path.display())).into())
    }

    /// Flags take precedence over the file.
    pub fn overlay(mut self, a: &ScenarioArgs) -> Self {
        fn set<T: Clone>(dst: &mut Option<T>, src: &Option<T>) {
            if src.is_some() {
                dst.clone_from(src);
            }
        }
        set(&mut self.model, &a.model);
        set(&mut self.m, &a.m);
        set(&mut self.omega, &a.omega);
        set(&mut self.tau, &a.tau);
        set(&mut self.e0, &a.e0);
        set(&mut self.c_kappa, &a.c_kappa);
        set(&mut self.big_omega, &a.big_omega);
        set(&mut self.ell, &a.ell);
        set(&mut self.hbar, &a.hbar);
        if let Some(n) = &a.n {
            self.n = Some(Levels::Text(n.clone()));
        }
        set(&mut self.grid.xmin, &a.xmin);
        set(&mut self.grid.xmax, &a.xmax);
        set(&mut self.grid.n, &a.grid_n);
        set(&mut self.time.t0, &a.t0);
        set(&mut self.time.t1, &a.t1);
        set(&mut self.time.steps, &a.steps);
        set(&mut self.methods, &a.methods);
        self
    }

    /// The model with defaults m = τ = ħ = 1, ω = 1/2, E₀ = 1, c_κ = 0.1
    /// (Model A) or ℓ = 1 (Model B without Ω).
    pub fn model_config(&self) -> anyhow::Result<ModelConfig> {
        let m = self.m.unwrap_or(1.0);
        let omega = self.omega.unwrap_or(0.5);
        let tau = self.tau.unwrap_or(1.0);
        let e0 = self.e0.unwrap_or(1.0);
        let tag = self.model.as_deref().unwrap_or("A");
        let cfg = match tag.to_ascii_uppercase().as_str() {
            "A" | "STARK" => ModelConfig::stark(m, omega, tau, e0, self.c_kappa.unwrap_or(0.1)),
            "B" | "GK" | "GOLDMAN-KRIVCHENKO" => match (self.ell, self.big_omega) {
                (Some(ell), _) => ModelConfig::goldman_krivchenko_ell(m, omega, tau, e0, ell),
                (None, Some(w)) => ModelConfig::goldman_krivchenko(m, omega, tau, e0, w),
                (None, None) => ModelConfig::goldman_krivchenko_ell(m, omega, tau, e0, 1),
            },
            other => return usage(format!("unknown model '{other}' (expected A or B)")),
        };
        let cfg = cfg.and_then(|c| c.with_hbar(self.hbar.unwrap_or(1.0)));
        cfg.map_err(|e| UsageError(format!("invalid model: {e}")).into())
    }

    pub fn levels(&self) -> anyhow::Result<Vec<usize>> {
        self.n.clone().unwrap_or(Levels::One(0)).expand()
    }

    pub fn methods(&self, default: &[Method]) -> anyhow::Result<Vec<Method>> {
        match &self.methods {
            None => Ok(default.to_vec()),
            Some(list) => list
                .iter()
                .map(|s| s.parse::<Method>().map_err(|e| UsageError(e.to_string()).into()))
                .collect(),
        }
    }

    /// Sample times t0 + k(t1 − t0)/steps, k = 0..=steps; one period by default.
    pub fn times(&self, model: &ModelConfig) -> anyhow::Result<Vec<f64>> {
        let t0 = self.time.t0.unwrap_or(0.0);
        let t1 = self.time.t1.unwrap_or(t0 + PI / model.omega);
        let steps = self.time.steps.unwrap_or(100);
        if steps == 0 {
            return Ok(vec![t0]);
        }
        Ok((0..=steps).map(|k| t0 + (t1 - t0) * k as f64 / steps as f64).collect())
    }

    /// Lab-frame grid: explicit extent if given, otherwise wide enough for the
    /// highest requested level over a whole period.
    pub fn lab_grid(&self, model: &ModelConfig, top_level: usize, default_n: usize) -> anyhow::Result<Grid> {
        let n = self.grid.n.unwrap_or(default_n);
        let auto = default_grid(model, n.max(64), top_level).map_err(|e| UsageError(e.to_string()))?;
        let grid = Grid::for_model(model, self.grid.xmin.unwrap_or(auto.x_min), self.grid.xmax.unwrap_or(auto.x_max), n);
        grid.map_err(|e| UsageError(format!("invalid grid: {e}")).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_syntax() {
        assert_eq!(parse_levels("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_levels("1,4, 6").unwrap(), vec![1, 4, 6]);
        assert_eq!(parse_levels("0..=2,5").unwrap(), vec![0, 1, 2, 5]);
        assert!(parse_levels("3..1").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn json_keys_and_overlay() {
        let s: Scenario = serde_json::from_str(
            r#"{"model":"B","m":3,"omega":0.5,"tau":1,"E0":0.1,"ell":2,"n":[0,1],
                "grid":{"xmin":0.01,"xmax":9,"N":512},"time":{"t0":0,"t1":2,"steps":4},
                "methods":["exact","perturbative"]}"#,
        )
        .unwrap();
        let model = s.model_config().unwrap();
        assert_eq!(model.b_param(), 5.0);
        assert_eq!(s.levels().unwrap(), vec![0, 1]);
        assert_eq!(s.times(&model).unwrap().len(), 5);
        let args = ScenarioArgs {
            m: Some(2.0),
            n: Some("4".into()),
            ..Default::default()
        };
        let s = s.overlay(&args);
        assert_eq!(s.m, Some(2.0));
        assert_eq!(s.levels().unwrap(), vec![4]);
        assert!(serde_json::from_str::<Scenario>(r#"{"mass": 1}"#).is_err());
    }

    #[test]
    fn invalid_models_are_usage_errors() {
        let s = Scenario {
            model: Some("C".into()),
            ..Default::default()
        };
        assert!(s.model_config().unwrap_err().downcast_ref::<UsageError>().is_some());
        let s = Scenario {
            c_kappa: Some(-1.0),
            ..Default::default()
        };
        assert!(s.model_config().unwrap_err().downcast_ref::<UsageError>().is_some());
    }
}
