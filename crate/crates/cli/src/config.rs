use std::path::PathBuf;

use anisodnl::model::Expr;
use anisodnl::presets::{exact_solution, preset, ProblemConfig};
use anisodnl::solver::{InitialGuess, Mode, SolverConfig};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

pub const SCENARIOS: [&str; 7] = [
    "constant",
    "manufactured",
    "cascade",
    "comparison",
    "degiorgi-report",
    "mollifier-demo",
    "calibrate",
];

fn default_ks() -> Vec<u32> {
    vec![1, 2, 4, 8]
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Top-level TOML run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    /// Built-in problem; mutually exclusive with `problem`.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub problem: Option<ProblemConfig>,
    /// Exact solution for `manufactured` with an inline problem.
    #[serde(default)]
    pub exact: Option<Expr>,
    /// Nodes per axis; a single entry is repeated over all axes.
    #[serde(default)]
    pub grid: Vec<usize>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default = "default_ks")]
    pub ks: Vec<u32>,
    #[serde(default = "default_out", skip_serializing)]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: ScenarioOptions,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    /// Time step; defaults to `horizon / 32`.
    pub dt: Option<f64>,
    pub newton_tol: Option<f64>,
    pub newton_max: Option<usize>,
    pub damping: Option<f64>,
    pub eps_reg: Option<f64>,
    pub picard_fallback: Option<bool>,
    /// Amplitude of the perturbed initial Newton guess; omitted means previous level.
    pub perturbation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioOptions {
    /// Value `c` of the constant scenario.
    pub constant: f64,
    /// Ordered data pairs drawn by the comparison scenario.
    pub pairs: usize,
    /// Mollifier width as a multiple of the time step.
    pub mollifier_steps: usize,
    /// Highest level index of the De Giorgi tables.
    pub j_max: usize,
    /// Structural constant `c` entering the De Giorgi bookkeeping.
    pub c_struct: f64,
    /// Random fields used by the Troisi calibration.
    pub troisi_samples: usize,
    /// Values of `m` and `γ` swept by the calibration.
    pub m_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            constant: 0.7,
            pairs: 5,
            mollifier_steps: 4,
            j_max: 12,
            c_struct: 1.0,
            troisi_samples: 200,
            m_values: vec![1.0, 1.5, 2.0, 3.0],
            gamma_values: vec![1.5, 2.0, 3.0],
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub ks: Option<Vec<u32>>,
    pub grid: Option<Vec<usize>>,
    pub dt: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(out) = o.out {
            self.out = out;
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(ks) = o.ks {
            self.ks = ks;
        }
        if let Some(grid) = o.grid {
            self.grid = grid;
        }
        if o.dt.is_some() {
            self.solver.dt = o.dt;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            bail!("unknown scenario {:?}; expected one of {}", self.scenario, SCENARIOS.join(", "));
        }
        if self.preset.is_some() == self.problem.is_some() {
            bail!("give exactly one of `preset` and `[problem]`");
        }
        if let Some(&n) = self.grid.iter().find(|&&n| n < 3) {
            bail!("grid resolution {n} is below 3");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            bail!("ks must be a nonempty list of positive integers");
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemConfig> {
        match (&self.preset, &self.problem) {
            (Some(name), None) => Ok(preset(name)?),
            (None, Some(p)) => Ok(p.clone()),
            _ => bail!("give exactly one of `preset` and `[problem]`"),
        }
    }

    pub fn exact(&self) -> Option<Expr> {
        self.exact
            .clone()
            .or_else(|| self.preset.as_deref().and_then(exact_solution))
    }

    /// Node counts per axis; 33 per axis in 2-D and 65 in 1-D by default.
    pub fn counts(&self, dim: usize) -> Result<Vec<usize>> {
        match self.grid.len() {
            0 => Ok(vec![if dim == 1 { 65 } else { 33 }; dim]),
            1 => Ok(vec![self.grid[0]; dim]),
            n if n == dim => Ok(self.grid.clone()),
            n => bail!("grid lists {n} resolutions for a {dim}-d problem"),
        }
    }

    pub fn solver(&self, horizon: f64, mode: Mode) -> SolverConfig {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(s.dt.unwrap_or(horizon / 32.0), mode);
        if let Some(v) = s.newton_tol {
            cfg.newton_tol = v;
        }
        if let Some(v) = s.newton_max {
            cfg.newton_max = v;
        }
        if let Some(v) = s.damping {
            cfg.damping = v;
        }
        cfg.eps_reg = s.eps_reg;
        if let Some(v) = s.picard_fallback {
            cfg.picard_fallback = v;
        }
        if let Some(amplitude) = s.perturbation {
            cfg.initial_guess = InitialGuess::Perturbed { amplitude };
        }
        cfg
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    text.split(',')
        .map(|s| s.trim().parse::<T>().with_context(|| format!("invalid list entry {s:?}")))
        .collect()
}
