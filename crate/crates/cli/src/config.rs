//! Experiment configuration. One experiment per config; grids must be
//! nonempty where the experiment consumes them. Whenever a cell pairs a
//! boundary constant with a filling constant, the runner derives
//! beta = eps * p * (1 - theta) for that cell; beta is never set directly.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hyperfill_core::{fixtures, io, PointCloudSpace, SubsetMask};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    Fixture { fixture: String },
    File { file: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObstacleSpec {
    Named(String),
    Ids { ids: Vec<usize> },
}

impl Default for ObstacleSpec {
    fn default() -> Self {
        ObstacleSpec::Named("left".into())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_positivity")]
    pub positivity: bool,
}

fn default_max_iters() -> usize {
    80000
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_restarts() -> usize {
    8
}
fn default_positivity() -> bool {
    true
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: default_max_iters(),
            tolerance: default_tolerance(),
            restarts: default_restarts(),
            positivity: default_positivity(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub obstacle: ObstacleSpec,
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub ps: Vec<f64>,
    /// filling truncation level; defaults to the stationary level plus two
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub sigmas: Vec<f64>,
    #[serde(default)]
    pub etas: Vec<f64>,
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub resolutions: Vec<usize>,
    #[serde(default = "default_lambda_dilation")]
    pub lambda_dilation: f64,
    /// oscillation budget for the weight suite
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
}

fn default_lambda_dilation() -> f64 {
    4.0
}
fn default_delta() -> f64 {
    0.5
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).context("parsing experiment config")?;
        Ok(cfg)
    }

    /// Hash over the canonical serialization, embedded in every report.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializable");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn load_space(&self) -> anyhow::Result<PointCloudSpace> {
        match &self.instance {
            InstanceSpec::Fixture { fixture } => Ok(fixtures::by_name(fixture)?),
            InstanceSpec::File { file } => {
                let text = std::fs::read_to_string(file)
                    .with_context(|| format!("reading space file {file}"))?;
                if file.ends_with(".csv") {
                    Ok(io::space_from_csv(&text)?)
                } else {
                    Ok(io::space_from_json(&text)?)
                }
            }
        }
    }

    /// Re-resolves a parametric fixture at a different resolution.
    pub fn load_space_at(&self, resolution: usize) -> anyhow::Result<PointCloudSpace> {
        match &self.instance {
            InstanceSpec::Fixture { fixture } => {
                let base = fixture.split(':').next().unwrap();
                Ok(fixtures::by_name(&format!("{base}:{resolution}"))?)
            }
            InstanceSpec::File { .. } => {
                bail!("resolution sweeps need a parametric fixture instance")
            }
        }
    }

    pub fn obstacle(&self, space: &PointCloudSpace) -> anyhow::Result<SubsetMask> {
        let mask = match &self.obstacle {
            ObstacleSpec::Named(name) => fixtures::obstacle_by_name(space, name)?,
            ObstacleSpec::Ids { ids } => {
                for &i in ids {
                    if i >= space.len() {
                        bail!("obstacle id {i} out of range for a {}-point space", space.len());
                    }
                }
                SubsetMask::from_ids(space.len(), ids, "E")
            }
        };
        if mask.is_empty() {
            bail!("obstacle is empty");
        }
        if mask.count() == space.len() {
            bail!("obstacle covers the whole space; the domain is empty");
        }
        Ok(mask)
    }

    pub fn solver_options(&self) -> hyperfill_core::solver::SolveOptions {
        hyperfill_core::solver::SolveOptions {
            max_iters: self.solver.max_iters,
            tolerance: self.solver.tolerance,
            restarts: self.solver.restarts,
            seed: self.seed,
            positivity: self.solver.positivity,
        }
    }

    pub fn require_grids(&self, thetas: bool, ps: bool) -> anyhow::Result<()> {
        if thetas && self.thetas.is_empty() {
            bail!("experiment {} needs a nonempty theta grid", self.experiment);
        }
        if ps && self.ps.is_empty() {
            bail!("experiment {} needs a nonempty p grid", self.experiment);
        }
        for &t in &self.thetas {
            if !(t > 0.0 && t < 1.0) {
                bail!("theta {t} outside (0, 1)");
            }
        }
        for &p in &self.ps {
            if !(p > 1.0) {
                bail!("p {p} must exceed 1");
            }
        }
        Ok(())
    }
}
