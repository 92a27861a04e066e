//! Brute-force cross-checks for small instances: the general-p solver
//! against the coordinate-descent oracle, and inverse power iteration
//! against the dense eigensolve at p = 2.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use hyperfill_core::solver::{
    brute_force_oracle, dense_min_eigenvalue, min_quotient_general, min_quotient_quadratic,
    QuotientInstance, SolveOptions,
};
use hyperfill_core::{fixtures, io, SubsetMask};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSpec {
    #[serde(default)]
    pub fixture: Option<String>,
    #[serde(default)]
    pub space: Option<io::SpaceDocument>,
    pub obstacle: Vec<usize>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub ps: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_theta() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleLine {
    pub p: f64,
    pub solver: f64,
    pub oracle: f64,
    pub relative_gap: f64,
    pub pass: bool,
}

pub fn run_oracle(spec: &OracleSpec) -> anyhow::Result<Vec<OracleLine>> {
    let space = match (&spec.fixture, &spec.space) {
        (Some(name), None) => fixtures::by_name(name)?,
        (None, Some(doc)) => io::space_from_document(doc.clone())?,
        _ => bail!("oracle spec needs exactly one of fixture or space"),
    };
    let e = SubsetMask::from_ids(space.len(), &spec.obstacle, "E");
    if e.is_empty() {
        bail!("oracle obstacle is empty");
    }
    let opts = SolveOptions::seeded(spec.seed);
    let mut lines = Vec::new();
    for &p in &spec.ps {
        let instance = QuotientInstance::fractional(&space, &e, spec.theta, p)
            .context("building the quotient instance")?;
        let solver = if p == 2.0 {
            min_quotient_quadratic(&instance, &opts)?.lambda
        } else {
            min_quotient_general(&instance, p, &opts)?.lambda
        };
        let oracle = brute_force_oracle(&instance, p, spec.seed)?;
        let relative_gap = (solver - oracle).abs() / oracle.abs().max(1e-300);
        let mut pass = relative_gap <= 0.01;
        if p == 2.0 {
            let dense = dense_min_eigenvalue(&instance)?;
            pass = pass && (solver - dense).abs() <= 1e-8 * dense.abs().max(1.0);
        }
        lines.push(OracleLine { p, solver, oracle, relative_gap, pass });
    }
    Ok(lines)
}
