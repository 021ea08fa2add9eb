//! Adaptive loop (solve → estimate → mark → refine) and uniform refinement.

use serde::{Deserialize, Serialize};

use crate::analysis::{condition_estimate_with, factorize_shifted, principal_eigenvalue_with, EigenOptions};
use crate::assembly::{assemble, solve_restricted, Discretization, RestrictedSystem};
use crate::benchmarks::{energy_error, Benchmark, BenchmarkName, GVariant};
use crate::estimator::{dorfler_mark, estimate};
use crate::linsolve::{SolverKind, SpdSolver};
use crate::mesh::{refine_nvb, refine_uniform, Mesh};
use crate::penalty::{sigma_triangle, sigma_variable_degree, PenaltyConfig, PenaltyField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Adaptive,
    Uniform,
}

/// Penalty formula used in runs. Both coincide for the assembled degree
/// `k = 2`; `Variable` exercises the per-triangle path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SigmaVariant {
    #[default]
    Triangle,
    Variable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub benchmark: BenchmarkName,
    pub mode: Mode,
    pub theta: f64,
    pub a: f64,
    /// The loop stops after the first level with at least this many dofs.
    pub max_ndof: usize,
    pub compute_lambda1: bool,
    pub compute_cond: bool,
    pub sigma_variant: SigmaVariant,
    pub solver: SolverKind,
    pub g_variant: GVariant,
    /// Safety cap on the number of levels.
    pub max_levels: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            benchmark: BenchmarkName::LShape,
            mode: Mode::Adaptive,
            theta: 0.5,
            a: 2.0,
            max_ndof: 20_000,
            compute_lambda1: false,
            compute_cond: false,
            sigma_variant: SigmaVariant::Triangle,
            solver: SolverKind::Direct,
            g_variant: GVariant::Symmetric,
            max_levels: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub level: usize,
    pub ndof: usize,
    pub triangles: usize,
    pub eta: f64,
    pub error: Option<f64>,
    pub lambda1: Option<f64>,
    pub cond1: Option<f64>,
}

/// Everything produced on one level.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub record: RunRecord,
    pub penalty: PenaltyField,
    pub solution: Vec<f64>,
    pub eta2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    /// Mesh of the last level.
    pub mesh: Mesh,
    /// Per-triangle η² on the last level.
    pub eta2: Vec<f64>,
}

pub fn run(config: &RunConfig) -> Result<Vec<RunRecord>> {
    Ok(run_full(config)?.records)
}

pub fn run_full(config: &RunConfig) -> Result<RunOutput> {
    if !(config.theta > 0.0 && config.theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1], got {}", config.theta)));
    }
    let benchmark = Benchmark::new(config.benchmark, config.g_variant);
    let mut mesh = benchmark.initial_mesh.clone();
    let mut records = Vec::new();
    for level in 0..config.max_levels {
        let result = solve_level(&mesh, &benchmark, config, level).map_err(|e| Error::AtLevel {
            level,
            source: Box::new(e),
        })?;
        log::info!(
            "level {level}: ndof {} triangles {} eta {:.4e}",
            result.record.ndof,
            result.record.triangles,
            result.record.eta
        );
        let done = result.record.ndof >= config.max_ndof || level + 1 == config.max_levels;
        records.push(result.record);
        if done {
            return Ok(RunOutput {
                records,
                mesh,
                eta2: result.eta2,
            });
        }
        mesh = match config.mode {
            Mode::Uniform => refine_uniform(&mesh)?,
            Mode::Adaptive => refine_nvb(&mesh, &dorfler_mark(&result.eta2, config.theta)?)?,
        };
    }
    unreachable!("the loop returns on its last level")
}

pub fn penalty_for(disc: &Discretization, variant: SigmaVariant, a: f64) -> Result<PenaltyField> {
    match variant {
        SigmaVariant::Triangle => sigma_triangle(&PenaltyConfig { a, k: 2 }, &disc.geom, &disc.topo),
        SigmaVariant::Variable => sigma_variable_degree(a, &vec![2; disc.geom.area.len()], &disc.geom, &disc.topo),
    }
}

/// Solve, estimate and analyse one mesh.
pub fn solve_level(mesh: &Mesh, benchmark: &Benchmark, config: &RunConfig, level: usize) -> Result<LevelResult> {
    let disc = Discretization::new(mesh)?;
    let penalty = penalty_for(&disc, config.sigma_variant, config.a)?;
    let f = |p| benchmark.rhs(p);
    let system = assemble(mesh, &disc, &penalty.sigma, &f)?;
    let restricted = RestrictedSystem::new(&system, &disc.dofs);
    let ndof = disc.dofs.ndof();
    if ndof == 0 {
        return Err(Error::InsufficientData("mesh has no interior degrees of freedom".into()));
    }

    let solver = SpdSolver::new(&restricted.system, config.solver)?;
    let solution = solve_restricted(&restricted, &solver, &disc.dofs)?;
    // the analysis needs a factorization even when the solve used CG
    let direct = if !(config.compute_lambda1 || config.compute_cond) {
        None
    } else if config.solver == SolverKind::Direct {
        Some(solver)
    } else {
        Some(factorize_shifted(&restricted.system)?)
    };

    let est = estimate(mesh, &disc, &penalty.sigma, &solution.coefficients, &f);
    let error = match &benchmark.exact {
        Some(u) => Some(energy_error(mesh, &disc, &penalty.sigma, &solution.coefficients, u)?),
        None => None,
    };
    let lambda1 = match (&direct, config.compute_lambda1) {
        (Some(s), true) => Some(principal_eigenvalue_with(&restricted.norm, s, EigenOptions::default())?.lambda1),
        _ => None,
    };
    let cond1 = match (&direct, config.compute_cond) {
        (Some(s), true) => Some(condition_estimate_with(&restricted.system, s)?),
        _ => None,
    };

    Ok(LevelResult {
        record: RunRecord {
            level,
            ndof,
            triangles: mesh.num_triangles(),
            eta: est.eta,
            error,
            lambda1,
            cond1,
        },
        penalty,
        solution: solution.coefficients,
        eta2: est.eta2,
    })
}

/// One row of a penalty-prefactor sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub ndof: usize,
    pub lambda1: f64,
    pub cond1: f64,
}

/// `λ₁` and the condition estimate of `B` on a fixed mesh for every `a`.
/// The matrices do not depend on the load, so none is needed.
pub fn sweep_a(mesh: &Mesh, a_values: &[f64]) -> Result<Vec<SweepRow>> {
    let disc = Discretization::new(mesh)?;
    let mut rows = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let penalty = penalty_for(&disc, SigmaVariant::Triangle, a)?;
        let system = assemble(mesh, &disc, &penalty.sigma, &|_| 0.0)?;
        let restricted = RestrictedSystem::new(&system, &disc.dofs);
        let solver = factorize_shifted(&restricted.system)?;
        let lambda1 = principal_eigenvalue_with(&restricted.norm, &solver, EigenOptions::default())?.lambda1;
        let cond1 = condition_estimate_with(&restricted.system, &solver)?;
        log::info!("a = {a}: lambda1 {lambda1:.6} cond1 {cond1:.4e}");
        rows.push(SweepRow {
            a,
            ndof: disc.dofs.ndof(),
            lambda1,
            cond1,
        });
    }
    Ok(rows)
}

/// `a = 1, 2, 4, …, 2¹⁷`.
pub fn default_a_values() -> Vec<f64> {
    (0..=17).map(|e| 2f64.powi(e)).collect()
}

/// The initial mesh of a benchmark after `rounds` uniform refinements.
pub fn uniform_mesh(benchmark: BenchmarkName, rounds: usize) -> Result<Mesh> {
    let mut mesh = Benchmark::new(benchmark, GVariant::default()).initial_mesh;
    for _ in 0..rounds {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Eta,
    Error,
    Lambda1,
    Cond1,
}

impl Field {
    pub fn get(&self, r: &RunRecord) -> Option<f64> {
        match self {
            Field::Eta => Some(r.eta),
            Field::Error => r.error,
            Field::Lambda1 => r.lambda1,
            Field::Cond1 => r.cond1,
        }
    }
}

/// Least-squares slope of `log(field)` against `log(ndof)` over the last
/// `max(3, n/2)` records.
pub fn empirical_rate(records: &[RunRecord], field: Field) -> Result<f64> {
    let n = records.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} records, at least 3 required")));
    }
    let tail = &records[n - (n / 2).max(3)..];
    let mut pts = Vec::with_capacity(tail.len());
    for r in tail {
        match field.get(r) {
            Some(v) if v > 0.0 && r.ndof > 0 => pts.push(((r.ndof as f64).ln(), v.ln())),
            _ => {
                return Err(Error::InsufficientData(format!(
                    "level {} has no positive {field:?} value",
                    r.level
                )))
            }
        }
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("ndof does not vary".into()));
    }
    Ok(sxy / sxx)
}
