//! Command-line plumbing: field ingestion and generation, run configuration
//! and output files.

mod args;
mod field_io;
mod fieldgen;
mod source;

pub use args::Args;
pub use field_io::{format_grid, load_field, parse_field, save_field, save_nodal};
pub use fieldgen::{ex1, ex3, generate_field, preset, Feature, FeatureKind, FieldSpec, Inclusions, PRESETS};
pub use source::{SourceSpec, DEFAULT_BLOCK_AMPLITUDE};

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::adapt::{
    run_adaptive, EnrichmentHistory, GoalFunctional, HistoryRow, Problem, RunOptions, RunOutcome, StepDetail,
    StrategyConfig, Termination,
};
use crate::error::{Error, Result};
use crate::fem::PermeabilityField;
use crate::grid::GridPair;

/// Default goal region `[1/16, 1/8] × [0, 1/16]` with unit scale.
pub const DEFAULT_GOAL: [f64; 5] = [0.0625, 0.0, 0.125, 0.0625, 1.0];

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSource {
    File(PathBuf),
    Generated { spec: FieldSpec, seed: Option<u64> },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub coarse: usize,
    pub refine: usize,
    pub field: FieldSource,
    pub source: SourceSpec,
    pub goal: GoalFunctional,
    pub strategy: StrategyConfig,
    pub options: RunOptions,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn grid(&self) -> Result<GridPair> {
        GridPair::new(self.coarse, self.coarse, self.refine)
    }

    pub fn load_field(&self, grid: &GridPair) -> Result<PermeabilityField> {
        let field = match &self.field {
            FieldSource::File(p) => load_field(p)?,
            FieldSource::Generated { spec, seed } => generate_field(spec, grid.fine_nx(), grid.fine_ny(), *seed)?,
        };
        if field.nx() != grid.fine_nx() || field.ny() != grid.fine_ny() {
            return Err(Error::Config(format!(
                "field is {}x{} cells but the grid has {}x{} fine cells",
                field.nx(),
                field.ny(),
                grid.fine_nx(),
                grid.fine_ny()
            )));
        }
        Ok(field)
    }

    pub fn problem(&self) -> Result<Problem> {
        let grid = self.grid()?;
        let field = self.load_field(&grid)?;
        let source = self.source.density(&grid);
        Ok(Problem {
            grid,
            field,
            source,
            goal: self.goal,
        })
    }
}

/// Process exit status for a finished run.
pub fn exit_code(termination: Termination) -> i32 {
    match termination {
        Termination::Converged => 0,
        Termination::IterationCap | Termination::DofCap | Termination::NoAdmissibleBasis => 2,
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    termination: Termination,
    exit_code: i32,
    iterations: usize,
    offline_dof: usize,
    offline_rejected: usize,
    final_dof: usize,
    final_goal_error: Option<f64>,
    goal_value: Option<f64>,
    load_value_at_dual: Option<f64>,
    coarse: usize,
    refine: usize,
    fine_free_dofs: usize,
    contrast: f64,
    strategy: &'a StrategyConfig,
    options: &'a RunOptions,
    goal: &'a GoalFunctional,
    source: &'a SourceSpec,
    lambda_next: Vec<Option<f64>>,
    steps: &'a [StepDetail],
}

pub fn write_history(path: &Path, rows: &[HistoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_history(path: &Path) -> Result<Vec<HistoryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn write_outputs(cfg: &RunConfig, problem: &Problem, out: &RunOutcome) -> Result<()> {
    let dir = &cfg.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let h: &EnrichmentHistory = &out.history;
    write_history(&dir.join("history.csv"), &h.rows)?;
    let grid = &problem.grid;
    save_field(&dir.join("permeability.txt"), &problem.field)?;
    save_nodal(&dir.join("u_ms.txt"), grid, &out.u_ms)?;
    save_nodal(&dir.join("z_ms.txt"), grid, &out.z_ms)?;
    if let Some(rf) = &out.reference {
        save_nodal(&dir.join("u_fine.txt"), grid, &rf.u)?;
        save_nodal(&dir.join("z_fine.txt"), grid, &rf.z)?;
    }
    let summary = Summary {
        termination: h.termination,
        exit_code: exit_code(h.termination),
        iterations: h.iterations(),
        offline_dof: h.rows.first().map_or(0, |r| r.dof),
        offline_rejected: h.offline_rejected,
        final_dof: out.space.dim(),
        final_goal_error: h.final_goal_error(),
        goal_value: out.reference.as_ref().map(|r| r.goal_value),
        load_value_at_dual: out.reference.as_ref().map(|r| r.load_value),
        coarse: cfg.coarse,
        refine: cfg.refine,
        fine_free_dofs: grid.num_free(),
        contrast: problem.field.contrast(),
        strategy: &cfg.strategy,
        options: &cfg.options,
        goal: &cfg.goal,
        source: &cfg.source,
        // +∞ (all modes selected) has no JSON encoding
        lambda_next: out
            .space
            .lambda_next
            .iter()
            .map(|&l| l.is_finite().then_some(l))
            .collect(),
        steps: &h.steps,
    };
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Executes one configured run and writes every output file.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let problem = cfg.problem()?;
    let outcome = run_adaptive(&problem, &cfg.strategy, &cfg.options)?;
    write_outputs(cfg, &problem, &outcome)?;
    Ok(outcome)
}
