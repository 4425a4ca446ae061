use serde::{Deserialize, Serialize};

use super::goal::{goal_error, GoalFunctional};
use super::select::{check_parameter, product_indicators, select_combined, select_product, select_standard};
use crate::coarse::{extend_space, solve_coarse, Admission, CoarseSystem, Which};
use crate::error::{Error, Result};
use crate::fem::{assemble_functional, energy_norm, solve_dirichlet, NodalVector, PermeabilityField};
use crate::grid::GridPair;
use crate::offline::{build_offline, BasisKind, KappaTildeNodes, MultiscaleSpace, OfflineModel};
use crate::online::{all_indicators, ResidualReport};

pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    Standard { theta: f64, gamma: f64 },
    Combined { beta: f64 },
    Product { tau: f64 },
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Standard { .. } => "standard",
            Strategy::Combined { .. } => "combined",
            Strategy::Product { .. } => "product",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    pub tol: f64,
    /// Defaults to the number of free fine DOFs.
    pub max_dof: Option<usize>,
    pub max_iter: usize,
    pub l_i: usize,
}

impl StrategyConfig {
    pub fn new(strategy: Strategy, tol: f64, l_i: usize) -> Self {
        Self {
            strategy,
            tol,
            max_dof: None,
            max_iter: DEFAULT_MAX_ITER,
            l_i,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.strategy {
            Strategy::Standard { theta, gamma } => {
                check_parameter("theta", theta)?;
                check_parameter("gamma", gamma)?;
            }
            Strategy::Combined { beta } => check_parameter("beta", beta)?,
            Strategy::Product { tau } => check_parameter("tau", tau)?,
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol = {} must be positive", self.tol)));
        }
        if self.l_i == 0 {
            return Err(Error::Config("l_i must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything that defines the continuous problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub grid: GridPair,
    pub field: PermeabilityField,
    /// Cell-wise source density `f`.
    pub source: Vec<f64>,
    pub goal: GoalFunctional,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Skip the fine reference solves and leave the error columns empty.
    pub no_reference: bool,
    pub kappa_tilde_nodes: KappaTildeNodes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The strategy's stopping sum fell to `tol`.
    Converged,
    IterationCap,
    DofCap,
    /// Selection was empty or every candidate was dropped or rejected.
    NoAdmissibleBasis,
}

/// One row per iteration `m`: the state of `V_ms^m` and the number of bases
/// added on the way to `V_ms^{m+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub m: usize,
    pub dof: usize,
    pub goal_error: Option<f64>,
    pub primal_energy_error: Option<f64>,
    pub dual_energy_error: Option<f64>,
    pub n_primal_added: usize,
    pub n_dual_added: usize,
    pub sum_r_sq: f64,
    pub sum_rstar_sq: f64,
}

/// Per-iteration details that do not belong in the CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepDetail {
    pub stop_sum: f64,
    pub selected_primal: Vec<usize>,
    pub selected_dual: Vec<usize>,
    pub dropped: usize,
    pub rejected: usize,
    /// `min λ_{l_i+1}` over the primal (resp. dual) selection.
    pub lambda_p: Option<f64>,
    pub lambda_d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentHistory {
    pub rows: Vec<HistoryRow>,
    pub steps: Vec<StepDetail>,
    pub termination: Termination,
    /// Offline bases dropped as numerically dependent on earlier ones.
    pub offline_rejected: usize,
}

impl EnrichmentHistory {
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn final_goal_error(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.goal_error)
    }
}

/// Fine reference data used only for the error columns.
#[derive(Clone, Debug)]
pub struct Reference {
    pub u: NodalVector,
    pub z: NodalVector,
    pub goal_value: f64,
    pub load_value: f64,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub history: EnrichmentHistory,
    pub u_ms: NodalVector,
    pub z_ms: NodalVector,
    pub reference: Option<Reference>,
    pub space: MultiscaleSpace,
    pub model: OfflineModel,
}

fn stop_sum(strategy: &Strategy, report: &ResidualReport, lambda_next: &[f64]) -> Result<f64> {
    Ok(match strategy {
        Strategy::Standard { .. } => report.sum_r_sq(),
        Strategy::Combined { .. } => report.sum_r_sq() + report.sum_rstar_sq(),
        Strategy::Product { .. } => product_indicators(&report.r, &report.r_star, lambda_next)?.iter().sum(),
    })
}

fn min_lambda(lambda_next: &[f64], sel: &[usize]) -> Option<f64> {
    sel.iter().map(|&i| lambda_next[i]).reduce(f64::min)
}

/// Offline stage followed by the online-adaptive enrichment loop.
pub fn run_adaptive(problem: &Problem, config: &StrategyConfig, options: &RunOptions) -> Result<RunOutcome> {
    config.validate()?;
    let grid = &problem.grid;
    let max_dof = config.max_dof.unwrap_or(grid.num_free());
    let (model, mut space) = build_offline(grid, &problem.field, config.l_i, options.kappa_tilde_nodes)?;
    let load = assemble_functional(grid, &problem.source, 1.0)?;
    let goal = problem.goal.vector(grid)?;
    let (f_norm, g_norm) = (load.norm(), goal.norm());

    let reference = if options.no_reference {
        None
    } else {
        let u = solve_dirichlet(&model.operator, &load)?;
        let z = solve_dirichlet(&model.operator, &goal)?;
        let goal_value = goal.dot(&u);
        let load_value = load.dot(&z);
        Some(Reference {
            u,
            z,
            goal_value,
            load_value,
        })
    };

    // offline bases go through the same admission test as online ones, so a
    // redundant offline set (e.g. every mode on a tiny neighborhood) is pruned
    let offline = std::mem::take(&mut space.bases);
    let mut system = CoarseSystem::new(&load, &goal);
    let offline_rejected = extend_space(&mut space, &mut system, offline)
        .iter()
        .filter(|v| **v != Admission::Accepted)
        .count();
    let mut rows = Vec::new();
    let mut steps = Vec::new();
    let mut m = 0;
    loop {
        let u_ms = solve_coarse(&space, &system, Which::Primal)?;
        let z_ms = solve_coarse(&space, &system, Which::Dual)?;
        let report = all_indicators(
            &model.operator,
            &model.neighborhoods,
            &model.locals,
            &load,
            &goal,
            &u_ms,
            &z_ms,
            m,
        )?;
        let (goal_err, e_u, e_z) = match &reference {
            Some(rf) => (
                Some(goal_error(&u_ms, &rf.u, &goal)?),
                Some(energy_norm(&model.operator, &rf.u.sub(&u_ms))),
                Some(energy_norm(&model.operator, &rf.z.sub(&z_ms))),
            ),
            None => (None, None, None),
        };
        let mut row = HistoryRow {
            m,
            dof: space.dim(),
            goal_error: goal_err,
            primal_energy_error: e_u,
            dual_energy_error: e_z,
            n_primal_added: 0,
            n_dual_added: 0,
            sum_r_sq: report.sum_r_sq(),
            sum_rstar_sq: report.sum_rstar_sq(),
        };
        let mut step = StepDetail {
            stop_sum: stop_sum(&config.strategy, &report, &space.lambda_next)?,
            ..Default::default()
        };

        let finished = if step.stop_sum <= config.tol {
            Some(Termination::Converged)
        } else if m >= config.max_iter {
            Some(Termination::IterationCap)
        } else if space.dim() >= max_dof {
            Some(Termination::DofCap)
        } else {
            None
        };
        if let Some(termination) = finished {
            rows.push(row);
            steps.push(step);
            let history = EnrichmentHistory {
                rows,
                steps,
                termination,
                offline_rejected,
            };
            return Ok(RunOutcome {
                history,
                u_ms,
                z_ms,
                reference,
                space,
                model,
            });
        }

        let (primal, dual): (Vec<usize>, Vec<usize>) = match config.strategy {
            Strategy::Standard { theta, gamma } => select_standard(&report.r, &report.r_star, theta, gamma)?,
            Strategy::Combined { beta } => {
                let tagged = select_combined(&report.r, &report.r_star, beta)?;
                let p = tagged.iter().filter(|t| t.1 == Which::Primal).map(|t| t.0).collect();
                let d = tagged.iter().filter(|t| t.1 == Which::Dual).map(|t| t.0).collect();
                (p, d)
            }
            Strategy::Product { tau } => {
                let sel = select_product(&report.r, &report.r_star, &space.lambda_next, tau)?;
                (sel.clone(), sel)
            }
        };
        step.lambda_p = min_lambda(&space.lambda_next, &primal);
        step.lambda_d = min_lambda(&space.lambda_next, &dual);

        let mut candidates = Vec::new();
        for (sel, kind, norm) in [
            (&primal, BasisKind::OnlinePrimal, f_norm),
            (&dual, BasisKind::OnlineDual, g_norm),
        ] {
            for &i in sel {
                match report.candidate(&model.operator, &model.neighborhoods[i], kind, norm) {
                    Some(b) => candidates.push(b),
                    None => step.dropped += 1,
                }
            }
        }
        let kinds: Vec<BasisKind> = candidates.iter().map(|b| b.kind).collect();
        let verdicts = extend_space(&mut space, &mut system, candidates);
        for (kind, v) in kinds.iter().zip(&verdicts) {
            match (kind, v) {
                (BasisKind::OnlinePrimal, Admission::Accepted) => row.n_primal_added += 1,
                (BasisKind::OnlineDual, Admission::Accepted) => row.n_dual_added += 1,
                _ => step.rejected += 1,
            }
        }
        step.selected_primal = primal;
        step.selected_dual = dual;
        let added = row.n_primal_added + row.n_dual_added;
        rows.push(row);
        steps.push(step);
        if added == 0 {
            let u_ms = solve_coarse(&space, &system, Which::Primal)?;
            let z_ms = solve_coarse(&space, &system, Which::Dual)?;
            let history = EnrichmentHistory {
                rows,
                steps,
                termination: Termination::NoAdmissibleBasis,
                offline_rejected,
            };
            return Ok(RunOutcome {
                history,
                u_ms,
                z_ms,
                reference,
                space,
                model,
            });
        }
        m += 1;
    }
}
