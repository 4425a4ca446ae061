//! Enrichment strategies, goal functionals and the adaptive driver loop.

mod driver;
mod goal;
mod select;

pub use driver::{
    run_adaptive, EnrichmentHistory, HistoryRow, Problem, Reference, RunOptions, RunOutcome, StepDetail, Strategy,
    StrategyConfig, Termination, DEFAULT_MAX_ITER,
};
pub use goal::{goal_error, CellRect, GoalFunctional, UNDEFINED_GOAL};
pub use select::{product_indicators, select_combined, select_product, select_standard};
