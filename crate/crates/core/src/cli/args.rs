use std::path::PathBuf;

use clap::{ArgGroup, Parser, ValueEnum};

use super::{preset, FieldSource, FieldSpec, RunConfig, SourceSpec, DEFAULT_GOAL, PRESETS};
use crate::adapt::{GoalFunctional, RunOptions, Strategy, StrategyConfig};
use crate::error::{Error, Result};
use crate::offline::KappaTildeNodes;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    Standard,
    Combined,
    Product,
}

/// Goal-oriented online-adaptive multiscale solver for 2D Darcy flow on the
/// unit square.
#[derive(Debug, Parser)]
#[command(name = "gomsfem", version)]
#[command(group(ArgGroup::new("field_source").required(true).args(["field", "gen"])))]
pub struct Args {
    /// Coarse cells per axis
    #[arg(long, default_value_t = 8)]
    pub coarse: usize,
    /// Fine cells per coarse cell and axis
    #[arg(long, default_value_t = 8)]
    pub refine: usize,
    /// Offline basis functions per neighborhood
    #[arg(long = "li", default_value_t = 3)]
    pub l_i: usize,
    #[arg(long, value_enum, default_value_t = StrategyName::Combined)]
    pub strategy: StrategyName,
    #[arg(long, default_value_t = 0.6)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.6)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.6)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.6)]
    pub tau: f64,
    /// Tolerance on the strategy's stopping sum
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Defaults to the number of free fine DOFs
    #[arg(long)]
    pub max_dof: Option<usize>,
    #[arg(long, default_value_t = crate::adapt::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Permeability file (`nx ny` header, then values)
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Shipped spec name (ex1, ex3-lo, ex3-hi) or a JSON field spec file
    #[arg(long)]
    pub gen: Option<String>,
    /// Seed for randomized field features
    #[arg(long)]
    pub seed: Option<u64>,
    /// Goal region and scale as "x0,y0,x1,y1,scale"
    #[arg(long)]
    pub goal: Option<String>,
    /// `blocks`, `blocks:<amplitude>` or `uniform:<value>`
    #[arg(long, default_value = "blocks")]
    pub source: String,
    /// Skip the fine reference solves (no error columns)
    #[arg(long)]
    pub no_reference: bool,
    /// Restrict the spectral weight to interior coarse nodes
    #[arg(long)]
    pub interior_kappa_tilde: bool,
    #[arg(long, default_value = "gomsfem-out")]
    pub out: PathBuf,
}

fn parse_goal(s: &str) -> Result<GoalFunctional> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(Error::Config(format!(
            "goal `{s}` must have the form x0,y0,x1,y1,scale"
        )));
    }
    let mut v = [0.0; 5];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| Error::Config(format!("`{p}` is not a number in goal `{s}`")))?;
    }
    GoalFunctional::new(v[0], v[1], v[2], v[3], v[4])
}

fn resolve_spec(s: &str) -> Result<FieldSpec> {
    if let Some(spec) = preset(s) {
        return Ok(spec);
    }
    let path = PathBuf::from(s);
    if !path.is_file() {
        return Err(Error::Config(format!(
            "`{s}` is neither a shipped spec ({}) nor a readable JSON file",
            PRESETS.join(", ")
        )));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

impl Args {
    pub fn into_config(self) -> Result<RunConfig> {
        let strategy = match self.strategy {
            StrategyName::Standard => Strategy::Standard {
                theta: self.theta,
                gamma: self.gamma,
            },
            StrategyName::Combined => Strategy::Combined { beta: self.beta },
            StrategyName::Product => Strategy::Product { tau: self.tau },
        };
        let mut sc = StrategyConfig::new(strategy, self.tol, self.l_i);
        sc.max_dof = self.max_dof;
        sc.max_iter = self.max_iter;
        sc.validate()?;

        let field = match (self.field, self.gen) {
            (Some(p), None) => {
                if !p.is_file() {
                    return Err(Error::Config(format!("field file {} does not exist", p.display())));
                }
                FieldSource::File(std::fs::canonicalize(&p).map_err(|e| Error::io(&p, e))?)
            }
            (None, Some(s)) => FieldSource::Generated {
                spec: resolve_spec(&s)?,
                seed: self.seed,
            },
            _ => return Err(Error::Config("give exactly one of --field or --gen".into())),
        };
        let goal = match &self.goal {
            Some(s) => parse_goal(s)?,
            None => {
                let g = DEFAULT_GOAL;
                GoalFunctional::new(g[0], g[1], g[2], g[3], g[4])?
            }
        };
        Ok(RunConfig {
            coarse: self.coarse,
            refine: self.refine,
            field,
            source: self.source.parse::<SourceSpec>()?,
            goal,
            strategy: sc,
            options: RunOptions {
                no_reference: self.no_reference,
                kappa_tilde_nodes: if self.interior_kappa_tilde {
                    KappaTildeNodes::Interior
                } else {
                    KappaTildeNodes::All
                },
            },
            out: self.out,
        })
    }
}
