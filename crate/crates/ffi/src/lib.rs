//! C ABI over the gomsfem solver.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every entry point returns a [`GomsfemStatus`];
//! on failure a message is kept per thread and can be read with
//! [`gomsfem_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gomsfem::adapt::{
    run_adaptive, GoalFunctional, HistoryRow, Problem, RunOptions, RunOutcome, Strategy, StrategyConfig, Termination,
    DEFAULT_MAX_ITER,
};
use gomsfem::cli::{generate_field, preset, SourceSpec, DEFAULT_BLOCK_AMPLITUDE, DEFAULT_GOAL};
use gomsfem::offline::KappaTildeNodes;
use gomsfem::{Error, GridPair, PermeabilityField};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GomsfemStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad grid sizes, strategy parameters, goal region or preset name.
    InvalidArgument = 2,
    /// Non-positive or mis-sized permeability data.
    InvalidField = 3,
    /// Factorization, eigensolver or basis admission failure.
    Numerical = 4,
    /// Output buffer too small; nothing was written.
    BufferTooSmall = 5,
    Io = 6,
    /// An internal panic was caught.
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GomsfemStrategy {
    /// `param_a` = θ, `param_b` = γ.
    Standard = 0,
    /// `param_a` = β.
    Combined = 1,
    /// `param_a` = τ.
    Product = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GomsfemTermination {
    Converged = 0,
    IterationCap = 1,
    DofCap = 2,
    NoAdmissibleBasis = 3,
}

/// Run settings; fill with [`gomsfem_config_default`] and override fields.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GomsfemConfig {
    /// A [`GomsfemStrategy`] value.
    pub strategy: i32,
    pub param_a: f64,
    pub param_b: f64,
    pub tol: f64,
    /// Offline basis functions per neighborhood.
    pub l_i: usize,
    pub max_iter: usize,
    /// 0 means the number of free fine DOFs.
    pub max_dof: usize,
    /// Nonzero skips the fine reference solves; error fields are then NaN.
    pub no_reference: i32,
    /// Nonzero restricts the spectral weight to interior coarse nodes.
    pub interior_kappa_tilde: i32,
}

/// One history row; missing errors are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GomsfemHistoryRow {
    pub m: usize,
    pub dof: usize,
    pub goal_error: f64,
    pub primal_energy_error: f64,
    pub dual_energy_error: f64,
    pub n_primal_added: usize,
    pub n_dual_added: usize,
    pub sum_r_sq: f64,
    pub sum_rstar_sq: f64,
}

/// A fine grid, permeability field, source and goal.
pub struct GomsfemProblem {
    inner: Problem,
}

/// The result of [`gomsfem_run`].
pub struct GomsfemRun {
    inner: RunOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(bytes).unwrap_or_default());
}

fn status_of(err: &Error) -> GomsfemStatus {
    match err {
        Error::InvalidGrid(_)
        | Error::NotInteriorNode { .. }
        | Error::DimensionMismatch { .. }
        | Error::Config(_)
        | Error::UndefinedGoal { .. }
        | Error::FeatureOutOfBounds { .. } => GomsfemStatus::InvalidArgument,
        Error::NonPositivePermeability { .. }
        | Error::NegativeWeight { .. }
        | Error::FieldValue { .. }
        | Error::Parse { .. } => GomsfemStatus::InvalidField,
        Error::DegenerateNeighborhood(_)
        | Error::Factorization(_)
        | Error::Eigen(_)
        | Error::SingularSpectralMass(_)
        | Error::BasisRejected(_) => GomsfemStatus::Numerical,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => GomsfemStatus::Io,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (GomsfemStatus, String)>) -> GomsfemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GomsfemStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GomsfemStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (GomsfemStatus, String)>;
}

impl<T> OrStatus<T> for gomsfem::Result<T> {
    fn or_status(self) -> Result<T, (GomsfemStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (GomsfemStatus, String) {
    (GomsfemStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or valid for reads of `len` values.
unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (GomsfemStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn default_problem(grid: GridPair, field: PermeabilityField) -> gomsfem::Result<Box<GomsfemProblem>> {
    let source = SourceSpec::Blocks {
        amplitude: DEFAULT_BLOCK_AMPLITUDE,
    }
    .density(&grid);
    let g = DEFAULT_GOAL;
    let goal = GoalFunctional::new(g[0], g[1], g[2], g[3], g[4])?;
    Ok(Box::new(GomsfemProblem {
        inner: Problem {
            grid,
            field,
            source,
            goal,
        },
    }))
}

/// Creates a problem on a `coarse × coarse` grid refined `refine` times per
/// axis, with `kappa` holding one value per fine cell, row-major from the
/// bottom-left. Source and goal start at the CLI defaults.
///
/// # Safety
/// `kappa` must be valid for `len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_new(
    coarse: usize,
    refine: usize,
    kappa: *const f64,
    len: usize,
    out: *mut *mut GomsfemProblem,
) -> GomsfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = GridPair::new(coarse, coarse, refine).or_status()?;
        let values = slice(kappa, len, "kappa")?;
        if values.len() != grid.num_cells() {
            return Err((
                GomsfemStatus::InvalidField,
                format!(
                    "kappa has {} values, the grid has {} cells",
                    values.len(),
                    grid.num_cells()
                ),
            ));
        }
        let field = PermeabilityField::new(grid.fine_nx(), grid.fine_ny(), values.to_vec()).or_status()?;
        *out = Box::into_raw(default_problem(grid, field).or_status()?);
        Ok(())
    })
}

/// Creates a problem from a shipped field spec (`ex1`, `ex3-lo`, `ex3-hi`).
/// `seed` overrides the spec's seed when `has_seed` is nonzero.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_new_preset(
    coarse: usize,
    refine: usize,
    name: *const c_char,
    seed: u64,
    has_seed: i32,
    out: *mut *mut GomsfemProblem,
) -> GomsfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_string_lossy();
        let spec =
            preset(&name).ok_or_else(|| (GomsfemStatus::InvalidArgument, format!("unknown field spec `{name}`")))?;
        let grid = GridPair::new(coarse, coarse, refine).or_status()?;
        let seed = (has_seed != 0).then_some(seed);
        let field = generate_field(&spec, grid.fine_nx(), grid.fine_ny(), seed).or_status()?;
        *out = Box::into_raw(default_problem(grid, field).or_status()?);
        Ok(())
    })
}

/// Number of fine cells, the length expected by [`gomsfem_problem_set_source`].
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_num_cells(problem: *const GomsfemProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.grid.num_cells())
}

/// Replaces the source with a cell-wise density (row-major, bottom-left first).
///
/// # Safety
/// `problem` must be a live handle and `density` valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_set_source(
    problem: *mut GomsfemProblem,
    density: *const f64,
    len: usize,
) -> GomsfemStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        let d = slice(density, len, "density")?;
        if d.len() != p.inner.grid.num_cells() || d.iter().any(|v| !v.is_finite()) {
            return Err((
                GomsfemStatus::InvalidArgument,
                format!("source needs {} finite values", p.inner.grid.num_cells()),
            ));
        }
        p.inner.source = d.to_vec();
        Ok(())
    })
}

/// Replaces the source with `+a` on `[1/8, 3/8]²` and `−a` on `[5/8, 7/8]²`.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_set_source_blocks(
    problem: *mut GomsfemProblem,
    amplitude: f64,
) -> GomsfemStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        if !amplitude.is_finite() {
            return Err((GomsfemStatus::InvalidArgument, "amplitude must be finite".into()));
        }
        p.inner.source = SourceSpec::Blocks { amplitude }.density(&p.inner.grid);
        Ok(())
    })
}

/// Sets the goal `g(v) = scale·∫_K v` over `K = [x0, x1] × [y0, y1]`.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_set_goal(
    problem: *mut GomsfemProblem,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    scale: f64,
) -> GomsfemStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        let goal = GoalFunctional::new(x0, y0, x1, y1, scale).or_status()?;
        goal.cells(&p.inner.grid).or_status()?;
        p.inner.goal = goal;
        Ok(())
    })
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_problem_free(problem: *mut GomsfemProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Combined strategy, β = 0.6, l_i = 3 and the CLI's tolerance and caps.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_config_default(out: *mut GomsfemConfig) -> GomsfemStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = GomsfemConfig {
            strategy: GomsfemStrategy::Combined as i32,
            param_a: 0.6,
            param_b: 0.6,
            tol: 1e-10,
            l_i: 3,
            max_iter: DEFAULT_MAX_ITER,
            max_dof: 0,
            no_reference: 0,
            interior_kappa_tilde: 0,
        };
        Ok(())
    })
}

fn to_config(c: &GomsfemConfig) -> Result<(StrategyConfig, RunOptions), (GomsfemStatus, String)> {
    let strategy = match c.strategy {
        s if s == GomsfemStrategy::Standard as i32 => Strategy::Standard {
            theta: c.param_a,
            gamma: c.param_b,
        },
        s if s == GomsfemStrategy::Combined as i32 => Strategy::Combined { beta: c.param_a },
        s if s == GomsfemStrategy::Product as i32 => Strategy::Product { tau: c.param_a },
        s => return Err((GomsfemStatus::InvalidArgument, format!("unknown strategy {s}"))),
    };
    let mut sc = StrategyConfig::new(strategy, c.tol, c.l_i);
    sc.max_iter = c.max_iter;
    sc.max_dof = (c.max_dof > 0).then_some(c.max_dof);
    let options = RunOptions {
        no_reference: c.no_reference != 0,
        kappa_tilde_nodes: if c.interior_kappa_tilde != 0 {
            KappaTildeNodes::Interior
        } else {
            KappaTildeNodes::All
        },
    };
    Ok((sc, options))
}

/// Runs the offline stage and the adaptive loop.
///
/// # Safety
/// `problem` and `config` must be live, `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_run(
    problem: *const GomsfemProblem,
    config: *const GomsfemConfig,
    out: *mut *mut GomsfemRun,
) -> GomsfemStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (sc, options) = to_config(c)?;
        let outcome = run_adaptive(&p.inner, &sc, &options).or_status()?;
        *out = Box::into_raw(Box::new(GomsfemRun { inner: outcome }));
        Ok(())
    })
}

/// # Safety
/// `run` must be live and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_run_termination(
    run: *const GomsfemRun,
    out: *mut GomsfemTermination,
) -> GomsfemStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match r.inner.history.termination {
            Termination::Converged => GomsfemTermination::Converged,
            Termination::IterationCap => GomsfemTermination::IterationCap,
            Termination::DofCap => GomsfemTermination::DofCap,
            Termination::NoAdmissibleBasis => GomsfemTermination::NoAdmissibleBasis,
        };
        Ok(())
    })
}

/// Number of history rows (iterations + 1), or 0 for a null handle.
///
/// # Safety
/// `run` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_run_history_len(run: *const GomsfemRun) -> usize {
    run.as_ref().map_or(0, |r| r.inner.history.rows.len())
}

/// # Safety
/// `run` must be live and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_run_history_row(
    run: *const GomsfemRun,
    index: usize,
    out: *mut GomsfemHistoryRow,
) -> GomsfemStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rows = &r.inner.history.rows;
        let row: &HistoryRow = rows.get(index).ok_or_else(|| {
            (
                GomsfemStatus::InvalidArgument,
                format!("row {index} out of range ({} rows)", rows.len()),
            )
        })?;
        *out = GomsfemHistoryRow {
            m: row.m,
            dof: row.dof,
            goal_error: row.goal_error.unwrap_or(f64::NAN),
            primal_energy_error: row.primal_energy_error.unwrap_or(f64::NAN),
            dual_energy_error: row.dual_energy_error.unwrap_or(f64::NAN),
            n_primal_added: row.n_primal_added,
            n_dual_added: row.n_dual_added,
            sum_r_sq: row.sum_r_sq,
            sum_rstar_sq: row.sum_rstar_sq,
        };
        Ok(())
    })
}

/// Copies the final multiscale solution (`dual == 0`: primal `u_ms`,
/// otherwise `z_ms`) over the free fine nodes, row-major from the first
/// interior node. Returns [`GomsfemStatus::BufferTooSmall`] when `len` is
/// below the number of free nodes, which is written to `needed` if non-null.
///
/// # Safety
/// `run` must be live, `buf` valid for `len` writes, `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_run_solution(
    run: *const GomsfemRun,
    dual: i32,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> GomsfemStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| null("run"))?;
        let v = if dual == 0 { &r.inner.u_ms } else { &r.inner.z_ms };
        if let Some(n) = needed.as_mut() {
            *n = v.len();
        }
        if len < v.len() {
            return Err((
                GomsfemStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", v.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gomsfem_run_free(run: *mut GomsfemRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gomsfem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gomsfem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
