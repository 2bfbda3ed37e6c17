//! C ABI over `vie-core`.
//!
//! Problems and solutions are opaque heap handles created and released
//! through this interface. Every fallible call returns a [`VieStatus`]; the
//! message for the most recent failure on the calling thread is available
//! from [`vie_last_error`]. The generated header lives at `include/vie.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vie_core::analysis::{self, AnalysisError};
use vie_core::config::{self, ConfigError, ProblemConfig};
use vie_core::problem::DEFAULT_J_MAX;
use vie_core::{solver, Problem, Solution, SolveError};

/// Number of `B(j)` values reported in [`VieDiagnostics`].
pub const VIE_B_LEN: usize = 6;

const _: () = assert!(VIE_B_LEN == DEFAULT_J_MAX + 1);

/// Result codes. The first four match the `vie` CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VieStatus {
    Ok = 0,
    ConfigError = 1,
    NumericalError = 2,
    ParseError = 3,
    NullPointer = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// Opaque problem handle.
pub struct VieProblem {
    inner: Problem,
}

/// Opaque solution handle.
pub struct VieSolution {
    inner: Solution,
}

/// Scalar diagnostics of a problem. Quantities that could not be computed
/// have their `*_defined` flag cleared.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VieDiagnostics {
    pub d0: f64,
    pub d0_defined: bool,
    pub x0_denominator: f64,
    pub x0_denominator_defined: bool,
    /// `B(0) … B(VIE_B_LEN - 1)`, valid when `b_defined`.
    pub b: [f64; VIE_B_LEN],
    pub b_defined: bool,
    /// Bit `j` set when `|B(j)|` is approximately zero.
    pub b_flagged_mask: u32,
    pub ordering_ok: bool,
    pub warning_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

type Failure = (VieStatus, String);

fn config_failure(e: ConfigError) -> Failure {
    let status = match e {
        ConfigError::Expression { .. } => VieStatus::ParseError,
        _ => VieStatus::ConfigError,
    };
    (status, e.to_string())
}

fn solve_failure(e: SolveError) -> Failure {
    let status = if e.is_numerical() {
        VieStatus::NumericalError
    } else {
        VieStatus::ConfigError
    };
    (status, e.to_string())
}

fn analysis_failure(e: AnalysisError) -> Failure {
    let status = match &e {
        AnalysisError::Solve { source, .. } if source.is_numerical() => VieStatus::NumericalError,
        AnalysisError::Exact { .. } => VieStatus::NumericalError,
        _ => VieStatus::ConfigError,
    };
    (status, e.to_string())
}

fn null(name: &str) -> Failure {
    (VieStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> VieStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            VieStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            VieStatus::Panic
        }
    }
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library from the
/// same thread.
#[no_mangle]
pub extern "C" fn vie_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses and validates a problem from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vie_problem_from_json(json: *const c_char, out: *mut *mut VieProblem) -> VieStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| (VieStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let problem = ProblemConfig::from_json(text)
            .and_then(|c| c.to_problem())
            .map_err(config_failure)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(VieProblem { inner: problem })) };
        Ok(())
    })
}

/// One of the built-in examples, `id` in 1..=3.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vie_problem_from_example(id: u32, out: *mut *mut VieProblem) -> VieStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let problem = config::example(id).map_err(|e| match e {
            ConfigError::UnknownExample(_) => (VieStatus::InvalidArgument, e.to_string()),
            other => config_failure(other),
        })?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(VieProblem { inner: problem })) };
        Ok(())
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `problem` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vie_problem_free(problem: *mut VieProblem) {
    if !problem.is_null() {
        // SAFETY: caller guarantees ownership of a live handle.
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Number of kernel pieces, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vie_problem_pieces(problem: *const VieProblem) -> usize {
    // SAFETY: caller guarantees null or live.
    unsafe { problem.as_ref() }.map_or(0, |p| p.inner.pieces())
}

/// Right end of the time interval, or NaN for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vie_problem_horizon(problem: *const VieProblem) -> f64 {
    // SAFETY: caller guarantees null or live.
    unsafe { problem.as_ref() }.map_or(f64::NAN, |p| p.inner.t_end())
}

/// Fills `out` with the problem's diagnostics.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vie_problem_diagnostics(problem: *const VieProblem, out: *mut VieDiagnostics) -> VieStatus {
    guard(|| {
        // SAFETY: caller guarantees null or live.
        let problem = unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let diag = problem.inner.diagnose(DEFAULT_J_MAX);
        let mut report = VieDiagnostics {
            d0: diag.d0.unwrap_or(f64::NAN),
            d0_defined: diag.d0.is_some(),
            x0_denominator: diag.x0_denominator.unwrap_or(f64::NAN),
            x0_denominator_defined: diag.x0_denominator.is_some(),
            b: [f64::NAN; VIE_B_LEN],
            b_defined: diag.b.len() == VIE_B_LEN,
            b_flagged_mask: diag.flagged_b.iter().fold(0, |mask, j| mask | (1 << j)),
            ordering_ok: diag.ordering_ok,
            warning_count: diag.warnings.len(),
        };
        if report.b_defined {
            report.b.copy_from_slice(&diag.b);
        }
        // SAFETY: checked non-null above.
        unsafe { *out = report };
        Ok(())
    })
}

/// Solves on a uniform mesh with `n` segments.
///
/// # Safety
/// `problem` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vie_solve(problem: *const VieProblem, n: usize, out: *mut *mut VieSolution) -> VieStatus {
    guard(|| {
        // SAFETY: caller guarantees null or live.
        let problem = unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let solution = solver::solve(&problem.inner, n).map_err(solve_failure)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(VieSolution { inner: solution })) };
        Ok(())
    })
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// `solution` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vie_solution_free(solution: *mut VieSolution) {
    if !solution.is_null() {
        // SAFETY: caller guarantees ownership of a live handle.
        drop(unsafe { Box::from_raw(solution) });
    }
}

/// Number of mesh segments `N`, or 0 for a null handle. Node arrays have `N + 1` entries.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vie_solution_segments(solution: *const VieSolution) -> usize {
    // SAFETY: caller guarantees null or live.
    unsafe { solution.as_ref() }.map_or(0, |s| s.inner.mesh().segments())
}

/// Copies node times and values into `t_out` and `x_out`, each of length
/// `len = N + 1`. Either output may be null to skip it.
///
/// # Safety
/// Non-null outputs must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vie_solution_nodes(
    solution: *const VieSolution,
    t_out: *mut f64,
    x_out: *mut f64,
    len: usize,
) -> VieStatus {
    guard(|| {
        // SAFETY: caller guarantees null or live.
        let solution = unsafe { solution.as_ref() }.ok_or_else(|| null("solution"))?;
        let expected = solution.inner.mesh().segments() + 1;
        if len != expected {
            return Err((VieStatus::InvalidArgument, format!("len is {len}, expected {expected}")));
        }
        for (i, (t, x)) in solution.inner.node_values().enumerate() {
            // SAFETY: caller guarantees `len` writable slots; i < len.
            unsafe {
                if !t_out.is_null() {
                    *t_out.add(i) = t;
                }
                if !x_out.is_null() {
                    *x_out.add(i) = x;
                }
            }
        }
        Ok(())
    })
}

/// Piecewise-constant value at `t ∈ [0, T]`.
///
/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vie_solution_evaluate(solution: *const VieSolution, t: f64, out: *mut f64) -> VieStatus {
    guard(|| {
        // SAFETY: caller guarantees null or live.
        let solution = unsafe { solution.as_ref() }.ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let value = solution
            .inner
            .evaluate(t)
            .map_err(|e| (VieStatus::InvalidArgument, e.to_string()))?;
        // SAFETY: checked non-null above.
        unsafe { *out = value };
        Ok(())
    })
}

/// Maximum nodal error against the problem's exact solution.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vie_solution_max_error(
    solution: *const VieSolution,
    problem: *const VieProblem,
    out: *mut f64,
) -> VieStatus {
    guard(|| {
        // SAFETY: caller guarantees null or live.
        let solution = unsafe { solution.as_ref() }.ok_or_else(|| null("solution"))?;
        // SAFETY: as above.
        let problem = unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let exact = problem
            .inner
            .exact()
            .ok_or_else(|| analysis_failure(AnalysisError::NoExactSolution))?;
        let eps = analysis::max_node_error(&solution.inner, exact).map_err(analysis_failure)?;
        // SAFETY: checked non-null above.
        unsafe { *out = eps };
        Ok(())
    })
}

/// Convergence study over `len` strictly increasing segment counts. Writes
/// the actual step and maximum nodal error of each mesh into `h_out` and
/// `eps_out` (either may be null).
///
/// # Safety
/// `sizes` must point to `len` readable values and non-null outputs to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vie_convergence(
    problem: *const VieProblem,
    sizes: *const usize,
    len: usize,
    h_out: *mut f64,
    eps_out: *mut f64,
) -> VieStatus {
    guard(|| {
        // SAFETY: caller guarantees null or live.
        let problem = unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))?;
        let sizes: &[usize] = if len == 0 {
            &[]
        } else if sizes.is_null() {
            return Err(null("sizes"));
        } else {
            // SAFETY: caller guarantees `len` readable values.
            unsafe { std::slice::from_raw_parts(sizes, len) }
        };
        let report = analysis::convergence_study(&problem.inner, sizes).map_err(analysis_failure)?;
        for (i, row) in report.rows.iter().enumerate() {
            // SAFETY: caller guarantees `len` writable slots; i < len.
            unsafe {
                if !h_out.is_null() {
                    *h_out.add(i) = row.h;
                }
                if !eps_out.is_null() {
                    *eps_out.add(i) = row.epsilon;
                }
            }
        }
        Ok(())
    })
}
