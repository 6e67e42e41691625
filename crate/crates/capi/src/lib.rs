//! C ABI over the bound library: opaque handles, integer statuses, and a
//! thread-local error message. Array data is copied into caller-owned
//! buffers; the only allocations that cross the boundary are the handles,
//! each released by its matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use bihari::bounds::BoundResult;
use bihari::instance::InstanceKind;
use bihari::scenario::{compute_bound, compute_solution, Built, Scenario};
use bihari::solver::{check_dominance, Solution};
use bihari::Error;

/// Result of any fallible call. `SOLVER` covers non-convergence and
/// divergence of the equality-case iteration; `SCENARIO` covers every other
/// library error (parse, schema, hypothesis, numeric domain). `INTERNAL`
/// reports a caught panic and indicates a bug in the library itself.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BihariStatus {
    Ok = 0,
    NullArgument = 1,
    Scenario = 2,
    Solver = 3,
    Internal = 4,
}

/// Column selector for `bihari_bound_column`. Columns a bound kind does not
/// produce (for example `FACTOR` outside the class-H kinds) read as zeros.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BihariColumn {
    T = 0,
    A = 1,
    Eta = 2,
    Inner = 3,
    P = 4,
    Q = 5,
    Factor = 6,
    Bound = 7,
}

/// A parsed and validated scenario, ready to bound or solve.
pub struct BihariInstance {
    scenario: Scenario,
    built: Built,
}

/// A computed bound, restricted to the certified prefix `[a, t_star]`.
pub struct BihariBound {
    inner: BoundResult,
}

/// A fixed-point solution of the equality case, on the full grid.
pub struct BihariSolution {
    inner: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = clean);
}

fn status_of(e: &Error) -> BihariStatus {
    match e {
        Error::NotConverged { .. } | Error::Diverging { .. } => BihariStatus::Solver,
        _ => BihariStatus::Scenario,
    }
}

fn fail(e: Error) -> BihariStatus {
    let status = status_of(&e);
    set_error(&e.to_string());
    status
}

/// Run `f` with panics converted to `INTERNAL` so no unwind crosses the
/// C boundary.
fn guarded(f: impl FnOnce() -> BihariStatus) -> BihariStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            BihariStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, BihariStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(BihariStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error("string argument is not valid UTF-8");
            Err(BihariStatus::NullArgument)
        }
    }
}

fn store_instance(scenario: Scenario, out: *mut *mut BihariInstance) -> BihariStatus {
    match scenario.build(false) {
        Ok(built) => {
            let handle = Box::new(BihariInstance { scenario, built });
            unsafe { *out = Box::into_raw(handle) };
            BihariStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Parse a scenario from TOML text and build it into an instance handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer; on
/// `BIHARI_STATUS_OK` the caller owns the handle written to `*out` and must
/// release it with `bihari_instance_free`.
#[no_mangle]
pub unsafe extern "C" fn bihari_instance_from_toml(
    text: *const c_char,
    out: *mut *mut BihariInstance,
) -> BihariStatus {
    if out.is_null() {
        set_error("null output pointer");
        return BihariStatus::NullArgument;
    }
    let text = match read_str(text) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| match Scenario::from_toml(text) {
        Ok(s) => store_instance(s, out),
        Err(e) => fail(e),
    })
}

/// Read a scenario file from disk and build it into an instance handle.
///
/// # Safety
/// Same contract as [`bihari_instance_from_toml`]; `path` must be a
/// NUL-terminated file path.
#[no_mangle]
pub unsafe extern "C" fn bihari_instance_from_file(
    path: *const c_char,
    out: *mut *mut BihariInstance,
) -> BihariStatus {
    if out.is_null() {
        set_error("null output pointer");
        return BihariStatus::NullArgument;
    }
    let path = match read_str(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    guarded(|| match Scenario::from_path(Path::new(path)) {
        Ok(s) => store_instance(s, out),
        Err(e) => fail(e),
    })
}

/// Scenario kind token: "lemma1", "thm1", "lemma2", "thm2" or
/// "application". Returns a static string; NULL for a null handle.
///
/// # Safety
/// `inst` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_instance_kind(inst: *const BihariInstance) -> *const c_char {
    let Some(inst) = inst.as_ref() else {
        return std::ptr::null();
    };
    match inst.scenario.kind {
        InstanceKind::Lemma1 => c"lemma1".as_ptr(),
        InstanceKind::Thm1 => c"thm1".as_ptr(),
        InstanceKind::Lemma2 => c"lemma2".as_ptr(),
        InstanceKind::Thm2 => c"thm2".as_ptr(),
        InstanceKind::Application => c"application".as_ptr(),
    }
}

/// Number of grid nodes the instance discretises onto (0 for NULL).
///
/// # Safety
/// `inst` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_instance_grid_points(inst: *const BihariInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.scenario.grid_points)
}

/// Release an instance handle. NULL is a no-op.
///
/// # Safety
/// `inst` must be a handle from this library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bihari_instance_free(inst: *mut BihariInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Compute the certified bound for the instance, using the psi argument
/// mode declared in the scenario.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer; on
/// `BIHARI_STATUS_OK` the caller owns the bound handle written to `*out`
/// and must release it with `bihari_bound_free`.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_compute(
    inst: *const BihariInstance,
    out: *mut *mut BihariBound,
) -> BihariStatus {
    let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
        set_error("null argument");
        return BihariStatus::NullArgument;
    };
    guarded(|| match compute_bound(&inst.built, inst.scenario.psi_mode) {
        Ok(result) => {
            unsafe { *out = Box::into_raw(Box::new(BihariBound { inner: result })) };
            BihariStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Number of certified nodes in the bound (0 for NULL). Every column has
/// exactly this many entries.
///
/// # Safety
/// `bound` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_len(bound: *const BihariBound) -> usize {
    bound.as_ref().map_or(0, |b| b.inner.len())
}

/// The certified horizon `t_star` (NaN for NULL).
///
/// # Safety
/// `bound` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_t_star(bound: *const BihariBound) -> f64 {
    bound.as_ref().map_or(f64::NAN, |b| b.inner.t_star.value)
}

/// Grid node index of `t_star` (0 for NULL).
///
/// # Safety
/// `bound` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_t_star_node(bound: *const BihariBound) -> usize {
    bound.as_ref().map_or(0, |b| b.inner.t_star.node_index)
}

/// True when the domain condition already fails at the first grid step and
/// only the initial node is certified.
///
/// # Safety
/// `bound` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_degenerate(bound: *const BihariBound) -> bool {
    bound.as_ref().is_some_and(|b| b.inner.t_star.empty)
}

/// Copy one column of the bound table into `dst`, writing
/// `min(cap, bihari_bound_len(bound))` values.
///
/// # Safety
/// `bound` must be a live handle and `dst` must point to at least `cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_column(
    bound: *const BihariBound,
    column: BihariColumn,
    dst: *mut f64,
    cap: usize,
) -> BihariStatus {
    let (Some(bound), false) = (bound.as_ref(), dst.is_null()) else {
        set_error("null argument");
        return BihariStatus::NullArgument;
    };
    let r = &bound.inner;
    let data = match column {
        BihariColumn::T => &r.nodes,
        BihariColumn::A => &r.a_samples,
        BihariColumn::Eta => &r.eta_samples,
        BihariColumn::Inner => &r.inner_samples,
        BihariColumn::P => &r.p_samples,
        BihariColumn::Q => &r.q_samples,
        BihariColumn::Factor => &r.factor_samples,
        BihariColumn::Bound => &r.bound_samples,
    };
    let want = r.len().min(cap);
    for i in 0..want {
        // kinds without a given diagnostic leave its column empty
        *dst.add(i) = data.get(i).copied().unwrap_or(0.0);
    }
    BihariStatus::Ok
}

/// Release a bound handle. NULL is a no-op.
///
/// # Safety
/// `bound` must be a handle from this library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bihari_bound_free(bound: *mut BihariBound) {
    if !bound.is_null() {
        drop(Box::from_raw(bound));
    }
}

/// Solve the equality case of the instance by Picard iteration, using the
/// solver settings declared in the scenario.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer; on
/// `BIHARI_STATUS_OK` the caller owns the solution handle written to
/// `*out` and must release it with `bihari_solution_free`.
#[no_mangle]
pub unsafe extern "C" fn bihari_solve(
    inst: *const BihariInstance,
    out: *mut *mut BihariSolution,
) -> BihariStatus {
    let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
        set_error("null argument");
        return BihariStatus::NullArgument;
    };
    guarded(|| match compute_solution(&inst.built, &inst.scenario.picard) {
        Ok(solution) => {
            unsafe { *out = Box::into_raw(Box::new(BihariSolution { inner: solution })) };
            BihariStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Number of grid nodes in the solution (0 for NULL); the solution always
/// covers the full grid, certified or not.
///
/// # Safety
/// `sol` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_solution_len(sol: *const BihariSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.values.len())
}

/// Copy the solution values into `dst`, writing
/// `min(cap, bihari_solution_len(sol))` values.
///
/// # Safety
/// `sol` must be a live handle and `dst` must point to at least `cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bihari_solution_values(
    sol: *const BihariSolution,
    dst: *mut f64,
    cap: usize,
) -> BihariStatus {
    copy_out(sol, dst, cap, |s| &s.values)
}

/// Copy the pointwise fixed-point residual into `dst`, writing
/// `min(cap, bihari_solution_len(sol))` values.
///
/// # Safety
/// `sol` must be a live handle and `dst` must point to at least `cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bihari_solution_residual(
    sol: *const BihariSolution,
    dst: *mut f64,
    cap: usize,
) -> BihariStatus {
    copy_out(sol, dst, cap, |s| &s.residual)
}

unsafe fn copy_out(
    sol: *const BihariSolution,
    dst: *mut f64,
    cap: usize,
    pick: impl Fn(&Solution) -> &Vec<f64>,
) -> BihariStatus {
    let (Some(sol), false) = (sol.as_ref(), dst.is_null()) else {
        set_error("null argument");
        return BihariStatus::NullArgument;
    };
    let data = pick(&sol.inner);
    let want = data.len().min(cap);
    std::ptr::copy_nonoverlapping(data.as_ptr(), dst, want);
    BihariStatus::Ok
}

/// Supremum of the fixed-point residual (NaN for NULL).
///
/// # Safety
/// `sol` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_solution_residual_sup(sol: *const BihariSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.inner.residual_sup)
}

/// Picard sweeps performed before convergence (0 for NULL).
///
/// # Safety
/// `sol` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn bihari_solution_iterations(sol: *const BihariSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.inner.iterations)
}

/// Release a solution handle. NULL is a no-op.
///
/// # Safety
/// `sol` must be a handle from this library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bihari_solution_free(sol: *mut BihariSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Check that the bound dominates the solution over the certified prefix:
/// pass means `u - bound <= abs_tol + rel_tol * |bound|` at every certified
/// node. Writes the verdict to `*pass` and the largest `u - bound` seen to
/// `*max_violation` (either may be NULL to skip it).
///
/// # Safety
/// `sol` and `bound` must be live handles; `pass` and `max_violation` must
/// each be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn bihari_check_dominance(
    sol: *const BihariSolution,
    bound: *const BihariBound,
    abs_tol: f64,
    rel_tol: f64,
    pass: *mut bool,
    max_violation: *mut f64,
) -> BihariStatus {
    let (Some(sol), Some(bound)) = (sol.as_ref(), bound.as_ref()) else {
        set_error("null argument");
        return BihariStatus::NullArgument;
    };
    let report = check_dominance(&sol.inner.values, &bound.inner, abs_tol, rel_tol);
    if !pass.is_null() {
        *pass = report.pass;
    }
    if !max_violation.is_null() {
        *max_violation = report.max_violation;
    }
    BihariStatus::Ok
}

/// Description of the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next failing call on the same
/// thread.
#[no_mangle]
pub extern "C" fn bihari_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bihari_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
