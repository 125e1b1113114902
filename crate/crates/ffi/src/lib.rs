//! C ABI over `fpga_defrag`.
//!
//! Layouts and strategy reports are opaque heap handles released with their
//! matching `*_free` function. Every fallible call returns an [`FdStatus`];
//! on failure a message is available from [`fd_last_error_message`] until the
//! next call on the same thread. Strings returned by the library are freed
//! with [`fd_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fpga_defrag::format::{parse_layout, write_layout};
use fpga_defrag::oracle::{bfs_optimum, min_moves_to_size, OracleOptions, Reachability};
use fpga_defrag::sim::{generate_workload, simulate_schedule, Policy, SimConfig, WorkloadParams};
use fpga_defrag::strategies::{tabu_defrag, Strategy};
use fpga_defrag::{Device, Layout, Move, StrategyReport};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidMove = 4,
    Precondition = 5,
    InvalidArgument = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStrategy {
    LeftRightShift = 0,
    Greedy = 1,
    Tabu = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdPolicy {
    None = 0,
    Greedy = 1,
    Tabu = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdReachability {
    Reached = 0,
    Unreachable = 1,
    Truncated = 2,
}

/// Opaque layout handle.
pub struct FdLayout(Layout);

/// Opaque strategy report handle.
pub struct FdReport(StrategyReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FdMetrics {
    pub device_length: usize,
    pub module_count: usize,
    pub free_slots: usize,
    pub free_interval_count: usize,
    pub max_free_interval: usize,
    pub fitness: f64,
    pub density: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FdReportSummary {
    pub move_count: usize,
    /// Number of leading moves that lead to the best layout.
    pub best_step: usize,
    pub best_max_free: usize,
    pub best_fitness: f64,
    pub iterations_used: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FdOracleResult {
    pub optimum_max_free: usize,
    pub min_moves_to_optimum: usize,
    pub states_explored: usize,
    pub truncated: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FdTargetResult {
    pub outcome: FdReachability,
    /// Valid when `outcome` is `Reached`.
    pub moves: usize,
    pub states_explored: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FdMakespanResult {
    pub makespan: u64,
    pub defrag_invocations: usize,
    pub relocations: usize,
    pub total_relocation_cost: u64,
    pub rejected_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl ToString) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

type Failure = (FdStatus, String);

/// Runs `body`, records its error message and converts panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FdStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FdStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FdStatus::Panic
        }
    }
}

fn null() -> Failure {
    (FdStatus::NullArgument, "null pointer argument".into())
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| (FdStatus::InvalidUtf8, e.to_string()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message for the most recent failure on this thread (empty after success).
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn fd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance in the text format.
///
/// # Safety
/// `source` must be a nul-terminated string; `layout_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_layout_parse(source: *const c_char, layout_out: *mut *mut FdLayout) -> FdStatus {
    guard(|| {
        let slot = out(layout_out)?;
        *slot = ptr::null_mut();
        let layout = parse_layout(text(source)?).map_err(|e| (FdStatus::ParseError, e.to_string()))?;
        *slot = Box::into_raw(Box::new(FdLayout(layout)));
        Ok(())
    })
}

/// Releases a layout. Null is ignored.
///
/// # Safety
/// `layout` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fd_layout_free(layout: *mut FdLayout) {
    if !layout.is_null() {
        drop(Box::from_raw(layout));
    }
}

/// Serializes a layout; free the result with `fd_string_free`.
///
/// # Safety
/// `layout` must be a live handle; `text_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_layout_to_text(layout: *const FdLayout, text_out: *mut *mut c_char) -> FdStatus {
    guard(|| {
        let slot = out(text_out)?;
        *slot = ptr::null_mut();
        *slot = c_string(write_layout(&borrow(layout)?.0, &[]));
        Ok(())
    })
}

/// # Safety
/// `layout` must be a live handle; `metrics_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_layout_metrics(layout: *const FdLayout, metrics_out: *mut FdMetrics) -> FdStatus {
    guard(|| {
        let l = &borrow(layout)?.0;
        *out(metrics_out)? = FdMetrics {
            device_length: l.device().len(),
            module_count: l.module_count(),
            free_slots: l.free_slots(),
            free_interval_count: l.free_intervals().len(),
            max_free_interval: l.max_free_interval(),
            fitness: l.fitness(),
            density: l.density(),
        };
        Ok(())
    })
}

/// Applies one jump move, producing a new layout; the input is unchanged.
///
/// # Safety
/// `layout` must be a live handle, `module_id` nul-terminated and
/// `layout_out` writable.
#[no_mangle]
pub unsafe extern "C" fn fd_layout_apply_move(
    layout: *const FdLayout,
    module_id: *const c_char,
    new_start: usize,
    layout_out: *mut *mut FdLayout,
) -> FdStatus {
    guard(|| {
        let slot = out(layout_out)?;
        *slot = ptr::null_mut();
        let mv = Move::new(text(module_id)?, new_start);
        let next = borrow(layout)?.0.apply_move(&mv).map_err(|e| (FdStatus::InvalidMove, e.to_string()))?;
        *slot = Box::into_raw(Box::new(FdLayout(next)));
        Ok(())
    })
}

/// Runs a strategy (an `FdStrategy` value). `max_iterations` bounds tabu search (0 selects the
/// default 2n^2) and is ignored by the other strategies.
///
/// # Safety
/// `layout` must be a live handle; `report_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_defrag(
    layout: *const FdLayout,
    strategy: u32,
    max_iterations: usize,
    report_out: *mut *mut FdReport,
) -> FdStatus {
    guard(|| {
        let slot = out(report_out)?;
        *slot = ptr::null_mut();
        let l = &borrow(layout)?.0;
        let report = match strategy {
            s if s == FdStrategy::LeftRightShift as u32 => {
                Strategy::LeftRightShift.run(l).map_err(|e| (FdStatus::Precondition, e.to_string()))?
            }
            s if s == FdStrategy::Greedy as u32 => Strategy::Greedy.run(l).expect("greedy has no precondition"),
            s if s == FdStrategy::Tabu as u32 => tabu_defrag(l, (max_iterations > 0).then_some(max_iterations)),
            other => return Err((FdStatus::InvalidArgument, format!("unknown strategy {other}"))),
        };
        *slot = Box::into_raw(Box::new(FdReport(report)));
        Ok(())
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fd_report_free(report: *mut FdReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `summary_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_report_summary(report: *const FdReport, summary_out: *mut FdReportSummary) -> FdStatus {
    guard(|| {
        let r = &borrow(report)?.0;
        *out(summary_out)? = FdReportSummary {
            move_count: r.moves.len(),
            best_step: r.best_step,
            best_max_free: r.best_max_free,
            best_fitness: r.best_fitness,
            iterations_used: r.iterations_used,
        };
        Ok(())
    })
}

/// Move `index` of the report. The module id is a new string owned by the
/// caller.
///
/// # Safety
/// `report` must be a live handle; both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_report_move(
    report: *const FdReport,
    index: usize,
    module_id_out: *mut *mut c_char,
    new_start_out: *mut usize,
) -> FdStatus {
    guard(|| {
        let r = &borrow(report)?.0;
        let id_slot = out(module_id_out)?;
        let start_slot = out(new_start_out)?;
        let mv = r
            .moves
            .get(index)
            .ok_or_else(|| (FdStatus::OutOfRange, format!("move {index} of {}", r.moves.len())))?;
        *id_slot = c_string(mv.module.as_str().to_owned());
        *start_slot = mv.new_start;
        Ok(())
    })
}

/// Copy of the best layout found, as a new handle.
///
/// # Safety
/// `report` must be a live handle; `layout_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_report_best_layout(report: *const FdReport, layout_out: *mut *mut FdLayout) -> FdStatus {
    guard(|| {
        let slot = out(layout_out)?;
        *slot = ptr::null_mut();
        *slot = Box::into_raw(Box::new(FdLayout(borrow(report)?.0.best_layout.clone())));
        Ok(())
    })
}

fn oracle_options(budget: usize, interchangeable: bool) -> OracleOptions {
    let defaults = OracleOptions::default();
    OracleOptions { budget: if budget == 0 { defaults.budget } else { budget }, interchangeable }
}

/// Exact optimum by breadth-first search. `budget` 0 selects the default.
///
/// # Safety
/// `layout` must be a live handle; `result_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_oracle_optimum(
    layout: *const FdLayout,
    budget: usize,
    interchangeable: bool,
    result_out: *mut FdOracleResult,
) -> FdStatus {
    guard(|| {
        let r = bfs_optimum(&borrow(layout)?.0, oracle_options(budget, interchangeable));
        *out(result_out)? = FdOracleResult {
            optimum_max_free: r.optimum_max_free,
            min_moves_to_optimum: r.min_moves_to_optimum,
            states_explored: r.states_explored,
            truncated: r.truncated,
        };
        Ok(())
    })
}

/// Fewest moves until a free interval of at least `target` slots exists.
///
/// # Safety
/// `layout` must be a live handle; `result_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_oracle_min_moves(
    layout: *const FdLayout,
    target: usize,
    budget: usize,
    interchangeable: bool,
    result_out: *mut FdTargetResult,
) -> FdStatus {
    guard(|| {
        let r = min_moves_to_size(&borrow(layout)?.0, target, oracle_options(budget, interchangeable));
        *out(result_out)? = match r {
            Reachability::Reached { moves, states_explored } => {
                FdTargetResult { outcome: FdReachability::Reached, moves, states_explored }
            }
            Reachability::Unreachable { states_explored } => {
                FdTargetResult { outcome: FdReachability::Unreachable, moves: 0, states_explored }
            }
            Reachability::Truncated { states_explored } => {
                FdTargetResult { outcome: FdReachability::Truncated, moves: 0, states_explored }
            }
        };
        Ok(())
    })
}

/// Generates one seeded workload and simulates it on a homogeneous device
/// under `policy` (an `FdPolicy` value).
///
/// # Safety
/// `result_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fd_simulate_makespan(
    device_length: usize,
    count: usize,
    size_mean: f64,
    duration_mean: f64,
    seed: u64,
    policy: u32,
    result_out: *mut FdMakespanResult,
) -> FdStatus {
    guard(|| {
        let slot = out(result_out)?;
        let invalid = |e: &dyn ToString| (FdStatus::InvalidArgument, e.to_string());
        let device = Device::homogeneous(device_length).map_err(|e| invalid(&e))?;
        let workload = generate_workload(&WorkloadParams { count, size_mean, duration_mean, device_length, seed })
            .map_err(|e| invalid(&e))?;
        let policy = match policy {
            p if p == FdPolicy::None as u32 => Policy::None,
            p if p == FdPolicy::Greedy as u32 => Policy::Greedy,
            p if p == FdPolicy::Tabu as u32 => Policy::Tabu,
            other => return Err((FdStatus::InvalidArgument, format!("unknown policy {other}"))),
        };
        let r = simulate_schedule(&workload, &SimConfig { device, policy }).map_err(|e| invalid(&e))?;
        *slot = FdMakespanResult {
            makespan: r.makespan,
            defrag_invocations: r.defrag_invocations,
            relocations: r.relocations,
            total_relocation_cost: r.total_relocation_cost,
            rejected_count: r.rejected_admissions,
        };
        Ok(())
    })
}
