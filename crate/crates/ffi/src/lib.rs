//! C interface: compile a model from source, set contexts, solve, read the
//! bindings, emit MiniZinc.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Functions return a [`VmlStatus`]; on failure
//! [`vml_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vml::compile::{compile_source, emit_minizinc, ConstraintProblem, LowerOptions};
use vml::solve::{solve, ContextSnapshot, Solution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VmlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The model has errors; the last error lists them.
    Diagnostics = 3,
    UnknownContext = 4,
    SolveFailed = 5,
    EmitFailed = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// A compiled model and its current context values.
pub struct VmlModel {
    problem: ConstraintProblem,
    context: ContextSnapshot,
}

pub struct VmlSolution {
    solution: Solution,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: VmlStatus, message: impl Into<String>) -> VmlStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> VmlStatus) -> VmlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(VmlStatus::Panic, "internal error"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, VmlStatus> {
    if p.is_null() {
        return Err(fail(VmlStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(VmlStatus::InvalidUtf8, "string is not UTF-8"))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vml_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses, analyzes and compiles `source`; on success `*out` receives a
/// model to release with [`vml_model_free`].
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vml_model_from_source(source: *const c_char, out: *mut *mut VmlModel) -> VmlStatus {
    guard(|| {
        if out.is_null() {
            return fail(VmlStatus::NullArgument, "null output pointer");
        }
        let src = match text(source) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match compile_source(src, LowerOptions::default()) {
            Ok(problem) => {
                *out = Box::into_raw(Box::new(VmlModel { problem, context: ContextSnapshot::new() }));
                VmlStatus::Ok
            }
            Err(diags) => {
                let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
                fail(VmlStatus::Diagnostics, lines.join("\n"))
            }
        }
    })
}

/// # Safety
/// `model` must come from [`vml_model_from_source`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn vml_model_free(model: *mut VmlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Sets a context value; out-of-range values are clamped when solving.
///
/// # Safety
/// `model` must be a live model and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vml_model_set_context(model: *mut VmlModel, name: *const c_char, value: f64) -> VmlStatus {
    guard(|| {
        let Some(m) = model.as_mut() else {
            return fail(VmlStatus::NullArgument, "null model");
        };
        let name = match text(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        if m.problem.parameter(name).is_none() {
            return fail(VmlStatus::UnknownContext, format!("unknown context `{name}`"));
        }
        m.context.set(name, value);
        VmlStatus::Ok
    })
}

/// Solves for the contexts set so far. An infeasible problem still yields a
/// solution; check [`vml_solution_is_optimal`].
///
/// # Safety
/// `model` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vml_model_solve(model: *const VmlModel, out: *mut *mut VmlSolution) -> VmlStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return fail(VmlStatus::NullArgument, "null argument");
        };
        match solve(&m.problem, &m.context) {
            Ok(solution) => {
                let names = solution
                    .bindings
                    .iter()
                    .map(|(n, _)| CString::new(n.as_str()).expect("identifiers have no NUL"))
                    .collect();
                *out = Box::into_raw(Box::new(VmlSolution { solution, names }));
                VmlStatus::Ok
            }
            Err(e) => fail(VmlStatus::SolveFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `solution` must be a live solution or NULL.
#[no_mangle]
pub unsafe extern "C" fn vml_solution_binding_count(solution: *const VmlSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.names.len())
}

/// The `index`-th binding, in declaration order. Enum values are reported
/// as their literal's position. `*name` stays valid while the solution is.
///
/// # Safety
/// `solution` must be live; `name` and `value` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vml_solution_binding(
    solution: *const VmlSolution,
    index: usize,
    name: *mut *const c_char,
    value: *mut f64,
) -> VmlStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(VmlStatus::NullArgument, "null solution");
        };
        if name.is_null() || value.is_null() {
            return fail(VmlStatus::NullArgument, "null output pointer");
        }
        if index >= s.names.len() {
            return fail(VmlStatus::OutOfRange, format!("binding {index} of {}", s.names.len()));
        }
        *name = s.names[index].as_ptr();
        *value = s.solution.bindings[index].1;
        VmlStatus::Ok
    })
}

/// The minimized cost, or NaN when infeasible.
///
/// # Safety
/// `solution` must be a live solution or NULL.
#[no_mangle]
pub unsafe extern "C" fn vml_solution_objective(solution: *const VmlSolution) -> f64 {
    solution.as_ref().and_then(|s| s.solution.objective).unwrap_or(f64::NAN)
}

/// # Safety
/// `solution` must be a live solution or NULL.
#[no_mangle]
pub unsafe extern "C" fn vml_solution_is_optimal(solution: *const VmlSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.solution.is_optimal())
}

/// # Safety
/// `solution` must come from [`vml_model_solve`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn vml_solution_free(solution: *mut VmlSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// MiniZinc text for the model; release it with [`vml_string_free`].
///
/// # Safety
/// `model` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vml_model_emit_minizinc(model: *const VmlModel, out: *mut *mut c_char) -> VmlStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return fail(VmlStatus::NullArgument, "null argument");
        };
        match emit_minizinc(&m.problem) {
            Ok(text) => {
                *out = CString::new(text).expect("emitted text has no NUL").into_raw();
                VmlStatus::Ok
            }
            Err(e) => fail(VmlStatus::EmitFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used after.
#[no_mangle]
pub unsafe extern "C" fn vml_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
