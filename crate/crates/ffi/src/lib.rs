//! C ABI over `actorseg`.
//!
//! Instances and labelings cross the boundary as opaque handles. Every
//! fallible call returns an [`ActorsegStatus`]; on failure the message is kept
//! per thread and can be read with [`actorseg_last_error`]. Strings handed out
//! by the library are released with [`actorseg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use actorseg::evaluation::segmentation_accuracy;
use actorseg::format::{parse_instance, serialize_labeling};
use actorseg::models::{segment, ModelKind, SegmentOptions, Solver};
use actorseg::{Error, Instance, LabelSpace, Labeling};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActorsegStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Solve = 4,
    Eval = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Parsed instance.
pub struct ActorsegInstance {
    inner: Instance,
}

/// Solver output. Keeps the label space so it can be serialized on its own.
pub struct ActorsegLabeling {
    space: LabelSpace,
    labeling: Labeling,
    energy: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    // interior NULs would truncate the message, so drop them
    let message = CString::new(message.replace('\0', "")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

struct Failure(ActorsegStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::LabelSpace(_) | Error::InvalidTuple { .. } | Error::Parse { .. } => ActorsegStatus::Parse,
            Error::NotMetric(_) | Error::Infeasible(_) | Error::SearchSpace { .. } => ActorsegStatus::Solve,
            Error::Evaluation(_) => ActorsegStatus::Eval,
            Error::InvalidArgument(_) | Error::Io(_) => ActorsegStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ActorsegStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ActorsegStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ActorsegStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {message}"));
            ActorsegStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ActorsegStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn out<T>(p: *mut T, what: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(null(what))
    } else {
        Ok(p)
    }
}

/// Message of the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn actorseg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses instance text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_instance` writable.
#[no_mangle]
pub unsafe extern "C" fn actorseg_instance_parse(
    text: *const c_char,
    out_instance: *mut *mut ActorsegInstance,
) -> ActorsegStatus {
    guard(|| {
        let slot = out(out_instance, "out_instance")?;
        let inner = parse_instance(c_str(text, "text")?)?;
        *slot = Box::into_raw(Box::new(ActorsegInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from [`actorseg_instance_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn actorseg_instance_free(instance: *mut ActorsegInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actorseg_instance_num_nodes(instance: *const ActorsegInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.num_nodes())
}

/// Segments an instance.
///
/// `model` is one of `nb`, `jps`, `cond`, `bilayer`, `trilayer`; `solver` is
/// `expansion`, `swap` or `brute`, and may be null for expansion.
/// `max_sweeps` of 0 keeps the default.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn actorseg_solve(
    instance: *const ActorsegInstance,
    model: *const c_char,
    label_costs: bool,
    solver: *const c_char,
    max_sweeps: u32,
    out_labeling: *mut *mut ActorsegLabeling,
) -> ActorsegStatus {
    guard(|| {
        let slot = out(out_labeling, "out_labeling")?;
        let inst = &borrow(instance, "instance")?.inner;
        let kind: ModelKind = c_str(model, "model")?.parse()?;
        let mut options = SegmentOptions::new(kind);
        options.label_costs = label_costs;
        if !solver.is_null() {
            options.solver = c_str(solver, "solver")?.parse::<Solver>()?;
        }
        if max_sweeps > 0 {
            options.solve.max_sweeps = max_sweeps as usize;
        }
        let seg = segment(inst, &options)?;
        let energy = seg.energy();
        *slot = Box::into_raw(Box::new(ActorsegLabeling {
            space: inst.space.clone(),
            labeling: seg.labeling,
            energy,
        }));
        Ok(())
    })
}

/// # Safety
/// `labeling` must come from [`actorseg_solve`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn actorseg_labeling_free(labeling: *mut ActorsegLabeling) {
    if !labeling.is_null() {
        drop(Box::from_raw(labeling));
    }
}

/// Number of labeled nodes, or 0 for a null handle.
///
/// # Safety
/// `labeling` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actorseg_labeling_len(labeling: *const ActorsegLabeling) -> usize {
    labeling.as_ref().map_or(0, |l| l.labeling.len())
}

/// Total energy of the solved fields, or NaN for a null handle.
///
/// # Safety
/// `labeling` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actorseg_labeling_energy(labeling: *const ActorsegLabeling) -> f64 {
    labeling.as_ref().map_or(f64::NAN, |l| l.energy)
}

/// Actor and action index of one node. Background is reported as the number
/// of actors and the number of actions respectively.
///
/// # Safety
/// `labeling` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn actorseg_labeling_get(
    labeling: *const ActorsegLabeling,
    node: usize,
    out_actor: *mut u32,
    out_action: *mut u32,
) -> ActorsegStatus {
    guard(|| {
        let l = borrow(labeling, "labeling")?;
        let (actor_slot, action_slot) = (out(out_actor, "out_actor")?, out(out_action, "out_action")?);
        let label = l.labeling.labels.get(node).ok_or_else(|| {
            Failure(
                ActorsegStatus::InvalidArgument,
                format!("node {node} out of range for {} nodes", l.labeling.len()),
            )
        })?;
        *actor_slot = label.actor(&l.space) as u32;
        *action_slot = label.action(&l.space) as u32;
        Ok(())
    })
}

/// Labeling file text. Release with [`actorseg_string_free`].
///
/// # Safety
/// `labeling` must be a live handle and `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn actorseg_labeling_serialize(
    labeling: *const ActorsegLabeling,
    out_text: *mut *mut c_char,
) -> ActorsegStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        let l = borrow(labeling, "labeling")?;
        let s = serialize_labeling(&l.space, &l.labeling);
        *slot = CString::new(s).expect("labeling text has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn actorseg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Mean per-class tuple accuracy against the instance's ground truth.
///
/// # Safety
/// Handles must be live and `out_mean` writable.
#[no_mangle]
pub unsafe extern "C" fn actorseg_mean_class_accuracy(
    instance: *const ActorsegInstance,
    labeling: *const ActorsegLabeling,
    out_mean: *mut f64,
) -> ActorsegStatus {
    guard(|| {
        let slot = out(out_mean, "out_mean")?;
        let inst = &borrow(instance, "instance")?.inner;
        let l = borrow(labeling, "labeling")?;
        *slot = segmentation_accuracy(inst, &l.labeling)?.mean;
        Ok(())
    })
}
