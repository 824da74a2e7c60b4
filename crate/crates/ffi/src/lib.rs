//! C ABI over the quantization engine.
//!
//! Every function returns a [`BshqStatus`]. On failure the message is kept
//! per thread and can be read with [`bshq_last_error`]. Results go into
//! caller-provided buffers; strings handed out must be released with
//! [`bshq_string_free`].

use bshq_core::cli::operator_json;
use bshq_core::ladder::{Convention, DEFAULT_TOLERANCE};
use bshq_core::model::{builtin, parse_model_file, potential_system, LatticeSystem, ModelDefinition};
use bshq_core::numerics::{bs_energy_levels, QuadratureSpec};
use bshq_core::operator::eigenvalues_hermitian;
use bshq_core::verify::run_suite;
use bshq_core::{Category, Error};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BshqStatus {
    Ok = 0,
    /// Bad argument value.
    Usage = 1,
    /// Unknown model or observable, malformed model, semantic violation.
    Model = 2,
    /// Numerical failure.
    Numerical = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    /// The buffer was too small; the required length was written.
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BshqConvention {
    Dirac = 0,
    SemiclassicalSource = 1,
    SemiclassicalMidpoint = 2,
}

impl From<BshqConvention> for Convention {
    fn from(c: BshqConvention) -> Self {
        match c {
            BshqConvention::Dirac => Convention::Dirac,
            BshqConvention::SemiclassicalSource => Convention::SemiclassicalSource,
            BshqConvention::SemiclassicalMidpoint => Convention::SemiclassicalMidpoint,
        }
    }
}

/// Opaque model handle.
pub struct BshqModel {
    model: ModelDefinition,
    hbar: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(BshqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e.category() {
            Category::Usage => BshqStatus::Usage,
            Category::Model => BshqStatus::Model,
            Category::Numerical => BshqStatus::Numerical,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BshqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BshqStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BshqStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(BshqStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BshqStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

unsafe fn handle<'a>(p: *const BshqModel) -> Result<&'a BshqModel, Fail> {
    p.as_ref().ok_or_else(null)
}

fn check_hbar(hbar: f64) -> Result<(), Fail> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Fail(BshqStatus::Usage, format!("hbar must be positive and finite, got {hbar}")))
    }
}

unsafe fn fill(values: &[f64], out: *mut f64, capacity: usize, len: *mut usize) -> Result<(), Fail> {
    if len.is_null() {
        return Err(null());
    }
    *len = values.len();
    if values.len() > capacity {
        return Err(Fail(
            BshqStatus::BufferTooSmall,
            format!("need room for {} values, got {capacity}", values.len()),
        ));
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

fn lattice(m: &BshqModel) -> Result<LatticeSystem, Fail> {
    Ok(LatticeSystem::new(&m.model, m.hbar, None, None)?)
}

/// Message of the last failure on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bshq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builtin model by name. `n` is the so3 parameter; pass 0 for other models.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bshq_model_builtin(
    name: *const c_char,
    hbar: f64,
    n: u32,
    out: *mut *mut BshqModel,
) -> BshqStatus {
    guard(|| {
        let name = text(name)?;
        if out.is_null() {
            return Err(null());
        }
        check_hbar(hbar)?;
        let model = builtin(name, hbar, (n > 0).then_some(n), false)?;
        *out = Box::into_raw(Box::new(BshqModel { model, hbar }));
        Ok(())
    })
}

/// Model from a JSON model document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bshq_model_from_json(
    json: *const c_char,
    hbar: f64,
    out: *mut *mut BshqModel,
) -> BshqStatus {
    guard(|| {
        let json = text(json)?;
        if out.is_null() {
            return Err(null());
        }
        check_hbar(hbar)?;
        let model = parse_model_file(json)?;
        *out = Box::into_raw(Box::new(BshqModel { model, hbar }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from a constructor of this library and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bshq_model_free(model: *mut BshqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of degrees of freedom.
///
/// # Safety
/// `model` and `dof` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bshq_model_dof(model: *const BshqModel, dof: *mut usize) -> BshqStatus {
    guard(|| {
        let m = handle(model)?;
        *dof.as_mut().ok_or_else(null)? = m.model.dof;
        Ok(())
    })
}

/// Sorted eigenvalues of an observable on the model's default box. On
/// `BSHQ_STATUS_BUFFER_TOO_SMALL`, `*len` holds the required capacity.
///
/// # Safety
/// `values` must have room for `capacity` doubles; the other pointers must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn bshq_spectrum(
    model: *const BshqModel,
    observable: *const c_char,
    convention: BshqConvention,
    values: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> BshqStatus {
    guard(|| {
        let m = handle(model)?;
        let name = text(observable)?;
        let sys = lattice(m)?;
        let op = sys.quantize(name, convention.into(), DEFAULT_TOLERANCE)?;
        let ev = eigenvalues_hermitian(&op, 1e-12)?;
        fill(&ev, values, capacity, len)
    })
}

/// Bohr-Sommerfeld energies `E_0, E_1, …` of a potential model. A negative
/// `m_max` solves every level below the top of the oscillation range.
///
/// # Safety
/// As for [`bshq_spectrum`].
#[no_mangle]
pub unsafe extern "C" fn bshq_levels(
    model: *const BshqModel,
    m_max: i64,
    energies: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> BshqStatus {
    guard(|| {
        let m = handle(model)?;
        let sys = potential_system(&m.model, m.hbar)?;
        let m_max = u64::try_from(m_max).ok();
        let table = bs_energy_levels(&sys, m.hbar, m_max, DEFAULT_TOLERANCE, &QuadratureSpec::default())?;
        let e: Vec<f64> = table.levels.iter().map(|l| l.energy).collect();
        fill(&e, energies, capacity, len)
    })
}

/// Run the identity suite; `*all_pass` reports the outcome.
///
/// # Safety
/// `model` and `all_pass` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bshq_verify(
    model: *const BshqModel,
    convention: BshqConvention,
    all_pass: *mut bool,
) -> BshqStatus {
    guard(|| {
        let m = handle(model)?;
        let out = all_pass.as_mut().ok_or_else(null)?;
        let report = run_suite(&lattice(m)?, convention.into(), DEFAULT_TOLERANCE)?;
        *out = report.all_pass();
        Ok(())
    })
}

/// Band listing of a quantized observable as JSON. Release the string with
/// [`bshq_string_free`].
///
/// # Safety
/// `model`, `observable` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bshq_export_json(
    model: *const BshqModel,
    observable: *const c_char,
    convention: BshqConvention,
    out: *mut *mut c_char,
) -> BshqStatus {
    guard(|| {
        let m = handle(model)?;
        let name = text(observable)?;
        if out.is_null() {
            return Err(null());
        }
        let op = lattice(m)?.quantize(name, convention.into(), DEFAULT_TOLERANCE)?;
        let json = operator_json(&op).render();
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bshq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
