//! C ABI over `isoext`.
//!
//! Algebras are opaque handles. Elements cross the boundary as coordinate
//! arrays of interleaved `(re, im)` doubles, so an element of a
//! `dim`-dimensional algebra is `2 * dim` doubles. Every entry point returns
//! an [`IsoStatus`]; on failure [`iso_last_error_message`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use isoext::catalog;
use isoext::classify::{self, Form};
use isoext::linalg::{CMatrix, C64};
use isoext::scenario::{self, ScenarioError};
use isoext::{radical, spectral, Algebra, Element};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ParseError = 4,
    FixtureError = 5,
    ClassifyFailed = 6,
    Internal = 7,
}

/// The four canonical forms, plus the no-fit verdict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoForm {
    SimilarityLinear = 0,
    TransposeLinear = 1,
    SimilarityConjugate = 2,
    TransposeConjugate = 3,
    NoFormFits = 4,
}

impl From<Form> for IsoForm {
    fn from(f: Form) -> Self {
        match f {
            Form::SimilarityLinear => IsoForm::SimilarityLinear,
            Form::TransposeLinear => IsoForm::TransposeLinear,
            Form::SimilarityConjugate => IsoForm::SimilarityConjugate,
            Form::TransposeConjugate => IsoForm::TransposeConjugate,
            Form::NoFormFits => IsoForm::NoFormFits,
        }
    }
}

/// Which member of the dame pair to build.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoDame {
    A = 0,
    B = 1,
}

/// Opaque algebra handle.
pub struct IsoAlgebra {
    inner: Arc<Algebra>,
}

/// Outcome of [`iso_classify_matrix`].
#[repr(C)]
pub struct IsoClassification {
    pub form: IsoForm,
    pub residual: f64,
    pub condition_number: f64,
    pub hypothesis_residuals: [f64; 4],
}

/// `out = S(in)` for an `n x n` complex matrix, row-major interleaved.
pub type IsoMatrixMap = Option<unsafe extern "C" fn(input: *const f64, output: *mut f64, n: usize, user: *mut c_void)>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul removed"));
}

fn guard(f: impl FnOnce() -> Result<(), (IsoStatus, String)>) -> IsoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IsoStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IsoStatus::Internal
        }
    }
}

fn null(what: &str) -> (IsoStatus, String) {
    (IsoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn algebra_ref<'a>(alg: *const IsoAlgebra) -> Result<&'a IsoAlgebra, (IsoStatus, String)> {
    unsafe { alg.as_ref() }.ok_or_else(|| null("algebra"))
}

unsafe fn read_element(alg: &IsoAlgebra, coords: *const f64, len: usize) -> Result<Element, (IsoStatus, String)> {
    if coords.is_null() {
        return Err(null("coords"));
    }
    let dim = alg.inner.dim();
    if len != 2 * dim {
        return Err((IsoStatus::DimensionMismatch, format!("expected {} doubles, got {len}", 2 * dim)));
    }
    let raw = unsafe { std::slice::from_raw_parts(coords, len) };
    let z = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    alg.inner
        .element(z)
        .map_err(|e| (IsoStatus::InvalidArgument, e.to_string()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), (IsoStatus, String)> {
    if out.is_null() {
        return Err(null("output"));
    }
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn put_algebra(out: *mut *mut IsoAlgebra, inner: Arc<Algebra>) -> Result<(), (IsoStatus, String)> {
    let handle = Box::into_raw(Box::new(IsoAlgebra { inner }));
    if out.is_null() {
        drop(unsafe { Box::from_raw(handle) });
        return Err(null("output"));
    }
    unsafe { out.write(handle) };
    Ok(())
}

/// `M_n` with the spectral norm.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn iso_algebra_matrix(n: usize, out: *mut *mut IsoAlgebra) -> IsoStatus {
    guard(|| {
        if n == 0 || n > 8 {
            return Err((IsoStatus::InvalidArgument, format!("n = {n} outside 1..=8")));
        }
        unsafe { put_algebra(out, catalog::make_matrix_algebra(n)) }
    })
}

/// Functions on `k` points with the sup norm.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn iso_algebra_function(k: usize, out: *mut *mut IsoAlgebra) -> IsoStatus {
    guard(|| {
        if k == 0 || k > 64 {
            return Err((IsoStatus::InvalidArgument, format!("k = {k} outside 1..=64")));
        }
        unsafe { put_algebra(out, catalog::make_function_algebra(k)) }
    })
}

/// One of the two four-dimensional dame algebras.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn iso_algebra_dame(which: IsoDame, out: *mut *mut IsoAlgebra) -> IsoStatus {
    guard(|| {
        let pair = catalog::make_dame_pair();
        let alg = match which {
            IsoDame::A => pair.a,
            IsoDame::B => pair.b,
        };
        unsafe { put_algebra(out, alg) }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `alg` must come from an `iso_algebra_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn iso_algebra_free(alg: *mut IsoAlgebra) {
    if !alg.is_null() {
        drop(unsafe { Box::from_raw(alg) });
    }
}

/// Complex dimension, or 0 for a null handle.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn iso_algebra_dim(alg: *const IsoAlgebra) -> usize {
    unsafe { alg.as_ref() }.map_or(0, |a| a.inner.dim())
}

/// Algebra norm of an element.
///
/// # Safety
/// `coords` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iso_element_norm(
    alg: *const IsoAlgebra,
    coords: *const f64,
    len: usize,
    out: *mut f64,
) -> IsoStatus {
    guard(|| unsafe {
        let a = read_element(algebra_ref(alg)?, coords, len)?;
        put(out, a.norm())
    })
}

/// Spectral radius of an element.
///
/// # Safety
/// `coords` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iso_spectral_radius(
    alg: *const IsoAlgebra,
    coords: *const f64,
    len: usize,
    out: *mut f64,
) -> IsoStatus {
    guard(|| unsafe {
        let a = read_element(algebra_ref(alg)?, coords, len)?;
        put(out, spectral::spectral_radius(&a))
    })
}

/// Dimension of the radical.
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iso_radical_dim(alg: *const IsoAlgebra, out: *mut usize) -> IsoStatus {
    guard(|| unsafe {
        let a = algebra_ref(alg)?;
        put(out, radical::dickson_radical(&a.inner).dim_radical)
    })
}

/// Classifies the map `S` on invertible `n x n` matrices into one of the four
/// forms and writes the normalized `U` into `u_out` (`2 * n * n` doubles).
///
/// # Safety
/// `map` must be safe to call with buffers of `2 * n * n` doubles; `result`
/// and `u_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iso_classify_matrix(
    map: IsoMatrixMap,
    user: *mut c_void,
    n: usize,
    samples: usize,
    seed: u64,
    result: *mut IsoClassification,
    u_out: *mut f64,
) -> IsoStatus {
    guard(|| {
        let map = map.ok_or_else(|| null("map"))?;
        if result.is_null() || u_out.is_null() {
            return Err(null("output"));
        }
        let s = |m: &CMatrix| {
            let mut input = vec![0.0; 2 * n * n];
            for i in 0..n {
                for j in 0..n {
                    input[2 * (i * n + j)] = m[(i, j)].re;
                    input[2 * (i * n + j) + 1] = m[(i, j)].im;
                }
            }
            let mut output = vec![0.0; 2 * n * n];
            unsafe { map(input.as_ptr(), output.as_mut_ptr(), n, user) };
            CMatrix::from_fn(n, n, |i, j| C64::new(output[2 * (i * n + j)], output[2 * (i * n + j) + 1]))
        };
        let r = classify::classify_matrix_isometry(&s, n, samples, seed)
            .map_err(|e| (IsoStatus::ClassifyFailed, e.to_string()))?;
        let u = unsafe { std::slice::from_raw_parts_mut(u_out, 2 * n * n) };
        for i in 0..n {
            for j in 0..n {
                u[2 * (i * n + j)] = r.u[(i, j)].re;
                u[2 * (i * n + j) + 1] = r.u[(i, j)].im;
            }
        }
        unsafe {
            put(
                result,
                IsoClassification {
                    form: r.form.into(),
                    residual: r.residual,
                    condition_number: r.condition_number,
                    hypothesis_residuals: r.hypothesis_residuals,
                },
            )
        }
    })
}

/// Runs a scenario given as JSON text. When `use_seed` is false the
/// scenario's own seed applies. The report JSON is returned in `report_out`
/// and must be released with [`iso_string_free`].
///
/// # Safety
/// `json` must be a nul-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn iso_run_scenario_json(
    json: *const c_char,
    use_seed: bool,
    seed: u64,
    report_out: *mut *mut c_char,
    all_match: *mut bool,
) -> IsoStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if report_out.is_null() || all_match.is_null() {
            return Err(null("output"));
        }
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| (IsoStatus::InvalidArgument, format!("scenario is not UTF-8: {e}")))?;
        let report = scenario::run_scenario_str(text, use_seed.then_some(seed), false).map_err(|e| {
            let status = match e {
                ScenarioError::Parse { .. } | ScenarioError::UnknownCheck(_) => IsoStatus::ParseError,
                _ => IsoStatus::FixtureError,
            };
            (status, e.to_string())
        })?;
        let out = CString::new(report.to_json()).map_err(|e| (IsoStatus::Internal, e.to_string()))?;
        unsafe {
            all_match.write(report.all_match);
            report_out.write(out.into_raw());
        }
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn iso_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn iso_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    #[test]
    fn null_output_is_rejected() {
        let status = unsafe { iso_algebra_matrix(2, ptr::null_mut()) };
        assert_eq!(status, IsoStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(iso_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("null"));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut alg = ptr::null_mut();
        assert_eq!(unsafe { iso_algebra_function(2, &mut alg) }, IsoStatus::Ok);
        let coords = [1.0, 0.0];
        let mut out = 0.0;
        let status = unsafe { iso_element_norm(alg, coords.as_ptr(), 2, &mut out) };
        assert_eq!(status, IsoStatus::DimensionMismatch);
        unsafe { iso_algebra_free(alg) };
    }
}
