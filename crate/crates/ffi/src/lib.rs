//! C ABI for the `bscc` crate.
//!
//! Every fallible entry point returns a [`BsccStatus`]; on failure a
//! description is available from [`bscc_last_error_message`] on the same
//! thread. Panics are caught at the boundary and reported as
//! `BSCC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use bscc::bounds::{
    bacc_bound, bscc_cheby_bound as cheby_bound, chebyshev_h_min, corollary_bound, BoundInputs,
    KnotSpacingStats,
};
use bscc::bspline::{basis_row, KnotVector};
use bscc::experiments::{Experiment, ExperimentConfig, Scheme};
use bscc::fit::{fit_natural_cubic, CubicSplineInterpolant};
use bscc::pipeline::BasisKind;
use bscc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Too few nodes or survivors, or a straggler count out of range.
    Infeasible = 3,
    /// Singular system, overflow or a degenerate reference.
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Encoder selector for [`bscc_simulate_trial`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsccEncoder {
    Lagrange = 0,
    Berrut = 1,
}

/// Fitted natural cubic spline. Create with [`bscc_spline_fit`], release
/// with [`bscc_spline_free`].
pub struct BsccSpline {
    inner: CubicSplineInterpolant,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(BsccStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidStragglerCount { .. }
            | Error::ReconstructionInfeasible { .. }
            | Error::TooFewNodes { .. }
            | Error::InvalidCount(_) => BsccStatus::Infeasible,
            Error::SingularMatrix { .. }
            | Error::NumericalOverflow(_)
            | Error::ExtrapolationError { .. }
            | Error::DegenerateReference => BsccStatus::Numerical,
            _ => BsccStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BsccStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BsccStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BsccStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            BsccStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be valid for `len` reads unless `len == 0`.
unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must be valid for `len` writes unless `len == 0`.
unsafe fn output<'a>(
    ptr: *mut f64,
    len: usize,
    needed: usize,
    what: &str,
) -> Result<&'a mut [f64], Fail> {
    if len < needed {
        return Err(Fail(
            BsccStatus::BufferTooSmall,
            format!("{what} holds {len} values, need {needed}"),
        ));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, needed))
}

/// # Safety
/// `ptr` must be null or valid for one write.
unsafe fn store<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(null(what));
    }
    ptr.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next `bscc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn bscc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a [`BsccStatus`] value.
#[no_mangle]
pub extern "C" fn bscc_status_string(status: c_int) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer",
        2 => c"invalid argument",
        3 => c"infeasible configuration",
        4 => c"numerical failure",
        5 => c"buffer too small",
        6 => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn bscc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Number of degree-`degree` basis functions on the clamped knot vector
/// built from `num_points` breakpoints.
#[no_mangle]
pub extern "C" fn bscc_basis_count(num_points: usize, degree: usize) -> usize {
    (num_points + degree).saturating_sub(1)
}

/// Writes all basis values at `z` (zeros outside the active range) into
/// `out`, which must hold [`bscc_basis_count`] values.
///
/// # Safety
/// `points` must be valid for `num_points` reads and `out` for `out_len`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn bscc_basis_values(
    points: *const f64,
    num_points: usize,
    degree: usize,
    z: f64,
    out: *mut f64,
    out_len: usize,
) -> BsccStatus {
    guard(|| {
        let points = input(points, num_points, "points")?;
        let kv = KnotVector::clamped(points, degree)?;
        let count = kv.num_basis(degree);
        let out = output(out, out_len, count, "out")?;
        let (range, vals) = basis_row(&kv, degree, z)?;
        out.fill(0.0);
        for (j, v) in range.iter().zip(vals) {
            out[j] = v;
        }
        Ok(())
    })
}

/// Fits a natural cubic spline through `num_channels` sample vectors at
/// `num_nodes` strictly increasing nodes. `samples` is channel-major:
/// channel `c` occupies `samples[c * num_nodes .. (c + 1) * num_nodes]`.
///
/// # Safety
/// `nodes` must be valid for `num_nodes` reads, `samples` for
/// `num_nodes * num_channels` reads, and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn bscc_spline_fit(
    nodes: *const f64,
    num_nodes: usize,
    samples: *const f64,
    num_channels: usize,
    out: *mut *mut BsccSpline,
) -> BsccStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if num_channels == 0 {
            return Err(Fail(
                BsccStatus::InvalidArgument,
                "num_channels is 0".into(),
            ));
        }
        let nodes = input(nodes, num_nodes, "nodes")?;
        let total = num_nodes
            .checked_mul(num_channels)
            .ok_or_else(|| Fail(BsccStatus::InvalidArgument, "sample count overflows".into()))?;
        let samples = input(samples, total, "samples")?;
        let channels: Vec<&[f64]> = samples.chunks(num_nodes.max(1)).collect();
        let inner = fit_natural_cubic(nodes, &channels)?;
        *out = Box::into_raw(Box::new(BsccSpline { inner }));
        Ok(())
    })
}

/// # Safety
/// `spline` must be null or a live handle from [`bscc_spline_fit`].
#[no_mangle]
pub unsafe extern "C" fn bscc_spline_num_channels(spline: *const BsccSpline) -> usize {
    spline.as_ref().map_or(0, |s| s.inner.num_channels())
}

/// # Safety
/// `spline` must be null or a live handle from [`bscc_spline_fit`].
#[no_mangle]
pub unsafe extern "C" fn bscc_spline_num_coeffs(spline: *const BsccSpline) -> usize {
    spline.as_ref().map_or(0, |s| s.inner.num_coeffs())
}

/// Evaluates every channel at `z` into `out[0..num_channels]`.
///
/// # Safety
/// `spline` must be null or a live handle; `out` must be valid for
/// `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn bscc_spline_eval(
    spline: *const BsccSpline,
    z: f64,
    out: *mut f64,
    out_len: usize,
) -> BsccStatus {
    guard(|| {
        let s = spline.as_ref().ok_or_else(|| null("spline"))?;
        let out = output(out, out_len, s.inner.num_channels(), "out")?;
        s.inner.eval_into(z, out)?;
        Ok(())
    })
}

/// Copies the B-spline coefficients of `channel` into `out`.
///
/// # Safety
/// `spline` must be null or a live handle; `out` must be valid for
/// `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn bscc_spline_coefficients(
    spline: *const BsccSpline,
    channel: usize,
    out: *mut f64,
    out_len: usize,
) -> BsccStatus {
    guard(|| {
        let s = spline.as_ref().ok_or_else(|| null("spline"))?;
        if channel >= s.inner.num_channels() {
            return Err(Error::IndexError {
                index: channel,
                count: s.inner.num_channels(),
            }
            .into());
        }
        let coeffs = s.inner.channel(channel);
        output(out, out_len, coeffs.len(), "out")?.copy_from_slice(coeffs);
        Ok(())
    })
}

/// # Safety
/// `spline` must be null or a handle from [`bscc_spline_fit`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn bscc_spline_free(spline: *mut BsccSpline) {
    if !spline.is_null() {
        drop(Box::from_raw(spline));
    }
}

/// Berrut decoder bound for `n` workers and `s` stragglers.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bscc_bacc_bound(n: usize, s: usize, out: *mut f64) -> BsccStatus {
    guard(|| store(out, bacc_bound(n, s)?, "out"))
}

/// Spline bound on second-kind Chebyshev points. A non-positive or NaN
/// `h_min` selects the minimum Chebyshev spacing for `n`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn bscc_cheby_bound(
    n: usize,
    s: usize,
    c: f64,
    c1: f64,
    g4_sup: f64,
    h_min: f64,
    out: *mut f64,
) -> BsccStatus {
    guard(|| {
        let inputs = BoundInputs::new(n, s, c, c1, g4_sup)?;
        let h_min = if h_min > 0.0 {
            h_min
        } else {
            chebyshev_h_min(n)?
        };
        store(out, cheby_bound(&inputs, h_min), "out")
    })
}

/// Spline bound for arbitrary nodes with the given spacing extremes.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bscc_corollary_bound(
    n: usize,
    s: usize,
    c: f64,
    c1: f64,
    g4_sup: f64,
    h_min: f64,
    h_max: f64,
    out: *mut f64,
) -> BsccStatus {
    guard(|| {
        let inputs = BoundInputs::new(n, s, c, c1, g4_sup)?;
        if !(h_min > 0.0 && h_max >= h_min && h_max.is_finite()) {
            return Err(Fail(
                BsccStatus::InvalidArgument,
                format!("need 0 < h_min <= h_max, got {h_min}, {h_max}"),
            ));
        }
        let stats = KnotSpacingStats {
            h_max,
            h_min,
            ratio: h_max / h_min,
        };
        store(out, corollary_bound(&inputs, &stats), "out")
    })
}

/// Runs one paired trial of the coded pipeline and writes the relative
/// error of the spline (`out_bscc`) and Berrut (`out_bacc`) decoders.
/// `encoder` is a [`BsccEncoder`] value; `function` names the target
/// (`xsinx`, `sigmoid`, `sin`, `exp`, `identity`).
///
/// # Safety
/// `function` must be a NUL-terminated string; the outputs must be valid
/// for one write each.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bscc_simulate_trial(
    n: usize,
    k: usize,
    s: usize,
    function: *const c_char,
    encoder: c_int,
    seed: u64,
    trial: usize,
    block_rows: usize,
    block_cols: usize,
    out_bscc: *mut f64,
    out_bacc: *mut f64,
) -> BsccStatus {
    guard(|| {
        if function.is_null() {
            return Err(null("function"));
        }
        if out_bscc.is_null() || out_bacc.is_null() {
            return Err(null("output"));
        }
        let function = CStr::from_ptr(function)
            .to_str()
            .map_err(|_| Fail(BsccStatus::InvalidArgument, "function is not UTF-8".into()))?;
        let encoder = match encoder {
            x if x == BsccEncoder::Lagrange as c_int => BasisKind::Lagrange,
            x if x == BsccEncoder::Berrut as c_int => BasisKind::Berrut,
            x => {
                return Err(Fail(
                    BsccStatus::InvalidArgument,
                    format!("unknown encoder {x}"),
                ))
            }
        };
        let exp = Experiment::new(ExperimentConfig {
            n,
            k,
            block_rows,
            block_cols,
            s_values: vec![s],
            trials: trial.saturating_add(1),
            seed,
            encoder,
            schemes: vec![Scheme::Bscc, Scheme::Bacc],
            function: function.to_string(),
            ..ExperimentConfig::default()
        })?;
        for (scheme, out) in [(Scheme::Bscc, out_bscc), (Scheme::Bacc, out_bacc)] {
            let r = exp.run_trial(scheme, s, trial);
            if let Some(e) = r.error {
                return Err(Fail(BsccStatus::Numerical, format!("{scheme}: {e}")));
            }
            out.write(r.e_rel);
        }
        Ok(())
    })
}
