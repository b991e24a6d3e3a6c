//! C interface to `disclab`.
//!
//! Objects cross the boundary as opaque handles created by a `*_new`-style
//! call and released with the matching `*_free`.  Every fallible call
//! returns a `DisclabStatus`; on failure the message is kept per thread and
//! can be read with `disclab_last_error_message`.  Panics are caught and
//! reported as `DISCLAB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use disclab::discrepancy::{beck_fiala_color, brute_force_disc, disc_of};
use disclab::h2_moments::second_moment;
use disclab::hypergraph::{self, generate_h1, generate_h2_even};
use disclab::spectral::restricted_norm;
use disclab::two_stage::{color_two_stage, measure_c_norm, StageParams};
use disclab::{Coloring, Error, Hypergraph, RandomSource};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisclabStatus {
    Ok = 0,
    NullPointer = 1,
    Parameter = 2,
    Convergence = 3,
    Io = 4,
    Parse = 5,
    Panic = 6,
}

/// Opaque hypergraph handle.
pub struct DisclabHypergraph(Hypergraph);

/// Opaque ±1 coloring handle.
pub struct DisclabColoring(Coloring);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DisclabStatus {
    match e {
        Error::Parameter(_) | Error::Refused(_) => DisclabStatus::Parameter,
        Error::Parse { .. } => DisclabStatus::Parse,
        Error::Convergence(_) | Error::WalkExhausted { .. } => DisclabStatus::Convergence,
        Error::Io { .. } => DisclabStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), DisclabStatusError>) -> DisclabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DisclabStatus::Ok,
        Ok(Err(DisclabStatusError(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            DisclabStatus::Panic
        }
    }
}

struct DisclabStatusError(DisclabStatus, String);

impl From<Error> for DisclabStatusError {
    fn from(e: Error) -> Self {
        DisclabStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> DisclabStatusError {
    DisclabStatusError(DisclabStatus::NullPointer, format!("{what} is null"))
}

fn param(msg: &str) -> DisclabStatusError {
    DisclabStatusError(DisclabStatus::Parameter, msg.to_string())
}

unsafe fn href<'a>(h: *const DisclabHypergraph) -> Result<&'a Hypergraph, DisclabStatusError> {
    h.as_ref().map(|h| &h.0).ok_or_else(|| null("hypergraph"))
}

unsafe fn cstr<'a>(s: *const c_char, what: &str) -> Result<&'a str, DisclabStatusError> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| param(&format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), DisclabStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL.  The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn disclab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn disclab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_generate_h1(
    n: usize,
    m: usize,
    t: usize,
    seed: u64,
    out: *mut *mut DisclabHypergraph,
) -> DisclabStatus {
    guard(|| {
        let h = generate_h1(n, m, t, &RandomSource::new(seed))?;
        put(out, DisclabHypergraph(h))
    })
}

/// Even-row Bernoulli(1/2) hypergraph.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_generate_h2_even(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut DisclabHypergraph,
) -> DisclabStatus {
    guard(|| {
        let h = generate_h2_even(n, m, &RandomSource::new(seed))?;
        put(out, DisclabHypergraph(h))
    })
}

/// Parses the text format (`n m` header, then `k v1 .. vk` per edge).
///
/// # Safety
/// `text` must be NUL-terminated; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_hypergraph_from_text(
    text: *const c_char,
    out: *mut *mut DisclabHypergraph,
) -> DisclabStatus {
    guard(|| {
        let h = hypergraph::from_text(cstr(text, "text")?)?;
        put(out, DisclabHypergraph(h))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_hypergraph_load(
    path: *const c_char,
    out: *mut *mut DisclabHypergraph,
) -> DisclabStatus {
    guard(|| {
        let h = hypergraph::load(cstr(path, "path")?)?;
        put(out, DisclabHypergraph(h))
    })
}

/// # Safety
/// `h` must come from this library and not be freed twice.  NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn disclab_hypergraph_free(h: *mut DisclabHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Vertex count; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn disclab_hypergraph_n(h: *const DisclabHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// Edge count; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn disclab_hypergraph_m(h: *const DisclabHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.m())
}

/// Borrows edge `i` as a sorted id array owned by the handle.
///
/// # Safety
/// `h` must be a live handle; `ids` and `len` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn disclab_hypergraph_edge(
    h: *const DisclabHypergraph,
    i: usize,
    ids: *mut *const u32,
    len: *mut usize,
) -> DisclabStatus {
    guard(|| {
        let h = href(h)?;
        if ids.is_null() || len.is_null() {
            return Err(null("output pointer"));
        }
        if i >= h.m() {
            return Err(param(&format!("edge {i} out of range (m = {})", h.m())));
        }
        let e = h.edge(i);
        *ids = e.as_ptr();
        *len = e.len();
        Ok(())
    })
}

/// Two-stage coloring.  `t = 0` uses the max degree; `practical != 0`
/// selects the practical preset, otherwise the theoretical defaults.
///
/// # Safety
/// `h` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_color_two_stage(
    h: *const DisclabHypergraph,
    t: usize,
    seed: u64,
    practical: i32,
    out: *mut *mut DisclabColoring,
) -> DisclabStatus {
    guard(|| {
        let h = href(h)?;
        let t = if t == 0 { h.max_degree().max(1) } else { t };
        let rng = RandomSource::new(seed);
        let c = measure_c_norm(h, t, &rng)?;
        let params = if practical != 0 {
            StageParams::practical(h.n(), t, c)?
        } else {
            StageParams::new(h.n(), t, c)?
        };
        let (chi, _) = color_two_stage(h, &params, &rng)?;
        put(out, DisclabColoring(chi))
    })
}

/// # Safety
/// `h` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_beck_fiala(
    h: *const DisclabHypergraph,
    out: *mut *mut DisclabColoring,
) -> DisclabStatus {
    guard(|| {
        let h = href(h)?;
        put(out, DisclabColoring(beck_fiala_color(h)))
    })
}

/// Exact discrepancy by enumeration; refuses n > `cap`.
///
/// # Safety
/// `h` must be a live handle; `disc` valid; `out` NULL or a valid slot.
#[no_mangle]
pub unsafe extern "C" fn disclab_brute_force(
    h: *const DisclabHypergraph,
    cap: usize,
    disc: *mut u64,
    out: *mut *mut DisclabColoring,
) -> DisclabStatus {
    guard(|| {
        let h = href(h)?;
        if disc.is_null() {
            return Err(null("disc"));
        }
        let (d, chi) = brute_force_disc(h, cap)?;
        *disc = d;
        if !out.is_null() {
            put(out, DisclabColoring(chi))?;
        }
        Ok(())
    })
}

/// # Safety
/// `c` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn disclab_coloring_len(c: *const DisclabColoring) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Copies the ±1 values into `buf`, which must hold `len` entries.
///
/// # Safety
/// `c` must be a live handle and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn disclab_coloring_values(
    c: *const DisclabColoring,
    buf: *mut i8,
    len: usize,
) -> DisclabStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("coloring"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != c.0.len() {
            return Err(param(&format!("buffer holds {len}, coloring has {}", c.0.len())));
        }
        ptr::copy_nonoverlapping(c.0.values().as_ptr(), buf, len);
        Ok(())
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice.  NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn disclab_coloring_free(c: *mut DisclabColoring) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// max_e |Σ_{v∈e} values[v]| for a caller-supplied ±1 array.
///
/// # Safety
/// `h` must be a live handle, `values` readable for `len` bytes, `disc`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn disclab_disc(
    h: *const DisclabHypergraph,
    values: *const i8,
    len: usize,
    disc: *mut u64,
) -> DisclabStatus {
    guard(|| {
        let h = href(h)?;
        if values.is_null() || disc.is_null() {
            return Err(null("values or disc"));
        }
        let chi = Coloring::new(std::slice::from_raw_parts(values, len).to_vec())?;
        *disc = disc_of(h, &chi)?.disc;
        Ok(())
    })
}

/// Largest singular value of the incidence matrix on 1^⊥.  `t = 0` uses
/// the max degree for the reported constant.
///
/// # Safety
/// `h` must be a live handle; `sigma` and `converged` writable.
#[no_mangle]
pub unsafe extern "C" fn disclab_restricted_norm(
    h: *const DisclabHypergraph,
    t: usize,
    tol: f64,
    max_iters: usize,
    seed: u64,
    sigma: *mut f64,
    converged: *mut i32,
) -> DisclabStatus {
    guard(|| {
        let h = href(h)?;
        if sigma.is_null() || converged.is_null() {
            return Err(null("sigma or converged"));
        }
        let t = (t != 0).then_some(t);
        let est = restricted_norm(h, t, tol, max_iters, &RandomSource::new(seed))?;
        *sigma = est.sigma;
        *converged = est.converged as i32;
        Ok(())
    })
}

/// Exact moment report as a JSON string (rationals as "p/q").  Release it
/// with `disclab_string_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn disclab_moments_json(n: usize, m: usize, out: *mut *mut c_char) -> DisclabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let r = second_moment(n, m)?;
        let s = serde_json::to_string(&r).expect("report serializes");
        *out = CString::new(s).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.  NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn disclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
