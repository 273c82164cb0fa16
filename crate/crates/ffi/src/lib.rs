//! C ABI for `cachesieve`.
//!
//! Every function returns a [`CsStatus`]; on failure a message for the
//! calling thread is available from [`cs_last_error`]. Sieve runs are owned
//! through an opaque [`CsSieve`] handle released with [`cs_sieve_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cachesieve::driver::{run_sieve, write_table, CountSink};
use cachesieve::params::{params_from_midpoint, validate_params};
use cachesieve::{Sieve, SieveError, SieveParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    LOutOfRange = 1,
    FZeroOrOverlap = 2,
    Overflow = 3,
    IndexOutOfRange = 4,
    NotAdmissible = 5,
    AllocLimit = 6,
    LimitTooLarge = 7,
    RangeTooLarge = 8,
    IoError = 9,
    NullPointer = 10,
    BufferTooSmall = 11,
    InvalidArgument = 12,
    /// All segments have been produced.
    Done = 13,
    Panic = 14,
}

impl From<&SieveError> for CsStatus {
    fn from(err: &SieveError) -> Self {
        match err {
            SieveError::LOutOfRange { .. } => CsStatus::LOutOfRange,
            SieveError::FZeroOrOverlap(_) => CsStatus::FZeroOrOverlap,
            SieveError::Overflow(_) => CsStatus::Overflow,
            SieveError::IndexOutOfRange(_) => CsStatus::IndexOutOfRange,
            SieveError::NotAdmissible { .. } => CsStatus::NotAdmissible,
            SieveError::AllocLimit(_) => CsStatus::AllocLimit,
            SieveError::LimitTooLarge(_) => CsStatus::LimitTooLarge,
            SieveError::RangeTooLarge(_) => CsStatus::RangeTooLarge,
            SieveError::Io { .. } => CsStatus::IoError,
        }
    }
}

/// Validated parameters and the derived interval `[u, v]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CsParams {
    pub log_segment: u32,
    pub first_segment: u64,
    pub segments: u64,
    pub u: u64,
    pub v: u64,
    /// Bytes per segment in the packed table.
    pub segment_bytes: u64,
    pub table_bytes: u64,
}

impl From<&SieveParams> for CsParams {
    fn from(p: &SieveParams) -> Self {
        CsParams {
            log_segment: p.log_segment(),
            first_segment: p.first_segment(),
            segments: p.segments(),
            u: p.u(),
            v: p.v(),
            segment_bytes: p.segment_bytes() as u64,
            table_bytes: p.table_bytes(),
        }
    }
}

/// Opaque sieve run.
pub struct CsSieve {
    sieve: Sieve,
    scratch: Vec<u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|e| {
        let pos = e.nul_position();
        let mut bytes = e.into_vec();
        bytes.truncate(pos);
        CString::new(bytes).unwrap_or_default()
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn fail(status: CsStatus, msg: impl Into<String>) -> CsStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<CsStatus, SieveError>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(err)) => fail(CsStatus::from(&err), err.to_string()),
        Err(_) => fail(CsStatus::Panic, "internal panic"),
    }
}

/// Message describing the last failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Checks `(l, f, n)` and fills `out` with the derived interval.
///
/// # Safety
/// `out` must be null or point to writable memory for one `CsParams`.
#[no_mangle]
pub unsafe extern "C" fn cs_validate_params(
    log_segment: u32,
    first_segment: u64,
    segments: u64,
    test_mode: bool,
    out: *mut CsParams,
) -> CsStatus {
    guard(|| {
        let params = validate_params(log_segment, first_segment, segments, test_mode)?;
        if !out.is_null() {
            out.write(CsParams::from(&params));
        }
        Ok(CsStatus::Ok)
    })
}

/// First segment index for an interval of `segments` segments centred near `10^e`.
///
/// # Safety
/// `first_out` must point to writable memory for one `u64`.
#[no_mangle]
pub unsafe extern "C" fn cs_params_from_midpoint(
    e: u32,
    log_segment: u32,
    segments: u64,
    first_out: *mut u64,
) -> CsStatus {
    if first_out.is_null() {
        return fail(CsStatus::NullPointer, "first_out is null");
    }
    guard(|| {
        let f = params_from_midpoint(e, log_segment, segments)?;
        validate_params(log_segment, f, segments, false)?;
        first_out.write(f);
        Ok(CsStatus::Ok)
    })
}

/// Builds the base for a run and returns a handle in `*out`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_sieve_new(
    log_segment: u32,
    first_segment: u64,
    segments: u64,
    test_mode: bool,
    out: *mut *mut CsSieve,
) -> CsStatus {
    if out.is_null() {
        return fail(CsStatus::NullPointer, "out is null");
    }
    out.write(ptr::null_mut());
    guard(|| {
        let params = validate_params(log_segment, first_segment, segments, test_mode)?;
        let sieve = Sieve::new(params)?;
        let handle = Box::new(CsSieve {
            scratch: Vec::with_capacity(params.segment_bytes()),
            sieve,
        });
        out.write(Box::into_raw(handle));
        Ok(CsStatus::Ok)
    })
}

/// Releases a handle from [`cs_sieve_new`]. Null is ignored.
///
/// # Safety
/// `sieve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_sieve_free(sieve: *mut CsSieve) {
    if !sieve.is_null() {
        drop(Box::from_raw(sieve));
    }
}

/// Parameters of a run.
///
/// # Safety
/// `sieve` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_sieve_params(sieve: *const CsSieve, out: *mut CsParams) -> CsStatus {
    let (Some(sieve), false) = (sieve.as_ref(), out.is_null()) else {
        return fail(CsStatus::NullPointer, "null argument");
    };
    out.write(CsParams::from(sieve.sieve.params()));
    CsStatus::Ok
}

/// Sieves the next segment and copies its packed bits (LSB first) into
/// `buf`, which must hold `segment_bytes` bytes. Returns `CS_STATUS_DONE`
/// once every segment has been produced.
///
/// # Safety
/// `sieve` must be a live handle; `buf` must be writable for `len` bytes;
/// `index_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn cs_sieve_next_segment(
    sieve: *mut CsSieve,
    buf: *mut u8,
    len: usize,
    index_out: *mut u64,
) -> CsStatus {
    let Some(handle) = sieve.as_mut() else {
        return fail(CsStatus::NullPointer, "sieve is null");
    };
    if buf.is_null() {
        return fail(CsStatus::NullPointer, "buf is null");
    }
    let needed = handle.sieve.params().segment_bytes();
    if len < needed {
        return fail(
            CsStatus::BufferTooSmall,
            format!("segment needs {needed} bytes, buffer has {len}"),
        );
    }
    guard(|| {
        let CsSieve { sieve, scratch } = handle;
        let Some((t, segment)) = sieve.next_segment() else {
            return Ok(CsStatus::Done);
        };
        scratch.clear();
        segment.write_bytes(scratch);
        ptr::copy_nonoverlapping(scratch.as_ptr(), buf, scratch.len());
        if !index_out.is_null() {
            index_out.write(t);
        }
        Ok(CsStatus::Ok)
    })
}

/// Number of primes in the interval.
///
/// # Safety
/// `count_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_count_primes(
    log_segment: u32,
    first_segment: u64,
    segments: u64,
    test_mode: bool,
    count_out: *mut u64,
) -> CsStatus {
    if count_out.is_null() {
        return fail(CsStatus::NullPointer, "count_out is null");
    }
    guard(|| {
        let params = validate_params(log_segment, first_segment, segments, test_mode)?;
        let stats = run_sieve(&params, CountSink)?;
        count_out.write(stats.prime_count);
        Ok(CsStatus::Ok)
    })
}

/// Sieves the interval into `dir/erato_l{l}_f{f}_n{n}.bits` and copies the
/// NUL-terminated path into `path_out` (when non-null and large enough).
///
/// # Safety
/// `dir` must be a NUL-terminated string; `path_out` writable for `path_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_write_table(
    log_segment: u32,
    first_segment: u64,
    segments: u64,
    test_mode: bool,
    dir: *const c_char,
    path_out: *mut c_char,
    path_len: usize,
) -> CsStatus {
    if dir.is_null() {
        return fail(CsStatus::NullPointer, "dir is null");
    }
    let Ok(dir) = CStr::from_ptr(dir).to_str() else {
        return fail(CsStatus::InvalidArgument, "dir is not valid UTF-8");
    };
    guard(|| {
        let params = validate_params(log_segment, first_segment, segments, test_mode)?;
        let (path, _) = write_table(Path::new(dir), &params)?;
        if !path_out.is_null() {
            let text = path.to_string_lossy();
            if text.len() + 1 > path_len {
                return Ok(fail(
                    CsStatus::BufferTooSmall,
                    format!("path needs {} bytes", text.len() + 1),
                ));
            }
            ptr::copy_nonoverlapping(text.as_ptr(), path_out as *mut u8, text.len());
            path_out.add(text.len()).write(0);
        }
        Ok(CsStatus::Ok)
    })
}
