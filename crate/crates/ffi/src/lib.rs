//! C ABI for the dramcam simulator.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns a [`DramcamStatus`]; on failure the message is
//! available from [`dramcam_last_error`] until the next failing call on the
//! same thread. Bit buffers use one byte per cell (0 or 1).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dramcam::cam::{CamArray, Mode, Polarity, Query, SearchKind, TernaryWord};
use dramcam::dram::{Subarray, Trace};
use dramcam::{BitRow, DeviceConfig, Error, TimingModel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DramcamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    Panic = 5,
    Address = 10,
    Protocol = 11,
    Timing = 12,
    Length = 13,
    Constraint = 14,
    NoOpenRow = 15,
    SelfCopy = 16,
    Layout = 17,
    Encoding = 18,
    Mode = 19,
    EmptyTrace = 20,
    EmptyDatabase = 21,
    Parse = 22,
    Config = 23,
    ZeroLatency = 24,
    Io = 25,
}

impl From<&Error> for DramcamStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::AddressFault { .. } => DramcamStatus::Address,
            Error::ProtocolFault(_) => DramcamStatus::Protocol,
            Error::UndefinedTiming { .. } => DramcamStatus::Timing,
            Error::LengthMismatch { .. } => DramcamStatus::Length,
            Error::AddressConstraint(_) => DramcamStatus::Constraint,
            Error::NoOpenRow => DramcamStatus::NoOpenRow,
            Error::SelfCopy(_) => DramcamStatus::SelfCopy,
            Error::Layout(_) => DramcamStatus::Layout,
            Error::Encoding(_) => DramcamStatus::Encoding,
            Error::ModeMismatch(_) => DramcamStatus::Mode,
            Error::EmptyTrace => DramcamStatus::EmptyTrace,
            Error::EmptyDatabase => DramcamStatus::EmptyDatabase,
            Error::Parse { .. } => DramcamStatus::Parse,
            Error::Config(_) => DramcamStatus::Config,
            Error::ZeroLatency => DramcamStatus::ZeroLatency,
            Error::Io(_) => DramcamStatus::Io,
        }
    }
}

/// Search kinds for [`dramcam_cam_search`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DramcamSearchKind {
    Nand = 0,
    Nor = 1,
    Tcam = 2,
    Hd1 = 3,
}

/// Array modes for [`dramcam_cam_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DramcamMode {
    Nand = 0,
    Nor = 1,
}

/// Opaque subarray handle.
pub struct DramcamSubarray(Subarray);

/// Opaque CAM array handle.
pub struct DramcamCam(CamArray);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Status(DramcamStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DramcamStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DramcamStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            let s = DramcamStatus::from(&e);
            set_error(format!("error[{}]: {e}", e.code()));
            s
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            DramcamStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(DramcamStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(DramcamStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn bits_in<'a>(p: *const u8, len: usize) -> Result<&'a [u8], Fail> {
    if p.is_null() && len > 0 {
        return Err(null("bit buffer"));
    }
    Ok(if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(p, len)
    })
}

unsafe fn bits_out(row: &BitRow, out: *mut u8, len: usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < row.len() {
        return Err(Fail::Status(
            DramcamStatus::BufferTooSmall,
            format!("buffer holds {len} cells, need {}", row.len()),
        ));
    }
    let dst = std::slice::from_raw_parts_mut(out, row.len());
    for (d, b) in dst.iter_mut().zip(row.iter()) {
        *d = b as u8;
    }
    Ok(())
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dramcam_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dramcam_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a subarray with default DDR3-1600 timing.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn dramcam_subarray_new(
    rows: usize,
    cols: usize,
    out: *mut *mut DramcamSubarray,
) -> DramcamStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sub = Subarray::new(rows, cols, TimingModel::default())?;
        *out = Box::into_raw(Box::new(DramcamSubarray(sub)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`dramcam_subarray_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dramcam_subarray_free(h: *mut DramcamSubarray) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Host write of `len` cells into row `row`.
///
/// # Safety
/// `h` must be a live handle and `bits` must point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn dramcam_subarray_write_row(
    h: *mut DramcamSubarray,
    row: usize,
    bits: *const u8,
    len: usize,
) -> DramcamStatus {
    guard(|| {
        let sub = &mut handle(h, "subarray")?.0;
        let cells: Vec<bool> = bits_in(bits, len)?.iter().map(|&b| b != 0).collect();
        sub.write_row(row, &BitRow::from_bools(&cells))?;
        Ok(())
    })
}

/// Executes a trace given as text (`ACT <row> gap=<ps>` / `PRE gap=<ps>`).
///
/// # Safety
/// `h` must be a live handle and `trace` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dramcam_subarray_execute(h: *mut DramcamSubarray, trace: *const c_char) -> DramcamStatus {
    guard(|| {
        let sub = &mut handle(h, "subarray")?.0;
        let t = Trace::parse(text(trace, "trace")?)?;
        sub.execute(&t)?;
        Ok(())
    })
}

/// Copies the open row buffer into `out` (`cols` bytes).
///
/// # Safety
/// `h` must be a live handle and `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dramcam_subarray_read_row_buffer(
    h: *mut DramcamSubarray,
    out: *mut u8,
    len: usize,
) -> DramcamStatus {
    guard(|| {
        let sub = &handle(h, "subarray")?.0;
        bits_out(sub.read_row_buffer()?, out, len)
    })
}

/// Current simulated time in picoseconds, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dramcam_subarray_clock_ps(h: *const DramcamSubarray) -> u64 {
    h.as_ref().map_or(0, |s| s.0.clock())
}

/// Creates a CAM array for `word_bits`-bit words on one subarray of
/// `rows` x `cols` cells.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn dramcam_cam_new(
    rows: usize,
    cols: usize,
    word_bits: usize,
    mode: DramcamMode,
    out: *mut *mut DramcamCam,
) -> DramcamStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = DeviceConfig {
            rows_per_subarray: rows,
            cols_per_subarray: cols,
            ..DeviceConfig::default()
        };
        let mode = match mode {
            DramcamMode::Nand => Mode::Nand,
            DramcamMode::Nor => Mode::Nor,
        };
        let cam = CamArray::new(&cfg, word_bits, mode)?;
        *out = Box::into_raw(Box::new(DramcamCam(cam)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`dramcam_cam_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dramcam_cam_free(h: *mut DramcamCam) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Stores newline-separated words of `0`, `1` and `X`, one per column.
///
/// # Safety
/// `h` must be a live handle and `words` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dramcam_cam_store(h: *mut DramcamCam, words: *const c_char) -> DramcamStatus {
    guard(|| {
        let cam = &mut handle(h, "cam")?.0;
        let list = text(words, "words")?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::parse::<TernaryWord>)
            .collect::<Result<Vec<_>, _>>()?;
        cam.store(&list)?;
        Ok(())
    })
}

/// Number of stored words, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dramcam_cam_word_count(h: *const DramcamCam) -> usize {
    h.as_ref().map_or(0, |c| c.0.words().len())
}

/// Runs one compare. `query` is a bitstring, optionally followed by a space
/// and a mask bitstring (1 = compare) for TCAM searches. Writes one verdict
/// byte per stored word to `out` and sets `match_is_one` to 1 if a 1 verdict
/// means match, 0 if a 0 verdict does.
///
/// # Safety
/// `h` must be a live handle, `query` a NUL-terminated string, `out` must
/// point to `len` writable bytes and `match_is_one` to one writable byte.
#[no_mangle]
pub unsafe extern "C" fn dramcam_cam_search(
    h: *mut DramcamCam,
    query: *const c_char,
    kind: DramcamSearchKind,
    out: *mut u8,
    len: usize,
    match_is_one: *mut u8,
) -> DramcamStatus {
    guard(|| {
        let cam = &mut handle(h, "cam")?.0;
        let q: Query = text(query, "query")?.parse()?;
        let kind = match kind {
            DramcamSearchKind::Nand => SearchKind::Nand,
            DramcamSearchKind::Nor => SearchKind::Nor,
            DramcamSearchKind::Tcam => SearchKind::Tcam,
            DramcamSearchKind::Hd1 => SearchKind::Hd1,
        };
        let mv = cam.search(&q, kind)?;
        bits_out(&mv.verdicts, out, len)?;
        if let Some(p) = match_is_one.as_mut() {
            *p = (mv.polarity == Polarity::MatchIsOne) as u8;
        }
        Ok(())
    })
}
