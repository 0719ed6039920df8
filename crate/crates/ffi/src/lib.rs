//! C ABI over the `operb` crate.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns an [`OperbStatus`];
//! on failure a message for the calling thread is available from
//! [`operb_last_error`] until the next failing call on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use operb::{Algorithm, Error, FitConfig, Mode, OperbEncoder, Optimizations, Point, Segment};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperbStatus {
    Ok = 0,
    /// A configuration value or enum discriminant is out of range.
    InvalidConfig = 1,
    /// Input points are empty, non-finite, too many, or not increasing in time.
    InvalidData = 2,
    /// The call was made in the wrong state, e.g. pushing after finish.
    InvalidState = 3,
    NullPointer = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperbAlgorithm {
    Dp = 0,
    Opw = 1,
    Fbqs = 2,
    Operb = 3,
    OperbA = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperbPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperbSegment {
    pub start: OperbPoint,
    pub end: OperbPoint,
    /// Input points attributed to this segment.
    pub covered: u64,
    /// Index of the last input point covered.
    pub last_index: u64,
    /// The start is an interpolated patch point rather than an input point.
    pub patched_start: bool,
}

/// Fitting parameters. Obtain defaults from [`operb_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperbConfig {
    pub zeta: f64,
    pub gamma_m: f64,
    /// Bit `i` enables optimization `i + 1`; 31 enables all five.
    pub opts: u8,
}

/// Streaming OPERB / OPERB-A encoder.
pub struct OperbStream {
    encoder: OperbEncoder,
    ready: Vec<Segment>,
    finished: bool,
}

/// Segments produced by a batch call.
pub struct OperbResult {
    segments: Vec<OperbSegment>,
    anomalous: u64,
    patches: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> OperbStatus {
    match err {
        Error::InvalidConfig(_) | Error::UnknownAlgorithm(_) => OperbStatus::InvalidConfig,
        Error::Precondition(_) => OperbStatus::InvalidState,
        Error::Invariant(_) => OperbStatus::Internal,
        _ => OperbStatus::InvalidData,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (OperbStatus, String)>) -> OperbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OperbStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside operb".to_string());
            OperbStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (OperbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OperbStatus, String) {
    (OperbStatus::NullPointer, format!("{what} is null"))
}

fn fit_config(cfg: &OperbConfig) -> Result<FitConfig, (OperbStatus, String)> {
    if cfg.opts > 31 {
        return Err((
            OperbStatus::InvalidConfig,
            format!("opts {} has bits beyond the five optimizations", cfg.opts),
        ));
    }
    let fit = FitConfig::new(cfg.zeta)
        .map_err(lib_err)?
        .with_opts(Optimizations::from_bits(cfg.opts))
        .with_gamma_m(cfg.gamma_m);
    fit.validate().map_err(lib_err)?;
    Ok(fit)
}

fn to_c_point(p: Point) -> OperbPoint {
    OperbPoint { x: p.x, y: p.y, t: p.t }
}

fn to_c_segment(s: &Segment) -> OperbSegment {
    OperbSegment {
        start: to_c_point(s.start),
        end: to_c_point(s.end),
        covered: s.covered as u64,
        last_index: s.last_index as u64,
        patched_start: s.patched_start,
    }
}

/// Message for the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn operb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default configuration for error bound `zeta`: all optimizations, γm = π/3.
#[no_mangle]
pub extern "C" fn operb_config_default(zeta: f64) -> OperbConfig {
    OperbConfig {
        zeta,
        gamma_m: FitConfig::DEFAULT_GAMMA_M,
        opts: Optimizations::ALL.bits(),
    }
}

/// Creates a streaming encoder; `lazy` selects OPERB-A.
///
/// # Safety
/// `config` must point to a valid `OperbConfig` and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn operb_stream_new(
    config: *const OperbConfig,
    lazy: bool,
    out: *mut *mut OperbStream,
) -> OperbStatus {
    guard(|| {
        let cfg = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mode = if lazy { Mode::OperbA } else { Mode::Operb };
        let encoder = OperbEncoder::new(fit_config(cfg)?, mode).map_err(lib_err)?;
        let stream = Box::new(OperbStream {
            encoder,
            ready: Vec::new(),
            finished: false,
        });
        unsafe { *out = Box::into_raw(stream) };
        Ok(())
    })
}

/// Feeds one point. Segments it closes are queued for [`operb_stream_drain`].
///
/// # Safety
/// `stream` must come from [`operb_stream_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn operb_stream_push(stream: *mut OperbStream, x: f64, y: f64, t: f64) -> OperbStatus {
    guard(|| {
        let s = unsafe { stream.as_mut() }.ok_or_else(|| null("stream"))?;
        if s.finished {
            return Err((OperbStatus::InvalidState, "stream already finished".into()));
        }
        let OperbStream { encoder, ready, .. } = s;
        encoder.push_into(Point::new(x, y, t), ready).map_err(lib_err)
    })
}

/// Ends the input and queues the remaining segments. Further pushes fail.
///
/// # Safety
/// `stream` must come from [`operb_stream_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn operb_stream_finish(stream: *mut OperbStream) -> OperbStatus {
    guard(|| {
        let s = unsafe { stream.as_mut() }.ok_or_else(|| null("stream"))?;
        if s.finished {
            return Err((OperbStatus::InvalidState, "stream already finished".into()));
        }
        let rest = s.encoder.finish().map_err(lib_err)?;
        s.ready.extend(rest);
        s.finished = true;
        Ok(())
    })
}

/// Number of queued segments.
///
/// # Safety
/// `stream` must be null or come from [`operb_stream_new`].
#[no_mangle]
pub unsafe extern "C" fn operb_stream_ready(stream: *const OperbStream) -> usize {
    unsafe { stream.as_ref() }.map_or(0, |s| s.ready.len())
}

/// Moves up to `cap` queued segments into `buf` in output order and writes
/// the number moved to `written`.
///
/// # Safety
/// `buf` must have room for `cap` segments; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn operb_stream_drain(
    stream: *mut OperbStream,
    buf: *mut OperbSegment,
    cap: usize,
    written: *mut usize,
) -> OperbStatus {
    guard(|| {
        let s = unsafe { stream.as_mut() }.ok_or_else(|| null("stream"))?;
        if written.is_null() {
            return Err(null("written"));
        }
        let n = cap.min(s.ready.len());
        if n > 0 && buf.is_null() {
            return Err(null("buf"));
        }
        for (i, seg) in s.ready.drain(..n).enumerate() {
            unsafe { buf.add(i).write(to_c_segment(&seg)) };
        }
        unsafe { *written = n };
        Ok(())
    })
}

/// # Safety
/// `stream` must be null or come from [`operb_stream_new`], and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn operb_stream_free(stream: *mut OperbStream) {
    if !stream.is_null() {
        drop(unsafe { Box::from_raw(stream) });
    }
}

/// Simplifies `n` points with `algo`, an [`OperbAlgorithm`] value. The
/// baselines read only `config.zeta`.
///
/// # Safety
/// `points` must hold `n` readable points; `config` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn operb_simplify(
    algo: u32,
    points: *const OperbPoint,
    n: usize,
    config: *const OperbConfig,
    out: *mut *mut OperbResult,
) -> OperbStatus {
    guard(|| {
        let cfg = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if points.is_null() && n > 0 {
            return Err(null("points"));
        }
        let input: &[OperbPoint] = if n == 0 {
            &[]
        } else {
            unsafe { std::slice::from_raw_parts(points, n) }
        };
        let traj: Vec<Point> = input.iter().map(|p| Point::new(p.x, p.y, p.t)).collect();
        let algo = match algo {
            a if a == OperbAlgorithm::Dp as u32 => Algorithm::Dp,
            a if a == OperbAlgorithm::Opw as u32 => Algorithm::Opw,
            a if a == OperbAlgorithm::Fbqs as u32 => Algorithm::Fbqs,
            a if a == OperbAlgorithm::Operb as u32 => Algorithm::Operb,
            a if a == OperbAlgorithm::OperbA as u32 => Algorithm::OperbA,
            other => return Err((OperbStatus::InvalidConfig, format!("unknown algorithm {other}"))),
        };
        let rep = algo.run(&traj, &fit_config(cfg)?).map_err(lib_err)?;
        let result = Box::new(OperbResult {
            segments: rep.segments.iter().map(to_c_segment).collect(),
            anomalous: rep.anomalous_candidates as u64,
            patches: rep.patches as u64,
        });
        unsafe { *out = Box::into_raw(result) };
        Ok(())
    })
}

/// # Safety
/// `result` must be null or come from [`operb_simplify`].
#[no_mangle]
pub unsafe extern "C" fn operb_result_len(result: *const OperbResult) -> usize {
    unsafe { result.as_ref() }.map_or(0, |r| r.segments.len())
}

/// Pointer to `operb_result_len` segments, valid until the result is freed.
///
/// # Safety
/// `result` must be null or come from [`operb_simplify`].
#[no_mangle]
pub unsafe extern "C" fn operb_result_segments(result: *const OperbResult) -> *const OperbSegment {
    unsafe { result.as_ref() }.map_or(ptr::null(), |r| r.segments.as_ptr())
}

/// Writes the anomalous-candidate and patch counts of an OPERB-A run.
///
/// # Safety
/// `result` must come from [`operb_simplify`]; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn operb_result_patching(
    result: *const OperbResult,
    anomalous: *mut u64,
    patches: *mut u64,
) -> OperbStatus {
    guard(|| {
        let r = unsafe { result.as_ref() }.ok_or_else(|| null("result"))?;
        if anomalous.is_null() || patches.is_null() {
            return Err(null("output"));
        }
        unsafe {
            *anomalous = r.anomalous;
            *patches = r.patches;
        }
        Ok(())
    })
}

/// # Safety
/// `result` must be null or come from [`operb_simplify`], and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn operb_result_free(result: *mut OperbResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}
