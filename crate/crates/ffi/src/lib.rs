//! C ABI over the core pipeline: sampling plans, binary masks, run-length
//! coding, selective averaging and J/F metrics behind opaque handles.
//!
//! Conventions:
//! - Every function returns an [`RvosStatus`]; results come back through
//!   out-pointers.
//! - Handles are opaque and freed with their matching `*_free` function.
//! - On failure, `rvos_last_error_message` returns a thread-local
//!   description of the most recent error (free with `rvos_string_free`).
//!
//! The matching header lives in `include/rvos.h`; it is regenerated by the
//! build script when `cbindgen` is available.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::str::FromStr;

use rvos_core::ensemble::selective_average;
use rvos_core::error::Error;
use rvos_core::mask_io::{rle_decode, rle_encode, RleMask};
use rvos_core::metrics::{boundary_f, jaccard};
use rvos_core::sampling::{plan_for_strategy, RelevanceScores};
use rvos_core::types::{BinaryMask, SamplingPlan, Strategy, VideoMeta};

/// Status codes, aligned with the CLI's exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvosStatus {
    Ok = 0,
    NullArgument = 1,
    Validation = 2,
    Backend = 3,
    Io = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained NUL").expect("static"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn fail(err: Error) -> RvosStatus {
    let status = match err.exit_code() {
        2 => RvosStatus::Validation,
        3 => RvosStatus::Backend,
        _ => RvosStatus::Io,
    };
    set_error(err.to_string());
    status
}

fn fail_null(what: &str) -> RvosStatus {
    set_error(format!("{what} must not be null"));
    RvosStatus::NullArgument
}

/// Opaque sampling plan handle.
pub struct RvosPlan {
    inner: SamplingPlan,
}

/// Opaque binary mask handle.
pub struct RvosMask {
    inner: BinaryMask,
}

unsafe fn cstr<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, RvosStatus> {
    if ptr.is_null() {
        return Err(fail_null(what));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        RvosStatus::Validation
    })
}

/// Most recent error message on this thread, or NULL if none. The caller
/// owns the returned string and must free it with `rvos_string_free`.
#[no_mangle]
pub extern "C" fn rvos_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(message) => message.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Free a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn rvos_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(unsafe { CString::from_raw(ptr) });
    }
}

/// Build a sampling plan.
///
/// `strategy` is one of "uniform", "uniform+", "qframe", "wrap_around",
/// "wrap_around+". `scores` must point to `frame_count` relevance values
/// for "qframe" and may be NULL otherwise.
#[no_mangle]
pub unsafe extern "C" fn rvos_plan_build(
    strategy: *const c_char,
    frame_count: u64,
    n_clips: u64,
    clip_len: u64,
    scores: *const f64,
    scores_len: usize,
    out_plan: *mut *mut RvosPlan,
) -> RvosStatus {
    if out_plan.is_null() {
        return fail_null("out_plan");
    }
    let strategy = match unsafe { cstr(strategy, "strategy") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let strategy = match Strategy::from_str(strategy) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let relevance = if scores.is_null() {
        None
    } else {
        let values = unsafe { std::slice::from_raw_parts(scores, scores_len) };
        match RelevanceScores::new(values.to_vec()) {
            Ok(r) => Some(r),
            Err(e) => return fail(e),
        }
    };
    let meta = match VideoMeta::with_placeholder_uris("ffi", frame_count as usize, 1, 1) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    match plan_for_strategy(
        strategy,
        &meta,
        n_clips as usize,
        clip_len as usize,
        relevance.as_ref(),
    ) {
        Ok(plan) => {
            unsafe { *out_plan = Box::into_raw(Box::new(RvosPlan { inner: plan })) };
            RvosStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn rvos_plan_free(plan: *mut RvosPlan) {
    if !plan.is_null() {
        drop(unsafe { Box::from_raw(plan) });
    }
}

/// Number of clips in the plan.
#[no_mangle]
pub unsafe extern "C" fn rvos_plan_clip_count(plan: *const RvosPlan) -> usize {
    if plan.is_null() {
        return 0;
    }
    unsafe { &*plan }.inner.n_clips
}

/// Whether frames beyond the sampling target rely on tracker memory.
#[no_mangle]
pub unsafe extern "C" fn rvos_plan_tail_propagation(plan: *const RvosPlan) -> bool {
    if plan.is_null() {
        return false;
    }
    unsafe { &*plan }.inner.tail_propagation
}

/// Member frame indices of one clip. `out_members` must hold `clip_len`
/// entries; the actual count is written to `out_len`.
#[no_mangle]
pub unsafe extern "C" fn rvos_plan_clip_members(
    plan: *const RvosPlan,
    clip_index: usize,
    out_members: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> RvosStatus {
    if plan.is_null() || out_members.is_null() || out_len.is_null() {
        return fail_null("plan/out_members/out_len");
    }
    let plan = &unsafe { &*plan }.inner;
    let Some(clip) = plan.clips.get(clip_index) else {
        set_error(format!("clip {clip_index} outside [0, {})", plan.n_clips));
        return RvosStatus::Validation;
    };
    if capacity < clip.member_indices.len() {
        set_error(format!(
            "capacity {capacity} too small for {} members",
            clip.member_indices.len()
        ));
        return RvosStatus::Validation;
    }
    let out = unsafe { std::slice::from_raw_parts_mut(out_members, capacity) };
    for (slot, &member) in out.iter_mut().zip(&clip.member_indices) {
        *slot = member as u64;
    }
    unsafe { *out_len = clip.member_indices.len() };
    RvosStatus::Ok
}

/// Clip indices responsible for decoding `frame` (1 or 2 entries).
/// `out_tokens` must hold at least 2 entries.
#[no_mangle]
pub unsafe extern "C" fn rvos_plan_frame_tokens(
    plan: *const RvosPlan,
    frame: u64,
    out_tokens: *mut u64,
    out_len: *mut usize,
) -> RvosStatus {
    if plan.is_null() || out_tokens.is_null() || out_len.is_null() {
        return fail_null("plan/out_tokens/out_len");
    }
    let plan = &unsafe { &*plan }.inner;
    let Some(tokens) = plan.tokens_for(frame as usize) else {
        set_error(format!("frame {frame} not covered by the plan"));
        return RvosStatus::Validation;
    };
    let out = unsafe { std::slice::from_raw_parts_mut(out_tokens, 2) };
    for (slot, &token) in out.iter_mut().zip(tokens) {
        *slot = token as u64;
    }
    unsafe { *out_len = tokens.len() };
    RvosStatus::Ok
}

/// Serialize the plan to JSON. Free the string with `rvos_string_free`.
#[no_mangle]
pub unsafe extern "C" fn rvos_plan_to_json(
    plan: *const RvosPlan,
    out_json: *mut *mut c_char,
) -> RvosStatus {
    if plan.is_null() || out_json.is_null() {
        return fail_null("plan/out_json");
    }
    let plan = &unsafe { &*plan }.inner;
    match serde_json::to_string(plan) {
        Ok(json) => match CString::new(json) {
            Ok(cstring) => {
                unsafe { *out_json = cstring.into_raw() };
                RvosStatus::Ok
            }
            Err(_) => {
                set_error("plan JSON contained NUL".into());
                RvosStatus::Validation
            }
        },
        Err(e) => {
            set_error(format!("cannot serialize plan: {e}"));
            RvosStatus::Validation
        }
    }
}

/// Create a mask from `width * height` bytes of {0,1} values, row-major.
#[no_mangle]
pub unsafe extern "C" fn rvos_mask_create(
    width: u32,
    height: u32,
    bits: *const u8,
    out_mask: *mut *mut RvosMask,
) -> RvosStatus {
    if bits.is_null() || out_mask.is_null() {
        return fail_null("bits/out_mask");
    }
    let len = width as usize * height as usize;
    let bits = unsafe { std::slice::from_raw_parts(bits, len) };
    match BinaryMask::new(width, height, bits.to_vec()) {
        Ok(mask) => {
            unsafe { *out_mask = Box::into_raw(Box::new(RvosMask { inner: mask })) };
            RvosStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn rvos_mask_free(mask: *mut RvosMask) {
    if !mask.is_null() {
        drop(unsafe { Box::from_raw(mask) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn rvos_mask_width(mask: *const RvosMask) -> u32 {
    if mask.is_null() {
        return 0;
    }
    unsafe { &*mask }.inner.width
}

#[no_mangle]
pub unsafe extern "C" fn rvos_mask_height(mask: *const RvosMask) -> u32 {
    if mask.is_null() {
        return 0;
    }
    unsafe { &*mask }.inner.height
}

/// Borrow the mask's bits ({0,1} bytes, row-major). Valid until the mask is
/// freed or mutated.
#[no_mangle]
pub unsafe extern "C" fn rvos_mask_bits(mask: *const RvosMask, out_len: *mut usize) -> *const u8 {
    if mask.is_null() {
        return std::ptr::null();
    }
    let mask = &unsafe { &*mask }.inner;
    if !out_len.is_null() {
        unsafe { *out_len = mask.bits.len() };
    }
    mask.bits.as_ptr()
}

/// Run-length encode a mask (column-major, background first). The counts
/// buffer is allocated by the library; free it with `rvos_counts_free`.
#[no_mangle]
pub unsafe extern "C" fn rvos_mask_rle_encode(
    mask: *const RvosMask,
    out_counts: *mut *mut u64,
    out_len: *mut usize,
) -> RvosStatus {
    if mask.is_null() || out_counts.is_null() || out_len.is_null() {
        return fail_null("mask/out_counts/out_len");
    }
    let rle = rle_encode(&unsafe { &*mask }.inner);
    let counts: Vec<u64> = rle.counts.iter().map(|&c| c as u64).collect();
    let mut boxed = counts.into_boxed_slice();
    unsafe {
        *out_len = boxed.len();
        *out_counts = boxed.as_mut_ptr();
    }
    std::mem::forget(boxed);
    RvosStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn rvos_counts_free(counts: *mut u64, len: usize) {
    if !counts.is_null() {
        drop(unsafe { Box::from_raw(std::ptr::slice_from_raw_parts_mut(counts, len)) });
    }
}

/// Decode run-length counts back into a mask.
#[no_mangle]
pub unsafe extern "C" fn rvos_rle_decode(
    width: u32,
    height: u32,
    counts: *const u64,
    counts_len: usize,
    out_mask: *mut *mut RvosMask,
) -> RvosStatus {
    if counts.is_null() || out_mask.is_null() {
        return fail_null("counts/out_mask");
    }
    let counts = unsafe { std::slice::from_raw_parts(counts, counts_len) };
    let rle = RleMask {
        width,
        height,
        counts: counts.iter().map(|&c| c as usize).collect(),
    };
    match rle_decode(&rle) {
        Ok(mask) => {
            unsafe { *out_mask = Box::into_raw(Box::new(RvosMask { inner: mask })) };
            RvosStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Weighted per-pixel vote over `count` masks, binarized strictly above 0.5.
#[no_mangle]
pub unsafe extern "C" fn rvos_selective_average(
    masks: *const *const RvosMask,
    weights: *const f64,
    count: usize,
    out_mask: *mut *mut RvosMask,
) -> RvosStatus {
    if masks.is_null() || weights.is_null() || out_mask.is_null() {
        return fail_null("masks/weights/out_mask");
    }
    let handles = unsafe { std::slice::from_raw_parts(masks, count) };
    let weights = unsafe { std::slice::from_raw_parts(weights, count) };
    let mut entries = Vec::with_capacity(count);
    for (i, (&handle, &weight)) in handles.iter().zip(weights).enumerate() {
        if handle.is_null() {
            set_error(format!("mask {i} is null"));
            return RvosStatus::NullArgument;
        }
        entries.push((&unsafe { &*handle }.inner, weight));
    }
    match selective_average(&entries) {
        Ok(mask) => {
            unsafe { *out_mask = Box::into_raw(Box::new(RvosMask { inner: mask })) };
            RvosStatus::Ok
        }
        Err(e) => fail(e),
    }
}

fn collect_sequences(
    pred: *const *const RvosMask,
    gt: *const *const RvosMask,
    frames: usize,
) -> Result<(Vec<BinaryMask>, Vec<BinaryMask>), RvosStatus> {
    let pred = unsafe { std::slice::from_raw_parts(pred, frames) };
    let gt = unsafe { std::slice::from_raw_parts(gt, frames) };
    let mut p = Vec::with_capacity(frames);
    let mut g = Vec::with_capacity(frames);
    for (i, (&a, &b)) in pred.iter().zip(gt).enumerate() {
        if a.is_null() || b.is_null() {
            set_error(format!("sequence entry {i} is null"));
            return Err(RvosStatus::NullArgument);
        }
        p.push(unsafe { &*a }.inner.clone());
        g.push(unsafe { &*b }.inner.clone());
    }
    Ok((p, g))
}

/// Mean per-frame intersection-over-union of two equal-length sequences.
#[no_mangle]
pub unsafe extern "C" fn rvos_jaccard(
    pred: *const *const RvosMask,
    gt: *const *const RvosMask,
    frames: usize,
    out_score: *mut f64,
) -> RvosStatus {
    if pred.is_null() || gt.is_null() || out_score.is_null() {
        return fail_null("pred/gt/out_score");
    }
    let (p, g) = match collect_sequences(pred, gt, frames) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    match jaccard(&p, &g) {
        Ok(score) => {
            unsafe { *out_score = score };
            RvosStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Boundary F-measure of one frame pair at a pixel tolerance.
#[no_mangle]
pub unsafe extern "C" fn rvos_boundary_f(
    pred: *const RvosMask,
    gt: *const RvosMask,
    tolerance: u32,
    out_score: *mut f64,
) -> RvosStatus {
    if pred.is_null() || gt.is_null() || out_score.is_null() {
        return fail_null("pred/gt/out_score");
    }
    match boundary_f(&unsafe { &*pred }.inner, &unsafe { &*gt }.inner, tolerance) {
        Ok(score) => {
            unsafe { *out_score = score };
            RvosStatus::Ok
        }
        Err(e) => fail(e),
    }
}
