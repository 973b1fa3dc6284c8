//! C interface. Codes and message stores are opaque handles created and
//! freed by this library; every call returns a [`PirpsiStatus`].
//!
//! Bit buffers cross the boundary as one byte per bit (0 or 1).

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use pirpsi::analysis::rate_this_scheme;
use pirpsi::privacy::synthesize_code;
use pirpsi::retrieve::{answer_query, decodability_oracle, decode_demand, AnswerVector, MessageStore, SideInfo};
use pirpsi::types::render;
use pirpsi::{Code, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PirpsiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Decode = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Opaque code handle.
pub struct PirpsiCode {
    inner: Code,
}

/// Opaque message store handle.
pub struct PirpsiStore {
    inner: MessageStore,
}

fn status_of(e: &Error) -> PirpsiStatus {
    match e {
        Error::UnsupportedK(_) | Error::NoCase { .. } => PirpsiStatus::Unsupported,
        Error::Undecodable(_) => PirpsiStatus::Decode,
        Error::InvalidParams(_) | Error::OutOfBounds { .. } => PirpsiStatus::InvalidArgument,
        _ => PirpsiStatus::Internal,
    }
}

fn guard<F: FnOnce() -> PirpsiStatus>(f: F) -> PirpsiStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(PirpsiStatus::Internal)
}

unsafe fn copy_out(bits: &[bool], out: *mut u8, cap: usize, out_len: *mut usize) -> PirpsiStatus {
    if out_len.is_null() {
        return PirpsiStatus::NullPointer;
    }
    *out_len = bits.len();
    if cap < bits.len() {
        return PirpsiStatus::BufferTooSmall;
    }
    if out.is_null() && !bits.is_empty() {
        return PirpsiStatus::NullPointer;
    }
    for (i, &b) in bits.iter().enumerate() {
        *out.add(i) = b as u8;
    }
    PirpsiStatus::Ok
}

unsafe fn read_bits(p: *const u8, len: usize) -> Option<Vec<bool>> {
    if len == 0 {
        return Some(Vec::new());
    }
    if p.is_null() {
        return None;
    }
    Some(slice::from_raw_parts(p, len).iter().map(|&b| b != 0).collect())
}

fn query_of(code: &Code, db: u8) -> Option<&pirpsi::Query> {
    match db {
        1 => Some(&code.query_n1),
        2 => Some(&code.query_n2),
        _ => None,
    }
}

/// Builds the code for demand `demand` with side information `si_a`, `si_b`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle. The
/// handle must be released with [`pirpsi_code_free`].
#[no_mangle]
pub unsafe extern "C" fn pirpsi_code_build(k: u8, demand: u8, si_a: u8, si_b: u8, out: *mut *mut PirpsiCode) -> PirpsiStatus {
    if out.is_null() {
        return PirpsiStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guard(|| match synthesize_code(k, demand, [si_a, si_b]) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(PirpsiCode { inner }));
            PirpsiStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// # Safety
/// `code` must be null or a handle from [`pirpsi_code_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_code_free(code: *mut PirpsiCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Number of codewords sent to database `db` (1 or 2).
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_code_codeword_count(code: *const PirpsiCode, db: u8, out: *mut usize) -> PirpsiStatus {
    if code.is_null() || out.is_null() {
        return PirpsiStatus::NullPointer;
    }
    match query_of(&(*code).inner, db) {
        Some(q) => {
            *out = q.len();
            PirpsiStatus::Ok
        }
        None => PirpsiStatus::InvalidArgument,
    }
}

/// Writes the query text for `db` as a NUL-terminated string. `out_len`
/// receives the byte length including the terminator, also when the buffer
/// is too small.
///
/// # Safety
/// `code` must be a live handle, `buf` writable for `cap` bytes, `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_code_render(
    code: *const PirpsiCode,
    db: u8,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> PirpsiStatus {
    if code.is_null() || out_len.is_null() {
        return PirpsiStatus::NullPointer;
    }
    let Some(q) = query_of(&(*code).inner, db) else { return PirpsiStatus::InvalidArgument };
    let text = render(q);
    *out_len = text.len() + 1;
    if cap < text.len() + 1 {
        return PirpsiStatus::BufferTooSmall;
    }
    if buf.is_null() {
        return PirpsiStatus::NullPointer;
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    PirpsiStatus::Ok
}

/// A random store of `k` messages sized for the scheme, seeded for reproducibility.
///
/// # Safety
/// `out` must be writable. Release the handle with [`pirpsi_store_free`].
#[no_mangle]
pub unsafe extern "C" fn pirpsi_store_random(k: u8, seed: u64, out: *mut *mut PirpsiStore) -> PirpsiStatus {
    if out.is_null() {
        return PirpsiStatus::NullPointer;
    }
    *out = ptr::null_mut();
    if !(3..=pirpsi::types::MAX_K).contains(&k) {
        return PirpsiStatus::InvalidArgument;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = MessageStore::random(k, 2 * pirpsi::types::demand_bits_per_db(k), &mut rng);
    *out = Box::into_raw(Box::new(PirpsiStore { inner }));
    PirpsiStatus::Ok
}

/// Copies bit `index` (1-based) of message `msg` into `out`.
///
/// # Safety
/// `store` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_store_bit(store: *const PirpsiStore, msg: u8, index: u32, out: *mut u8) -> PirpsiStatus {
    if store.is_null() || out.is_null() {
        return PirpsiStatus::NullPointer;
    }
    match (*store).inner.get(pirpsi::BitRef::new(msg, index)) {
        Ok(b) => {
            *out = b as u8;
            PirpsiStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `store` must be null or a handle from [`pirpsi_store_random`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_store_free(store: *mut PirpsiStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Answers database `db`'s query from `store`.
///
/// # Safety
/// Handles must be live; `out` writable for `cap` bytes; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_answer(
    code: *const PirpsiCode,
    store: *const PirpsiStore,
    db: u8,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> PirpsiStatus {
    if code.is_null() || store.is_null() {
        return PirpsiStatus::NullPointer;
    }
    guard(|| {
        let Some(q) = query_of(&(*code).inner, db) else { return PirpsiStatus::InvalidArgument };
        match answer_query(&(*store).inner, q) {
            Ok(a) => copy_out(&a.bits, out, cap, out_len),
            Err(e) => status_of(&e),
        }
    })
}

/// Decodes the demand from both answers and the two side-information
/// messages (lower id first, `si_len` bits each).
///
/// # Safety
/// Every input pointer must be readable for its stated length; `out` writable
/// for `cap` bytes; `out_len` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pirpsi_decode(
    code: *const PirpsiCode,
    ans1: *const u8,
    len1: usize,
    ans2: *const u8,
    len2: usize,
    si_lo: *const u8,
    si_hi: *const u8,
    si_len: usize,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> PirpsiStatus {
    if code.is_null() {
        return PirpsiStatus::NullPointer;
    }
    let (Some(a1), Some(a2), Some(s1), Some(s2)) =
        (read_bits(ans1, len1), read_bits(ans2, len2), read_bits(si_lo, si_len), read_bits(si_hi, si_len))
    else {
        return PirpsiStatus::NullPointer;
    };
    guard(|| {
        let c = &(*code).inner;
        if a1.len() != c.query_n1.len() || a2.len() != c.query_n2.len() || si_len != c.params.message_len() as usize {
            return PirpsiStatus::InvalidArgument;
        }
        let si = SideInfo { ids: c.params.si(), bits: [s1, s2] };
        match decode_demand(c, &AnswerVector { bits: a1 }, &AnswerVector { bits: a2 }, &si) {
            Ok((bits, _)) => copy_out(&bits, out, cap, out_len),
            Err(e) => status_of(&e),
        }
    })
}

/// Runs the GF(2) span check; `out` receives 1 when the demand is recoverable.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_oracle(code: *const PirpsiCode, out: *mut u8) -> PirpsiStatus {
    if code.is_null() || out.is_null() {
        return PirpsiStatus::NullPointer;
    }
    guard(|| {
        *out = decodability_oracle(&(*code).inner).decodable as u8;
        PirpsiStatus::Ok
    })
}

/// Rate of the scheme for `k` messages as a reduced fraction.
///
/// # Safety
/// `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pirpsi_rate(k: u8, num: *mut u64, den: *mut u64) -> PirpsiStatus {
    if num.is_null() || den.is_null() {
        return PirpsiStatus::NullPointer;
    }
    if !(3..=62).contains(&k) {
        return PirpsiStatus::InvalidArgument;
    }
    let r = rate_this_scheme(k);
    *num = r.num() as u64;
    *den = r.den() as u64;
    PirpsiStatus::Ok
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn pirpsi_status_str(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer",
        2 => c"invalid argument",
        3 => c"unsupported parameters",
        4 => c"demand not decodable",
        5 => c"buffer too small",
        6 => c"internal error",
        _ => c"unknown status",
    };
    s.as_ptr()
}
