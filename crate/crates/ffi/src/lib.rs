//! C ABI over the pricing engine.
//!
//! Markets and claims live behind opaque handles. Every function returns a
//! [`ShStatus`]; results come back through out-pointers. Prices are returned
//! as newly allocated strings of space-separated `num/den` values, one per
//! atom of the requested time, to be released with [`sh_string_free`]. The
//! message of the last failure on the calling thread is available from
//! [`sh_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use superhedge::emm::{lower_price, require_no_arbitrage, upper_price};
use superhedge::expectation::{subhedge, superhedge};
use superhedge::format::{parse_claim, parse_market};
use superhedge::market::{Claim, Market};
use superhedge::pricing::price_interval;
use superhedge::rational::to_record;
use superhedge::{Error, Rational};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidMarket = 5,
    Arbitrage = 6,
    TimeOutOfRange = 7,
    NegativeClaim = 8,
    Internal = 9,
}

/// Opaque arbitrage-free market.
pub struct ShMarket(Market);

/// Opaque claim bound to the market it was parsed against.
pub struct ShClaim(Claim);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ShStatus {
    match e {
        Error::Io { .. } => ShStatus::Io,
        Error::Parse { .. } | Error::ParseRational { .. } => ShStatus::Parse,
        Error::ArbitrageDetected { .. } | Error::Unbounded { .. } | Error::NoInteriorPoint(_) => ShStatus::Arbitrage,
        Error::TimeOutOfRange { .. } => ShStatus::TimeOutOfRange,
        Error::NegativeClaim => ShStatus::NegativeClaim,
        Error::NonUniformDepth { .. }
        | Error::ZeroWeight(_)
        | Error::WeightSum(_)
        | Error::MalformedTree(_)
        | Error::ShapeMismatch(_)
        | Error::NegativePrice { .. } => ShStatus::InvalidMarket,
        _ => ShStatus::Internal,
    }
}

fn fail(e: Error) -> ShStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// # Safety
/// `s` must be null or a valid nul-terminated string.
unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, ShStatus> {
    if s.is_null() {
        set_error("null string argument".into());
        return Err(ShStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        ShStatus::InvalidUtf8
    })
}

fn join(values: &[Rational]) -> String {
    values.iter().map(to_record).collect::<Vec<_>>().join(" ")
}

/// # Safety
/// `out` must be valid for a pointer write.
unsafe fn emit(out: *mut *mut c_char, s: String) -> ShStatus {
    *out = CString::new(s).expect("no interior nul").into_raw();
    ShStatus::Ok
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

fn market_from_text(text: &str) -> Result<Market, ShStatus> {
    let m = parse_market(text).map_err(fail)?;
    require_no_arbitrage(&m).map_err(fail)?;
    Ok(m)
}

/// Parses a market from its text form and checks it is free of arbitrage.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_market_from_str(text: *const c_char, out: *mut *mut ShMarket) -> ShStatus {
    if out.is_null() {
        return ShStatus::NullPointer;
    }
    let m = try_ffi!(market_from_text(try_ffi!(c_str(text))));
    *out = Box::into_raw(Box::new(ShMarket(m)));
    ShStatus::Ok
}

/// Like [`sh_market_from_str`], reading the text from a file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_market_from_file(path: *const c_char, out: *mut *mut ShMarket) -> ShStatus {
    if out.is_null() {
        return ShStatus::NullPointer;
    }
    let path = try_ffi!(c_str(path));
    let body = try_ffi!(std::fs::read_to_string(path).map_err(|e| fail(Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    })));
    let m = try_ffi!(market_from_text(&body));
    *out = Box::into_raw(Box::new(ShMarket(m)));
    ShStatus::Ok
}

/// # Safety
/// `market` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_market_free(market: *mut ShMarket) {
    if !market.is_null() {
        drop(Box::from_raw(market));
    }
}

/// Writes the horizon `T`.
///
/// # Safety
/// `market` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_market_horizon(market: *const ShMarket, out: *mut usize) -> ShStatus {
    if market.is_null() || out.is_null() {
        return ShStatus::NullPointer;
    }
    *out = (*market).0.horizon();
    ShStatus::Ok
}

/// Writes the number of atoms (nodes) at level `t`.
///
/// # Safety
/// `market` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_market_atoms(market: *const ShMarket, t: usize, out: *mut usize) -> ShStatus {
    if market.is_null() || out.is_null() {
        return ShStatus::NullPointer;
    }
    let m = &(*market).0;
    try_ffi!(m.tree.check_time(t).map_err(fail));
    *out = m.tree.level(t).len();
    ShStatus::Ok
}

/// Parses a claim file body (`<leaf> <value>` lines) against `market`.
///
/// # Safety
/// `market` must be a live handle, `text` nul-terminated, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_claim_from_str(
    market: *const ShMarket,
    text: *const c_char,
    out: *mut *mut ShClaim,
) -> ShStatus {
    if market.is_null() || out.is_null() {
        return ShStatus::NullPointer;
    }
    let body = try_ffi!(c_str(text));
    let c = try_ffi!(parse_claim(body, &(*market).0).map_err(fail));
    *out = Box::into_raw(Box::new(ShClaim(c)));
    ShStatus::Ok
}

/// # Safety
/// `claim` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_claim_free(claim: *mut ShClaim) {
    if !claim.is_null() {
        drop(Box::from_raw(claim));
    }
}

type Pricer = fn(&Market, &Claim, usize) -> superhedge::Result<Vec<Rational>>;

unsafe fn price_with(
    f: Pricer,
    market: *const ShMarket,
    claim: *const ShClaim,
    t: usize,
    out: *mut *mut c_char,
) -> ShStatus {
    if market.is_null() || claim.is_null() || out.is_null() {
        return ShStatus::NullPointer;
    }
    let v = try_ffi!(f(&(*market).0, &(*claim).0, t).map_err(fail));
    emit(out, join(&v))
}

/// Superhedging price `E_t(H)` per atom.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_superhedge(
    market: *const ShMarket,
    claim: *const ShClaim,
    t: usize,
    out: *mut *mut c_char,
) -> ShStatus {
    price_with(|m, h, t| Ok(superhedge(m, h, t)?.price), market, claim, t, out)
}

/// Subhedging price `E*_t(H)` per atom.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_subhedge(
    market: *const ShMarket,
    claim: *const ShClaim,
    t: usize,
    out: *mut *mut c_char,
) -> ShStatus {
    price_with(|m, h, t| Ok(subhedge(m, h, t)?.price), market, claim, t, out)
}

/// Supremum of `E_Q[H | F_t]` over equivalent martingale measures.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_upper_price(
    market: *const ShMarket,
    claim: *const ShClaim,
    t: usize,
    out: *mut *mut c_char,
) -> ShStatus {
    price_with(|m, h, t| Ok(upper_price(m, h, t)?.values), market, claim, t, out)
}

/// Infimum of `E_Q[H | F_t]` over equivalent martingale measures.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_lower_price(
    market: *const ShMarket,
    claim: *const ShClaim,
    t: usize,
    out: *mut *mut c_char,
) -> ShStatus {
    price_with(|m, h, t| Ok(lower_price(m, h, t)?.values), market, claim, t, out)
}

/// No-arbitrage interval per atom, one line each: `(l, u)` when open,
/// `[p]` when degenerate, with `l`, `u`, `p` as `num/den`.
///
/// # Safety
/// Handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sh_price_interval(
    market: *const ShMarket,
    claim: *const ShClaim,
    t: usize,
    out: *mut *mut c_char,
) -> ShStatus {
    if market.is_null() || claim.is_null() || out.is_null() {
        return ShStatus::NullPointer;
    }
    let iv = try_ffi!(price_interval(&(*market).0, &(*claim).0, t).map_err(fail));
    let lines: Vec<String> = iv
        .atoms
        .iter()
        .map(|a| {
            if a.degenerate {
                format!("[{}]", to_record(&a.upper))
            } else {
                format!("({}, {})", to_record(&a.lower), to_record(&a.upper))
            }
        })
        .collect();
    emit(out, lines.join("\n"))
}

/// Message of the last failure on this thread as a new string, or null.
#[no_mangle]
pub extern "C" fn sh_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
