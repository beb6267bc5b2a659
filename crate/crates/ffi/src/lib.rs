//! C ABI for randcomp.
//!
//! Objects are opaque handles created by `rc_*_new`/`rc_*_parse`/`rc_sample_*`
//! and released by the matching `rc_*_free`. Fallible functions return an
//! [`RcStatus`]; on failure [`rc_last_error_message`] describes the error
//! for the calling thread. Strings returned as `char *` are owned by the
//! caller and must be released with [`rc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use randcomp::oracle::{exact_prob_geometric, exact_prob_uniform, DpOptions};
use randcomp::patterns::{count_occurrences, GapMode};
use randcomp::property::{Predicate, Property};
use randcomp::report::StatsReport;
use randcomp::samplers::{evolve_step_in_place, sample_geometric, sample_uniform_bars};
use randcomp::theory::{poisson_limit, StatParams, StatisticId};
use randcomp::{count_compositions, parse_pattern, Composition, Error, PatternSpec, RngStream};

/// Status codes returned by fallible functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcStatus {
    RcOk = 0,
    RcNullPointer = 1,
    RcInvalidArgument = 2,
    RcSyntax = 3,
    RcUnsupported = 4,
    RcGuardExceeded = 5,
    RcBufferTooSmall = 6,
    RcPanic = 7,
}

/// Opaque composition handle.
pub struct RcComposition(Composition);

/// Opaque parsed pattern handle.
pub struct RcPattern(PatternSpec);

/// Opaque random stream handle.
pub struct RcRng(RngStream);

/// Result of matching a pattern.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RcMatch {
    /// Occurrence count, saturating at `UINT64_MAX`.
    pub count: u64,
    pub exists: bool,
    /// The ordering search stopped at its cap; `count` is a lower bound.
    pub truncated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> RcStatus {
    match e {
        Error::Syntax { .. } | Error::EmptyPattern | Error::OrderingAlphabet(_) => RcStatus::RcSyntax,
        Error::Unsupported(_) => RcStatus::RcUnsupported,
        Error::GuardExceeded { .. } => RcStatus::RcGuardExceeded,
        _ => RcStatus::RcInvalidArgument,
    }
}

struct Failure(RcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RcStatus::RcNullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RcStatus::RcOk
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RcStatus::RcPanic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(RcStatus::RcInvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn gap_mode(strict_gaps: bool) -> GapMode {
    if strict_gaps {
        GapMode::Strict
    } else {
        GapMode::Loose
    }
}

/// Message of the last error on this thread; empty after a success. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a comma-separated or digit-string composition.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_parse(text_ptr: *const c_char, out: *mut *mut RcComposition) -> RcStatus {
    guard(|| {
        let c = Composition::parse(text(text_ptr, "text")?)?;
        put(out, Box::into_raw(Box::new(RcComposition(c))), "out")
    })
}

/// Builds a composition from `len` terms.
///
/// # Safety
/// `terms` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_from_terms(
    terms: *const u64,
    len: usize,
    out: *mut *mut RcComposition,
) -> RcStatus {
    guard(|| {
        if terms.is_null() {
            return Err(null("terms"));
        }
        let c = Composition::new(std::slice::from_raw_parts(terms, len).to_vec())?;
        put(out, Box::into_raw(Box::new(RcComposition(c))), "out")
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_free(c: *mut RcComposition) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of terms, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_len(c: *const RcComposition) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Sum of the terms, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_size(c: *const RcComposition) -> u64 {
    c.as_ref().map_or(0, |c| c.0.size())
}

/// Copies the terms into `buf`, which must hold `rc_composition_len(c)`
/// values.
///
/// # Safety
/// `c` must be a live handle and `buf` must hold `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_terms(c: *const RcComposition, buf: *mut u64, cap: usize) -> RcStatus {
    guard(|| {
        let c = reference(c, "composition")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let t = c.0.terms();
        if cap < t.len() {
            return Err(Failure(RcStatus::RcBufferTooSmall, format!("need {} values, got {cap}", t.len())));
        }
        ptr::copy_nonoverlapping(t.as_ptr(), buf, t.len());
        Ok(())
    })
}

/// Statistics report as a JSON string, or null on a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_composition_stats_json(c: *const RcComposition) -> *mut c_char {
    match c.as_ref() {
        Some(c) => serde_json::to_string(&StatsReport::new(&c.0)).map_or(ptr::null_mut(), owned_string),
        None => ptr::null_mut(),
    }
}

/// A random stream keyed by `(seed, stream_index)`.
#[no_mangle]
pub extern "C" fn rc_rng_new(seed: u64, stream_index: u64) -> *mut RcRng {
    Box::into_raw(Box::new(RcRng(RngStream::new(seed, stream_index))))
}

/// # Safety
/// `rng` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rc_rng_free(rng: *mut RcRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Uniform `n`-composition of `m`.
///
/// # Safety
/// `rng` must be a live handle not used concurrently; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_sample_uniform(n: usize, m: u64, rng: *mut RcRng, out: *mut *mut RcComposition) -> RcStatus {
    guard(|| {
        let rng = rng.as_mut().ok_or_else(|| null("rng"))?;
        let c = sample_uniform_bars(n, m, &mut rng.0)?;
        put(out, Box::into_raw(Box::new(RcComposition(c))), "out")
    })
}

/// `n` i.i.d. geometric terms with `P(term >= k) = p^k`.
///
/// # Safety
/// `rng` must be a live handle not used concurrently; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_sample_geometric(n: usize, p: f64, rng: *mut RcRng, out: *mut *mut RcComposition) -> RcStatus {
    guard(|| {
        let rng = rng.as_mut().ok_or_else(|| null("rng"))?;
        let c = sample_geometric(n, p, &mut rng.0)?;
        put(out, Box::into_raw(Box::new(RcComposition(c))), "out")
    })
}

/// One step of the evolutionary chain, in place; writes the 0-based index
/// of the grown term to `grown` when it is not null.
///
/// # Safety
/// `c` and `rng` must be live handles; `grown` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rc_evolve_step(c: *mut RcComposition, rng: *mut RcRng, grown: *mut usize) -> RcStatus {
    guard(|| {
        let c = c.as_mut().ok_or_else(|| null("composition"))?;
        let rng = rng.as_mut().ok_or_else(|| null("rng"))?;
        let mut terms = c.0.terms().to_vec();
        let j = evolve_step_in_place(&mut terms, &mut rng.0);
        c.0 = Composition::new(terms)?;
        if !grown.is_null() {
            grown.write(j);
        }
        Ok(())
    })
}

/// Parses a pattern in the `kind:terms` syntax.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_pattern_parse(text_ptr: *const c_char, out: *mut *mut RcPattern) -> RcStatus {
    guard(|| {
        let spec = parse_pattern(text(text_ptr, "text")?)?;
        put(out, Box::into_raw(Box::new(RcPattern(spec))), "out")
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rc_pattern_free(p: *mut RcPattern) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Counts occurrences of `pattern` in `c`.
///
/// # Safety
/// `c` and `pattern` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_match(
    c: *const RcComposition,
    pattern: *const RcPattern,
    strict_gaps: bool,
    out: *mut RcMatch,
) -> RcStatus {
    guard(|| {
        let c = reference(c, "composition")?;
        let spec = reference(pattern, "pattern")?;
        let r = count_occurrences(&c.0, &spec.0, gap_mode(strict_gaps))?;
        put(out, RcMatch { count: r.count, exists: r.exists, truncated: r.truncated }, "out")
    })
}

/// Exact `P(contains pattern)` under the uniform model, by enumeration.
///
/// # Safety
/// `pattern` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_oracle_uniform(
    n: u64,
    m: u64,
    pattern: *const RcPattern,
    strict_gaps: bool,
    out: *mut f64,
) -> RcStatus {
    guard(|| {
        let spec = reference(pattern, "pattern")?;
        let property = Property::new(Predicate::Contains(spec.0.clone(), gap_mode(strict_gaps)));
        let mut failure = None;
        let r = exact_prob_uniform(n, m, |c| {
            property.eval(c).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                false
            })
        })?;
        if let Some(e) = failure {
            return Err(e.into());
        }
        put(out, r.value(), "out")
    })
}

/// Certified interval for `P(contains pattern)` under the geometric model.
///
/// # Safety
/// `pattern` must be a live handle; `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_oracle_geometric(
    n: u64,
    p: f64,
    pattern: *const RcPattern,
    strict_gaps: bool,
    lo: *mut f64,
    hi: *mut f64,
) -> RcStatus {
    guard(|| {
        let spec = reference(pattern, "pattern")?;
        let property = Property::new(Predicate::Contains(spec.0.clone(), gap_mode(strict_gaps)));
        let r = exact_prob_geometric(n, p, &property, &DpOptions::default())?;
        put(lo, r.lo, "lo")?;
        put(hi, r.hi, "hi")
    })
}

/// Limiting Poisson probability for statistic `id` with parameter `k`
/// (ignored when 0) at scale constant `alpha`.
///
/// # Safety
/// `id` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_theory_poisson(id: *const c_char, k: u64, alpha: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        let id: StatisticId = text(id, "id")?.parse()?;
        let params = if k == 0 { StatParams::default() } else { StatParams::with_k(k) };
        put(out, poisson_limit(id, &params, alpha)?.value, "out")
    })
}

/// `binom(m+n-1, m)` in decimal, or null when `n = 0`.
#[no_mangle]
pub extern "C" fn rc_count_compositions(n: u64, m: u64) -> *mut c_char {
    if n == 0 {
        set_error("n must be at least 1");
        return ptr::null_mut();
    }
    owned_string(count_compositions(n, m).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(rc_last_error_message()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn composition_round_trip() {
        unsafe {
            let mut c = ptr::null_mut();
            assert_eq!(rc_composition_parse(c"0,5,0,9".as_ptr(), &mut c), RcStatus::RcOk);
            assert_eq!(rc_composition_len(c), 4);
            assert_eq!(rc_composition_size(c), 14);
            let mut buf = [0u64; 4];
            assert_eq!(rc_composition_terms(c, buf.as_mut_ptr(), 4), RcStatus::RcOk);
            assert_eq!(buf, [0, 5, 0, 9]);
            assert_eq!(rc_composition_terms(c, buf.as_mut_ptr(), 3), RcStatus::RcBufferTooSmall);
            rc_composition_free(c);
        }
    }

    #[test]
    fn errors_set_message() {
        unsafe {
            let mut p = ptr::null_mut();
            assert_eq!(rc_pattern_parse(c"e:[1,".as_ptr(), &mut p), RcStatus::RcSyntax);
            assert!(last_error().contains('5') || !last_error().is_empty());
            assert_eq!(rc_pattern_parse(ptr::null(), &mut p), RcStatus::RcNullPointer);
            assert_eq!(rc_pattern_parse(c"o:[0,2]".as_ptr(), &mut p), RcStatus::RcSyntax);
            assert_eq!(rc_pattern_parse(c"e:[1]".as_ptr(), &mut p), RcStatus::RcOk);
            assert_eq!(last_error(), "");
            rc_pattern_free(p);
        }
    }

    #[test]
    fn match_and_oracles() {
        unsafe {
            let (mut c, mut p) = (ptr::null_mut(), ptr::null_mut());
            rc_composition_parse(c"2,2,2".as_ptr(), &mut c);
            rc_pattern_parse(c"e:[2,2]".as_ptr(), &mut p);
            let mut m = RcMatch::default();
            assert_eq!(rc_match(c, p, false, &mut m), RcStatus::RcOk);
            assert_eq!((m.count, m.exists, m.truncated), (2, true, false));
            rc_pattern_free(p);

            rc_pattern_parse(c"e:[1,1]".as_ptr(), &mut p);
            let mut v = 0.0;
            assert_eq!(rc_oracle_uniform(3, 2, p, false, &mut v), RcStatus::RcOk);
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
            assert_eq!(rc_oracle_uniform(30, 30, p, false, &mut v), RcStatus::RcGuardExceeded);
            rc_pattern_free(p);

            rc_pattern_parse(c"e:[0,0]".as_ptr(), &mut p);
            let (mut lo, mut hi) = (0.0, 0.0);
            assert_eq!(rc_oracle_geometric(2, 0.5, p, false, &mut lo, &mut hi), RcStatus::RcOk);
            assert_eq!((lo, hi), (0.25, 0.25));
            rc_pattern_free(p);
            rc_composition_free(c);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        unsafe {
            let (r1, r2) = (rc_rng_new(5, 1), rc_rng_new(5, 1));
            let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(rc_sample_geometric(30, 0.6, r1, &mut a), RcStatus::RcOk);
            assert_eq!(rc_sample_geometric(30, 0.6, r2, &mut b), RcStatus::RcOk);
            assert_eq!((*a).0, (*b).0);
            let before = rc_composition_size(a);
            let mut j = usize::MAX;
            assert_eq!(rc_evolve_step(a, r1, &mut j), RcStatus::RcOk);
            assert!(j < 30);
            assert_eq!(rc_composition_size(a), before + 1);
            assert_eq!(rc_sample_geometric(3, 1.0, r1, &mut b), RcStatus::RcInvalidArgument);
            rc_composition_free(a);
            rc_composition_free(b);
            let mut u = ptr::null_mut();
            assert_eq!(rc_sample_uniform(4, 7, r2, &mut u), RcStatus::RcOk);
            assert_eq!(rc_composition_size(u), 7);
            rc_composition_free(u);
            rc_rng_free(r1);
            rc_rng_free(r2);
        }
    }

    #[test]
    fn strings_and_theory() {
        unsafe {
            let s = rc_count_compositions(3, 2);
            assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "6");
            rc_string_free(s);
            let mut v = 0.0;
            assert_eq!(rc_theory_poisson(c"cmax_ge".as_ptr(), 2, 1.0, &mut v), RcStatus::RcOk);
            assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
            assert_eq!(rc_theory_poisson(c"bogus".as_ptr(), 2, 1.0, &mut v), RcStatus::RcInvalidArgument);
            let mut c = ptr::null_mut();
            rc_composition_parse(c"0000".as_ptr(), &mut c);
            let j = rc_composition_stats_json(c);
            assert!(CStr::from_ptr(j).to_str().unwrap().contains("\"gmax\":4"));
            rc_string_free(j);
            rc_composition_free(c);
            assert!(!CStr::from_ptr(rc_version()).to_bytes().is_empty());
        }
    }
}
