//! C ABI over `dlmult`.
//!
//! Every fallible function returns a [`DlmultStatus`]; on failure the message
//! is available from [`dlmult_last_error`] on the calling thread. Strings in
//! are NUL-terminated UTF-8. Characters are comma separated (`"triv,sgn"`,
//! `"[2,1]"`), tori are cycle types (`"1,1"`, `"cox"`, `"split"`), and
//! several torus characters are separated by `;` (`"1,0;0,1"`), each one an
//! exponent list or a selection policy such as `"gp"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dlmult::cli::split_list;
use dlmult::dlchar::oracle_multiplicity;
use dlmult::formulas::{closed_multiplicity, select_theta, torus_part_sum, u_only, MultiplicityQuery, ThetaPolicy};
use dlmult::group::Gln;
use dlmult::scalar::Rat;
use dlmult::torus::TorusChar;
use dlmult::weyl::Partition;
use dlmult::Error;
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DlmultStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Precondition = 4,
    /// The exact answer does not fit a [`DlmultRational`].
    Overflow = 5,
    Arithmetic = 6,
    Internal = 7,
    Panic = 8,
}

/// `num / den` in lowest terms with `den > 0`.
#[repr(C)]
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct DlmultRational {
    pub num: i64,
    pub den: i64,
}

/// Opaque handle holding the tables of one `GL_n(q)`.
pub struct DlmultGroup {
    inner: Gln,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Status(DlmultStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn status_of(e: &Error) -> DlmultStatus {
    match e {
        Error::InvalidArgument(_) | Error::NotPrimePower(_) | Error::ContextMismatch(_) => {
            DlmultStatus::InvalidArgument
        }
        Error::OutOfRange { .. } => DlmultStatus::OutOfRange,
        Error::Precondition(_) => DlmultStatus::Precondition,
        Error::NoSuitablePrime(_)
        | Error::BoundExceeded { .. }
        | Error::ShadowMismatch { .. }
        | Error::NotRational(_) => DlmultStatus::Arithmetic,
        Error::Consistency(_) | Error::Io(_) => DlmultStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DlmultStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            DlmultStatus::Ok
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            DlmultStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(DlmultStatus::NullPointer, format!("{what} is null"))
}

unsafe fn group<'a>(g: *const DlmultGroup) -> Result<&'a Gln, Fail> {
    g.as_ref().map(|h| &h.inner).ok_or_else(|| null("group"))
}

/// Null reads as the empty string.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Ok("");
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Status(DlmultStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn to_c(r: &Rat) -> Result<DlmultRational, Fail> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(num), Some(den)) => Ok(DlmultRational { num, den }),
        _ => Err(Fail::Status(DlmultStatus::Overflow, format!("{r} does not fit in 64 bits"))),
    }
}

fn chars(g: &Gln, s: &str) -> Result<Vec<Partition>, Fail> {
    Ok(split_list(s).iter().map(|c| g.parse_char(c)).collect::<dlmult::Result<_>>()?)
}

fn torus(g: &Gln, s: &str) -> Result<Partition, Fail> {
    let p = match s.trim() {
        "cox" | "coxeter" => Partition::row(g.n),
        "split" | "" => Partition::column(g.n),
        other => other.parse::<Partition>()?,
    };
    if p.size() != g.n {
        return Err(Error::InvalidArgument(format!("{p} is not a cycle type of S_{}", g.n)).into());
    }
    Ok(p)
}

fn thetas(g: &Gln, w: &Partition, s: &str) -> Result<Vec<TorusChar>, Fail> {
    let entry = g.torus(w)?;
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let policy: ThetaPolicy = part.parse()?;
        let th = select_theta(&entry, &policy)?
            .ok_or_else(|| Fail::Core(Error::InvalidArgument(format!("no character on {w} satisfies {policy}"))))?;
        out.push(th);
    }
    Ok(out)
}

/// Message of the last failure on this thread, or the empty string. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn dlmult_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static version string.
#[no_mangle]
pub extern "C" fn dlmult_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the tables of `GL_n(q)`; free the handle with [`dlmult_group_free`].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn dlmult_group_new(n: u32, q: u64, out: *mut *mut DlmultGroup) -> DlmultStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = Gln::new(n as usize, q)?;
        out.write(Box::into_raw(Box::new(DlmultGroup { inner })));
        Ok(())
    })
}

/// # Safety
/// `g` is null or a handle from [`dlmult_group_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dlmult_group_free(g: *mut DlmultGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` is a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlmult_group_class_count(g: *const DlmultGroup, out: *mut usize) -> DlmultStatus {
    guard(|| write(out, group(g)?.classes.len()))
}

/// `|GL_n(q)|`; `Overflow` past `u64`.
///
/// # Safety
/// `g` is a live handle, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlmult_group_order(g: *const DlmultGroup, out: *mut u64) -> DlmultStatus {
    guard(|| {
        let order = group(g)?.order();
        let v = u64::try_from(order)
            .map_err(|_| Fail::Status(DlmultStatus::Overflow, format!("{order} does not fit in 64 bits")))?;
        write(out, v)
    })
}

/// Closed-form multiplicity of `U_{chi_1} x ... x R_{T_w}(theta_1) x ...` in
/// the trivial character.
///
/// # Safety
/// `g` is a live handle; string arguments are null or NUL-terminated;
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dlmult_multiplicity(
    g: *const DlmultGroup,
    chars_list: *const c_char,
    torus_type: *const c_char,
    theta_list: *const c_char,
    out: *mut DlmultRational,
) -> DlmultStatus {
    guard(|| {
        let g = group(g)?;
        let chars = chars(g, text(chars_list, "chars")?)?;
        let w = torus(g, text(torus_type, "torus")?)?;
        let thetas = thetas(g, &w, text(theta_list, "thetas")?)?;
        let query = MultiplicityQuery { n: g.n, q: g.q, chars, torus: w, thetas };
        let v = if query.thetas.is_empty() {
            u_only(g, &query.chars)?.value
        } else {
            closed_multiplicity(g, &query)?.value
        };
        write(out, to_c(&v)?)
    })
}

/// The same multiplicity by summing character values over all classes.
///
/// # Safety
/// As for [`dlmult_multiplicity`].
#[no_mangle]
pub unsafe extern "C" fn dlmult_brute_multiplicity(
    g: *const DlmultGroup,
    chars_list: *const c_char,
    torus_type: *const c_char,
    theta_list: *const c_char,
    out: *mut DlmultRational,
) -> DlmultStatus {
    guard(|| {
        let g = group(g)?;
        let chars = chars(g, text(chars_list, "chars")?)?;
        let w = torus(g, text(torus_type, "torus")?)?;
        let thetas = thetas(g, &w, text(theta_list, "thetas")?)?;
        write(out, to_c(&oracle_multiplicity(g, &chars, &w, &thetas)?)?)
    })
}

/// `<U_{chi_1} x ... x U_{chi_m}, 1>`.
///
/// # Safety
/// As for [`dlmult_multiplicity`].
#[no_mangle]
pub unsafe extern "C" fn dlmult_u_only(
    g: *const DlmultGroup,
    chars_list: *const c_char,
    out: *mut DlmultRational,
) -> DlmultStatus {
    guard(|| {
        let g = group(g)?;
        let chars = chars(g, text(chars_list, "chars")?)?;
        write(out, to_c(&u_only(g, &chars)?.value)?)
    })
}

/// Contribution of the regular semisimple classes to `<U_{chi_1} x ..., 1>`.
///
/// # Safety
/// As for [`dlmult_multiplicity`].
#[no_mangle]
pub unsafe extern "C" fn dlmult_torus_part(
    g: *const DlmultGroup,
    chars_list: *const c_char,
    out: *mut DlmultRational,
) -> DlmultStatus {
    guard(|| {
        let g = group(g)?;
        let chars = chars(g, text(chars_list, "chars")?)?;
        write(out, to_c(&torus_part_sum(g, &chars)?)?)
    })
}
