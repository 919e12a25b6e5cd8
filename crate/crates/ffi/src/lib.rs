//! C ABI over `anomint`.
//!
//! Conventions:
//!
//! * every fallible call returns an [`AnomintStatus`]; on failure a message
//!   is available from [`anomint_last_error`] on the same thread;
//! * objects are opaque handles created by `*_new`/`anomint_canonicalize`
//!   and released by the matching `*_free`;
//! * matrices are row-major `double` arrays; rationals are passed as
//!   separate numerator and denominator arrays;
//! * output buffers take a capacity and fail with
//!   `ANOMINT_STATUS_BUFFER_TOO_SMALL` when it is insufficient.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anomint::algebra::{rational_to_f64, verify_identity_suite, CentralCharges};
use anomint::canonical::{canonicalize, CanonicalForm};
use anomint::dynamics::exact_flow;
use anomint::io::ChargeFile;
use anomint::spectrum::{degeneracy_of, enumerate_levels, mode_quanta, ModeQuanta, Normalization, SpectrumTable};
use anomint::weyl::{verify_spectrum_invariance, GroupKind};
use anomint::Error;
use num_rational::BigRational;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnomintStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAntisymmetric = 3,
    OddDimension = 4,
    SingularCharges = 5,
    Parse = 6,
    Overflow = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnomintNormalization {
    /// Level spacing `2|β|`.
    Oracle = 0,
    /// Level spacing `β²`.
    Paper = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnomintGroup {
    /// Even sign changes: the Weyl group of `SO(2l)`.
    D = 0,
    /// All sign changes.
    B = 1,
}

/// One spectrum level. The exact energy is `energy_num / energy_den`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AnomintLevel {
    pub energy: f64,
    pub energy_num: i64,
    pub energy_den: i64,
    pub degeneracy: u64,
}

pub struct AnomintCharges(CentralCharges);

pub struct AnomintCanonical(CanonicalForm);

pub struct AnomintSpectrum(SpectrumTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Fail {
    Core(Error),
    Null(&'static str),
    Arg(String),
    Buffer { needed: usize, got: usize },
    Overflow,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl Fail {
    fn status(&self) -> AnomintStatus {
        match self {
            Fail::Core(Error::NotAntisymmetric { .. }) => AnomintStatus::NotAntisymmetric,
            Fail::Core(Error::OddDimension(_)) => AnomintStatus::OddDimension,
            Fail::Core(Error::SingularCharges { .. }) => AnomintStatus::SingularCharges,
            Fail::Core(Error::Parse(_)) => AnomintStatus::Parse,
            Fail::Core(Error::Overflow) | Fail::Overflow => AnomintStatus::Overflow,
            Fail::Core(_) | Fail::Arg(_) => AnomintStatus::InvalidArgument,
            Fail::Null(_) => AnomintStatus::NullPointer,
            Fail::Buffer { .. } => AnomintStatus::BufferTooSmall,
        }
    }

    fn message(&self) -> String {
        match self {
            Fail::Core(e) => e.to_string(),
            Fail::Null(what) => format!("`{what}` is null"),
            Fail::Arg(m) => m.clone(),
            Fail::Buffer { needed, got } => format!("buffer holds {got} values, {needed} needed"),
            Fail::Overflow => "exact value does not fit in 64-bit integers".into(),
        }
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AnomintStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AnomintStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(fail.message());
            fail.status()
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AnomintStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn fill(buf: *mut f64, cap: usize, values: impl ExactSizeIterator<Item = f64>) -> Result<(), Fail> {
    let needed = values.len();
    if cap < needed {
        return Err(Fail::Buffer { needed, got: cap });
    }
    if needed > 0 && buf.is_null() {
        return Err(Fail::Null("buffer"));
    }
    for (k, v) in values.enumerate() {
        buf.add(k).write(v);
    }
    Ok(())
}

fn ratio(p: i64, q: i64) -> Result<BigRational, Fail> {
    if q == 0 {
        return Err(Fail::Arg("zero denominator".into()));
    }
    Ok(BigRational::new(p.into(), q.into()))
}

unsafe fn rationals(num: *const i64, den: *const i64, len: usize) -> Result<Vec<BigRational>, Fail> {
    let num = slice(num, len, "numerators")?;
    let den = slice(den, len, "denominators")?;
    num.iter().zip(den).map(|(&p, &q)| ratio(p, q)).collect()
}

fn normalization(n: AnomintNormalization) -> Normalization {
    match n {
        AnomintNormalization::Oracle => Normalization::Oracle,
        AnomintNormalization::Paper => Normalization::Paper,
    }
}

fn quanta(beta: &[BigRational], norm: AnomintNormalization) -> Result<ModeQuanta, Fail> {
    if beta.is_empty() {
        return Err(Fail::Arg("at least one frequency is required".into()));
    }
    Ok(mode_quanta(beta, normalization(norm))?)
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn anomint_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn anomint_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds charges from `n × n` row-major rationals `num[k] / den[k]`.
///
/// # Safety
/// `num` and `den` must each point to `n * n` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_charges_new(
    n: usize,
    num: *const i64,
    den: *const i64,
    out: *mut *mut AnomintCharges,
) -> AnomintStatus {
    guard(|| {
        if n == 0 {
            return Err(Fail::Arg("n must be positive".into()));
        }
        let len = n.checked_mul(n).ok_or(Fail::Overflow)?;
        let flat = rationals(num, den, len)?;
        let rows = flat.chunks(n).map(<[_]>::to_vec).collect();
        let charges = CentralCharges::new(rows)?;
        write_out(out, Box::into_raw(Box::new(AnomintCharges(charges))), "out")
    })
}

/// Parses a charge file (`{"n": .., "alpha": ..}`) from a JSON string.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_charges_from_json(
    json: *const c_char,
    out: *mut *mut AnomintCharges,
) -> AnomintStatus {
    guard(|| {
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Fail::Arg(e.to_string()))?;
        let file = ChargeFile::parse(text)?;
        write_out(out, Box::into_raw(Box::new(AnomintCharges(file.charges))), "out")
    })
}

/// # Safety
/// `charges` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anomint_charges_free(charges: *mut AnomintCharges) {
    if !charges.is_null() {
        drop(Box::from_raw(charges));
    }
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `charges` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anomint_charges_n(charges: *const AnomintCharges) -> usize {
    charges.as_ref().map_or(0, |c| c.0.n())
}

/// Runs the exact commutator identity suite; `all_zero` receives whether
/// every residual vanishes.
///
/// # Safety
/// `charges` must be a live handle; `all_zero` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_verify_identities(
    charges: *const AnomintCharges,
    all_zero: *mut bool,
) -> AnomintStatus {
    guard(|| {
        let c = deref(charges, "charges")?;
        let report = verify_identity_suite(&c.0)?;
        write_out(all_zero, report.all_zero(), "all_zero")
    })
}

/// Brings the charges to Cartan block form. `tol` is the singularity
/// threshold relative to the largest entry.
///
/// # Safety
/// `charges` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_canonicalize(
    charges: *const AnomintCharges,
    tol: f64,
    out: *mut *mut AnomintCanonical,
) -> AnomintStatus {
    guard(|| {
        let c = deref(charges, "charges")?;
        let form = canonicalize(&c.0, tol)?;
        write_out(out, Box::into_raw(Box::new(AnomintCanonical(form))), "out")
    })
}

/// # Safety
/// `form` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anomint_canonical_free(form: *mut AnomintCanonical) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Number of frequency pairs `l`, or 0 for a null handle.
///
/// # Safety
/// `form` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anomint_canonical_l(form: *const AnomintCanonical) -> usize {
    form.as_ref().map_or(0, |f| f.0.l())
}

/// Determinant of `M` (±1), or 0 for a null handle.
///
/// # Safety
/// `form` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anomint_canonical_det(form: *const AnomintCanonical) -> i32 {
    form.as_ref().map_or(0, |f| i32::from(f.0.det_m))
}

/// Copies the `l` positive frequencies, descending.
///
/// # Safety
/// `form` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn anomint_canonical_beta(
    form: *const AnomintCanonical,
    buf: *mut f64,
    cap: usize,
) -> AnomintStatus {
    guard(|| fill(buf, cap, deref(form, "form")?.0.beta.iter().copied()))
}

/// Copies the orthogonal `2l × 2l` matrix `M` (row-major) with
/// `M A Mᵀ = C`.
///
/// # Safety
/// `form` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn anomint_canonical_matrix(
    form: *const AnomintCanonical,
    buf: *mut f64,
    cap: usize,
) -> AnomintStatus {
    guard(|| {
        let m = &deref(form, "form")?.0.m;
        fill(buf, cap, m.transpose().iter().copied())
    })
}

/// Enumerates all levels up to `E_max = emax_num / emax_den` for exact
/// frequencies `beta_num[k] / beta_den[k]`.
///
/// # Safety
/// `beta_num`, `beta_den` must each point to `l` values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_spectrum_new(
    l: usize,
    beta_num: *const i64,
    beta_den: *const i64,
    norm: AnomintNormalization,
    emax_num: i64,
    emax_den: i64,
    out: *mut *mut AnomintSpectrum,
) -> AnomintStatus {
    guard(|| {
        let beta = rationals(beta_num, beta_den, l)?;
        let table = enumerate_levels(&quanta(&beta, norm)?, &ratio(emax_num, emax_den)?)?;
        write_out(out, Box::into_raw(Box::new(AnomintSpectrum(table))), "out")
    })
}

/// # Safety
/// `spectrum` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anomint_spectrum_free(spectrum: *mut AnomintSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of distinct levels, or 0 for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anomint_spectrum_len(spectrum: *const AnomintSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.levels.len())
}

/// Level `index` in increasing energy order.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_spectrum_level(
    spectrum: *const AnomintSpectrum,
    index: usize,
    out: *mut AnomintLevel,
) -> AnomintStatus {
    guard(|| {
        let s = deref(spectrum, "spectrum")?;
        let level = s
            .0
            .levels
            .get(index)
            .ok_or_else(|| Fail::Arg(format!("level {index} out of range 0..{}", s.0.levels.len())))?;
        let e = &level.energy;
        let value = AnomintLevel {
            energy: rational_to_f64(e),
            energy_num: i64::try_from(e.numer()).map_err(|_| Fail::Overflow)?,
            energy_den: i64::try_from(e.denom()).map_err(|_| Fail::Overflow)?,
            degeneracy: level.degeneracy as u64,
        };
        write_out(out, value, "out")
    })
}

/// Number of occupation tuples at exactly `E = e_num / e_den`.
///
/// # Safety
/// `beta_num`, `beta_den` must each point to `l` values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_degeneracy(
    l: usize,
    beta_num: *const i64,
    beta_den: *const i64,
    norm: AnomintNormalization,
    e_num: i64,
    e_den: i64,
    out: *mut u64,
) -> AnomintStatus {
    guard(|| {
        let beta = rationals(beta_num, beta_den, l)?;
        let (d, _) = degeneracy_of(&quanta(&beta, norm)?, &ratio(e_num, e_den)?);
        write_out(out, d as u64, "out")
    })
}

/// Order of the group on `l` letters, or 0 for `l = 0`.
#[no_mangle]
pub extern "C" fn anomint_weyl_order(l: usize, group: AnomintGroup) -> u64 {
    if l == 0 {
        return 0;
    }
    match group {
        AnomintGroup::D => GroupKind::D.order(l),
        AnomintGroup::B => GroupKind::B.order(l),
    }
}

/// Checks that every group element leaves the `(E, degeneracy)` multiset up
/// to `E_max` invariant.
///
/// # Safety
/// `beta_num`, `beta_den` must each point to `l` values; `invariant` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn anomint_weyl_check(
    l: usize,
    beta_num: *const i64,
    beta_den: *const i64,
    norm: AnomintNormalization,
    emax_num: i64,
    emax_den: i64,
    group: AnomintGroup,
    invariant: *mut bool,
) -> AnomintStatus {
    guard(|| {
        let beta = rationals(beta_num, beta_den, l)?;
        if beta.is_empty() {
            return Err(Fail::Arg("at least one frequency is required".into()));
        }
        let kind = match group {
            AnomintGroup::D => GroupKind::D,
            AnomintGroup::B => GroupKind::B,
        };
        let r = verify_spectrum_invariance(&beta, normalization(norm), &ratio(emax_num, emax_den)?, kind)?;
        write_out(invariant, r.all_invariant, "invariant")
    })
}

/// Closed-form Heisenberg flow at time `t`: `fprime` receives the `n × n`
/// coefficients of `F'_α(t)` in `F'_α(0)`, `q_offsets` those of
/// `Q(t) − Q(0)`. Either buffer may be null to skip it.
///
/// # Safety
/// `charges` must be a live handle; non-null buffers must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn anomint_exact_flow(
    charges: *const AnomintCharges,
    t: f64,
    fprime: *mut f64,
    q_offsets: *mut f64,
    cap: usize,
) -> AnomintStatus {
    guard(|| {
        let s = exact_flow(&deref(charges, "charges")?.0, t)?;
        for (buf, m) in [(fprime, &s.fprime_coeffs), (q_offsets, &s.q_offsets)] {
            if !buf.is_null() {
                fill(buf, cap, m.transpose().iter().copied())?;
            }
        }
        Ok(())
    })
}
