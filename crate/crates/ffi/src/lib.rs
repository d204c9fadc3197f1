//! C ABI over `critdipole`.
//!
//! Every fallible function returns a [`CdStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be copied
//! out with [`cd_last_error_message`]. Handles are opaque and must be released
//! with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use critdipole::critical::{estimate_ratio, p_crit_exact};
use critdipole::eigensolver::{
    discretize, find_alpha_crit, hydrogen_spectrum, lowest_states, zero_energy_node_count, Grid, GridKind,
};
use critdipole::frobenius::{eval_series, series_coefficients};
use critdipole::units::{alpha_from_p, dipole_si_to_atomic};
use critdipole::{ConstantSet, Error, PotentialSpec};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdStatus {
    Ok = 0,
    InvalidArgument = 1,
    Numerical = 2,
    Inconclusive = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdGridKind {
    Uniform = 0,
    Logarithmic = 1,
}

/// Physical constants in SI.
pub struct CdConstants(ConstantSet);

/// Energies (hartree) and node counts of the lowest states.
pub struct CdSpectrum {
    energies: Vec<f64>,
    nodes: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CdStatus {
    match e {
        Error::Bracket(_) => CdStatus::Inconclusive,
        e if e.is_numerical() => CdStatus::Numerical,
        _ => CdStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CdStatus>) -> CdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CdStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, CdStatus>;
}

impl<T> OrStatus<T> for critdipole::Result<T> {
    fn or_status(self) -> Result<T, CdStatus> {
        self.map_err(|e| {
            set_error(format!("{}: {e}", e.code()));
            status_of(&e)
        })
    }
}

fn null(what: &str) -> CdStatus {
    set_error(format!("null pointer: {what}"));
    CdStatus::NullPointer
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), CdStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn constants<'a>(c: *const CdConstants) -> Result<&'a ConstantSet, CdStatus> {
    c.as_ref().map(|c| &c.0).ok_or_else(|| null("constants"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// NUL-terminated) and returns the full message length, excluding the NUL.
/// Returns 0 when there is no message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// CODATA 2018 constants. Never returns null.
#[no_mangle]
pub extern "C" fn cd_constants_codata2018() -> *mut CdConstants {
    Box::into_raw(Box::new(CdConstants(ConstantSet::codata2018())))
}

/// Custom constants (SI); rejects non-positive or non-finite values.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn cd_constants_new(
    hbar: f64,
    m_electron: f64,
    q_electron: f64,
    epsilon0: f64,
    out: *mut *mut CdConstants,
) -> CdStatus {
    guard(|| {
        let c = ConstantSet::new(hbar, m_electron, q_electron, epsilon0).or_status()?;
        write(out, Box::into_raw(Box::new(CdConstants(c))), "out")
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cd_constants_free(c: *mut CdConstants) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Closed-form critical dipole moment πε₀ħ²/(2qm) in C·m.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cd_p_crit_exact_si(c: *const CdConstants, out: *mut f64) -> CdStatus {
    guard(|| write(out, p_crit_exact(constants(c)?), "out"))
}

/// Ratio of the ionization estimate to the exact critical moment.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cd_estimate_ratio(c: *const CdConstants, out: *mut f64) -> CdStatus {
    guard(|| write(out, estimate_ratio(constants(c)?), "out"))
}

/// Dimensionless coupling α for a dipole moment given in C·m.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cd_alpha_from_p_si(c: *const CdConstants, p_si: f64, out: *mut f64) -> CdStatus {
    guard(|| {
        let c = constants(c)?;
        let alpha = alpha_from_p(&ConstantSet::atomic(), dipole_si_to_atomic(c, p_si)).or_status()?;
        write(out, alpha, "out")
    })
}

/// Zero-energy node count of the inverse-square problem on (delta, length).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cd_zero_energy_node_count(alpha: f64, delta: f64, length: f64, out: *mut usize) -> CdStatus {
    guard(|| write(out, zero_energy_node_count(alpha, delta, length).or_status()?, "out"))
}

/// Bisects for the first zero-energy node on (delta, length).
///
/// # Safety
/// `alpha_out` and `half_width_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cd_find_alpha_crit(
    delta: f64,
    length: f64,
    tol_alpha: f64,
    alpha_out: *mut f64,
    half_width_out: *mut f64,
) -> CdStatus {
    guard(|| {
        if alpha_out.is_null() || half_width_out.is_null() {
            return Err(null("out"));
        }
        let est = find_alpha_crit(delta, length, tol_alpha).or_status()?;
        write(alpha_out, est.alpha, "alpha_out")?;
        write(half_width_out, est.half_width, "half_width_out")
    })
}

/// Evaluates the Frobenius series with `n_terms` terms and a₀ = 1 at y > 0.
///
/// # Safety
/// `re_out` and `im_out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn cd_series_eval(
    alpha: f64,
    xi: f64,
    nu_re: f64,
    nu_im: f64,
    n_terms: usize,
    y: f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> CdStatus {
    guard(|| {
        if re_out.is_null() || im_out.is_null() {
            return Err(null("out"));
        }
        let s = series_coefficients(
            alpha,
            xi,
            Complex64::new(nu_re, nu_im),
            n_terms,
            Complex64::new(1.0, 0.0),
        )
        .or_status()?;
        let v = eval_series(&s, y).or_status()?;
        write(re_out, v.re, "re_out")?;
        write(im_out, v.im, "im_out")
    })
}

/// Dirichlet hydrogen spectrum on the default logarithmic grid.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn cd_hydrogen_spectrum(
    lambda: f64,
    n_states: usize,
    refine_levels: usize,
    out: *mut *mut CdSpectrum,
) -> CdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = hydrogen_spectrum(lambda, n_states, refine_levels).or_status()?;
        let s = CdSpectrum {
            energies: r.spectrum.energies.clone(),
            nodes: r.spectrum.node_counts.clone(),
        };
        write(out, Box::into_raw(Box::new(s)), "out")
    })
}

/// Lowest `n_states` of a potential given as a `key=value` record such as
/// `"kind=coulomb lambda=1"`, on a grid with `n` points over [x_min, x_max].
///
/// # Safety
/// `record` must be a NUL-terminated string and `out` valid for writing a
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cd_spectrum_from_record(
    record: *const c_char,
    grid: CdGridKind,
    x_min: f64,
    x_max: f64,
    n: usize,
    n_states: usize,
    out: *mut *mut CdSpectrum,
) -> CdStatus {
    guard(|| {
        if record.is_null() {
            return Err(null("record"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(record).to_str().map_err(|_| {
            set_error("record is not valid UTF-8".into());
            CdStatus::InvalidArgument
        })?;
        let spec = PotentialSpec::parse_record(text).or_status()?;
        let kind = match grid {
            CdGridKind::Uniform => GridKind::Uniform,
            CdGridKind::Logarithmic => GridKind::Logarithmic,
        };
        let g = Grid::new(kind, x_min, x_max, n).or_status()?;
        let h = discretize(&spec, &g).or_status()?;
        let s = lowest_states(&h, n_states, false).or_status()?;
        let s = CdSpectrum {
            energies: s.energies,
            nodes: s.node_counts,
        };
        write(out, Box::into_raw(Box::new(s)), "out")
    })
}

/// Number of states held. Returns 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cd_spectrum_len(s: *const CdSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.energies.len())
}

/// Energy (hartree) and node count of state `k`.
///
/// # Safety
/// `s` must be a live handle; `energy_out` and `nodes_out` writable.
#[no_mangle]
pub unsafe extern "C" fn cd_spectrum_state(
    s: *const CdSpectrum,
    k: usize,
    energy_out: *mut f64,
    nodes_out: *mut usize,
) -> CdStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("spectrum"))?;
        if k >= s.energies.len() {
            set_error(format!("state {k} out of range 0..{}", s.energies.len()));
            return Err(CdStatus::InvalidArgument);
        }
        write(energy_out, s.energies[k], "energy_out")?;
        write(nodes_out, s.nodes[k], "nodes_out")
    })
}

/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cd_spectrum_free(s: *mut CdSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
