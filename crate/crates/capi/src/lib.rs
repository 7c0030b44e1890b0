//! C ABI for the passive-dilation library.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns a [`GdilStatus`] and reports details through
//! [`gdil_last_error_message`]. Matrices cross the boundary as row-major
//! `double` buffers in the blocked quadrature ordering (all Q's, then all
//! P's; system block before environment block for dilation unitaries).

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use gdil::dilation::{
    check_dilatable, construct_dilation, is_passive_channel, minimal_modes,
    random_dilatable_channel, verify_dilation, PassiveDilation,
};
use gdil::gaussian::GaussianChannel;
use gdil::normal_form::{compute_normal_form, NormalForm};
use gdil::numerics::RealMatrix;
use gdil::{Error, Tolerance};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdilStatus {
    Ok = 0,
    /// A pointer argument was null or a buffer length was wrong.
    InvalidArgument = 1,
    /// The input matrices do not form a completely positive channel.
    InvalidChannel = 2,
    /// The channel admits no passive dilation (at the requested mode count).
    NotDilatable = 3,
    /// An eigenvalue or singular value computation failed to converge.
    NumericalFailure = 4,
}

/// Relative/absolute tolerance pair; pass NULL wherever a
/// `const GdilTolerance*` is expected to use the defaults (1e-9, 1e-12).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GdilTolerance {
    pub rel: f64,
    pub abs: f64,
}

/// Verdicts and residuals of the dilatability test.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GdilDilatability {
    pub psd_ok: bool,
    pub commutes_ok: bool,
    pub kernel_ok: bool,
    /// Whether a dilation exists with the queried environment mode count.
    pub dilatable: bool,
    /// Least environment mode count allowed by the rank bound.
    pub min_modes: usize,
    pub rank_y: usize,
    pub sigma_hat_min_eigenvalue: f64,
    pub commutator_norm: f64,
}

/// Residuals of a dilation verification.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GdilVerification {
    pub valid: bool,
    pub symplectic_equation_residual: f64,
    pub orthogonal_equation_residual: f64,
    pub noise_equation_residual: f64,
    pub s1_residual: f64,
    pub membership_residual: f64,
    pub env_min_eigenvalue: f64,
    pub action_residual: f64,
}

/// Opaque Gaussian channel handle.
pub struct GdilChannel(GaussianChannel);
/// Opaque passive dilation handle.
pub struct GdilDilation(PassiveDilation);
/// Opaque beamsplitter normal form handle.
pub struct GdilNormalForm(NormalForm);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let cleaned: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap();
    });
}

fn fail(err: &Error) -> GdilStatus {
    set_error(&err.to_string());
    match err {
        Error::NotDilatable(_) | Error::NotMinimal(_) => GdilStatus::NotDilatable,
        Error::InvalidChannel(_) | Error::InvalidState(_) => GdilStatus::InvalidChannel,
        Error::EigenFailure | Error::SvdFailure => GdilStatus::NumericalFailure,
        _ => GdilStatus::InvalidArgument,
    }
}

fn invalid(message: &str) -> GdilStatus {
    set_error(message);
    GdilStatus::InvalidArgument
}

unsafe fn tolerance_from(ptr: *const GdilTolerance) -> Tolerance {
    if ptr.is_null() {
        Tolerance::default()
    } else {
        let t = &*ptr;
        Tolerance {
            rel: t.rel.max(0.0),
            abs: t.abs.max(0.0),
        }
    }
}

unsafe fn matrix_from(ptr: *const f64, rows: usize, cols: usize) -> Option<RealMatrix> {
    if ptr.is_null() && rows * cols > 0 {
        return None;
    }
    let mut m = RealMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = *ptr.add(i * cols + j);
        }
    }
    Some(m)
}

unsafe fn matrix_into(m: &RealMatrix, out: *mut f64, len: usize) -> GdilStatus {
    let needed = m.nrows() * m.ncols();
    if out.is_null() && needed > 0 {
        return invalid("output buffer is null");
    }
    if len < needed {
        return invalid("output buffer too small");
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            *out.add(i * m.ncols() + j) = m[(i, j)];
        }
    }
    GdilStatus::Ok
}

/// Message describing the most recent failure on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gdil_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a channel from row-major `2n × 2n` matrices `X` and `Y` in blocked
/// ordering. The CP condition is validated.
///
/// # Safety
/// `x` and `y` must point to `4n²` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gdil_channel_new(
    n: usize,
    x: *const f64,
    y: *const f64,
    tol: *const GdilTolerance,
    out: *mut *mut GdilChannel,
) -> GdilStatus {
    if out.is_null() || n == 0 {
        return invalid("null output pointer or zero modes");
    }
    let dim = 2 * n;
    let (Some(xm), Some(ym)) = (matrix_from(x, dim, dim), matrix_from(y, dim, dim)) else {
        return invalid("null matrix pointer");
    };
    match GaussianChannel::new(xm, ym, &tolerance_from(tol)) {
        Ok(channel) => {
            *out = Box::into_raw(Box::new(GdilChannel(channel)));
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `channel` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gdil_channel_free(channel: *mut GdilChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// # Safety
/// `channel` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gdil_channel_modes(channel: *const GdilChannel) -> usize {
    if channel.is_null() {
        return 0;
    }
    (*channel).0.modes()
}

/// Evaluates the dilatability conditions at `env_modes` environment modes.
///
/// # Safety
/// `channel` must be a live handle; `report` must be valid if non-null.
#[no_mangle]
pub unsafe extern "C" fn gdil_check_dilatable(
    channel: *const GdilChannel,
    env_modes: usize,
    tol: *const GdilTolerance,
    report: *mut GdilDilatability,
) -> GdilStatus {
    if channel.is_null() {
        return invalid("null channel");
    }
    match check_dilatable(&(*channel).0, Some(env_modes), &tolerance_from(tol)) {
        Ok(r) => {
            if !report.is_null() {
                *report = GdilDilatability {
                    psd_ok: r.psd_ok,
                    commutes_ok: r.commutes_ok,
                    kernel_ok: r.kernel_ok,
                    dilatable: r.overall,
                    min_modes: r.min_modes,
                    rank_y: r.rank_y,
                    sigma_hat_min_eigenvalue: r.sigma_hat_min_eigenvalue,
                    commutator_norm: r.commutator_norm,
                };
            }
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Minimal environment mode count `½·rank Y` of a dilatable channel.
///
/// # Safety
/// `channel` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdil_minimal_modes(
    channel: *const GdilChannel,
    tol: *const GdilTolerance,
    out: *mut usize,
) -> GdilStatus {
    if channel.is_null() || out.is_null() {
        return invalid("null pointer");
    }
    match minimal_modes(&(*channel).0, &tolerance_from(tol)) {
        Ok(l) => {
            *out = l;
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Reports whether a dilatable channel is passive (`[Y, σ] = 0`).
///
/// # Safety
/// `channel` must be live; `passive` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdil_channel_is_passive(
    channel: *const GdilChannel,
    tol: *const GdilTolerance,
    passive: *mut bool,
) -> GdilStatus {
    if channel.is_null() || passive.is_null() {
        return invalid("null pointer");
    }
    match is_passive_channel(&(*channel).0, &tolerance_from(tol)) {
        Ok(p) => {
            *passive = p;
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Constructs a passive dilation with `env_modes` environment modes.
///
/// # Safety
/// `channel` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdil_construct_dilation(
    channel: *const GdilChannel,
    env_modes: usize,
    tol: *const GdilTolerance,
    out: *mut *mut GdilDilation,
) -> GdilStatus {
    if channel.is_null() || out.is_null() {
        return invalid("null pointer");
    }
    match construct_dilation(&(*channel).0, env_modes, &tolerance_from(tol)) {
        Ok(d) => {
            *out = Box::into_raw(Box::new(GdilDilation(d)));
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `dilation` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gdil_dilation_free(dilation: *mut GdilDilation) {
    if !dilation.is_null() {
        drop(Box::from_raw(dilation));
    }
}

/// # Safety
/// `dilation` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gdil_dilation_sys_modes(dilation: *const GdilDilation) -> usize {
    if dilation.is_null() {
        return 0;
    }
    (*dilation).0.sys_modes()
}

/// # Safety
/// `dilation` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gdil_dilation_env_modes(dilation: *const GdilDilation) -> usize {
    if dilation.is_null() {
        return 0;
    }
    (*dilation).0.env_modes()
}

/// Copies the `2(n+l) × 2(n+l)` orthogonal symplectic matrix into `out`
/// (row-major, `len` doubles available).
///
/// # Safety
/// `dilation` must be live; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gdil_dilation_unitary(
    dilation: *const GdilDilation,
    out: *mut f64,
    len: usize,
) -> GdilStatus {
    if dilation.is_null() {
        return invalid("null dilation");
    }
    matrix_into((*dilation).0.s(), out, len)
}

/// Copies the `2l × 2l` environment covariance into `out`.
///
/// # Safety
/// `dilation` must be live; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gdil_dilation_env_covariance(
    dilation: *const GdilDilation,
    out: *mut f64,
    len: usize,
) -> GdilStatus {
    if dilation.is_null() {
        return invalid("null dilation");
    }
    matrix_into((*dilation).0.gamma_env(), out, len)
}

/// Verifies a dilation against a channel; a failing verification is reported
/// through `verification.valid = false`, not an error status.
///
/// # Safety
/// Both handles must be live; `verification` must be valid if non-null.
#[no_mangle]
pub unsafe extern "C" fn gdil_verify_dilation(
    channel: *const GdilChannel,
    dilation: *const GdilDilation,
    tol: *const GdilTolerance,
    verification: *mut GdilVerification,
) -> GdilStatus {
    if channel.is_null() || dilation.is_null() {
        return invalid("null pointer");
    }
    match verify_dilation(&(*channel).0, &(*dilation).0, &tolerance_from(tol)) {
        Ok(v) => {
            if !verification.is_null() {
                *verification = GdilVerification {
                    valid: v.is_valid,
                    symplectic_equation_residual: v.symplectic_equation_residual,
                    orthogonal_equation_residual: v.orthogonal_equation_residual,
                    noise_equation_residual: v.noise_equation_residual,
                    s1_residual: v.s1_residual,
                    membership_residual: v
                        .membership
                        .orthogonality_residual
                        .max(v.membership.symplecticity_residual),
                    env_min_eigenvalue: v.env_min_eigenvalue,
                    action_residual: v.action_residual,
                };
            }
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Computes the beamsplitter normal form of a dilatable channel.
///
/// # Safety
/// `channel` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form(
    channel: *const GdilChannel,
    tol: *const GdilTolerance,
    out: *mut *mut GdilNormalForm,
) -> GdilStatus {
    if channel.is_null() || out.is_null() {
        return invalid("null pointer");
    }
    match compute_normal_form(&(*channel).0, &tolerance_from(tol)) {
        Ok(nf) => {
            *out = Box::into_raw(Box::new(GdilNormalForm(nf)));
            GdilStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `normal_form` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form_free(normal_form: *mut GdilNormalForm) {
    if !normal_form.is_null() {
        drop(Box::from_raw(normal_form));
    }
}

/// # Safety
/// `normal_form` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form_modes(normal_form: *const GdilNormalForm) -> usize {
    if normal_form.is_null() {
        return 0;
    }
    (*normal_form).0.modes()
}

/// Copies the `n` transmissivities (sorted descending) into `out`.
///
/// # Safety
/// `normal_form` must be live; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form_lambdas(
    normal_form: *const GdilNormalForm,
    out: *mut f64,
    len: usize,
) -> GdilStatus {
    if normal_form.is_null() {
        return invalid("null normal form");
    }
    let lambdas = (*normal_form).0.lambdas();
    if out.is_null() || len < lambdas.len() {
        return invalid("output buffer too small");
    }
    for (i, &l) in lambdas.iter().enumerate() {
        *out.add(i) = l;
    }
    GdilStatus::Ok
}

/// Copies the output-side passive factor `G` (`2n × 2n`, blocked) into `out`.
///
/// # Safety
/// `normal_form` must be live; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form_factor_g(
    normal_form: *const GdilNormalForm,
    out: *mut f64,
    len: usize,
) -> GdilStatus {
    if normal_form.is_null() {
        return invalid("null normal form");
    }
    matrix_into((*normal_form).0.g().matrix(), out, len)
}

/// Copies the input-side passive factor `F` (`2n × 2n`, blocked) into `out`.
///
/// # Safety
/// `normal_form` must be live; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form_factor_f(
    normal_form: *const GdilNormalForm,
    out: *mut f64,
    len: usize,
) -> GdilStatus {
    if normal_form.is_null() {
        return invalid("null normal form");
    }
    matrix_into((*normal_form).0.f().matrix(), out, len)
}

/// Copies the rotated environment covariance `γ̃_E` (`2n × 2n`) into `out`.
///
/// # Safety
/// `normal_form` must be live; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gdil_normal_form_env_covariance(
    normal_form: *const GdilNormalForm,
    out: *mut f64,
    len: usize,
) -> GdilStatus {
    if normal_form.is_null() {
        return invalid("null normal form");
    }
    matrix_into((*normal_form).0.gamma_env(), out, len)
}

/// Draws a seeded random dilatable channel together with its ground-truth
/// dilation. Both outputs are optional; pass NULL to skip either.
///
/// # Safety
/// Non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gdil_random_dilatable_channel(
    sys_modes: usize,
    env_modes: usize,
    passive_env: bool,
    seed: u64,
    channel_out: *mut *mut GdilChannel,
    dilation_out: *mut *mut GdilDilation,
) -> GdilStatus {
    if sys_modes == 0 || env_modes == 0 {
        return invalid("mode counts must be positive");
    }
    let (channel, dilation) = random_dilatable_channel(sys_modes, env_modes, passive_env, seed);
    if !channel_out.is_null() {
        *channel_out = Box::into_raw(Box::new(GdilChannel(channel)));
    }
    if !dilation_out.is_null() {
        *dilation_out = Box::into_raw(Box::new(GdilDilation(dilation)));
    }
    GdilStatus::Ok
}
