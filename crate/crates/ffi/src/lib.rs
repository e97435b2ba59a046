//! C ABI over the `wodzicki` library.
//!
//! Objects are opaque heap handles created by `wz_*_new`-style functions and
//! released with the matching `wz_*_free`. Every fallible call returns a
//! [`WzStatus`]; on failure the message is available from
//! [`wz_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use num_complex::Complex64;
use wodzicki::cli::{run_task, Modulation, RunConfig, Task};
use wodzicki::groups::{GroupModel, QuadratureRule};
use wodzicki::residue::wodzicki_residue;
use wodzicki::symbols::{MatrixSymbol, SymbolField};
use wodzicki::weakl1::{estimate_slope, sum_series, TraceMode};
use wodzicki::zeta::{zeta_residue, zeta_trace};
use wodzicki::{Error, Flag};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WzStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericalFailure = 2,
    BudgetExceeded = 3,
    NullPointer = 4,
    Panic = 5,
    Utf8 = 6,
    Config = 7,
    Io = 8,
}

pub const WZ_FLAG_NON_CLASSICAL: u32 = 1 << 0;
pub const WZ_FLAG_COMPONENT_MISSING: u32 = 1 << 1;
pub const WZ_FLAG_FOUR_PART_MISMATCH: u32 = 1 << 2;
pub const WZ_FLAG_HIGHER_ORDER_POLE: u32 = 1 << 3;
pub const WZ_FLAG_BUDGET_EXCEEDED: u32 = 1 << 4;
pub const WZ_FLAG_CROSS_CHECK_DISAGREEMENT: u32 = 1 << 5;
pub const WZ_FLAG_UNRELIABLE: u32 = 1 << 6;

/// Opaque group handle.
pub struct WzGroup(GroupModel);
/// Opaque symbol handle.
pub struct WzSymbol(MatrixSymbol);
/// Opaque quadrature-rule handle.
pub struct WzQuadrature(Arc<QuadratureRule>);
/// Opaque symbol-field handle.
pub struct WzField(SymbolField);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct WzSlope {
    pub value: f64,
    pub error_bar: f64,
    pub fit_residual: f64,
    pub non_classical: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct WzZetaSample {
    pub re: f64,
    pub im: f64,
    pub truncation_cutoff: f64,
    pub tail_bound: f64,
}

/// Complex estimate with an error bar and a `WZ_FLAG_*` bit set.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct WzEstimate {
    pub re: f64,
    pub im: f64,
    pub error_bar: f64,
    pub flags: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WzTraceMode {
    AbsTrace = 0,
    SignedRe = 1,
    SignedIm = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> WzStatus {
    match e {
        Error::InvalidArgument(_) => WzStatus::InvalidArgument,
        Error::NumericalFailure(_) => WzStatus::NumericalFailure,
        Error::BudgetExceeded(_) => WzStatus::BudgetExceeded,
        Error::Io(_) => WzStatus::Io,
        Error::Config(_) => WzStatus::Config,
    }
}

struct Failure(WzStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(WzStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> WzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WzStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside wodzicki");
            WzStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn cstr<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(WzStatus::Utf8, format!("{what}: {e}")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn flag_bits(flags: &[Flag]) -> u32 {
    flags
        .iter()
        .map(|f| match f {
            Flag::NonClassical => WZ_FLAG_NON_CLASSICAL,
            Flag::ComponentMissing => WZ_FLAG_COMPONENT_MISSING,
            Flag::FourPartMismatch => WZ_FLAG_FOUR_PART_MISMATCH,
            Flag::HigherOrderPole => WZ_FLAG_HIGHER_ORDER_POLE,
            Flag::BudgetExceeded => WZ_FLAG_BUDGET_EXCEEDED,
            Flag::CrossCheckDisagreement => WZ_FLAG_CROSS_CHECK_DISAGREEMENT,
            Flag::Unreliable => WZ_FLAG_UNRELIABLE,
        })
        .fold(0, |a, b| a | b)
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next `wz_*` call on the same thread.
#[no_mangle]
pub extern "C" fn wz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Torus Tⁿ, n in 1..=3.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_group_torus(n: c_int, out: *mut *mut WzGroup) -> WzStatus {
    guard(|| {
        let n = usize::try_from(n).map_err(|_| Failure(WzStatus::InvalidArgument, format!("torus rank {n}")))?;
        let g = GroupModel::torus(n)?;
        write_out(out, boxed(WzGroup(g)))
    })
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_group_su2(out: *mut *mut WzGroup) -> WzStatus {
    guard(|| write_out(out, boxed(WzGroup(GroupModel::su2()))))
}

/// Manifold dimension n, or 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wz_group_manifold_dim(group: *const WzGroup) -> c_int {
    group.as_ref().map_or(0, |g| g.0.manifold_dim() as c_int)
}

/// # Safety
/// `group` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wz_group_free(group: *mut WzGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// σ(ξ) = (re + i·im)·⟨ξ⟩^alpha·I.
///
/// # Safety
/// `group` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_symbol_weight_power(
    group: *const WzGroup,
    re: f64,
    im: f64,
    alpha: f64,
    out: *mut *mut WzSymbol,
) -> WzStatus {
    guard(|| {
        let g = deref(group, "group")?;
        let s = MatrixSymbol::weight_power(g.0, Complex64::new(re, im), alpha)?;
        write_out(out, boxed(WzSymbol(s)))
    })
}

/// ±⟨ξ⟩^alpha diagonal test symbol.
///
/// # Safety
/// `group` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_symbol_diag_signed(group: *const WzGroup, alpha: f64, out: *mut *mut WzSymbol) -> WzStatus {
    guard(|| {
        let g = deref(group, "group")?;
        let s = MatrixSymbol::diag_signed(g.0, alpha)?;
        write_out(out, boxed(WzSymbol(s)))
    })
}

/// # Safety
/// `a`, `b` must be live handles and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_symbol_add(a: *const WzSymbol, b: *const WzSymbol, out: *mut *mut WzSymbol) -> WzStatus {
    guard(|| {
        let s = deref(a, "a")?.0.add(&deref(b, "b")?.0)?;
        write_out(out, boxed(WzSymbol(s)))
    })
}

/// # Safety
/// `a` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_symbol_scale(a: *const WzSymbol, re: f64, im: f64, out: *mut *mut WzSymbol) -> WzStatus {
    guard(|| {
        let s = deref(a, "a")?.0.scale(Complex64::new(re, im));
        write_out(out, boxed(WzSymbol(s)))
    })
}

/// # Safety
/// `sym` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wz_symbol_free(sym: *mut WzSymbol) {
    if !sym.is_null() {
        drop(Box::from_raw(sym));
    }
}

/// Haar quadrature with the given resolution per coordinate.
///
/// # Safety
/// `group` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_quadrature_new(
    group: *const WzGroup,
    resolution: usize,
    out: *mut *mut WzQuadrature,
) -> WzStatus {
    guard(|| {
        let q = deref(group, "group")?.0.haar_quadrature(resolution)?;
        write_out(out, boxed(WzQuadrature(Arc::new(q))))
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `quad` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wz_quadrature_len(quad: *const WzQuadrature) -> usize {
    quad.as_ref().map_or(0, |q| q.0.len())
}

/// # Safety
/// `quad` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wz_quadrature_free(quad: *mut WzQuadrature) {
    if !quad.is_null() {
        drop(Box::from_raw(quad));
    }
}

/// x-independent field equal to `sym` at every node. The degree is the
/// symbol's declared order.
///
/// # Safety
/// `sym`, `quad` must be live handles and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_field_invariant(
    sym: *const WzSymbol,
    quad: *const WzQuadrature,
    out: *mut *mut WzField,
) -> WzStatus {
    guard(|| {
        let s = deref(sym, "symbol")?.0.clone();
        let f = SymbolField::invariant(s, deref(quad, "quadrature")?.0.clone())?;
        write_out(out, boxed(WzField(f)))
    })
}

unsafe fn modulated(
    m: Modulation,
    sym: *const WzSymbol,
    quad: *const WzQuadrature,
    out: *mut *mut WzField,
) -> Result<(), Failure> {
    let s = &deref(sym, "symbol")?.0;
    let q = deref(quad, "quadrature")?.0.clone();
    let f = SymbolField::modulated(|p| m.eval(p), s, q, s.envelope().order)?;
    write_out(out, boxed(WzField(f)))
}

/// a(x)·σ with a(x) = Σ_k coeffs[k]·cos(k·(x₁+…+x_n)) on a torus.
///
/// # Safety
/// Handles must be live, `coeffs` readable for `len` doubles and `out`
/// valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_field_fourier(
    sym: *const WzSymbol,
    quad: *const WzQuadrature,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut WzField,
) -> WzStatus {
    guard(|| {
        let coefficients = slice(coeffs, len, "coefficients")?.to_vec();
        modulated(Modulation::Fourier { coefficients }, sym, quad, out)
    })
}

/// a(x)·σ with a(x) = Σ_k coeffs[k]·T_k(cos(θ/2)) on SU(2).
///
/// # Safety
/// Handles must be live, `coeffs` readable for `len` doubles and `out`
/// valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn wz_field_class_poly(
    sym: *const WzSymbol,
    quad: *const WzQuadrature,
    coeffs: *const f64,
    len: usize,
    out: *mut *mut WzField,
) -> WzStatus {
    guard(|| {
        let coefficients = slice(coeffs, len, "coefficients")?.to_vec();
        modulated(Modulation::ClassPoly { coefficients }, sym, quad, out)
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wz_field_free(field: *mut WzField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Weak-ℓ¹ slope of the partial sums of `sym` over an increasing cutoff
/// schedule.
///
/// # Safety
/// `sym` must be a live handle, `schedule` readable for `len` doubles and
/// `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wz_weakl1_slope(
    sym: *const WzSymbol,
    mode: WzTraceMode,
    schedule: *const f64,
    len: usize,
    out: *mut WzSlope,
) -> WzStatus {
    guard(|| {
        let mode = match mode {
            WzTraceMode::AbsTrace => TraceMode::AbsTrace,
            WzTraceMode::SignedRe => TraceMode::SignedRe,
            WzTraceMode::SignedIm => TraceMode::SignedIm,
        };
        let series = sum_series(&deref(sym, "symbol")?.0, slice(schedule, len, "schedule")?, mode)?;
        let e = estimate_slope(&series)?;
        write_out(
            out,
            WzSlope {
                value: e.value,
                error_bar: e.error_bar,
                fit_residual: e.fit_residual,
                non_classical: e.non_classical,
            },
        )
    })
}

/// f(−s) = Σ d_ξ Tr σ(ξ) ⟨ξ⟩^{−s} with tail completion.
///
/// # Safety
/// `sym` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wz_zeta_trace(sym: *const WzSymbol, s: f64, tol: f64, out: *mut WzZetaSample) -> WzStatus {
    guard(|| {
        let z = zeta_trace(&deref(sym, "symbol")?.0, s, tol)?;
        write_out(
            out,
            WzZetaSample {
                re: z.value.re,
                im: z.value.im,
                truncation_cutoff: z.truncation_cutoff,
                tail_bound: z.tail_bound,
            },
        )
    })
}

/// Residue of the zeta trace at z = 0 from a decreasing s schedule.
///
/// # Safety
/// `sym` must be a live handle, `s` readable for `len` doubles and `out`
/// valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wz_zeta_residue(
    sym: *const WzSymbol,
    s: *const f64,
    len: usize,
    tol: f64,
    out: *mut WzEstimate,
) -> WzStatus {
    guard(|| {
        let z = zeta_residue(&deref(sym, "symbol")?.0, slice(s, len, "s schedule")?, tol)?;
        write_out(
            out,
            WzEstimate { re: z.value.re, im: z.value.im, error_bar: z.error_bar, flags: flag_bits(&z.flags) },
        )
    })
}

/// Wodzicki residue of a field of degree −n.
///
/// # Safety
/// `field` must be a live handle, `schedule` readable for `len` doubles and
/// `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wz_residue(
    field: *const WzField,
    schedule: *const f64,
    len: usize,
    out: *mut WzEstimate,
) -> WzStatus {
    guard(|| {
        let r = wodzicki_residue(&deref(field, "field")?.0, slice(schedule, len, "schedule")?)?;
        write_out(
            out,
            WzEstimate {
                re: r.residue.re,
                im: r.residue.im,
                error_bar: r.total_error_bar,
                flags: flag_bits(&r.flags),
            },
        )
    })
}

/// Runs a JSON run configuration for `task` ("residue", "weakl1", "zeta" or
/// "sweep"; NULL uses the config's own task). On success `*report_json`
/// receives the report (free with [`wz_string_free`]) and `*exit_code` the
/// CLI exit code. Sweep CSV output is not returned.
///
/// # Safety
/// `config_json` must be a NUL-terminated string, `task` null or
/// NUL-terminated, and both out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wz_run_config_json(
    config_json: *const c_char,
    task: *const c_char,
    report_json: *mut *mut c_char,
    exit_code: *mut c_int,
) -> WzStatus {
    guard(|| {
        if report_json.is_null() || exit_code.is_null() {
            return Err(null("output pointer"));
        }
        let mut cfg = RunConfig::from_json(cstr(config_json, "config")?)?;
        if !task.is_null() {
            let t = match cstr(task, "task")? {
                "residue" => Task::Residue,
                "weakl1" => Task::Weakl1,
                "zeta" => Task::Zeta,
                "sweep" => Task::Sweep,
                other => return Err(Failure(WzStatus::Config, format!("unknown task '{other}'"))),
            };
            cfg = cfg.with_task(t)?;
        }
        let out = run_task(&cfg)?;
        let text = CString::new(out.report.to_json())
            .map_err(|e| Failure(WzStatus::NumericalFailure, e.to_string()))?;
        report_json.write(text.into_raw());
        exit_code.write(out.report.exit_code());
        Ok(())
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
