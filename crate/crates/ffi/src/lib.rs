//! C ABI over `moyal_vortex`.
//!
//! Fields and grids are opaque handles owned by the caller and released with
//! the matching `*_free`. Every fallible call returns an [`MvStatus`]; on
//! failure [`mv_last_error`] returns a message for the calling thread. Complex
//! data crosses the boundary as interleaved `(re, im)` doubles in row-major
//! order, rows indexing `y`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use moyal_vortex::ansatz::{build_ansatz, fit_ansatz, winding_number, VortexParams};
use moyal_vortex::exact_states::phi_n;
use moyal_vortex::moyal::{energy, star, star_cubic, MoyalParams};
use moyal_vortex::pde::step;
use moyal_vortex::reduced::{amplitude_width, fixed_points, pn_potential, LatticeVariant, Stability};
use moyal_vortex::spectral::{power, Complex, ComplexField2D, GridSpec};
use moyal_vortex::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GridMismatch = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvVariant {
    Charge1Quadratic = 0,
    ChargemEquispaced = 1,
}

impl From<MvVariant> for LatticeVariant {
    fn from(v: MvVariant) -> Self {
        match v {
            MvVariant::Charge1Quadratic => LatticeVariant::Charge1Quadratic,
            MvVariant::ChargemEquispaced => LatticeVariant::ChargemEquispaced,
        }
    }
}

/// Coherent-state vortex parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvVortexParams {
    pub a: f64,
    pub omega: f64,
    pub radius: f64,
    pub velocity: f64,
    pub sigma: f64,
    pub m: u32,
}

/// Opaque uniform grid.
pub struct MvGrid(GridSpec);

/// Opaque complex field on a grid.
pub struct MvField(ComplexField2D);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> MvStatus {
    match e {
        Error::InvalidGrid(_) | Error::InvalidParameter { .. } | Error::DomainTooSmall { .. } | Error::ZeroField => {
            MvStatus::InvalidArgument
        }
        Error::GridMismatch | Error::LandauMismatch(_) => MvStatus::GridMismatch,
        _ => MvStatus::Numerical,
    }
}

struct Fail(MvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MvStatus::NullPointer, format!("{what} is null"))
}

// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MvStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MvStatus::Panic
        }
    }
}

unsafe fn grid_ref<'a>(g: *const MvGrid) -> Result<&'a GridSpec, Fail> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("grid"))
}

unsafe fn field_ref<'a>(f: *const MvField) -> Result<&'a ComplexField2D, Fail> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| null("field"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_field(out: *mut *mut MvField, f: ComplexField2D) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(MvField(f))))
}

fn theta(t: f64) -> Result<MoyalParams, Fail> {
    Ok(MoyalParams::new(t)?)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mv_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Creates an `n × n` grid on `[-half_width, half_width)²`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_grid_new(n: usize, half_width: f64, out: *mut *mut MvGrid) -> MvStatus {
    guard(|| put(out, Box::into_raw(Box::new(MvGrid(GridSpec::new(n, half_width)?)))))
}

/// # Safety
/// `grid` must come from [`mv_grid_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mv_grid_free(grid: *mut MvGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `field` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mv_field_free(field: *mut MvField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Copies `len = 2 n²` interleaved doubles into a new field.
///
/// # Safety
/// `data` must be valid for `len` reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_field_from_interleaved(
    grid: *const MvGrid,
    data: *const f64,
    len: usize,
    out: *mut *mut MvField,
) -> MvStatus {
    guard(|| {
        let g = *grid_ref(grid)?;
        if data.is_null() {
            return Err(null("data"));
        }
        if len != 2 * g.len() {
            return Err(Fail(MvStatus::InvalidArgument, format!("expected {} doubles, got {len}", 2 * g.len())));
        }
        let raw = std::slice::from_raw_parts(data, len);
        let values = raw.chunks_exact(2).map(|c| Complex::new(c[0], c[1])).collect();
        put_field(out, ComplexField2D::new(g, values)?)
    })
}

/// Writes the field as `2 n²` interleaved doubles into `out[..capacity]`.
///
/// # Safety
/// `out` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn mv_field_to_interleaved(field: *const MvField, out: *mut f64, capacity: usize) -> MvStatus {
    guard(|| {
        let f = field_ref(field)?;
        let need = 2 * f.values().len();
        if out.is_null() {
            return Err(null("output buffer"));
        }
        if capacity < need {
            return Err(Fail(MvStatus::BufferTooSmall, format!("need {need} doubles, have {capacity}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(f.values()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Side length `n` of the field's grid.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_field_grid_n(field: *const MvField, out: *mut usize) -> MvStatus {
    guard(|| put(out, field_ref(field)?.grid().n()))
}

/// The projector symbol `φₙ` at Θ = 1.
///
/// # Safety
/// `grid` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_phi_n(grid: *const MvGrid, n: usize, out: *mut *mut MvField) -> MvStatus {
    guard(|| put_field(out, phi_n(n, *grid_ref(grid)?)))
}

/// # Safety
/// `grid` must be a live handle, `params` readable and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_ansatz_build(
    grid: *const MvGrid,
    params: *const MvVortexParams,
    out: *mut *mut MvField,
) -> MvStatus {
    guard(|| {
        let g = *grid_ref(grid)?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let vp = VortexParams::new(p.a, p.omega, p.radius, p.velocity, p.sigma, p.m)?;
        put_field(out, build_ansatz(&vp, g)?)
    })
}

/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_ansatz_fit(field: *const MvField, out: *mut MvVortexParams) -> MvStatus {
    guard(|| {
        let p = fit_ansatz(field_ref(field)?)?.params;
        put(
            out,
            MvVortexParams { a: p.a, omega: p.omega, radius: p.radius, velocity: p.velocity, sigma: p.sigma, m: p.m },
        )
    })
}

/// `u ⋆ v` at the given Θ.
///
/// # Safety
/// `u`, `v` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_star(u: *const MvField, v: *const MvField, theta_: f64, out: *mut *mut MvField) -> MvStatus {
    guard(|| put_field(out, star(field_ref(u)?, field_ref(v)?, theta(theta_)?)?))
}

/// `u ⋆ ū ⋆ u` at the given Θ.
///
/// # Safety
/// `u` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_star_cubic(u: *const MvField, theta_: f64, out: *mut *mut MvField) -> MvStatus {
    guard(|| put_field(out, star_cubic(field_ref(u)?, theta(theta_)?)?))
}

/// `∫|u|² dx`.
///
/// # Safety
/// `u` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_power(u: *const MvField, out: *mut f64) -> MvStatus {
    guard(|| put(out, power(field_ref(u)?)))
}

/// Model energy at the given Θ.
///
/// # Safety
/// `u` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_energy(u: *const MvField, theta_: f64, out: *mut f64) -> MvStatus {
    guard(|| put(out, energy(field_ref(u)?, theta(theta_)?)?))
}

/// One integrating-factor RK4 step of length `dt`.
///
/// # Safety
/// `u` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_nls_step(u: *const MvField, dt: f64, theta_: f64, out: *mut *mut MvField) -> MvStatus {
    guard(|| put_field(out, step(field_ref(u)?, dt, theta(theta_)?)?))
}

/// Winding number on the circle of radius `r0`.
///
/// # Safety
/// `u` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_winding_number(u: *const MvField, r0: f64, out: *mut i32) -> MvStatus {
    guard(|| put(out, winding_number(field_ref(u)?, r0)?))
}

/// Peierls–Nabarro potential `F(R)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_pn_potential(
    r: f64,
    omega: f64,
    v: f64,
    theta_: f64,
    variant: MvVariant,
    out: *mut f64,
) -> MvStatus {
    guard(|| put(out, pn_potential(r, omega, v, theta(theta_)?, variant.into())?))
}

/// Amplitude–width relation `a(ω)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mv_amplitude_width(omega: f64, theta_: f64, out: *mut f64) -> MvStatus {
    guard(|| put(out, amplitude_width(omega, theta(theta_)?)?))
}

/// The first `n_max` fixed-point radii into `radii[..n_max]`, with
/// `stable[i]` set to 1 for stable points and 0 otherwise.
///
/// # Safety
/// `radii` and `stable` must be valid for `n_max` writes.
#[no_mangle]
pub unsafe extern "C" fn mv_fixed_points(
    theta_: f64,
    n_max: usize,
    variant: MvVariant,
    radii: *mut f64,
    stable: *mut u8,
) -> MvStatus {
    guard(|| {
        if radii.is_null() || stable.is_null() {
            return Err(null("output buffer"));
        }
        let fps = fixed_points(theta(theta_)?, n_max, variant.into())?;
        let r = std::slice::from_raw_parts_mut(radii, n_max);
        let s = std::slice::from_raw_parts_mut(stable, n_max);
        for (i, fp) in fps.iter().enumerate() {
            r[i] = fp.radius;
            s[i] = u8::from(fp.stability == Stability::Stable);
        }
        Ok(())
    })
}
