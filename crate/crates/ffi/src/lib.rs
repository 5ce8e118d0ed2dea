//! C ABI for the p-harmonic annulus minimizer library.
//!
//! Conventions: every function returns a [`PhStatus`]; results come back
//! through out-pointers. Heap objects are opaque handles created by a
//! `_new`/`_solve` call and released by the matching `_free`. Passing a null
//! pointer where a value is required yields `PH_STATUS_NULL_POINTER`; no
//! function panics across the boundary.

use pharmonic::counterexample::{e1_energy, e_energy, EpsMap};
use pharmonic::curve::{b_energy, PolygonalCurve};
use pharmonic::geometry::{AnnulusPair, Exponent};
use pharmonic::modulus::{classify, modulus_mp, ModulusMap, Regime};
use pharmonic::radial::{identity_energy, solve_profile, RadialMinimizer};
use pharmonic::{Error, ExtReal};
use std::ffi::{c_char, c_double};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status code returned by every ABI function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    /// A parameter is outside its documented domain.
    InvalidArgument = 1,
    /// The instance has no minimizer (p = 1, target too thick).
    NoMinimizer = 2,
    /// The query applies to a different phase regime.
    RegimeMismatch = 3,
    /// A required pointer was null.
    NullPointer = 4,
    /// Internal numerical failure.
    InternalError = 5,
}

/// Phase regime of an annulus pair.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhRegime {
    Homeomorphic = 0,
    Collapsed = 1,
    NoMinimizer = 2,
}

impl From<Regime> for PhRegime {
    fn from(r: Regime) -> PhRegime {
        match r {
            Regime::Homeomorphic => PhRegime::Homeomorphic,
            Regime::Collapsed => PhRegime::Collapsed,
            Regime::NoMinimizer => PhRegime::NoMinimizer,
        }
    }
}

fn status_of(e: &Error) -> PhStatus {
    match e {
        Error::NoMinimizer => PhStatus::NoMinimizer,
        Error::RegimeMismatch { .. } => PhStatus::RegimeMismatch,
        Error::QuadratureNonConvergence { .. } | Error::BracketFailure(..) => {
            PhStatus::InternalError
        }
        _ => PhStatus::InvalidArgument,
    }
}

/// Runs `body` with panics converted to `PH_STATUS_INTERNAL_ERROR`.
fn guarded(body: impl FnOnce() -> PhStatus) -> PhStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(PhStatus::InternalError)
}

/// A solved radial minimizer (opaque).
pub struct PhMinimizer {
    inner: RadialMinimizer,
}

/// The free-boundary construction at one parameter value (opaque).
pub struct PhEpsMap {
    inner: EpsMap,
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ph_status_message(status: PhStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        PhStatus::Ok => b"ok\0",
        PhStatus::InvalidArgument => b"invalid argument\0",
        PhStatus::NoMinimizer => b"no minimizer exists for this instance\0",
        PhStatus::RegimeMismatch => b"query does not apply to this phase regime\0",
        PhStatus::NullPointer => b"required pointer was null\0",
        PhStatus::InternalError => b"internal numerical failure\0",
    };
    s.as_ptr() as *const c_char
}

/// Classify the annulus pair `A(r, R) -> A(r_star, R_star)` at exponent `p`.
///
/// `out_collapse_radius` receives the normalized collapse radius in the
/// collapsed regime and NaN otherwise; it may be null when not wanted.
#[no_mangle]
pub unsafe extern "C" fn ph_classify(
    p: c_double,
    r: c_double,
    big_r: c_double,
    r_star: c_double,
    big_r_star: c_double,
    out_regime: *mut PhRegime,
    out_collapse_radius: *mut c_double,
) -> PhStatus {
    if out_regime.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| {
        let run = || -> pharmonic::Result<(PhRegime, f64)> {
            let a = AnnulusPair::new(r, big_r, r_star, big_r_star)?;
            let rep = classify(&a, Exponent::new(p)?)?;
            Ok((rep.regime.into(), rep.collapse_radius_r0.unwrap_or(f64::NAN)))
        };
        match run() {
            Ok((regime, r0)) => {
                *out_regime = regime;
                if !out_collapse_radius.is_null() {
                    *out_collapse_radius = r0;
                }
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// The critical modulus `m_p(x)` for a finite ratio `x >= 1`; the result may
/// be `+inf` when `p = 1` diverges, reported as the C infinity.
#[no_mangle]
pub unsafe extern "C" fn ph_modulus(p: c_double, x: c_double, out: *mut c_double) -> PhStatus {
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| {
        let run = || -> pharmonic::Result<f64> {
            let m = modulus_mp(Exponent::new(p)?, ExtReal::Finite(x))?;
            Ok(m.finite().unwrap_or(f64::INFINITY))
        };
        match run() {
            Ok(v) => {
                *out = v;
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Inverse critical modulus `m_p^{-1}(y)` for `y >= 1`.
#[no_mangle]
pub unsafe extern "C" fn ph_modulus_inverse(
    p: c_double,
    y: c_double,
    out: *mut c_double,
) -> PhStatus {
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| {
        let run = || -> pharmonic::Result<f64> {
            let map = ModulusMap::new(Exponent::new(p)?)?;
            let x = map.m_inverse(ExtReal::Finite(y))?;
            Ok(x.finite().unwrap_or(f64::INFINITY))
        };
        match run() {
            Ok(v) => {
                *out = v;
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Closed-form identity energy `2^{p/2} pi (1 - r^2)` on `A(r, 1)`.
#[no_mangle]
pub unsafe extern "C" fn ph_identity_energy(
    p: c_double,
    r: c_double,
    out: *mut c_double,
) -> PhStatus {
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| match Exponent::new(p) {
        Ok(pe) if (0.0..1.0).contains(&r) => {
            *out = identity_energy(pe, r);
            PhStatus::Ok
        }
        Ok(_) => PhStatus::InvalidArgument,
        Err(e) => status_of(&e),
    })
}

/// Solve the minimizing radial profile on the normalized instance
/// `A(r, 1) -> A(r_star, 1)`; the handle must be released with
/// `ph_minimizer_free`.
#[no_mangle]
pub unsafe extern "C" fn ph_minimizer_solve(
    p: c_double,
    r: c_double,
    r_star: c_double,
    out: *mut *mut PhMinimizer,
) -> PhStatus {
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| {
        let run = || -> pharmonic::Result<RadialMinimizer> {
            let a = AnnulusPair::new(r, 1.0, r_star, 1.0)?;
            solve_profile(&a, Exponent::new(p)?)
        };
        match run() {
            Ok(m) => {
                *out = Box::into_raw(Box::new(PhMinimizer { inner: m }));
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a minimizer handle; null is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn ph_minimizer_free(h: *mut PhMinimizer) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Energy of the solved minimizer.
#[no_mangle]
pub unsafe extern "C" fn ph_minimizer_energy(
    h: *const PhMinimizer,
    out: *mut c_double,
) -> PhStatus {
    if h.is_null() || out.is_null() {
        return PhStatus::NullPointer;
    }
    *out = (*h).inner.energy;
    PhStatus::Ok
}

/// Phase regime of the solved minimizer.
#[no_mangle]
pub unsafe extern "C" fn ph_minimizer_regime(
    h: *const PhMinimizer,
    out: *mut PhRegime,
) -> PhStatus {
    if h.is_null() || out.is_null() {
        return PhStatus::NullPointer;
    }
    *out = (*h).inner.regime.into();
    PhStatus::Ok
}

/// Collapse radius of a collapsed minimizer; `PH_STATUS_REGIME_MISMATCH`
/// in the homeomorphic regime.
#[no_mangle]
pub unsafe extern "C" fn ph_minimizer_collapse_radius(
    h: *const PhMinimizer,
    out: *mut c_double,
) -> PhStatus {
    if h.is_null() || out.is_null() {
        return PhStatus::NullPointer;
    }
    match (*h).inner.collapse_radius {
        Some(r0) => {
            *out = r0;
            PhStatus::Ok
        }
        None => PhStatus::RegimeMismatch,
    }
}

/// Profile value `H0(s)` of the solved minimizer.
#[no_mangle]
pub unsafe extern "C" fn ph_minimizer_eval(
    h: *const PhMinimizer,
    s: c_double,
    out: *mut c_double,
) -> PhStatus {
    if h.is_null() || out.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| match (*h).inner.profile.eval(s) {
        Ok(v) => {
            *out = v;
            PhStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Build the free-boundary construction at parameter `eps` in (0, 1/4);
/// release with `ph_eps_map_free`.
#[no_mangle]
pub unsafe extern "C" fn ph_eps_map_new(eps: c_double, out: *mut *mut PhEpsMap) -> PhStatus {
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    guarded(|| match EpsMap::new(eps) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(PhEpsMap { inner: m }));
            PhStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Release an eps-map handle; null is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn ph_eps_map_free(h: *mut PhEpsMap) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Image of the point `s e^{i theta}` in target polar coordinates.
#[no_mangle]
pub unsafe extern "C" fn ph_eps_map_eval(
    h: *const PhEpsMap,
    s: c_double,
    theta: c_double,
    out_rho: *mut c_double,
    out_alpha: *mut c_double,
) -> PhStatus {
    if h.is_null() || out_rho.is_null() || out_alpha.is_null() {
        return PhStatus::NullPointer;
    }
    if !(s > 0.0 && s < 1.0) || !theta.is_finite() {
        return PhStatus::InvalidArgument;
    }
    let (rho, alpha) = (*h).inner.eval(s, theta);
    *out_rho = rho;
    *out_alpha = alpha;
    PhStatus::Ok
}

/// The simplified energy `e` and the full energy `E_1` of the construction,
/// by tensor quadrature with `panels` subdivisions per smooth cell.
#[no_mangle]
pub unsafe extern "C" fn ph_eps_map_energies(
    h: *const PhEpsMap,
    panels: usize,
    out_e: *mut c_double,
    out_e1: *mut c_double,
) -> PhStatus {
    if h.is_null() || out_e.is_null() || out_e1.is_null() {
        return PhStatus::NullPointer;
    }
    if panels == 0 {
        return PhStatus::InvalidArgument;
    }
    guarded(|| {
        *out_e = e_energy(&(*h).inner, panels);
        *out_e1 = e1_energy(&(*h).inner, panels);
        PhStatus::Ok
    })
}

/// Curve energy `B` of a closed polygon given as `n` interleaved (x, y)
/// vertex coordinates in the closed unit disk, evaluated at `quad_points`
/// parameter samples (at least `n`).
#[no_mangle]
pub unsafe extern "C" fn ph_curve_b_energy(
    xy: *const c_double,
    n: usize,
    quad_points: usize,
    out: *mut c_double,
) -> PhStatus {
    if xy.is_null() || out.is_null() {
        return PhStatus::NullPointer;
    }
    if n == 0 || quad_points < n {
        return PhStatus::InvalidArgument;
    }
    guarded(|| {
        let flat = std::slice::from_raw_parts(xy, 2 * n);
        let vertices: Vec<[f64; 2]> = flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        match PolygonalCurve::new(vertices) {
            Ok(c) => {
                *out = b_energy(&c, quad_points);
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
