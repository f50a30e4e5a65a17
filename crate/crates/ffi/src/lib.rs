//! C ABI over `propscore`.
//!
//! Objects are exposed as opaque handles created by `*_new` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PsStatus`]; on failure a description is available from
//! [`ps_last_error_message`] until the next failing call on the same thread.
//! Vectors are passed as `(pointer, length)` and must match the size of the
//! measure space.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use propscore::hyvarinen::{fisher_entropy, hyvarinen_score, GridDensity, PeriodicGrid};
use propscore::{bregman_divergence, catalog_entropy, make_psr, score_divergence, ConeVector, Density, Entropy, Error, MeasureSpace, ScoringRule};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    Dimension = 2,
    Domain = 3,
    InvalidArgument = 4,
    Panic = 5,
}

/// Finite measure space.
pub struct PsMeasureSpace(MeasureSpace);

/// Convex entropy with value and subgradient oracles.
pub struct PsEntropy(Entropy);

/// Scoring rule.
pub struct PsRule(ScoringRule);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PsStatus {
    match err {
        Error::Dimension { .. } | Error::SpaceMismatch => PsStatus::Dimension,
        Error::Domain(_) | Error::Precondition(_) => PsStatus::Domain,
        Error::InvalidParameter(_) | Error::UnknownName(_) | Error::Construction(_) => PsStatus::InvalidArgument,
    }
}

struct Failure(PsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(PsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(PsStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(PsStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_slice(out: *mut f64, values: &[f64]) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(PsStatus::NullPointer, "output buffer is null".into()));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn cone(space: &MeasureSpace, p: *const f64, n: usize, what: &str) -> Result<ConeVector, Failure> {
    Ok(ConeVector::new(space, slice(p, n, what)?.to_vec())?)
}

unsafe fn density(space: &MeasureSpace, p: *const f64, n: usize, what: &str) -> Result<Density, Failure> {
    Ok(Density::new(space, slice(p, n, what)?.to_vec())?)
}

/// Message for the most recent failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn ps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create a measure space with the given positive weights.
#[no_mangle]
pub unsafe extern "C" fn ps_measure_space_new(weights: *const f64, n: usize, out: *mut *mut PsMeasureSpace) -> PsStatus {
    guard(|| {
        let w = slice(weights, n, "weights")?.to_vec();
        let space = MeasureSpace::new(w)?;
        write_out(out, Box::into_raw(Box::new(PsMeasureSpace(space))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_measure_space_size(space: *const PsMeasureSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.size())
}

#[no_mangle]
pub unsafe extern "C" fn ps_measure_space_free(space: *mut PsMeasureSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Catalog entropy by name (`quadratic`, `spherical`, `shannon`, `power`,
/// `pseudospherical`, `weighted_quadratic`) with its parameters.
#[no_mangle]
pub unsafe extern "C" fn ps_entropy_new(name: *const c_char, params: *const f64, nparams: usize, out: *mut *mut PsEntropy) -> PsStatus {
    guard(|| {
        let name = deref(name, "name")?;
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Failure(PsStatus::InvalidArgument, "name is not UTF-8".into()))?;
        let entropy = catalog_entropy(name, slice(params, nparams, "params")?)?;
        write_out(out, Box::into_raw(Box::new(PsEntropy(entropy))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_entropy_free(entropy: *mut PsEntropy) {
    if !entropy.is_null() {
        drop(Box::from_raw(entropy));
    }
}

/// `Φ(q)`.
#[no_mangle]
pub unsafe extern "C" fn ps_entropy_value(entropy: *const PsEntropy, space: *const PsMeasureSpace, q: *const f64, n: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let (e, s) = (deref(entropy, "entropy")?, deref(space, "space")?);
        let v = e.0.value(&cone(&s.0, q, n, "q")?)?;
        write_out(out, v)
    })
}

/// A subgradient `Φ*(q)`, written to `out[0..n]`.
#[no_mangle]
pub unsafe extern "C" fn ps_entropy_subgradient(entropy: *const PsEntropy, space: *const PsMeasureSpace, q: *const f64, n: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let (e, s) = (deref(entropy, "entropy")?, deref(space, "space")?);
        let g = e.0.subgradient(&cone(&s.0, q, n, "q")?)?;
        write_slice(out, g.values())
    })
}

/// `D(p, q) = Φ(p) − (p−q)·Φ*(q) − Φ(q)`.
#[no_mangle]
pub unsafe extern "C" fn ps_bregman_divergence(
    entropy: *const PsEntropy,
    space: *const PsMeasureSpace,
    p: *const f64,
    q: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    guard(|| {
        let (e, s) = (deref(entropy, "entropy")?, deref(space, "space")?);
        let d = bregman_divergence(&e.0, &cone(&s.0, p, n, "p")?, &cone(&s.0, q, n, "q")?)?;
        write_out(out, d)
    })
}

/// Scoring rule generated by an entropy. The entropy handle may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn ps_rule_new(entropy: *const PsEntropy, out: *mut *mut PsRule) -> PsStatus {
    guard(|| {
        let e = deref(entropy, "entropy")?;
        write_out(out, Box::into_raw(Box::new(PsRule(make_psr(&e.0)))))
    })
}

/// The improper rule `S(q) = q`, useful as a negative control.
#[no_mangle]
pub unsafe extern "C" fn ps_rule_linear(out: *mut *mut PsRule) -> PsStatus {
    guard(|| write_out(out, Box::into_raw(Box::new(PsRule(ScoringRule::linear())))))
}

#[no_mangle]
pub unsafe extern "C" fn ps_rule_free(rule: *mut PsRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// `S(q)` for a density `q`, written to `out[0..n]`; may contain `-inf`.
#[no_mangle]
pub unsafe extern "C" fn ps_rule_score(rule: *const PsRule, space: *const PsMeasureSpace, q: *const f64, n: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let (r, s) = (deref(rule, "rule")?, deref(space, "space")?);
        let score = r.0.score(&density(&s.0, q, n, "q")?)?;
        write_slice(out, score.values())
    })
}

/// `p·S(p) − p·S(q)` for densities; `+inf` when `q` scores `-inf` where `p` has mass.
#[no_mangle]
pub unsafe extern "C" fn ps_score_divergence(
    rule: *const PsRule,
    space: *const PsMeasureSpace,
    p: *const f64,
    q: *const f64,
    n: usize,
    out: *mut f64,
) -> PsStatus {
    guard(|| {
        let (r, s) = (deref(rule, "rule")?, deref(space, "space")?);
        let d = score_divergence(&r.0, &density(&s.0, p, n, "p")?, &density(&s.0, q, n, "q")?)?;
        write_out(out, d)
    })
}

unsafe fn grid_density(values: *const f64, n: usize) -> Result<GridDensity, Failure> {
    let grid = PeriodicGrid::new(n)?;
    Ok(GridDensity::new(&grid, slice(values, n, "values")?.to_vec())?)
}

/// Hyvärinen score of positive grid values on the unit periodic grid with `n` points.
#[no_mangle]
pub unsafe extern "C" fn ps_hyvarinen_score(values: *const f64, n: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let q = grid_density(values, n)?;
        write_slice(out, hyvarinen_score(&q).values())
    })
}

/// Fisher entropy `Σ q g² h` of positive grid values.
#[no_mangle]
pub unsafe extern "C" fn ps_fisher_entropy(values: *const f64, n: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let q = grid_density(values, n)?;
        write_out(out, fisher_entropy(&q))
    })
}
