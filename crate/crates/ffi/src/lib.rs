//! C ABI for the `twrc` toolkit.
//!
//! Every function returns a [`TwrcStatus`] and writes results through out
//! pointers. On failure a message is available from
//! [`twrc_last_error_message`] on the same thread. Channels and regions are
//! opaque handles that must be released with their `_free` function.
//!
//! Rays are given by the ratio `k = Ra / Rb`; pass `INFINITY` for the `Ra`
//! axis. Results are reported in the labelling of the handle's gains: when a
//! handle was built with auto-swap and had to exchange nodes a and b,
//! [`twrc_gains_get`] reports `swapped = true`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twrc::cli::Curve;
use twrc::outer;
use twrc::{ChannelGains, Error, Protocol, Ray, Region};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwrcStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Channel gains violate the ordering or range rules.
    Validation = 2,
    /// The LP engine failed.
    Solver = 3,
    Io = 4,
    /// An argument such as a ratio, weight or grid size was out of range.
    Parameter = 5,
    /// A scalar was outside a function's domain.
    Domain = 6,
    /// Regions on different channels were compared.
    Comparison = 7,
    /// An index was past the end of a region.
    OutOfRange = 8,
    /// Internal panic; the library state is unaffected.
    Panic = 99,
}

/// Protocol selector for [`twrc_protocol_boundary`] and [`twrc_region_sweep`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwrcCurve {
    Outer = 0,
    OuterAnalytic = 1,
    Mabc = 2,
    Tdbc = 3,
    Hbc = 4,
    SixStateDf = 5,
    SixState = 6,
    Comabc = 7,
}

impl TwrcCurve {
    fn curve(self) -> Curve {
        match self {
            TwrcCurve::Outer => Curve::Outer,
            TwrcCurve::OuterAnalytic => Curve::OuterAnalytic,
            TwrcCurve::Mabc => Curve::Protocol(Protocol::Mabc),
            TwrcCurve::Tdbc => Curve::Protocol(Protocol::Tdbc),
            TwrcCurve::Hbc => Curve::Protocol(Protocol::Hbc),
            TwrcCurve::SixStateDf => Curve::Protocol(Protocol::SixStateDf),
            TwrcCurve::SixState => Curve::Protocol(Protocol::SixState),
            TwrcCurve::Comabc => Curve::Protocol(Protocol::CoMabc),
        }
    }
}

/// One boundary point of a swept region.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwrcPoint {
    pub theta_deg: f64,
    /// `Ra / Rb`; infinite on the `Ra` axis.
    pub k: f64,
    pub ra: f64,
    pub rb: f64,
}

/// Direct-link thresholds in linear SNR; NaN when not defined for the channel.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwrcThresholds {
    pub gamma30: f64,
    pub gamma31: f64,
    pub gamma32: f64,
    /// `gamma30` for equal gains, otherwise the smaller of the other two.
    pub operative: f64,
}

/// Opaque validated channel.
pub struct TwrcGains(ChannelGains);

/// Opaque swept region.
pub struct TwrcRegion(Region);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> TwrcStatus {
    match err {
        Error::Validation(_) | Error::Parse { .. } => TwrcStatus::Validation,
        Error::Solver { .. } | Error::UnexpectedStatus { .. } => TwrcStatus::Solver,
        Error::Io { .. } => TwrcStatus::Io,
        Error::Parameter(_) => TwrcStatus::Parameter,
        Error::Domain(_) => TwrcStatus::Domain,
        Error::Comparison(_) => TwrcStatus::Comparison,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    OutOfRange(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> TwrcStatus {
    let result = catch_unwind(AssertUnwindSafe(f));
    let (status, msg) = match result {
        Ok(Ok(())) => (TwrcStatus::Ok, String::new()),
        Ok(Err(Failure::Lib(e))) => (status_of(&e), e.to_string()),
        Ok(Err(Failure::Null(name))) => (TwrcStatus::NullPointer, format!("{name} is NULL")),
        Ok(Err(Failure::OutOfRange(m))) => (TwrcStatus::OutOfRange, m),
        Err(payload) => {
            let m = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (TwrcStatus::Panic, format!("internal panic: {m}"))
        }
    };
    set_error(msg);
    status
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn gains<'a>(p: *const TwrcGains) -> Result<&'a ChannelGains, Failure> {
    p.as_ref().map(|g| &g.0).ok_or(Failure::Null("gains"))
}

fn ray(k: f64) -> Result<Ray, Failure> {
    if k == f64::INFINITY {
        Ok(Ray::RaAxis)
    } else if k.is_finite() && k >= 0.0 {
        Ok(Ray::Ratio(k))
    } else {
        Err(Error::Parameter(format!("ratio k must be >= 0 or INFINITY, got {k}")).into())
    }
}

/// Message describing the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn twrc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `log2(1 + gamma)`.
///
/// # Safety
/// `out_rate` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_cap(gamma: f64, out_rate: *mut f64) -> TwrcStatus {
    guard(|| {
        *out(out_rate, "out_rate")? = twrc::cap(gamma)?;
        Ok(())
    })
}

/// Convert decibels to a linear SNR.
///
/// # Safety
/// `out_linear` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_db_to_linear(snr_db: f64, out_linear: *mut f64) -> TwrcStatus {
    guard(|| {
        *out(out_linear, "out_linear")? = twrc::db_to_linear(snr_db)?;
        Ok(())
    })
}

/// Validate linear SNRs (`gamma3 <= gamma1 <= gamma2`) and return a handle.
///
/// # Safety
/// `out_gains` must be NULL or valid for writes. The handle must be released
/// with [`twrc_gains_free`].
#[no_mangle]
pub unsafe extern "C" fn twrc_gains_new(
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    auto_swap: bool,
    out_gains: *mut *mut TwrcGains,
) -> TwrcStatus {
    guard(|| {
        let slot = out(out_gains, "out_gains")?;
        let g = twrc::validate_gains(gamma1, gamma2, gamma3, auto_swap)?;
        *slot = Box::into_raw(Box::new(TwrcGains(g)));
        Ok(())
    })
}

/// As [`twrc_gains_new`] with the SNRs in decibels.
///
/// # Safety
/// Same as [`twrc_gains_new`].
#[no_mangle]
pub unsafe extern "C" fn twrc_gains_from_db(
    gamma1_db: f64,
    gamma2_db: f64,
    gamma3_db: f64,
    auto_swap: bool,
    out_gains: *mut *mut TwrcGains,
) -> TwrcStatus {
    guard(|| {
        let slot = out(out_gains, "out_gains")?;
        let g = ChannelGains::from_db(gamma1_db, gamma2_db, gamma3_db, auto_swap)?;
        *slot = Box::into_raw(Box::new(TwrcGains(g)));
        Ok(())
    })
}

/// Read back the stored linear gains. Any out pointer may be NULL.
///
/// # Safety
/// `gains` must be a live handle; non-NULL out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_gains_get(
    gains_h: *const TwrcGains,
    out_gamma1: *mut f64,
    out_gamma2: *mut f64,
    out_gamma3: *mut f64,
    out_swapped: *mut bool,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        if let Some(p) = out_gamma1.as_mut() {
            *p = g.gamma1();
        }
        if let Some(p) = out_gamma2.as_mut() {
            *p = g.gamma2();
        }
        if let Some(p) = out_gamma3.as_mut() {
            *p = g.gamma3();
        }
        if let Some(p) = out_swapped.as_mut() {
            *p = g.swapped();
        }
        Ok(())
    })
}

/// Release a gains handle. NULL is ignored.
///
/// # Safety
/// `gains` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twrc_gains_free(gains_h: *mut TwrcGains) {
    if !gains_h.is_null() {
        drop(Box::from_raw(gains_h));
    }
}

/// Numerical outer bound on the ray `Ra = k * Rb`. `out_lambda` may be NULL;
/// otherwise it receives the six state time shares.
///
/// # Safety
/// `gains` must be a live handle; `out_ra`, `out_rb` valid for writes;
/// `out_lambda` NULL or valid for six writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_outer_ratio_bound(
    gains_h: *const TwrcGains,
    k: f64,
    out_ra: *mut f64,
    out_rb: *mut f64,
    out_lambda: *mut f64,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        let ra = out(out_ra, "out_ra")?;
        let rb = out(out_rb, "out_rb")?;
        let p = outer::outer_ratio_bound(ray(k)?, g)?;
        *ra = p.ra;
        *rb = p.rb;
        if !out_lambda.is_null() {
            ptr::copy_nonoverlapping(p.shares.lambda().as_ptr(), out_lambda, 6);
        }
        Ok(())
    })
}

/// Numerical maximum of `wa * Ra + wb * Rb` over the outer bound.
///
/// # Safety
/// `gains` must be a live handle; out pointers valid for writes (`out_ra` and
/// `out_rb` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn twrc_outer_weighted_bound(
    gains_h: *const TwrcGains,
    wa: f64,
    wb: f64,
    out_value: *mut f64,
    out_ra: *mut f64,
    out_rb: *mut f64,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        let value = out(out_value, "out_value")?;
        let p = outer::outer_weighted_bound(wa, wb, g)?;
        *value = p.value;
        if let Some(r) = out_ra.as_mut() {
            *r = p.ra;
        }
        if let Some(r) = out_rb.as_mut() {
            *r = p.rb;
        }
        Ok(())
    })
}

/// Closed-form upper bound on `Rb` along `Ra = k * Rb`, `k > 0`.
///
/// # Safety
/// `gains` must be a live handle; `out_rb` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_analytic_rb_bound(gains_h: *const TwrcGains, k: f64, out_rb: *mut f64) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        *out(out_rb, "out_rb")? = outer::analytic_rb_bound(k, g)?;
        Ok(())
    })
}

/// Closed-form upper bound on `k * Ra + Rb`, `k >= 0`.
///
/// # Safety
/// `gains` must be a live handle; `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_analytic_weighted_bound(
    gains_h: *const TwrcGains,
    k: f64,
    out_value: *mut f64,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        *out(out_value, "out_value")? = outer::analytic_weighted_bound(k, g)?;
        Ok(())
    })
}

/// Largest one-way rates: `Rb` with `Ra = 0` and `Ra` with `Rb = 0`.
/// Either out pointer may be NULL.
///
/// # Safety
/// `gains` must be a live handle; non-NULL out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_one_way_bound(
    gains_h: *const TwrcGains,
    out_rb: *mut f64,
    out_ra: *mut f64,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        if let Some(r) = out_rb.as_mut() {
            *r = outer::one_way_bound(g);
        }
        if let Some(r) = out_ra.as_mut() {
            *r = outer::one_way_bound_ra(g);
        }
        Ok(())
    })
}

/// Check the closed-form dual point for `k >= 1`: feasibility and the
/// smallest constraint slack.
///
/// # Safety
/// `gains` must be a live handle; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_dual_point_feasible(
    gains_h: *const TwrcGains,
    k: f64,
    out_feasible: *mut bool,
    out_min_slack: *mut f64,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        let feasible = out(out_feasible, "out_feasible")?;
        let slack = out(out_min_slack, "out_min_slack")?;
        let (f, s) = outer::dual_point_feasible(k, g)?;
        *feasible = f;
        *slack = s;
        Ok(())
    })
}

/// Direct-link SNR thresholds above which the outer bound gains nothing from
/// a stronger direct link. The stored `gamma3` is ignored.
///
/// # Safety
/// `gains` must be a live handle; `out_thresholds` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_capacity_thresholds(
    gains_h: *const TwrcGains,
    out_thresholds: *mut TwrcThresholds,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        let dst = out(out_thresholds, "out_thresholds")?;
        let t = outer::capacity_thresholds(g)?;
        *dst = TwrcThresholds {
            gamma30: t.gamma30.unwrap_or(f64::NAN),
            gamma31: t.gamma31.unwrap_or(f64::NAN),
            gamma32: t.gamma32.unwrap_or(f64::NAN),
            operative: t.operative().unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Boundary point of a protocol (or bound) on the ray `Ra = k * Rb`.
/// `alpha_grid` is only used by the 6-state DF protocol.
///
/// # Safety
/// `gains` must be a live handle; `out_point` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_protocol_boundary(
    gains_h: *const TwrcGains,
    curve: TwrcCurve,
    k: f64,
    alpha_grid: usize,
    out_point: *mut TwrcPoint,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        let dst = out(out_point, "out_point")?;
        let r = ray(k)?;
        let (ra, rb) = match curve.curve() {
            Curve::Outer => {
                let p = outer::outer_ratio_bound(r, g)?;
                (p.ra, p.rb)
            }
            Curve::OuterAnalytic => {
                let rb = match r {
                    Ray::RaAxis => 0.0,
                    Ray::Ratio(0.0) => outer::one_way_bound(g),
                    Ray::Ratio(k) => outer::analytic_rb_bound(k, g)?,
                };
                let ra = match r {
                    Ray::RaAxis => outer::one_way_bound_ra(g),
                    Ray::Ratio(k) => k * rb,
                };
                (ra, rb)
            }
            Curve::Protocol(p) => {
                let b = p.boundary(r, g, alpha_grid)?;
                (b.ra, b.rb)
            }
        };
        *dst = TwrcPoint { theta_deg: r.theta_deg(), k: r.k(), ra, rb };
        Ok(())
    })
}

/// Sweep a region over `theta_points` rays (at least 3).
///
/// # Safety
/// `gains` must be a live handle; `out_region` valid for writes. The region
/// must be released with [`twrc_region_free`].
#[no_mangle]
pub unsafe extern "C" fn twrc_region_sweep(
    gains_h: *const TwrcGains,
    curve: TwrcCurve,
    theta_points: usize,
    alpha_grid: usize,
    out_region: *mut *mut TwrcRegion,
) -> TwrcStatus {
    guard(|| {
        let g = gains(gains_h)?;
        let slot = out(out_region, "out_region")?;
        let region = curve.curve().sweep(g, theta_points, alpha_grid)?;
        *slot = Box::into_raw(Box::new(TwrcRegion(region)));
        Ok(())
    })
}

/// Number of swept points, ordered by angle from the `Rb` axis.
///
/// # Safety
/// `region` must be a live handle; `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_region_len(region: *const TwrcRegion, out_len: *mut usize) -> TwrcStatus {
    guard(|| {
        let r = region.as_ref().ok_or(Failure::Null("region"))?;
        *out(out_len, "out_len")? = r.0.points().len();
        Ok(())
    })
}

/// Swept point at `index`.
///
/// # Safety
/// `region` must be a live handle; `out_point` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_region_point(
    region: *const TwrcRegion,
    index: usize,
    out_point: *mut TwrcPoint,
) -> TwrcStatus {
    guard(|| {
        let r = region.as_ref().ok_or(Failure::Null("region"))?;
        let dst = out(out_point, "out_point")?;
        let points = r.0.points();
        let p = points
            .get(index)
            .ok_or_else(|| Failure::OutOfRange(format!("index {index} out of range for {} points", points.len())))?;
        *dst = TwrcPoint { theta_deg: p.ray.theta_deg(), k: p.ray.k(), ra: p.ra, rb: p.rb };
        Ok(())
    })
}

/// Largest `R` with `(R, R)` inside the region.
///
/// # Safety
/// `region` must be a live handle; `out_rate` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn twrc_region_symmetric_rate(region: *const TwrcRegion, out_rate: *mut f64) -> TwrcStatus {
    guard(|| {
        let r = region.as_ref().ok_or(Failure::Null("region"))?;
        *out(out_rate, "out_rate")? = r.0.symmetric_rate();
        Ok(())
    })
}

/// Release a region handle. NULL is ignored.
///
/// # Safety
/// `region` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twrc_region_free(region: *mut TwrcRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}
