//! Rays from the origin of the `(Ra, Rb)` plane.

use serde::Serialize;

use crate::error::{Error, Result};

/// A ray `Ra = k * Rb`, or the `Ra` axis itself (`Rb = 0`, the `k -> inf` limit).
///
/// Angles are measured from the `Rb` axis, so `k = tan(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Ray {
    Ratio(f64),
    RaAxis,
}

impl Ray {
    pub fn ratio(k: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::Parameter(format!("ray ratio must be finite and >= 0, got {k}")));
        }
        Ok(Ray::Ratio(k))
    }

    /// The ray at `theta_deg` degrees from the `Rb` axis, for `theta_deg` in `[0, 90]`.
    ///
    /// 45 degrees maps to exactly `k = 1` and 90 degrees to [`Ray::RaAxis`].
    pub fn from_theta_deg(theta_deg: f64) -> Result<Self> {
        if !(0.0..=90.0).contains(&theta_deg) {
            return Err(Error::Parameter(format!("ray angle {theta_deg} outside [0, 90]")));
        }
        Ok(if theta_deg == 90.0 {
            Ray::RaAxis
        } else if theta_deg == 45.0 {
            Ray::Ratio(1.0)
        } else if theta_deg == 0.0 {
            Ray::Ratio(0.0)
        } else {
            Ray::Ratio(theta_deg.to_radians().tan())
        })
    }

    pub fn theta_deg(&self) -> f64 {
        match *self {
            Ray::RaAxis => 90.0,
            Ray::Ratio(1.0) => 45.0,
            Ray::Ratio(k) => k.atan().to_degrees(),
        }
    }

    /// `Ra / Rb`; infinite on the `Ra` axis.
    pub fn k(&self) -> f64 {
        match *self {
            Ray::Ratio(k) => k,
            Ray::RaAxis => f64::INFINITY,
        }
    }

    /// Direction `(da, db)` with `Ra = da * t`, `Rb = db * t`.
    ///
    /// For finite ratios `db = 1`, so the scale `t` is `Rb` itself.
    pub fn direction(&self) -> (f64, f64) {
        match *self {
            Ray::Ratio(k) => (k, 1.0),
            Ray::RaAxis => (1.0, 0.0),
        }
    }

    /// The ray obtained by exchanging the roles of `Ra` and `Rb`.
    pub fn mirrored(&self) -> Ray {
        match *self {
            Ray::RaAxis => Ray::Ratio(0.0),
            Ray::Ratio(0.0) => Ray::RaAxis,
            Ray::Ratio(k) => Ray::Ratio(1.0 / k),
        }
    }
}

impl From<f64> for Ray {
    fn from(k: f64) -> Self {
        Ray::Ratio(k)
    }
}
