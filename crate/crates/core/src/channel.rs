//! SNR and capacity arithmetic, and validated channel configurations.
//!
//! All gains are linear SNRs `h^2 P / N`; decibels only appear at I/O
//! boundaries through [`db_to_linear`] and [`linear_to_db`].

use serde::Serialize;

use crate::error::{Error, Result};

/// A rate in bits per channel use.
pub type Rate = f64;

/// Capacity of a complex Gaussian channel, `log2(1 + gamma)`.
pub fn cap(gamma: f64) -> Result<Rate> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::Domain(format!("capacity needs a finite SNR >= 0, got {gamma}")));
    }
    Ok(c(gamma))
}

/// Unchecked `log2(1 + x)` for values already known to be valid.
#[inline]
pub(crate) fn c(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

pub fn db_to_linear(snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::Domain(format!("SNR in dB must be finite, got {snr_db}")));
    }
    Ok(10f64.powf(snr_db / 10.0))
}

/// Inverse of [`db_to_linear`]. Zero maps to negative infinity.
pub fn linear_to_db(snr: f64) -> Result<f64> {
    if !snr.is_finite() || snr < 0.0 {
        return Err(Error::Domain(format!("linear SNR must be finite and >= 0, got {snr}")));
    }
    Ok(10.0 * snr.log10())
}

/// The three link SNRs of the relay network: a–r, b–r and the direct a–b link.
///
/// Instances built by [`validate_gains`] satisfy `gamma3 <= gamma1 <= gamma2`.
/// [`ChannelGains::mirrored`] relabels a and b and may break `gamma1 <= gamma2`;
/// the bound formulas do not depend on that ordering, only CoMABC checks it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelGains {
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    swapped: bool,
}

impl ChannelGains {
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn gamma3(&self) -> f64 {
        self.gamma3
    }

    /// True when the roles of a and b were exchanged relative to the caller's input.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Build from decibel values, then validate.
    pub fn from_db(g1_db: f64, g2_db: f64, g3_db: f64, auto_swap: bool) -> Result<Self> {
        validate_gains(db_to_linear(g1_db)?, db_to_linear(g2_db)?, db_to_linear(g3_db)?, auto_swap)
    }

    /// The same channel with nodes a and b relabelled (gamma1 and gamma2 exchanged).
    pub fn mirrored(&self) -> Self {
        ChannelGains { gamma1: self.gamma2, gamma2: self.gamma1, gamma3: self.gamma3, swapped: !self.swapped }
    }

    /// True when `gamma3 <= gamma1 <= gamma2` holds.
    pub fn is_ordered(&self) -> bool {
        self.gamma3 <= self.gamma1 && self.gamma1 <= self.gamma2
    }

    /// Capacity terms shared by every bound and protocol.
    pub fn capacities(&self) -> Capacities {
        let (g1, g2, g3) = (self.gamma1, self.gamma2, self.gamma3);
        Capacities {
            c1: c(g1),
            c2: c(g2),
            c3: c(g3),
            c13: c(g1 + g3),
            c23: c(g2 + g3),
            c12: c(g1 + g2),
            coh1: c((g1.sqrt() + g3.sqrt()).powi(2)),
            coh2: c((g2.sqrt() + g3.sqrt()).powi(2)),
        }
    }
}

/// Validate three linear SNRs against `gamma3 <= gamma1 <= gamma2`.
///
/// With `auto_swap`, an input with `g1 > g2` is relabelled (a and b exchanged)
/// and the returned gains carry `swapped() == true` so results can be mirrored
/// back. Without it the violation is an error naming the inequality.
pub fn validate_gains(g1: f64, g2: f64, g3: f64, auto_swap: bool) -> Result<ChannelGains> {
    for (name, g) in [("gamma1", g1), ("gamma2", g2), ("gamma3", g3)] {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::Validation(format!("{name} must be finite and >= 0, got {g}")));
        }
    }
    let (g1, g2, swapped) = if g1 > g2 {
        if !auto_swap {
            return Err(Error::Validation(format!(
                "gamma1 > gamma2 ({g1} > {g2}); relabel the nodes or enable auto-swap"
            )));
        }
        (g2, g1, true)
    } else {
        (g1, g2, false)
    };
    if g3 > g1 {
        return Err(Error::Validation(format!("gamma3 > gamma1 ({g3} > {g1}); the direct link must be the weakest")));
    }
    Ok(ChannelGains { gamma1: g1, gamma2: g2, gamma3: g3, swapped })
}

/// Precomputed `C(.)` values for a channel.
///
/// `coh1 = C((sqrt(g1) + sqrt(g3))^2)` is the coherent-combining capacity of
/// relay and b towards a; `coh2` the same towards b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacities {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c13: f64,
    pub c23: f64,
    pub c12: f64,
    pub coh1: f64,
    pub coh2: f64,
}
