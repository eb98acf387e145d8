//! Standard-normal innovation density: score, CDF, upper quantile and the
//! moments `I_j = E[eps^j M_f(eps)^2]` entering tau^2.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Absolute tolerance on the quantile root.
pub const QUANTILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMoments {
    /// `E[M_f(eps)^2]`
    pub i0: f64,
    /// `E[eps M_f(eps)^2]`
    pub i1: f64,
    /// `E[eps^2 M_f(eps)^2]`
    pub i2: f64,
}

impl NoiseMoments {
    pub fn new(i0: f64, i1: f64, i2: f64) -> Result<Self> {
        if !(i0 > 0.0) || !i1.is_finite() || !i2.is_finite() || !i0.is_finite() {
            return Err(Error::Domain(format!(
                "noise moments require finite values with i0 > 0, got ({i0}, {i1}, {i2})"
            )));
        }
        Ok(Self { i0, i1, i2 })
    }
}

/// Moments of the standard normal: `M_f(eps)^2 = eps^2`, so
/// `(I_0, I_1, I_2) = (E eps^2, E eps^3, E eps^4) = (1, 0, 3)`.
pub fn gaussian_noise_moments() -> NoiseMoments {
    NoiseMoments {
        i0: 1.0,
        i1: 0.0,
        i2: 3.0,
    }
}

/// Score `f'(x)/f(x)` of the standard normal density, i.e. `-x`.
pub fn score_mf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("score of non-finite value {x}")));
    }
    Ok(-x)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal CDF. The tail on the far side of zero is evaluated
/// directly through `erfc`, so `normal_cdf(-x)` keeps full relative
/// precision deep into the lower tail.
pub fn normal_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 - 0.5 * erfc(x / SQRT_2)
    } else {
        0.5 * erfc(-x / SQRT_2)
    }
}

/// Upper tail `1 - Phi(x)`.
pub fn normal_sf(x: f64) -> f64 {
    normal_cdf(-x)
}

/// `Z(alpha)`: the `(1 - alpha)`-quantile of the standard normal.
///
/// Found by bisection on the CDF (on the upper tail for `alpha < 1/2` so
/// small levels keep their precision), to an absolute root tolerance of
/// [`QUANTILE_TOL`].
pub fn normal_quantile(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("quantile level {alpha} outside (0, 1)")));
    }
    // g is increasing in x with a single root.
    let g = |x: f64| {
        if alpha < 0.5 {
            alpha - normal_sf(x)
        } else {
            normal_cdf(x) - (1.0 - alpha)
        }
    };
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
