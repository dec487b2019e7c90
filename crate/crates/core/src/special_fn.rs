//! Scalar standard-normal primitives.
//!
//! The distribution function is evaluated through `erfc`, which keeps full
//! relative accuracy in both tails. For arguments below `-10` the log-space
//! variants switch to a continued fraction for the Mills ratio so that
//! `log Φ` and `φ/Φ` stay finite long after `Φ` itself underflows.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `1/√(2π)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// `√(2/π)`, the Cheeger constant of the standard Gaussian.
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument the log-space routines use the Mills-ratio continued fraction.
const DEEP_TAIL: f64 = -10.0;

/// A measure value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("probability {value} outside [0, 1]")))
        }
    }

    /// Clamps to `[0, 1]`; for values produced by sums of probabilities that
    /// may overshoot by one ulp.
    pub(crate) fn saturating(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!("non-finite argument {x}")))
    }
}

/// Standard normal density, unchecked.
#[inline]
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `log φ(x)`.
#[inline]
pub fn log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal distribution function, unchecked.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)`, computed without cancellation.
#[inline]
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Mills ratio `(1 - Φ(t)) / φ(t)` for `t ≥ 10` by backward evaluation of
/// `1/(t + 1/(t + 2/(t + 3/(t + ...))))`.
fn mills_ratio_upper(t: f64) -> f64 {
    let mut tail = 0.0;
    for k in (1..=40).rev() {
        tail = k as f64 / (t + tail);
    }
    1.0 / (t + tail)
}

/// `log Φ(x)`, accurate for all finite `x`.
pub fn log_cdf(x: f64) -> f64 {
    if x < DEEP_TAIL {
        log_pdf(x) + mills_ratio_upper(-x).ln()
    } else if x > 0.0 {
        (-sf(x)).ln_1p()
    } else {
        cdf(x).ln()
    }
}

/// `log(1 - Φ(x))`.
pub fn log_sf(x: f64) -> f64 {
    log_cdf(-x)
}

/// Lower-tail hazard `φ(x)/Φ(x)`, stable for `x ≪ 0`.
pub fn cdf_hazard(x: f64) -> f64 {
    if x < DEEP_TAIL {
        1.0 / mills_ratio_upper(-x)
    } else {
        pdf(x) / cdf(x)
    }
}

/// Acklam's rational approximation to the normal quantile, relative error
/// about `1.2e-9`; refined by Newton steps in [`quantile`].
fn quantile_guess(v: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if v < P_LOW {
        let q = (-2.0 * v.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = v - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Normal quantile for `v ∈ (0, 1)`, unchecked.
///
/// The upper half is obtained by reflection: `1 - v` is exact for
/// `v ∈ [½, 1]`, so no information is lost.
pub fn quantile(v: f64) -> f64 {
    if v > 0.5 {
        return -quantile(1.0 - v);
    }
    if v == 0.5 {
        return 0.0;
    }
    let mut x = quantile_guess(v);
    for _ in 0..2 {
        let step = (cdf(x) - v) / pdf(x);
        x -= step;
    }
    x
}

/// Checked density: `(2π)^{-1/2} e^{-x²/2}`.
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    Ok(pdf(finite(x)?))
}

/// Checked distribution function.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    Ok(Probability(cdf(finite(x)?)))
}

/// Checked quantile; `v ∈ {0, 1}` has an infinite quantile and is rejected.
pub fn std_normal_quantile(v: Probability) -> Result<f64> {
    let v = v.value();
    if v <= 0.0 || v >= 1.0 {
        return Err(Error::Domain(format!(
            "quantile of {v} is infinite; expected 0 < v < 1"
        )));
    }
    Ok(quantile(v))
}
