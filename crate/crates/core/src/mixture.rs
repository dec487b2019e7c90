//! Two-component mixtures and their one-dimensional reduction.
//!
//! Every mixture `p·γ(·−a) + (1−p)·γ(·−b)` is rigidly equivalent to the
//! canonical measure with weight `m = min(p, 1−p)` on `γ` and `1−m` on
//! `γ(· − d·e₁)`, `d = |a − b|`. All scalar functions here are functions of
//! `(m, d)` alone:
//!
//! * `Q(x) = m·Φ(x) + (1−m)·Φ(x−d)`, the distribution function of the projection,
//! * `f = Q'/Q`, the Cheeger ratio of the half-line `(−∞, x)`,
//! * `h = Q''/Q'`,
//! * `F = Q' − Q·h`, which carries the zeros of `f'` (`f' = −f·F/Q`),
//! * `k(x) = φ(x−d)/φ(x) = exp(d·x − d²/2)`, kept in log form.
//!
//! `h` and `h'` are written in terms of the logistic weight
//! `w = (1−m)k / (m + (1−m)k)`, so that `h = −x + d·w` and
//! `h' = −1 + d²·w(1−w)` never overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{self as sf, Probability};

/// User-facing parameters of `p·γ(·−a) + (1−p)·γ(·−b)` in `ℝⁿ`, `n = a.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub p: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(p: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let spec = Self { p, a, b };
        spec.validate()?;
        Ok(spec)
    }

    /// The mixture `p·γ + (1−p)·γ(· − d·e₁)` in `ℝⁿ`.
    pub fn on_axis(p: f64, d: f64, n: usize) -> Result<Self> {
        let a = vec![0.0; n.max(1)];
        let mut b = a.clone();
        b[0] = d;
        Self::new(p, a, b)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("weight p = {} outside [0, 1]", self.p)));
        }
        if self.a.is_empty() {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::Domain(format!(
                "centers have different dimensions ({} and {})",
                self.a.len(),
                self.b.len()
            )));
        }
        if self.a.iter().chain(&self.b).any(|x| !x.is_finite()) {
            return Err(Error::Domain("centers must be finite".into()));
        }
        if !norm(&self.a).is_finite() || !norm(&self.b).is_finite() {
            return Err(Error::Domain("center norms overflow".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn distance(&self) -> f64 {
        norm(&sub(&self.b, &self.a))
    }

    /// True when the measure is a single translated Gaussian.
    pub fn is_degenerate(&self) -> bool {
        self.p == 0.0 || self.p == 1.0 || self.centers_coincide()
    }

    fn centers_coincide(&self) -> bool {
        self.distance() <= 1e-14 * (1.0 + norm(&self.a) + norm(&self.b))
    }

    /// Center of the single Gaussian in the degenerate case.
    pub fn degenerate_center(&self) -> &[f64] {
        if self.p == 0.0 {
            &self.b
        } else {
            &self.a
        }
    }
}

/// The reduced problem together with the rigid motion that maps it back to `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMixture {
    m: f64,
    d: f64,
    /// Unit normal pointing from the weight-`m` center to the other one.
    nu: Vec<f64>,
    /// Projection of the weight-`m` center onto `nu`.
    offset: f64,
    /// Set when `p > ½`, i.e. the weight-`m` center is `b`.
    reflected: bool,
}

/// Result of [`canonicalize`].
#[derive(Debug, Clone, PartialEq)]
pub enum Canonical {
    /// `p ∈ {0, 1}` or `a = b`: a standard Gaussian centered here.
    DegenerateGaussian { center: Vec<f64> },
    Mixture(CanonicalMixture),
}

/// Reduces a mixture to canonical form.
pub fn canonicalize(spec: &MixtureSpec) -> Result<Canonical> {
    spec.validate()?;
    if spec.is_degenerate() {
        return Ok(Canonical::DegenerateGaussian {
            center: spec.degenerate_center().to_vec(),
        });
    }
    let diff = sub(&spec.b, &spec.a);
    let d = norm(&diff);
    let mut nu: Vec<f64> = diff.iter().map(|x| x / d).collect();
    let reflected = spec.p > 0.5;
    let (m, light_center) = if reflected {
        nu.iter_mut().for_each(|x| *x = -*x);
        (1.0 - spec.p, &spec.b)
    } else {
        (spec.p, &spec.a)
    };
    let offset = dot(light_center, &nu);
    Ok(Canonical::Mixture(CanonicalMixture {
        m,
        d,
        nu,
        offset,
        reflected,
    }))
}

impl Canonical {
    /// The reduced mixture, or [`Error::Degenerate`] for a single Gaussian.
    pub fn mixture(&self) -> Result<&CanonicalMixture> {
        match self {
            Canonical::Mixture(cm) => Ok(cm),
            Canonical::DegenerateGaussian { .. } => Err(Error::Degenerate),
        }
    }
}

impl CanonicalMixture {
    /// The one-dimensional canonical mixture with weight `m` at 0 and `1−m` at `d`.
    pub fn new(m: f64, d: f64) -> Result<Self> {
        if !(m > 0.0 && m <= 0.5) {
            return Err(Error::Domain(format!("canonical weight m = {m} outside (0, 1/2]")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Domain(format!("distance d = {d} must be positive and finite")));
        }
        Ok(Self {
            m,
            d,
            nu: vec![1.0],
            offset: 0.0,
            reflected: false,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn reflected(&self) -> bool {
        self.reflected
    }

    /// Weight `1 − m` of the far component.
    pub fn q_weight(&self) -> f64 {
        1.0 - self.m
    }

    /// `Q(r)`, the measure of `{x·ν < offset + r}`.
    pub fn cdf(&self, r: f64) -> f64 {
        self.m * sf::cdf(r) + self.q_weight() * sf::cdf(r - self.d)
    }

    /// `1 − Q(r)` without cancellation.
    pub fn upper(&self, r: f64) -> f64 {
        self.m * sf::sf(r) + self.q_weight() * sf::sf(r - self.d)
    }

    /// `Q'(r)`, the perimeter of either half-space cut at `r`.
    pub fn perimeter(&self, r: f64) -> f64 {
        self.m * sf::pdf(r) + self.q_weight() * sf::pdf(r - self.d)
    }

    /// `Q''(r) = −m·r·φ(r) − (1−m)(r−d)·φ(r−d)`.
    pub fn perimeter_slope(&self, r: f64) -> f64 {
        -self.m * r * sf::pdf(r) - self.q_weight() * (r - self.d) * sf::pdf(r - self.d)
    }

    /// `log k(r) = d·r − d²/2`.
    pub fn log_k(&self, r: f64) -> f64 {
        self.d * r - 0.5 * self.d * self.d
    }

    /// Logit of the far-component weight `w(r)`.
    fn weight_logit(&self, r: f64) -> f64 {
        (self.q_weight() / self.m).ln() + self.log_k(r)
    }

    /// `w(r) = (1−m)k / (m + (1−m)k)`.
    fn far_weight(&self, r: f64) -> f64 {
        logistic(self.weight_logit(r))
    }

    /// `f(r) = Q'(r)/Q(r)`.
    pub fn log_ratio_f(&self, r: f64) -> f64 {
        if r > -20.0 {
            self.perimeter(r) / self.cdf(r)
        } else {
            // both Q and Q' underflow together; work with logs
            let lm = self.m.ln();
            let lq = self.q_weight().ln();
            let log_num = log_add(lm + sf::log_pdf(r), lq + sf::log_pdf(r - self.d));
            let log_den = log_add(lm + sf::log_cdf(r), lq + sf::log_cdf(r - self.d));
            (log_num - log_den).exp()
        }
    }

    /// `h(r) = Q''(r)/Q'(r) = −r + d·w(r)`.
    pub fn hazard_h(&self, r: f64) -> f64 {
        -r + self.d * self.far_weight(r)
    }

    /// `F(r) = Q'(r) − Q(r)·h(r)`.
    pub fn f_value(&self, r: f64) -> f64 {
        self.perimeter(r) - self.cdf(r) * self.hazard_h(r)
    }

    /// `h'(r) = −1 + m(1−m)d²k/(m + (1−m)k)²`.
    pub fn h_prime(&self, r: f64) -> f64 {
        let s = self.weight_logit(r);
        let e = (-s.abs()).exp();
        let w_one_minus_w = e / ((1.0 + e) * (1.0 + e));
        -1.0 + self.d * self.d * w_one_minus_w
    }

    /// `f'(r) = f·(h − f)`.
    pub fn f_derivative(&self, r: f64) -> f64 {
        let f = self.log_ratio_f(r);
        f * (self.hazard_h(r) - f)
    }

    /// Zeros of `h'`, obtained in closed form.
    ///
    /// `h' = 0` is `w(1−w) = 1/d²`, i.e. `w = (1 ± √(1 − 4/d²))/2`; mapping
    /// `w` back through its logit gives the abscissae. This is the quadratic
    /// in `k` solved in the variable `w`, which avoids forming `k` itself.
    pub fn h_prime_zeros(&self) -> HPrimeZeros {
        let d = self.d;
        let shift = (self.q_weight() / self.m).ln();
        let to_x = |logit: f64| (logit - shift + 0.5 * d * d) / d;
        if d < 2.0 {
            HPrimeZeros::None
        } else if d == 2.0 {
            HPrimeZeros::Double(to_x(0.0))
        } else {
            let root = (1.0 - 4.0 / (d * d)).sqrt();
            let w_lo = (2.0 / (d * d)) / (1.0 + root);
            let w_hi = 0.5 * (1.0 + root);
            let spread = (w_hi / w_lo).ln();
            HPrimeZeros::Pair(to_x(-spread), to_x(spread))
        }
    }

    /// Profile inverse: the `r` with `Q(r) = v`.
    pub(crate) fn invert_cdf(&self, v: f64) -> f64 {
        let lo = -10.0;
        let hi = self.d + 10.0;
        crate::roots::increasing_root(|r| (self.cdf(r) - v, self.perimeter(r)), lo, hi, 1e-15)
    }
}

/// Zero structure of `h'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HPrimeZeros {
    /// `d < 2`: `h' < 0` everywhere.
    None,
    /// `d = 2`: `h' ≤ 0` with a single touching zero.
    Double(f64),
    /// `d > 2`: `h' < 0` on `(−∞, α)`, `> 0` on `(α, β)`, `< 0` on `(β, ∞)`.
    Pair(f64, f64),
}

/// `Q(r)` on the canonical mixture.
pub fn mixture_cdf(cm: &CanonicalMixture, r: f64) -> Probability {
    Probability::saturating(cm.cdf(r))
}

/// `Q'(r)`: the perimeter of both `H⁻_r` and `H⁺_r`.
pub fn mixture_perimeter(cm: &CanonicalMixture, r: f64) -> f64 {
    cm.perimeter(r)
}

fn logistic(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

fn log_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    // scaled so that large coordinates do not overflow when squared
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}
