//! Independent verification surfaces.
//!
//! Exact measure and perimeter of arbitrary half-spaces (the one-dimensional
//! marginal of a mixture along any unit normal is again a two-component
//! mixture), and Monte-Carlo estimates of measure and outer Minkowski content
//! for balls, slabs and half-spaces.
//!
//! Random streams come from ChaCha8 keyed by the seed, with one stream per
//! batch of samples: an estimate is a deterministic function of
//! `(seed, samples)` no matter how batches are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{dot, norm, MixtureSpec};
use crate::roots;
use crate::solver::{cheeger, HalfSpace, Side};
use crate::special_fn::{self as sf, Probability};

/// Samples per independently seeded batch.
const BATCH: usize = 8192;

/// Minimum sample count accepted by the estimators.
pub const MIN_SAMPLES: usize = 10_000;

/// Neighbourhood widths for the Minkowski quotient, largest first.
pub const EPS_LADDER: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Acceptance band in standard errors.
pub const SE_BAND: f64 = 4.0;

/// Candidate set for verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestSet {
    Halfspace(HalfSpace),
    Ball { center: Vec<f64>, radius: f64 },
    Slab { nu: Vec<f64>, c_lo: f64, c_hi: f64 },
}

impl TestSet {
    pub fn dim(&self) -> usize {
        match self {
            TestSet::Halfspace(hs) => hs.nu.len(),
            TestSet::Ball { center, .. } => center.len(),
            TestSet::Slab { nu, .. } => nu.len(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: &str| Err(Error::Domain(format!("invalid test set: {msg}")));
        if self.dim() != n {
            return bad("dimension does not match the mixture");
        }
        let unit = |nu: &[f64]| (norm(nu) - 1.0).abs() <= 1e-12;
        match self {
            TestSet::Halfspace(hs) if !unit(&hs.nu) || !hs.c.is_finite() => bad("normal must be a unit vector"),
            TestSet::Ball { center, radius } if center.iter().any(|x| !x.is_finite()) || !(*radius > 0.0) || !radius.is_finite() => {
                bad("ball needs a finite center and positive radius")
            }
            TestSet::Slab { nu, c_lo, c_hi } if !unit(nu) || !(c_lo < c_hi) || !c_lo.is_finite() || !c_hi.is_finite() => {
                bad("slab needs a unit normal and c_lo < c_hi")
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            TestSet::Halfspace(hs) => hs.contains(x),
            TestSet::Ball { center, radius } => sq_dist(x, center) < radius * radius,
            TestSet::Slab { nu, c_lo, c_hi } => {
                let s = dot(x, nu);
                *c_lo < s && s < *c_hi
            }
        }
    }

    /// Distance from `x` to the set; 0 for points inside.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            TestSet::Halfspace(hs) => hs.distance(x),
            TestSet::Ball { center, radius } => (sq_dist(x, center).sqrt() - radius).max(0.0),
            TestSet::Slab { nu, c_lo, c_hi } => {
                let s = dot(x, nu);
                (c_lo - s).max(s - c_hi).max(0.0)
            }
        }
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Raw Minkowski quotient at one neighbourhood width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub eps: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Extrapolated Minkowski content and the quotients it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiEstimate {
    pub estimate: McEstimate,
    pub levels: Vec<LevelEstimate>,
}

// ---------------------------------------------------------------------------
// Exact half-space and slab formulas
// ---------------------------------------------------------------------------

/// `μ(H)`: `p·Φ(c − a·ν) + (1−p)·Φ(c − b·ν)` for `H⁻`, the complementary tails for `H⁺`.
pub fn halfspace_measure(spec: &MixtureSpec, hs: &HalfSpace) -> Probability {
    let (sa, sb) = projected_offsets(spec, &hs.nu, hs.c);
    let v = match hs.side {
        Side::Minus => spec.p * sf::cdf(sa) + (1.0 - spec.p) * sf::cdf(sb),
        Side::Plus => spec.p * sf::sf(sa) + (1.0 - spec.p) * sf::sf(sb),
    };
    Probability::saturating(v)
}

/// `μ₊(H) = p·φ(c − a·ν) + (1−p)·φ(c − b·ν)`, the same for both sides.
pub fn halfspace_perimeter(spec: &MixtureSpec, hs: &HalfSpace) -> f64 {
    let (sa, sb) = projected_offsets(spec, &hs.nu, hs.c);
    spec.p * sf::pdf(sa) + (1.0 - spec.p) * sf::pdf(sb)
}

/// Cheeger ratio `μ₊(H) / min(μ(H), 1 − μ(H))`, both tails evaluated directly.
pub fn halfspace_ratio(spec: &MixtureSpec, hs: &HalfSpace) -> f64 {
    let (sa, sb) = projected_offsets(spec, &hs.nu, hs.c);
    let lower = spec.p * sf::cdf(sa) + (1.0 - spec.p) * sf::cdf(sb);
    let upper = spec.p * sf::sf(sa) + (1.0 - spec.p) * sf::sf(sb);
    halfspace_perimeter(spec, hs) / lower.min(upper)
}

fn projected_offsets(spec: &MixtureSpec, nu: &[f64], c: f64) -> (f64, f64) {
    (c - dot(&spec.a, nu), c - dot(&spec.b, nu))
}

/// `μ({x·ν < c})` as a function of `c`, for offset solving.
fn lower_measure(spec: &MixtureSpec, nu: &[f64], c: f64) -> (f64, f64) {
    let (sa, sb) = projected_offsets(spec, nu, c);
    (
        spec.p * sf::cdf(sa) + (1.0 - spec.p) * sf::cdf(sb),
        spec.p * sf::pdf(sa) + (1.0 - spec.p) * sf::pdf(sb),
    )
}

/// Offset `c` with `μ({x·ν < c}) = v`.
pub fn offset_for_volume(spec: &MixtureSpec, nu: &[f64], v: f64) -> f64 {
    let pa = dot(&spec.a, nu);
    let pb = dot(&spec.b, nu);
    let lo = pa.min(pb) - 40.0;
    let hi = pa.max(pb) + 40.0;
    roots::increasing_root(
        |c| {
            let (m, dm) = lower_measure(spec, nu, c);
            (m - v, dm)
        },
        lo,
        hi,
        1e-14,
    )
}

/// Exact measure where a closed form exists (half-spaces and slabs).
pub fn exact_measure(spec: &MixtureSpec, set: &TestSet) -> Option<f64> {
    match set {
        TestSet::Halfspace(hs) => Some(halfspace_measure(spec, hs).value()),
        TestSet::Slab { nu, c_lo, c_hi } => {
            Some(lower_measure(spec, nu, *c_hi).0 - lower_measure(spec, nu, *c_lo).0)
        }
        TestSet::Ball { .. } => None,
    }
}

/// Exact perimeter where a closed form exists.
pub fn exact_perimeter(spec: &MixtureSpec, set: &TestSet) -> Option<f64> {
    match set {
        TestSet::Halfspace(hs) => Some(halfspace_perimeter(spec, hs)),
        TestSet::Slab { nu, c_lo, c_hi } => {
            Some(lower_measure(spec, nu, *c_lo).1 + lower_measure(spec, nu, *c_hi).1)
        }
        TestSet::Ball { .. } => None,
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    Ok(())
}

/// Draws one point of the mixture into `x`.
fn draw(spec: &MixtureSpec, rng: &mut ChaCha8Rng, x: &mut [f64]) {
    let u: f64 = rng.random();
    let center = if u < spec.p { &spec.a } else { &spec.b };
    for (xi, ci) in x.iter_mut().zip(center) {
        let z: f64 = rng.sample(StandardNormal);
        *xi = ci + z;
    }
}

/// Per-sample means and standard errors of `K` statistics of mixture draws.
fn sample_means<const K: usize, G>(spec: &MixtureSpec, samples: usize, seed: u64, stat: G) -> [(f64, f64); K]
where
    G: Fn(&[f64]) -> [f64; K] + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let partial: Vec<([f64; K], [f64; K])> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut x = vec![0.0; spec.dim()];
            let mut sum = [0.0; K];
            let mut sum_sq = [0.0; K];
            for _ in 0..count {
                draw(spec, &mut rng, &mut x);
                let y = stat(&x);
                for k in 0..K {
                    sum[k] += y[k];
                    sum_sq[k] += y[k] * y[k];
                }
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = [0.0; K];
    let mut sum_sq = [0.0; K];
    for (s, sq) in &partial {
        for k in 0..K {
            sum[k] += s[k];
            sum_sq[k] += sq[k];
        }
    }
    let n = samples as f64;
    let mut out = [(0.0, 0.0); K];
    for k in 0..K {
        let mean = sum[k] / n;
        let var = ((sum_sq[k] - n * mean * mean) / (n - 1.0)).max(0.0);
        out[k] = (mean, (var / n).sqrt());
    }
    out
}

/// Fraction of mixture draws that land in `set`.
pub fn mc_measure(spec: &MixtureSpec, set: &TestSet, samples: usize, seed: u64) -> Result<McEstimate> {
    spec.validate()?;
    set.validate(spec.dim())?;
    check_samples(samples)?;
    let [(value, std_error)] = sample_means(spec, samples, seed, |x| [f64::from(u8::from(set.contains(x)))]);
    Ok(McEstimate {
        value,
        std_error,
        samples,
        seed,
    })
}

/// Outer Minkowski content `μ(Aᵉ∖A)/ε`, Richardson-extrapolated over [`EPS_LADDER`].
///
/// With halving widths the two-step extrapolation is `(8g₃ − 6g₂ + g₁)/3`;
/// it is applied per sample, so the reported standard error accounts for
/// the correlation between levels.
pub fn mc_minkowski(spec: &MixtureSpec, set: &TestSet, samples: usize, seed: u64) -> Result<MinkowskiEstimate> {
    spec.validate()?;
    set.validate(spec.dim())?;
    check_samples(samples)?;
    let [e1, e2, e3] = EPS_LADDER;
    let stats = sample_means(spec, samples, seed, |x| {
        let dist = set.distance(x);
        let hit = |eps: f64| {
            if dist < eps && !set.contains(x) {
                1.0 / eps
            } else {
                0.0
            }
        };
        let (g1, g2, g3) = (hit(e1), hit(e2), hit(e3));
        [g1, g2, g3, (8.0 * g3 - 6.0 * g2 + g1) / 3.0]
    });
    let levels = EPS_LADDER
        .iter()
        .zip(&stats[..3])
        .map(|(&eps, &(value, std_error))| LevelEstimate { eps, value, std_error })
        .collect();
    let (value, std_error) = stats[3];
    Ok(MinkowskiEstimate {
        estimate: McEstimate {
            value,
            std_error,
            samples,
            seed,
        },
        levels,
    })
}

// ---------------------------------------------------------------------------
// Shift inequality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    pub estimate: McEstimate,
    /// `Φ(t − |λ|)`
    pub lower: f64,
    /// `Φ(t + |λ|)`
    pub upper: f64,
    pub pass: bool,
}

/// Exact `γ(E + λν)` for a half-space, otherwise `None`.
pub fn shifted_gaussian_measure(set: &TestSet, lambda: f64, direction: &[f64]) -> Option<f64> {
    match set {
        TestSet::Halfspace(hs) => {
            let c = hs.c + lambda * dot(direction, &hs.nu);
            Some(match hs.side {
                Side::Minus => sf::cdf(c),
                Side::Plus => sf::sf(c),
            })
        }
        TestSet::Slab { nu, c_lo, c_hi } => {
            let s = lambda * dot(direction, nu);
            Some(sf::cdf(c_hi + s) - sf::cdf(c_lo + s))
        }
        TestSet::Ball { .. } => None,
    }
}

/// Tests `Φ(t − |λ|) ≤ γ(E + λν) ≤ Φ(t + |λ|)` by Monte Carlo for a set with `γ(E) = Φ(t)`.
pub fn shift_bounds_check(
    t: f64,
    lambda: f64,
    direction: &[f64],
    set: &TestSet,
    samples: usize,
    seed: u64,
) -> Result<ShiftCheck> {
    let n = set.dim();
    if direction.len() != n || (norm(direction) - 1.0).abs() > 1e-12 {
        return Err(Error::Domain("shift direction must be a unit vector of the set's dimension".into()));
    }
    if !t.is_finite() || !lambda.is_finite() {
        return Err(Error::Domain("t and lambda must be finite".into()));
    }
    let gaussian = MixtureSpec::new(1.0, vec![0.0; n], vec![0.0; n])?;
    set.validate(n)?;
    check_samples(samples)?;
    // Z ∈ E + λν  ⇔  Z − λν ∈ E
    let [(value, std_error)] = sample_means(&gaussian, samples, seed, |z| {
        let shifted: Vec<f64> = z.iter().zip(direction).map(|(zi, di)| zi - lambda * di).collect();
        [f64::from(u8::from(set.contains(&shifted)))]
    });
    let lower = sf::cdf(t - lambda.abs());
    let upper = sf::cdf(t + lambda.abs());
    let band = SE_BAND * std_error;
    Ok(ShiftCheck {
        estimate: McEstimate {
            value,
            std_error,
            samples,
            seed,
        },
        lower,
        upper,
        pass: value >= lower - band && value <= upper + band,
    })
}

// ---------------------------------------------------------------------------
// Lower-bound sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Random tilted half-spaces, evaluated exactly.
    pub halfspace_trials: usize,
    /// Random balls and slabs, evaluated by Monte Carlo.
    pub mc_trials: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            halfspace_trials: 500,
            mc_trials: 100,
            samples: 1_000_000,
            seed: 1,
        }
    }
}

/// Exact half-spaces must not beat `h_μ` by more than this.
pub const EXACT_SLACK: f64 = 1e-9;
/// Ratios this close to `h_μ` count as equality.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Normals further than this from `±ν` must be strictly worse than `h_μ`.
pub const TILT_ANGLE: f64 = 0.1;
/// Floor of the Monte-Carlo acceptance band.
pub const MC_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub set: TestSet,
    pub ratio: f64,
    /// Zero for exact evaluations.
    pub std_error: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub reason: String,
    pub record: TrialRecord,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub spec: MixtureSpec,
    pub trials: usize,
    pub h_mu: f64,
    pub worst_ratio: f64,
    pub worst_set: TestSet,
    pub pass: bool,
    /// Largest `|ratio − h_μ|` over the half-spaces returned by the solver.
    pub optimal_max_deviation: f64,
    /// Smallest `ratio − h_μ` over exact half-spaces tilted by more than [`TILT_ANGLE`].
    pub tilted_margin: Option<f64>,
    /// Smallest `ratio − (h_μ − band)` over Monte-Carlo sets.
    pub mc_min_slack: Option<f64>,
    pub exact_min_ratio: Option<f64>,
    pub mc_min_ratio: Option<f64>,
    pub options: VerifyOptions,
    pub violations: Vec<Violation>,
}

/// SplitMix64 step, used to derive independent seeds and stream keys.
fn mix(seed: u64, tag: u64, index: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-8 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

struct ExactTrial {
    record: TrialRecord,
    angle: f64,
}

fn exact_trial(spec: &MixtureSpec, axis: &[f64], seed: u64, trial: usize) -> ExactTrial {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 1, trial as u64));
    let nu = random_unit(&mut rng, spec.dim());
    let volume = rng.random_range(0.02..0.98);
    let side = if rng.random::<bool>() { Side::Minus } else { Side::Plus };
    let lower_volume = match side {
        Side::Minus => volume,
        Side::Plus => 1.0 - volume,
    };
    let c = offset_for_volume(spec, &nu, lower_volume);
    let angle = dot(&nu, axis).abs().min(1.0).acos();
    let hs = HalfSpace { nu, c, side };
    let ratio = halfspace_ratio(spec, &hs);
    ExactTrial {
        record: TrialRecord {
            trial,
            set: TestSet::Halfspace(hs),
            ratio,
            std_error: 0.0,
            seed,
        },
        angle,
    }
}

fn mc_trial(spec: &MixtureSpec, seed: u64, trial: usize, samples: usize) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 2, trial as u64));
    let n = spec.dim();
    let measure_seed = mix(seed, 3, trial as u64);
    let perimeter_seed = mix(seed, 4, trial as u64);

    let (set, volume) = if trial.is_multiple_of(2) {
        let mid: Vec<f64> = spec.a.iter().zip(&spec.b).map(|(x, y)| 0.5 * (x + y)).collect();
        let mut attempt = 0u64;
        loop {
            let center: Vec<f64> = mid
                .iter()
                .map(|c| c + 1.5 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let radius = rng.random_range(0.3..3.0);
            let set = TestSet::Ball { center, radius };
            let pilot = mc_measure(spec, &set, 20_000, mix(measure_seed, 5, attempt))?.value;
            attempt += 1;
            if (0.02..0.98).contains(&pilot) || attempt > 64 {
                let v = mc_measure(spec, &set, samples, measure_seed)?;
                break (set, v);
            }
        }
    } else {
        let nu = random_unit(&mut rng, n);
        let lo_volume = rng.random_range(0.01..0.9);
        let width = rng.random_range(0.02..(0.99_f64 - lo_volume).min(0.98));
        let c_lo = offset_for_volume(spec, &nu, lo_volume);
        let c_hi = offset_for_volume(spec, &nu, lo_volume + width);
        let set = TestSet::Slab { nu, c_lo, c_hi };
        let v = exact_measure(spec, &set).unwrap();
        (
            set,
            McEstimate {
                value: v,
                std_error: 0.0,
                samples: 0,
                seed: measure_seed,
            },
        )
    };

    let perimeter = mc_minkowski(spec, &set, samples, perimeter_seed)?.estimate;
    let denom = volume.value.min(1.0 - volume.value);
    let ratio = perimeter.value / denom;
    let rel_p = if perimeter.value > 0.0 { perimeter.std_error / perimeter.value } else { 0.0 };
    let rel_v = volume.std_error / denom;
    let std_error = ratio.abs() * (rel_p * rel_p + rel_v * rel_v).sqrt();
    Ok(TrialRecord {
        trial,
        set,
        ratio,
        std_error,
        seed,
    })
}

/// Sweeps random candidate sets and checks that none beats the computed Cheeger constant.
pub fn verify_cheeger_lower_bound(spec: &MixtureSpec, options: &VerifyOptions) -> Result<VerifyReport> {
    spec.validate()?;
    if spec.is_degenerate() {
        return Err(Error::Degenerate);
    }
    if options.mc_trials > 0 {
        check_samples(options.samples)?;
    }
    let solution = cheeger(spec)?;
    let h = solution.h;
    let axis: Vec<f64> = {
        let diff = crate::mixture::sub(&spec.b, &spec.a);
        let d = norm(&diff);
        diff.into_iter().map(|x| x / d).collect()
    };

    let mut violations = Vec::new();

    let optimal_max_deviation = solution
        .halfspaces
        .iter()
        .map(|hs| (halfspace_ratio(spec, hs) - h).abs())
        .fold(0.0, f64::max);
    if optimal_max_deviation > EQUALITY_TOL {
        violations.push(Violation {
            reason: "solver half-space does not attain h".into(),
            record: TrialRecord {
                trial: usize::MAX,
                set: TestSet::Halfspace(solution.halfspaces[0].clone()),
                ratio: h + optimal_max_deviation,
                std_error: 0.0,
                seed: options.seed,
            },
            bound: h,
        });
    }

    let exact: Vec<ExactTrial> = (0..options.halfspace_trials)
        .into_par_iter()
        .map(|i| exact_trial(spec, &axis, options.seed, i))
        .collect();
    let mut tilted_margin: Option<f64> = None;
    for t in &exact {
        let ratio = t.record.ratio;
        if ratio < h - EXACT_SLACK {
            violations.push(Violation {
                reason: "exact half-space below h".into(),
                record: t.record.clone(),
                bound: h - EXACT_SLACK,
            });
        }
        if (ratio - h).abs() <= EQUALITY_TOL && t.angle > 1e-6 {
            violations.push(Violation {
                reason: "equality attained by a non-perpendicular half-space".into(),
                record: t.record.clone(),
                bound: h,
            });
        }
        if t.angle > TILT_ANGLE {
            let margin = ratio - h;
            tilted_margin = Some(tilted_margin.map_or(margin, |m| m.min(margin)));
            if margin <= EQUALITY_TOL {
                violations.push(Violation {
                    reason: "tilted half-space not strictly above h".into(),
                    record: t.record.clone(),
                    bound: h + EQUALITY_TOL,
                });
            }
        }
    }

    // trials are parallel inside each estimate; keep the outer loop sequential
    let mc: Vec<TrialRecord> = (0..options.mc_trials)
        .map(|j| mc_trial(spec, options.seed, j, options.samples))
        .collect::<Result<_>>()?;
    let mut mc_min_slack: Option<f64> = None;
    for rec in &mc {
        let bound = h - (SE_BAND * rec.std_error).max(MC_FLOOR);
        let slack = rec.ratio - bound;
        mc_min_slack = Some(mc_min_slack.map_or(slack, |s| s.min(slack)));
        if slack < 0.0 {
            violations.push(Violation {
                reason: "Monte-Carlo set below h".into(),
                record: rec.clone(),
                bound,
            });
        }
    }

    let min_of = |it: &mut dyn Iterator<Item = f64>| it.fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))));
    let exact_min_ratio = min_of(&mut exact.iter().map(|t| t.record.ratio));
    let mc_min_ratio = min_of(&mut mc.iter().map(|r| r.ratio));

    let worst = exact
        .iter()
        .map(|t| &t.record)
        .chain(&mc)
        .min_by(|x, y| x.ratio.total_cmp(&y.ratio));
    let (worst_ratio, worst_set) = match worst {
        Some(rec) => (rec.ratio, rec.set.clone()),
        None => (h, TestSet::Halfspace(solution.halfspaces[0].clone())),
    };

    Ok(VerifyReport {
        spec: spec.clone(),
        trials: options.halfspace_trials + options.mc_trials,
        h_mu: h,
        worst_ratio,
        worst_set,
        pass: violations.is_empty(),
        optimal_max_deviation,
        tilted_margin,
        mc_min_slack,
        exact_min_ratio,
        mc_min_ratio,
        options: *options,
        violations,
    })
}
