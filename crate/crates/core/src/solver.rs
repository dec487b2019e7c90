//! Cheeger constant, Cheeger sets and the restricted isoperimetric profile.
//!
//! The Cheeger constant of the canonical mixture is the minimum of
//! `f = (log Q)'` over `[0, r*]`, where `Q(r*) = ½`. Interior critical points
//! of `f` are zeros of `F`. `F` is monotone between consecutive zeros of `h'`
//! (which are known in closed form), so each zero is bracketed on its own
//! segment and refined by bisection. `f` is then monotone between consecutive
//! candidates and the local minima ("basins") can be read off directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{canonicalize, Canonical, CanonicalMixture, HPrimeZeros, MixtureSpec};
use crate::roots;
use crate::special_fn::{self as sf, Probability, SQRT_2_OVER_PI};

/// Two minimizer values closer than this count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Candidates closer than this are the same point.
pub const DEDUP_SPACING: f64 = 1e-8;

const ZERO_XTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `{x·ν < c}`
    Minus,
    /// `{x·ν > c}`
    Plus,
}

/// `H⁻_{c,ν} = {x·ν < c}` or `H⁺_{c,ν} = {x·ν > c}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub nu: Vec<f64>,
    pub c: f64,
    pub side: Side,
}

impl HalfSpace {
    /// Builds a half-space, normalizing `nu`.
    pub fn new(nu: Vec<f64>, c: f64, side: Side) -> Result<Self> {
        let len = crate::mixture::norm(&nu);
        if !(len > 0.0 && len.is_finite()) || !c.is_finite() {
            return Err(Error::Domain("half-space needs a nonzero finite normal and finite offset".into()));
        }
        Ok(Self {
            nu: nu.into_iter().map(|x| x / len).collect(),
            c,
            side,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let s = crate::mixture::dot(x, &self.nu);
        match self.side {
            Side::Minus => s < self.c,
            Side::Plus => s > self.c,
        }
    }

    /// Euclidean distance from a point outside the half-space to it; 0 inside.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let s = crate::mixture::dot(x, &self.nu);
        match self.side {
            Side::Minus => (s - self.c).max(0.0),
            Side::Plus => (self.c - s).max(0.0),
        }
    }
}

/// A local minimum of `f` on `[0, r*]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Basin {
    pub location: f64,
    pub value: f64,
    /// The basin is the right endpoint `r*`.
    pub at_r_star: bool,
}

/// Output of [`find_minimizers`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerSearch {
    pub h: f64,
    pub r_star: f64,
    pub minimizers: Vec<f64>,
    /// Distinct local minima of `f`, ordered by location.
    pub basins: Vec<Basin>,
    /// Second-lowest basin value minus `h`; `+∞` with a single basin.
    pub gap: f64,
}

impl MinimizerSearch {
    /// The basin holding the global minimum.
    pub fn winner(&self) -> &Basin {
        self.basins
            .iter()
            .min_by(|x, y| x.value.total_cmp(&y.value))
            .expect("at least one basin")
    }

    /// Lowest basin away from `r*` and the `r*` basin, when both exist.
    pub fn competing_basins(&self) -> (Option<&Basin>, Option<&Basin>) {
        let left = self
            .basins
            .iter()
            .filter(|b| !b.at_r_star)
            .min_by(|x, y| x.value.total_cmp(&y.value));
        let right = self.basins.iter().find(|b| b.at_r_star);
        (left, right)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerSolution {
    pub h: f64,
    pub r_star: f64,
    /// Minimizers of `f` in canonical coordinates, increasing.
    pub minimizers: Vec<f64>,
    /// Both sides of the cut at every minimizer.
    pub halfspaces: Vec<HalfSpace>,
    pub unique: bool,
    pub degenerate_gaussian: bool,
    pub gap: f64,
}

/// One point of the restricted profile `I = Q' ∘ Q⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub v: Probability,
    pub iso: f64,
    pub r: f64,
}

/// The median `r*` with `Q(r*) = ½`; lies in `[d/2, d)`.
pub fn median_r_star(cm: &CanonicalMixture) -> f64 {
    let d = cm.d();
    if cm.m() == 0.5 {
        return 0.5 * d;
    }
    roots::increasing_root(|r| (cm.cdf(r) - 0.5, cm.perimeter(r)), 0.5 * d, d, 1e-15)
}

/// `r*` for a possibly degenerate canonical form.
pub fn median_of(canon: &Canonical) -> Result<f64> {
    Ok(median_r_star(canon.mixture()?))
}

/// Zeros of `F` strictly inside `(0, r*)`, increasing.
fn interior_critical_points(cm: &CanonicalMixture, r_star: f64) -> Vec<f64> {
    let HPrimeZeros::Pair(alpha, beta) = cm.h_prime_zeros() else {
        // d ≤ 2: F is strictly increasing from 0 at −∞, hence positive
        return Vec::new();
    };
    let mut cuts = vec![0.0];
    cuts.extend([alpha, beta].into_iter().filter(|&x| x > 0.0 && x < r_star));
    cuts.push(r_star);

    let big_f = |x: f64| cm.f_value(x);
    let mut zeros = Vec::new();
    for seg in cuts.windows(2) {
        let (u, v) = (seg[0], seg[1]);
        let (fu, fv) = (big_f(u), big_f(v));
        if u > 0.0 && fu == 0.0 {
            zeros.push(u);
        } else if fu.signum() != fv.signum() && fu != 0.0 && fv != 0.0 {
            zeros.push(roots::bisect(big_f, u, v, ZERO_XTOL));
        }
    }
    zeros
}

/// `h_μ` and the minimizer set of `f` on `[0, r*]`.
pub fn find_minimizers(cm: &CanonicalMixture) -> MinimizerSearch {
    let r_star = median_r_star(cm);
    let mut points = vec![0.0];
    points.extend(interior_critical_points(cm, r_star));
    points.push(r_star);
    points.dedup_by(|x, y| (*x - *y).abs() < DEDUP_SPACING);
    if *points.last().unwrap() != r_star {
        *points.last_mut().unwrap() = r_star;
    }
    let values: Vec<f64> = points.iter().map(|&x| cm.log_ratio_f(x)).collect();
    let last = points.len() - 1;

    // f is monotone between neighbouring points
    let local_minima: Vec<usize> = (0..points.len())
        .filter(|&i| (i == 0 || values[i] <= values[i - 1]) && (i == last || values[i] <= values[i + 1]))
        .collect();

    // merge neighbouring minima not separated by a barrier above the tie tolerance
    let mut basin_idx: Vec<usize> = Vec::new();
    for &i in &local_minima {
        if let Some(&j) = basin_idx.last() {
            let barrier = values[j + 1..i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if barrier - values[i].max(values[j]) <= TIE_TOLERANCE {
                if values[i] < values[j] {
                    *basin_idx.last_mut().unwrap() = i;
                }
                continue;
            }
        }
        basin_idx.push(i);
    }

    let basins: Vec<Basin> = basin_idx
        .iter()
        .map(|&i| Basin {
            location: points[i],
            value: values[i],
            at_r_star: i == last,
        })
        .collect();

    let h = basins.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
    let minimizers: Vec<f64> = basins
        .iter()
        .filter(|b| b.value <= h + TIE_TOLERANCE)
        .map(|b| b.location)
        .collect();
    let mut sorted: Vec<f64> = basins.iter().map(|b| b.value).collect();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted.get(1).map_or(f64::INFINITY, |second| second - h);

    MinimizerSearch {
        h,
        r_star,
        minimizers,
        basins,
        gap,
    }
}

/// Solves the Cheeger problem for a mixture in `ℝⁿ`.
pub fn cheeger(spec: &MixtureSpec) -> Result<CheegerSolution> {
    match canonicalize(spec)? {
        Canonical::DegenerateGaussian { center } => {
            let mut e1 = vec![0.0; center.len()];
            e1[0] = 1.0;
            let c = center[0];
            Ok(CheegerSolution {
                h: SQRT_2_OVER_PI,
                r_star: 0.0,
                minimizers: vec![0.0],
                halfspaces: vec![
                    HalfSpace {
                        nu: e1.clone(),
                        c,
                        side: Side::Minus,
                    },
                    HalfSpace {
                        nu: e1,
                        c,
                        side: Side::Plus,
                    },
                ],
                unique: true,
                degenerate_gaussian: true,
                gap: f64::INFINITY,
            })
        }
        Canonical::Mixture(cm) => Ok(solve_canonical(&cm)),
    }
}

/// Solution of a canonical mixture, with half-spaces mapped back through its rigid motion.
pub fn solve_canonical(cm: &CanonicalMixture) -> CheegerSolution {
    let search = find_minimizers(cm);
    let halfspaces = search
        .minimizers
        .iter()
        .flat_map(|&t| {
            [Side::Minus, Side::Plus].map(|side| HalfSpace {
                nu: cm.nu().to_vec(),
                c: cm.offset() + t,
                side,
            })
        })
        .collect();
    CheegerSolution {
        h: search.h,
        r_star: search.r_star,
        unique: search.minimizers.len() == 1,
        minimizers: search.minimizers,
        halfspaces,
        degenerate_gaussian: false,
        gap: search.gap,
    }
}

/// The restricted profile `I(v) = Q'(Q⁻¹(v))` for `v ∈ [Q(0), Q(d)]`.
pub fn iso_profile(cm: &CanonicalMixture, v_grid: &[Probability]) -> Result<Vec<ProfilePoint>> {
    let lo = cm.cdf(0.0);
    let hi = cm.cdf(cm.d());
    v_grid
        .iter()
        .map(|&v| {
            let vv = v.value();
            if !(lo..=hi).contains(&vv) {
                return Err(Error::VolumeOutOfRange { v: vv, lo, hi });
            }
            let r = cm.invert_cdf(vv);
            Ok(ProfilePoint {
                v,
                iso: cm.perimeter(r),
                r,
            })
        })
        .collect()
}

/// `v` values evenly spaced over the profile domain `[Q(0), Q(d)]`, endpoints included.
pub fn profile_domain_grid(cm: &CanonicalMixture, points: usize) -> Vec<Probability> {
    let lo = cm.cdf(0.0);
    let hi = cm.cdf(cm.d());
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let v = if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            Probability::saturating(v)
        })
        .collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// `d/2 ≤ r* < d`.
pub fn check_r_star_location(cm: &CanonicalMixture) -> bool {
    let r = median_r_star(cm);
    r >= 0.5 * cm.d() && r < cm.d()
}

/// `t ↦ μ₊(H⁺_{d−t}) / μ(H⁺_{d−t})` strictly decreasing on a uniform grid of `[0, d/2]`.
pub fn check_halfspace_ratio_monotone(cm: &CanonicalMixture, grid_size: usize) -> bool {
    let d = cm.d();
    let ratios: Vec<f64> = grid(0.0, 0.5 * d, grid_size.max(100))
        .map(|t| cm.perimeter(d - t) / cm.upper(d - t))
        .collect();
    ratios.windows(2).all(|w| w[1] < w[0])
}

/// `(log J)'' < 0` on a uniform grid of `[0, d/2]`, where
/// `J(x) = a·∫_{−∞}^x e^{−t²/2} dt + ∫_{−∞}^x e^{−(t−d)²/2} dt`.
pub fn check_local_logconcavity(a_ratio: f64, d: f64, grid_size: usize) -> bool {
    let sqrt_2pi = 1.0 / sf::FRAC_1_SQRT_2PI;
    let numerator = |x: f64| {
        let g0 = (-0.5 * x * x).exp();
        let g1 = (-0.5 * (x - d) * (x - d)).exp();
        let j = sqrt_2pi * (a_ratio * sf::cdf(x) + sf::cdf(x - d));
        let j1 = a_ratio * g0 + g1;
        let j2 = -a_ratio * x * g0 - (x - d) * g1;
        (j * j2 - j1 * j1) / (j * j)
    };
    grid(0.0, 0.5 * d, grid_size.max(100)).all(|x| numerator(x) < 0.0)
}

/// `exp((x²−1)/2) < x + e^{−x²/2} / ∫_{−∞}^x e^{−t²/2} dt` on a uniform grid of `[0, 1]`.
pub fn check_ode_inequality(grid_size: usize) -> bool {
    grid(0.0, 1.0, grid_size.max(100)).all(|x| (0.5 * (x * x - 1.0)).exp() < x + sf::cdf_hazard(x))
}

/// Outcome of the four inequality checks for one canonical mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityChecks {
    /// `exp((x²−1)/2) < x + f/F` on `[0, 1]`.
    pub ode_inequality: bool,
    /// Strict log-concavity of `J` on `[0, d/2]` with `a = (1−m)/m`.
    pub local_logconcavity: bool,
    /// Strict decrease of the upper half-space ratio on `[0, d/2]`.
    pub halfspace_ratio_monotone: bool,
    /// `r* ∈ [d/2, d)`.
    pub r_star_location: bool,
}

impl InequalityChecks {
    pub fn run(cm: &CanonicalMixture, grid_size: usize) -> Self {
        Self {
            ode_inequality: check_ode_inequality(grid_size),
            local_logconcavity: check_local_logconcavity(cm.q_weight() / cm.m(), cm.d(), grid_size),
            halfspace_ratio_monotone: check_halfspace_ratio_monotone(cm, grid_size),
            r_star_location: check_r_star_location(cm),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.ode_inequality && self.local_logconcavity && self.halfspace_ratio_monotone && self.r_star_location
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::pdf;

    fn cm(m: f64, d: f64) -> CanonicalMixture {
        CanonicalMixture::new(m, d).unwrap()
    }

    #[test]
    fn r_star_examples() {
        for d in [0.3, 1.0, 2.0, 7.0] {
            assert_eq!(median_r_star(&cm(0.5, d)), d / 2.0);
        }
        let c = cm(0.3, 2.0);
        let r = median_r_star(&c);
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c.cdf(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((r - lo).abs() < 1e-13);
        assert!((c.cdf(r) - 0.5).abs() <= 1e-13);
        for d in [1.0, 2.0, 4.0] {
            assert!((median_r_star(&cm(0.5 - 1e-6, d)) - d / 2.0).abs() <= 1e-4);
        }
    }

    #[test]
    fn degenerate_median_is_an_error() {
        let spec = MixtureSpec::new(0.0, vec![0.0], vec![1.0]).unwrap();
        let canon = canonicalize(&spec).unwrap();
        assert_eq!(median_of(&canon), Err(Error::Degenerate));
    }

    #[test]
    fn symmetric_minimizer() {
        let s = find_minimizers(&cm(0.5, 3.0));
        assert_eq!(s.minimizers, vec![1.5]);
        let exact = SQRT_2_OVER_PI * (-9.0f64 / 8.0).exp();
        assert!((s.h - exact).abs() < 1e-14);
        assert!((s.h - 0.259_036).abs() < 1e-6);
    }

    #[test]
    fn small_distance_has_endpoint_minimizer() {
        let c = cm(0.3, 1.0);
        let s = find_minimizers(&c);
        assert_eq!(s.minimizers.len(), 1);
        assert_eq!(s.minimizers[0], s.r_star);
        let n = 1_000_000;
        let brute = (0..=n)
            .map(|i| c.log_ratio_f(s.r_star * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        assert!((brute - s.h).abs() < 1e-9);
    }

    #[test]
    fn interior_minimum_for_large_distance() {
        for m in [0.1, 0.3] {
            for d in [10.0, 12.0] {
                let s = find_minimizers(&cm(m, d));
                assert!(!s.minimizers.contains(&0.0));
                assert!(s.minimizers.iter().all(|&t| t > 0.0 && t < s.r_star));
            }
        }
    }

    #[test]
    fn critical_points_are_zeros_of_f_derivative() {
        let c = cm(0.2, 4.0);
        let r_star = median_r_star(&c);
        let zeros = interior_critical_points(&c, r_star);
        assert!(!zeros.is_empty());
        for z in zeros {
            assert!(c.f_derivative(z).abs() < 1e-10);
        }
    }

    #[test]
    fn two_basins_near_the_known_tie() {
        let s = find_minimizers(&cm(0.075, 3.0));
        let (left, right) = s.competing_basins();
        let (left, right) = (left.unwrap(), right.unwrap());
        assert!((left.value - right.value).abs() < 5e-3);
        assert!(left.location > 0.0 && left.location < 1.0);
    }

    #[test]
    fn degenerate_solution() {
        let spec = MixtureSpec::new(0.0, vec![7.0, 1.0], vec![0.0, 5.0]).unwrap();
        let sol = cheeger(&spec).unwrap();
        assert!(sol.degenerate_gaussian && sol.unique);
        assert_eq!(sol.h, SQRT_2_OVER_PI);
        assert_eq!(sol.halfspaces[0].c, 0.0);
        assert_eq!(sol.halfspaces[0].nu, vec![1.0, 0.0]);
    }

    #[test]
    fn symmetric_planar_example() {
        let spec = MixtureSpec::on_axis(0.5, 2.0, 2).unwrap();
        let sol = cheeger(&spec).unwrap();
        assert!((sol.h - SQRT_2_OVER_PI * (-0.5f64).exp()).abs() < 1e-14);
        assert!((sol.h - 0.483_941).abs() < 1e-6);
        assert_eq!(sol.halfspaces.len(), 2);
        assert_eq!(sol.halfspaces[0].c, 1.0);
        assert_eq!(sol.halfspaces[0].nu, vec![1.0, 0.0]);
    }

    #[test]
    fn relabelled_mixture_gives_the_same_cut() {
        let first = cheeger(&MixtureSpec::on_axis(0.7, 3.0, 1).unwrap()).unwrap();
        let second = cheeger(&MixtureSpec::new(0.3, vec![3.0], vec![0.0]).unwrap()).unwrap();
        assert!((first.h - second.h).abs() < 1e-14);
        // both cut {x < 3 − t} (and its complement) along the same line
        for (h1, h2) in first.halfspaces.iter().zip(&second.halfspaces) {
            assert_eq!(h1.nu, vec![-1.0]);
            assert!((h1.c - h2.c).abs() < 1e-12);
            let x1 = -h1.c;
            let t = first.minimizers[0];
            assert!((x1 - (3.0 - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_examples() {
        let c = cm(0.3, 2.0);
        let r_star = median_r_star(&c);
        let half = iso_profile(&c, &[Probability::new(0.5).unwrap()]).unwrap();
        assert!((half[0].iso - c.perimeter(r_star)).abs() < 1e-14);

        let tiny = cm(0.3, 1e-7);
        let v = Probability::new(tiny.cdf(0.0) + 1e-8).unwrap();
        let p = iso_profile(&tiny, &[v]).unwrap();
        assert!((p[0].iso - pdf(sf::quantile(v.value()))).abs() < 1e-6);

        let err = iso_profile(&c, &[Probability::new(0.99).unwrap()]).unwrap_err();
        assert!(matches!(err, Error::VolumeOutOfRange { .. }));
        assert!(err.to_string().contains("profile domain"));
    }

    #[test]
    fn profile_matches_perpendicular_scan() {
        let c = cm(0.3, 2.0);
        let v = 0.4;
        let iso = iso_profile(&c, &[Probability::new(v).unwrap()]).unwrap()[0].iso;
        let n = 1_000_000;
        let best = (0..=n)
            .map(|i| 2.0 * i as f64 / n as f64)
            .map(|r| (c.cdf(r), c.perimeter(r)))
            .filter(|(vol, _)| (vol - v).abs() <= 1e-6)
            .min_by(|x, y| (x.0 - v).abs().total_cmp(&(y.0 - v).abs()))
            .unwrap();
        assert!((best.1 - iso).abs() < 1e-6);
    }

    #[test]
    fn lemma_checks_on_parameter_table() {
        for m in [0.1, 0.3, 0.5] {
            for d in [0.5, 1.0, 2.0, 3.0, 5.0] {
                let checks = InequalityChecks::run(&cm(m, d), 1000);
                assert!(checks.all_pass(), "m = {m}, d = {d}: {checks:?}");
            }
        }
        assert!(check_local_logconcavity(1.0, 4.0, 1000));
        assert!(check_ode_inequality(100));
        assert!((-0.5f64).exp() < sf::cdf_hazard(0.0));
        assert!(((-0.5f64).exp() - 0.6065).abs() < 1e-4);
    }

    #[test]
    fn halfspace_geometry() {
        let hs = HalfSpace::new(vec![3.0, 4.0], 1.0, Side::Minus).unwrap();
        assert!((hs.nu[0] - 0.6).abs() < 1e-16);
        assert!(hs.contains(&[0.0, 0.0]));
        assert!(!hs.contains(&[3.0, 4.0]));
        assert!((hs.distance(&[3.0, 4.0]) - 4.0).abs() < 1e-15);
        assert!(HalfSpace::new(vec![0.0, 0.0], 1.0, Side::Plus).is_err());
    }
}
