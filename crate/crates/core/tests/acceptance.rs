//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::Command;
use std::time::{Duration, Instant};

use cheeger_mix::oracle::{
    halfspace_measure, halfspace_perimeter, shift_bounds_check, shifted_gaussian_measure, verify_cheeger_lower_bound,
    TestSet, VerifyOptions, EQUALITY_TOL, EXACT_SLACK,
};
use cheeger_mix::scanner::{scan_grid, tie_locus};
use cheeger_mix::solver::{
    check_halfspace_ratio_monotone, check_local_logconcavity, check_ode_inequality, check_r_star_location,
    iso_profile, profile_domain_grid,
};
use cheeger_mix::special_fn::{cdf, SQRT_2_OVER_PI};
use cheeger_mix::{cheeger, find_minimizers, CanonicalMixture, HalfSpace, MixtureSpec, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn run(id: u32, title: &str, limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let ok = result.ok && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / {:.0} s", l.as_secs_f64()));
    println!(
        "criterion {id:>2} {}  {title}  [{:.2} s{budget}]  {}{}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        result.detail,
        if in_time { "" } else { "  (over time budget)" }
    );
    ok
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn symmetric_closed_form() -> Outcome {
    let mut worst_h: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    let mut all_unique = true;
    for i in 1..=50 {
        let d = 6.0 * i as f64 / 50.0;
        let sol = cheeger(&MixtureSpec::on_axis(0.5, d, 1).unwrap()).unwrap();
        worst_h = worst_h.max((sol.h - SQRT_2_OVER_PI * (-d * d / 8.0).exp()).abs());
        all_unique &= sol.minimizers.len() == 1;
        worst_t = worst_t.max((sol.minimizers[0] - 0.5 * d).abs());
    }
    outcome(
        worst_h <= 1e-12 && worst_t <= 1e-10 && all_unique,
        format!("max |h - closed form| = {worst_h:.2e}, max |t - d/2| = {worst_t:.2e}"),
    )
}

fn degenerate_limit() -> Outcome {
    let specs = [
        MixtureSpec::new(0.0, vec![0.0], vec![3.0]).unwrap(),
        MixtureSpec::new(1.0, vec![1.0, -2.0], vec![5.0, 5.0]).unwrap(),
        MixtureSpec::new(0.3, vec![0.7, 0.7, 0.7], vec![0.7, 0.7, 0.7]).unwrap(),
        MixtureSpec::new(0.0, vec![0.0, 0.0], vec![0.0, 5.0]).unwrap(),
    ];
    let worst = specs
        .iter()
        .map(|s| {
            let sol = cheeger(s).unwrap();
            assert!(sol.degenerate_gaussian);
            (sol.h - (2.0 / std::f64::consts::PI).sqrt()).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-14, format!("max |h - sqrt(2/pi)| = {worst:.2e}"))
}

fn minimizer_count() -> Outcome {
    let records = scan_grid(0.01, 0.99, 0.05, 8.0, 200, 200).unwrap();
    let twos = records.iter().filter(|r| r.n_min == 2).count();
    let bad = records.iter().filter(|r| !(1..=2).contains(&r.n_min)).count();
    outcome(
        bad == 0 && records.len() == 40_000,
        format!("{} cells, {twos} with two minimizers, {bad} outside {{1, 2}}", records.len()),
    )
}

fn two_set_locus() -> Outcome {
    let p = match tie_locus(3.0, (0.05, 0.10)) {
        Ok(p) => p,
        Err(e) => return outcome(false, e.to_string()),
    };
    let sol = cheeger(&MixtureSpec::on_axis(p, 3.0, 1).unwrap()).unwrap();
    outcome(
        (p - 0.075).abs() <= 0.005 && sol.minimizers.len() == 2,
        format!("p_hat = {p:.12}, minimizers {:?}", sol.minimizers),
    )
}

fn grid_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let m = 0.5 - rng.random_range(0.0..0.5);
        let d = 10.0 - rng.random_range(0.0..10.0);
        let cm = CanonicalMixture::new(m, d).unwrap();
        let search = find_minimizers(&cm);
        let grid_min = (0..=n)
            .map(|i| cm.log_ratio_f(search.r_star * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max((grid_min - search.h).abs());
    }
    outcome(worst <= 1e-8, format!("max |h - grid min| = {worst:.2e} over 200 mixtures"))
}

fn lemma_checks() -> Outcome {
    let grid = 10_000;
    let ode = check_ode_inequality(grid);
    let mut concave = true;
    let mut monotone = true;
    let mut median = true;
    for a_ratio in [1.0, 2.0, 5.0] {
        for d in [0.5, 2.0, 4.0] {
            concave &= check_local_logconcavity(a_ratio, d, grid);
            let cm = CanonicalMixture::new(1.0 / (1.0 + a_ratio), d).unwrap();
            monotone &= check_halfspace_ratio_monotone(&cm, grid);
            median &= check_r_star_location(&cm);
        }
    }
    outcome(
        ode && concave && monotone && median,
        format!("ode {ode}, log-concavity {concave}, ratio decrease {monotone}, median location {median}"),
    )
}

fn halfspace_optimality() -> Outcome {
    let spec = MixtureSpec::new(0.3, vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]).unwrap();
    let options = VerifyOptions {
        halfspace_trials: 500,
        mc_trials: 100,
        samples: 1_000_000,
        seed: 7,
    };
    let report = verify_cheeger_lower_bound(&spec, &options).unwrap();
    let exact_ok = report.exact_min_ratio.is_some_and(|r| r >= report.h_mu - EXACT_SLACK);
    let optimal_ok = report.optimal_max_deviation <= EQUALITY_TOL;
    outcome(
        report.pass && exact_ok && optimal_ok,
        format!(
            "h = {:.10}, exact min {:.10}, tilted margin {:.3e}, MC min slack {:.3e}, {} violations",
            report.h_mu,
            report.exact_min_ratio.unwrap_or(f64::NAN),
            report.tilted_margin.unwrap_or(f64::NAN),
            report.mc_min_slack.unwrap_or(f64::NAN),
            report.violations.len()
        ),
    )
}

fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / len).collect()
}

fn shift_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut passed = 0;
    for i in 0..50u64 {
        let lambda = rng.random_range(-2.5..2.5);
        let (set, t, n) = match i % 3 {
            0 => {
                let n = 3;
                let c = rng.random_range(-1.5..1.5);
                let hs = HalfSpace::new(unit(&mut rng, n), c, Side::Minus).unwrap();
                (TestSet::Halfspace(hs), c, n)
            }
            1 => {
                let n = 2;
                let lo = rng.random_range(-2.0..0.5);
                let hi = lo + rng.random_range(0.3..2.5);
                let nu = unit(&mut rng, n);
                let g = cdf(hi) - cdf(lo);
                let t = cheeger_mix::special_fn::quantile(g);
                (TestSet::Slab { nu, c_lo: lo, c_hi: hi }, t, n)
            }
            _ => {
                // γ(B(0, R)) = 1 − e^{−R²/2} in the plane
                let n = 2;
                let t = rng.random_range(-1.0..1.5);
                let radius = (-2.0 * (1.0 - cdf(t)).ln()).sqrt();
                (TestSet::Ball { center: vec![0.0; n], radius }, t, n)
            }
        };
        let dir = unit(&mut rng, n);
        let check = shift_bounds_check(t, lambda, &dir, &set, 200_000, 1000 + i).unwrap();
        passed += usize::from(check.pass);
    }
    let t = 0.35;
    let d = 1.8;
    let hs = TestSet::Halfspace(HalfSpace::new(vec![1.0, 0.0, 0.0], t, Side::Minus).unwrap());
    let exact = shifted_gaussian_measure(&hs, -d, &[1.0, 0.0, 0.0]).unwrap();
    let equality = (exact - cdf(t - d)).abs();
    outcome(
        passed == 50 && equality <= 1e-12,
        format!("{passed}/50 randomized checks in band, equality case error {equality:.2e}"),
    )
}

/// Smallest perimeter among planar half-spaces `{x·ν < c}` of volume `v` in the class
/// `γ(E) ≥ ½, γ(E − d e₁) ≤ ½`, over a grid of normal angles.
fn constrained_search(spec: &MixtureSpec, d: f64, v: f64) -> f64 {
    let angles = 2001;
    let mut best = f64::INFINITY;
    for k in 0..angles {
        let theta = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * k as f64 / (angles - 1) as f64;
        let nu = vec![theta.cos(), theta.sin()];
        let (mut lo, mut hi) = (-20.0, 20.0 + d);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let hs = HalfSpace {
                nu: nu.clone(),
                c: mid,
                side: Side::Minus,
            };
            if halfspace_measure(spec, &hs).value() < v {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let c = 0.5 * (lo + hi);
        let in_class = c >= 0.0 && c - d * nu[0] <= 0.0;
        if in_class {
            let hs = HalfSpace { nu, c, side: Side::Minus };
            best = best.min(halfspace_perimeter(spec, &hs));
        }
    }
    best
}

fn isoperimetric_profile() -> Outcome {
    let (m, d) = (0.35, 2.5);
    let cm = CanonicalMixture::new(m, d).unwrap();
    let spec = MixtureSpec::on_axis(m, d, 2).unwrap();
    let volumes = profile_domain_grid(&cm, 20);
    let profile = iso_profile(&cm, &volumes).unwrap();
    let worst = profile
        .iter()
        .map(|pt| (pt.iso - constrained_search(&spec, d, pt.v.value())).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-6, format!("max |I(v) - search| = {worst:.2e} at 20 volumes"))
}

fn bin(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cheeger-mix"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn reproducibility() -> Outcome {
    let commands: [&[&str]; 6] = [
        &["compute", "--p", "0.3", "--a", "0,0,0", "--b", "2,0,0", "--format", "json"],
        &["profile", "--m", "0.3", "--d", "2", "--points", "50", "--format", "csv"],
        &["scan", "--np", "20", "--nd", "20", "--format", "csv"],
        &[
            "verify", "--p", "0.3", "--a", "0,0,0", "--b", "2,0,0", "--halfspace-trials", "200", "--mc-trials", "6",
            "--samples", "100000", "--seed", "17", "--format", "json",
        ],
        &["locus", "--d", "3", "--format", "json"],
        &["checks", "--m", "0.3", "--d", "3", "--format", "json"],
    ];
    let mut identical = 0;
    for args in commands {
        let first = bin(args);
        let second = bin(args);
        if first.0 == Some(0) && first == second && !first.1.is_empty() {
            identical += 1;
        }
    }
    let spec = MixtureSpec::on_axis(0.25, 2.5, 2).unwrap();
    let opts = VerifyOptions {
        halfspace_trials: 100,
        mc_trials: 4,
        samples: 50_000,
        seed: 3,
    };
    let a = serde_json::to_string(&verify_cheeger_lower_bound(&spec, &opts).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_cheeger_lower_bound(&spec, &opts).unwrap()).unwrap();
    outcome(
        identical == commands.len() && a == b,
        format!("{identical}/{} commands byte-identical, library report identical: {}", commands.len(), a == b),
    )
}

fn main() {
    let results = [
        run(1, "symmetric closed form", secs(1), symmetric_closed_form),
        run(2, "degenerate limit", None, degenerate_limit),
        run(3, "at most two minimizers on 200x200 grid", secs(60), minimizer_count),
        run(4, "two-Cheeger-set locus at d = 3", secs(5), two_set_locus),
        run(5, "dense grid oracle", secs(120), grid_oracle),
        run(6, "inequality checks", secs(5), lemma_checks),
        run(7, "half-space optimality in R^3", secs(120), halfspace_optimality),
        run(8, "shift inequality", secs(60), shift_inequality),
        run(9, "restricted isoperimetric profile", secs(10), isoperimetric_profile),
        run(10, "reproducibility", None, reproducibility),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
