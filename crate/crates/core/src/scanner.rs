//! Sweeps over the `(p, d)` plane.
//!
//! Each cell is solved independently in canonical form. Two Cheeger sets
//! occur on a curve of measure zero, so ties are located through the sign of
//! `f(t_left) − f(t_right)` between the interior basin and the `r*` basin
//! rather than by sampling.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mixture::CanonicalMixture;
use crate::solver::{find_minimizers, MinimizerSearch};

/// Gap below which a grid point does not count as certifiably unique.
pub const GAP_TOLERANCE: f64 = 1e-6;
/// Spacing of the certificate grid in `uniqueness_threshold`.
pub const THRESHOLD_STEP: f64 = 1e-2;
/// Bisection resolution of `uniqueness_threshold`.
pub const THRESHOLD_RESOLUTION: f64 = 1e-4;
/// Default bisection resolution of `tie_locus`.
pub const TIE_RESOLUTION: f64 = 1e-10;

pub const CSV_HEADER: &str = "p,d,h,r_star,n_min,t1,t2,gap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: f64,
    pub d: f64,
    pub h: f64,
    pub r_star: f64,
    pub minimizers: Vec<f64>,
    pub n_min: usize,
    /// `+∞` when there is a single basin; `null` in JSON.
    #[serde(serialize_with = "gap_out", deserialize_with = "gap_in")]
    pub gap: f64,
}

fn gap_out<S: Serializer>(gap: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if gap.is_finite() {
        s.serialize_f64(*gap)
    } else {
        s.serialize_none()
    }
}

fn gap_in<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

fn canonical(p: f64, d: f64) -> Result<CanonicalMixture> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    CanonicalMixture::new(p.min(1.0 - p), d)
}

/// Solves a single `(p, d)` cell.
pub fn scan_point(p: f64, d: f64) -> Result<ScanRecord> {
    let search = find_minimizers(&canonical(p, d)?);
    Ok(ScanRecord {
        p,
        d,
        h: search.h,
        r_star: search.r_star,
        n_min: search.minimizers.len(),
        minimizers: search.minimizers,
        gap: search.gap,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + step * i as f64 })
}

/// Records for an `np × nd` grid, endpoints included, sorted by `(p, d)`.
pub fn scan_grid(p_lo: f64, p_hi: f64, d_lo: f64, d_hi: f64, np: usize, nd: usize) -> Result<Vec<ScanRecord>> {
    if !(p_lo > 0.0 && p_lo <= p_hi && p_hi < 1.0) {
        return Err(Error::Domain(format!("need 0 < p_lo <= p_hi < 1, got [{p_lo}, {p_hi}]")));
    }
    if !(d_lo > 0.0 && d_lo <= d_hi && d_hi.is_finite()) {
        return Err(Error::Domain(format!("need 0 < d_lo <= d_hi, got [{d_lo}, {d_hi}]")));
    }
    if np < 2 || nd < 2 {
        return Err(Error::Domain("grid needs at least 2 points per axis".into()));
    }
    let cells: Vec<(f64, f64)> = linspace(p_lo, p_hi, np)
        .flat_map(|p| linspace(d_lo, d_hi, nd).map(move |d| (p, d)))
        .collect();
    cells.into_par_iter().map(|(p, d)| scan_point(p, d)).collect()
}

/// `f(t_left) − f(t_right)`; a missing basin counts as losing.
fn tie_signal(search: &MinimizerSearch) -> f64 {
    match search.competing_basins() {
        (Some(left), Some(right)) => left.value - right.value,
        (None, _) => 1.0,
        (_, None) => -1.0,
    }
}

/// Weight `p̂` at which the interior and `r*` basins tie, bisected to [`TIE_RESOLUTION`].
pub fn tie_locus(d: f64, p_bracket: (f64, f64)) -> Result<f64> {
    tie_locus_with_resolution(d, p_bracket, TIE_RESOLUTION)
}

pub fn tie_locus_with_resolution(d: f64, p_bracket: (f64, f64), resolution: f64) -> Result<f64> {
    let (p_lo, p_hi) = (p_bracket.0.min(p_bracket.1), p_bracket.0.max(p_bracket.1));
    let no_tie = || Error::NoTieLocus { d, p_lo, p_hi };
    if !(p_lo > 0.0 && p_hi < 1.0) || !(resolution > 0.0) {
        return Err(Error::Domain(format!("bracket must lie in (0, 1), got ({p_lo}, {p_hi})")));
    }
    if !(d > 2.0) {
        // for d ≤ 2 the function F has no zeros on the positive axis
        return Err(no_tie());
    }
    let signal = |p: f64| -> Result<(f64, bool)> {
        let search = find_minimizers(&canonical(p, d)?);
        let (left, right) = search.competing_basins();
        Ok((tie_signal(&search), left.is_some() && right.is_some()))
    };

    let (s_lo, _) = signal(p_lo)?;
    let (s_hi, _) = signal(p_hi)?;
    if s_lo == 0.0 {
        return Ok(p_lo);
    }
    if s_hi == 0.0 {
        return Ok(p_hi);
    }
    if s_lo.signum() == s_hi.signum() {
        return Err(no_tie());
    }

    let (mut lo, mut hi, mut slo, mut shi) = (p_lo, p_hi, s_lo, s_hi);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        let (s, _) = signal(mid)?;
        if s == 0.0 {
            return Ok(mid);
        }
        if s.signum() == slo.signum() {
            lo = mid;
            slo = s;
        } else {
            hi = mid;
            shi = s;
        }
    }

    // one secant step inside the final bracket, kept only when both basins are tracked
    let (_, tracked_lo) = signal(lo)?;
    let (_, tracked_hi) = signal(hi)?;
    if tracked_lo && tracked_hi {
        let p = lo - slo * (hi - lo) / (shi - slo);
        if p > lo && p < hi {
            return Ok(p);
        }
    }
    if slo.abs() <= shi.abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// `(unique with margin, winner sits at r*)` for one distance.
fn classify(m: f64, d: f64) -> Result<(bool, bool)> {
    let search = find_minimizers(&CanonicalMixture::new(m, d)?);
    let certified = search.minimizers.len() == 1 && search.gap > GAP_TOLERANCE;
    Ok((certified, search.winner().at_r_star))
}

/// Grid-certified surrogate `ĉ(p)` for the distance beyond which the Cheeger set is unique.
///
/// Walks down from `d_hi` in steps of [`THRESHOLD_STEP`]; a point fails when it is
/// not certified unique or when the winning basin jumped sides since the previous
/// point. The first failing cell is bisected to [`THRESHOLD_RESOLUTION`].
pub fn uniqueness_threshold(p: f64, d_hi: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
    }
    if !(d_hi > 0.0 && d_hi.is_finite()) {
        return Err(Error::Domain(format!("d_hi must be positive, got {d_hi}")));
    }
    let m = p.min(1.0 - p);
    if m == 0.5 {
        return Ok(0.0);
    }

    let (ok, mut side) = classify(m, d_hi)?;
    if !ok {
        return Err(Error::NotUniqueAtUpperBound { p, d_hi });
    }
    let steps = (d_hi / THRESHOLD_STEP).floor() as usize;
    let mut good = d_hi;
    for k in 1..=steps {
        let d = d_hi - THRESHOLD_STEP * k as f64;
        if d <= 0.0 {
            break;
        }
        let (ok, s) = classify(m, d)?;
        if ok && s == side {
            good = d;
            side = s;
            continue;
        }
        let (mut lo, mut hi) = (d, good);
        while hi - lo > THRESHOLD_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            let (ok, s) = classify(m, mid)?;
            if ok && s == side {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(hi);
    }
    Ok(0.0)
}

fn push_float(out: &mut String, x: f64) {
    if x.is_finite() {
        write!(out, "{x:.16e}").unwrap();
    } else if x > 0.0 {
        out.push_str("inf");
    } else {
        out.push_str(&x.to_string());
    }
}

/// CSV with header [`CSV_HEADER`]; floats carry 17 significant digits.
pub fn to_csv(records: &[ScanRecord]) -> String {
    let mut out = String::with_capacity(160 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        for x in [r.p, r.d, r.h, r.r_star] {
            push_float(&mut out, x);
            out.push(',');
        }
        write!(out, "{},", r.n_min).unwrap();
        if let Some(&t1) = r.minimizers.first() {
            push_float(&mut out, t1);
        }
        out.push(',');
        if let Some(&t2) = r.minimizers.get(1) {
            push_float(&mut out, t2);
        }
        out.push(',');
        push_float(&mut out, r.gap);
        out.push('\n');
    }
    out
}

/// Parses output of [`to_csv`].
pub fn from_csv(text: &str) -> Result<Vec<ScanRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Domain("missing scan CSV header".into()));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::Domain(format!("bad number in scan CSV: {s:?}")))
    };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(Error::Domain(format!("expected 8 columns, got {}", cols.len())));
            }
            let n_min: usize = cols[4]
                .parse()
                .map_err(|_| Error::Domain(format!("bad n_min: {:?}", cols[4])))?;
            let minimizers = cols[5..7]
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| num(s))
                .collect::<Result<Vec<_>>>()?;
            Ok(ScanRecord {
                p: num(cols[0])?,
                d: num(cols[1])?,
                h: num(cols[2])?,
                r_star: num(cols[3])?,
                minimizers,
                n_min,
                gap: num(cols[7])?,
            })
        })
        .collect()
}

pub fn to_json(records: &[ScanRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}
