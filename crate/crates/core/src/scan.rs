//! Bound-validation scans over forbidden words and pairs, with CSV output,
//! per-`k` summaries and the non-divergence envelope rule.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::PerturbedCharPoly;
use crate::correlation::{correlation_poly, delta_poly, f_polys, overlap_coeffs, CorrelationSet, OverlapKind};
use crate::error::{Error, Result};
use crate::higher_block::{BlockContext, ForbidSet};
use crate::sft::{enumerate_admissible, SftSpec, Word};
use crate::spectra::{
    annulus_max_ratio, circle_min_ratio, shift_spectrum, ShiftSpectrum, SpectralReport, CIRCLE_SAMPLES,
};

pub const DEFAULT_BUDGET: usize = 10_000;

/// Later maxima may exceed earlier maxima by at most this factor.
pub const ENVELOPE_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    OneWord,
    TwoWord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    pub mode: ScanMode,
    pub k_min: usize,
    pub k_max: usize,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSummary {
    pub k: usize,
    pub candidates: u64,
    pub instances: usize,
    pub exhaustive: bool,
    pub max_scaled_one: f64,
    pub max_scaled_two: f64,
    pub min_lambda1: f64,
    pub max_lambda1: f64,
    pub all_above_rho: bool,
    pub cases: BTreeMap<String, usize>,
    /// `max |M(t)| / (1 + |t|^d1 + |t|^d2)` on `ρ <= |t| <= λ0`.
    pub m_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelope {
    pub early: (usize, usize),
    pub late: (usize, usize),
    pub early_max: f64,
    pub late_max: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanMeta {
    pub config: ScanConfig,
    pub lambda0: f64,
    pub rho: f64,
    pub summaries: Vec<KSummary>,
    /// One-word mode: maxima of `scaled_one` grouped by `d1`.
    pub max_scaled_one_by_d1: BTreeMap<usize, f64>,
    /// Smallest `k0` with `λ1 >= ρ` on every instance at every scanned
    /// `k >= k0`.
    pub rho_threshold: Option<usize>,
    pub envelope: Option<Envelope>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOutput {
    pub reports: Vec<SpectralReport>,
    pub meta: ScanMeta,
}

/// Number of annulus radii used for the `M` constant.
const ANNULUS_RADII: usize = 4;

fn pair_from_rank(rank: u64, n: u64) -> (usize, usize) {
    // Row i holds pairs (i, j), j > i; row i starts at i*n - i*(i+1)/2.
    let mut i = 0u64;
    let mut start = 0u64;
    while start + (n - 1 - i) <= rank {
        start += n - 1 - i;
        i += 1;
    }
    (i as usize, (i + 1 + rank - start) as usize)
}

/// The forbidden sets scanned at one `k`, and whether they are all of them.
pub fn instances(spec: &SftSpec, mode: ScanMode, k: usize, budget: usize, seed: u64) -> Result<(Vec<Vec<Word>>, u64, bool)> {
    let words = enumerate_admissible(spec, k + 1)?;
    let n = words.len() as u64;
    let total = match mode {
        ScanMode::OneWord => n,
        ScanMode::TwoWord => n * n.saturating_sub(1) / 2,
    };
    let exhaustive = total <= budget as u64;
    let ranks: Vec<u64> = if exhaustive {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let len = usize::try_from(total).map_err(|_| Error::Overflow("instance count"))?;
        let mut picked: Vec<u64> = index::sample(&mut rng, len, budget).into_iter().map(|x| x as u64).collect();
        picked.sort_unstable();
        picked
    };
    let sets = ranks
        .into_iter()
        .map(|r| match mode {
            ScanMode::OneWord => vec![words[r as usize].clone()],
            ScanMode::TwoWord => {
                let (i, j) = pair_from_rank(r, n);
                vec![words[i].clone(), words[j].clone()]
            }
        })
        .collect();
    Ok((sets, total, exhaustive))
}

fn m_constant(x: &PerturbedCharPoly, spectrum: &ShiftSpectrum) -> f64 {
    annulus_max_ratio(
        &x.m_poly,
        spectrum.rho,
        spectrum.lambda0.value,
        x.basis.d1,
        x.basis.d2.unwrap_or(0),
        ANNULUS_RADII,
    )
}

/// Rounds to 12 significant digits so CSV output does not depend on the
/// last bits of floating-point evaluation order.
fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.*e}", 11, x).parse::<f64>().map(|v| v.to_string()).unwrap_or_else(|_| x.to_string())
}

pub fn envelope(values: &BTreeMap<usize, f64>, early: RangeInclusive<usize>, late: RangeInclusive<usize>) -> Option<Envelope> {
    let max_in = |r: &RangeInclusive<usize>| {
        values.range(r.clone()).map(|(_, &v)| v).fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    };
    let (e, l) = (max_in(&early)?, max_in(&late)?);
    Some(Envelope {
        early: (*early.start(), *early.end()),
        late: (*late.start(), *late.end()),
        early_max: e,
        late_max: l,
        holds: l <= ENVELOPE_FACTOR * e,
    })
}

/// Early and late halves of `[lo, hi]`, sharing the midpoint.
pub fn split_range(lo: usize, hi: usize) -> (RangeInclusive<usize>, RangeInclusive<usize>) {
    let mid = (lo + hi).div_ceil(2);
    (lo..=mid, mid..=hi)
}

pub fn scan_bounds(spec: &SftSpec, config: &ScanConfig) -> Result<ScanOutput> {
    let spectrum = shift_spectrum(spec)?;
    let mut reports = Vec::new();
    let mut summaries = Vec::new();
    for k in config.k_min.max(1)..=config.k_max {
        let ctx = BlockContext::new(spec, k)?;
        let (sets, candidates, exhaustive) = instances(spec, config.mode, k, config.budget.max(1), config.seed)?;
        let rows: Vec<(SpectralReport, f64)> = sets
            .into_par_iter()
            .map(|words| {
                let c = ForbidSet::new(spec, words)?;
                let x = ctx.perturbed_charpoly(&c)?;
                Ok((SpectralReport::from_charpoly(spec, &spectrum, &x)?, m_constant(&x, &spectrum)))
            })
            .collect::<Result<_>>()?;
        let mut cases = BTreeMap::new();
        for (r, _) in &rows {
            *cases.entry(r.case_tag.to_string()).or_insert(0) += 1;
        }
        let fold = |f: fn(&SpectralReport) -> f64, init: f64, op: fn(f64, f64) -> f64| {
            rows.iter().map(|(r, _)| f(r)).fold(init, op)
        };
        summaries.push(KSummary {
            k,
            candidates,
            instances: rows.len(),
            exhaustive,
            max_scaled_one: fold(|r| r.scaled_one, 0.0, f64::max),
            max_scaled_two: fold(|r| r.scaled_two, 0.0, f64::max),
            min_lambda1: fold(|r| r.lambda1, f64::INFINITY, f64::min),
            max_lambda1: fold(|r| r.lambda1, 0.0, f64::max),
            all_above_rho: rows.iter().all(|(r, _)| r.lambda1 >= spectrum.rho),
            cases,
            m_constant: rows.iter().map(|(_, m)| *m).fold(0.0, f64::max),
        });
        reports.extend(rows.into_iter().map(|(r, _)| r));
    }
    reports.sort_by(|a, b| (a.k, &a.words).cmp(&(b.k, &b.words)));

    let mut by_d1: BTreeMap<usize, f64> = BTreeMap::new();
    if config.mode == ScanMode::OneWord {
        for r in &reports {
            let e = by_d1.entry(r.d1).or_insert(0.0);
            *e = e.max(r.scaled_one);
        }
    }
    let rho_threshold = summaries
        .iter()
        .rev()
        .take_while(|s| s.all_above_rho)
        .last()
        .map(|s| s.k);
    let envelope = match config.mode {
        ScanMode::OneWord => envelope(&by_d1, 2..=5, 5..=10),
        ScanMode::TwoWord => {
            let by_k: BTreeMap<usize, f64> = summaries.iter().map(|s| (s.k, s.max_scaled_two)).collect();
            let (early, late) = split_range(config.k_min, config.k_max);
            envelope(&by_k, early, late)
        }
    };
    let monotone = reports
        .iter()
        .all(|r| r.lambda1 <= r.lambda0 + r.lambda0_radius + r.lambda1_radius);
    Ok(ScanOutput {
        reports,
        meta: ScanMeta {
            config: config.clone(),
            lambda0: spectrum.lambda0.value,
            rho: spectrum.rho,
            summaries,
            max_scaled_one_by_d1: by_d1,
            rho_threshold,
            envelope,
            monotone,
        },
    })
}

pub const CSV_HEADER: [&str; 12] =
    ["k", "w1", "w2", "case", "d1", "d2", "delta", "lambda0", "lambda1", "diff", "scaled_one", "scaled_two"];

pub fn write_csv<W: Write>(reports: &[SpectralReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in reports {
        w.write_record([
            r.k.to_string(),
            r.words[0].clone(),
            r.words.get(1).cloned().unwrap_or_default(),
            r.case_tag.to_string(),
            r.d1.to_string(),
            opt(r.d2),
            opt(r.delta),
            fmt_real(r.lambda0),
            fmt_real(r.lambda1),
            fmt_real(r.diff),
            fmt_real(r.scaled_one),
            fmt_real(r.scaled_two),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path` and the metadata sidecar `path.meta.json`.
pub fn write_scan(output: &ScanOutput, path: &Path) -> Result<()> {
    write_csv(&output.reports, std::fs::File::create(path)?)?;
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta.json");
    let json = serde_json::to_string_pretty(&output.meta).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(meta_path, json + "\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioFloor {
    pub k: usize,
    pub instances: usize,
    /// Minimum over instances and circle samples.
    pub min_ratio: f64,
}

/// `min |Δ(t)| / |t|^(d1 + d2)` on `|t| = ρ` over every pair at each `k`.
pub fn delta_bound_scan(spec: &SftSpec, ks: RangeInclusive<usize>) -> Result<Vec<RatioFloor>> {
    let rho = shift_spectrum(spec)?.rho;
    let mut out = Vec::new();
    for k in ks {
        let ctx = BlockContext::new(spec, k)?;
        let (sets, _, _) = instances(spec, ScanMode::TwoWord, k, usize::MAX, 0)?;
        let count = sets.len();
        let min_ratio = sets
            .into_par_iter()
            .map(|words| {
                let c = ForbidSet::new(spec, words)?;
                let basis = ctx.invariant_basis(&c)?;
                let corr = CorrelationSet::new(&basis)?;
                let f = f_polys(&basis, &corr);
                let delta = delta_poly(&corr, &f);
                let exponent = basis.d1 + basis.d2.unwrap_or(0);
                Ok(circle_min_ratio(&delta, rho, exponent, CIRCLE_SAMPLES))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        out.push(RatioFloor { k, instances: count, min_ratio });
    }
    Ok(out)
}

/// `min |p(t)| / |t|^d` on `|t| = ρ` over every word of length `k + 1`.
pub fn p_bound_scan(spec: &SftSpec, ks: RangeInclusive<usize>) -> Result<Vec<RatioFloor>> {
    let rho = shift_spectrum(spec)?.rho;
    let mut out = Vec::new();
    for k in ks {
        let ctx = BlockContext::new(spec, k)?;
        let words = enumerate_admissible(spec, k + 1)?;
        let min_ratio = words
            .par_iter()
            .map(|w| {
                let d = ctx.h(&w.eta());
                let p = correlation_poly(&overlap_coeffs(w, w, d, OverlapKind::SelfOverlap)?);
                Ok(circle_min_ratio(&p, rho, d, CIRCLE_SAMPLES))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        out.push(RatioFloor { k, instances: words.len(), min_ratio });
    }
    Ok(out)
}

/// Envelope for a floor sequence: later minima stay above half the earlier
/// minimum, and every minimum is positive.
pub fn floor_envelope(floors: &[RatioFloor], early: RangeInclusive<usize>, late: RangeInclusive<usize>) -> Option<Envelope> {
    let min_in = |r: &RangeInclusive<usize>| {
        floors.iter().filter(|f| r.contains(&f.k)).map(|f| f.min_ratio).reduce(f64::min)
    };
    let (e, l) = (min_in(&early)?, min_in(&late)?);
    Some(Envelope {
        early: (*early.start(), *early.end()),
        late: (*late.start(), *late.end()),
        early_max: e,
        late_max: l,
        holds: e > 0.0 && l > 0.0 && l >= e / ENVELOPE_FACTOR,
    })
}
