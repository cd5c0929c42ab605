//! Exhaustive consistency suite. Every check is tallied by name; a failure
//! is recorded with its instance instead of aborting the run.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::minor_sum_m;
use crate::correlation::{
    block_decomposition, correlation_poly, fundamental_period, overlap_coeffs, truncations, OverlapKind,
};
use crate::error::Result;
use crate::higher_block::{apply_forbid, build_tk, BlockContext, ForbidSet, ShiftMatrixK};
use crate::oracle::operator_charpoly;
use crate::sft::{char_poly_t, enumerate_admissible, SftSpec, Word};
use crate::span::{rank_exact, SpanBasis};

pub const INTERTWINING: &str = "psi_k intertwines T and T_k";
pub const LAST_SYMBOL_IMAGE: &str = "T_k^(k-1) sends each state to psi of its last symbol";
pub const FIRST_ENTRY: &str = "orbit enters span psi at step h(w)";
pub const ENTRY_IMAGE: &str = "orbit enters span psi exactly at psi of the symbol after the h-prefix";
pub const H_BOUNDS: &str = "k - r <= h(w) <= k - 1";
pub const OVERLAP_PERIODS: &str = "overlap shifts are period multiples or near the end";
pub const BLOCK_COPIES: &str = "full period blocks occur only at period multiples";
pub const BASIS_BUILT: &str = "invariant basis and case classification succeed";
pub const BASIS_INDEPENDENT: &str = "basis vectors are independent";
pub const BASIS_CLOSED: &str = "perturbed operator maps the basis span into itself";
pub const QUOTIENT_NILPOTENT: &str = "perturbed operator is nilpotent modulo the basis span";
pub const TRUNCATIONS: &str = "p = t^(d-i) q^i + r^i for every relation exponent";
pub const DEGREE_LAW: &str = "deg X = r + d1 + d2 and m = dim V_k - deg X";
pub const CORNER_DETERMINANT: &str = "delta equals the signed determinant of the correlation block";
pub const MINOR_SUM: &str = "X - delta * chi_T equals the signed minor sum M";
pub const ORACLE: &str = "X(t) = delta * chi_T + M times t^m matches the brute-force characteristic polynomial";

/// Deliberate corruption for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tamper {
    /// Negate `X(t)` before the oracle comparison.
    NegateX,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub word_k_max: usize,
    pub pair_k_max: usize,
    pub oracle: bool,
    pub tamper: Option<Tamper>,
}

impl VerifyOptions {
    /// Pairs stop at `k = 6`, where `T_k` has at most `r^7` states.
    pub fn new(k_max: usize) -> Self {
        VerifyOptions { word_k_max: k_max, pair_k_max: k_max.min(6), oracle: true, tamper: None }
    }
}

/// Failure instances kept per check name.
const KEPT_FAILURES: usize = 10;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
    pub examples: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub tallies: BTreeMap<String, Tally>,
}

impl VerifyReport {
    fn record(&mut self, name: &str, passed: bool, instance: impl FnOnce() -> String) {
        let t = self.tallies.entry(name.to_string()).or_default();
        t.checked += 1;
        if !passed {
            t.failed += 1;
            if t.examples.len() < KEPT_FAILURES {
                t.examples.push(instance());
            }
        }
    }

    fn merge(&mut self, other: VerifyReport) {
        for (name, t) in other.tallies {
            let e = self.tallies.entry(name).or_default();
            e.checked += t.checked;
            e.failed += t.failed;
            let room = KEPT_FAILURES.saturating_sub(e.examples.len());
            e.examples.extend(t.examples.into_iter().take(room));
        }
    }

    pub fn passed(&self) -> bool {
        self.tallies.values().all(|t| t.failed == 0)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = (&str, &Tally)> {
        self.tallies.iter().filter(|(_, t)| t.failed > 0).map(|(n, t)| (n.as_str(), t))
    }

    pub fn tally(&self, name: &str) -> Option<&Tally> {
        self.tallies.get(name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, t) in &self.tallies {
            let status = if t.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {name}: {} checked, {} failed", t.checked, t.failed)?;
            for ex in &t.examples {
                writeln!(f, "    {ex}")?;
            }
        }
        Ok(())
    }
}

/// Vectors constant on each first-symbol block, i.e. members of span psi.
fn in_psi_span(tk: &ShiftMatrixK, v: &[i64]) -> bool {
    let mut seen: BTreeMap<u8, i64> = BTreeMap::new();
    tk.states().iter().zip(v).all(|(s, &x)| *seen.entry(s.first()).or_insert(x) == x)
}

fn state_checks(ctx: &BlockContext, tk: &ShiftMatrixK, report: &mut VerifyReport) {
    let spec = ctx.spec();
    let k = ctx.k();
    let label = |w: &Word| format!("k={k} state {}", spec.render(w));
    for a in 0..spec.r() as u8 {
        let lhs = tk.apply(&tk.psi(a));
        let mut rhs = vec![0i64; tk.dim()];
        for b in spec.successors(a) {
            for (x, y) in rhs.iter_mut().zip(tk.psi(b)) {
                *x += y;
            }
        }
        report.record(INTERTWINING, lhs == rhs, || format!("k={k} symbol {}", spec.symbols()[a as usize]));
    }
    let r = spec.r();
    for w in tk.states() {
        let h = ctx.h(w);
        let mut v = tk.unit(w);
        let mut first = None;
        let mut at_first = None;
        for i in 0..k {
            if first.is_none() && in_psi_span(tk, &v) {
                first = Some(i);
                at_first = Some(v.clone());
            }
            if i + 1 < k {
                v = tk.apply(&v);
            }
        }
        report.record(FIRST_ENTRY, first == Some(h), || format!("{} h={h} first={first:?}", label(w)));
        let target = w.symbols().get(h).map(|&a| tk.psi(a));
        report.record(ENTRY_IMAGE, at_first.is_some() && at_first == target, || label(w));
        report.record(LAST_SYMBOL_IMAGE, v == tk.psi(w.last()), || label(w));
        if ctx.irreducible_noncycle() {
            report.record(H_BOUNDS, h + r >= k && h < k, || format!("{} h={h}", label(w)));
        }
    }
}

fn word_checks(w: &Word, k: usize, render: &str, report: &mut VerifyReport) {
    let d = k - 1;
    let Ok(c) = overlap_coeffs(w, w, d, OverlapKind::SelfOverlap) else { return };
    let Ok(p) = fundamental_period(w, d) else { return };
    let ok = (1..=d).all(|i| c[d - i] == 0 || i % p == 0 || i + p >= k + 2);
    report.record(OVERLAP_PERIODS, ok, || format!("k={k} word {render} period {p}"));
    if p <= k {
        let bd = block_decomposition(w, p);
        let s = w.symbols();
        let ok = (0..=s.len() - p).all(|i| s[i..i + p] != *bd.block.symbols() || i % p == 0);
        report.record(BLOCK_COPIES, ok, || format!("k={k} word {render} period {p}"));
    }
}

fn instance_checks(
    ctx: &BlockContext,
    tk: &ShiftMatrixK,
    c: &ForbidSet,
    opts: &VerifyOptions,
) -> VerifyReport {
    let spec = ctx.spec();
    let k = ctx.k();
    let names: Vec<String> = c.words().iter().map(|w| spec.render(w)).collect();
    let label = format!("k={k} {{{}}}", names.join(", "));
    let mut report = VerifyReport::default();
    if c.words().len() == 1 {
        word_checks(&c.words()[0], k, &names[0], &mut report);
    }

    let x = match ctx.perturbed_charpoly(c) {
        Ok(x) => x,
        Err(e) => {
            report.record(BASIS_BUILT, false, || format!("{label}: {e}"));
            return report;
        }
    };
    report.record(BASIS_BUILT, true, String::new);
    let basis = &x.basis;
    if basis.d2.is_some() {
        match ctx.pair_checks(basis) {
            Ok(checks) => {
                for check in checks {
                    report.record(&check.name, check.passed, || format!("{label} case {}", basis.case_tag));
                }
            }
            Err(e) => report.record(BASIS_BUILT, false, || format!("{label}: {e}")),
        }
    }

    let vectors = basis.dense_vectors(tk);
    report.record(BASIS_INDEPENDENT, rank_exact(&vectors) == vectors.len(), || label.clone());
    let perturbed = match apply_forbid(tk, c) {
        Ok(p) => p,
        Err(e) => {
            report.record(BASIS_CLOSED, false, || format!("{label}: {e}"));
            return report;
        }
    };
    let mut span = SpanBasis::new(tk.dim());
    for v in &vectors {
        span.push(v.clone());
    }
    let closed = vectors.iter().all(|v| span.contains(&perturbed.apply(v)));
    report.record(BASIS_CLOSED, closed, || label.clone());
    let quotient_dim = tk.dim() - span.len();
    let nilpotent = tk.states().iter().all(|w| {
        let mut v = tk.unit(w);
        for _ in 0..=quotient_dim {
            if span.contains(&v) {
                return true;
            }
            v = perturbed.apply(&v);
        }
        false
    });
    report.record(QUOTIENT_NILPOTENT, nilpotent, || label.clone());

    let zero_c21 = vec![0u8; x.corr.c11.len()];
    let c21 = x.corr.c21.as_ref().unwrap_or(&zero_c21);
    let d = x.corr.c11.len() - 1;
    let truncations_ok = basis.alphas.keys().all(|&i| {
        [&x.corr.c11, c21].iter().all(|c| {
            let (q, r) = truncations(c, i);
            &q.shift(d - i) + &r == correlation_poly(c)
        })
    });
    report.record(TRUNCATIONS, truncations_ok, || label.clone());

    let r = spec.r();
    let expected_degree = r + basis.d1 + basis.d2.unwrap_or(0);
    let degree_ok = x.x.degree() == Some(expected_degree)
        && x.nilpotent_exponent as u128 + expected_degree as u128 == ctx.dim_vk();
    report.record(DEGREE_LAW, degree_ok, || format!("{label} deg {:?}", x.x.degree()));

    let borders = x.bordered.m();
    let corner_sign = BigInt::from(if borders % 2 == 0 { 1 } else { -1 });
    let corner = x.bordered.corner().det_bareiss().scale(&corner_sign);
    report.record(CORNER_DETERMINANT, corner == x.delta, || label.clone());

    let chi = char_poly_t(spec);
    let m = minor_sum_m(&x.bordered, x.sign);
    report.record(MINOR_SUM, &x.x - &(&x.delta * &chi) == m, || label.clone());

    if opts.oracle {
        let mut structured = x.x.clone();
        if opts.tamper == Some(Tamper::NegateX) {
            structured = -structured;
        }
        let ok = operator_charpoly(&perturbed)
            .map(|brute| brute == structured.shift(x.nilpotent_exponent))
            .unwrap_or(false);
        report.record(ORACLE, ok, || format!("{label} X = {}", structured));
    }
    report
}

pub fn verify_with(spec: &SftSpec, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for k in 1..=opts.word_k_max.max(opts.pair_k_max) {
        let ctx = BlockContext::new(spec, k)?;
        let tk = build_tk(spec, k)?;
        state_checks(&ctx, &tk, &mut report);
        let words = enumerate_admissible(spec, k + 1)?;
        let mut sets: Vec<Vec<Word>> = Vec::new();
        if k <= opts.word_k_max {
            sets.extend(words.iter().map(|w| vec![w.clone()]));
        }
        if k <= opts.pair_k_max {
            for (i, w1) in words.iter().enumerate() {
                sets.extend(words[i + 1..].iter().map(|w2| vec![w1.clone(), w2.clone()]));
            }
        }
        let partial = sets
            .into_par_iter()
            .map(|ws| -> Result<VerifyReport> {
                let c = ForbidSet::new(spec, ws)?;
                Ok(instance_checks(&ctx, &tk, &c, opts))
            })
            .try_reduce(VerifyReport::default, |mut a, b| {
                a.merge(b);
                Ok(a)
            })?;
        report.merge(partial);
    }
    Ok(report)
}

/// Every check with one-word instances up to `k_max` and pairs up to
/// `min(k_max, 6)`.
pub fn verify_suite(spec: &SftSpec, k_max: usize) -> Result<VerifyReport> {
    verify_with(spec, &VerifyOptions::new(k_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        for spec in [SftSpec::full(2), SftSpec::golden_mean()] {
            let report = verify_suite(&spec, 3).unwrap();
            assert!(report.passed(), "{report}");
            for name in [INTERTWINING, FIRST_ENTRY, BASIS_CLOSED, QUOTIENT_NILPOTENT, ORACLE, MINOR_SUM] {
                assert!(report.tally(name).unwrap().checked > 0, "{name}");
            }
        }
    }

    #[test]
    fn negated_x_fails_oracle_check() {
        let opts = VerifyOptions { tamper: Some(Tamper::NegateX), ..VerifyOptions::new(2) };
        let report = verify_with(&SftSpec::full(2), &opts).unwrap();
        assert!(!report.passed());
        let failed: Vec<&str> = report.failed_checks().map(|(n, _)| n).collect();
        assert_eq!(failed, [ORACLE]);
        assert!(ORACLE.contains("delta * chi_T + M"));
    }
}
