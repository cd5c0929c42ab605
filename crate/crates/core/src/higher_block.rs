//! The higher-block operator `T_k` on admissible `k`-words, forbidden-word
//! edits, and the invariant subspace spanned by `ψ_k(V_1)` and the `T_k`
//! orbits of the edited targets.
//!
//! Every vector that enters the invariant-subspace computation is the
//! indicator of a cylinder (all `k`-words with a given prefix): `ψ_k([a])` is
//! the cylinder of `a`, and for `i <= k - 1`, `T_k^i[v]` is the cylinder of
//! `v_{i+1} .. v_k`. Cylinders form a laminar family, so linear algebra on
//! them reduces to small incidence matrices over the atoms of the family
//! instead of vectors of length `dim V_k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::correlation::{is_simple, overlap_coeffs, OverlapKind};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::sft::{enumerate_admissible, h_index_with, validate_sft, SftSpec, Word, WordCounts};
use crate::span::SpanBasis;

/// `T_k` stored by columns: `columns[v]` lists the rows `u` with entry
/// `(u, v) = 1`, i.e. the shift successors of state `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftMatrixK {
    spec: SftSpec,
    k: usize,
    states: Vec<Word>,
    columns: Vec<Vec<usize>>,
}

pub fn build_tk(spec: &SftSpec, k: usize) -> Result<ShiftMatrixK> {
    let states = enumerate_admissible(spec, k)?;
    let mut columns = Vec::with_capacity(states.len());
    for v in &states {
        let mut succ = Vec::new();
        for x in spec.successors(v.last()) {
            let mut u = v.symbols()[1..].to_vec();
            u.push(x);
            let idx = states
                .binary_search(&Word::new(u))
                .expect("successor of an admissible state is admissible");
            succ.push(idx);
        }
        succ.sort_unstable();
        columns.push(succ);
    }
    Ok(ShiftMatrixK { spec: spec.clone(), k, states, columns })
}

impl ShiftMatrixK {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.states.binary_search(w).ok()
    }

    pub fn entry(&self, u: usize, v: usize) -> bool {
        self.columns[v].binary_search(&u).is_ok()
    }

    pub fn ones(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, v: usize) -> &[usize] {
        &self.columns[v]
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let mut y = vec![0i64; self.dim()];
        for (v, col) in self.columns.iter().enumerate() {
            if x[v] != 0 {
                for &u in col {
                    y[u] += x[v];
                }
            }
        }
        y
    }

    /// Dense rows, `rows[u][v]`.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.dim()]; self.dim()];
        for (v, col) in self.columns.iter().enumerate() {
            for &u in col {
                m[u][v] = 1;
            }
        }
        m
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let d = self.to_dense();
        IntMatrix::from_fn(self.dim(), self.dim(), |i, j| BigInt::from(d[i][j]))
    }

    pub fn unit(&self, w: &Word) -> Vec<i64> {
        let mut v = vec![0; self.dim()];
        v[self.index_of(w).expect("state of this operator")] = 1;
        v
    }

    /// Indicator of the states beginning with `prefix`.
    pub fn cylinder(&self, prefix: &[u8]) -> Vec<i64> {
        self.states
            .iter()
            .map(|s| i64::from(s.symbols().starts_with(prefix)))
            .collect()
    }

    /// `ψ_k([a])`: the states beginning with `a`.
    pub fn psi(&self, a: u8) -> Vec<i64> {
        self.cylinder(&[a])
    }
}

pub fn psi_k(spec: &SftSpec, k: usize, a: u8) -> Result<Vec<i64>> {
    if a as usize >= spec.r() {
        return Err(Error::IndexOutOfRange { index: a as usize, dim: spec.r() });
    }
    Ok(build_tk(spec, k)?.psi(a))
}

/// One or two distinct admissible words of a common length `>= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbidSet {
    words: Vec<Word>,
}

impl ForbidSet {
    pub fn new(spec: &SftSpec, words: Vec<Word>) -> Result<Self> {
        if words.is_empty() || words.len() > 2 || (words.len() == 2 && words[0] == words[1]) {
            return Err(Error::ForbidSetSize);
        }
        let n = words[0].len();
        for w in &words {
            spec.check_admissible(w)?;
            if w.len() != n || n < 2 {
                return Err(Error::WordLength {
                    word: spec.render(w),
                    expected: n.max(2),
                    found: w.len(),
                });
            }
        }
        Ok(ForbidSet { words })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// The block length `k`, one less than the word length.
    pub fn k(&self) -> usize {
        self.words[0].len() - 1
    }
}

/// Zero the entry `(ηw, βw)` for each forbidden word.
pub fn apply_forbid(tk: &ShiftMatrixK, c: &ForbidSet) -> Result<ShiftMatrixK> {
    let mut out = tk.clone();
    for w in c.words() {
        tk.spec.check_admissible(w)?;
        if w.len() != tk.k + 1 {
            return Err(Error::WordLength {
                word: tk.spec.render(w),
                expected: tk.k + 1,
                found: w.len(),
            });
        }
        let src = tk.index_of(&w.beta()).expect("admissible prefix is a state");
        let dst = tk.index_of(&w.eta()).expect("admissible suffix is a state");
        let col = &mut out.columns[src];
        match col.binary_search(&dst) {
            Ok(pos) => {
                col.remove(pos);
            }
            Err(_) => {
                return Err(Error::EntryAlreadyZero {
                    source_state: tk.spec.render(&w.beta()),
                    target: tk.spec.render(&w.eta()),
                })
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    OneWord,
    /// The second orbit reaches `ψ_k(V_1)` before meeting the first.
    Disjoint,
    CaseA,
    CaseB,
    CaseC,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::OneWord => "one-word",
            CaseTag::Disjoint => "disjoint",
            CaseTag::CaseA => "A",
            CaseTag::CaseB => "B",
            CaseTag::CaseC => "C",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisVector {
    Psi(u8),
    /// `T_k^exponent [η w]` for forbidden word number `word`.
    Power { word: usize, exponent: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantBasis {
    pub k: usize,
    /// Forbidden words, ordered so that `h(ηw1) <= h(ηw2)`.
    pub words: Vec<Word>,
    /// `h(ηw)` for each word.
    pub h: Vec<usize>,
    pub d1: usize,
    pub d2: Option<usize>,
    /// Coefficient of `ψ_k([b_{d2+1}])` in the relation; 1 for one word.
    pub gamma: i64,
    /// Nonzero coefficients `α_i` of `T_k^i[ηw1]` in the relation.
    pub alphas: BTreeMap<usize, i64>,
    pub delta: Option<usize>,
    pub case_tag: CaseTag,
    pub basis_vectors: Vec<BasisVector>,
}

impl InvariantBasis {
    pub fn dim(&self) -> usize {
        self.basis_vectors.len()
    }

    /// `a_{d1+1}`, the symbol with `T_k^{d1}[ηw1] = ψ_k([a_{d1+1}])`.
    pub fn a_exit(&self) -> u8 {
        self.words[0].symbols()[self.d1 + 1]
    }

    /// `b_{d2+1}`, the symbol carrying `γ` in the relation.
    pub fn b_exit(&self) -> Option<u8> {
        self.d2.map(|d2| self.words[1].symbols()[d2 + 1])
    }

    /// The prefix whose cylinder is the given basis vector.
    pub fn prefix(&self, v: &BasisVector) -> Vec<u8> {
        match *v {
            BasisVector::Psi(a) => vec![a],
            BasisVector::Power { word, exponent } => self.words[word].symbols()[exponent + 1..].to_vec(),
        }
    }

    pub fn dense_vectors(&self, tk: &ShiftMatrixK) -> Vec<Vec<i64>> {
        self.basis_vectors.iter().map(|v| tk.cylinder(&self.prefix(v))).collect()
    }

    pub fn describe(&self, spec: &SftSpec) -> String {
        let mut s = String::new();
        let words: Vec<String> = self.words.iter().map(|w| spec.render(w)).collect();
        s += &format!("words: {}\n", words.join(", "));
        s += &format!("k: {}\n", self.k);
        s += &format!("case: {}\n", self.case_tag);
        s += &format!("d1: {}\n", self.d1);
        if let Some(d2) = self.d2 {
            s += &format!("d2: {d2}\n");
            s += &format!("delta: {}\n", self.delta.unwrap_or(0));
            s += &format!("gamma: {}\n", self.gamma);
            let alphas: Vec<String> = self.alphas.iter().map(|(i, a)| format!("{i}:{a}")).collect();
            s += &format!("alphas: {{{}}}\n", alphas.join(", "));
        }
        s += &format!("dim W: {}\n", self.dim());
        s
    }
}

/// Name of the Case A check on the last block of `s_1`.
pub const LAST_BLOCK_SWITCHED: &str = "last block is a prefix of the inner block repeated, with last symbol switched";

/// Shared tables for all forbidden sets at one block length.
#[derive(Clone, Debug)]
pub struct BlockContext {
    spec: SftSpec,
    k: usize,
    counts: WordCounts,
    unique_successor: Vec<bool>,
    irreducible_noncycle: bool,
}

impl BlockContext {
    pub fn new(spec: &SftSpec, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyWord);
        }
        let desc = validate_sft(spec)?;
        let unique_successor = (0..spec.r() as u8).map(|a| spec.successors(a).count() == 1).collect();
        Ok(BlockContext {
            spec: spec.clone(),
            k,
            counts: WordCounts::new(spec, k + 1)?,
            unique_successor,
            irreducible_noncycle: desc.irreducible && !desc.is_cycle,
        })
    }

    pub fn spec(&self) -> &SftSpec {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn counts(&self) -> &WordCounts {
        &self.counts
    }

    pub fn irreducible_noncycle(&self) -> bool {
        self.irreducible_noncycle
    }

    /// `dim V_k`.
    pub fn dim_vk(&self) -> u128 {
        (0..self.spec.r() as u8).map(|a| self.counts.get(self.k, a)).sum()
    }

    pub fn h(&self, w: &Word) -> usize {
        h_index_with(&self.counts, w)
    }

    /// Number of `k`-words beginning with an admissible prefix.
    fn cylinder_size(&self, prefix: &[u8]) -> u128 {
        self.counts.get(self.k + 1 - prefix.len(), *prefix.last().unwrap())
    }

    /// Shortest prefix with the same cylinder: trailing symbols forced by
    /// their predecessor are dropped.
    pub fn canonical(&self, prefix: &[u8]) -> Vec<u8> {
        let mut p = prefix.to_vec();
        while p.len() > 1 && self.unique_successor[p[p.len() - 2] as usize] {
            p.pop();
        }
        p
    }

    /// Atom incidence vectors for a family of cylinders. Returns one vector
    /// per input, over the nonempty atoms of the generated laminar family.
    fn atom_vectors(&self, prefixes: &[Vec<u8>]) -> Vec<Vec<i64>> {
        let canon: Vec<Vec<u8>> = prefixes.iter().map(|p| self.canonical(p)).collect();
        let mut nodes = canon.clone();
        nodes.sort();
        nodes.dedup();
        let mut atoms: Vec<&Vec<u8>> = Vec::new();
        for s in &nodes {
            // Maximal proper extensions of s within the family.
            let below: Vec<&Vec<u8>> = nodes
                .iter()
                .filter(|t| t.len() > s.len() && t.starts_with(s))
                .collect();
            let covered: u128 = below
                .iter()
                .filter(|t| !below.iter().any(|u| u.len() < t.len() && t.starts_with(u)))
                .map(|t| self.cylinder_size(t))
                .sum();
            if self.cylinder_size(s) > covered {
                atoms.push(s);
            }
        }
        canon
            .iter()
            .map(|p| atoms.iter().map(|a| i64::from(a.starts_with(p))).collect())
            .collect()
    }

    /// Coefficients of the `query` cylinder over independent `spanning`
    /// cylinders, or `None` if it lies outside their span.
    pub fn cylinder_relation(&self, spanning: &[Vec<u8>], query: &[u8]) -> Result<Option<Vec<BigInt>>> {
        let mut all = spanning.to_vec();
        all.push(query.to_vec());
        let mut vecs = self.atom_vectors(&all);
        let q = vecs.pop().unwrap();
        let mut span = SpanBasis::new(q.len());
        for (v, p) in vecs.into_iter().zip(spanning) {
            if !span.push(v) {
                return Err(Error::Rank(format!(
                    "cylinder {} is dependent on earlier basis vectors",
                    self.spec.render(&Word::new(p.clone()))
                )));
            }
        }
        span.solve_integer(&q)
    }

    pub fn invariant_basis(&self, c: &ForbidSet) -> Result<InvariantBasis> {
        let k = self.k;
        if c.k() != k {
            return Err(Error::WordLength {
                word: self.spec.render(&c.words()[0]),
                expected: k + 1,
                found: c.words()[0].len(),
            });
        }
        let mut words = c.words().to_vec();
        let mut h: Vec<usize> = words.iter().map(|w| self.h(&w.eta())).collect();
        if words.len() == 2 && (h[1], &words[1]) < (h[0], &words[0]) {
            words.swap(0, 1);
            h.swap(0, 1);
        }
        let r = self.spec.r() as u8;
        let d1 = h[0];
        let mut basis_vectors: Vec<BasisVector> = (0..r).map(BasisVector::Psi).collect();
        basis_vectors.extend((0..d1).map(|exponent| BasisVector::Power { word: 0, exponent }));

        if words.len() == 1 {
            return Ok(InvariantBasis {
                k,
                words,
                h,
                d1,
                d2: None,
                gamma: 1,
                alphas: BTreeMap::new(),
                delta: None,
                case_tag: CaseTag::OneWord,
                basis_vectors,
            });
        }

        let (w1, w2) = (words[0].symbols(), words[1].symbols());
        let h2 = h[1];
        let spanning: Vec<Vec<u8>> = basis_vectors
            .iter()
            .map(|v| match *v {
                BasisVector::Psi(a) => vec![a],
                BasisVector::Power { exponent, .. } => w1[exponent + 1..].to_vec(),
            })
            .collect();
        let mut found = None;
        for j in 0..=h2 {
            if let Some(coeffs) = self.cylinder_relation(&spanning, &w2[j + 1..])? {
                found = Some((j, coeffs));
                break;
            }
        }
        let (d2, coeffs) = found.ok_or_else(|| {
            Error::Rank("second orbit never enters the invariant span".into())
        })?;
        let b = w2[d2 + 1];
        let mut gamma = 0i64;
        for a in 0..r {
            let c = &coeffs[a as usize];
            if a == b {
                gamma = c.to_i64().ok_or(Error::Overflow("relation coefficient"))?;
            } else if !c.is_zero() {
                return Err(Error::Structural(format!(
                    "relation has a nonzero coefficient {c} on psi of symbol {}",
                    self.spec.symbols()[a as usize]
                )));
            }
        }
        let mut alphas = BTreeMap::new();
        for (i, c) in coeffs[r as usize..].iter().enumerate() {
            if !c.is_zero() {
                alphas.insert(i, c.to_i64().ok_or(Error::Overflow("relation coefficient"))?);
            }
        }
        basis_vectors.extend((0..d2).map(|exponent| BasisVector::Power { word: 1, exponent }));
        let case_tag = if d2 == h2 {
            CaseTag::Disjoint
        } else {
            let vals: Vec<i64> = alphas.values().copied().collect();
            match (gamma, vals.as_slice()) {
                (1, v) if !v.is_empty() && v.iter().all(|&a| a == -1) => CaseTag::CaseA,
                (0, [-1, 1]) => CaseTag::CaseB,
                (0, [1]) => CaseTag::CaseC,
                _ => {
                    return Err(Error::Structural(format!(
                        "relation signature gamma={gamma}, alphas={alphas:?} matches no case"
                    )))
                }
            }
        };
        Ok(InvariantBasis {
            k,
            words,
            h,
            d1,
            d2: Some(d2),
            gamma,
            alphas,
            delta: Some(h2 - d2),
            case_tag,
            basis_vectors,
        })
    }

    /// Support and block conditions for a two-word basis, each recorded with
    /// its outcome.
    pub fn pair_checks(&self, basis: &InvariantBasis) -> Result<Vec<Check>> {
        let (Some(d2), Some(delta)) = (basis.d2, basis.delta) else {
            return Err(Error::ForbidSetSize);
        };
        let mut checks = Vec::new();
        let (w1, w2) = (basis.words[0].symbols(), basis.words[1].symbols());
        let (d1, h1, h2) = (basis.d1, basis.h[0], basis.h[1]);
        let b = w2[d2 + 1];
        let exps: Vec<usize> = basis.alphas.keys().copied().collect();
        let vals: Vec<i64> = basis.alphas.values().copied().collect();

        let signature = match basis.case_tag {
            CaseTag::Disjoint => basis.gamma == 1 && vals.is_empty() && d2 == h2,
            CaseTag::CaseA => basis.gamma == 1 && !vals.is_empty() && vals.iter().all(|&a| a == -1),
            CaseTag::CaseB => basis.gamma == 0 && vals == [-1, 1],
            CaseTag::CaseC => basis.gamma == 0 && vals == [1],
            CaseTag::OneWord => false,
        };
        checks.push(Check::new("relation signature matches case", signature));
        if basis.case_tag == CaseTag::Disjoint {
            return Ok(checks);
        }
        checks.push(Check::new("first exponent equals d1 - delta", d1.checked_sub(delta) == Some(exps[0])));

        let s0 = w2[d2 + 1..=h2 + 1].to_vec();
        let s: Vec<Vec<u8>> = exps.iter().map(|&i| w1[i + 1..=h1 + 1].to_vec()).collect();
        let nested = |x: &[u8], y: &[u8]| x.starts_with(y) || y.starts_with(x);
        let last_switched = |x: &[u8], y: &[u8]| {
            x.len() == y.len() && x[..x.len() - 1] == y[..y.len() - 1] && x.last() != y.last()
        };
        match basis.case_tag {
            CaseTag::CaseA => {
                let mut supports = vec![s0.clone()];
                supports.extend(s.iter().cloned());
                let disjoint = (0..supports.len())
                    .all(|i| (i + 1..supports.len()).all(|j| !nested(&supports[i], &supports[j])));
                checks.push(Check::new("supports pairwise disjoint", disjoint));
                let total: u128 = supports.iter().map(|p| self.cylinder_size(p)).sum();
                checks.push(Check::new("supports exhaust psi(b)", total == self.cylinder_size(&[b])));
                checks.push(Check::new("s0 is s1 with last symbol switched", last_switched(&s0, &s[0])));
                let n = exps.len();
                if n >= 2 {
                    let blocks: Vec<&[u8]> = (0..n)
                        .map(|m| {
                            let end = if m + 1 < n { exps[m + 1] + 1 } else { h1 + 2 };
                            &w1[exps[m] + 1..end]
                        })
                        .collect();
                    let inner = blocks[n - 2];
                    checks.push(Check::new("inner blocks equal", blocks[..n - 1].iter().all(|x| *x == inner)));
                    checks.push(Check::new("inner block simple", is_simple(&Word::new(inner.to_vec()))));
                    let last = blocks[n - 1];
                    // B_n may outrun B when the switched symbol replaces a
                    // block start, e.g. B = b, B_n = ba.
                    let periodic: Vec<u8> = inner.iter().copied().cycle().take(last.len()).collect();
                    checks.push(Check::new(LAST_BLOCK_SWITCHED, last_switched(last, &periodic)));
                }
                let c11 = overlap_coeffs(&basis.words[0], &basis.words[0], d1, OverlapKind::SelfOverlap)?;
                checks.push(Check::new(
                    "self-overlap vanishes below delta",
                    (1..delta).all(|i| i > d1 || c11[d1 - i] == 0),
                ));
                if self.irreducible_noncycle {
                    let c21 = overlap_coeffs(&basis.words[1], &basis.words[0], d1, OverlapKind::Cross)?;
                    let limit = (delta + 1).saturating_sub(self.spec.r());
                    checks.push(Check::new(
                        "cross-overlap vanishes below delta - r + 1",
                        (1..limit).all(|i| i > d1 || c21[d1 - i] == 0),
                    ));
                }
            }
            CaseTag::CaseB => {
                checks.push(Check::new("s0 and s1 disjoint", !nested(&s0, &s[0])));
                let within = s0.starts_with(&s[1]) && s[0].starts_with(&s[1]);
                let sizes = self.cylinder_size(&s0) + self.cylinder_size(&s[0]) == self.cylinder_size(&s[1]);
                checks.push(Check::new("s0 and s1 exhaust s2", within && sizes));
                checks.push(Check::new("s0 is s1 with last symbol switched", last_switched(&s0, &s[0])));
            }
            CaseTag::CaseC => {
                checks.push(Check::new("s0 and s1 coincide", self.canonical(&s0) == self.canonical(&s[0])));
            }
            CaseTag::Disjoint | CaseTag::OneWord => unreachable!(),
        }
        Ok(checks)
    }

    /// The case tag plus every support condition; any failed condition is an
    /// error.
    pub fn classify_pair(&self, basis: &InvariantBasis) -> Result<Classification> {
        let checks = self.pair_checks(basis)?;
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if !failed.is_empty() {
            return Err(Error::Structural(format!(
                "{} pair fails: {}",
                basis.case_tag,
                failed.join("; ")
            )));
        }
        let supports = match (basis.d2, basis.case_tag) {
            (_, CaseTag::Disjoint) | (None, _) => Vec::new(),
            (Some(d2), _) => {
                let (w1, w2) = (basis.words[0].symbols(), basis.words[1].symbols());
                let mut v = vec![Word::new(w2[d2 + 1..=basis.h[1] + 1].to_vec())];
                v.extend(basis.alphas.keys().map(|&i| Word::new(w1[i + 1..=basis.h[0] + 1].to_vec())));
                v
            }
        };
        Ok(Classification { case_tag: basis.case_tag, supports, checks })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub case_tag: CaseTag,
    /// `s_0, s_1, ..., s_n`; empty for disjoint pairs.
    pub supports: Vec<Word>,
    pub checks: Vec<Check>,
}

pub fn invariant_basis(spec: &SftSpec, k: usize, c: &ForbidSet) -> Result<InvariantBasis> {
    BlockContext::new(spec, k)?.invariant_basis(c)
}

pub fn classify_pair(spec: &SftSpec, basis: &InvariantBasis) -> Result<Classification> {
    BlockContext::new(spec, basis.k)?.classify_pair(basis)
}

/// The same basis data computed from dense `T_k` powers and a generic exact
/// span; an independent check on the cylinder computation.
pub fn invariant_basis_dense(tk: &ShiftMatrixK, c: &ForbidSet) -> Result<InvariantBasis> {
    let spec = tk.spec();
    let r = spec.r() as u8;
    let mut words = c.words().to_vec();
    let ctx = BlockContext::new(spec, tk.k())?;
    let mut h: Vec<usize> = words.iter().map(|w| ctx.h(&w.eta())).collect();
    if words.len() == 2 && (h[1], &words[1]) < (h[0], &words[0]) {
        words.swap(0, 1);
        h.swap(0, 1);
    }
    let mut psi_span = SpanBasis::new(tk.dim());
    for a in 0..r {
        psi_span.push(tk.psi(a));
    }
    // d1: least power of T_k on [ηw1] landing in span ψ.
    let mut v = tk.unit(&words[0].eta());
    let mut orbit1 = Vec::new();
    while !psi_span.contains(&v) {
        orbit1.push(v.clone());
        v = tk.apply(&v);
    }
    let d1 = orbit1.len();
    let mut span = psi_span.clone();
    for o in &orbit1 {
        if !span.push(o.clone()) {
            return Err(Error::Rank("first orbit not independent modulo psi".into()));
        }
    }
    let mut basis_vectors: Vec<BasisVector> = (0..r).map(BasisVector::Psi).collect();
    basis_vectors.extend((0..d1).map(|exponent| BasisVector::Power { word: 0, exponent }));
    if words.len() == 1 {
        return Ok(InvariantBasis {
            k: tk.k(),
            words,
            h,
            d1,
            d2: None,
            gamma: 1,
            alphas: BTreeMap::new(),
            delta: None,
            case_tag: CaseTag::OneWord,
            basis_vectors,
        });
    }
    let mut v = tk.unit(&words[1].eta());
    let mut d2 = 0;
    let coeffs = loop {
        if let Some(c) = span.solve_integer(&v)? {
            break c;
        }
        d2 += 1;
        v = tk.apply(&v);
    };
    let b = words[1].symbols()[d2 + 1];
    let gamma = coeffs[b as usize].to_i64().unwrap_or(i64::MAX);
    let stray = (0..r).any(|a| a != b && !coeffs[a as usize].is_zero());
    let alphas: BTreeMap<usize, i64> = coeffs[r as usize..]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.to_i64().unwrap_or(i64::MAX)))
        .collect();
    if stray {
        return Err(Error::Structural("relation involves psi of a second symbol".into()));
    }
    basis_vectors.extend((0..d2).map(|exponent| BasisVector::Power { word: 1, exponent }));
    let h2 = h[1];
    let vals: Vec<i64> = alphas.values().copied().collect();
    let case_tag = match (d2 == h2, gamma, vals.as_slice()) {
        (true, _, _) => CaseTag::Disjoint,
        (false, 1, v) if !v.is_empty() && v.iter().all(|&a| a == -1) => CaseTag::CaseA,
        (false, 0, [-1, 1]) => CaseTag::CaseB,
        (false, 0, [1]) => CaseTag::CaseC,
        _ => return Err(Error::Structural(format!("unclassified relation gamma={gamma} alphas={alphas:?}"))),
    };
    Ok(InvariantBasis {
        k: tk.k(),
        words,
        h,
        d1,
        d2: Some(d2),
        gamma,
        alphas,
        delta: h2.checked_sub(d2),
        case_tag,
        basis_vectors,
    })
}
