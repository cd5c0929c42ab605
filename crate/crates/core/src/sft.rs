//! Subshifts of finite type: the alphabet, the 0/1 transition matrix, and the
//! word combinatorics everything else is built on.
//!
//! Transition entry `(b, a) = 1` means symbol `a` may be followed by `b`, so
//! rows are indexed by the target symbol.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::poly::IntPoly;
use crate::roots::largest_real_root;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpec {
    symbols: Vec<String>,
    /// `transition[b][a]`, 0 or 1.
    transition: Vec<Vec<u8>>,
}

impl SftSpec {
    /// Checks shape, entry values and label uniqueness. Dead symbols are
    /// allowed here and rejected by [`validate_sft`].
    pub fn new(symbols: Vec<String>, transition: Vec<Vec<i64>>) -> Result<Self> {
        let r = symbols.len();
        if r == 0 || r > 255 {
            return Err(Error::AlphabetSize(r));
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if s.is_empty() || s.chars().any(char::is_whitespace) || !seen.insert(s.as_str()) {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        if transition.len() != r {
            return Err(Error::Shape { expected: r, found: transition.len() });
        }
        let mut t = Vec::with_capacity(r);
        for (i, row) in transition.iter().enumerate() {
            if row.len() != r {
                return Err(Error::Shape { expected: r, found: row.len() });
            }
            let mut out = Vec::with_capacity(r);
            for (j, &v) in row.iter().enumerate() {
                if v != 0 && v != 1 {
                    return Err(Error::NonBinaryEntry { row: i, col: j, value: v });
                }
                out.push(v as u8);
            }
            t.push(out);
        }
        Ok(SftSpec { symbols, transition: t })
    }

    fn default_labels(r: usize) -> Vec<String> {
        (0..r)
            .map(|i| {
                if i < 26 {
                    char::from(b'a' + i as u8).to_string()
                } else {
                    format!("s{i}")
                }
            })
            .collect()
    }

    /// The full shift on `r` symbols.
    pub fn full(r: usize) -> Self {
        Self::new(Self::default_labels(r), vec![vec![1; r]; r]).expect("full shift is well formed")
    }

    /// Two symbols with `b -> b` forbidden.
    pub fn golden_mean() -> Self {
        Self::new(Self::default_labels(2), vec![vec![1, 1], vec![1, 0]])
            .expect("golden mean shift is well formed")
    }

    /// The directed cycle `a -> b -> ... -> a` on `n` symbols.
    pub fn cycle(n: usize) -> Self {
        let mut t = vec![vec![0; n]; n];
        for a in 0..n {
            t[(a + 1) % n][a] = 1;
        }
        Self::new(Self::default_labels(n), t).expect("cycle is well formed")
    }

    pub fn r(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Whether symbol `a` may be followed by symbol `b`.
    pub fn allowed(&self, a: u8, b: u8) -> bool {
        self.transition[b as usize][a as usize] == 1
    }

    pub fn successors(&self, a: u8) -> impl Iterator<Item = u8> + '_ {
        (0..self.r() as u8).filter(move |&b| self.allowed(a, b))
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.r(), self.r(), |i, j| BigInt::from(self.transition[i][j]))
    }

    pub fn symbol_index(&self, label: &str) -> Result<u8> {
        self.symbols
            .iter()
            .position(|s| s == label)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    /// Parses a word. Whitespace-separated labels are accepted always; a
    /// bare string is split into characters when every label is one
    /// character long.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        let labels: Vec<String> = if text.contains(char::is_whitespace) {
            text.split_whitespace().map(str::to_string).collect()
        } else if self.symbols.iter().all(|s| s.chars().count() == 1) {
            text.chars().map(|c| c.to_string()).collect()
        } else {
            vec![text.to_string()]
        };
        if labels.is_empty() || labels[0].is_empty() {
            return Err(Error::EmptyWord);
        }
        let symbols = labels
            .iter()
            .map(|l| self.symbol_index(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::new(symbols))
    }

    pub fn render(&self, w: &Word) -> String {
        let single = self.symbols.iter().all(|s| s.chars().count() == 1);
        let parts: Vec<&str> = w.symbols().iter().map(|&a| self.symbols[a as usize].as_str()).collect();
        if single { parts.concat() } else { parts.join(" ") }
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        !w.is_empty()
            && w.symbols().iter().all(|&a| (a as usize) < self.r())
            && w.symbols().windows(2).all(|p| self.allowed(p[0], p[1]))
    }

    pub fn check_admissible(&self, w: &Word) -> Result<()> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        if w.symbols().iter().any(|&a| a as usize >= self.r()) {
            return Err(Error::Inadmissible(format!("{:?}", w.symbols())));
        }
        if !self.is_admissible(w) {
            return Err(Error::Inadmissible(self.render(w)));
        }
        Ok(())
    }
}

impl FromStr for SftSpec {
    type Err = Error;

    /// `symbols: a b ...` followed by `r` rows of 0/1, rows indexed by the
    /// target symbol. `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut symbols: Option<Vec<String>> = None;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            match &symbols {
                None => {
                    let rest = line
                        .strip_prefix("symbols:")
                        .ok_or_else(|| err("expected `symbols: ...` header".into()))?;
                    symbols = Some(rest.split_whitespace().map(str::to_string).collect());
                }
                Some(_) => {
                    let row = line
                        .split_whitespace()
                        .map(|tok| tok.parse::<i64>().map_err(|_| err(format!("bad entry `{tok}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    rows.push(row);
                }
            }
        }
        let symbols = symbols.ok_or(Error::Parse { line: 1, msg: "missing `symbols:` header".into() })?;
        SftSpec::new(symbols, rows)
    }
}

impl fmt::Display for SftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "symbols: {}", self.symbols.join(" "))?;
        for row in &self.transition {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A finite symbol string; admissibility is checked against a spec where it
/// matters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> u8 {
        self.0[0]
    }

    pub fn last(&self) -> u8 {
        *self.0.last().expect("nonempty word")
    }

    /// Drop the last symbol.
    pub fn beta(&self) -> Word {
        Word(self.0[..self.0.len() - 1].to_vec())
    }

    /// Drop the first symbol.
    pub fn eta(&self) -> Word {
        Word(self.0[1..].to_vec())
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SftDescriptor {
    pub irreducible: bool,
    pub period_s: usize,
    pub is_cycle: bool,
    pub lambda0: f64,
}

pub fn validate_sft(spec: &SftSpec) -> Result<SftDescriptor> {
    let r = spec.r();
    for a in 0..r as u8 {
        if spec.successors(a).next().is_none() {
            return Err(Error::NoSuccessors(spec.symbols[a as usize].clone()));
        }
        if !(0..r as u8).any(|p| spec.allowed(p, a)) {
            return Err(Error::NoPredecessors(spec.symbols[a as usize].clone()));
        }
    }
    let levels = bfs_levels(spec, false);
    let irreducible = levels.iter().all(Option::is_some) && bfs_levels(spec, true).iter().all(Option::is_some);
    let period_s = if irreducible {
        let mut g = 0usize;
        for a in 0..r as u8 {
            for b in spec.successors(a) {
                let la = levels[a as usize].unwrap() as i64;
                let lb = levels[b as usize].unwrap() as i64;
                g = g.gcd(&((la + 1 - lb).unsigned_abs() as usize));
            }
        }
        g
    } else {
        1
    };
    let degree_one = (0..r as u8).all(|a| {
        spec.successors(a).count() == 1 && (0..r as u8).filter(|&p| spec.allowed(p, a)).count() == 1
    });
    let lambda0 = largest_real_root(&char_poly_t(spec), 0.0)?.value;
    Ok(SftDescriptor { irreducible, period_s, is_cycle: irreducible && degree_one, lambda0 })
}

/// Breadth-first levels from symbol 0, along edges or against them.
fn bfs_levels(spec: &SftSpec, reversed: bool) -> Vec<Option<usize>> {
    let r = spec.r();
    let mut level = vec![None; r];
    level[0] = Some(0);
    let mut queue = VecDeque::from([0u8]);
    while let Some(a) = queue.pop_front() {
        for b in 0..r as u8 {
            let edge = if reversed { spec.allowed(b, a) } else { spec.allowed(a, b) };
            if edge && level[b as usize].is_none() {
                level[b as usize] = Some(level[a as usize].unwrap() + 1);
                queue.push_back(b);
            }
        }
    }
    level
}

/// `counts[len][a]` is the number of admissible `len`-words starting with
/// `a`, for `1 <= len <= max_len`.
#[derive(Clone, Debug)]
pub struct WordCounts {
    counts: Vec<Vec<u128>>,
}

impl WordCounts {
    pub fn new(spec: &SftSpec, max_len: usize) -> Result<Self> {
        let r = spec.r();
        let mut counts = vec![vec![0u128; r], vec![1u128; r]];
        for len in 2..=max_len {
            let prev = &counts[len - 1];
            let row = (0..r as u8)
                .map(|a| {
                    spec.successors(a).try_fold(0u128, |acc, b| acc.checked_add(prev[b as usize]))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::Overflow("admissible word counts"))?;
            counts.push(row);
        }
        Ok(WordCounts { counts })
    }

    pub fn get(&self, len: usize, a: u8) -> u128 {
        self.counts[len][a as usize]
    }

    pub fn max_len(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Every admissible `k`-word, in lexicographic order of symbol indices.
pub fn enumerate_admissible(spec: &SftSpec, k: usize) -> Result<Vec<Word>> {
    if k == 0 {
        return Err(Error::EmptyWord);
    }
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(k);
    fn extend(spec: &SftSpec, k: usize, stack: &mut Vec<u8>, out: &mut Vec<Word>) {
        if stack.len() == k {
            out.push(Word::new(stack.clone()));
            return;
        }
        for b in 0..spec.r() as u8 {
            if stack.last().is_none_or(|&a| spec.allowed(a, b)) {
                stack.push(b);
                extend(spec, k, stack, out);
                stack.pop();
            }
        }
    }
    extend(spec, k, &mut stack, &mut out);
    Ok(out)
}

/// Least `h` such that the prefix of length `h + 1` determines `w` among
/// admissible words of its length.
pub fn h_index(spec: &SftSpec, w: &Word) -> Result<usize> {
    spec.check_admissible(w)?;
    let counts = WordCounts::new(spec, w.len())?;
    Ok(h_index_with(&counts, w))
}

/// [`h_index`] for an admissible word, reusing a count table that covers
/// its length.
pub fn h_index_with(counts: &WordCounts, w: &Word) -> usize {
    let k = w.len();
    // Continuations depend only on the last prefix symbol, so the prefix of
    // length h+1 determines w iff a single (k-h)-word starts at w[h].
    (0..k)
        .find(|&h| counts.get(k - h, w.symbols()[h]) == 1)
        .expect("the full word determines itself")
}

/// `det(T - t)`, normalized to be monic.
pub fn char_poly_t(spec: &SftSpec) -> IntPoly {
    spec.matrix().minus_t().det_bareiss().monic_sign()
}

/// Raw determinant of `T - t` with the given symbol rows and columns
/// deleted. Deleting everything leaves the constant 1.
pub fn minor(spec: &SftSpec, delete_rows: &[usize], delete_cols: &[usize]) -> Result<IntPoly> {
    if delete_rows.len() != delete_cols.len() {
        return Err(Error::UnequalDeletion { rows: delete_rows.len(), cols: delete_cols.len() });
    }
    let r = spec.r();
    for set in [delete_rows, delete_cols] {
        let mut seen = HashSet::new();
        for &i in set {
            if i >= r || !seen.insert(i) {
                return Err(Error::IndexOutOfRange { index: i, dim: r });
            }
        }
    }
    Ok(spec.matrix().minus_t().delete(delete_rows, delete_cols).det_bareiss())
}

/// Sum of all entries of `T^(k-1)`, which counts admissible `k`-words.
pub fn admissible_count_by_powers(spec: &SftSpec, k: usize) -> BigInt {
    let t = spec.matrix();
    let mut p = IntMatrix::identity(spec.r());
    for _ in 1..k {
        p = t.mul(&p);
    }
    (0..spec.r())
        .flat_map(|i| p.row(i).to_vec())
        .fold(BigInt::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(spec: &SftSpec, k: usize) -> Vec<String> {
        enumerate_admissible(spec, k).unwrap().iter().map(|w| spec.render(w)).collect()
    }

    #[test]
    fn parses_shift_files() {
        let text = "# golden mean\nsymbols: a b\n1 1  # row a\n1 0\n";
        let spec: SftSpec = text.parse().unwrap();
        assert_eq!(spec, SftSpec::golden_mean());
        assert_eq!(spec.to_string().parse::<SftSpec>().unwrap(), spec);
        assert!(matches!("symbols: a b\n1 2\n1 0".parse::<SftSpec>(), Err(Error::NonBinaryEntry { .. })));
        assert!(matches!("symbols: a b\n1 1".parse::<SftSpec>(), Err(Error::Shape { .. })));
        assert!(matches!("symbols: a a\n1 1\n1 1".parse::<SftSpec>(), Err(Error::DuplicateSymbol(_))));
        assert!(matches!("1 1\n1 1".parse::<SftSpec>(), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validation() {
        let d = validate_sft(&SftSpec::full(2)).unwrap();
        assert!(d.irreducible && !d.is_cycle);
        assert_eq!(d.period_s, 1);
        assert_eq!(d.lambda0, 2.0);

        let c = validate_sft(&SftSpec::cycle(3)).unwrap();
        assert!(c.irreducible && c.is_cycle);
        assert_eq!(c.period_s, 3);
        assert_eq!(c.lambda0, 1.0);

        let upper = SftSpec::new(vec!["a".into(), "b".into()], vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!validate_sft(&upper).unwrap().irreducible);

        let dead = SftSpec::new(vec!["a".into(), "b".into()], vec![vec![1, 0], vec![1, 0]]).unwrap();
        assert!(matches!(validate_sft(&dead), Err(Error::NoSuccessors(_))));

        // Bipartite: a <-> b plus a <-> c has period 2.
        let bip = SftSpec::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]],
        )
        .unwrap();
        assert_eq!(validate_sft(&bip).unwrap().period_s, 2);
    }

    #[test]
    fn enumeration() {
        assert_eq!(words(&SftSpec::full(2), 3).len(), 8);
        assert_eq!(words(&SftSpec::golden_mean(), 3), ["aaa", "aab", "aba", "baa", "bab"]);
        assert_eq!(words(&SftSpec::golden_mean(), 1).len(), 2);
        assert!(enumerate_admissible(&SftSpec::full(2), 0).is_err());
        for spec in [SftSpec::full(2), SftSpec::golden_mean(), SftSpec::full(3)] {
            for k in 1..=7 {
                let n = enumerate_admissible(&spec, k).unwrap().len();
                assert_eq!(BigInt::from(n), admissible_count_by_powers(&spec, k));
            }
        }
    }

    #[test]
    fn determination_index() {
        let full = SftSpec::full(2);
        for w in enumerate_admissible(&full, 3).unwrap() {
            assert_eq!(h_index(&full, &w).unwrap(), 2);
        }
        let g = SftSpec::golden_mean();
        assert_eq!(h_index(&g, &g.parse_word("aba").unwrap()).unwrap(), 1);
        assert_eq!(h_index(&g, &g.parse_word("bab").unwrap()).unwrap(), 2);
        assert!(h_index(&g, &g.parse_word("abb").unwrap()).is_err());
    }

    /// Prefix uniqueness checked by scanning the enumeration directly.
    #[test]
    fn determination_index_matches_prefix_scan() {
        for spec in [SftSpec::full(2), SftSpec::golden_mean(), SftSpec::cycle(3)] {
            for k in 1..=8 {
                let all = enumerate_admissible(&spec, k).unwrap();
                for w in &all {
                    let h = (0..k)
                        .find(|&h| {
                            all.iter().filter(|u| u.symbols()[..=h] == w.symbols()[..=h]).count() == 1
                        })
                        .unwrap();
                    assert_eq!(h_index(&spec, w).unwrap(), h);
                }
            }
        }
    }

    #[test]
    fn characteristic_polynomials_and_minors() {
        let full = SftSpec::full(2);
        assert_eq!(char_poly_t(&full), IntPoly::from_i64s(&[0, -2, 1]));
        assert_eq!(char_poly_t(&SftSpec::golden_mean()), IntPoly::from_i64s(&[-1, -1, 1]));
        assert_eq!(minor(&full, &[0], &[0]).unwrap(), IntPoly::from_i64s(&[1, -1]));
        assert_eq!(minor(&full, &[1], &[0]).unwrap(), IntPoly::from_i64s(&[1]));
        assert_eq!(minor(&full, &[0, 1], &[1, 0]).unwrap(), IntPoly::from_i64s(&[1]));
        assert_eq!(minor(&full, &[], &[]).unwrap().monic_sign(), char_poly_t(&full));
        assert!(matches!(minor(&full, &[0], &[]), Err(Error::UnequalDeletion { .. })));
    }
}
