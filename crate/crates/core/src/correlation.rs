//! Overlaps between forbidden words: correlation coefficients and
//! polynomials, fundamental periods, the truncated `q`/`r` polynomials, the
//! `f` corrections and the 2x2 determinant `Δ(t)`.
//!
//! Coefficient vectors are indexed by exponent: `c[e]` is the coefficient of
//! `t^e`, and the overlap at shift `i` lands at exponent `d - i`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::higher_block::InvariantBasis;
use crate::poly::IntPoly;
use crate::sft::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapKind {
    /// Shifts `0..=d`; shift 0 always matches.
    SelfOverlap,
    /// Shifts `1..=d`.
    Cross,
}

/// `c[d - i] = 1` iff the prefix of `w_u` of length `k + 1 - i` equals the
/// suffix of `w_v` starting at position `i`.
pub fn overlap_coeffs(w_u: &Word, w_v: &Word, d: usize, kind: OverlapKind) -> Result<Vec<u8>> {
    if w_u.len() != w_v.len() {
        return Err(Error::WordLength {
            word: format!("{:?}", w_v.symbols()),
            expected: w_u.len(),
            found: w_v.len(),
        });
    }
    let n = w_u.len();
    if d >= n {
        return Err(Error::IndexOutOfRange { index: d, dim: n });
    }
    let (u, v) = (w_u.symbols(), w_v.symbols());
    let first = match kind {
        OverlapKind::SelfOverlap => 0,
        OverlapKind::Cross => 1,
    };
    let mut c = vec![0u8; d + 1];
    for i in first..=d {
        if u[..n - i] == v[i..] {
            c[d - i] = 1;
        }
    }
    Ok(c)
}

pub fn correlation_poly(coeffs: &[u8]) -> IntPoly {
    IntPoly::from_i64s(&coeffs.iter().map(|&c| c as i64).collect::<Vec<_>>())
}

/// Least `p` in `1..=d` with `c[d - p] = 1`, else the word length.
pub fn fundamental_period(w: &Word, d: usize) -> Result<usize> {
    let c = overlap_coeffs(w, w, d, OverlapKind::SelfOverlap)?;
    Ok((1..=d).find(|&p| c[d - p] == 1).unwrap_or(w.len()))
}

/// `w = B^count B*` with `|B| = period` and `B*` a proper prefix of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub block: Word,
    pub count: usize,
    pub tail: Word,
}

pub fn block_decomposition(w: &Word, period: usize) -> BlockDecomposition {
    let p = period.min(w.len());
    BlockDecomposition {
        block: w.slice(0, p),
        count: w.len() / p,
        tail: w.slice(w.len() - w.len() % p, w.len()),
    }
}

/// True iff `b` is not a power `A^e` with `e > 1`.
pub fn is_simple(b: &Word) -> bool {
    let s = b.symbols();
    let n = s.len();
    !(1..n).any(|p| n.is_multiple_of(p) && s.chunks(p).all(|c| c == &s[..p]))
}

/// Smallest `i >= 1` with `b_0 .. b_{k-i} = a_i .. a_k`, for `w_a = a_0..a_k`
/// and `w_b = b_0..b_k`.
pub fn first_cross_offset(w_a: &Word, w_b: &Word) -> Option<usize> {
    let (a, b) = (w_a.symbols(), w_b.symbols());
    let n = a.len();
    (1..n).find(|&i| b[..n - i] == a[i..])
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationSet {
    pub c11: Vec<u8>,
    pub c22: Option<Vec<u8>>,
    /// Prefix of `w2` against suffixes of `w1`, exponents `0..=d1`.
    pub c21: Option<Vec<u8>>,
    /// Prefix of `w1` against suffixes of `w2`, exponents `0..=d2`.
    pub c12: Option<Vec<u8>>,
    pub p11: IntPoly,
    pub p12: IntPoly,
    pub p21: IntPoly,
    pub p22: IntPoly,
    pub i1: Option<usize>,
    pub i2: Option<usize>,
    pub period1: usize,
    pub period2: Option<usize>,
}

impl CorrelationSet {
    pub fn new(basis: &InvariantBasis) -> Result<Self> {
        let w1 = &basis.words[0];
        let d1 = basis.d1;
        let c11 = overlap_coeffs(w1, w1, d1, OverlapKind::SelfOverlap)?;
        let period1 = fundamental_period(w1, d1)?;
        let p11 = correlation_poly(&c11);
        let (Some(w2), Some(d2)) = (basis.words.get(1), basis.d2) else {
            return Ok(CorrelationSet {
                c11,
                c22: None,
                c21: None,
                c12: None,
                p11,
                p12: IntPoly::zero(),
                p21: IntPoly::zero(),
                p22: IntPoly::zero(),
                i1: None,
                i2: None,
                period1,
                period2: None,
            });
        };
        let c22 = overlap_coeffs(w2, w2, d2, OverlapKind::SelfOverlap)?;
        let c21 = overlap_coeffs(w2, w1, d1, OverlapKind::Cross)?;
        let c12 = overlap_coeffs(w1, w2, d2, OverlapKind::Cross)?;
        Ok(CorrelationSet {
            p22: correlation_poly(&c22),
            p21: correlation_poly(&c21),
            p12: correlation_poly(&c12),
            p11,
            period1,
            period2: Some(fundamental_period(w2, d2)?),
            i1: first_cross_offset(w1, w2),
            i2: first_cross_offset(w2, w1),
            c11,
            c22: Some(c22),
            c21: Some(c21),
            c12: Some(c12),
        })
    }
}

/// `q^i = sum_{j=0..=i} c[d-j] t^(i-j)` and `r^i = sum_{e<d-i} c[e] t^e`, so
/// that `p = t^(d-i) q^i + r^i`.
pub fn truncations(c: &[u8], i: usize) -> (IntPoly, IntPoly) {
    let d = c.len() - 1;
    assert!(i <= d, "truncation index {i} exceeds degree bound {d}");
    let q = correlation_poly(&c[d - i..]);
    let r = correlation_poly(&c[..d - i]);
    (q, r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FTerm {
    pub exponent: usize,
    pub alpha: i64,
    pub q11: IntPoly,
    pub q21: IntPoly,
    pub r11: IntPoly,
    pub r21: IntPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FPolys {
    pub f11: IntPoly,
    pub f21: IntPoly,
    pub terms: Vec<FTerm>,
}

/// Sums `α_i q^i` over the relation's exponents; both sums vanish when the
/// relation has no `α` terms.
pub fn f_polys(basis: &InvariantBasis, corr: &CorrelationSet) -> FPolys {
    let mut f11 = IntPoly::zero();
    let mut f21 = IntPoly::zero();
    let mut terms = Vec::new();
    let zero_c21 = vec![0u8; corr.c11.len()];
    let c21 = corr.c21.as_ref().unwrap_or(&zero_c21);
    for (&i, &alpha) in &basis.alphas {
        let (q11, r11) = truncations(&corr.c11, i);
        let (q21, r21) = truncations(c21, i);
        let a = IntPoly::from_i64s(&[alpha]);
        f11 = &f11 + &(&a * &q11);
        f21 = &f21 + &(&a * &q21);
        terms.push(FTerm { exponent: i, alpha, q11, q21, r11, r21 });
    }
    FPolys { f11, f21, terms }
}

/// `(p11 p22 - p12 p21) - (p11 f21 - p21 f11)`; the correlation polynomial
/// itself for a single word.
pub fn delta_poly(corr: &CorrelationSet, f: &FPolys) -> IntPoly {
    if corr.c22.is_none() {
        return corr.p11.clone();
    }
    let main = &(&corr.p11 * &corr.p22) - &(&corr.p12 * &corr.p21);
    let correction = &(&corr.p11 * &f.f21) - &(&corr.p21 * &f.f11);
    &main - &correction
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::SftSpec;

    fn w(s: &str) -> Word {
        SftSpec::full(3).parse_word(s).unwrap()
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_coeffs(&w("aaa"), &w("aaa"), 1, OverlapKind::SelfOverlap).unwrap(), [1, 1]);
        assert_eq!(overlap_coeffs(&w("aaba"), &w("aaba"), 2, OverlapKind::SelfOverlap).unwrap(), [0, 0, 1]);
        assert_eq!(overlap_coeffs(&w("aabb"), &w("aaba"), 2, OverlapKind::Cross).unwrap(), [0, 0, 0]);
        assert!(overlap_coeffs(&w("aab"), &w("aaba"), 2, OverlapKind::Cross).is_err());
    }

    #[test]
    fn correlation_polynomials() {
        let p = |s: &str, d| {
            correlation_poly(&overlap_coeffs(&w(s), &w(s), d, OverlapKind::SelfOverlap).unwrap())
        };
        assert_eq!(p("aaa", 1), IntPoly::from_i64s(&[1, 1]));
        assert_eq!(p("abab", 2), IntPoly::from_i64s(&[1, 0, 1]));
        assert_eq!(p("aaaa", 2), IntPoly::from_i64s(&[1, 1, 1]));
    }

    #[test]
    fn periods_and_simplicity() {
        assert_eq!(fundamental_period(&w("abab"), 2).unwrap(), 2);
        assert_eq!(fundamental_period(&w("aaaa"), 2).unwrap(), 1);
        assert_eq!(fundamental_period(&w("aaba"), 2).unwrap(), 4);
        assert!(is_simple(&w("abcab")));
        assert!(!is_simple(&w("abab")));
        assert!(!is_simple(&w("aa")));
        assert!(is_simple(&w("a")));
        let bd = block_decomposition(&w("ababa"), 2);
        assert_eq!((bd.block, bd.count, bd.tail), (w("ab"), 2, w("a")));
    }

    #[test]
    fn truncation_identity() {
        let c = [1u8, 0, 1, 1, 1];
        let p = correlation_poly(&c);
        for i in 0..c.len() {
            let (q, r) = truncations(&c, i);
            assert_eq!(&q.shift(c.len() - 1 - i) + &r, p);
        }
        let (q, _) = truncations(&[1, 1, 1], 1);
        assert_eq!(q, IntPoly::from_i64s(&[1, 1]));
    }

    /// Brute-force check of the overlap/period lemma and the block-copy
    /// lemma on all binary words up to length 11.
    #[test]
    fn period_divisibility_on_binary_words() {
        let full = SftSpec::full(2);
        for k in 1..=10 {
            for word in crate::sft::enumerate_admissible(&full, k + 1).unwrap() {
                let d = k - 1;
                let c = overlap_coeffs(&word, &word, d, OverlapKind::SelfOverlap).unwrap();
                let p = fundamental_period(&word, d).unwrap();
                for i in 1..=d {
                    if c[d - i] == 1 {
                        assert!(i % p == 0 || i >= k + 2 - p, "{word:?} shift {i} period {p}");
                    }
                }
                if p <= k {
                    let block = &word.symbols()[..p];
                    for i in 0..=word.len() - p {
                        if &word.symbols()[i..i + p] == block {
                            assert_eq!(i % p, 0, "{word:?} block copy at {i}");
                        }
                    }
                }
            }
        }
    }
}
