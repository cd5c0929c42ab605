//! Determinants of bordered matrices by subset expansion, and the structured
//! characteristic polynomial `X(t)` of a forbidden-word perturbation.
//!
//! A bordered matrix has an `n x n` block `A`, an `m x m` block `B`, border
//! column `k` equal to `α_k e_{i_k}` above `B` and border row `k` equal to
//! `β_k e_{j_k}^T` left of `B`:
//!
//! ```text
//! [ A            | α_0 e_{i_0} ... ]
//! [ β_0 e_{j_0}^T |                 ]
//! [ ...          |        B        ]
//! ```
//!
//! Its determinant is a sum over pairs `(S, T)` of equal-size subsets of the
//! border indices: `ε α_T β_S det A(-I(T), -J(S)) det B(-S, -T)`, where the
//! sign `ε` is the parity of an explicit permutation and terms with repeated
//! border indices vanish.

use num_traits::Zero;

use crate::correlation::{delta_poly, f_polys, CorrelationSet, FPolys};
use crate::error::{Error, Result};
use crate::higher_block::{BlockContext, ForbidSet, InvariantBasis};
use crate::matrix::Matrix;
use crate::poly::IntPoly;
use crate::scalar::{ExactDiv, Ring};
use crate::sft::{char_poly_t, SftSpec, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct BorderedMatrix<C> {
    a: Matrix<C>,
    b: Matrix<C>,
    /// `(i_k, α_k)`: border column `k` is `α_k e_{i_k}`.
    col_borders: Vec<(usize, C)>,
    /// `(j_k, β_k)`: border row `k` is `β_k e_{j_k}^T`.
    row_borders: Vec<(usize, C)>,
}

/// One `(S, T)` summand, with subsets as bitmasks over the border indices.
#[derive(Clone, Debug, PartialEq)]
pub struct BorderedTerm<C> {
    pub rows_s: u32,
    pub cols_t: u32,
    pub sign: i8,
    pub value: C,
}

fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn members(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&k| mask >> k & 1 == 1).collect()
}

impl<C: Ring> BorderedMatrix<C> {
    pub fn new(
        a: Matrix<C>,
        b: Matrix<C>,
        col_borders: Vec<(usize, C)>,
        row_borders: Vec<(usize, C)>,
    ) -> Result<Self> {
        let (n, m) = (a.rows(), b.rows());
        if a.cols() != n || b.cols() != m {
            return Err(Error::MalformedBorder("blocks must be square".into()));
        }
        if col_borders.len() != m || row_borders.len() != m {
            return Err(Error::MalformedBorder(format!(
                "{} border columns and {} border rows for a {m}x{m} corner block",
                col_borders.len(),
                row_borders.len()
            )));
        }
        if m > 16 {
            return Err(Error::MalformedBorder("at most 16 borders are supported".into()));
        }
        for &(i, _) in col_borders.iter().chain(&row_borders) {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
        }
        Ok(BorderedMatrix { a, b, col_borders, row_borders })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn interior(&self) -> &Matrix<C> {
        &self.a
    }

    pub fn corner(&self) -> &Matrix<C> {
        &self.b
    }

    /// The explicit `(n + m) x (n + m)` matrix.
    pub fn to_full(&self) -> Matrix<C> {
        let (n, m) = (self.n(), self.m());
        let mut full = Matrix::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                full.set(i, j, self.a.get(i, j).clone());
            }
        }
        for i in 0..m {
            for j in 0..m {
                full.set(n + i, n + j, self.b.get(i, j).clone());
            }
        }
        for (k, (i, alpha)) in self.col_borders.iter().enumerate() {
            full.set(*i, n + k, alpha.clone());
        }
        for (k, (j, beta)) in self.row_borders.iter().enumerate() {
            full.set(n + k, *j, beta.clone());
        }
        full
    }

    /// Sign of the reference permutation for `(S, T)`, or `None` when the
    /// border indices selected by `S` or `T` repeat.
    fn reference_sign(&self, s: &[usize], t: &[usize]) -> Option<i8> {
        let (n, m) = (self.n(), self.m());
        let rows_i: Vec<usize> = t.iter().map(|&k| self.col_borders[k].0).collect();
        let cols_j: Vec<usize> = s.iter().map(|&k| self.row_borders[k].0).collect();
        let distinct = |v: &[usize]| (0..v.len()).all(|x| (x + 1..v.len()).all(|y| v[x] != v[y]));
        if !distinct(&rows_i) || !distinct(&cols_j) {
            return None;
        }
        let mut perm = vec![usize::MAX; n + m];
        let a_rows = (0..n).filter(|i| !rows_i.contains(i));
        let a_cols = (0..n).filter(|j| !cols_j.contains(j));
        for (i, j) in a_rows.zip(a_cols) {
            perm[i] = j;
        }
        for &k in t {
            perm[self.col_borders[k].0] = n + k;
        }
        for &k in s {
            perm[n + k] = self.row_borders[k].0;
        }
        let b_rows = (0..m).filter(|k| !s.contains(k));
        let b_cols = (0..m).filter(|k| !t.contains(k));
        for (i, j) in b_rows.zip(b_cols) {
            perm[n + i] = n + j;
        }
        debug_assert!(perm.iter().all(|&p| p != usize::MAX));
        Some(permutation_sign(&perm))
    }
}

impl<C: Ring + ExactDiv> BorderedMatrix<C> {
    /// Every nonvanishing `(S, T)` summand of the expansion.
    pub fn terms(&self) -> Vec<BorderedTerm<C>> {
        let m = self.m();
        let mut out = Vec::new();
        for s_mask in 0u32..1 << m {
            for t_mask in 0u32..1 << m {
                if s_mask.count_ones() != t_mask.count_ones() {
                    continue;
                }
                let (s, t) = (members(s_mask, m), members(t_mask, m));
                let Some(sign) = self.reference_sign(&s, &t) else { continue };
                let rows_i: Vec<usize> = t.iter().map(|&k| self.col_borders[k].0).collect();
                let cols_j: Vec<usize> = s.iter().map(|&k| self.row_borders[k].0).collect();
                let mut value = self.a.delete(&rows_i, &cols_j).det_bareiss();
                value = value * self.b.delete(&s, &t).det_bareiss();
                for &k in &t {
                    value = value * self.col_borders[k].1.clone();
                }
                for &k in &s {
                    value = value * self.row_borders[k].1.clone();
                }
                if sign < 0 {
                    value = -value;
                }
                out.push(BorderedTerm { rows_s: s_mask, cols_t: t_mask, sign, value });
            }
        }
        out
    }
}

pub fn bordered_det<C: Ring + ExactDiv>(bm: &BorderedMatrix<C>) -> C {
    bm.terms().into_iter().fold(C::zero(), |acc, t| acc + t.value)
}

/// `X(t)` with its decomposition `X = Δ χ_T + M`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedCharPoly {
    pub basis: InvariantBasis,
    pub corr: CorrelationSet,
    pub f: FPolys,
    pub bordered: BorderedMatrix<IntPoly>,
    /// Monic `X(t)`, of degree `dim W`.
    pub x: IntPoly,
    pub delta: IntPoly,
    /// `X - Δ χ_T`, from the non-leading subset terms.
    pub m_poly: IntPoly,
    /// The full characteristic polynomial of the perturbed operator is
    /// `X(t) t^nilpotent_exponent`.
    pub nilpotent_exponent: usize,
    /// `(-1)^(r + number of borders)`; `X = sign * det`.
    pub sign: i64,
}

/// The bordered matrix with `A = T - t` whose determinant is `±X(t)`.
pub fn structured_matrix(
    spec: &SftSpec,
    basis: &InvariantBasis,
    corr: &CorrelationSet,
    f: &FPolys,
) -> Result<BorderedMatrix<IntPoly>> {
    let a = spec.matrix().minus_t();
    let one = IntPoly::from_i64s(&[1]);
    let minus_one = IntPoly::from_i64s(&[-1]);
    let w1 = basis.words[0].symbols();
    match (basis.words.get(1), basis.d2) {
        (None, _) => BorderedMatrix::new(
            a,
            Matrix::from_vec(1, 1, vec![-&corr.p11]),
            vec![(basis.a_exit() as usize, one)],
            vec![(w1[0] as usize, minus_one)],
        ),
        (Some(w2), Some(_)) => {
            let b = Matrix::from_vec(
                2,
                2,
                vec![
                    -&corr.p11,
                    &f.f11 - &corr.p12,
                    -&corr.p21,
                    &f.f21 - &corr.p22,
                ],
            );
            BorderedMatrix::new(
                a,
                b,
                vec![
                    (basis.a_exit() as usize, one),
                    (basis.b_exit().unwrap() as usize, IntPoly::from_i64s(&[basis.gamma])),
                ],
                vec![(w1[0] as usize, minus_one.clone()), (w2.first() as usize, minus_one)],
            )
        }
        (Some(_), None) => Err(Error::MalformedBorder("two words without a second exponent".into())),
    }
}

/// `sign` times every summand except the leading `det A det B`.
pub fn minor_sum_m(bordered: &BorderedMatrix<IntPoly>, sign: i64) -> IntPoly {
    let rest = bordered
        .terms()
        .into_iter()
        .filter(|t| t.rows_s != 0)
        .fold(IntPoly::zero(), |acc, t| &acc + &t.value);
    rest.scale(&sign.into())
}

impl BlockContext {
    pub fn perturbed_charpoly(&self, c: &ForbidSet) -> Result<PerturbedCharPoly> {
        let spec = self.spec();
        let basis = self.invariant_basis(c)?;
        let corr = CorrelationSet::new(&basis)?;
        let f = f_polys(&basis, &corr);
        let delta = delta_poly(&corr, &f);
        let bordered = structured_matrix(spec, &basis, &corr, &f)?;
        let m = bordered.m();
        let sign: i64 = if (spec.r() + m).is_multiple_of(2) { 1 } else { -1 };
        let raw = bordered_det(&bordered);
        let x = raw.scale(&sign.into());
        let dim_w = basis.dim();
        if x.degree() != Some(dim_w) || x.leading() != Some(&1.into()) {
            return Err(Error::Structural(format!(
                "X has degree {:?} and leading coefficient {:?}, expected monic of degree {dim_w}",
                x.degree(),
                x.leading()
            )));
        }
        let chi = char_poly_t(spec);
        let m_poly = minor_sum_m(&bordered, sign);
        if &x - &(&delta * &chi) != m_poly {
            return Err(Error::Structural(
                "X differs from delta * chi_T + M; the correlation block and the bordered expansion disagree"
                    .into(),
            ));
        }
        let nilpotent_exponent = self
            .dim_vk()
            .checked_sub(dim_w as u128)
            .and_then(|e| usize::try_from(e).ok())
            .ok_or_else(|| Error::Structural("invariant subspace larger than V_k".into()))?;
        Ok(PerturbedCharPoly { basis, corr, f, bordered, x, delta, m_poly, nilpotent_exponent, sign })
    }
}

pub fn perturbed_charpoly_one(spec: &SftSpec, k: usize, w: &Word) -> Result<PerturbedCharPoly> {
    let c = ForbidSet::new(spec, vec![w.clone()])?;
    BlockContext::new(spec, k)?.perturbed_charpoly(&c)
}

pub fn perturbed_charpoly_two(spec: &SftSpec, k: usize, c: &ForbidSet) -> Result<PerturbedCharPoly> {
    if c.words().len() != 2 {
        return Err(Error::ForbidSetSize);
    }
    BlockContext::new(spec, k)?.perturbed_charpoly(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(rows: usize, data: &[i64]) -> Matrix<BigInt> {
        Matrix::from_vec(rows, rows, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn two_by_two_example() {
        let bm = BorderedMatrix::new(ints(1, &[2]), ints(1, &[3]), vec![(0, 5.into())], vec![(0, 7.into())])
            .unwrap();
        assert_eq!(bordered_det(&bm), BigInt::from(-29));
    }

    #[test]
    fn malformed_borders_rejected() {
        let bad = BorderedMatrix::new(ints(1, &[2]), ints(1, &[3]), vec![(1, 5.into())], vec![(0, 7.into())]);
        assert!(bad.is_err());
        let bad = BorderedMatrix::new(ints(1, &[2]), ints(1, &[3]), vec![], vec![(0, 7.into())]);
        assert!(matches!(bad, Err(Error::MalformedBorder(_))));
    }

    #[test]
    fn expansion_matches_cofactor_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let (n, m) = (rng.random_range(1..=3), rng.random_range(1..=2));
            let mut v = |len: usize| -> Vec<i64> { (0..len).map(|_| rng.random_range(-4..=4)).collect() };
            let a = ints(n, &v(n * n));
            let b = ints(m, &v(m * m));
            let cols = (0..m).map(|_| (rng.random_range(0..n), BigInt::from(rng.random_range(-3..=3)))).collect();
            let rows = (0..m).map(|_| (rng.random_range(0..n), BigInt::from(rng.random_range(-3..=3)))).collect();
            let bm = BorderedMatrix::new(a, b, cols, rows).unwrap();
            assert_eq!(bordered_det(&bm), bm.to_full().det_cofactor());
        }
    }

    #[test]
    fn single_word_values() {
        let full = SftSpec::full(2);
        let x = perturbed_charpoly_one(&full, 2, &full.parse_word("aaa").unwrap()).unwrap();
        assert_eq!(x.x, IntPoly::from_i64s(&[-1, -1, -1, 1]));
        assert_eq!(x.nilpotent_exponent, 1);
        assert_eq!(x.delta, IntPoly::from_i64s(&[1, 1]));

        let g = SftSpec::golden_mean();
        let y = perturbed_charpoly_one(&g, 2, &g.parse_word("aaa").unwrap()).unwrap();
        assert_eq!(y.x, IntPoly::from_i64s(&[-1, -1, 0, 1]));
        assert_eq!(y.nilpotent_exponent, 0);

        let z = perturbed_charpoly_one(&full, 3, &full.parse_word("aaba").unwrap()).unwrap();
        assert_eq!(z.x, IntPoly::from_i64s(&[-1, 1, 0, -2, 1]));
        assert_eq!(z.nilpotent_exponent, 4);
    }

    #[test]
    fn pair_values() {
        let full = SftSpec::full(2);
        let words = |ws: &[&str]| {
            ForbidSet::new(&full, ws.iter().map(|w| full.parse_word(w).unwrap()).collect()).unwrap()
        };
        let x = perturbed_charpoly_two(&full, 2, &words(&["aaa", "bbb"])).unwrap();
        assert_eq!(x.x, IntPoly::from_i64s(&[-1, -2, -1, 0, 1]));
        assert_eq!(x.nilpotent_exponent, 0);
        assert_eq!(x.delta, IntPoly::from_i64s(&[1, 2, 1]));
        assert_eq!(x.m_poly, IntPoly::from_i64s(&[-1, 0, 2]));
        let factor = IntPoly::from_i64s(&[-1, -1, 1]);
        assert_eq!(crate::scalar::ExactDiv::div_exact(&x.x, &factor), IntPoly::from_i64s(&[1, 1, 1]));

        let a = perturbed_charpoly_two(&full, 3, &words(&["aaba", "aabb"])).unwrap();
        assert_eq!(a.f.f11, IntPoly::from_i64s(&[0, -1]));
        assert!(a.f.f21.is_zero());
        assert_eq!(a.delta, IntPoly::from_i64s(&[0, 0, 0, 1]));
        assert_eq!((a.x.degree(), a.nilpotent_exponent), (Some(5), 3));

        let c = perturbed_charpoly_two(&full, 3, &words(&["aaaa", "abaa"])).unwrap();
        assert_eq!(c.f.f11, IntPoly::from_i64s(&[1, 1]));
        assert!(c.f.f21.is_zero());
    }

    #[test]
    fn agrees_with_oracle_on_small_blocks() {
        use crate::oracle::forbidden_charpoly;
        use crate::sft::enumerate_admissible;
        for spec in [SftSpec::full(2), SftSpec::golden_mean(), SftSpec::full(3)] {
            for k in 1..=3 {
                let ctx = BlockContext::new(&spec, k).unwrap();
                let words = enumerate_admissible(&spec, k + 1).unwrap();
                for (i, w1) in words.iter().enumerate() {
                    let sets = std::iter::once(vec![w1.clone()])
                        .chain(words[i + 1..].iter().map(|w2| vec![w1.clone(), w2.clone()]));
                    for set in sets {
                        let c = ForbidSet::new(&spec, set).unwrap();
                        let x = ctx.perturbed_charpoly(&c).unwrap();
                        assert_eq!(x.x.shift(x.nilpotent_exponent), forbidden_charpoly(&spec, &c).unwrap(), "{c:?}");
                    }
                }
            }
        }
    }
}
