//! Incremental span of integer vectors with exact membership answers.
//!
//! Elimination runs modulo the prime `2^61 - 1`. As long as the stored
//! vectors stay independent modulo that prime they are independent over the
//! rationals, and then a nonzero residual proves non-membership over the
//! rationals too. Positive membership answers are lifted to integers and
//! checked exactly, with a rational solve as the fallback.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

const P: u64 = (1 << 61) - 1;

fn reduce(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b { a - b } else { a + P - b }
}

fn inv(a: u64) -> u64 {
    // Fermat: a^(P-2).
    let (mut base, mut e, mut acc) = (a, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

fn lift(a: u64) -> i128 {
    if a > P / 2 { a as i128 - P as i128 } else { a as i128 }
}

#[derive(Clone, Debug)]
struct EchelonRow {
    pivot: usize,
    /// Residual with a unit at `pivot`.
    row: Vec<u64>,
    /// The row as a combination of the stored originals.
    combo: Vec<u64>,
}

/// Span of linearly independent integer vectors of a fixed dimension.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    dim: usize,
    originals: Vec<Vec<i64>>,
    rows: Vec<EchelonRow>,
}

/// Outcome of reducing a vector against the current span.
enum Reduced {
    Member(Vec<u64>),
    Outside(EchelonRow),
}

impl SpanBasis {
    pub fn new(dim: usize) -> Self {
        SpanBasis { dim, originals: Vec::new(), rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.originals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.originals
    }

    fn reduce(&self, v: &[i64]) -> Reduced {
        assert_eq!(v.len(), self.dim, "vector dimension");
        let n = self.originals.len();
        let mut row: Vec<u64> = v.iter().map(|&x| reduce(x)).collect();
        // Tracks v - (combination of originals) == row.
        let mut combo = vec![0u64; n];
        for er in &self.rows {
            let f = row[er.pivot];
            if f == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&er.row) {
                if y != 0 {
                    *x = sub(*x, mul(f, y));
                }
            }
            for (c, &y) in combo.iter_mut().zip(&er.combo) {
                if y != 0 {
                    *c = (*c + mul(f, y)) % P;
                }
            }
        }
        match row.iter().position(|&x| x != 0) {
            None => Reduced::Member(combo),
            Some(pivot) => {
                let s = inv(row[pivot]);
                let row: Vec<u64> = row.iter().map(|&x| mul(x, s)).collect();
                // row = s * (v - sum combo_j orig_j)
                let mut combo: Vec<u64> = combo.iter().map(|&c| mul(sub(0, c), s)).collect();
                combo.push(s);
                Reduced::Outside(EchelonRow { pivot, row, combo })
            }
        }
    }

    /// Adds `v` if it lies outside the span; returns whether it was added.
    pub fn push(&mut self, v: Vec<i64>) -> bool {
        match self.reduce(&v) {
            Reduced::Member(_) => false,
            Reduced::Outside(er) => {
                for r in &mut self.rows {
                    r.combo.push(0);
                }
                self.rows.push(er);
                self.originals.push(v);
                true
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        matches!(self.reduce(v), Reduced::Member(_))
    }

    /// Exact coefficients of `v` over the stored vectors, or `None` when
    /// `v` lies outside the span.
    pub fn solve(&self, v: &[i64]) -> Result<Option<Vec<BigRational>>> {
        let combo = match self.reduce(v) {
            Reduced::Outside(_) => return Ok(None),
            Reduced::Member(c) => c,
        };
        let ints: Vec<i128> = combo.iter().map(|&c| lift(c)).collect();
        if self.combination_equals(&ints, v) {
            return Ok(Some(
                ints.into_iter().map(|c| BigRational::from_integer(c.into())).collect(),
            ));
        }
        self.solve_rational(v).map(Some)
    }

    /// Like [`SpanBasis::solve`] but insists on integer coefficients.
    pub fn solve_integer(&self, v: &[i64]) -> Result<Option<Vec<BigInt>>> {
        let Some(x) = self.solve(v)? else { return Ok(None) };
        x.into_iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::Rank(format!("non-integral coefficient {c}")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn combination_equals(&self, coeffs: &[i128], v: &[i64]) -> bool {
        (0..self.dim).all(|i| {
            let mut acc: i128 = 0;
            for (c, o) in coeffs.iter().zip(&self.originals) {
                if *c != 0 && o[i] != 0 {
                    match c.checked_mul(o[i] as i128).and_then(|t| acc.checked_add(t)) {
                        Some(s) => acc = s,
                        None => return false,
                    }
                }
            }
            acc == v[i] as i128
        })
    }

    /// Rational solve on the pivot coordinates, then an exact check of every
    /// coordinate.
    fn solve_rational(&self, v: &[i64]) -> Result<Vec<BigRational>> {
        let n = self.originals.len();
        let pivots: Vec<usize> = self.rows.iter().map(|r| r.pivot).collect();
        let mut a: Vec<Vec<BigRational>> = pivots
            .iter()
            .map(|&p| {
                let mut row: Vec<BigRational> = self
                    .originals
                    .iter()
                    .map(|o| BigRational::from_integer(o[p].into()))
                    .collect();
                row.push(BigRational::from_integer(v[p].into()));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&i| !a[i][col].is_zero())
                .ok_or_else(|| Error::Rank("stored vectors are dependent over the rationals".into()))?;
            a.swap(col, piv);
            let s = BigRational::one() / &a[col][col];
            for x in a[col].iter_mut() {
                *x = &*x * &s;
            }
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for j in col..=n {
                        let t = &f * &a[col][j];
                        a[i][j] = &a[i][j] - t;
                    }
                }
            }
        }
        let x: Vec<BigRational> = a.into_iter().map(|r| r[n].clone()).collect();
        for i in 0..self.dim {
            let acc = x
                .iter()
                .zip(&self.originals)
                .fold(BigRational::zero(), |acc, (c, o)| acc + c * BigRational::from_integer(o[i].into()));
            if acc != BigRational::from_integer(v[i].into()) {
                return Err(Error::Rank(format!(
                    "modular membership not confirmed over the rationals at coordinate {i}"
                )));
            }
        }
        Ok(x)
    }
}

/// Exact rank over the rationals by fraction-free elimination; an
/// independent check for [`SpanBasis`].
pub fn rank_exact(vectors: &[Vec<i64>]) -> usize {
    let Some(dim) = vectors.first().map(Vec::len) else { return 0 };
    let mut m: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..dim {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let (f, g) = (m[i][col].clone(), m[rank][col].clone());
            for j in col..dim {
                let t = &g * &m[i][j] - &f * &m[rank][j];
                m[i][j] = t;
            }
            let c = m[i].iter().fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, x));
            if !c.is_zero() && !c.is_one() {
                let c = c.abs();
                for x in m[i].iter_mut() {
                    *x = &*x / &c;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
