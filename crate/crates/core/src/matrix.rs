//! Dense matrices over a ring, with fraction-free determinants.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::{IntPoly, Poly};
use crate::scalar::{ExactDiv, Ring};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Ring> Matrix<C> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| C::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Keep the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Drop the listed rows and columns.
    pub fn delete(&self, rows: &[usize], cols: &[usize]) -> Self {
        let keep_r: Vec<usize> = (0..self.rows).filter(|i| !rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|j| !cols.contains(j)).collect();
        self.select(&keep_r, &keep_c)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(C::zero(), |acc, l| {
                acc + self.get(i, l).clone() * rhs.get(l, j).clone()
            })
        })
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Cofactor expansion along the first row. Exponential; used only as an
    /// independent check on small matrices.
    pub fn det_cofactor(&self) -> C {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return C::one();
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = C::zero();
        for j in 0..n {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let term = a.clone() * self.delete(&[0], &[j]).det_cofactor();
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
}

impl<C: Ring + ExactDiv> Matrix<C> {
    /// Bareiss fraction-free elimination with row pivoting. Every division
    /// is exact, so the routine stays inside the ring.
    pub fn det_bareiss(&self) -> C {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return C::one();
        }
        let mut a: Vec<Vec<C>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut negate = false;
        let mut prev = C::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        negate = !negate;
                    }
                    None => return C::zero(),
                }
            }
            let (top, bottom) = a.split_at_mut(k + 1);
            let pivot_row = &top[k];
            let pivot = pivot_row[k].clone();
            for row in bottom.iter_mut() {
                let factor = row[k].clone();
                for j in k + 1..n {
                    let v = pivot.clone() * row[j].clone() - factor.clone() * pivot_row[j].clone();
                    row[j] = v.div_exact(&prev);
                }
                row[k] = C::zero();
            }
            prev = pivot;
        }
        let d = a[n - 1][n - 1].clone();
        if negate { -d } else { d }
    }
}

pub type IntMatrix = Matrix<BigInt>;
pub type PolyMatrix = Matrix<IntPoly>;

impl Matrix<BigInt> {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `A - t I` as a polynomial matrix.
    pub fn minus_t(&self) -> PolyMatrix {
        assert_eq!(self.rows, self.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            let c = Poly::constant(self.get(i, j).clone());
            if i == j {
                &c - &IntPoly::t()
            } else {
                c
            }
        })
    }
}

impl Matrix<IntPoly> {
    pub fn is_constant_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_determinants() {
        let m = IntMatrix::from_i64(2, 2, &[1, 2, 3, 4]);
        assert_eq!(m.det_bareiss(), BigInt::from(-2));
        assert_eq!(m.det_cofactor(), BigInt::from(-2));
        let z = IntMatrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 1, 1, 0, 0]);
        assert_eq!(z.det_bareiss(), BigInt::from(1));
        let s = IntMatrix::from_i64(2, 2, &[1, 2, 2, 4]);
        assert_eq!(s.det_bareiss(), BigInt::from(0));
    }

    #[test]
    fn bareiss_agrees_with_cofactor_on_random_integers() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..=6);
            let data: Vec<i64> = (0..n * n).map(|_| rng.random_range(-3..=3)).collect();
            let m = IntMatrix::from_i64(n, n, &data);
            assert_eq!(m.det_bareiss(), m.det_cofactor());
        }
    }

    #[test]
    fn polynomial_determinant_is_characteristic_polynomial() {
        let golden = IntMatrix::from_i64(2, 2, &[1, 1, 1, 0]);
        let chi = golden.minus_t().det_bareiss();
        assert_eq!(chi, IntPoly::from_i64s(&[-1, -1, 1]));
        let id = IntMatrix::identity(3).minus_t().det_bareiss();
        // det(I - t) = (1 - t)^3
        assert_eq!(id, IntPoly::from_i64s(&[1, -3, 3, -1]));
    }
}
