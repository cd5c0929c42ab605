//! Brute-force characteristic polynomials of integer matrices, independent
//! of every structured computation in this crate.
//!
//! Deflation first: a zero column (or row) contributes a factor `t`, and
//! two equal columns `v, v'` mean `e_v' - e_v` is in the kernel, so adding
//! row `v'` into row `v` and deleting `v'` splits off another `t`. Equal rows
//! are handled through the transpose. The residual is small for higher-block
//! operators and goes either to fraction-free elimination over `Z[t]` or to
//! a Hessenberg reduction modulo several primes joined by CRT.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::higher_block::{apply_forbid, build_tk, ForbidSet, ShiftMatrixK};
use crate::matrix::IntMatrix;
use crate::poly::IntPoly;
use crate::sft::SftSpec;

pub const DEFAULT_ORACLE_CAP: usize = 512;

/// Residuals up to this size use elimination over `Z[t]`.
const BAREISS_MAX_DIM: usize = 16;

type Dense = Vec<Vec<i64>>;

fn transpose(m: &Dense) -> Dense {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}

fn keep(m: &Dense, alive: &[bool]) -> Dense {
    m.iter()
        .zip(alive)
        .filter(|(_, &a)| a)
        .map(|(row, _)| row.iter().zip(alive).filter(|(_, &a)| a).map(|(&x, _)| x).collect())
        .collect()
}

/// One round of merging equal columns; zero columns are dropped outright.
/// Returns the number of `t` factors split off.
fn merge_columns(m: &mut Dense) -> Result<usize> {
    let n = m.len();
    let mut groups: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for j in 0..n {
        groups.entry((0..n).map(|i| m[i][j]).collect()).or_default().push(j);
    }
    let mut alive = vec![true; n];
    let mut removed = 0;
    let mut order: Vec<(Vec<i64>, Vec<usize>)> = groups.into_iter().collect();
    order.sort_by_key(|(_, g)| g[0]);
    for (col, group) in order {
        if col.iter().all(|&x| x == 0) {
            for &v in &group {
                alive[v] = false;
            }
            removed += group.len();
            continue;
        }
        let (rep, rest) = group.split_first().unwrap();
        for &v in rest {
            for j in 0..n {
                m[*rep][j] = m[*rep][j].checked_add(m[v][j]).ok_or(Error::Overflow("oracle deflation"))?;
            }
            alive[v] = false;
            removed += 1;
        }
    }
    if removed > 0 {
        *m = keep(m, &alive);
    }
    Ok(removed)
}

/// Deflates until no zero or repeated row or column remains; returns the
/// residual matrix and the power of `t` split off.
pub fn deflate(m: Dense) -> Result<(Dense, usize)> {
    let mut m = m;
    let mut power = 0;
    loop {
        let by_cols = merge_columns(&mut m)?;
        let mut tr = transpose(&m);
        let by_rows = merge_columns(&mut tr)?;
        m = transpose(&tr);
        power += by_cols + by_rows;
        if by_cols + by_rows == 0 {
            return Ok((m, power));
        }
    }
}

fn to_dense(m: &IntMatrix) -> Result<Dense> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| m.get(i, j).to_i64().ok_or(Error::Overflow("oracle input entry")))
                .collect()
        })
        .collect()
}

/// Monic `det(t I - M)` by fraction-free elimination on `M - t I`.
pub fn charpoly_bareiss(m: &Dense) -> IntPoly {
    let n = m.len();
    let flat: Vec<i64> = m.iter().flatten().copied().collect();
    let raw = IntMatrix::from_i64(n, n, &flat).minus_t().det_bareiss();
    if n.is_multiple_of(2) { raw } else { -raw }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Coefficients of `det(t I - M) mod p`, constant term first.
fn charpoly_mod(m: &Dense, p: u64) -> Vec<u64> {
    let n = m.len();
    let mut h: Vec<Vec<u64>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = inv_mod(h[j + 1][j], p);
        for r in j + 2..n {
            let u = mul_mod(h[r][j], inv, p);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let s = mul_mod(u, h[j + 1][c], p);
                h[r][c] = (h[r][c] + p - s) % p;
            }
            for row in h.iter_mut() {
                let s = mul_mod(u, row[r], p);
                row[j + 1] = (row[j + 1] + s) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let prev = &polys[k];
        let mut next = vec![0u64; k + 2];
        for (e, &c) in prev.iter().enumerate() {
            next[e + 1] = (next[e + 1] + c) % p;
            next[e] = (next[e] + p - mul_mod(h[k][k], c, p)) % p;
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h[i + 1][i], p);
            let f = mul_mod(h[i][k], prod, p);
            if f == 0 {
                continue;
            }
            for (e, &c) in polys[i].iter().enumerate() {
                next[e] = (next[e] + p - mul_mod(f, c, p)) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// `log2` of a bound on every coefficient: the coefficient of `t^(n-j)` is a
/// sum of `C(n, j)` principal minors, each bounded by a product of `j`
/// column norms.
fn log2_coefficient_bound(m: &Dense) -> f64 {
    let n = m.len();
    let mut norms: Vec<f64> = (0..n)
        .map(|j| {
            let s: f64 = m.iter().map(|r| (r[j] as f64).powi(2)).sum();
            s.sqrt().max(1.0).log2()
        })
        .collect();
    norms.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut best: f64 = 0.0;
    let (mut log_binom, mut log_prod) = (0.0f64, 0.0f64);
    for j in 1..=n {
        log_binom += ((n + 1 - j) as f64).log2() - (j as f64).log2();
        log_prod += norms[j - 1];
        best = best.max(log_binom + log_prod);
    }
    best
}

/// Monic `det(t I - M)` from images modulo primes below `2^31`.
pub fn charpoly_multimodular(m: &Dense) -> IntPoly {
    let n = m.len();
    let needed_bits = log2_coefficient_bound(m) + 2.0;
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut p = 1u64 << 31;
    while (modulus.bits() as f64) < needed_bits + 1.0 {
        p -= 1;
        while !is_prime(p) {
            p -= 1;
        }
        let image = charpoly_mod(m, p);
        let pb = BigInt::from(p);
        let inv = BigInt::from(inv_mod((&modulus % &pb).to_u64().unwrap(), p));
        for (a, &r) in acc.iter_mut().zip(&image) {
            // a' = a + modulus * ((r - a) * modulus^{-1} mod p)
            let diff = (BigInt::from(r) - &*a).mod_floor(&pb);
            let step = (diff * &inv).mod_floor(&pb);
            *a += &modulus * step;
        }
        modulus *= pb;
    }
    let half = &modulus >> 1;
    IntPoly::new(acc.into_iter().map(|a| if a > half { a - &modulus } else { a }).collect())
}

pub fn brute_force_charpoly_capped(m: &IntMatrix, cap: usize) -> Result<IntPoly> {
    if m.rows() != m.cols() {
        return Err(Error::Shape { expected: m.rows(), found: m.cols() });
    }
    if m.rows() > cap {
        return Err(Error::OracleCap { dim: m.rows(), cap });
    }
    let (residual, power) = deflate(to_dense(m)?)?;
    let core = if residual.len() <= BAREISS_MAX_DIM {
        charpoly_bareiss(&residual)
    } else {
        charpoly_multimodular(&residual)
    };
    Ok(core.shift(power))
}

/// Monic characteristic polynomial of a square integer matrix.
pub fn brute_force_charpoly(m: &IntMatrix) -> Result<IntPoly> {
    brute_force_charpoly_capped(m, DEFAULT_ORACLE_CAP)
}

pub fn operator_charpoly(tk: &ShiftMatrixK) -> Result<IntPoly> {
    if tk.dim() > DEFAULT_ORACLE_CAP {
        return Err(Error::OracleCap { dim: tk.dim(), cap: DEFAULT_ORACLE_CAP });
    }
    brute_force_charpoly(&tk.to_int_matrix())
}

/// Characteristic polynomial of `T_k` with the words of `c` forbidden.
pub fn forbidden_charpoly(spec: &SftSpec, c: &ForbidSet) -> Result<IntPoly> {
    let tk = build_tk(spec, c.k())?;
    operator_charpoly(&apply_forbid(&tk, c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn forbid(spec: &SftSpec, words: &[&str]) -> IntPoly {
        let c = ForbidSet::new(spec, words.iter().map(|w| spec.parse_word(w).unwrap()).collect()).unwrap();
        forbidden_charpoly(spec, &c).unwrap()
    }

    #[test]
    fn hand_expanded_examples() {
        let full = SftSpec::full(2);
        assert_eq!(forbid(&full, &["aaa"]), IntPoly::from_i64s(&[0, -1, -1, -1, 1]));
        assert_eq!(forbid(&full, &["aaa", "bbb"]), IntPoly::from_i64s(&[-1, -2, -1, 0, 1]));
        let id = IntMatrix::identity(3);
        assert_eq!(brute_force_charpoly(&id).unwrap(), IntPoly::from_i64s(&[-1, 3, -3, 1]));
    }

    #[test]
    fn cap_enforced() {
        let m = IntMatrix::identity(5);
        assert!(matches!(brute_force_charpoly_capped(&m, 4), Err(Error::OracleCap { dim: 5, cap: 4 })));
    }

    fn random_dense(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Dense {
        (0..n).map(|_| (0..n).map(|_| rng.random_range(lo..=hi)).collect()).collect()
    }

    #[test]
    fn multimodular_matches_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.random_range(1..=9);
            let m = random_dense(&mut rng, n, -6, 6);
            assert_eq!(charpoly_multimodular(&m), charpoly_bareiss(&m), "{m:?}");
        }
    }

    #[test]
    fn deflation_preserves_charpoly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let n = rng.random_range(2..=8);
            let mut m = random_dense(&mut rng, n, 0, 1);
            // Plant repeated columns and rows so deflation has work to do.
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            for row in m.iter_mut() {
                row[b] = row[a];
            }
            let (c, d) = (rng.random_range(0..n), rng.random_range(0..n));
            m[d] = m[c].clone();
            let (residual, power) = deflate(m.clone()).unwrap();
            assert_eq!(charpoly_bareiss(&residual).shift(power), charpoly_bareiss(&m));
        }
    }

    #[test]
    fn full_shift_block_operator_deflates() {
        // T_6 on the full 2-shift: 64 states deflate to the 2x2 matrix of ones.
        let full = SftSpec::full(2);
        let tk = build_tk(&full, 6).unwrap();
        assert_eq!(operator_charpoly(&tk).unwrap(), IntPoly::from_i64s(&[0, -2, 1]).shift(62));
    }

    #[test]
    fn dense_residual_uses_modular_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = random_dense(&mut rng, 24, -3, 3);
        let flat: Vec<i64> = m.iter().flatten().copied().collect();
        let chi = brute_force_charpoly(&IntMatrix::from_i64(24, 24, &flat)).unwrap();
        // Value at t = 2 against an exact determinant of 2 I - M.
        let shifted: Vec<i64> = (0..24 * 24)
            .map(|x| if x / 24 == x % 24 { 2 - flat[x] } else { -flat[x] })
            .collect();
        let det = IntMatrix::from_i64(24, 24, &shifted).det_bareiss();
        assert_eq!(chi.eval_in(&BigInt::from(2)), det);
        assert_eq!(chi.degree(), Some(24));
    }
}
