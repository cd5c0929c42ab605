//! Dense univariate polynomials over a ring, with the integer-specific
//! operations (exact division, content, gcd) needed for root isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ExactDiv, FromInteger, Ring};

/// Coefficients in increasing degree order; trailing zeros are always trimmed,
/// so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Ring> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^degree`
    pub fn monomial(c: C, degree: usize) -> Self {
        let mut coeffs = vec![C::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Self::monomial(C::one(), 1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `t^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Horner evaluation after lifting each coefficient into `S`.
    pub fn eval_with<S: Ring>(&self, x: &S, lift: impl Fn(&C) -> S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + lift(c))
    }

    /// Evaluation at a point of the coefficient ring itself.
    pub fn eval_in(&self, x: &C) -> C {
        self.eval_with(x, C::clone)
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<C: Ring + FromPrimitive> Poly<C> {
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * C::from_usize(i).expect("degree fits the scalar"))
                .collect(),
        )
    }
}

impl<C: Ring> Zero for Poly<C> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<C: Ring> One for Poly<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

fn add_coeffs<C: Ring>(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.clone() + y.clone(),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

impl<C: Ring> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        Poly::new(add_coeffs(&self.coeffs, &rhs.coeffs))
    }
}

impl<C: Ring> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<C: Ring> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        self + &(-rhs)
    }
}

impl<C: Ring> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Ring> $tr for Poly<C> {
            type Output = Poly<C>;
            fn $m(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Ring> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

/// Polynomials with exact integer coefficients.
pub type IntPoly = Poly<BigInt>;
/// Polynomials with exact rational coefficients.
pub type RatPoly = Poly<BigRational>;

impl Poly<BigInt> {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Evaluate at any scalar the integers embed into (rationals, floats,
    /// complex samples).
    pub fn eval<S: FromInteger>(&self, x: &S) -> S {
        self.eval_with(x, S::from_integer)
    }

    /// Sign of `p(num/den)` for `den > 0`, computed in integers.
    pub fn sign_at(&self, num: &BigInt, den: &BigInt) -> i32 {
        debug_assert!(den.is_positive());
        let Some(n) = self.degree() else { return 0 };
        // den^n * p(num/den) = sum a_j num^j den^(n-j), by Horner.
        let mut acc = self.coeffs[n].clone();
        let mut den_pow = BigInt::one();
        for j in (0..n).rev() {
            den_pow *= den;
            acc = acc * num + &self.coeffs[j] * &den_pow;
        }
        sign(&acc)
    }

    /// Multiply by -1 if the leading coefficient is negative. Characteristic
    /// polynomials computed as `det(A - t)` carry a leading `(-1)^n`; this
    /// normalizes them to the monic form.
    pub fn monic_sign(self) -> Self {
        match self.leading() {
            Some(c) if c.is_negative() => -self,
            _ => self,
        }
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Quotient and remainder when `divisor` has a unit leading coefficient
    /// or, more generally, whenever every step divides exactly. Returns
    /// `None` if an inexact step is met.
    pub fn checked_div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = std::mem::take(&mut rem[i]);
            if c.is_zero() {
                continue;
            }
            let (q, r) = c.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate().take(dd) {
                rem[i - dd + j] -= &q * dc;
            }
            quot[i - dd] = q;
        }
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`, with the
    /// multiplier's sign made positive so Sturm sign patterns survive.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("pseudo-division by zero");
        let Some(da) = self.degree() else {
            return Self::zero();
        };
        if da < db {
            return self.clone();
        }
        let lc = b.leading().unwrap().abs();
        let scale = num_traits::pow(lc, da - db + 1);
        let scaled = self.scale(&scale);
        let b_pos = if b.leading().unwrap().is_negative() {
            -b
        } else {
            b.clone()
        };
        let (_, r) = scaled
            .checked_div_rem(&b_pos)
            .expect("pseudo-division is exact by construction");
        r
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// `self / gcd(self, self')`, primitive with positive leading coefficient.
    pub fn square_free_part(&self) -> Self {
        let d = self.derivative();
        if d.is_zero() {
            return self.primitive_part();
        }
        let g = self.gcd(&d);
        self.primitive_part().div_exact(&g)
    }

    pub fn to_rational(&self) -> RatPoly {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

impl ExactDiv for Poly<BigInt> {
    fn div_exact(&self, divisor: &Self) -> Self {
        match self.checked_div_rem(divisor) {
            Some((q, r)) if r.is_zero() => q,
            _ => panic!("inexact polynomial division ({self}) / ({divisor})"),
        }
    }
}

fn sign(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Renders as `c_d*t^d + ... + c_1*t + c_0`, skipping zero terms, with every
/// coefficient written out and signs separated by spaces.
impl fmt::Display for Poly<BigInt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match deg {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*t")?,
                _ => write!(f, "{mag}*t^{deg}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Poly<BigInt> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: format!("polynomial `{s}`: {msg}"),
        };
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut negative = false;
        let mut rest = s;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let (term, tail) = match rest.find([' ']) {
                Some(i) => (&rest[..i], Some(&rest[i..])),
                None => (rest, None),
            };
            let (c, deg) = match term.split_once('*') {
                None => (term, 0usize),
                Some((c, "t")) => (c, 1),
                Some((c, pw)) => {
                    let d = pw.strip_prefix("t^").ok_or_else(|| bad("expected t^d"))?;
                    (c, d.parse().map_err(|_| bad("bad exponent"))?)
                }
            };
            let mut c: BigInt = c.parse().map_err(|_| bad("bad coefficient"))?;
            if negative {
                c = -c;
            }
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, BigInt::zero());
            }
            coeffs[deg] += c;
            match tail {
                None => break,
                Some(t) => {
                    let t = t.trim_start();
                    let (sgn, r) = t.split_at(1);
                    negative = match sgn {
                        "+" => false,
                        "-" => true,
                        _ => return Err(bad("expected + or -")),
                    };
                    rest = r.trim_start();
                }
            }
        }
        Ok(Self::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn arithmetic_examples() {
        // (t+1)(t^2-2t) = t^3 - t^2 - 2t
        assert_eq!(&p(&[1, 1]) * &p(&[0, -2, 1]), p(&[0, -2, -1, 1]));
        assert_eq!(&p(&[-1, 1]) * &p(&[1, 1]), p(&[-1, 0, 1]));
        assert!((&IntPoly::zero() * &p(&[3, 4, 5])).is_zero());
        assert_eq!(&p(&[1, 2]) - &p(&[1, 2]), IntPoly::zero());
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(p(&[-1, -1, 1]).eval(&BigInt::from(2)), BigInt::from(1));
        assert_eq!(p(&[0, -2, 1]).eval(&BigInt::from(2)), BigInt::from(0));
        let x = BigRational::new(3.into(), 2.into());
        assert_eq!(
            p(&[1, 1, 1]).eval(&x),
            BigRational::new(19.into(), 4.into())
        );
        assert_eq!(p(&[1, 1, 1]).eval(&1.5f64), 4.75);
    }

    #[test]
    fn display_format() {
        assert_eq!(p(&[0, -2, 1]).to_string(), "1*t^2 - 2*t");
        assert_eq!(p(&[-1, -1, -1, 1]).to_string(), "1*t^3 - 1*t^2 - 1*t - 1");
        assert_eq!(p(&[1, 0, -3]).to_string(), "-3*t^2 + 1");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    #[test]
    fn gcd_and_square_free() {
        // (t-1)^2 (t+2)
        let f = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[2, 1]);
        assert_eq!(f.square_free_part(), p(&[-2, 1, 1]));
        assert_eq!(f.gcd(&p(&[-1, 1])), p(&[-1, 1]));
        // t^3 factor
        assert_eq!(p(&[0, 0, 0, 1]).square_free_part(), p(&[0, 1]));
    }

    #[test]
    fn exact_division() {
        let x = p(&[-1, -2, -1, 0, 1]);
        let q = x.div_exact(&p(&[-1, -1, 1]));
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(p(&[1, 0, 1]).checked_div_rem(&p(&[0, 2])).is_none());
    }

    proptest! {
        #[test]
        fn product_evaluates_to_product_of_values(
            a in prop::collection::vec(-9i64..=9, 0..8),
            b in prop::collection::vec(-9i64..=9, 0..8),
            num in -20i64..=20, den in 1i64..=7,
        ) {
            let (pa, pb) = (p(&a), p(&b));
            let x = BigRational::new(num.into(), den.into());
            prop_assert_eq!((&pa * &pb).eval(&x), pa.eval(&x) * pb.eval(&x));
        }

        #[test]
        fn display_round_trips(a in prop::collection::vec(-50i64..=50, 0..9)) {
            let pa = p(&a);
            prop_assert_eq!(pa.to_string().parse::<IntPoly>().unwrap(), pa);
        }
    }
}
