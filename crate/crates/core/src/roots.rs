//! Real-root isolation for integer polynomials by Sturm sequences, followed
//! by bisection down to a requested width.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A real root bracketed by `lo < root <= hi`, or pinned exactly when
/// `lo == hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEstimate {
    pub value: f64,
    pub radius: f64,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootEstimate {
    fn from_bracket(lo: BigRational, hi: BigRational) -> Self {
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        let radius = ((&hi - &lo) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::INFINITY);
        RootEstimate {
            value: mid.to_f64().unwrap_or(f64::NAN),
            // The f64 rounding of the midpoint is added to the bracket radius.
            radius: radius + f64::EPSILON * mid.to_f64().unwrap_or(0.0).abs(),
            lo,
            hi,
        }
    }

    fn exact(x: BigRational) -> Self {
        RootEstimate {
            value: x.to_f64().unwrap_or(f64::NAN),
            radius: f64::EPSILON * x.to_f64().unwrap_or(0.0).abs(),
            lo: x.clone(),
            hi: x,
        }
    }
}

/// Sturm chain of the square-free part of a nonzero polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let p0 = p.square_free_part();
        let mut chain = vec![p0.clone()];
        let p1 = p0.derivative();
        if !p1.is_zero() {
            let p1 = p1.primitive_part();
            chain.push(p1);
            loop {
                let n = chain.len();
                let r = chain[n - 2].pseudo_rem(&chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                // Positive content removal keeps the sign pattern intact.
                let g = r.content();
                let next = IntPoly::new(r.coeffs().iter().map(|c| -(c / &g)).collect());
                chain.push(next);
            }
        }
        Ok(SturmChain { chain })
    }

    /// The square-free polynomial heading the chain.
    pub fn head(&self) -> &IntPoly {
        &self.chain[0]
    }

    pub fn sign_changes(&self, x: &BigRational) -> usize {
        let mut changes = 0;
        let mut last = 0;
        for q in &self.chain {
            let s = q.sign_at(x.numer(), x.denom());
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        if a >= b {
            return 0;
        }
        self.sign_changes(a) - self.sign_changes(b)
    }
}

/// Integer strictly larger than every root modulus.
pub fn cauchy_bound(p: &IntPoly) -> BigInt {
    let lc = p.leading().expect("nonzero polynomial").abs();
    let max = p
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    // 1 + max|a_j| / |a_n| <= 2 + max|a_j| / |a_n|, rounded up.
    BigInt::from(2) + (max + &lc - BigInt::one()) / lc
}

pub fn largest_real_root(p: &IntPoly, lower_bound: f64) -> Result<RootEstimate> {
    largest_real_root_tol(p, lower_bound, DEFAULT_TOLERANCE)
}

/// Largest real root `>= lower_bound`, bracketed to width at most `tol`.
pub fn largest_real_root_tol(p: &IntPoly, lower_bound: f64, tol: f64) -> Result<RootEstimate> {
    let sturm = SturmChain::new(p)?;
    let sf = sturm.head();
    if sf.degree() == Some(0) {
        return Err(Error::NoRootAbove(lower_bound));
    }
    let lb = BigRational::from_float(lower_bound)
        .ok_or_else(|| Error::Parse { line: 0, msg: format!("lower bound {lower_bound} is not finite") })?;
    let u = BigRational::from_integer(cauchy_bound(sf));
    if lb >= u {
        return Err(Error::NoRootAbove(lower_bound));
    }
    if sturm.count_in(&lb, &u) == 0 {
        return if sf.sign_at(lb.numer(), lb.denom()) == 0 {
            Ok(RootEstimate::exact(lb))
        } else {
            Err(Error::NoRootAbove(lower_bound))
        };
    }
    let tol = BigRational::from_float(tol.max(f64::MIN_POSITIVE)).unwrap();
    let two = BigRational::from_integer(2.into());
    let (mut lo, mut hi) = (lb, u);
    let sign_at = |x: &BigRational| sf.sign_at(x.numer(), x.denom());

    // Shrink until the bracket holds only the largest root.
    while sturm.count_in(&lo, &hi) > 1 {
        let mid = (&lo + &hi) / &two;
        if sturm.count_in(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if sign_at(&hi) == 0 {
        return Ok(RootEstimate::exact(hi));
    }
    let s_hi = sign_at(&hi);
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        let s = sign_at(&mid);
        if s == 0 {
            return Ok(RootEstimate::exact(mid));
        }
        // One simple root in (lo, hi]: it lies above mid iff sign(mid) != sign(hi).
        if s == s_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // A rational root num/den has den | lc, so den = lc is the only candidate
    // denominator needed.
    let est = RootEstimate::from_bracket(lo.clone(), hi.clone());
    if let Some(lc) = sf.leading().unwrap().abs().to_i64().filter(|&l| l <= 1 << 20) {
        if let Some(num) = <BigInt as FromPrimitive>::from_f64((est.value * lc as f64).round()) {
            let cand = BigRational::new(num, lc.into());
            if cand > lo && cand <= hi && sign_at(&cand) == 0 {
                return Ok(RootEstimate::exact(cand));
            }
        }
    }
    Ok(est)
}
