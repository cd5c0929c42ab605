//! Perron-Frobenius eigenvalues, the gap radius `ρ`, per-instance spectral
//! reports, and sampling of polynomials on circles `|t| = ρ`.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::charpoly::PerturbedCharPoly;
use crate::error::{Error, Result};
use crate::higher_block::{BlockContext, CaseTag, ForbidSet};
use crate::poly::IntPoly;
use crate::roots::{largest_real_root, RootEstimate};
use crate::sft::{char_poly_t, SftSpec};

pub const CIRCLE_SAMPLES: usize = 64;

/// Largest real root `>= 0`; exactly zero when there is none (a nilpotent
/// perturbed operator).
pub fn pf_eigenvalue(x: &IntPoly) -> Result<RootEstimate> {
    match largest_real_root(x, 0.0) {
        Err(Error::NoRootAbove(_)) => Ok(RootEstimate {
            value: 0.0,
            radius: 0.0,
            lo: BigRational::zero(),
            hi: BigRational::zero(),
        }),
        other => other,
    }
}

/// Spectral data of the unperturbed shift.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSpectrum {
    pub lambda0: RootEstimate,
    /// Largest modulus among the remaining eigenvalues; 0 when `r = 1`.
    pub second_modulus: f64,
    /// `sqrt(max(1, second_modulus) * λ0)`, strictly between 1 and `λ0`.
    pub rho: f64,
}

pub fn shift_spectrum(spec: &SftSpec) -> Result<ShiftSpectrum> {
    let lambda0 = pf_eigenvalue(&char_poly_t(spec))?;
    let l0 = lambda0.value;
    if l0 <= 1.0 + 1e-12 {
        return Err(Error::NoSpectralGap(l0));
    }
    let r = spec.r();
    let m = spec.matrix();
    let dense = DMatrix::from_fn(r, r, |i, j| m.get(i, j).to_f64().unwrap());
    let mut eig: Vec<Complex<f64>> = dense.complex_eigenvalues().iter().copied().collect();
    let dominant = (0..eig.len())
        .min_by(|&a, &b| (eig[a] - l0).norm().total_cmp(&(eig[b] - l0).norm()))
        .expect("nonempty spectrum");
    eig.remove(dominant);
    let second_modulus = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if second_modulus >= l0 * (1.0 - 1e-9) {
        return Err(Error::DominantTie { lambda0: l0, second: second_modulus });
    }
    let rho = (second_modulus.max(1.0) * l0).sqrt();
    Ok(ShiftSpectrum { lambda0, second_modulus, rho })
}

pub fn spectral_gap_rho(spec: &SftSpec) -> Result<f64> {
    Ok(shift_spectrum(spec)?.rho)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub k: usize,
    /// Rendered forbidden words, in basis order.
    pub words: Vec<String>,
    pub case_tag: CaseTag,
    pub d1: usize,
    pub d2: Option<usize>,
    pub delta: Option<usize>,
    pub lambda0: f64,
    pub lambda0_radius: f64,
    pub lambda1: f64,
    pub lambda1_radius: f64,
    pub diff: f64,
    /// `diff * λ0^d1`.
    pub scaled_one: f64,
    /// `diff * λ0^(k/2)`.
    pub scaled_two: f64,
    pub rho: f64,
}

impl SpectralReport {
    pub fn from_charpoly(spec: &SftSpec, spectrum: &ShiftSpectrum, x: &PerturbedCharPoly) -> Result<Self> {
        let lambda1 = pf_eigenvalue(&x.x)?;
        let l0 = spectrum.lambda0.value;
        let basis = &x.basis;
        let diff = (l0 - lambda1.value).abs();
        Ok(SpectralReport {
            k: basis.k,
            words: basis.words.iter().map(|w| spec.render(w)).collect(),
            case_tag: basis.case_tag,
            d1: basis.d1,
            d2: basis.d2,
            delta: basis.delta,
            lambda0: l0,
            lambda0_radius: spectrum.lambda0.radius,
            lambda1: lambda1.value,
            lambda1_radius: lambda1.radius,
            diff,
            scaled_one: diff * l0.powi(basis.d1 as i32),
            scaled_two: diff * l0.powf(basis.k as f64 / 2.0),
            rho: spectrum.rho,
        })
    }
}

pub fn spectral_report(ctx: &BlockContext, spectrum: &ShiftSpectrum, c: &ForbidSet) -> Result<SpectralReport> {
    let x = ctx.perturbed_charpoly(c)?;
    SpectralReport::from_charpoly(ctx.spec(), spectrum, &x)
}

pub fn circle_points(radius: f64, samples: usize) -> Vec<Complex<f64>> {
    (0..samples)
        .map(|j| Complex::from_polar(radius, std::f64::consts::TAU * j as f64 / samples as f64))
        .collect()
}

/// `min |p(t)| / |t|^exponent` over `samples` equally spaced points of
/// `|t| = radius`.
pub fn circle_min_ratio(p: &IntPoly, radius: f64, exponent: usize, samples: usize) -> f64 {
    let scale = radius.powi(exponent as i32);
    circle_points(radius, samples)
        .iter()
        .map(|z| p.eval::<Complex<f64>>(z).norm() / scale)
        .fold(f64::INFINITY, f64::min)
}

/// `max |m(t)| / (1 + |t|^d1 + |t|^d2)` over the annulus `inner <= |t| <=
/// outer`, sampled on `radii` circles of [`CIRCLE_SAMPLES`] points.
pub fn annulus_max_ratio(m: &IntPoly, inner: f64, outer: f64, d1: usize, d2: usize, radii: usize) -> f64 {
    let mut best: f64 = 0.0;
    for step in 0..radii.max(1) {
        let s = if radii > 1 { step as f64 / (radii - 1) as f64 } else { 0.0 };
        let radius = inner + (outer - inner) * s;
        let shape = 1.0 + radius.powi(d1 as i32) + radius.powi(d2 as i32);
        for z in circle_points(radius, CIRCLE_SAMPLES) {
            best = best.max(m.eval::<Complex<f64>>(&z).norm() / shape);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perron_values() {
        let g = pf_eigenvalue(&char_poly_t(&SftSpec::golden_mean())).unwrap();
        assert!((g.value - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(pf_eigenvalue(&char_poly_t(&SftSpec::full(2))).unwrap().value, 2.0);
        let trib = pf_eigenvalue(&IntPoly::from_i64s(&[-1, -1, -1, 1])).unwrap();
        assert!((trib.value - 1.839286755214161).abs() < 1e-12);
        assert_eq!(pf_eigenvalue(&IntPoly::from_i64s(&[0, 0, 1])).unwrap().value, 0.0);
        assert_eq!(pf_eigenvalue(&IntPoly::from_i64s(&[1, 0, 1])).unwrap().value, 0.0);
    }

    #[test]
    fn gap_radius() {
        assert!((spectral_gap_rho(&SftSpec::full(2)).unwrap() - 2f64.sqrt()).abs() < 1e-9);
        let golden = spectral_gap_rho(&SftSpec::golden_mean()).unwrap();
        assert!((golden - ((1.0 + 5f64.sqrt()) / 2.0).sqrt()).abs() < 1e-9);
        assert!((golden - 1.27202).abs() < 1e-5);
        assert!(matches!(spectral_gap_rho(&SftSpec::cycle(3)), Err(Error::NoSpectralGap(_))));
        // Period 2: eigenvalues 2 and -2 tie in modulus.
        let bipartite = SftSpec::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![vec![0, 0, 1, 1], vec![0, 0, 1, 1], vec![1, 1, 0, 0], vec![1, 1, 0, 0]],
        )
        .unwrap();
        assert!(matches!(spectral_gap_rho(&bipartite), Err(Error::DominantTie { .. })));
    }

    #[test]
    fn circle_ratios() {
        // |t + 1| on |t| = 2 is at least 1, attained at t = -2.
        let p = IntPoly::from_i64s(&[1, 1]);
        assert!((circle_min_ratio(&p, 2.0, 1, CIRCLE_SAMPLES) - 0.5).abs() < 1e-12);
        let q = IntPoly::from_i64s(&[0, 0, 3]);
        assert!((annulus_max_ratio(&q, 1.0, 2.0, 2, 0, 5) - 12.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn reports_for_small_examples() {
        let full = SftSpec::full(2);
        let spectrum = shift_spectrum(&full).unwrap();
        let ctx = BlockContext::new(&full, 2).unwrap();
        let one = ForbidSet::new(&full, vec![full.parse_word("aaa").unwrap()]).unwrap();
        let r = spectral_report(&ctx, &spectrum, &one).unwrap();
        assert!((r.scaled_one - 0.3214265).abs() < 1e-6);
        let two = ForbidSet::new(&full, vec![full.parse_word("aaa").unwrap(), full.parse_word("bbb").unwrap()])
            .unwrap();
        let r = spectral_report(&ctx, &spectrum, &two).unwrap();
        assert!((r.lambda1 - 1.6180340).abs() < 1e-6);
        assert!((r.scaled_two - 0.7639320).abs() < 1e-6);
    }
}
