//! Laguerre polynomials, Γ ratios, the terminating ₂F₁(−k, ½; 3⁄2; 2) and the
//! radial wavefunctions built from them.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_finite, QuadratureResult};
use crate::summation::NeumaierSum;

pub const MAX_LAGUERRE_DEGREE: usize = 10_000;
pub const MAX_GAMMA_RATIO_K: usize = 10_000;
pub const MAX_HYP2F1_K: usize = 10_000;
pub const MAX_HYDROGEN_N: u32 = 20;
pub const MAX_OSCILLATOR_K: usize = 1_000;

/// Largest `k` for which the alternating finite sum stays within the
/// `1e-9` relative cancellation budget in double precision.
pub const FINITE_SUM_MAX_K: usize = 14;

/// Relative cancellation error above which the finite sum is refused.
pub const FINITE_SUM_REL_TOLERANCE: f64 = 1e-9;

const HYP2F1_QUADRATURE_TOL: f64 = 1e-14;

/// Generalized Laguerre polynomial `L_m^α(x)` by forward recurrence.
pub fn laguerre(degree: usize, order: f64, x: f64) -> Result<f64> {
    if degree > MAX_LAGUERRE_DEGREE {
        return invalid(format!(
            "Laguerre degree {degree} exceeds {MAX_LAGUERRE_DEGREE}"
        ));
    }
    if !x.is_finite() || x < 0.0 {
        return invalid(format!(
            "Laguerre argument must be finite and non-negative, got {x}"
        ));
    }
    if !order.is_finite() {
        return invalid(format!("Laguerre order must be finite, got {order}"));
    }
    Ok(laguerre_unchecked(degree, order, x))
}

pub(crate) fn laguerre_unchecked(degree: usize, order: f64, x: f64) -> f64 {
    if degree == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + order - x;
    for m in 1..degree {
        let m = m as f64;
        let next = ((2.0 * m + 1.0 + order - x) * curr - (m + order) * prev) / (m + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `Γ(k + 3/2) / k!` via `r_{k+1} = r_k (k + 3/2) / (k + 1)`.
pub fn gamma_ratio(k: usize) -> Result<f64> {
    if k > MAX_GAMMA_RATIO_K {
        return invalid(format!("gamma_ratio index {k} exceeds {MAX_GAMMA_RATIO_K}"));
    }
    Ok(gamma_ratios(k).pop().expect("at least one entry"))
}

/// `Γ(j + 3/2) / j!` for `j = 0..=k_max`, sharing one recurrence.
pub fn gamma_ratios(k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut r = 0.5 * PI.sqrt();
    out.push(r);
    for j in 0..k_max {
        let j = j as f64;
        r *= (j + 1.5) / (j + 1.0);
        out.push(r);
    }
    out
}

/// Value of the finite ₂F₁ sum with its rounding-error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteSum {
    pub value: f64,
    pub error_bound: f64,
}

/// `Σ_{q=0}^{k} (−1)^q C(k,q) 2^q / (2q+1)` in compensated double precision.
///
/// Fails with [`Error::LossOfPrecision`] once the cancellation bound exceeds
/// [`FINITE_SUM_REL_TOLERANCE`] relative to the result.
pub fn hyp2f1_neg_finite_sum(k: usize) -> Result<FiniteSum> {
    if k > MAX_HYP2F1_K {
        return invalid(format!("2F1 index {k} exceeds {MAX_HYP2F1_K}"));
    }
    let mut acc = NeumaierSum::new();
    // C(k,q) 2^q built incrementally; exact integers while below 2^53
    let mut weight = 1.0_f64;
    for q in 0..=k {
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * weight / (2 * q + 1) as f64);
        weight = weight * (2 * (k - q)) as f64 / (q + 1) as f64;
    }
    let value = acc.value();
    let inexact_weights = weight_bits_exceeded(k);
    // one rounding for the division, plus ~q more per term if the weights overflowed 53 bits
    let per_term = if inexact_weights { 2.0 + k as f64 } else { 2.0 };
    let error_bound = acc.error_bound() * per_term;
    let relative_error = error_bound / value.abs();
    if !(relative_error <= FINITE_SUM_REL_TOLERANCE) {
        return Err(Error::LossOfPrecision { k, relative_error });
    }
    Ok(FiniteSum { value, error_bound })
}

fn weight_bits_exceeded(k: usize) -> bool {
    // max_q C(k,q) 2^q ≤ 3^k; with the extra factor 2(k−q) in the update
    (k as f64) * 3f64.log2() + ((2 * k.max(1)) as f64).log2() >= 53.0
}

/// `∫₀¹ (1 − 2z²)^k dz` by adaptive quadrature.
pub fn hyp2f1_neg_integral(k: usize) -> Result<QuadratureResult> {
    if k > MAX_HYP2F1_K {
        return invalid(format!("2F1 index {k} exceeds {MAX_HYP2F1_K}"));
    }
    let kk = k as i32;
    integrate_finite(
        |z| (1.0 - 2.0 * z * z).powi(kk),
        0.0,
        1.0,
        HYP2F1_QUADRATURE_TOL,
    )
}

/// The finite sum evaluated in exact rational arithmetic, rounded once.
pub fn hyp2f1_neg_exact(k: usize) -> f64 {
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    let mut pow2 = BigInt::one();
    for q in 0..=k {
        let term = BigRational::new(&binom * &pow2, BigInt::from(2 * q + 1));
        if q % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        binom = binom * BigInt::from(k - q) / BigInt::from(q + 1);
        pow2 *= 2;
    }
    total.to_f64().expect("finite rational")
}

/// `₂F₁(−k, ½; 3⁄2; 2)`: finite sum up to [`FINITE_SUM_MAX_K`], integral
/// representation beyond.
pub fn hyp2f1_neg(k: usize) -> Result<f64> {
    if k <= FINITE_SUM_MAX_K {
        Ok(hyp2f1_neg_finite_sum(k)?.value)
    } else {
        Ok(hyp2f1_neg_integral(k)?.value)
    }
}

/// `√(4/n⁵) e^{−x/n} L¹_{n−1}(2x/n)`.
pub fn hydrogen_radial(n: u32, x: f64) -> Result<f64> {
    if n == 0 || n > MAX_HYDROGEN_N {
        return invalid(format!(
            "principal quantum number must be in 1..={MAX_HYDROGEN_N}, got {n}"
        ));
    }
    if !x.is_finite() || x < 0.0 {
        return invalid(format!("radius must be finite and non-negative, got {x}"));
    }
    let nf = n as f64;
    let norm = (4.0 / nf.powi(5)).sqrt();
    Ok(norm * (-x / nf).exp() * laguerre_unchecked(n as usize - 1, 1.0, 2.0 * x / nf))
}

/// `√(2 k! / Γ(k + 3/2))`, evaluated in log space.
pub fn oscillator_norm(k: usize) -> f64 {
    let kf = k as f64;
    (0.5 * (std::f64::consts::LN_2 + ln_gamma(kf + 1.0) - ln_gamma(kf + 1.5))).exp()
}

/// `φ_k(x) = √(2 k! / Γ(k + 3/2)) e^{−x²/2} L^{1/2}_k(x²)`.
pub fn oscillator_radial(k: usize, x: f64) -> Result<f64> {
    if k > MAX_OSCILLATOR_K {
        return invalid(format!("oscillator index {k} exceeds {MAX_OSCILLATOR_K}"));
    }
    if !x.is_finite() || x < 0.0 {
        return invalid(format!("radius must be finite and non-negative, got {x}"));
    }
    Ok(oscillator_norm(k) * (-0.5 * x * x).exp() * laguerre_unchecked(k, 0.5, x * x))
}
