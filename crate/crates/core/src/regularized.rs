//! η-regularization of the two divergent oscillator-basis series and their
//! η → 1 limit.
//!
//! With `g_k = Γ(k + 3/2)/k!`, `F_k = ₂F₁(−k, ½; 3⁄2; 2)` and `P = 16√(2/π)`:
//!
//! ```text
//! A(η) = P Σ g_k F_k η^k               = 8√2 ∫₀¹ dz (1 − η(1 − 2z²))^{−3/2}
//! B(η) = P Σ g_k √(π/(8k + 6)) η^k     = 8 ∫₀^∞ dz e^{−3z²/4} (1 − η e^{−z²})^{−3/2}
//! ```
//!
//! Both blow up as η → 1 but `A − B` stays finite; its limit is `S₁ₛ(0)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureResult, SeriesPatch};
use crate::special_functions::{gamma_ratios, hyp2f1_neg, MAX_GAMMA_RATIO_K};
use crate::summation::NeumaierSum;

pub const DEFAULT_SCHEDULE: [f64; 5] = [0.90, 0.95, 0.98, 0.99, 0.995];

/// Absolute truncation tolerance for the plain η-series.
pub const SERIES_TAIL_TOLERANCE: f64 = 1e-12;

pub const CLOSED_FORM_TOLERANCE: f64 = 1e-12;

/// Below this `t` the difference integrand is taken from its Taylor series.
pub const SMALL_T_THRESHOLD: f64 = 0.1;

/// Default Levin order for the accelerated difference series.
pub const DEFAULT_LEVIN_ORDER: usize = 4;

/// `I₂(1) = √2/8`.
pub const I2_AT_UNITY: f64 = SQRT_2 / 8.0;

/// Taylor coefficients of
/// `h(t) = t e^{−t²}/√(1 − e^{−t²}) − e^{−3t²/4}` in powers of `u = t²`,
/// starting at `u²`.
const H_SERIES: [f64; 9] = [
    -1.0 / 48.0,
    1.0 / 64.0,
    -7.0 / 1280.0,
    3.0 / 2560.0,
    -5347.0 / 30_965_760.0,
    811.0 / 41_287_680.0,
    -15_209.0 / 7_431_782_400.0,
    1021.0 / 4_954_521_600.0,
    -11_731.0 / 775_107_379_200.0,
];

fn series_prefactor() -> f64 {
    16.0 * (2.0 / PI).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSchedule {
    values: Vec<f64>,
    extrapolation_order: usize,
}

impl EtaSchedule {
    /// `extrapolation_order` is the degree of the polynomial in `1 − η`
    /// fitted through the `order + 1` points closest to η = 1.
    pub fn new(values: Vec<f64>, extrapolation_order: usize) -> Result<Self> {
        if values.len() < 3 {
            return invalid(format!("need at least 3 η points, got {}", values.len()));
        }
        if values.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return invalid("η values must lie in (0, 1)");
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("η values must be strictly increasing");
        }
        if extrapolation_order == 0 || extrapolation_order >= values.len() {
            return invalid(format!(
                "extrapolation order must be in 1..{}, got {extrapolation_order}",
                values.len()
            ));
        }
        Ok(Self {
            values,
            extrapolation_order,
        })
    }

    /// Full-degree extrapolation through every point.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let order = values.len().saturating_sub(1);
        Self::new(values, order)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extrapolation_order(&self) -> usize {
        self.extrapolation_order
    }
}

impl Default for EtaSchedule {
    fn default() -> Self {
        Self::from_values(DEFAULT_SCHEDULE.to_vec()).expect("default schedule is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSum {
    pub eta: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub extrapolated: f64,
    pub error_estimate: f64,
    /// Limit estimates using the last 1, 2, … points of the schedule.
    pub stages: Vec<f64>,
    pub monotone: bool,
}

impl RegularizedSum {
    pub fn require_monotone(self) -> Result<Self> {
        if self.monotone {
            Ok(self)
        } else {
            Err(Error::NonMonotoneConvergence(self.stages))
        }
    }
}

/// Evaluates `summand` on the schedule and extrapolates to η = 1 by
/// Richardson elimination in `1 − η`.
pub fn abel_extrapolate<F>(schedule: &EtaSchedule, summand: F) -> Result<RegularizedSum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let eta = schedule.values().to_vec();
    let partial_sums = eta
        .par_iter()
        .map(|&e| summand(e))
        .collect::<Result<Vec<f64>>>()?;
    let (stages, extrapolated) =
        richardson_stages(&eta, &partial_sums, schedule.extrapolation_order());

    let diffs: Vec<f64> = stages.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let monotone = diffs.windows(2).all(|w| w[1] <= w[0]);
    let error_estimate = diffs.last().copied().unwrap_or(0.0);

    Ok(RegularizedSum {
        eta,
        partial_sums,
        extrapolated,
        error_estimate,
        stages,
        monotone,
    })
}

fn richardson_stages(eta: &[f64], values: &[f64], order: usize) -> (Vec<f64>, f64) {
    let n = eta.len();
    let xs: Vec<f64> = eta[n - order - 1..].iter().map(|e| 1.0 - e).collect();
    let ys = &values[n - order - 1..];

    let mut stages = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let start = xs.len() - m - 1;
        stages.push(neville_at_zero(&xs[start..], &ys[start..]));
    }
    let last = *stages.last().expect("non-empty");
    (stages, last)
}

/// Value at `x = 0` of the interpolating polynomial through `(xs, ys)`.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            // written as a correction to p[i+1] so constant data stays exact
            p[i] = p[i + 1] + (p[i + 1] - p[i]) * xs[i + m] / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// Tail bound for `Σ_{k>K} g_k η^k`, using `g_{k+1}/g_k = (k + 3/2)/(k + 1)`.
fn gamma_ratio_tail(g_next: f64, k_max: usize, eta: f64) -> f64 {
    let growth = (k_max as f64 + 2.5) / (k_max as f64 + 2.0);
    let q = eta * growth;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    g_next * eta.powi(k_max as i32 + 1) / (1.0 - q)
}

/// Coefficient tables shared by every η evaluation of the two series.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    gamma_ratio: Vec<f64>,
    hyp2f1: Vec<f64>,
}

/// A series value obtained from a finite number of terms plus a remainder
/// estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceleratedSum {
    pub value: f64,
    pub error_estimate: f64,
    pub terms_used: usize,
}

impl SeriesTerms {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max + 1 > MAX_GAMMA_RATIO_K {
            return invalid(format!("k_max {k_max} exceeds {}", MAX_GAMMA_RATIO_K - 1));
        }
        // one extra ratio for the tail bound
        let gamma_ratio = gamma_ratios(k_max + 1);
        // (2k + 1) F_k = (−1)^k + 2k F_{k−1}; errors are damped by 2k/(2k + 1)
        let mut hyp2f1 = Vec::with_capacity(k_max + 1);
        hyp2f1.push(hyp2f1_neg(0)?);
        for k in 1..=k_max {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kf = k as f64;
            hyp2f1.push((sign + 2.0 * kf * hyp2f1[k - 1]) / (2.0 * kf + 1.0));
        }
        Ok(Self {
            gamma_ratio,
            hyp2f1,
        })
    }

    pub fn k_max(&self) -> usize {
        self.hyp2f1.len() - 1
    }

    fn check_eta(eta: f64) -> Result<()> {
        if !(0.0..1.0).contains(&eta) {
            return invalid(format!("η must lie in [0, 1), got {eta}"));
        }
        Ok(())
    }

    fn term_difference(&self, k: usize) -> f64 {
        series_prefactor()
            * self.gamma_ratio[k]
            * (self.hyp2f1[k] - (PI / (8.0 * k as f64 + 6.0)).sqrt())
    }

    fn term_a(&self, k: usize) -> f64 {
        series_prefactor() * self.gamma_ratio[k] * self.hyp2f1[k]
    }

    fn term_b(&self, k: usize) -> f64 {
        series_prefactor() * self.gamma_ratio[k] * (PI / (8.0 * k as f64 + 6.0)).sqrt()
    }

    fn tail_a(&self, eta: f64) -> f64 {
        // |F_k| ≤ 1
        series_prefactor() * gamma_ratio_tail(self.gamma_ratio[self.k_max() + 1], self.k_max(), eta)
    }

    fn tail_b(&self, eta: f64) -> f64 {
        let k = self.k_max() as f64;
        series_prefactor()
            * (PI / (8.0 * k + 14.0)).sqrt()
            * gamma_ratio_tail(self.gamma_ratio[self.k_max() + 1], self.k_max(), eta)
    }

    fn checked(&self, tail: f64) -> Result<()> {
        if !(tail < SERIES_TAIL_TOLERANCE) {
            return Err(Error::TruncationNotConverged {
                k_max: self.k_max(),
                tail_bound: tail,
                tolerance: SERIES_TAIL_TOLERANCE,
            });
        }
        Ok(())
    }

    fn weighted_sum(&self, eta: f64, term: impl Fn(usize) -> f64) -> f64 {
        let mut acc = NeumaierSum::new();
        let mut power = 1.0;
        for k in 0..=self.k_max() {
            acc.add(term(k) * power);
            power *= eta;
        }
        acc.value()
    }

    pub fn sum_a(&self, eta: f64) -> Result<f64> {
        Self::check_eta(eta)?;
        self.checked(self.tail_a(eta))?;
        Ok(self.weighted_sum(eta, |k| self.term_a(k)))
    }

    pub fn sum_b(&self, eta: f64) -> Result<f64> {
        Self::check_eta(eta)?;
        self.checked(self.tail_b(eta))?;
        Ok(self.weighted_sum(eta, |k| self.term_b(k)))
    }

    /// `A(η) − B(η)` summed term by term, truncation-checked.
    pub fn difference(&self, eta: f64) -> Result<f64> {
        Self::check_eta(eta)?;
        self.checked(self.tail_a(eta) + self.tail_b(eta))?;
        Ok(self.weighted_sum(eta, |k| self.term_difference(k)))
    }

    /// `A(η) − B(η)` from the terms up to `k_max` with the remainder
    /// estimated by a Levin u-transform.
    ///
    /// The difference terms are dominated by a `(−1)^k η^k/√k` component with
    /// a weaker non-alternating `k^{−3/2} η^k` one. Adjacent terms are paired
    /// first, which leaves a single smooth remainder the transform models well.
    pub fn difference_accelerated(&self, eta: f64, order: usize) -> Result<AcceleratedSum> {
        Self::check_eta(eta)?;
        let plain_tail = self.tail_a(eta) + self.tail_b(eta);
        if plain_tail < SERIES_TAIL_TOLERANCE {
            return Ok(AcceleratedSum {
                value: self.weighted_sum(eta, |k| self.term_difference(k)),
                error_estimate: plain_tail,
                terms_used: self.k_max() + 1,
            });
        }

        let pairs = self.k_max().div_ceil(2);
        if order < 2 || pairs < order + 3 {
            return invalid(format!(
                "Levin order {order} needs at least {} terms, have {}",
                2 * (order + 3),
                self.k_max() + 1
            ));
        }
        let mut paired = Vec::with_capacity(pairs);
        let mut power = 1.0;
        for j in 0..pairs {
            let (k0, k1) = (2 * j, 2 * j + 1);
            let t0 = (self.term_difference(k0)) * power;
            power *= eta;
            let t1 = (self.term_difference(k1)) * power;
            power *= eta;
            paired.push(t0 + t1);
        }

        let mut partial = Vec::with_capacity(pairs);
        let mut acc = NeumaierSum::new();
        for &b in &paired {
            acc.add(b);
            partial.push(acc.value());
        }

        let last = levin_u(&partial, &paired, pairs - 1, order)?;
        let previous = levin_u(&partial, &paired, pairs - 2, order)?;
        Ok(AcceleratedSum {
            value: last,
            error_estimate: (last - previous).abs(),
            terms_used: 2 * pairs,
        })
    }
}

/// Levin u-transform of order `order` ending at partial sum `end`, with
/// remainder estimates `ω_n = (n + 1) a_n`.
fn levin_u(partial: &[f64], terms: &[f64], end: usize, order: usize) -> Result<f64> {
    let n0 = end - order;
    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    let mut binom = 1.0;
    let base = (n0 + order + 1) as f64;
    for j in 0..=order {
        let n = n0 + j;
        let omega = (n as f64 + 1.0) * terms[n];
        if omega == 0.0 || !omega.is_finite() {
            return invalid(format!("degenerate remainder estimate at term {n}"));
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * binom * ((n as f64 + 1.0) / base).powi(order as i32 - 1);
        num.add(weight * partial[n] / omega);
        den.add(weight / omega);
        binom = binom * (order - j) as f64 / (j + 1) as f64;
    }
    Ok(num.value() / den.value())
}

pub fn sum_a_eta(eta: f64, k_max: usize) -> Result<f64> {
    SeriesTerms::new(k_max)?.sum_a(eta)
}

pub fn sum_b_eta(eta: f64, k_max: usize) -> Result<f64> {
    SeriesTerms::new(k_max)?.sum_b(eta)
}

/// `Σ_{k≤K} Γ(k + 3/2)/k! · t^k` with `K` the first index whose tail bound
/// drops below `tolerance`. Returns the sum and `K`.
pub fn gamma_ratio_power_sum(t: f64, tolerance: f64) -> Result<(f64, usize)> {
    if !(0.0..1.0).contains(&t) {
        return invalid(format!("t must lie in [0, 1), got {t}"));
    }
    let mut acc = NeumaierSum::new();
    let mut g = 0.5 * PI.sqrt();
    let mut power = 1.0;
    for k in 0..MAX_GAMMA_RATIO_K {
        acc.add(g * power);
        let g_next = g * (k as f64 + 1.5) / (k as f64 + 1.0);
        if gamma_ratio_tail(g_next, k, t) < tolerance {
            return Ok((acc.value(), k));
        }
        g = g_next;
        power *= t;
    }
    Err(Error::TruncationNotConverged {
        k_max: MAX_GAMMA_RATIO_K,
        tail_bound: f64::NAN,
        tolerance,
    })
}

/// `1 − η e^{−t²}` without cancellation for small `t`.
fn one_minus_eta_gauss(eta: f64, t: f64) -> f64 {
    (1.0 - eta) - eta * (-t * t).exp_m1()
}

/// Quadrature tolerance scaled with the `(1 − η)^{−1}` growth of the
/// divergent pieces.
fn scaled_tolerance(eta: f64) -> f64 {
    CLOSED_FORM_TOLERANCE / (1.0 - eta).clamp(1e-6, 1.0)
}

fn check_closed_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return invalid(format!("η must lie in [0, 1], got {eta}"));
    }
    Ok(())
}

fn i_integrand(eta: f64) -> impl Fn(f64) -> f64 {
    move |z: f64| (1.0 - eta * (1.0 - 2.0 * z * z)).powf(-1.5)
}

/// `I₁(η) = ∫₀^{1/√2} dz (1 − η(1 − 2z²))^{−3/2}`; diverges at η = 1.
pub fn i1(eta: f64) -> Result<f64> {
    check_closed_eta(eta)?;
    if eta == 1.0 {
        return Err(Error::DivergentAtUnity { what: "I1" });
    }
    Ok(integrate_finite(i_integrand(eta), 0.0, FRAC_1_SQRT_2, scaled_tolerance(eta))?.value)
}

/// `I₂(η)` by quadrature on `[1/√2, 1]`, including η = 1.
pub fn i2_quadrature(eta: f64) -> Result<QuadratureResult> {
    check_closed_eta(eta)?;
    integrate_finite(i_integrand(eta), FRAC_1_SQRT_2, 1.0, CLOSED_FORM_TOLERANCE)
}

/// `I₂(η) = ∫_{1/√2}^1 dz (1 − η(1 − 2z²))^{−3/2}`, exactly `√2/8` at η = 1.
pub fn i2(eta: f64) -> Result<f64> {
    check_closed_eta(eta)?;
    if eta == 1.0 {
        return Ok(I2_AT_UNITY);
    }
    Ok(i2_quadrature(eta)?.value)
}

/// `A(η) = 8√2 (I₁(η) + I₂(η))`.
pub fn closed_form_a(eta: f64) -> Result<f64> {
    Ok(8.0 * SQRT_2 * (i1(eta)? + i2(eta)?))
}

/// `B(η) = 8 ∫₀^∞ dz e^{−3z²/4} (1 − η e^{−z²})^{−3/2}`; singular at η = 1.
pub fn closed_form_b(eta: f64) -> Result<f64> {
    check_closed_eta(eta)?;
    if eta == 1.0 {
        return Err(Error::DivergentAtUnity { what: "B" });
    }
    let r = integrate_semi_infinite(
        |z| (-0.75 * z * z).exp() * one_minus_eta_gauss(eta, z).powf(-1.5),
        scaled_tolerance(eta),
        None,
    )?;
    Ok(8.0 * r.value)
}

/// `h(t) = t e^{−t²}/√(1 − e^{−t²}) − e^{−3t²/4}` evaluated directly.
pub fn h_direct(t: f64) -> f64 {
    t * (-t * t).exp() / (-(-t * t).exp_m1()).sqrt() - (-0.75 * t * t).exp()
}

/// Taylor series of `h(t)` about 0; `h(t) = −t⁴/48 + O(t⁶)`.
pub fn h_series(t: f64) -> f64 {
    let u = t * t;
    let poly = H_SERIES.iter().rev().fold(0.0, |acc, &c| acc * u + c);
    u * u * poly
}

/// Integrand of the convergent part of `A(η) − B(η)`:
/// `h(t) / (1 − η e^{−t²})^{3/2}`.
pub fn difference_integrand(eta: f64, t: f64) -> f64 {
    h_direct(t) / one_minus_eta_gauss(eta, t).powf(1.5)
}

fn difference_integrand_series(eta: f64, t: f64) -> f64 {
    h_series(t) / one_minus_eta_gauss(eta, t).powf(1.5)
}

/// `∫₀^∞ dt h(t) / (1 − η e^{−t²})^{3/2}` with the Taylor patch below
/// [`SMALL_T_THRESHOLD`].
pub fn difference_integral(eta: f64, tolerance: f64) -> Result<QuadratureResult> {
    check_closed_eta(eta)?;
    let series = move |t: f64| difference_integrand_series(eta, t);
    let patch = SeriesPatch {
        below: SMALL_T_THRESHOLD,
        series: &series,
    };
    integrate_semi_infinite(|t| difference_integrand(eta, t), tolerance, Some(patch))
}

/// `A(η) − B(η) = 8√2 I₂(η) + 8 ∫₀^∞ dt h(t)/(1 − η e^{−t²})^{3/2}`,
/// finite on all of `(0, 1]`.
pub fn difference_closed_form(eta: f64) -> Result<f64> {
    let integral = difference_integral(eta, CLOSED_FORM_TOLERANCE)?;
    Ok(8.0 * SQRT_2 * i2(eta)? + 8.0 * integral.value)
}
