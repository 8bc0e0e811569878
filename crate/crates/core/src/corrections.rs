//! Leading-order shift of the hydrogen `ns` levels.
//!
//! ```text
//! ΔE_ns = π χ² S₁ₛ(0) / (4 n³)   [e²/a_B],    χ = √(α/2) l_p / a_B
//! ```
//!
//! Equivalently `ΔE_ns = π S₁ₛ(0) ħ⟨θ⟩ / (8 a_B² n³)` with `⟨θ⟩ = α l_p²/ħ`.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::monte_carlo::{cross_norm, mc_gaussian_expectation, McEstimate};
use crate::quadrature::{integrate_semi_infinite, SeriesPatch};
use crate::regularized::{
    abel_extrapolate, h_series, EtaSchedule, RegularizedSum, SeriesTerms, DEFAULT_LEVIN_ORDER,
    SMALL_T_THRESHOLD,
};
use crate::special_functions::MAX_HYDROGEN_N;

pub const PLANCK_LENGTH: f64 = 1.616_255e-35;
pub const BOHR_RADIUS: f64 = 5.291_77e-11;
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
pub const HARTREE_EV: f64 = 27.211_386_245_988;

/// Environment variable naming a `key = value` constants file.
pub const CONSTANTS_ENV: &str = "NC_HYDROGEN_CONSTANTS";

pub const DEFAULT_INTEGRAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub planck_length: f64,
    pub bohr_radius: f64,
    pub hartree_ev: f64,
    pub reduced_planck: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            planck_length: PLANCK_LENGTH,
            bohr_radius: BOHR_RADIUS,
            hartree_ev: HARTREE_EV,
            reduced_planck: REDUCED_PLANCK,
        }
    }
}

impl PhysicalConstants {
    /// Parses `key = value` lines over the defaults. Blank lines and `#`
    /// comments are skipped. Keys: `planck_length`, `bohr_radius`,
    /// `hartree_ev`, `reduced_planck`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("line {}: bad number for {key}", lineno + 1))
            })?;
            if !(value.is_finite() && value > 0.0) {
                return invalid(format!("line {}: {key} must be positive", lineno + 1));
            }
            if !seen.insert(key.to_string()) {
                return invalid(format!("line {}: duplicate key {key}", lineno + 1));
            }
            match key {
                "planck_length" => out.planck_length = value,
                "bohr_radius" => out.bohr_radius = value,
                "hartree_ev" => out.hartree_ev = value,
                "reduced_planck" => out.reduced_planck = value,
                other => return invalid(format!("line {}: unknown key {other}", lineno + 1)),
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Defaults, overridden by the file named in [`CONSTANTS_ENV`] if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONSTANTS_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcParameters {
    alpha: f64,
    planck_length: f64,
    bohr_radius: f64,
    reduced_planck: f64,
    chi: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

impl NcParameters {
    pub fn new(alpha: f64, constants: &PhysicalConstants) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("planck_length", constants.planck_length)?;
        check_positive("bohr_radius", constants.bohr_radius)?;
        check_positive("reduced_planck", constants.reduced_planck)?;
        Ok(Self {
            alpha,
            planck_length: constants.planck_length,
            bohr_radius: constants.bohr_radius,
            reduced_planck: constants.reduced_planck,
            chi: (alpha / 2.0).sqrt() * constants.planck_length / constants.bohr_radius,
        })
    }

    /// Fixes `χ` directly; `α` is back-filled from the lengths in `constants`.
    pub fn from_chi(chi: f64, constants: &PhysicalConstants) -> Result<Self> {
        check_positive("chi", chi)?;
        let mut p = Self::new(1.0, constants)?;
        p.alpha = 2.0 * (chi * constants.bohr_radius / constants.planck_length).powi(2);
        check_positive("alpha", p.alpha)?;
        p.chi = chi;
        Ok(p)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn planck_length(&self) -> f64 {
        self.planck_length
    }

    pub fn bohr_radius(&self) -> f64 {
        self.bohr_radius
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// `⟨θ⟩ = α l_p² / ħ`.
    pub fn theta_mean(&self) -> f64 {
        self.alpha * self.planck_length * self.planck_length / self.reduced_planck
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCorrection {
    pub n: u32,
    /// Shift in units of `e²/a_B`.
    pub delta_e_hartree: f64,
    /// `ΔE / |E_n|` with `|E_n| = 1/(2n²)`.
    pub ratio_to_level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Integral,
    AbelSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S1sEstimate {
    pub method: Method,
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbelSeriesConfig {
    pub schedule: EtaSchedule,
    pub k_max: usize,
    /// `None` sums each η-series plainly and insists on a converged tail.
    pub levin_order: Option<usize>,
}

impl Default for AbelSeriesConfig {
    fn default() -> Self {
        Self {
            schedule: EtaSchedule::default(),
            k_max: crate::basis::DEFAULT_K_MAX,
            levin_order: Some(DEFAULT_LEVIN_ORDER),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelReport {
    pub estimate: S1sEstimate,
    pub sum: RegularizedSum,
}

/// `[t e^{−t²} − e^{−3t²/4} √(1 − e^{−t²})] / (1 − e^{−t²})²`.
pub fn s1s_integrand(t: f64) -> f64 {
    let q = -(-t * t).exp_m1();
    (t * (-t * t).exp() - (-0.75 * t * t).exp() * q.sqrt()) / (q * q)
}

fn s1s_integrand_series(t: f64) -> f64 {
    let q = -(-t * t).exp_m1();
    h_series(t) / q.powf(1.5)
}

pub fn s1s_integral(tolerance: f64) -> Result<S1sEstimate> {
    let patch = SeriesPatch {
        below: SMALL_T_THRESHOLD,
        series: &s1s_integrand_series,
    };
    let r = integrate_semi_infinite(s1s_integrand, tolerance, Some(patch))?;
    Ok(S1sEstimate {
        method: Method::Integral,
        value: 2.0 + 8.0 * r.value,
        error_estimate: 8.0 * r.abs_error_estimate,
    })
}

pub fn s1s_abel(config: &AbelSeriesConfig) -> Result<AbelReport> {
    let terms = SeriesTerms::new(config.k_max)?;
    let sum = match config.levin_order {
        Some(order) => abel_extrapolate(&config.schedule, |eta| {
            Ok(terms.difference_accelerated(eta, order)?.value)
        })?,
        None => abel_extrapolate(&config.schedule, |eta| terms.difference(eta))?,
    };
    let sum = sum.require_monotone()?;
    Ok(AbelReport {
        estimate: S1sEstimate {
            method: Method::AbelSeries,
            value: sum.extrapolated,
            error_estimate: sum.error_estimate,
        },
        sum,
    })
}

static S1S_INTEGRAL: OnceLock<f64> = OnceLock::new();

/// `S₁ₛ(0)`. The integral route at the default tolerance is computed once
/// per process.
pub fn s1s_zero(method: Method) -> Result<f64> {
    match method {
        Method::Integral => {
            if let Some(v) = S1S_INTEGRAL.get() {
                return Ok(*v);
            }
            let v = s1s_integral(DEFAULT_INTEGRAL_TOLERANCE)?.value;
            Ok(*S1S_INTEGRAL.get_or_init(|| v))
        }
        Method::AbelSeries => Ok(s1s_abel(&AbelSeriesConfig::default())?.estimate.value),
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > MAX_HYDROGEN_N {
        return invalid(format!("n must be in 1..={MAX_HYDROGEN_N}, got {n}"));
    }
    Ok(())
}

/// `S_ns(0) = n² S₁ₛ(0)`.
pub fn sns_zero(n: u32) -> Result<f64> {
    check_n(n)?;
    let n = n as f64;
    Ok(n * n * s1s_zero(Method::Integral)?)
}

/// `I_ns(0, θ′) = π θ′ S_ns(0) / (4 n⁵)`.
pub fn i_ns_zero(n: u32, theta_prime: f64) -> Result<f64> {
    if !(theta_prime.is_finite() && theta_prime >= 0.0) {
        return invalid(format!(
            "theta_prime must be non-negative, got {theta_prime}"
        ));
    }
    let s = sns_zero(n)?;
    Ok(PI * theta_prime / (4.0 * (n as f64).powi(5)) * s)
}

/// `⟨|a′ × b′|⟩` over the auxiliary oscillator ground state.
pub fn theta_prime_mean(samples: u64, seed: u64) -> Result<McEstimate> {
    mc_gaussian_expectation(cross_norm, samples, seed)
}

pub fn delta_e_ns(params: &NcParameters, n: u32) -> Result<EnergyCorrection> {
    check_n(n)?;
    let s = s1s_zero(Method::Integral)?;
    let nf = n as f64;
    let delta = s * PI * params.chi() * params.chi() / (4.0 * nf.powi(3));
    Ok(EnergyCorrection {
        n,
        delta_e_hartree: delta,
        ratio_to_level: delta * 2.0 * nf * nf,
    })
}

/// The same shift written through `ħ⟨θ⟩`, in units of `e²/a_B`.
pub fn delta_e_ns_theta_form(params: &NcParameters, n: u32) -> Result<f64> {
    check_n(n)?;
    let s = s1s_zero(Method::Integral)?;
    let a = params.bohr_radius();
    let hbar_theta = params.reduced_planck * params.theta_mean();
    Ok(s * PI * hbar_theta / (8.0 * a * a * (n as f64).powi(3)))
}

/// The earlier approximate shift, which differs from [`delta_e_ns`] by the
/// factor `4/π`.
pub fn delta_e_ns_prior(params: &NcParameters, n: u32) -> Result<f64> {
    Ok(delta_e_ns(params, n)?.delta_e_hartree * 4.0 / PI)
}

pub fn correction_table(params: &NcParameters, n_max: u32) -> Result<Vec<EnergyCorrection>> {
    check_n(n_max)?;
    (1..=n_max).map(|n| delta_e_ns(params, n)).collect()
}
