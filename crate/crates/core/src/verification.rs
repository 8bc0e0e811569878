//! The identity and oracle battery behind `nc-hydrogen verify`.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{eigen_residual, gram_deviation, gram_matrix};
use crate::corrections::{
    correction_table, delta_e_ns, delta_e_ns_theta_form, s1s_abel, s1s_integral, theta_prime_mean,
    AbelSeriesConfig, NcParameters, PhysicalConstants,
};
use crate::error::Result;
use crate::monte_carlo::cross_norm_factorized_mean;
use crate::regularized::{
    closed_form_a, closed_form_b, gamma_ratio_power_sum, i2_quadrature, SeriesTerms, I2_AT_UNITY,
};
use crate::special_functions::{hyp2f1_neg_exact, hyp2f1_neg_integral};

/// Rounded literature value of `S₁ₛ(0)`.
pub const S1S_REFERENCE: f64 = 1.72006;

pub const DEFAULT_SAMPLES: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed discrepancy, in the units of `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn within(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }

    fn failed(name: &str, tolerance: f64, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: u64,
    pub seed: u64,
    pub quadrature_tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            quadrature_tolerance: crate::corrections::DEFAULT_INTEGRAL_TOLERANCE,
        }
    }
}

fn lift(name: &str, tolerance: f64, r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::failed(name, tolerance, e))
}

pub fn check_s1s_integral(tolerance: f64) -> Check {
    let name = "s1s integral route";
    lift(
        name,
        1e-5,
        (|| {
            let e = s1s_integral(tolerance)?;
            Ok(Check::within(
                name,
                (e.value - S1S_REFERENCE).abs(),
                1e-5,
                format!("S1s(0) = {:.10} ± {:.1e}", e.value, e.error_estimate),
            ))
        })(),
    )
}

pub fn check_s1s_abel() -> Check {
    let name = "s1s abel-series route";
    lift(
        name,
        1e-3,
        (|| {
            let r = s1s_abel(&AbelSeriesConfig::default())?;
            Ok(Check::within(
                name,
                (r.estimate.value - S1S_REFERENCE).abs(),
                1e-3,
                format!(
                    "S1s(0) = {:.6} (stage spread {:.1e})",
                    r.estimate.value, r.estimate.error_estimate
                ),
            ))
        })(),
    )
}

pub fn check_route_agreement(tolerance: f64) -> Check {
    let name = "route agreement";
    lift(
        name,
        2e-3,
        (|| {
            let a = s1s_integral(tolerance)?.value;
            let b = s1s_abel(&AbelSeriesConfig::default())?.estimate.value;
            Ok(Check::within(
                name,
                (a - b).abs(),
                2e-3,
                format!("integral {a:.8}, abel {b:.8}"),
            ))
        })(),
    )
}

pub fn check_i2_at_unity() -> Check {
    let name = "I2(1) = sqrt(2)/8";
    lift(
        name,
        1e-10,
        (|| {
            let q = i2_quadrature(1.0)?;
            Ok(Check::within(
                name,
                (q.value - I2_AT_UNITY).abs(),
                1e-10,
                format!("quadrature {:.15}, exact {:.15}", q.value, SQRT_2 / 8.0),
            ))
        })(),
    )
}

/// Series sums against their closed forms at η = 0.5 (1e-9 relative) and
/// η = 0.9 (1e-7 relative). `measured` is the worst ratio of error to its
/// allowance.
pub fn check_eta_consistency() -> Check {
    let name = "eta consistency";
    lift(
        name,
        1.0,
        (|| {
            let terms = SeriesTerms::new(crate::basis::DEFAULT_K_MAX)?;
            let mut worst: f64 = 0.0;
            let mut detail = Vec::new();
            for (eta, tol) in [(0.5, 1e-9), (0.9, 1e-7)] {
                let (a, ca) = (terms.sum_a(eta)?, closed_form_a(eta)?);
                let (b, cb) = (terms.sum_b(eta)?, closed_form_b(eta)?);
                let ea = (a - ca).abs() / ca.abs();
                let eb = (b - cb).abs() / cb.abs();
                worst = worst.max(ea / tol).max(eb / tol);
                detail.push(format!("η={eta}: A rel {ea:.1e}, B rel {eb:.1e}"));
            }
            Ok(Check::within(name, worst, 1.0, detail.join("; ")))
        })(),
    )
}

pub fn check_generating_function() -> Check {
    let name = "gamma-ratio generating function";
    lift(
        name,
        1e-10,
        (|| {
            let mut worst: f64 = 0.0;
            for t in [0.1, 0.5, 0.9] {
                let (s, _) = gamma_ratio_power_sum(t, 1e-12)?;
                let want = PI.sqrt() / (2.0 * (1.0 - t).powf(1.5));
                worst = worst.max((s - want).abs());
            }
            Ok(Check::within(
                name,
                worst,
                1e-10,
                "t = 0.1, 0.5, 0.9".into(),
            ))
        })(),
    )
}

pub fn check_hyp2f1_routes() -> Check {
    let name = "2F1 finite sum vs integral";
    lift(
        name,
        1e-9,
        (|| {
            let mut worst: f64 = 0.0;
            for k in 0..=40 {
                let integral = hyp2f1_neg_integral(k)?.value;
                worst = worst.max((hyp2f1_neg_exact(k) - integral).abs());
            }
            Ok(Check::within(name, worst, 1e-9, "k = 0..=40".into()))
        })(),
    )
}

pub fn check_orthonormality() -> Check {
    let name = "oscillator orthonormality";
    lift(
        name,
        1e-10,
        (|| {
            let g = gram_matrix(12, 1e-12)?;
            Ok(Check::within(
                name,
                gram_deviation(&g),
                1e-10,
                "Gram matrix, k <= 12".into(),
            ))
        })(),
    )
}

pub fn check_eigen_residual() -> Check {
    let name = "eigenvalue residual";
    lift(
        name,
        1e-4,
        (|| {
            let mut worst: f64 = 0.0;
            for k in 0..=5 {
                worst = worst.max(eigen_residual(k)?);
            }
            Ok(Check::within(
                name,
                worst,
                1e-4,
                "lambda_k = 2(2k + 3/2), k <= 5".into(),
            ))
        })(),
    )
}

/// Passes when the estimate lies within three standard errors of 1.
pub fn check_theta_prime(samples: u64, seed: u64) -> Check {
    let name = "MC <|a' x b'|> = 1";
    lift(
        name,
        3.0,
        (|| {
            let e = theta_prime_mean(samples, seed)?;
            Ok(Check::within(
                name,
                e.deviation(cross_norm_factorized_mean()),
                3.0,
                format!(
                    "mean {:.6} ± {:.1e} ({} samples, seed {})",
                    e.mean, e.std_error, e.samples, e.seed
                ),
            ))
        })(),
    )
}

pub fn check_cube_law() -> Check {
    let name = "n^3 scaling";
    lift(
        name,
        1e-12,
        (|| {
            let p = NcParameters::new(1.0, &PhysicalConstants::default())?;
            let rows = correction_table(&p, 10)?;
            let base = rows[0].delta_e_hartree;
            let worst = rows
                .iter()
                .map(|r| (r.delta_e_hartree * (r.n as f64).powi(3) - base).abs() / base)
                .fold(0.0, f64::max);
            Ok(Check::within(name, worst, 1e-12, "n = 1..=10".into()))
        })(),
    )
}

/// χ-form against ⟨θ⟩-form over `sets` random parameter sets; the tolerance
/// is a few units of roundoff.
pub fn check_cross_form(sets: usize, seed: u64) -> Check {
    let name = "chi-form vs theta-form";
    let tol = 8.0 * f64::EPSILON;
    lift(
        name,
        tol,
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = PhysicalConstants::default();
            let mut worst: f64 = 0.0;
            for _ in 0..sets {
                let constants = PhysicalConstants {
                    planck_length: base.planck_length * rng.random_range(0.5..2.0),
                    bohr_radius: base.bohr_radius * rng.random_range(0.5..2.0),
                    ..base
                };
                let alpha = 10f64.powf(rng.random_range(-6.0..6.0));
                let n = rng.random_range(1..=20u32);
                let p = NcParameters::new(alpha, &constants)?;
                let chi_form = delta_e_ns(&p, n)?.delta_e_hartree;
                let theta_form = delta_e_ns_theta_form(&p, n)?;
                worst = worst.max((chi_form - theta_form).abs() / chi_form);
            }
            Ok(Check::within(
                name,
                worst,
                tol,
                format!("{sets} random parameter sets"),
            ))
        })(),
    )
}

pub fn run_battery(config: &VerifyConfig) -> Vec<Check> {
    vec![
        check_s1s_integral(config.quadrature_tolerance),
        check_s1s_abel(),
        check_route_agreement(config.quadrature_tolerance),
        check_i2_at_unity(),
        check_eta_consistency(),
        check_generating_function(),
        check_hyp2f1_routes(),
        check_orthonormality(),
        check_eigen_residual(),
        check_theta_prime(config.samples, config.seed),
        check_cube_law(),
        check_cross_form(20, config.seed),
    ]
}
