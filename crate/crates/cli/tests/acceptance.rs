//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the PASS/FAIL lines are always printed; exits nonzero if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nc_hydrogen::basis::{eigen_residual, eigenvalue, gram_deviation, gram_matrix};
use nc_hydrogen::corrections::{
    correction_table, delta_e_ns, delta_e_ns_theta_form, s1s_abel, s1s_integral, theta_prime_mean,
    AbelSeriesConfig, NcParameters, PhysicalConstants,
};
use nc_hydrogen::regularized::{
    closed_form_a, closed_form_b, gamma_ratio_power_sum, i2_quadrature, sum_a_eta, sum_b_eta,
};
use nc_hydrogen::special_functions::{
    hyp2f1_neg_exact, hyp2f1_neg_finite_sum, hyp2f1_neg_integral,
};
use nc_hydrogen::Result;

const S1S_PUBLISHED: f64 = 1.72006;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn criterion_1() -> Result<Outcome> {
    let (r, dt) = timed(|| s1s_integral(1e-10));
    let v = r?.value;
    let err = (v - S1S_PUBLISHED).abs();
    outcome(
        err <= 1e-5 && dt < Duration::from_secs(1),
        format!("integral route S1s(0) = {v:.10}, |diff| = {err:.2e} <= 1e-5, {dt:.2?} < 1 s"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let config = AbelSeriesConfig::default();
    let (r, dt) = timed(|| s1s_abel(&config));
    let r = r?;
    let err = (r.estimate.value - S1S_PUBLISHED).abs();
    outcome(
        err <= 1e-3 && config.k_max <= 400 && dt < Duration::from_secs(10),
        format!(
            "abel route S1s(0) = {:.6} over eta {:?}, k_max = {}, |diff| = {err:.2e} <= 1e-3, {dt:.2?} < 10 s",
            r.estimate.value, r.sum.eta, config.k_max
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let q = i2_quadrature(1.0)?;
    let err = (q.value - SQRT_2 / 8.0).abs();
    outcome(
        err <= 1e-10,
        format!("I2(1) = {:.15}, |diff| = {err:.2e} <= 1e-10", q.value),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut worst_05: f64 = 0.0;
    let mut worst_09: f64 = 0.0;
    for (eta, worst) in [(0.5, &mut worst_05), (0.9, &mut worst_09)] {
        let a = sum_a_eta(eta, 400)?;
        let b = sum_b_eta(eta, 400)?;
        let ca = closed_form_a(eta)?;
        let cb = closed_form_b(eta)?;
        *worst = ((a - ca).abs() / ca).max((b - cb).abs() / cb);
    }
    outcome(
        worst_05 <= 1e-9 && worst_09 <= 1e-7,
        format!("series vs closed forms: eta=0.5 rel {worst_05:.2e} <= 1e-9, eta=0.9 rel {worst_09:.2e} <= 1e-7"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for t in [0.1, 0.5, 0.9] {
        let (s, _) = gamma_ratio_power_sum(t, 1e-12)?;
        worst = worst.max((s - PI.sqrt() / (2.0 * (1.0 - t).powf(1.5))).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("generating function at t = 0.1, 0.5, 0.9: max |diff| = {worst:.2e} <= 1e-10"),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let integral = hyp2f1_neg_integral(k)?.value;
        worst = worst.max((hyp2f1_neg_exact(k) - integral).abs());
        if let Ok(sum) = hyp2f1_neg_finite_sum(k) {
            worst = worst.max((sum.value - integral).abs());
        }
    }
    outcome(
        worst <= 1e-9,
        format!("2F1 finite sum vs integral, k <= 40: max |diff| = {worst:.2e} <= 1e-9"),
    )
}

fn criterion_7() -> Result<Outcome> {
    let gram = gram_deviation(&gram_matrix(12, 1e-12)?);
    let mut residual: f64 = 0.0;
    for k in 0..=5 {
        residual = residual.max(eigen_residual(k)?);
    }
    let lambdas_ok = (0..=5).all(|k| eigenvalue(k) == 2.0 * (2.0 * k as f64 + 1.5));
    outcome(
        gram <= 1e-10 && residual <= 1e-4 && lambdas_ok,
        format!("Gram deviation (k <= 12) {gram:.2e} <= 1e-10, eigen residual (k <= 5) {residual:.2e} <= 1e-4"),
    )
}

fn criterion_8() -> Result<Outcome> {
    let (e, dt) = timed(|| theta_prime_mean(10_000_000, 20_240_601));
    let e = e?;
    let z = e.deviation(1.0);
    outcome(
        z <= 3.0 && dt < Duration::from_secs(30),
        format!(
            "<|a' x b'|> = {:.6} ± {:.2e} over 1e7 samples, {z:.2} sigma <= 3, {dt:.2?} < 30 s",
            e.mean, e.std_error
        ),
    )
}

fn criterion_9() -> Result<Outcome> {
    let p = NcParameters::new(1.0, &PhysicalConstants::default())?;
    let rows = correction_table(&p, 10)?;
    let base = rows[0].delta_e_hartree;
    let worst = rows
        .iter()
        .map(|r| (r.delta_e_hartree * (r.n as f64).powi(3) - base).abs() / base)
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-12,
        format!("dE_ns * n^3 over n = 1..10: max rel spread {worst:.2e} <= 1e-12"),
    )
}

fn criterion_10() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let base = PhysicalConstants::default();
    let tol = 8.0 * f64::EPSILON;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let c = PhysicalConstants {
            planck_length: base.planck_length * rng.random_range(0.1..10.0),
            bohr_radius: base.bohr_radius * rng.random_range(0.1..10.0),
            ..base
        };
        let p = NcParameters::new(10f64.powf(rng.random_range(-8.0..8.0)), &c)?;
        let n = rng.random_range(1..=20u32);
        let chi_form = delta_e_ns(&p, n)?.delta_e_hartree;
        let theta_form = delta_e_ns_theta_form(&p, n)?;
        worst = worst.max((chi_form - theta_form).abs() / chi_form);
    }
    outcome(
        worst <= tol,
        format!("chi-form vs theta-form, 20 random sets: max rel {worst:.2e} <= {tol:.2e}"),
    )
}

fn criterion_11() -> Result<Outcome> {
    let exe = env!("CARGO_BIN_EXE_nc-hydrogen");
    let p = NcParameters::new(1.0, &PhysicalConstants::default())?;
    let physical = delta_e_ns(&p, 1)?;
    let (status, dt) = timed(|| Command::new(exe).arg("verify").output());
    let (code, failures) = match status {
        Ok(out) => {
            let text = String::from_utf8_lossy(&out.stdout).into_owned();
            (
                out.status.code(),
                text.lines().filter(|l| l.starts_with("FAIL")).count(),
            )
        }
        Err(e) => return outcome(false, format!("could not run {exe}: {e}")),
    };
    outcome(
        code == Some(0) && failures == 0 && dt < Duration::from_secs(60) && physical.delta_e_hartree > 0.0,
        format!(
            "alpha=1 dE_1s = {:.6e} e^2/a_B; `verify` exit {:?}, {failures} FAIL lines, {dt:.2?} < 60 s",
            physical.delta_e_hartree, code
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("S1s(0) integral route", criterion_1),
        ("S1s(0) Abel-series route", criterion_2),
        ("I2(1) = sqrt(2)/8", criterion_3),
        ("eta-consistency", criterion_4),
        ("generating-function identity", criterion_5),
        ("2F1 dual-route agreement", criterion_6),
        ("oscillator basis", criterion_7),
        ("Monte Carlo <theta'>", criterion_8),
        ("n^-3 scaling", criterion_9),
        ("cross-form identity", criterion_10),
        ("verify end-to-end", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run().unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        });
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {:<30} {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
