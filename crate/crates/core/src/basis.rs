//! Spectral data of the radial operator `r² + p_r²` on `s` waves.
//!
//! The eigenfunctions are the `l = 0` oscillator states `φ_k` with
//! eigenvalues `λ_k = 4k + 3`. Expanding the constant function in them gives
//! the coefficients `c_k`; `i_k = ∫ r φ_k dr` is the overlap that produces the
//! `∫ r dr` term.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::integrate_semi_infinite;
use crate::special_functions::{
    gamma_ratio, hyp2f1_neg, oscillator_radial, MAX_HYP2F1_K, MAX_OSCILLATOR_K,
};

pub const MAX_MODE_INDEX: usize = 1_000;

/// Series length used when nothing else is configured.
pub const DEFAULT_K_MAX: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorMode {
    pub k: usize,
    /// Signed coefficient of `φ_k` in the expansion of `1`.
    pub c_k: f64,
    /// Signed overlap `∫₀^∞ r φ_k(r) dr`.
    pub i_k: f64,
    pub lambda_k: f64,
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_index(k: usize, max: usize) -> Result<()> {
    if k > max {
        return invalid(format!("mode index {k} exceeds {max}"));
    }
    Ok(())
}

/// `(−1)^k √(4 Γ(k + 3/2) / k!)`.
pub fn coefficient_c(k: usize) -> Result<f64> {
    check_index(k, MAX_MODE_INDEX)?;
    Ok(parity(k) * (4.0 * gamma_ratio(k)?).sqrt())
}

/// `(−1)^k √(8 Γ(k + 3/2) / (π k!)) ₂F₁(−k, ½; 3⁄2; 2)`.
pub fn overlap_i(k: usize) -> Result<f64> {
    check_index(k, MAX_MODE_INDEX.min(MAX_HYP2F1_K))?;
    let f = hyp2f1_neg(k)?;
    Ok(parity(k) * (8.0 * gamma_ratio(k)? / std::f64::consts::PI).sqrt() * f)
}

/// `λ_k = 2(2k + 3/2)`.
pub fn eigenvalue(k: usize) -> f64 {
    2.0 * (2.0 * k as f64 + 1.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTable {
    modes: Vec<OscillatorMode>,
}

impl ModeTable {
    pub fn modes(&self) -> &[OscillatorMode] {
        &self.modes
    }

    pub fn k_max(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Header `k,c_k,i_k,lambda_k`, one row per mode, shortest round-trip
    /// float formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "c_k", "i_k", "lambda_k"])?;
        for m in &self.modes {
            w.write_record([
                m.k.to_string(),
                m.c_k.to_string(),
                m.i_k.to_string(),
                m.lambda_k.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn build_mode_table(k_max: usize) -> Result<ModeTable> {
    check_index(k_max, MAX_MODE_INDEX)?;
    let modes = (0..=k_max)
        .map(|k| {
            Ok(OscillatorMode {
                k,
                c_k: coefficient_c(k)?,
                i_k: overlap_i(k)?,
                lambda_k: eigenvalue(k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeTable { modes })
}

/// `G_jk = ∫₀^∞ r² φ_j φ_k dr` for `j, k ≤ k_max`.
#[allow(clippy::needless_range_loop)]
pub fn gram_matrix(k_max: usize, tolerance: f64) -> Result<Vec<Vec<f64>>> {
    check_index(k_max, MAX_OSCILLATOR_K)?;
    let mut g = vec![vec![0.0; k_max + 1]; k_max + 1];
    for j in 0..=k_max {
        for k in j..=k_max {
            let r = integrate_semi_infinite(
                |r| {
                    r * r
                        * oscillator_radial(j, r).unwrap_or(f64::NAN)
                        * oscillator_radial(k, r).unwrap_or(f64::NAN)
                },
                tolerance,
                None,
            )?;
            g[j][k] = r.value;
            g[k][j] = r.value;
        }
    }
    Ok(g)
}

/// Largest `|G_jk − δ_jk|`.
pub fn gram_deviation(gram: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, row) in gram.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let want = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    worst
}

pub const RESIDUAL_GRID_STEP: f64 = 1e-3;
pub const RESIDUAL_GRID_END: f64 = 12.0;

/// `‖(r² + p_r²) φ_k − λ_k φ_k‖ / ‖λ_k φ_k‖` on a uniform grid, with
/// `p_r² φ = −(1/r) (r φ)″` by central differences.
pub fn eigen_residual(k: usize) -> Result<f64> {
    check_index(k, MAX_OSCILLATOR_K)?;
    let h = RESIDUAL_GRID_STEP;
    let points = (RESIDUAL_GRID_END / h).round() as usize;
    let u = |r: f64| r * oscillator_radial(k, r).unwrap_or(f64::NAN);
    let lambda = eigenvalue(k);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..=points {
        let r = i as f64 * h;
        let phi = oscillator_radial(k, r)?;
        let second = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
        let applied = r * r * phi - second / r;
        num += (applied - lambda * phi).powi(2);
        den += (lambda * phi).powi(2);
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_finite;
    use crate::special_functions::{oscillator_norm, oscillator_radial};
    use std::f64::consts::PI;

    // defining integrals on [0, 12]; e^{-72} makes the cut-off tail negligible
    fn c_by_quadrature(k: usize) -> f64 {
        let r = integrate_finite(
            |r| r * r * oscillator_radial(k, r).unwrap(),
            0.0,
            12.0,
            1e-11,
        )
        .unwrap();
        r.value
    }

    fn i_by_quadrature(k: usize) -> f64 {
        let r =
            integrate_finite(|r| r * oscillator_radial(k, r).unwrap(), 0.0, 12.0, 1e-11).unwrap();
        r.value
    }

    #[test]
    fn c_closed_forms() {
        let sp = PI.sqrt();
        assert!((coefficient_c(0).unwrap() - (2.0 * sp).sqrt()).abs() < 1e-15);
        assert!((coefficient_c(1).unwrap() + (3.0 * sp).sqrt()).abs() < 1e-15);
        assert!((coefficient_c(0).unwrap() - 1.88279).abs() < 1e-5);
    }

    #[test]
    fn c_matches_defining_integral() {
        for k in 0..=10 {
            let want = c_by_quadrature(k);
            assert!((coefficient_c(k).unwrap() - want).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn i_matches_defining_integral() {
        for k in 0..=10 {
            let want = i_by_quadrature(k);
            assert!((overlap_i(k).unwrap() - want).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn i_low_orders() {
        // i_0 = √(8Γ(3/2)/π) = √(4/√π) = norm of φ_0, since ∫ r e^{-r²/2} = 1
        assert!((overlap_i(0).unwrap() - oscillator_norm(0)).abs() < 1e-15);
        // i_1 = −√(8Γ(5/2)/π)/3 = −√(6/√π)/3
        let want = -(6.0 / PI.sqrt()).sqrt() / 3.0;
        assert!((overlap_i(1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue(0), 3.0);
        assert_eq!(eigenvalue(1), 7.0);
        assert_eq!(eigenvalue(5), 23.0);
    }

    #[test]
    fn table_shapes_and_signs() {
        let t = build_mode_table(0).unwrap();
        assert_eq!(t.len(), 1);
        let m = t.modes()[0];
        assert_eq!(m.lambda_k, 3.0);
        assert!((m.c_k - 1.882_792_527_553_43).abs() < 1e-12);

        let t = build_mode_table(2).unwrap();
        let signs: Vec<f64> = t.modes().iter().map(|m| m.c_k.signum()).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);

        let t = build_mode_table(50).unwrap();
        assert_eq!(t.len(), 51);
        for (k, m) in t.modes().iter().enumerate() {
            assert_eq!(m.k, k);
            assert!(m.c_k.is_finite() && m.i_k.is_finite());
            assert_eq!(m.c_k.signum(), parity(k));
            assert_eq!(m.i_k.signum(), parity(k) * hyp2f1_neg(k).unwrap().signum());
            if k > 0 {
                assert!(m.lambda_k > t.modes()[k - 1].lambda_k);
            }
        }
        assert!(build_mode_table(MAX_MODE_INDEX + 1).is_err());
    }

    #[test]
    fn expansion_of_one_is_abel_summable_on_interior() {
        // 1 is not square integrable with weight r², so Σ c_k φ_k(r) only
        // converges after damping by η^k; the damped sum tends to 1 as η → 1
        let t = build_mode_table(MAX_MODE_INDEX).unwrap();
        let eta: f64 = 0.99;
        for j in 0..=25 {
            let r = 0.5 + 0.1 * j as f64;
            let s: f64 = t
                .modes()
                .iter()
                .map(|m| m.c_k * oscillator_radial(m.k, r).unwrap() * eta.powi(m.k as i32))
                .sum();
            assert!((s - 1.0).abs() <= 0.05, "r={r}: {s}");
        }
    }

    #[test]
    fn undamped_expansion_of_one_does_not_settle() {
        let r: f64 = 1.0;
        let terms: Vec<f64> = (0..=200)
            .map(|k| coefficient_c(k).unwrap() * oscillator_radial(k, r).unwrap())
            .collect();
        // terms stay O(1) instead of decaying
        assert!(terms[190..].iter().any(|t| t.abs() > 0.5));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = build_mode_table(3).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,c_k,i_k,lambda_k");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("1,-2.30594"));
    }

    #[test]
    fn orthonormal_low_modes() {
        let g = gram_matrix(12, 1e-12).unwrap();
        assert!(gram_deviation(&g) < 1e-10, "{}", gram_deviation(&g));
    }

    #[test]
    fn eigen_residuals_are_small() {
        for k in 0..=5 {
            let r = eigen_residual(k).unwrap();
            assert!(r <= 1e-4, "k={k}: {r}");
        }
    }

    #[test]
    fn damped_parseval_sum_tracks_closed_form() {
        // Σ c_k i_k η^k = √(32/π) Σ g_k F_k η^k, a quarter of the A series
        let t = build_mode_table(400).unwrap();
        for eta in [0.5f64, 0.9] {
            let s: f64 = t
                .modes()
                .iter()
                .map(|m| m.c_k * m.i_k * eta.powi(m.k as i32))
                .sum();
            let a = crate::regularized::closed_form_a(eta).unwrap();
            assert!(
                (s - a / 4.0).abs() < 1e-8 * a,
                "η={eta}: {s} vs {}",
                a / 4.0
            );
        }
    }
}
