//! Adaptive Gauss–Kronrod integration on finite and semi-infinite ranges.
//!
//! Every interval is integrated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss rule (sharing the odd nodes) supplies the local error
//! estimate, rescaled the way QUADPACK's `qk15` does. The interval with the
//! largest estimated error is bisected until the summed estimate drops below
//! the requested absolute tolerance.
//!
//! Evaluation order is fixed, so identical inputs give bit-identical output.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::summation::NeumaierSum;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Replaces the integrand by a series for `t < below` on semi-infinite
/// ranges, where the closed-form integrand cancels catastrophically.
#[derive(Clone, Copy)]
pub struct SeriesPatch<'a> {
    pub below: f64,
    pub series: &'a dyn Fn(f64) -> f64,
}

impl std::fmt::Debug for SeriesPatch<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeriesPatch")
            .field("below", &self.below)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    /// Absolute error target.
    pub tolerance: f64,
    pub max_subdivisions: usize,
    /// Abscissa at which semi-infinite integrands are probed for decay.
    pub tail_cutoff: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_subdivisions: 4000,
            tail_cutoff: 40.0,
        }
    }
}

impl Integrator {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn finite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult> {
        self.check()?;
        if !a.is_finite() || !b.is_finite() {
            return invalid(format!(
                "finite integration bounds required, got [{a}, {b}]"
            ));
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 1,
            });
        }
        if a > b {
            let r = self.adaptive(&f, &[b, a])?;
            return Ok(QuadratureResult {
                value: -r.value,
                ..r
            });
        }
        self.adaptive(&f, &[a, b])
    }

    /// Integrates over `[0, ∞)` through `t = u/(1-u)`.
    pub fn semi_infinite<F: Fn(f64) -> f64>(
        &self,
        f: F,
        patch: Option<SeriesPatch<'_>>,
    ) -> Result<QuadratureResult> {
        self.check()?;
        let eval = |t: f64| match patch {
            Some(p) if t < p.below => (p.series)(t),
            _ => f(t),
        };

        let cutoff = self.tail_cutoff;
        for at in [cutoff, 2.0 * cutoff] {
            let probe = (at * eval(at)).abs();
            if !(probe <= self.tolerance) {
                return Err(Error::TailNotDecaying { at, probe });
            }
        }

        let mapped = |u: f64| {
            let w = 1.0 - u;
            if w <= 0.0 {
                return 0.0;
            }
            let t = u / w;
            let v = eval(t) / (w * w);
            // beyond the probed cutoff the Gaussian tail has underflowed
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };

        let mut points = vec![0.0];
        if let Some(p) = patch {
            if p.below > 0.0 && p.below.is_finite() {
                points.push(p.below / (1.0 + p.below));
            }
        }
        points.push(1.0);
        self.adaptive(&mapped, &points)
    }

    fn check(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        if self.max_subdivisions == 0 {
            return invalid("max_subdivisions must be at least 1");
        }
        Ok(())
    }

    fn adaptive<F: Fn(f64) -> f64>(&self, f: &F, points: &[f64]) -> Result<QuadratureResult> {
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            heap.push(kronrod15(f, w[0], w[1]));
            evaluations += 15;
        }

        loop {
            let total_error: f64 = heap.iter().map(|s| s.error).sum();
            // bisection cannot push the estimate below the rounding floor
            let floor: f64 = heap.iter().map(|s| s.floor).sum();
            if total_error <= self.tolerance.max(floor) {
                break;
            }
            if total_error.is_nan() || heap.len() >= self.max_subdivisions {
                return Err(not_converged(&heap, evaluations));
            }
            let worst = heap.pop().expect("heap holds at least one segment");
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) {
                heap.push(worst);
                return Err(not_converged(&heap, evaluations));
            }
            heap.push(kronrod15(f, worst.a, mid));
            heap.push(kronrod15(f, mid, worst.b));
            evaluations += 30;
        }

        let (value, abs_error_estimate) = totals(&heap);
        Ok(QuadratureResult {
            value,
            abs_error_estimate,
            evaluations,
        })
    }
}

pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    Integrator::with_tolerance(tol).finite(f, a, b)
}

pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    tol: f64,
    patch: Option<SeriesPatch<'_>>,
) -> Result<QuadratureResult> {
    Integrator::with_tolerance(tol).semi_infinite(f, patch)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by position so the pop order never depends on insertion
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: NeumaierSum = segs.iter().map(|s| s.value).collect();
    let error: f64 = segs.iter().map(|s| s.error).sum();
    (value.value(), error)
}

fn not_converged(heap: &BinaryHeap<Segment>, evaluations: usize) -> Error {
    let (value, abs_error) = totals(heap);
    Error::QuadratureNotConverged {
        value,
        abs_error,
        evaluations,
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
    let floor = 50.0 * f64::EPSILON * res_abs * scale;
    Segment {
        a,
        b,
        value,
        error,
        floor,
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let r = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if r < 1.0 { res_asc * r } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn polynomial_from_the_2f1_integral_form() {
        let r = integrate_finite(|z| (1.0 - 2.0 * z * z).powi(2), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 7.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn i2_at_half_against_antiderivative() {
        // ∫ dz (a + b z²)^{-3/2} = z / (a √(a + b z²)),  a = 1-η, b = 2η
        let eta = 0.5;
        let (a, b) = (1.0 - eta, 2.0 * eta);
        let prim = |z: f64| z / (a * (a + b * z * z).sqrt());
        let exact = prim(1.0) - prim(std::f64::consts::FRAC_1_SQRT_2);
        let r = integrate_finite(
            |z| (1.0 - eta * (1.0 - 2.0 * z * z)).powf(-1.5),
            std::f64::consts::FRAC_1_SQRT_2,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((r.value - exact).abs() < 1e-12, "{} vs {}", r.value, exact);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let fwd = integrate_finite(|x| x * x, 0.0, 2.0, 1e-12).unwrap();
        let rev = integrate_finite(|x| x * x, 2.0, 0.0, 1e-12).unwrap();
        assert_eq!(fwd.value, -rev.value);
    }

    #[test]
    fn rejects_bad_tolerance_and_bounds() {
        assert!(integrate_finite(|x| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_finite(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }

    #[test]
    fn subdivision_budget_is_reported() {
        let integ = Integrator {
            tolerance: 1e-14,
            max_subdivisions: 3,
            ..Integrator::default()
        };
        let err = integ
            .finite(|x: f64| x.abs().sqrt().recip().min(1e8), -1.0, 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn gaussian_tail() {
        let r = integrate_semi_infinite(|z| (-0.75 * z * z).exp(), 1e-12, None).unwrap();
        assert!((r.value - (PI / 3.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn first_gaussian_moment() {
        let r = integrate_semi_infinite(|z| z * (-z * z).exp(), 1e-12, None).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn slow_tail_is_rejected() {
        let err = integrate_semi_infinite(|t| 1.0 / (1.0 + t * t), 1e-8, None).unwrap_err();
        assert!(matches!(err, Error::TailNotDecaying { .. }));
    }

    #[test]
    fn series_patch_replaces_small_arguments() {
        // integrand deliberately wrong below 0.5; the patch supplies the true values
        let f = |t: f64| if t < 0.5 { f64::NAN } else { (-t * t).exp() };
        let series = |t: f64| (-t * t).exp();
        let patch = SeriesPatch {
            below: 0.5,
            series: &series,
        };
        let r = integrate_semi_infinite(f, 1e-12, Some(patch)).unwrap();
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-11);
    }

    #[test]
    fn repeated_calls_are_bit_identical() {
        let f = |t: f64| (t.sin() + 2.0) * (-t * t).exp();
        let a = integrate_semi_infinite(f, 1e-11, None).unwrap();
        let b = integrate_semi_infinite(f, 1e-11, None).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }
}
