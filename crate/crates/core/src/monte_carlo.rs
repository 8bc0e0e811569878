//! Seeded Monte Carlo averages over the oscillator ground state.
//!
//! `a′` and `b′` are drawn independently from the density `π^{−3/2} e^{−a′²}`,
//! i.e. each Cartesian component is normal with variance ½.
//!
//! Samples are split into fixed-size batches. Batch `i` uses ChaCha8 keyed by
//! the seed on stream `i`, so the estimate does not depend on how many threads
//! run the batches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type Vec3 = [f64; 3];

pub const MIN_SAMPLES: u64 = 1_000;

pub const BATCH_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean − expected|` in units of the standard error.
    pub fn deviation(&self, expected: f64) -> f64 {
        (self.mean - expected).abs() / self.std_error
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }
}

fn ground_state() -> Normal<f64> {
    Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal")
}

fn draw(rng: &mut ChaCha8Rng, normal: &Normal<f64>) -> Vec3 {
    [normal.sample(rng), normal.sample(rng), normal.sample(rng)]
}

fn run_batch<G>(g: &G, seed: u64, index: u64, count: u64) -> Moments
where
    G: Fn(&Vec3, &Vec3) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let normal = ground_state();
    let mut m = Moments::default();
    for _ in 0..count {
        let a = draw(&mut rng, &normal);
        let b = draw(&mut rng, &normal);
        m.push(g(&a, &b));
    }
    m
}

/// Mean and standard error of `g(a′, b′)` over `samples` ground-state draws.
pub fn mc_gaussian_expectation<G>(g: G, samples: u64, seed: u64) -> Result<McEstimate>
where
    G: Fn(&Vec3, &Vec3) -> f64 + Sync,
{
    if samples < MIN_SAMPLES {
        return invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        ));
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|i| {
            let count = BATCH_SIZE.min(samples - i * BATCH_SIZE);
            run_batch(&g, seed, i, count)
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1) as f64;
    Ok(McEstimate {
        mean: total.mean,
        std_error: (variance / total.count as f64).sqrt(),
        samples,
        seed,
    })
}

pub fn cross_norm(a: &Vec3, b: &Vec3) -> f64 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// `E|a′| · E|b′| · E sin γ = (2/√π)² · π/4`, which is exactly 1.
pub fn cross_norm_factorized_mean() -> f64 {
    let radial = 2.0 / std::f64::consts::PI.sqrt();
    radial * radial * std::f64::consts::FRAC_PI_4
}
