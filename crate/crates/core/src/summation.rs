//! Compensated accumulation with a running rounding-error bound.

/// Neumaier's variant of Kahan summation.
///
/// Alongside the compensated total it keeps `Σ|term|`, which bounds the
/// rounding error of the terms themselves (each term is assumed to carry
/// one rounding of relative size `ε`).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    terms: usize,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
        self.terms += 1;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of absolute values of everything added so far.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// Bound on the absolute rounding error of `value()`.
    pub fn error_bound(&self) -> f64 {
        // per-term rounding plus the O(ε²·n) residue of the compensated sum
        let n = self.terms as f64;
        f64::EPSILON * self.abs_sum * (1.0 + n * f64::EPSILON) + f64::EPSILON * self.value().abs()
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_summation() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = xs.iter().sum();
        let s: NeumaierSum = xs.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn bound_tracks_magnitude_of_terms() {
        let s: NeumaierSum = [3.0, -4.0].into_iter().collect();
        assert_eq!(s.abs_sum(), 7.0);
        assert!(s.error_bound() > 0.0 && s.error_bound() < 1e-14);
    }
}
