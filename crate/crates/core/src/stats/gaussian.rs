use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg;
use super::StatsError;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// One weighted kernel of a Gaussian mixture with full covariance.
///
/// The Cholesky factor is computed at construction, so a component that
/// exists can always be evaluated and sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    weight: f64,
    mean: Vec<f64>,
    covariance: Vec<f64>,
    chol: Vec<f64>,
}

impl GaussianComponent {
    /// `covariance` is row-major `d x d`.
    pub fn new(weight: f64, mean: Vec<f64>, covariance: Vec<f64>) -> Result<Self, StatsError> {
        let d = mean.len();
        if covariance.len() != d * d {
            return Err(StatsError::DimensionMismatch {
                expected: d * d,
                got: covariance.len(),
            });
        }
        if !(weight > 0.0 && weight <= 1.0 + 1e-12) {
            return Err(StatsError::InvalidInput(format!(
                "component weight {weight} not in (0, 1]"
            )));
        }
        let chol = linalg::cholesky(&covariance, d).ok_or(StatsError::Singular)?;
        Ok(Self {
            weight,
            mean,
            covariance,
            chol,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Row-major covariance.
    pub fn covariance(&self) -> &[f64] {
        &self.covariance
    }

    pub fn covariance_entry(&self, row: usize, col: usize) -> f64 {
        self.covariance[row * self.dim() + col]
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Log of the (unweighted) density at `x`.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let diff: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        let mut scratch = vec![0.0; d];
        let m = linalg::mahalanobis_sq(&self.chol, d, &diff, &mut scratch);
        -0.5 * (d as f64 * LN_2PI + m) - linalg::half_log_det(&self.chol, d)
    }

    /// Draws `mean + L z` with `z ~ N(0, I)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        linalg::lower_mul(&self.chol, d, &z)
            .into_iter()
            .zip(&self.mean)
            .map(|(v, m)| v + m)
            .collect()
    }
}

/// Free-function form of [`GaussianComponent::sample`].
pub fn sample_gaussian<R: Rng + ?Sized>(component: &GaussianComponent, rng: &mut R) -> Vec<f64> {
    component.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_singular_covariance() {
        assert_eq!(
            GaussianComponent::new(1.0, vec![0.0, 0.0], vec![0.0; 4]),
            Err(StatsError::Singular)
        );
    }

    #[test]
    fn floor_sized_covariance_spread() {
        let c = GaussianComponent::new(1.0, vec![0.3, 0.7], vec![1e-6, 0.0, 0.0, 1e-6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000;
        let draws: Vec<Vec<f64>> = (0..n).map(|_| c.sample(&mut rng)).collect();
        for axis in 0..2 {
            let mean = draws.iter().map(|x| x[axis]).sum::<f64>() / n as f64;
            let var = draws.iter().map(|x| (x[axis] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let sd = var.sqrt();
            assert!((5e-4..=1.5e-3).contains(&sd), "axis {axis}: sd {sd}");
        }
    }

    #[test]
    fn identity_covariance_moments() {
        let c = GaussianComponent::new(1.0, vec![2.0, 2.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let draws: Vec<Vec<f64>> = (0..n).map(|_| sample_gaussian(&c, &mut rng)).collect();
        let mean: Vec<f64> = (0..2)
            .map(|a| draws.iter().map(|x| x[a]).sum::<f64>() / n as f64)
            .collect();
        for a in 0..2 {
            assert!((mean[a] - 2.0).abs() < 0.02);
            for b in 0..2 {
                let cov = draws
                    .iter()
                    .map(|x| (x[a] - mean[a]) * (x[b] - mean[b]))
                    .sum::<f64>()
                    / (n - 1) as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((cov - expected).abs() < 0.05, "cov[{a}][{b}] = {cov}");
            }
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let c = GaussianComponent::new(
            1.0,
            vec![0.0; 3],
            vec![1.0, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 1.0],
        )
        .unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| c.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(3), run(3));
    }

    #[test]
    fn log_density_standard_normal() {
        let c = GaussianComponent::new(1.0, vec![0.0], vec![1.0]).unwrap();
        assert!((c.log_density(&[0.0]) + 0.5 * LN_2PI).abs() < 1e-12);
        assert!((c.log_density(&[1.0]) + 0.5 * LN_2PI + 0.5).abs() < 1e-12);
    }
}
