//! Full-covariance Gaussian mixtures fitted by expectation-maximization,
//! with Akaike-criterion selection of the component count.

use rand::Rng;

use super::gaussian::GaussianComponent;
use super::linalg;
use super::StatsError;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// EM settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Stop once `(ll_t - ll_{t-1}) <= rel_tol * |ll_{t-1}|`.
    pub rel_tol: f64,
    /// Lower bound on every covariance eigenvalue.
    pub cov_floor: f64,
    /// Restarts; the best final log-likelihood wins.
    pub n_init: usize,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            rel_tol: 1e-3,
            cov_floor: 1e-6,
            n_init: 1,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.max_iters == 0 || self.n_init == 0 {
            return Err(StatsError::InvalidInput(
                "max_iters and n_init must be at least 1".into(),
            ));
        }
        if !(self.cov_floor > 0.0) || !(self.rel_tol >= 0.0) {
            return Err(StatsError::InvalidInput(
                "cov_floor must be positive and rel_tol non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    components: Vec<GaussianComponent>,
    log_likelihood: f64,
    n_points: usize,
    fit_dim: usize,
    trace: Vec<f64>,
}

impl GmmModel {
    #[cfg(test)]
    pub(crate) fn from_components(
        components: Vec<GaussianComponent>,
        n_points: usize,
        fit_dim: usize,
        log_likelihood: f64,
    ) -> Self {
        Self {
            components,
            log_likelihood,
            n_points,
            fit_dim,
            trace: vec![log_likelihood],
        }
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Total log-likelihood of the fitting data under the returned parameters.
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn fit_dim(&self) -> usize {
        self.fit_dim
    }

    /// Log-likelihood after every E-step of the winning restart.
    pub fn log_likelihood_trace(&self) -> &[f64] {
        &self.trace
    }

    pub fn n_params(&self) -> usize {
        n_params(self.k(), self.fit_dim)
    }

    pub fn aic(&self) -> f64 {
        aic(self)
    }

    /// Log of the mixture density at `x`.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        log_sum_exp(
            self.components
                .iter()
                .map(|c| c.weight().ln() + c.log_density(x)),
        )
    }
}

/// Free parameters of a `k`-component full-covariance mixture in `d` dimensions.
pub fn n_params(k: usize, d: usize) -> usize {
    k * (d + d * (d + 1) / 2) + k.saturating_sub(1)
}

/// Akaike information criterion, `2 * n_params - 2 * log_likelihood`.
pub fn aic(model: &GmmModel) -> f64 {
    2.0 * model.n_params() as f64 - 2.0 * model.log_likelihood
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Row-major `n x d` view of the data.
struct Data {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl Data {
    fn new(rows: &[Vec<f64>]) -> Result<Self, StatsError> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if d == 0 {
            return Err(StatsError::InvalidInput(
                "data points must be non-empty".into(),
            ));
        }
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(StatsError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(StatsError::InvalidInput("non-finite data value".into()));
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            values,
            n: rows.len(),
            d,
        })
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }
}

struct Params {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covs: Vec<Vec<f64>>,
}

/// Fits a `k`-component mixture with EM, keeping the best of `cfg.n_init`
/// restarts.
///
/// Initial means are `k` distinct data points picked by a farthest-point
/// sweep from a random start; initial covariances are the data covariance.
/// The M-step keeps every covariance eigenvalue at or above `cov_floor`,
/// which keeps each iteration a constrained maximization, so the
/// log-likelihood never decreases within a restart.
pub fn em_fit<R: Rng + ?Sized>(
    data: &[Vec<f64>],
    k: usize,
    cfg: &EmConfig,
    rng: &mut R,
) -> Result<GmmModel, StatsError> {
    cfg.validate()?;
    if k == 0 {
        return Err(StatsError::InvalidInput("k must be at least 1".into()));
    }
    if data.len() < k {
        return Err(StatsError::InsufficientData {
            needed: k,
            got: data.len(),
        });
    }
    let data = Data::new(data)?;

    let mut best: Option<GmmModel> = None;
    let mut last_err = None;
    for _ in 0..cfg.n_init {
        match fit_once(&data, k, cfg, rng) {
            Ok(model) => {
                if best
                    .as_ref()
                    .is_none_or(|b| model.log_likelihood > b.log_likelihood)
                {
                    best = Some(model);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(StatsError::FitFailed))
}

fn fit_once<R: Rng + ?Sized>(
    data: &Data,
    k: usize,
    cfg: &EmConfig,
    rng: &mut R,
) -> Result<GmmModel, StatsError> {
    let (n, d) = (data.n, data.d);
    let mut params = initialize(data, k, cfg.cov_floor, rng)?;
    let mut resp = vec![0.0; n * k];
    let mut trace = Vec::new();

    let mut ll = e_step(data, &params, &mut resp)?;
    trace.push(ll);
    for _ in 0..cfg.max_iters {
        m_step(data, &resp, k, cfg.cov_floor, &mut params);
        let next = e_step(data, &params, &mut resp)?;
        debug_assert!(
            next >= ll - 1e-9 * ll.abs().max(1.0),
            "EM log-likelihood decreased: {ll} -> {next}"
        );
        trace.push(next);
        let improvement = next - ll;
        ll = next;
        if improvement <= cfg.rel_tol * ll.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    let components = params
        .weights
        .into_iter()
        .zip(params.means)
        .zip(params.covs)
        .map(|((w, m), c)| GaussianComponent::new(w, m, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GmmModel {
        components,
        log_likelihood: ll,
        n_points: n,
        fit_dim: d,
        trace,
    })
}

fn initialize<R: Rng + ?Sized>(
    data: &Data,
    k: usize,
    floor: f64,
    rng: &mut R,
) -> Result<Params, StatsError> {
    let (n, d) = (data.n, data.d);
    let sq_dist =
        |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };

    let mut chosen = vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| sq_dist(data.row(i), data.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let (idx, &far) = nearest
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, item| {
                if *item.1 > *acc.1 {
                    item
                } else {
                    acc
                }
            });
        if far <= 0.0 {
            return Err(StatsError::InsufficientData {
                needed: k,
                got: chosen.len(),
            });
        }
        chosen.push(idx);
        for (i, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(data.row(i), data.row(idx)));
        }
    }

    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(data.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = vec![0.0; d * d];
    for i in 0..n {
        let x = data.row(i);
        for a in 0..d {
            let da = x[a] - mean[a];
            for b in 0..=a {
                cov[a * d + b] += da * (x[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in 0..=a {
            let v = cov[a * d + b] / n as f64;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
    }
    linalg::clamp_spectrum(&mut cov, d, floor);

    Ok(Params {
        weights: vec![1.0 / k as f64; k],
        means: chosen.iter().map(|&i| data.row(i).to_vec()).collect(),
        covs: vec![cov; k],
    })
}

/// Fills responsibilities and returns the total log-likelihood.
fn e_step(data: &Data, params: &Params, resp: &mut [f64]) -> Result<f64, StatsError> {
    let (n, d) = (data.n, data.d);
    let k = params.weights.len();
    let mut factors = Vec::with_capacity(k);
    for cov in &params.covs {
        let l = linalg::cholesky(cov, d).ok_or(StatsError::Singular)?;
        factors.push(l);
    }
    let norm: Vec<f64> = factors
        .iter()
        .zip(&params.weights)
        .map(|(l, w)| w.ln() - 0.5 * d as f64 * LN_2PI - linalg::half_log_det(l, d))
        .collect();

    let mut diff = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    let mut total = 0.0;
    for i in 0..n {
        let x = data.row(i);
        let row = &mut resp[i * k..(i + 1) * k];
        for j in 0..k {
            for ((t, a), b) in diff.iter_mut().zip(x).zip(&params.means[j]) {
                *t = a - b;
            }
            row[j] = norm[j] - 0.5 * linalg::mahalanobis_sq(&factors[j], d, &diff, &mut scratch);
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        if !lse.is_finite() {
            return Err(StatsError::Singular);
        }
        total += lse;
        for v in row.iter_mut() {
            *v = (*v - lse).exp();
        }
    }
    Ok(total)
}

fn m_step(data: &Data, resp: &[f64], k: usize, floor: f64, params: &mut Params) {
    let (n, d) = (data.n, data.d);
    let mut mass = vec![0.0; k];
    for i in 0..n {
        for (j, m) in mass.iter_mut().enumerate() {
            *m += resp[i * k + j];
        }
    }
    // Keeps an emptied component well defined.
    let mass: Vec<f64> = mass.iter().map(|m| m + 10.0 * f64::EPSILON).collect();
    let total: f64 = mass.iter().sum();

    for j in 0..k {
        let mean = &mut params.means[j];
        mean.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let r = resp[i * k + j];
            for (m, x) in mean.iter_mut().zip(data.row(i)) {
                *m += r * x;
            }
        }
        mean.iter_mut().for_each(|v| *v /= mass[j]);

        let cov = &mut params.covs[j];
        cov.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let r = resp[i * k + j];
            if r == 0.0 {
                continue;
            }
            let x = data.row(i);
            for a in 0..d {
                let da = r * (x[a] - mean[a]);
                for b in 0..=a {
                    cov[a * d + b] += da * (x[b] - mean[b]);
                }
            }
        }
        for a in 0..d {
            for b in 0..=a {
                let v = cov[a * d + b] / mass[j];
                cov[a * d + b] = v;
                cov[b * d + a] = v;
            }
        }
        linalg::clamp_spectrum(cov, d, floor);
        params.weights[j] = mass[j] / total;
    }
}

/// Fits every `k` in `k_min..=k_max` for which there are at least `k`
/// points and returns the fit with the smallest AIC. Ties go to the smaller
/// `k`; failed fits are skipped.
pub fn select_best_gmm<R: Rng + ?Sized>(
    data: &[Vec<f64>],
    k_min: usize,
    k_max: usize,
    cfg: &EmConfig,
    rng: &mut R,
) -> Result<GmmModel, StatsError> {
    if k_min == 0 || k_min > k_max {
        return Err(StatsError::InvalidInput(format!(
            "invalid component range {k_min}..={k_max}"
        )));
    }
    let mut best: Option<(f64, GmmModel)> = None;
    for k in k_min..=k_max.min(data.len()) {
        let Ok(model) = em_fit(data, k, cfg, rng) else {
            continue;
        };
        let score = model.aic();
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, model));
        }
    }
    best.map(|(_, m)| m).ok_or(StatsError::FitFailed)
}
