//! Scheduling and sampling shared by the two mixture-model teachers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::proportional_choice;
use crate::error::{CoreError, Result};
use crate::space::{clip_unit, uniform_unit, ParameterSpace, ParameterVector};
use crate::stats::{select_best_gmm, EmConfig, GaussianComponent, GmmModel};
use crate::teacher::ProposalSource;

#[derive(Debug, Clone, PartialEq)]
pub struct GmmTeacherConfig {
    /// Window capacity, bootstrap length, and refit period (episodes).
    pub fit_rate: usize,
    pub k_min: usize,
    pub k_max: usize,
    /// Probability of a uniform exploration draw once a model exists.
    pub p_rnd: f64,
    pub em: EmConfig,
}

impl Default for GmmTeacherConfig {
    fn default() -> Self {
        Self {
            fit_rate: 250,
            k_min: 2,
            k_max: 10,
            p_rnd: 0.2,
            em: EmConfig::default(),
        }
    }
}

impl GmmTeacherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fit_rate == 0 {
            return Err(CoreError::InvalidConfig("fit_rate must be positive".into()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(CoreError::InvalidConfig(format!(
                "invalid component range {}..={}",
                self.k_min, self.k_max
            )));
        }
        if !(0.0..=1.0).contains(&self.p_rnd) {
            return Err(CoreError::InvalidConfig(format!(
                "p_rnd {} not in [0, 1]",
                self.p_rnd
            )));
        }
        self.em
            .validate()
            .map_err(|e| CoreError::InvalidConfig(e.to_string()))
    }
}

/// Model, utilities, and fit schedule. Owners supply the fitting data and
/// the per-component utility.
#[derive(Debug, Clone)]
pub(crate) struct MixtureCore {
    pub space: ParameterSpace,
    pub cfg: GmmTeacherConfig,
    pub rng: ChaCha8Rng,
    model: Option<GmmModel>,
    utilities: Vec<f64>,
    episodes: u64,
    fits: u64,
    failed_fits: u64,
    last_source: Option<ProposalSource>,
}

impl MixtureCore {
    pub fn new(space: ParameterSpace, cfg: GmmTeacherConfig, rng: ChaCha8Rng) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            space,
            cfg,
            rng,
            model: None,
            utilities: Vec::new(),
            episodes: 0,
            fits: 0,
            failed_fits: 0,
            last_source: None,
        })
    }

    pub fn model(&self) -> Option<&GmmModel> {
        self.model.as_ref()
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn fits(&self) -> u64 {
        self.fits
    }

    pub fn failed_fits(&self) -> u64 {
        self.failed_fits
    }

    pub fn last_source(&self) -> Option<ProposalSource> {
        self.last_source
    }

    pub fn in_bootstrap(&self) -> bool {
        self.episodes < self.cfg.fit_rate as u64
    }

    /// Counts one observation; true when a refit is due.
    pub fn tick(&mut self) -> bool {
        self.episodes += 1;
        self.episodes.is_multiple_of(self.cfg.fit_rate as u64)
    }

    /// Refits on `data`; a failed fit keeps the previous model.
    pub fn refit(&mut self, data: &[Vec<f64>], utility: impl Fn(&GaussianComponent) -> f64) {
        match select_best_gmm(
            data,
            self.cfg.k_min,
            self.cfg.k_max,
            &self.cfg.em,
            &mut self.rng,
        ) {
            Ok(model) => {
                self.utilities = model
                    .components()
                    .iter()
                    .map(|c| utility(c).max(0.0))
                    .collect();
                self.model = Some(model);
                self.fits += 1;
            }
            Err(_) => self.failed_fits += 1,
        }
    }

    /// Selects a component by utility; `None` without a model.
    pub fn choose_component(&mut self) -> Option<usize> {
        let model = self.model.as_ref()?;
        debug_assert_eq!(model.k(), self.utilities.len());
        Some(proportional_choice(&self.utilities, &mut self.rng))
    }

    #[cfg(test)]
    pub fn set_components_for_test(
        &mut self,
        components: Vec<GaussianComponent>,
        utility: impl Fn(&GaussianComponent) -> f64,
    ) {
        let dim = components[0].dim();
        self.utilities = components.iter().map(|c| utility(c).max(0.0)).collect();
        self.model = Some(GmmModel::from_components(components, 0, dim, 0.0));
    }

    pub fn propose(&mut self) -> ParameterVector {
        let dims = self.space.dims();
        let (unit, source) = if self.model.is_none() {
            let source = if self.in_bootstrap() {
                ProposalSource::Bootstrap
            } else {
                ProposalSource::Fallback
            };
            (uniform_unit(dims, &mut self.rng), source)
        } else if self.rng.gen::<f64>() < self.cfg.p_rnd {
            (uniform_unit(dims, &mut self.rng), ProposalSource::Uniform)
        } else {
            let idx = self.choose_component().expect("model present");
            let component = &self.model.as_ref().expect("model present").components()[idx];
            let mut draw = component.sample(&mut self.rng);
            draw.truncate(dims);
            clip_unit(&mut draw);
            (draw, ProposalSource::Mixture)
        };
        self.last_source = Some(source);
        self.space
            .denormalize(&unit)
            .expect("unit draws are clipped to [0, 1]")
    }
}
