//! Ant agents, their recognition statistics and the run parameters.
//!
//! Every ant wraps one dataset item (its "genetic") and carries the state the
//! meeting rules read and write: an optional colony label, the two estimators
//! `m` / `m_plus`, and the running similarity statistics its acceptance
//! template is derived from.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("similarity {0} is outside [0, 1]")]
    InvalidSimilarity(f64),

    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Colony identifier. An ant without a colony holds `None` instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColonyId(pub u32);

/// Issues fresh colony identifiers from a monotonic counter.
#[derive(Debug, Clone, Default)]
pub struct LabelAllocator {
    next: u32,
}

impl LabelAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> ColonyId {
        let id = ColonyId(self.next);
        self.next += 1;
        id
    }

    /// Number of identifiers handed out so far.
    pub fn issued(&self) -> u32 {
        self.next
    }

    pub fn has_issued(&self, id: ColonyId) -> bool {
        id.0 < self.next
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ant {
    /// Index of the dataset item this ant represents.
    pub genetic_index: usize,
    pub label: Option<ColonyId>,
    /// Meetings this ant has taken part in.
    pub age: u64,
    /// Meeting-success / colony-size estimator.
    pub m: f64,
    /// Colony-integration estimator; reset to 0 when the ant loses its label.
    pub m_plus: f64,
    pub sim_max: f64,
    pub sim_mean: f64,
    pub template: f64,
    pub meeting_count: u64,
}

impl Ant {
    pub fn new(genetic_index: usize) -> Self {
        Self {
            genetic_index,
            label: None,
            age: 0,
            m: 0.0,
            m_plus: 0.0,
            sim_max: 0.0,
            sim_mean: 0.0,
            template: 0.0,
            meeting_count: 0,
        }
    }

    /// Folds one meeting's similarity into the running statistics and
    /// recomputes the template as the midpoint of mean and max.
    pub fn record_meeting(&mut self, sim: f64) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&sim) {
            return Err(ModelError::InvalidSimilarity(sim));
        }
        self.meeting_count += 1;
        self.age += 1;
        self.sim_max = self.sim_max.max(sim);
        self.sim_mean += (sim - self.sim_mean) / self.meeting_count as f64;
        // Rounding in the incremental mean can push it a hair past the max.
        self.sim_mean = self.sim_mean.min(self.sim_max);
        self.template = (self.sim_mean + self.sim_max) / 2.0;
        Ok(())
    }

    pub fn is_labeled(&self) -> bool {
        self.label.is_some()
    }

    /// Removes the colony label and resets the integration estimator.
    pub fn drop_label(&mut self) {
        self.label = None;
        self.m_plus = 0.0;
    }

    /// Checks the per-ant invariants. Used by the engine's debug sweep and tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(format!("ant {}: {name}={v} outside [0,1]", self.genetic_index))
            }
        };
        unit("m", self.m)?;
        unit("m_plus", self.m_plus)?;
        unit("sim_max", self.sim_max)?;
        unit("sim_mean", self.sim_mean)?;
        unit("template", self.template)?;
        if self.meeting_count > 0 {
            if self.sim_mean > self.sim_max {
                return Err(format!(
                    "ant {}: sim_mean {} > sim_max {}",
                    self.genetic_index, self.sim_mean, self.sim_max
                ));
            }
            let expected = (self.sim_mean + self.sim_max) / 2.0;
            if (self.template - expected).abs() > 1e-12 {
                return Err(format!(
                    "ant {}: template {} != {expected}",
                    self.genetic_index, self.template
                ));
            }
        }
        if self.age < self.meeting_count {
            return Err(format!("ant {}: age below meeting count", self.genetic_index));
        }
        Ok(())
    }
}

/// Tunable coefficients of one clustering run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    /// Learning rate of the `m` / `m_plus` estimator updates.
    pub update_alpha: f64,
    /// Meeting-phase length coefficient: `round(0.5 * iter_alpha * N)` meetings.
    pub iter_alpha: f64,
    /// Template-learning coefficient: each ant initiates about `beta * N` meetings.
    pub beta: f64,
    /// Colonies below this fraction of the mean colony fitness are dissolved.
    pub shrink_threshold: f64,
    pub seed: u64,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            update_alpha: 0.2,
            iter_alpha: 150.0,
            beta: 0.9,
            shrink_threshold: 0.5,
            seed: 0,
        }
    }
}

impl Parameters {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |name, value: f64, ok: bool, reason| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter {
                    name,
                    value,
                    reason,
                })
            }
        };
        let a = self.update_alpha;
        check("update_alpha", a, a > 0.0 && a < 1.0, "must lie in (0, 1)")?;
        let ia = self.iter_alpha;
        check("iter_alpha", ia, ia > 0.0 && ia.is_finite(), "must be positive")?;
        let b = self.beta;
        check("beta", b, b > 0.0 && b.is_finite(), "must be positive")?;
        let s = self.shrink_threshold;
        check("shrink_threshold", s, s > 0.0 && s <= 1.0, "must lie in (0, 1]")?;
        Ok(())
    }
}

/// Final partition of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteringResult {
    /// One label per dataset item, renumbered densely from 0 in order of first appearance.
    pub labels: Vec<usize>,
    pub colony_count: usize,
    pub seed_used: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fresh_ant_is_zeroed() {
        let ant = Ant::new(0);
        assert_eq!(ant.label, None);
        assert_eq!(ant.age, 0);
        assert_eq!(ant.meeting_count, 0);
        for v in [ant.m, ant.m_plus, ant.sim_max, ant.sim_mean, ant.template] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn init_is_index_independent() {
        let a = Ant::new(41);
        let b = Ant::new(41);
        assert_eq!(a.genetic_index, 41);
        assert_eq!(a, b);
        assert_eq!(Ant { genetic_index: 0, ..a }, Ant::new(0));
    }

    #[test]
    fn first_observation_sets_all_statistics() {
        let mut ant = Ant::new(0);
        ant.record_meeting(0.8).unwrap();
        assert_eq!(ant.sim_mean, 0.8);
        assert_eq!(ant.sim_max, 0.8);
        assert_eq!(ant.template, 0.8);
    }

    #[test]
    fn two_observations() {
        let mut ant = Ant::new(0);
        ant.record_meeting(0.4).unwrap();
        ant.record_meeting(0.8).unwrap();
        assert!((ant.sim_mean - 0.6).abs() < 1e-15);
        assert_eq!(ant.sim_max, 0.8);
        assert!((ant.template - 0.7).abs() < 1e-15);
        assert_eq!(ant.age, 2);
    }

    #[test]
    fn zero_observation() {
        let mut ant = Ant::new(0);
        ant.record_meeting(0.0).unwrap();
        assert_eq!(ant.meeting_count, 1);
        assert_eq!(ant.sim_mean, 0.0);
        assert_eq!(ant.sim_max, 0.0);
        assert_eq!(ant.template, 0.0);
    }

    #[test]
    fn out_of_range_similarity_rejected() {
        let mut ant = Ant::new(0);
        assert_eq!(ant.record_meeting(1.5), Err(ModelError::InvalidSimilarity(1.5)));
        assert!(ant.record_meeting(-0.1).is_err());
        assert!(ant.record_meeting(f64::NAN).is_err());
        assert_eq!(ant, Ant::new(0));
    }

    #[test]
    fn allocator_is_monotonic() {
        let mut alloc = LabelAllocator::new();
        let a = alloc.fresh();
        let b = alloc.fresh();
        assert!(a < b);
        assert!(alloc.has_issued(b));
        assert!(!alloc.has_issued(ColonyId(2)));
    }

    #[test]
    fn default_parameters_validate() {
        Parameters::default().validate().unwrap();
        let bad = Parameters {
            update_alpha: 1.0,
            ..Parameters::default()
        };
        assert!(bad.validate().is_err());
        let bad = Parameters {
            shrink_threshold: 0.0,
            ..Parameters::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn running_mean_matches_stored_list(sims in prop::collection::vec(0.0f64..=1.0, 1..200)) {
            let mut ant = Ant::new(0);
            for &s in &sims {
                ant.record_meeting(s).unwrap();
                prop_assert!(ant.template >= ant.sim_mean && ant.template <= ant.sim_max);
                prop_assert!(ant.check_invariants().is_ok());
            }
            let mean = sims.iter().sum::<f64>() / sims.len() as f64;
            let max = sims.iter().cloned().fold(0.0, f64::max);
            prop_assert!((ant.sim_mean - mean).abs() < 1e-12);
            prop_assert_eq!(ant.sim_max, max);
        }

        #[test]
        fn statistics_are_order_insensitive(
            sims in prop::collection::vec(0.0f64..=1.0, 1..100).prop_shuffle(),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = sims.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut a = Ant::new(0);
            let mut b = Ant::new(0);
            sims.iter().for_each(|&s| a.record_meeting(s).unwrap());
            shuffled.iter().for_each(|&s| b.record_meeting(s).unwrap());
            prop_assert!((a.sim_mean - b.sim_mean).abs() < 1e-9);
            prop_assert_eq!(a.sim_max, b.sim_max);
        }
    }
}
