//! The five-phase clustering run: initialize ants, learn templates, meet and
//! apply rules, shrink colonies, reassign colony-less ants.
//!
//! A run is driven by a single `ChaCha8Rng` seeded from [`Parameters::seed`],
//! so identical inputs and seed give bit-identical results on any platform.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Ant, ClusteringResult, ColonyId, LabelAllocator, ModelError, Parameters};
use crate::rules::{acceptance, MeetingContext, RuleSet};
use crate::similarity::SimilaritySource;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("invariant violated after {phase}: {detail}")]
    Invariant { phase: &'static str, detail: String },
}

/// Counters collected during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub template_meetings: u64,
    pub rule_meetings: u64,
    /// Firings per rule, indexed like [`RuleSet::rules`].
    pub rule_fires: Vec<u64>,
    /// Meetings where no rule guard held.
    pub unmatched: u64,
    pub colonies_dissolved: usize,
    pub ants_reassigned: usize,
}

/// Per-ant meetings initiated while learning templates.
pub fn template_meetings_per_ant(n: usize, beta: f64) -> usize {
    if n < 2 {
        return 0;
    }
    let wanted = (beta * n as f64).round().max(1.0) as usize;
    wanted.min(n - 1)
}

/// Length of the meeting phase: `round(0.5 * iter_alpha * n)`.
pub fn meeting_phase_length(n: usize, iter_alpha: f64) -> u64 {
    if n < 2 {
        return 0;
    }
    (0.5 * iter_alpha * n as f64).round() as u64
}

/// Draws an unordered pair of distinct indices uniformly; the order of the
/// returned pair is itself uniform.
pub fn draw_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (usize, usize) {
    debug_assert!(n >= 2);
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

fn pair_mut(ants: &mut [Ant], i: usize, j: usize) -> (&mut Ant, &mut Ant) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = ants.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = ants.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

pub struct Engine<'a, S: SimilaritySource + ?Sized> {
    source: &'a S,
    rules: &'a RuleSet,
    params: Parameters,
    ants: Vec<Ant>,
    labels: LabelAllocator,
    rng: ChaCha8Rng,
    stats: RunStats,
}

impl<'a, S: SimilaritySource + ?Sized> Engine<'a, S> {
    /// Phase 1: one fresh ant per item.
    pub fn new(source: &'a S, params: Parameters, rules: &'a RuleSet) -> Result<Self, EngineError> {
        params.validate()?;
        let n = source.len();
        if n == 0 {
            return Err(EngineError::EmptyDataset);
        }
        Ok(Self {
            source,
            rules,
            params,
            ants: (0..n).map(Ant::new).collect(),
            labels: LabelAllocator::new(),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            stats: RunStats {
                rule_fires: vec![0; rules.rules().len()],
                ..RunStats::default()
            },
        })
    }

    pub fn ants(&self) -> &[Ant] {
        &self.ants
    }

    pub fn ants_mut(&mut self) -> &mut [Ant] {
        &mut self.ants
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn labels(&self) -> &LabelAllocator {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut LabelAllocator {
        &mut self.labels
    }

    fn observe(&mut self, i: usize, j: usize) -> Result<f64, EngineError> {
        let sim = self.source.similarity(self.ants[i].genetic_index, self.ants[j].genetic_index);
        self.ants[i].record_meeting(sim)?;
        self.ants[j].record_meeting(sim)?;
        Ok(sim)
    }

    /// Phase 2: every ant initiates random meetings; both sides record the
    /// similarity and no rules are applied.
    pub fn learn_templates(&mut self) -> Result<(), EngineError> {
        let n = self.ants.len();
        let k = template_meetings_per_ant(n, self.params.beta);
        for i in 0..n {
            for _ in 0..k {
                let mut j = self.rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                self.observe(i, j)?;
                self.stats.template_meetings += 1;
            }
        }
        Ok(())
    }

    /// Phase 3: random pairwise meetings, each followed by one rule firing.
    pub fn meeting_phase(&mut self) -> Result<(), EngineError> {
        let n = self.ants.len();
        let total = meeting_phase_length(n, self.params.iter_alpha);
        for _ in 0..total {
            let (i, j) = draw_pair(&mut self.rng, n);
            let sim = self.observe(i, j)?;
            let (ant_i, ant_j) = pair_mut(&mut self.ants, i, j);
            let accepted = acceptance(ant_i.template, ant_j.template, sim);
            let mut ctx = MeetingContext {
                ant_i,
                ant_j,
                sim,
                accepted,
                labels: &mut self.labels,
                update_alpha: self.params.update_alpha,
            };
            match self.rules.apply(&mut ctx) {
                Some(idx) => self.stats.rule_fires[idx] += 1,
                None => self.stats.unmatched += 1,
            }
            self.stats.rule_meetings += 1;
        }
        Ok(())
    }

    /// Fitness of every colony: its share of the ants times the mean `m_plus`
    /// of its members.
    pub fn colony_fitness(&self) -> BTreeMap<ColonyId, f64> {
        let n = self.ants.len() as f64;
        let mut sums: BTreeMap<ColonyId, (usize, f64)> = BTreeMap::new();
        for ant in &self.ants {
            if let Some(label) = ant.label {
                let e = sums.entry(label).or_default();
                e.0 += 1;
                e.1 += ant.m_plus;
            }
        }
        sums.into_iter()
            .map(|(label, (count, sum))| {
                let size_share = count as f64 / n;
                (label, size_share * (sum / count as f64))
            })
            .collect()
    }

    /// Phase 4: dissolves colonies whose fitness falls below
    /// `shrink_threshold` times the mean colony fitness.
    pub fn nest_shrink(&mut self) {
        let fitness = self.colony_fitness();
        if fitness.is_empty() {
            return;
        }
        let mean = fitness.values().sum::<f64>() / fitness.len() as f64;
        let cut = self.params.shrink_threshold * mean;
        let doomed: Vec<ColonyId> = fitness
            .into_iter()
            .filter(|&(_, f)| f < cut)
            .map(|(label, _)| label)
            .collect();
        if doomed.is_empty() {
            return;
        }
        for ant in &mut self.ants {
            if ant.label.is_some_and(|l| doomed.contains(&l)) {
                ant.drop_label();
            }
        }
        self.stats.colonies_dissolved += doomed.len();
    }

    /// Phase 5: each unlabeled ant joins the colony of its most similar
    /// labeled ant (lowest index on ties). Labeled ants are taken as they
    /// were before this phase started. With no labeled ant at all, everyone
    /// goes into one new colony.
    pub fn reassign_unlabeled(&mut self) {
        let labeled: Vec<(usize, ColonyId)> = self
            .ants
            .iter()
            .enumerate()
            .filter_map(|(idx, a)| a.label.map(|l| (idx, l)))
            .collect();
        if labeled.is_empty() {
            let id = self.labels.fresh();
            for ant in &mut self.ants {
                ant.label = Some(id);
            }
            self.stats.ants_reassigned += self.ants.len();
            return;
        }
        let mut assignments = Vec::new();
        for (idx, ant) in self.ants.iter().enumerate() {
            if ant.label.is_some() {
                continue;
            }
            let mut best = (f64::NEG_INFINITY, labeled[0].1);
            for &(other, label) in &labeled {
                let s = self
                    .source
                    .similarity(ant.genetic_index, self.ants[other].genetic_index);
                if s > best.0 {
                    best = (s, label);
                }
            }
            assignments.push((idx, best.1));
        }
        self.stats.ants_reassigned += assignments.len();
        for (idx, label) in assignments {
            self.ants[idx].label = Some(label);
        }
    }

    /// Checks every ant invariant and that every label came from the allocator.
    pub fn check_invariants(&self, phase: &'static str) -> Result<(), EngineError> {
        for ant in &self.ants {
            ant.check_invariants()
                .map_err(|detail| EngineError::Invariant { phase, detail })?;
            if let Some(l) = ant.label {
                if !self.labels.has_issued(l) {
                    return Err(EngineError::Invariant {
                        phase,
                        detail: format!("label {} was never issued", l.0),
                    });
                }
            }
        }
        Ok(())
    }

    /// Dense labels in first-appearance order. Unlabeled ants, if any remain,
    /// each get a singleton label.
    pub fn result(&self) -> ClusteringResult {
        let mut dense: HashMap<ColonyId, usize> = HashMap::new();
        let mut next = 0;
        let labels = self
            .ants
            .iter()
            .map(|ant| {
                let mut fresh = || {
                    next += 1;
                    next - 1
                };
                match ant.label {
                    Some(l) => *dense.entry(l).or_insert_with(fresh),
                    None => fresh(),
                }
            })
            .collect();
        ClusteringResult {
            labels,
            colony_count: next,
            seed_used: self.params.seed,
        }
    }

    /// Runs phases 2 to 5 and returns the final partition.
    pub fn run(mut self) -> Result<(ClusteringResult, RunStats), EngineError> {
        let sweep = |e: &Self, phase| {
            if cfg!(debug_assertions) {
                e.check_invariants(phase)
            } else {
                Ok(())
            }
        };
        self.learn_templates()?;
        sweep(&self, "template learning")?;
        self.meeting_phase()?;
        sweep(&self, "meeting phase")?;
        self.nest_shrink();
        sweep(&self, "nest shrink")?;
        self.reassign_unlabeled();
        sweep(&self, "reassignment")?;
        Ok((self.result(), self.stats))
    }
}

/// Clusters every item of `source` with the given rule set.
pub fn run_antclust<S: SimilaritySource + ?Sized>(
    source: &S,
    params: Parameters,
    rules: &RuleSet,
) -> Result<ClusteringResult, EngineError> {
    Engine::new(source, params, rules)?.run().map(|(r, _)| r)
}
