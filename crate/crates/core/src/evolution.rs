//! Genetic algorithm engine: seeded population init, single-point crossover
//! with a normally distributed site, single-gene mutation, three selection
//! strategies, and a deterministic evolve loop with parallel fitness
//! evaluation.
//!
//! Determinism contract: everything is derived from `master_seed`.
//! Population init and the sequential selection/crossover/mutation stream
//! use two fixed sub-streams; every fitness evaluation gets its own
//! `derive_eval_seed(master_seed, generation, index)`. Evaluations run under
//! rayon but are collected in index order, so results are identical for any
//! thread count.

use crate::network::{Chromosome, NetworkSpec};
use crate::seed;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

/// Error type evaluators may return; wrapped with generation/individual
/// context by [`evolve`].
pub type EvalError = Box<dyn std::error::Error + Send + Sync + 'static>;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("evolution config invalid: {reason}")]
    Config { reason: String },
    #[error("individual {index} has no fitness")]
    MissingFitness { index: usize },
    #[error("individual {index} has invalid fitness {value} (must be finite and >= 0)")]
    InvalidFitness { index: usize, value: f64 },
    #[error("evaluator failed at generation {generation}, individual {index}: {source}")]
    Evaluator {
        generation: usize,
        index: usize,
        #[source]
        source: EvalError,
    },
}

fn config_err(reason: impl Into<String>) -> EvolveError {
    EvolveError::Config { reason: reason.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// Top group bred into offspring that replace the parents; the rest of
    /// the population is repopulated with fresh random chromosomes.
    Tournament,
    /// Top group kept verbatim, plus their offspring, plus fresh random
    /// fill.
    Elitism,
    /// Fitness-proportional parent draws; children replace the entire
    /// population, no fresh randoms.
    Roulette,
}

/// Whether `mutation_prob` gates one mutation per chromosome or applies to
/// every gene independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationMode {
    PerChromosome,
    PerGene,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub mutation_prob: f64,
    pub mutation_mode: MutationMode,
    pub crossover_prob: f64,
    /// Crossover site as a fraction of genome length, drawn from
    /// Normal(mean, std) and clamped to [0, 1].
    pub crossover_site_mean: f64,
    pub crossover_site_std: f64,
    pub selection: SelectionStrategy,
    /// Size of the selected breeding group (Tournament/Elitism).
    pub selection_group: usize,
    /// Genes are initialized (and mutation replacements drawn) uniformly
    /// from [-init_weight_range, +init_weight_range].
    pub init_weight_range: f64,
    pub max_generations: usize,
    /// Optional early stop once best fitness reaches this value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_fitness: Option<f64>,
    /// Stop at the first generation containing a solved individual
    /// (generations-to-solve experiments want this on).
    pub stop_on_solve: bool,
    pub master_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 200,
            mutation_prob: 0.1,
            mutation_mode: MutationMode::PerChromosome,
            crossover_prob: 1.0,
            crossover_site_mean: 0.95,
            crossover_site_std: 0.05,
            selection: SelectionStrategy::Tournament,
            selection_group: 10,
            init_weight_range: 1.0,
            max_generations: 100,
            target_fitness: None,
            stop_on_solve: true,
            master_seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.population_size < 2 || self.population_size % 2 != 0 {
            return Err(config_err(format!(
                "population_size must be even and >= 2, got {}",
                self.population_size
            )));
        }
        if self.selection_group < 2 || self.selection_group > self.population_size {
            return Err(config_err(format!(
                "selection_group must lie in 2..=population_size, got {}",
                self.selection_group
            )));
        }
        if self.selection == SelectionStrategy::Elitism
            && self.population_size < 2 * self.selection_group
        {
            return Err(config_err(
                "elitism needs population_size >= 2 * selection_group (elites + offspring)",
            ));
        }
        for (name, p) in [("mutation_prob", self.mutation_prob), ("crossover_prob", self.crossover_prob)]
        {
            if !(0.0..=1.0).contains(&p) {
                return Err(config_err(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !(0.0..=1.0).contains(&self.crossover_site_mean) {
            return Err(config_err(format!(
                "crossover_site_mean must lie in [0, 1], got {}",
                self.crossover_site_mean
            )));
        }
        if !self.crossover_site_std.is_finite() || self.crossover_site_std < 0.0 {
            return Err(config_err(format!(
                "crossover_site_std must be >= 0, got {}",
                self.crossover_site_std
            )));
        }
        if !self.init_weight_range.is_finite() || self.init_weight_range <= 0.0 {
            return Err(config_err(format!(
                "init_weight_range must be > 0, got {}",
                self.init_weight_range
            )));
        }
        if self.max_generations == 0 {
            return Err(config_err("max_generations must be >= 1"));
        }
        if let Some(tf) = self.target_fitness {
            if !tf.is_finite() {
                return Err(config_err(format!("target_fitness must be finite, got {tf}")));
            }
        }
        Ok(())
    }
}

/// A chromosome with its (optional) evaluated fitness and the seed its
/// evaluation used.
#[derive(Clone, Debug)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub fitness: Option<f64>,
    pub eval_seed: u64,
}

/// What the evaluator reports for one chromosome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    /// Non-negative fitness.
    pub fitness: f64,
    /// Winning-chromosome predicate (e.g. reached the destination on every
    /// track).
    pub solved: bool,
}

/// Per-generation record.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Highest-fitness individual of the generation.
    pub best_individual: Chromosome,
    /// Highest-fitness individual that met the solved predicate, if any.
    /// Not necessarily `best_individual`: a fast crash far from the start
    /// can out-score a finisher.
    pub solver: Option<Chromosome>,
    pub solved: bool,
}

/// Fitness evaluator. Must be deterministic per `(chromosome, eval_seed)`.
pub trait FitnessFn: Sync {
    fn evaluate(&self, chromosome: &Chromosome, eval_seed: u64) -> Result<Evaluation, EvalError>;
}

impl<F> FitnessFn for F
where
    F: Fn(&Chromosome, u64) -> Result<Evaluation, EvalError> + Sync,
{
    fn evaluate(&self, chromosome: &Chromosome, eval_seed: u64) -> Result<Evaluation, EvalError> {
        self(chromosome, eval_seed)
    }
}

// Fixed sub-stream tags; changing these changes every seeded run.
const INIT_STREAM: u64 = 1;
const OPS_STREAM: u64 = 2;
const EVAL_STREAM: u64 = 3;

/// Evaluation seed for one individual: stable function of master seed,
/// generation, and population index.
pub fn derive_eval_seed(master_seed: u64, generation: usize, index: usize) -> u64 {
    seed::mix(
        seed::mix(seed::mix(master_seed, EVAL_STREAM), generation as u64),
        index as u64,
    )
}

fn random_chromosome(spec: &NetworkSpec, range: f64, rng: &mut ChaCha8Rng) -> Chromosome {
    let genes: Vec<f64> =
        (0..spec.genome_length()).map(|_| rng.random_range(-range..=range)).collect();
    Chromosome::new(genes, spec.clone()).expect("generated genome matches spec")
}

/// Fresh population: genes uniform in the init range, deterministic in
/// `config.master_seed`.
pub fn init_population(config: &EvolutionConfig, spec: &NetworkSpec) -> Vec<Chromosome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(config.master_seed, INIT_STREAM));
    (0..config.population_size)
        .map(|_| random_chromosome(spec, config.init_weight_range, &mut rng))
        .collect()
}

/// Single-point crossover. With probability `crossover_prob` draws the site
/// fraction s ~ Normal(site_mean, site_std) clamped to [0, 1], takes
/// site = round(s * genome_length), and exchanges the gene tails from the
/// site onward; otherwise the children are plain copies.
///
/// Draw order (pinned for reproducibility): the Bernoulli gate first, then
/// the site draw only when crossing over.
pub fn crossover(
    parent_a: &Chromosome,
    parent_b: &Chromosome,
    config: &EvolutionConfig,
    rng: &mut ChaCha8Rng,
) -> (Chromosome, Chromosome) {
    debug_assert_eq!(parent_a.genes().len(), parent_b.genes().len());
    if !rng.random_bool(config.crossover_prob) {
        return (parent_a.clone(), parent_b.clone());
    }
    let s = Normal::new(config.crossover_site_mean, config.crossover_site_std)
        .expect("validated crossover site params")
        .sample(rng)
        .clamp(0.0, 1.0);
    let len = parent_a.genes().len();
    let site = (s * len as f64).round() as usize;
    let mut ga = parent_a.genes().to_vec();
    let mut gb = parent_b.genes().to_vec();
    for i in site..len {
        std::mem::swap(&mut ga[i], &mut gb[i]);
    }
    let ca = Chromosome::new(ga, parent_a.spec().clone()).expect("crossover preserves length");
    let cb = Chromosome::new(gb, parent_b.spec().clone()).expect("crossover preserves length");
    (ca, cb)
}

/// Mutation. PerChromosome (default): with probability `mutation_prob`,
/// one uniformly chosen gene is replaced by a fresh uniform draw. PerGene:
/// every gene is independently replaced with probability `mutation_prob`.
pub fn mutate(
    chromosome: &Chromosome,
    config: &EvolutionConfig,
    rng: &mut ChaCha8Rng,
) -> Chromosome {
    let mut genes = chromosome.genes().to_vec();
    let r = config.init_weight_range;
    match config.mutation_mode {
        MutationMode::PerChromosome => {
            if rng.random_bool(config.mutation_prob) && !genes.is_empty() {
                let idx = rng.random_range(0..genes.len());
                genes[idx] = rng.random_range(-r..=r);
            }
        }
        MutationMode::PerGene => {
            for g in genes.iter_mut() {
                if rng.random_bool(config.mutation_prob) {
                    *g = rng.random_range(-r..=r);
                }
            }
        }
    }
    Chromosome::new(genes, chromosome.spec().clone()).expect("mutation preserves length")
}

/// Indices sorted by fitness descending, ties broken by lower index.
fn ranked_indices(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&i, &j| fitness[j].total_cmp(&fitness[i]).then(i.cmp(&j)));
    idx
}

/// Breeds `quota` offspring from `parents` (ordered best-first) by adjacent
/// pairing (0,1), (2,3), ... wrapping around until the quota is met.
fn breed_offspring(
    parents: &[&Chromosome],
    quota: usize,
    config: &EvolutionConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Chromosome> {
    let mut out = Vec::with_capacity(quota);
    let mut pair = 0usize;
    while out.len() < quota {
        let a = parents[(2 * pair) % parents.len()];
        let b = parents[(2 * pair + 1) % parents.len()];
        let (c1, c2) = crossover(a, b, config, rng);
        out.push(mutate(&c1, config, rng));
        if out.len() < quota {
            out.push(mutate(&c2, config, rng));
        }
        pair += 1;
    }
    out
}

/// Fitness-proportional draw over the cumulative weight table.
fn roulette_pick(cum: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let x = rng.random_range(0.0..total);
    cum.partition_point(|&c| c <= x).min(cum.len() - 1)
}

/// Produces the next population from an evaluated one. Requires every
/// individual to carry a fitness; output size always equals the input size.
pub fn next_generation(
    population: &[Individual],
    config: &EvolutionConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Chromosome>, EvolveError> {
    let n = population.len();
    let mut fitness = Vec::with_capacity(n);
    for (index, ind) in population.iter().enumerate() {
        let f = ind.fitness.ok_or(EvolveError::MissingFitness { index })?;
        if !f.is_finite() || f < 0.0 {
            return Err(EvolveError::InvalidFitness { index, value: f });
        }
        fitness.push(f);
    }
    let spec = population[0].chromosome.spec().clone();
    let ranked = ranked_indices(&fitness);
    let g = config.selection_group.min(n);

    let next = match config.selection {
        SelectionStrategy::Tournament => {
            let parents: Vec<&Chromosome> =
                ranked[..g].iter().map(|&i| &population[i].chromosome).collect();
            let mut next = breed_offspring(&parents, g, config, rng);
            while next.len() < n {
                next.push(random_chromosome(&spec, config.init_weight_range, rng));
            }
            next
        }
        SelectionStrategy::Elitism => {
            let mut next: Vec<Chromosome> =
                ranked[..g].iter().map(|&i| population[i].chromosome.clone()).collect();
            let parents: Vec<&Chromosome> =
                ranked[..g].iter().map(|&i| &population[i].chromosome).collect();
            next.extend(breed_offspring(&parents, g, config, rng));
            while next.len() < n {
                next.push(random_chromosome(&spec, config.init_weight_range, rng));
            }
            next
        }
        SelectionStrategy::Roulette => {
            // Floor keeps the wheel well-defined when everything crashed
            // immediately (all-zero fitness).
            let mut cum = Vec::with_capacity(n);
            let mut total = 0.0;
            for f in &fitness {
                total += f.max(1e-9);
                cum.push(total);
            }
            let mut next = Vec::with_capacity(n);
            for _ in 0..n / 2 {
                let ia = roulette_pick(&cum, total, rng);
                let ib = roulette_pick(&cum, total, rng);
                let (c1, c2) =
                    crossover(&population[ia].chromosome, &population[ib].chromosome, config, rng);
                next.push(mutate(&c1, config, rng));
                next.push(mutate(&c2, config, rng));
            }
            next
        }
    };
    debug_assert_eq!(next.len(), n);
    Ok(next)
}

/// Runs the GA: evaluate -> record stats -> select/breed, until
/// max_generations, target fitness, or (with `stop_on_solve`) the first
/// generation containing a solved individual. Returns the full history.
pub fn evolve(
    config: &EvolutionConfig,
    spec: &NetworkSpec,
    evaluator: &impl FitnessFn,
) -> Result<Vec<GenerationStats>, EvolveError> {
    config.validate()?;
    let mut ops_rng = ChaCha8Rng::seed_from_u64(seed::mix(config.master_seed, OPS_STREAM));
    let mut population = init_population(config, spec);
    let mut history = Vec::new();

    for generation in 0..config.max_generations {
        // Parallel evaluation, collected in index order so results do not
        // depend on the rayon pool size. The first error (by index) wins.
        let results: Vec<Result<Evaluation, EvalError>> = population
            .par_iter()
            .enumerate()
            .map(|(i, c)| evaluator.evaluate(c, derive_eval_seed(config.master_seed, generation, i)))
            .collect();
        let mut evals = Vec::with_capacity(results.len());
        for (index, r) in results.into_iter().enumerate() {
            match r {
                Ok(e) => {
                    if !e.fitness.is_finite() || e.fitness < 0.0 {
                        return Err(EvolveError::InvalidFitness { index, value: e.fitness });
                    }
                    evals.push(e);
                }
                Err(source) => {
                    return Err(EvolveError::Evaluator { generation, index, source })
                }
            }
        }

        let mut best = 0usize;
        let mut best_solver: Option<usize> = None;
        for (i, e) in evals.iter().enumerate() {
            if e.fitness > evals[best].fitness {
                best = i;
            }
            if e.solved && best_solver.is_none_or(|s| e.fitness > evals[s].fitness) {
                best_solver = Some(i);
            }
        }
        let mean = evals.iter().map(|e| e.fitness).sum::<f64>() / evals.len() as f64;
        let solved = best_solver.is_some();
        let stats = GenerationStats {
            generation,
            best_fitness: evals[best].fitness,
            mean_fitness: mean,
            best_individual: population[best].clone(),
            solver: best_solver.map(|i| population[i].clone()),
            solved,
        };
        debug_assert!(stats.best_fitness >= stats.mean_fitness - 1e-9);
        history.push(stats);

        if solved && config.stop_on_solve {
            break;
        }
        if config.target_fitness.is_some_and(|tf| evals[best].fitness >= tf) {
            break;
        }
        if generation + 1 == config.max_generations {
            break;
        }

        let individuals: Vec<Individual> = population
            .iter()
            .zip(&evals)
            .enumerate()
            .map(|(i, (c, e))| Individual {
                chromosome: c.clone(),
                fitness: Some(e.fitness),
                eval_seed: derive_eval_seed(config.master_seed, generation, i),
            })
            .collect();
        population = next_generation(&individuals, config, &mut ops_rng)?;
    }
    Ok(history)
}

/// Stable CSV rendering of a stats history.
/// Header: `generation,best_fitness,mean_fitness,solved`.
pub fn stats_csv(stats: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_fitness,mean_fitness,solved\n");
    for s in stats {
        writeln!(out, "{},{},{},{}", s.generation, s.best_fitness, s.mean_fitness, s.solved)
            .unwrap();
    }
    out
}
