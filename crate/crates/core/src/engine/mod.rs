//! Generation loops, survivor replacement and checkpointing.

mod config;
mod context;
mod epnet;
mod individual;

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    Encoding, EvolutionConfig, FitnessConfig, InitConfig, OperatorConfig, StopConfig, TrainerConfig,
};
pub use context::{loss_for, Context};
pub use epnet::{epnet_step, EpnetPath, EpnetTrace, StructuralAttempt, StructuralOp};
pub use individual::{replace, GenerationReport, Individual};

use crate::data::{Dataset, Patterns};
use crate::error::{Error, Result};
use crate::fitness::{fitness_of_error, mark, FitnessSpec};
use crate::genome::{BitStringGenome, GeneListGenome, Genome, Layout, MatrixGenome, MatrixRanges};
use crate::rng::stream;
use crate::selection::{fittest_half, random_pairing, sample_parent, RankedPopulation, SelectionStrategy};
use crate::variation::{
    crossover_genelist, instantaneous_temperature, mutate_bitstring, neat_add_connection,
    neat_split_connection, npoint_crossover, perturb_weights, structural_mutation_count, temperature,
    InnovationRegistry,
};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    Stagnation,
    MaxGenerations,
}

/// Everything needed to continue a run. Random streams are addressed by
/// generation and offspring index, so the generation counter is the only
/// cursor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: EvolutionConfig,
    pub generation: usize,
    pub next_id: u64,
    pub population: Vec<Individual>,
    pub registry: Option<InnovationRegistry>,
    pub history: Vec<GenerationReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOutcome {
    pub best: Individual,
    pub history: Vec<GenerationReport>,
    pub reason: StopReason,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    config: EvolutionConfig,
    train: Patterns,
    validation: Patterns,
    spec: FitnessSpec,
    population: Vec<Individual>,
    registry: Option<InnovationRegistry>,
    generation: usize,
    next_id: u64,
    history: Vec<GenerationReport>,
    last_traces: Vec<EpnetTrace>,
}

fn prepare(config: &EvolutionConfig, dataset: &Dataset) -> Result<(Patterns, Patterns, FitnessSpec)> {
    let errs = config.violations();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    dataset.validate()?;
    let data = if config.bias_input { dataset.with_bias_input() } else { dataset.clone() };
    let train = data.train();
    let validation = data.validation();
    if train.is_empty() || validation.is_empty() {
        return Err(Error::Data("train and validation views must be nonempty".into()));
    }
    let f = &config.fitness;
    let spec = FitnessSpec::new(f.measure, f.o_max, f.o_min, data.target_width(), validation.len())?;
    Ok((train, validation, spec))
}

fn random_bitstring<R: Rng + ?Sized>(
    init: &InitConfig,
    inputs: usize,
    outputs: usize,
    rng: &mut R,
) -> Result<BitStringGenome> {
    let layout = Layout::feedforward(inputs, init.bitstring_hidden, outputs);
    let g = rng.random_range(init.granularity.0..=init.granularity.1);
    let mut b = BitStringGenome::empty((inputs, init.bitstring_hidden, outputs), layout, g, init.g_max, init.w_lo)?;
    for s in &mut b.substrings {
        s.connected = rng.random_bool(0.5);
        for bit in &mut s.weight_bits {
            *bit = rng.random_bool(0.5);
        }
    }
    Ok(b)
}

fn bump(counts: &mut BTreeMap<String, u64>, key: &str, by: u64) {
    if by > 0 {
        *counts.entry(key.to_string()).or_default() += by;
    }
}

fn pick_parents<R: Rng + ?Sized>(
    strategy: SelectionStrategy,
    ranked: &RankedPopulation,
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    Ok(match strategy {
        SelectionStrategy::Rank => (0..count).map(|_| sample_parent(ranked, rng)).collect(),
        SelectionStrategy::FittestHalf => {
            let half = fittest_half(ranked)?;
            (0..count).map(|_| half[rng.random_range(0..half.len())]).collect()
        }
        SelectionStrategy::RandomPair => (0..count).map(|_| rng.random_range(0..ranked.len())).collect(),
    })
}

fn pick_pairs<R: Rng + ?Sized>(
    strategy: SelectionStrategy,
    ranked: &RankedPopulation,
    count: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::with_capacity(count);
    match strategy {
        SelectionStrategy::RandomPair => {
            while pairs.len() < count {
                pairs.extend(random_pairing(ranked.len(), rng)?);
            }
            pairs.truncate(count);
        }
        _ => {
            for _ in 0..count {
                let two = pick_parents(strategy, ranked, 2, rng)?;
                pairs.push((two[0], two[1]));
            }
        }
    }
    Ok(pairs)
}

fn genelist_of(genome: &Genome) -> Result<&GeneListGenome> {
    match genome {
        Genome::Genelist(g) => Ok(g),
        other => Err(Error::InvalidGenome(format!("expected a gene list, got {}", other.kind_name()))),
    }
}

fn bitstring_of(genome: &Genome) -> Result<&BitStringGenome> {
    match genome {
        Genome::Bitstring(b) => Ok(b),
        other => Err(Error::InvalidGenome(format!("expected a bit string, got {}", other.kind_name()))),
    }
}

impl Evolution {
    /// Builds and evaluates the initial population (generation 0).
    pub fn new(config: EvolutionConfig, dataset: &Dataset) -> Result<Self> {
        let (train, validation, spec) = prepare(&config, dataset)?;
        let mut evo = Self {
            config,
            train,
            validation,
            spec,
            population: Vec::new(),
            registry: None,
            generation: 0,
            next_id: 0,
            history: Vec::new(),
            last_traces: Vec::new(),
        };
        let (population, registry) = evo.init_population()?;
        evo.next_id = population.len() as u64;
        evo.population = population;
        evo.registry = registry;
        let report = GenerationReport::from_population(0, &evo.population, BTreeMap::new());
        evo.history.push(report);
        Ok(evo)
    }

    /// Continues from a checkpoint. The dataset must be the one the run
    /// started with.
    pub fn resume(checkpoint: Checkpoint, dataset: &Dataset) -> Result<Self> {
        if checkpoint.version != CHECKPOINT_VERSION {
            return Err(Error::Parameter(format!("unsupported checkpoint version {}", checkpoint.version)));
        }
        let (train, validation, spec) = prepare(&checkpoint.config, dataset)?;
        if checkpoint.population.len() != checkpoint.config.population_size {
            return Err(Error::PopulationTooSmall {
                needed: checkpoint.config.population_size,
                actual: checkpoint.population.len(),
            });
        }
        for ind in &checkpoint.population {
            ind.genome.validate()?;
        }
        Ok(Self {
            config: checkpoint.config,
            train,
            validation,
            spec,
            population: checkpoint.population,
            registry: checkpoint.registry,
            generation: checkpoint.generation,
            next_id: checkpoint.next_id,
            history: checkpoint.history,
            last_traces: Vec::new(),
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            generation: self.generation,
            next_id: self.next_id,
            population: self.population.clone(),
            registry: self.registry.clone(),
            history: self.history.clone(),
        }
    }

    pub fn context(&self) -> Context<'_> {
        Context {
            config: &self.config,
            train: self.train.batch(),
            validation: self.validation.batch(),
            spec: self.spec,
            loss: context::loss_for(self.config.fitness.measure),
        }
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn registry(&self) -> Option<&InnovationRegistry> {
        self.registry.as_ref()
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn history(&self) -> &[GenerationReport] {
        &self.history
    }

    /// Hybrid-pipeline traces of the most recent generation, in offspring
    /// order. Empty for the other encodings.
    pub fn last_traces(&self) -> &[EpnetTrace] {
        &self.last_traces
    }

    /// Lowest error; ties go to the earliest position.
    pub fn best(&self) -> &Individual {
        let mut best = &self.population[0];
        for ind in &self.population[1..] {
            if ind.error < best.error {
                best = ind;
            }
        }
        best
    }

    fn init_population(&self) -> Result<(Vec<Individual>, Option<InnovationRegistry>)> {
        let ctx = self.context();
        let cfg = &self.config;
        let (m, n) = (self.train.inputs[0].len(), self.train.targets[0].len());
        let population = (0..cfg.population_size)
            .into_par_iter()
            .map(|i| -> Result<Individual> {
                let mut rng = stream(cfg.seed, "init", &[i as u64]);
                let (genome, error, success) = match cfg.encoding {
                    Encoding::Genelist => {
                        let genome: Genome = GeneListGenome::minimal(m, n, &mut rng).into();
                        let error = ctx.evaluate(&genome)?;
                        (genome, error, None)
                    }
                    Encoding::Bitstring => {
                        let genome: Genome = random_bitstring(&cfg.init, m, n, &mut rng)?.into();
                        let error = ctx.evaluate(&genome)?;
                        (genome, error, None)
                    }
                    Encoding::Matrix => {
                        let init = &cfg.init;
                        let ranges = MatrixRanges {
                            inputs: m,
                            outputs: n,
                            max_hidden: init.max_hidden,
                            hidden: init.hidden,
                            connections: init.connections,
                            weights: init.weights,
                        };
                        let genome: Genome = MatrixGenome::random(&ranges, &mut rng)?.into();
                        let before = ctx.evaluate(&genome)?;
                        let (trained, after) = ctx.train(&genome)?;
                        (trained, after, Some(mark(before, after)?))
                    }
                };
                Ok(Individual { id: i as u64, genome, error, success, lineage: vec![] })
            })
            .collect::<Result<Vec<_>>>()?;
        let registry = (cfg.encoding == Encoding::Genelist).then(|| {
            let mut r = InnovationRegistry::for_minimal(m, n);
            r.dedupe = cfg.operators.dedupe_innovations;
            r
        });
        Ok((population, registry))
    }

    /// Why the run should stop now, if it should.
    pub fn stop_reason(&self) -> Option<StopReason> {
        let stop = &self.config.stop;
        let last = self.history.last()?;
        if stop.target_error.is_some_and(|t| last.best < t) {
            return Some(StopReason::TargetReached);
        }
        if self.generation >= self.config.max_generations {
            return Some(StopReason::MaxGenerations);
        }
        let w = stop.stagnation_window;
        if self.history.len() > w {
            let earlier = self.history[self.history.len() - 1 - w].best;
            if earlier - last.best <= stop.min_improvement {
                return Some(StopReason::Stagnation);
            }
        }
        None
    }

    /// Runs one generation: select, reproduce, train, replace.
    pub fn step(&mut self) -> Result<&GenerationReport> {
        let g = self.generation as u64 + 1;
        let errors: Vec<f64> = self.population.iter().map(|i| i.error).collect();
        let ranked = RankedPopulation::new(&errors)?;
        let k = self.config.offspring();
        let mut select = stream(self.config.seed, "select", &[g]);
        let mut counts = BTreeMap::new();
        let mut traces = Vec::new();
        let offspring = match self.config.encoding {
            Encoding::Matrix => {
                let parents = pick_parents(self.config.selection, &ranked, k, &mut select)?;
                let ctx = self.context();
                let results = parents
                    .par_iter()
                    .enumerate()
                    .map(|(j, &p)| {
                        let mut rng = stream(self.config.seed, "offspring", &[g, j as u64]);
                        epnet_step(&self.population[p], self.next_id + j as u64, &ctx, &mut rng)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Vec::with_capacity(k);
                for (ind, trace) in results {
                    match trace.path {
                        EpnetPath::Train => bump(&mut counts, "train", 1),
                        EpnetPath::Anneal => bump(&mut counts, "anneal", 1),
                        EpnetPath::Structural => bump(&mut counts, "anneal", 1),
                    }
                    for a in &trace.attempts {
                        bump(&mut counts, a.op.name(), 1);
                    }
                    traces.push(trace);
                    out.push(ind);
                }
                out
            }
            Encoding::Genelist => {
                let pairs = pick_pairs(self.config.selection, &ranked, k, &mut select)?;
                let varied = self.vary_genelists(&pairs, g, &mut counts)?;
                let ctx = self.context();
                let train = self.config.trainer.epochs > 0;
                bump(&mut counts, "train", if train { k as u64 } else { 0 });
                varied
                    .into_par_iter()
                    .map(|(mut ind, parent_error)| {
                        let error = if train {
                            let (genome, e) = ctx.train(&ind.genome)?;
                            ind.genome = genome;
                            e
                        } else {
                            ctx.evaluate(&ind.genome)?
                        };
                        ind.error = error;
                        ind.success = Some(mark(parent_error, error)?);
                        Ok(ind)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Encoding::Bitstring => {
                let pairs = pick_pairs(self.config.selection, &ranked, k.div_ceil(2), &mut select)?;
                let ctx = self.context();
                let cfg = &self.config;
                let children = pairs
                    .par_iter()
                    .enumerate()
                    .map(|(p, &(a, b))| -> Result<Vec<Genome>> {
                        let mut rng = stream(cfg.seed, "offspring", &[g, p as u64]);
                        let pa = bitstring_of(&self.population[a].genome)?;
                        let pb = bitstring_of(&self.population[b].genome)?;
                        let (fa, fb) = (pa.to_fixed(), pb.to_fixed());
                        let points = cfg.operators.crossover_points.min(fa.len() - 1);
                        let (c1, c2) = npoint_crossover(&fa, &fb, points, &mut rng)?;
                        [c1, c2]
                            .iter()
                            .map(|c| {
                                let child = pa.from_fixed(c)?;
                                Ok(mutate_bitstring(&child, &cfg.operators.bit_rates, &mut rng)?.into())
                            })
                            .collect()
                    })
                    .collect::<Result<Vec<_>>>()?;
                bump(&mut counts, "crossover", pairs.len() as u64);
                bump(&mut counts, "bit_mutation", k as u64);
                let genomes: Vec<(Genome, Vec<u64>)> = children
                    .into_iter()
                    .zip(&pairs)
                    .flat_map(|(kids, &(a, b))| {
                        let lineage = vec![self.population[a].id, self.population[b].id];
                        kids.into_iter().map(move |kid| (kid, lineage.clone()))
                    })
                    .take(k)
                    .collect();
                let next_id = self.next_id;
                genomes
                    .into_par_iter()
                    .enumerate()
                    .map(|(j, (genome, lineage))| {
                        let error = ctx.evaluate(&genome)?;
                        Ok(Individual { id: next_id + j as u64, genome, error, success: None, lineage })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        for ind in &offspring {
            debug_assert!(ind.genome.validate().is_ok());
        }
        self.next_id += k as u64;
        let admitted = replace(&mut self.population, offspring);
        bump(&mut counts, "admitted", admitted as u64);
        self.generation += 1;
        self.last_traces = traces;
        let report = GenerationReport::from_population(self.generation, &self.population, counts);
        log::info!(
            "generation {} best {:.6} mean {:.6} worst {:.6}",
            report.generation,
            report.best,
            report.mean,
            report.worst
        );
        self.history.push(report);
        Ok(self.history.last().expect("just pushed"))
    }

    /// Serial variation of gene lists; the registry is touched in offspring
    /// order. Returns each child with the error of the parent it is judged
    /// against.
    fn vary_genelists(
        &mut self,
        pairs: &[(usize, usize)],
        g: u64,
        counts: &mut BTreeMap<String, u64>,
    ) -> Result<Vec<(Individual, f64)>> {
        let cfg = &self.config;
        let ops = &cfg.operators;
        let registry = self
            .registry
            .as_mut()
            .ok_or_else(|| Error::InvalidGenome("gene-list run without an innovation registry".into()))?;
        let mut out = Vec::with_capacity(pairs.len());
        for (j, &(a, b)) in pairs.iter().enumerate() {
            let mut rng = stream(cfg.seed, "offspring", &[g, j as u64]);
            let (pa, pb) = (&self.population[a], &self.population[b]);
            let ga = genelist_of(&pa.genome)?;
            let (mut child, parent_error, lineage) = if a != b && rng.random_bool(ops.crossover_rate) {
                bump(counts, "crossover", 1);
                let gb = genelist_of(&pb.genome)?;
                let c = crossover_genelist(ga, pa.error, gb, pb.error, &mut rng);
                (c, pa.error.min(pb.error), vec![pa.id, pb.id])
            } else {
                (ga.clone(), pa.error, vec![pa.id])
            };
            let t = temperature(fitness_of_error(parent_error), 1.0)?;
            let t_inst = instantaneous_temperature(t, &mut rng);
            if let Genome::Genelist(p) = perturb_weights(&Genome::Genelist(child.clone()), ops.alpha, t_inst, &mut rng)? {
                child = p;
            }
            bump(counts, "perturb", 1);
            let adds = structural_mutation_count(ops.add_connection.0, ops.add_connection.1, t_inst, &mut rng);
            for _ in 0..adds {
                match neat_add_connection(&child, registry, &mut rng, ops.neat_weight_interval) {
                    Ok(c) => {
                        child = c;
                        bump(counts, "add_connection", 1);
                    }
                    Err(Error::ExhaustedSlots) => break,
                    Err(e) => return Err(e),
                }
            }
            let splits = structural_mutation_count(ops.split_connection.0, ops.split_connection.1, t_inst, &mut rng);
            for _ in 0..splits {
                let enabled: Vec<usize> =
                    (0..child.connections.len()).filter(|&i| child.connections[i].enabled).collect();
                if enabled.is_empty() {
                    break;
                }
                let idx = enabled[rng.random_range(0..enabled.len())];
                child = neat_split_connection(&child, registry, idx)?;
                bump(counts, "split_connection", 1);
            }
            let ind = Individual {
                id: self.next_id + j as u64,
                genome: child.into(),
                error: f64::NAN,
                success: None,
                lineage,
            };
            out.push((ind, parent_error));
        }
        Ok(out)
    }

    /// Steps until a stop condition holds.
    pub fn run(&mut self) -> Result<StopReason> {
        loop {
            if let Some(reason) = self.stop_reason() {
                return Ok(reason);
            }
            self.step()?;
        }
    }

    pub fn into_outcome(self, reason: StopReason) -> EvolutionOutcome {
        let best = self.best().clone();
        EvolutionOutcome { best, history: self.history, reason }
    }
}

/// Runs a whole evolution from `config.seed`.
pub fn evolve(config: &EvolutionConfig, dataset: &Dataset) -> Result<EvolutionOutcome> {
    let mut evo = Evolution::new(config.clone(), dataset)?;
    let reason = evo.run()?;
    Ok(evo.into_outcome(reason))
}
