//! Wrapper genetic algorithm for feature-subset selection.
//!
//! Chromosomes are binary feature-inclusion masks; fitness is the mean
//! k-fold accuracy of a wrapper classifier trained on the masked columns.
//! Selection is by tournament, with single-point crossover, independent
//! bit-flip mutation, and elitism.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classifiers::{train, ClassifierSpec, TrainError};
use crate::dataset::{k_fold, standardize, DatasetError, FeatureMatrix, Split};

#[derive(Debug, Error)]
pub enum GaError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// A binary feature-inclusion mask with its cached wrapper accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub mask: Vec<bool>,
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(mask: Vec<bool>) -> Self {
        Chromosome { mask, fitness: None }
    }

    pub fn bits_set(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Hex encoding of the mask; feature 0 is the most significant bit of
    /// the first digit.
    pub fn mask_hex(&self) -> String {
        let mut out = String::new();
        for chunk in self.mask.chunks(4) {
            let mut nibble = 0u8;
            for (i, &bit) in chunk.iter().enumerate() {
                if bit {
                    nibble |= 1 << (3 - i);
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn selected_names(&self, schema: &[String]) -> Vec<String> {
        self.mask
            .iter()
            .zip(schema)
            .filter(|(&bit, _)| bit)
            .map(|(_, name)| name.clone())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; defaults to 1/d when absent.
    pub mutation_rate: Option<f64>,
    pub elitism_count: usize,
    pub wrapper: ClassifierSpec,
    pub folds: usize,
    pub seed: u64,
    /// Optional parsimony pressure: fitness loses penalty * bits/d.
    pub subset_penalty: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 30,
            generations: 10,
            tournament_size: 2,
            crossover_rate: 0.9,
            mutation_rate: None,
            elitism_count: 2,
            wrapper: ClassifierSpec::from_short_name("cart").unwrap(),
            folds: 3,
            seed: 42,
            subset_penalty: 0.0,
        }
    }
}

impl GaConfig {
    fn validate(&self) {
        assert!(self.population_size >= 2, "population_size must be >= 2");
        assert!(self.generations >= 1, "generations must be >= 1");
        assert!(
            self.elitism_count < self.population_size,
            "elitism_count must be below population_size"
        );
        assert!(self.tournament_size >= 1, "tournament_size must be >= 1");
        assert!((0.0..=1.0).contains(&self.crossover_rate));
        if let Some(r) = self.mutation_rate {
            assert!((0.0..=1.0).contains(&r));
        }
        assert!(self.folds >= 2, "folds must be >= 2");
    }
}

/// Random initial population; all-zero masks are re-drawn.
pub fn init_population(d: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<Chromosome> {
    assert!(d >= 1);
    (0..size)
        .map(|_| loop {
            let mask: Vec<bool> = (0..d).map(|_| rng.gen_bool(0.5)).collect();
            if mask.iter().any(|&b| b) {
                break Chromosome::new(mask);
            }
        })
        .collect()
}

/// Mean k-fold accuracy of the wrapper trained on the masked columns.
/// Standardization is fit on each fold's training rows only.
pub fn fitness(
    chromosome: &Chromosome,
    m: &FeatureMatrix,
    folds: &[Split],
    config: &GaConfig,
) -> Result<f64, GaError> {
    assert!(chromosome.bits_set() >= 1, "mask must select a feature");
    let masked = m.select_columns(&chromosome.mask);
    let mut total = 0.0;
    for fold in folds {
        let train_m = masked.select_rows(&fold.train);
        let (std_train, rec) = standardize(&train_m)?;
        let model = train(&config.wrapper, &std_train, config.seed)?;
        let test_rows: Vec<Vec<f64>> = fold
            .test
            .iter()
            .map(|&i| rec.transform_row(&masked.rows[i]))
            .collect();
        let predicted = model.predict(&test_rows).expect("dims match by construction");
        let correct = fold
            .test
            .iter()
            .zip(&predicted)
            .filter(|(&i, &p)| masked.labels[i] == p)
            .count();
        total += correct as f64 / fold.test.len() as f64;
    }
    let accuracy = total / folds.len() as f64;
    let penalty = config.subset_penalty * chromosome.bits_set() as f64 / m.d() as f64;
    Ok(accuracy - penalty)
}

/// Best of `k` uniform draws with replacement; ties keep the first drawn.
pub fn tournament_select<'a>(
    population: &'a [Chromosome],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> &'a Chromosome {
    assert!(!population.is_empty());
    let mut best = &population[rng.gen_range(0..population.len())];
    for _ in 1..k {
        let candidate = &population[rng.gen_range(0..population.len())];
        if candidate.fitness.unwrap() > best.fitness.unwrap() {
            best = candidate;
        }
    }
    best
}

pub(crate) fn crossover_at(a: &[bool], b: &[bool], cut: usize) -> (Vec<bool>, Vec<bool>) {
    let mut c1 = a[..cut].to_vec();
    c1.extend_from_slice(&b[cut..]);
    let mut c2 = b[..cut].to_vec();
    c2.extend_from_slice(&a[cut..]);
    (c1, c2)
}

/// Single-point crossover with probability `rate`, clones otherwise.
pub fn crossover(
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut ChaCha8Rng,
    rate: f64,
) -> (Chromosome, Chromosome) {
    assert_eq!(a.mask.len(), b.mask.len(), "mask lengths must match");
    let d = a.mask.len();
    if d >= 2 && rng.gen_bool(rate) {
        let cut = rng.gen_range(1..d);
        let (c1, c2) = crossover_at(&a.mask, &b.mask, cut);
        (Chromosome::new(c1), Chromosome::new(c2))
    } else {
        (Chromosome::new(a.mask.clone()), Chromosome::new(b.mask.clone()))
    }
}

/// Independent per-bit flips; an all-zero result is repaired by setting
/// one uniformly random bit.
pub fn mutate(c: &Chromosome, rng: &mut ChaCha8Rng, rate: f64) -> Chromosome {
    let mut mask: Vec<bool> = c
        .mask
        .iter()
        .map(|&bit| if rng.gen_bool(rate) { !bit } else { bit })
        .collect();
    if !mask.iter().any(|&b| b) {
        let bit = rng.gen_range(0..mask.len());
        mask[bit] = true;
    }
    Chromosome::new(mask)
}

/// One generation's fitness summary.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_mask_hex: String,
}

#[derive(Debug)]
pub struct GaResult {
    /// Highest-fitness chromosome ever evaluated.
    pub best: Chromosome,
    pub trace: Vec<GenerationStats>,
}

/// Runs the evaluate -> elitism -> tournament/crossover/mutate loop.
pub fn run_ga(m: &FeatureMatrix, config: &GaConfig) -> Result<GaResult, GaError> {
    config.validate();
    let d = m.d();
    assert!(d >= 1, "matrix has no features");
    let mutation_rate = config.mutation_rate.unwrap_or(1.0 / d as f64);
    let folds = k_fold(m, config.folds, config.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = init_population(d, config.population_size, &mut rng);
    let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut best_ever: Option<Chromosome> = None;
    let mut trace = Vec::with_capacity(config.generations);

    for generation in 0..config.generations {
        for c in &mut population {
            if c.fitness.is_none() {
                let f = match cache.get(&c.mask) {
                    Some(&f) => f,
                    None => {
                        let f = fitness(c, m, &folds, config)?;
                        cache.insert(c.mask.clone(), f);
                        f
                    }
                };
                c.fitness = Some(f);
            }
        }

        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| {
            population[b]
                .fitness
                .unwrap()
                .partial_cmp(&population[a].fitness.unwrap())
                .unwrap()
                .then(a.cmp(&b))
        });
        let gen_best = &population[order[0]];
        let mean = population.iter().map(|c| c.fitness.unwrap()).sum::<f64>()
            / population.len() as f64;
        trace.push(GenerationStats {
            generation,
            best_fitness: gen_best.fitness.unwrap(),
            mean_fitness: mean,
            best_mask_hex: gen_best.mask_hex(),
        });
        if best_ever
            .as_ref()
            .map_or(true, |b| gen_best.fitness > b.fitness)
        {
            best_ever = Some(gen_best.clone());
        }

        if generation + 1 == config.generations {
            break;
        }
        let mut next: Vec<Chromosome> = order[..config.elitism_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < config.population_size {
            let p1 = tournament_select(&population, config.tournament_size, &mut rng).clone();
            let p2 = tournament_select(&population, config.tournament_size, &mut rng).clone();
            let (c1, c2) = crossover(&p1, &p2, &mut rng, config.crossover_rate);
            next.push(mutate(&c1, &mut rng, mutation_rate));
            if next.len() < config.population_size {
                next.push(mutate(&c2, &mut rng, mutation_rate));
            }
        }
        population = next;
    }

    Ok(GaResult {
        best: best_ever.unwrap(),
        trace,
    })
}

/// CSV rendering of the per-generation trace.
pub fn trace_to_csv(trace: &[GenerationStats], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("generation,best_fitness,mean_fitness,best_mask_hex\n");
    for s in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.generation, s.best_fitness, s.mean_fitness, s.best_mask_hex
        ));
    }
    out
}
