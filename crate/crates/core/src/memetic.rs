//! The memetic driver: parent selection, multi-parent greedy partition
//! crossover, offspring improvement, and the quality/diversity
//! replacement rule.

use std::ops::ControlFlow;

use rand::Rng;
use thiserror::Error;

use crate::coloring::Coloring;
use crate::dnts::{dnts, DntsParams, DntsParamsError};
use crate::graph::Graph;
use crate::init::{generate_population, InitError, TabucolParams};

#[derive(Debug, Error, PartialEq)]
pub enum MascError {
    #[error(transparent)]
    Search(#[from] DntsParamsError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("population initialization failed: {0}")]
    Init(#[from] InitError),
    #[error("cannot select {alpha} parents from a population of {size}")]
    TooManyParents { alpha: usize, size: usize },
    #[error("warm start does not fit the graph: {0}")]
    WarmStart(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MascParams {
    pub population_size: usize,
    pub max_generations: usize,
    pub dnts: DntsParams,
    pub tabucol: TabucolParams,
    /// Chance that an offspring scoring worst still enters, evicting the
    /// second-worst member.
    pub replace_second_worst_probability: f64,
}

impl Default for MascParams {
    fn default() -> Self {
        Self {
            population_size: 10,
            max_generations: 50,
            dnts: DntsParams::default(),
            tabucol: TabucolParams::default(),
            replace_second_worst_probability: 0.2,
        }
    }
}

impl MascParams {
    pub fn validate(&self) -> Result<(), MascError> {
        self.dnts.validate()?;
        if self.population_size < 2 {
            return Err(MascError::InvalidParams(format!(
                "population size {} is below 2",
                self.population_size
            )));
        }
        if self.max_generations < 1 {
            return Err(MascError::InvalidParams(
                "max_generations must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.replace_second_worst_probability) {
            return Err(MascError::InvalidParams(format!(
                "replacement probability {} outside [0, 1]",
                self.replace_second_worst_probability
            )));
        }
        if !self.tabucol.is_valid() {
            return Err(MascError::InvalidParams(
                "tabucol parameters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Pairwise-distinct proper colorings plus the best coloring ever seen.
#[derive(Clone, Debug)]
pub struct Population {
    members: Vec<Coloring>,
    best: Coloring,
}

impl Population {
    /// Panics on an empty member list.
    pub fn new(members: Vec<Coloring>) -> Self {
        let best = members
            .iter()
            .min_by_key(|c| c.sum())
            .expect("population is not empty")
            .clone();
        Self { members, best }
    }

    pub fn members(&self) -> &[Coloring] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Coloring {
        &self.best
    }

    pub fn best_sum(&self) -> u64 {
        self.best.sum()
    }

    /// Smallest number of colors used by a current member.
    pub fn min_colors(&self) -> usize {
        self.members
            .iter()
            .map(Coloring::used_colors)
            .min()
            .unwrap_or(0)
    }

    /// Records `c` as the best coloring if it beats the current one.
    pub fn offer_best(&mut self, c: &Coloring) -> bool {
        if c.sum() < self.best.sum() {
            self.best = c.clone();
            true
        } else {
            false
        }
    }

    /// True when some member has the same partition as `c`.
    pub fn contains_partition(&self, c: &Coloring) -> bool {
        let key = c.partition_key();
        self.members.iter().any(|m| m.partition_key() == key)
    }

    /// Every member proper, partitions pairwise distinct.
    pub fn is_consistent(&self, g: &Graph) -> bool {
        let mut keys: Vec<Vec<u32>> = self.members.iter().map(Coloring::partition_key).collect();
        keys.sort();
        keys.dedup();
        keys.len() == self.members.len() && self.members.iter().all(|m| m.is_proper(g))
    }
}

/// Number of parents for a graph of `n` vertices whose best known
/// coloring uses `k` colors.
pub fn choose_alpha(n: usize, k: usize) -> usize {
    let ratio = n as f64 / k.max(1) as f64;
    if ratio < 5.0 {
        2
    } else if ratio <= 15.0 {
        3
    } else {
        4
    }
}

/// `alpha` distinct member indices drawn uniformly without replacement.
pub fn select_parents<R: Rng + ?Sized>(
    pop: &Population,
    alpha: usize,
    rng: &mut R,
) -> Result<Vec<usize>, MascError> {
    if alpha > pop.len() {
        return Err(MascError::TooManyParents {
            alpha,
            size: pop.len(),
        });
    }
    Ok(rand::seq::index::sample(rng, pop.len(), alpha).into_vec())
}

/// One transmission step of the crossover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossoverStep {
    /// Offspring color being built (1-based).
    pub color: usize,
    /// Index into the parent list of the donor.
    pub parent: usize,
    /// Vertices transmitted.
    pub size: usize,
    /// Parents allowed to donate at this step.
    pub allowed: usize,
}

/// Multi-parent greedy partition crossover.
pub fn mgpx<R: Rng + ?Sized>(parents: &[&Coloring], g: &Graph, rng: &mut R) -> Coloring {
    mgpx_traced(parents, g, rng, None)
}

/// [`mgpx`] that also records every transmission step.
///
/// Offspring colors are built one at a time. Each step takes a largest
/// residual class among the parents currently allowed (ties broken
/// uniformly), gives it the next color, and strikes its vertices from all
/// parents. The donor then sits out the next `alpha / 2` colors.
pub fn mgpx_traced<R: Rng + ?Sized>(
    parents: &[&Coloring],
    g: &Graph,
    rng: &mut R,
    mut trace: Option<&mut Vec<CrossoverStep>>,
) -> Coloring {
    let alpha = parents.len();
    assert!(alpha >= 2, "crossover needs at least two parents");
    let n = g.n();
    let mut residual: Vec<Vec<usize>> = parents
        .iter()
        .map(|p| p.classes().iter().map(Vec::len).collect())
        .collect();
    let mut blocked_until = vec![0usize; alpha];
    let mut offspring = vec![usize::MAX; n];
    let mut colored = 0;
    let mut color = 0;

    while colored < n {
        color += 1;
        let mut best_size = 0;
        let mut ties = 0u32;
        let mut pick = None;
        let mut allowed = 0;
        for (j, sizes) in residual.iter().enumerate() {
            if blocked_until[j] >= color {
                continue;
            }
            allowed += 1;
            for (l, &size) in sizes.iter().enumerate() {
                if size == 0 || size < best_size {
                    continue;
                }
                if size > best_size {
                    best_size = size;
                    ties = 1;
                    pick = Some((j, l));
                } else {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        pick = Some((j, l));
                    }
                }
            }
        }
        assert!(allowed > 0, "no parent allowed at color {color}");
        let (donor, class) = pick.expect("an allowed parent covers every uncolored vertex");
        let mut moved = 0;
        for &v in parents[donor].class(class) {
            if offspring[v] != usize::MAX {
                continue;
            }
            offspring[v] = color - 1;
            moved += 1;
            for (q, p) in parents.iter().enumerate() {
                residual[q][p.class_of(v)] -= 1;
            }
        }
        debug_assert_eq!(moved, best_size);
        colored += moved;
        blocked_until[donor] = color + alpha / 2;
        if let Some(t) = trace.as_deref_mut() {
            t.push(CrossoverStep {
                color,
                parent: donor,
                size: moved,
                allowed,
            });
        }
    }

    let child = Coloring::from_class_indices(offspring);
    debug_assert!(child.is_proper(g));
    child.canonical_relabel()
}

/// Score of member `i` in `members` (offspring included): its sum plus
/// `exp(0.08 n / H)`, `H` being its distance to the closest other member.
/// Infinite when it duplicates another member.
pub fn score(i: usize, members: &[Coloring], n: usize) -> f64 {
    let h = members
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, m)| members[i].distance(m))
        .min()
        .expect("at least two members");
    score_from_distance(members[i].sum(), h, n)
}

fn score_from_distance(sum: u64, h: usize, n: usize) -> f64 {
    if h == 0 {
        f64::INFINITY
    } else {
        sum as f64 + (0.08 * n as f64 / h as f64).exp()
    }
}

/// What [`update_population`] did with the offspring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Replacement {
    /// The offspring replaced the worst-scoring member at this index.
    Worst(usize),
    /// The offspring scored worst but replaced the second worst at this index.
    SecondWorst(usize),
    /// The offspring scored worst and was dropped.
    Discarded,
    /// The offspring's partition is already in the population.
    Duplicate,
}

/// Inserts `o` if the quality/diversity score says so; the population
/// keeps its size and distinctness.
pub fn update_population<R: Rng + ?Sized>(
    pop: &mut Population,
    o: Coloring,
    second_worst_probability: f64,
    rng: &mut R,
) -> Replacement {
    if pop.contains_partition(&o) {
        return Replacement::Duplicate;
    }
    let p = pop.len();
    let mut all: Vec<&Coloring> = pop.members.iter().collect();
    all.push(&o);
    let n = o.n();
    let mut nearest = vec![usize::MAX; p + 1];
    for a in 0..=p {
        for b in a + 1..=p {
            let d = all[a].distance(all[b]);
            nearest[a] = nearest[a].min(d);
            nearest[b] = nearest[b].min(d);
        }
    }
    let scores: Vec<f64> = (0..=p)
        .map(|i| score_from_distance(all[i].sum(), nearest[i], n))
        .collect();

    let worst = argmax_random(&scores, rng);
    if worst != p {
        pop.members[worst] = o;
        return Replacement::Worst(worst);
    }
    if rng.gen_bool(second_worst_probability) {
        let second = argmax_random(&scores[..p], rng);
        pop.members[second] = o;
        Replacement::SecondWorst(second)
    } else {
        Replacement::Discarded
    }
}

fn argmax_random<R: Rng + ?Sized>(scores: &[f64], rng: &mut R) -> usize {
    let mut best = 0;
    let mut ties = 0u32;
    for (i, &s) in scores.iter().enumerate() {
        if i == 0 || s > scores[best] {
            best = i;
            ties = 1;
        } else if s == scores[best] {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = i;
            }
        }
    }
    best
}

/// Snapshot handed to an observer after initialization (generation 0) and
/// after every generation.
pub struct GenerationView<'a> {
    pub generation: usize,
    pub population: &'a Population,
    /// Improved offspring of this generation; `None` at generation 0.
    pub offspring: Option<&'a Coloring>,
    pub replacement: Option<Replacement>,
    /// Whether the best sum improved during this generation.
    pub improved: bool,
    /// Search iterations spent so far.
    pub iterations: u64,
}

#[derive(Clone, Debug)]
pub struct MascOutcome {
    pub best: Coloring,
    pub best_sum: u64,
    pub generations: usize,
    pub iterations: u64,
    /// Generation in which the best sum was first reached.
    pub best_generation: usize,
}

/// Runs the memetic algorithm with default observation.
pub fn masc<R: Rng + ?Sized>(
    g: &Graph,
    params: &MascParams,
    rng: &mut R,
) -> Result<MascOutcome, MascError> {
    masc_observed(g, params, None, rng, |_| ControlFlow::Continue(()))
}

/// Runs the memetic algorithm, optionally seeding the population with
/// `warm_start`, and calls `observe` after initialization and after every
/// generation. Returning `Break` from the observer stops the run.
pub fn masc_observed<R, F>(
    g: &Graph,
    params: &MascParams,
    warm_start: Option<&Coloring>,
    rng: &mut R,
    mut observe: F,
) -> Result<MascOutcome, MascError>
where
    R: Rng + ?Sized,
    F: FnMut(&GenerationView<'_>) -> ControlFlow<()>,
{
    params.validate()?;
    let p = params.population_size;
    let mut members = generate_population(g, p, &params.tabucol, rng)?;
    if let Some(warm) = warm_start {
        if warm.n() != g.n() || !warm.is_proper(g) {
            return Err(MascError::WarmStart(
                "coloring is not proper for this graph".into(),
            ));
        }
        let warm = warm.canonical_relabel();
        let slot = members
            .iter()
            .position(|m| m.same_partition(&warm))
            .unwrap_or(p - 1);
        members[slot] = warm;
    }
    let mut pop = Population::new(members);
    let mut best_generation = 0;
    let mut iterations = 0;
    let mut generations = 0;

    let view = GenerationView {
        generation: 0,
        population: &pop,
        offspring: None,
        replacement: None,
        improved: true,
        iterations,
    };
    if observe(&view).is_continue() {
        for generation in 1..=params.max_generations {
            let alpha = choose_alpha(g.n(), pop.min_colors()).min(p);
            let picked = select_parents(&pop, alpha, rng)?;
            let parents: Vec<&Coloring> = picked.iter().map(|&i| &pop.members[i]).collect();
            let child = mgpx(&parents, g, rng);
            let improved = dnts(child, g, &params.dnts, rng);
            iterations += improved.iterations;
            let offspring = improved.best;
            let better = pop.offer_best(&offspring);
            if better {
                best_generation = generation;
            }
            let replacement = update_population(
                &mut pop,
                offspring.clone(),
                params.replace_second_worst_probability,
                rng,
            );
            generations = generation;
            let view = GenerationView {
                generation,
                population: &pop,
                offspring: Some(&offspring),
                replacement: Some(replacement),
                improved: better,
                iterations,
            };
            if observe(&view).is_break() {
                break;
            }
        }
    }

    let best = pop.best().clone();
    Ok(MascOutcome {
        best_sum: best.sum(),
        best,
        generations,
        iterations,
        best_generation,
    })
}
