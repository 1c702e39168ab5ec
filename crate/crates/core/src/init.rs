//! Initial population: distinct proper colorings from a TABUCOL-style
//! k-coloring tabu search.

use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InitError {
    #[error("k = {k} outside 1..={n}")]
    ColorCountOutOfRange { k: usize, n: usize },
    #[error("population size {0} is below 2")]
    PopulationTooSmall(usize),
    #[error("found only {found} distinct colorings out of {wanted} after {attempts} attempts")]
    NotEnoughDistinct {
        found: usize,
        wanted: usize,
        attempts: usize,
    },
}

/// Knobs of the k-coloring tabu search.
#[derive(Clone, Debug, PartialEq)]
pub struct TabucolParams {
    /// Iterations per attempt at a fixed k.
    pub iteration_budget_per_k: u64,
    /// Tenure gets a uniform draw from `0..tenure_base` on top of the
    /// conflict-proportional part.
    pub tenure_base: u64,
    pub tenure_slope: f64,
    pub restarts_per_k: u32,
}

impl Default for TabucolParams {
    fn default() -> Self {
        Self {
            iteration_budget_per_k: 100_000,
            tenure_base: 10,
            tenure_slope: 0.6,
            restarts_per_k: 3,
        }
    }
}

impl TabucolParams {
    pub fn is_valid(&self) -> bool {
        self.iteration_budget_per_k > 0
            && self.tenure_base > 0
            && self.tenure_slope > 0.0
            && self.restarts_per_k > 0
    }
}

/// Largest-degree-first greedy coloring. Ties keep vertex order.
pub fn greedy_coloring(g: &Graph) -> Coloring {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut class_of = vec![usize::MAX; g.n()];
    let mut used = Vec::new();
    for &v in &order {
        used.clear();
        used.extend(
            g.neighbors(v)
                .iter()
                .map(|&u| class_of[u])
                .filter(|&c| c != usize::MAX),
        );
        used.sort_unstable();
        used.dedup();
        let color = used
            .iter()
            .enumerate()
            .find(|&(i, &c)| i != c)
            .map_or(used.len(), |(i, _)| i);
        class_of[v] = color;
    }
    Coloring::from_class_indices(class_of)
}

/// Searches for a proper `k`-coloring, making up to
/// `params.restarts_per_k` attempts from random assignments.
///
/// The returned coloring has exactly `k` allocated classes, some possibly
/// empty; it is not canonicalized.
pub fn tabucol<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    params: &TabucolParams,
    rng: &mut R,
) -> Result<Option<Coloring>, InitError> {
    if k == 0 || k > g.n() {
        return Err(InitError::ColorCountOutOfRange { k, n: g.n() });
    }
    for _ in 0..params.restarts_per_k {
        if let Some(c) = tabucol_attempt(g, k, params, rng) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn tabucol_attempt<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    params: &TabucolParams,
    rng: &mut R,
) -> Option<Coloring> {
    let n = g.n();
    let mut class_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    // adjacent[v * k + c]: neighbors of v in class c.
    let mut adjacent = vec![0u32; n * k];
    for (u, v) in g.edges() {
        adjacent[u * k + class_of[v]] += 1;
        adjacent[v * k + class_of[u]] += 1;
    }
    let mut conflicts: i64 = g
        .edges()
        .filter(|&(u, v)| class_of[u] == class_of[v])
        .count() as i64;
    let mut best_conflicts = conflicts;
    let mut tabu_until = vec![0u64; n * k];

    let mut conflicting = ConflictSet::new(n);
    for v in 0..n {
        if adjacent[v * k + class_of[v]] > 0 {
            conflicting.insert(v);
        }
    }

    let mut iter = 0u64;
    while conflicts > 0 && iter < params.iteration_budget_per_k {
        iter += 1;
        let mut best_delta = i64::MAX;
        let mut chosen = None;
        let mut ties = 0u32;
        for &v in conflicting.items() {
            let cur = class_of[v];
            let here = adjacent[v * k + cur] as i64;
            for c in (0..k).filter(|&c| c != cur) {
                let delta = adjacent[v * k + c] as i64 - here;
                if delta > best_delta {
                    continue;
                }
                let tabu = tabu_until[v * k + c] >= iter;
                if tabu && conflicts + delta >= best_conflicts {
                    continue;
                }
                if delta < best_delta {
                    best_delta = delta;
                    chosen = Some((v, c));
                    ties = 1;
                } else {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        chosen = Some((v, c));
                    }
                }
            }
        }
        let Some((v, to)) = chosen else {
            continue;
        };
        let from = class_of[v];
        class_of[v] = to;
        conflicts += best_delta;
        for &u in g.neighbors(v) {
            adjacent[u * k + from] -= 1;
            adjacent[u * k + to] += 1;
            let cu = class_of[u];
            if cu == from && adjacent[u * k + from] == 0 {
                conflicting.remove(u);
            } else if cu == to && adjacent[u * k + to] == 1 {
                conflicting.insert(u);
            }
        }
        if adjacent[v * k + to] > 0 {
            conflicting.insert(v);
        } else {
            conflicting.remove(v);
        }
        let tenure =
            (params.tenure_slope * conflicts as f64) as u64 + rng.gen_range(0..params.tenure_base);
        tabu_until[v * k + from] = iter + tenure;
        best_conflicts = best_conflicts.min(conflicts);
    }

    (conflicts == 0).then(|| Coloring::with_class_count(class_of, k))
}

struct ConflictSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl ConflictSet {
    fn new(n: usize) -> Self {
        Self {
            items: Vec::new(),
            pos: vec![usize::MAX; n],
        }
    }

    fn items(&self) -> &[usize] {
        &self.items
    }

    fn insert(&mut self, v: usize) {
        if self.pos[v] == usize::MAX {
            self.pos[v] = self.items.len();
            self.items.push(v);
        }
    }

    fn remove(&mut self, v: usize) {
        let p = self.pos[v];
        if p == usize::MAX {
            return;
        }
        self.items.swap_remove(p);
        if let Some(&moved) = self.items.get(p) {
            self.pos[moved] = p;
        }
        self.pos[v] = usize::MAX;
    }
}

/// Smallest k reached by descending from the greedy bound, with the best
/// coloring found (canonicalized).
pub fn descend<R: Rng + ?Sized>(g: &Graph, params: &TabucolParams, rng: &mut R) -> Coloring {
    let mut best = greedy_coloring(g).canonical_relabel();
    while best.k() > 1 {
        match tabucol(g, best.k() - 1, params, rng) {
            Ok(Some(c)) => best = c.canonical_relabel(),
            _ => break,
        }
    }
    best
}

/// Builds `p` proper colorings with pairwise distinct partitions.
///
/// Colorings are collected at the smallest k the descent reaches; each run
/// of `stall_limit` attempts without a new member raises k by one.
pub fn generate_population<R: Rng + ?Sized>(
    g: &Graph,
    p: usize,
    params: &TabucolParams,
    rng: &mut R,
) -> Result<Vec<Coloring>, InitError> {
    if p < 2 {
        return Err(InitError::PopulationTooSmall(p));
    }
    let first = descend(g, params, rng);
    let mut k = first.k().max(1);
    let mut seen = HashSet::new();
    seen.insert(first.partition_key());
    let mut members = vec![first];

    let stall_limit = 2 * p;
    let max_attempts = 20 * p + 100;
    let mut attempts = 0;
    let mut stalled = 0;
    while members.len() < p {
        if attempts == max_attempts {
            return Err(InitError::NotEnoughDistinct {
                found: members.len(),
                wanted: p,
                attempts,
            });
        }
        attempts += 1;
        let found = tabucol(g, k, params, rng)?.map(|c| c.canonical_relabel());
        match found {
            Some(c) if seen.insert(c.partition_key()) => {
                members.push(c);
                stalled = 0;
            }
            _ => {
                stalled += 1;
                if stalled >= stall_limit && k < g.n() {
                    k += 1;
                    stalled = 0;
                }
            }
        }
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    #[test]
    fn edgeless_graph_one_color() {
        let g = Graph::from_edges(5, []);
        let mut rng = rng_from_seed(1);
        let c = tabucol(&g, 1, &TabucolParams::default(), &mut rng)
            .unwrap()
            .unwrap();
        assert!(c.class_indices().iter().all(|&x| x == 0));
    }

    #[test]
    fn triangle_three_colors() {
        let g = complete(3);
        let mut rng = rng_from_seed(2);
        let c = tabucol(&g, 3, &TabucolParams::default(), &mut rng)
            .unwrap()
            .unwrap();
        assert!(c.is_proper(&g));
        assert_eq!(c.used_colors(), 3);
    }

    #[test]
    fn triangle_two_colors_fails() {
        let g = complete(3);
        let params = TabucolParams {
            iteration_budget_per_k: 500,
            restarts_per_k: 1,
            ..TabucolParams::default()
        };
        let mut rng = rng_from_seed(3);
        assert_eq!(tabucol(&g, 2, &params, &mut rng), Ok(None));
    }

    #[test]
    fn k_out_of_range() {
        let g = complete(3);
        let mut rng = rng_from_seed(4);
        let params = TabucolParams::default();
        assert!(tabucol(&g, 0, &params, &mut rng).is_err());
        assert!(tabucol(&g, 4, &params, &mut rng).is_err());
    }

    #[test]
    fn greedy_is_proper() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]);
        assert!(greedy_coloring(&g).is_proper(&g));
    }

    #[test]
    fn k2_population_of_two_is_impossible() {
        let g = complete(2);
        let mut rng = rng_from_seed(5);
        let err = generate_population(&g, 2, &TabucolParams::default(), &mut rng).unwrap_err();
        assert!(matches!(
            err,
            InitError::NotEnoughDistinct {
                found: 1,
                wanted: 2,
                ..
            }
        ));
    }

    #[test]
    fn population_size_below_two_rejected() {
        let g = complete(2);
        let mut rng = rng_from_seed(6);
        assert_eq!(
            generate_population(&g, 1, &TabucolParams::default(), &mut rng),
            Err(InitError::PopulationTooSmall(1))
        );
    }
}
