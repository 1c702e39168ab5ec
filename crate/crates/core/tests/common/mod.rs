#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sumcol_core::{Coloring, Graph};

pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Proper coloring built by visiting vertices in random order and putting
/// each into a random feasible class, opening a new class when needed or
/// with small probability.
pub fn random_proper_coloring<R: Rng>(g: &Graph, rng: &mut R) -> Coloring {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut class_of = vec![usize::MAX; n];
    let mut k = 0;
    for &v in &order {
        let feasible: Vec<usize> = (0..k)
            .filter(|&l| g.neighbors(v).iter().all(|&u| class_of[u] != l))
            .collect();
        class_of[v] = if feasible.is_empty() || rng.gen_bool(0.15) {
            k += 1;
            k - 1
        } else {
            *feasible.choose(rng).unwrap()
        };
    }
    Coloring::from_class_indices(class_of)
}

/// Components of the subgraph induced by `subset`, by union-find over the
/// induced edges. Each component sorted, list sorted.
pub fn union_find_components(g: &Graph, subset: &[usize]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    let inside: Vec<bool> = (0..n).map(|v| subset.contains(&v)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if inside[u] && inside[v] && g.has_edge(u, v) {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &v in subset {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups
        .into_values()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    out.sort();
    out
}

/// Proper check straight from the edge list.
pub fn proper(g: &Graph, class_of: &[usize]) -> bool {
    (0..g.n()).all(|u| (u + 1..g.n()).all(|v| !g.has_edge(u, v) || class_of[u] != class_of[v]))
}

/// Sum of 1-based colors of a class assignment.
pub fn sum_of(class_of: &[usize]) -> u64 {
    class_of.iter().map(|&l| l as u64 + 1).sum()
}
