//! Double-neighborhood tabu search.
//!
//! Two neighborhoods over proper colorings are explored in turn:
//!
//! * **Exchange** (N1): pick two classes `i < j` and a connected component
//!   of at least two vertices in the subgraph they induce, then swap the
//!   component's two sides. This is a Kempe-chain interchange, so the
//!   result stays proper. `delta_f = (j - i) * (a - b)` where `a` and `b`
//!   count the component's vertices in `V_i` and `V_j`.
//! * **OneMove** (N2): move one vertex into another allocated class that
//!   holds none of its neighbors. `delta_f = j - i`.
//!
//! Each neighborhood runs until a fixed number of consecutive iterations
//! fail to improve the incumbent of the call; the search then hands the
//! current coloring to the other neighborhood. When the incumbent has not
//! improved for `p3` iterations the incumbent is perturbed by splitting a
//! third of its largest class into a fresh class.
//!
//! All class indices here are 0-based, so "class `i`" carries color `i + 1`.

use rand::Rng;
use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
#[error(
    "invalid search parameters: need 0 < p1, p2 <= p3 <= p4, got p1={p1} p2={p2} p3={p3} p4={p4}"
)]
pub struct DntsParamsError {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
    pub p4: u64,
}

/// Stop limits of one search call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DntsParams {
    /// Consecutive non-improving iterations that end an Exchange phase.
    pub p1: u64,
    /// Consecutive non-improving iterations that end a OneMove phase.
    pub p2: u64,
    /// Consecutive non-improving iterations, across phases, before the
    /// incumbent is perturbed.
    pub p3: u64,
    /// Iteration budget of one call.
    pub p4: u64,
}

impl Default for DntsParams {
    fn default() -> Self {
        Self {
            p1: 500,
            p2: 1_000,
            p3: 4_000,
            p4: 10_000,
        }
    }
}

impl DntsParams {
    pub fn validate(&self) -> Result<(), DntsParamsError> {
        let ok = self.p1 > 0
            && self.p2 > 0
            && self.p1 <= self.p3
            && self.p2 <= self.p3
            && self.p3 <= self.p4;
        if ok {
            Ok(())
        } else {
            Err(DntsParamsError {
                p1: self.p1,
                p2: self.p2,
                p3: self.p3,
                p4: self.p4,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighborhood {
    Exchange,
    OneMove,
}

/// Which neighborhoods a search call alternates between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NeighborhoodMode {
    #[default]
    Both,
    ExchangeOnly,
    OneMoveOnly,
}

impl NeighborhoodMode {
    fn phases(self) -> &'static [Neighborhood] {
        match self {
            NeighborhoodMode::Both => &[Neighborhood::Exchange, Neighborhood::OneMove],
            NeighborhoodMode::ExchangeOnly => &[Neighborhood::Exchange],
            NeighborhoodMode::OneMoveOnly => &[Neighborhood::OneMove],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveKind {
    /// Swap the sides of `component` between classes `i < j`.
    Exchange {
        component: Vec<usize>,
        i: usize,
        j: usize,
    },
    /// Move `v` from class `from` to class `to`.
    OneMove { v: usize, from: usize, to: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub delta: i64,
}

impl Move {
    /// The move that undoes `self`.
    pub fn inverse(&self) -> Move {
        let kind = match &self.kind {
            MoveKind::Exchange { component, i, j } => MoveKind::Exchange {
                component: component.clone(),
                i: *i,
                j: *j,
            },
            &MoveKind::OneMove { v, from, to } => MoveKind::OneMove {
                v,
                from: to,
                to: from,
            },
        };
        Move {
            kind,
            delta: -self.delta,
        }
    }

    /// True when the move involves class `l`.
    pub fn touches(&self, l: usize) -> bool {
        match self.kind {
            MoveKind::Exchange { i, j, .. } => i == l || j == l,
            MoveKind::OneMove { from, to, .. } => from == l || to == l,
        }
    }
}

/// Tabu bookkeeping of one search call.
///
/// An expiry `e` forbids the corresponding move while the iteration
/// counter is `<= e`; 0 means never set. Iterations start at 1.
#[derive(Clone, Debug, Default)]
pub struct TabuState {
    iteration: u64,
    /// Indexed by the triangular pair index of `(i, j)`, `i < j`.
    pair_expiry: Vec<u64>,
    /// `vertex_expiry[v][l]`: moving `v` into class `l` is tabu.
    vertex_expiry: Vec<Vec<u64>>,
    /// Classes locked out of every move after a perturbation.
    class_expiry: Vec<u64>,
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

impl TabuState {
    pub fn new(n: usize) -> Self {
        Self {
            iteration: 0,
            pair_expiry: Vec::new(),
            vertex_expiry: vec![Vec::new(); n],
            class_expiry: Vec::new(),
        }
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Starts the next iteration.
    pub fn advance(&mut self) {
        self.iteration += 1;
    }

    fn pair_expiry(&self, i: usize, j: usize) -> u64 {
        self.pair_expiry.get(pair_index(i, j)).copied().unwrap_or(0)
    }

    fn vertex_expiry(&self, v: usize, l: usize) -> u64 {
        self.vertex_expiry[v].get(l).copied().unwrap_or(0)
    }

    fn class_expiry(&self, l: usize) -> u64 {
        self.class_expiry.get(l).copied().unwrap_or(0)
    }

    #[inline]
    fn class_locked(&self, l: usize) -> bool {
        self.class_expiry(l) >= self.iteration && self.class_expiry(l) != 0
    }

    #[inline]
    fn exchange_tabu(&self, i: usize, j: usize) -> bool {
        let e = self.pair_expiry(i, j);
        (e != 0 && e >= self.iteration) || self.class_locked(i) || self.class_locked(j)
    }

    #[inline]
    fn one_move_tabu(&self, v: usize, from: usize, to: usize) -> bool {
        let e = self.vertex_expiry(v, to);
        (e != 0 && e >= self.iteration) || self.class_locked(from) || self.class_locked(to)
    }

    pub fn is_tabu(&self, m: &Move) -> bool {
        match m.kind {
            MoveKind::Exchange { i, j, .. } => self.exchange_tabu(i, j),
            MoveKind::OneMove { v, from, to } => self.one_move_tabu(v, from, to),
        }
    }

    /// Forbids `Exchange(i, j)` for the next `tenure` iterations.
    pub fn forbid_pair(&mut self, i: usize, j: usize, tenure: u64) {
        let idx = pair_index(i.min(j), i.max(j));
        if self.pair_expiry.len() <= idx {
            self.pair_expiry.resize(idx + 1, 0);
        }
        self.pair_expiry[idx] = self.iteration + tenure;
    }

    /// Forbids moving `v` into class `l` for the next `tenure` iterations.
    pub fn forbid_vertex(&mut self, v: usize, l: usize, tenure: u64) {
        let row = &mut self.vertex_expiry[v];
        if row.len() <= l {
            row.resize(l + 1, 0);
        }
        row[l] = self.iteration + tenure;
    }

    /// Keeps class `l` out of every move for the next `tenure` iterations.
    pub fn lock_class(&mut self, l: usize, tenure: u64) {
        if self.class_expiry.len() <= l {
            self.class_expiry.resize(l + 1, 0);
        }
        self.class_expiry[l] = self.iteration + tenure;
    }
}

/// All Exchange moves of `c`, one per component of size >= 2 of each class
/// pair. Components come from [`Graph::connected_components`].
pub fn enumerate_n1(c: &Coloring, g: &Graph) -> Vec<Move> {
    let mut moves = Vec::new();
    let mut subset = Vec::new();
    for j in 0..c.k() {
        for i in 0..j {
            subset.clear();
            subset.extend_from_slice(c.class(i));
            subset.extend_from_slice(c.class(j));
            for comp in g.connected_components(&subset) {
                if comp.len() < 2 {
                    continue;
                }
                let a = comp.iter().filter(|&&v| c.class_of(v) == i).count() as i64;
                let b = comp.len() as i64 - a;
                moves.push(Move {
                    delta: (j - i) as i64 * (a - b),
                    kind: MoveKind::Exchange {
                        component: comp,
                        i,
                        j,
                    },
                });
            }
        }
    }
    moves
}

/// All OneMove moves of `c` into allocated classes free of the vertex's
/// neighbors.
pub fn enumerate_n2(c: &Coloring, g: &Graph) -> Vec<Move> {
    let mut moves = Vec::new();
    for v in 0..c.n() {
        let from = c.class_of(v);
        for to in (0..c.k()).filter(|&l| l != from) {
            if c.class(to).iter().all(|&u| !g.has_edge(u, v)) {
                moves.push(Move {
                    delta: to as i64 - from as i64,
                    kind: MoveKind::OneMove { v, from, to },
                });
            }
        }
    }
    moves
}

/// Index of a best allowed move: non-tabu, or tabu but reaching a sum below
/// `f_best`. Ties are broken uniformly at random. `None` when every move is
/// tabu without aspiration.
pub fn select_move<R: Rng + ?Sized>(
    moves: &[Move],
    tabu: &TabuState,
    f_best: u64,
    f_current: u64,
    rng: &mut R,
) -> Option<usize> {
    let mut picker = TiePicker::new();
    for (idx, m) in moves.iter().enumerate() {
        if m.delta > picker.best_delta {
            continue;
        }
        let aspirates = (f_current as i64 + m.delta) < f_best as i64;
        if aspirates || !tabu.is_tabu(m) {
            picker.offer(m.delta, idx, rng);
        }
    }
    picker.chosen
}

/// Applies `m` and records its tabu tenure, drawn uniformly from
/// `0..k` with `k` the allocated class count.
pub fn apply_move<R: Rng + ?Sized>(c: &mut Coloring, m: &Move, tabu: &mut TabuState, rng: &mut R) {
    let tenure = rng.gen_range(0..c.k() as u64);
    match &m.kind {
        MoveKind::Exchange { component, i, j } => {
            for &v in component {
                let to = if c.class_of(v) == *i { *j } else { *i };
                c.move_vertex(v, to);
            }
            tabu.forbid_pair(*i, *j, tenure);
        }
        &MoveKind::OneMove { v, from, to } => {
            c.move_vertex(v, to);
            tabu.forbid_vertex(v, from, tenure);
        }
    }
}

/// Copy of `c_star` with a third of its largest class moved to a new
/// class. Both classes are then locked for a tenure drawn from `0..k`,
/// `k` counting the new class.
pub fn perturb<R: Rng + ?Sized>(c_star: &Coloring, tabu: &mut TabuState, rng: &mut R) -> Coloring {
    let mut c = c_star.clone();
    let largest = (0..c.k())
        .max_by_key(|&l| (c.class_size(l), std::cmp::Reverse(l)))
        .expect("coloring has at least one class");
    let fresh = c.push_empty_class();
    let count = c.class_size(largest) / 3;
    let picked = rand::seq::index::sample(rng, c.class_size(largest), count).into_vec();
    let victims: Vec<usize> = picked.iter().map(|&p| c.class(largest)[p]).collect();
    for v in victims {
        c.move_vertex(v, fresh);
    }
    let tenure = rng.gen_range(0..c.k() as u64);
    tabu.lock_class(largest, tenure);
    tabu.lock_class(fresh, tenure);
    c
}

struct TiePicker<T> {
    best_delta: i64,
    ties: u32,
    chosen: Option<T>,
}

impl<T> TiePicker<T> {
    fn new() -> Self {
        Self {
            best_delta: i64::MAX,
            ties: 0,
            chosen: None,
        }
    }

    /// Reservoir sampling over the moves sharing the smallest delta.
    #[inline]
    fn offer<R: Rng + ?Sized>(&mut self, delta: i64, item: T, rng: &mut R) {
        if delta < self.best_delta {
            self.best_delta = delta;
            self.ties = 1;
            self.chosen = Some(item);
        } else if delta == self.best_delta {
            self.ties += 1;
            if rng.gen_range(0..self.ties) == 0 {
                self.chosen = Some(item);
            }
        }
    }
}

/// Iteration accounting shared by the phases of one call.
#[derive(Clone, Debug, Default)]
pub struct SearchBudget {
    /// Iterations spent so far.
    pub used: u64,
    /// Iteration cap of the call.
    pub limit: u64,
    /// Consecutive iterations since the incumbent last improved.
    pub since_improvement: u64,
}

impl SearchBudget {
    pub fn new(limit: u64) -> Self {
        Self {
            used: 0,
            limit,
            since_improvement: 0,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.limit
    }
}

/// Runs one neighborhood from `c` until `limit` consecutive iterations fail
/// to improve `incumbent`, or the budget runs out. Improvements are copied
/// into `incumbent` as they happen; the final current coloring is returned.
#[allow(clippy::too_many_arguments)]
pub fn ts_phase<R: Rng + ?Sized>(
    c: Coloring,
    g: &Graph,
    neighborhood: Neighborhood,
    limit: u64,
    tabu: &mut TabuState,
    incumbent: &mut Coloring,
    budget: &mut SearchBudget,
    rng: &mut R,
) -> Coloring {
    let mut engine = Engine::new(g, c);
    engine.phase(neighborhood, limit, tabu, incumbent, budget, rng);
    engine.into_coloring()
}

/// Result of one search call.
#[derive(Clone, Debug)]
pub struct DntsOutcome {
    /// Best coloring of the call, canonically relabeled.
    pub best: Coloring,
    pub iterations: u64,
    pub perturbations: u32,
}

/// Double-neighborhood tabu search from the proper coloring `c`.
pub fn dnts<R: Rng + ?Sized>(
    c: Coloring,
    g: &Graph,
    params: &DntsParams,
    rng: &mut R,
) -> DntsOutcome {
    search(c, g, params, NeighborhoodMode::Both, rng)
}

/// The search loop with a chosen neighborhood mode; [`dnts`] uses both.
pub fn search<R: Rng + ?Sized>(
    c: Coloring,
    g: &Graph,
    params: &DntsParams,
    mode: NeighborhoodMode,
    rng: &mut R,
) -> DntsOutcome {
    debug_assert!(c.is_proper(g));
    let mut tabu = TabuState::new(g.n());
    let mut budget = SearchBudget::new(params.p4);
    let mut incumbent = c.clone();
    let mut engine = Engine::new(g, c);
    let mut perturbations = 0;

    'outer: loop {
        loop {
            for &nb in mode.phases() {
                let limit = match nb {
                    Neighborhood::Exchange => params.p1,
                    Neighborhood::OneMove => params.p2,
                };
                engine.phase(nb, limit, &mut tabu, &mut incumbent, &mut budget, rng);
                if budget.exhausted() {
                    break 'outer;
                }
            }
            if budget.since_improvement >= params.p3 {
                break;
            }
        }
        let next = perturb(&incumbent, &mut tabu, rng);
        debug_assert!(next.is_proper(g));
        engine = Engine::new(g, next);
        budget.since_improvement = 0;
        perturbations += 1;
    }

    DntsOutcome {
        best: incumbent.canonical_relabel(),
        iterations: budget.used,
        perturbations,
    }
}

/// Component of a class pair, stored as a range of the pair's vertex buffer.
#[derive(Clone, Copy, Debug)]
struct Component {
    start: u32,
    len: u32,
    /// Vertices on the lower-class side.
    low: u32,
}

#[derive(Clone, Debug, Default)]
struct PairComponents {
    /// Version stamp at computation; `None` when never computed.
    computed_at: Option<u64>,
    comps: Vec<Component>,
    verts: Vec<usize>,
}

/// Incremental search state: the current coloring plus neighbor counts per
/// class and cached Exchange components per class pair.
struct Engine<'g> {
    g: &'g Graph,
    c: Coloring,
    /// `adjacent[v][l]`: neighbors of `v` in class `l`.
    adjacent: Vec<Vec<u32>>,
    pairs: Vec<PairComponents>,
    class_version: Vec<u64>,
    version: u64,
    mark: Vec<u32>,
    mark_epoch: u32,
    queue: Vec<usize>,
}

enum Choice {
    Exchange { i: usize, j: usize, comp: usize },
    OneMove { v: usize, to: usize },
}

impl<'g> Engine<'g> {
    fn new(g: &'g Graph, c: Coloring) -> Self {
        let k = c.k();
        let mut adjacent = vec![vec![0u32; k]; g.n()];
        for (u, v) in g.edges() {
            adjacent[u][c.class_of(v)] += 1;
            adjacent[v][c.class_of(u)] += 1;
        }
        Self {
            g,
            c,
            adjacent,
            pairs: Vec::new(),
            class_version: vec![0; k],
            version: 0,
            mark: vec![0; g.n()],
            mark_epoch: 0,
            queue: Vec::new(),
        }
    }

    fn into_coloring(self) -> Coloring {
        self.c
    }

    fn move_vertex(&mut self, v: usize, to: usize) {
        let from = self.c.class_of(v);
        self.c.move_vertex(v, to);
        for &u in self.g.neighbors(v) {
            self.adjacent[u][from] -= 1;
            self.adjacent[u][to] += 1;
        }
        self.version += 1;
        self.class_version[from] = self.version;
        self.class_version[to] = self.version;
    }

    #[allow(clippy::too_many_arguments)]
    fn phase<R: Rng + ?Sized>(
        &mut self,
        nb: Neighborhood,
        limit: u64,
        tabu: &mut TabuState,
        incumbent: &mut Coloring,
        budget: &mut SearchBudget,
        rng: &mut R,
    ) {
        let mut idle = 0;
        while idle < limit && !budget.exhausted() {
            budget.used += 1;
            tabu.advance();
            let f_best = incumbent.sum();
            let choice = match nb {
                Neighborhood::Exchange => self.best_exchange(tabu, f_best, rng),
                Neighborhood::OneMove => self.best_one_move(tabu, f_best, rng),
            };
            if let Some(choice) = choice {
                self.apply(choice, tabu, rng);
            }
            if self.c.sum() < incumbent.sum() {
                incumbent.clone_from(&self.c);
                idle = 0;
                budget.since_improvement = 0;
            } else {
                idle += 1;
                budget.since_improvement += 1;
            }
        }
    }

    fn apply<R: Rng + ?Sized>(&mut self, choice: Choice, tabu: &mut TabuState, rng: &mut R) {
        let tenure = rng.gen_range(0..self.c.k() as u64);
        match choice {
            Choice::Exchange { i, j, comp } => {
                let entry = &self.pairs[pair_index(i, j)];
                let Component { start, len, .. } = entry.comps[comp];
                let verts: Vec<usize> =
                    entry.verts[start as usize..(start + len) as usize].to_vec();
                for &v in &verts {
                    let to = if self.c.class_of(v) == i { j } else { i };
                    self.move_vertex(v, to);
                }
                tabu.forbid_pair(i, j, tenure);
                debug_assert!(verts.iter().all(|&v| self.locally_proper(v)));
            }
            Choice::OneMove { v, to } => {
                let from = self.c.class_of(v);
                self.move_vertex(v, to);
                tabu.forbid_vertex(v, from, tenure);
                debug_assert!(self.locally_proper(v));
            }
        }
    }

    fn locally_proper(&self, v: usize) -> bool {
        self.adjacent[v][self.c.class_of(v)] == 0
    }

    fn best_one_move<R: Rng + ?Sized>(
        &self,
        tabu: &TabuState,
        f_best: u64,
        rng: &mut R,
    ) -> Option<Choice> {
        let f_cur = self.c.sum() as i64;
        let k = self.c.k();
        let mut picker = TiePicker::new();
        for v in 0..self.c.n() {
            let from = self.c.class_of(v);
            let row = &self.adjacent[v];
            for (to, &count) in row.iter().enumerate().take(k) {
                let delta = to as i64 - from as i64;
                if delta > picker.best_delta {
                    break;
                }
                if to == from || count != 0 {
                    continue;
                }
                if f_cur + delta < f_best as i64 || !tabu.one_move_tabu(v, from, to) {
                    picker.offer(delta, (v, to), rng);
                    // Later targets for this vertex only cost more.
                    break;
                }
            }
        }
        picker.chosen.map(|(v, to)| Choice::OneMove { v, to })
    }

    fn best_exchange<R: Rng + ?Sized>(
        &mut self,
        tabu: &TabuState,
        f_best: u64,
        rng: &mut R,
    ) -> Option<Choice> {
        let f_cur = self.c.sum() as i64;
        let k = self.c.k();
        let mut picker = TiePicker::new();
        for j in 1..k {
            if self.c.class_size(j) == 0 {
                continue;
            }
            for i in 0..j {
                if self.c.class_size(i) == 0 {
                    continue;
                }
                self.refresh_pair(i, j);
                let tabu_pair = tabu.exchange_tabu(i, j);
                let entry = &self.pairs[pair_index(i, j)];
                for (idx, comp) in entry.comps.iter().enumerate() {
                    let a = comp.low as i64;
                    let b = (comp.len - comp.low) as i64;
                    let delta = (j - i) as i64 * (a - b);
                    if delta > picker.best_delta {
                        continue;
                    }
                    if !tabu_pair || f_cur + delta < f_best as i64 {
                        picker.offer(delta, (i, j, idx), rng);
                    }
                }
            }
        }
        picker
            .chosen
            .map(|(i, j, comp)| Choice::Exchange { i, j, comp })
    }

    /// Recomputes the components of `(i, j)` if either class changed since
    /// the last computation.
    fn refresh_pair(&mut self, i: usize, j: usize) {
        let idx = pair_index(i, j);
        if self.pairs.len() <= idx {
            self.pairs.resize_with(idx + 1, PairComponents::default);
        }
        if let Some(at) = self.pairs[idx].computed_at {
            if self.class_version[i] <= at && self.class_version[j] <= at {
                return;
            }
        }
        let mut entry = std::mem::take(&mut self.pairs[idx]);
        entry.comps.clear();
        entry.verts.clear();
        entry.computed_at = Some(self.version);

        self.mark_epoch = self.mark_epoch.wrapping_add(1);
        if self.mark_epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.mark_epoch = 1;
        }
        let epoch = self.mark_epoch;
        for &start in self.c.class(i) {
            // Vertices without a neighbor in V_j are singletons.
            if self.adjacent[start][j] == 0 || self.mark[start] == epoch {
                continue;
            }
            self.mark[start] = epoch;
            self.queue.clear();
            self.queue.push(start);
            let mut head = 0;
            let mut low = 0u32;
            while head < self.queue.len() {
                let u = self.queue[head];
                head += 1;
                let cu = self.c.class_of(u);
                if cu == i {
                    low += 1;
                }
                let other = if cu == i { j } else { i };
                if self.adjacent[u][other] == 0 {
                    continue;
                }
                for &w in self.g.neighbors(u) {
                    if self.c.class_of(w) == other && self.mark[w] != epoch {
                        self.mark[w] = epoch;
                        self.queue.push(w);
                    }
                }
            }
            entry.comps.push(Component {
                start: entry.verts.len() as u32,
                len: self.queue.len() as u32,
                low,
            });
            entry.verts.extend_from_slice(&self.queue);
        }
        self.pairs[idx] = entry;
    }

    #[cfg(test)]
    fn exchange_moves(&mut self) -> Vec<Move> {
        let mut out = Vec::new();
        for j in 1..self.c.k() {
            for i in 0..j {
                self.refresh_pair(i, j);
                let entry = &self.pairs[pair_index(i, j)];
                for comp in &entry.comps {
                    let verts =
                        entry.verts[comp.start as usize..(comp.start + comp.len) as usize].to_vec();
                    let a = comp.low as i64;
                    let b = (comp.len - comp.low) as i64;
                    out.push(Move {
                        delta: (j - i) as i64 * (a - b),
                        kind: MoveKind::Exchange {
                            component: verts,
                            i,
                            j,
                        },
                    });
                }
            }
        }
        out
    }
}

/// Whether a move may be chosen right now under the tabu rules, including
/// the class locks of a perturbation.
pub fn move_allowed(m: &Move, tabu: &TabuState, f_best: u64, f_current: u64) -> bool {
    (f_current as i64 + m.delta) < f_best as i64 || !tabu.is_tabu(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;
    use rand::Rng;

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = rng_from_seed(seed);
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

    fn sorted_moves(mut moves: Vec<Move>) -> Vec<Move> {
        for m in &mut moves {
            if let MoveKind::Exchange { component, .. } = &mut m.kind {
                component.sort_unstable();
            }
        }
        moves.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
        moves
    }

    #[test]
    fn default_params_valid() {
        assert!(DntsParams::default().validate().is_ok());
        let bad = DntsParams {
            p3: 100,
            ..DntsParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn no_exchange_between_independent_classes() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]);
        // Classes {0, 2} and {1, 3} induce the components {0, 1} and {2, 3}.
        let c = Coloring::from_class_indices(vec![0, 1, 0, 1]);
        assert!(c.is_proper(&g));
        let moves = enumerate_n1(&c, &g);
        assert_eq!(moves.len(), 2);
        let empty = Graph::from_edges(4, []);
        assert!(enumerate_n1(&c, &empty).is_empty());
    }

    #[test]
    fn complete_graph_has_no_one_moves() {
        let n = 5;
        let g = Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
        let c = Coloring::from_class_indices((0..n).collect());
        assert!(enumerate_n2(&c, &g).is_empty());
    }

    #[test]
    fn figure_component_swap() {
        // V_i = {v1..v5}, V_j = {v6..v9}; component {v2,v3,v6,v7,v8}.
        let edges = [(1, 5), (1, 6), (2, 6), (2, 7), (3, 8), (4, 8)];
        let g = Graph::from_edges(9, edges);
        let c = Coloring::from_class_indices(vec![0, 0, 0, 0, 0, 1, 1, 1, 1]);
        let moves = enumerate_n1(&c, &g);
        assert_eq!(moves.len(), 2);
        let m = moves
            .iter()
            .find(
                |m| matches!(&m.kind, MoveKind::Exchange { component, .. } if component.len() == 5),
            )
            .unwrap();
        assert_eq!(m.delta, 2 - 3);
        let mut after = c.clone();
        let mut tabu = TabuState::new(9);
        apply_move(&mut after, m, &mut tabu, &mut rng_from_seed(0));
        assert!(after.is_proper(&g));
        assert_eq!(after.class_indices(), &[0, 1, 1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(after.sum() as i64 - c.sum() as i64, m.delta);

        // v1 (vertex 0) has no neighbor in V_j.
        let n2 = enumerate_n2(&c, &g);
        assert!(n2.contains(&Move {
            kind: MoveKind::OneMove {
                v: 0,
                from: 0,
                to: 1
            },
            delta: 1
        }));
    }

    #[test]
    fn engine_components_match_graph_components() {
        for seed in 0..40 {
            let g = random_graph(10, 0.35, seed);
            let c = crate::init::greedy_coloring(&g);
            let mut engine = Engine::new(&g, c.clone());
            assert_eq!(
                sorted_moves(engine.exchange_moves()),
                sorted_moves(enumerate_n1(&c, &g))
            );
        }
    }

    #[test]
    fn one_move_lowers_sum_by_one() {
        let g = Graph::from_edges(2, []);
        let mut c = Coloring::from_class_indices(vec![0, 1]);
        let m = Move {
            kind: MoveKind::OneMove {
                v: 1,
                from: 1,
                to: 0,
            },
            delta: -1,
        };
        let before = c.sum();
        apply_move(&mut c, &m, &mut TabuState::new(2), &mut rng_from_seed(1));
        assert_eq!(c.sum(), before - 1);
        assert!(c.is_proper(&g));
    }

    #[test]
    fn apply_then_inverse_restores() {
        let g = random_graph(12, 0.3, 7);
        let c = crate::init::greedy_coloring(&g);
        let mut rng = rng_from_seed(2);
        let mut tabu = TabuState::new(12);
        for m in enumerate_n1(&c, &g).into_iter().chain(enumerate_n2(&c, &g)) {
            let mut x = c.clone();
            apply_move(&mut x, &m, &mut tabu, &mut rng);
            apply_move(&mut x, &m.inverse(), &mut tabu, &mut rng);
            assert_eq!(x, c);
            assert_eq!(x.sum(), c.sum());
        }
    }

    #[test]
    fn single_non_tabu_move_is_chosen() {
        let m = Move {
            kind: MoveKind::OneMove {
                v: 0,
                from: 1,
                to: 0,
            },
            delta: -1,
        };
        let tabu = TabuState::new(1);
        assert_eq!(
            select_move(&[m], &tabu, 10, 10, &mut rng_from_seed(0)),
            Some(0)
        );
    }

    #[test]
    fn aspiration_overrides_tabu() {
        let mut tabu = TabuState::new(2);
        tabu.advance();
        tabu.forbid_vertex(0, 0, 5);
        tabu.advance();
        let tabu_move = Move {
            kind: MoveKind::OneMove {
                v: 0,
                from: 1,
                to: 0,
            },
            delta: -1,
        };
        let other = Move {
            kind: MoveKind::OneMove {
                v: 1,
                from: 0,
                to: 1,
            },
            delta: 1,
        };
        assert!(tabu.is_tabu(&tabu_move));
        let moves = [other.clone(), tabu_move.clone()];
        // f_current + delta = 9 < f_best = 10: aspiration.
        assert_eq!(
            select_move(&moves, &tabu, 10, 10, &mut rng_from_seed(0)),
            Some(1)
        );
        // No aspiration when it does not beat the incumbent.
        assert_eq!(
            select_move(&moves, &tabu, 9, 10, &mut rng_from_seed(0)),
            Some(0)
        );
        assert_eq!(
            select_move(&[tabu_move], &tabu, 9, 10, &mut rng_from_seed(0)),
            None
        );
    }

    #[test]
    fn tenure_zero_is_not_tabu() {
        let mut tabu = TabuState::new(1);
        tabu.advance();
        tabu.forbid_pair(0, 1, 0);
        tabu.advance();
        assert!(!tabu.exchange_tabu(0, 1));
        tabu.forbid_pair(0, 1, 2);
        tabu.advance();
        assert!(tabu.exchange_tabu(0, 1));
        tabu.advance();
        assert!(tabu.exchange_tabu(0, 1));
        tabu.advance();
        assert!(!tabu.exchange_tabu(0, 1));
    }

    #[test]
    fn perturb_small_class_moves_nothing() {
        let g = Graph::from_edges(3, [(0, 1)]);
        let c = Coloring::from_class_indices(vec![0, 1, 0]);
        let mut tabu = TabuState::new(3);
        tabu.advance();
        let p = perturb(&c, &mut tabu, &mut rng_from_seed(3));
        assert_eq!(p.k(), 3);
        assert_eq!(p.class_size(2), 0);
        assert_eq!(p.sum(), c.sum());
        assert!(p.is_proper(&g));
    }

    #[test]
    fn perturb_moves_a_third() {
        // Star: centre 9 in class 1, leaves 0..9 in class 0 (size 9).
        let g = Graph::from_edges(10, (0..9).map(|v| (v, 9)));
        let mut colors = vec![0; 10];
        colors[9] = 1;
        let c = Coloring::from_class_indices(colors);
        let mut tabu = TabuState::new(10);
        tabu.advance();
        let p = perturb(&c, &mut tabu, &mut rng_from_seed(4));
        assert_eq!(p.class_size(2), 3);
        assert_eq!(p.class_size(0), 6);
        // k + 1 - l = 3 - 1 = 2 in 1-based colors.
        assert_eq!(p.sum(), c.sum() + 3 * 2);
        assert!(p.is_proper(&g));
    }

    #[test]
    fn phase_without_moves_stops_after_limit() {
        let n = 4;
        let g = Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
        let c = Coloring::from_class_indices((0..n).collect());
        let mut incumbent = c.clone();
        let mut tabu = TabuState::new(n);
        let mut budget = SearchBudget::new(1_000);
        let mut rng = rng_from_seed(5);
        let out = ts_phase(
            c.clone(),
            &g,
            Neighborhood::OneMove,
            17,
            &mut tabu,
            &mut incumbent,
            &mut budget,
            &mut rng,
        );
        assert_eq!(out, c);
        assert_eq!(budget.used, 17);
        assert_eq!(tabu.iteration(), 17);
    }

    #[test]
    fn one_move_phase_keeps_class_count() {
        for seed in 0..20 {
            let g = random_graph(9, 0.4, 100 + seed);
            let c = crate::init::greedy_coloring(&g);
            let k = c.k();
            let mut incumbent = c.clone();
            let mut tabu = TabuState::new(9);
            let mut budget = SearchBudget::new(500);
            let out = ts_phase(
                c,
                &g,
                Neighborhood::OneMove,
                100,
                &mut tabu,
                &mut incumbent,
                &mut budget,
                &mut rng_from_seed(seed),
            );
            assert_eq!(out.k(), k);
            assert!(out.is_proper(&g));
            assert!(incumbent.is_proper(&g));
        }
    }

    #[test]
    fn search_respects_budget_and_never_worsens() {
        for seed in 0..10 {
            let g = random_graph(15, 0.3, 200 + seed);
            let c = crate::init::greedy_coloring(&g);
            let params = DntsParams {
                p1: 20,
                p2: 30,
                p3: 60,
                p4: 700,
            };
            for mode in [
                NeighborhoodMode::Both,
                NeighborhoodMode::ExchangeOnly,
                NeighborhoodMode::OneMoveOnly,
            ] {
                let out = search(c.clone(), &g, &params, mode, &mut rng_from_seed(seed));
                assert!(out.iterations <= params.p4);
                assert!(out.best.sum() <= c.sum());
                assert!(out.best.is_proper(&g));
            }
        }
    }

    #[test]
    fn class_lock_blocks_every_move_kind() {
        let mut tabu = TabuState::new(3);
        tabu.advance();
        tabu.lock_class(2, 3);
        tabu.advance();
        let into = Move {
            kind: MoveKind::OneMove {
                v: 0,
                from: 0,
                to: 2,
            },
            delta: 2,
        };
        let out = Move {
            kind: MoveKind::OneMove {
                v: 1,
                from: 2,
                to: 0,
            },
            delta: -2,
        };
        let ex = Move {
            kind: MoveKind::Exchange {
                component: vec![0, 1],
                i: 0,
                j: 2,
            },
            delta: 0,
        };
        assert!(into.touches(2) && !into.touches(1));
        for m in [&into, &out, &ex] {
            assert!(tabu.is_tabu(m));
        }
        // Aspiration still applies.
        assert!(move_allowed(&out, &tabu, 100, 100));
        assert!(!move_allowed(&into, &tabu, 100, 100));
    }
}
