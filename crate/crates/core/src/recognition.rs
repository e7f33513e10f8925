//! Recognition of distance-hereditary graphs by pruning.
//!
//! [`eliminate`] repeatedly removes a pendant vertex or one of a pair of twins
//! until `K2` remains. A distance-hereditary graph never stalls, so a stall on
//! a residual graph with more than two vertices certifies that the input is not
//! distance-hereditary.
//!
//! [`is_distance_hereditary_oracle`] is the independent check: it enumerates
//! every connected induced subgraph and compares its distances with those of
//! the whole graph.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{ExtensionKind, Graph, GraphError, Vertex};

/// Largest graph the exhaustive routines accept.
pub const ORACLE_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognitionError {
    #[error("graph has {0} vertices, need at least 2")]
    TooSmall(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("not distance-hereditary: no pendant vertex or twin pair among {residual} remaining vertices")]
    NotDistanceHereditary { residual: usize },
    #[error("graph has {vertices} vertices, exhaustive search is limited to {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("invalid elimination sequence: {0}")]
    InvalidSequence(String),
}

impl From<GraphError> for RecognitionError {
    fn from(e: GraphError) -> Self {
        RecognitionError::InvalidSequence(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EliminationKind {
    PendantCut,
    TrueTwinMerge,
    FalseTwinMerge,
}

impl EliminationKind {
    /// The extension that undoes this reduction.
    pub fn extension(self) -> ExtensionKind {
        match self {
            EliminationKind::PendantCut => ExtensionKind::Pendant,
            EliminationKind::TrueTwinMerge => ExtensionKind::TrueTwin,
            EliminationKind::FalseTwinMerge => ExtensionKind::FalseTwin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EliminationStep {
    pub kind: EliminationKind,
    pub removed: Vertex,
    pub survivor: Vertex,
}

impl EliminationStep {
    pub fn pendant(removed: Vertex, survivor: Vertex) -> Self {
        Self {
            kind: EliminationKind::PendantCut,
            removed,
            survivor,
        }
    }

    pub fn true_twin(removed: Vertex, survivor: Vertex) -> Self {
        Self {
            kind: EliminationKind::TrueTwinMerge,
            removed,
            survivor,
        }
    }

    pub fn false_twin(removed: Vertex, survivor: Vertex) -> Self {
        Self {
            kind: EliminationKind::FalseTwinMerge,
            removed,
            survivor,
        }
    }
}

impl fmt::Display for EliminationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EliminationKind::PendantCut => write!(f, "{} cut from {}", self.removed, self.survivor),
            EliminationKind::TrueTwinMerge => {
                write!(f, "{} merged into {} true", self.removed, self.survivor)
            }
            EliminationKind::FalseTwinMerge => {
                write!(f, "{} merged into {} false", self.removed, self.survivor)
            }
        }
    }
}

/// Pruning order from a graph down to `K2` on `terminal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationSequence {
    pub steps: Vec<EliminationStep>,
    pub terminal: (Vertex, Vertex),
}

impl fmt::Display for EliminationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{step}")?;
        }
        writeln!(f, "K2: {} {}", self.terminal.0, self.terminal.1)
    }
}

impl FromStr for EliminationSequence {
    type Err = RecognitionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |line: usize, msg: &str| {
            RecognitionError::InvalidSequence(format!("line {line}: {msg}"))
        };
        let mut steps = Vec::new();
        let mut terminal = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            if terminal.is_some() {
                return Err(bad(line, "text after the `K2:` line"));
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            let num = |t: &str| {
                t.parse::<Vertex>()
                    .map_err(|_| bad(line, "expected a vertex label"))
            };
            match toks[..] {
                ["K2:", u, v] => terminal = Some((num(u)?, num(v)?)),
                [r, "cut", "from", s] => steps.push(EliminationStep::pendant(num(r)?, num(s)?)),
                [r, "merged", "into", s, adj] => {
                    let kind = match adj.trim_matches(|c| c == '[' || c == ']') {
                        "true" => EliminationKind::TrueTwinMerge,
                        "false" => EliminationKind::FalseTwinMerge,
                        _ => return Err(bad(line, "merge must be marked `true` or `false`")),
                    };
                    steps.push(EliminationStep {
                        kind,
                        removed: num(r)?,
                        survivor: num(s)?,
                    });
                }
                _ => return Err(bad(line, "unrecognized step")),
            }
        }
        let terminal = terminal
            .ok_or_else(|| RecognitionError::InvalidSequence("missing `K2:` line".into()))?;
        Ok(Self { steps, terminal })
    }
}

/// Computes an elimination sequence, or explains why none exists.
///
/// Each round takes the smallest-labeled pendant vertex if there is one;
/// otherwise the twin pair `(survivor, removed)` with `survivor < removed`
/// that is lexicographically smallest.
pub fn eliminate(g: &Graph) -> Result<EliminationSequence, RecognitionError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(RecognitionError::TooSmall(n));
    }
    if !g.is_connected() {
        return Err(RecognitionError::Disconnected);
    }
    let mut state = PruneState::new(g);
    let mut steps = Vec::with_capacity(n - 2);
    while state.alive > 2 {
        let step = state
            .next_step()
            .ok_or(RecognitionError::NotDistanceHereditary {
                residual: state.alive,
            })?;
        steps.push(EliminationStep {
            kind: step.kind,
            removed: state.labels[step.removed],
            survivor: state.labels[step.survivor],
        });
        state.remove(step.removed);
    }
    let rest: Vec<usize> = (0..n).filter(|&i| state.live[i]).collect();
    Ok(EliminationSequence {
        steps,
        terminal: (state.labels[rest[0]], state.labels[rest[1]]),
    })
}

struct DenseStep {
    kind: EliminationKind,
    removed: usize,
    survivor: usize,
}

/// Dense-index working copy. Neighborhoods are fingerprinted by summing random
/// per-vertex keys, so twins land in the same class; candidates are verified
/// exactly before use.
struct PruneState {
    labels: Vec<Vertex>,
    nbrs: Vec<BTreeSet<usize>>,
    live: Vec<bool>,
    alive: usize,
    key: Vec<u128>,
    open: Vec<u128>,
    pendants: BTreeSet<usize>,
    open_classes: HashMap<u128, BTreeSet<usize>>,
    closed_classes: HashMap<u128, BTreeSet<usize>>,
    // (smallest, second smallest) of every class with two or more members
    pairs: BTreeSet<(usize, usize)>,
}

impl PruneState {
    fn new(g: &Graph) -> Self {
        let labels: Vec<Vertex> = g.vertices().collect();
        let n = labels.len();
        let nbrs: Vec<BTreeSet<usize>> = labels
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .map(|w| labels.binary_search(&w).expect("endpoint"))
                    .collect()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d157_4e7e_d17a);
        let key: Vec<u128> = (0..n).map(|_| rng.gen()).collect();
        let open = nbrs
            .iter()
            .map(|s| s.iter().fold(0u128, |acc, &w| acc.wrapping_add(key[w])))
            .collect();
        let mut state = Self {
            labels,
            nbrs,
            live: vec![true; n],
            alive: n,
            key,
            open,
            pendants: BTreeSet::new(),
            open_classes: HashMap::new(),
            closed_classes: HashMap::new(),
            pairs: BTreeSet::new(),
        };
        for v in 0..n {
            state.enter(v);
        }
        state
    }

    fn closed(&self, v: usize) -> u128 {
        self.open[v].wrapping_add(self.key[v])
    }

    fn enter(&mut self, v: usize) {
        if self.nbrs[v].len() == 1 {
            self.pendants.insert(v);
        }
        let (o, c) = (self.open[v], self.closed(v));
        Self::join(&mut self.open_classes, &mut self.pairs, o, v);
        Self::join(&mut self.closed_classes, &mut self.pairs, c, v);
    }

    fn leave(&mut self, v: usize) {
        self.pendants.remove(&v);
        let (o, c) = (self.open[v], self.closed(v));
        Self::part(&mut self.open_classes, &mut self.pairs, o, v);
        Self::part(&mut self.closed_classes, &mut self.pairs, c, v);
    }

    fn head_pair(class: &BTreeSet<usize>) -> Option<(usize, usize)> {
        let mut it = class.iter().copied();
        Some((it.next()?, it.next()?))
    }

    fn join(
        classes: &mut HashMap<u128, BTreeSet<usize>>,
        pairs: &mut BTreeSet<(usize, usize)>,
        h: u128,
        v: usize,
    ) {
        let class = classes.entry(h).or_default();
        if let Some(p) = Self::head_pair(class) {
            pairs.remove(&p);
        }
        class.insert(v);
        if let Some(p) = Self::head_pair(class) {
            pairs.insert(p);
        }
    }

    fn part(
        classes: &mut HashMap<u128, BTreeSet<usize>>,
        pairs: &mut BTreeSet<(usize, usize)>,
        h: u128,
        v: usize,
    ) {
        let Some(class) = classes.get_mut(&h) else {
            return;
        };
        if let Some(p) = Self::head_pair(class) {
            pairs.remove(&p);
        }
        class.remove(&v);
        if let Some(p) = Self::head_pair(class) {
            pairs.insert(p);
        }
        if class.is_empty() {
            classes.remove(&h);
        }
    }

    fn twin_kind(&self, s: usize, r: usize) -> Option<EliminationKind> {
        let (ns, nr) = (&self.nbrs[s], &self.nbrs[r]);
        if ns.contains(&r) {
            let same = ns.len() == nr.len()
                && ns
                    .iter()
                    .filter(|&&w| w != r)
                    .eq(nr.iter().filter(|&&w| w != s));
            same.then_some(EliminationKind::TrueTwinMerge)
        } else {
            (ns == nr).then_some(EliminationKind::FalseTwinMerge)
        }
    }

    fn next_step(&self) -> Option<DenseStep> {
        if let Some(&p) = self.pendants.first() {
            let survivor = *self.nbrs[p].first().expect("pendant has a neighbor");
            return Some(DenseStep {
                kind: EliminationKind::PendantCut,
                removed: p,
                survivor,
            });
        }
        if let Some(&(s, r)) = self.pairs.first() {
            if let Some(kind) = self.twin_kind(s, r) {
                return Some(DenseStep {
                    kind,
                    removed: r,
                    survivor: s,
                });
            }
        }
        // empty or fingerprint collision: fall back to an exact scan
        let live: Vec<usize> = (0..self.live.len()).filter(|&v| self.live[v]).collect();
        live.iter().tuple_combinations().find_map(|(&s, &r)| {
            self.twin_kind(s, r).map(|kind| DenseStep {
                kind,
                removed: r,
                survivor: s,
            })
        })
    }

    fn remove(&mut self, v: usize) {
        self.leave(v);
        self.live[v] = false;
        self.alive -= 1;
        let nbrs = std::mem::take(&mut self.nbrs[v]);
        for w in nbrs {
            self.leave(w);
            self.nbrs[w].remove(&v);
            self.open[w] = self.open[w].wrapping_sub(self.key[v]);
            self.enter(w);
        }
    }
}

/// Replays `seq` backwards from `K2` as one-vertex extensions.
pub fn apply_sequence_forward(seq: &EliminationSequence) -> Result<Graph, RecognitionError> {
    let (a, b) = seq.terminal;
    if a == b {
        return Err(RecognitionError::InvalidSequence(format!(
            "terminal pair repeats vertex {a}"
        )));
    }
    let mut g = Graph::from_edges([(a, b)])?;
    for step in seq.steps.iter().rev() {
        g.extend(step.kind.extension(), step.removed, step.survivor)?;
    }
    Ok(g)
}

/// Bitmask view of a graph with at most [`ORACLE_LIMIT`] vertices.
struct BitGraph {
    labels: Vec<Vertex>,
    adj: Vec<u32>,
}

impl BitGraph {
    fn new(g: &Graph) -> Result<Self, RecognitionError> {
        let n = g.vertex_count();
        if n > ORACLE_LIMIT {
            return Err(RecognitionError::TooLarge {
                vertices: n,
                limit: ORACLE_LIMIT,
            });
        }
        let labels: Vec<Vertex> = g.vertices().collect();
        let adj = labels
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .map(|w| 1u32 << labels.binary_search(&w).expect("endpoint"))
                    .fold(0, |m, b| m | b)
            })
            .collect();
        Ok(Self { labels, adj })
    }

    /// BFS layers from `s` inside `mask`; `dist[v] = u8::MAX` if unreached.
    fn bfs(&self, s: usize, mask: u32, dist: &mut [u8]) {
        dist.fill(u8::MAX);
        dist[s] = 0;
        let mut seen = 1u32 << s;
        let mut frontier = seen;
        let mut d = 0;
        while frontier != 0 {
            d += 1;
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[v];
            }
            next &= mask & !seen;
            seen |= next;
            let mut nn = next;
            while nn != 0 {
                let v = nn.trailing_zeros() as usize;
                nn &= nn - 1;
                dist[v] = d;
            }
            frontier = next;
        }
    }

    fn connected(&self, mask: u32) -> bool {
        if mask == 0 {
            return false;
        }
        let mut seen = 1u32 << mask.trailing_zeros();
        loop {
            let mut grow = seen;
            let mut f = seen;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                grow |= self.adj[v] & mask;
            }
            if grow == seen {
                return seen == mask;
            }
            seen = grow;
        }
    }

    /// Is the subgraph induced by `mask` distance-hereditary? Enumerates every
    /// connected subset of `mask` and compares its internal distances with
    /// those of `mask`.
    fn is_dh(&self, mask: u32) -> bool {
        if !self.connected(mask) {
            return false;
        }
        let n = self.labels.len();
        let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let mut full = vec![vec![0u8; n]; n];
        for &s in &members {
            self.bfs(s, mask, &mut full[s]);
        }
        let mut local = vec![0u8; n];
        let mut sub = mask;
        while sub != 0 {
            if sub.count_ones() >= 3 && sub != mask && self.connected(sub) {
                let mut rest = sub;
                while rest != 0 {
                    let s = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    self.bfs(s, sub, &mut local);
                    let mut t = rest;
                    while t != 0 {
                        let v = t.trailing_zeros() as usize;
                        t &= t - 1;
                        if local[v] != full[s][v] {
                            return false;
                        }
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        true
    }
}

/// Brute-force definition check: connected, and every connected induced
/// subgraph keeps the distances of `g`. Limited to [`ORACLE_LIMIT`] vertices.
/// Graphs with fewer than two vertices are rejected, as in [`eliminate`].
pub fn is_distance_hereditary_oracle(g: &Graph) -> Result<bool, RecognitionError> {
    let bits = BitGraph::new(g)?;
    let n = bits.labels.len();
    if n < 2 {
        return Ok(false);
    }
    Ok(bits.is_dh(((1u64 << n) - 1) as u32))
}

/// Exhaustive search for a vertex subset of size at least `k` inducing a
/// distance-hereditary subgraph. Sizes are tried from largest to smallest and
/// subsets lexicographically within a size; the first hit is returned.
pub fn max_dh_subgraph_bruteforce(
    g: &Graph,
    k: usize,
) -> Result<Option<BTreeSet<Vertex>>, RecognitionError> {
    let bits = BitGraph::new(g)?;
    let n = bits.labels.len();
    for size in (k.max(1)..=n).rev() {
        let subsets: Vec<Vec<usize>> = (0..n).combinations(size).collect();
        let hit = subsets
            .par_iter()
            .find_first(|s| bits.is_dh(s.iter().fold(0u32, |m, &v| m | 1 << v)));
        if let Some(s) = hit {
            return Ok(Some(s.iter().map(|&i| bits.labels[i]).collect()));
        }
    }
    Ok(None)
}
