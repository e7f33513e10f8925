//! The underlying tree of a Δ-confluent drawing.
//!
//! Leaves are graph vertices; every internal node is a degree-3 junction. A
//! Δ-junction lets a track pass between any two of its ports. A Λ-junction
//! has a head port joined to both tails, and the two tails are not joined to
//! each other. Two vertices are adjacent exactly when the tree path between
//! their leaves passes every junction through a permitted port pair.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::recognition::{
    apply_sequence_forward, EliminationKind, EliminationSequence, EliminationStep, RecognitionError,
};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JunctionKind {
    Delta,
    Lambda { head: u8 },
}

impl JunctionKind {
    /// Can a track enter at port `a` and leave at port `b`?
    pub fn permits(self, a: u8, b: u8) -> bool {
        a != b
            && match self {
                JunctionKind::Delta => true,
                JunctionKind::Lambda { head } => a == head || b == head,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeNode {
    Leaf { vertex: Vertex },
    Junction { kind: JunctionKind },
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }
}

/// A node together with one of its attachment slots. Leaves have slot 0 only;
/// junctions have ports 0, 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub node: NodeId,
    pub slot: u8,
}

impl Port {
    pub fn new(node: NodeId, slot: u8) -> Self {
        Self { node, slot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeEdge {
    pub a: Port,
    pub b: Port,
}

/// Per-node slot table: `links[id][slot]` is the port at the other end.
pub type Links = Vec<[Option<Port>; 3]>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid tree: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<TreeViolation>),
    #[error("elimination sequence does not describe the graph")]
    GraphMismatch,
    #[error(transparent)]
    Sequence(#[from] RecognitionError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A structural problem found by [`validate_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    TooSmall,
    UnknownNode { node: NodeId },
    BadSlot { node: NodeId, slot: u8 },
    PortReused { node: NodeId, slot: u8 },
    SelfLoop { node: NodeId },
    LeafDegree { node: NodeId, degree: usize },
    JunctionDegree { node: NodeId, degree: usize },
    BadHead { node: NodeId, head: u8 },
    DuplicateVertex { vertex: Vertex },
    NotConnected,
    Cycle,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::TooSmall => write!(f, "fewer than two leaves"),
            TreeViolation::UnknownNode { node } => write!(f, "edge names unknown node {node}"),
            TreeViolation::BadSlot { node, slot } => {
                write!(f, "node {node}: slot {slot} out of range")
            }
            TreeViolation::PortReused { node, slot } => {
                write!(f, "node {node}: port {slot} used twice")
            }
            TreeViolation::SelfLoop { node } => write!(f, "node {node}: self-loop"),
            TreeViolation::LeafDegree { node, degree } => {
                write!(f, "leaf {node}: leaf degree ≠ 1 ({degree})")
            }
            TreeViolation::JunctionDegree { node, degree } => {
                write!(f, "junction {node}: junction degree ≠ 3 ({degree})")
            }
            TreeViolation::BadHead { node, head } => {
                write!(f, "junction {node}: head port {head} out of range")
            }
            TreeViolation::DuplicateVertex { vertex } => {
                write!(f, "vertex {vertex} labels two leaves")
            }
            TreeViolation::NotConnected => write!(f, "not connected"),
            TreeViolation::Cycle => write!(f, "contains a cycle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaTree {
    nodes: Vec<TreeNode>,
    edges: Vec<TreeEdge>,
}

impl DeltaTree {
    /// Assembles a tree without checking it; see [`validate_tree`].
    pub fn from_parts(nodes: Vec<TreeNode>, edges: Vec<TreeEdge>) -> Self {
        Self { nodes, edges }
    }

    fn from_links(nodes: Vec<TreeNode>, links: &Links) -> Self {
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        for (id, slots) in links.iter().enumerate() {
            for (slot, other) in slots.iter().enumerate() {
                let here = Port::new(id, slot as u8);
                if let Some(other) = *other {
                    if here < other {
                        edges.push(TreeEdge { a: here, b: other });
                    }
                }
            }
        }
        Self { nodes, edges }
    }

    /// Builds the tree by consuming `seq` from its last step backwards.
    /// Does not check `seq` against a graph; see [`build_delta_tree`].
    pub fn from_sequence(seq: &EliminationSequence) -> Result<Self, TreeError> {
        let (a, b) = seq.terminal;
        let invalid = |msg: String| TreeError::Sequence(RecognitionError::InvalidSequence(msg));
        if a == b {
            return Err(invalid(format!("terminal pair repeats vertex {a}")));
        }
        let mut nodes = vec![TreeNode::Leaf { vertex: a }, TreeNode::Leaf { vertex: b }];
        let mut links: Links = vec![
            [Some(Port::new(1, 0)), None, None],
            [Some(Port::new(0, 0)), None, None],
        ];
        let mut leaf_of: HashMap<Vertex, NodeId> = HashMap::from([(a, 0), (b, 1)]);
        for step in seq.steps.iter().rev() {
            let &leaf = leaf_of
                .get(&step.survivor)
                .ok_or_else(|| invalid(format!("survivor {} does not exist yet", step.survivor)))?;
            if leaf_of.contains_key(&step.removed) {
                return Err(invalid(format!("vertex {} introduced twice", step.removed)));
            }
            let kind = match step.kind {
                EliminationKind::TrueTwinMerge => JunctionKind::Delta,
                EliminationKind::FalseTwinMerge => JunctionKind::Lambda { head: 0 },
                EliminationKind::PendantCut => JunctionKind::Lambda { head: 1 },
            };
            let outer = links[leaf][0].expect("leaf is attached");
            let junction = nodes.len();
            nodes.push(TreeNode::Junction { kind });
            let fresh = nodes.len();
            nodes.push(TreeNode::Leaf {
                vertex: step.removed,
            });
            links.push([None; 3]);
            links.push([None; 3]);
            // port 0 takes the old attachment, port 1 the survivor, port 2 the newcomer
            connect(&mut links, outer, Port::new(junction, 0));
            connect(&mut links, Port::new(leaf, 0), Port::new(junction, 1));
            connect(&mut links, Port::new(fresh, 0), Port::new(junction, 2));
            leaf_of.insert(step.removed, fresh);
        }
        Ok(Self::from_links(nodes, &links))
    }

    /// Full balanced tree of Δ-junctions: a center junction with three
    /// complete binary branches of the given depth, `3 · 2^depth` leaves.
    pub fn full_balanced(depth: u32) -> Self {
        let mut nodes = vec![TreeNode::Junction {
            kind: JunctionKind::Delta,
        }];
        let mut links: Links = vec![[None; 3]];
        let mut next_label = 0;
        let mut stack: Vec<(Port, u32)> = (0..3).rev().map(|s| (Port::new(0, s), depth)).collect();
        while let Some((parent, d)) = stack.pop() {
            let id = nodes.len();
            links.push([None; 3]);
            if d == 0 {
                nodes.push(TreeNode::Leaf { vertex: next_label });
                next_label += 1;
                connect(&mut links, parent, Port::new(id, 0));
            } else {
                nodes.push(TreeNode::Junction {
                    kind: JunctionKind::Delta,
                });
                connect(&mut links, parent, Port::new(id, 0));
                stack.push((Port::new(id, 2), d - 1));
                stack.push((Port::new(id, 1), d - 1));
            }
        }
        Self::from_links(nodes, &links)
    }

    /// Random valid tree with `leaves` leaves labeled `0..leaves`: random
    /// topology, random junction kinds, random heads and port order.
    pub fn random(leaves: usize, seed: u64) -> Self {
        assert!(leaves >= 2, "a tree needs two leaves");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = vec![TreeNode::Leaf { vertex: 0 }, TreeNode::Leaf { vertex: 1 }];
        let mut links: Links = vec![
            [Some(Port::new(1, 0)), None, None],
            [Some(Port::new(0, 0)), None, None],
        ];
        let mut leaf_ids = vec![0, 1];
        for label in 2..leaves as Vertex {
            let leaf = *leaf_ids.choose(&mut rng).expect("non-empty");
            let kind = if rng.gen_bool(0.5) {
                JunctionKind::Delta
            } else {
                JunctionKind::Lambda {
                    head: rng.gen_range(0..3),
                }
            };
            let mut ports = [0u8, 1, 2];
            ports.shuffle(&mut rng);
            let outer = links[leaf][0].expect("leaf is attached");
            let junction = nodes.len();
            nodes.push(TreeNode::Junction { kind });
            let fresh = nodes.len();
            nodes.push(TreeNode::Leaf { vertex: label });
            links.push([None; 3]);
            links.push([None; 3]);
            connect(&mut links, outer, Port::new(junction, ports[0]));
            connect(
                &mut links,
                Port::new(leaf, 0),
                Port::new(junction, ports[1]),
            );
            connect(
                &mut links,
                Port::new(fresh, 0),
                Port::new(junction, ports[2]),
            );
            leaf_ids.push(fresh);
        }
        Self::from_links(nodes, &links)
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&TreeNode> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf())
    }

    pub fn junction_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].is_leaf())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_ids().count()
    }

    pub fn junction_count(&self) -> usize {
        self.nodes.len() - self.leaf_count()
    }

    pub fn leaf_vertex(&self, id: NodeId) -> Option<Vertex> {
        match self.nodes.get(id)? {
            TreeNode::Leaf { vertex } => Some(*vertex),
            TreeNode::Junction { .. } => None,
        }
    }

    pub fn junction_kind(&self, id: NodeId) -> Option<JunctionKind> {
        match self.nodes.get(id)? {
            TreeNode::Junction { kind } => Some(*kind),
            TreeNode::Leaf { .. } => None,
        }
    }

    /// Slot table. Edges with out-of-range endpoints are skipped, so only
    /// meaningful for trees that pass [`validate_tree`].
    pub fn links(&self) -> Links {
        let mut links: Links = vec![[None; 3]; self.nodes.len()];
        for e in &self.edges {
            if e.a.node < self.nodes.len()
                && e.b.node < self.nodes.len()
                && e.a.slot < 3
                && e.b.slot < 3
            {
                links[e.a.node][e.a.slot as usize] = Some(e.b);
                links[e.b.node][e.b.slot as usize] = Some(e.a);
            }
        }
        links
    }

    /// Node-level adjacency lists, neighbors in slot order.
    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        self.links()
            .iter()
            .map(|slots| slots.iter().flatten().map(|p| p.node).collect())
            .collect()
    }
}

fn connect(links: &mut Links, a: Port, b: Port) {
    links[a.node][a.slot as usize] = Some(b);
    links[b.node][b.slot as usize] = Some(a);
}

/// Builds the Δ-confluent tree of `g` from its elimination sequence, after
/// checking that the sequence replays to `g`.
pub fn build_delta_tree(g: &Graph, seq: &EliminationSequence) -> Result<DeltaTree, TreeError> {
    if apply_sequence_forward(seq)? != *g {
        return Err(TreeError::GraphMismatch);
    }
    DeltaTree::from_sequence(seq)
}

/// Checks that `t` is a free tree with degree-1 leaves and degree-3 junctions,
/// each port used once. Returns every problem found; empty means valid.
pub fn validate_tree(t: &DeltaTree) -> Vec<TreeViolation> {
    let n = t.nodes.len();
    let mut out = Vec::new();
    if t.leaf_count() < 2 {
        out.push(TreeViolation::TooSmall);
    }
    let mut seen_vertices = BTreeSet::new();
    for node in &t.nodes {
        match *node {
            TreeNode::Leaf { vertex } => {
                if !seen_vertices.insert(vertex) {
                    out.push(TreeViolation::DuplicateVertex { vertex });
                }
            }
            TreeNode::Junction { .. } => {}
        }
    }
    for (id, node) in t.nodes.iter().enumerate() {
        if let TreeNode::Junction {
            kind: JunctionKind::Lambda { head },
        } = node
        {
            if *head > 2 {
                out.push(TreeViolation::BadHead {
                    node: id,
                    head: *head,
                });
            }
        }
    }
    let mut used = vec![[false; 3]; n];
    let mut degree = vec![0usize; n];
    let mut uf = UnionFind::new(n);
    let mut cycle = false;
    for e in &t.edges {
        let mut ok = true;
        for p in [e.a, e.b] {
            if p.node >= n {
                out.push(TreeViolation::UnknownNode { node: p.node });
                ok = false;
                continue;
            }
            let max_slot = if t.nodes[p.node].is_leaf() { 0 } else { 2 };
            if p.slot > max_slot {
                out.push(TreeViolation::BadSlot {
                    node: p.node,
                    slot: p.slot,
                });
            } else if std::mem::replace(&mut used[p.node][p.slot as usize], true) {
                out.push(TreeViolation::PortReused {
                    node: p.node,
                    slot: p.slot,
                });
            }
        }
        if !ok {
            continue;
        }
        if e.a.node == e.b.node {
            out.push(TreeViolation::SelfLoop { node: e.a.node });
            continue;
        }
        degree[e.a.node] += 1;
        degree[e.b.node] += 1;
        if !uf.union(e.a.node, e.b.node) {
            cycle = true;
        }
    }
    for (id, node) in t.nodes.iter().enumerate() {
        match node {
            TreeNode::Leaf { .. } if degree[id] != 1 => out.push(TreeViolation::LeafDegree {
                node: id,
                degree: degree[id],
            }),
            TreeNode::Junction { .. } if degree[id] != 3 => {
                out.push(TreeViolation::JunctionDegree {
                    node: id,
                    degree: degree[id],
                })
            }
            _ => {}
        }
    }
    if n > 0 && (1..n).any(|i| uf.find(i) != uf.find(0)) {
        out.push(TreeViolation::NotConnected);
    }
    if cycle {
        out.push(TreeViolation::Cycle);
    }
    out
}

fn require_valid(t: &DeltaTree) -> Result<(), TreeError> {
    let problems = validate_tree(t);
    if problems.is_empty() {
        Ok(())
    } else {
        Err(TreeError::Invalid(problems))
    }
}

/// The graph the track system draws: leaves `u`, `v` are adjacent iff the
/// tree path between them turns through permitted port pairs only.
pub fn semantics(t: &DeltaTree) -> Result<Graph, TreeError> {
    require_valid(t)?;
    let links = t.links();
    let mut g = Graph::with_vertices(t.leaf_ids().filter_map(|id| t.leaf_vertex(id)));
    let mut stack = Vec::new();
    for leaf in t.leaf_ids() {
        let from = t.leaf_vertex(leaf).expect("leaf");
        stack.extend(links[leaf][0]);
        while let Some(Port { node, slot }) = stack.pop() {
            match t.nodes[node] {
                TreeNode::Leaf { vertex } => {
                    g.add_edge(from, vertex).expect("distinct leaves");
                }
                TreeNode::Junction { kind } => {
                    for out in 0..3u8 {
                        if kind.permits(slot, out) {
                            stack.extend(links[node][out as usize]);
                        }
                    }
                }
            }
        }
    }
    Ok(g)
}

/// Reduces the tree back to an elimination sequence by contracting twins and
/// deleting pendants at junctions with two leaf neighbors, lowest junction id
/// first. A two-leaf tree yields the empty sequence.
pub fn tree_to_sequence(t: &DeltaTree) -> Result<EliminationSequence, TreeError> {
    require_valid(t)?;
    let mut links = t.links();
    let label = |id: NodeId| t.leaf_vertex(id).expect("leaf");
    let leaf_neighbors = |links: &Links, j: NodeId| {
        links[j]
            .iter()
            .flatten()
            .filter(|p| t.nodes[p.node].is_leaf())
            .count()
    };
    let mut ready: BTreeSet<NodeId> = t
        .junction_ids()
        .filter(|&j| leaf_neighbors(&links, j) >= 2)
        .collect();
    let mut remaining = t.junction_count();
    let mut steps = Vec::with_capacity(remaining);
    while remaining > 0 {
        let j = ready
            .pop_first()
            .ok_or_else(|| TreeError::Invalid(vec![TreeViolation::Cycle]))?;
        let ports: [Port; 3] = links[j].map(|p| p.expect("junction has degree 3"));
        let is_leaf = |s: usize| t.nodes[ports[s].node].is_leaf();
        let lab = |s: usize| label(ports[s].node);
        // (kind, removed slot, survivor slot)
        let (kind, removed, survivor) = match t.junction_kind(j).expect("junction") {
            JunctionKind::Delta => {
                let mut leaves: Vec<usize> = (0..3).filter(|&s| is_leaf(s)).collect();
                leaves.sort_by_key(|&s| lab(s));
                (EliminationKind::TrueTwinMerge, leaves[1], leaves[0])
            }
            JunctionKind::Lambda { head } => {
                let head = head as usize;
                let tails: Vec<usize> = (0..3).filter(|&s| s != head).collect();
                let leaf_tail = tails
                    .iter()
                    .copied()
                    .filter(|&s| is_leaf(s))
                    .min_by_key(|&s| lab(s));
                match leaf_tail {
                    Some(tail) if is_leaf(head) => (EliminationKind::PendantCut, tail, head),
                    _ => {
                        let (x, y) = (tails[0], tails[1]);
                        if lab(x) < lab(y) {
                            (EliminationKind::FalseTwinMerge, y, x)
                        } else {
                            (EliminationKind::FalseTwinMerge, x, y)
                        }
                    }
                }
            }
        };
        let keep = 3 - removed - survivor;
        steps.push(EliminationStep {
            kind,
            removed: lab(removed),
            survivor: lab(survivor),
        });
        let outer = ports[keep];
        let kept_leaf = ports[survivor].node;
        links[j] = [None; 3];
        links[ports[removed].node] = [None; 3];
        connect(&mut links, Port::new(kept_leaf, 0), outer);
        remaining -= 1;
        if !t.nodes[outer.node].is_leaf() && leaf_neighbors(&links, outer.node) >= 2 {
            ready.insert(outer.node);
        }
    }
    let rest: Vec<Vertex> = t
        .leaf_ids()
        .filter(|&id| links[id][0].is_some())
        .map(label)
        .collect();
    Ok(EliminationSequence {
        steps,
        terminal: (rest[0].min(rest[1]), rest[0].max(rest[1])),
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

impl fmt::Display for DeltaTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                TreeNode::Leaf { vertex } => writeln!(f, "leaf {id} vertex={vertex}")?,
                TreeNode::Junction {
                    kind: JunctionKind::Delta,
                } => writeln!(f, "junction {id} kind=delta")?,
                TreeNode::Junction {
                    kind: JunctionKind::Lambda { head },
                } => writeln!(f, "junction {id} kind=lambda head={head}")?,
            }
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {}:{} {}:{}",
                e.a.node, e.a.slot, e.b.node, e.b.slot
            )?;
        }
        Ok(())
    }
}

impl FromStr for DeltaTree {
    type Err = TreeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut nodes: Vec<Option<TreeNode>> = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| TreeError::Parse {
                line,
                msg: msg.to_owned(),
            };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            let int = |s: &str| s.parse::<usize>().map_err(|_| err("expected an integer"));
            let field = |tok: &str, key: &str| {
                tok.strip_prefix(key)
                    .and_then(|v| v.strip_prefix('='))
                    .map(str::to_owned)
                    .ok_or_else(|| err(&format!("expected `{key}=`")))
            };
            let port = |tok: &str| -> Result<Port, TreeError> {
                let (n, s) = tok
                    .split_once(':')
                    .ok_or_else(|| err("expected `id:slot`"))?;
                let slot = s.parse::<u8>().map_err(|_| err("bad slot"))?;
                Ok(Port::new(int(n)?, slot))
            };
            let (id, node) = match toks[..] {
                ["leaf", id, v] => {
                    let vertex = field(v, "vertex")?
                        .parse()
                        .map_err(|_| err("bad vertex label"))?;
                    (int(id)?, TreeNode::Leaf { vertex })
                }
                ["junction", id, k] if field(k, "kind")? == "delta" => (
                    int(id)?,
                    TreeNode::Junction {
                        kind: JunctionKind::Delta,
                    },
                ),
                ["junction", id, k, h] if field(k, "kind")? == "lambda" => {
                    let head = field(h, "head")?
                        .parse()
                        .map_err(|_| err("bad head port"))?;
                    (
                        int(id)?,
                        TreeNode::Junction {
                            kind: JunctionKind::Lambda { head },
                        },
                    )
                }
                ["edge", a, b] => {
                    edges.push(TreeEdge {
                        a: port(a)?,
                        b: port(b)?,
                    });
                    continue;
                }
                _ => return Err(err("unrecognized line")),
            };
            if id >= nodes.len() {
                nodes.resize(id + 1, None);
            }
            if nodes[id].replace(node).is_some() {
                return Err(err("node id declared twice"));
            }
        }
        let nodes = nodes
            .into_iter()
            .enumerate()
            .map(|(id, n)| {
                n.ok_or(TreeError::Parse {
                    line: 0,
                    msg: format!("node {id} is never declared"),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { nodes, edges })
    }
}
