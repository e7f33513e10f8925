//! Upward orthogonal straight-line grid drawings of the rooted tree.
//!
//! Every subtree is drawn inside its own bounding box with the subtree root
//! in the top-left corner, so edges run only right or down. A binary node
//! places one child directly below or beside itself and the other child's
//! box next to it; the two child boxes never share a row or column range.
//! Which child goes where, and which of the two arrangements is used, is
//! chosen by a dynamic program that keeps a small Pareto front of
//! (width, height) candidates per subtree while capping the length of the
//! long edge at about `√(n log n)`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{polyline_conflicts, ConflictKind, Point};
use crate::tree::{validate_tree, DeltaTree, NodeId, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrthoError {
    #[error("node {0} is not a leaf")]
    NotALeaf(NodeId),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("not a rooted tree with at most two children per node: {0}")]
    Malformed(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A rooted tree whose nodes have at most two children. Node ids are the
/// ids of the [`DeltaTree`] it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBinaryTree {
    root: NodeId,
    children: Vec<Vec<NodeId>>,
    parent: Vec<Option<NodeId>>,
}

impl RootedBinaryTree {
    /// Checks that `children` describes a tree on `0..children.len()` rooted
    /// at `root` with at most two children per node.
    pub fn from_children(root: NodeId, children: Vec<Vec<NodeId>>) -> Result<Self, OrthoError> {
        let n = children.len();
        if root >= n {
            return Err(OrthoError::Malformed(format!("root {root} out of range")));
        }
        let mut parent = vec![None; n];
        for (p, kids) in children.iter().enumerate() {
            if kids.len() > 2 {
                return Err(OrthoError::Malformed(format!(
                    "node {p} has {} children",
                    kids.len()
                )));
            }
            for &c in kids {
                if c >= n || c == root || parent[c].replace(p).is_some() {
                    return Err(OrthoError::Malformed(format!(
                        "node {c} has a bad parent link"
                    )));
                }
            }
        }
        let t = Self {
            root,
            children,
            parent,
        };
        if t.bfs_order().len() != n {
            return Err(OrthoError::Malformed(
                "not every node is reachable from the root".into(),
            ));
        }
        Ok(t)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parent[id]
    }

    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.children[v].iter().copied());
        }
        order
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.len()];
        for &v in self.bfs_order().iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }
}

/// Orients `t` away from `leaf` (default: the lowest-id leaf). Children are
/// ordered by subtree size, largest first, then by id.
pub fn root_at_leaf(t: &DeltaTree, leaf: Option<NodeId>) -> Result<RootedBinaryTree, OrthoError> {
    let problems = validate_tree(t);
    if !problems.is_empty() {
        return Err(TreeError::Invalid(problems).into());
    }
    let root = match leaf {
        Some(id) if t.leaf_vertex(id).is_some() => id,
        Some(id) => return Err(OrthoError::NotALeaf(id)),
        None => t.leaf_ids().next().expect("valid trees have leaves"),
    };
    let adj = t.adjacency();
    let n = t.node_count();
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !std::mem::replace(&mut seen[w], true) {
                children[v].push(w);
                queue.push_back(w);
            }
        }
    }
    let mut rbt = RootedBinaryTree::from_children(root, children)?;
    let size = rbt.subtree_sizes();
    for kids in &mut rbt.children {
        kids.sort_by_key(|&c| (std::cmp::Reverse(size[c]), c));
    }
    Ok(rbt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// Node positions on the integer grid (`y` grows downward from the root)
/// and the parent-to-child edges, each one straight segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoLayout {
    pub positions: Vec<GridPoint>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub root: NodeId,
}

impl OrthoLayout {
    pub fn edge_length(&self, (a, b): (NodeId, NodeId)) -> i64 {
        let (p, q) = (self.positions[a], self.positions[b]);
        (p.x - q.x).abs() + (p.y - q.y).abs()
    }

    pub fn max_edge_length(&self) -> i64 {
        self.edges
            .iter()
            .map(|&e| self.edge_length(e))
            .max()
            .unwrap_or(0)
    }

    pub fn width(&self) -> i64 {
        span(self.positions.iter().map(|p| p.x))
    }

    pub fn height(&self) -> i64 {
        span(self.positions.iter().map(|p| p.y))
    }
}

fn span(values: impl Iterator<Item = i64>) -> i64 {
    let (lo, hi) = values.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        0
    } else {
        hi - lo + 1
    }
}

/// Bounding-box area in grid points.
pub fn ortho_area(l: &OrthoLayout) -> i64 {
    l.width() * l.height()
}

const FRONT_SIZE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scheme {
    /// near child directly below, far child's box to the right
    Below,
    /// near child directly right, far child's box below
    Right,
}

#[derive(Debug, Clone, Copy)]
enum Plan {
    Leaf,
    Unary {
        child: usize,
    },
    Binary {
        near: NodeId,
        far: NodeId,
        scheme: Scheme,
        near_cand: usize,
        far_cand: usize,
    },
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    w: i64,
    h: i64,
    long_edge: i64,
    plan: Plan,
}

/// Lays `rbt` out as an upward orthogonal straight-line drawing with
/// subtree separation. Deterministic for a given tree.
pub fn layout_upward_ortho(rbt: &RootedBinaryTree) -> OrthoLayout {
    let n = rbt.len();
    let nf = n.max(2) as f64;
    let cap = ((0.5 * (nf * nf.log2()).sqrt()).floor() as i64).max(2);
    let mut fronts: Vec<Vec<Candidate>> = vec![Vec::new(); n];
    let order = rbt.bfs_order();
    for &v in order.iter().rev() {
        fronts[v] = match *rbt.children(v) {
            [] => vec![Candidate {
                w: 1,
                h: 1,
                long_edge: 0,
                plan: Plan::Leaf,
            }],
            [c] => fronts[c]
                .iter()
                .enumerate()
                .map(|(i, k)| Candidate {
                    w: k.w,
                    h: k.h + 1,
                    long_edge: 1,
                    plan: Plan::Unary { child: i },
                })
                .collect(),
            [a, b] => binary_front(&fronts, a, b, cap),
            _ => unreachable!("at most two children"),
        };
    }
    let root_front = &fronts[rbt.root()];
    let best = (0..root_front.len())
        .min_by_key(|&i| {
            let k = root_front[i];
            ((4 * k.w + 2 * k.h) * (2 * k.h + 2), i)
        })
        .expect("non-empty front");

    let mut positions = vec![GridPoint::new(0, 0); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut stack = vec![(rbt.root(), best, 0i64, 0i64)];
    while let Some((v, ci, ox, oy)) = stack.pop() {
        positions[v] = GridPoint::new(ox, oy);
        match fronts[v][ci].plan {
            Plan::Leaf => {}
            Plan::Unary { child } => {
                let c = rbt.children(v)[0];
                edges.push((v, c));
                stack.push((c, child, ox, oy + 1));
            }
            Plan::Binary {
                near,
                far,
                scheme,
                near_cand,
                far_cand,
            } => {
                let nk = fronts[near][near_cand];
                let (near_at, far_at) = match scheme {
                    Scheme::Below => ((ox, oy + 1), (ox + nk.w, oy)),
                    Scheme::Right => ((ox + 1, oy), (ox, oy + nk.h)),
                };
                edges.push((v, near));
                edges.push((v, far));
                stack.push((far, far_cand, far_at.0, far_at.1));
                stack.push((near, near_cand, near_at.0, near_at.1));
            }
        }
    }
    OrthoLayout {
        positions,
        edges,
        root: rbt.root(),
    }
}

fn binary_front(fronts: &[Vec<Candidate>], a: NodeId, b: NodeId, cap: i64) -> Vec<Candidate> {
    let mut all = Vec::new();
    for (near, far) in [(a, b), (b, a)] {
        for (ni, nk) in fronts[near].iter().enumerate() {
            for (fi, fk) in fronts[far].iter().enumerate() {
                for scheme in [Scheme::Below, Scheme::Right] {
                    let (w, h, long_edge) = match scheme {
                        Scheme::Below => (nk.w + fk.w, (nk.h + 1).max(fk.h), nk.w),
                        Scheme::Right => ((nk.w + 1).max(fk.w), nk.h + fk.h, nk.h),
                    };
                    let plan = Plan::Binary {
                        near,
                        far,
                        scheme,
                        near_cand: ni,
                        far_cand: fi,
                    };
                    all.push(Candidate {
                        w,
                        h,
                        long_edge,
                        plan,
                    });
                }
            }
        }
    }
    let shortest = all.iter().map(|k| k.long_edge).min().expect("non-empty");
    let limit = cap.max(shortest);
    all.retain(|k| k.long_edge <= limit);
    // stable sort keeps generation order among equal keys
    all.sort_by_key(|k| (k.w, k.h, k.long_edge));
    let mut front: Vec<Candidate> = Vec::new();
    for k in all {
        if front.last().map_or(true, |last| k.h < last.h) {
            front.push(k);
        }
    }
    if front.len() > FRONT_SIZE {
        let last = front.len() - 1;
        let picks: Vec<usize> = (0..FRONT_SIZE)
            .map(|i| i * last / (FRONT_SIZE - 1))
            .collect();
        front = picks.into_iter().map(|i| front[i]).collect();
    }
    front
}

/// A broken invariant of an orthogonal layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrthoViolation {
    UnknownNode {
        node: NodeId,
    },
    PositionCollision {
        a: NodeId,
        b: NodeId,
    },
    NotAxisParallel {
        parent: NodeId,
        child: NodeId,
    },
    NotUpward {
        parent: NodeId,
        child: NodeId,
    },
    SegmentCrossing {
        first: (NodeId, NodeId),
        second: (NodeId, NodeId),
    },
    SegmentOverlap {
        first: (NodeId, NodeId),
        second: (NodeId, NodeId),
    },
    SubtreeOverlap {
        a: NodeId,
        b: NodeId,
    },
    NotATree,
}

impl fmt::Display for OrthoViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownNode { node } => write!(f, "segment names unknown node {node}"),
            Self::PositionCollision { a, b } => write!(f, "position collision: nodes {a} and {b}"),
            Self::NotAxisParallel { parent, child } => {
                write!(f, "segment {parent}-{child} is not axis-parallel")
            }
            Self::NotUpward { parent, child } => {
                write!(f, "not upward: child {child} above parent {parent}")
            }
            Self::SegmentCrossing { first, second } => write!(
                f,
                "segment crossing: {}-{} and {}-{}",
                first.0, first.1, second.0, second.1
            ),
            Self::SegmentOverlap { first, second } => write!(
                f,
                "segment overlap: {}-{} and {}-{}",
                first.0, first.1, second.0, second.1
            ),
            Self::SubtreeOverlap { a, b } => {
                write!(
                    f,
                    "subtree separation: boxes of siblings {a} and {b} intersect"
                )
            }
            Self::NotATree => write!(f, "segments do not form a tree rooted at the root"),
        }
    }
}

/// Checks every layout invariant; an empty list means valid.
pub fn check_ortho_valid(l: &OrthoLayout) -> Vec<OrthoViolation> {
    let n = l.positions.len();
    let mut out = Vec::new();
    let mut by_point: Vec<(GridPoint, NodeId)> = l.positions.iter().copied().zip(0..).collect();
    by_point.sort();
    for w in by_point.windows(2) {
        if w[0].0 == w[1].0 {
            out.push(OrthoViolation::PositionCollision {
                a: w[0].1,
                b: w[1].1,
            });
        }
    }
    let mut edges = Vec::with_capacity(l.edges.len());
    for &(p, c) in &l.edges {
        if p >= n || c >= n {
            out.push(OrthoViolation::UnknownNode { node: p.max(c) });
            continue;
        }
        let (a, b) = (l.positions[p], l.positions[c]);
        if a.x != b.x && a.y != b.y {
            out.push(OrthoViolation::NotAxisParallel {
                parent: p,
                child: c,
            });
        }
        if b.y < a.y {
            out.push(OrthoViolation::NotUpward {
                parent: p,
                child: c,
            });
        }
        edges.push((p, c));
    }
    let lines: Vec<Vec<Point>> = edges
        .iter()
        .map(|&(p, c)| vec![to_point(l.positions[p]), to_point(l.positions[c])])
        .collect();
    for conflict in polyline_conflicts(&lines) {
        let (first, second) = (edges[conflict.first.0], edges[conflict.second.0]);
        out.push(match conflict.kind {
            ConflictKind::Overlap => OrthoViolation::SegmentOverlap { first, second },
            ConflictKind::Crossing { .. } => OrthoViolation::SegmentCrossing { first, second },
        });
    }
    let mut children = vec![Vec::new(); n];
    for &(p, c) in &edges {
        children[p].push(c);
    }
    match l.root < n {
        true => match RootedBinaryTree::from_children(l.root, children) {
            Ok(rbt) => out.extend(subtree_overlaps(l, &rbt)),
            Err(_) => out.push(OrthoViolation::NotATree),
        },
        false => out.push(OrthoViolation::UnknownNode { node: l.root }),
    }
    out
}

fn to_point(p: GridPoint) -> Point {
    Point::new(p.x as f64, p.y as f64)
}

fn subtree_overlaps(l: &OrthoLayout, rbt: &RootedBinaryTree) -> Vec<OrthoViolation> {
    let mut bbox: Vec<(GridPoint, GridPoint)> = l.positions.iter().map(|&p| (p, p)).collect();
    for &v in rbt.bfs_order().iter().rev() {
        if let Some(p) = rbt.parent(v) {
            let (lo, hi) = bbox[v];
            let b = &mut bbox[p];
            b.0 = GridPoint::new(b.0.x.min(lo.x), b.0.y.min(lo.y));
            b.1 = GridPoint::new(b.1.x.max(hi.x), b.1.y.max(hi.y));
        }
    }
    let mut out = Vec::new();
    for v in 0..rbt.len() {
        if let [a, b] = *rbt.children(v) {
            let (x, y) = (bbox[a], bbox[b]);
            let apart = x.1.x < y.0.x || y.1.x < x.0.x || x.1.y < y.0.y || y.1.y < x.0.y;
            if !apart {
                out.push(OrthoViolation::SubtreeOverlap { a, b });
            }
        }
    }
    out
}

impl fmt::Display for OrthoLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, p) in self.positions.iter().enumerate() {
            writeln!(f, "node {id} {} {}", p.x, p.y)?;
        }
        for (a, b) in &self.edges {
            writeln!(f, "segment {a} {b}")?;
        }
        Ok(())
    }
}

impl FromStr for OrthoLayout {
    type Err = OrthoError;

    /// Segments are read as parent-to-child; the root is the one node that
    /// is never a child.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut positions: Vec<Option<GridPoint>> = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| OrthoError::Parse {
                line,
                msg: msg.to_owned(),
            };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[..] {
                ["node", id, x, y] => {
                    let id: usize = id.parse().map_err(|_| err("bad node id"))?;
                    let x = x.parse().map_err(|_| err("bad x coordinate"))?;
                    let y = y.parse().map_err(|_| err("bad y coordinate"))?;
                    if id >= positions.len() {
                        positions.resize(id + 1, None);
                    }
                    if positions[id].replace(GridPoint::new(x, y)).is_some() {
                        return Err(err("node declared twice"));
                    }
                }
                ["segment", a, b] => {
                    let a = a.parse().map_err(|_| err("bad node id"))?;
                    let b = b.parse().map_err(|_| err("bad node id"))?;
                    edges.push((a, b));
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        let positions: Vec<GridPoint> = positions
            .into_iter()
            .enumerate()
            .map(|(id, p)| {
                p.ok_or(OrthoError::Parse {
                    line: 0,
                    msg: format!("node {id} is never declared"),
                })
            })
            .collect::<Result<_, _>>()?;
        let mut is_child = vec![false; positions.len()];
        for &(_, c) in &edges {
            if let Some(flag) = is_child.get_mut(c) {
                *flag = true;
            }
        }
        let root = is_child.iter().position(|&c| !c).ok_or(OrthoError::Parse {
            line: 0,
            msg: "no root node".into(),
        })?;
        Ok(Self {
            positions,
            edges,
            root,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::recognition::eliminate;
    use crate::tree::build_delta_tree;

    fn tree_of(g: &Graph) -> DeltaTree {
        build_delta_tree(g, &eliminate(g).unwrap()).unwrap()
    }

    #[test]
    fn rooting_small_trees() {
        let k2 = tree_of(&Graph::complete(2));
        let r = root_at_leaf(&k2, Some(0)).unwrap();
        assert_eq!(r.root(), 0);
        assert_eq!(r.children(0), &[1]);

        let k3 = tree_of(&Graph::complete(3));
        let r = root_at_leaf(&k3, None).unwrap();
        let j = r.children(r.root())[0];
        assert!(k3.junction_kind(j).is_some());
        let mut kids = r.children(j).to_vec();
        kids.sort();
        assert_eq!(kids.len(), 2);
        assert!(kids.iter().all(|&k| k3.leaf_vertex(k).is_some()));

        let j = k3.junction_ids().next().unwrap();
        assert_eq!(root_at_leaf(&k3, Some(j)), Err(OrthoError::NotALeaf(j)));
    }

    #[test]
    fn single_node_and_path() {
        let one = RootedBinaryTree::from_children(0, vec![vec![]]).unwrap();
        let l = layout_upward_ortho(&one);
        assert_eq!(ortho_area(&l), 1);

        let k = 7;
        let kids = (0..k)
            .map(|i| if i + 1 < k { vec![i + 1] } else { vec![] })
            .collect();
        let path = RootedBinaryTree::from_children(0, kids).unwrap();
        let l = layout_upward_ortho(&path);
        assert_eq!((l.width(), l.height()), (1, k as i64));
        assert!(check_ortho_valid(&l).is_empty());
    }

    #[test]
    fn k2_layout_has_area_two() {
        let t = tree_of(&Graph::complete(2));
        let l = layout_upward_ortho(&root_at_leaf(&t, None).unwrap());
        assert_eq!(ortho_area(&l), 2);
    }

    #[test]
    fn area_counts_grid_points() {
        let l = OrthoLayout {
            positions: vec![GridPoint::new(0, 0), GridPoint::new(1, 2)],
            edges: vec![],
            root: 0,
        };
        assert_eq!(ortho_area(&l), 6);
    }

    #[test]
    fn rejects_malformed_rooted_trees() {
        assert!(
            RootedBinaryTree::from_children(0, vec![vec![1, 2, 3], vec![], vec![], vec![]])
                .is_err()
        );
        assert!(RootedBinaryTree::from_children(0, vec![vec![1], vec![0]]).is_err());
        assert!(RootedBinaryTree::from_children(0, vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn planted_violations_are_reported() {
        let collide = OrthoLayout {
            positions: vec![GridPoint::new(0, 0), GridPoint::new(0, 0)],
            edges: vec![(0, 1)],
            root: 0,
        };
        assert!(check_ortho_valid(&collide)
            .iter()
            .any(|v| v.to_string().starts_with("position collision")));

        let crossing = OrthoLayout {
            positions: vec![
                GridPoint::new(0, 0),
                GridPoint::new(4, 0),
                GridPoint::new(0, 1),
                GridPoint::new(2, 1),
            ],
            edges: vec![(0, 1), (0, 2), (2, 3)],
            root: 0,
        };
        assert!(check_ortho_valid(&crossing).is_empty());
        let mut crossing_pair = crossing;
        crossing_pair.positions = vec![
            GridPoint::new(0, 1),
            GridPoint::new(4, 1),
            GridPoint::new(2, 0),
            GridPoint::new(2, 3),
        ];
        crossing_pair.edges = vec![(0, 1), (2, 3)];
        let found = check_ortho_valid(&crossing_pair);
        assert!(
            found
                .iter()
                .any(|v| v.to_string().starts_with("segment crossing")),
            "{found:?}"
        );

        let diagonal = OrthoLayout {
            positions: vec![GridPoint::new(0, 0), GridPoint::new(1, 1)],
            edges: vec![(0, 1)],
            root: 0,
        };
        assert_eq!(
            check_ortho_valid(&diagonal),
            vec![OrthoViolation::NotAxisParallel {
                parent: 0,
                child: 1
            }]
        );
        let upside = OrthoLayout {
            positions: vec![GridPoint::new(0, 1), GridPoint::new(0, 0)],
            edges: vec![(0, 1)],
            root: 0,
        };
        assert_eq!(
            check_ortho_valid(&upside),
            vec![OrthoViolation::NotUpward {
                parent: 0,
                child: 1
            }]
        );
    }

    #[test]
    fn sibling_boxes_must_be_disjoint() {
        // 4 sits inside the box spanned by 1's subtree without touching a segment
        let l = OrthoLayout {
            positions: vec![
                GridPoint::new(0, 0),
                GridPoint::new(2, 0),
                GridPoint::new(0, 2),
                GridPoint::new(3, 0),
                GridPoint::new(2, 2),
                GridPoint::new(3, 3),
            ],
            edges: vec![(0, 1), (0, 2), (1, 3), (2, 4), (3, 5)],
            root: 0,
        };
        assert_eq!(
            check_ortho_valid(&l),
            vec![OrthoViolation::SubtreeOverlap { a: 1, b: 2 }]
        );
    }

    #[test]
    fn generated_layouts_are_valid_and_round_trip() {
        for seed in 0..10 {
            let t = DeltaTree::random(40, seed);
            let l = layout_upward_ortho(&root_at_leaf(&t, None).unwrap());
            assert!(check_ortho_valid(&l).is_empty(), "seed {seed}");
            assert_eq!(l.edges.len(), t.edges().len());
            assert_eq!(l.to_string().parse::<OrthoLayout>().unwrap(), l);
        }
    }
}
