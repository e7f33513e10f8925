//! Tree drawings on the hexagonal grid.
//!
//! The lattice has cells with two vertical sides of length 1 and four sides
//! of slope ±1/2. Each vertical cell side carries a primary point (its lower
//! end in lattice terms) and a backup point one unit above it:
//!
//! ```text
//! Primary(u, v) = (4v + 2u, 2u)      Backup(u, v) = Primary(u, v) + (0, 1)
//! ```
//!
//! A u-curve zigzags through the primaries of row `u` (lower wave) or the
//! backups (upper wave); a v-curve alternates vertical sides and +1/2 steps
//! through `P(0,v), B(0,v), P(1,v), B(1,v), …`. An edge is stored as a run
//! along one curve, so its description is just its two endpoints and a lane.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{polyline_conflicts, ConflictKind, Point};
use crate::ortho::OrthoLayout;
use crate::tree::NodeId;

/// Cartesian lattice coordinates.
pub type Xy = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Primary,
    Backup,
}

impl Slot {
    fn offset(self) -> i64 {
        match self {
            Slot::Primary => 0,
            Slot::Backup => 1,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Slot::Primary => Slot::Backup,
            Slot::Backup => Slot::Primary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexPoint {
    pub u: i64,
    pub v: i64,
    pub slot: Slot,
}

impl HexPoint {
    pub const fn primary(u: i64, v: i64) -> Self {
        Self {
            u,
            v,
            slot: Slot::Primary,
        }
    }

    pub const fn backup(u: i64, v: i64) -> Self {
        Self {
            u,
            v,
            slot: Slot::Backup,
        }
    }

    pub fn xy(self) -> Xy {
        (4 * self.v + 2 * self.u, 2 * self.u + self.slot.offset())
    }

    fn with_slot(self, slot: Slot) -> Self {
        Self { slot, ..self }
    }
}

/// Which wave of a u-curve a horizontal run follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Lane {
    /// through the primaries, dipping to `y - 1` between them
    #[default]
    Lower,
    /// through the backups, rising to `y + 1` between them
    Upper,
}

impl Lane {
    fn base(self) -> Slot {
        match self {
            Lane::Lower => Slot::Primary,
            Lane::Upper => Slot::Backup,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Lane::Lower => Lane::Upper,
            Lane::Upper => Lane::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    U,
    V,
}

/// One tree edge, parent `a` to child `b`. The curve kind follows from the
/// endpoint positions; `lane` only matters for u-runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub a: NodeId,
    pub b: NodeId,
    pub lane: Lane,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HexLayout {
    pub positions: Vec<HexPoint>,
    pub runs: Vec<Run>,
    pub root: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("{a:?} and {b:?} do not lie on a common curve")]
    NotOnCurve { a: HexPoint, b: HexPoint },
    #[error("run names unknown node {0}")]
    UnknownNode(NodeId),
    #[error("cannot separate the edges at node {node}")]
    UnresolvableOverlap { node: NodeId },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Places ortho node `(x, y)` on `Primary(u = y, v = x)`; horizontal
/// segments become lower-wave u-runs and vertical ones v-runs.
pub fn ortho_to_hex(l: &OrthoLayout) -> HexLayout {
    HexLayout {
        positions: l
            .positions
            .iter()
            .map(|p| HexPoint::primary(p.y, p.x))
            .collect(),
        runs: l
            .edges
            .iter()
            .map(|&(a, b)| Run {
                a,
                b,
                lane: Lane::Lower,
            })
            .collect(),
        root: l.root,
    }
}

/// Lattice points of the run from `a` to `b`. Both ends must share a
/// v-curve, or share a u-curve; a u-run joins the lane through short
/// vertical connectors when an end sits on the other slot.
pub fn expand_edge(a: HexPoint, b: HexPoint, lane: Lane) -> Result<Vec<Xy>, HexError> {
    if a.v == b.v {
        let ka = 2 * a.u + a.slot.offset();
        let kb = 2 * b.u + b.slot.offset();
        let step = (kb - ka).signum();
        let mut pts = Vec::with_capacity((kb - ka).unsigned_abs() as usize + 1);
        let mut k = ka;
        loop {
            let slot = if k.rem_euclid(2) == 0 {
                Slot::Primary
            } else {
                Slot::Backup
            };
            pts.push(
                HexPoint {
                    u: k.div_euclid(2),
                    v: a.v,
                    slot,
                }
                .xy(),
            );
            if k == kb {
                return Ok(pts);
            }
            k += step;
        }
    }
    if a.u != b.u {
        return Err(HexError::NotOnCurve { a, b });
    }
    let base = lane.base();
    let rise = match lane {
        Lane::Lower => -1,
        Lane::Upper => 1,
    };
    let dir = (b.v - a.v).signum();
    let mut pts = vec![a.xy()];
    if a.slot != base {
        pts.push(a.with_slot(base).xy());
    }
    let mut v = a.v;
    while v != b.v {
        let (x, y) = *pts.last().expect("non-empty");
        pts.push((x + 2 * dir, y + rise));
        v += dir;
        pts.push(
            HexPoint {
                u: a.u,
                v,
                slot: base,
            }
            .xy(),
        );
    }
    if b.slot != base {
        pts.push(b.xy());
    }
    Ok(pts)
}

impl HexLayout {
    pub fn run_kind(&self, run: &Run) -> Result<CurveKind, HexError> {
        let (a, b) = (self.point(run.a)?, self.point(run.b)?);
        if a.v == b.v {
            Ok(CurveKind::V)
        } else if a.u == b.u {
            Ok(CurveKind::U)
        } else {
            Err(HexError::NotOnCurve { a, b })
        }
    }

    fn point(&self, id: NodeId) -> Result<HexPoint, HexError> {
        self.positions
            .get(id)
            .copied()
            .ok_or(HexError::UnknownNode(id))
    }

    pub fn expand_run(&self, run: &Run) -> Result<Vec<Xy>, HexError> {
        expand_edge(self.point(run.a)?, self.point(run.b)?, run.lane)
    }

    /// Expanded polylines, one per run, in run order.
    pub fn expand(&self) -> Result<Vec<Vec<Xy>>, HexError> {
        self.runs.iter().map(|r| self.expand_run(r)).collect()
    }

    /// Number of stored fields across all edge descriptors.
    pub fn descriptor_fields(&self) -> usize {
        // a, b, lane
        3 * self.runs.len()
    }

    fn bfs_order(&self) -> Vec<NodeId> {
        let n = self.positions.len();
        let mut adj = vec![Vec::new(); n];
        for r in &self.runs {
            if r.a < n && r.b < n {
                adj[r.a].push(r.b);
                adj[r.b].push(r.a);
            }
        }
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for start in std::iter::once(self.root).chain(0..n) {
            if start >= n || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &adj[v] {
                    if !std::mem::replace(&mut seen[w], true) {
                        queue.push_back(w);
                    }
                }
            }
        }
        order
    }
}

fn seg_key(p: Xy, q: Xy) -> (Xy, Xy) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// Incremental lattice bookkeeping: which edges use each unit segment and
/// each lattice point. Lattice segments meet only at lattice points, so
/// these two maps detect every overlap and crossing.
struct Workspace {
    layout: HexLayout,
    polys: Vec<Vec<Xy>>,
    incident: Vec<Vec<usize>>,
    segs: HashMap<(Xy, Xy), Vec<usize>>,
    verts: HashMap<Xy, Vec<usize>>,
    node_at: HashMap<Xy, NodeId>,
}

impl Workspace {
    fn new(layout: HexLayout) -> Result<Self, HexError> {
        let polys = layout.expand()?;
        let mut incident = vec![Vec::new(); layout.positions.len()];
        for (e, r) in layout.runs.iter().enumerate() {
            incident[r.a].push(e);
            incident[r.b].push(e);
        }
        let node_at = layout
            .positions
            .iter()
            .enumerate()
            .map(|(id, p)| (p.xy(), id))
            .collect();
        let mut ws = Self {
            layout,
            polys,
            incident,
            segs: HashMap::new(),
            verts: HashMap::new(),
            node_at,
        };
        for e in 0..ws.polys.len() {
            ws.index(e);
        }
        Ok(ws)
    }

    fn index(&mut self, e: usize) {
        let poly = &self.polys[e];
        for w in poly.windows(2) {
            self.segs.entry(seg_key(w[0], w[1])).or_default().push(e);
        }
        for &p in poly {
            let owners = self.verts.entry(p).or_default();
            if owners.last() != Some(&e) {
                owners.push(e);
            }
        }
    }

    fn unindex(&mut self, e: usize) {
        let poly = &self.polys[e];
        for w in poly.windows(2) {
            if let Some(owners) = self.segs.get_mut(&seg_key(w[0], w[1])) {
                owners.retain(|&o| o != e);
            }
        }
        for p in poly {
            if let Some(owners) = self.verts.get_mut(p) {
                owners.retain(|&o| o != e);
            }
        }
    }

    fn is_end(poly: &[Xy], p: Xy) -> bool {
        poly.first() == Some(&p) || poly.last() == Some(&p)
    }

    /// Do the candidate polylines for `group` avoid each other and every
    /// edge outside the group? `group` must be unindexed.
    fn clean(&self, polys: &[Vec<Xy>]) -> bool {
        let mut local_segs: HashMap<(Xy, Xy), usize> = HashMap::new();
        let mut local_verts: HashMap<Xy, usize> = HashMap::new();
        for (i, poly) in polys.iter().enumerate() {
            for w in poly.windows(2) {
                let key = seg_key(w[0], w[1]);
                if self.segs.get(&key).is_some_and(|o| !o.is_empty())
                    || local_segs.insert(key, i).is_some()
                {
                    return false;
                }
            }
            let mut own = HashSet::new();
            for &p in poly {
                if !own.insert(p) {
                    return false;
                }
                if let Some(owners) = self.verts.get(&p) {
                    let ok = owners
                        .iter()
                        .all(|&o| Self::is_end(&self.polys[o], p) && Self::is_end(poly, p));
                    if !ok {
                        return false;
                    }
                }
                if let Some(&j) = local_verts.get(&p) {
                    if !(Self::is_end(&polys[j], p) && Self::is_end(poly, p)) {
                        return false;
                    }
                }
                local_verts.insert(p, i);
            }
        }
        true
    }

    fn bends(polys: &[Vec<Xy>]) -> usize {
        polys.iter().map(|p| polyline_bends(p)).sum()
    }

    /// Candidate adjustments at `node`: slot flip, each lane flip, then the
    /// slot flip combined with each lane flip.
    fn options(&self, node: NodeId) -> Vec<(bool, Option<usize>)> {
        let u_runs: Vec<usize> = self.incident[node]
            .iter()
            .copied()
            .filter(|&e| self.layout.run_kind(&self.layout.runs[e]) == Ok(CurveKind::U))
            .collect();
        let mut out = vec![(true, None)];
        out.extend(u_runs.iter().map(|&e| (false, Some(e))));
        out.extend(u_runs.iter().map(|&e| (true, Some(e))));
        out
    }

    /// Expands `group` under an adjustment without committing it. Returns
    /// `None` if the flipped slot would land on another node.
    fn trial(
        &self,
        node: NodeId,
        group: &[usize],
        flip_slot: bool,
        lane_flip: Option<usize>,
    ) -> Option<Vec<Vec<Xy>>> {
        let mut pos = self.layout.positions[node];
        if flip_slot {
            pos = pos.with_slot(pos.slot.flipped());
            if self.node_at.contains_key(&pos.xy()) {
                return None;
            }
        }
        let at = |id: NodeId| {
            if id == node {
                pos
            } else {
                self.layout.positions[id]
            }
        };
        group
            .iter()
            .map(|&e| {
                let r = self.layout.runs[e];
                let lane = if lane_flip == Some(e) {
                    r.lane.flipped()
                } else {
                    r.lane
                };
                expand_edge(at(r.a), at(r.b), lane).ok()
            })
            .collect()
    }

    fn commit(
        &mut self,
        node: NodeId,
        group: &[usize],
        flip_slot: bool,
        lane_flip: Option<usize>,
        polys: Vec<Vec<Xy>>,
    ) {
        if flip_slot {
            let old = self.layout.positions[node];
            self.node_at.remove(&old.xy());
            let new = old.with_slot(old.slot.flipped());
            self.node_at.insert(new.xy(), node);
            self.layout.positions[node] = new;
        }
        if let Some(e) = lane_flip {
            self.layout.runs[e].lane = self.layout.runs[e].lane.flipped();
        }
        for (&e, poly) in group.iter().zip(polys) {
            self.polys[e] = poly;
        }
    }

    fn group_unindexed<T>(&mut self, node: NodeId, f: impl FnOnce(&mut Self, &[usize]) -> T) -> T {
        let group = self.incident[node].clone();
        for &e in &group {
            self.unindex(e);
        }
        let out = f(self, &group);
        for &e in &group {
            self.index(e);
        }
        out
    }
}

/// Separates edges that share lattice segments or points, visiting nodes in
/// BFS order from the root. At a conflicted node it tries a slot flip, then
/// a lane flip of each incident u-run, then both together, and keeps the
/// first option that leaves the node's edges clean. A conflict a node cannot
/// fix may still be fixed at a later node; whatever remains after the pass
/// is an error.
pub fn resolve_overlaps(h: &HexLayout) -> Result<HexLayout, HexError> {
    let mut ws = Workspace::new(h.clone())?;
    let mut pending = Vec::new();
    for node in h.bfs_order() {
        let fixed = ws.group_unindexed(node, |ws, group| {
            let current: Vec<Vec<Xy>> = group.iter().map(|&e| ws.polys[e].clone()).collect();
            if ws.clean(&current) {
                return true;
            }
            for (flip, lane) in ws.options(node) {
                if let Some(polys) = ws.trial(node, group, flip, lane) {
                    if ws.clean(&polys) {
                        ws.commit(node, group, flip, lane, polys);
                        return true;
                    }
                }
            }
            false
        });
        if !fixed {
            pending.push(node);
        }
    }
    for node in pending {
        let clean = ws.group_unindexed(node, |ws, group| {
            let current: Vec<Vec<Xy>> = group.iter().map(|&e| ws.polys[e].clone()).collect();
            ws.clean(&current)
        });
        if !clean {
            return Err(HexError::UnresolvableOverlap { node });
        }
    }
    Ok(ws.layout)
}

/// Greedy bend reduction: at each node, in BFS order, apply the adjustment
/// that removes the most bends from the node's edges while keeping the
/// drawing clean. Leaves `h` unchanged where nothing helps.
pub fn reduce_bends(h: &HexLayout) -> Result<HexLayout, HexError> {
    let mut ws = Workspace::new(h.clone())?;
    for node in h.bfs_order() {
        ws.group_unindexed(node, |ws, group| {
            let current: Vec<Vec<Xy>> = group.iter().map(|&e| ws.polys[e].clone()).collect();
            let mut best = Workspace::bends(&current);
            let mut choice = None;
            for (flip, lane) in ws.options(node) {
                if let Some(polys) = ws.trial(node, group, flip, lane) {
                    let bends = Workspace::bends(&polys);
                    if bends < best && ws.clean(&polys) {
                        best = bends;
                        choice = Some((flip, lane, polys));
                    }
                }
            }
            if let Some((flip, lane, polys)) = choice {
                ws.commit(node, group, flip, lane, polys);
            }
        });
    }
    Ok(ws.layout)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SlopeClass {
    Vertical,
    Up,
    Down,
}

fn slope_class(p: Xy, q: Xy) -> Option<SlopeClass> {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    if dx == 0 && dy != 0 {
        Some(SlopeClass::Vertical)
    } else if dx != 0 && 2 * dy == dx {
        Some(SlopeClass::Up)
    } else if dx != 0 && 2 * dy == -dx {
        Some(SlopeClass::Down)
    } else {
        None
    }
}

/// Bends in one polyline: interior points where the slope changes.
pub fn polyline_bends(poly: &[Xy]) -> usize {
    let classes: Vec<_> = poly.windows(2).map(|w| slope_class(w[0], w[1])).collect();
    classes.windows(2).filter(|w| w[0] != w[1]).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BendCount {
    pub total: usize,
    pub max_per_edge: usize,
}

pub fn count_bends(h: &HexLayout) -> Result<BendCount, HexError> {
    let per_edge: Vec<usize> = h.expand()?.iter().map(|p| polyline_bends(p)).collect();
    Ok(BendCount {
        total: per_edge.iter().sum(),
        max_per_edge: per_edge.into_iter().max().unwrap_or(0),
    })
}

/// Bounding-box area, in lattice points, of nodes and expanded edges.
pub fn hex_area(h: &HexLayout) -> Result<i64, HexError> {
    let polys = h.expand()?;
    let pts = h
        .positions
        .iter()
        .map(|p| p.xy())
        .chain(polys.into_iter().flatten());
    let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
    let mut any = false;
    for (x, y) in pts {
        any = true;
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    Ok(if any {
        (hi.0 - lo.0 + 1) * (hi.1 - lo.1 + 1)
    } else {
        0
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HexViolation {
    UnknownNode { node: NodeId },
    PositionCollision { a: NodeId, b: NodeId },
    NotOnCurve { edge: usize },
    IllegalSlope { edge: usize, segment: usize },
    EdgeOverlap { first: usize, second: usize },
    EdgeCrossing { first: usize, second: usize },
}

impl fmt::Display for HexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownNode { node } => write!(f, "run names unknown node {node}"),
            Self::PositionCollision { a, b } => write!(f, "position collision: nodes {a} and {b}"),
            Self::NotOnCurve { edge } => write!(f, "edge {edge}: endpoints not on a common curve"),
            Self::IllegalSlope { edge, segment } => {
                write!(f, "illegal slope: edge {edge} segment {segment}")
            }
            Self::EdgeOverlap { first, second } => {
                write!(f, "edge overlap: edges {first} and {second}")
            }
            Self::EdgeCrossing { first, second } => {
                write!(f, "edge crossing: edges {first} and {second}")
            }
        }
    }
}

/// Checks expanded polylines: slopes in {+1/2, -1/2, vertical}, no shared
/// segments, no crossings. Polylines may touch only at common ends.
pub fn check_polylines(lines: &[Vec<Xy>]) -> Vec<HexViolation> {
    let mut out = Vec::new();
    for (edge, poly) in lines.iter().enumerate() {
        for (segment, w) in poly.windows(2).enumerate() {
            if slope_class(w[0], w[1]).is_none() {
                out.push(HexViolation::IllegalSlope { edge, segment });
            }
        }
    }
    let pts: Vec<Vec<Point>> = lines
        .iter()
        .map(|p| {
            p.iter()
                .map(|&(x, y)| Point::new(x as f64, y as f64))
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    for c in polyline_conflicts(&pts) {
        let (first, second) = (c.first.0, c.second.0);
        let v = match c.kind {
            ConflictKind::Overlap => HexViolation::EdgeOverlap { first, second },
            ConflictKind::Crossing { .. } => HexViolation::EdgeCrossing { first, second },
        };
        if seen.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

/// Full validity check: distinct node points, every run on a curve, and the
/// expanded drawing clean under [`check_polylines`].
pub fn check_hex_valid(h: &HexLayout) -> Vec<HexViolation> {
    let mut out = Vec::new();
    let mut by_point: Vec<(Xy, NodeId)> = h.positions.iter().map(|p| p.xy()).zip(0..).collect();
    by_point.sort();
    for w in by_point.windows(2) {
        if w[0].0 == w[1].0 {
            out.push(HexViolation::PositionCollision {
                a: w[0].1,
                b: w[1].1,
            });
        }
    }
    let mut lines = Vec::with_capacity(h.runs.len());
    for (edge, r) in h.runs.iter().enumerate() {
        match h.expand_run(r) {
            Ok(poly) => lines.push(poly),
            Err(HexError::UnknownNode(node)) => out.push(HexViolation::UnknownNode { node }),
            Err(_) => out.push(HexViolation::NotOnCurve { edge }),
        }
    }
    if out.is_empty() {
        out.extend(check_polylines(&lines));
    }
    out
}

impl fmt::Display for HexLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, p) in self.positions.iter().enumerate() {
            let slot = match p.slot {
                Slot::Primary => "primary",
                Slot::Backup => "backup",
            };
            writeln!(f, "node {id} u={} v={} slot={slot}", p.u, p.v)?;
        }
        for r in &self.runs {
            let kind = match self.run_kind(r) {
                Ok(CurveKind::U) => "U",
                _ => "V",
            };
            let lane = match r.lane {
                Lane::Lower => "lower",
                Lane::Upper => "upper",
            };
            writeln!(f, "run {} {} kind={kind} lane={lane}", r.a, r.b)?;
        }
        Ok(())
    }
}

fn key_value<'a>(tok: &'a str, key: &str) -> Option<&'a str> {
    tok.strip_prefix(key)?.strip_prefix('=')
}

impl FromStr for HexLayout {
    type Err = HexError;

    /// Runs are read as parent-to-child; the root is the one node that is
    /// never a child. Each run's `kind` must match its endpoints.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut positions: Vec<Option<HexPoint>> = Vec::new();
        let mut runs = Vec::new();
        let mut kinds = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: &str| HexError::Parse {
                line,
                msg: msg.to_owned(),
            };
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[..] {
                ["node", id, u, v, slot] => {
                    let id: usize = id.parse().map_err(|_| err("bad node id"))?;
                    let num = |tok: &str, key: &str| -> Result<i64, HexError> {
                        key_value(tok, key)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err(&format!("bad {key}=")))
                    };
                    let slot = match key_value(slot, "slot") {
                        Some("primary") => Slot::Primary,
                        Some("backup") => Slot::Backup,
                        _ => return Err(err("bad slot=")),
                    };
                    let p = HexPoint {
                        u: num(u, "u")?,
                        v: num(v, "v")?,
                        slot,
                    };
                    if id >= positions.len() {
                        positions.resize(id + 1, None);
                    }
                    if positions[id].replace(p).is_some() {
                        return Err(err("node declared twice"));
                    }
                }
                ["run", a, b, kind, lane] => {
                    let a = a.parse().map_err(|_| err("bad node id"))?;
                    let b = b.parse().map_err(|_| err("bad node id"))?;
                    let kind = match key_value(kind, "kind") {
                        Some("U") => CurveKind::U,
                        Some("V") => CurveKind::V,
                        _ => return Err(err("bad kind=")),
                    };
                    let lane = match key_value(lane, "lane") {
                        Some("lower") => Lane::Lower,
                        Some("upper") => Lane::Upper,
                        _ => return Err(err("bad lane=")),
                    };
                    runs.push(Run { a, b, lane });
                    kinds.push((line, kind));
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        let positions: Vec<HexPoint> = positions
            .into_iter()
            .enumerate()
            .map(|(id, p)| {
                p.ok_or(HexError::Parse {
                    line: 0,
                    msg: format!("node {id} is never declared"),
                })
            })
            .collect::<Result<_, _>>()?;
        let mut is_child = vec![false; positions.len()];
        for r in &runs {
            if let Some(flag) = is_child.get_mut(r.b) {
                *flag = true;
            }
        }
        let root = is_child.iter().position(|&c| !c).ok_or(HexError::Parse {
            line: 0,
            msg: "no root node".into(),
        })?;
        let layout = Self {
            positions,
            runs,
            root,
        };
        for (r, (line, kind)) in layout.runs.iter().zip(kinds) {
            if layout.run_kind(r).ok() != Some(kind) {
                return Err(HexError::Parse {
                    line,
                    msg: "kind does not match the endpoints".into(),
                });
            }
        }
        Ok(layout)
    }
}

/// `polyline <id> x1,y1 x2,y2 …` lines, one per run.
pub fn polylines_to_string(lines: &[Vec<Xy>]) -> String {
    let mut out = String::new();
    for (id, poly) in lines.iter().enumerate() {
        out.push_str(&format!("polyline {id}"));
        for (x, y) in poly {
            out.push_str(&format!(" {x},{y}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_polylines(text: &str) -> Result<Vec<Vec<Xy>>, HexError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let err = || HexError::Parse {
            line: i + 1,
            msg: "expected `polyline <id> x,y …`".into(),
        };
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut toks = body.split_whitespace();
        if toks.next() != Some("polyline")
            || toks.next().and_then(|t| t.parse::<usize>().ok()).is_none()
        {
            return Err(err());
        }
        let poly = toks
            .map(|t| {
                let (x, y) = t.split_once(',')?;
                Some((x.parse().ok()?, y.parse().ok()?))
            })
            .collect::<Option<Vec<Xy>>>()
            .ok_or_else(err)?;
        lines.push(poly);
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::GridPoint;

    fn ortho(points: &[(i64, i64)], edges: &[(usize, usize)]) -> OrthoLayout {
        OrthoLayout {
            positions: points.iter().map(|&(x, y)| GridPoint::new(x, y)).collect(),
            edges: edges.to_vec(),
            root: 0,
        }
    }

    #[test]
    fn lattice_positions() {
        let h = ortho_to_hex(&ortho(&[(0, 0), (1, 2)], &[]));
        assert_eq!(h.positions[0].xy(), (0, 0));
        assert_eq!(h.positions[1], HexPoint::primary(2, 1));
        assert_eq!(h.positions[1].xy(), (8, 4));
        assert_eq!(HexPoint::backup(2, 1).xy(), (8, 5));
    }

    #[test]
    fn unit_step_expansions() {
        let v = expand_edge(
            HexPoint::primary(0, 0),
            HexPoint::primary(1, 0),
            Lane::Lower,
        )
        .unwrap();
        assert_eq!(v, vec![(0, 0), (0, 1), (2, 2)]);
        let u = expand_edge(
            HexPoint::primary(0, 0),
            HexPoint::primary(0, 1),
            Lane::Lower,
        )
        .unwrap();
        assert_eq!(u, vec![(0, 0), (2, -1), (4, 0)]);
        let upper = expand_edge(
            HexPoint::primary(0, 0),
            HexPoint::primary(0, 1),
            Lane::Upper,
        )
        .unwrap();
        assert_eq!(upper, vec![(0, 0), (0, 1), (2, 2), (4, 1), (4, 0)]);
        let back = expand_edge(
            HexPoint::primary(0, 2),
            HexPoint::primary(0, 0),
            Lane::Lower,
        )
        .unwrap();
        assert_eq!(back, vec![(8, 0), (6, -1), (4, 0), (2, -1), (0, 0)]);
        let p = HexPoint::primary(3, 3);
        assert_eq!(expand_edge(p, p, Lane::Lower).unwrap(), vec![p.xy()]);
        assert!(expand_edge(
            HexPoint::primary(0, 0),
            HexPoint::primary(1, 1),
            Lane::Lower
        )
        .is_err());
    }

    #[test]
    fn lower_wave_dips_through_backups_of_the_row_above() {
        let u = expand_edge(
            HexPoint::primary(2, 0),
            HexPoint::primary(2, 1),
            Lane::Lower,
        )
        .unwrap();
        assert_eq!(u[1], HexPoint::backup(1, 1).xy());
    }

    #[test]
    fn bend_counts() {
        assert_eq!(polyline_bends(&[(0, 0)]), 0);
        assert_eq!(polyline_bends(&[(0, 0), (0, 1), (2, 2)]), 1);
        let h = ortho_to_hex(&ortho(&[(0, 0), (0, 1)], &[(0, 1)]));
        assert_eq!(
            count_bends(&h).unwrap(),
            BendCount {
                total: 1,
                max_per_edge: 1
            }
        );
    }

    #[test]
    fn area_of_single_node_and_k2() {
        assert_eq!(hex_area(&ortho_to_hex(&ortho(&[(0, 0)], &[]))).unwrap(), 1);
        let k2 = ortho_to_hex(&ortho(&[(0, 0), (0, 1)], &[(0, 1)]));
        assert_eq!(hex_area(&k2).unwrap(), 9);
        assert!(hex_area(&k2).unwrap() <= 8 * 2);
    }

    #[test]
    fn left_going_child_is_separated() {
        // root above a junction with one child to the left and one to the right
        let l = ortho(&[(1, 0), (1, 1), (0, 1), (2, 1)], &[(0, 1), (1, 2), (1, 3)]);
        let h = ortho_to_hex(&l);
        assert!(check_hex_valid(&h)
            .iter()
            .any(|v| v.to_string().starts_with("edge overlap")));
        let fixed = resolve_overlaps(&h).unwrap();
        assert!(
            check_hex_valid(&fixed).is_empty(),
            "{:?}",
            check_hex_valid(&fixed)
        );
        assert_eq!(fixed.positions.len(), 4);
        assert_eq!(fixed.runs[1].lane, Lane::Upper);
    }

    #[test]
    fn clean_layout_is_unchanged() {
        let h = ortho_to_hex(&ortho(&[(0, 0), (0, 1), (1, 1)], &[(0, 1), (1, 2)]));
        assert!(check_hex_valid(&h).is_empty());
        assert_eq!(resolve_overlaps(&h).unwrap(), h);
    }

    #[test]
    fn planted_polyline_violations() {
        let slope_one = vec![vec![(0, 0), (1, 1)]];
        assert!(check_polylines(&slope_one)[0]
            .to_string()
            .starts_with("illegal slope"));
        let shared = vec![vec![(0, 0), (0, 1), (2, 2)], vec![(4, 1), (2, 2), (0, 1)]];
        assert!(check_polylines(&shared)
            .iter()
            .any(|v| v.to_string().starts_with("edge overlap")));
    }

    #[test]
    fn serialization_round_trips() {
        let l = ortho(&[(1, 0), (1, 1), (0, 1), (2, 1)], &[(0, 1), (1, 2), (1, 3)]);
        let h = resolve_overlaps(&ortho_to_hex(&l)).unwrap();
        let text = h.to_string();
        assert!(text.contains("kind=U lane=upper"));
        assert_eq!(text.parse::<HexLayout>().unwrap(), h);
        let bad = text.replace("kind=V", "kind=U");
        assert!(bad.parse::<HexLayout>().is_err());

        let polys = h.expand().unwrap();
        assert_eq!(
            parse_polylines(&polylines_to_string(&polys)).unwrap(),
            polys
        );
    }

    #[test]
    fn descriptor_size_is_three_fields_per_edge() {
        let h = ortho_to_hex(&ortho(&[(0, 0), (0, 1), (1, 1)], &[(0, 1), (1, 2)]));
        assert_eq!(h.descriptor_fields(), 6);
    }
}
