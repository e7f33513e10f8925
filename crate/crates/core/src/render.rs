//! SVG output of Δ-confluent drawings.
//!
//! Each tree edge becomes a track. Near a junction the tracks stop short by
//! the junction radius, and every permitted port pair is joined by a cubic
//! Bézier connector that leaves each track along its own direction, so a
//! train running through the junction never meets a corner. Λ-junctions get
//! no connector between their tails.
//!
//! The same [`TrackDrawing`] model is produced by [`build_drawing`] and by
//! [`parse_svg`], so the smoothness and crossing checks run on either.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{polyline_conflicts, Conflict, Point};
use crate::graph::Vertex;
use crate::hex::{HexError, HexLayout};
use crate::ortho::OrthoLayout;
use crate::radial::RadialLayout;
use crate::tree::{validate_tree, DeltaTree, JunctionKind, NodeId, TreeError, TreeNode};

/// Handle length of a connector, as a fraction of the junction radius.
const HANDLE: f64 = 0.55;
/// Sample intervals per connector.
const SAMPLES: usize = 24;
const DOT_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Theme {
    #[default]
    Light,
    Dark,
}

struct Palette {
    background: &'static str,
    track: &'static str,
    node: &'static str,
    label: &'static str,
}

impl Theme {
    fn palette(self) -> Palette {
        match self {
            Theme::Light => Palette {
                background: "#ffffff",
                track: "#1f2937",
                node: "#2563eb",
                label: "#111827",
            },
            Theme::Dark => Palette {
                background: "#111827",
                track: "#e5e7eb",
                node: "#60a5fa",
                label: "#f9fafb",
            },
        }
    }
}

impl FromStr for Theme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "light" => Ok(Theme::Light),
            "dark" => Ok(Theme::Dark),
            other => Err(format!("unknown theme `{other}` (expected light or dark)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// pixels per layout unit
    pub cell_size: f64,
    pub junction_radius: f64,
    pub labels: bool,
    pub theme: Theme,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            cell_size: 24.0,
            junction_radius: 6.0,
            labels: false,
            theme: Theme::Light,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("cell size and junction radius must be positive")]
    BadOptions,
    #[error(
        "junction radius {radius} must be below {limit:.2}, half the shortest track at a junction"
    )]
    RadiusTooLarge { radius: f64, limit: f64 },
    #[error("layout does not match the tree: {0}")]
    LayoutMismatch(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Hex(#[from] HexError),
    #[error("malformed SVG: {0}")]
    Svg(String),
}

/// Any of the supported layouts.
#[derive(Debug, Clone, Copy)]
pub enum LayoutRef<'a> {
    Ortho(&'a OrthoLayout),
    Hex(&'a HexLayout),
    Radial(&'a RadialLayout),
}

impl<'a> From<&'a OrthoLayout> for LayoutRef<'a> {
    fn from(l: &'a OrthoLayout) -> Self {
        LayoutRef::Ortho(l)
    }
}

impl<'a> From<&'a HexLayout> for LayoutRef<'a> {
    fn from(l: &'a HexLayout) -> Self {
        LayoutRef::Hex(l)
    }
}

impl<'a> From<&'a RadialLayout> for LayoutRef<'a> {
    fn from(l: &'a RadialLayout) -> Self {
        LayoutRef::Radial(l)
    }
}

type Embedding = (Vec<Point>, Vec<(NodeId, NodeId, Vec<Point>)>);

fn embed(layout: LayoutRef<'_>) -> Result<Embedding, RenderError> {
    let grid = |x: i64, y: i64| Point::new(x as f64, y as f64);
    Ok(match layout {
        LayoutRef::Ortho(l) => {
            let pts: Vec<Point> = l.positions.iter().map(|p| grid(p.x, p.y)).collect();
            let edges = l
                .edges
                .iter()
                .map(|&(a, b)| (a, b, vec![pts[a], pts[b]]))
                .collect();
            (pts, edges)
        }
        LayoutRef::Hex(h) => {
            let pts = h
                .positions
                .iter()
                .map(|p| grid(p.xy().0, p.xy().1))
                .collect();
            let polys = h.expand()?;
            let edges = h
                .runs
                .iter()
                .zip(polys)
                .map(|(r, poly)| {
                    (
                        r.a,
                        r.b,
                        poly.into_iter().map(|(x, y)| grid(x, y)).collect(),
                    )
                })
                .collect();
            (pts, edges)
        }
        LayoutRef::Radial(l) => {
            let edges = l
                .edges
                .iter()
                .map(|&(a, b)| (a, b, vec![l.positions[a], l.positions[b]]))
                .collect();
            (l.positions.clone(), edges)
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub a: NodeId,
    pub b: NodeId,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Connector {
    pub junction: NodeId,
    pub ports: (u8, u8),
    pub from: Point,
    pub c1: Point,
    pub c2: Point,
    pub to: Point,
}

impl Connector {
    pub fn point_at(&self, t: f64) -> Point {
        let s = 1.0 - t;
        let (a, b, c, d) = (s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t);
        Point::new(
            a * self.from.x + b * self.c1.x + c * self.c2.x + d * self.to.x,
            a * self.from.y + b * self.c1.y + c * self.c2.y + d * self.to.y,
        )
    }

    /// `intervals + 1` points from `from` to `to`.
    pub fn sample(&self, intervals: usize) -> Vec<Point> {
        (0..=intervals)
            .map(|i| self.point_at(i as f64 / intervals as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dot {
    pub node: NodeId,
    pub vertex: Vertex,
    pub at: Point,
}

/// Pixel-space drawing: trimmed tracks, junction connectors and leaf dots.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackDrawing {
    pub width: f64,
    pub height: f64,
    pub tracks: Vec<Track>,
    pub junctions: Vec<(NodeId, JunctionKind)>,
    pub connectors: Vec<Connector>,
    pub dots: Vec<Dot>,
}

fn unit(from: Point, to: Point) -> (f64, f64) {
    let d = from.dist(to);
    ((to.x - from.x) / d, (to.y - from.y) / d)
}

fn shift(p: Point, (dx, dy): (f64, f64), len: f64) -> Point {
    Point::new(p.x + dx * len, p.y + dy * len)
}

/// Lays out tracks and connectors in pixels.
pub fn build_drawing(
    t: &DeltaTree,
    layout: LayoutRef<'_>,
    opts: &RenderOptions,
) -> Result<TrackDrawing, RenderError> {
    if !(opts.cell_size > 0.0 && opts.junction_radius > 0.0) {
        return Err(RenderError::BadOptions);
    }
    let problems = validate_tree(t);
    if !problems.is_empty() {
        return Err(TreeError::Invalid(problems).into());
    }
    let (pts, edges) = embed(layout)?;
    if pts.len() != t.node_count() || edges.len() != t.edges().len() {
        return Err(RenderError::LayoutMismatch(format!(
            "{} nodes and {} edges for a tree with {} and {}",
            pts.len(),
            edges.len(),
            t.node_count(),
            t.edges().len()
        )));
    }
    let (min_x, min_y, max_x, max_y) = pts
        .iter()
        .chain(edges.iter().flat_map(|e| e.2.iter()))
        .fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), p| (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y)),
        );
    let cell = opts.cell_size;
    let px = |p: Point| Point::new((p.x - min_x) * cell + cell, (p.y - min_y) * cell + cell);
    let width = (max_x - min_x) * cell + 2.0 * cell;
    let height = (max_y - min_y) * cell + 2.0 * cell;

    let links = t.links();
    let is_junction = |id: NodeId| !t.nodes()[id].is_leaf();
    let r = opts.junction_radius;
    let mut shortest = f64::INFINITY;
    // (junction, slot) -> (trimmed end, unit direction toward the junction)
    let mut ends: HashMap<(NodeId, u8), (Point, (f64, f64))> = HashMap::new();
    let mut tracks = Vec::with_capacity(edges.len());
    for (a, b, poly) in edges {
        if a >= pts.len() || b >= pts.len() || !links[a].iter().flatten().any(|p| p.node == b) {
            return Err(RenderError::LayoutMismatch(format!(
                "edge {a}-{b} is not a tree edge"
            )));
        }
        let mut points: Vec<Point> = poly.into_iter().map(px).collect();
        points.dedup();
        if points.len() < 2 {
            return Err(RenderError::LayoutMismatch(format!(
                "edge {a}-{b} has zero length"
            )));
        }
        for (node, at_start) in [(a, true), (b, false)] {
            if !is_junction(node) {
                continue;
            }
            let other = if at_start { b } else { a };
            let slot = (0..3u8)
                .find(|&s| links[node][s as usize].map(|p| p.node) == Some(other))
                .expect("tree edge");
            let k = points.len();
            let (end, next) = if at_start {
                (points[0], points[1])
            } else {
                (points[k - 1], points[k - 2])
            };
            let len = end.dist(next);
            shortest = shortest.min(len);
            let toward_next = unit(end, next);
            let trimmed = shift(end, toward_next, r);
            let toward_junction = (-toward_next.0, -toward_next.1);
            ends.insert((node, slot), (trimmed, toward_junction));
            if at_start {
                points[0] = trimmed;
            } else {
                points[k - 1] = trimmed;
            }
        }
        tracks.push(Track { a, b, points });
    }
    if shortest.is_finite() && r >= shortest / 2.0 {
        return Err(RenderError::RadiusTooLarge {
            radius: r,
            limit: shortest / 2.0,
        });
    }
    let mut junctions = Vec::new();
    let mut connectors = Vec::new();
    let mut dots = Vec::new();
    for (id, node) in t.nodes().iter().enumerate() {
        match *node {
            TreeNode::Leaf { vertex } => dots.push(Dot {
                node: id,
                vertex,
                at: px(pts[id]),
            }),
            TreeNode::Junction { kind } => {
                junctions.push((id, kind));
                for (p, q) in [(0u8, 1u8), (0, 2), (1, 2)] {
                    if !kind.permits(p, q) {
                        continue;
                    }
                    let (from, dp) = ends[&(id, p)];
                    let (to, dq) = ends[&(id, q)];
                    connectors.push(Connector {
                        junction: id,
                        ports: (p, q),
                        from,
                        c1: shift(from, dp, HANDLE * r),
                        c2: shift(to, dq, HANDLE * r),
                        to,
                    });
                }
            }
        }
    }
    Ok(TrackDrawing {
        width,
        height,
        tracks,
        junctions,
        connectors,
        dots,
    })
}

/// Renders `t` drawn by `layout` as an SVG document.
pub fn render_svg(
    t: &DeltaTree,
    layout: LayoutRef<'_>,
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    Ok(build_drawing(t, layout, opts)?.to_svg(opts))
}

fn f2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn xy(p: Point) -> String {
    format!("{} {}", f2(p.x), f2(p.y))
}

impl TrackDrawing {
    pub fn to_svg(&self, opts: &RenderOptions) -> String {
        let pal = opts.theme.palette();
        let (w, h) = (f2(self.width), f2(self.height));
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<g id="drawing">"#);
        let _ = writeln!(
            s,
            r#"<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="{}"/>"#,
            pal.background
        );
        let _ = writeln!(
            s,
            r#"<g class="tracks" fill="none" stroke="{}" stroke-width="2" stroke-linecap="round">"#,
            pal.track
        );
        for t in &self.tracks {
            let mut d = format!("M {}", xy(t.points[0]));
            for p in &t.points[1..] {
                let _ = write!(d, " L {}", xy(*p));
            }
            let _ = writeln!(
                s,
                r#"<path id="edge-{}-{}" class="track" d="{d}"/>"#,
                t.a, t.b
            );
        }
        for &(id, kind) in &self.junctions {
            let kind_attrs = match kind {
                JunctionKind::Delta => r#"data-kind="delta""#.to_string(),
                JunctionKind::Lambda { head } => {
                    format!(r#"data-kind="lambda" data-head="{head}""#)
                }
            };
            let _ = writeln!(s, r#"<g id="junction-{id}" class="junction" {kind_attrs}>"#);
            for c in self.connectors.iter().filter(|c| c.junction == id) {
                let _ = writeln!(
                    s,
                    r#"<path class="connector" data-junction="{id}" data-ports="{}-{}" d="M {} C {} {} {}"/>"#,
                    c.ports.0,
                    c.ports.1,
                    xy(c.from),
                    xy(c.c1),
                    xy(c.c2),
                    xy(c.to)
                );
            }
            let _ = writeln!(s, "</g>");
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r#"<g class="nodes" fill="{}">"#, pal.node);
        for d in &self.dots {
            let _ = writeln!(
                s,
                r#"<circle id="node-{}" class="leaf" data-vertex="{}" cx="{}" cy="{}" r="{}"/>"#,
                d.node,
                d.vertex,
                f2(d.at.x),
                f2(d.at.y),
                f2(DOT_RADIUS)
            );
        }
        let _ = writeln!(s, "</g>");
        if opts.labels {
            let _ = writeln!(
                s,
                r#"<g class="labels" fill="{}" font-family="sans-serif" font-size="{}">"#,
                pal.label,
                f2(opts.cell_size * 0.5)
            );
            for d in &self.dots {
                let _ = writeln!(
                    s,
                    r#"<text id="label-{}" x="{}" y="{}">{}</text>"#,
                    d.node,
                    f2(d.at.x + DOT_RADIUS + 2.0),
                    f2(d.at.y - DOT_RADIUS - 2.0),
                    d.vertex
                );
            }
            let _ = writeln!(s, "</g>");
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "</svg>");
        s
    }

    /// Tracks and sampled connectors as polylines.
    pub fn sampled_lines(&self) -> Vec<Vec<Point>> {
        self.tracks
            .iter()
            .map(|t| t.points.clone())
            .chain(self.connectors.iter().map(|c| c.sample(SAMPLES)))
            .collect()
    }

    /// Crossings and overlaps among rendered centerlines. Pieces may touch
    /// only where both end.
    pub fn crossings(&self) -> Vec<Conflict> {
        polyline_conflicts(&self.sampled_lines())
    }

    /// For each connector: the last segment of the track feeding it, the
    /// sampled connector, and the first segment of the track it feeds.
    pub fn permitted_paths(&self) -> Vec<Vec<Point>> {
        let key = |p: Point| ((p.x * 100.0).round() as i64, (p.y * 100.0).round() as i64);
        let mut ends: HashMap<(i64, i64), Point> = HashMap::new();
        for t in &self.tracks {
            let k = t.points.len();
            // the neighbor of each end point along its track
            ends.insert(key(t.points[0]), t.points[1]);
            ends.insert(key(t.points[k - 1]), t.points[k - 2]);
        }
        self.connectors
            .iter()
            .map(|c| {
                let mut path = Vec::with_capacity(SAMPLES + 3);
                path.extend(ends.get(&key(c.from)).copied());
                path.extend(c.sample(SAMPLES));
                path.extend(ends.get(&key(c.to)).copied());
                path
            })
            .collect()
    }

    /// Every polyline a train can follow piecewise: the tracks themselves
    /// and the paths through connectors.
    pub fn smoothness_paths(&self) -> Vec<Vec<Point>> {
        self.tracks
            .iter()
            .map(|t| t.points.clone())
            .chain(self.permitted_paths())
            .collect()
    }
}

/// Largest turn, in degrees, between consecutive segment directions.
pub fn max_turn_degrees(path: &[Point]) -> f64 {
    let dirs: Vec<(f64, f64)> = path
        .windows(2)
        .filter(|w| w[0].dist(w[1]) > 1e-9)
        .map(|w| unit(w[0], w[1]))
        .collect();
    dirs.windows(2)
        .map(|w| {
            let cos = (w[0].0 * w[1].0 + w[0].1 * w[1].1).clamp(-1.0, 1.0);
            cos.acos().to_degrees()
        })
        .fold(0.0, f64::max)
}

/// True iff every turn between consecutive sampled directions stays below
/// `90° − tolerance`.
pub fn check_smoothness(paths: &[Vec<Point>], tolerance_degrees: f64) -> bool {
    paths
        .iter()
        .all(|p| max_turn_degrees(p) < 90.0 - tolerance_degrees)
}

fn attr<'a>(tag: &'a str, name: &str) -> Option<&'a str> {
    let pat = format!(" {name}=\"");
    let start = tag.find(&pat)? + pat.len();
    let len = tag[start..].find('"')?;
    Some(&tag[start..start + len])
}

fn path_points(d: &str) -> Result<Vec<(char, Vec<Point>)>, RenderError> {
    let bad = || RenderError::Svg(format!("unsupported path data `{d}`"));
    let mut out: Vec<(char, Vec<Point>)> = Vec::new();
    let mut nums: Vec<f64> = Vec::new();
    let flush = |cmd: Option<char>,
                 nums: &mut Vec<f64>,
                 out: &mut Vec<(char, Vec<Point>)>|
     -> Result<(), RenderError> {
        if let Some(c) = cmd {
            if nums.len() & 1 == 1 {
                return Err(bad());
            }
            let pts = nums.chunks(2).map(|c| Point::new(c[0], c[1])).collect();
            out.push((c, pts));
        }
        nums.clear();
        Ok(())
    };
    let mut cmd = None;
    for tok in d
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
    {
        match tok {
            "M" | "L" | "C" => {
                flush(cmd, &mut nums, &mut out)?;
                cmd = tok.chars().next();
            }
            _ => nums.push(tok.parse().map_err(|_| bad())?),
        }
    }
    flush(cmd, &mut nums, &mut out)?;
    Ok(out)
}

/// Reads back a document written by [`TrackDrawing::to_svg`].
pub fn parse_svg(text: &str) -> Result<TrackDrawing, RenderError> {
    let mut drawing = TrackDrawing {
        width: 0.0,
        height: 0.0,
        tracks: Vec::new(),
        junctions: Vec::new(),
        connectors: Vec::new(),
        dots: Vec::new(),
    };
    let num = |tag: &str, name: &str| -> Result<f64, RenderError> {
        attr(tag, name)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| RenderError::Svg(format!("missing or bad `{name}`")))
    };
    let mut saw_svg = false;
    for piece in text.split('<').skip(1) {
        let tag = piece.split('>').next().unwrap_or("");
        if tag.starts_with("svg ") {
            saw_svg = true;
            drawing.width = num(tag, "width")?;
            drawing.height = num(tag, "height")?;
        } else if tag.starts_with("g ") && attr(tag, "class") == Some("junction") {
            let id = attr(tag, "id")
                .and_then(|v| v.strip_prefix("junction-"))
                .and_then(|v| v.parse().ok());
            let kind = match (
                attr(tag, "data-kind"),
                attr(tag, "data-head").map(str::parse::<u8>),
            ) {
                (Some("delta"), _) => Some(JunctionKind::Delta),
                (Some("lambda"), Some(Ok(head))) => Some(JunctionKind::Lambda { head }),
                _ => None,
            };
            match (id, kind) {
                (Some(id), Some(kind)) => drawing.junctions.push((id, kind)),
                _ => return Err(RenderError::Svg(format!("bad junction group `{tag}`"))),
            }
        } else if tag.starts_with("path ") {
            let d = attr(tag, "d").ok_or_else(|| RenderError::Svg("path without d".into()))?;
            let cmds = path_points(d)?;
            match attr(tag, "class") {
                Some("track") => {
                    let id = attr(tag, "id")
                        .and_then(|v| v.strip_prefix("edge-"))
                        .unwrap_or("");
                    let (a, b) = id
                        .split_once('-')
                        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                        .ok_or_else(|| RenderError::Svg(format!("bad track id `{id}`")))?;
                    let points: Vec<Point> = cmds.into_iter().flat_map(|c| c.1).collect();
                    if points.len() < 2 {
                        return Err(RenderError::Svg(format!(
                            "track {a}-{b} has fewer than two points"
                        )));
                    }
                    drawing.tracks.push(Track { a, b, points });
                }
                Some("connector") => {
                    let junction = num(tag, "data-junction")? as NodeId;
                    let ports = attr(tag, "data-ports")
                        .and_then(|v| v.split_once('-'))
                        .and_then(|(p, q)| Some((p.parse().ok()?, q.parse().ok()?)))
                        .ok_or_else(|| RenderError::Svg("bad data-ports".into()))?;
                    match &cmds[..] {
                        [('M', m), ('C', c)] if m.len() == 1 && c.len() == 3 => {
                            drawing.connectors.push(Connector {
                                junction,
                                ports,
                                from: m[0],
                                c1: c[0],
                                c2: c[1],
                                to: c[2],
                            })
                        }
                        _ => {
                            return Err(RenderError::Svg("connector must be `M p C p p p`".into()))
                        }
                    }
                }
                _ => {}
            }
        } else if tag.starts_with("circle ") && attr(tag, "class") == Some("leaf") {
            let node = attr(tag, "id")
                .and_then(|v| v.strip_prefix("node-"))
                .and_then(|v| v.parse().ok());
            let vertex = attr(tag, "data-vertex").and_then(|v| v.parse().ok());
            match (node, vertex) {
                (Some(node), Some(vertex)) => drawing.dots.push(Dot {
                    node,
                    vertex,
                    at: Point::new(num(tag, "cx")?, num(tag, "cy")?),
                }),
                _ => return Err(RenderError::Svg(format!("bad leaf circle `{tag}`"))),
            }
        }
    }
    if !saw_svg {
        return Err(RenderError::Svg("no <svg> element".into()));
    }
    Ok(drawing)
}
