//! Radial drawings with three edge directions.
//!
//! The central junction sends its three edges at −90°, 30° and 150°. A node
//! reached along direction θ sends its two other edges along θ − 60° and
//! θ + 60°, so every edge is parallel to one of three directions. Edge
//! lengths shrink by a constant ratio per level; below
//! [`trident_ratio_bound`] the drawing stays free of crossings.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geometry::{polyline_conflicts, Conflict, Point};
use crate::tree::{validate_tree, DeltaTree, NodeId, TreeError};

pub const DEFAULT_RATIO: f64 = 0.45;

/// Largest admissible shrink ratio, `(√3·√(4√3 + 1) − √3) / 6`.
pub fn trident_ratio_bound() -> f64 {
    let s3 = 3f64.sqrt();
    (s3 * (4.0 * s3 + 1.0).sqrt() - s3) / 6.0
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadialError {
    #[error("ratio {ratio} is outside (0, {bound:.4})")]
    RatioOutOfRange { ratio: f64, bound: f64 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialLayout {
    pub positions: Vec<Point>,
    /// parent to child, away from the center
    pub edges: Vec<(NodeId, NodeId)>,
    pub center: NodeId,
}

impl RadialLayout {
    pub fn segments(&self) -> Vec<Vec<Point>> {
        self.edges
            .iter()
            .map(|&(a, b)| vec![self.positions[a], self.positions[b]])
            .collect()
    }
}

/// The junction of minimum eccentricity, lowest id on ties. `None` for a
/// tree without junctions.
pub fn center_junction(t: &DeltaTree) -> Option<NodeId> {
    let adj = t.adjacency();
    t.junction_ids()
        .min_by_key(|&j| (bfs_depths(&adj, j).into_iter().max().unwrap_or(0), j))
}

fn bfs_depths(adj: &[Vec<NodeId>], start: NodeId) -> Vec<usize> {
    let mut depth = vec![usize::MAX; adj.len()];
    depth[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    depth
}

/// Draws `t` around its center junction. The deepest edges have length 1
/// and each level closer to the center is longer by a factor `1 / ratio`.
pub fn layout_radial_trident(t: &DeltaTree, ratio: f64) -> Result<RadialLayout, RadialError> {
    let bound = trident_ratio_bound();
    if !(ratio > 0.0 && ratio < bound) {
        return Err(RadialError::RatioOutOfRange { ratio, bound });
    }
    let problems = validate_tree(t);
    if !problems.is_empty() {
        return Err(TreeError::Invalid(problems).into());
    }
    let Some(center) = center_junction(t) else {
        let leaves: Vec<NodeId> = t.leaf_ids().collect();
        let mut positions = vec![Point::new(0.0, 0.0); t.node_count()];
        positions[leaves[1]] = Point::new(1.0, 0.0);
        return Ok(RadialLayout {
            positions,
            edges: vec![(leaves[0], leaves[1])],
            center: leaves[0],
        });
    };
    let links = t.links();
    let adj = t.adjacency();
    let depth_of = bfs_depths(&adj, center);
    let deepest = depth_of.iter().copied().max().unwrap_or(1);
    let length = |level: usize| ratio.powi(level as i32 - (deepest as i32 - 1));

    let mut positions = vec![Point::new(0.0, 0.0); t.node_count()];
    let mut edges = Vec::with_capacity(t.node_count() - 1);
    // (node, parent, incoming direction in degrees)
    let mut queue: VecDeque<(NodeId, Option<NodeId>, f64)> = VecDeque::from([(center, None, 0.0)]);
    while let Some((v, parent, theta)) = queue.pop_front() {
        let outgoing: Vec<NodeId> = links[v]
            .iter()
            .flatten()
            .map(|p| p.node)
            .filter(|&w| Some(w) != parent)
            .collect();
        let dirs: Vec<f64> = match parent {
            None => vec![-90.0, 30.0, 150.0],
            Some(_) => vec![theta - 60.0, theta + 60.0],
        };
        let len = length(depth_of[v]);
        for (&w, &dir) in outgoing.iter().zip(&dirs) {
            let rad = dir.to_radians();
            let p = positions[v];
            positions[w] = Point::new(p.x + len * rad.cos(), p.y + len * rad.sin());
            edges.push((v, w));
            queue.push_back((w, Some(v), dir));
        }
    }
    Ok(RadialLayout {
        positions,
        edges,
        center,
    })
}

/// Crossings and overlaps among the straight edges of a radial drawing.
pub fn radial_conflicts(l: &RadialLayout) -> Vec<Conflict> {
    polyline_conflicts(&l.segments())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::recognition::eliminate;
    use crate::tree::build_delta_tree;

    #[test]
    fn bound_value() {
        let b = trident_ratio_bound();
        assert!((b - 0.52407).abs() < 1e-4, "{b}");
        assert!(DEFAULT_RATIO < b);
    }

    #[test]
    fn k2_is_a_unit_segment() {
        let g = Graph::complete(2);
        let t = build_delta_tree(&g, &eliminate(&g).unwrap()).unwrap();
        let l = layout_radial_trident(&t, DEFAULT_RATIO).unwrap();
        assert_eq!(l.edges.len(), 1);
        assert_eq!(l.positions[0], Point::new(0.0, 0.0));
        assert_eq!(l.positions[1], Point::new(1.0, 0.0));
    }

    #[test]
    fn k3_spreads_at_120_degrees() {
        let g = Graph::complete(3);
        let t = build_delta_tree(&g, &eliminate(&g).unwrap()).unwrap();
        let l = layout_radial_trident(&t, DEFAULT_RATIO).unwrap();
        let c = l.positions[l.center];
        let angles: Vec<f64> = l
            .edges
            .iter()
            .map(|&(_, b)| {
                (l.positions[b].y - c.y)
                    .atan2(l.positions[b].x - c.x)
                    .to_degrees()
            })
            .collect();
        for i in 0..3 {
            let d = (angles[i] - angles[(i + 1) % 3]).rem_euclid(360.0);
            assert!(
                (d - 120.0).abs() < 1e-9 || (d - 240.0).abs() < 1e-9,
                "{angles:?}"
            );
        }
    }

    #[test]
    fn ratio_must_be_below_the_bound() {
        let t = DeltaTree::full_balanced(1);
        assert!(layout_radial_trident(&t, 0.0).is_err());
        assert!(layout_radial_trident(&t, 0.53).is_err());
        assert!(layout_radial_trident(&t, 0.52).is_ok());
    }

    #[test]
    fn balanced_trees_are_crossing_free() {
        for depth in 0..=7 {
            let t = DeltaTree::full_balanced(depth);
            for ratio in [0.3, DEFAULT_RATIO, 0.52] {
                let l = layout_radial_trident(&t, ratio).unwrap();
                assert!(
                    radial_conflicts(&l).is_empty(),
                    "depth {depth} ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn deepest_edges_have_unit_length() {
        let t = DeltaTree::full_balanced(3);
        let l = layout_radial_trident(&t, DEFAULT_RATIO).unwrap();
        let shortest = l
            .edges
            .iter()
            .map(|&(a, b)| l.positions[a].dist(l.positions[b]))
            .fold(f64::INFINITY, f64::min);
        assert!((shortest - 1.0).abs() < 1e-9);
    }
}
