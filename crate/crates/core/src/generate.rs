//! Seeded generators: random distance-hereditary graphs grown from `K2`, and
//! `G(n, p)` graphs for negative tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{ExtensionKind, Graph, GraphError, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("weights must be non-negative and sum to 1, got {0:?}")]
    BadWeights([f64; 3]),
    #[error("probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("cannot parse weights `{0}`: expected `p,t,f`")]
    WeightSyntax(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionStep {
    pub kind: ExtensionKind,
    pub new_vertex: Vertex,
    pub anchor_vertex: Vertex,
}

/// How a graph was grown: the initial `K2` and the extensions applied to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionTrace {
    pub base: (Vertex, Vertex),
    pub steps: Vec<ExtensionStep>,
}

impl ExtensionTrace {
    /// Replays the trace starting from `K2` on `base`.
    pub fn replay(&self) -> Result<Graph, GraphError> {
        let mut g = Graph::from_edges([self.base])?;
        for step in &self.steps {
            g.extend(step.kind, step.new_vertex, step.anchor_vertex)?;
        }
        Ok(g)
    }
}

impl fmt::Display for ExtensionTrace {
    /// Comment lines, so a trace can ride along with an edge list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# K2: {} {}", self.base.0, self.base.1)?;
        for s in &self.steps {
            let kind = match s.kind {
                ExtensionKind::Pendant => "pendant",
                ExtensionKind::TrueTwin => "true-twin",
                ExtensionKind::FalseTwin => "false-twin",
            };
            writeln!(f, "# {kind} {} of {}", s.new_vertex, s.anchor_vertex)?;
        }
        Ok(())
    }
}

/// Probabilities of choosing pendant, true-twin and false-twin extensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionWeights {
    pub pendant: f64,
    pub true_twin: f64,
    pub false_twin: f64,
}

impl ExtensionWeights {
    pub const UNIFORM: Self = Self {
        pendant: 1.0 / 3.0,
        true_twin: 1.0 / 3.0,
        false_twin: 1.0 / 3.0,
    };

    pub fn new(pendant: f64, true_twin: f64, false_twin: f64) -> Result<Self, GenError> {
        let w = [pendant, true_twin, false_twin];
        let sum: f64 = w.iter().sum();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-6 {
            return Err(GenError::BadWeights(w));
        }
        Ok(Self {
            pendant,
            true_twin,
            false_twin,
        })
    }

    fn pick(&self, r: f64) -> ExtensionKind {
        // rounding can leave r past the cumulative sum; fall back to the last
        // kind with positive weight
        if r < self.pendant {
            ExtensionKind::Pendant
        } else if r < self.pendant + self.true_twin {
            ExtensionKind::TrueTwin
        } else if self.false_twin > 0.0 {
            ExtensionKind::FalseTwin
        } else if self.true_twin > 0.0 {
            ExtensionKind::TrueTwin
        } else {
            ExtensionKind::Pendant
        }
    }
}

impl Default for ExtensionWeights {
    fn default() -> Self {
        Self::UNIFORM
    }
}

impl FromStr for ExtensionWeights {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| GenError::WeightSyntax(s.to_owned()))?;
        match parts[..] {
            [p, t, f] => Self::new(p, t, f),
            _ => Err(GenError::WeightSyntax(s.to_owned())),
        }
    }
}

/// A random distance-hereditary graph on `0..n`, grown from `K2 = {0, 1}` by
/// one-vertex extensions with uniformly chosen anchors.
pub fn gen_dh_random(
    n: usize,
    seed: u64,
    weights: ExtensionWeights,
) -> Result<(Graph, ExtensionTrace), GenError> {
    if n < 2 {
        return Err(GenError::TooFewVertices(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::from_edges([(0, 1)]).expect("K2");
    let mut steps = Vec::with_capacity(n - 2);
    for new in 2..n as Vertex {
        let anchor = rng.gen_range(0..new);
        let kind = weights.pick(rng.gen::<f64>());
        g.extend(kind, new, anchor)
            .expect("anchor exists and label is fresh");
        steps.push(ExtensionStep {
            kind,
            new_vertex: new,
            anchor_vertex: anchor,
        });
    }
    Ok((
        g,
        ExtensionTrace {
            base: (0, 1),
            steps,
        },
    ))
}

/// Erdős–Rényi graph: each pair of `0..n` independently with probability `p`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::BadProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n as Vertex;
    let mut g = Graph::with_vertices(0..n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).expect("u != v");
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case_is_k2() {
        for seed in 0..5 {
            let (g, trace) = gen_dh_random(2, seed, ExtensionWeights::UNIFORM).unwrap();
            assert_eq!(g, Graph::complete(2));
            assert!(trace.steps.is_empty());
        }
    }

    #[test]
    fn pendant_only_weights_give_p3() {
        let w = ExtensionWeights::new(1.0, 0.0, 0.0).unwrap();
        let (g, _) = gen_dh_random(3, 11, w).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.vertex_count(), 3);
        assert!(g.vertices().any(|v| g.degree(v) == 2));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(
            gen_dh_random(1, 0, ExtensionWeights::UNIFORM).unwrap_err(),
            GenError::TooFewVertices(1)
        );
        assert!(ExtensionWeights::new(0.5, 0.5, 0.5).is_err());
        assert!(ExtensionWeights::new(-0.5, 1.0, 0.5).is_err());
        assert!("0.2,0.8".parse::<ExtensionWeights>().is_err());
        assert_eq!("1,0,0".parse::<ExtensionWeights>().unwrap().pendant, 1.0);
        assert!(gen_gnp(4, 1.5, 0).is_err());
    }

    #[test]
    fn trace_replays_to_the_graph() {
        for seed in 0..20 {
            let (g, trace) = gen_dh_random(12, seed, ExtensionWeights::UNIFORM).unwrap();
            assert_eq!(trace.replay().unwrap(), g);
            assert_eq!(g.vertex_count(), 2 + trace.steps.len());
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let a = gen_dh_random(40, 99, ExtensionWeights::UNIFORM).unwrap();
        let b = gen_dh_random(40, 99, ExtensionWeights::UNIFORM).unwrap();
        assert_eq!(a, b);
        assert_eq!(gen_gnp(20, 0.3, 5).unwrap(), gen_gnp(20, 0.3, 5).unwrap());
    }

    #[test]
    fn gnp_extremes_and_density() {
        assert_eq!(gen_gnp(4, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gen_gnp(4, 1.0, 1).unwrap(), Graph::complete(4));
        let m = gen_gnp(30, 0.5, 1).unwrap().edge_count();
        assert!((170..=265).contains(&m), "edge count {m}");
    }
}
