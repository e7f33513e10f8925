//! Distance-hereditary graphs and their Δ-confluent drawings.
//!
//! The pipeline runs: [`recognition::eliminate`] a graph into a pruning
//! sequence, turn the sequence into a [`tree::DeltaTree`] of Δ- and
//! Λ-junctions, lay the tree out with [`ortho`], move it onto the hexagonal
//! grid with [`hex`] (or draw it radially with [`radial`]), and emit SVG
//! tracks with [`render`].

pub mod generate;
pub mod geometry;
pub mod graph;
pub mod hex;
pub mod ortho;
pub mod radial;
pub mod recognition;
pub mod render;
pub mod tree;

pub use generate::{
    gen_dh_random, gen_gnp, ExtensionStep, ExtensionTrace, ExtensionWeights, GenError,
};
pub use graph::{
    graph_equals, parse_graph, DistanceMatrix, ExtensionKind, Graph, GraphError, ParseError, Vertex,
};
pub use hex::{HexLayout, HexPoint, Lane, Slot};
pub use ortho::{GridPoint, OrthoLayout, RootedBinaryTree};
pub use radial::RadialLayout;
pub use recognition::{
    apply_sequence_forward, eliminate, is_distance_hereditary_oracle, max_dh_subgraph_bruteforce,
    EliminationKind, EliminationSequence, EliminationStep, RecognitionError,
};
pub use render::{RenderOptions, Theme};
pub use tree::{DeltaTree, JunctionKind, NodeId, TreeNode};
