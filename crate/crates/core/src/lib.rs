//! Link and knot censuses for planar diagrams of spatial graphs, with
//! emphasis on complete partite graphs.

pub mod bounds;
pub mod census;
pub mod diagram;
pub mod embeddings;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod invariants;
pub mod subgraph;
pub mod tables;

pub use diagram::{Crossing, CrossingKey, Diagram, DiagramFile, Drawing, Orientation, Strand, Violation};
pub use error::{Error, Result};
pub use geometry::Point;
pub use graph::{Cycle, CyclePair, Graph, PartiteGraph};
pub use census::{census, count_knots, count_links, CensusKind, CensusReport, Objective, SearchOptions, Verdict};
pub use embeddings::{fan_embedding, random_embedding, weave_embedding_n1111};
pub use invariants::{conway_a2, linking_number, GaussDiagram, KnotRecord, LinkRecord};
