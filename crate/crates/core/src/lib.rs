//! Follow-spam detection on directed follow graphs.
//!
//! Users are described by the triad significance profile of their ego
//! network and by social-status features (status, positive link
//! probability, followee status), then classified with decision trees or
//! random forests.

pub mod classifier;
pub mod ego;
pub mod error;
pub mod features;
pub mod graph;
pub mod labels;
pub mod metrics;
pub mod status;
pub mod synth;
pub mod triad;
pub mod tsp;

pub use error::{Error, Result};
pub use graph::{load_edge_list, DirectedGraph, IdTable, LoadedGraph, NodeId};
pub use labels::{Label, LabelFile};
pub use triad::{census, census_bruteforce, TriadCensus, TriadClass};
