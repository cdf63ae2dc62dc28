//! tractconn: a tractogram-to-connectome engine.
//!
//! The pipeline classifies individual tractography streamlines into
//! gray-matter region-pair classes with a multi-task point-cloud network,
//! assembles structural connectomes for two parcellation schemes at once,
//! and evaluates them with similarity, reproducibility, and
//! network-topology measures. A synthetic-brain generator makes the whole
//! pipeline runnable and verifiable without any scanner data.
//!
//! Module map:
//!
//! * [`io`] — TCK tractogram, assignment, connectome CSV, and checkpoint codecs
//! * [`geometry`] — resampling, normalization, orientation flips
//! * [`labels`] — region-pair ↔ class-label codec per parcellation scheme
//! * [`net`] — the multi-task point-cloud classifier (forward, exact
//!   gradients, Adam, training loop, batched inference)
//! * [`connectome`] — streamline-count matrix assembly and difference maps
//! * [`stats`] — classification metrics, connectome similarity (Pearson,
//!   log-Euclidean), Wilcoxon signed-rank, intra/inter and test-retest reports
//! * [`graph`] — the six weighted network measures over connectomes
//! * [`synth`] — synthetic labeled cohorts for end-to-end runs
//! * [`cli`] — the `tractconn` command-line entry points

pub mod cli;
pub mod connectome;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod labels;
pub mod net;
pub mod stats;
pub mod synth;

pub use connectome::Connectome;
pub use geometry::{BoundingBox, FixedStreamline, Point3};
pub use io::tck::{Streamline, TckHeader, Tractogram};
pub use labels::{NodePair, ParcellationScheme, StreamlineClass};
pub use net::{Architecture, ModelParams, TrainingConfig};
