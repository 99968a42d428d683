//! Coded distributed computation: the master encodes `K` data blocks into
//! `N` shares, workers apply `f` entrywise, and the master rebuilds
//! `f(X_j)` from whichever results arrive.

mod decode;
mod encoding;
mod nodes;
mod worker;

pub use decode::{bacc_reconstruct, bscc_fit, bscc_reconstruct, BetaPolicy, Reconstruction};
pub use encoding::{
    berrut_basis, encode, lagrange_basis, make_shares, BasisKind, Dataset, EncodingConfig, Share,
};
pub use nodes::{chebyshev_nodes_first_kind, chebyshev_nodes_second_kind};
pub use worker::{worker_eval, TargetFunction, WorkerResult};
