//! Continuous-time quantum walks on signed, weighted graphs: perfect state
//! transfer checks, hypercube routing, engineered chains, signed corona
//! products, qudit transfer and tunable-coupler estimates.

pub mod chain;
pub mod cli;
pub mod corona;
pub mod graph;
pub mod io;
pub mod qudit;
pub mod routing;
pub mod spectral;
pub mod transmon;
