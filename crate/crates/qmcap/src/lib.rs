//! File formats, parallel Monte Carlo, property suites and counterexample
//! search on top of `qmcap-core`.

pub mod io;
pub mod mc;
pub mod search;
pub mod suites;

pub use qmcap_core as core;
