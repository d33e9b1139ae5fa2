#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(any(feature = "std", test)), no_std)]
extern crate alloc;

pub mod covariant;
pub mod disturb;
pub mod encode;
pub mod entropy;
pub mod error;
pub mod infocap;
pub mod linalg;
pub mod majorize;
pub mod measure;
pub mod optimize;
pub mod random;
pub mod state;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use state::{DensityOperator, ProbVector, SpectrumVector};
