//! Metric measure spaces, probability metrics, observable diameters and
//! finite group actions.
//!
//! Everything here works on finite data: a space is a dense distance
//! matrix, a measure a probability vector, a group a multiplication table.
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod concentration;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod generators;
pub mod groups;
pub mod lipschitz;
pub mod lp;
pub mod metrics;
pub mod space;

pub use error::{Error, Result};
pub use lipschitz::RealFunction;
pub use space::{FiniteMetricSpace, Measure, MmSpace, PointMap};
