//! Command-level simulator of a commodity DRAM subarray that performs
//! content-addressable search using nothing but ACT and PRE commands.
//!
//! Stored words are laid out column-major, one bit per row pair. A query is
//! encoded in the row addresses that get opened; comparisons reduce to
//! ordinary reads, and the per-bit results are folded with row copy and
//! triple-row majority obtained by issuing commands with deliberately shortened gaps.
//!
//! * [`dram`]: subarray state, ACT/PRE execution, micro-op detection.
//! * [`timing_ops`]: row copy and majority (AND/OR) fragments.
//! * [`cam`]: encodings, layouts, and the exact, ternary and
//!   Hamming-distance-1 compare compilers.
//! * [`genomics`]: one-hot k-mer databases and taxon classification.
//! * [`metrics`]: latency/energy accounting and throughput estimates.

pub mod bits;
pub mod cam;
pub mod cli;
pub mod config;
pub mod dram;
pub mod error;
pub mod genomics;
pub mod metrics;
pub mod timing_ops;

pub use bits::BitRow;
pub use config::{Config, DeviceConfig, TimingModel};
pub use error::{Error, Result};
