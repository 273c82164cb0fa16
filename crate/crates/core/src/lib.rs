//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! The table is processed one cache-sized segment at a time. Primes below 64
//! are applied as periodic word masks, medium primes with per-segment offsets
//! (wheel steps for the smaller ones, a fixed-count kernel for those near the
//! segment size) and large primes through circles of buckets, so that each
//! segment touches only the primes that actually hit it.

pub mod base;
pub mod bench;
pub mod circle;
pub mod driver;
pub mod error;
pub mod kernels;
pub mod oracle;
pub mod params;
pub mod wheel;

pub use base::{build_base, classify_prime, init_circles, BaseTable, PrimeClass, WheelPair};
pub use circle::{validate_circle_invariants, CircleSet, InvariantViolation, PrimeOffsetPair};
pub use driver::{
    extract_primes, run_sieve, run_sieve_with, write_table, CountSink, KernelConfig, PrimeSink,
    RunStats, SegmentSink, Sieve, SieveOptions, TableSink, TableWriter,
};
pub use error::{Result, SieveError};
pub use kernels::{DenseStrategy, LargeStrategy, SegmentBuffer};
pub use params::{params_from_midpoint, validate_params, SieveParams};
