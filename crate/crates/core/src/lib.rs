//! Task allocation for distributed stochastic optimization with
//! heterogeneous workers of unknown speed.

pub mod allocation;
pub mod config;
pub mod distributions;
pub mod error;
pub mod optimizer;
pub mod rng;
pub mod selftest;
pub mod simulator;
pub mod suite;

pub use allocation::{ras, AllocationVector, Allocator, AllocatorState, Policy};
pub use distributions::{ArmModel, ArmSpec, FleetFamily, FleetSpec, TimeDistribution};
pub use error::{Error, Result};
