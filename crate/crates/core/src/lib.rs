//! Guaranteed state estimation for discrete-time nonlinear systems with
//! bounded disturbances and bounded measurement noise.
//!
//! The estimate is a finite union of axis-aligned boxes. Each step refines
//! the union by bisection, propagates every box through a mean-value
//! enclosure of the dynamics, contracts against the measurement strips and
//! drops boxes that are covered by others.

pub mod benchmarks;
pub mod contractor;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod interval;
pub mod metrics;
pub mod observer;

pub use dynamics::{Dynamics, IntervalMatrix, RealMatrix, SystemModel};
pub use error::{Error, Result};
pub use interval::{Interval, IntervalBox, Rounding};
pub use observer::{BoxCollection, Observer, ObserverConfig};
