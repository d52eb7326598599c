//! Capacity-region outer bounds and protocol achievable-rate regions for the
//! three-node half-duplex Gaussian two-way relay channel.
//!
//! Nodes `a` and `b` exchange messages at rates `(Ra, Rb)` through a relay
//! `r`, with an optional weak direct link. The half-duplex constraint leaves
//! six useful network states; every bound and protocol here is a linear
//! program over the fractions of time spent in each state.
//!
//! * [`channel`]: capacity arithmetic and validated [`ChannelGains`].
//! * [`lp`]: the dense simplex engine and LP duality.
//! * [`outer`]: cut-set outer bounds, analytical dual bounds and capacity thresholds.
//! * [`achievable`]: MABC, TDBC, HBC, 6-state DF, 6-state and CoMABC regions.
//! * [`region`]: ray sweeps, convex hulls and region comparisons.
//! * [`cli`]: scenario files and CSV/JSON emission used by the `twrc` binary.

pub mod achievable;
pub mod channel;
pub mod cli;
pub mod error;
pub mod lp;
pub mod outer;
pub mod ray;
pub mod region;

pub use achievable::{BoundaryPoint, Protocol};
pub use outer::{OuterPoint, Thresholds, TimeShares};
pub use ray::Ray;
pub use region::Region;

pub use channel::{cap, db_to_linear, linear_to_db, validate_gains, ChannelGains, Rate};
pub use error::{Error, Result};
pub use lp::{dual_of, solve_lp, LinearProgram, LpSolution, LpStatus, Relation};
