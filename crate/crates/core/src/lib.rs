#![no_std]

//! Solvers for signaling audit games.
//!
//! An auditor receives alerts one at a time during an audit cycle and, for
//! each alert, commits to a joint distribution over *warn / stay silent* and
//! *audit / skip*. This crate computes that commitment and the baselines it is
//! measured against:
//!
//! * [`equilibrium::solve_ossp`]: the optimal joint signaling and audit policy,
//!   found by solving one linear program per candidate attacker best response.
//! * [`equilibrium::solve_online_sse`] and [`equilibrium::solve_offline_sse`]:
//!   Stackelberg equilibria without signaling, computed per alert from the
//!   arrival forecast or once per cycle from realized counts.
//! * [`arrival`]: per-type forecasts of how many alerts remain in the cycle,
//!   fit from historical logs.
//! * [`engine`]: the per-alert replay loop that samples signals and spends the
//!   budget.
//! * [`oracle`]: brute-force checks of everything above on small instances.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the CLI
//! and timing live in the companion `sag` crate.

extern crate alloc;

pub mod arrival;
pub mod datagen;
pub mod engine;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod lp;
pub mod oracle;
pub mod rng;
pub mod types;

pub use arrival::{FutureEstimate, Interpolation, RateProfile, TypeEstimate};
pub use engine::{AuditEngine, CycleReport, CycleState, DecisionRecord, EngineConfig, Signal};
pub use equilibrium::EquilibriumSolution;
pub use error::{Error, Result};
pub use types::{AlertEvent, AlertTypeId, PayoffStructure, SchemeEntry, SignalingScheme, TypePayoff};

/// Tolerance for probability closure and constraint tightness checks.
pub const EPSILON: f64 = 1e-9;

/// Length of one audit cycle in seconds.
pub const CYCLE_SECONDS: u32 = 86_400;
