//! Link-level models for relay-assisted and RIS-assisted wireless links.
//!
//! The crate computes end-to-end SNR/SINR for half- and full-duplex
//! decode-and-forward and amplify-and-forward relaying and for reconfigurable
//! intelligent surfaces, the optimal source/relay power split, and the
//! achievable rate. [`montecarlo`] evaluates all of it over seeded fading
//! ensembles and parameter sweeps.

pub mod error;
pub mod fading;
pub mod montecarlo;
pub mod power_allocation;
pub mod propagation;
pub mod rates;
pub mod relay_links;
pub mod ris_links;

pub use error::{Error, Result};
pub use fading::{ComplexGain, FadingKind, FadingSpec, GainVector, Link, RngStream};
pub use montecarlo::{run_sweep, run_trials, AllocationMode, Scenario, SweepSpec, SweepVariable, TrialStatistics};
pub use power_allocation::{AllocationBranch, AllocationResult, LinkCoefficients};
pub use propagation::{LinkBudget, LinkGeometry, PathLossModel, RadioConfig, RisMode};
pub use rates::{RateResult, Scheme};
pub use relay_links::{PowerSplit, RelayChannelRealization, RelayScheme, SnrBreakdown};
pub use ris_links::{PhaseConfig, RisChannelRealization};
