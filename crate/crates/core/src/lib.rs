//! Tracking the most influential nodes of an interaction network whose
//! edges expire.
//!
//! Interactions arrive in timestep batches and stay alive for a lifetime
//! chosen by a [`LifetimePolicy`](tdn::LifetimePolicy). Influence of a seed
//! set is the number of nodes it reaches in the currently alive network.
//! Three streaming algorithms keep a size-`k` seed set up to date:
//!
//! - [`SieveState`](sieve::SieveState) for networks where nothing expires,
//! - [`BasicReduction`](reduction::BasicReduction), one sieve per lifetime,
//! - [`HistApprox`](histogram::HistApprox), a pruned histogram of sieves.
//!
//! Every spread evaluation goes through an [`Oracle`](oracle::Oracle),
//! which counts calls so that algorithms can be compared independently of
//! hardware. The [`harness`] module replays files or synthetic streams and
//! writes per-step metrics.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod histogram;
pub mod oracle;
pub mod reduction;
pub mod sieve;
pub mod tdn;

pub use error::{Error, Result};
pub use histogram::HistApprox;
pub use oracle::{NodeSet, Oracle, OracleCounter, SeedCounting};
pub use reduction::BasicReduction;
pub use sieve::SieveState;
pub use tdn::{Edge, EdgeId, Interaction, Lifetime, LifetimePolicy, NodeId, RawInteraction, TdnGraph};
