//! Leakage measurement and optimal watchdog sanitization for discrete joint
//! distributions `p(s, x)` of a secret `S` and released data `X`.
//!
//! * [`lift`]: lift, α-lift, Sibson and maximum Sibson mutual information.
//! * [`watchdog`]: high-risk partition, X-invariant randomization and the
//!   closed-form optimal leakages.
//! * [`relaxation`]: absolute log-lift selection and its two relaxations.
//! * [`oracle`]: sampling checks of the X-invariant optimality bounds.
//! * [`experiments`]: privacy-utility sweeps and Monte-Carlo trials.
//!
//! Logarithms are natural; information is reported in nats.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lift;
pub mod numerics;
pub mod oracle;
pub mod probability;
pub mod relaxation;
pub mod watchdog;

pub use error::{Error, Result};
pub use lift::{AlphaParam, LiftProfile};
pub use probability::JointDistribution;
pub use watchdog::{Mechanism, WatchdogPartition};
