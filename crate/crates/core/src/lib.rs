//! Diffusion of two competing activities on networks.
//!
//! Players pick one of four strategies (`00`, `01` = A only, `10` = B only,
//! `11` = both) as a best response to their neighbors, either in a
//! bilingual coordination game or under a quadratic utility. The crate
//! provides
//!
//! * random and empirical networks ([`net`]),
//! * payoffs, best responses and equilibrium-selection thresholds ([`games`]),
//! * the approximate master equations ([`ame`]) and the mean-field closure
//!   with phase-field signs ([`mf`]), integrated by an adaptive
//!   Dormand-Prince solver ([`ode`]),
//! * Monte-Carlo best-response dynamics and ensembles ([`sim`]).

pub mod ame;
pub mod combin;
pub mod error;
pub mod games;
pub mod mf;
pub mod net;
pub mod ode;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result};
pub use games::{Model, NeighborProfile, Strategy};
pub use net::{DegreeDistribution, Network};
pub use trajectory::Trajectory;
