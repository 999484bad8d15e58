//! Market model of influencer engagement cartels, with the measurement
//! pipeline used to study them.
//!
//! Influencers sit on a circle of content topics and decide whether to
//! engage with the previous post; engagement creates a positive externality
//! for the post's author, so equilibrium engagement is too scarce.
//! Engagement pods (cartels) commit members to engage whenever topics are
//! close enough, which may restore or destroy welfare depending on how tight
//! the requirement is.
//!
//! The crate has four layers:
//! - analytic: decision rules ([`equilibrium`]), the entry game and welfare
//!   curves ([`cartel`]), engagement pricing ([`advertising`]);
//! - verification: a sampled-sequence simulator ([`montecarlo`]) that checks
//!   every closed form;
//! - protocol: the pod submission/obligation state machine ([`pod`]);
//! - measurement: similarity, panel regression, LDA and synthetic data
//!   ([`empirics`]).
//!
//! Every capability has a runnable demo under `examples/`, and the `cartels`
//! binary exposes the same surface as subcommands with CSV/JSON inputs and
//! outputs.

pub mod advertising;
pub mod cartel;
pub mod cli;
pub mod empirics;
pub mod equilibrium;
pub mod error;
pub mod io;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod pod;

pub use error::{Error, Result};
