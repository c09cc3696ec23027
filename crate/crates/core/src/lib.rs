//! Closed-form equilibria and verification machinery for scalar quadratic
//! Gaussian signaling games in which the decoder combines the encoder's
//! noisy channel with a noisy side observation of the source.
//!
//! - [`single_stage`]: best responses, exact costs, the estimation-error
//!   lower bound and the Stackelberg equilibrium.
//! - [`multi_stage`]: Kalman decoder recursions over a Gauss-Markov source and
//!   the forward-in-time Stackelberg solution.
//! - [`nash`]: affine Nash equilibria, verified as best-response fixed points.
//! - [`monte_carlo`]: seeded, block-reproducible simulation and brute-force
//!   grid oracles.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combining;
pub mod error;
pub mod monte_carlo;
pub mod multi_stage;
pub mod nash;
pub mod params;
pub mod single_stage;

pub use combining::{optimal_combining, TableCase, TableRow};
pub use error::{Error, ParamError, Result};
pub use monte_carlo::{SimConfig, SimResult};
pub use multi_stage::{EncoderMode, FilterState, MultiStageReport, StagePolicy};
pub use nash::{NashEquilibrium, NashKind};
pub use params::{AffineDecoder, AffineEncoder, ChannelNoise, EquilibriumReport, GameParams, MultiStageParams, Validity};
pub use single_stage::Costs;
