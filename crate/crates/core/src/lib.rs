//! Diffusion coefficient of the lifted Bernoulli-shift map
//! `M(x) = 2x + h` (x < 1/2), `2x - 1 - h` (x >= 1/2), extended by `M(x + z) = M(x) + z`.
//!
//! Estimators: truncated jump-correlation series ([`crw`]), persistent random
//! walks with one- and two-step memory ([`prw`]), Markov-partition spectra
//! ([`markov`]), and ensemble simulation ([`mc`]).

pub mod crw;
pub mod cylinder;
pub mod error;
pub mod estimate;
pub mod linalg;
pub mod map;
pub mod markov;
pub mod mc;
pub mod prw;
pub mod report;

pub use error::{Error, Result};
pub use estimate::{DiffusionEstimate, Method};
pub use map::{MapParams, Velocity};
