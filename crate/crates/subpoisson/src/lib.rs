//! Exact moments, closed-form moment bounds, and numeric inequality
//! certification for sub-Poissonian distributions.
//!
//! A nonnegative random variable with mean `mu` is *sub-Poissonian* when its
//! moment-generating function is dominated by the Poisson envelope
//! `exp(mu (e^t - 1))` for all `t > 0`. Poisson and Binomial variables, and
//! more generally sums of independent `[0,1]`-bounded variables, all qualify.
//!
//! The crate has three layers:
//!
//! * **exact** — raw/factorial/Bell-polynomial moments in exact rational
//!   arithmetic (Stirling numbers, Bell numbers, Bernoulli-sum DP);
//! * **lambert / bell_real / bounds** — high-precision evaluators for the
//!   Lambert-W function, real-argument Bell numbers via the Dobinski series
//!   with certified truncation error, and every closed-form moment bound
//!   (Chernoff/MGF bound at the optimal tilt `t = W(k/mu)`, its corollaries,
//!   Latala- and Rosenthal-type bounds, and the Poisson/Binomial/Bell-power
//!   lower bounds), all computed in natural-log space on the normalized
//!   moment `E (X/mu)^k`;
//! * **verify** — grid-sweep certification of each inequality step used in
//!   the proofs, MGF-domination checks for the sub-Poissonian class, a
//!   conjecture sweep harness, and a seeded Monte Carlo cross-validator,
//!   with deterministic JSON/CSV reports.

pub mod bell_real;
pub mod bounds;
pub mod dec;
pub mod error;
pub mod exact;
pub mod hifloat;
pub mod lambert;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{Distribution, ExactScalar};
pub use hifloat::{HiFloat, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};
