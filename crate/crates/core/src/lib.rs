//! Exact q-series arithmetic for generalized Frobenius partitions.
//!
//! The crate is layered bottom-up:
//!
//! * [`qseries`]: truncated Laurent series over arbitrary-precision integers.
//! * [`etatheta`]: eta-quotients, Δ, the theta series of the form
//!   `Q(m) = Σ m_i² + Σ_{i<j} m_i m_j`, and their modular metadata.
//! * [`frobenius`]: `p(n)`, `cφ_k(n)` and the quarter of `cφ̄₂(n)`, each by
//!   more than one route.
//! * [`congruence`]: Sturm bounds, congruence claims and the simple
//!   congruence scanner.
//! * [`parity`]: the `Δ^{2^j}(αtz)` construction, its mod-2 factorization,
//!   the explicit bounds `C_{r,t}` and the parity search.

pub mod arith;
pub mod congruence;
pub mod error;
pub mod etatheta;
pub mod frobenius;
pub mod parity;
pub mod qseries;

pub use error::{Error, Result};
pub use qseries::{ProgressionTarget, QSeries};
