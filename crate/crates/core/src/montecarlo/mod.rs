//! Seeded simulation of Gaussian fields, LGCPs and their Palm processes,
//! the thinning coupling between them, and Monte Carlo oracles.
//!
//! Fields are drawn exactly on finite node sets with a dense Cholesky
//! factor (at most [`MAX_FIELD_NODES`] nodes). Every function is a pure
//! function of its inputs and seed; see [`rng`] for the stream layout.

mod estimate;
mod field;
mod oracle;
pub mod rng;
mod simulate;

pub use estimate::{agree_independent, compensated_sum, MonteCarloEstimate};
pub use field::{raster_centers, FieldGrid, FieldSampler, MAX_FIELD_NODES};
pub use oracle::{
    mc_g_route_difference, mc_one_minus_f, mc_one_minus_g, mc_reweighting_check, mc_void_probability_check, oracle_draws,
    GRoute, OracleDraws, ReweightingCheck, TestFunctional, VoidProbabilityCheck,
};
pub use rng::{substream, Purpose};
pub use simulate::{simulate_grf, simulate_lgcp, simulate_palm, thin_palm_to_base, thin_palm_to_base_with, LgcpSimulator};
