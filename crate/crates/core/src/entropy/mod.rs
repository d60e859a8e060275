//! Entropy numbers of finite matrices and diagonal operators.

pub mod calculus;
pub mod kuhn;
pub mod matrix;
pub mod oracle;
pub mod schutt;

pub use calculus::{
    block_lower_bound, bound_compose, bound_sum, family_bound, tail_lower_bound, BoundKind,
    BoundSequence, LowerEstimate,
};
pub use kuhn::{check_doubling, kuhn_omega, DiagonalSequence};
pub use matrix::{norm_upper_bound, OperatorMatrix};
pub use oracle::{entropy_oracle, entropy_oracle_range, mesh_for_budget, EntropyInterval};
pub use schutt::schutt_envelope;
