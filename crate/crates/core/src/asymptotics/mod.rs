//! Order envelopes for `e_n`, inversion of regularly varying growth
//! functions, and empirical rate fits.

mod envelopes;
mod fit;
mod inversion;

pub use envelopes::{
    envelope, sobolev_envelopes, theorem8_envelope, theorem9_envelope, tree_envelope, EnvelopeForm,
    EnvelopeParams, EnvelopeValue, SobolevParams, TreeParams, BRANCH_TOLERANCE, MIN_N,
};
pub use fit::{slope_fit, RateSeries, SlopeFit, MIN_FIT_OCTAVES, MIN_FIT_POINTS};
pub use inversion::{
    geometric_grid, invert_growth, slowly_varying_check, GrowthFunction, GrowthInverse,
    SlowVariationReport, DEFAULT_SLOW_C_MAX,
};
