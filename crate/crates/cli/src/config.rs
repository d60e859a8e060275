//! Experiment configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use treentropy_core::asymptotics::EnvelopeParams;
use treentropy_core::entropy::{DiagonalSequence, OperatorMatrix};
use treentropy_core::sumop::WeightProfile;
use treentropy_core::tree::HSetProfile;
use treentropy_core::Exponent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    EntropyOracle(EntropyOracleParams),
    SchuttBand(SchuttBandParams),
    Kuhn(KuhnParams),
    TreeGen(TreeGenParams),
    PartitionFuzz(PartitionFuzzParams),
    SumopNorm(SumopNormParams),
    CjBand(CjBandParams),
    Envelope(EnvelopeParamsBlock),
    Slope(SlopeParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::EntropyOracle(_) => "entropy-oracle",
            Experiment::SchuttBand(_) => "schutt-band",
            Experiment::Kuhn(_) => "kuhn",
            Experiment::TreeGen(_) => "tree-gen",
            Experiment::PartitionFuzz(_) => "partition-fuzz",
            Experiment::SumopNorm(_) => "sumop-norm",
            Experiment::CjBand(_) => "cj-band",
            Experiment::Envelope(_) => "envelope",
            Experiment::Slope(_) => "slope",
        }
    }
}

/// A small explicit operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity(usize),
    Diagonal(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl OperatorSpec {
    pub fn build(&self, p: Exponent, q: Exponent) -> treentropy_core::Result<OperatorMatrix> {
        match self {
            OperatorSpec::Identity(nu) => OperatorMatrix::identity(*nu, p, q),
            OperatorSpec::Diagonal(sigma) => OperatorMatrix::diagonal(sigma, p, q),
            OperatorSpec::Rows(rows) => OperatorMatrix::new(rows.clone(), p, q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyOracleParams {
    pub operator: OperatorSpec,
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default = "one")]
    pub k_min: usize,
    pub k_max: usize,
    pub mesh: f64,
    /// Values that must lie in the bracket for `k = k_min, k_min + 1, ...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchuttBandParams {
    pub nus: Vec<usize>,
    pub exponents: Vec<Exponent>,
    pub k_max: usize,
    /// Largest unit-ball net per cell.
    #[serde(default = "default_net_budget")]
    pub net_budget: usize,
    /// Every envelope/midpoint ratio must lie in `[1/band, band]`.
    #[serde(default = "default_band")]
    pub band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuhnParams {
    pub sequence: DiagonalSequence,
    pub p: Exponent,
    pub q: Exponent,
    pub n_max: usize,
    /// Relative tolerance against the closed form (geometric sequences).
    #[serde(default = "default_kuhn_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeGenParams {
    pub profile: HSetProfile,
    pub depth: usize,
    #[serde(default = "default_sample")]
    pub sample: usize,
}

/// Distribution of the vertex weights `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightLaw {
    Unit,
    #[default]
    Uniform,
    /// Mostly zero with rare heavy-tailed spikes.
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFuzzParams {
    pub trees: usize,
    pub max_vertices: usize,
    pub ks: Vec<usize>,
    #[serde(default)]
    pub weights: WeightLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumopNormParams {
    pub trees: usize,
    pub max_vertices: usize,
    #[serde(default = "default_branching")]
    pub k: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_norm_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CjBandParams {
    pub weights: WeightProfile,
    pub profile: HSetProfile,
    pub p: Exponent,
    pub q: Exponent,
    pub j_min: usize,
    pub j_max: usize,
    #[serde(default = "default_extra_depth")]
    pub extra_depth: usize,
    #[serde(default = "default_max_spread")]
    pub max_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeParamsBlock {
    pub params: EnvelopeParams,
    #[serde(default = "default_lo_octave")]
    pub lo_octave: usize,
    #[serde(default = "default_hi_octave")]
    pub hi_octave: usize,
    #[serde(default = "default_per_octave")]
    pub per_octave: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeParams {
    pub params: EnvelopeParams,
    #[serde(default = "default_lo_octave")]
    pub lo_octave: usize,
    #[serde(default = "default_hi_octave")]
    pub hi_octave: usize,
    #[serde(default = "default_per_octave")]
    pub per_octave: usize,
    #[serde(default = "default_power_tolerance")]
    pub power_tolerance: f64,
    #[serde(default = "default_log_tolerance")]
    pub log_tolerance: f64,
}

fn one() -> usize {
    1
}

fn default_net_budget() -> usize {
    6000
}

fn default_band() -> f64 {
    16.0
}

fn default_kuhn_tolerance() -> f64 {
    1e-12
}

fn default_sample() -> usize {
    4096
}

fn default_branching() -> usize {
    3
}

fn default_restarts() -> usize {
    16
}

fn default_norm_tolerance() -> f64 {
    1e-6
}

fn default_extra_depth() -> usize {
    3
}

fn default_max_spread() -> f64 {
    32.0
}

fn default_lo_octave() -> usize {
    6
}

fn default_hi_octave() -> usize {
    24
}

fn default_per_octave() -> usize {
    4
}

fn default_power_tolerance() -> f64 {
    0.05
}

fn default_log_tolerance() -> f64 {
    0.5
}

impl ExperimentConfig {
    pub fn new(seed: u64, experiment: Experiment) -> Self {
        ExperimentConfig {
            seed,
            output: None,
            experiment,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).context("invalid experiment config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Checks ranges that the JSON schema cannot express, naming the field.
    pub fn validate(&self) -> Result<()> {
        match &self.experiment {
            Experiment::EntropyOracle(e) => {
                if e.k_min == 0 || e.k_min > e.k_max {
                    bail!("field k_min/k_max: need 1 <= k_min <= k_max");
                }
                if let Some(x) = &e.expected {
                    if x.len() != e.k_max - e.k_min + 1 {
                        bail!("field expected: need one value per k");
                    }
                }
            }
            Experiment::SchuttBand(s) => {
                if s.nus.is_empty() || s.exponents.is_empty() {
                    bail!("field nus/exponents: must be non-empty");
                }
                if s.band.is_nan() || s.band < 1.0 {
                    bail!("field band: must be at least 1");
                }
            }
            Experiment::Kuhn(k) => {
                if k.n_max == 0 {
                    bail!("field n_max: must be positive");
                }
            }
            Experiment::TreeGen(_) => {}
            Experiment::PartitionFuzz(f) => {
                if f.max_vertices == 0 {
                    bail!("field max_vertices: must be positive");
                }
                if f.ks.is_empty() || f.ks.contains(&0) {
                    bail!("field ks: need positive branching bounds");
                }
            }
            Experiment::SumopNorm(s) => {
                if s.max_vertices == 0 || s.k == 0 {
                    bail!("field max_vertices/k: must be positive");
                }
            }
            Experiment::CjBand(c) => {
                if c.j_min < 2 || c.j_min > c.j_max {
                    bail!("field j_min/j_max: need 2 <= j_min <= j_max");
                }
            }
            Experiment::Envelope(e) => octaves(e.lo_octave, e.hi_octave, e.per_octave)?,
            Experiment::Slope(s) => octaves(s.lo_octave, s.hi_octave, s.per_octave)?,
        }
        Ok(())
    }
}

fn octaves(lo: usize, hi: usize, per: usize) -> Result<()> {
    if lo < 2 || lo >= hi || hi > 60 || per == 0 {
        bail!("field lo_octave/hi_octave/per_octave: need 2 <= lo < hi <= 60 and per_octave >= 1");
    }
    Ok(())
}
