//! The acceptance criteria, each a small self-contained experiment with a
//! verdict and a runtime budget.

use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treentropy_core::asymptotics::{
    envelope, invert_growth, EnvelopeParams, GrowthFunction, SobolevParams, TreeParams,
};
use treentropy_core::entropy::{
    bound_compose, bound_sum, entropy_oracle_range, mesh_for_budget, norm_upper_bound, BoundSequence,
    DiagonalSequence, EntropyInterval, OperatorMatrix,
};
use treentropy_core::slow::SlowFactor;
use treentropy_core::sumop::{entropy_lower_via_blocks, SummationOperator, WeightProfile};
use treentropy_core::tree::{random_tree, HSetProfile};
use treentropy_core::{Error, Exponent};

use crate::config::*;
use crate::experiments::{execute, Outcome};
use crate::table::Table;

pub const ACCEPTANCE_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub budget: Duration,
}

const fn criterion(id: usize, name: &'static str, secs: u64) -> Criterion {
    Criterion {
        id,
        name,
        budget: Duration::from_secs(secs),
    }
}

pub const CRITERIA: [Criterion; 12] = [
    criterion(1, "entropy-law", 5),
    criterion(2, "scale", 120),
    criterion(3, "schutt-band", 300),
    criterion(4, "calculus", 180),
    criterion(5, "kuhn", 1),
    criterion(6, "partition-fuzz", 120),
    criterion(7, "sumop-norm", 120),
    criterion(8, "cj-band", 180),
    criterion(9, "blocks", 120),
    criterion(10, "envelopes", 30),
    criterion(11, "inversion", 5),
    criterion(12, "determinism", 300),
];

#[derive(Debug, Clone)]
pub struct Options {
    pub jobs: usize,
    /// Band for the Schütt criterion; 1 is the impossible negative control.
    pub schutt_band: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            schutt_band: 16.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<15} {:>8.2}s  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub reports: Vec<CriterionReport>,
    pub warning: Option<String>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// `all`, or a comma-separated list of criterion names or numbers. An empty
/// list selects nothing.
pub fn select(suite: &str) -> Result<Vec<Criterion>> {
    let suite = suite.trim();
    if suite == "all" {
        return Ok(CRITERIA.to_vec());
    }
    let mut out = Vec::new();
    for part in suite.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let c = CRITERIA
            .iter()
            .find(|c| c.name == part || c.id.to_string() == part)
            .copied();
        match c {
            Some(c) if !out.iter().any(|o: &Criterion| o.id == c.id) => out.push(c),
            Some(_) => {}
            None => bail!(
                "unknown criterion {part:?}; known: {}",
                CRITERIA.iter().map(|c| c.name).collect::<Vec<_>>().join(", ")
            ),
        }
    }
    Ok(out)
}

pub fn run_suite(suite: &str, opts: &Options) -> Result<SuiteReport> {
    let chosen = select(suite)?;
    let warning = chosen
        .is_empty()
        .then(|| "no criteria selected; the empty suite passes vacuously".to_string());
    let reports = chosen.iter().map(|c| run_criterion(c, opts)).collect();
    Ok(SuiteReport { reports, warning })
}

pub fn run_criterion(c: &Criterion, opts: &Options) -> CriterionReport {
    let start = Instant::now();
    let result = match c.id {
        1 => entropy_law(opts),
        2 => scale(opts),
        3 => schutt_band(opts),
        4 => calculus(opts),
        5 => kuhn(opts),
        6 => partition_fuzz(opts),
        7 => sumop_norm(opts),
        8 => cj_band(opts),
        9 => blocks(opts),
        10 => envelopes(opts),
        11 => inversion(opts),
        12 => determinism(opts),
        _ => Err(anyhow::anyhow!("no criterion {}", c.id)),
    };
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e:#}")),
    };
    if elapsed > c.budget {
        pass = false;
        detail = format!("{detail} (over the {} s budget)", c.budget.as_secs());
    }
    CriterionReport {
        id: c.id,
        name: c.name,
        pass,
        detail,
        elapsed,
        budget: c.budget,
    }
}

type Verdict = Result<(bool, String)>;

fn from_outcome(o: Outcome) -> (bool, String) {
    (o.pass, o.summary)
}

fn exp(p: f64) -> Exponent {
    Exponent::new(p).expect("valid exponent")
}

const EXPONENTS: [Exponent; 3] = [Exponent::ONE, Exponent::TWO, Exponent::INF];

pub fn entropy_law_config() -> ExperimentConfig {
    ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::EntropyOracle(EntropyOracleParams {
            operator: OperatorSpec::Identity(1),
            p: Exponent::INF,
            q: Exponent::INF,
            k_min: 1,
            k_max: 6,
            mesh: 0.005,
            expected: Some((1..=6).map(|k| (1.0 - k as f64).exp2()).collect()),
            max_width: Some(0.02),
        }),
    )
}

pub fn schutt_config(band: f64) -> ExperimentConfig {
    ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::SchuttBand(SchuttBandParams {
            nus: vec![2, 3, 4],
            exponents: EXPONENTS.to_vec(),
            k_max: 8,
            net_budget: 6000,
            band,
        }),
    )
}

pub fn kuhn_configs() -> Vec<ExperimentConfig> {
    let mut v = Vec::new();
    for (p, q) in [(Exponent::INF, Exponent::ONE), (Exponent::TWO, Exponent::ONE), (exp(4.0), Exponent::TWO)] {
        for (scale, ratio) in [(1.0, 0.5), (3.0, 0.9), (0.2, 0.1)] {
            v.push(ExperimentConfig::new(
                ACCEPTANCE_SEED,
                Experiment::Kuhn(KuhnParams {
                    sequence: DiagonalSequence::Geometric { scale, ratio },
                    p,
                    q,
                    n_max: 8,
                    tolerance: 1e-12,
                }),
            ));
        }
    }
    v
}

pub fn partition_fuzz_config(trees: usize, max_vertices: usize) -> ExperimentConfig {
    ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::PartitionFuzz(PartitionFuzzParams {
            trees,
            max_vertices,
            ks: vec![2, 3, 5],
            weights: WeightLaw::Uniform,
        }),
    )
}

pub fn sumop_norm_config(trees: usize) -> ExperimentConfig {
    ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::SumopNorm(SumopNormParams {
            trees,
            max_vertices: 64,
            k: 3,
            restarts: 16,
            tolerance: 1e-6,
        }),
    )
}

/// The case-1 and case-3 profiles on `theta = 1` trees.
pub fn cj_band_configs() -> Vec<ExperimentConfig> {
    let case1 = CjBandParams {
        weights: WeightProfile {
            kappa_u: 0.0,
            alpha_u: 0.0,
            rho_u: SlowFactor::Const,
            kappa_w: 1.5,
            alpha_w: 0.0,
            rho_w: SlowFactor::Const,
            m_star: 1,
        },
        profile: HSetProfile::power(1.0),
        p: Exponent::ONE,
        q: Exponent::ONE,
        j_min: 2,
        j_max: 8,
        extra_depth: 3,
        max_spread: 32.0,
    };
    let case3 = CjBandParams {
        weights: WeightProfile {
            kappa_u: 0.5,
            alpha_u: 0.0,
            rho_u: SlowFactor::Const,
            kappa_w: 0.5,
            alpha_w: 1.0,
            rho_w: SlowFactor::Const,
            m_star: 1,
        },
        q: Exponent::TWO,
        ..case1.clone()
    };
    vec![
        ExperimentConfig::new(ACCEPTANCE_SEED, Experiment::CjBand(case1)),
        ExperimentConfig::new(ACCEPTANCE_SEED, Experiment::CjBand(case3)),
    ]
}

fn tree_params(theta: f64, gamma: f64, nu: f64, kappa_u: f64, kappa_w: f64, p: f64, q: f64) -> TreeParams {
    TreeParams {
        theta,
        gamma,
        nu,
        kappa_u,
        kappa_w,
        alpha_u: 0.0,
        alpha_w: 0.0,
        lambda_u: 0.0,
        lambda_w: 0.0,
        p: exp(p),
        q: exp(q),
        m_star: 1,
    }
}

fn sobolev_params(theta: f64, beta_g: f64, p: f64, q: f64) -> SobolevParams {
    SobolevParams {
        r: 1,
        d: 2,
        p: exp(p),
        q: exp(q),
        theta,
        gamma: 0.0,
        nu: 0.0,
        beta_g,
        beta_v: 0.0,
        alpha_g: 0.0,
        alpha_v: 0.0,
        lambda_g: 0.0,
        lambda_v: 0.0,
    }
}

/// One parameter set per branch of every envelope, labelled with the
/// `(estimate, case)` it must land in.
pub fn envelope_branches() -> Vec<(&'static str, &'static str, EnvelopeParams)> {
    use EnvelopeParams::{Sobolev, Tree};
    let t8 = tree_params(1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.0);
    let t9 = tree_params(0.0, 0.0, 0.0, -1.0, 1.0, 2.0, 2.0);
    let s = sobolev_params(0.0, 0.0, 2.0, 2.0);
    vec![
        ("8", "1", Tree(TreeParams { alpha_u: 0.7, ..t8 })),
        (
            "8",
            "1",
            Tree(TreeParams {
                alpha_u: 1.0,
                lambda_u: 0.5,
                ..tree_params(0.5, 0.5, 0.3, 0.25, 0.5, 3.0, 2.0)
            }),
        ),
        ("8", "2a", Tree(TreeParams { alpha_u: 1.5, ..tree_params(1.0, 0.0, 0.0, -1.0, 1.0, 2.0, 2.0) })),
        (
            "8",
            "2a",
            Tree(TreeParams {
                alpha_u: 1.0,
                alpha_w: 1.0,
                ..tree_params(1.0, 0.0, 0.0, 1.0 / 6.0 - 0.5, 0.5, 3.0, 2.0)
            }),
        ),
        ("8", "2b-above", Tree(TreeParams { alpha_u: 1.0, ..tree_params(1.0, 0.0, 0.0, -1.0, 1.0, 2.0, 4.0) })),
        (
            "8",
            "2b-below",
            Tree(TreeParams {
                alpha_u: 0.1,
                lambda_u: 1.0,
                ..tree_params(1.0, 0.0, 0.0, -1.0, 1.0, 2.0, 4.0)
            }),
        ),
        ("9", "1", Tree(TreeParams { alpha_u: 1.0, ..t9 })),
        (
            "9",
            "1",
            Tree(TreeParams {
                alpha_u: 2.0,
                lambda_u: 0.3,
                ..tree_params(0.0, -1.0, 0.5, -1.0, 1.0, 2.0, 2.0)
            }),
        ),
        ("9", "2a", Tree(TreeParams { lambda_u: 2.0, ..t9 })),
        ("9", "2b-above", Tree(TreeParams { lambda_u: 1.0, q: exp(4.0), ..t9 })),
        ("9", "2b-below", Tree(TreeParams { lambda_u: 0.1, q: exp(4.0), ..t9 })),
        ("2", "1", Sobolev(s)),
        ("1", "1-smooth", Sobolev(sobolev_params(1.0, 0.0, 2.0, 2.0))),
        ("1", "1", Sobolev(sobolev_params(1.5, 0.5, 2.0, 2.0))),
        ("1", "2a", Sobolev(SobolevParams { alpha_g: 1.0, ..sobolev_params(1.0, 1.0, 2.0, 2.0) })),
        ("1", "2b-above", Sobolev(SobolevParams { alpha_g: 1.0, ..sobolev_params(1.0, 0.5, 2.0, 4.0) })),
        ("1", "2b-below", Sobolev(SobolevParams { alpha_g: 0.1, ..sobolev_params(1.0, 0.5, 2.0, 4.0) })),
        ("3", "1", Sobolev(SobolevParams { alpha_g: 0.3, lambda_g: 0.5, ..sobolev_params(0.0, 1.0, 2.0, 2.0) })),
        ("3", "1-smooth", Sobolev(SobolevParams { alpha_g: 2.0, ..sobolev_params(0.0, 1.0, 2.0, 2.0) })),
        ("3", "2a", Sobolev(SobolevParams { lambda_g: 2.0, ..sobolev_params(0.0, 1.0, 2.0, 2.0) })),
        ("3", "2b-above", Sobolev(SobolevParams { lambda_g: 1.0, ..sobolev_params(0.0, 0.5, 2.0, 4.0) })),
        ("3", "2b-below", Sobolev(SobolevParams { lambda_g: 0.1, ..sobolev_params(0.0, 0.5, 2.0, 4.0) })),
    ]
}

/// Parameter sets sitting exactly on an excluded boundary.
pub fn excluded_boundaries() -> Vec<EnvelopeParams> {
    use EnvelopeParams::{Sobolev, Tree};
    vec![
        Tree(TreeParams { alpha_u: 0.25, ..tree_params(1.0, 0.0, 0.0, -1.0, 1.0, 2.0, 4.0) }),
        Tree(TreeParams { lambda_u: 0.25, ..tree_params(0.0, 0.0, 0.0, -1.0, 1.0, 2.0, 4.0) }),
        Sobolev(sobolev_params(1.0, 0.5, 2.0, 2.0)),
        Sobolev(SobolevParams { alpha_g: 0.5, ..sobolev_params(0.0, 1.0, 2.0, 2.0) }),
        Sobolev(SobolevParams { alpha_g: 0.25, ..sobolev_params(1.0, 0.5, 2.0, 4.0) }),
        Sobolev(SobolevParams { lambda_g: 0.25, ..sobolev_params(0.0, 0.5, 2.0, 4.0) }),
    ]
}

pub fn slope_config(params: EnvelopeParams) -> ExperimentConfig {
    ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::Slope(SlopeParams {
            params,
            lo_octave: 6,
            hi_octave: 24,
            per_octave: 4,
            power_tolerance: 0.05,
            log_tolerance: 0.5,
        }),
    )
}

fn entropy_law(opts: &Options) -> Verdict {
    Ok(from_outcome(execute(&entropy_law_config(), opts.jobs)?))
}

fn random_operator(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p: Exponent, q: Exponent) -> Result<OperatorMatrix> {
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    Ok(OperatorMatrix::new(entries, p, q)?)
}

fn scale(_opts: &Options) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED ^ 2);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..20 {
        let rows = rng.gen_range(1..=3);
        let cols = rng.gen_range(1..=3);
        let p = *EXPONENTS.choose(&mut rng).expect("nonempty");
        let q = *EXPONENTS.choose(&mut rng).expect("nonempty");
        let t = random_operator(&mut rng, rows, cols, p, q)?;
        let mesh = mesh_for_budget(cols, p, 2000)?;
        let base = entropy_oracle_range(&t, 1, 4, mesh)?;
        for lam in [0.5, 2.0, 10.0] {
            let scaled = entropy_oracle_range(&t.scaled(lam), 1, 4, mesh)?;
            for (e, s) in base.iter().zip(&scaled) {
                for (x, y) in [(e.lower, s.lower), (e.upper, s.upper)] {
                    let dev = (y - lam * x).abs() / (lam * x).abs().max(f64::MIN_POSITIVE);
                    worst = worst.max(dev);
                    if dev > 1e-9 {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok((failures == 0, format!("20 operators x 3 scalings, worst relative deviation {worst:e}")))
}

fn schutt_band(opts: &Options) -> Verdict {
    Ok(from_outcome(execute(&schutt_config(opts.schutt_band), opts.jobs)?))
}

fn uppers(intervals: &[EntropyInterval]) -> BoundSequence {
    BoundSequence::upper(intervals.iter().map(|e| e.upper).collect())
}

/// Checks that `bound` dominates the oracle upper bounds of `target` up to
/// one discretisation correction, and never falls below the certified lower
/// bounds.
fn dominates(bound: &BoundSequence, target: &[EntropyInterval], slack: &mut f64) -> bool {
    let mut ok = true;
    for e in target {
        let b = bound.get(e.k).expect("same length");
        let correction = 2.0 * e.norm_bound * e.net_mesh;
        *slack = slack.max(e.upper - b);
        ok &= b >= e.lower * (1.0 - 1e-12) && b + correction >= e.upper * (1.0 - 1e-12);
    }
    ok
}

fn calculus(_opts: &Options) -> Verdict {
    const K: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED ^ 4);
    let mut failures = Vec::new();
    let mut slack = f64::NEG_INFINITY;
    for i in 0..50 {
        let m = rng.gen_range(1..=2);
        let p = *EXPONENTS.choose(&mut rng).expect("nonempty");
        let mid = *EXPONENTS.choose(&mut rng).expect("nonempty");
        let q = *EXPONENTS.choose(&mut rng).expect("nonempty");
        let s = random_operator(&mut rng, m, m, p, q)?;
        let t = random_operator(&mut rng, m, m, p, q)?;
        let mesh_p = mesh_for_budget(m, p, 3000)?;
        let mesh_mid = mesh_for_budget(m, mid, 3000)?;

        let a = uppers(&entropy_oracle_range(&s, 1, K, mesh_p)?);
        let b = uppers(&entropy_oracle_range(&t, 1, K, mesh_p)?);
        let sum = entropy_oracle_range(&s.add(&t)?, 1, K, mesh_p)?;
        if !dominates(&bound_sum(&a, &b)?, &sum, &mut slack) {
            failures.push(format!("pair {i}: sum"));
        }

        let outer = s.with_exponents(mid, q);
        let inner = t.with_exponents(p, mid);
        let a = uppers(&entropy_oracle_range(&outer, 1, K, mesh_mid)?);
        let b = uppers(&entropy_oracle_range(&inner, 1, K, mesh_p)?);
        let composed = outer.compose(&inner)?;
        let bound = bound_compose(&a, &b, norm_upper_bound(&outer), norm_upper_bound(&inner))?;
        if !dominates(&bound, &entropy_oracle_range(&composed, 1, K, mesh_p)?, &mut slack) {
            failures.push(format!("pair {i}: composition"));
        }
    }
    let detail = if failures.is_empty() {
        format!("50 pairs, largest oracle upper above the bound by {slack:.3e}")
    } else {
        failures.join(", ")
    };
    Ok((failures.is_empty(), detail))
}

fn kuhn(opts: &Options) -> Verdict {
    let mut worst = String::new();
    for c in kuhn_configs() {
        let o = execute(&c, opts.jobs)?;
        if !o.pass {
            return Ok((false, o.summary));
        }
        worst = o.summary;
    }
    Ok((true, format!("9 geometric sequences; last: {worst}")))
}

fn partition_fuzz(opts: &Options) -> Verdict {
    Ok(from_outcome(execute(&partition_fuzz_config(500, 10_000), opts.jobs)?))
}

fn sumop_norm(opts: &Options) -> Verdict {
    Ok(from_outcome(execute(&sumop_norm_config(100), opts.jobs)?))
}

fn cj_band(opts: &Options) -> Verdict {
    let mut pass = true;
    let mut details = Vec::new();
    for c in cj_band_configs() {
        let o = execute(&c, opts.jobs)?;
        pass &= o.pass;
        details.push(o.summary);
    }
    Ok((pass, details.join("; ")))
}

fn blocks(_opts: &Options) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED ^ 9);
    let regimes = [
        (Exponent::INF, Exponent::INF),
        (Exponent::ONE, Exponent::ONE),
        (Exponent::ONE, Exponent::INF),
        (Exponent::TWO, Exponent::TWO),
    ];
    let mut operators = 0;
    let mut comparisons = 0;
    let mut failures = Vec::new();
    let mut tries = 0;
    while operators < 20 && tries < 200 {
        tries += 1;
        let v = rng.gen_range(2..=4);
        let tree = random_tree(rng.gen(), v, 2);
        let u = (0..v).map(|_| rng.gen_range(0.5..1.5)).collect();
        let w = (0..v).map(|_| rng.gen_range(0.5..1.5)).collect();
        let (p, q) = regimes[tries % regimes.len()];
        let s = SummationOperator::new(tree, u, w, p, q)?;
        let m = s.to_matrix()?;
        let mesh = mesh_for_budget(v, p, 4000)?;
        let oracle = entropy_oracle_range(&m, 1, 3, mesh)?;
        let mut any = false;
        for e in &oracle {
            match entropy_lower_via_blocks(&s, e.k, 2) {
                Ok(b) => {
                    any = true;
                    comparisons += 1;
                    if b.value > e.upper * (1.0 + 1e-9) {
                        failures.push(format!("operator {operators}, n = {}: {} > {}", e.k, b.value, e.upper));
                    }
                }
                Err(Error::NoIncomparableSet(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        if any {
            operators += 1;
        }
    }
    let pass = operators == 20 && failures.is_empty();
    let detail = if failures.is_empty() {
        format!("{operators} operators, {comparisons} comparisons")
    } else {
        failures.join("; ")
    };
    Ok((pass, detail))
}

fn envelopes(opts: &Options) -> Verdict {
    let mut failures = Vec::new();
    let mut worst_power = 0.0f64;
    let mut worst_log = 0.0f64;
    let branches = envelope_branches();
    for (theorem, case, params) in &branches {
        let at = envelope(params, 64.0)?;
        if (at.theorem, at.case) != (*theorem, *case) {
            failures.push(format!("expected {theorem}/{case}, got {}/{}", at.theorem, at.case));
            continue;
        }
        let o = execute(&slope_config(*params), opts.jobs)?;
        let report: serde_json::Value = serde_json::from_str(
            &o.artifacts.iter().find(|a| a.name == "slope.json").expect("slope report").body,
        )?;
        let dp = (report["fit"]["power"].as_f64().unwrap_or(f64::NAN) - at.power()).abs();
        let dl = (report["fit"]["log_power"].as_f64().unwrap_or(f64::NAN) - at.log_power()).abs();
        worst_power = worst_power.max(dp);
        worst_log = worst_log.max(dl);
        if !o.pass {
            failures.push(o.summary);
        }
    }
    let excluded = excluded_boundaries();
    for params in &excluded {
        match envelope(params, 64.0) {
            Err(Error::UnsupportedRegime(_)) => {}
            other => failures.push(format!("excluded boundary accepted: {params:?} -> {other:?}")),
        }
    }
    let detail = if failures.is_empty() {
        format!(
            "{} branches (worst |power| error {worst_power:.2e}, |log power| error {worst_log:.3}), {} excluded boundaries rejected",
            branches.len(),
            excluded.len()
        )
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

/// Growth profiles whose limiting constant `gamma^(alpha/gamma)` is inside
/// the factor-2 band.
pub fn growth_profiles() -> Vec<GrowthFunction> {
    [
        (1.0, 0.0, SlowFactor::Const),
        (1.0, 1.0, SlowFactor::Const),
        (1.0, -1.0, SlowFactor::log_power(0.5)),
        (2.0, 1.0, SlowFactor::Const),
        (0.5, 0.25, SlowFactor::log_power(-0.5)),
        (1.5, 0.5, SlowFactor::log_power(1.0)),
    ]
    .into_iter()
    .map(|(g, a, r)| GrowthFunction::new(g, a, r).expect("valid profile"))
    .collect()
}

fn inversion(_opts: &Options) -> Verdict {
    let mut worst_residual = 0.0f64;
    let mut worst_ratio = 1.0f64;
    let mut failures = Vec::new();
    let top = 60f64.exp2();
    for f in growth_profiles() {
        let x0 = (2.0 * f.threshold()).max(2.0);
        for i in 0..100 {
            let x = x0 * (top / x0).powf(i as f64 / 99.0);
            let r = invert_growth(&f, x)?;
            let residual = (f.eval(r.y) - x).abs() / x;
            worst_residual = worst_residual.max(residual);
            if residual > 1e-10 {
                failures.push(format!("{f:?} at x = {x}: residual {residual:e}"));
            }
            if x >= 20f64.exp2() {
                worst_ratio = worst_ratio.max(r.ratio.max(1.0 / r.ratio));
                if !(0.5..=2.0).contains(&r.ratio) {
                    failures.push(format!("{f:?} at x = {x}: ratio {}", r.ratio));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("6 profiles x 100 points, worst residual {worst_residual:.1e}, worst ratio {worst_ratio:.3}")
    } else {
        failures.into_iter().take(5).collect::<Vec<_>>().join("; ")
    };
    Ok((worst_residual <= 1e-10 && worst_ratio <= 2.0, detail))
}

/// Configurations re-run by the determinism check: every kind, at sizes
/// that keep the double run short.
pub fn determinism_configs() -> Vec<ExperimentConfig> {
    let mut v = vec![entropy_law_config()];
    let mut schutt = schutt_config(16.0);
    if let Experiment::SchuttBand(s) = &mut schutt.experiment {
        s.nus = vec![2];
        s.net_budget = 1500;
        s.k_max = 5;
    }
    v.push(schutt);
    v.push(kuhn_configs().remove(0));
    v.push(ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::TreeGen(TreeGenParams {
            profile: HSetProfile::new(0.5, -0.5, SlowFactor::log_power(-0.5), 1, 2.0, 0.25).expect("valid profile"),
            depth: 10,
            sample: 4096,
        }),
    ));
    v.push(partition_fuzz_config(60, 2000));
    v.push(sumop_norm_config(20));
    v.push(cj_band_configs().remove(0));
    let (_, _, params) = envelope_branches().remove(1);
    v.push(ExperimentConfig::new(
        ACCEPTANCE_SEED,
        Experiment::Envelope(EnvelopeParamsBlock {
            params,
            lo_octave: 6,
            hi_octave: 24,
            per_octave: 4,
        }),
    ));
    v.push(slope_config(params));
    v
}

fn determinism(opts: &Options) -> Verdict {
    let configs = determinism_configs();
    let mut failures = Vec::new();
    let mut files = 0;
    for c in &configs {
        let a = execute(c, 1)?;
        let b = execute(c, opts.jobs.max(2))?;
        for (x, y) in a.artifacts.iter().zip(&b.artifacts) {
            if !x.is_csv() {
                continue;
            }
            files += 1;
            if x != y {
                failures.push(format!("{}: {} differs between runs", c.experiment.kind(), x.name));
            }
            if Table::parse(&x.body)?.to_csv() != x.body {
                failures.push(format!("{}: {} does not round-trip", c.experiment.kind(), x.name));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{} kinds, {files} CSV bodies identical across runs and worker counts", configs.len())
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}
