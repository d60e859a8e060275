//! One runner per experiment kind. Each returns its artifacts in memory; the
//! caller decides where they go.

use anyhow::{anyhow, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use treentropy_core::asymptotics::{envelope, slope_fit, RateSeries};
use treentropy_core::entropy::{
    check_doubling, entropy_oracle, entropy_oracle_range, kuhn_omega, mesh_for_budget, norm_upper_bound,
    schutt_envelope, DiagonalSequence, OperatorMatrix,
};
use treentropy_core::partition::{dyadic_chain, is_nested, partition_balanced, verify_partition_lemma};
use treentropy_core::sumop::{cj_band_experiment, norm_estimate, norm_exact, SummationOperator};
use treentropy_core::tree::{generate_hset_tree, random_tree, verify_hset_condition};
use treentropy_core::Exponent;

use crate::config::*;
use crate::table::{num, Table};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub body: String,
}

impl Artifact {
    pub fn is_csv(&self) -> bool {
        self.name.ends_with(".csv")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub kind: &'static str,
    pub pass: bool,
    pub summary: String,
    pub artifacts: Vec<Artifact>,
}

/// Independent stream for cell `i` of a run seeded with `seed`.
pub fn cell_seed(seed: u64, i: usize) -> u64 {
    let mut z = seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f(0..n)` on a pool of `jobs` workers; results are in index order.
pub fn cells<T, F>(jobs: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building worker pool")?;
    Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
}

fn csv(kind: &str, table: &Table) -> Artifact {
    Artifact {
        name: format!("{kind}.csv"),
        body: table.to_csv(),
    }
}

fn json<T: Serialize>(kind: &str, value: &T) -> Artifact {
    let mut body = serde_json::to_string_pretty(value).expect("reports serialise");
    body.push('\n');
    Artifact {
        name: format!("{kind}.json"),
        body,
    }
}

pub fn execute(config: &ExperimentConfig, jobs: usize) -> Result<Outcome> {
    config.validate()?;
    let seed = config.seed;
    let kind = config.experiment.kind();
    let (pass, summary, artifacts) = match &config.experiment {
        Experiment::EntropyOracle(e) => run_entropy_oracle(e, jobs)?,
        Experiment::SchuttBand(s) => run_schutt_band(s, jobs)?,
        Experiment::Kuhn(k) => run_kuhn(k)?,
        Experiment::TreeGen(t) => run_tree_gen(t)?,
        Experiment::PartitionFuzz(f) => run_partition_fuzz(f, seed, jobs)?,
        Experiment::SumopNorm(s) => run_sumop_norm(s, seed, jobs)?,
        Experiment::CjBand(c) => run_cj_band(c)?,
        Experiment::Envelope(e) => run_envelope(e)?,
        Experiment::Slope(s) => run_slope(s)?,
    };
    Ok(Outcome {
        kind,
        pass,
        summary,
        artifacts,
    })
}

type Run = (bool, String, Vec<Artifact>);

fn run_entropy_oracle(e: &EntropyOracleParams, jobs: usize) -> Result<Run> {
    let t = e.operator.build(e.p, e.q)?;
    let ks: Vec<usize> = (e.k_min..=e.k_max).collect();
    let intervals = cells(jobs, ks.len(), |i| entropy_oracle(&t, ks[i], e.mesh))?
        .into_iter()
        .collect::<treentropy_core::Result<Vec<_>>>()?;

    let mut table = Table::new(&["k", "lower", "upper", "midpoint", "width", "net_mesh"]);
    let mut failures = Vec::new();
    for (i, iv) in intervals.iter().enumerate() {
        table.push(vec![
            iv.k.to_string(),
            num(iv.lower),
            num(iv.upper),
            num(iv.midpoint()),
            num(iv.width()),
            num(iv.net_mesh),
        ]);
        if iv.lower > iv.upper {
            failures.push(format!("k = {}: lower above upper", iv.k));
        }
        if let Some(w) = e.max_width {
            if iv.width() > w {
                failures.push(format!("k = {}: width {} > {w}", iv.k, iv.width()));
            }
        }
        if let Some(x) = e.expected.as_ref().map(|x| x[i]) {
            if !iv.contains(x) {
                failures.push(format!("k = {}: [{}, {}] misses {x}", iv.k, iv.lower, iv.upper));
            }
        }
    }
    let pass = failures.is_empty();
    let summary = if pass {
        format!("{} brackets, max width {}", intervals.len(), max_of(intervals.iter().map(|iv| iv.width())))
    } else {
        failures.join("; ")
    };
    let report = json!({ "intervals": intervals, "failures": failures });
    Ok((pass, summary, vec![csv("entropy-oracle", &table), json("entropy-oracle", &report)]))
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Serialize)]
struct SchuttRow {
    nu: usize,
    p: Exponent,
    q: Exponent,
    k: usize,
    envelope: f64,
    lower: f64,
    upper: f64,
    ratio: f64,
}

fn run_schutt_band(s: &SchuttBandParams, jobs: usize) -> Result<Run> {
    let mut grid = Vec::new();
    for &nu in &s.nus {
        for &p in &s.exponents {
            for &q in &s.exponents {
                grid.push((nu, p, q));
            }
        }
    }
    let per_cell = cells(jobs, grid.len(), |i| -> treentropy_core::Result<Vec<SchuttRow>> {
        let (nu, p, q) = grid[i];
        let mesh = mesh_for_budget(nu, p, s.net_budget)?;
        let id = OperatorMatrix::identity(nu, p, q)?;
        let range = entropy_oracle_range(&id, 1, s.k_max, mesh)?;
        Ok(range
            .iter()
            .map(|iv| {
                let env = schutt_envelope(p, q, nu, iv.k);
                SchuttRow {
                    nu,
                    p,
                    q,
                    k: iv.k,
                    envelope: env,
                    lower: iv.lower,
                    upper: iv.upper,
                    ratio: env / iv.midpoint(),
                }
            })
            .collect())
    })?;
    let rows: Vec<SchuttRow> = per_cell
        .into_iter()
        .collect::<treentropy_core::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut table = Table::new(&["nu", "p", "q", "k", "envelope", "lower", "upper", "ratio"]);
    for r in &rows {
        table.push(vec![
            r.nu.to_string(),
            r.p.to_string(),
            r.q.to_string(),
            r.k.to_string(),
            num(r.envelope),
            num(r.lower),
            num(r.upper),
            num(r.ratio),
        ]);
    }
    let (lo, hi) = (1.0 / s.band, s.band);
    let mut bands = Vec::new();
    let mut pass = true;
    for &p in &s.exponents {
        for &q in &s.exponents {
            let ratios: Vec<f64> = rows.iter().filter(|r| r.p == p && r.q == q).map(|r| r.ratio).collect();
            let min = min_of(ratios.iter().copied());
            let max = max_of(ratios.iter().copied());
            let ok = min >= lo && max <= hi;
            pass &= ok;
            bands.push(json!({ "p": p, "q": q, "min_ratio": min, "max_ratio": max, "pass": ok }));
        }
    }
    let worst = max_of(rows.iter().map(|r| r.ratio.max(1.0 / r.ratio)));
    let summary = format!(
        "{} cells, worst ratio deviation {worst:.3} against band {}",
        rows.len(),
        s.band
    );
    let report = json!({ "band": s.band, "per_exponents": bands });
    Ok((pass, summary, vec![csv("schutt-band", &table), json("schutt-band", &report)]))
}

/// `omega_n` for `sigma_k = s r^k`: `(s^e r^(e n) / (1 - r^e))^(1/e)` with
/// `1/e = 1/q - 1/p`.
fn geometric_omega(scale: f64, ratio: f64, p: Exponent, q: Exponent, n: usize) -> f64 {
    let d = q.recip() - p.recip();
    let e = 1.0 / d;
    (scale.powf(e) * ratio.powf(e * n as f64) / (1.0 - ratio.powf(e))).powf(d)
}

fn run_kuhn(k: &KuhnParams) -> Result<Run> {
    k.sequence.validate()?;
    let geometric = match k.sequence {
        DiagonalSequence::Geometric { scale, ratio } => Some((scale, ratio)),
        _ => None,
    };
    let mut table = Table::new(&["n", "omega", "closed_form", "relative_error"]);
    let mut worst = 0.0f64;
    for n in 1..=k.n_max {
        let omega = kuhn_omega(&k.sequence, k.p, k.q, n)?;
        let (closed, err) = match geometric {
            Some((s, r)) => {
                let c = geometric_omega(s, r, k.p, k.q, n);
                let err = ((omega - c) / c).abs();
                worst = worst.max(err);
                (num(c), num(err))
            }
            None => (String::new(), String::new()),
        };
        table.push(vec![n.to_string(), num(omega), closed, err]);
    }
    let doubling = check_doubling(&k.sequence, k.p, k.q, k.n_max)?;
    // omega_n / omega_(2n) = r^(-n), largest at n = n_max
    let expected = geometric.map(|(_, r)| r.powi(-(k.n_max as i32)));
    let doubling_ok = doubling.is_finite()
        && expected.is_none_or(|c| ((doubling - c) / c).abs() <= 1e-9);
    let pass = worst <= k.tolerance && doubling_ok;
    let summary = format!("max relative error {worst:e}, doubling constant {doubling}");
    let report = json!({
        "doubling_constant": doubling,
        "expected_doubling_constant": expected,
        "max_relative_error": worst,
        "tolerance": k.tolerance,
    });
    Ok((pass, summary, vec![csv("kuhn", &table), json("kuhn", &report)]))
}

fn run_tree_gen(t: &TreeGenParams) -> Result<Run> {
    let g = generate_hset_tree(&t.profile, t.depth)?;
    let report = verify_hset_condition(&g.tree, &t.profile, t.sample)?;
    let mut table = Table::new(&["level", "target", "population", "branching"]);
    for (j, (&target, &pop)) in g.targets.iter().zip(&g.populations).enumerate() {
        let b = if j == 0 { String::new() } else { g.branching[j - 1].to_string() };
        table.push(vec![j.to_string(), num(target), pop.to_string(), b]);
    }
    let summary = format!(
        "{} vertices, ratios in [{}, {}] for c_star = {}",
        g.tree.len(),
        report.min_ratio,
        report.max_ratio,
        report.c_star
    );
    let info = json!({ "vertices": g.tree.len(), "depth": g.tree.depth(), "condition": report });
    Ok((
        report.pass,
        summary,
        vec![
            csv("tree-gen", &table),
            json("tree-gen", &info),
            Artifact {
                name: "tree.txt".into(),
                body: g.tree.to_text(),
            },
        ],
    ))
}

fn vertex_weights(law: WeightLaw, v: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut phi: Vec<f64> = match law {
        WeightLaw::Unit => vec![1.0; v],
        WeightLaw::Uniform => (0..v).map(|_| rng.gen_range(0.0..1.0)).collect(),
        WeightLaw::Sparse => (0..v)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    1.0 / rng.gen_range(0.01f64..1.0).powi(2)
                } else {
                    0.0
                }
            })
            .collect(),
    };
    if phi.iter().sum::<f64>() <= 0.0 {
        phi[0] = 1.0;
    }
    phi
}

#[derive(Debug, Clone, Serialize)]
struct FuzzRow {
    tree: usize,
    vertices: usize,
    k: usize,
    partitions: usize,
    /// Largest `parts_count / n`.
    max_parts_per_n: f64,
    /// Largest non-singleton weight in units of `Phi / n`.
    max_phi_per_share: f64,
    max_intersections: usize,
    violations: Vec<String>,
}

fn fuzz_one(f: &PartitionFuzzParams, seed: u64, i: usize) -> treentropy_core::Result<FuzzRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, i));
    let k_gen = f.ks[i % f.ks.len()];
    let v = rng.gen_range(1..=f.max_vertices);
    let tree = random_tree(rng.gen(), v, k_gen);
    let phi = vertex_weights(f.weights, v, &mut rng);
    let k = tree.max_branching().max(1);
    let total: f64 = phi.iter().sum();

    let mut row = FuzzRow {
        tree: i,
        vertices: v,
        k,
        partitions: 0,
        max_parts_per_n: 0.0,
        max_phi_per_share: 0.0,
        max_intersections: 0,
        violations: Vec::new(),
    };
    let mut n = 1usize;
    while n <= v {
        let r = partition_balanced(&tree, &phi, n)?;
        let check = verify_partition_lemma(&tree, &r.parts, &phi, n, k);
        row.partitions += 1;
        row.max_parts_per_n = row.max_parts_per_n.max(r.parts_count as f64 / n as f64);
        row.max_phi_per_share = row.max_phi_per_share.max(check.max_nonsingleton_phi * n as f64 / total);
        row.violations.extend(check.violations.into_iter().map(|s| format!("n = {n}: {s}")));
        n *= 2;
    }
    let depth = (usize::BITS - 1 - v.leading_zeros()) as usize;
    let chain = dyadic_chain(&tree, &phi, depth)?;
    for w in chain.reports.windows(2) {
        if !is_nested(&w[0], &w[1]) {
            row.violations.push(format!("n = {}: not nested in n = {}", w[1].n, w[0].n));
        }
    }
    for r in &chain.reports {
        let check = verify_partition_lemma(&tree, &r.parts, &phi, r.n, k);
        row.violations
            .extend(check.violations.into_iter().map(|s| format!("chain n = {}: {s}", r.n)));
    }
    row.max_intersections = chain.max_intersections;
    if chain.max_intersections > 2 * k + 4 {
        row.violations.push(format!(
            "{} refinement intersections exceed {}",
            chain.max_intersections,
            2 * k + 4
        ));
    }
    Ok(row)
}

fn run_partition_fuzz(f: &PartitionFuzzParams, seed: u64, jobs: usize) -> Result<Run> {
    let rows = cells(jobs, f.trees, |i| fuzz_one(f, seed, i))?
        .into_iter()
        .collect::<treentropy_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "tree",
        "vertices",
        "k",
        "partitions",
        "max_parts_per_n",
        "max_phi_per_share",
        "max_intersections",
        "pass",
    ]);
    for r in &rows {
        table.push(vec![
            r.tree.to_string(),
            r.vertices.to_string(),
            r.k.to_string(),
            r.partitions.to_string(),
            num(r.max_parts_per_n),
            num(r.max_phi_per_share),
            r.max_intersections.to_string(),
            r.violations.is_empty().to_string(),
        ]);
    }
    let failed: Vec<&FuzzRow> = rows.iter().filter(|r| !r.violations.is_empty()).collect();
    let pass = failed.is_empty();
    let worst_parts = max_of(rows.iter().map(|r| r.max_parts_per_n - r.k as f64));
    let summary = format!(
        "{} trees, {} partitions, {} failing trees, worst parts/n - k = {worst_parts}",
        rows.len(),
        rows.iter().map(|r| r.partitions).sum::<usize>(),
        failed.len()
    );
    let report = json!({
        "trees": rows.len(),
        "failing_trees": failed.len(),
        "worst_parts_per_n_minus_k": worst_parts,
        "worst_phi_per_share_minus_k": max_of(rows.iter().map(|r| r.max_phi_per_share - r.k as f64)),
        "worst_intersections_minus_2k": max_of(rows.iter().map(|r| r.max_intersections as f64 - 2.0 * r.k as f64)),
        "failures": failed.iter().take(20).collect::<Vec<_>>(),
    });
    Ok((pass, summary, vec![csv("partition-fuzz", &table), json("partition-fuzz", &report)]))
}

/// The regimes where `norm_exact` applies.
pub fn exact_regimes() -> Vec<(Exponent, Exponent)> {
    let mut v = Vec::new();
    for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        v.push((Exponent::ONE, q));
    }
    for q in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
        v.push((Exponent::INF, q));
    }
    v.push((Exponent::TWO, Exponent::TWO));
    v
}

#[derive(Debug, Clone, Serialize)]
struct NormRow {
    tree: usize,
    vertices: usize,
    p: Exponent,
    q: Exponent,
    exact: f64,
    estimate: f64,
    upper: f64,
    relative_error: f64,
}

fn norms_one(s: &SumopNormParams, seed: u64, i: usize) -> treentropy_core::Result<Vec<NormRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, i));
    let v = rng.gen_range(1..=s.max_vertices);
    let tree = random_tree(rng.gen(), v, s.k);
    let u: Vec<f64> = (0..v).map(|_| rng.gen_range(0.05..3.0)).collect();
    let w: Vec<f64> = (0..v).map(|_| rng.gen_range(0.05..3.0)).collect();
    let base = SummationOperator::new(tree, u, w, Exponent::ONE, Exponent::ONE)?;
    exact_regimes()
        .into_iter()
        .map(|(p, q)| {
            let op = base.with_exponents(p, q);
            let exact = norm_exact(&op)?;
            let estimate = norm_estimate(&op, s.restarts, cell_seed(seed, i)).value;
            let upper = norm_upper_bound(&op.to_matrix()?);
            Ok(NormRow {
                tree: i,
                vertices: v,
                p,
                q,
                exact,
                estimate,
                upper,
                relative_error: ((estimate - exact) / exact).abs(),
            })
        })
        .collect()
}

fn run_sumop_norm(s: &SumopNormParams, seed: u64, jobs: usize) -> Result<Run> {
    let rows: Vec<NormRow> = cells(jobs, s.trees, |i| norms_one(s, seed, i))?
        .into_iter()
        .collect::<treentropy_core::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut table = Table::new(&["tree", "vertices", "p", "q", "exact", "estimate", "upper", "relative_error"]);
    let mut failures = Vec::new();
    for r in &rows {
        table.push(vec![
            r.tree.to_string(),
            r.vertices.to_string(),
            r.p.to_string(),
            r.q.to_string(),
            num(r.exact),
            num(r.estimate),
            num(r.upper),
            num(r.relative_error),
        ]);
        if r.relative_error > s.tolerance {
            failures.push(format!("tree {} ({} -> {}): relative error {}", r.tree, r.p, r.q, r.relative_error));
        }
        if r.estimate > r.upper * (1.0 + 1e-12) || r.exact > r.upper * (1.0 + 1e-9) {
            failures.push(format!("tree {} ({} -> {}): above the upper bound", r.tree, r.p, r.q));
        }
    }
    let pass = failures.is_empty();
    let worst = max_of(rows.iter().map(|r| r.relative_error));
    let summary = format!("{} norms, worst relative error {worst:e}, {} failures", rows.len(), failures.len());
    let report = json!({ "norms": rows.len(), "worst_relative_error": worst, "failures": failures });
    Ok((pass, summary, vec![csv("sumop-norm", &table), json("sumop-norm", &report)]))
}

fn run_cj_band(c: &CjBandParams) -> Result<Run> {
    let band = cj_band_experiment(&c.weights, &c.profile, c.p, c.q, c.j_min, c.j_max, c.extra_depth)?;
    let mut table = Table::new(&["j", "vertex", "norm", "exact", "envelope", "ratio"]);
    for r in &band.rows {
        table.push(vec![
            r.j.to_string(),
            r.vertex.to_string(),
            num(r.norm),
            r.exact.to_string(),
            num(r.envelope),
            num(r.ratio),
        ]);
    }
    let pass = band.spread <= c.max_spread;
    let summary = format!(
        "case {}, spread {} (limit {}) over {} vertices",
        band.case, band.spread, c.max_spread, band.tree_vertices
    );
    let report = json!({
        "case": band.case,
        "spread": band.spread,
        "max_spread": c.max_spread,
        "min_ratio": band.min_ratio,
        "max_ratio": band.max_ratio,
        "tree_vertices": band.tree_vertices,
        "pass": pass,
    });
    Ok((pass, summary, vec![csv("cj-band", &table), json("cj-band", &report)]))
}

fn envelope_series(
    params: &treentropy_core::asymptotics::EnvelopeParams,
    lo: usize,
    hi: usize,
    per: usize,
) -> Result<RateSeries> {
    Ok(RateSeries::sample(lo, hi, per, |n| envelope(params, n).map(|v| v.value))?)
}

fn run_envelope(e: &EnvelopeParamsBlock) -> Result<Run> {
    let series = envelope_series(&e.params, e.lo_octave, e.hi_octave, e.per_octave)?;
    let at = envelope(&e.params, (e.hi_octave as f64).exp2())?;
    let summary = format!("estimate {} case {}, {} points", at.theorem, at.case, series.points.len());
    let report = json!({ "theorem": at.theorem, "case": at.case, "form": at.form });
    Ok((
        true,
        summary,
        vec![
            Artifact {
                name: "envelope.csv".into(),
                body: series.to_csv(),
            },
            json("envelope", &report),
        ],
    ))
}

fn run_slope(s: &SlopeParams) -> Result<Run> {
    let series = envelope_series(&s.params, s.lo_octave, s.hi_octave, s.per_octave)?;
    let fit = slope_fit(&series)?;
    let coded = envelope(&s.params, (s.lo_octave as f64).exp2())?;
    let dp = (fit.power - coded.power()).abs();
    let dl = (fit.log_power - coded.log_power()).abs();
    let pass = dp <= s.power_tolerance && dl <= s.log_tolerance;
    let summary = format!(
        "estimate {} case {}: power {:.4} vs {}, log power {:.4} vs {}",
        coded.theorem,
        coded.case,
        fit.power,
        coded.power(),
        fit.log_power,
        coded.log_power()
    );
    let report = json!({
        "theorem": coded.theorem,
        "case": coded.case,
        "coded_power": coded.power(),
        "coded_log_power": coded.log_power(),
        "fit": fit,
        "pass": pass,
    });
    Ok((
        pass,
        summary,
        vec![
            Artifact {
                name: "slope.csv".into(),
                body: series.to_csv(),
            },
            json("slope", &report),
        ],
    ))
}

/// Parses an exponent given on the command line.
pub fn parse_exponent(s: &str) -> Result<Exponent> {
    s.parse::<Exponent>().map_err(|e| anyhow!("{e}"))
}
