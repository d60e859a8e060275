//! Brute-force entropy-number brackets for small matrices.
//!
//! For `T : l_p^d -> l_q^m` with `d <= 4` the unit ball is replaced by a
//! certified net `N` of covering radius `mesh`, and `P = T(N)`.
//!
//! * Upper bound: any `2^(k-1)` centres covering `P` with radius `R` cover
//!   `T(B)` with radius `R + ||T|| mesh`.
//! * Lower bound: `2^(k-1) + 1` points of `T(B)` that are pairwise at least
//!   `D` apart cannot be covered by `2^(k-1)` balls of radius below `D/2`.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::matrix::{norm_upper_bound, OperatorMatrix};
use crate::error::{Error, Result};
use crate::spaces::{lp_dist, lp_norm, unit_ball_net, Exponent, BALL_TOLERANCE, MAX_ORACLE_DIM};

/// Largest admissible `k` (so at most 2048 centres).
pub const MAX_ORACLE_K: usize = 12;
/// Largest admissible net mesh.
pub const MAX_ORACLE_MESH: f64 = 0.5;
/// Random restarts of the packing search.
pub const PACKING_RESTARTS: usize = 32;

const TIE: f64 = 1e-12;
const MAX_REFINE_ROUNDS: usize = 40;
const CENTER_ITERATIONS: usize = 24;

/// A certified bracket `lower <= e_k(T) <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyInterval {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    /// Covering radius of the source net actually used.
    pub net_mesh: f64,
    /// Upper bound on `||T||` used in the discretisation correction.
    pub norm_bound: f64,
}

impl EntropyInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Points of `T(N)` stored row-major.
struct Cloud {
    dim: usize,
    data: Vec<f64>,
}

impl Cloud {
    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// `e_k(T)` bracket for one `k`.
pub fn entropy_oracle(t: &OperatorMatrix, k: usize, mesh: f64) -> Result<EntropyInterval> {
    let mut all = entropy_oracle_range(t, k, k, mesh)?;
    Ok(all.pop().expect("one interval"))
}

/// Brackets for `k = k_min..=k_max`, sharing one net.
pub fn entropy_oracle_range(
    t: &OperatorMatrix,
    k_min: usize,
    k_max: usize,
    mesh: f64,
) -> Result<Vec<EntropyInterval>> {
    check_preconditions(t, k_min, k_max, mesh)?;
    if t.is_zero() {
        return Ok((k_min..=k_max)
            .map(|k| EntropyInterval {
                k,
                lower: 0.0,
                upper: 0.0,
                net_mesh: mesh,
                norm_bound: 0.0,
            })
            .collect());
    }
    let net = unit_ball_net(t.cols(), t.source_p, mesh)?;
    let mut data = Vec::with_capacity(net.len() * t.rows());
    let mut image = vec![0.0; t.rows()];
    for x in &net.points {
        t.apply_into(x.coords(), &mut image);
        data.extend_from_slice(&image);
    }
    let cloud = Cloud {
        dim: t.rows(),
        data,
    };
    let norm_bound = norm_upper_bound(t);
    let q = t.target_q;
    let seed = oracle_seed(t, mesh);

    Ok((k_min..=k_max)
        .map(|k| {
            let centers = 1usize << (k - 1);
            let radius = cover_radius(&cloud, centers, q);
            let separation = best_packing(&cloud, centers + 1, q, seed ^ k as u64);
            EntropyInterval {
                k,
                lower: 0.5 * separation / (1.0 + BALL_TOLERANCE),
                upper: radius + norm_bound * net.mesh,
                net_mesh: net.mesh,
                norm_bound,
            }
        })
        .collect())
}

/// Largest-spacing admissible mesh whose unit-ball net for `l_p^dim` has at
/// most `max_points` points.
pub fn mesh_for_budget(dim: usize, p: Exponent, max_points: usize) -> Result<f64> {
    let spread = (dim as f64).powf(p.recip());
    let mut best = None;
    let mut resolution = 1usize;
    while resolution < 1 << 20 {
        resolution *= 2;
        let exact = spread / resolution as f64;
        if exact > MAX_ORACLE_MESH {
            continue;
        }
        let mesh = (exact * (1.0 + 1e-9)).min(MAX_ORACLE_MESH);
        match unit_ball_net(dim, p, mesh) {
            Ok(net) if net.len() <= max_points => best = Some(mesh),
            _ => break,
        }
    }
    best.ok_or_else(|| Error::Scale(format!("no net of l_{p}^{dim} within {max_points} points")))
}

fn check_preconditions(t: &OperatorMatrix, k_min: usize, k_max: usize, mesh: f64) -> Result<()> {
    if t.cols() > MAX_ORACLE_DIM {
        return Err(Error::Scale(format!(
            "source dimension {} exceeds {MAX_ORACLE_DIM}",
            t.cols()
        )));
    }
    if k_min == 0 || k_min > k_max || k_max > MAX_ORACLE_K {
        return Err(Error::Scale(format!(
            "k range {k_min}..={k_max} outside 1..={MAX_ORACLE_K}"
        )));
    }
    if !(mesh > 0.0 && mesh <= MAX_ORACLE_MESH) {
        return Err(Error::Scale(format!(
            "mesh {mesh} outside (0, {MAX_ORACLE_MESH}]"
        )));
    }
    Ok(())
}

/// Seed derived from the shape of the problem only, so `T` and `lambda T`
/// explore identical restarts.
fn oracle_seed(t: &OperatorMatrix, mesh: f64) -> u64 {
    let mut h = DefaultHasher::new();
    (t.rows(), t.cols()).hash(&mut h);
    t.source_p.value().to_bits().hash(&mut h);
    t.target_q.value().to_bits().hash(&mut h);
    mesh.to_bits().hash(&mut h);
    h.finish()
}

/// Index of the first entry within a relative `TIE` of the maximum.
fn argmax_tie(values: &[f64]) -> (usize, f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = max - TIE * max.abs();
    let idx = values.iter().position(|&v| v >= cut).unwrap_or(0);
    (idx, values[idx])
}

// ---------------------------------------------------------------------------
// covering

/// Smallest radius found for covering the cloud with `n` centres in `l_q`.
///
/// Three seedings are tried: farthest-point (Gonzalez) greedy started from the
/// image of the origin, and two axis-box covers of the bounding box. Each is
/// completed to `n` centres by farthest-point insertion and then improved by
/// alternating nearest-centre assignment with per-cluster minimax centres.
/// Every radius reported is the exact covering radius of a concrete centre
/// set.
fn cover_radius(cloud: &Cloud, n: usize, q: Exponent) -> f64 {
    if cloud.len() <= n {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let gonzalez = {
        let norms: Vec<f64> = (0..cloud.len()).map(|i| -lp_norm(cloud.point(i), q)).collect();
        let (start, _) = argmax_tie(&norms);
        cloud.point(start).to_vec()
    };
    let mut seeds = vec![gonzalez];
    for uniform in [false, true] {
        if let Some(centers) = box_cover_centers(cloud, n, q, uniform) {
            seeds.push(centers);
        }
    }
    for seed in seeds {
        let centers = extend_farthest(cloud, seed, n, q);
        best = best.min(refine(cloud, centers, q));
    }
    best
}

/// Adds farthest points until there are `n` centres.
fn extend_farthest(cloud: &Cloud, mut centers: Vec<f64>, n: usize, q: Exponent) -> Vec<f64> {
    let dim = cloud.dim;
    let mut dist: Vec<f64> = (0..cloud.len())
        .map(|i| {
            centers
                .chunks(dim)
                .map(|c| lp_dist(cloud.point(i), c, q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    while centers.len() / dim < n {
        let (far, d) = argmax_tie(&dist);
        if d <= 0.0 {
            break;
        }
        let c = cloud.point(far).to_vec();
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(lp_dist(cloud.point(i), &c, q));
        }
        centers.extend_from_slice(&c);
    }
    centers
}

/// Assigns each point to its nearest centre; returns the covering radius.
fn assign(cloud: &Cloud, centers: &[f64], q: Exponent, labels: &mut [usize], dist: &mut [f64]) -> f64 {
    let mut radius = 0.0f64;
    for i in 0..cloud.len() {
        let x = cloud.point(i);
        let mut best = f64::INFINITY;
        let mut label = 0;
        for (c, center) in centers.chunks(cloud.dim).enumerate() {
            let d = lp_dist(x, center, q);
            if d < best * (1.0 - TIE) {
                best = d;
                label = c;
            }
        }
        labels[i] = label;
        dist[i] = best;
        radius = radius.max(best);
    }
    radius
}

fn refine(cloud: &Cloud, mut centers: Vec<f64>, q: Exponent) -> f64 {
    let dim = cloud.dim;
    let n = centers.len() / dim;
    let mut labels = vec![0usize; cloud.len()];
    let mut dist = vec![0.0; cloud.len()];
    let mut best = assign(cloud, &centers, q, &mut labels, &mut dist);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut trial_labels = labels.clone();
    let mut trial_dist = dist.clone();

    for _ in 0..MAX_REFINE_ROUNDS {
        for m in members.iter_mut() {
            m.clear();
        }
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        let mut trial = centers.clone();
        let mut relocated = false;
        for (c, idx) in members.iter().enumerate() {
            let slot = &mut trial[c * dim..(c + 1) * dim];
            if idx.is_empty() {
                if !relocated {
                    // move an idle centre onto the current bottleneck point
                    let (far, _) = argmax_tie(&dist);
                    slot.copy_from_slice(cloud.point(far));
                    relocated = true;
                }
                continue;
            }
            let center = minimax_center(cloud, idx, slot, q);
            slot.copy_from_slice(&center);
        }
        let radius = assign(cloud, &trial, q, &mut trial_labels, &mut trial_dist);
        if radius < best * (1.0 - TIE) {
            best = radius;
            centers = trial;
            std::mem::swap(&mut labels, &mut trial_labels);
            std::mem::swap(&mut dist, &mut trial_dist);
        } else {
            break;
        }
    }
    best
}

fn cluster_radius(cloud: &Cloud, idx: &[usize], center: &[f64], q: Exponent) -> f64 {
    idx.iter()
        .map(|&i| lp_dist(cloud.point(i), center, q))
        .fold(0.0, f64::max)
}

/// Approximate minimax centre of a cluster: the better of the current centre,
/// the bounding-box midpoint (exact for `q = inf`) and, for finite `q`, a few
/// Badoiu-Clarkson steps toward the farthest member.
fn minimax_center(cloud: &Cloud, idx: &[usize], current: &[f64], q: Exponent) -> Vec<f64> {
    let dim = cloud.dim;
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in idx {
        for (a, &x) in cloud.point(i).iter().enumerate() {
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        }
    }
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let mut best = current.to_vec();
    let mut best_r = cluster_radius(cloud, idx, current, q);
    let mid_r = cluster_radius(cloud, idx, &mid, q);
    if mid_r < best_r * (1.0 - TIE) {
        best = mid.clone();
        best_r = mid_r;
    }
    if !q.is_infinite() {
        let mut c = best.clone();
        for step in 0..CENTER_ITERATIONS {
            let far = idx
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    lp_dist(cloud.point(a), &c, q).total_cmp(&lp_dist(cloud.point(b), &c, q))
                })
                .expect("nonempty cluster");
            let w = 1.0 / (step as f64 + 2.0);
            for (ca, &fa) in c.iter_mut().zip(cloud.point(far)) {
                *ca += w * (fa - *ca);
            }
            let r = cluster_radius(cloud, idx, &c, q);
            if r < best_r * (1.0 - TIE) {
                best_r = r;
                best.copy_from_slice(&c);
            }
        }
    }
    best
}

/// Centres of an axis-box cover of the bounding box using at most `n`
/// nonempty boxes. Box counts per axis are proportional to the axis extent
/// (or equal, when `uniform`).
fn box_cover_centers(cloud: &Cloud, n: usize, q: Exponent, uniform: bool) -> Option<Vec<f64>> {
    let dim = cloud.dim;
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for i in 0..cloud.len() {
        for (a, &x) in cloud.point(i).iter().enumerate() {
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        }
    }
    let range: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
    let max_range = range.iter().copied().fold(0.0, f64::max);
    if max_range <= 0.0 {
        return None;
    }
    let counts = |nmax: usize| -> Vec<usize> {
        range
            .iter()
            .map(|&r| {
                if r <= 0.0 {
                    1
                } else if uniform {
                    nmax
                } else {
                    ((nmax as f64 * r / max_range - 1e-9).ceil() as usize).max(1)
                }
            })
            .collect()
    };
    let boxes = |nmax: usize| -> BTreeMap<Vec<u32>, Vec<usize>> {
        let per_axis = counts(nmax);
        let mut cells: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for i in 0..cloud.len() {
            let key: Vec<u32> = cloud
                .point(i)
                .iter()
                .enumerate()
                .map(|(a, &x)| {
                    if range[a] <= 0.0 {
                        0
                    } else {
                        let z = (x - lo[a]) / range[a] * per_axis[a] as f64 + 1e-9;
                        (z.floor().max(0.0) as usize).min(per_axis[a] - 1) as u32
                    }
                })
                .collect();
            cells.entry(key).or_default().push(i);
        }
        cells
    };
    // largest resolution whose nonempty box count fits the budget
    let (mut ok, mut bad) = (1usize, n + 1);
    while bad - ok > 1 {
        let mid = (ok + bad) / 2;
        if boxes(mid).len() <= n {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    let cells = boxes(ok);
    let mut centers = Vec::with_capacity(cells.len() * dim);
    for idx in cells.values() {
        let seed = cloud.point(idx[0]).to_vec();
        centers.extend(minimax_center(cloud, idx, &seed, q));
    }
    Some(centers)
}

// ---------------------------------------------------------------------------
// packing

/// Largest minimal pairwise separation found among `count` cloud points.
///
/// Greedy max-min dispersion from the point of largest norm plus
/// [`PACKING_RESTARTS`] seeded random starts. Returns `0` if the cloud has
/// fewer than `count` distinct points.
fn best_packing(cloud: &Cloud, count: usize, q: Exponent, seed: u64) -> f64 {
    if cloud.len() < count {
        return 0.0;
    }
    let norms: Vec<f64> = (0..cloud.len()).map(|i| lp_norm(cloud.point(i), q)).collect();
    let (first, _) = argmax_tie(&norms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![first];
    starts.extend((0..PACKING_RESTARTS).map(|_| rng.gen_range(0..cloud.len())));
    let mut dist = vec![0.0; cloud.len()];
    starts
        .into_iter()
        .map(|s| greedy_dispersion(cloud, count, q, s, &mut dist))
        .fold(0.0, f64::max)
}

fn greedy_dispersion(cloud: &Cloud, count: usize, q: Exponent, start: usize, dist: &mut [f64]) -> f64 {
    let origin = cloud.point(start);
    for (i, d) in dist.iter_mut().enumerate() {
        *d = lp_dist(cloud.point(i), origin, q);
    }
    let mut separation = f64::INFINITY;
    for _ in 1..count {
        let (next, d) = argmax_tie(dist);
        if d <= 0.0 {
            return 0.0;
        }
        separation = separation.min(d);
        let x = cloud.point(next).to_vec();
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(lp_dist(cloud.point(i), &x, q));
        }
    }
    separation
}
