//! Finite-dimensional sequence spaces `l_p^m`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance for unit-ball membership of grid points.
pub const BALL_TOLERANCE: f64 = 1e-12;

/// Largest source dimension the brute-force oracles accept.
pub const MAX_ORACLE_DIM: usize = 4;

const MAX_GRID_NODES: f64 = 5.0e6;

/// A summability exponent in `[1, inf]`.
///
/// Infinity is its own variant so that `1/p` is exactly zero for `p = inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);
    pub const INF: Exponent = Exponent::Infinite;

    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinite)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// `1/p`, exactly `0` for `p = inf`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    /// The value as an `f64`; `f64::INFINITY` for the infinite exponent.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// The conjugate exponent `p'` with `1/p + 1/p' = 1`.
    pub fn dual(self) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::ONE,
            Exponent::Finite(1.0) => Exponent::Infinite,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        // larger exponent <=> smaller reciprocal
        other.recip().partial_cmp(&self.recip())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "INF" | "∞" => Ok(Exponent::Infinite),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::Parse {
                    line: 0,
                    msg: format!("not an exponent: {other:?}"),
                })?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Returns `p'` with `1/p + 1/p' = 1`.
pub fn dual_exponent(p: Exponent) -> Exponent {
    p.dual()
}

/// A nonempty real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Vector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        lp_norm(&self.0, p)
    }
}

/// The `l_p` norm of `v`.
pub fn norm(v: &Vector, p: Exponent) -> f64 {
    lp_norm(v.coords(), p)
}

/// `l_p` norm of a raw slice (zero for an empty slice).
pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Exponent::Finite(1.0) => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(p) => {
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            let s: f64 = x.iter().map(|v| (v.abs() / scale).powf(p)).sum();
            scale * s.powf(1.0 / p)
        }
    }
}

/// `l_p` distance between two points of equal dimension.
pub fn lp_dist(a: &[f64], b: &[f64], p: Exponent) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    match p {
        Exponent::Infinite => a
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
        Exponent::Finite(1.0) => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        Exponent::Finite(2.0) => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Exponent::Finite(p) => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

/// A finite subset of a closed unit ball together with a certified covering
/// radius.
#[derive(Debug, Clone)]
pub struct NetPointSet {
    pub points: Vec<Vector>,
    /// Every point of the ball is within `mesh` (in the ball's own norm) of
    /// some point of `points`.
    pub mesh: f64,
    pub p: Exponent,
    /// Grid resolution: coordinates are integer multiples of `1/resolution`.
    pub resolution: usize,
}

impl NetPointSet {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vector::dim)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Grid resolution `M` (a power of two) so that truncating coordinates toward
/// zero onto `Z^dim / M` moves any point by less than `mesh` in `l_p`.
pub fn net_resolution(dim: usize, p: Exponent, mesh: f64) -> usize {
    let spread = (dim as f64).powf(p.recip());
    let needed = (spread / mesh - 1e-12).ceil().max(1.0) as usize;
    needed.next_power_of_two()
}

/// Deterministic net of the unit ball of `l_p^dim`.
///
/// Points are the axis grid `Z^dim / M` filtered to the ball. Truncating each
/// coordinate of a ball point toward zero lands on a grid node that is itself
/// in the ball, which certifies the covering radius `dim^(1/p) / M`.
pub fn unit_ball_net(dim: usize, p: Exponent, mesh: f64) -> Result<NetPointSet> {
    if dim == 0 {
        return Err(Error::EmptyVector);
    }
    if dim > MAX_ORACLE_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_ORACLE_DIM,
        });
    }
    if !(mesh > 0.0 && mesh <= 1.0) {
        return Err(Error::Domain(format!("mesh {mesh} must lie in (0, 1]")));
    }
    let m = net_resolution(dim, p, mesh);
    let side = 2 * m + 1;
    if (side as f64).powi(dim as i32) > MAX_GRID_NODES {
        return Err(Error::SizeGuard(format!(
            "grid {side}^{dim} for mesh {mesh} is too large"
        )));
    }
    let step = 1.0 / m as f64;
    let mut idx = vec![0usize; dim];
    let mut coords = vec![0.0; dim];
    let mut points = Vec::new();
    loop {
        for (c, &i) in coords.iter_mut().zip(&idx) {
            *c = (i as f64 - m as f64) * step;
        }
        if lp_norm(&coords, p) <= 1.0 + BALL_TOLERANCE {
            points.push(Vector(coords.clone()));
        }
        // odometer
        let mut axis = 0;
        loop {
            if axis == dim {
                let certified = (dim as f64).powf(p.recip()) * step;
                return Ok(NetPointSet {
                    points,
                    mesh: certified,
                    p,
                    resolution: m,
                });
            }
            idx[axis] += 1;
            if idx[axis] < side {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert!((norm(&v(&[3.0, 4.0]), Exponent::TWO) - 5.0).abs() < 1e-15);
        assert_eq!(norm(&v(&[1.0, -1.0, 1.0]), Exponent::INF), 1.0);
        assert_eq!(norm(&v(&[1.0, 1.0, 1.0]), Exponent::ONE), 3.0);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_exponent(Exponent::TWO), Exponent::TWO);
        assert_eq!(dual_exponent(Exponent::ONE), Exponent::INF);
        assert_eq!(dual_exponent(Exponent::INF), Exponent::ONE);
        let d = dual_exponent(Exponent::new(4.0).unwrap());
        assert!((d.value() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exponent_rejects_below_one() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn exponent_order_and_parse() {
        assert!(Exponent::ONE < Exponent::TWO);
        assert!(Exponent::TWO < Exponent::INF);
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INF);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        let e: Exponent = serde_json_like("\"inf\"");
        assert_eq!(e, Exponent::INF);
    }

    // avoid a serde_json dev-dependency for one check
    fn serde_json_like(s: &str) -> Exponent {
        s.trim_matches('"').parse().unwrap()
    }

    #[test]
    fn net_1d_inf() {
        let net = unit_ball_net(1, Exponent::INF, 0.5).unwrap();
        let mut xs: Vec<f64> = net.points.iter().map(|p| p.coords()[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(net.mesh <= 0.5);
    }

    #[test]
    fn net_2d_inf_count() {
        let net = unit_ball_net(2, Exponent::INF, 0.25).unwrap();
        assert!(net.len() >= 81);
    }

    #[test]
    fn net_2d_l1_inside_ball() {
        let net = unit_ball_net(2, Exponent::ONE, 0.5).unwrap();
        assert!(net
            .points
            .iter()
            .all(|x| x.norm(Exponent::ONE) <= 1.0 + BALL_TOLERANCE));
        assert!(net.mesh <= 0.5);
    }

    #[test]
    fn net_rejects_large_dim() {
        assert!(matches!(
            unit_ball_net(5, Exponent::TWO, 0.5),
            Err(Error::DimensionTooLarge { dim: 5, .. })
        ));
        assert!(unit_ball_net(2, Exponent::TWO, 0.0).is_err());
    }
}
