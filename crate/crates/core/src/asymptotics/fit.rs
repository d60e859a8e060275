use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 6;
pub const MIN_FIT_OCTAVES: f64 = 3.0;

/// Positive values `e_n` sampled at increasing `n > 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RateSeries {
    pub points: Vec<(f64, f64)>,
}

impl RateSeries {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(n, v)) in points.iter().enumerate() {
            if !(n > 1.0 && n.is_finite() && v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("bad sample ({n}, {v})")));
            }
            if i > 0 && !(n > points[i - 1].0) {
                return Err(Error::Domain("sample points must increase".into()));
            }
        }
        Ok(RateSeries { points })
    }

    /// Samples `f` at `n = 2^(i / per_octave)` for `lo * per_octave <= i <= hi * per_octave`.
    pub fn sample<F: FnMut(f64) -> Result<f64>>(lo: usize, hi: usize, per_octave: usize, mut f: F) -> Result<Self> {
        let per = per_octave.max(1);
        let points = (lo * per..=hi * per)
            .map(|i| {
                let n = (i as f64 / per as f64).exp2();
                f(n).map(|v| (n, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value\n");
        for (n, v) in &self.points {
            writeln!(out, "{n},{v}").expect("string write");
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('n')) {
                continue;
            }
            let err = || Error::Parse {
                line: i + 1,
                msg: format!("expected `n,value`, got `{line}`"),
            };
            let (a, b) = line.split_once(',').ok_or_else(err)?;
            let n = a.trim().parse::<f64>().map_err(|_| err())?;
            let v = b.trim().parse::<f64>().map_err(|_| err())?;
            points.push((n, v));
        }
        Self::new(points)
    }
}

/// `log e_n ~ power log n + log_power log log n + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub power: f64,
    pub log_power: f64,
    pub intercept: f64,
    /// Root mean square of the residuals in `log2 e_n`.
    pub rms_residual: f64,
    pub points: usize,
}

/// Least-squares fit of the power and log-power of a series.
pub fn slope_fit(series: &RateSeries) -> Result<SlopeFit> {
    let pts = &series.points;
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateGrid(format!(
            "{} points, need at least {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let (first, last) = (pts[0].0, pts[pts.len() - 1].0);
    if (last / first).log2() < MIN_FIT_OCTAVES - 1e-12 {
        return Err(Error::DegenerateGrid(format!(
            "grid spans {:.2} octaves, need {MIN_FIT_OCTAVES}",
            (last / first).log2()
        )));
    }
    if first < 2.0 {
        return Err(Error::DegenerateGrid("log log n needs n >= 2".into()));
    }
    let k = pts.len();
    let a = DMatrix::from_fn(k, 3, |r, c| {
        let ln = pts[r].0.log2();
        match c {
            0 => ln,
            1 => ln.log2(),
            _ => 1.0,
        }
    });
    let b = DVector::from_fn(k, |r, _| pts[r].1.log2());
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    if sv.min() <= 1e-10 * smax {
        return Err(Error::DegenerateGrid("design matrix is rank deficient".into()));
    }
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::DegenerateGrid(e.to_string()))?;
    let resid = &a * &x - &b;
    Ok(SlopeFit {
        power: x[0],
        log_power: x[1],
        intercept: x[2],
        rms_residual: (resid.norm_squared() / k as f64).sqrt(),
        points: k,
    })
}
