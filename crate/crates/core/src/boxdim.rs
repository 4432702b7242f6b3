//! Box counting for sampled graphs and log-log dimension fits.
//!
//! [`numbox`] follows the tower procedure literally: `floor((b-a)/ε) + 1`
//! towers of width `ε`, tower `k` holding the samples with
//! `(k-1)ε + a ≤ x < kε + a`, and `floor(J/ε) + 1` boxes per tower where `J`
//! is the vertical extent of the tower's samples.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regularity::least_squares;

/// Samples `(x_i, y_i)` with strictly increasing `x` and finite `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SampledGraph {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!("{} abscissae but {} ordinates", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("samples must be finite".into()));
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("x must be strictly increasing".into()));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `b - a`.
    pub fn width(&self) -> f64 {
        self.x[self.x.len() - 1] - self.x[0]
    }

    /// Smallest admissible box size, `2(b-a)/N`.
    pub fn min_eps(&self) -> f64 {
        2.0 * self.width() / self.len() as f64
    }

    /// Both coordinates multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.x.iter().map(|v| v * s).collect(), self.y.iter().map(|v| v * s).collect())
    }
}

/// Number of `ε`-boxes covering the graph.
///
/// Towers that contain no sample contribute nothing. With uniform samples and
/// `ε ≥ 2(b-a)/N` this only happens to the last tower, when `(b-a)/ε` is an
/// integer up to rounding and `a + (N_towers - 1)ε` lands just above `b`.
pub fn numbox(g: &SampledGraph, eps: f64) -> Result<u64> {
    let (a, b) = (g.x[0], g.x[g.x.len() - 1]);
    let n = g.len() as f64;
    if !(eps >= 2.0 * (b - a) / n) {
        return Err(Error::EpsTooSmall { eps, min: 2.0 * (b - a) / n });
    }
    let towers = ((b - a) / eps).floor() as u64 + 1;
    let x = &g.x;
    let y = &g.y;
    let count = (1..=towers)
        .into_par_iter()
        .map(|k| {
            let lo = (k - 1) as f64 * eps + a;
            let hi = k as f64 * eps + a;
            let i0 = x.partition_point(|&v| v < lo);
            let i1 = x.partition_point(|&v| v < hi);
            if i0 >= i1 {
                return 0;
            }
            let ys = &y[i0..i1];
            let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = ys.iter().copied().fold(f64::INFINITY, f64::min);
            ((max - min) / eps).floor() as u64 + 1
        })
        .sum();
    Ok(count)
}

/// `num` geometric box sizes from `4(b-a)/N` up to `(b-a)/8`.
pub fn default_eps_grid(g: &SampledGraph, num: usize) -> Vec<f64> {
    let lo = 4.0 * g.width() / g.len() as f64;
    let hi = g.width() / 8.0;
    geometric(lo, hi, num)
}

/// `num` points from `lo` to `hi` in geometric progression.
pub fn geometric(lo: f64, hi: f64, num: usize) -> Vec<f64> {
    if num == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (num - 1) as f64;
    (0..num).map(|i| if i == num - 1 { hi } else { lo * (r * i as f64).exp() }).collect()
}

/// Box counts over a range of sizes and the least-squares slope of
/// `log M(ε)` against `log(1/ε)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    /// Decreasing box sizes.
    pub epsilons: Vec<f64>,
    pub counts: Vec<u64>,
    #[serde(rename = "D")]
    pub d: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl DimensionFit {
    /// Whether `D` falls in the plausibility window `(0.5, 2.5)`.
    pub fn is_plausible(&self) -> bool {
        self.d > 0.5 && self.d < 2.5
    }
}

/// Minimum number of box sizes in a fit.
pub const MIN_FIT_POINTS: usize = 8;

/// Fits `D` over every size in `eps_grid`.
pub fn fit_dimension(g: &SampledGraph, eps_grid: &[f64]) -> Result<DimensionFit> {
    if eps_grid.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_FIT_POINTS} box sizes, got {}",
            eps_grid.len()
        )));
    }
    let mut epsilons = eps_grid.to_vec();
    epsilons.sort_by(|a, b| b.total_cmp(a));
    let counts = epsilons.iter().map(|&e| numbox(g, e)).collect::<Result<Vec<u64>>>()?;
    if counts.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::FitDegenerate("all box counts are equal".into()));
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (d, intercept, r2) = least_squares(&xs, &ys);
    Ok(DimensionFit { epsilons, counts, d, intercept, r2 })
}

/// Keeps the sizes inside `[lo, hi]`.
pub fn apply_fit_window(eps_grid: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    eps_grid.iter().copied().filter(|&e| e >= lo && e <= hi).collect()
}
