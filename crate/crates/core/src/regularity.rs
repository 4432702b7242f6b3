//! Littlewood–Paley analysis on the torus: the dyadic multiplier bank,
//! shell projections `K_j`, Besov seminorms `B^α_{p,∞}` for `p ∈ {1, ∞}`,
//! Hölder-exponent fits and an empirical Bernstein check.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{FourierSeries, TorusGrid};

/// Smooth cutoff: 1 on `(-∞, 1]`, 0 on `[2, ∞)`, `C^∞` in between.
///
/// Built from `h(s) = e^{-1/s}` as `h(2-ξ) / (h(2-ξ) + h(ξ-1))`.
pub fn smooth_cutoff(xi: f64) -> f64 {
    if xi <= 1.0 {
        return 1.0;
    }
    if xi >= 2.0 {
        return 0.0;
    }
    let h = |s: f64| (-1.0 / s).exp();
    let a = h(2.0 - xi);
    a / (a + h(xi - 1.0))
}

/// Shell profile `χ(ξ) = φ(ξ) - φ(2ξ)`, supported in `[1/2, 2]`.
pub fn shell_profile(xi: f64) -> f64 {
    smooth_cutoff(xi) - smooth_cutoff(2.0 * xi)
}

/// Multiplier values of one shell on a contiguous frequency window.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellWindow {
    pub start: u64,
    pub values: Vec<f64>,
}

impl ShellWindow {
    pub fn get(&self, n: u64) -> f64 {
        if n < self.start {
            return 0.0;
        }
        self.values.get((n - self.start) as usize).copied().unwrap_or(0.0)
    }

    /// Last frequency with a stored value.
    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64 - 1
    }

    /// `(n, χ_j(n))` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.start + i as u64, *v))
    }
}

/// Sampled multipliers `χ_j(|n|)` for `j = 0..=j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LittlewoodPaleyBank {
    j_max: u32,
    shells: Vec<ShellWindow>,
}

impl LittlewoodPaleyBank {
    /// Dyadic bank with `χ_j(n) = χ(2^{-j} n)` for `j ≥ 1` and
    /// `χ_0 = 1 - Σ_{j≥1} χ_j`, which equals `φ(|n|)`.
    pub fn build(j_max: u32) -> Result<Self> {
        if !(1..=16).contains(&j_max) {
            return Err(Error::InvalidArgument(format!("j_max must be in 1..=16, got {j_max}")));
        }
        let mut shells = Vec::with_capacity(j_max as usize + 1);
        shells.push(ShellWindow { start: 0, values: vec![1.0, 1.0] });
        for j in 1..=j_max {
            let lo = 1u64 << (j - 1);
            let hi = 1u64 << (j + 1);
            let scale = (1u64 << j) as f64;
            let values = (lo..=hi)
                .map(|n| {
                    let xi = n as f64 / scale;
                    smooth_cutoff(xi) - smooth_cutoff(2.0 * xi)
                })
                .collect();
            shells.push(ShellWindow { start: lo, values });
        }
        let bank = Self { j_max, shells };
        bank.check_partition()?;
        Ok(bank)
    }

    /// A bank with caller-supplied windows (index = scale).
    pub fn from_windows(shells: Vec<ShellWindow>) -> Result<Self> {
        if shells.is_empty() {
            return Err(Error::InvalidArgument("bank needs at least one shell".into()));
        }
        Ok(Self { j_max: shells.len() as u32 - 1, shells })
    }

    fn check_partition(&self) -> Result<()> {
        let top = 1u64 << self.j_max;
        for n in 0..=top {
            let s: f64 = (0..=self.j_max).map(|j| self.chi(j, n)).sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::NumericalCheck(format!("partition of unity fails at n={n}: {s}")));
            }
        }
        Ok(())
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn shell(&self, j: u32) -> &ShellWindow {
        &self.shells[j as usize]
    }

    /// `χ_j(|n|)`.
    pub fn chi(&self, j: u32, n: u64) -> f64 {
        self.shells.get(j as usize).map_or(0.0, |w| w.get(n))
    }

    /// `K_j f`. Requires the shell to fit inside the truncation window,
    /// `2^{j+1} ≤ N`.
    pub fn project(&self, f: &FourierSeries, j: u32) -> Result<FourierSeries> {
        self.check_scale(j)?;
        let needed = self.shell(j).end() as usize;
        if j > 0 && needed > f.order() {
            return Err(Error::ScaleExceedsTruncation { j, needed, have: f.order() });
        }
        Ok(self.project_truncated(f, j))
    }

    /// `K_j f` without the truncation guard; frequencies beyond `N` are
    /// treated as zero.
    pub fn project_truncated(&self, f: &FourierSeries, j: u32) -> FourierSeries {
        let w = self.shell(j.min(self.j_max));
        let outside = j > self.j_max;
        f.map_multiplier(f.is_real(), |n| {
            let v = if outside { 0.0 } else { w.get(n.unsigned_abs()) };
            Complex64::new(v, 0.0)
        })
    }

    fn check_scale(&self, j: u32) -> Result<()> {
        if j > self.j_max {
            return Err(Error::InvalidArgument(format!("scale {j} above bank top {}", self.j_max)));
        }
        Ok(())
    }

    /// Per-scale `2^{αj} ‖K_j f‖_{L^p}` for `j = 0..=j_max`.
    pub fn besov_seminorm(&self, f: &FourierSeries, alpha: f64, p: LpNorm, grid: &TorusGrid) -> Result<BesovReport> {
        let top = 1usize << self.j_max;
        if grid.len() < 4 * top {
            return Err(Error::InvalidArgument(format!(
                "grid of {} nodes is too coarse; need at least {}",
                grid.len(),
                4 * top
            )));
        }
        let scales: Vec<u32> = (0..=self.j_max).collect();
        let rows = scales
            .par_iter()
            .map(|&j| {
                let kj = self.project(f, j)?;
                let norm = lp_norm(&kj, p, grid)?;
                Ok(ScaleValue { j, norm, weighted: 2f64.powf(alpha * j as f64) * norm })
            })
            .collect::<Result<Vec<_>>>()?;
        let sup = rows.iter().map(|r| r.weighted).fold(0.0, f64::max);
        Ok(BesovReport { alpha, p, scales: rows, sup })
    }

    /// Hölder exponent from the decay of `‖K_j f‖_∞` over the default usable
    /// range `j ∈ [4, j_max - 3]`.
    pub fn holder_exponent_estimate(&self, f: &FourierSeries, grid: &TorusGrid) -> Result<HolderEstimate> {
        let hi = self.j_max.saturating_sub(3);
        self.holder_exponent_on(f, grid, 4, hi)
    }

    /// Least-squares slope `s` of `log₂ ‖K_j f‖_∞` against `j` on
    /// `[j_lo, j_hi]`; the estimate is `α̂ = -s`.
    pub fn holder_exponent_on(
        &self,
        f: &FourierSeries,
        grid: &TorusGrid,
        j_lo: u32,
        j_hi: u32,
    ) -> Result<HolderEstimate> {
        let count = if j_hi >= j_lo { (j_hi - j_lo + 1) as usize } else { 0 };
        if count < 6 {
            return Err(Error::InsufficientScales { needed: 6, have: count });
        }
        if j_hi > self.j_max {
            return Err(Error::InvalidArgument(format!("scale {j_hi} above bank top {}", self.j_max)));
        }
        let scales: Vec<u32> = (j_lo..=j_hi).collect();
        let norms = scales
            .par_iter()
            .map(|&j| lp_norm(&self.project(f, j)?, LpNorm::Infinity, grid))
            .collect::<Result<Vec<f64>>>()?;
        if norms.iter().any(|&v| v <= 0.0) {
            return Err(Error::FitDegenerate("a shell norm vanishes".into()));
        }
        let xs: Vec<f64> = scales.iter().map(|&j| j as f64).collect();
        let ys: Vec<f64> = norms.iter().map(|v| v.log2()).collect();
        let (slope, _, r2) = least_squares(&xs, &ys);
        Ok(HolderEstimate { alpha: -slope, r2, scales, shell_norms: norms })
    }

    /// Ratios `‖u'‖_∞ / (2^j ‖u‖_∞)` for random real shell series `u = K_j f`.
    pub fn bernstein_check(&self, j: u32, trials: usize, c_b: f64, seed: u64) -> Result<BernsteinReport> {
        self.check_scale(j)?;
        if j == 0 {
            return Err(Error::InvalidArgument("Bernstein check needs a dyadic shell, j >= 1".into()));
        }
        let order = self.shell(j).end() as usize;
        let grid = TorusGrid::midpoint((16 * order).next_power_of_two())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ratios = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut half = vec![Complex64::new(0.0, 0.0)];
            for _ in 1..=order {
                half.push(Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            let f = FourierSeries::from_nonnegative(&half)?;
            let u = self.project(&f, j)?;
            ratios.push(bernstein_ratio(&u, &grid)? / 2f64.powi(j as i32));
        }
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let violations = ratios.iter().filter(|&&r| r < 1.0 / c_b || r > c_b).count();
        Ok(BernsteinReport { j, trials, c_b, min_scaled_ratio: min, max_scaled_ratio: max, violations })
    }
}

/// `‖u'‖_∞ / ‖u‖_∞` on a grid, with the derivative taken spectrally.
pub fn bernstein_ratio(u: &FourierSeries, grid: &TorusGrid) -> Result<f64> {
    let a = lp_norm(u, LpNorm::Infinity, grid)?;
    let b = lp_norm(&u.derivative(), LpNorm::Infinity, grid)?;
    Ok(b / a)
}

/// Which Lebesgue norm a Besov seminorm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpNorm {
    One,
    Infinity,
}

/// Partial sums `Σ_{0<|n|≤N} |n|^{2r} |ĉ(n)|²` at each cutoff `N` in
/// `orders`. Growth with `N` suggests `f ∉ H^r` but cannot prove it.
pub fn sobolev_partial_sums(f: &FourierSeries, r: f64, orders: &[usize]) -> Result<Vec<f64>> {
    if let Some(&n) = orders.iter().find(|&&n| n > f.order()) {
        return Err(Error::InvalidArgument(format!("cutoff {n} above truncation order {}", f.order())));
    }
    Ok(orders
        .iter()
        .map(|&n| {
            (1..=n as i64)
                .map(|k| (k as f64).powf(2.0 * r) * (f.coeff(k).norm_sqr() + f.coeff(-k).norm_sqr()))
                .sum()
        })
        .collect())
}

/// Grid approximation of `‖f‖_{L^p(T)}`: the grid max for `p = ∞`, the
/// rectangle rule `(2π/M) Σ |f(x_m)|` for `p = 1`.
pub fn lp_norm(f: &FourierSeries, p: LpNorm, grid: &TorusGrid) -> Result<f64> {
    let v = f.evaluate(grid)?;
    Ok(match p {
        LpNorm::Infinity => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        LpNorm::One => TAU / grid.len() as f64 * v.iter().map(|x| x.abs()).sum::<f64>(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleValue {
    pub j: u32,
    /// `‖K_j f‖_{L^p}`.
    pub norm: f64,
    /// `2^{αj} ‖K_j f‖_{L^p}`.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovReport {
    pub alpha: f64,
    pub p: LpNorm,
    pub scales: Vec<ScaleValue>,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub r2: f64,
    pub scales: Vec<u32>,
    pub shell_norms: Vec<f64>,
}

impl HolderEstimate {
    /// Whether `α̂` lies where `B^α_{∞,∞}` and `C^α` coincide, `(0, 1)`.
    /// Values outside only describe shell decay.
    pub fn in_holder_range(&self) -> bool {
        self.alpha > 0.0 && self.alpha < 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinReport {
    pub j: u32,
    pub trials: usize,
    pub c_b: f64,
    /// Smallest observed `‖u'‖_∞ / (2^j ‖u‖_∞)`.
    pub min_scaled_ratio: f64,
    pub max_scaled_ratio: f64,
    pub violations: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`; returns
/// `(slope, intercept, r²)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2)
}
