//! Exact solutions at rational times `t = 2πp/q`.
//!
//! The Schrödinger flow at such a time is a finite superposition of
//! translates,
//!
//! ```text
//! v(x) = (1/q) Σ_k W_k u₀(x - 2πk/q),
//! ```
//!
//! and the Benjamin–Ono solution is `Re[(I + iH) v]`, which for real `u₀`
//! reads `(1/q) Σ_k [Re W_k · u₀ - Im W_k · Hu₀](x - 2πk/q)`. Both `u₀` and
//! `Hu₀` are available in closed form for step data, so no truncation enters.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauss::{gauss_weights_for, GaussWeights};
use crate::initial::{HilbertValue, PiecewiseConstant, BREAKPOINT_TOL};
use crate::phase::RationalTime;
use crate::series::{wrap_angle, TorusGrid};

/// Weights smaller than this in magnitude (or imaginary part) are treated as
/// exact zeros; nonvanishing Gauss sums have modulus at least 1.
const WEIGHT_ZERO: f64 = 1e-8;

/// Above this denominator, grids whose size is a multiple of `q` reuse node
/// values instead of evaluating every shifted copy.
const TABLE_MIN_Q: u64 = 512;

/// Minimum distance between any shifted node and a jump for a grid offset to
/// be accepted by [`lattice_avoiding_grid`].
pub const LATTICE_CLEARANCE: f64 = 1e-9;

/// A rational time with its Gauss weights.
#[derive(Debug, Clone)]
pub struct RevivalPlan {
    weights: GaussWeights,
    /// `(k, Re W_k, Im W_k)` for nonvanishing weights.
    active: Vec<(u64, f64, f64)>,
}

impl RevivalPlan {
    pub fn new(rt: RationalTime) -> Result<Self> {
        let weights = gauss_weights_for(rt)?;
        let active = weights
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| w.norm() >= WEIGHT_ZERO)
            .map(|(k, w)| {
                let im = if w.im.abs() < WEIGHT_ZERO { 0.0 } else { w.im };
                let re = if w.re.abs() < WEIGHT_ZERO { 0.0 } else { w.re };
                (k as u64, re, im)
            })
            .collect();
        Ok(Self { weights, active })
    }

    pub fn time(&self) -> RationalTime {
        self.weights.time()
    }

    pub fn weights(&self) -> &GaussWeights {
        &self.weights
    }

    /// Lattice shifts `2πk/q` whose weight has a nonzero imaginary part,
    /// i.e. where the Benjamin–Ono profile carries a cusp.
    pub fn cusp_shifts(&self) -> Vec<f64> {
        let q = self.time().q() as f64;
        self.active.iter().filter(|a| a.2 != 0.0).map(|a| TAU * a.0 as f64 / q).collect()
    }

    /// `u(x, 2πp/q)` at every node of `grid`.
    pub fn bo(&self, u0: &PiecewiseConstant, grid: &TorusGrid) -> Result<Vec<f64>> {
        let q = self.time().q();
        if q > TABLE_MIN_Q && (grid.len() as u64).is_multiple_of(q) {
            return self.bo_table(u0, grid);
        }
        let shifts = self.shifts();
        let qf = q as f64;
        (0..grid.len())
            .into_par_iter()
            .map(|m| {
                let x = grid.node(m);
                let mut acc = 0.0;
                for (&(_, re, im), &s) in self.active.iter().zip(&shifts) {
                    let y = x - s;
                    if re != 0.0 {
                        acc += re * u0.value_at(y);
                    }
                    if im != 0.0 {
                        acc -= im * hilbert_finite(u0, y)?;
                    }
                }
                Ok(acc / qf)
            })
            .collect()
    }

    /// `v(x, 2πp/q)` at every node of `grid`.
    pub fn schrodinger(&self, u0: &PiecewiseConstant, grid: &TorusGrid) -> Vec<Complex64> {
        let shifts = self.shifts();
        let qf = self.time().q() as f64;
        (0..grid.len())
            .into_par_iter()
            .map(|m| {
                let x = grid.node(m);
                let mut acc = Complex64::new(0.0, 0.0);
                for (&(_, re, im), &s) in self.active.iter().zip(&shifts) {
                    acc += Complex64::new(re, im) * u0.value_at(x - s);
                }
                acc / qf
            })
            .collect()
    }

    fn shifts(&self) -> Vec<f64> {
        let q = self.time().q() as f64;
        self.active.iter().map(|a| TAU * a.0 as f64 / q).collect()
    }

    /// When `q | M` the shifted nodes are nodes again: `x_m - 2πk/q =
    /// x_{m - kM/q}`.
    fn bo_table(&self, u0: &PiecewiseConstant, grid: &TorusGrid) -> Result<Vec<f64>> {
        let len = grid.len();
        let step = len / self.time().q() as usize;
        let plateau = u0.sample(grid);
        let hilbert: Vec<Option<f64>> =
            (0..len).into_par_iter().map(|m| hilbert_finite(u0, grid.node(m)).ok()).collect();
        let qf = self.time().q() as f64;
        (0..len)
            .into_par_iter()
            .map(|m| {
                let mut acc = 0.0;
                for &(k, re, im) in &self.active {
                    let i = (m + len - (k as usize * step) % len) % len;
                    if re != 0.0 {
                        acc += re * plateau[i];
                    }
                    if im != 0.0 {
                        match hilbert[i] {
                            Some(h) => acc -= im * h,
                            None => return Err(Error::SingularPoint { x: grid.node(m) }),
                        }
                    }
                }
                Ok(acc / qf)
            })
            .collect()
    }
}

fn hilbert_finite(u0: &PiecewiseConstant, y: f64) -> Result<f64> {
    if u0.distance_to_jump(y) < BREAKPOINT_TOL {
        return Err(Error::SingularPoint { x: wrap_angle(y) });
    }
    match u0.hilbert_at(y) {
        HilbertValue::Finite(v) => Ok(v),
        _ => Err(Error::SingularPoint { x: wrap_angle(y) }),
    }
}

/// Benjamin–Ono solution at `t = 2πp/q` from the revival formula.
pub fn bo_revival(u0: &PiecewiseConstant, rt: RationalTime, grid: &TorusGrid) -> Result<Vec<f64>> {
    RevivalPlan::new(rt)?.bo(u0, grid)
}

/// Schrödinger solution at `t = 2πp/q` as a superposition of translates.
pub fn schrodinger_revival(u0: &PiecewiseConstant, rt: RationalTime, grid: &TorusGrid) -> Result<Vec<Complex64>> {
    Ok(RevivalPlan::new(rt)?.schrodinger(u0, grid))
}

/// Smallest distance from a node, shifted by any multiple of `2π/q`, to a
/// jump of `u0`.
pub fn lattice_clearance(u0: &PiecewiseConstant, q: u64, grid: &TorusGrid) -> f64 {
    let cell = TAU / q as f64;
    let cusps = u0.cusps();
    (0..grid.len())
        .into_par_iter()
        .map(|m| {
            let x = grid.node(m);
            cusps
                .iter()
                .map(|&(a, _)| {
                    let r = (x - a).rem_euclid(cell);
                    r.min(cell - r)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// A `len`-node grid whose shifted lattice stays clear of the jumps of `u0`.
///
/// The midpoint offset `π/M` is used whenever it is admissible; otherwise the
/// offset fraction runs through `1/4, 3/4, 1/8, 3/8, …` of a cell and the
/// first admissible one is taken.
pub fn lattice_avoiding_grid(u0: &PiecewiseConstant, q: u64, len: usize) -> Result<TorusGrid> {
    let h = TAU / len as f64;
    let mut fractions = vec![0.5];
    let mut den = 4u32;
    while den <= 1 << 12 {
        fractions.extend((1..den).step_by(2).map(|k| k as f64 / den as f64));
        den *= 2;
    }
    for s in fractions {
        let grid = if s == 0.5 { TorusGrid::midpoint(len)? } else { TorusGrid::new(len, s * h)? };
        if lattice_clearance(u0, q, &grid) >= LATTICE_CLEARANCE {
            return Ok(grid);
        }
    }
    Err(Error::SingularPoint { x: PI })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(p: u64, q: u64) -> RationalTime {
        RationalTime::new(p, q).unwrap()
    }

    #[test]
    fn time_zero_returns_initial_samples() {
        let u0 = PiecewiseConstant::canonical();
        let grid = TorusGrid::midpoint(1000).unwrap();
        assert_eq!(bo_revival(&u0, rt(0, 1), &grid).unwrap(), u0.sample(&grid));
        assert_eq!(bo_revival(&u0, rt(1, 1), &grid).unwrap(), u0.sample(&grid));
        let v = schrodinger_revival(&u0, rt(0, 1), &grid).unwrap();
        assert!(v.iter().zip(u0.sample(&grid)).all(|(a, b)| a.re == b && a.im == 0.0));
    }

    #[test]
    fn half_period_swaps_arcs() {
        let u0 = PiecewiseConstant::canonical();
        let grid = TorusGrid::midpoint(1000).unwrap();
        let u = bo_revival(&u0, rt(1, 2), &grid).unwrap();
        let v = schrodinger_revival(&u0, rt(1, 2), &grid).unwrap();
        for (m, x) in grid.nodes().enumerate() {
            let expect = u0.value_at(x - PI);
            assert!((u[m] - expect).abs() < 1e-14);
            assert!((v[m] - Complex64::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn numerator_taken_mod_q() {
        let u0 = PiecewiseConstant::canonical();
        let grid = TorusGrid::midpoint(997).unwrap();
        for (p, q) in [(1u64, 3u64), (2, 5), (3, 4)] {
            assert_eq!(bo_revival(&u0, rt(p, q), &grid).unwrap(), bo_revival(&u0, rt(p + q, q), &grid).unwrap());
        }
    }

    #[test]
    fn table_path_matches_direct() {
        let u0 = PiecewiseConstant::canonical();
        let q = 601u64;
        let grid = lattice_avoiding_grid(&u0, q, 2 * q as usize).unwrap();
        let plan = RevivalPlan::new(rt(5, q)).unwrap();
        let fast = plan.bo(&u0, &grid).unwrap();
        let shifts = plan.shifts();
        for m in (0..grid.len()).step_by(37) {
            let x = grid.node(m);
            let mut acc = 0.0;
            for (&(_, re, im), &s) in plan.active.iter().zip(&shifts) {
                acc += re * u0.value_at(x - s) - im * hilbert_finite(&u0, x - s).unwrap();
            }
            assert!((fast[m] - acc / q as f64).abs() < 1e-11, "m={m}");
        }
    }

    #[test]
    fn singular_lattice_is_reported() {
        let u0 = PiecewiseConstant::canonical();
        // nodes at multiples of 2π/4 land on ±π/2
        let grid = TorusGrid::new(4, 0.0).unwrap();
        assert!(matches!(bo_revival(&u0, rt(1, 3), &grid), Err(Error::SingularPoint { .. })));
        let safe = lattice_avoiding_grid(&u0, 3, 4).unwrap();
        assert!(bo_revival(&u0, rt(1, 3), &safe).is_ok());
    }

    #[test]
    fn avoiding_grid_prefers_midpoint() {
        let u0 = PiecewiseConstant::canonical();
        let g = lattice_avoiding_grid(&u0, 1597, 10_000).unwrap();
        assert_eq!(g, TorusGrid::midpoint(10_000).unwrap());
        let g = lattice_avoiding_grid(&u0, 8544, 10_000).unwrap();
        assert_ne!(g, TorusGrid::midpoint(10_000).unwrap());
        assert!(lattice_clearance(&u0, 8544, &g) >= LATTICE_CLEARANCE);
    }
}
