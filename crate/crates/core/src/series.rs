//! Truncated Fourier series on the torus `(-π, π]` and the diagonal operators
//! acting on them.
//!
//! Coefficient scaling used throughout the crate:
//!
//! ```text
//! ĉ(n) = (1/2π) ∫_{-π}^{π} e^{-iny} f(y) dy,      f(x) = Σ_n ĉ(n) e^{inx}
//! ```
//!
//! so the constant function 1 has `ĉ(0) = 1` and `‖f‖²_{L²} = 2π Σ |ĉ(n)|²`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::unit_root_table;

/// Relative tolerance of the Hermitian-symmetry check for real-valued series.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// Complex coefficients `ĉ(-N..=N)` of a trigonometric polynomial.
///
/// Series are immutable; every operator returns a new value. The `real` flag
/// is validated once, at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    order: usize,
    coeffs: Arc<[Complex64]>,
    real: bool,
}

impl FourierSeries {
    /// Builds a series from coefficients listed for `n = -N..=N`.
    pub fn new(coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        let len = coeffs.len();
        if len < 3 || len.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "coefficient array must have odd length 2N+1 with N >= 1, got {len}"
            )));
        }
        let order = (len - 1) / 2;
        if real {
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for n in 0..=order {
                let a = coeffs[order + n];
                let b = coeffs[order - n].conj();
                let mismatch = (a - b).norm();
                if mismatch > HERMITIAN_TOL * scale {
                    return Err(Error::NonHermitian { n: n as i64, mismatch });
                }
            }
        }
        Ok(Self { order, coeffs: coeffs.into(), real })
    }

    /// Builds a series from a coefficient function of the frequency.
    pub fn from_fn(order: usize, real: bool, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        let n = order as i64;
        Self::new((-n..=n).map(f).collect(), real)
    }

    /// Real-valued series from the coefficients `ĉ(0..=N)`; negative
    /// frequencies are filled in by conjugation.
    pub fn from_nonnegative(half: &[Complex64]) -> Result<Self> {
        if half.len() < 2 {
            return Err(Error::InvalidArgument("need coefficients for n = 0..=N, N >= 1".into()));
        }
        if half[0].im != 0.0 {
            return Err(Error::NonHermitian { n: 0, mismatch: half[0].im.abs() });
        }
        let order = half.len() - 1;
        let mut c = Vec::with_capacity(2 * order + 1);
        c.extend(half[1..].iter().rev().map(|z| z.conj()));
        c.extend_from_slice(half);
        Ok(Self { order, coeffs: c.into(), real: true })
    }

    pub fn zeros(order: usize) -> Result<Self> {
        Self::from_fn(order, true, |_| Complex64::new(0.0, 0.0))
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// `ĉ(n)`, zero outside the stored window.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.order as i64) as usize]
        }
    }

    /// Coefficients in index order `n = -N..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(n, ĉ(n))` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.order as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - off, *c))
    }

    /// Applies a Fourier multiplier. `real` states whether the result keeps the
    /// real flag; the caller vouches for the multiplier's symmetry.
    pub(crate) fn map_multiplier(&self, real: bool, m: impl Fn(i64) -> Complex64) -> Self {
        let coeffs: Vec<Complex64> = self.iter().map(|(n, c)| m(n) * c).collect();
        Self { order: self.order, coeffs: coeffs.into(), real }
    }

    /// Same coefficients with a different real flag, validating when the flag
    /// is switched on.
    pub fn with_real_flag(&self, real: bool) -> Result<Self> {
        Self::new(self.coeffs.to_vec(), real)
    }

    /// Truncates or zero-pads to order `n`.
    pub fn resized(&self, order: usize) -> Result<Self> {
        Self::from_fn(order, self.real, |n| self.coeff(n))
    }

    /// Periodic Hilbert transform: `ĉ(n) ↦ -i sgn(n) ĉ(n)`.
    pub fn hilbert(&self) -> Self {
        self.map_multiplier(self.real, |n| match n.signum() {
            1 => Complex64::new(0.0, -1.0),
            -1 => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        })
    }

    /// Szegő projection onto nonnegative frequencies. The result is never
    /// flagged real.
    pub fn szego_project(&self) -> Self {
        self.map_multiplier(false, |n| if n >= 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    /// Complex conjugate of the represented function: `ĉ(n) ↦ conj(ĉ(-n))`.
    pub fn conj(&self) -> Self {
        let coeffs: Vec<Complex64> = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self { order: self.order, coeffs: coeffs.into(), real: self.real }
    }

    /// Real part of the represented function, flagged real.
    pub fn real_part(&self) -> Self {
        let conj = self.conj();
        let mut coeffs: Vec<Complex64> =
            self.coeffs.iter().zip(conj.coeffs.iter()).map(|(a, b)| (a + b) * 0.5).collect();
        // the symmetric average is Hermitian up to rounding of the sum; pin it
        let o = self.order;
        coeffs[o].im = 0.0;
        for n in 1..=o {
            coeffs[o - n] = coeffs[o + n].conj();
        }
        Self { order: o, coeffs: coeffs.into(), real: true }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_multiplier(self.real, |_| Complex64::new(s, 0.0))
    }

    /// Coefficient-wise sum; orders must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::InvalidArgument(format!("order mismatch: {} vs {}", self.order, other.order)));
        }
        let coeffs: Vec<Complex64> = self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self { order: self.order, coeffs: coeffs.into(), real: self.real && other.real })
    }

    /// Adds `z` to the mean coefficient.
    pub fn shift_mean(&self, z: Complex64) -> Self {
        let mut coeffs = self.coeffs.to_vec();
        coeffs[self.order] += z;
        Self { order: self.order, coeffs: coeffs.into(), real: self.real && z.im == 0.0 }
    }

    /// Spectral derivative `ĉ(n) ↦ i n ĉ(n)`.
    pub fn derivative(&self) -> Self {
        self.map_multiplier(self.real, |n| Complex64::new(0.0, n as f64))
    }

    /// `L²(T)` norm, `sqrt(2π Σ |ĉ(n)|²)`.
    pub fn l2_norm(&self) -> f64 {
        (TAU * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Largest coefficient-wise distance to `other` (orders may differ).
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let n = self.order.max(other.order) as i64;
        (-n..=n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }

    /// Real values on a grid. Requires the real flag.
    pub fn evaluate(&self, grid: &TorusGrid) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::NotReal);
        }
        let values = self.evaluate_complex(grid);
        let budget = 1e-10 * self.coeffs.iter().map(|c| c.norm()).sum::<f64>();
        let mut out = Vec::with_capacity(values.len());
        for (z, x) in values.iter().zip(grid.nodes()) {
            if z.im.abs() > budget.max(f64::MIN_POSITIVE) {
                return Err(Error::NumericalCheck(format!(
                    "imaginary residual {:e} at x = {x} exceeds {:e}",
                    z.im.abs(),
                    budget
                )));
            }
            out.push(z.re);
        }
        Ok(out)
    }

    /// Complex values on a grid: fast transform when the node count is a
    /// power of two, direct summation otherwise.
    pub fn evaluate_complex(&self, grid: &TorusGrid) -> Vec<Complex64> {
        if grid.len().is_power_of_two() {
            self.evaluate_fft(grid)
        } else {
            self.evaluate_direct(grid)
        }
    }

    /// Direct summation `Σ_n ĉ(n) e^{inx_m}` with exact integer phase
    /// bookkeeping for the lattice part of each node.
    pub fn evaluate_direct(&self, grid: &TorusGrid) -> Vec<Complex64> {
        let m_len = grid.len() as u64;
        let table = unit_root_table(m_len);
        let first = self.first_node_phases(grid);
        (0..m_len)
            .into_par_iter()
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                // r tracks (n m) mod M as n steps up from -N
                let start = (-(self.order as i64)).rem_euclid(m_len as i64) as u64;
                let mut r = ((start as u128 * m as u128) % m_len as u128) as u64;
                for (c, e) in self.coeffs.iter().zip(&first) {
                    acc += c * e * table[r as usize];
                    r += m;
                    if r >= m_len {
                        r -= m_len;
                    }
                }
                acc
            })
            .collect()
    }

    /// Folds frequencies modulo `M` and runs one inverse FFT of length `M`.
    pub fn evaluate_fft(&self, grid: &TorusGrid) -> Vec<Complex64> {
        let m_len = grid.len();
        let first = self.first_node_phases(grid);
        let mut buf = vec![Complex64::new(0.0, 0.0); m_len];
        for (i, (n, c)) in self.iter().enumerate() {
            buf[n.rem_euclid(m_len as i64) as usize] += c * first[i];
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(m_len).process(&mut buf);
        buf
    }

    /// `e^{i n x_0}` for every stored frequency, with `x_0 = -π + s`.
    fn first_node_phases(&self, grid: &TorusGrid) -> Vec<Complex64> {
        let s = grid.first_node() + PI;
        self.iter()
            .map(|(n, _)| {
                let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let (sn, cs) = (n as f64 * s).sin_cos();
                Complex64::new(sign * cs, sign * sn)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesJson::from(self)).expect("series serializes")
    }

    /// Parses the `{"N", "re", "im"}` form. The real flag is set when the
    /// coefficients pass the Hermitian check.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if j.re.len() != 2 * j.n + 1 || j.im.len() != j.re.len() {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got re={} im={}",
                2 * j.n + 1,
                j.re.len(),
                j.im.len()
            )));
        }
        let c: Vec<Complex64> = j.re.iter().zip(&j.im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        Self::new(c.clone(), true).or_else(|_| Self::new(c, false))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    #[serde(rename = "N")]
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&FourierSeries> for SeriesJson {
    fn from(s: &FourierSeries) -> Self {
        SeriesJson {
            n: s.order,
            re: s.coeffs.iter().map(|c| c.re).collect(),
            im: s.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

/// `M` equispaced nodes on `(-π, π]`, shifted by `offset ∈ [0, 2π/M)`.
///
/// Nodes are `x_m = -π + offset + 2πm/M`. With `offset = 0` the node at `-π`
/// is represented by its periodic image `π`, so the first node becomes
/// `-π + 2π/M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    len: usize,
    offset: f64,
}

impl TorusGrid {
    pub fn new(len: usize, offset: f64) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument("grid needs at least one node".into()));
        }
        let h = TAU / len as f64;
        if !(0.0..h).contains(&offset) {
            return Err(Error::InvalidArgument(format!("offset {offset} outside [0, {h})")));
        }
        Ok(Self { len, offset })
    }

    /// Cell-midpoint grid, `offset = π / M`.
    pub fn midpoint(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument("grid needs at least one node".into()));
        }
        Self::new(len, PI / len as f64)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.len as f64
    }

    pub fn first_node(&self) -> f64 {
        if self.offset == 0.0 {
            -PI + self.spacing()
        } else {
            -PI + self.offset
        }
    }

    pub fn node(&self, m: usize) -> f64 {
        self.first_node() + TAU * m as f64 / self.len as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len).map(move |m| self.node(m))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.nodes().collect()
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y += TAU;
    }
    y
}

/// Discrete `L²` distance `sqrt((2π/M) Σ (a_m - b_m)²)` between two sampled
/// functions on an `M`-point grid.
pub fn grid_l2_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (TAU / a.len() as f64 * s).sqrt()
}
