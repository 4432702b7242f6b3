//! Piecewise-constant initial data and their exact Hilbert transforms.
//!
//! A step function is stored as breakpoints `a_1 < … < a_J` in `(-π, π]` and
//! plateau values `v_1, …, v_J`, with `v_j` held on `(a_{j-1}, a_j]` and
//! `v_1` on the wrapped arc `(a_J - 2π, a_1]`. Its Hilbert transform is a sum
//! of logarithmic cusps, one per jump:
//!
//! ```text
//! Hf(x) = (1/π) Σ_j (v_{j+1} - v_j) log|sin((x - a_j)/2)|
//! ```
//!
//! which for a single interval is `(1/π) log|sin((x-a)/2) / sin((x-b)/2)|`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{wrap_angle, FourierSeries, TorusGrid};

/// Distance below which an evaluation point counts as sitting on a breakpoint.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// Closed-form Hilbert transform value, with the logarithmic singularities
/// kept as explicit variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HilbertValue {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl HilbertValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            HilbertValue::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// Bounded-variation step function on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    /// `(a_j, v_{j+1} - v_j)` for every nonzero jump.
    cusps: Vec<(f64, f64)>,
}

impl PiecewiseConstant {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidArgument("need at least one breakpoint".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints and values must be finite".into()));
        }
        if breakpoints.iter().any(|&a| a <= -PI || a > PI) {
            return Err(Error::InvalidArgument("breakpoints must lie in (-π, π]".into()));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
        }
        let n = values.len();
        let cusps =
            (0..n).map(|i| (breakpoints[i], values[(i + 1) % n] - values[i])).filter(|&(_, d)| d != 0.0).collect();
        Ok(Self { breakpoints, values, cusps })
    }

    /// Indicator of the arc `(a, b]` (equal to `1_[a,b]` almost everywhere).
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("indicator needs a < b, got [{a}, {b}]")));
        }
        Self::new(vec![a, b], vec![0.0, 1.0])
    }

    /// The demonstration datum `1_[-π/2, π/2]`.
    pub fn canonical() -> Self {
        Self::indicator(-FRAC_PI_2, FRAC_PI_2).expect("valid canonical indicator")
    }

    /// A constant function, represented with a single (inert) breakpoint at π.
    pub fn constant(v: f64) -> Self {
        Self::new(vec![PI], vec![v]).expect("valid constant")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Jump `v_{j+1} - v_j` across each breakpoint `a_j` (cyclically).
    pub fn jumps(&self) -> Vec<f64> {
        let j = self.values.len();
        (0..j).map(|i| self.values[(i + 1) % j] - self.values[i]).collect()
    }

    /// Breakpoints carrying a nonzero jump.
    pub fn jump_points(&self) -> Vec<f64> {
        self.cusps.iter().map(|c| c.0).collect()
    }

    /// `(a_j, jump_j)` pairs with nonzero jump.
    pub fn cusps(&self) -> &[(f64, f64)] {
        &self.cusps
    }

    pub fn total_variation(&self) -> f64 {
        self.jumps().iter().map(|d| d.abs()).sum()
    }

    /// Point value with the half-open plateau convention.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = wrap_angle(x);
        let idx = self.breakpoints.partition_point(|&a| a < x);
        if idx == self.breakpoints.len() {
            self.values[0]
        } else {
            self.values[idx]
        }
    }

    /// Mean value, `ĉ(0)`.
    pub fn mean(&self) -> f64 {
        self.fourier_coefficient(0).re
    }

    /// `∫_T f²`, exactly.
    pub fn l2_norm_sqr(&self) -> f64 {
        let j = self.breakpoints.len();
        (0..j)
            .map(|i| {
                let len = if i == 0 {
                    self.breakpoints[0] - self.breakpoints[j - 1] + TAU
                } else {
                    self.breakpoints[i] - self.breakpoints[i - 1]
                };
                let len = if j == 1 { TAU } else { len };
                self.values[i] * self.values[i] * len
            })
            .sum()
    }

    /// Exact Fourier coefficient `ĉ(n) = (1/2π) ∫ e^{-iny} f(y) dy`.
    ///
    /// Uses `f = v_1 + Σ_{j≥2} (v_j - v_1) 1_(a_{j-1}, a_j]` and, for an
    /// interval, `ĉ(n) = (e^{-ina} - e^{-inb}) / (2πin)`.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        let v1 = self.values[0];
        if n == 0 {
            let mut c = v1;
            for j in 1..self.values.len() {
                c += (self.values[j] - v1) * (self.breakpoints[j] - self.breakpoints[j - 1]) / TAU;
            }
            return Complex64::new(c, 0.0);
        }
        let nf = n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..self.values.len() {
            let w = self.values[j] - v1;
            if w == 0.0 {
                continue;
            }
            let ea = Complex64::from_polar(1.0, -nf * self.breakpoints[j - 1]);
            let eb = Complex64::from_polar(1.0, -nf * self.breakpoints[j]);
            acc += (ea - eb) * w;
        }
        acc / Complex64::new(0.0, TAU * nf)
    }

    /// Truncated Fourier series of order `order`, flagged real.
    pub fn to_series(&self, order: usize) -> Result<FourierSeries> {
        let half: Vec<Complex64> = (0..=order as i64).map(|n| self.fourier_coefficient(n)).collect();
        FourierSeries::from_nonnegative(&half)
    }

    /// Closed-form Hilbert transform at one point.
    pub fn hilbert_at(&self, x: f64) -> HilbertValue {
        let mut acc = 0.0;
        for &(a, d) in &self.cusps {
            let s = ((x - a) / 2.0).sin().abs();
            if s < 1e-300 {
                return if d > 0.0 { HilbertValue::NegInfinity } else { HilbertValue::PosInfinity };
            }
            acc += d * s.ln();
        }
        HilbertValue::Finite(acc / PI)
    }

    /// Distance from `x` to the nearest breakpoint with a nonzero jump,
    /// measured on the circle.
    pub fn distance_to_jump(&self, x: f64) -> f64 {
        self.cusps.iter().map(|&(a, _)| wrap_angle(x - a).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Closed-form Hilbert transform at every node of `grid`.
    pub fn hilbert_piecewise(&self, grid: &TorusGrid) -> Result<Vec<f64>> {
        grid.nodes()
            .map(|x| {
                if self.distance_to_jump(x) < BREAKPOINT_TOL {
                    return Err(Error::SingularPoint { x });
                }
                match self.hilbert_at(x) {
                    HilbertValue::Finite(v) => Ok(v),
                    _ => Err(Error::SingularPoint { x }),
                }
            })
            .collect()
    }

    /// Samples of `f` at every node of `grid`.
    pub fn sample(&self, grid: &TorusGrid) -> Vec<f64> {
        grid.nodes().map(|x| self.value_at(x)).collect()
    }
}

/// `H 1_[a,b](x) = (1/π) log|sin((x-a)/2) / sin((x-b)/2)|` for
/// `-π ≤ a < b < π`.
///
/// Returns `NegInfinity` at `x ≡ a` and `PosInfinity` at `x ≡ b`: the cusp
/// points toward `-∞` at the upward jump and `+∞` at the downward jump, from
/// both sides.
pub fn hilbert_closed_form(a: f64, b: f64, x: f64) -> Result<HilbertValue> {
    if !(-PI <= a && a < b && b < PI) {
        return Err(Error::InvalidArgument(format!("need -π <= a < b < π, got a={a} b={b}")));
    }
    let sa = ((x - a) / 2.0).sin().abs();
    let sb = ((x - b) / 2.0).sin().abs();
    Ok(if sa < 1e-300 {
        HilbertValue::NegInfinity
    } else if sb < 1e-300 {
        HilbertValue::PosInfinity
    } else {
        HilbertValue::Finite((sa / sb).ln() / PI)
    })
}

impl FromStr for PiecewiseConstant {
    type Err = Error;

    /// Parses `indicator:a,b` or `step:a1=v1,a2=v2,…` (radians, decimal).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| -> Result<f64> {
            t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number {t:?}: {e}")))
        };
        if let Some(rest) = s.strip_prefix("indicator:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("indicator needs two endpoints: {s:?}")));
            }
            Self::indicator(num(parts[0])?, num(parts[1])?)
        } else if let Some(rest) = s.strip_prefix("step:") {
            let mut bps = Vec::new();
            let mut vals = Vec::new();
            for item in rest.split(',') {
                let (a, v) =
                    item.split_once('=').ok_or_else(|| Error::Parse(format!("step entry {item:?} is not a=v")))?;
                bps.push(num(a)?);
                vals.push(num(v)?);
            }
            Self::new(bps, vals)
        } else {
            Err(Error::Parse(format!("unknown initial condition {s:?}")))
        }
    }
}

impl fmt::Display for PiecewiseConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step:")?;
        for (i, (a, v)) in self.breakpoints.iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}={v}")?;
        }
        Ok(())
    }
}
