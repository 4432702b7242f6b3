//! Time specifications and the end-to-end pipelines behind the figures.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::boxdim::{default_eps_grid, fit_dimension, DimensionFit, SampledGraph};
use crate::cfrac::{expand, Convergent, Target};
use crate::error::{Error, Result};
use crate::initial::PiecewiseConstant;
use crate::phase::{RationalTime, TimeMult};
use crate::revival::{lattice_avoiding_grid, RevivalPlan};
use crate::series::TorusGrid;

/// Default continued-fraction depth when an irrational time is requested.
pub const DEFAULT_DEPTH: usize = 40;

/// A time given as a multiple of 2π: `p/q`, `phi`, `e`, or a decimal.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSpec {
    Rational(u64, u64),
    Phi,
    E,
    Decimal(String),
}

impl FromStr for TimeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "phi" => return Ok(TimeSpec::Phi),
            "e" => return Ok(TimeSpec::E),
            _ => {}
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            RationalTime::new(p, q)?;
            return Ok(TimeSpec::Rational(p, q));
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("unrecognised time {s:?}; expected p/q, phi, e or a decimal")))?;
        Ok(TimeSpec::Decimal(s.to_string()))
    }
}

impl fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSpec::Rational(p, q) => write!(f, "{p}/{q}"),
            TimeSpec::Phi => f.write_str("phi"),
            TimeSpec::E => f.write_str("e"),
            TimeSpec::Decimal(s) => f.write_str(s),
        }
    }
}

/// A time ready for the solvers, with the convergent that stands in for an
/// irrational target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedTime {
    #[serde(skip)]
    pub time: TimeMult,
    pub label: String,
    pub convergent: Option<Convergent>,
}

impl TimeSpec {
    /// `phi` and `e` become their convergent at `depth`; a decimal is used as
    /// a binary floating time.
    pub fn resolve(&self, depth: usize) -> Result<ResolvedTime> {
        let label = self.to_string();
        match self {
            TimeSpec::Rational(p, q) => Ok(ResolvedTime { time: TimeMult::rational(*p, *q)?, label, convergent: None }),
            TimeSpec::Phi | TimeSpec::E => {
                let target = if *self == TimeSpec::Phi { Target::phi() } else { Target::e() };
                let c = *expand(&target, depth)?.deepest();
                Ok(ResolvedTime { time: TimeMult::rational(c.p, c.q)?, label, convergent: Some(c) })
            }
            TimeSpec::Decimal(s) => {
                let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
                Ok(ResolvedTime { time: TimeMult::Real(v), label, convergent: None })
            }
        }
    }

    /// The exact rational time, when one is available.
    pub fn rational(&self, depth: usize) -> Result<RationalTime> {
        match self.resolve(depth)?.time {
            TimeMult::Rational(r) => Ok(r),
            TimeMult::Real(_) => Err(Error::InvalidArgument(format!("time {self} is not rational"))),
        }
    }
}

/// Samples of a revival profile and its dimension fit.
#[derive(Debug, Clone)]
pub struct RevivalFigure {
    pub time: RationalTime,
    pub grid: TorusGrid,
    pub u: Vec<f64>,
    pub fit: DimensionFit,
}

/// Benjamin–Ono revival of `u0` at `2πp/q` on `samples` nodes of a
/// lattice-avoiding grid, followed by a box-counting fit on `eps_num`
/// default box sizes.
pub fn revival_figure(
    u0: &PiecewiseConstant,
    time: RationalTime,
    samples: usize,
    eps_num: usize,
) -> Result<RevivalFigure> {
    let grid = lattice_avoiding_grid(u0, time.q(), samples)?;
    let u = RevivalPlan::new(time)?.bo(u0, &grid)?;
    let graph = SampledGraph::new(grid.to_vec(), u.clone())?;
    let fit = fit_dimension(&graph, &default_eps_grid(&graph, eps_num))?;
    Ok(RevivalFigure { time, grid, u, fit })
}

/// Benjamin–Ono and Schrödinger revival profiles on one grid.
#[derive(Debug, Clone)]
pub struct RevivalPair {
    pub grid: TorusGrid,
    pub u: Vec<f64>,
    pub v: Vec<Complex64>,
}

pub fn revival_pair(u0: &PiecewiseConstant, time: RationalTime, samples: usize) -> Result<RevivalPair> {
    let grid = lattice_avoiding_grid(u0, time.q(), samples)?;
    let plan = RevivalPlan::new(time)?;
    let u = plan.bo(u0, &grid)?;
    let v = plan.schrodinger(u0, &grid);
    Ok(RevivalPair { grid, u, v })
}
