//! Time values and exact reduction of quadratic phases.
//!
//! Every time in this crate is stored as a multiple of a full period,
//! `tau = t / 2π`. The dispersive multipliers then read `e^{2πi n² tau}` and
//! only the fractional part of `n² tau` matters. For rational times that
//! fractional part is an integer residue mod `q`; for floating times the
//! product `n² tau` is formed exactly as a double-double before the integer
//! part is dropped.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest `|n|` for which `n²` is exactly representable in an `f64`, which
/// makes the double-double reduction of `n² tau` exact.
pub const MAX_EXACT_FREQUENCY: u64 = 1 << 26;

/// A rational time `t = 2π p / q` with `gcd(p, q) = 1`.
///
/// The numerator is reduced modulo `q` on construction (the flows are
/// 2π-periodic); the value supplied by the caller is kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTime {
    p_given: u64,
    p: u64,
    q: u64,
}

impl RationalTime {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("denominator q must be positive".into()));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::NotCoprime { p, q });
        }
        Ok(Self { p_given: p, p: p % q, q })
    }

    /// Numerator reduced into `0..q`.
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The numerator as originally supplied.
    pub fn p_given(&self) -> u64 {
        self.p_given
    }

    /// `p / q` as a float, i.e. the time in units of 2π.
    pub fn turns(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `(n² p) mod q`, computed in integers.
    pub fn quadratic_residue(&self, n: u64) -> u64 {
        let q = self.q as u128;
        let n = n as u128 % q;
        ((n * n % q) * self.p as u128 % q) as u64
    }
}

impl fmt::Display for RationalTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p_given, self.q)
    }
}

/// A time expressed as a multiple of 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMult {
    Rational(RationalTime),
    /// `tau = t / 2π`, taken as an exact binary fraction.
    Real(f64),
}

impl TimeMult {
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        RationalTime::new(p, q).map(TimeMult::Rational)
    }

    /// Converts a time in radians. The division by 2π rounds once; after that
    /// the value is treated as exact.
    pub fn from_radians(t: f64) -> Self {
        TimeMult::Real(t / TAU)
    }

    pub fn turns(&self) -> f64 {
        match self {
            TimeMult::Rational(r) => r.turns(),
            TimeMult::Real(tau) => *tau,
        }
    }

    pub fn radians(&self) -> f64 {
        self.turns() * TAU
    }

    /// Fractional part of `n² tau` in `[0, 1)`.
    pub fn quadratic_turns(&self, n: u64) -> Result<f64> {
        match self {
            TimeMult::Rational(r) => Ok(r.quadratic_residue(n) as f64 / r.q() as f64),
            TimeMult::Real(tau) => {
                if n > MAX_EXACT_FREQUENCY {
                    return Err(Error::PhaseRange { n, limit: MAX_EXACT_FREQUENCY });
                }
                let n2 = (n * n) as f64;
                Ok(frac_of_product(n2, *tau))
            }
        }
    }

    /// `e^{2πi n² tau}`.
    pub fn quadratic_phase(&self, n: u64) -> Result<Complex64> {
        match self {
            TimeMult::Rational(r) => Ok(unit_root(r.quadratic_residue(n), r.q())),
            TimeMult::Real(_) => Ok(cis_turns(self.quadratic_turns(n)?)),
        }
    }
}

impl fmt::Display for TimeMult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeMult::Rational(r) => r.fmt(f),
            TimeMult::Real(tau) => write!(f, "{tau}"),
        }
    }
}

/// Fractional part of `a * b` with the product held as a double-double.
pub(crate) fn frac_of_product(a: f64, b: f64) -> f64 {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    let mut fr = (hi - hi.floor()) + lo;
    fr -= fr.floor();
    if fr >= 1.0 {
        fr -= 1.0;
    }
    fr
}

/// `e^{2πi x}` for `x` in turns.
pub fn cis_turns(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// `e^{2πi r / q}`, folding `r / q` into `[-1/8, 1/8]` turns first so the
/// trigonometric argument stays small.
pub fn unit_root(r: u64, q: u64) -> Complex64 {
    let r = r % q;
    // octant index o with r/q ≈ o/8, residual numerator 8r - o q in [-q/2, q/2]
    let eight_r = 8 * r as u128;
    let q128 = q as u128;
    let o = ((eight_r + q128 / 2) / q128) as i64;
    let resid = eight_r as i128 - o as i128 * q128 as i128;
    let theta = TAU * (resid as f64) / (8.0 * q as f64);
    let (s, c) = theta.sin_cos();
    let z = Complex64::new(c, s);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rot = match o.rem_euclid(8) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(h, h),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(-h, h),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-h, -h),
        6 => Complex64::new(0.0, -1.0),
        _ => Complex64::new(h, -h),
    };
    match o.rem_euclid(8) {
        0 => z,
        2 => Complex64::new(-z.im, z.re),
        4 => -z,
        6 => Complex64::new(z.im, -z.re),
        _ => z * rot,
    }
}

/// Table of `e^{2πi r / q}` for `r = 0..q`.
pub fn unit_root_table(q: u64) -> Vec<Complex64> {
    (0..q).map(|r| unit_root(r, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_time_reduces_numerator() {
        let t = RationalTime::new(7, 3).unwrap();
        assert_eq!(t.p(), 1);
        assert_eq!(t.p_given(), 7);
        assert_eq!(t.to_string(), "7/3");
        assert!(matches!(RationalTime::new(2, 4), Err(Error::NotCoprime { .. })));
        assert!(RationalTime::new(1, 0).is_err());
        assert_eq!(RationalTime::new(0, 1).unwrap().p(), 0);
    }

    #[test]
    fn residue_matches_bigint_free_reference() {
        let t = RationalTime::new(165_580_141, 102_334_155).unwrap();
        for n in [1u64, 17, 4096, 32768, 1 << 20] {
            let expect = ((n as u128 * n as u128) * 165_580_141u128) % 102_334_155u128;
            assert_eq!(t.quadratic_residue(n) as u128, expect);
        }
    }

    #[test]
    fn integer_times_give_unit_phase() {
        let t = TimeMult::Real(1.0);
        for n in [0u64, 1, 3, 1000, 1 << 14] {
            assert_eq!(t.quadratic_turns(n).unwrap(), 0.0);
        }
        let t = TimeMult::rational(1, 1).unwrap();
        assert_eq!(t.quadratic_phase(12345).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn double_double_reduction_is_exact_for_dyadic_tau() {
        // tau = 3/8 + 2^-40; n² tau mod 1 is known exactly
        let tau = 0.375 + 2f64.powi(-40);
        let n = 1u64 << 20;
        let fr = TimeMult::Real(tau).quadratic_turns(n).unwrap();
        // n² = 2^40 so n² tau = 3·2^37 + 1, fractional part 0
        assert_eq!(fr, 0.0);
        let fr = TimeMult::Real(tau).quadratic_turns(3).unwrap();
        let expect = (9.0 * 0.375f64).fract() + 9.0 * 2f64.powi(-40);
        assert!((fr - expect).abs() < 1e-16);
    }

    #[test]
    fn phase_guard() {
        let t = TimeMult::Real(0.1);
        assert!(matches!(t.quadratic_turns(MAX_EXACT_FREQUENCY + 1), Err(Error::PhaseRange { .. })));
    }

    #[test]
    fn unit_root_against_direct_formula() {
        for q in [1u64, 2, 3, 7, 8, 100, 1597, 8544] {
            for r in 0..q.min(200) {
                let z = unit_root(r, q);
                let th = TAU * r as f64 / q as f64;
                assert!((z.re - th.cos()).abs() < 1e-14, "q={q} r={r}");
                assert!((z.im - th.sin()).abs() < 1e-14, "q={q} r={r}");
            }
        }
        assert_eq!(unit_root(1, 4), Complex64::new(0.0, 1.0));
        assert_eq!(unit_root(1, 2), Complex64::new(-1.0, 0.0));
    }
}
