//! Continued fractions, convergents and denominator-growth diagnostics used
//! to pick rational stand-ins for irrational times.
//!
//! Targets are held as exact rationals. The built-in constants carry 60
//! decimal digits, decimal strings are parsed exactly, and an `f64` is
//! expanded as the binary fraction it actually is.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Golden ratio to 60 significant digits.
pub const PHI_DIGITS: &str = "1.61803398874989484820458683436563811772030917980576286213544862";
/// Euler's number to 60 significant digits.
pub const E_DIGITS: &str = "2.71828182845904523536028747135266249775724709369995957496696763";

/// Depth cap for `f64` targets.
pub const MAX_FLOAT_DEPTH: usize = 40;

/// `π² / (12 ln 2)`, the almost-sure growth rate of `ln q_n / n`.
pub fn levy_constant() -> f64 {
    std::f64::consts::PI.powi(2) / (12.0 * std::f64::consts::LN_2)
}

/// A positive real number known as an exact rational `num / den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    num: BigUint,
    den: BigUint,
    label: String,
    from_float: bool,
}

impl Target {
    pub fn phi() -> Self {
        Self::from_decimal(PHI_DIGITS).expect("valid literal").labelled("phi")
    }

    pub fn e() -> Self {
        Self::from_decimal(E_DIGITS).expect("valid literal").labelled("e")
    }

    /// Parses a nonnegative decimal such as `"0.4142"` or `"3"`.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let t = s.trim();
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a nonnegative decimal: {s:?}")));
        }
        let digits = format!("{int}{frac}");
        let num =
            BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| Error::Parse(format!("bad digits in {s:?}")))?;
        let den = BigUint::from(10u32).pow(frac.len() as u32);
        Ok(Self::reduced(num, den, t.to_string(), false))
    }

    /// The exact binary value of a finite positive float.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidArgument(format!("target must be positive and finite, got {x}")));
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e2) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let (num, den) = if e2 >= 0 {
            (BigUint::from(mant) << e2 as usize, BigUint::one())
        } else {
            (BigUint::from(mant), BigUint::one() << (-e2) as usize)
        };
        Ok(Self::reduced(num, den, format!("{x}"), true))
    }

    fn reduced(num: BigUint, den: BigUint, label: String, from_float: bool) -> Self {
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() { (num, den) } else { (num / &g, den / &g) };
        Self { num, den, label, from_float }
    }

    fn labelled(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&BigInt::from(self.num.clone()), &self.den)
    }

    /// `|target - p/q|`, evaluated exactly and rounded once.
    pub fn gap(&self, p: u64, q: u64) -> f64 {
        self.gap_big(&BigUint::from(p), &BigUint::from(q))
    }

    fn gap_big(&self, p: &BigUint, q: &BigUint) -> f64 {
        let lhs = BigInt::from(&self.num * q);
        let rhs = BigInt::from(&self.den * p);
        let diff = (lhs - rhs).magnitude().clone();
        ratio_to_f64(&BigInt::from(diff), &(&self.den * q))
    }
}

impl FromStr for Target {
    type Err = Error;

    /// `phi`, `e`, or a decimal string.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "phi" => Ok(Self::phi()),
            "e" => Ok(Self::e()),
            other => Self::from_decimal(other),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Quotient of two big integers rounded to `f64` without overflowing the
/// intermediate conversions.
fn ratio_to_f64(num: &BigInt, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.magnitude().bits() as i64;
    let db = den.bits() as i64;
    // shift both to ~64 significant bits
    let sn = (nb - 64).max(0) as usize;
    let sd = (db - 64).max(0) as usize;
    let n = (num.magnitude() >> sn).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> sd).to_f64().unwrap_or(f64::INFINITY);
    let v = n / d * 2f64.powi((sn as i64 - sd as i64) as i32);
    if num.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// An irreducible fraction `p/q` together with its distance to the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
    pub target: f64,
    pub gap: f64,
}

impl Convergent {
    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Dirichlet's certificate `|target - p/q| ≤ 1/q²`.
    pub fn is_dirichlet(&self) -> bool {
        self.gap * (self.q as f64) * (self.q as f64) <= 1.0 + 1e-12
    }
}

/// Partial quotients `[a_0; a_1, a_2, …]` and their convergents.
///
/// `convergents` holds the leading convergents whose numerator and
/// denominator fit in 64 bits; `ln_denominators` covers every index.
#[derive(Debug, Clone, PartialEq)]
pub struct CfExpansion {
    pub partial_quotients: Vec<u64>,
    pub convergents: Vec<Convergent>,
    pub ln_denominators: Vec<f64>,
    /// `true` when the expansion stopped because the target is rational.
    pub terminated: bool,
}

impl CfExpansion {
    /// Number of partial quotients, `depth + 1` unless the target terminated.
    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    /// Deepest convergent representable in 64 bits.
    pub fn deepest(&self) -> &Convergent {
        self.convergents.last().expect("expansion has a_0")
    }
}

/// Expands an exact target to `depth` partial quotients beyond `a_0`
/// (convergents `0..=depth`), stopping early if the target is rational.
pub fn expand(target: &Target, depth: usize) -> Result<CfExpansion> {
    if target.num.is_zero() {
        return Err(Error::InvalidArgument("target must be positive".into()));
    }
    if target.from_float && depth > MAX_FLOAT_DEPTH {
        return Err(Error::InvalidArgument(format!("depth {depth} exceeds the floating-point cap {MAX_FLOAT_DEPTH}")));
    }
    let x = target.to_f64();
    let (mut num, mut den) = (target.num.clone(), target.den.clone());
    // (p_{n-1}, q_{n-1}) and (p_{n-2}, q_{n-2})
    let (mut p1, mut q1) = (BigUint::one(), BigUint::zero());
    let (mut p2, mut q2) = (BigUint::zero(), BigUint::one());
    let mut quotients = Vec::new();
    let mut convergents: Vec<Convergent> = Vec::new();
    let mut ln_denominators = Vec::new();
    let mut last_gap = f64::INFINITY;
    let float_limit = if target.from_float { Some(float_resolution(x)) } else { None };
    let mut terminated = false;
    for n in 0..=depth {
        if den.is_zero() {
            terminated = true;
            break;
        }
        if let Some(res) = float_limit {
            // the previous convergent already sits inside the rounding cell of
            // the float; further quotients would describe the rounding
            if last_gap < res {
                return Err(Error::PrecisionExhausted { reached: n, requested: depth + 1 });
            }
        }
        let (a, r) = num.div_rem(&den);
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        let pa = a.to_u64().ok_or_else(|| Error::Overflow(format!("partial quotient at index {n} exceeds 64 bits")))?;
        quotients.push(pa);
        ln_denominators.push(ln_big(&q));
        last_gap = target.gap_big(&p, &q);
        if convergents.len() == n {
            if let (Some(pp), Some(qq)) = (p.to_u64(), q.to_u64()) {
                convergents.push(Convergent { p: pp, q: qq, target: x, gap: last_gap });
            }
        }
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
        num = std::mem::replace(&mut den, r);
    }
    if den.is_zero() {
        terminated = true;
    }
    Ok(CfExpansion { partial_quotients: quotients, convergents, ln_denominators, terminated })
}

/// Expands a floating-point target. Depth is capped at 40; asking for
/// quotients beyond what the float resolves is an error.
pub fn expand_f64(x: f64, depth: usize) -> Result<CfExpansion> {
    expand(&Target::from_f64(x)?, depth)
}

/// Natural logarithm of a big integer, exact to `f64` rounding.
fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(64);
    (v >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Half an ulp of `x`: below this the float cannot tell two reals apart.
fn float_resolution(x: f64) -> f64 {
    let next = f64::from_bits(x.to_bits() + 1);
    0.5 * (next - x)
}

/// `ln(q_n) / n` at the deepest convergent.
pub fn levy_rate(cf: &CfExpansion) -> Result<f64> {
    let len = cf.ln_denominators.len();
    if len < 10 {
        return Err(Error::DepthInsufficient(format!("need at least 10 convergents, have {len}")));
    }
    Ok(cf.ln_denominators[len - 1] / (len - 1) as f64)
}

/// Convergent chosen for dyadic scale `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleSelection {
    pub j: u32,
    pub index: usize,
    pub convergent: Convergent,
    /// `log₂(q) / j - 1`.
    pub r_j: f64,
}

/// Picks the convergent with index `floor(j ln2 / ρ)`, clamped to the
/// available depth, so that `q ≈ 2^{j(1 + r_j)}` with `r_j → 0` for typical
/// targets.
pub fn select_for_scale(cf: &CfExpansion, j: u32) -> Result<ScaleSelection> {
    if j == 0 {
        return Err(Error::InvalidArgument("scale j must be positive".into()));
    }
    let top = *cf.ln_denominators.last().expect("expansion has a_0");
    if !cf.terminated && top < j as f64 * std::f64::consts::LN_2 {
        return Err(Error::DepthInsufficient(format!("deepest denominator e^{top:.2} is below 2^{j}")));
    }
    let ideal = (j as f64 * std::f64::consts::LN_2 / levy_constant()).floor() as usize;
    let index = ideal.min(cf.len() - 1);
    let convergent =
        *cf.convergents.get(index).ok_or_else(|| Error::Overflow(format!("convergent {index} exceeds 64 bits")))?;
    let r_j = (convergent.q as f64).log2() / j as f64 - 1.0;
    Ok(ScaleSelection { j, index, convergent, r_j })
}
