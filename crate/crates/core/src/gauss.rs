//! Quadratic exponential sums: the complete Gauss sums that weight the
//! translated copies in a revival, a summation-by-parts bound for weighted
//! incomplete sums, and a scan of dyadic Weyl sums.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::cfrac::Convergent;
use crate::error::{Error, Result};
use crate::phase::{cis_turns, unit_root, unit_root_table, RationalTime, TimeMult};
use crate::regularity::ShellWindow;

/// Largest denominator accepted by [`gauss_weights`].
pub const MAX_GAUSS_Q: u64 = 1_000_000;

/// Above this denominator the weights come from one FFT of the quadratic
/// phase vector instead of `q²` exact-phase terms.
const DIRECT_LIMIT: u64 = 16_384;

/// Default constant in the incomplete-sum bound.
pub const DEFAULT_C1: f64 = 16.0;

/// `W_k = Σ_{m<q} e^{2πi(km + pm²)/q}` for `k = 0..q`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussWeights {
    time: RationalTime,
    w: Vec<Complex64>,
}

impl GaussWeights {
    pub fn time(&self) -> RationalTime {
        self.time
    }

    pub fn p(&self) -> u64 {
        self.time.p()
    }

    pub fn q(&self) -> u64 {
        self.time.q()
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.w
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.w[k]
    }

    /// `Σ_k W_k`, which equals `q`.
    pub fn sum(&self) -> Complex64 {
        self.w.iter().sum()
    }

    /// `Σ_k |W_k|²`, which equals `q²`.
    pub fn energy(&self) -> f64 {
        self.w.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check(&self) -> Result<()> {
        let q = self.q() as f64;
        let tol = 1e-10 * q.max(1.0) * q.max(1.0);
        let s = self.sum();
        if (s - Complex64::new(q, 0.0)).norm() > tol.max(1e-10 * q) {
            return Err(Error::NumericalCheck(format!("Σ W_k = {s}, expected {q}")));
        }
        let e = self.energy();
        if (e - q * q).abs() > tol {
            return Err(Error::NumericalCheck(format!("Σ |W_k|² = {e}, expected {}", q * q)));
        }
        Ok(())
    }
}

/// Gauss weights for `t = 2πp/q`. Exponents are reduced modulo `q` in
/// integers before they reach the unit circle.
pub fn gauss_weights(p: u64, q: u64) -> Result<GaussWeights> {
    gauss_weights_for(RationalTime::new(p, q)?)
}

pub fn gauss_weights_for(time: RationalTime) -> Result<GaussWeights> {
    let q = time.q();
    if q > MAX_GAUSS_Q {
        return Err(Error::CostGuard { q, limit: MAX_GAUSS_Q });
    }
    let quad: Vec<u64> = (0..q).map(|m| time.quadratic_residue(m)).collect();
    let w = if q <= DIRECT_LIMIT {
        let table = unit_root_table(q);
        (0..q)
            .into_par_iter()
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                // km mod q updated incrementally
                let mut km = 0u64;
                for &r in &quad {
                    let mut e = km + r;
                    if e >= q {
                        e -= q;
                    }
                    acc += table[e as usize];
                    km += k;
                    if km >= q {
                        km -= q;
                    }
                }
                acc
            })
            .collect()
    } else {
        let mut buf: Vec<Complex64> = quad.iter().map(|&r| unit_root(r, q)).collect();
        // W_k = Σ_m a_m e^{+2πi km/q}: an unnormalised inverse DFT
        FftPlanner::new().plan_fft_inverse(q as usize).process(&mut buf);
        buf
    };
    let g = GaussWeights { time, w };
    g.check()?;
    Ok(g)
}

/// Summation-by-parts bound `d·c₁·((N − M)/√q + √q)` for
/// `|Σ_{M≤n≤N} ω_n e^{2πi(an² + bn)}|`, where `d = Σ |ω_{n+1} − ω_n|` and
/// `q` is the denominator of a Dirichlet approximation to `a`.
///
/// `weights[i]` is `ω_{start + i}`; weights outside `[M, N]` must vanish.
pub fn incomplete_weighted_sum_bound(
    m: u64,
    n: u64,
    start: u64,
    weights: &[f64],
    approx: &Convergent,
    c1: f64,
) -> Result<f64> {
    if !(0 < m && m < n) {
        return Err(Error::InvalidArgument(format!("need 0 < M < N, got M={m}, N={n}")));
    }
    if approx.q == 0 {
        return Err(Error::InvalidArgument("approximation has q = 0".into()));
    }
    for (i, &w) in weights.iter().enumerate() {
        let k = start + i as u64;
        if w != 0.0 && (k < m || k > n) {
            return Err(Error::InvalidArgument(format!("weight at n={k} lies outside [{m}, {n}]")));
        }
    }
    let d = total_variation(weights);
    let sq = (approx.q as f64).sqrt();
    Ok(d * c1 * ((n - m) as f64 / sq + sq))
}

/// `Σ |ω_{n+1} − ω_n|` with zero padding on both ends.
pub fn total_variation(weights: &[f64]) -> f64 {
    let mut prev = 0.0;
    let mut d = 0.0;
    for &w in weights {
        d += (w - prev).abs();
        prev = w;
    }
    d + prev.abs()
}

/// `Σ_i ω_{start+i} e^{2πi(a n² + b n)}` summed directly, with `a` and `b`
/// in turns. Intended for short windows where `a n²` stays well inside `f64`.
pub fn weighted_quadratic_sum(start: u64, weights: &[f64], a: f64, b: f64) -> Complex64 {
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let n = (start + i as u64) as f64;
            let ph = (a * n * n).rem_euclid(1.0) + (b * n).rem_euclid(1.0);
            w * cis_turns(ph)
        })
        .sum()
}

/// Smallest power of two `c₁` for which the incomplete-sum bound dominates
/// `trials` random instances on `[16, 64]` with `a = φ` approximated by
/// `13/8`, random Lipschitz weights vanishing at the ends, and random `b`.
pub fn calibrate_c1(trials: usize, seed: u64) -> f64 {
    let a = (1.0 + 5f64.sqrt()) / 2.0;
    let approx = Convergent { p: 13, q: 8, target: a, gap: (a - 1.625).abs() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let mut w = vec![0.0f64; 49];
        for i in 1..48 {
            w[i] = (w[i - 1] + rng.gen_range(-0.1..0.1)).clamp(-1.0, 1.0);
        }
        let b: f64 = rng.gen();
        let unit = incomplete_weighted_sum_bound(16, 64, 16, &w, &approx, 1.0).expect("valid window");
        if unit > 0.0 {
            worst = worst.max(weighted_quadratic_sum(16, &w, a, b).norm() / unit);
        }
    }
    let mut c = 1.0;
    while c < worst {
        c *= 2.0;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylScale {
    pub j: u32,
    pub s: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylScanReport {
    /// Time in units of 2π.
    pub t_mult: f64,
    pub delta: f64,
    pub x_resolution: usize,
    pub c_config: f64,
    pub scales: Vec<WeylScale>,
}

impl WeylScanReport {
    pub fn max_ratio(&self) -> f64 {
        self.scales.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_ratio() <= self.c_config
    }
}

/// Default bound on the scan ratios.
pub const DEFAULT_WEYL_C: f64 = 4.0;

/// `S_j = max_x |Σ_n χ_j(n) e^{in²t + inx}|` on `x_resolution` equispaced
/// points, and `S_j·2^{-j(1+δ)/2}`, for `j = j_min..=j_max`.
///
/// `shell(j)` supplies the multiplier window of scale `j`; use
/// [`LittlewoodPaleyBank::shell`](crate::regularity::LittlewoodPaleyBank::shell).
pub fn weyl_scan<'a>(
    t: &TimeMult,
    delta: f64,
    j_min: u32,
    j_max: u32,
    shell: impl Fn(u32) -> &'a ShellWindow,
    x_resolution: usize,
    c_config: f64,
) -> Result<WeylScanReport> {
    if j_max > 14 || j_min > j_max {
        return Err(Error::InvalidArgument(format!("scale range [{j_min}, {j_max}] must lie within [0, 14]")));
    }
    if x_resolution < 1usize << (j_max + 2) {
        return Err(Error::InvalidArgument(format!(
            "x resolution {x_resolution} below 2^(j_max+2) = {}",
            1usize << (j_max + 2)
        )));
    }
    let table = unit_root_table(x_resolution as u64);
    let mut scales = Vec::new();
    for j in j_min..=j_max {
        let w = shell(j);
        let terms: Vec<(u64, Complex64)> = w
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(n, c)| Ok((n, c * t.quadratic_phase(n)?)))
            .collect::<Result<_>>()?;
        let s = dyadic_sup(&terms, &table);
        let ratio = s * 2f64.powf(-(j as f64) * (1.0 + delta) / 2.0);
        scales.push(WeylScale { j, s, ratio });
    }
    Ok(WeylScanReport { t_mult: t.turns(), delta, x_resolution, c_config, scales })
}

/// `max_m |Σ c_n e^{2πi nm/R}|` with the index `nm mod R` kept exact.
/// Terms are in increasing `n`.
fn dyadic_sup(terms: &[(u64, Complex64)], table: &[Complex64]) -> f64 {
    let r = table.len() as u64;
    (0..table.len())
        .into_par_iter()
        .with_min_len(64)
        .map(|m| {
            let m = m as u64;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut prev = None;
            let mut idx = 0u64;
            for &(n, c) in terms {
                idx = match prev {
                    Some(p) if n == p + 1 => {
                        let i = idx + m;
                        if i >= r {
                            i - r
                        } else {
                            i
                        }
                    }
                    _ => ((n % r) * m) % r,
                };
                prev = Some(n);
                acc += c * table[idx as usize];
            }
            acc.norm()
        })
        .reduce(|| 0.0, f64::max)
}
