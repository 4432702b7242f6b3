//! Acceptance gate. Runs every criterion at its pinned tolerance and prints
//! one PASS/FAIL line each; exits nonzero if any criterion fails.
//!
//! Run alone with `cargo test -p revlab-core --test acceptance`.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revlab::boxdim::{default_eps_grid, fit_dimension, numbox, SampledGraph};
use revlab::cfrac::{expand, levy_constant, levy_rate, Target};
use revlab::evolution::{bo_from_schrodinger, evolve_bo, evolve_schrodinger};
use revlab::experiment::{revival_figure, DEFAULT_DEPTH};
use revlab::gauss::{gauss_weights, weyl_scan, DEFAULT_WEYL_C};
use revlab::initial::PiecewiseConstant;
use revlab::regularity::LittlewoodPaleyBank;
use revlab::revival::{bo_revival, lattice_avoiding_grid};
use revlab::series::grid_l2_distance;
use revlab::{FourierSeries, RationalTime, TimeMult, TorusGrid};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

const SAMPLES: usize = 10_000;
const TRUNCATION: usize = 1 << 14;

fn within(v: f64, center: f64, tol: f64) -> bool {
    (v - center).abs() <= tol
}

fn golden_figure() -> Outcome {
    let start = Instant::now();
    let fig = revival_figure(&PiecewiseConstant::canonical(), RationalTime::new(2584, 1597).unwrap(), SAMPLES, 20)
        .expect("figure pipeline");
    let elapsed = start.elapsed();
    let d = fig.fit.d;
    let pass =
        within(d, 1.54, 0.08) && within(d, 1.50, 0.10) && fig.fit.r2 >= 0.98 && elapsed < Duration::from_secs(60);
    Outcome::new(
        pass,
        format!(
            "D = {d:.4} (need 1.54 ± 0.08 and 1.50 ± 0.10), r² = {:.4} (need ≥ 0.98), {:.1}s (need < 60s)",
            fig.fit.r2,
            elapsed.as_secs_f64()
        ),
    )
}

fn e_figure() -> Outcome {
    let start = Instant::now();
    let fig = revival_figure(&PiecewiseConstant::canonical(), RationalTime::new(23225, 8544).unwrap(), SAMPLES, 20)
        .expect("figure pipeline");
    let elapsed = start.elapsed();
    let d = fig.fit.d;
    let pass = within(d, 1.46, 0.08) && elapsed < Duration::from_secs(300);
    Outcome::new(
        pass,
        format!("D = {d:.4} (need 1.46 ± 0.08), r² = {:.4}, {:.1}s (need < 300s)", fig.fit.r2, elapsed.as_secs_f64()),
    )
}

fn convergent_gaps() -> Outcome {
    let phi = expand(&Target::phi(), 20).unwrap();
    let e = expand(&Target::e(), 20).unwrap();
    let gp = phi.convergents.iter().find(|c| (c.p, c.q) == (2584, 1597)).map(|c| c.gap);
    let ge = e.convergents.iter().find(|c| (c.p, c.q) == (23225, 8544)).map(|c| c.gap);
    let pass = gp.is_some_and(|g| g < 1.7e-6) && ge.is_some_and(|g| g < 6.7e-9);
    Outcome::new(
        pass,
        format!(
            "|φ - 2584/1597| = {:.6e} (need < 1.7e-6), |e - 23225/8544| = {:.6e} (need < 6.7e-9)",
            gp.unwrap_or(f64::NAN),
            ge.unwrap_or(f64::NAN)
        ),
    )
}

fn random_decimal(rng: &mut ChaCha8Rng, digits: usize) -> Target {
    let s: String = (0..digits).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
    format!("0.{s}").parse().unwrap()
}

fn khinchin_levy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut rates = Vec::new();
    for _ in 0..200 {
        let t = random_decimal(&mut rng, 60);
        rates.push(levy_rate(&expand(&t, 40).unwrap()).unwrap());
    }
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let rho = levy_constant();
    let rel = (mean - rho).abs() / rho;
    Outcome::new(rel <= 0.05, format!("mean rate {mean:.4} vs {rho:.4}, relative gap {:.2}% (need ≤ 5%)", 100.0 * rel))
}

fn tail_bound(u0: &PiecewiseConstant, n: usize) -> f64 {
    let total = u0.l2_norm_sqr() / TAU;
    let head: f64 = (-(n as i64)..=n as i64).map(|k| u0.fourier_coefficient(k).norm_sqr()).sum();
    (TAU * (total - head).max(0.0)).sqrt()
}

fn oracle_equivalence() -> Outcome {
    let u0 = PiecewiseConstant::canonical();
    let series = u0.to_series(TRUNCATION).unwrap();
    let bound = tail_bound(&u0, TRUNCATION);
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (p, q) in [(1u64, 2u64), (1, 3), (2, 3), (1, 4), (3, 5)] {
        let rt = RationalTime::new(p, q).unwrap();
        let grid = lattice_avoiding_grid(&u0, q, SAMPLES).unwrap();
        let exact = bo_revival(&u0, rt, &grid).unwrap();
        let spectral = evolve_bo(&series, &TimeMult::Rational(rt)).unwrap().evaluate(&grid).unwrap();
        let dist = grid_l2_distance(&exact, &spectral);
        worst = worst.max(dist / bound);
        pass &= dist <= 2.0 * bound;
    }
    let grid = TorusGrid::midpoint(SAMPLES).unwrap();
    for (p, q) in [(0u64, 1u64), (1, 1)] {
        let u = bo_revival(&u0, RationalTime::new(p, q).unwrap(), &grid).unwrap();
        pass &= u == u0.sample(&grid);
    }
    Outcome::new(
        pass,
        format!("worst distance / tail bound = {worst:.3} (need ≤ 2), tail bound {bound:.3e}; t = 0, 2π reproduce u₀ exactly"),
    )
}

fn random_step(rng: &mut ChaCha8Rng) -> PiecewiseConstant {
    let j = rng.gen_range(1..6);
    let mut bps: Vec<f64> = (0..j).map(|_| rng.gen_range(-PI + 1e-3..PI)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let vals = (0..bps.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    PiecewiseConstant::new(bps, vals).unwrap()
}

fn szego_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u0 = random_step(&mut rng).to_series(1 << 10).unwrap();
        let t = TimeMult::Real(rng.gen_range(0.0..1.0));
        let bo = evolve_bo(&u0, &t).unwrap();
        let v = evolve_schrodinger(&u0, &t).unwrap();
        let via = bo_from_schrodinger(&v, u0.coeff(0));
        worst = worst.max(via.max_coeff_distance(&bo));
    }
    Outcome::new(worst <= 1e-13, format!("max coefficient discrepancy {worst:.3e} over 100 pairs (need ≤ 1e-13)"))
}

fn random_series(rng: &mut ChaCha8Rng, order: usize, mean_zero: bool) -> FourierSeries {
    let half: Vec<Complex64> = (0..=order)
        .map(|n| {
            if n == 0 {
                Complex64::new(if mean_zero { 0.0 } else { rng.gen_range(-1.0..1.0) }, 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }
        })
        .collect();
    FourierSeries::from_nonnegative(&half).unwrap()
}

fn operator_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut h2: f64 = 0.0;
    let mut parseval: f64 = 0.0;
    for _ in 0..20 {
        let f = random_series(&mut rng, 512, false);
        let mut projected = f.coeffs().to_vec();
        projected[f.order()] = Complex64::new(0.0, 0.0);
        let expect = FourierSeries::new(projected, true).unwrap().scale(-1.0);
        h2 = h2.max(f.hilbert().hilbert().max_coeff_distance(&expect));
        let t = TimeMult::Real(rng.gen_range(0.0..1.0));
        let n0 = f.l2_norm();
        for g in [evolve_bo(&f, &t).unwrap(), evolve_schrodinger(&f, &t).unwrap()] {
            parseval = parseval.max((g.l2_norm() - n0).abs() / n0);
        }
    }
    let mut gauss_sum: f64 = 0.0;
    let mut gauss_energy: f64 = 0.0;
    let mut magnitude: f64 = 0.0;
    for q in 1..=200u64 {
        for p in 0..q {
            let Ok(g) = gauss_weights(p, q) else { continue };
            let qf = q as f64;
            gauss_sum = gauss_sum.max((g.sum() - Complex64::new(qf, 0.0)).norm());
            gauss_energy = gauss_energy.max((g.energy() - qf * qf).abs());
            if q % 2 == 1 {
                for w in g.weights() {
                    magnitude = magnitude.max((w.norm() - qf.sqrt()).abs());
                }
            }
        }
    }
    let pass = h2 <= 1e-14 && parseval <= 1e-12 && gauss_sum <= 1e-10 && gauss_energy <= 1e-10 && magnitude <= 1e-10;
    Outcome::new(
        pass,
        format!(
            "H² + (I - P₀): {h2:.1e}; Parseval: {parseval:.1e}; |ΣW - q|: {gauss_sum:.1e}; |Σ|W|² - q²|: {gauss_energy:.1e}; ||W| - √q|: {magnitude:.1e}"
        ),
    )
}

fn weyl() -> Outcome {
    let bank = LittlewoodPaleyBank::build(13).unwrap();
    let c = *expand(&Target::phi(), DEFAULT_DEPTH).unwrap().deepest();
    let golden = TimeMult::rational(c.p, c.q).unwrap();
    let res = 1 << 14;
    let r = weyl_scan(&golden, 0.1, 4, 12, |j| bank.shell(j), res, DEFAULT_WEYL_C).unwrap();
    let ratios: Vec<f64> = r.scales.iter().map(|s| s.ratio).collect();
    let n = ratios.len();
    let tail_growing = ratios[n - 3] < ratios[n - 2] && ratios[n - 2] < ratios[n - 1];
    let max = r.max_ratio();
    let zero =
        weyl_scan(&TimeMult::rational(0, 1).unwrap(), 0.1, 4, 12, |j| bank.shell(j), res, DEFAULT_WEYL_C).unwrap();
    let growth = zero.scales.last().unwrap().ratio / zero.scales[0].ratio;
    let pass = max.is_finite() && !tail_growing && growth >= 2.0;
    Outcome::new(
        pass,
        format!(
            "t = 2π·{}/{}: max ratio {max:.3}, last three {:.3?}; t = 0 growth j=4→12 {growth:.2}× (need ≥ 2)",
            c.p,
            c.q,
            &ratios[n - 3..]
        ),
    )
}

fn regularity() -> Outcome {
    let u0 = PiecewiseConstant::canonical().to_series(TRUNCATION).unwrap();
    let bank = LittlewoodPaleyBank::build(13).unwrap();
    let grid = TorusGrid::midpoint(1 << 16).unwrap();
    let c = *expand(&Target::phi(), DEFAULT_DEPTH).unwrap().deepest();
    let golden = evolve_bo(&u0, &TimeMult::rational(c.p, c.q).unwrap()).unwrap();
    let a_gold = bank.holder_exponent_estimate(&golden, &grid).unwrap().alpha;
    let third = evolve_bo(&u0, &TimeMult::rational(1, 3).unwrap()).unwrap();
    let a_third = bank.holder_exponent_estimate(&third, &grid).unwrap().alpha;
    let x: Vec<f64> = TorusGrid::midpoint(SAMPLES).unwrap().to_vec();
    let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
    let g = SampledGraph::new(x, y).unwrap();
    let d = fit_dimension(&g, &default_eps_grid(&g, 20)).unwrap().d;
    let pass = (0.35..=0.6).contains(&a_gold) && a_third <= 0.15 && within(d, 1.0, 0.05);
    Outcome::new(
        pass,
        format!(
            "α̂(2π·{}/{}) = {a_gold:.3} (need [0.35, 0.6]); α̂(2π/3) = {a_third:.3} (need ≤ 0.15); D(sin) = {d:.3} (need 1 ± 0.05)",
            c.p, c.q
        ),
    )
}

fn box_counter() -> Outcome {
    let uniform = |n: usize| -> Vec<f64> { (0..n).map(|i| i as f64 / (n - 1) as f64).collect() };
    let constant = SampledGraph::new(uniform(1000), vec![1.0; 1000]).unwrap();
    let c1 = numbox(&constant, 0.1).unwrap();
    let line = SampledGraph::new(uniform(1000), uniform(1000)).unwrap();
    let c2 = numbox(&line, 0.1).unwrap();
    let x = uniform(100);
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
    let single = SampledGraph::new(x, y).unwrap();
    let c3 = numbox(&single, 2.0).unwrap();
    let fig = revival_figure(&PiecewiseConstant::canonical(), RationalTime::new(2584, 1597).unwrap(), SAMPLES, 20)
        .expect("figure pipeline");
    let g = SampledGraph::new(fig.grid.to_vec(), fig.u).unwrap();
    let eps = default_eps_grid(&g, 20);
    let counts = |threads: usize| -> Vec<u64> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| eps.iter().map(|&e| numbox(&g, e).unwrap()).collect())
    };
    let same = counts(1) == counts(4) && counts(1) == counts(3);
    let pass = c1 == 11 && (11..=22).contains(&c2) && c3 == 2 && same;
    Outcome::new(
        pass,
        format!("constant {c1} (need 11), line {c2} (need 11..=22), single tower {c3} (need 2), thread-independent counts: {same}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden-time figure dimension", golden_figure),
        ("e-time figure dimension", e_figure),
        ("convergent gaps", convergent_gaps),
        ("Khinchin-Levy rate", khinchin_levy),
        ("revival vs spectral oracle", oracle_equivalence),
        ("Schrodinger/Benjamin-Ono identity", szego_identity),
        ("spectral operator suite", operator_suite),
        ("Weyl scan", weyl),
        ("regularity dichotomy", regularity),
        ("box-counter faithfulness", box_counter),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
