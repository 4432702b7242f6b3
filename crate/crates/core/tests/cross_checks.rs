//! Independent routes to the same quantities.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use revlab::boxdim::{default_eps_grid, fit_dimension, numbox, SampledGraph};
use revlab::cfrac::{expand, levy_constant, levy_rate, Target};
use revlab::evolution::evolve_bo;
use revlab::gauss::gauss_weights;
use revlab::initial::PiecewiseConstant;
use revlab::regularity::{least_squares, LittlewoodPaleyBank};
use revlab::revival::{lattice_avoiding_grid, RevivalPlan};
use revlab::series::{grid_l2_distance, wrap_angle};
use revlab::{RationalTime, TimeMult, TorusGrid};

fn wrapped(x: f64) -> f64 {
    let w = wrap_angle(x);
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// One-node grid sitting at `x`.
fn probe(x: f64) -> TorusGrid {
    let off = (x + PI).rem_euclid(TAU);
    TorusGrid::new(1, if off < TAU { off } else { 0.0 }).unwrap()
}

/// Step function taking `f` on each arc between consecutive `points`.
fn steps_from(points: &[f64], f: impl Fn(f64) -> f64) -> PiecewiseConstant {
    let n = points.len();
    let values = (0..n)
        .map(|i| {
            let prev = if i == 0 { points[n - 1] - TAU } else { points[i - 1] };
            f((prev + points[i]) / 2.0)
        })
        .collect();
    PiecewiseConstant::new(points.to_vec(), values).unwrap()
}

#[test]
fn revival_agrees_with_schrodinger_steps() {
    // At a rational time v is a step function, so u = Re v - H(Im v) can be
    // formed with the closed-form transform of steps.
    let u0 = PiecewiseConstant::canonical();
    for (p, q) in [(1, 3), (3, 5), (2, 7), (5, 12)] {
        let rt = RationalTime::new(p, q).unwrap();
        let plan = RevivalPlan::new(rt).unwrap();
        let mut pts: Vec<f64> = (0..q)
            .flat_map(|k| u0.jump_points().into_iter().map(move |a| wrapped(a + TAU * k as f64 / q as f64)))
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let at = |x: f64| plan.schrodinger(&u0, &probe(x))[0];
        let re = steps_from(&pts, |x| at(x).re);
        let im = steps_from(&pts, |x| at(x).im);

        let grid = lattice_avoiding_grid(&u0, q, 3000).unwrap();
        let u = plan.bo(&u0, &grid).unwrap();
        let h_im = im.hilbert_piecewise(&grid).unwrap();
        for ((r, h), v) in re.sample(&grid).iter().zip(&h_im).zip(&u) {
            assert!((r - h - v).abs() < 1e-9, "p/q = {p}/{q}: {} vs {v}", r - h);
        }
    }
}

#[test]
fn revival_agrees_with_truncated_series() {
    let u0 = PiecewiseConstant::canonical();
    let series = u0.to_series(1 << 14).unwrap();
    for (p, q) in [(1, 2), (1, 3), (2, 3), (1, 4), (3, 5)] {
        let rt = RationalTime::new(p, q).unwrap();
        let grid = lattice_avoiding_grid(&u0, q, 4096).unwrap();
        let exact = RevivalPlan::new(rt).unwrap().bo(&u0, &grid).unwrap();
        let spectral = evolve_bo(&series, &TimeMult::Rational(rt)).unwrap().evaluate(&grid).unwrap();
        let d = grid_l2_distance(&exact, &spectral);
        assert!(d < 0.02, "p/q = {p}/{q}: L2 distance {d}");
    }
}

#[test]
fn revival_keeps_the_mean() {
    let u0 = PiecewiseConstant::new(vec![-2.0, 0.3, 1.0], vec![0.5, -1.0, 2.0]).unwrap();
    for (p, q) in [(1, 7), (4, 9), (2584, 1597)] {
        let rt = RationalTime::new(p, q).unwrap();
        let grid = lattice_avoiding_grid(&u0, q, 1 << 16).unwrap();
        let u = RevivalPlan::new(rt).unwrap().bo(&u0, &grid).unwrap();
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        assert!((mean - u0.mean()).abs() < 1e-3, "{p}/{q}: {mean} vs {}", u0.mean());
    }
}

#[test]
fn cusps_diverge_logarithmically() {
    // Near a shifted upward jump at a + 2πk/q the term -(Im W_k / q) H u0
    // dominates. H u0 falls by ln(100)/π per two decades closer, so u moves
    // by (Im W_k / q) ln(100)/π.
    let u0 = PiecewiseConstant::canonical();
    let (p, q) = (1u64, 3u64);
    let w = gauss_weights(p, q).unwrap();
    let plan = RevivalPlan::new(RationalTime::new(p, q).unwrap()).unwrap();
    let mut probed = 0;
    for k in 0..q as usize {
        let im = w.get(k).im;
        if im.abs() < 1e-8 {
            continue;
        }
        let cusp = wrapped(-PI / 2.0 + TAU * k as f64 / q as f64);
        let u_at = |delta: f64| plan.bo(&u0, &probe(cusp + delta)).unwrap()[0];
        let (a, b, c) = (u_at(1e-4), u_at(1e-6), u_at(1e-8));
        let step = (im / q as f64) * 100f64.ln() / PI;
        for d in [b - a, c - b] {
            assert!((d - step).abs() < 1e-3 * step.abs(), "k = {k}: {d} vs {step}");
        }
        probed += 1;
    }
    assert!(probed > 0);
}

/// Cells of an `ε` raster hit by the polyline through the samples.
fn raster_count(x: &[f64], y: &[f64], eps: f64) -> usize {
    let mut cells = HashSet::new();
    let cell = |v: f64| (v / eps).floor() as i64;
    for i in 0..x.len() {
        let c = cell(x[i] - x[0]);
        let (lo, hi) = if i + 1 < x.len() && cell(x[i + 1] - x[0]) == c {
            (y[i].min(y[i + 1]), y[i].max(y[i + 1]))
        } else {
            (y[i], y[i])
        };
        for r in cell(lo)..=cell(hi) {
            cells.insert((c, r));
        }
    }
    cells.len()
}

#[test]
fn box_counts_track_a_raster_cover() {
    let u0 = PiecewiseConstant::canonical();
    let grid = lattice_avoiding_grid(&u0, 7, 1 << 14).unwrap();
    let rough = RevivalPlan::new(RationalTime::new(3, 7).unwrap()).unwrap().bo(&u0, &grid).unwrap();
    let smooth: Vec<f64> = grid.nodes().map(|x| (3.0 * x).sin()).collect();
    for y in [rough, smooth] {
        let g = SampledGraph::new(grid.to_vec(), y.clone()).unwrap();
        let eps = default_eps_grid(&g, 12);
        let mut ours = Vec::new();
        let mut raster = Vec::new();
        for &e in &eps {
            let m = numbox(&g, e).unwrap() as f64;
            let r = raster_count(g.x(), &y, e) as f64;
            assert!(m / r < 4.0 && r / m < 4.0, "eps {e}: {m} vs {r}");
            ours.push(m.ln());
            raster.push(r.ln());
        }
        let inv: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
        let (a, _, _) = least_squares(&inv, &ours);
        let (b, _, _) = least_squares(&inv, &raster);
        assert!((a - b).abs() < 0.05, "slopes {a} vs {b}");
        assert!((fit_dimension(&g, &eps).unwrap().d - a).abs() < 1e-12);
    }
}

#[test]
fn deep_random_expansions_keep_going_in_logs() {
    let cf = expand(
        &Target::from_decimal("0.3183098861837906715377675267450287240689192914809128974953346881").unwrap(),
        60,
    )
    .unwrap();
    assert_eq!(cf.partial_quotients.len(), 61);
    assert_eq!(cf.ln_denominators.len(), 61);
    assert!(cf.convergents.len() < cf.ln_denominators.len());
    let c = cf.deepest();
    assert!((cf.ln_denominators[cf.convergents.len() - 1] - (c.q as f64).ln()).abs() < 1e-12);
    let rate = levy_rate(&cf).unwrap();
    assert!(rate > 0.5 * levy_constant() && rate < 2.0 * levy_constant());
}

#[test]
fn indicator_has_no_holder_regularity() {
    let u0 = PiecewiseConstant::canonical();
    let f = u0.to_series(1 << 13).unwrap();
    let bank = LittlewoodPaleyBank::build(12).unwrap();
    let grid = TorusGrid::midpoint(1 << 15).unwrap();
    let est = bank.holder_exponent_estimate(&f, &grid).unwrap();
    assert!(est.alpha.abs() < 0.05, "{}", est.alpha);

    // half a period translates the indicator, so nothing changes
    let half = evolve_bo(&f, &TimeMult::rational(1, 2).unwrap()).unwrap();
    let est2 = bank.holder_exponent_estimate(&half, &grid).unwrap();
    assert!((est2.alpha - est.alpha).abs() < 1e-9);
}
