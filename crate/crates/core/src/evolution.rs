//! Spectral evolution of the linear Benjamin–Ono and Schrödinger flows.
//!
//! Both flows are diagonal in Fourier space: the Benjamin–Ono multiplier is
//! `e^{in|n|t}` and the Schrödinger multiplier is `e^{in²t}`. They agree on
//! `n ≥ 0`, which is the content of `u = Re[(I + iH) v]`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase::TimeMult;
use crate::series::FourierSeries;

/// `e^{2πi n² tau}` for `n = 0..=order`.
fn phases(order: usize, t: &TimeMult) -> Result<Vec<Complex64>> {
    (0..=order as u64).into_par_iter().map(|n| t.quadratic_phase(n)).collect()
}

/// Benjamin–Ono flow: `ĉ(n) ↦ e^{in|n|t} ĉ(n)`.
pub fn evolve_bo(u0: &FourierSeries, t: &TimeMult) -> Result<FourierSeries> {
    if !u0.is_real() {
        return Err(Error::NotReal);
    }
    let ph = phases(u0.order(), t)?;
    Ok(u0.map_multiplier(true, |n| {
        let z = ph[n.unsigned_abs() as usize];
        if n >= 0 {
            z
        } else {
            z.conj()
        }
    }))
}

/// Schrödinger flow: `ĉ(n) ↦ e^{in²t} ĉ(n)`. The result is complex valued.
pub fn evolve_schrodinger(v0: &FourierSeries, t: &TimeMult) -> Result<FourierSeries> {
    let ph = phases(v0.order(), t)?;
    Ok(v0.map_multiplier(false, |n| ph[n.unsigned_abs() as usize]))
}

/// `2 Re(Π v) - ĉ₀`, i.e. `Re[(I + iH) v]` for a Schrödinger solution `v`
/// whose initial datum was real with mean `mean_c0`.
pub fn bo_from_schrodinger(v: &FourierSeries, mean_c0: Complex64) -> FourierSeries {
    v.szego_project().real_part().scale(2.0).shift_mean(-mean_c0)
}
