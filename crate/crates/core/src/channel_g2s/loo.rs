use std::f64::consts::{LN_10, PI};

use super::table::LooTriple;
use crate::error::{Error, Result};
use crate::math::{bessel_i0e, integrate};

/// Rice density of `|a + s|` with `s` complex Gaussian of per-component
/// variance `sigma2`.
pub fn rice_pdf(x: f64, a: f64, sigma2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let d = x - a;
    (x / sigma2) * (-(d * d) / (2.0 * sigma2)).exp() * bessel_i0e(a * x / sigma2)
}

/// Standard-normal range covered by the shadowing integral.
const Z_SPAN: f64 = 9.0;

/// Loo density of the channel magnitude.
///
/// The LoS amplitude is lognormal with `20 log10(a) ~ N(M_A, Sigma_A^2)`, so
/// integrating over the dB value turns the shadowing weight into a standard
/// normal density in `z = (20 log10(a) - M_A) / Sigma_A`. The integrand is
/// the Rice density conditioned on `a(z)`.
pub fn loo_pdf(x: f64, triple: &LooTriple) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "loo_pdf",
            value: x,
        });
    }
    let sigma2 = triple.sigma2();
    if !(sigma2 > 0.0) {
        return Err(Error::Domain {
            function: "loo_pdf (multipath power)",
            value: triple.mp_db,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ma = triple.ma_db;
    let sa = triple.sigma_a_db;
    let amp = |z: f64| 10f64.powf((ma + sa * z) / 20.0);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let integrand = |z: f64| norm * (-0.5 * z * z).exp() * rice_pdf(x, amp(z), sigma2);

    // The Rice factor peaks where a(z) = x with width ~ sigma in amplitude.
    let z_peak = (20.0 * x.log10() - ma) / sa;
    let z_width = sigma2.sqrt() / (x * sa * LN_10 / 20.0);
    let mut breaks: Vec<f64> = (-6..=6).map(|k| 1.5 * f64::from(k)).collect();
    for k in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
        breaks.push(z_peak + k * z_width);
    }
    Ok(integrate(integrand, -Z_SPAN, Z_SPAN, &breaks, 1e-300, 1e-8))
}
