//! Relaying over the ISL and maximum ratio combining at the destination.
//!
//! Every link is described by its effective channel `g = sqrt(rho) h` and unit
//! variance noise, so `y = g x + w`. Combined outputs keep the same form with
//! a real non-negative equivalent channel `h_eq`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::{CodeModel, Modulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelayStrategy {
    #[serde(rename = "hh")]
    HardHandover,
    #[serde(rename = "af")]
    Af,
    #[serde(rename = "df")]
    Df,
    #[serde(rename = "noiseless_af")]
    NoiselessAf,
    #[serde(rename = "noiseless_df")]
    NoiselessDf,
}

impl RelayStrategy {
    pub const ALL: [RelayStrategy; 5] = [
        RelayStrategy::HardHandover,
        RelayStrategy::Af,
        RelayStrategy::Df,
        RelayStrategy::NoiselessAf,
        RelayStrategy::NoiselessDf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelayStrategy::HardHandover => "hh",
            RelayStrategy::Af => "af",
            RelayStrategy::Df => "df",
            RelayStrategy::NoiselessAf => "noiseless_af",
            RelayStrategy::NoiselessDf => "noiseless_df",
        }
    }

    /// Whether the outcome depends on the ISL SNR.
    pub fn uses_isl(self) -> bool {
        matches!(self, RelayStrategy::Af | RelayStrategy::Df)
    }
}

impl fmt::Display for RelayStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelayStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelayStrategy::ALL
            .into_iter()
            .find(|r| r.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::invalid("strategy", format!("unknown strategy `{s}` (hh, af, df, noiseless_af, noiseless_df)")))
    }
}

/// Received samples and effective channels of one G2S link over a block.
#[derive(Debug, Clone, Copy)]
pub struct Branch<'a> {
    pub y: &'a [Complex64],
    pub g: &'a [Complex64],
}

/// AF normalization `q = |g|^2 + 1`.
#[inline]
pub fn af_normalization(g_r: Complex64) -> f64 {
    g_r.norm_sqr() + 1.0
}

/// Normalized relay transmission `y_R / sqrt(q)` and `q` per symbol.
pub fn af_forward(relay: Branch<'_>) -> (Vec<Complex64>, Vec<f64>) {
    relay
        .y
        .iter()
        .zip(relay.g)
        .map(|(&y, &g)| {
            let q = af_normalization(g);
            (y / q.sqrt(), q)
        })
        .unzip()
}

/// DF relay decision on its own observation; `Some(x)` when it decodes.
pub fn df_forward<'x>(relay: Branch<'_>, x: &'x [Complex64], modulation: &Modulation, code: &CodeModel) -> Result<Option<&'x [Complex64]>> {
    let mi = modulation.block_mi(relay.y, relay.g)?;
    Ok((!code.block_error(mi)).then_some(x))
}

/// ISL reception `sqrt(rho_isl) x_isl + w`.
#[inline]
pub fn isl_receive(x_isl: Complex64, rho_isl: f64, w: Complex64) -> Complex64 {
    rho_isl.sqrt() * x_isl + w
}

#[inline]
fn normalize(h2: f64, num: Complex64) -> (f64, Complex64) {
    if h2 > 0.0 {
        let h = h2.sqrt();
        (h, num / h)
    } else {
        (0.0, Complex64::new(0.0, 0.0))
    }
}

/// MRC of the direct observation with the AF-relayed one.
#[inline]
pub fn combine_af_symbol(y_d: Complex64, g_d: Complex64, y_isl: Complex64, rho_isl: f64, q: f64, g_r: Complex64) -> (f64, Complex64) {
    let denom = rho_isl + q;
    let h2 = g_d.norm_sqr() + rho_isl * g_r.norm_sqr() / denom;
    let num = g_d.conj() * y_d + (rho_isl * q).sqrt() / denom * g_r.conj() * y_isl;
    normalize(h2, num)
}

/// MRC of the direct observation with the DF-regenerated one.
#[inline]
pub fn combine_df_symbol(y_d: Complex64, g_d: Complex64, y_isl: Complex64, rho_isl: f64) -> (f64, Complex64) {
    let h2 = g_d.norm_sqr() + rho_isl;
    let num = g_d.conj() * y_d + rho_isl.sqrt() * y_isl;
    normalize(h2, num)
}

/// MRC of both G2S observations as if both antennas were on one satellite.
#[inline]
pub fn combine_noiseless_af_symbol(y_d: Complex64, g_d: Complex64, y_r: Complex64, g_r: Complex64) -> (f64, Complex64) {
    normalize(g_d.norm_sqr() + g_r.norm_sqr(), g_d.conj() * y_d + g_r.conj() * y_r)
}

/// Everything needed to evaluate one code block under every strategy.
#[derive(Debug, Clone, Copy)]
pub struct BlockInput<'a> {
    pub x: &'a [Complex64],
    pub destination: Branch<'a>,
    pub relay: Branch<'a>,
    /// Unit-variance noise samples of the ISL receiver.
    pub isl_noise: &'a [Complex64],
    /// Realized ISL SNR for this block.
    pub rho_isl: f64,
}

impl BlockInput<'_> {
    fn check(&self) -> Result<()> {
        let n = self.x.len();
        for len in [
            self.destination.y.len(),
            self.destination.g.len(),
            self.relay.y.len(),
            self.relay.g.len(),
            self.isl_noise.len(),
        ] {
            if len != n {
                return Err(Error::LengthMismatch { expected: n, actual: len });
            }
        }
        Ok(())
    }
}

/// Combined block at the destination.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayOutcome {
    pub strategy: RelayStrategy,
    /// Equivalent channel magnitude per symbol (empty for noiseless DF,
    /// which decodes each branch separately).
    pub h_eq: Vec<f64>,
    pub y: Vec<Complex64>,
    /// DF relay decoding result; `None` for the other strategies.
    pub relay_decoded: Option<bool>,
    pub block_mi: f64,
    pub error: bool,
}

fn outcome(strategy: RelayStrategy, h_eq: Vec<f64>, y: Vec<Complex64>, relay_decoded: Option<bool>, modulation: &Modulation, code: &CodeModel) -> RelayOutcome {
    let g: Vec<Complex64> = h_eq.iter().map(|&h| Complex64::new(h, 0.0)).collect();
    let block_mi = modulation.block_mi(&y, &g).expect("equal lengths");
    RelayOutcome {
        strategy,
        h_eq,
        y,
        relay_decoded,
        block_mi,
        error: code.block_error(block_mi),
    }
}

/// Hard handover: decode the destination observation alone.
pub fn hard_handover_path(destination: Branch<'_>, modulation: &Modulation, code: &CodeModel) -> RelayOutcome {
    let (h, y) = destination
        .y
        .iter()
        .zip(destination.g)
        .map(|(&y, &g)| normalize(g.norm_sqr(), g.conj() * y))
        .unzip();
    outcome(RelayStrategy::HardHandover, h, y, None, modulation, code)
}

/// AF soft handover for one block.
pub fn combine_af(input: &BlockInput<'_>, modulation: &Modulation, code: &CodeModel) -> Result<RelayOutcome> {
    input.check()?;
    let (x_isl, q) = af_forward(input.relay);
    let (h, y) = (0..input.x.len())
        .map(|n| {
            let y_isl = isl_receive(x_isl[n], input.rho_isl, input.isl_noise[n]);
            combine_af_symbol(input.destination.y[n], input.destination.g[n], y_isl, input.rho_isl, q[n], input.relay.g[n])
        })
        .unzip();
    Ok(outcome(RelayStrategy::Af, h, y, None, modulation, code))
}

/// DF soft handover for one block; a failed relay contributes `rho_isl = 0`.
pub fn combine_df(input: &BlockInput<'_>, modulation: &Modulation, code: &CodeModel) -> Result<RelayOutcome> {
    input.check()?;
    let forwarded = df_forward(input.relay, input.x, modulation, code)?;
    let rho = if forwarded.is_some() { input.rho_isl } else { 0.0 };
    let (h, y) = (0..input.x.len())
        .map(|n| {
            let x_isl = forwarded.map_or(Complex64::new(0.0, 0.0), |x| x[n]);
            let y_isl = isl_receive(x_isl, rho, input.isl_noise[n]);
            combine_df_symbol(input.destination.y[n], input.destination.g[n], y_isl, rho)
        })
        .unzip();
    Ok(outcome(RelayStrategy::Df, h, y, Some(forwarded.is_some()), modulation, code))
}

/// Evaluates `strategy` on one block.
pub fn evaluate(strategy: RelayStrategy, input: &BlockInput<'_>, modulation: &Modulation, code: &CodeModel) -> Result<RelayOutcome> {
    input.check()?;
    match strategy {
        RelayStrategy::HardHandover => Ok(hard_handover_path(input.destination, modulation, code)),
        RelayStrategy::Af => combine_af(input, modulation, code),
        RelayStrategy::Df => combine_df(input, modulation, code),
        RelayStrategy::NoiselessAf => {
            let (d, r) = (input.destination, input.relay);
            let (h, y) = (0..input.x.len())
                .map(|n| combine_noiseless_af_symbol(d.y[n], d.g[n], r.y[n], r.g[n]))
                .unzip();
            Ok(outcome(strategy, h, y, None, modulation, code))
        }
        RelayStrategy::NoiselessDf => {
            let d = hard_handover_path(input.destination, modulation, code);
            let r = hard_handover_path(input.relay, modulation, code);
            Ok(RelayOutcome {
                strategy,
                h_eq: Vec::new(),
                y: Vec::new(),
                relay_decoded: Some(!r.error),
                block_mi: d.block_mi.max(r.block_mi),
                error: d.error && r.error,
            })
        }
    }
}

/// Block error flag of `strategy`, computed without materializing the
/// combined block.
pub fn block_error(strategy: RelayStrategy, input: &BlockInput<'_>, modulation: &Modulation, code: &CodeModel) -> bool {
    let n = input.x.len();
    let (d, r) = (input.destination, input.relay);
    let mean = |f: &dyn Fn(usize) -> (f64, Complex64)| -> f64 {
        (0..n)
            .map(|k| {
                let (h, y) = f(k);
                modulation.realized_mi_per_bit(y, Complex64::new(h, 0.0))
            })
            .sum::<f64>()
            / n as f64
    };
    let direct = |b: Branch<'_>| mean(&|k| normalize(b.g[k].norm_sqr(), b.g[k].conj() * b.y[k]));
    let mi = match strategy {
        RelayStrategy::HardHandover => direct(d),
        RelayStrategy::Af => mean(&|k| {
            let q = af_normalization(r.g[k]);
            let y_isl = isl_receive(r.y[k] / q.sqrt(), input.rho_isl, input.isl_noise[k]);
            combine_af_symbol(d.y[k], d.g[k], y_isl, input.rho_isl, q, r.g[k])
        }),
        RelayStrategy::Df => {
            let rho = if code.block_error(direct(r)) { 0.0 } else { input.rho_isl };
            mean(&|k| {
                let x_isl = if rho > 0.0 { input.x[k] } else { Complex64::new(0.0, 0.0) };
                combine_df_symbol(d.y[k], d.g[k], isl_receive(x_isl, rho, input.isl_noise[k]), rho)
            })
        }
        RelayStrategy::NoiselessAf => mean(&|k| combine_noiseless_af_symbol(d.y[k], d.g[k], r.y[k], r.g[k])),
        RelayStrategy::NoiselessDf => return code.block_error(direct(d)) && code.block_error(direct(r)),
    };
    code.block_error(mi)
}
