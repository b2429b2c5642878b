//! Per-packet reception probabilities and the distance thresholds built on them.
//!
//! A packet sent at rate `R` is received when the instantaneous capacity
//! exceeds `R`, i.e. when the fading power `|g|²` exceeds
//! `(γ_th / γ̄₀)·(H² + d²)^{α/2}`. The reception probability is therefore the
//! complementary CDF of `|g|²` evaluated at that argument.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelParams, FadingModel};

/// Relative slack on the LoS threshold `z ≤ 1`, absorbing rounding when the
/// argument is built from `D*` itself.
const LOS_EDGE_SLACK: f64 = 1e-12;

/// Relative tail at which the Bessel series is truncated.
const SERIES_TAIL: f64 = 1e-12;

/// SNR quantities derived from [`ChannelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrDerived {
    /// Decoding threshold `γ_th = 2^{R/B} − 1`.
    pub gamma_th: f64,
    /// Average SNR at the 1 m reference distance, `γ̄₀ = P·β₀ / (σ²·Γ)`.
    pub gamma_bar0: f64,
}

impl SnrDerived {
    pub fn new(channel: &ChannelParams) -> Self {
        Self {
            gamma_th: (channel.rate_bps / channel.bandwidth_hz).exp2() - 1.0,
            gamma_bar0: channel.tx_power_w * channel.ref_gain / (channel.noise_power_w * channel.snr_gap),
        }
    }
}

/// `Pr(|g|² ≥ z)` for the given fading model.
pub fn ccdf_fading(model: FadingModel, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("fading ccdf argument must be >= 0, got {z}")));
    }
    Ok(match model {
        FadingModel::Los => {
            if z <= 1.0 + LOS_EDGE_SLACK {
                1.0
            } else {
                0.0
            }
        }
        FadingModel::Rician { k_factor } => {
            let a = (2.0 * k_factor).sqrt();
            let b = (2.0 * (k_factor + 1.0) * z).sqrt();
            marcum_q1(a, b)?
        }
    })
}

/// The ccdf argument `(γ_th/γ̄₀)·(H² + d²)^{α/2}` at horizontal distance `d`.
pub fn fading_argument(channel: &ChannelParams, horiz_dist: f64) -> f64 {
    let snr = SnrDerived::new(channel);
    let h = channel.altitude_m;
    snr.gamma_th / snr.gamma_bar0 * (h * h + horiz_dist * horiz_dist).powf(channel.pathloss_exponent / 2.0)
}

/// Probability that a single packet is received at horizontal distance `horiz_dist`.
pub fn packet_success_prob(channel: &ChannelParams, horiz_dist: f64) -> Result<f64> {
    if !(horiz_dist >= 0.0) {
        return Err(Error::Domain(format!("horizontal distance must be >= 0, got {horiz_dist}")));
    }
    ccdf_fading(channel.fading, fading_argument(channel, horiz_dist))
}

/// `p_D`: the per-packet success probability at the connection boundary `D`.
pub fn threshold_success_prob(channel: &ChannelParams, distance: f64) -> Result<f64> {
    packet_success_prob(channel, distance)
}

/// `D*`: the horizontal distance at which the average SNR equals `γ_th`.
pub fn critical_distance(channel: &ChannelParams) -> Result<f64> {
    let snr = SnrDerived::new(channel);
    let reach_sq = (snr.gamma_bar0 / snr.gamma_th).powf(2.0 / channel.pathloss_exponent);
    let h_sq = channel.altitude_m * channel.altitude_m;
    if !(reach_sq >= h_sq * (1.0 - 1e-12)) {
        return Err(Error::InfeasibleGeometry(format!(
            "UAV too high or too weak to ever reach the threshold SNR: SNR-limited slant range {} m < altitude {} m",
            reach_sq.sqrt(),
            channel.altitude_m
        )));
    }
    Ok((reach_sq - h_sq).max(0.0).sqrt())
}

/// First-order Marcum Q-function `Q₁(a, b)`.
///
/// Uses the modified-Bessel series
/// `Q₁ = e^{−(a²+b²)/2} Σ_{k≥0} (a/b)^k I_k(ab)` when `a < b` and the
/// complementary series `1 − Q₁ = e^{−(a²+b²)/2} Σ_{k≥1} (b/a)^k I_k(ab)`
/// otherwise, so that every sum has positive terms with ratio below one.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("Marcum Q arguments must be finite and >= 0, got ({a}, {b})")));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-0.5 * b * b).exp());
    }
    // e^{−(a²+b²)/2} I_k(ab) = e^{−(a−b)²/2} · [e^{−ab} I_k(ab)]
    let prefactor = (-0.5 * (a - b) * (a - b)).exp();
    if prefactor == 0.0 {
        return Ok(if a < b { 0.0 } else { 1.0 });
    }
    let x = a * b;
    let scaled = scaled_bessel_i(x, series_len(x));
    let (ratio, first) = if a < b { (a / b, 0) } else { (b / a, 1) };

    let mut sum = 0.0;
    let mut power = ratio.powi(first as i32);
    for (k, &ik) in scaled.iter().enumerate().skip(first) {
        let term = power * ik;
        sum += term;
        // Terms decrease geometrically at least as fast as the current ratio.
        let next_ratio = if k + 1 < scaled.len() && ik > 0.0 { ratio * scaled[k + 1] / ik } else { 0.0 };
        if next_ratio < 1.0 && term * next_ratio / (1.0 - next_ratio) <= SERIES_TAIL * sum {
            break;
        }
        power *= ratio;
    }
    let q = if a < b { prefactor * sum } else { 1.0 - prefactor * sum };
    Ok(q.clamp(0.0, 1.0))
}

/// Number of Bessel orders needed: `e^{−x} I_k(x)` is negligible beyond `k ≈ 9√x`.
fn series_len(x: f64) -> usize {
    (10.0 * x.sqrt() + 40.0).ceil() as usize
}

/// `e^{−x} I_k(x)` for `k = 0..n` by Miller's backward recurrence,
/// normalized with `I₀(x) + 2 Σ_{k≥1} I_k(x) = e^{x}`.
fn scaled_bessel_i(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = n + 30;
    let mut f = vec![0.0; start + 2];
    f[start] = 1.0;
    for k in (1..=start).rev() {
        f[k - 1] = (2.0 * k as f64 / x) * f[k] + f[k + 1];
        if f[k - 1] > 1e250 {
            for v in &mut f[k - 1..=start] {
                *v *= 1e-250;
            }
        }
    }
    let norm = f[0] + 2.0 * f[1..=start].iter().sum::<f64>();
    for (o, v) in out.iter_mut().zip(&f) {
        *o = v / norm;
    }
    out
}
