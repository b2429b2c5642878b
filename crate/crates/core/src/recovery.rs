//! File-recovery probabilities and the reduction from a recovery target to a
//! minimum connection time.
//!
//! A GT recovers the file once it has received at least `N′` coded packets.
//! With per-packet success probabilities that differ between slots, the
//! number of received packets is Poisson-binomial; replacing every
//! connection-slot probability by the boundary value `p_D` and ignoring
//! non-connection slots gives a binomial lower bound.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest slot count accepted by [`min_connection_requirement`].
pub const MAX_CONNECTION_SLOTS: u64 = 1_000_000_000;

/// Per-slot packet success probabilities seen by one GT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSuccessProfile {
    per_slot_prob: Vec<f64>,
    packets_per_slot: u32,
}

impl SlotSuccessProfile {
    pub fn new(per_slot_prob: Vec<f64>, packets_per_slot: u32) -> Result<Self> {
        if packets_per_slot == 0 {
            return Err(Error::InvalidParameters("packets per slot must be >= 1".into()));
        }
        check_probs(&per_slot_prob)?;
        Ok(Self { per_slot_prob, packets_per_slot })
    }

    pub fn per_slot_prob(&self) -> &[f64] {
        &self.per_slot_prob
    }

    pub fn packets_per_slot(&self) -> u32 {
        self.packets_per_slot
    }

    /// Total number of transmitted packets `N = M·L`.
    pub fn total_packets(&self) -> u64 {
        self.per_slot_prob.len() as u64 * u64::from(self.packets_per_slot)
    }

    /// Packet-level probability vector (each slot repeated `L` times).
    pub fn expanded(&self) -> Vec<f64> {
        self.per_slot_prob.iter().flat_map(|&p| std::iter::repeat_n(p, self.packets_per_slot as usize)).collect()
    }
}

/// Minimum connection requirement implied by a recovery target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionRequirement {
    /// `M_min = ⌈A²/L⌉`.
    pub min_slots: u64,
    /// `T_min = M_min·δ_t`.
    pub min_time_s: f64,
    pub p_d: f64,
    pub a: f64,
}

fn check_probs(probs: &[f64]) -> Result<()> {
    match probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(Error::Domain(format!("probability {p} outside [0, 1]"))),
        None => Ok(()),
    }
}

fn check_prob(p: f64) -> Result<()> {
    check_probs(&[p])
}

/// `Pr(Σ Bern(pᵢ) ≥ threshold)` by dynamic programming over the count,
/// truncated at `threshold` with an absorbing "at least" state.
pub fn poisson_binomial_ccdf(probs: &[f64], threshold: usize) -> Result<f64> {
    check_probs(probs)?;
    if threshold == 0 {
        return Ok(1.0);
    }
    if threshold > probs.len() {
        return Ok(0.0);
    }
    // dist[j] = Pr(count = j) for j < threshold; dist[threshold] = Pr(count ≥ threshold)
    let mut dist = vec![0.0; threshold + 1];
    dist[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        dist[threshold] += p * dist[threshold - 1];
        for j in (1..=(threshold - 1).min(i + 1)).rev() {
            dist[j] = dist[j] * (1.0 - p) + dist[j - 1] * p;
        }
        dist[0] *= 1.0 - p;
    }
    Ok(dist[threshold].clamp(0.0, 1.0))
}

/// Full probability mass function of a Poisson-binomial count.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Result<Vec<f64>> {
    check_probs(probs)?;
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    Ok(pmf)
}

/// `Pr(X ≥ x)` for `x = 0..=n`, from a pmf of length `n + 1`.
fn ccdf_from_pmf(pmf: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; pmf.len()];
    let mut acc = 0.0;
    for x in (0..pmf.len()).rev() {
        acc += pmf[x];
        out[x] = acc;
    }
    out
}

/// `Pr(B(n, p) ≥ threshold)`.
///
/// Sums the smaller tail in log space, starting at the tail boundary and
/// walking outward with the term ratio.
pub fn binomial_ccdf(n: u64, p: f64, threshold: u64) -> Result<f64> {
    check_prob(p)?;
    if threshold == 0 {
        return Ok(1.0);
    }
    if threshold > n || p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let odds = p / (1.0 - p);
    let ln_pmf = |k: u64| {
        let kf = k as f64;
        ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0) + kf * p.ln() + (nf - kf) * (-p).ln_1p()
    };

    if threshold as f64 > nf * p {
        // upper tail: k = threshold..=n
        let mut term = ln_pmf(threshold).exp();
        let mut sum = term;
        let mut k = threshold;
        while k < n {
            let ratio = (nf - k as f64) / (k as f64 + 1.0) * odds;
            term *= ratio;
            sum += term;
            k += 1;
            if ratio < 1.0 && term <= 1e-18 * sum {
                break;
            }
        }
        Ok(sum.clamp(0.0, 1.0))
    } else {
        // lower tail: k = threshold−1 down to 0
        let mut k = threshold - 1;
        let mut term = ln_pmf(k).exp();
        let mut sum = term;
        while k > 0 {
            let ratio = k as f64 / (nf - k as f64 + 1.0) / odds;
            term *= ratio;
            sum += term;
            k -= 1;
            if ratio < 1.0 && term <= 1e-18 * sum {
                break;
            }
        }
        Ok((1.0 - sum).clamp(0.0, 1.0))
    }
}

/// Exact recovery probability `Pr(received ≥ N′)` for a slot profile.
pub fn recovery_prob_exact(profile: &SlotSuccessProfile, n_info: u64) -> f64 {
    let threshold = usize::try_from(n_info).unwrap_or(usize::MAX);
    poisson_binomial_ccdf(&profile.expanded(), threshold).expect("profile probabilities validated on construction")
}

/// Binomial lower bound on the recovery probability from the number of
/// connection slots.
pub fn recovery_prob_lower_bound(n_conn_slots: u64, packets_per_slot: u32, p_d: f64, n_info: u64) -> Result<f64> {
    binomial_ccdf(n_conn_slots.saturating_mul(u64::from(packets_per_slot)), p_d, n_info)
}

/// Gaussian Q-function `Q(x) = Pr(N(0,1) > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`gaussian_q`], refined with one Newton step.
pub fn inverse_gaussian_q(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("inverse Q requires p in (0, 1), got {p}")));
    }
    let mut x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density > 0.0 {
        x += (gaussian_q(x) - p) / density;
    }
    Ok(x)
}

/// Gaussian approximation of the binomial lower bound.
pub fn gaussian_lb_approx(n_conn_slots: u64, packets_per_slot: u32, p_d: f64, n_info: u64) -> Result<f64> {
    check_prob(p_d)?;
    let trials = n_conn_slots as f64 * f64::from(packets_per_slot);
    let var = trials * p_d * (1.0 - p_d);
    if !(var > 0.0) {
        return Err(Error::Domain(
            "Gaussian approximation is degenerate for zero variance; use the exact binomial".into(),
        ));
    }
    Ok(gaussian_q((n_info as f64 - trials * p_d) / var.sqrt()))
}

/// Minimum number of connection slots (and time) so that the Gaussian
/// approximation of the lower bound reaches `target_prob`.
pub fn min_connection_requirement(
    p_d: f64,
    n_info: u64,
    packets_per_slot: u32,
    target_prob: f64,
    slot_s: f64,
) -> Result<ConnectionRequirement> {
    if !(0.0..=1.0).contains(&p_d) {
        return Err(Error::Domain(format!("p_D must lie in (0, 1], got {p_d}")));
    }
    if p_d == 0.0 {
        return Err(Error::Infeasible("p_D = 0: no packet is ever received at distance D".into()));
    }
    if !(target_prob > 0.0 && target_prob < 1.0) {
        return Err(Error::Domain(format!("target probability must lie in (0, 1), got {target_prob}")));
    }
    if packets_per_slot == 0 || n_info == 0 {
        return Err(Error::InvalidParameters("N' and L must be >= 1".into()));
    }
    let l = u64::from(packets_per_slot);
    let (a, min_slots) = if p_d == 1.0 {
        ((n_info as f64).sqrt(), n_info.div_ceil(l))
    } else {
        let q = inverse_gaussian_q(target_prob)?;
        let miss = 1.0 - p_d;
        let a = ((4.0 * n_info as f64 + miss * q * q).sqrt() - q * miss.sqrt()) / (2.0 * p_d.sqrt());
        let slots = (a * a / l as f64).ceil();
        if !(slots <= MAX_CONNECTION_SLOTS as f64) {
            return Err(Error::Infeasible(format!(
                "p_D = {p_d:.3e} needs more than {MAX_CONNECTION_SLOTS} connection slots"
            )));
        }
        (a, slots as u64)
    };
    Ok(ConnectionRequirement { min_slots, min_time_s: min_slots as f64 * slot_s, p_d, a })
}

/// Whether the Poisson-binomial ccdf of `probs` dominates the binomial ccdf
/// with success probability `p_hat` at every threshold, up to `1e-12`.
pub fn ccdf_dominance_check(probs: &[f64], p_hat: f64) -> Result<bool> {
    check_probs(probs)?;
    check_prob(p_hat)?;
    if probs.iter().any(|&p| p_hat > p) {
        return Err(Error::Precondition(format!("p_hat = {p_hat} exceeds the smallest probability")));
    }
    let hat = vec![p_hat; probs.len()];
    let f_x = ccdf_from_pmf(&poisson_binomial_pmf(probs)?);
    let f_hat = ccdf_from_pmf(&poisson_binomial_pmf(&hat)?);
    Ok(f_x.iter().zip(&f_hat).all(|(a, b)| *a >= *b - 1e-12))
}
