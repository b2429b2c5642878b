//! Monte Carlo verification of planned trajectories.
//!
//! Time is cut into `δ_t` slots; a trailing partial slot does not transmit.
//! The UAV position of a slot is its midpoint position. In each slot GT `k`
//! receives `Binomial(L, p_k[m])` packets and recovers the file once it holds
//! `N'` of them.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{packet_success_prob, threshold_success_prob};
use crate::error::{Error, Result};
use crate::geometry::{centroid, Point};
use crate::model::{Scenario, Trajectory};
use crate::recovery::{binomial_ccdf, recovery_prob_exact, recovery_prob_lower_bound, SlotSuccessProfile};
use crate::rng::stream_rng;

/// Exact recovery probabilities are computed up to this many packets.
pub const EXACT_PACKET_LIMIT: u64 = 5000;
/// Two-sided 95 % normal quantile.
pub const WILSON_Z: f64 = 1.959964;

/// Number of complete slots in `total_time`.
pub fn full_slots(total_time: f64, slot_s: f64) -> u64 {
    (total_time / slot_s + 1e-9).floor().max(0.0) as u64
}

/// UAV position at the midpoint of every complete slot.
pub fn slot_midpoints(traj: &Trajectory, slot_s: f64) -> Result<Vec<Point>> {
    if !(slot_s.is_finite() && slot_s > 0.0) {
        return Err(Error::Domain(format!("slot length must be > 0, got {slot_s}")));
    }
    (0..full_slots(traj.total_time(), slot_s)).map(|m| traj.sample_position((m as f64 + 0.5) * slot_s)).collect()
}

/// Connection slots `|M_k|` per GT: slots whose position is within `radius`.
pub fn connection_slot_counts(positions: &[Point], gts: &[Point], radius: f64) -> Vec<u64> {
    gts.iter().map(|&g| positions.iter().filter(|q| q.within(g, radius)).count() as u64).collect()
}

/// Two-sided Wilson score interval.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// `Binomial(n, p)` by inversion of a single uniform `u ∈ [0, 1)`.
pub fn sample_binomial(n: u32, p: f64, u: f64) -> u32 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    let ratio = p / (1.0 - p);
    let mut pmf = (1.0 - p).powi(n as i32);
    let mut cdf = pmf;
    let mut k = 0;
    while u >= cdf && k < n {
        pmf *= f64::from(n - k) / f64::from(k + 1) * ratio;
        k += 1;
        cdf += pmf;
    }
    k
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GtReport {
    pub gt_index: usize,
    /// Fraction of trials that recovered the file.
    pub empirical: Option<f64>,
    pub wilson_ci: Option<(f64, f64)>,
    /// Exact recovery probability, when the packet count allows.
    pub exact: Option<f64>,
    pub p_lb: f64,
    pub connection_slots: u64,
    pub connection_time: f64,
}

impl GtReport {
    pub fn ci_half_width(&self) -> Option<f64> {
        self.wilson_ci.map(|(lo, hi)| 0.5 * (hi - lo))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub per_gt: Vec<GtReport>,
    pub n_trials: u64,
    pub rng_seed: u64,
    pub n_slots: u64,
    pub radius: f64,
    pub p_d: f64,
}

impl SimulationReport {
    pub fn min_p_lb(&self) -> f64 {
        self.per_gt.iter().map(|g| g.p_lb).fold(f64::INFINITY, f64::min)
    }

    pub fn min_empirical(&self) -> Option<f64> {
        self.per_gt.iter().map(|g| g.empirical).try_fold(f64::INFINITY, |m, e| e.map(|e| m.min(e)))
    }

    /// GTs whose empirical success falls more than three CI half-widths below `P_lb`.
    pub fn bound_violations(&self) -> Vec<usize> {
        self.per_gt
            .iter()
            .filter(|g| match (g.empirical, g.ci_half_width()) {
                (Some(e), Some(h)) => e < g.p_lb - 3.0 * h,
                _ => false,
            })
            .map(|g| g.gt_index)
            .collect()
    }
}

/// Simulates `n_trials` independent channel realizations along `traj`.
///
/// Trial `t` of GT `k` draws from stream `t·K + k` of `seed`, so the report
/// does not depend on the thread count.
pub fn simulate_recovery(traj: &Trajectory, scenario: &Scenario, n_trials: u64, seed: u64) -> Result<SimulationReport> {
    scenario.validate()?;
    let counts = scenario.counts()?;
    let radius = scenario.resolve_distance()?;
    let p_d = threshold_success_prob(&scenario.channel, radius)?;
    let positions = slot_midpoints(traj, scenario.rlnc.slot_s)?;
    let conn = connection_slot_counts(&positions, &scenario.gts, radius);
    let n_gts = scenario.gts.len() as u64;
    let l = counts.packets_per_slot;

    let per_gt = scenario
        .gts
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            let probs = positions
                .iter()
                .map(|&q| packet_success_prob(&scenario.channel, q.dist(g)))
                .collect::<Result<Vec<f64>>>()?;
            let mut active: Vec<f64> = probs.into_iter().filter(|&p| p > 0.0).collect();
            active.sort_by(|a, b| b.total_cmp(a));
            let exact = if active.len() as u64 * u64::from(l) <= EXACT_PACKET_LIMIT {
                Some(recovery_prob_exact(&SlotSuccessProfile::new(active.clone(), l)?, counts.n_info))
            } else {
                None
            };
            let (empirical, wilson_ci) = if n_trials == 0 {
                (None, None)
            } else {
                let wins = (0..n_trials)
                    .into_par_iter()
                    .filter(|&t| recovers(&active, l, counts.n_info, seed, t * n_gts + k as u64))
                    .count() as u64;
                (Some(wins as f64 / n_trials as f64), Some(wilson_interval(wins, n_trials, WILSON_Z)))
            };
            Ok(GtReport {
                gt_index: k,
                empirical,
                wilson_ci,
                exact,
                p_lb: recovery_prob_lower_bound(conn[k], l, p_d, counts.n_info)?,
                connection_slots: conn[k],
                connection_time: conn[k] as f64 * scenario.rlnc.slot_s,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationReport { per_gt, n_trials, rng_seed: seed, n_slots: positions.len() as u64, radius, p_d })
}

/// One trial over slots sorted by decreasing success probability.
fn recovers(sorted_probs: &[f64], l: u32, n_info: u64, seed: u64, stream: u64) -> bool {
    let mut rng = stream_rng(seed, stream);
    let mut got = 0u64;
    for (i, &p) in sorted_probs.iter().enumerate() {
        if got >= n_info {
            return true;
        }
        let left = (sorted_probs.len() - i) as u64 * u64::from(l);
        if got + left < n_info {
            return false;
        }
        got += u64::from(sample_binomial(l, p, rng.random::<f64>()));
    }
    got >= n_info
}

/// Number of GTs reaching `P̄` at each horizon with the transmitter hovering
/// at the GT centroid.
///
/// The per-slot success probability is constant, so each GT's recovery
/// probability is an exact binomial tail.
pub fn static_transmitter_curve(scenario: &Scenario, time_grid: &[f64]) -> Result<Vec<(f64, usize)>> {
    scenario.validate()?;
    let counts = scenario.counts()?;
    let center = centroid(&scenario.gts);
    let probs = scenario
        .gts
        .iter()
        .map(|&g| packet_success_prob(&scenario.channel, center.dist(g)))
        .collect::<Result<Vec<f64>>>()?;
    time_grid
        .iter()
        .map(|&t| {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Domain(format!("time horizon must be >= 0, got {t}")));
            }
            let packets = full_slots(t, scenario.rlnc.slot_s) * u64::from(counts.packets_per_slot);
            let mut ok = 0;
            for &p in &probs {
                if binomial_ccdf(packets, p, counts.n_info)? >= scenario.rlnc.target_prob {
                    ok += 1;
                }
            }
            Ok((t, ok))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AuxDistance, ChannelParams, FadingModel, RlncParams};
    use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

    fn los_scenario(gts: Vec<Point>) -> Scenario {
        let mut channel = ChannelParams::reference_setup();
        channel.fading = FadingModel::Los;
        Scenario::new(gts, channel, RlncParams::reference_setup(), AuxDistance::AUTO).unwrap()
    }

    #[test]
    fn slot_counting() {
        assert_eq!(full_slots(5.2, 0.1), 52);
        assert_eq!(full_slots(0.0, 0.1), 0);
        assert_eq!(full_slots(0.35, 0.1), 3);
        let t = Trajectory::new(vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0)], vec![1.0], vec![0.0, 0.0]).unwrap();
        let mid = slot_midpoints(&t, 0.4).unwrap();
        assert_eq!(mid.len(), 2);
        assert!((mid[1].x - 6.0).abs() < 1e-12);
    }

    #[test]
    fn wilson_contains_estimate() {
        for (s, n) in [(0, 10), (10, 10), (3, 10), (9_990, 10_000)] {
            let (lo, hi) = wilson_interval(s, n, WILSON_Z);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
            assert!(hi > lo);
        }
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn binomial_sampler_edges() {
        assert_eq!(sample_binomial(10, 0.0, 0.99), 0);
        assert_eq!(sample_binomial(10, 1.0, 0.0), 10);
        assert_eq!(sample_binomial(10, 0.5, 0.0), 0);
        assert_eq!(sample_binomial(10, 0.5, 1.0 - 1e-16), 10);
    }

    #[test]
    fn binomial_sampler_goodness_of_fit() {
        let (n, p, draws) = (10u32, 0.3, 100_000u64);
        let mut rng = stream_rng(2024, 0);
        let mut hist = vec![0u64; n as usize + 1];
        for _ in 0..draws {
            hist[sample_binomial(n, p, rng.random::<f64>()) as usize] += 1;
        }
        let exact = Binomial::new(p, u64::from(n)).unwrap();
        // pool the upper tail until each cell expects at least 5
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let mut acc = (0.0, 0.0);
        for k in 0..=n as u64 {
            acc.0 += hist[k as usize] as f64;
            acc.1 += exact.pmf(k) * draws as f64;
            if acc.1 >= 5.0 {
                cells.push(acc);
                acc = (0.0, 0.0);
            }
        }
        if let Some(last) = cells.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        }
        let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
        let critical = ChiSquared::new((cells.len() - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "chi2 = {stat} >= {critical}");
    }

    #[test]
    fn within_range_los_always_recovers() {
        let s = los_scenario(vec![Point::new(0.0, 0.0)]);
        let traj = Trajectory::hover(Point::new(100.0, 0.0), 2.0).unwrap();
        let r = simulate_recovery(&traj, &s, 500, 1).unwrap();
        assert_eq!(r.per_gt[0].empirical, Some(1.0));
        assert_eq!(r.per_gt[0].exact, Some(1.0));
        assert_eq!(r.per_gt[0].connection_slots, 20);
    }

    #[test]
    fn out_of_range_never_recovers() {
        let s = los_scenario(vec![Point::new(0.0, 0.0)]);
        let traj = Trajectory::hover(Point::new(5000.0, 0.0), 100.0).unwrap();
        let r = simulate_recovery(&traj, &s, 200, 1).unwrap();
        assert_eq!(r.per_gt[0].empirical, Some(0.0));
        assert_eq!(r.per_gt[0].p_lb, 0.0);
    }

    #[test]
    fn bound_holds_and_mc_agrees_with_exact() {
        let s = Scenario::reference(vec![Point::new(0.0, 0.0), Point::new(350.0, 0.0)]).unwrap();
        let traj =
            Trajectory::new(vec![Point::new(-100.0, 0.0), Point::new(200.0, 0.0)], vec![6.0], vec![0.0, 0.0]).unwrap();
        let r = simulate_recovery(&traj, &s, 4000, 9).unwrap();
        for g in &r.per_gt {
            let exact = g.exact.unwrap();
            assert!(exact + 1e-12 >= g.p_lb);
            let (lo, hi) = g.wilson_ci.unwrap();
            let slack = 0.5 * (hi - lo);
            assert!(exact >= lo - slack && exact <= hi + slack, "{exact} vs [{lo}, {hi}]");
        }
    }

    #[test]
    fn seed_determinism_and_zero_trials() {
        let s = Scenario::reference(vec![Point::new(0.0, 0.0), Point::new(300.0, 100.0)]).unwrap();
        let traj = Trajectory::hover(Point::new(150.0, 50.0), 20.0).unwrap();
        let a = simulate_recovery(&traj, &s, 300, 42).unwrap();
        let b = simulate_recovery(&traj, &s, 300, 42).unwrap();
        assert_eq!(a, b);
        let z = simulate_recovery(&traj, &s, 0, 42).unwrap();
        assert!(z.per_gt.iter().all(|g| g.empirical.is_none()));
        assert_eq!(z.min_empirical(), None);
        assert_eq!(z.min_p_lb(), a.min_p_lb());
    }

    #[test]
    fn static_curve_is_monotone_from_zero() {
        let gts: Vec<Point> = (0..12).map(|i| Point::new(200.0 * i as f64, 90.0 * (i % 3) as f64)).collect();
        let s = Scenario::reference(gts).unwrap();
        let grid = [0.0, 1.0, 10.0, 100.0, 1000.0];
        let c = static_transmitter_curve(&s, &grid).unwrap();
        assert_eq!(c[0].1, 0);
        assert!(c.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(c[4].1 > 0);
    }
}
