//! Path discretization and the LP time allocation along a fixed path.
//!
//! The planned polyline is cut into samples `q_j`. Step `j` runs from `q_j`
//! to `q_{j+1}` and takes `τ_j` seconds, at least `ℓ_j / V_max`. A GT `k`
//! counts step `j` as connected iff `‖q_j − w_k‖ ≤ D`. The LP minimizes
//! `Σ τ_j` subject to `Σ_j I_kj τ_j ≥ T_min` for every GT.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::lp;
use crate::model::Trajectory;
use crate::waypoints::WaypointPlan;

/// Default discretization step `min(D/10, V_max·δ_t)`.
pub fn default_step(radius: f64, max_speed: f64, slot_s: f64) -> f64 {
    let slot_len = max_speed * slot_s;
    if radius > 0.0 {
        (radius / 10.0).min(slot_len)
    } else {
        slot_len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedPath {
    samples: Vec<Point>,
    /// `ℓ_j = ‖q_{j+1} − q_j‖`; the terminal step has length 0.
    step_lengths: Vec<f64>,
    /// Whether sample `j` is one of the planned waypoints.
    is_waypoint: Vec<bool>,
    step: f64,
    /// `K × J`, row `k` is GT `k`.
    indicators: Vec<Vec<bool>>,
}

impl DiscretizedPath {
    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn step_lengths(&self) -> &[f64] {
        &self.step_lengths
    }

    pub fn is_waypoint(&self) -> &[bool] {
        &self.is_waypoint
    }

    pub fn step_delta(&self) -> f64 {
        self.step
    }

    pub fn indicators(&self) -> &[Vec<bool>] {
        &self.indicators
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn n_gts(&self) -> usize {
        self.indicators.len()
    }

    /// GTs with no connected sample.
    pub fn uncovered_gts(&self) -> Vec<usize> {
        (0..self.indicators.len()).filter(|&k| !self.indicators[k].iter().any(|&b| b)).collect()
    }
}

/// Samples `plan.waypoints` and evaluates the connection indicators.
pub fn discretize(plan: &WaypointPlan, gts: &[Point], radius: f64, step: f64) -> Result<DiscretizedPath> {
    discretize_polyline(&plan.waypoints, gts, radius, step)
}

/// Every leg of length `ℓ` is split into `⌈ℓ/δ_d⌉` equal pieces, so every
/// waypoint is a sample and spacing never exceeds `δ_d`.
pub fn discretize_polyline(waypoints: &[Point], gts: &[Point], radius: f64, step: f64) -> Result<DiscretizedPath> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!("discretization step must be > 0, got {step}")));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Domain(format!("connection radius must be >= 0, got {radius}")));
    }
    let Some(&first) = waypoints.first() else {
        return Err(Error::Precondition("cannot discretize an empty plan".into()));
    };
    let mut samples = vec![first];
    let mut is_waypoint = vec![true];
    for w in waypoints.windows(2) {
        let len = w[0].dist(w[1]);
        if len == 0.0 {
            continue;
        }
        let n = ((len / step).ceil() as usize).max(1);
        for i in 1..n {
            samples.push(w[0].lerp(w[1], i as f64 / n as f64));
            is_waypoint.push(false);
        }
        samples.push(w[1]);
        is_waypoint.push(true);
    }
    let mut step_lengths: Vec<f64> = samples.windows(2).map(|s| s[0].dist(s[1])).collect();
    step_lengths.push(0.0);
    let indicators = gts.iter().map(|&g| samples.iter().map(|&q| q.within(g, radius)).collect()).collect();
    Ok(DiscretizedPath { samples, step_lengths, is_waypoint, step, indicators })
}

/// Optimal time allocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedSolution {
    /// `τ_j`, seconds spent on step `j`.
    pub leg_times: Vec<f64>,
    pub total_time: f64,
    /// Objective of the dual certificate.
    pub dual_bound: f64,
    /// Dual multiplier of each GT's connection constraint.
    pub duals: Vec<f64>,
    pub min_time: f64,
    pub pivots: usize,
}

impl SpeedSolution {
    pub fn duality_gap(&self) -> f64 {
        self.total_time - self.dual_bound
    }

    /// `Σ_j I_kj τ_j` for every GT.
    pub fn connection_times(&self, path: &DiscretizedPath) -> Vec<f64> {
        path.indicators
            .iter()
            .map(|row| row.iter().zip(&self.leg_times).filter(|(b, _)| **b).map(|(_, t)| t).sum())
            .collect()
    }
}

const GAP_TOL: f64 = 1e-6;
const FEAS_TOL: f64 = 1e-9;

/// Solves the time-allocation LP.
///
/// With `τ_j = ℓ_j/V_max + x_j` the problem becomes a covering LP in `x ≥ 0`.
/// GTs already satisfied at full speed drop out, and steps with identical
/// indicator columns are merged onto their median member so extra time is
/// spent well inside the connection disks.
pub fn solve_speed(path: &DiscretizedPath, min_time: f64, max_speed: f64) -> Result<SpeedSolution> {
    if !(min_time.is_finite() && min_time >= 0.0) {
        return Err(Error::Domain(format!("T_min must be finite and >= 0, got {min_time}")));
    }
    if !(max_speed.is_finite() && max_speed > 0.0) {
        return Err(Error::Domain(format!("V_max must be > 0, got {max_speed}")));
    }
    let uncovered = path.uncovered_gts();
    if !uncovered.is_empty() {
        return Err(Error::Infeasible(format!("GTs {uncovered:?} have no connected sample on the path")));
    }
    let n = path.n_samples();
    let lb: Vec<f64> = path.step_lengths.iter().map(|l| l / max_speed).collect();
    let base: f64 = lb.iter().sum();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (k, row) in path.indicators.iter().enumerate() {
        let covered: f64 = row.iter().zip(&lb).filter(|(b, _)| **b).map(|(_, t)| t).sum();
        let need = min_time - covered;
        if need > 0.0 {
            rows.push(k);
            rhs.push(need);
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut by_pattern: HashMap<Vec<bool>, usize> = HashMap::new();
    for j in 0..n {
        let pattern: Vec<bool> = rows.iter().map(|&k| path.indicators[k][j]).collect();
        if !pattern.iter().any(|&b| b) {
            continue;
        }
        let g = *by_pattern.entry(pattern).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(j);
    }
    let reps: Vec<usize> = groups.iter().map(|g| g[g.len() / 2]).collect();

    let a: Vec<Vec<f64>> =
        rows.iter().map(|&k| reps.iter().map(|&j| if path.indicators[k][j] { 1.0 } else { 0.0 }).collect()).collect();
    let sol = lp::solve_covering(&a, &rhs, &vec![1.0; reps.len()]).map_err(|e| match e {
        Error::Infeasible(m) => Error::SolverFailure(format!("covering LP reported infeasible after presolve: {m}")),
        other => other,
    })?;

    let mut leg_times = lb.clone();
    for (&j, &x) in reps.iter().zip(&sol.x) {
        leg_times[j] += x;
    }
    let total_time: f64 = leg_times.iter().sum();
    let mut duals = vec![0.0; path.n_gts()];
    for (&k, &y) in rows.iter().zip(&sol.y) {
        duals[k] = y;
    }
    let dual_bound = base + sol.dual_objective;

    for j in 0..n {
        let load: f64 = (0..path.n_gts()).filter(|&k| path.indicators[k][j]).map(|k| duals[k]).sum();
        if load > 1.0 + FEAS_TOL {
            return Err(Error::SolverFailure(format!("dual certificate violates step {j}: load {load}")));
        }
    }
    if total_time - dual_bound > GAP_TOL * total_time.max(f64::MIN_POSITIVE) {
        return Err(Error::SolverFailure(format!(
            "duality gap {} exceeds tolerance (primal {total_time}, dual {dual_bound})",
            total_time - dual_bound
        )));
    }
    let out = SpeedSolution { leg_times, total_time, dual_bound, duals, min_time, pivots: sol.pivots };
    for (k, t) in out.connection_times(path).into_iter().enumerate() {
        if t < min_time * (1.0 - FEAS_TOL) - 1e-12 {
            return Err(Error::SolverFailure(format!("GT {k} gets {t} s of connection < T_min = {min_time} s")));
        }
    }
    Ok(out)
}

/// Folds the step times back into a trajectory.
///
/// The extra time of step `j` is spent hovering at `q_j`, where the
/// indicator was evaluated, before the step is flown at `V_max`. Interior
/// samples without a hover are merged back into their leg.
pub fn assemble_trajectory(path: &DiscretizedPath, sol: &SpeedSolution, max_speed: f64) -> Result<Trajectory> {
    let n = path.n_samples();
    if sol.leg_times.len() != n {
        return Err(Error::Precondition(format!("solution has {} step times for {n} samples", sol.leg_times.len())));
    }
    let mut waypoints = Vec::with_capacity(n);
    let mut travel = Vec::with_capacity(n);
    let mut dwell = Vec::with_capacity(n);
    for j in 0..n {
        let fly = path.step_lengths[j] / max_speed;
        let hover = (sol.leg_times[j] - fly).max(0.0);
        let keep = j == 0 || path.is_waypoint[j] || hover > 0.0;
        if keep {
            waypoints.push(path.samples[j]);
            dwell.push(hover);
            if j + 1 < n {
                travel.push(fly);
            }
        } else if let Some(t) = travel.last_mut() {
            if j + 1 < n {
                *t += fly;
            }
        }
    }
    Trajectory::new(waypoints, travel, dwell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn path_from(ind: Vec<Vec<bool>>, lens: Vec<f64>) -> DiscretizedPath {
        let n = lens.len();
        let mut samples = Vec::new();
        let mut x = 0.0;
        for l in &lens {
            samples.push(p(x, 0.0));
            x += l;
        }
        DiscretizedPath { samples, step_lengths: lens, is_waypoint: vec![true; n], step: 1.0, indicators: ind }
    }

    /// Best dual vertex of `{y ≥ 0, Aᵀy ≤ 1}` by exhaustive active-set search.
    fn oracle(path: &DiscretizedPath, min_time: f64, vmax: f64) -> f64 {
        let k = path.n_gts();
        let lb: Vec<f64> = path.step_lengths.iter().map(|l| l / vmax).collect();
        let b: Vec<f64> = path
            .indicators
            .iter()
            .map(|row| min_time - row.iter().zip(&lb).filter(|(i, _)| **i).map(|(_, t)| t).sum::<f64>())
            .collect();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for j in 0..path.n_samples() {
            let c: Vec<f64> = (0..k).map(|r| if path.indicators[r][j] { 1.0 } else { 0.0 }).collect();
            if c.iter().any(|&v| v > 0.0) && !cols.contains(&c) {
                cols.push(c);
            }
        }
        // (normal, rhs) of every constraint, as `normal·y ≤ rhs`.
        let mut cons: Vec<(Vec<f64>, f64)> = cols.iter().map(|c| (c.clone(), 1.0)).collect();
        for r in 0..k {
            let mut e = vec![0.0; k];
            e[r] = -1.0;
            cons.push((e, 0.0));
        }
        let mut best = f64::NEG_INFINITY;
        let mut pick = Vec::new();
        choose(&cons, k, 0, &mut pick, &mut |set| {
            let Some(y) = solve_square(set.iter().map(|&i| cons[i].clone()).collect()) else {
                return;
            };
            if cons.iter().all(|(a, r)| a.iter().zip(&y).map(|(u, v)| u * v).sum::<f64>() <= r + 1e-9) {
                best = best.max(b.iter().zip(&y).map(|(u, v)| u * v).sum());
            }
        });
        lb.iter().sum::<f64>() + best
    }

    fn choose(cons: &[(Vec<f64>, f64)], k: usize, from: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if pick.len() == k {
            f(pick);
            return;
        }
        for i in from..cons.len() {
            pick.push(i);
            choose(cons, k, i + 1, pick, f);
            pick.pop();
        }
    }

    fn solve_square(mut rows: Vec<(Vec<f64>, f64)>) -> Option<Vec<f64>> {
        let n = rows.len();
        for c in 0..n {
            let piv = (c..n).max_by(|&a, &b| rows[a].0[c].abs().total_cmp(&rows[b].0[c].abs()))?;
            if rows[piv].0[c].abs() < 1e-12 {
                return None;
            }
            rows.swap(c, piv);
            for r in 0..n {
                if r != c {
                    let f = rows[r].0[c] / rows[c].0[c];
                    if f != 0.0 {
                        for i in 0..n {
                            rows[r].0[i] -= f * rows[c].0[i];
                        }
                        rows[r].1 -= f * rows[c].1;
                    }
                }
            }
        }
        Some((0..n).map(|i| rows[i].1 / rows[i].0[i]).collect())
    }

    #[test]
    fn default_step_takes_the_smaller_length() {
        assert_eq!(default_step(430.0, 50.0, 0.1), 5.0);
        assert_eq!(default_step(30.0, 50.0, 0.1), 3.0);
        assert_eq!(default_step(0.0, 50.0, 0.1), 5.0);
    }

    #[test]
    fn single_waypoint() {
        let d = discretize_polyline(&[p(0.0, 0.0)], &[p(3.0, 4.0), p(6.0, 8.0)], 5.0, 1.0).unwrap();
        assert_eq!(d.n_samples(), 1);
        assert_eq!(d.indicators(), &[vec![true], vec![false]]);
        assert_eq!(d.step_lengths(), &[0.0]);
    }

    #[test]
    fn straight_leg_sample_count() {
        let d = discretize_polyline(&[p(0.0, 0.0), p(100.0, 0.0)], &[], 1.0, 10.0).unwrap();
        assert_eq!(d.n_samples(), 11);
        assert!(d.step_lengths()[..10].iter().all(|l| (l - 10.0).abs() < 1e-12));
        assert_eq!(d.is_waypoint().iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn boundary_is_connected() {
        let d = discretize_polyline(&[p(0.0, 0.0)], &[p(0.0, 7.5)], 7.5, 1.0).unwrap();
        assert!(d.indicators()[0][0]);
    }

    #[test]
    fn zero_length_legs_are_skipped_and_spacing_is_bounded() {
        let w = [p(0.0, 0.0), p(0.0, 0.0), p(25.0, 0.0), p(25.0, 3.0)];
        let d = discretize_polyline(&w, &[], 1.0, 10.0).unwrap();
        assert_eq!(d.n_samples(), 1 + 3 + 1);
        assert!(d.step_lengths().iter().all(|&l| l <= 10.0 + 1e-12));
        assert!(discretize_polyline(&[], &[], 1.0, 1.0).is_err());
        assert!(discretize_polyline(&w, &[], 1.0, 0.0).is_err());
    }

    #[test]
    fn single_gt_closed_form() {
        let (vmax, delta) = (50.0, 5.0);
        let w = [p(-200.0, 0.0), p(200.0, 0.0)];
        let d = discretize_polyline(&w, &[p(0.0, 30.0)], 60.0, delta).unwrap();
        let j = d.n_samples();
        let c = d.indicators()[0].iter().filter(|&&b| b).count();
        for tmin in [0.0, 1.0, 5.2, 40.0] {
            let s = solve_speed(&d, tmin, vmax).unwrap();
            // every connected step is a full step here
            let expect = (j - 1 - c) as f64 * delta / vmax + (c as f64 * delta / vmax).max(tmin);
            assert!((s.total_time - expect).abs() < 1e-9 * expect, "{tmin}: {} vs {expect}", s.total_time);
        }
    }

    #[test]
    fn zero_min_time_flies_at_full_speed() {
        let w = [p(0.0, 0.0), p(100.0, 0.0), p(100.0, 50.0)];
        let d = discretize_polyline(&w, &[p(50.0, 0.0)], 20.0, 7.0).unwrap();
        let s = solve_speed(&d, 0.0, 10.0).unwrap();
        for (t, l) in s.leg_times.iter().zip(d.step_lengths()) {
            assert_eq!(*t, l / 10.0);
        }
        let traj = assemble_trajectory(&d, &s, 10.0).unwrap();
        assert_eq!(traj.waypoints().len(), 3);
        assert!((traj.max_speed() - 10.0).abs() < 1e-9);
        assert!((traj.total_time() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn uncovered_gt_is_named() {
        let d = discretize_polyline(&[p(0.0, 0.0)], &[p(0.0, 1.0), p(0.0, 100.0)], 5.0, 1.0).unwrap();
        match solve_speed(&d, 1.0, 1.0) {
            Err(Error::Infeasible(m)) => assert!(m.contains("[1]"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hover_is_placed_inside_the_disk() {
        let w = [p(-100.0, 0.0), p(100.0, 0.0)];
        let d = discretize_polyline(&w, &[p(0.0, 0.0)], 30.0, 5.0).unwrap();
        let s = solve_speed(&d, 10.0, 50.0).unwrap();
        let traj = assemble_trajectory(&d, &s, 50.0).unwrap();
        let (i, _) = traj.dwell_times().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert!(traj.waypoints()[i].norm() <= 5.0 + 1e-9);
        assert!((traj.total_time() - s.total_time).abs() < 1e-9);
    }

    #[test]
    fn matches_enumeration_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..60 {
            let j = rng.random_range(1..=30);
            let k = rng.random_range(1..=6);
            let density = rng.random_range(0.1..0.6);
            let mut ind: Vec<Vec<bool>> = (0..k).map(|_| (0..j).map(|_| rng.random_bool(density)).collect()).collect();
            for row in ind.iter_mut() {
                if !row.iter().any(|&b| b) {
                    row[rng.random_range(0..j)] = true;
                }
            }
            let mut lens: Vec<f64> = (0..j).map(|_| rng.random_range(0.0..10.0)).collect();
            lens[j - 1] = 0.0;
            let d = path_from(ind, lens);
            let tmin = rng.random_range(0.0..8.0);
            let s = solve_speed(&d, tmin, 2.0).unwrap();
            let o = oracle(&d, tmin, 2.0);
            assert!((s.total_time - o).abs() <= 1e-6 * o.max(1e-9), "case {case}: {} vs {o}", s.total_time);
            assert!(s.duality_gap() <= 1e-6 * s.total_time);
        }
    }

    #[test]
    fn connection_time_accounting() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (vmax, radius, tmin) = (50.0, 120.0, 5.2);
        for _ in 0..5 {
            let gts: Vec<Point> =
                (0..6).map(|_| p(rng.random_range(0.0..600.0), rng.random_range(0.0..600.0))).collect();
            let mut w = gts.clone();
            w.sort_by(|a, b| a.x.total_cmp(&b.x));
            let step = default_step(radius, vmax, 0.1);
            let d = discretize_polyline(&w, &gts, radius, step).unwrap();
            let s = solve_speed(&d, tmin, vmax).unwrap();
            let traj = assemble_trajectory(&d, &s, vmax).unwrap();
            assert!((traj.total_time() - s.total_time).abs() < 1e-9 * s.total_time);
            traj.check_speed(vmax).unwrap();
            let dt = 1e-3;
            let steps = (traj.total_time() / dt).floor() as usize;
            let mut conn = vec![0.0; gts.len()];
            for i in 0..steps {
                let q = traj.sample_position((i as f64 + 0.5) * dt).unwrap();
                for (c, g) in conn.iter_mut().zip(&gts) {
                    if q.within(*g, radius) {
                        *c += dt;
                    }
                }
            }
            for (k, c) in conn.into_iter().enumerate() {
                let row = &d.indicators()[k];
                let passes = (0..row.len()).filter(|&j| row[j] && (j == 0 || !row[j - 1])).count();
                // each exit from the disk can lose at most one step of flight
                let slack = passes as f64 * (step / vmax + 2.0 * dt);
                assert!(c >= tmin - slack, "GT {k}: {c} s over {passes} passes");
            }
        }
    }

    proptest! {
        #[test]
        fn monotone_in_min_time_and_gts(seed in 0u64..10_000, t1 in 0.0f64..20.0, extra in 0.0f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gts: Vec<Point> = (0..5).map(|_| p(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0))).collect();
            let w: Vec<Point> = gts.clone();
            let d = discretize_polyline(&w, &gts, 80.0, 8.0).unwrap();
            let a = solve_speed(&d, t1, 50.0).unwrap();
            let b = solve_speed(&d, t1 + extra, 50.0).unwrap();
            prop_assert!(b.total_time >= a.total_time * (1.0 - 1e-9));
            let fewer = discretize_polyline(&w, &gts[..4], 80.0, 8.0).unwrap();
            let c = solve_speed(&fewer, t1, 50.0).unwrap();
            prop_assert!(a.total_time >= c.total_time * (1.0 - 1e-9));
            prop_assert!(a.duality_gap() <= 1e-6 * a.total_time);
        }
    }
}
