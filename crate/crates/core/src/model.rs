//! Problem-instance data: radio and coding parameters, scenarios and
//! trajectories.
//!
//! Units are SI throughout (meters, seconds, watts, bits). Logarithmic units
//! are only accepted by the configuration loader in [`crate::config`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Small-scale fading of the UAV-to-ground link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FadingModel {
    /// Deterministic line-of-sight channel, `|g| = 1`.
    Los,
    /// Rician fading with LoS-to-scatter power ratio `k_factor`.
    Rician { k_factor: f64 },
}

/// Radio and propagation constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Transmit power `P` (W).
    pub tx_power_w: f64,
    /// Bandwidth `B` (Hz).
    pub bandwidth_hz: f64,
    /// Receiver noise power `σ²` (W).
    pub noise_power_w: f64,
    /// SNR gap `Γ` (linear, ≥ 1).
    pub snr_gap: f64,
    /// Channel power gain at 1 m, `β₀` (linear).
    pub ref_gain: f64,
    /// Path-loss exponent `α` (≥ 2).
    pub pathloss_exponent: f64,
    /// Flight altitude `H` (m).
    pub altitude_m: f64,
    /// Transmission rate `R` (bit/s).
    pub rate_bps: f64,
    pub fading: FadingModel,
}

impl ChannelParams {
    /// Parameters of the reference evaluation setup: 10 dBm transmit power,
    /// 1 MHz bandwidth, -109 dBm noise, 10 dB SNR gap, -40 dB reference gain,
    /// path-loss exponent 2.6, 100 m altitude, 1 Mbit/s, Rician `K = 2`.
    pub fn reference_setup() -> Self {
        Self {
            tx_power_w: dbm_to_watts(10.0),
            bandwidth_hz: 1e6,
            noise_power_w: dbm_to_watts(-109.0),
            snr_gap: db_to_linear(10.0),
            ref_gain: db_to_linear(-40.0),
            pathloss_exponent: 2.6,
            altitude_m: 100.0,
            rate_bps: 1e6,
            fading: FadingModel::Rician { k_factor: 2.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tx_power", self.tx_power_w),
            ("bandwidth", self.bandwidth_hz),
            ("noise_power", self.noise_power_w),
            ("ref_gain", self.ref_gain),
            ("altitude", self.altitude_m),
            ("rate", self.rate_bps),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameters(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.snr_gap >= 1.0 && self.snr_gap.is_finite()) {
            return Err(Error::InvalidParameters(format!("snr_gap must be >= 1, got {}", self.snr_gap)));
        }
        if !(self.pathloss_exponent >= 2.0 && self.pathloss_exponent.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "pathloss_exponent must be >= 2, got {}",
                self.pathloss_exponent
            )));
        }
        if let FadingModel::Rician { k_factor } = self.fading {
            if !(k_factor >= 0.0 && k_factor.is_finite()) {
                return Err(Error::InvalidParameters(format!("Rician k_factor must be >= 0, got {k_factor}")));
            }
        }
        Ok(())
    }
}

/// File and packet bookkeeping for the coded broadcast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlncParams {
    /// File size `W` (bits).
    pub file_bits: u64,
    /// Packet size `R_p` (bits).
    pub packet_bits: u64,
    /// Slot length `δ_t` (s).
    pub slot_s: f64,
    /// Maximum horizontal speed `V_max` (m/s).
    pub max_speed_mps: f64,
    /// Target file-recovery probability `P̄`.
    pub target_prob: f64,
}

impl RlncParams {
    /// 2 Mbit file, 10⁴-bit packets, 0.1 s slots, 50 m/s, target 0.9.
    pub fn reference_setup() -> Self {
        Self { file_bits: 2_000_000, packet_bits: 10_000, slot_s: 0.1, max_speed_mps: 50.0, target_prob: 0.9 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.packet_bits == 0 || self.file_bits == 0 {
            return Err(Error::InvalidParameters("file and packet sizes must be > 0".into()));
        }
        if !(self.slot_s.is_finite() && self.slot_s > 0.0) {
            return Err(Error::InvalidParameters(format!("slot length must be > 0, got {}", self.slot_s)));
        }
        if !(self.max_speed_mps.is_finite() && self.max_speed_mps > 0.0) {
            return Err(Error::InvalidParameters(format!("max speed must be > 0, got {}", self.max_speed_mps)));
        }
        if !(self.target_prob > 0.0 && self.target_prob < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "target probability must lie in (0, 1), got {}",
                self.target_prob
            )));
        }
        Ok(())
    }
}

/// Integer counts implied by the coding and radio parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCounts {
    /// Information packets `N' = W / R_p`.
    pub n_info: u64,
    /// Packets per slot `L = δ_t / T_p`.
    pub packets_per_slot: u32,
    /// Packet duration `T_p = R_p / R` (s).
    pub packet_time_s: f64,
}

/// Derives `N'`, `L` and `T_p`, rejecting non-integral relations.
pub fn derive_counts(rlnc: &RlncParams, channel: &ChannelParams) -> Result<DerivedCounts> {
    rlnc.validate()?;
    if !rlnc.file_bits.is_multiple_of(rlnc.packet_bits) {
        return Err(Error::InvalidParameters(format!(
            "N' = W/R_p is not an integer (W = {}, R_p = {})",
            rlnc.file_bits, rlnc.packet_bits
        )));
    }
    let n_info = rlnc.file_bits / rlnc.packet_bits;
    let packet_time = rlnc.packet_bits as f64 / channel.rate_bps;
    let l_real = rlnc.slot_s / packet_time;
    let l_round = l_real.round();
    if !(l_round >= 1.0 && (l_real - l_round).abs() <= 1e-9 * l_round && l_round <= u32::MAX as f64) {
        return Err(Error::InvalidParameters(format!("L = R·δ_t/R_p must be a positive integer, got {l_real}")));
    }
    Ok(DerivedCounts { n_info, packets_per_slot: l_round as u32, packet_time_s: packet_time })
}

/// Choice of the auxiliary connection distance `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AuxDistance {
    /// A fixed distance in meters.
    Fixed(f64),
    /// Use the critical distance `D*`.
    Auto(AutoTag),
}

/// Serialized as the literal string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl AuxDistance {
    pub const AUTO: AuxDistance = AuxDistance::Auto(AutoTag::Auto);
}

/// A full problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub gts: Vec<Point>,
    pub channel: ChannelParams,
    pub rlnc: RlncParams,
    pub aux_distance: AuxDistance,
}

impl Scenario {
    pub fn new(gts: Vec<Point>, channel: ChannelParams, rlnc: RlncParams, aux_distance: AuxDistance) -> Result<Self> {
        let s = Self { gts, channel, rlnc, aux_distance };
        s.validate()?;
        Ok(s)
    }

    /// Reference-setup radio and coding parameters around the given GTs, `D = D*`.
    pub fn reference(gts: Vec<Point>) -> Result<Self> {
        Self::new(gts, ChannelParams::reference_setup(), RlncParams::reference_setup(), AuxDistance::AUTO)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gts.is_empty() {
            return Err(Error::InvalidParameters("scenario has no ground terminals".into()));
        }
        if let Some(p) = self.gts.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameters(format!("non-finite GT location {p:?}")));
        }
        self.channel.validate()?;
        derive_counts(&self.rlnc, &self.channel)?;
        if let AuxDistance::Fixed(d) = self.aux_distance {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::InvalidParameters(format!("aux distance must be >= 0, got {d}")));
            }
        }
        let step = self.rlnc.slot_s * self.rlnc.max_speed_mps;
        if step > self.channel.altitude_m / 10.0 {
            log::warn!(
                "slot length is coarse: δ_t·V_max = {step} m exceeds H/10 = {} m; distances are not constant within a slot",
                self.channel.altitude_m / 10.0
            );
        }
        Ok(())
    }

    pub fn counts(&self) -> Result<DerivedCounts> {
        derive_counts(&self.rlnc, &self.channel)
    }

    /// The connection distance `D` in meters, resolving `auto` to `D*`.
    pub fn resolve_distance(&self) -> Result<f64> {
        match self.aux_distance {
            AuxDistance::Fixed(d) => Ok(d),
            AuxDistance::Auto(_) => crate::channel::critical_distance(&self.channel),
        }
    }
}

/// Piecewise-linear UAV trajectory with explicit hovering.
///
/// The UAV dwells `dwell_times[i]` at waypoint `i`, then flies the straight
/// leg to waypoint `i + 1` in `travel_times[i]` at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRepr", into = "TrajectoryRepr")]
pub struct Trajectory {
    waypoints: Vec<Point>,
    travel_times: Vec<f64>,
    dwell_times: Vec<f64>,
    /// Arrival time at each waypoint.
    arrivals: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryRepr {
    waypoints: Vec<Point>,
    travel_times: Vec<f64>,
    dwell_times: Vec<f64>,
}

impl TryFrom<TrajectoryRepr> for Trajectory {
    type Error = Error;
    fn try_from(r: TrajectoryRepr) -> Result<Self> {
        Trajectory::new(r.waypoints, r.travel_times, r.dwell_times)
    }
}

impl From<Trajectory> for TrajectoryRepr {
    fn from(t: Trajectory) -> Self {
        TrajectoryRepr { waypoints: t.waypoints, travel_times: t.travel_times, dwell_times: t.dwell_times }
    }
}

impl Trajectory {
    pub fn new(waypoints: Vec<Point>, travel_times: Vec<f64>, dwell_times: Vec<f64>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidParameters("trajectory needs at least one waypoint".into()));
        }
        if travel_times.len() + 1 != waypoints.len() || dwell_times.len() != waypoints.len() {
            return Err(Error::InvalidParameters(format!(
                "trajectory shape mismatch: {} waypoints, {} legs, {} dwells",
                waypoints.len(),
                travel_times.len(),
                dwell_times.len()
            )));
        }
        if let Some(t) = travel_times.iter().chain(&dwell_times).find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::InvalidParameters(format!("durations must be finite and >= 0, got {t}")));
        }
        for (i, (w, &tt)) in waypoints.windows(2).zip(&travel_times).enumerate() {
            if tt == 0.0 && w[0] != w[1] {
                return Err(Error::InvalidParameters(format!("leg {i} has positive length and zero duration")));
            }
        }
        let mut arrivals = Vec::with_capacity(waypoints.len());
        let mut t = 0.0;
        for i in 0..waypoints.len() {
            arrivals.push(t);
            t += dwell_times[i];
            if i < travel_times.len() {
                t += travel_times[i];
            }
        }
        Ok(Self { waypoints, travel_times, dwell_times, arrivals })
    }

    /// A single hover of `duration` seconds at `at`.
    pub fn hover(at: Point, duration: f64) -> Result<Self> {
        Self::new(vec![at], Vec::new(), vec![duration])
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    pub fn travel_times(&self) -> &[f64] {
        &self.travel_times
    }

    pub fn dwell_times(&self) -> &[f64] {
        &self.dwell_times
    }

    pub fn total_time(&self) -> f64 {
        let last = self.waypoints.len() - 1;
        self.arrivals[last] + self.dwell_times[last]
    }

    /// Flown distance.
    pub fn path_length(&self) -> f64 {
        crate::geometry::polyline_length(&self.waypoints)
    }

    /// Largest leg speed.
    pub fn max_speed(&self) -> f64 {
        self.waypoints
            .windows(2)
            .zip(&self.travel_times)
            .filter(|(_, &t)| t > 0.0)
            .map(|(w, &t)| w[0].dist(w[1]) / t)
            .fold(0.0, f64::max)
    }

    /// Checks `‖leg‖ / travel_time ≤ V_max` on every leg (relative slack 10⁻⁹).
    pub fn check_speed(&self, max_speed: f64) -> Result<()> {
        for (i, (w, &t)) in self.waypoints.windows(2).zip(&self.travel_times).enumerate() {
            let len = w[0].dist(w[1]);
            if len > max_speed * t * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::InvalidParameters(format!(
                    "leg {i} needs {} m/s > V_max = {max_speed} m/s",
                    len / t
                )));
            }
        }
        Ok(())
    }

    /// Horizontal UAV position `q(t)`.
    pub fn sample_position(&self, t: f64) -> Result<Point> {
        let total = self.total_time();
        let slack = 1e-12 * total.max(1.0);
        if !(t >= 0.0 && t <= total + slack) {
            return Err(Error::Domain(format!("time {t} outside [0, {total}]")));
        }
        let t = t.min(total);
        // Last waypoint whose arrival is not after t.
        let i = self.arrivals.partition_point(|&a| a <= t).saturating_sub(1);
        let depart = self.arrivals[i] + self.dwell_times[i];
        if t <= depart || i + 1 == self.waypoints.len() {
            return Ok(self.waypoints[i]);
        }
        let frac = ((t - depart) / self.travel_times[i]).clamp(0.0, 1.0);
        Ok(self.waypoints[i].lerp(self.waypoints[i + 1], frac))
    }

    /// `(t, x, y)` samples every `dt` seconds, always including `t = T`.
    pub fn time_samples(&self, dt: f64) -> Result<Vec<(f64, Point)>> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain(format!("sampling step must be > 0, got {dt}")));
        }
        let total = self.total_time();
        let n = (total / dt).floor() as usize;
        let mut out = Vec::with_capacity(n + 2);
        for i in 0..=n {
            let t = i as f64 * dt;
            out.push((t, self.sample_position(t)?));
        }
        if out.last().is_none_or(|(t, _)| *t < total) {
            out.push((total, self.sample_position(total)?));
        }
        Ok(out)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
