//! TOML scenario files.
//!
//! ```toml
//! aux_distance_D = "auto"          # or a distance in meters
//!
//! [channel]                        # every key optional, defaults to the reference setup
//! tx_power_P = "10 dBm"            # "dBm", "dBW", "W" or "mW"
//! bandwidth_B = 1e6
//! noise_power_sigma2 = "-109 dBm"
//! snr_gap_Gamma = "10 dB"          # "dB" or a plain linear ratio
//! ref_gain_beta0 = "-40 dB"
//! pathloss_alpha = 2.6
//! altitude_H = 100.0
//! rate_R = 1e6
//! fading = { model = "rician", k_factor_Kc = 2.0 }   # or { model = "los" }
//!
//! [rlnc]
//! file_bits_W = 2000000
//! packet_bits_Rp = 10000
//! slot_len_delta_t = 0.1
//! max_speed_Vmax = 50.0
//! target_prob_Pbar = 0.9
//!
//! [gts]                            # either an explicit list ...
//! points = [[0.0, 0.0], [850.0, 120.0]]
//! # ... or a uniform draw: random = { count = 50, area_side_m = 3000.0, seed = 1 }
//!
//! [plan]                           # optional planner options
//! ```
//!
//! Powers are converted to watts once, here.

#![allow(non_snake_case)]

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::harness::uniform_gts;
use crate::model::{db_to_linear, dbm_to_watts, AuxDistance, ChannelParams, FadingModel, RlncParams, Scenario};
use crate::pipeline::PlanOptions;

/// A number, or a string with a unit suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Value(f64),
    Text(String),
}

impl Quantity {
    fn split(s: &str) -> Result<(f64, String)> {
        let s = s.trim();
        let cut = s.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E').unwrap_or(s.len());
        let (num, unit) = s.split_at(cut);
        let v: f64 = num.trim().parse().map_err(|_| Error::Config(format!("cannot read a number from {s:?}")))?;
        Ok((v, unit.trim().to_string()))
    }

    /// Power in watts.
    pub fn watts(&self, key: &str) -> Result<f64> {
        match self {
            Quantity::Value(v) => Ok(*v),
            Quantity::Text(s) => {
                let (v, unit) = Self::split(s)?;
                match unit.as_str() {
                    "dBm" => Ok(dbm_to_watts(v)),
                    "dBW" => Ok(db_to_linear(v)),
                    "W" | "" => Ok(v),
                    "mW" => Ok(v * 1e-3),
                    _ => Err(Error::Config(format!("{key}: unknown power unit {unit:?} in {s:?}"))),
                }
            }
        }
    }

    /// Dimensionless ratio.
    pub fn ratio(&self, key: &str) -> Result<f64> {
        match self {
            Quantity::Value(v) => Ok(*v),
            Quantity::Text(s) => {
                let (v, unit) = Self::split(s)?;
                match unit.as_str() {
                    "dB" => Ok(db_to_linear(v)),
                    "" => Ok(v),
                    _ => Err(Error::Config(format!("{key}: expected a ratio in dB, got {s:?}"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum FadingSpec {
    Los,
    Rician { k_factor_Kc: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub tx_power_P: Option<Quantity>,
    pub bandwidth_B: Option<f64>,
    pub noise_power_sigma2: Option<Quantity>,
    pub snr_gap_Gamma: Option<Quantity>,
    pub ref_gain_beta0: Option<Quantity>,
    pub pathloss_alpha: Option<f64>,
    pub altitude_H: Option<f64>,
    pub rate_R: Option<f64>,
    pub fading: Option<FadingSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlncSection {
    pub file_bits_W: Option<u64>,
    pub packet_bits_Rp: Option<u64>,
    pub slot_len_delta_t: Option<f64>,
    pub max_speed_Vmax: Option<f64>,
    pub target_prob_Pbar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGts {
    pub count: usize,
    pub area_side_m: f64,
    pub seed: u64,
    #[serde(default)]
    pub realization: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtSection {
    pub points: Option<Vec<[f64; 2]>>,
    pub random: Option<RandomGts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceSpec {
    Meters(f64),
    Keyword(String),
}

/// On-disk layout of a scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub aux_distance_D: Option<DistanceSpec>,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub rlnc: RlncSection,
    #[serde(default)]
    pub gts: GtSection,
    pub plan: Option<PlanOptions>,
}

/// A scenario together with its planner options.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub plan: PlanOptions,
}

impl ScenarioFile {
    pub fn resolve(self) -> Result<ScenarioConfig> {
        let base = ChannelParams::reference_setup();
        let c = self.channel;
        let channel = ChannelParams {
            tx_power_w: c.tx_power_P.map(|q| q.watts("tx_power_P")).transpose()?.unwrap_or(base.tx_power_w),
            bandwidth_hz: c.bandwidth_B.unwrap_or(base.bandwidth_hz),
            noise_power_w: c
                .noise_power_sigma2
                .map(|q| q.watts("noise_power_sigma2"))
                .transpose()?
                .unwrap_or(base.noise_power_w),
            snr_gap: c.snr_gap_Gamma.map(|q| q.ratio("snr_gap_Gamma")).transpose()?.unwrap_or(base.snr_gap),
            ref_gain: c.ref_gain_beta0.map(|q| q.ratio("ref_gain_beta0")).transpose()?.unwrap_or(base.ref_gain),
            pathloss_exponent: c.pathloss_alpha.unwrap_or(base.pathloss_exponent),
            altitude_m: c.altitude_H.unwrap_or(base.altitude_m),
            rate_bps: c.rate_R.unwrap_or(base.rate_bps),
            fading: match c.fading {
                None => base.fading,
                Some(FadingSpec::Los) => FadingModel::Los,
                Some(FadingSpec::Rician { k_factor_Kc }) => FadingModel::Rician { k_factor: k_factor_Kc },
            },
        };
        let rb = RlncParams::reference_setup();
        let r = self.rlnc;
        let rlnc = RlncParams {
            file_bits: r.file_bits_W.unwrap_or(rb.file_bits),
            packet_bits: r.packet_bits_Rp.unwrap_or(rb.packet_bits),
            slot_s: r.slot_len_delta_t.unwrap_or(rb.slot_s),
            max_speed_mps: r.max_speed_Vmax.unwrap_or(rb.max_speed_mps),
            target_prob: r.target_prob_Pbar.unwrap_or(rb.target_prob),
        };
        let aux = match self.aux_distance_D {
            None => AuxDistance::AUTO,
            Some(DistanceSpec::Meters(d)) => AuxDistance::Fixed(d),
            Some(DistanceSpec::Keyword(k)) if k == "auto" => AuxDistance::AUTO,
            Some(DistanceSpec::Keyword(k)) => {
                return Err(Error::Config(format!("aux_distance_D must be \"auto\" or meters, got {k:?}")))
            }
        };
        let gts = match (self.gts.points, self.gts.random) {
            (Some(p), None) => p.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
            (None, Some(g)) => {
                if !(g.area_side_m.is_finite() && g.area_side_m > 0.0) {
                    return Err(Error::Config(format!("gts.random.area_side_m must be > 0, got {}", g.area_side_m)));
                }
                uniform_gts(g.count, g.area_side_m, g.seed, g.realization)
            }
            _ => return Err(Error::Config("[gts] needs exactly one of `points` or `random`".into())),
        };
        Ok(ScenarioConfig { scenario: Scenario::new(gts, channel, rlnc, aux)?, plan: self.plan.unwrap_or_default() })
    }

    /// Explicit file for a resolved scenario; powers are written in watts.
    pub fn from_resolved(cfg: &ScenarioConfig) -> Self {
        let s = &cfg.scenario;
        let c = &s.channel;
        let watts = |w: f64| Some(Quantity::Text(format!("{w:?} W")));
        ScenarioFile {
            aux_distance_D: Some(match s.aux_distance {
                AuxDistance::Fixed(d) => DistanceSpec::Meters(d),
                AuxDistance::Auto(_) => DistanceSpec::Keyword("auto".into()),
            }),
            channel: ChannelSection {
                tx_power_P: watts(c.tx_power_w),
                bandwidth_B: Some(c.bandwidth_hz),
                noise_power_sigma2: watts(c.noise_power_w),
                snr_gap_Gamma: Some(Quantity::Value(c.snr_gap)),
                ref_gain_beta0: Some(Quantity::Value(c.ref_gain)),
                pathloss_alpha: Some(c.pathloss_exponent),
                altitude_H: Some(c.altitude_m),
                rate_R: Some(c.rate_bps),
                fading: Some(match c.fading {
                    FadingModel::Los => FadingSpec::Los,
                    FadingModel::Rician { k_factor } => FadingSpec::Rician { k_factor_Kc: k_factor },
                }),
            },
            rlnc: RlncSection {
                file_bits_W: Some(s.rlnc.file_bits),
                packet_bits_Rp: Some(s.rlnc.packet_bits),
                slot_len_delta_t: Some(s.rlnc.slot_s),
                max_speed_Vmax: Some(s.rlnc.max_speed_mps),
                target_prob_Pbar: Some(s.rlnc.target_prob),
            },
            gts: GtSection { points: Some(s.gts.iter().map(|p| [p.x, p.y]).collect()), random: None },
            plan: Some(cfg.plan.clone()),
        }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    file.resolve()
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

pub fn to_toml(cfg: &ScenarioConfig) -> Result<String> {
    toml::to_string(&ScenarioFile::from_resolved(cfg)).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_are_converted_once() {
        assert!((Quantity::Text("10 dBm".into()).watts("p").unwrap() - 0.01).abs() < 1e-15);
        assert!((Quantity::Text("-20dBW".into()).watts("p").unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(Quantity::Text("5 mW".into()).watts("p").unwrap(), 0.005);
        assert_eq!(Quantity::Text("1e-3 W".into()).watts("p").unwrap(), 0.001);
        assert_eq!(Quantity::Value(0.5).watts("p").unwrap(), 0.5);
        assert!((Quantity::Text("-40 dB".into()).ratio("g").unwrap() - 1e-4).abs() < 1e-18);
        assert!(Quantity::Text("10 dBm".into()).ratio("g").is_err());
        assert!(Quantity::Text("10 furlongs".into()).watts("p").is_err());
        assert!(Quantity::Text("dBm".into()).watts("p").is_err());
    }

    #[test]
    fn reference_file_matches_reference_setup() {
        let text = r#"
            aux_distance_D = "auto"
            [channel]
            tx_power_P = "10 dBm"
            bandwidth_B = 1e6
            noise_power_sigma2 = "-109 dBm"
            snr_gap_Gamma = "10 dB"
            ref_gain_beta0 = "-40 dB"
            pathloss_alpha = 2.6
            altitude_H = 100.0
            rate_R = 1e6
            fading = { model = "rician", k_factor_Kc = 2.0 }
            [rlnc]
            file_bits_W = 2000000
            packet_bits_Rp = 10000
            slot_len_delta_t = 0.1
            max_speed_Vmax = 50.0
            target_prob_Pbar = 0.9
            [gts]
            points = [[0.0, 0.0], [100.0, 50.0]]
        "#;
        let cfg = parse_config(text).unwrap();
        let reference = ChannelParams::reference_setup();
        let c = &cfg.scenario.channel;
        for (a, b) in [
            (c.tx_power_w, reference.tx_power_w),
            (c.noise_power_w, reference.noise_power_w),
            (c.snr_gap, reference.snr_gap),
            (c.ref_gain, reference.ref_gain),
        ] {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        assert_eq!(cfg.scenario.rlnc, RlncParams::reference_setup());
        assert_eq!(cfg.scenario.gts.len(), 2);
    }

    #[test]
    fn defaults_random_gts_and_round_trip() {
        let cfg =
            parse_config("aux_distance_D = 300.0\n[gts]\nrandom = { count = 7, area_side_m = 500.0, seed = 3 }\n")
                .unwrap();
        assert_eq!(cfg.scenario.gts, uniform_gts(7, 500.0, 3, 0));
        assert_eq!(cfg.scenario.aux_distance, AuxDistance::Fixed(300.0));
        let text = to_toml(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(parse_config("[gts]\n").is_err());
        assert!(
            parse_config("[gts]\npoints = [[0.0, 0.0]]\nrandom = { count = 1, area_side_m = 1.0, seed = 0 }").is_err()
        );
        assert!(parse_config("aux_distance_D = \"far\"\n[gts]\npoints = [[0.0, 0.0]]").is_err());
        assert!(parse_config("[channel]\ntx_power = 1.0\n[gts]\npoints = [[0.0, 0.0]]").is_err());
        assert!(parse_config("[rlnc]\npacket_bits_Rp = 30000\n[gts]\npoints = [[0.0, 0.0]]").is_err());
    }
}
