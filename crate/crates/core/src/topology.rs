//! Network scenario description and dummy-relay padding.
//!
//! A network has `n_pairs` source/destination pairs, `n_hops` hops and
//! `n_hops - 1` relay stages in between. Hop `h` (0-based) carries traffic
//! from the sources (h = 0) or relay stage `h - 1` to relay stage `h` or, for
//! the last hop, to the destinations. All nodes of a layer sit at the same
//! point on a line, so every link of a hop has length
//! `total_distance_km / n_hops`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_pairs: usize,
    /// Relay count per relay stage. A single entry means every stage has
    /// that many relays.
    pub relays_per_hop: Vec<usize>,
    pub n_hops: usize,
    pub total_distance_km: f64,
    pub path_loss_exponent: f64,
    pub shadowing_std_db: f64,
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    /// Required SINR per pair, linear scale.
    pub sinr_thresholds: Vec<f64>,
    pub interference_enabled: bool,
    pub shadowing_enabled: bool,
}

pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 3.6;
pub const DEFAULT_SHADOWING_STD_DB: f64 = 8.0;
pub const DEFAULT_NOISE_POWER_DBM: f64 = -100.0;
pub const DEFAULT_TX_POWER_DBM: f64 = 30.0;

impl NetworkConfig {
    /// Uniform network with `relays` relays per stage, unit thresholds and
    /// default propagation parameters.
    pub fn new(n_pairs: usize, relays: usize, n_hops: usize, total_distance_km: f64) -> Self {
        NetworkConfig {
            n_pairs,
            relays_per_hop: vec![relays],
            n_hops,
            total_distance_km,
            path_loss_exponent: DEFAULT_PATH_LOSS_EXPONENT,
            shadowing_std_db: DEFAULT_SHADOWING_STD_DB,
            tx_power_dbm: DEFAULT_TX_POWER_DBM,
            noise_power_dbm: DEFAULT_NOISE_POWER_DBM,
            sinr_thresholds: vec![1.0; n_pairs],
            interference_enabled: true,
            shadowing_enabled: true,
        }
    }

    /// Sets the same threshold, given in dB, for every pair.
    pub fn with_threshold_db(mut self, threshold_db: f64) -> Self {
        self.sinr_thresholds = vec![db_to_linear(threshold_db); self.n_pairs];
        self
    }

    pub fn hop_distance_km(&self) -> f64 {
        self.total_distance_km / self.n_hops as f64
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    /// Number of relay stages, `n_hops - 1`.
    pub fn relay_stages(&self) -> usize {
        self.n_hops.saturating_sub(1)
    }

    /// Largest per-stage relay count, the `M` of the padded network.
    pub fn max_relays(&self) -> usize {
        self.relays_per_hop.iter().copied().max().unwrap_or(0)
    }

    /// Checks every parameter and expands a uniform relay count into one
    /// entry per stage.
    ///
    /// Each stage must hold at least `n_pairs` real relays: a stage with
    /// fewer would force some pair through a zero-gain dummy.
    pub fn validate(&self) -> Result<NetworkConfig> {
        if self.n_pairs == 0 {
            return Err(Error::NonPositiveParameter {
                name: "n_pairs",
                value: 0.0,
            });
        }
        if self.n_hops < 2 {
            return Err(Error::TooFewHops(self.n_hops));
        }
        positive("total_distance_km", self.total_distance_km)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        if !(self.shadowing_std_db >= 0.0) || !self.shadowing_std_db.is_finite() {
            return Err(Error::Invalid(format!(
                "shadowing_std_db must be a nonnegative number, got {}",
                self.shadowing_std_db
            )));
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_power_dbm", self.noise_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.sinr_thresholds.len() != self.n_pairs {
            return Err(Error::ThresholdCountMismatch {
                expected: self.n_pairs,
                got: self.sinr_thresholds.len(),
            });
        }
        for &th in &self.sinr_thresholds {
            positive("sinr_thresholds", th)?;
        }

        let stages = self.relay_stages();
        let relays_per_hop = match self.relays_per_hop.len() {
            1 => vec![self.relays_per_hop[0]; stages],
            n if n == stages => self.relays_per_hop.clone(),
            n => {
                return Err(Error::RelayCountMismatch {
                    expected: stages,
                    got: n,
                })
            }
        };
        for (stage, &relays) in relays_per_hop.iter().enumerate() {
            if relays < self.n_pairs {
                return Err(Error::TooFewRelays {
                    stage,
                    relays,
                    pairs: self.n_pairs,
                });
            }
        }

        Ok(NetworkConfig {
            relays_per_hop,
            ..self.clone()
        })
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    // `!(v > 0)` also rejects NaN.
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::NonPositiveParameter { name, value });
    }
    Ok(())
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// A validated network with every relay stage padded to `relays()` nodes.
///
/// Real relays of stage `s` occupy indices `0..relays_per_hop[s]`; the
/// remaining indices are dummies whose links have zero gain.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    relays: usize,
    dummy: Vec<Vec<bool>>,
}

impl Network {
    pub fn new(config: &NetworkConfig) -> Result<Network> {
        Ok(pad_dummy_relays(&config.validate()?))
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn n_pairs(&self) -> usize {
        self.config.n_pairs
    }

    pub fn n_hops(&self) -> usize {
        self.config.n_hops
    }

    pub fn relay_stages(&self) -> usize {
        self.config.n_hops - 1
    }

    /// Padded relay count `M`.
    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn dummy_mask(&self, stage: usize) -> &[bool] {
        &self.dummy[stage]
    }

    pub fn is_dummy(&self, stage: usize, relay: usize) -> bool {
        self.dummy[stage][relay]
    }

    pub fn dummy_count(&self, stage: usize) -> usize {
        self.dummy[stage].iter().filter(|&&d| d).count()
    }

    pub fn has_dummies(&self) -> bool {
        self.dummy.iter().flatten().any(|&d| d)
    }

    /// `(transmitters, receivers)` of hop `hop`.
    pub fn hop_shape(&self, hop: usize) -> (usize, usize) {
        let n = self.n_pairs();
        let tx = if hop == 0 { n } else { self.relays };
        let rx = if hop + 1 == self.n_hops() { n } else { self.relays };
        (tx, rx)
    }

    /// Whether transmitter `node` of hop `hop` is a dummy relay.
    pub fn tx_is_dummy(&self, hop: usize, node: usize) -> bool {
        hop > 0 && self.dummy[hop - 1][node]
    }

    /// Whether receiver `node` of hop `hop` is a dummy relay.
    pub fn rx_is_dummy(&self, hop: usize, node: usize) -> bool {
        hop + 1 < self.n_hops() && self.dummy[hop][node]
    }
}

/// Pads every stage to `M = max_l M_l` relays and records which indices are
/// dummies. Expects a config that passed [`NetworkConfig::validate`] or at
/// least has one relay count per stage.
pub fn pad_dummy_relays(config: &NetworkConfig) -> Network {
    let stages = config.relay_stages();
    let counts: Vec<usize> = if config.relays_per_hop.len() == 1 {
        vec![config.relays_per_hop[0]; stages]
    } else {
        config.relays_per_hop.clone()
    };
    let relays = counts.iter().copied().max().unwrap_or(0);
    let dummy = counts
        .iter()
        .map(|&real| (0..relays).map(|r| r >= real).collect())
        .collect();
    Network {
        config: NetworkConfig {
            relays_per_hop: counts,
            ..config.clone()
        },
        relays,
        dummy,
    }
}
