//! Monte-Carlo estimation of network outage probability.
//!
//! A run draws its large-scale fading once and then, for every slot, draws
//! small-scale fading and hands the same realization to every scheme. A slot
//! is an outage for a scheme when any pair's normalized end-to-end SINR is
//! below 1.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{sample_large_scale_indexed, sample_small_scale, ChannelRealization, LargeScaleRealization};
use crate::error::{Error, Result};
use crate::selection::{RelayAssignment, Scheme, SelectOptions, Selector};
use crate::topology::{Network, NetworkConfig};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub scheme: Scheme,
    pub trials: u64,
    pub outage_count: u64,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_time_ms: f64,
    pub mean_comparisons: f64,
}

/// Network outage: some pair's normalized SINR is below 1.
pub fn is_outage(assignment: &RelayAssignment) -> bool {
    if assignment.per_user_sinr.is_empty() {
        return !(assignment.value >= 1.0);
    }
    assignment.per_user_sinr.iter().any(|&g| !(g >= 1.0))
}

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (low.min(p), high.max(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Independent large-scale realizations; slot `k` uses realization
    /// `k mod large_scale_realizations`.
    pub large_scale_realizations: u32,
    pub select: SelectOptions,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            large_scale_realizations: 1,
            select: SelectOptions::default(),
        }
    }
}

/// One scheme's result on one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub scheme: Scheme,
    pub assignment: RelayAssignment,
    pub outage: bool,
    pub elapsed: Duration,
}

/// A network, its large-scale fading and the schemes to compare.
pub struct Simulation {
    selector: Selector,
    large: Vec<LargeScaleRealization>,
    schemes: Vec<Scheme>,
    seed: u64,
}

impl Simulation {
    pub fn new(net: &Network, schemes: &[Scheme], seed: u64, options: &SimOptions) -> Result<Self> {
        if schemes.is_empty() {
            return Err(Error::Invalid("no schemes selected".into()));
        }
        if options.large_scale_realizations == 0 {
            return Err(Error::Invalid("need at least one large-scale realization".into()));
        }
        let large = (0..options.large_scale_realizations)
            .map(|r| sample_large_scale_indexed(net, seed, r))
            .collect();
        Ok(Simulation {
            selector: Selector::new(net, options.select.clone())?,
            large,
            schemes: schemes.to_vec(),
            seed,
        })
    }

    /// Replays a fixed large-scale realization, e.g. one loaded from CSV.
    pub fn with_large_scale(
        net: &Network,
        large: LargeScaleRealization,
        schemes: &[Scheme],
        seed: u64,
        options: &SimOptions,
    ) -> Result<Self> {
        let mut sim = Simulation::new(net, schemes, seed, &SimOptions {
            large_scale_realizations: 1,
            ..options.clone()
        })?;
        sim.large = vec![large];
        Ok(sim)
    }

    pub fn selector(&self) -> &Selector {
        &self.selector
    }

    pub fn schemes(&self) -> &[Scheme] {
        &self.schemes
    }

    pub fn large_scale(&self) -> &[LargeScaleRealization] {
        &self.large
    }

    pub fn channel(&self, slot: u64) -> ChannelRealization {
        let large = &self.large[(slot % self.large.len() as u64) as usize];
        sample_small_scale(large, self.seed, slot)
    }

    /// Runs every scheme on slot `slot`. Only selector time is measured.
    pub fn run_slot(&self, slot: u64) -> Result<Vec<SlotOutcome>> {
        let channel = self.channel(slot);
        self.schemes
            .iter()
            .map(|&scheme| {
                let start = Instant::now();
                let assignment = self.selector.select(scheme, &channel)?;
                let elapsed = start.elapsed();
                Ok(SlotOutcome {
                    scheme,
                    outage: is_outage(&assignment),
                    assignment,
                    elapsed,
                })
            })
            .collect()
    }

    /// Runs `n_slots` slots and aggregates per scheme. Counts are summed, so
    /// they do not depend on how slots are split across threads.
    pub fn estimate(&self, n_slots: u64) -> Result<Vec<OutageEstimate>> {
        if n_slots == 0 {
            return Err(Error::Invalid("need at least one slot".into()));
        }
        const CHUNK: u64 = 256;
        let k = self.schemes.len();
        let zero = || vec![Tally::default(); k];
        let chunks = n_slots.div_ceil(CHUNK);
        let tallies = (0..chunks)
            .into_par_iter()
            .map(|c| -> Result<Vec<Tally>> {
                let mut acc = zero();
                for slot in c * CHUNK..((c + 1) * CHUNK).min(n_slots) {
                    for (t, o) in acc.iter_mut().zip(self.run_slot(slot)?) {
                        t.add(&o);
                    }
                }
                Ok(acc)
            })
            .try_reduce(zero, |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    x.merge(y);
                }
                Ok(a)
            })?;

        Ok(self
            .schemes
            .iter()
            .zip(tallies)
            .map(|(&scheme, t)| {
                let (ci_low, ci_high) = wilson_interval(t.outages, n_slots);
                OutageEstimate {
                    scheme,
                    trials: n_slots,
                    outage_count: t.outages,
                    probability: t.outages as f64 / n_slots as f64,
                    ci_low,
                    ci_high,
                    mean_time_ms: t.time.as_secs_f64() * 1e3 / n_slots as f64,
                    mean_comparisons: t.comparisons as f64 / n_slots as f64,
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    outages: u64,
    comparisons: u128,
    time: Duration,
}

impl Tally {
    fn add(&mut self, o: &SlotOutcome) {
        self.outages += o.outage as u64;
        self.comparisons += o.assignment.comparisons as u128;
        self.time += o.elapsed;
    }

    fn merge(&mut self, other: &Tally) {
        self.outages += other.outages;
        self.comparisons += other.comparisons;
        self.time += other.time;
    }
}

/// Outage of each scheme over `n_slots` slots of one run.
pub fn estimate_outage(
    config: &NetworkConfig,
    schemes: &[Scheme],
    n_slots: u64,
    seed: u64,
    options: &SimOptions,
) -> Result<Vec<OutageEstimate>> {
    let net = Network::new(config)?;
    Simulation::new(&net, schemes, seed, options)?.estimate(n_slots)
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    #[serde(rename = "tx_power_dbm")]
    TxPowerDbm,
    #[serde(rename = "L")]
    Hops,
    #[serde(rename = "M")]
    Relays,
    #[serde(rename = "N")]
    Pairs,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TxPowerDbm => "tx_power_dbm",
            SweepAxis::Hops => "L",
            SweepAxis::Relays => "M",
            SweepAxis::Pairs => "N",
        }
    }

    /// `config` with the axis set to `value`.
    pub fn apply(self, config: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        let mut cfg = config.clone();
        let count = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 && value < 1e6 {
                Ok(value as usize)
            } else {
                Err(Error::Invalid(format!("axis {} needs a positive integer, got {value}", self.name())))
            }
        };
        match self {
            SweepAxis::TxPowerDbm => cfg.tx_power_dbm = value,
            SweepAxis::Hops => cfg.n_hops = count()?,
            SweepAxis::Relays => cfg.relays_per_hop = vec![count()?],
            SweepAxis::Pairs => {
                let n = count()?;
                let first = cfg.sinr_thresholds.first().copied().unwrap_or(1.0);
                if cfg.sinr_thresholds.iter().any(|&t| t != first) {
                    return Err(Error::Invalid(
                        "sweeping N needs a common SINR threshold for all pairs".into(),
                    ));
                }
                cfg.n_pairs = n;
                cfg.sinr_thresholds = vec![first; n];
            }
        }
        Ok(cfg)
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tx_power_dbm" | "power" | "P" => Ok(SweepAxis::TxPowerDbm),
            "L" | "hops" | "n_hops" => Ok(SweepAxis::Hops),
            "M" | "relays" | "relays_per_hop" => Ok(SweepAxis::Relays),
            "N" | "pairs" | "n_pairs" => Ok(SweepAxis::Pairs),
            other => Err(Error::Invalid(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    #[serde(flatten)]
    pub estimate: OutageEstimate,
}

/// Re-estimates outage at every axis value with the same seed. A power
/// sweep therefore sees identical fading at every point; structural sweeps
/// share the fading of every link the networks have in common.
pub fn sweep(
    config: &NetworkConfig,
    axis: SweepAxis,
    values: &[f64],
    schemes: &[Scheme],
    n_slots: u64,
    seed: u64,
    options: &SimOptions,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &v in values {
        let cfg = axis.apply(config, v)?;
        for estimate in estimate_outage(&cfg, schemes, n_slots, seed, options)? {
            rows.push(SweepRow { axis_value: v, estimate });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assignment(per_user: &[f64]) -> RelayAssignment {
        RelayAssignment {
            relays: vec![],
            states: vec![],
            value: per_user.iter().copied().fold(f64::INFINITY, f64::min),
            per_user_sinr: per_user.to_vec(),
            comparisons: 0,
        }
    }

    #[test]
    fn outage_rule() {
        assert!(is_outage(&assignment(&[1.2, 0.9])));
        assert!(!is_outage(&assignment(&[1.0, 1.0])));
        assert!(is_outage(&assignment(&[0.0])));
        assert!(is_outage(&assignment(&[f64::NAN, 2.0])));
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-5);
        let (lo, hi) = wilson_interval(100, 100);
        assert_eq!(hi, 1.0);
        assert!((lo - 0.963_005).abs() < 1e-5);
        // textbook value: 10 of 100 -> (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.05523).abs() < 1e-4 && (hi - 0.17437).abs() < 1e-4);
    }

    #[test]
    fn extreme_thresholds() {
        let mut cfg = NetworkConfig::new(2, 3, 3, 1.0).with_threshold_db(-300.0);
        let est = estimate_outage(&cfg, &Scheme::COMPARISON, 200, 1, &SimOptions::default()).unwrap();
        assert!(est.iter().all(|e| e.outage_count == 0 && e.probability == 0.0));

        cfg = cfg.with_threshold_db(300.0);
        let est = estimate_outage(&cfg, &Scheme::COMPARISON, 200, 1, &SimOptions::default()).unwrap();
        assert!(est.iter().all(|e| e.outage_count == 200 && e.probability == 1.0));
    }

    #[test]
    fn optimal_outage_is_lowest() {
        let mut cfg = NetworkConfig::new(2, 3, 4, 4.0);
        cfg.noise_power_dbm = 15.0;
        let est = estimate_outage(&cfg, &Scheme::COMPARISON, 500, 3, &SimOptions::default()).unwrap();
        let opt = est[0].outage_count;
        assert!(opt > 0 && opt < 500, "uninformative calibration: {opt}");
        assert!(est.iter().all(|e| e.outage_count >= opt));
        assert_eq!(est[0].mean_comparisons, 6.0 + 36.0 * 2.0);
    }

    #[test]
    fn counts_are_reproducible() {
        let mut cfg = NetworkConfig::new(2, 3, 3, 2.0);
        cfg.noise_power_dbm = 20.0;
        let run = || {
            estimate_outage(&cfg, &Scheme::COMPARISON, 300, 42, &SimOptions::default())
                .unwrap()
                .into_iter()
                .map(|e| e.outage_count)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn multiple_large_scale_realizations() {
        let cfg = NetworkConfig::new(1, 2, 2, 1.0);
        let net = Network::new(&cfg).unwrap();
        let opts = SimOptions {
            large_scale_realizations: 3,
            ..Default::default()
        };
        let sim = Simulation::new(&net, &[Scheme::Optimal], 0, &opts).unwrap();
        assert_eq!(sim.large_scale().len(), 3);
        assert_ne!(sim.large_scale()[0], sim.large_scale()[1]);
        assert!(sim.estimate(10).is_ok());
    }

    #[test]
    fn sweep_axes() {
        let cfg = NetworkConfig::new(2, 3, 3, 1.0);
        assert_eq!(SweepAxis::Pairs.apply(&cfg, 3.0).unwrap().sinr_thresholds.len(), 3);
        assert_eq!(SweepAxis::Relays.apply(&cfg, 5.0).unwrap().relays_per_hop, vec![5]);
        assert_eq!(SweepAxis::Hops.apply(&cfg, 7.0).unwrap().n_hops, 7);
        assert!(SweepAxis::Hops.apply(&cfg, 2.5).is_err());
        let mut het = cfg.clone();
        het.sinr_thresholds = vec![1.0, 2.0];
        assert!(SweepAxis::Pairs.apply(&het, 3.0).is_err());
        assert_eq!("M".parse::<SweepAxis>().unwrap(), SweepAxis::Relays);
        assert!("Q".parse::<SweepAxis>().is_err());

        let rows = sweep(&cfg, SweepAxis::TxPowerDbm, &[0.0, 10.0], &[Scheme::Optimal, Scheme::Drs], 20, 1, &SimOptions::default()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].axis_value, 10.0);
    }

    #[test]
    fn power_monotone_per_slot_without_interference() {
        let mut cfg = NetworkConfig::new(2, 4, 4, 3.0);
        cfg.interference_enabled = false;
        cfg.noise_power_dbm = 20.0;
        let mut prev: Option<Vec<f64>> = None;
        for p in [16.0, 22.0, 28.0] {
            cfg.tx_power_dbm = p;
            let net = Network::new(&cfg).unwrap();
            let sim = Simulation::new(&net, &[Scheme::Optimal], 9, &SimOptions::default()).unwrap();
            let values: Vec<f64> = (0..100).map(|s| sim.run_slot(s).unwrap()[0].assignment.value).collect();
            if let Some(prev) = &prev {
                assert!(values.iter().zip(prev).all(|(v, p)| v >= p));
            }
            prev = Some(values);
        }
    }
}
