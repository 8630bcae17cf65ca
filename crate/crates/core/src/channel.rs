//! Fading model and per-hop SINR.
//!
//! Large-scale attenuation (path loss and log-normal shadowing) is drawn once
//! per run; Rayleigh small-scale fading is redrawn every time slot. All gains
//! are power gains `|h|^2`.
//!
//! Random numbers come from ChaCha8 seeded with the run seed. Links are
//! identified by `key = role << 32 | tx << 16 | rx`, where `role` is 0 for the
//! source hop, 1 for the destination hop and `h + 1` for relay hop `h`.
//! * The fade of a link in slot `k` (`k < 2^63`) is the 64-bit word at
//!   position `key` of stream `k`, mapped to an exponential variate by
//!   inversion.
//! * The shadowing of a link uses its own stream
//!   `2^63 | realization << 48 | key`.
//!
//! Draws therefore depend only on the link, not on the network shape: two
//! networks that share a link (the first hop of an `L = 8` and an `L = 10`
//! network, or pair 0 of an `N = 2` and an `N = 3` network) see the same
//! fading on it.

use std::io::{BufRead, Write};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::topology::Network;

/// Dense row-major `tx x rx` matrix of power gains.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl GainMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GainMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged gain matrix rows".into()));
        }
        Ok(GainMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, tx: usize, rx: usize) -> f64 {
        self.data[tx * self.cols + rx]
    }

    #[inline]
    pub fn set(&mut self, tx: usize, rx: usize, value: f64) {
        self.data[tx * self.cols + rx] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// Per-hop link attenuations, fixed for a whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleRealization {
    pub hops: Vec<GainMatrix>,
}

/// Per-hop `|h[i,j,l]|^2` for one time slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub hops: Vec<GainMatrix>,
}

const LARGE_SCALE_STREAM: u64 = 1 << 63;

fn hop_role(hop: usize, n_hops: usize) -> u64 {
    if hop == 0 {
        0
    } else if hop + 1 == n_hops {
        1
    } else {
        hop as u64 + 1
    }
}

fn link_key(role: u64, tx: usize, rx: usize) -> u64 {
    debug_assert!(role < 1 << 16 && tx < 1 << 16 && rx < 1 << 16);
    role << 32 | (tx as u64) << 16 | rx as u64
}

fn link_stream(realization: u32, role: u64, tx: usize, rx: usize) -> u64 {
    debug_assert!(realization < 1 << 15);
    LARGE_SCALE_STREAM | (realization as u64) << 48 | link_key(role, tx, rx)
}

/// Path loss times shadowing for every link, realization 0 of `seed`.
pub fn sample_large_scale(net: &Network, seed: u64) -> LargeScaleRealization {
    sample_large_scale_indexed(net, seed, 0)
}

/// Like [`sample_large_scale`] for the `realization`-th independent draw.
pub fn sample_large_scale_indexed(
    net: &Network,
    seed: u64,
    realization: u32,
) -> LargeScaleRealization {
    let cfg = net.config();
    let path_gain = cfg.hop_distance_km().powf(-cfg.path_loss_exponent);
    let shadowing = (cfg.shadowing_enabled && cfg.shadowing_std_db > 0.0)
        .then(|| Normal::new(0.0, cfg.shadowing_std_db).expect("validated std"));

    let hops = (0..net.n_hops())
        .map(|hop| {
            let (rows, cols) = net.hop_shape(hop);
            let role = hop_role(hop, net.n_hops());
            let mut m = GainMatrix::zeros(rows, cols);
            for tx in 0..rows {
                for rx in 0..cols {
                    if net.tx_is_dummy(hop, tx) || net.rx_is_dummy(hop, rx) {
                        continue;
                    }
                    let s = match &shadowing {
                        Some(normal) => {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed);
                            rng.set_stream(link_stream(realization, role, tx, rx));
                            let db: f64 = rng.sample(normal);
                            10f64.powf(db / 10.0)
                        }
                        None => 1.0,
                    };
                    m.set(tx, rx, path_gain * s);
                }
            }
            m
        })
        .collect();
    LargeScaleRealization { hops }
}

/// Multiplies every attenuation by a fresh unit-mean exponential variate.
/// Deterministic in `(seed, slot)`; zero attenuations stay exactly zero.
pub fn sample_small_scale(large: &LargeScaleRealization, seed: u64, slot: u64) -> ChannelRealization {
    assert!(slot < LARGE_SCALE_STREAM, "slot index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(slot);
    let n_hops = large.hops.len();
    let hops = large
        .hops
        .iter()
        .enumerate()
        .map(|(hop, a)| {
            let role = hop_role(hop, n_hops);
            let mut data = Vec::with_capacity(a.data.len());
            for tx in 0..a.rows {
                // consecutive receivers are consecutive u64 words
                rng.set_word_pos(2 * link_key(role, tx, 0) as u128);
                for rx in 0..a.cols {
                    let bits = rng.next_u64();
                    data.push(a.get(tx, rx) * unit_exponential(bits));
                }
            }
            GainMatrix {
                rows: a.rows,
                cols: a.cols,
                data,
            }
        })
        .collect();
    ChannelRealization { hops }
}

/// Inverse-CDF exponential variate from 53 random bits.
#[inline]
fn unit_exponential(bits: u64) -> f64 {
    let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    -(-u).ln_1p()
}

/// Transmit power, noise and thresholds needed to evaluate SINRs, in linear
/// units.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrModel {
    pub tx_power_w: f64,
    pub noise_w: f64,
    pub thresholds: Vec<f64>,
    pub interference: bool,
}

impl SinrModel {
    pub fn new(net: &Network) -> Self {
        let cfg = net.config();
        SinrModel {
            tx_power_w: cfg.tx_power_w(),
            noise_w: cfg.noise_power_w(),
            thresholds: cfg.sinr_thresholds.clone(),
            interference: cfg.interference_enabled,
        }
    }

    /// Normalized SINR of `user` at receiver `rx` when transmitter `tx[j]`
    /// serves user `j`.
    #[inline]
    pub fn user_sinr(&self, gains: &GainMatrix, tx: &[usize], rx: usize, user: usize) -> f64 {
        let p = self.tx_power_w;
        let signal = p * gains.get(tx[user], rx);
        let mut interference = 0.0;
        if self.interference {
            for (j, &t) in tx.iter().enumerate() {
                if j != user {
                    interference += p * gains.get(t, rx);
                }
            }
        }
        signal / (self.noise_w + interference) / self.thresholds[user]
    }

    /// Interference-free normalized SNR of a single link for `user`.
    /// Matches [`Self::user_sinr`] bit for bit when interference is off.
    #[inline]
    pub fn link_snr(&self, gains: &GainMatrix, tx: usize, rx: usize, user: usize) -> f64 {
        self.tx_power_w * gains.get(tx, rx) / (self.noise_w + 0.0) / self.thresholds[user]
    }
}

/// Normalized per-user SINR of one hop: user `i` is sent by transmitter
/// `tx[i]` to receiver `rx[i]`.
pub fn hop_sinr(gains: &GainMatrix, tx: &[usize], rx: &[usize], net: &Network) -> Vec<f64> {
    let model = SinrModel::new(net);
    (0..tx.len())
        .map(|i| model.user_sinr(gains, tx, rx[i], i))
        .collect()
}

/// Writes `hop,tx,rx,attenuation` rows.
pub fn write_large_scale_csv<W: Write>(large: &LargeScaleRealization, mut out: W) -> Result<()> {
    writeln!(out, "hop,tx,rx,attenuation")?;
    for (hop, m) in large.hops.iter().enumerate() {
        for tx in 0..m.rows {
            for rx in 0..m.cols {
                writeln!(out, "{hop},{tx},{rx},{}", m.get(tx, rx))?;
            }
        }
    }
    Ok(())
}

/// Reads a realization written by [`write_large_scale_csv`]. Every link of
/// `net` must appear exactly once, and dummy links must carry zero.
pub fn read_large_scale_csv<R: BufRead>(net: &Network, input: R) -> Result<LargeScaleRealization> {
    let mut hops: Vec<GainMatrix> = (0..net.n_hops())
        .map(|h| {
            let (r, c) = net.hop_shape(h);
            GainMatrix::zeros(r, c)
        })
        .collect();
    let mut seen: Vec<Vec<bool>> = hops.iter().map(|m| vec![false; m.data.len()]).collect();

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (idx == 0 && line.starts_with("hop")) {
            continue;
        }
        let bad = |message: String| Error::Config {
            line: lineno,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", fields.len())));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
        let (hop, tx, rx) = (index(fields[0])?, index(fields[1])?, index(fields[2])?);
        let att: f64 = fields[3]
            .parse()
            .map_err(|e| bad(format!("`{}`: {e}", fields[3])))?;
        let m = hops
            .get_mut(hop)
            .ok_or_else(|| Error::ShapeMismatch(format!("hop {hop} out of range")))?;
        if tx >= m.rows || rx >= m.cols {
            return Err(Error::ShapeMismatch(format!(
                "link ({tx},{rx}) outside hop {hop} of shape {}x{}",
                m.rows, m.cols
            )));
        }
        if !(att >= 0.0) || !att.is_finite() {
            return Err(bad(format!("attenuation must be finite and nonnegative, got {att}")));
        }
        if att != 0.0 && (net.tx_is_dummy(hop, tx) || net.rx_is_dummy(hop, rx)) {
            return Err(bad(format!("dummy link ({hop},{tx},{rx}) must have zero gain")));
        }
        let k = tx * m.cols + rx;
        if std::mem::replace(&mut seen[hop][k], true) {
            return Err(bad(format!("duplicate link ({hop},{tx},{rx})")));
        }
        m.data[k] = att;
    }
    if seen.iter().flatten().any(|s| !s) {
        return Err(Error::ShapeMismatch("realization is missing links".into()));
    }
    Ok(LargeScaleRealization { hops })
}
