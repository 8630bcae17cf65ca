//! Aggregated relay-combination trellis.
//!
//! A state of a relay stage is an ordered, injective assignment of the `N`
//! pairs to relays: state `z` sends pair `i` through relay `state(z)[i]`.
//! There are `Z = M (M-1) ... (M-N+1)` states per stage. The trellis has one
//! branch stage per hop: hop 0 connects the fixed source layer to relay stage
//! 0, hop `h` connects relay stage `h-1` to relay stage `h`, and the last hop
//! connects the final relay stage to the destinations.
//!
//! The weight of a branch is the smallest normalized SINR among the `N`
//! links it activates. Because the interference seen in hop `h` depends only
//! on the two states it joins, the weight is a function of `(from, to, hop)`
//! alone, which is what makes a Viterbi-style recursion exact.

use std::io::Write;

use crate::channel::{ChannelRealization, GainMatrix, SinrModel};
use crate::error::{Error, Result};
use crate::topology::Network;

/// All ordered injective assignments of `n_pairs` users to relays, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    n_pairs: usize,
    relays: usize,
    states: Vec<usize>,
}

/// `Z = prod_{i<n} (m - i)`, or 0 when `m < n`.
pub fn state_count(n_pairs: usize, relays: usize) -> u128 {
    if relays < n_pairs {
        return 0;
    }
    (0..n_pairs).map(|i| (relays - i) as u128).product()
}

/// Enumerates every assignment that avoids the relays flagged in
/// `dummy_mask` (an empty mask means no dummies).
pub fn enumerate_states(n_pairs: usize, relays: usize, dummy_mask: &[bool]) -> Result<StateSpace> {
    if n_pairs == 0 {
        return Err(Error::NonPositiveParameter {
            name: "n_pairs",
            value: 0.0,
        });
    }
    if !dummy_mask.is_empty() && dummy_mask.len() != relays {
        return Err(Error::ShapeMismatch(format!(
            "dummy mask has {} entries for {relays} relays",
            dummy_mask.len()
        )));
    }
    let usable: Vec<usize> = (0..relays)
        .filter(|&r| !dummy_mask.get(r).copied().unwrap_or(false))
        .collect();
    if usable.len() < n_pairs {
        return Err(Error::TooFewRelays {
            stage: 0,
            relays: usable.len(),
            pairs: n_pairs,
        });
    }

    let count = state_count(n_pairs, usable.len()) as usize;
    let mut states = Vec::with_capacity(count * n_pairs);
    let mut current = Vec::with_capacity(n_pairs);
    let mut used = vec![false; usable.len()];
    extend(&usable, n_pairs, &mut current, &mut used, &mut states);
    debug_assert_eq!(states.len(), count * n_pairs);

    Ok(StateSpace {
        n_pairs,
        relays,
        states,
    })
}

fn extend(
    usable: &[usize],
    depth: usize,
    current: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<usize>,
) {
    if current.len() == depth {
        out.extend_from_slice(current);
        return;
    }
    for k in 0..usable.len() {
        if used[k] {
            continue;
        }
        used[k] = true;
        current.push(usable[k]);
        extend(usable, depth, current, used, out);
        current.pop();
        used[k] = false;
    }
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len() / self.n_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    #[inline]
    pub fn state(&self, z: usize) -> &[usize] {
        &self.states[z * self.n_pairs..(z + 1) * self.n_pairs]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.states.chunks_exact(self.n_pairs)
    }

    /// Position of `assignment`, found by binary search over the sorted
    /// enumeration.
    pub fn index_of(&self, assignment: &[usize]) -> Option<usize> {
        if assignment.len() != self.n_pairs {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.state(mid).cmp(assignment) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// Anything that can report branch weights of an `L`-hop trellis with `Z`
/// states per relay stage.
///
/// `weight(0, 0, z)` is the branch from the source layer into state `z`,
/// `weight(h, from, to)` for `0 < h < L-1` joins two relay stages, and
/// `weight(L-1, from, 0)` leads into the destination layer.
pub trait BranchWeightSource {
    fn num_states(&self) -> usize;
    fn num_hops(&self) -> usize;
    fn weight(&self, hop: usize, from: usize, to: usize) -> f64;

    /// Writes `weight(hop, from, to)` for every `to` into `out`.
    fn row(&self, hop: usize, from: usize, out: &mut [f64]) {
        for (to, w) in out.iter_mut().enumerate() {
            *w = self.weight(hop, from, to);
        }
    }
}

/// Fully materialized branch weights: a `1 x Z` row, `L-2` row-major `Z x Z`
/// matrices and a `Z x 1` column.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchWeights {
    states: usize,
    first: Vec<f64>,
    interior: Vec<Vec<f64>>,
    last: Vec<f64>,
}

impl BranchWeights {
    pub fn new(states: usize, first: Vec<f64>, interior: Vec<Vec<f64>>, last: Vec<f64>) -> Result<Self> {
        if states == 0 {
            return Err(Error::EmptyStateSpace);
        }
        if first.len() != states || last.len() != states {
            return Err(Error::ShapeMismatch(format!(
                "boundary weights have {} and {} entries for {states} states",
                first.len(),
                last.len()
            )));
        }
        if let Some(bad) = interior.iter().position(|m| m.len() != states * states) {
            return Err(Error::ShapeMismatch(format!(
                "interior stage {} has {} entries, expected {}",
                bad + 1,
                interior[bad].len(),
                states * states
            )));
        }
        Ok(BranchWeights {
            states,
            first,
            interior,
            last,
        })
    }

    /// Evaluates every branch of `source`.
    pub fn materialize<W: BranchWeightSource>(source: &W) -> Result<Self> {
        let z = source.num_states();
        let hops = source.num_hops();
        if hops < 2 {
            return Err(Error::TooFewHops(hops));
        }
        let first = (0..z).map(|to| source.weight(0, 0, to)).collect();
        let interior = (1..hops - 1)
            .map(|h| {
                let mut m = Vec::with_capacity(z * z);
                for from in 0..z {
                    m.extend((0..z).map(|to| source.weight(h, from, to)));
                }
                m
            })
            .collect();
        let last = (0..z).map(|from| source.weight(hops - 1, from, 0)).collect();
        BranchWeights::new(z, first, interior, last)
    }

    /// Sizes of the per-hop weight blocks as `(rows, cols)`.
    pub fn stage_shapes(&self) -> Vec<(usize, usize)> {
        let z = self.states;
        std::iter::once((1, z))
            .chain(self.interior.iter().map(|_| (z, z)))
            .chain(std::iter::once((z, 1)))
            .collect()
    }

    /// Writes the weights of one hop as `from,to,weight` rows.
    pub fn write_stage_csv<W: Write>(&self, hop: usize, mut out: W) -> Result<()> {
        let (rows, cols) = *self
            .stage_shapes()
            .get(hop)
            .ok_or_else(|| Error::ShapeMismatch(format!("hop {hop} out of range")))?;
        writeln!(out, "from,to,weight")?;
        for from in 0..rows {
            for to in 0..cols {
                writeln!(out, "{from},{to},{}", self.weight(hop, from, to))?;
            }
        }
        Ok(())
    }
}

impl BranchWeightSource for BranchWeights {
    fn num_states(&self) -> usize {
        self.states
    }

    fn num_hops(&self) -> usize {
        self.interior.len() + 2
    }

    #[inline]
    fn weight(&self, hop: usize, from: usize, to: usize) -> f64 {
        if hop == 0 {
            self.first[to]
        } else if hop == self.interior.len() + 1 {
            self.last[from]
        } else {
            self.interior[hop - 1][from * self.states + to]
        }
    }

    fn row(&self, hop: usize, from: usize, out: &mut [f64]) {
        if hop == 0 {
            out.copy_from_slice(&self.first);
        } else if hop == self.interior.len() + 1 {
            out[0] = self.last[from];
        } else {
            let z = self.states;
            out.copy_from_slice(&self.interior[hop - 1][from * z..(from + 1) * z]);
        }
    }
}

/// Minimum normalized SINR over the `N` links that carry pair `i` from
/// `tx[i]` to `rx[i]`.
pub fn branch_weight(gains: &GainMatrix, tx: &[usize], rx: &[usize], model: &SinrModel) -> f64 {
    (0..tx.len())
        .map(|i| model.user_sinr(gains, tx, rx[i], i))
        .fold(f64::INFINITY, f64::min)
}

/// Branch weights computed on demand from a channel realization.
///
/// With interference disabled the per-link normalized SNRs are tabulated
/// once, so a weight costs `N` lookups.
pub struct ChannelWeights<'a> {
    space: &'a StateSpace,
    channel: &'a ChannelRealization,
    model: SinrModel,
    boundary: Vec<usize>,
    /// `snr[hop][user]`, row-major over `(tx, rx)`, when interference is off.
    snr: Option<Vec<Vec<Vec<f64>>>>,
    /// `gathered[hop - 1][user][relay * Z + to]` is the SNR of `user` from
    /// `relay` into its relay in state `to`, for interior hops when
    /// interference is off.
    gathered: Vec<Vec<Vec<f64>>>,
}

impl<'a> ChannelWeights<'a> {
    pub fn new(channel: &'a ChannelRealization, space: &'a StateSpace, net: &Network) -> Result<Self> {
        check_shapes(channel, space, net)?;
        let model = SinrModel::new(net);
        let n = net.n_pairs();
        let snr: Option<Vec<Vec<Vec<f64>>>> = (!model.interference).then(|| {
            channel
                .hops
                .iter()
                .map(|g| {
                    (0..n)
                        .map(|user| {
                            let mut t = Vec::with_capacity(g.rows() * g.cols());
                            for tx in 0..g.rows() {
                                t.extend((0..g.cols()).map(|rx| model.link_snr(g, tx, rx, user)));
                            }
                            t
                        })
                        .collect()
                })
                .collect()
        });
        let gathered = match &snr {
            Some(tables) => gather_interior(tables, channel, space),
            None => Vec::new(),
        };
        Ok(ChannelWeights {
            space,
            channel,
            model,
            boundary: (0..n).collect(),
            snr,
            gathered,
        })
    }

    fn endpoints(&self, hop: usize, from: usize, to: usize) -> (&[usize], &[usize]) {
        let tx = if hop == 0 { &self.boundary[..] } else { self.space.state(from) };
        let rx = if hop + 1 == self.channel.hops.len() {
            &self.boundary[..]
        } else {
            self.space.state(to)
        };
        (tx, rx)
    }
}

impl BranchWeightSource for ChannelWeights<'_> {
    fn num_states(&self) -> usize {
        self.space.len()
    }

    fn num_hops(&self) -> usize {
        self.channel.hops.len()
    }

    #[inline]
    fn weight(&self, hop: usize, from: usize, to: usize) -> f64 {
        let (tx, rx) = self.endpoints(hop, from, to);
        match &self.snr {
            Some(tables) => {
                let cols = self.channel.hops[hop].cols();
                let per_user = &tables[hop];
                let mut w = f64::INFINITY;
                for i in 0..tx.len() {
                    w = w.min(per_user[i][tx[i] * cols + rx[i]]);
                }
                w
            }
            None => branch_weight(&self.channel.hops[hop], tx, rx, &self.model),
        }
    }

    fn row(&self, hop: usize, from: usize, out: &mut [f64]) {
        let hops = self.channel.hops.len();
        if hop == 0 || hop + 1 == hops {
            for (to, w) in out.iter_mut().enumerate() {
                *w = self.weight(hop, from, to);
            }
            return;
        }
        let z = self.space.len();
        let tx = self.space.state(from);
        if !self.gathered.is_empty() {
            let per_user = &self.gathered[hop - 1];
            out.copy_from_slice(&per_user[0][tx[0] * z..(tx[0] + 1) * z]);
            for (i, &r) in tx.iter().enumerate().skip(1) {
                for (w, &s) in out.iter_mut().zip(&per_user[i][r * z..(r + 1) * z]) {
                    *w = w.min(s);
                }
            }
            return;
        }
        // SINR of every user at every candidate receiver, then gather per state
        let gains = &self.channel.hops[hop];
        let m = gains.cols();
        let sinr: Vec<f64> = (0..tx.len())
            .flat_map(|i| (0..m).map(move |r| (i, r)))
            .map(|(i, r)| self.model.user_sinr(gains, tx, r, i))
            .collect();
        for (to, w) in out.iter_mut().enumerate() {
            let rx = self.space.state(to);
            let mut v = f64::INFINITY;
            for (i, &r) in rx.iter().enumerate() {
                v = v.min(sinr[i * m + r]);
            }
            *w = v;
        }
    }
}

fn gather_interior(tables: &[Vec<Vec<f64>>], channel: &ChannelRealization, space: &StateSpace) -> Vec<Vec<Vec<f64>>> {
    let z = space.len();
    let hops = channel.hops.len();
    (1..hops.saturating_sub(1))
        .map(|hop| {
            let g = &channel.hops[hop];
            let cols = g.cols();
            tables[hop]
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let mut c = Vec::with_capacity(g.rows() * z);
                    for relay in 0..g.rows() {
                        let row = &t[relay * cols..(relay + 1) * cols];
                        c.extend(space.iter().map(|s| row[s[i]]));
                    }
                    c
                })
                .collect()
        })
        .collect()
}

fn check_shapes(channel: &ChannelRealization, space: &StateSpace, net: &Network) -> Result<()> {
    if channel.hops.len() != net.n_hops() {
        return Err(Error::ShapeMismatch(format!(
            "realization has {} hops, network has {}",
            channel.hops.len(),
            net.n_hops()
        )));
    }
    for (hop, g) in channel.hops.iter().enumerate() {
        if (g.rows(), g.cols()) != net.hop_shape(hop) {
            return Err(Error::ShapeMismatch(format!(
                "hop {hop} gains are {}x{}, expected {:?}",
                g.rows(),
                g.cols(),
                net.hop_shape(hop)
            )));
        }
    }
    if space.n_pairs() != net.n_pairs() || space.relays() != net.relays() {
        return Err(Error::ShapeMismatch(format!(
            "state space is for N={}, M={}; network has N={}, M={}",
            space.n_pairs(),
            space.relays(),
            net.n_pairs(),
            net.relays()
        )));
    }
    Ok(())
}

/// Materializes the full branch-weight tensor of one realization.
pub fn build_branch_weights(
    channel: &ChannelRealization,
    space: &StateSpace,
    net: &Network,
) -> Result<BranchWeights> {
    BranchWeights::materialize(&ChannelWeights::new(channel, space, net)?)
}
