//! Reference and comparison selectors.
//!
//! * [`exhaustive_search`] enumerates every trellis path; it is the oracle
//!   the dynamic program is checked against.
//! * [`greedy_select`] lets each pair in turn take its best bottleneck path
//!   through the relays the earlier pairs left free.
//! * [`hop_by_hop_greedy`] assigns relays stage by stage, each pair taking
//!   the free relay with the strongest incoming link.
//! * [`decentralized_rs`] picks the best state of each stage on its own and
//!   decides the final relay stage over the last two hops jointly. It
//!   follows a one-sentence description of a published decentralized scheme
//!   and is reported as "DRS-like".
//!
//! The greedy schemes plan with interference-free SNRs; every scheme's
//! result is re-evaluated under the configured interference model.

use crate::channel::ChannelRealization;
use crate::dp::dp_solve;
use crate::error::{Error, Result};
use crate::selection::{RelayAssignment, Selector};
use crate::trellis::{branch_weight, BranchWeightSource};

/// Result of [`exhaustive_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub path: Vec<usize>,
    pub value: f64,
    /// Number of complete paths evaluated, `Z^(L-1)`.
    pub paths: u128,
}

/// Evaluates all `Z^(L-1)` state sequences and keeps the lexicographically
/// smallest one with the largest bottleneck.
pub fn exhaustive_search<W: BranchWeightSource>(weights: &W, budget: u128) -> Result<ExhaustiveResult> {
    let z = weights.num_states();
    let hops = weights.num_hops();
    if z == 0 {
        return Err(Error::EmptyStateSpace);
    }
    if hops < 2 {
        return Err(Error::TooFewHops(hops));
    }
    let stages = hops - 1;
    let paths = (z as u128)
        .checked_pow(stages as u32)
        .filter(|&p| p <= budget)
        .ok_or(Error::BudgetExceeded {
            paths: (z as u128).saturating_pow(stages as u32),
            budget,
        })?;

    let mut search = Search {
        weights,
        z,
        stages,
        current: vec![0; stages],
        best_path: vec![0; stages],
        best_value: f64::NEG_INFINITY,
        found: false,
    };
    search.descend(0, f64::INFINITY);
    Ok(ExhaustiveResult {
        path: search.best_path,
        value: search.best_value,
        paths,
    })
}

struct Search<'a, W> {
    weights: &'a W,
    z: usize,
    stages: usize,
    current: Vec<usize>,
    best_path: Vec<usize>,
    best_value: f64,
    found: bool,
}

impl<W: BranchWeightSource> Search<'_, W> {
    fn descend(&mut self, stage: usize, prefix: f64) {
        for state in 0..self.z {
            let w = if stage == 0 {
                self.weights.weight(0, 0, state)
            } else {
                self.weights.weight(stage, self.current[stage - 1], state)
            };
            let value = prefix.min(w);
            self.current[stage] = state;
            if stage + 1 == self.stages {
                let total = value.min(self.weights.weight(self.stages, state, 0));
                if !self.found || total > self.best_value {
                    self.found = true;
                    self.best_value = total;
                    self.best_path.copy_from_slice(&self.current);
                }
            } else {
                self.descend(stage + 1, value);
            }
        }
    }
}

/// Single-pair bottleneck trellis over the `M` relays of each stage.
/// Relays that are dummies or already claimed get weight `-inf`.
struct SinglePairWeights<'a> {
    selector: &'a Selector,
    channel: &'a ChannelRealization,
    user: usize,
    blocked: &'a [Vec<bool>],
}

impl BranchWeightSource for SinglePairWeights<'_> {
    fn num_states(&self) -> usize {
        self.selector.network().relays()
    }

    fn num_hops(&self) -> usize {
        self.channel.hops.len()
    }

    fn weight(&self, hop: usize, from: usize, to: usize) -> f64 {
        let last = hop + 1 == self.channel.hops.len();
        let tx = if hop == 0 {
            self.user
        } else if self.blocked[hop - 1][from] {
            return f64::NEG_INFINITY;
        } else {
            from
        };
        let rx = if last {
            self.user
        } else if self.blocked[hop][to] {
            return f64::NEG_INFINITY;
        } else {
            to
        };
        self.selector
            .model()
            .link_snr(&self.channel.hops[hop], tx, rx, self.user)
    }
}

fn dummy_mask(selector: &Selector) -> Vec<Vec<bool>> {
    let net = selector.network();
    (0..net.relay_stages()).map(|s| net.dummy_mask(s).to_vec()).collect()
}

/// Pairs take turns (in the selector's user order); each runs the
/// single-pair bottleneck dynamic program over the relays still free and
/// claims its path.
pub fn greedy_select(selector: &Selector, channel: &ChannelRealization) -> Result<RelayAssignment> {
    let net = selector.network();
    let stages = net.relay_stages();
    let mut blocked = dummy_mask(selector);
    let mut relays = vec![vec![usize::MAX; net.n_pairs()]; stages];
    let mut comparisons = 0;

    for &user in selector.user_order() {
        let weights = SinglePairWeights {
            selector,
            channel,
            user,
            blocked: &blocked,
        };
        let sol = dp_solve(&weights)?;
        comparisons += sol.tables.comparisons();
        for (stage, &relay) in sol.path.iter().enumerate() {
            if blocked[stage][relay] {
                return Err(Error::InfeasibleResidual { stage, user });
            }
        }
        for (stage, &relay) in sol.path.iter().enumerate() {
            blocked[stage][relay] = true;
            relays[stage][user] = relay;
        }
    }
    Ok(selector.assignment_from_relays(channel, relays, comparisons))
}

/// Stage by stage, each pair (in user order) takes the free relay with the
/// strongest link from the node currently holding its signal.
pub fn hop_by_hop_greedy(selector: &Selector, channel: &ChannelRealization) -> Result<RelayAssignment> {
    let net = selector.network();
    let model = selector.model();
    let stages = net.relay_stages();
    let mut relays = vec![vec![usize::MAX; net.n_pairs()]; stages];
    let mut comparisons = 0u64;

    for stage in 0..stages {
        let gains = &channel.hops[stage];
        let mut taken = net.dummy_mask(stage).to_vec();
        for &user in selector.user_order() {
            let from = if stage == 0 { user } else { relays[stage - 1][user] };
            let mut best: Option<(usize, f64)> = None;
            for (relay, _) in taken.iter().enumerate().filter(|(_, &t)| !t) {
                let snr = model.link_snr(gains, from, relay, user);
                comparisons += 1;
                if best.is_none_or(|(_, b)| snr > b) {
                    best = Some((relay, snr));
                }
            }
            let (relay, _) = best.ok_or(Error::InfeasibleResidual { stage, user })?;
            taken[relay] = true;
            relays[stage][user] = relay;
        }
    }
    Ok(selector.assignment_from_relays(channel, relays, comparisons))
}

/// Per-hop max-min selection with the last two hops decided jointly.
///
/// Stages `0..L-2` each take the dummy-free state that maximizes the hop's
/// bottleneck SINR given the previous stage. The last relay stage maximizes
/// the smaller of its incoming and outgoing bottlenecks. Ties go to the
/// lowest state index.
pub fn decentralized_rs(selector: &Selector, channel: &ChannelRealization) -> Result<RelayAssignment> {
    let net = selector.network();
    let model = selector.model();
    let stages = net.relay_stages();
    let hops = net.n_hops();
    let boundary: Vec<usize> = (0..net.n_pairs()).collect();
    let mut relays: Vec<Vec<usize>> = Vec::with_capacity(stages);
    let mut comparisons = 0u64;

    for stage in 0..stages {
        let space = selector.stage_space(stage);
        let tx = if stage == 0 { &boundary } else { &relays[stage - 1] };
        let last = stage + 1 == stages;
        let mut best: Option<(usize, f64)> = None;
        for (z, state) in space.iter().enumerate() {
            let mut w = branch_weight(&channel.hops[stage], tx, state, model);
            if last {
                w = w.min(branch_weight(&channel.hops[hops - 1], state, &boundary, model));
            }
            comparisons += 1;
            if best.is_none_or(|(_, b)| w > b) {
                best = Some((z, w));
            }
        }
        let (z, _) = best.ok_or(Error::EmptyStateSpace)?;
        relays.push(space.state(z).to_vec());
    }
    Ok(selector.assignment_from_relays(channel, relays, comparisons))
}
