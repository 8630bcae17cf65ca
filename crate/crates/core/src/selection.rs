//! Common selector interface: every scheme maps one channel realization to a
//! [`RelayAssignment`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::channel::{ChannelRealization, SinrModel};
use crate::dp::dp_solve;
use crate::error::{Error, Result};
use crate::topology::Network;
use crate::trellis::{enumerate_states, ChannelWeights, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Optimal,
    Exhaustive,
    Greedy,
    HopGreedy,
    Drs,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Optimal,
        Scheme::Exhaustive,
        Scheme::Greedy,
        Scheme::HopGreedy,
        Scheme::Drs,
    ];

    /// The optimal selector and the three suboptimal baselines.
    pub const COMPARISON: [Scheme; 4] = [Scheme::Optimal, Scheme::Drs, Scheme::Greedy, Scheme::HopGreedy];

    /// Name accepted on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::Exhaustive => "exhaustive",
            Scheme::Greedy => "greedy",
            Scheme::HopGreedy => "hop-greedy",
            Scheme::Drs => "drs",
        }
    }

    /// Name used in reports. The decentralized scheme is a reconstruction
    /// and is labelled as such.
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Drs => "DRS-like",
            other => other.name(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name() == lower || sch.label().eq_ignore_ascii_case(&lower))
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// Relays chosen by a selector, with the SINRs they achieve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelayAssignment {
    /// `relays[s][i]` is the relay of stage `s` serving pair `i`.
    pub relays: Vec<Vec<usize>>,
    /// Index of each stage's assignment in the padded state space.
    pub states: Vec<usize>,
    /// Smallest normalized end-to-end SINR over all pairs.
    pub value: f64,
    /// Normalized end-to-end SINR per pair (bottleneck over hops).
    pub per_user_sinr: Vec<f64>,
    /// Candidate comparisons made by the selector.
    pub comparisons: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectOptions {
    /// Largest number of trellis paths exhaustive search may visit.
    pub exhaustive_budget: u128,
    /// Processing order for the greedy schemes; ascending when `None`.
    pub user_order: Option<Vec<usize>>,
}

pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 100_000_000;

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions {
            exhaustive_budget: DEFAULT_EXHAUSTIVE_BUDGET,
            user_order: None,
        }
    }
}

/// Per-network state shared by all selectors: the padded trellis state space
/// and the dummy-free state space of every stage.
#[derive(Debug, Clone)]
pub struct Selector {
    net: Network,
    model: SinrModel,
    space: StateSpace,
    stage_spaces: Vec<StateSpace>,
    stage_space_of: Vec<usize>,
    user_order: Vec<usize>,
    options: SelectOptions,
}

impl Selector {
    pub fn new(net: &Network, options: SelectOptions) -> Result<Self> {
        let n = net.n_pairs();
        let space = enumerate_states(n, net.relays(), &[])?;

        let mut stage_spaces: Vec<StateSpace> = Vec::new();
        let mut masks: Vec<&[bool]> = Vec::new();
        let mut stage_space_of = Vec::with_capacity(net.relay_stages());
        for stage in 0..net.relay_stages() {
            let mask = net.dummy_mask(stage);
            let k = match masks.iter().position(|m| *m == mask) {
                Some(k) => k,
                None => {
                    let s = enumerate_states(n, net.relays(), mask).map_err(|e| match e {
                        Error::TooFewRelays { relays, pairs, .. } => Error::TooFewRelays { stage, relays, pairs },
                        e => e,
                    })?;
                    stage_spaces.push(s);
                    masks.push(mask);
                    stage_spaces.len() - 1
                }
            };
            stage_space_of.push(k);
        }

        let user_order = match &options.user_order {
            Some(order) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != (0..n).collect::<Vec<_>>() {
                    return Err(Error::Invalid(format!(
                        "user order {order:?} is not a permutation of 0..{n}"
                    )));
                }
                order.clone()
            }
            None => (0..n).collect(),
        };

        Ok(Selector {
            net: net.clone(),
            model: SinrModel::new(net),
            space,
            stage_spaces,
            stage_space_of,
            user_order,
            options,
        })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn model(&self) -> &SinrModel {
        &self.model
    }

    /// Padded state space used by the trellis.
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// States of `stage` that avoid dummy relays.
    pub fn stage_space(&self, stage: usize) -> &StateSpace {
        &self.stage_spaces[self.stage_space_of[stage]]
    }

    pub fn user_order(&self) -> &[usize] {
        &self.user_order
    }

    pub fn options(&self) -> &SelectOptions {
        &self.options
    }

    pub fn select(&self, scheme: Scheme, channel: &ChannelRealization) -> Result<RelayAssignment> {
        match scheme {
            Scheme::Optimal => self.optimal(channel),
            Scheme::Exhaustive => self.exhaustive(channel),
            Scheme::Greedy => baselines::greedy_select(self, channel),
            Scheme::HopGreedy => baselines::hop_by_hop_greedy(self, channel),
            Scheme::Drs => baselines::decentralized_rs(self, channel),
        }
    }

    /// Trellis dynamic program over lazily evaluated branch weights.
    pub fn optimal(&self, channel: &ChannelRealization) -> Result<RelayAssignment> {
        let weights = ChannelWeights::new(channel, &self.space, &self.net)?;
        let sol = dp_solve(&weights)?;
        let relays: Vec<Vec<usize>> = sol.path.iter().map(|&z| self.space.state(z).to_vec()).collect();
        let per_user_sinr = self.per_user_sinr(channel, &relays);
        Ok(RelayAssignment {
            relays,
            states: sol.path,
            value: sol.value,
            per_user_sinr,
            comparisons: sol.tables.comparisons(),
        })
    }

    pub fn exhaustive(&self, channel: &ChannelRealization) -> Result<RelayAssignment> {
        let weights = ChannelWeights::new(channel, &self.space, &self.net)?;
        let found = baselines::exhaustive_search(&weights, self.options.exhaustive_budget)?;
        let relays: Vec<Vec<usize>> = found.path.iter().map(|&z| self.space.state(z).to_vec()).collect();
        let per_user_sinr = self.per_user_sinr(channel, &relays);
        Ok(RelayAssignment {
            relays,
            states: found.path,
            value: found.value,
            per_user_sinr,
            comparisons: found.paths as u64,
        })
    }

    /// Normalized end-to-end SINR of every pair for the given relays.
    pub fn per_user_sinr(&self, channel: &ChannelRealization, relays: &[Vec<usize>]) -> Vec<f64> {
        let n = self.net.n_pairs();
        let hops = self.net.n_hops();
        let boundary: Vec<usize> = (0..n).collect();
        let mut per_user = vec![f64::INFINITY; n];
        for hop in 0..hops {
            let tx = if hop == 0 { &boundary } else { &relays[hop - 1] };
            let rx = if hop + 1 == hops { &boundary } else { &relays[hop] };
            for (i, best) in per_user.iter_mut().enumerate() {
                *best = best.min(self.model.user_sinr(&channel.hops[hop], tx, rx[i], i));
            }
        }
        per_user
    }

    /// Builds an assignment from explicit relays, re-evaluating its SINRs
    /// under the configured interference model.
    pub fn assignment_from_relays(
        &self,
        channel: &ChannelRealization,
        relays: Vec<Vec<usize>>,
        comparisons: u64,
    ) -> RelayAssignment {
        let per_user_sinr = self.per_user_sinr(channel, &relays);
        let value = per_user_sinr.iter().copied().fold(f64::INFINITY, f64::min);
        let states = relays
            .iter()
            .map(|r| self.space.index_of(r).expect("selector produced a non-injective stage"))
            .collect();
        RelayAssignment {
            relays,
            states,
            value,
            per_user_sinr,
            comparisons,
        }
    }
}
