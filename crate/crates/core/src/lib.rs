//! Optimal relay selection for multi-user, multi-hop decode-and-forward relay
//! networks.
//!
//! Every stage of relays is aggregated into trellis states, one per ordered
//! injective assignment of the source/destination pairs to relays. Branch
//! weights are the bottleneck normalized SINR of the links a branch
//! activates, and a max-min dynamic program over the trellis finds the
//! assignment that maximizes the worst pair's end-to-end SINR, which is the
//! assignment that minimizes network outage. The cost is linear in the
//! number of hops.
//!
//! ```
//! use relay_dp::prelude::*;
//!
//! let config = NetworkConfig::new(2, 3, 4, 2.0);
//! let net = Network::new(&config).unwrap();
//! let selector = Selector::new(&net, SelectOptions::default()).unwrap();
//! let large = sample_large_scale(&net, 7);
//! let channel = sample_small_scale(&large, 7, 0);
//!
//! let best = selector.select(Scheme::Optimal, &channel).unwrap();
//! let oracle = selector.select(Scheme::Exhaustive, &channel).unwrap();
//! assert_eq!(best.value, oracle.value);
//! ```

pub mod baselines;
pub mod channel;
pub mod dp;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod selection;
pub mod topology;
pub mod trellis;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::channel::{sample_large_scale, sample_small_scale, ChannelRealization, LargeScaleRealization};
    pub use crate::dp::{count_comparisons, dp_solve};
    pub use crate::montecarlo::{estimate_outage, is_outage, OutageEstimate, SimOptions, Simulation};
    pub use crate::selection::{RelayAssignment, Scheme, SelectOptions, Selector};
    pub use crate::topology::{Network, NetworkConfig};
    pub use crate::trellis::{build_branch_weights, enumerate_states, BranchWeights, StateSpace};
    pub use crate::{Error, Result};
}
