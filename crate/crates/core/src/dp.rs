//! Max-min (bottleneck) dynamic programming over the relay trellis.
//!
//! `u(z, s)` is the best bottleneck value over all partial paths that end in
//! state `z` of relay stage `s`:
//!
//! ```text
//! u(z, 0) = g(0; src, z)
//! u(z, s) = max_{z'} min(g(s; z', z), u(z', s - 1))
//! ```
//!
//! and the optimum is `max_{z'} min(g(L-1; z', dst), u(z', L-2))`. `v(z, s)`
//! records the maximizing predecessor; ties go to the lowest index.

use std::io::Write;

use serde_json::json;

use crate::error::{Error, Result};
use crate::trellis::BranchWeightSource;

/// Forward-pass tables: `Z x (L-1)` values and predecessors plus the single
/// destination entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DpTables {
    states: usize,
    stages: usize,
    best: Vec<f64>,
    pred: Vec<usize>,
    final_value: f64,
    final_pred: usize,
    comparisons: u64,
}

impl DpTables {
    pub fn num_states(&self) -> usize {
        self.states
    }

    /// Relay stages covered by the tables (`L - 1`).
    pub fn num_stages(&self) -> usize {
        self.stages
    }

    /// `u(z, stage)`.
    pub fn value(&self, z: usize, stage: usize) -> f64 {
        self.best[stage * self.states + z]
    }

    /// `v(z, stage)`; always 0 for stage 0 where the only predecessor is the
    /// source layer.
    pub fn predecessor(&self, z: usize, stage: usize) -> usize {
        self.pred[stage * self.states + z]
    }

    pub fn final_value(&self) -> f64 {
        self.final_value
    }

    pub fn final_predecessor(&self) -> usize {
        self.final_pred
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    /// Number of stored values and predecessors, `2 + 2 Z (L-1)`.
    pub fn memory_elements(&self) -> usize {
        self.best.len() + self.pred.len() + 2
    }

    /// One JSON object per line: `{"stage", "state", "u", "v"}`. The
    /// destination entry is reported as stage `L-1`, state 0.
    pub fn write_trace<W: Write>(&self, mut out: W) -> Result<()> {
        for stage in 0..self.stages {
            for z in 0..self.states {
                let line = json!({
                    "stage": stage,
                    "state": z,
                    "u": self.value(z, stage),
                    "v": self.predecessor(z, stage),
                });
                writeln!(out, "{line}")?;
            }
        }
        let line = json!({
            "stage": self.stages,
            "state": 0,
            "u": self.final_value,
            "v": self.final_pred,
        });
        writeln!(out, "{line}")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    /// Selected state per relay stage (`L - 1` entries).
    pub path: Vec<usize>,
    /// Bottleneck value of `path`.
    pub value: f64,
    pub tables: DpTables,
}

/// Runs the forward recursion and backtracks the optimal state sequence.
pub fn dp_solve<W: BranchWeightSource>(weights: &W) -> Result<DpSolution> {
    let z_count = weights.num_states();
    let hops = weights.num_hops();
    if z_count == 0 {
        return Err(Error::EmptyStateSpace);
    }
    if hops < 2 {
        return Err(Error::TooFewHops(hops));
    }
    let stages = hops - 1;
    let mut best = vec![0.0; z_count * stages];
    let mut pred = vec![0usize; z_count * stages];
    let mut comparisons = 0u64;

    let mut row = vec![0.0; z_count];
    weights.row(0, 0, &mut best[..z_count]);

    for stage in 1..stages {
        let (done, rest) = best.split_at_mut(stage * z_count);
        let prev = &done[(stage - 1) * z_count..];
        let cur = &mut rest[..z_count];
        let cur_pred = &mut pred[stage * z_count..(stage + 1) * z_count];
        weights.row(stage, 0, &mut row);
        for (c, &w) in cur.iter_mut().zip(&row) {
            *c = w.min(prev[0]);
        }
        cur_pred.fill(0);
        for (from, &u) in prev.iter().enumerate().skip(1) {
            weights.row(stage, from, &mut row);
            for to in 0..z_count {
                let candidate = row[to].min(u);
                if candidate > cur[to] {
                    cur[to] = candidate;
                    cur_pred[to] = from;
                }
            }
        }
        comparisons += (z_count * z_count) as u64;
    }

    let prev = &best[(stages - 1) * z_count..];
    let (final_value, final_pred) = best_predecessor(prev, |from| weights.weight(hops - 1, from, 0));
    comparisons += z_count as u64;

    let tables = DpTables {
        states: z_count,
        stages,
        best,
        pred,
        final_value,
        final_pred,
        comparisons,
    };
    let path = backtrack(&tables);
    Ok(DpSolution {
        path,
        value: final_value,
        tables,
    })
}

#[inline]
fn best_predecessor(prev: &[f64], weight: impl Fn(usize) -> f64) -> (f64, usize) {
    let mut value = weight(0).min(prev[0]);
    let mut arg = 0;
    for (from, &u) in prev.iter().enumerate().skip(1) {
        let candidate = weight(from).min(u);
        if candidate > value {
            value = candidate;
            arg = from;
        }
    }
    (value, arg)
}

/// Walks the predecessor table from the destination back to relay stage 0.
pub fn backtrack(tables: &DpTables) -> Vec<usize> {
    let mut path = vec![0; tables.stages];
    let mut z = tables.final_pred;
    for stage in (0..tables.stages).rev() {
        path[stage] = z;
        z = tables.predecessor(z, stage);
    }
    path
}

/// Comparisons made by [`dp_solve`] on a trellis with `states` states and
/// `hops` hops: `Z + Z^2 (L - 2)`.
pub fn count_comparisons(states: u64, hops: u64) -> u64 {
    assert!(hops >= 2, "a trellis needs at least 2 hops");
    states + states * states * (hops - 2)
}

/// Bottleneck value of a given state sequence.
pub fn path_value<W: BranchWeightSource>(weights: &W, path: &[usize]) -> f64 {
    let hops = weights.num_hops();
    debug_assert_eq!(path.len() + 1, hops);
    let mut value = weights.weight(0, 0, path[0]);
    for hop in 1..hops - 1 {
        value = value.min(weights.weight(hop, path[hop - 1], path[hop]));
    }
    value.min(weights.weight(hops - 1, path[hops - 2], 0))
}
