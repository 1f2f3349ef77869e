//! Morphisms from finite weighted graphs into `U`.
//!
//! For a graph all of whose cycles reachable from a root `v` have sum at most
//! `-1`, every path `pi` of length `l` from `v` satisfies
//! `sum(pi) <= (t - l) / m` with `m = |V(G[v])|`. The least such `t` at each
//! vertex is the potential
//!
//! ```text
//! f(u) = sup over finite paths pi from u of  m * sum(pi) + |pi|
//! ```
//!
//! which is the least fixpoint of `f(u) = max(0, max_{u -w-> u'} f(u') + m*w + 1)`
//! (the empty path gives `f >= 0`). Labelling every `u` by `(m, f(u))` is a
//! morphism into `U`. [`check_morphism`] re-checks any labelling edge by edge
//! using nothing but the `U` edge predicate.

use std::collections::{BTreeMap, VecDeque};

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{ArenaError, WeightedGraph};
use crate::payoff::max_mean_cycle_from;
use crate::universal::{u_edge, UVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("level m must be at least 1")]
    ZeroLevel,
    #[error("potentials exceed the exact arithmetic range")]
    Overflow,
    #[error("vertex {0:?} has no label")]
    MissingLabel(String),
}

/// Value of a potential: finite, or above the divergence cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Potential {
    Finite(u64),
    Diverged,
}

impl Potential {
    pub fn finite(self) -> Option<u64> {
        match self {
            Potential::Finite(t) => Some(t),
            Potential::Diverged => None,
        }
    }
}

/// Claim that every path of length `l` from `root` has sum at most `(t - l) / m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeCertificate {
    pub root: String,
    pub m: u64,
    pub t: u64,
}

/// A labelling `u -> (m, labels[u])` of graph vertices by vertices of `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub m: u64,
    pub labels: BTreeMap<String, u64>,
}

/// A cycle with non-negative sum, proving no slope certificate exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCycle {
    /// Edge indices in path order.
    pub cycle: Vec<usize>,
    pub sum: i128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlopeOutcome {
    Certified(SlopeCertificate),
    Refuted(WitnessCycle),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismOutcome {
    Built(Morphism),
    Refuted(WitnessCycle),
}

impl MorphismOutcome {
    pub fn morphism(&self) -> Option<&Morphism> {
        match self {
            MorphismOutcome::Built(m) => Some(m),
            MorphismOutcome::Refuted(_) => None,
        }
    }
}

/// `|V| * (m * W + 1) + 1` with `W = max(1, max |w|)`; saturates at `u64::MAX`.
pub fn default_cap(g: &WeightedGraph, m: u64) -> u64 {
    let n = g.vertex_count() as u128;
    let adj = u128::from(m) * u128::from(g.weight_bound()) + 1;
    u64::try_from(n.saturating_mul(adj).saturating_add(1)).unwrap_or(u64::MAX)
}

/// Least-fixpoint potentials indexed by vertex position.
pub(crate) fn potentials_by_index(
    g: &WeightedGraph,
    m: u64,
    cap: u64,
) -> Result<Vec<Potential>, MorphismError> {
    if m == 0 {
        return Err(MorphismError::ZeroLevel);
    }
    let n = g.vertex_count();
    // n rounds can chain at most n^2 adjusted weights.
    let adj_bound = i128::from(m)
        .checked_mul(i128::from(g.weight_bound()))
        .and_then(|x| x.checked_add(1))
        .ok_or(MorphismError::Overflow)?;
    (n as i128)
        .checked_mul(n as i128)
        .and_then(|x| x.checked_mul(adj_bound))
        .ok_or(MorphismError::Overflow)?;

    let adjusted: Vec<i128> = g
        .edges()
        .iter()
        .map(|e| i128::from(m) * i128::from(e.weight) + 1)
        .collect();
    let lift = |f: &[i128], v: usize| {
        g.out_edges(v)
            .iter()
            .map(|&e| f[g.edge(e).dst] + adjusted[e])
            .fold(0, i128::max)
    };

    // Gauss-Seidel in sorted-id order; without positive adjusted cycles this
    // is exact after n rounds.
    let mut f = vec![0i128; n];
    for _ in 0..n {
        let mut changed = false;
        for v in 0..n {
            let next = lift(&f, v);
            if next > f[v] {
                f[v] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Every positive adjusted cycle keeps at least one vertex liftable, and
    // exactly the vertices reaching such a cycle have an infinite fixpoint.
    let mut diverged = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| lift(&f, v) > f[v]).collect();
    for &v in &queue {
        diverged[v] = true;
    }
    let mut preds = vec![Vec::new(); n];
    for e in g.edges() {
        preds[e.dst].push(e.src);
    }
    while let Some(v) = queue.pop_front() {
        for &u in &preds[v] {
            if !diverged[u] {
                diverged[u] = true;
                queue.push_back(u);
            }
        }
    }

    Ok((0..n)
        .map(|v| {
            if diverged[v] || f[v] > i128::from(cap) {
                Potential::Diverged
            } else {
                Potential::Finite(f[v] as u64)
            }
        })
        .collect())
}

/// Least fixpoint of `f(u) = max(0, max_{u -w-> u'} f(u') + m*w + 1)`;
/// values above `cap` (or infinite) are reported as [`Potential::Diverged`].
pub fn compute_potentials(
    g: &WeightedGraph,
    m: u64,
    cap: u64,
) -> Result<BTreeMap<String, Potential>, MorphismError> {
    let f = potentials_by_index(g, m, cap)?;
    Ok(f.into_iter()
        .enumerate()
        .map(|(v, p)| (g.id(v).to_owned(), p))
        .collect())
}

/// A cycle reachable from `root` with non-negative sum, if any exists.
fn nonnegative_cycle(g: &WeightedGraph, root: usize) -> Option<WitnessCycle> {
    let best = max_mean_cycle_from(g, root)?;
    if best.mean.is_negative() {
        return None;
    }
    let sum = best.edges.iter().map(|&e| i128::from(g.edge(e).weight)).sum();
    Some(WitnessCycle {
        cycle: best.edges,
        sum,
    })
}

/// Level and potentials on `G[root]`, or a refuting cycle (edge indices of `g`).
fn restricted_potentials(
    g: &WeightedGraph,
    root: &str,
) -> Result<Result<(WeightedGraph, u64, Vec<u64>), WitnessCycle>, MorphismError> {
    let r = g.require(root)?;
    if let Some(witness) = nonnegative_cycle(g, r) {
        return Ok(Err(witness));
    }
    let sub = g.reachable_restriction(root)?;
    // Every simple cycle C of G[root] has |C| <= m and sum <= -1, so
    // m * sum(C) + |C| <= 0 and the fixpoint is finite.
    let m = sub.vertex_count() as u64;
    let labels = potentials_by_index(&sub, m, default_cap(&sub, m))?
        .into_iter()
        .map(|p| p.finite().expect("no positive adjusted cycle below a negative root"))
        .collect();
    Ok(Ok((sub, m, labels)))
}

pub fn find_slope_certificate(
    g: &WeightedGraph,
    root: &str,
) -> Result<SlopeOutcome, MorphismError> {
    Ok(match restricted_potentials(g, root)? {
        Err(witness) => SlopeOutcome::Refuted(witness),
        Ok((sub, m, labels)) => {
            let r = sub.require(root)?;
            SlopeOutcome::Certified(SlopeCertificate {
                root: root.to_owned(),
                m,
                t: labels[r],
            })
        }
    })
}

/// The morphism `G[root] -> U` given by the minimal potentials.
pub fn build_morphism(g: &WeightedGraph, root: &str) -> Result<MorphismOutcome, MorphismError> {
    Ok(match restricted_potentials(g, root)? {
        Err(witness) => MorphismOutcome::Refuted(witness),
        Ok((sub, m, labels)) => MorphismOutcome::Built(Morphism {
            m,
            labels: labels
                .into_iter()
                .enumerate()
                .map(|(v, t)| (sub.id(v).to_owned(), t))
                .collect(),
        }),
    })
}

/// Edges `u -w-> u'` of `g` for which `(m, t_u) -w-> (m, t_u')` is not an edge of `U`.
/// Empty means `phi` is a morphism.
pub fn check_morphism(g: &WeightedGraph, phi: &Morphism) -> Result<Vec<usize>, MorphismError> {
    let mut labels = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let t = *phi
            .labels
            .get(&v.id)
            .ok_or_else(|| MorphismError::MissingLabel(v.id.clone()))?;
        labels.push(UVertex::new(phi.m, t).ok_or(MorphismError::ZeroLevel)?);
    }
    Ok(g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !u_edge(labels[e.src], e.weight, labels[e.dst]))
        .map(|(i, _)| i)
        .collect())
}
