//! Ground truth for small arenas by enumerating positional strategies.
//!
//! Finite mean-payoff games are positionally determined, so Eve wins from `v`
//! iff some positional strategy `σ` makes every cycle reachable from `v` in the
//! `σ`-restricted arena (Adam keeps all his edges) have negative mean.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use thiserror::Error;

use crate::arena::{Arena, Owner};
use crate::payoff::{karp, Variant};

/// Upper bound on the number of strategies [`oracle_winning_set`] will try.
pub const STRATEGY_GUARD: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} positional strategies exceed the enumeration guard of {guard}")]
    GuardExceeded { count: u128, guard: u128 },
}

/// Eve vertex id -> chosen edge index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PositionalStrategy(pub BTreeMap<String, usize>);

/// Number of positional strategies for `owner` (saturating).
pub fn strategy_count(a: &Arena, owner: Owner) -> u128 {
    (0..a.vertex_count())
        .filter(|&v| a.owner(v) == owner)
        .map(|v| a.out_edges(v).len() as u128)
        .fold(1u128, |acc, d| acc.saturating_mul(d))
}

/// Odometer over the choices of every `owner` vertex; the first vertex (in id
/// order) is the most significant digit. Yields, per vertex position, the
/// chosen edge index (`None` for the other player's vertices).
struct Choices<'a> {
    arena: &'a Arena,
    players: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl<'a> Choices<'a> {
    fn new(arena: &'a Arena, owner: Owner) -> Self {
        let players: Vec<usize> = (0..arena.vertex_count())
            .filter(|&v| arena.owner(v) == owner)
            .collect();
        let digits = vec![0; players.len()];
        Choices { arena, players, digits, done: false }
    }
}

impl Iterator for Choices<'_> {
    type Item = Vec<Option<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut current = vec![None; self.arena.vertex_count()];
        for (&v, &d) in self.players.iter().zip(&self.digits) {
            current[v] = Some(self.arena.out_edges(v)[d]);
        }
        self.done = true;
        for i in (0..self.players.len()).rev() {
            let degree = self.arena.out_edges(self.players[i]).len();
            if self.digits[i] + 1 < degree {
                self.digits[i] += 1;
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

/// All of Eve's positional strategies, lexicographic in (vertex id, edge index).
pub fn enumerate_strategies(a: &Arena) -> impl Iterator<Item = PositionalStrategy> + '_ {
    Choices::new(a, Owner::Eve).map(move |choice| {
        PositionalStrategy(
            choice
                .into_iter()
                .enumerate()
                .filter_map(|(v, e)| e.map(|e| (a.id(v).to_owned(), e)))
                .collect(),
        )
    })
}

/// For each vertex of the subgraph given by `kept` edges: do all reachable
/// cycles satisfy `scc_ok`? `scc_ok` sees the internal edges of one strongly
/// connected component (compacted) and is only called on components with a cycle.
fn cycles_ok_from<F>(a: &Arena, kept: &[bool], scc_ok: F) -> Vec<bool>
where
    F: Fn(usize, &[(usize, usize, i128)]) -> bool,
{
    let n = a.vertex_count();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in a.edges().iter().enumerate() {
        if kept[i] {
            out[e.src].push(e.dst);
        }
    }
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &v in &out[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect();

    let mut component = vec![usize::MAX; n];
    let mut bad_component = Vec::new();
    for s in 0..n {
        if component[s] != usize::MAX {
            continue;
        }
        let c = bad_component.len();
        let members: Vec<usize> = (0..n).filter(|&u| reach[s][u] && reach[u][s]).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &u) in members.iter().enumerate() {
            component[u] = c;
            local[u] = i;
        }
        let internal: Vec<(usize, usize, i128)> = a
            .edges()
            .iter()
            .enumerate()
            .filter(|&(i, e)| kept[i] && local[e.src] != usize::MAX && local[e.dst] != usize::MAX)
            .map(|(_, e)| (local[e.src], local[e.dst], i128::from(e.weight)))
            .collect();
        bad_component.push(!internal.is_empty() && !scc_ok(members.len(), &internal));
    }

    (0..n)
        .map(|v| (0..n).all(|u| !reach[v][u] || !bad_component[component[u]]))
        .collect()
}

fn kept_edges(a: &Arena, choice: &[Option<usize>]) -> Vec<bool> {
    a.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| choice[e.src].map_or(true, |c| c == i))
        .collect()
}

fn guard(a: &Arena, owner: Owner) -> Result<(), OracleError> {
    let count = strategy_count(a, owner);
    if count > STRATEGY_GUARD {
        return Err(OracleError::GuardExceeded { count, guard: STRATEGY_GUARD });
    }
    Ok(())
}

/// Vertices from which some Eve strategy makes every reachable cycle's limit
/// value accepted by `variant`.
pub fn oracle_winning_set_variant(
    a: &Arena,
    variant: Variant,
) -> Result<BTreeSet<String>, OracleError> {
    guard(a, Owner::Eve)?;
    let n = a.vertex_count();
    let mut won = vec![false; n];
    for choice in Choices::new(a, Owner::Eve) {
        let ok = cycles_ok_from(a, &kept_edges(a, &choice), |k, edges| {
            variant.accepts(&karp(k, edges).expect("component has a cycle").mean)
        });
        for v in 0..n {
            won[v] |= ok[v];
        }
        if won.iter().all(|&w| w) {
            break;
        }
    }
    Ok((0..n).filter(|&v| won[v]).map(|v| a.id(v).to_owned()).collect())
}

/// Eve's winning region for `mp < 0`.
pub fn oracle_winning_set(a: &Arena) -> Result<BTreeSet<String>, OracleError> {
    oracle_winning_set_variant(a, Variant::LimsupStrict)
}

/// Vertices from which some positional Adam strategy makes every reachable
/// cycle have mean `>= 0`.
pub fn oracle_adam_winning_set(a: &Arena) -> Result<BTreeSet<String>, OracleError> {
    guard(a, Owner::Adam)?;
    let n = a.vertex_count();
    let mut won = vec![false; n];
    for choice in Choices::new(a, Owner::Adam) {
        let ok = cycles_ok_from(a, &kept_edges(a, &choice), |k, edges| {
            // min mean >= 0  <=>  max mean of the negated weights <= 0
            let negated: Vec<_> = edges.iter().map(|&(s, d, w)| (s, d, -w)).collect();
            !karp(k, &negated).expect("component has a cycle").mean.is_positive()
        });
        for v in 0..n {
            won[v] |= ok[v];
        }
    }
    Ok((0..n).filter(|&v| won[v]).map(|v| a.id(v).to_owned()).collect())
}
