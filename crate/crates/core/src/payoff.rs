//! Exact mean-payoff arithmetic.
//!
//! The mean payoff of `w0 w1 ...` is `limsup_n (1/n) * sum_{i<n} w_i`; Eve's
//! objective is a strictly negative mean payoff. Infinite words are handled
//! in ultimately periodic form, where the running averages converge to the
//! cycle mean and all four limit/threshold variants only differ by their
//! comparison against zero.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Signed;
use thiserror::Error;

use crate::arena::WeightedGraph;

pub type Rational = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PayoffError {
    #[error("average of the empty path is undefined")]
    EmptyPath,
    #[error("the repeated cycle must be non-empty")]
    EmptyCycle,
    #[error("unknown variant {0:?} (expected limsup-strict, limsup-weak, liminf-strict or liminf-weak)")]
    UnknownVariant(String),
}

/// Formats as `p/q`, always including the denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn path_sum(path: &[i64]) -> i128 {
    path.iter().map(|&w| i128::from(w)).sum()
}

pub fn path_avg(path: &[i64]) -> Result<Rational, PayoffError> {
    if path.is_empty() {
        return Err(PayoffError::EmptyPath);
    }
    Ok(Rational::new(path_sum(path), path.len() as i128))
}

/// Element `k` is the average of the first `k + 1` weights.
pub fn partial_averages(path: &[i64]) -> Vec<Rational> {
    let mut sum = 0i128;
    path.iter()
        .enumerate()
        .map(|(k, &w)| {
            sum += i128::from(w);
            Rational::new(sum, k as i128 + 1)
        })
        .collect()
}

/// `prefix . cycle^omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltimatelyPeriodicWord {
    prefix: Vec<i64>,
    cycle: Vec<i64>,
}

impl UltimatelyPeriodicWord {
    pub fn new(prefix: Vec<i64>, cycle: Vec<i64>) -> Result<Self, PayoffError> {
        if cycle.is_empty() {
            return Err(PayoffError::EmptyCycle);
        }
        Ok(UltimatelyPeriodicWord { prefix, cycle })
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[i64] {
        &self.cycle
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Vec<i64> {
        self.prefix
            .iter()
            .chain(self.cycle.iter().cycle())
            .take(n)
            .copied()
            .collect()
    }
}

/// Limsup and liminf coincide on ultimately periodic words: both equal the
/// cycle mean, whatever the prefix.
pub fn mp_value(word: &UltimatelyPeriodicWord) -> Rational {
    path_avg(&word.cycle).expect("cycle is non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    LimsupStrict,
    LimsupWeak,
    LiminfStrict,
    LiminfWeak,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::LimsupStrict,
        Variant::LimsupWeak,
        Variant::LiminfStrict,
        Variant::LiminfWeak,
    ];

    pub fn is_strict(self) -> bool {
        matches!(self, Variant::LimsupStrict | Variant::LiminfStrict)
    }

    /// Threshold test of a limit value against zero.
    pub fn accepts(self, value: &Rational) -> bool {
        if self.is_strict() {
            value.is_negative()
        } else {
            !value.is_positive()
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::LimsupStrict => "limsup-strict",
            Variant::LimsupWeak => "limsup-weak",
            Variant::LiminfStrict => "liminf-strict",
            Variant::LiminfWeak => "liminf-weak",
        })
    }
}

impl FromStr for Variant {
    type Err = PayoffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string() == s)
            .ok_or_else(|| PayoffError::UnknownVariant(s.to_owned()))
    }
}

pub fn satisfies(word: &UltimatelyPeriodicWord, variant: Variant) -> bool {
    variant.accepts(&mp_value(word))
}

/// A cycle given by edge indices, in path order, with its exact mean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    pub mean: Rational,
    pub edges: Vec<usize>,
}

/// Karp's maximum cycle mean on `n` vertices.
///
/// `walk[k][v]` is the heaviest walk with exactly `k` edges ending at `v`
/// (starting anywhere). The optimum is `max_v min_k (walk[n][v] - walk[k][v]) / (n - k)`,
/// and any cycle on the optimal `n`-edge walk into the maximizing vertex attains it.
pub(crate) fn karp(n: usize, edges: &[(usize, usize, i128)]) -> Option<MeanCycle> {
    if n == 0 {
        return None;
    }
    let mut walk: Vec<Vec<Option<i128>>> = vec![vec![None; n]; n + 1];
    let mut pred: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; n + 1];
    walk[0].iter_mut().for_each(|d| *d = Some(0));
    for k in 1..=n {
        for (i, &(src, dst, w)) in edges.iter().enumerate() {
            if let Some(base) = walk[k - 1][src] {
                let cand = base + w;
                if walk[k][dst].map_or(true, |cur| cand > cur) {
                    walk[k][dst] = Some(cand);
                    pred[k][dst] = i;
                }
            }
        }
    }

    let mut best: Option<(Rational, usize)> = None;
    for v in 0..n {
        let Some(full) = walk[n][v] else { continue };
        let worst = (0..n)
            .filter_map(|k| walk[k][v].map(|d| Rational::new(full - d, (n - k) as i128)))
            .min()
            .expect("walk[0][v] is always defined");
        if best.as_ref().map_or(true, |(b, _)| worst > *b) {
            best = Some((worst, v));
        }
    }
    let (mean, end) = best?;

    // Walk back from (n, end); the n + 1 visited vertices contain a repeat.
    let mut trail = Vec::with_capacity(n + 1);
    let mut into = Vec::with_capacity(n);
    let mut v = end;
    trail.push(v);
    for k in (1..=n).rev() {
        let e = pred[k][v];
        into.push(e);
        v = edges[e].0;
        trail.push(v);
    }
    trail.reverse();
    into.reverse();
    // trail[i] -> trail[i + 1] via into[i]
    let mut first_seen = vec![usize::MAX; n];
    for (j, &x) in trail.iter().enumerate() {
        if first_seen[x] != usize::MAX {
            let i = first_seen[x];
            let cycle: Vec<usize> = into[i..j].to_vec();
            debug_assert_eq!(
                Rational::new(
                    cycle.iter().map(|&e| edges[e].2).sum(),
                    cycle.len() as i128
                ),
                mean
            );
            return Some(MeanCycle { mean, edges: cycle });
        }
        first_seen[x] = j;
    }
    unreachable!("pigeonhole guarantees a repeated vertex")
}

/// Karp over the subgraph reachable from `root` (or the whole graph), with
/// weights transformed by `weight`. Returned edge indices refer to `g`.
fn karp_on(
    g: &WeightedGraph,
    root: Option<usize>,
    weight: impl Fn(i64) -> i128,
) -> Option<MeanCycle> {
    let keep = match root {
        Some(r) => g.reachable_from(r),
        None => vec![true; g.vertex_count()],
    };
    let mut compact = vec![usize::MAX; g.vertex_count()];
    let mut n = 0;
    for (v, &k) in keep.iter().enumerate() {
        if k {
            compact[v] = n;
            n += 1;
        }
    }
    let mut origin = Vec::new();
    let mut edges = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if keep[e.src] {
            edges.push((compact[e.src], compact[e.dst], weight(e.weight)));
            origin.push(i);
        }
    }
    karp(n, &edges).map(|mut c| {
        c.edges.iter_mut().for_each(|e| *e = origin[*e]);
        c
    })
}

/// A cycle of maximum mean in `g`.
pub fn max_mean_cycle(g: &WeightedGraph) -> Option<MeanCycle> {
    karp_on(g, None, i128::from)
}

/// A cycle of maximum mean among those reachable from vertex position `root`.
pub fn max_mean_cycle_from(g: &WeightedGraph, root: usize) -> Option<MeanCycle> {
    karp_on(g, Some(root), i128::from)
}

pub fn max_cycle_mean(g: &WeightedGraph) -> Option<Rational> {
    max_mean_cycle(g).map(|c| c.mean)
}

pub fn max_cycle_mean_from(g: &WeightedGraph, root: usize) -> Option<Rational> {
    max_mean_cycle_from(g, root).map(|c| c.mean)
}

pub fn min_cycle_mean_from(g: &WeightedGraph, root: usize) -> Option<Rational> {
    karp_on(g, Some(root), |w| -i128::from(w)).map(|c| -c.mean)
}

pub fn min_cycle_mean(g: &WeightedGraph) -> Option<Rational> {
    karp_on(g, None, |w| -i128::from(w)).map(|c| -c.mean)
}
