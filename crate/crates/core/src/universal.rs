//! The universal graph `U` for the threshold mean-payoff objective.
//!
//! Vertices are pairs `(m, t)` with `m >= 1` and `t >= 0`, ordered
//! lexicographically. There is a `w`-edge `(m, t) -> (m', t')` iff `m > m'`, or
//! `m = m'` and `m * w <= t - t' - 1`. Along any infinite path the level
//! eventually stabilises at some `m`, after which every weight satisfies
//! `m * w_i <= t_i - t_{i+1} - 1`; telescoping gives a limsup average of at
//! most `-1/m`.
//!
//! `U` is infinite and never materialised; this module only evaluates the
//! edge predicate. All arithmetic is carried out in `i128`, which is exact for
//! every `u64` level/potential and `i64` weight.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UVertex {
    m: u64,
    t: u64,
}

impl UVertex {
    /// Returns `None` when `m == 0`.
    pub fn new(m: u64, t: u64) -> Option<Self> {
        (m >= 1).then_some(UVertex { m, t })
    }

    pub fn level(self) -> u64 {
        self.m
    }

    pub fn potential(self) -> u64 {
        self.t
    }
}

impl fmt::Display for UVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.t)
    }
}

/// Lexicographic comparison, level first.
pub fn lex_compare(u: UVertex, v: UVertex) -> Ordering {
    u.cmp(&v)
}

/// Whether `u -w-> v` is an edge of `U`.
pub fn u_edge(u: UVertex, w: i64, v: UVertex) -> bool {
    match u.m.cmp(&v.m) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => same_level_edge(u.m, u.t, w, v.t),
    }
}

/// The same-level clause `m * w <= t - t' - 1`.
pub(crate) fn same_level_edge(m: u64, t: u64, w: i64, t_target: u64) -> bool {
    i128::from(m) * i128::from(w) <= i128::from(t) - i128::from(t_target) - 1
}

/// Least `t` such that `(m, t) -w-> (m, t_target)` holds, clamped at zero:
/// `max(0, t_target + m * w + 1)`.
///
/// The result can exceed `u64::MAX` for extreme inputs, hence `u128`.
pub fn min_source_potential(m: u64, w: i64, t_target: u64) -> u128 {
    let raw = i128::from(t_target) + i128::from(m) * i128::from(w) + 1;
    raw.max(0) as u128
}
