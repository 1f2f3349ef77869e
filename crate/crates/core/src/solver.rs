//! Finite mean-payoff games solved by lifting a progress measure into `U`.
//!
//! Eve wins from `v` when she can keep the mean payoff strictly below zero.
//! Values of finite games are cycle means with denominator at most `|V|`, so
//! `mp < 0` is the same as `mp <= -1/|V|` and the single level `m = |V|` of `U`
//! suffices. The solver computes the least simultaneous fixpoint of
//!
//! ```text
//! Eve  v:  f(v) = min_{v -w-> v'} max(0, f(v') + m*w + 1)
//! Adam v:  f(v) = max_{v -w-> v'} max(0, f(v') + m*w + 1)
//! ```
//!
//! over `{0, .., T} ∪ {Top}` where `T = |V| * (m * W + 1)` and `W = max(1, max |w|)`.
//! Finite least-fixpoint labels never exceed `(|V| - 1) * (m * W + 1)`, so any
//! label pushed past `T` belongs to a vertex Adam wins. Eve's finite labels
//! with her chosen edges form a morphism of the strategy-restricted arena into
//! `U`, which is what [`check_certificate`] verifies.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arena::{Arena, ArenaError, Owner};
use crate::payoff::Rational;
use crate::universal::{min_source_potential, u_edge, UVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("lifting cap does not fit in 64 bits")]
    Overflow,
    #[error("vertex {0:?} is not in Eve's winning region")]
    NotWinning(String),
    #[error("no strategy entry for Eve vertex {0:?}")]
    MissingStrategy(String),
    #[error("steps must be at least 1")]
    NoSteps,
}

/// A progress-measure value: a potential at the fixed level, or Top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Finite(u64),
    Top,
}

impl Label {
    pub fn finite(self) -> Option<u64> {
        match self {
            Label::Finite(t) => Some(t),
            Label::Top => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(t) => write!(f, "{t}"),
            Label::Top => f.write_str("top"),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Label::Finite(t) => s.serialize_u64(*t),
            Label::Top => s.serialize_str("top"),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(t) => Ok(Label::Finite(t)),
            Raw::Text(s) if s == "top" => Ok(Label::Top),
            Raw::Text(s) => Err(de::Error::custom(format!("expected integer or \"top\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressMeasure {
    pub m: u64,
    pub values: BTreeMap<String, Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub winning_eve: BTreeSet<String>,
    pub winning_adam: BTreeSet<String>,
    pub measure: ProgressMeasure,
    /// Eve vertex in `winning_eve` -> chosen edge index.
    pub strategy: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    m: u64,
    measure: BTreeMap<String, Label>,
    strategy: BTreeMap<String, usize>,
    winning_adam: BTreeSet<String>,
    winning_eve: BTreeSet<String>,
}

impl SolveResult {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(CertificateDoc {
            m: self.measure.m,
            measure: self.measure.values.clone(),
            strategy: self.strategy.clone(),
            winning_adam: self.winning_adam.clone(),
            winning_eve: self.winning_eve.clone(),
        })
        .expect("certificate is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let doc: CertificateDoc = serde_json::from_str(text)?;
        Ok(SolveResult {
            winning_eve: doc.winning_eve,
            winning_adam: doc.winning_adam,
            measure: ProgressMeasure {
                m: doc.m,
                values: doc.measure,
            },
            strategy: doc.strategy,
        })
    }

    pub fn label(&self, id: &str) -> Option<Label> {
        self.measure.values.get(id).copied()
    }
}

/// Order in which inconsistent vertices are lifted. Both reach the same
/// least fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftOrder {
    #[default]
    Worklist,
    RoundRobin,
}

/// `(m, T)` for an arena: `m = |V|`, `T = |V| * (m * W + 1)`.
pub fn level_and_cap(a: &Arena) -> Result<(u64, u64), SolveError> {
    let n = a.vertex_count() as u64;
    let cap = n
        .checked_mul(a.weight_bound())
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_mul(n))
        .ok_or(SolveError::Overflow)?;
    Ok((n, cap))
}

/// Value of the lifting expression `max(0, f(v') + m*w + 1)` along edge `e`.
fn edge_value(a: &Arena, f: &[Label], m: u64, cap: u64, e: usize) -> Label {
    let edge = a.edge(e);
    match f[edge.dst] {
        Label::Top => Label::Top,
        Label::Finite(t) => {
            let need = min_source_potential(m, edge.weight, t);
            if need > u128::from(cap) {
                Label::Top
            } else {
                Label::Finite(need as u64)
            }
        }
    }
}

fn lift(a: &Arena, f: &[Label], m: u64, cap: u64, v: usize) -> Label {
    let values = a.out_edges(v).iter().map(|&e| edge_value(a, f, m, cap, e));
    match a.owner(v) {
        Owner::Eve => values.min(),
        Owner::Adam => values.max(),
    }
    .expect("arenas have no dead ends")
}

fn least_fixpoint(a: &Arena, m: u64, cap: u64, order: LiftOrder) -> Vec<Label> {
    let n = a.vertex_count();
    let mut f = vec![Label::Finite(0); n];
    match order {
        LiftOrder::Worklist => {
            let mut preds = vec![Vec::new(); n];
            for e in a.edges() {
                if !preds[e.dst].contains(&e.src) {
                    preds[e.dst].push(e.src);
                }
            }
            let mut queued = vec![true; n];
            let mut queue: VecDeque<usize> = (0..n).collect();
            while let Some(v) = queue.pop_front() {
                queued[v] = false;
                let next = lift(a, &f, m, cap, v);
                if next > f[v] {
                    f[v] = next;
                    for &u in &preds[v] {
                        if !queued[u] && f[u] != Label::Top {
                            queued[u] = true;
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        LiftOrder::RoundRobin => loop {
            let mut changed = false;
            for v in 0..n {
                let next = lift(a, &f, m, cap, v);
                if next > f[v] {
                    f[v] = next;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        },
    }
    f
}

pub fn solve(a: &Arena) -> Result<SolveResult, SolveError> {
    solve_with(a, LiftOrder::Worklist)
}

pub fn solve_with(a: &Arena, order: LiftOrder) -> Result<SolveResult, SolveError> {
    let (m, cap) = level_and_cap(a)?;
    let f = least_fixpoint(a, m, cap, order);

    let mut result = SolveResult {
        winning_eve: BTreeSet::new(),
        winning_adam: BTreeSet::new(),
        measure: ProgressMeasure {
            m,
            values: BTreeMap::new(),
        },
        strategy: BTreeMap::new(),
    };
    for v in 0..a.vertex_count() {
        let id = a.id(v).to_owned();
        result.measure.values.insert(id.clone(), f[v]);
        if f[v] == Label::Top {
            result.winning_adam.insert(id);
            continue;
        }
        if a.owner(v) == Owner::Eve {
            // lowest index attaining the minimum
            let choice = a
                .out_edges(v)
                .iter()
                .copied()
                .find(|&e| edge_value(a, &f, m, cap, e) == f[v])
                .expect("a fixpoint value is attained by some edge");
            result.strategy.insert(id.clone(), choice);
        }
        result.winning_eve.insert(id);
    }
    Ok(result)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("level m must be at least 1")]
    ZeroLevel,
    #[error("certificate mentions unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("no measure value for vertex {0:?}")]
    MissingLabel(String),
    #[error("vertex {0:?} is not in exactly one winning region")]
    NotPartitioned(String),
    #[error("Eve-winning vertex {0:?} is labelled top")]
    TopInWinningRegion(String),
    #[error("no strategy entry for Eve vertex {0:?}")]
    MissingStrategy(String),
}

/// A reason a certificate is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `(m, f(v)) -w-> (m, f(v'))` is not an edge of `U`.
    EdgeCondition { vertex: String, edge: usize },
    /// The edge leads out of Eve's claimed winning region.
    EscapesRegion { vertex: String, edge: usize },
    /// The strategy picks an edge that does not leave this vertex.
    ForeignEdge { vertex: String, edge: usize },
    /// Strategy entry for an Adam vertex or a vertex outside the region.
    UnexpectedStrategy { vertex: String },
    /// A vertex claimed for Adam carries a finite label.
    FiniteLabelOutsideRegion { vertex: String },
}

/// Re-checks a claimed solution using only the edge predicate of `U`.
/// Returns all violations; an empty list means the certificate is valid.
pub fn check_certificate(a: &Arena, r: &SolveResult) -> Result<Vec<Violation>, CertificateError> {
    let m = r.measure.m;
    if m == 0 {
        return Err(CertificateError::ZeroLevel);
    }
    for id in r
        .measure
        .values
        .keys()
        .chain(&r.winning_eve)
        .chain(&r.winning_adam)
        .chain(r.strategy.keys())
    {
        if a.index_of(id).is_none() {
            return Err(CertificateError::UnknownVertex(id.clone()));
        }
    }

    let n = a.vertex_count();
    let mut in_region = vec![false; n];
    let mut labels = vec![Label::Top; n];
    for v in 0..n {
        let id = a.id(v);
        let eve_side = r.winning_eve.contains(id);
        if eve_side == r.winning_adam.contains(id) {
            return Err(CertificateError::NotPartitioned(id.to_owned()));
        }
        in_region[v] = eve_side;
        labels[v] = r
            .label(id)
            .ok_or_else(|| CertificateError::MissingLabel(id.to_owned()))?;
        if eve_side && labels[v] == Label::Top {
            return Err(CertificateError::TopInWinningRegion(id.to_owned()));
        }
        if eve_side && a.owner(v) == Owner::Eve && !r.strategy.contains_key(id) {
            return Err(CertificateError::MissingStrategy(id.to_owned()));
        }
    }

    let mut violations = Vec::new();
    for (id, _) in &r.strategy {
        let v = a.index_of(id).expect("checked above");
        if !in_region[v] || a.owner(v) == Owner::Adam {
            violations.push(Violation::UnexpectedStrategy { vertex: id.clone() });
        }
    }

    let check_edge = |v: usize, e: usize, out: &mut Vec<Violation>| {
        let edge = a.edge(e);
        let vertex = a.id(v).to_owned();
        if !in_region[edge.dst] {
            out.push(Violation::EscapesRegion { vertex, edge: e });
            return;
        }
        let (Some(t), Some(t2)) = (labels[v].finite(), labels[edge.dst].finite()) else {
            unreachable!("region vertices carry finite labels")
        };
        let src = UVertex::new(m, t).expect("m >= 1");
        let dst = UVertex::new(m, t2).expect("m >= 1");
        if !u_edge(src, edge.weight, dst) {
            out.push(Violation::EdgeCondition { vertex, edge: e });
        }
    };

    for v in 0..n {
        let id = a.id(v);
        if !in_region[v] {
            if labels[v] != Label::Top {
                violations.push(Violation::FiniteLabelOutsideRegion { vertex: id.to_owned() });
            }
            continue;
        }
        match a.owner(v) {
            Owner::Eve => {
                let e = r.strategy[id];
                if e >= a.edge_count() || a.edge(e).src != v {
                    violations.push(Violation::ForeignEdge { vertex: id.to_owned(), edge: e });
                } else {
                    check_edge(v, e, &mut violations);
                }
            }
            Owner::Adam => {
                for &e in a.out_edges(v) {
                    check_edge(v, e, &mut violations);
                }
            }
        }
    }
    Ok(violations)
}

/// Candidate game values: `p/q` with `1 <= q <= |V|` and `|p/q| <= W`, ascending.
pub fn value_candidates(a: &Arena) -> Vec<Rational> {
    let n = a.vertex_count() as i128;
    let w = i128::from(a.weight_bound());
    let mut out: Vec<Rational> = (1..=n)
        .flat_map(|q| (-w * q..=w * q).map(move |p| Rational::new(p, q)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The arena with every weight `w` replaced by `q*w - p`: Eve wins `mp < p/q`
/// in `a` iff she wins `mp < 0` in the result.
pub fn shift_arena(a: &Arena, threshold: &Rational) -> Result<Arena, SolveError> {
    let p = i64::try_from(*threshold.numer()).map_err(|_| SolveError::Overflow)?;
    let q = i64::try_from(*threshold.denom()).map_err(|_| SolveError::Overflow)?;
    a.try_map_weights(|w| w.checked_mul(q)?.checked_sub(p))
        .ok_or(SolveError::Overflow)
}

/// Whether Eve wins `mp < threshold` from vertex position `v`.
pub fn eve_wins_below(a: &Arena, v: usize, threshold: &Rational) -> Result<bool, SolveError> {
    let shifted = shift_arena(a, threshold)?;
    Ok(solve(&shifted)?.winning_eve.contains(a.id(v)))
}

/// The optimal mean payoff from `id`: the largest candidate threshold Eve
/// cannot beat. Binary search over [`value_candidates`], since winning
/// `mp < θ` is monotone in `θ`.
pub fn value(a: &Arena, id: &str) -> Result<Rational, SolveError> {
    let v = a.require(id)?;
    let candidates = value_candidates(a);
    // invariant: Eve loses at candidates[lo], wins at candidates[hi] (or hi = len)
    let (mut lo, mut hi) = (0, candidates.len());
    debug_assert!(!eve_wins_below(a, v, &candidates[0])?);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if eve_wins_below(a, v, &candidates[mid])? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(candidates[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayStep {
    pub edge: usize,
    pub weight: i64,
}

/// Plays `steps` moves from `from`: Eve follows the certificate, Adam picks
/// uniformly at random from a seeded generator.
pub fn simulate(
    a: &Arena,
    r: &SolveResult,
    from: &str,
    steps: usize,
    seed: u64,
) -> Result<Vec<PlayStep>, SolveError> {
    let mut v = a.require(from)?;
    if !r.winning_eve.contains(from) {
        return Err(SolveError::NotWinning(from.to_owned()));
    }
    if steps == 0 {
        return Err(SolveError::NoSteps);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut play = Vec::with_capacity(steps);
    for _ in 0..steps {
        let e = match a.owner(v) {
            Owner::Eve => *r
                .strategy
                .get(a.id(v))
                .ok_or_else(|| SolveError::MissingStrategy(a.id(v).to_owned()))?,
            Owner::Adam => {
                let out = a.out_edges(v);
                out[rng.gen_range(0..out.len())]
            }
        };
        let edge = a.edge(e);
        if edge.src != v {
            return Err(SolveError::MissingStrategy(a.id(v).to_owned()));
        }
        play.push(PlayStep { edge: e, weight: edge.weight });
        v = edge.dst;
    }
    Ok(play)
}

/// First prefix length `l` with `m * sum(prefix) > start - l`, if any.
pub fn first_bound_violation(weights: &[i64], m: u64, start: u64) -> Option<usize> {
    let mut sum = 0i128;
    for (i, &w) in weights.iter().enumerate() {
        sum += i128::from(w);
        let len = i as i128 + 1;
        if i128::from(m) * sum > i128::from(start) - len {
            return Some(i + 1);
        }
    }
    None
}

/// JSON report of a simulated play, including the running bound check.
pub fn play_report(play: &[PlayStep], m: u64, start: u64) -> Value {
    let weights: Vec<i64> = play.iter().map(|s| s.weight).collect();
    let violation = first_bound_violation(&weights, m, start);
    json!({
        "edges": play.iter().map(|s| s.edge).collect::<Vec<_>>(),
        "weights": weights,
        "m": m,
        "start_label": start,
        "sum": weights.iter().map(|&w| i128::from(w)).sum::<i128>().to_string(),
        "bound_ok": violation.is_none(),
        "first_violation": violation,
    })
}
