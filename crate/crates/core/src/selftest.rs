//! Invariant suites run by `meanpayoff selftest` on seeded corpora.

use std::io::Write;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{generate_arena, Arena, Owner};
use crate::morphism::{build_morphism, check_morphism, MorphismOutcome};
use crate::oracle::oracle_winning_set;
use crate::payoff::max_cycle_mean_from;
use crate::solver::{
    check_certificate, first_bound_violation, simulate, solve, solve_with, Label, LiftOrder,
};
use crate::universal::{u_edge, UVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

/// A random same-level path in `U`: `len` weights and the `len + 1` vertices
/// `(m, t_0) -w_0-> (m, t_1) -> ...`, each step a genuine `U` edge.
pub fn random_u_path(rng: &mut impl Rng, m: u64, len: usize) -> (Vec<UVertex>, Vec<i64>) {
    let mut t = rng.gen_range(0..=200u64);
    let mut vertices = vec![UVertex::new(m, t).expect("m >= 1")];
    let mut weights = Vec::with_capacity(len);
    for _ in 0..len {
        let (w, room) = loop {
            let w = rng.gen_range(-5i64..=5);
            let room = i128::from(t) - i128::from(m) * i128::from(w) - 1;
            if room >= 0 {
                break (w, room as u64);
            }
        };
        t = rng.gen_range(0..=room);
        weights.push(w);
        vertices.push(UVertex::new(m, t).expect("m >= 1"));
    }
    (vertices, weights)
}

/// Random vertex of `U` with `m` in `[1, 5]` and `t` in `[0, 50]`.
pub fn random_u_vertex(rng: &mut impl Rng) -> UVertex {
    UVertex::new(rng.gen_range(1..=5), rng.gen_range(0..=50)).expect("m >= 1")
}

/// The small random game corpus: `count` arenas, 1..=6 vertices,
/// out-degree 1..=3, weights in [-2, 2].
pub fn random_corpus(count: usize, seed: u64) -> Vec<Arena> {
    (0..count as u64)
        .map(|i| {
            let n = 1 + (i % 6) as usize;
            generate_arena(n, 3, 2, seed.wrapping_mul(1_000_003).wrapping_add(i))
                .expect("parameters are valid")
        })
        .collect()
}

type SuiteResult = Result<usize, String>;

fn monotone_law(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    let mut checked = 0;
    while checked < count {
        let (u, w, v) = (random_u_vertex(rng), rng.gen_range(-5..=5), random_u_vertex(rng));
        if !u_edge(u, w, v) {
            continue;
        }
        let (u2, v2) = (random_u_vertex(rng), random_u_vertex(rng));
        let (big, small) = (u.max(u2), v.min(v2));
        if !u_edge(big, w, small) {
            return Err(format!("{u} -{w}-> {v} holds but {big} -{w}-> {small} does not"));
        }
        checked += 1;
    }
    Ok(checked)
}

fn path_sum_law(rng: &mut ChaCha8Rng, count: usize) -> SuiteResult {
    for _ in 0..count {
        let m = rng.gen_range(1..=5);
        let len = rng.gen_range(1..=50);
        let (vs, ws) = random_u_path(rng, m, len);
        let sum: i128 = ws.iter().map(|&w| i128::from(w)).sum();
        let (t0, tl) = (vs[0].potential(), vs[len].potential());
        if i128::from(m) * sum > i128::from(t0) - i128::from(tl) - len as i128 {
            return Err(format!("path from {} breaks the telescoped bound", vs[0]));
        }
    }
    Ok(count)
}

fn oracle_equivalence(corpus: &[Arena]) -> SuiteResult {
    for (i, a) in corpus.iter().enumerate() {
        let solved = solve(a).map_err(|e| e.to_string())?.winning_eve;
        let oracle = oracle_winning_set(a).map_err(|e| e.to_string())?;
        if solved != oracle {
            return Err(format!("arena #{i}: solver {solved:?} vs oracle {oracle:?}"));
        }
    }
    Ok(corpus.len())
}

fn certificates(corpus: &[Arena]) -> SuiteResult {
    let mut cases = 0;
    for (i, a) in corpus.iter().enumerate() {
        let r = solve(a).map_err(|e| e.to_string())?;
        if !check_certificate(a, &r).map_err(|e| e.to_string())?.is_empty() {
            return Err(format!("arena #{i}: solver output rejected"));
        }
        cases += 1;
        for (id, label) in &r.measure.values {
            if let Label::Finite(t) = *label {
                if t == 0 {
                    continue;
                }
                let mut bad = r.clone();
                bad.measure.values.insert(id.clone(), Label::Finite(t - 1));
                match check_certificate(a, &bad) {
                    Ok(v) if v.is_empty() => {
                        return Err(format!("arena #{i}: decremented label at {id} accepted"))
                    }
                    _ => cases += 1,
                }
            }
        }
    }
    Ok(cases)
}

fn lift_orders(corpus: &[Arena]) -> SuiteResult {
    for (i, a) in corpus.iter().enumerate() {
        let w = solve_with(a, LiftOrder::Worklist).map_err(|e| e.to_string())?;
        let r = solve_with(a, LiftOrder::RoundRobin).map_err(|e| e.to_string())?;
        if w != r {
            return Err(format!("arena #{i}: lifting orders disagree"));
        }
    }
    Ok(corpus.len())
}

fn morphisms(corpus: &[Arena]) -> SuiteResult {
    let mut cases = 0;
    for (i, a) in corpus.iter().enumerate() {
        let g = a.with_owner(Owner::Eve);
        for v in 0..g.vertex_count() {
            let negative = max_cycle_mean_from(&g, v).is_some_and(|c| c.is_negative());
            match build_morphism(&g, g.id(v)).map_err(|e| e.to_string())? {
                MorphismOutcome::Built(phi) => {
                    let sub = g.reachable_restriction(g.id(v)).map_err(|e| e.to_string())?;
                    if !negative || !check_morphism(&sub, &phi).map_err(|e| e.to_string())?.is_empty() {
                        return Err(format!("graph #{i} root {}: bad morphism", g.id(v)));
                    }
                }
                MorphismOutcome::Refuted(w) => {
                    let sum: i128 = w.cycle.iter().map(|&e| i128::from(g.edge(e).weight)).sum();
                    if negative || sum < 0 || sum != w.sum {
                        return Err(format!("graph #{i} root {}: bad refutation", g.id(v)));
                    }
                }
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn simulated_bounds(corpus: &[Arena], steps: usize) -> SuiteResult {
    let mut runs = 0;
    for (i, a) in corpus.iter().enumerate() {
        let r = solve(a).map_err(|e| e.to_string())?;
        for id in &r.winning_eve {
            let start = r.label(id).and_then(Label::finite).expect("winning vertices are finite");
            let play = simulate(a, &r, id, steps, i as u64).map_err(|e| e.to_string())?;
            let weights: Vec<i64> = play.iter().map(|s| s.weight).collect();
            if let Some(l) = first_bound_violation(&weights, r.measure.m, start) {
                return Err(format!("arena #{i} from {id}: bound broken at length {l}"));
            }
            runs += 1;
        }
    }
    Ok(runs)
}

/// Runs every suite, printing one line each. Returns whether all passed.
pub fn run(scale: Scale, out: &mut dyn Write) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let corpus = random_corpus(scale.pick(100, 500), 1);
    let suites: Vec<(&str, SuiteResult)> = vec![
        ("u-monotone", monotone_law(&mut rng, scale.pick(10_000, 100_000))),
        ("u-path-sum", path_sum_law(&mut rng, scale.pick(1_000, 10_000))),
        ("oracle-equivalence", oracle_equivalence(&corpus)),
        ("certificates", certificates(&corpus)),
        ("lift-orders", lift_orders(&corpus)),
        ("morphisms", morphisms(&corpus)),
        ("simulate-bound", simulated_bounds(&corpus, scale.pick(100, 1_000))),
    ];
    let mut all = true;
    for (name, result) in suites {
        let _ = match result {
            Ok(n) => writeln!(out, "ok   {name} ({n} cases)"),
            Err(msg) => {
                all = false;
                writeln!(out, "FAIL {name}: {msg}")
            }
        };
    }
    all
}
