//! Brute-force helpers shared by the integration tests. Nothing here calls
//! into the solver, oracle or morphism code.

#![allow(dead_code)]

use meanpayoff::arena::{Arena, Owner};
use meanpayoff::solver::{Label, SolveResult};

/// Every simple cycle of `g` as a list of edge indices, each listed once
/// (starting at its smallest vertex). Parallel edges give distinct cycles.
pub fn simple_cycles(g: &Arena) -> Vec<Vec<usize>> {
    fn go(g: &Arena, start: usize, v: usize, on: &mut [bool], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for &e in g.out_edges(v) {
            let dst = g.edge(e).dst;
            path.push(e);
            if dst == start {
                out.push(path.clone());
            } else if dst > start && !on[dst] {
                on[dst] = true;
                go(g, start, dst, on, path, out);
                on[dst] = false;
            }
            path.pop();
        }
    }
    let mut out = Vec::new();
    for s in 0..g.vertex_count() {
        let mut on = vec![false; g.vertex_count()];
        on[s] = true;
        go(g, s, s, &mut on, &mut Vec::new(), &mut out);
    }
    out
}

pub fn cycle_sum(g: &Arena, cycle: &[usize]) -> i128 {
    cycle.iter().map(|&e| i128::from(g.edge(e).weight)).sum()
}

/// Plain BFS reachability.
pub fn reachable(g: &Arena, root: usize) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        for &e in g.out_edges(u) {
            let v = g.edge(e).dst;
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Simple cycles whose vertices are reachable from `root`.
pub fn reachable_cycles(g: &Arena, root: usize) -> Vec<Vec<usize>> {
    let seen = reachable(g, root);
    simple_cycles(g)
        .into_iter()
        .filter(|c| seen[g.edge(c[0]).src])
        .collect()
}

/// Is `cycle` a closed walk of consecutive edges?
pub fn is_closed_walk(g: &Arena, cycle: &[usize]) -> bool {
    if cycle.is_empty() {
        return false;
    }
    let start = g.edge(cycle[0]).src;
    let mut at = start;
    for &e in cycle {
        if e >= g.edge_count() || g.edge(e).src != at {
            return false;
        }
        at = g.edge(e).dst;
    }
    at == start
}

/// Calls `f(length, sum)` for every path from `root` with at most `max_len`
/// edges, including the empty one.
pub fn for_each_path(g: &Arena, root: usize, max_len: usize, f: &mut dyn FnMut(usize, i128)) {
    fn go(g: &Arena, v: usize, len: usize, sum: i128, max_len: usize, f: &mut dyn FnMut(usize, i128)) {
        f(len, sum);
        if len == max_len {
            return;
        }
        for &e in g.out_edges(v) {
            let edge = g.edge(e);
            go(g, edge.dst, len + 1, sum + i128::from(edge.weight), max_len, f);
        }
    }
    go(g, root, 0, 0, max_len, f);
}

/// Certificate validity recomputed from scratch: Eve's region is closed under
/// her strategy and all of Adam's moves, and each such edge `u -w-> u'`
/// satisfies `m*w <= f(u) - f(u') - 1`.
pub fn independently_valid(a: &Arena, r: &SolveResult) -> bool {
    let m = i128::from(r.measure.m);
    if m < 1 {
        return false;
    }
    let label = |v: usize| -> Option<i128> {
        match r.measure.values.get(a.id(v))? {
            Label::Finite(t) => Some(i128::from(*t)),
            Label::Top => None,
        }
    };
    let good_edge = |e: usize| {
        let edge = a.edge(e);
        if !r.winning_eve.contains(a.id(edge.dst)) {
            return false;
        }
        match (label(edge.src), label(edge.dst)) {
            (Some(t), Some(t2)) => m * i128::from(edge.weight) <= t - t2 - 1,
            _ => false,
        }
    };
    (0..a.vertex_count())
        .filter(|&v| r.winning_eve.contains(a.id(v)))
        .all(|v| match a.owner(v) {
            Owner::Eve => r
                .strategy
                .get(a.id(v))
                .is_some_and(|&e| e < a.edge_count() && a.edge(e).src == v && good_edge(e)),
            Owner::Adam => a.out_edges(v).iter().all(|&e| good_edge(e)),
        })
}

const IDS: [&str; 3] = ["a", "b", "c"];

/// All arenas with 1..=`max_n` (<= 3) vertices, every vertex of out-degree 1
/// or 2 (edges as unordered multisets), weights in {-1, 0, 1}, every owner
/// assignment. Calls `f` on each.
pub fn for_each_exhaustive_arena(max_n: usize, f: &mut dyn FnMut(&Arena)) -> usize {
    assert!(max_n <= IDS.len());
    let mut count = 0;
    for n in 1..=max_n {
        let options: Vec<(usize, i64)> = (0..n).flat_map(|d| (-1..=1).map(move |w| (d, w))).collect();
        let mut edge_sets: Vec<Vec<(usize, i64)>> = options.iter().map(|&o| vec![o]).collect();
        for i in 0..options.len() {
            for j in i..options.len() {
                edge_sets.push(vec![options[i], options[j]]);
            }
        }
        let k = edge_sets.len();
        let total_sets = k.pow(n as u32);
        for owners in 0..(1usize << n) {
            for code in 0..total_sets {
                let mut rest = code;
                let mut edges = Vec::new();
                for src in 0..n {
                    for &(dst, w) in &edge_sets[rest % k] {
                        edges.push((IDS[src], IDS[dst], w));
                    }
                    rest /= k;
                }
                let vertices = (0..n)
                    .map(|v| (IDS[v], if owners >> v & 1 == 1 { Owner::Adam } else { Owner::Eve }))
                    .collect();
                let a = Arena::new(vertices, edges).expect("every vertex has an edge");
                f(&a);
                count += 1;
            }
        }
    }
    count
}
