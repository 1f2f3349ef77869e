//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use meanpayoff::arena::{generate_arena, serialize_arena, Arena, Owner};
use meanpayoff::morphism::{
    build_morphism, check_morphism, find_slope_certificate, MorphismOutcome, SlopeOutcome,
};
use meanpayoff::oracle::oracle_winning_set;
use meanpayoff::payoff::{
    max_cycle_mean, max_cycle_mean_from, min_cycle_mean_from, Rational,
};
use meanpayoff::selftest::{random_corpus, random_u_path, random_u_vertex};
use meanpayoff::solver::{
    check_certificate, first_bound_violation, simulate, solve, value, value_candidates, Label,
};
use meanpayoff::universal::u_edge;

use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Random games for criteria 1 and 2: at least 500, <= 6 vertices,
/// out-degree <= 3, weights in [-2, 2].
fn random_games() -> Vec<Arena> {
    random_corpus(600, 2024)
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatch = None;
    let exhaustive = for_each_exhaustive_arena(3, &mut |a| {
        if mismatch.is_some() {
            return;
        }
        let solved = solve(a).expect("small arenas never overflow").winning_eve;
        let oracle = oracle_winning_set(a).expect("within guard");
        if solved != oracle {
            mismatch = Some(serialize_arena(a));
        }
    });
    if let Some(a) = mismatch {
        return Err(format!("solver and oracle disagree on {a}"));
    }
    let games = random_games();
    for (i, a) in games.iter().enumerate() {
        let solved = solve(a).unwrap().winning_eve;
        let oracle = oracle_winning_set(a).unwrap();
        ensure!(solved == oracle, "random arena #{i}: {solved:?} vs {oracle:?}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?} (limit 2 min)");
    Ok(format!(
        "{exhaustive} exhaustive + {} random arenas agree in {:.1}s",
        games.len(),
        elapsed.as_secs_f64()
    ))
}

fn c2_certificates() -> Outcome {
    let mut failed = None;
    let exhaustive = for_each_exhaustive_arena(3, &mut |a| {
        if failed.is_none() {
            let r = solve(a).unwrap();
            if !check_certificate(a, &r).map_or(false, |v| v.is_empty()) {
                failed = Some(serialize_arena(a));
            }
        }
    });
    if let Some(a) = failed {
        return Err(format!("certificate rejected on {a}"));
    }

    let (mut decrements, mut swaps_invalid, mut swaps_valid) = (0, 0, 0);
    for (i, a) in random_games().iter().enumerate() {
        let r = solve(a).unwrap();
        ensure!(check_certificate(a, &r).unwrap().is_empty(), "random arena #{i} rejected");

        for (id, label) in &r.measure.values {
            let Label::Finite(t) = *label else { continue };
            if t == 0 {
                continue;
            }
            let mut bad = r.clone();
            bad.measure.values.insert(id.clone(), Label::Finite(t - 1));
            ensure!(!independently_valid(a, &bad), "arena #{i}: decrement at {id} is still valid");
            let accepted = check_certificate(a, &bad).is_ok_and(|v| v.is_empty());
            ensure!(!accepted, "arena #{i}: decrement at {id} accepted");
            decrements += 1;
        }

        for (id, &chosen) in &r.strategy {
            let v = a.index_of(id).unwrap();
            let current = a.edge(chosen);
            for &e in a.out_edges(v) {
                let other = a.edge(e);
                if (other.dst, other.weight) == (current.dst, current.weight) {
                    continue;
                }
                let mut swapped = r.clone();
                swapped.strategy.insert(id.clone(), e);
                let truth = independently_valid(a, &swapped);
                let accepted = check_certificate(a, &swapped).is_ok_and(|v| v.is_empty());
                ensure!(accepted == truth, "arena #{i}: swap {id}->{e} verdict {accepted}, truth {truth}");
                if truth {
                    swaps_valid += 1;
                } else {
                    swaps_invalid += 1;
                }
            }
        }
    }
    let mutants = decrements + swaps_invalid;
    ensure!(mutants >= 100, "only {mutants} invalid mutants generated");
    Ok(format!(
        "{exhaustive} exhaustive + 600 random certificates pass; {mutants} invalid mutants \
         ({decrements} decrements, {swaps_invalid} swaps) all rejected, 0 false accepts; \
         {swaps_valid} swaps to equally good edges correctly accepted"
    ))
}

fn c3_lemma_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..10_000 {
        let m = rng.gen_range(1..=5u64);
        let len = rng.gen_range(1..=50);
        let (vs, ws) = random_u_path(&mut rng, m, len);
        for (i, &w) in ws.iter().enumerate() {
            ensure!(u_edge(vs[i], w, vs[i + 1]), "path {k} is not a U-path");
        }
        let sum: i128 = ws.iter().map(|&w| i128::from(w)).sum();
        let (t0, tl) = (i128::from(vs[0].potential()), i128::from(vs[len].potential()));
        // sum <= (t0 - tl - len) / m <= (t0 - len) / m, multiplied through by m
        ensure!(i128::from(m) * sum <= t0 - tl - len as i128, "path {k}: telescoped bound fails");
        ensure!(t0 - tl - len as i128 <= t0 - len as i128, "path {k}: tl < 0");
    }

    let mut runs = 0;
    let mut seed = 0u64;
    'outer: for a in random_corpus(2_000, 77) {
        let r = solve(&a).unwrap();
        if !check_certificate(&a, &r).unwrap().is_empty() {
            return Err("uncertified solver output".into());
        }
        for id in &r.winning_eve {
            let start = r.label(id).and_then(Label::finite).unwrap();
            let play = simulate(&a, &r, id, 1_000, seed).unwrap();
            seed += 1;
            let weights: Vec<i64> = play.iter().map(|s| s.weight).collect();
            ensure!(
                first_bound_violation(&weights, r.measure.m, start).is_none(),
                "simulation {runs} breaks the prefix bound"
            );
            runs += 1;
            if runs == 1_000 {
                break 'outer;
            }
        }
    }
    ensure!(runs == 1_000, "only {runs} certified runs available");
    Ok("10000 U-paths and 1000 certified plays of 1000 steps, 0 violations".into())
}

fn c4_monotone_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 100_000 {
        let (u, w, v) = (random_u_vertex(&mut rng), rng.gen_range(-5..=5), random_u_vertex(&mut rng));
        if !u_edge(u, w, v) {
            continue;
        }
        let bigger = random_u_vertex(&mut rng).max(u);
        let smaller = random_u_vertex(&mut rng).min(v);
        ensure!(u_edge(bigger, w, smaller), "{u} -{w}-> {v} but not {bigger} -{w}-> {smaller}");
        checked += 1;
    }
    Ok(format!("{checked} triples compose"))
}

/// One-player graphs for criteria 5 and 6.
fn one_player_graphs() -> Vec<Arena> {
    (0..600u64)
        .map(|i| {
            let n = 1 + (i % 6) as usize;
            let d = 1 + (i % 3) as usize;
            let wmax = 1 + (i % 4) as i64;
            generate_arena(n, d, wmax, 90_000 + i).unwrap().with_owner(Owner::Eve)
        })
        .collect()
}

fn c5_morphisms() -> Outcome {
    let (mut built, mut refuted, mut perturbed) = (0, 0, 0);
    for (i, g) in one_player_graphs().iter().enumerate() {
        for v in 0..g.vertex_count() {
            let all_negative = reachable_cycles(g, v).iter().all(|c| cycle_sum(g, c) <= -1);
            match build_morphism(g, g.id(v)).unwrap() {
                MorphismOutcome::Built(phi) => {
                    ensure!(all_negative, "graph #{i} root {v}: built despite a non-negative cycle");
                    let sub = g.reachable_restriction(g.id(v)).unwrap();
                    ensure!(check_morphism(&sub, &phi).unwrap().is_empty(), "graph #{i}: check fails");
                    let m = i128::from(phi.m);
                    for (id, &t) in &phi.labels {
                        if t == 0 {
                            continue;
                        }
                        let u = sub.index_of(id).unwrap();
                        let tight = sub.out_edges(u).iter().any(|&e| {
                            let edge = sub.edge(e);
                            let t2 = i128::from(phi.labels[sub.id(edge.dst)]);
                            i128::from(t) == t2 + m * i128::from(edge.weight) + 1
                        });
                        ensure!(tight, "graph #{i}: label of {id} is not tight");
                        let mut lowered = phi.clone();
                        lowered.labels.insert(id.clone(), t - 1);
                        ensure!(
                            !check_morphism(&sub, &lowered).unwrap().is_empty(),
                            "graph #{i}: lowering {id} still a morphism"
                        );
                        perturbed += 1;
                    }
                    built += 1;
                }
                MorphismOutcome::Refuted(w) => {
                    ensure!(!all_negative, "graph #{i} root {v}: refuted though all cycles are negative");
                    ensure!(is_closed_walk(g, &w.cycle), "graph #{i}: witness is not a cycle");
                    ensure!(reachable(g, v)[g.edge(w.cycle[0]).src], "graph #{i}: witness unreachable");
                    let sum = cycle_sum(g, &w.cycle);
                    ensure!(sum >= 0 && sum == w.sum, "graph #{i}: witness sum {sum} vs {}", w.sum);
                    refuted += 1;
                }
            }
        }
    }
    ensure!(built > 0 && refuted > 0, "corpus lacks one of the cases");
    Ok(format!("{built} morphisms built and checked ({perturbed} tight labels perturbed), {refuted} refuted with verified witnesses"))
}

fn c6_slope_bound() -> Outcome {
    let (mut certs, mut paths) = (0, 0u64);
    for (i, g) in one_player_graphs().iter().enumerate() {
        for v in 0..g.vertex_count() {
            let SlopeOutcome::Certified(c) = find_slope_certificate(g, g.id(v)).unwrap() else {
                continue;
            };
            let (m, t) = (i128::from(c.m), i128::from(c.t));
            let mut broken = None;
            for_each_path(g, v, 2 * g.vertex_count(), &mut |len, sum| {
                paths += 1;
                if m * sum > t - len as i128 && broken.is_none() {
                    broken = Some(len);
                }
            });
            ensure!(broken.is_none(), "graph #{i} root {v}: path of length {broken:?} above the line");
            certs += 1;
        }
    }
    ensure!(certs > 0, "no certificates");
    Ok(format!("{certs} slope certificates, {paths} paths enumerated"))
}

fn shifted(a: &Arena, theta: &Rational) -> Arena {
    let (p, q) = (*theta.numer() as i64, *theta.denom() as i64);
    a.map_weights(|w| q * w - p)
}

fn c7_values() -> Outcome {
    let mut checks = 0;
    let games: Vec<Arena> = (0..120u64)
        .map(|i| generate_arena(1 + (i % 4) as usize, 3, 2, 31_000 + i).unwrap())
        .collect();
    for (i, a) in games.iter().enumerate() {
        let candidates = value_candidates(a);
        let regions: Vec<BTreeSet<String>> = candidates
            .iter()
            .map(|theta| oracle_winning_set(&shifted(a, theta)).unwrap())
            .collect();
        for v in 0..a.vertex_count() {
            let val = value(a, a.id(v)).unwrap();
            for (theta, region) in candidates.iter().zip(&regions) {
                ensure!(
                    region.contains(a.id(v)) == (*theta > val),
                    "arena #{i} vertex {}: value {val} but threshold {theta} disagrees",
                    a.id(v)
                );
                checks += 1;
            }
        }
    }

    // one-player arenas against cycle means; cycle means against enumeration
    let mut cycle_checks = 0;
    for i in 0..200u64 {
        let n = 1 + (i % 8) as usize;
        let base = generate_arena(n, 3, 3, 47_000 + i).unwrap();
        let cycles = simple_cycles(&base);
        let best = cycles
            .iter()
            .map(|c| Rational::new(cycle_sum(&base, c), c.len() as i128))
            .max();
        ensure!(max_cycle_mean(&base) == best, "graph #{i}: max cycle mean differs from enumeration");
        cycle_checks += 1;
        if n <= 5 {
            let eve = base.with_owner(Owner::Eve);
            let adam = base.with_owner(Owner::Adam);
            for v in 0..n {
                ensure!(value(&eve, eve.id(v)).unwrap() == min_cycle_mean_from(&eve, v).unwrap(), "all-Eve #{i}");
                ensure!(value(&adam, adam.id(v)).unwrap() == max_cycle_mean_from(&adam, v).unwrap(), "all-Adam #{i}");
                checks += 2;
            }
        }
    }
    Ok(format!("{checks} value/threshold checks on {} arenas, {cycle_checks} cycle-mean enumerations", games.len()))
}

fn c8_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_meanpayoff");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |args: &[String]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        (out.status.code(), out.stdout, out.stderr)
    };
    let s = |x: &str| x.to_owned();

    let arena = path("a.json");
    let cert = path("cert.json");
    let gen_a = vec![s("gen"), s("-n"), s("5"), s("-d"), s("3"), s("-w"), s("2"), s("--seed"), s("9"), s("-o"), path("g1.json")];
    let gen_b = vec![s("gen"), s("-n"), s("5"), s("-d"), s("3"), s("-w"), s("2"), s("--seed"), s("9"), s("-o"), path("g2.json")];
    run(&gen_a);
    run(&gen_b);
    let (g1, g2) = (std::fs::read(path("g1.json")).unwrap(), std::fs::read(path("g2.json")).unwrap());
    ensure!(!g1.is_empty() && g1 == g2, "gen output differs");

    // a game with a non-trivial Eve region for simulate
    let game = (0..)
        .map(|seed| generate_arena(5, 3, 2, 500 + seed).unwrap())
        .find(|a| !solve(a).unwrap().winning_eve.is_empty())
        .unwrap();
    std::fs::write(&arena, serialize_arena(&game)).unwrap();
    let from = solve(&game).unwrap().winning_eve.into_iter().next().unwrap();
    let first = game.id(0).to_owned();
    ensure!(run(&[s("solve"), arena.clone(), s("--emit-cert"), cert.clone()]).0 == Some(0), "solve failed");

    let commands: Vec<Vec<String>> = vec![
        vec![s("gen"), s("-n"), s("4"), s("-d"), s("2"), s("-w"), s("2"), s("--seed"), s("9")],
        vec![s("solve"), arena.clone()],
        vec![s("check-cert"), arena.clone(), cert.clone()],
        vec![s("value"), arena.clone(), s("--vertex"), first.clone()],
        vec![s("simulate"), arena.clone(), cert.clone(), s("--from"), from, s("--steps"), s("200"), s("--seed"), s("5")],
        vec![s("morphism"), arena.clone(), s("--root"), first],
        vec![s("mp-eval"), s("--prefix"), s("1,2"), s("--cycle"), s("-1,0"), s("--variant"), s("limsup-strict")],
        vec![s("u-edge"), s("2"), s("5"), s("1"), s("2"), s("2")],
        vec![s("oracle"), arena.clone()],
        vec![s("selftest"), s("--quick")],
    ];
    for args in &commands {
        let a = run(args);
        let b = run(args);
        ensure!(a == b, "`{}` is not deterministic", args.join(" "));
        ensure!(a.0 == Some(0), "`{}` exited with {:?}", args.join(" "), a.0);
        ensure!(!a.1.is_empty(), "`{}` printed nothing", args.join(" "));
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len() + 1))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 oracle equivalence", c1_oracle_equivalence),
        ("2 certificate round-trip and mutation", c2_certificates),
        ("3 telescoped U-path and play bounds", c3_lemma_bound),
        ("4 monotone-graph law", c4_monotone_law),
        ("5 morphism construction", c5_morphisms),
        ("6 slope-certificate path bound", c6_slope_bound),
        ("7 value consistency", c7_values),
        ("8 CLI determinism", c8_determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())))));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
