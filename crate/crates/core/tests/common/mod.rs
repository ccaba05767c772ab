//! Shared test support: seeded random games and brute-force oracles that
//! stay independent of the solver pipeline they check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::Rng;

use winpoly::game::{BuchiGame, EdgeId, PositionId, RawEdge, RawGame, RawPosition};
use winpoly::strategy::StrategyAutomaton;
use winpoly::Player;

/// A random valid game: every position owned and with at least one
/// successor, no duplicate pairs, labels `e0, e1, …` in insertion order.
pub fn random_game(rng: &mut StdRng, max_positions: usize, max_edges: usize) -> BuchiGame {
    let n = rng.random_range(1..=max_positions);
    let mut raw = RawGame::default();
    for i in 0..n {
        raw.positions.push(RawPosition {
            name: format!("p{i}"),
            owner: Some(if rng.random_bool(0.5) { 1 } else { 0 }),
            target: rng.random_bool(0.4),
        });
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    // one mandatory successor per position
    for from in 0..n {
        let to = rng.random_range(0..n);
        pairs.insert((from, to));
    }
    let max_edges = max_edges.min(n * n);
    let wanted = rng.random_range(pairs.len()..=max_edges.max(pairs.len()));
    while pairs.len() < wanted {
        pairs.insert((rng.random_range(0..n), rng.random_range(0..n)));
    }
    for (k, (from, to)) in pairs.iter().enumerate() {
        raw.edges.push(RawEdge {
            label: format!("e{k}"),
            from: format!("p{from}"),
            to: format!("p{to}"),
        });
    }
    raw.build().expect("generated games are valid")
}

/// Brute-force Büchi solving by enumerating the positional strategies of
/// Player 0. For a fixed positional choice the opponent ranges over all
/// paths of the induced graph, so Player 0 wins from `v` iff no cycle
/// avoiding the target set is reachable from `v`. Positional determinacy
/// makes this exact.
pub fn brute_force_boolean(game: &BuchiGame) -> Vec<Player> {
    let n = game.position_count();
    let zero_positions: Vec<PositionId> = game
        .positions()
        .filter(|&v| game.owner(v) == Player::Zero)
        .collect();
    let mut winners = vec![Player::One; n];

    let mut choice_idx = vec![0usize; zero_positions.len()];
    loop {
        // induced successor graph under the current positional choice
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in game.positions() {
            match game.owner(v) {
                Player::Zero => {
                    let slot = zero_positions.iter().position(|&p| p == v).unwrap();
                    let e = game.out_edges(v)[choice_idx[slot]];
                    succs[v.index()].push(game.edge(e).to.index());
                }
                Player::One => {
                    for &e in game.out_edges(v) {
                        succs[v.index()].push(game.edge(e).to.index());
                    }
                }
            }
        }
        // nodes on a cycle that avoids the target set
        let mut on_bad_cycle = vec![false; n];
        for start in 0..n {
            if game.is_target(PositionId(start as u32)) {
                continue;
            }
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = succs[start]
                .iter()
                .copied()
                .filter(|&w| !game.is_target(PositionId(w as u32)))
                .collect();
            while let Some(w) = stack.pop() {
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                for &x in &succs[w] {
                    if !game.is_target(PositionId(x as u32)) {
                        stack.push(x);
                    }
                }
            }
            if seen[start] {
                on_bad_cycle[start] = true;
            }
        }
        // v is winning under this choice iff it cannot reach a bad cycle
        let mut reaches_bad = on_bad_cycle.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if !reaches_bad[v] && succs[v].iter().any(|&w| reaches_bad[w]) {
                    reaches_bad[v] = true;
                    changed = true;
                }
            }
        }
        for v in 0..n {
            if !reaches_bad[v] {
                winners[v] = Player::Zero;
            }
        }

        // next positional choice
        let mut slot = 0;
        loop {
            if slot == zero_positions.len() {
                return winners;
            }
            choice_idx[slot] += 1;
            if choice_idx[slot] < game.out_edges(zero_positions[slot]).len() {
                break;
            }
            choice_idx[slot] = 0;
            slot += 1;
        }
    }
}

/// Direct lasso analysis of a strategy automaton: some play uses `edge`
/// infinitely often iff one of its transition instances lies on a cycle,
/// i.e. the instance's target can reach its source.
pub fn lasso_edge_recurs(automaton: &StrategyAutomaton, edge: EdgeId) -> bool {
    let transitions = automaton.transitions();
    let n = automaton.nodes().len();
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(from, _, to) in &transitions {
        succs[from.index()].push(to.index());
    }
    let reaches = |from: usize, to: usize| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            if seen[x] {
                continue;
            }
            seen[x] = true;
            stack.extend(&succs[x]);
        }
        false
    };
    transitions
        .iter()
        .filter(|(_, e, _)| *e == edge)
        .any(|&(from, _, to)| reaches(to.index(), from.index()))
}

pub type RepairEdit = (BTreeSet<(PositionId, PositionId)>, BTreeSet<EdgeId>);

/// All repairs within the spec found by exhaustive subset search with the
/// Boolean solver, and the inclusion-minimal ones among them.
pub fn brute_force_repairs(
    game: &BuchiGame,
    addable: &[(PositionId, PositionId)],
    removable: &[EdgeId],
    v: PositionId,
) -> Vec<RepairEdit> {
    let items: Vec<Result<(PositionId, PositionId), EdgeId>> = addable
        .iter()
        .map(|&p| Ok(p))
        .chain(removable.iter().map(|&e| Err(e)))
        .collect();
    let mut winning_subsets = Vec::new();
    for mask in 0..(1u32 << items.len()) {
        let mut add = BTreeSet::new();
        let mut remove = BTreeSet::new();
        for (i, item) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                match item {
                    Ok(pair) => {
                        add.insert(*pair);
                    }
                    Err(e) => {
                        remove.insert(*e);
                    }
                }
            }
        }
        let repaired = game.edited(&add, &remove);
        if winpoly::solve_boolean(&repaired)[v.index()] == Player::Zero {
            winning_subsets.push((add, remove));
        }
    }
    // inclusion-minimal repairs
    winning_subsets
        .iter()
        .filter(|(add, remove)| {
            !winning_subsets.iter().any(|(a2, r2)| {
                (a2, r2) != (add, remove) && a2.is_subset(add) && r2.is_subset(remove)
            })
        })
        .cloned()
        .collect()
}
