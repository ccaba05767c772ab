//! Finite strategy representation, enumeration and valuation.
//!
//! A persistent strategy of Player 0 is represented by a finite subtree of
//! the tree unraveling: Player 0 nodes carry one child, Player 1 nodes carry
//! all successors, and a branch ends as soon as its position repeats an
//! ancestor — a back-edge to that ancestor closes the tree into a lasso
//! automaton (the persistence closure). Branches never repeat a position
//! internally, so the height is at most |V| and the whole space of such
//! automata is finite. Every absorption-dominant winning strategy lives in
//! this space, which makes the enumeration an independent oracle for the
//! fixed-point solver: the sum of the values of all enumerated winning
//! strategies equals the winning-region polynomial.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::game::{BuchiGame, EdgeId, Player, PositionId};
use crate::interp::Interpretation;
use crate::poly::Exponent;
use crate::semiring::Semiring;

/// Default ceiling on nodes created during one enumeration.
pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Index of a node within its automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonNode {
    pub position: PositionId,
    pub parent: Option<NodeId>,
    /// Edge taken from the parent; `None` at the root.
    pub via: Option<EdgeId>,
    pub children: Vec<NodeId>,
    /// For leaves: the proper ancestor with the same position that the
    /// unraveling continues from.
    pub back_edge: Option<NodeId>,
}

/// A persistence-closed strategy automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyAutomaton {
    nodes: Vec<AutomatonNode>,
}

/// Per-edge occurrence counts `#ₑ(S)` of the unraveled strategy tree,
/// dense over the game's edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeProfile {
    counts: Vec<Exponent>,
}

/// Outcome of comparing two edge profiles under absorption, from the
/// perspective of the first profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Absorption {
    /// The first strictly absorbs the second.
    Strict,
    /// Identical profiles.
    Equivalent,
    /// The first is strictly absorbed by the second.
    Absorbed,
    Incomparable,
}

impl EdgeProfile {
    pub fn zero(game: &BuchiGame) -> EdgeProfile {
        EdgeProfile {
            counts: vec![Exponent::ZERO; game.edge_count()],
        }
    }

    pub fn from_labels(
        game: &BuchiGame,
        counts: &[(&str, Exponent)],
    ) -> Result<EdgeProfile, Error> {
        let mut profile = EdgeProfile::zero(game);
        for (label, count) in counts {
            let e = game.edge_by_label(label)?;
            profile.counts[e.index()] = *count;
        }
        Ok(profile)
    }

    pub fn count(&self, e: EdgeId) -> Exponent {
        self.counts[e.index()]
    }

    pub fn set(&mut self, e: EdgeId, count: Exponent) {
        self.counts[e.index()] = count;
    }

    /// Edges with a positive count.
    pub fn support(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| EdgeId(i as u32))
    }

    /// Componentwise comparison per the absorption order on strategies.
    pub fn compare(&self, other: &EdgeProfile) -> Absorption {
        let le = self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b);
        let ge = self.counts.iter().zip(&other.counts).all(|(a, b)| a >= b);
        match (le, ge) {
            (true, true) => Absorption::Equivalent,
            (true, false) => Absorption::Strict,
            (false, true) => Absorption::Absorbed,
            (false, false) => Absorption::Incomparable,
        }
    }

    /// `self ⪰ other`: every count of `self` is at most the matching count.
    pub fn absorbs(&self, other: &EdgeProfile) -> bool {
        matches!(
            self.compare(other),
            Absorption::Strict | Absorption::Equivalent
        )
    }

    /// Rendered counts of the support, for display and JSON export.
    pub fn to_label_map(&self, game: &BuchiGame) -> BTreeMap<String, Exponent> {
        self.support()
            .map(|e| (game.label(e).to_string(), self.count(e)))
            .collect()
    }
}

impl StrategyAutomaton {
    pub fn nodes(&self) -> &[AutomatonNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &AutomatonNode {
        &self.nodes[id.index()]
    }

    pub fn root_position(&self) -> PositionId {
        self.nodes[0].position
    }

    fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.index()].back_edge.is_some()
    }

    /// Transitions of the lasso automaton: tree edges with leaf targets
    /// redirected to their back-edge ancestors. Only internal nodes remain
    /// as sources and targets.
    pub fn transitions(&self) -> Vec<(NodeId, EdgeId, NodeId)> {
        let mut out = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.back_edge.is_some() {
                continue;
            }
            for &child in &node.children {
                let target = match self.nodes[child.index()].back_edge {
                    Some(ancestor) => ancestor,
                    None => child,
                };
                let via = self.nodes[child.index()]
                    .via
                    .expect("children have a via edge");
                out.push((NodeId(i as u32), via, target));
            }
        }
        out
    }

    /// The edge profile of the unraveled infinite strategy tree: an edge
    /// occurrence is a node of the unraveling, so a transition contributes
    /// the number of walks from the root to its source — finite (a path
    /// count over the acyclic part) unless the source is reachable from a
    /// cycle of the automaton.
    pub fn unfold_profile(&self, game: &BuchiGame) -> EdgeProfile {
        let n = self.nodes.len();
        let transitions = self.transitions();
        let mut succs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &(from, _, to) in &transitions {
            succs[from.index()].push(to);
        }

        // nodes lying on a cycle
        let mut on_cycle = vec![false; n];
        for start in 0..n {
            if self.is_leaf(NodeId(start as u32)) {
                continue;
            }
            let mut seen = vec![false; n];
            let mut stack: Vec<NodeId> = succs[start].clone();
            while let Some(node) = stack.pop() {
                if seen[node.index()] {
                    continue;
                }
                seen[node.index()] = true;
                stack.extend(&succs[node.index()]);
            }
            if seen[start] {
                on_cycle[start] = true;
            }
        }

        // nodes reachable from some cycle have infinite walk counts
        let mut infinite = on_cycle.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&i| on_cycle[i]).collect();
        while let Some(i) = stack.pop() {
            for &next in &succs[i] {
                if !infinite[next.index()] {
                    infinite[next.index()] = true;
                    stack.push(next.index());
                }
            }
        }

        // walk counts over the acyclic remainder, in topological order
        let mut walks: Vec<u64> = vec![0; n];
        if !infinite[0] {
            walks[0] = 1;
        }
        let mut indegree = vec![0usize; n];
        for &(from, _, to) in &transitions {
            if !infinite[from.index()] && !infinite[to.index()] {
                indegree[to.index()] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n)
            .filter(|&i| !infinite[i] && !self.is_leaf(NodeId(i as u32)) && indegree[i] == 0)
            .collect();
        while let Some(i) = queue.pop() {
            for &(from, _, to) in &transitions {
                if from.index() != i || infinite[to.index()] {
                    continue;
                }
                walks[to.index()] += walks[i];
                indegree[to.index()] -= 1;
                if indegree[to.index()] == 0 {
                    queue.push(to.index());
                }
            }
        }

        let mut profile = EdgeProfile::zero(game);
        for &(from, edge, _) in &transitions {
            let occurrences = if infinite[from.index()] {
                Exponent::Inf
            } else {
                Exponent::Fin(walks[from.index()])
            };
            profile.set(edge, profile.count(edge).plus(occurrences));
        }
        profile
    }

    /// A strategy wins iff every play visits the target set infinitely
    /// often; plays are the infinite walks of the lasso automaton, so this
    /// holds iff the non-target part of the automaton is acyclic.
    pub fn is_winning(&self, game: &BuchiGame) -> bool {
        let n = self.nodes.len();
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (from, _, to) in self.transitions() {
            if !game.is_target(self.nodes[from.index()].position)
                && !game.is_target(self.nodes[to.index()].position)
            {
                succs[from.index()].push(to.index());
            }
        }
        // cycle detection over non-target internal nodes
        let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
        for start in 0..n {
            if state[start] != 0
                || self.is_leaf(NodeId(start as u32))
                || game.is_target(self.nodes[start].position)
            {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some(&mut (node, ref mut cursor)) = stack.last_mut() {
                if *cursor < succs[node].len() {
                    let next = succs[node][*cursor];
                    *cursor += 1;
                    match state[next] {
                        0 => {
                            state[next] = 1;
                            stack.push((next, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Checks persistence for externally supplied automata: along every
    /// root-to-leaf path, each Player 0 position has a unique chosen
    /// successor. Automata produced by the enumeration satisfy this by
    /// construction.
    pub fn is_persistent(&self, game: &BuchiGame) -> bool {
        fn walk(
            automaton: &StrategyAutomaton,
            game: &BuchiGame,
            node: NodeId,
            choices: &mut BTreeMap<PositionId, EdgeId>,
        ) -> bool {
            let n = automaton.node(node);
            if game.owner(n.position) == Player::Zero && !n.children.is_empty() {
                let chosen = automaton.node(n.children[0]).via.expect("child via edge");
                match choices.get(&n.position).copied() {
                    Some(previous) if previous != chosen => return false,
                    Some(_) => {}
                    None => {
                        choices.insert(n.position, chosen);
                        let ok = n
                            .children
                            .iter()
                            .all(|&c| walk(automaton, game, c, choices));
                        choices.remove(&n.position);
                        return ok;
                    }
                }
            }
            n.children
                .iter()
                .all(|&c| walk(automaton, game, c, choices))
        }
        walk(self, game, NodeId(0), &mut BTreeMap::new())
    }

    /// Graphviz rendering: back-edges dashed, target positions doubled.
    pub fn to_dot(&self, game: &BuchiGame) -> String {
        let mut s = String::from("digraph strategy {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let p = game.position(node.position);
            let shape = if p.owner == Player::One {
                "box"
            } else {
                "ellipse"
            };
            let peripheries = if p.target { 2 } else { 1 };
            s.push_str(&format!(
                "  n{i} [label=\"{}\", shape={shape}, peripheries={peripheries}];\n",
                p.name
            ));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for &child in &node.children {
                let via = self.nodes[child.index()].via.expect("child via edge");
                s.push_str(&format!(
                    "  n{i} -> n{} [label=\"{}\"];\n",
                    child.index(),
                    game.label(via)
                ));
            }
            if let Some(back) = node.back_edge {
                s.push_str(&format!("  n{i} -> n{} [style=dashed];\n", back.index()));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Whether an edge profile belongs to a positional strategy: every Player 0
/// position that sources a support edge does so with exactly one edge.
pub fn is_positional_profile(profile: &EdgeProfile, game: &BuchiGame) -> bool {
    let mut choices: BTreeMap<PositionId, usize> = BTreeMap::new();
    for e in profile.support() {
        let from = game.edge(e).from;
        if game.owner(from) == Player::Zero {
            *choices.entry(from).or_insert(0) += 1;
        }
    }
    choices.values().all(|&n| n == 1)
}

/// The value of a strategy under an edge-tracking interpretation: the
/// product of the edge values raised to their occurrence counts.
pub fn strategy_value<S: Semiring>(
    profile: &EdgeProfile,
    game: &BuchiGame,
    interp: &Interpretation<S::Value>,
    ring: &S,
) -> S::Value {
    let _ = game;
    let mut value = ring.one();
    for e in profile.support() {
        value = ring.mul(&value, &ring.pow(interp.edge_value(e), profile.count(e)));
    }
    value
}

/// Enumerates every persistence-closed strategy automaton from `start`,
/// in depth-first edge-label order over Player 0 choices. Errs out when
/// more than `budget` nodes would be created.
pub fn enumerate_strategies(
    game: &BuchiGame,
    start: PositionId,
    budget: usize,
) -> Result<Vec<StrategyAutomaton>, Error> {
    let mut nodes = vec![AutomatonNode {
        position: start,
        parent: None,
        via: None,
        children: Vec::new(),
        back_edge: None,
    }];
    let mut out = Vec::new();
    let mut created = 1usize;
    expand(game, &mut nodes, 0, &mut out, &mut created, budget)?;
    Ok(out)
}

fn expand(
    game: &BuchiGame,
    nodes: &mut Vec<AutomatonNode>,
    idx: usize,
    out: &mut Vec<StrategyAutomaton>,
    created: &mut usize,
    budget: usize,
) -> Result<(), Error> {
    if idx == nodes.len() {
        out.push(StrategyAutomaton {
            nodes: nodes.clone(),
        });
        return Ok(());
    }
    let position = nodes[idx].position;

    // persistence closure: a repeated position ends the branch
    let mut ancestor = nodes[idx].parent;
    while let Some(a) = ancestor {
        if nodes[a.index()].position == position {
            nodes[idx].back_edge = Some(a);
            let result = expand(game, nodes, idx + 1, out, created, budget);
            nodes[idx].back_edge = None;
            return result;
        }
        ancestor = nodes[a.index()].parent;
    }

    fn make_child(game: &BuchiGame, nodes: &mut Vec<AutomatonNode>, idx: usize, e: EdgeId) {
        let child = NodeId(nodes.len() as u32);
        nodes.push(AutomatonNode {
            position: game.edge(e).to,
            parent: Some(NodeId(idx as u32)),
            via: Some(e),
            children: Vec::new(),
            back_edge: None,
        });
        nodes[idx].children.push(child);
    }

    match game.owner(position) {
        Player::One => {
            // all moves of the opponent
            let saved = nodes.len();
            *created += game.out_edges(position).len();
            if *created > budget {
                return Err(Error::EnumerationBudget(budget));
            }
            for &e in game.out_edges(position).to_vec().iter() {
                make_child(game, nodes, idx, e);
            }
            let result = expand(game, nodes, idx + 1, out, created, budget);
            nodes.truncate(saved);
            nodes[idx].children.clear();
            result
        }
        Player::Zero => {
            // unique choice, one branch per out-edge
            for &e in game.out_edges(position).to_vec().iter() {
                *created += 1;
                if *created > budget {
                    return Err(Error::EnumerationBudget(budget));
                }
                let saved = nodes.len();
                make_child(game, nodes, idx, e);
                let result = expand(game, nodes, idx + 1, out, created, budget);
                nodes.truncate(saved);
                nodes[idx].children.clear();
                result?;
            }
            Ok(())
        }
    }
}

/// All winning strategy automata from `start`, grouped by edge profile with
/// the first representative kept. Contains every absorption-dominant
/// winning strategy (those are persistent and of bounded height), possibly
/// alongside dominated persistent ones.
pub fn enumerate_winning(
    game: &BuchiGame,
    start: PositionId,
    budget: usize,
) -> Result<Vec<(EdgeProfile, StrategyAutomaton)>, Error> {
    let mut by_profile: BTreeMap<EdgeProfile, StrategyAutomaton> = BTreeMap::new();
    for automaton in enumerate_strategies(game, start, budget)? {
        if automaton.is_winning(game) {
            let profile = automaton.unfold_profile(game);
            by_profile.entry(profile).or_insert(automaton);
        }
    }
    Ok(by_profile.into_iter().collect())
}

/// The Sum-of-Strategies value: the semiring sum of the values of all
/// enumerated winning strategies. Absorption discards dominated summands,
/// so this equals the winning-region value of the fixed-point solver and
/// serves as its independent oracle.
pub fn dominant_sum<S: Semiring>(
    game: &BuchiGame,
    interp: &Interpretation<S::Value>,
    ring: &S,
    start: PositionId,
    budget: usize,
) -> Result<S::Value, Error> {
    let mut sum = ring.zero();
    for (profile, _) in enumerate_winning(game, start, budget)? {
        sum = ring.add(&sum, &strategy_value(&profile, game, interp, ring));
    }
    Ok(sum)
}
