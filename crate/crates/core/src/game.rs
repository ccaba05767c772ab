//! Büchi games: the model, its text and JSON formats, validation, repair
//! application, and a classical attractor-based Boolean solver.
//!
//! A game is `(V, V₀, V₁, E, F)`: finitely many positions split between the
//! two players, labeled edges (at most one per ordered pair), and a target
//! set `F`. Player 0 wins a play iff it visits `F` infinitely often.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;

/// Owner of a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    Zero,
    One,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Zero => Player::One,
            Player::One => Player::Zero,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Zero => write!(f, "0"),
            Player::One => write!(f, "1"),
        }
    }
}

/// Index of a position within its game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionId(pub u32);

/// Index of an edge within its game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl PositionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub name: String,
    pub owner: Player,
    pub target: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub from: PositionId,
    pub to: PositionId,
}

/// Unvalidated game data as read from a file. Mirrors the serialized
/// fields one-to-one; [`RawGame::validate`] reports every invariant
/// violation and [`RawGame::build`] produces the checked game.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGame {
    pub positions: Vec<RawPosition>,
    pub edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPosition {
    pub name: String,
    pub owner: Option<u8>,
    #[serde(default)]
    pub target: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub label: String,
    pub from: String,
    pub to: String,
}

/// A structural invariant violation, carrying the identity of the offending
/// position or edge.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("game has no positions")]
    NoPositions,
    #[error("position `{0}`: duplicate position")]
    DuplicatePosition(String),
    #[error("position `{0}`: owner missing")]
    OwnerMissing(String),
    #[error("position `{name}`: owner must be 0 or 1, got {got}")]
    OwnerInvalid { name: String, got: u8 },
    #[error("edge `{0}`: duplicate label")]
    DuplicateLabel(String),
    #[error("edge `{label}`: unknown position `{position}`")]
    UnknownPosition { label: String, position: String },
    #[error("edges `{first}` and `{second}` connect the same pair {from} -> {to}")]
    DuplicatePair {
        first: String,
        second: String,
        from: String,
        to: String,
    },
    #[error("position `{0}`: vE empty (no outgoing edge)")]
    EmptySuccessors(String),
}

/// A syntax error in the text format.
#[derive(Debug, Clone, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid game:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

impl RawGame {
    /// Parses the line-oriented text format:
    ///
    /// ```text
    /// # comment
    /// position <name> <0|1> [target]
    /// edge <label> <from> <to>
    /// ```
    pub fn parse(text: &str) -> Result<RawGame, ParseError> {
        let mut raw = RawGame::default();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let mut tokens = content.split_whitespace();
            let Some(directive) = tokens.next() else {
                continue;
            };
            let column = line.find(directive).map_or(1, |c| c + 1);
            let err = |message: String| ParseError {
                line: lineno,
                column,
                message,
            };
            match directive {
                "position" => {
                    let name = tokens
                        .next()
                        .ok_or_else(|| err("position needs a name".into()))?;
                    let owner_tok = tokens
                        .next()
                        .ok_or_else(|| err(format!("position `{name}` needs an owner (0 or 1)")))?;
                    let owner = match owner_tok {
                        "0" => 0,
                        "1" => 1,
                        other => {
                            return Err(err(format!(
                                "position `{name}`: owner must be 0 or 1, got `{other}`"
                            )))
                        }
                    };
                    let target = match tokens.next() {
                        None => false,
                        Some("target") => true,
                        Some(other) => {
                            return Err(err(format!(
                                "position `{name}`: unexpected token `{other}` (only `target` is allowed)"
                            )))
                        }
                    };
                    raw.positions.push(RawPosition {
                        name: name.to_string(),
                        owner: Some(owner),
                        target,
                    });
                }
                "edge" => {
                    let mut next = |what: &str| {
                        tokens
                            .next()
                            .map(str::to_string)
                            .ok_or_else(|| err(format!("edge needs {what}")))
                    };
                    let label = next("a label")?;
                    let from = next("a source position")?;
                    let to = next("a target position")?;
                    if let Some(extra) = tokens.next() {
                        return Err(err(format!("edge `{label}`: unexpected token `{extra}`")));
                    }
                    raw.edges.push(RawEdge { label, from, to });
                }
                other => {
                    return Err(err(format!(
                        "unknown directive `{other}` (expected `position` or `edge`)"
                    )))
                }
            }
        }
        Ok(raw)
    }

    /// Reports every invariant violation.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.positions.is_empty() {
            violations.push(Violation::NoPositions);
        }
        let mut names = BTreeSet::new();
        for p in &self.positions {
            if !names.insert(p.name.as_str()) {
                violations.push(Violation::DuplicatePosition(p.name.clone()));
            }
            match p.owner {
                None => violations.push(Violation::OwnerMissing(p.name.clone())),
                Some(o) if o > 1 => violations.push(Violation::OwnerInvalid {
                    name: p.name.clone(),
                    got: o,
                }),
                Some(_) => {}
            }
        }
        let mut labels = BTreeSet::new();
        let mut pairs: BTreeMap<(&str, &str), &str> = BTreeMap::new();
        let mut has_out: BTreeSet<&str> = BTreeSet::new();
        for e in &self.edges {
            if !labels.insert(e.label.as_str()) {
                violations.push(Violation::DuplicateLabel(e.label.clone()));
            }
            for endpoint in [&e.from, &e.to] {
                if !names.contains(endpoint.as_str()) {
                    violations.push(Violation::UnknownPosition {
                        label: e.label.clone(),
                        position: endpoint.clone(),
                    });
                }
            }
            match pairs.get(&(e.from.as_str(), e.to.as_str())) {
                Some(first) => violations.push(Violation::DuplicatePair {
                    first: first.to_string(),
                    second: e.label.clone(),
                    from: e.from.clone(),
                    to: e.to.clone(),
                }),
                None => {
                    pairs.insert((e.from.as_str(), e.to.as_str()), e.label.as_str());
                }
            }
            has_out.insert(e.from.as_str());
        }
        for p in &self.positions {
            if !has_out.contains(p.name.as_str()) {
                violations.push(Violation::EmptySuccessors(p.name.clone()));
            }
        }
        violations
    }

    /// Builds the checked game, failing with the full violation list.
    pub fn build(&self) -> Result<BuchiGame, GameError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        Ok(BuchiGame::from_raw_unchecked(self))
    }
}

/// A validated Büchi game. Positions and edges are indexed; per-position
/// out-edges are kept in edge-label order so every traversal and iteration
/// schedule is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiGame {
    positions: Vec<Position>,
    edges: Vec<Edge>,
    by_name: BTreeMap<String, PositionId>,
    by_label: BTreeMap<String, EdgeId>,
    by_pair: BTreeMap<(PositionId, PositionId), EdgeId>,
    out: Vec<Vec<EdgeId>>,
}

impl BuchiGame {
    pub fn parse(text: &str) -> Result<BuchiGame, GameError> {
        RawGame::parse(text)?.build()
    }

    /// Assembles the indexed form. Callers guarantee referential integrity
    /// and uniqueness; sink positions are tolerated here (the Boolean solver
    /// gives them move-or-lose semantics), public construction goes through
    /// [`RawGame::build`] which rejects them.
    fn from_parts(positions: Vec<Position>, edges: Vec<Edge>) -> BuchiGame {
        let by_name = positions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), PositionId(i as u32)))
            .collect();
        let by_label = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.label.clone(), EdgeId(i as u32)))
            .collect();
        let by_pair = edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.from, e.to), EdgeId(i as u32)))
            .collect();
        let mut out = vec![Vec::new(); positions.len()];
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by(|&a, &b| edges[a].label.cmp(&edges[b].label));
        for i in order {
            out[edges[i].from.index()].push(EdgeId(i as u32));
        }
        BuchiGame {
            positions,
            edges,
            by_name,
            by_label,
            by_pair,
            out,
        }
    }

    fn from_raw_unchecked(raw: &RawGame) -> BuchiGame {
        let positions = raw
            .positions
            .iter()
            .map(|p| Position {
                name: p.name.clone(),
                owner: if p.owner == Some(1) {
                    Player::One
                } else {
                    Player::Zero
                },
                target: p.target,
            })
            .collect::<Vec<_>>();
        let by_name: BTreeMap<&str, u32> = raw
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.as_str(), i as u32))
            .collect();
        let edges = raw
            .edges
            .iter()
            .map(|e| Edge {
                label: e.label.clone(),
                from: PositionId(by_name[e.from.as_str()]),
                to: PositionId(by_name[e.to.as_str()]),
            })
            .collect();
        BuchiGame::from_parts(positions, edges)
    }

    pub fn position_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn positions(&self) -> impl Iterator<Item = PositionId> + '_ {
        (0..self.positions.len()).map(|i| PositionId(i as u32))
    }

    pub fn position(&self, id: PositionId) -> &Position {
        &self.positions[id.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(|i| EdgeId(i as u32))
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    pub fn owner(&self, id: PositionId) -> Player {
        self.positions[id.index()].owner
    }

    pub fn is_target(&self, id: PositionId) -> bool {
        self.positions[id.index()].target
    }

    pub fn name(&self, id: PositionId) -> &str {
        &self.positions[id.index()].name
    }

    pub fn label(&self, id: EdgeId) -> &str {
        &self.edges[id.index()].label
    }

    /// Out-edges of a position, in edge-label order.
    pub fn out_edges(&self, id: PositionId) -> &[EdgeId] {
        &self.out[id.index()]
    }

    pub fn position_by_name(&self, name: &str) -> Result<PositionId, Error> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPosition(name.to_string()))
    }

    pub fn edge_by_label(&self, label: &str) -> Result<EdgeId, Error> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn edge_between(&self, from: PositionId, to: PositionId) -> Option<EdgeId> {
        self.by_pair.get(&(from, to)).copied()
    }

    /// The label synthesized for an added edge.
    pub fn synthesized_label(&self, from: PositionId, to: PositionId) -> String {
        format!("{}__{}", self.name(from), self.name(to))
    }

    pub fn to_raw(&self) -> RawGame {
        RawGame {
            positions: self
                .positions
                .iter()
                .map(|p| RawPosition {
                    name: p.name.clone(),
                    owner: Some(if p.owner == Player::One { 1 } else { 0 }),
                    target: p.target,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    label: e.label.clone(),
                    from: self.name(e.from).to_string(),
                    to: self.name(e.to).to_string(),
                })
                .collect(),
        }
    }

    /// Serializes to the text format; `parse` of the result reproduces the
    /// game exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.positions {
            s.push_str("position ");
            s.push_str(&p.name);
            s.push_str(if p.owner == Player::One { " 1" } else { " 0" });
            if p.target {
                s.push_str(" target");
            }
            s.push('\n');
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {} {}\n",
                e.label,
                self.name(e.from),
                self.name(e.to)
            ));
        }
        s
    }

    /// Graphviz rendering: boxes for Player 1, ellipses for Player 0,
    /// doubled borders for targets.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph game {\n");
        for p in &self.positions {
            let shape = if p.owner == Player::One {
                "box"
            } else {
                "ellipse"
            };
            let peripheries = if p.target { 2 } else { 1 };
            s.push_str(&format!(
                "  \"{}\" [shape={shape}, peripheries={peripheries}];\n",
                p.name
            ));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.name(e.from),
                self.name(e.to),
                e.label
            ));
        }
        s.push_str("}\n");
        s
    }

    /// Applies an edge edit without consulting any repair spec and without
    /// the vE ≠ ∅ check; added edges get synthesized labels. Positions left
    /// without successors lose for their owner under [`solve_boolean`],
    /// matching the winning-condition formula (an empty disjunction is
    /// false, an empty conjunction is true). Repair verification relies on
    /// this; user-facing edits go through [`apply_repair`].
    pub fn edited(
        &self,
        add: &BTreeSet<(PositionId, PositionId)>,
        remove: &BTreeSet<EdgeId>,
    ) -> BuchiGame {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !remove.contains(&EdgeId(*i as u32)))
            .map(|(_, e)| e.clone())
            .collect();
        for &(from, to) in add {
            edges.push(Edge {
                label: self.synthesized_label(from, to),
                from,
                to,
            });
        }
        BuchiGame::from_parts(self.positions.clone(), edges)
    }
}

/// The sets of edges a repair may add (`E⁺`, pairs currently absent) and
/// remove (`E⁻`, existing edge labels).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairSpec {
    addable: BTreeSet<(PositionId, PositionId)>,
    removable: BTreeSet<EdgeId>,
}

impl RepairSpec {
    pub fn new(
        game: &BuchiGame,
        addable: impl IntoIterator<Item = (PositionId, PositionId)>,
        removable: impl IntoIterator<Item = EdgeId>,
    ) -> Result<RepairSpec, Error> {
        let mut spec = RepairSpec::default();
        for (from, to) in addable {
            if game.edge_between(from, to).is_some() {
                return Err(Error::RepairOutsideSpec(format!(
                    "pair {} -> {} is already an edge and cannot be in E+",
                    game.name(from),
                    game.name(to)
                )));
            }
            spec.addable.insert((from, to));
        }
        for e in removable {
            spec.removable.insert(e);
        }
        Ok(spec)
    }

    /// Parses `from:to` pair names and edge labels.
    pub fn from_names(
        game: &BuchiGame,
        add_pairs: &[(String, String)],
        remove_labels: &[String],
    ) -> Result<RepairSpec, Error> {
        let addable = add_pairs
            .iter()
            .map(|(f, t)| Ok((game.position_by_name(f)?, game.position_by_name(t)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let removable = remove_labels
            .iter()
            .map(|l| game.edge_by_label(l))
            .collect::<Result<Vec<_>, Error>>()?;
        RepairSpec::new(game, addable, removable)
    }

    pub fn addable(&self) -> &BTreeSet<(PositionId, PositionId)> {
        &self.addable
    }

    pub fn removable(&self) -> &BTreeSet<EdgeId> {
        &self.removable
    }

    pub fn is_empty(&self) -> bool {
        self.addable.is_empty() && self.removable.is_empty()
    }
}

/// Applies a repair within a spec, yielding the modified game. Added edges
/// get deterministic `from__to` labels. Fails when the repair steps outside
/// the spec or strands a position without successors.
pub fn apply_repair(
    game: &BuchiGame,
    add: &BTreeSet<(PositionId, PositionId)>,
    remove: &BTreeSet<EdgeId>,
    spec: &RepairSpec,
) -> Result<BuchiGame, Error> {
    for pair in add {
        if !spec.addable.contains(pair) {
            return Err(Error::RepairOutsideSpec(format!(
                "pair {} -> {} is not in E+",
                game.name(pair.0),
                game.name(pair.1)
            )));
        }
    }
    for e in remove {
        if !spec.removable.contains(e) {
            return Err(Error::RepairOutsideSpec(format!(
                "edge `{}` is not in E-",
                game.label(*e)
            )));
        }
    }
    let repaired = game.edited(add, remove);
    for v in repaired.positions() {
        if repaired.out_edges(v).is_empty() {
            return Err(Error::EmptySuccessors(repaired.name(v).to_string()));
        }
    }
    Ok(repaired)
}

/// Solves the Büchi game exactly with the classical repeated-attractor
/// (recurrence set) algorithm. Every position is won by exactly one player.
///
/// Positions without successors are treated as lost for their owner, which
/// matches the fixed-point formula semantics (an empty disjunction is
/// false, an empty conjunction is true).
pub fn solve_boolean(game: &BuchiGame) -> Vec<Player> {
    let n = game.position_count();
    let mut recurrence: BTreeSet<PositionId> =
        game.positions().filter(|&v| game.is_target(v)).collect();
    loop {
        let attractor = attractor_zero(game, &recurrence);
        let next: BTreeSet<PositionId> = game
            .positions()
            .filter(|&v| game.is_target(v) && can_step_into(game, v, &attractor))
            .collect();
        if next == recurrence {
            break;
        }
        recurrence = next;
    }
    let winning = attractor_zero(game, &recurrence);
    (0..n)
        .map(|i| {
            if winning.contains(&PositionId(i as u32)) {
                Player::Zero
            } else {
                Player::One
            }
        })
        .collect()
}

/// Player 0's attractor of `targets`: the least set from which Player 0 can
/// force the play into `targets`.
fn attractor_zero(game: &BuchiGame, targets: &BTreeSet<PositionId>) -> BTreeSet<PositionId> {
    let mut attractor = targets.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for v in game.positions() {
            if attractor.contains(&v) {
                continue;
            }
            if can_step_into(game, v, &attractor) {
                attractor.insert(v);
                changed = true;
            }
        }
    }
    attractor
}

/// Whether the owner-appropriate one-step condition into `set` holds at `v`:
/// some successor for Player 0, all successors for Player 1.
fn can_step_into(game: &BuchiGame, v: PositionId, set: &BTreeSet<PositionId>) -> bool {
    let succs = game.out_edges(v).iter().map(|&e| game.edge(e).to);
    match game.owner(v) {
        Player::Zero => {
            let mut succs = succs;
            succs.any(|w| set.contains(&w))
        }
        Player::One => {
            let mut succs = succs;
            succs.all(|w| set.contains(&w))
        }
    }
}
