//! Queries over computed winning-region polynomials: winner report,
//! edge-subset feasibility, finite-use analysis and game repair.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dual::DualRing;
use crate::error::Error;
use crate::fixpoint::{solve_win0_poly, SolveOptions};
use crate::game::{solve_boolean, BuchiGame, EdgeId, Player, PositionId, RepairSpec};
use crate::interp::pi_rep;
use crate::poly::{Exponent, Monomial, Poly};
use crate::strategy::{is_positional_profile, EdgeProfile};

/// Decodes a monomial over edge-label indeterminates back into an edge
/// profile. Dual variables and variables that name no edge are ignored.
pub fn profile_of_monomial(m: &Monomial, game: &BuchiGame) -> EdgeProfile {
    let mut profile = EdgeProfile::zero(game);
    for (var, exp) in m.iter() {
        if var.is_dual() {
            continue;
        }
        if let Ok(e) = game.edge_by_label(var.base_name()) {
            profile.set(e, exp);
        }
    }
    profile
}

/// One monomial of the winning-region polynomial, decoded.
#[derive(Debug, Clone, Serialize)]
pub struct MonomialReport {
    /// Occurrence counts of the support edges.
    pub profile: BTreeMap<String, Exponent>,
    pub positional: bool,
    #[serde(skip)]
    pub edge_profile: EdgeProfile,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportCounts {
    /// Absorption-dominant winning strategies, up to equivalence.
    pub dominant: usize,
    /// How many of them are positional.
    pub positional: usize,
}

/// Everything the polynomial at one position reveals: whether Player 0
/// wins, the edge profiles of all absorption-dominant winning strategies,
/// and which of those are positional.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub position: String,
    pub winner: bool,
    /// The winning-region polynomial itself.
    pub value: Poly,
    pub monomials: Vec<MonomialReport>,
    pub counts: ReportCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repairs: Option<Vec<RepairEntry>>,
}

/// Decodes the polynomial computed for `v` into an analysis report.
pub fn report(poly: &Poly, game: &BuchiGame, v: PositionId) -> AnalysisReport {
    let monomials: Vec<MonomialReport> = poly
        .monomials()
        .iter()
        .map(|m| {
            let edge_profile = profile_of_monomial(m, game);
            MonomialReport {
                profile: edge_profile.to_label_map(game),
                positional: is_positional_profile(&edge_profile, game),
                edge_profile,
            }
        })
        .collect();
    let positional = monomials.iter().filter(|m| m.positional).count();
    AnalysisReport {
        position: game.name(v).to_string(),
        winner: !poly.is_zero(),
        value: poly.clone(),
        counts: ReportCounts {
            dominant: monomials.len(),
            positional,
        },
        monomials,
        repairs: None,
    }
}

/// Whether Player 0 can still win when only `allowed` edges may be used:
/// true iff some monomial's support is contained in the allowed set.
pub fn wins_with_subset(poly: &Poly, game: &BuchiGame, allowed: &BTreeSet<EdgeId>) -> bool {
    poly.monomials().iter().any(|m| {
        m.vars().all(|var| {
            !var.is_dual()
                && game
                    .edge_by_label(var.base_name())
                    .is_ok_and(|e| allowed.contains(&e))
        })
    })
}

/// Outcome of the finite-use analysis for an edge with infinite count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteUse {
    /// Every play consistent with the strategy uses the edge finitely often.
    BoundedPerPlay,
    /// Some play uses the edge infinitely often.
    InfinitePlayExists,
}

/// Distinguishes, for an absorption-dominant winning profile with
/// `#ₑ = ∞` at `e = uw`, whether some play actually uses `e` infinitely
/// often: among the monomials computed for `w` there is a unique positional
/// one absorbing the strategy's value, and the answer is whether `e`
/// occurs in it. Zero or multiple candidates violate the method's
/// precondition and are reported as such.
pub fn finite_use_check(
    all_polys: &[Poly],
    game: &BuchiGame,
    s_profile: &EdgeProfile,
    e: EdgeId,
) -> Result<FiniteUse, Error> {
    if s_profile.count(e) != Exponent::Inf {
        return Err(Error::FiniteUsePrecondition(format!(
            "edge `{}` does not occur infinitely often in the strategy",
            game.label(e)
        )));
    }
    let w = game.edge(e).to;
    let candidates: Vec<EdgeProfile> = all_polys[w.index()]
        .monomials()
        .iter()
        .map(|m| profile_of_monomial(m, game))
        .filter(|p| is_positional_profile(p, game) && p.absorbs(s_profile))
        .collect();
    match candidates.as_slice() {
        [unique] => {
            if unique.count(e).is_zero() {
                Ok(FiniteUse::BoundedPerPlay)
            } else {
                Ok(FiniteUse::InfinitePlayExists)
            }
        }
        [] => Err(Error::FiniteUsePrecondition(format!(
            "no positional monomial at `{}` absorbs the strategy value",
            game.name(w)
        ))),
        many => Err(Error::FiniteUsePrecondition(format!(
            "{} positional monomials at `{}` absorb the strategy value, expected exactly one",
            many.len(),
            game.name(w)
        ))),
    }
}

/// Edge sets of one candidate edit: pairs to add and edges to remove.
pub type RepairEdit = (BTreeSet<(PositionId, PositionId)>, BTreeSet<EdgeId>);

/// One repair: a set of edges to add and remove, drawn from the spec.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Repair {
    pub add: BTreeSet<(PositionId, PositionId)>,
    pub remove: BTreeSet<EdgeId>,
    pub minimal: bool,
    pub verified: bool,
}

impl Repair {
    pub fn is_empty(&self) -> bool {
        self.add.is_empty() && self.remove.is_empty()
    }

    pub fn size(&self) -> usize {
        self.add.len() + self.remove.len()
    }

    fn subsumes(&self, other: &Repair) -> bool {
        self.add.is_subset(&other.add) && self.remove.is_subset(&other.remove)
    }

    /// Rendered edge set: removals by label, additions by their
    /// synthesized `from__to` label.
    pub fn edge_names(&self, game: &BuchiGame) -> Vec<String> {
        let mut names: Vec<String> = self
            .remove
            .iter()
            .map(|&e| game.label(e).to_string())
            .chain(self.add.iter().map(|&(f, t)| game.synthesized_label(f, t)))
            .collect();
        names.sort();
        names
    }
}

/// Serialized form of a repair.
#[derive(Debug, Clone, Serialize)]
pub struct RepairEntry {
    pub edges: Vec<String>,
    pub minimal: bool,
    pub verified: bool,
}

#[derive(Debug, Clone)]
pub struct RepairResult {
    /// The dual winning-region polynomial at the query position.
    pub value: Poly,
    /// Extracted repairs, smallest first; minimal ones form an inclusion
    /// antichain, and every entry has been re-checked with the Boolean
    /// solver.
    pub repairs: Vec<Repair>,
}

impl RepairResult {
    pub fn entries(&self, game: &BuchiGame) -> Vec<RepairEntry> {
        self.repairs
            .iter()
            .map(|r| RepairEntry {
                edges: r.edge_names(game),
                minimal: r.minimal,
                verified: r.verified,
            })
            .collect()
    }
}

/// Computes all repairs within `spec` that make Player 0 win from `v`, by
/// solving the winning-region formula under the dual-indeterminate repair
/// interpretation and reading the add/remove sets off the monomials.
/// Every minimal repair appears, and every reported repair is verified
/// against the Boolean solver — a verification failure is a hard error.
///
/// `full_exponents` keeps occurrence counts in the dual polynomial;
/// by default exponents are dropped (the repair reading ignores them).
pub fn compute_repairs(
    game: &BuchiGame,
    spec: &RepairSpec,
    v: PositionId,
    full_exponents: bool,
    opts: &SolveOptions,
) -> Result<RepairResult, Error> {
    let (interp, relation) = pi_rep(game, spec);
    let ring = DualRing::new(relation, !full_exponents);
    let solution = solve_win0_poly(game, &interp, &ring, opts)?;
    let poly = solution.value(v).clone();

    let addable_by_label: BTreeMap<String, (PositionId, PositionId)> = spec
        .addable()
        .iter()
        .map(|&(f, t)| (game.synthesized_label(f, t), (f, t)))
        .collect();

    let mut sets: BTreeSet<RepairEdit> = BTreeSet::new();
    for m in poly.monomials() {
        let mut add = BTreeSet::new();
        let mut remove = BTreeSet::new();
        for var in m.vars() {
            if var.is_dual() {
                // a dual variable of a removable edge asks for its deletion
                if let Ok(e) = game.edge_by_label(var.base_name()) {
                    if spec.removable().contains(&e) {
                        remove.insert(e);
                    }
                }
            } else if let Some(&pair) = addable_by_label.get(var.base_name()) {
                add.insert(pair);
            }
        }
        sets.insert((add, remove));
    }

    let mut repairs: Vec<Repair> = Vec::new();
    for (add, remove) in sets {
        let repaired = game.edited(&add, &remove);
        let verified = solve_boolean(&repaired)[v.index()] == Player::Zero;
        let repair = Repair {
            add,
            remove,
            minimal: false,
            verified,
        };
        if !verified {
            return Err(Error::RepairVerification(format!(
                "{{{}}} does not make Player 0 win from `{}`",
                repair.edge_names(game).join(", "),
                game.name(v)
            )));
        }
        repairs.push(repair);
    }
    for i in 0..repairs.len() {
        repairs[i].minimal = !repairs
            .iter()
            .enumerate()
            .any(|(j, other)| i != j && other.subsumes(&repairs[i]));
    }
    repairs.sort_by_key(|r| (r.size(), r.edge_names(game)));
    Ok(RepairResult {
        value: poly,
        repairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoint::solve_win0;
    use crate::game::tests::{REPAIR_DEMO, TWO_POSITION};
    use crate::interp::{pi_strat, TrackingSpec};
    use crate::strategy::tests::TWO_PATH;

    fn solved_two_position() -> (BuchiGame, Vec<Poly>) {
        let game = BuchiGame::parse(TWO_POSITION).unwrap();
        let interp = pi_strat(&game, &TrackingSpec::all(&game));
        let solution = solve_win0(&game, &interp, &SolveOptions::default()).unwrap();
        (game, solution.values)
    }

    #[test]
    fn report_on_the_worked_example() {
        let (game, values) = solved_two_position();
        let v = game.position_by_name("v").unwrap();
        let rep = report(&values[v.index()], &game, v);
        assert!(rep.winner);
        assert_eq!(rep.counts.dominant, 1);
        assert_eq!(rep.counts.positional, 1);
        assert_eq!(rep.monomials[0].profile.get("b"), Some(&Exponent::Fin(1)));
        assert_eq!(rep.monomials[0].profile.get("c"), Some(&Exponent::Inf));
    }

    #[test]
    fn report_on_a_losing_position() {
        let game = BuchiGame::parse("position v 0\nedge a v v\n").unwrap();
        let v = game.position_by_name("v").unwrap();
        let rep = report(&Poly::zero(), &game, v);
        assert!(!rep.winner);
        assert!(rep.monomials.is_empty());
        assert_eq!(rep.counts.dominant, 0);
    }

    #[test]
    fn report_counts_nonpositional_strategies() {
        let game = BuchiGame::parse(TWO_PATH).unwrap();
        let interp = pi_strat(&game, &TrackingSpec::all(&game));
        let solution = solve_win0(&game, &interp, &SolveOptions::default()).unwrap();
        let u = game.position_by_name("u").unwrap();
        let rep = report(solution.value(u), &game, u);
        assert_eq!(rep.counts.dominant, 3);
        assert_eq!(rep.counts.positional, 2);
    }

    #[test]
    fn subset_feasibility() {
        let (game, values) = solved_two_position();
        let v = game.position_by_name("v").unwrap();
        let poly = &values[v.index()];
        let ids = |labels: &[&str]| -> BTreeSet<EdgeId> {
            labels
                .iter()
                .map(|l| game.edge_by_label(l).unwrap())
                .collect()
        };
        // the monomial bc∞ avoids a
        assert!(wins_with_subset(poly, &game, &ids(&["b", "c"])));
        assert!(!wins_with_subset(poly, &game, &ids(&["a", "c"])));
        // allowing everything is just the winner flag
        assert!(wins_with_subset(poly, &game, &ids(&["a", "b", "c"])));
    }

    #[test]
    fn finite_use_on_a_self_loop() {
        let game = BuchiGame::parse("position v 0 target\nedge x v v\n").unwrap();
        let interp = pi_strat(&game, &TrackingSpec::all(&game));
        let solution = solve_win0(&game, &interp, &SolveOptions::default()).unwrap();
        let x = game.edge_by_label("x").unwrap();
        let profile = profile_of_monomial(&solution.values[0].monomials()[0], &game);
        assert_eq!(
            finite_use_check(&solution.values, &game, &profile, x).unwrap(),
            FiniteUse::InfinitePlayExists
        );
    }

    #[test]
    fn finite_use_distinguishes_bounded_edges() {
        // Player 1 at u either cycles through z forever or diverts along k
        // into the stay-at-w loop. Edge k occurs infinitely often in the
        // strategy tree (once under every u occurrence) yet at most once in
        // each play; edge m recurs within a single play.
        let game = BuchiGame::parse(
            "position u 1\nposition w 0 target\nposition z 0 target\n\
             edge k u w\nedge g u z\nedge h z u\nedge m w w\n",
        )
        .unwrap();
        let u = game.position_by_name("u").unwrap();
        let interp = pi_strat(&game, &TrackingSpec::all(&game));
        let solution = solve_win0(&game, &interp, &SolveOptions::default()).unwrap();
        let k = game.edge_by_label("k").unwrap();
        let m = game.edge_by_label("m").unwrap();
        let winning = crate::strategy::enumerate_winning(&game, u, 10_000).unwrap();
        assert_eq!(winning.len(), 1);
        let profile = &winning[0].0;
        assert_eq!(profile.count(k), Exponent::Inf);
        // the unique positional absorbing strategy at w stays at w and
        // avoids k, so k is played at most once per play
        assert_eq!(
            finite_use_check(&solution.values, &game, profile, k).unwrap(),
            FiniteUse::BoundedPerPlay
        );
        // m occurs in the stay-at-w strategy, so some play uses it forever
        assert_eq!(
            finite_use_check(&solution.values, &game, profile, m).unwrap(),
            FiniteUse::InfinitePlayExists
        );
    }

    #[test]
    fn finite_use_requires_an_infinite_count() {
        let (game, values) = solved_two_position();
        let b = game.edge_by_label("b").unwrap();
        let v = game.position_by_name("v").unwrap();
        let profile = profile_of_monomial(&values[v.index()].monomials()[0], &game);
        assert!(matches!(
            finite_use_check(&values, &game, &profile, b),
            Err(Error::FiniteUsePrecondition(_))
        ));
    }

    #[test]
    fn removing_the_loop_repairs_the_demo_game() {
        let game = BuchiGame::parse(REPAIR_DEMO).unwrap();
        let v = game.position_by_name("v").unwrap();
        let a = game.edge_by_label("a").unwrap();
        let spec = RepairSpec::new(&game, [], [a]).unwrap();
        let result = compute_repairs(&game, &spec, v, false, &SolveOptions::default()).unwrap();
        assert_eq!(result.repairs.len(), 1);
        let repair = &result.repairs[0];
        assert!(repair.minimal && repair.verified);
        assert_eq!(repair.edge_names(&game), ["a"]);
    }

    #[test]
    fn empty_spec_on_a_losing_position_yields_nothing() {
        let game = BuchiGame::parse(REPAIR_DEMO).unwrap();
        let v = game.position_by_name("v").unwrap();
        let spec = RepairSpec::new(&game, [], []).unwrap();
        let result = compute_repairs(&game, &spec, v, false, &SolveOptions::default()).unwrap();
        assert!(result.repairs.is_empty());
        assert!(result.value.is_zero());
    }

    #[test]
    fn winning_positions_admit_the_empty_repair() {
        let game = BuchiGame::parse(REPAIR_DEMO).unwrap();
        let w = game.position_by_name("w").unwrap();
        let a = game.edge_by_label("a").unwrap();
        let spec = RepairSpec::new(&game, [], [a]).unwrap();
        let result = compute_repairs(&game, &spec, w, false, &SolveOptions::default()).unwrap();
        assert!(result.repairs.iter().any(|r| r.is_empty() && r.minimal));
    }

    #[test]
    fn non_minimal_repairs_are_reported_alongside_minimal_ones() {
        // Player 1 at v can stall on loop a or divert along d; removing a
        // alone repairs, and the polynomial also tracks positive use of b.
        let game = BuchiGame::parse(
            "position v 1\nposition w 0 target\nposition z 0\n\
             edge a v v\nedge b v w\nedge d v z\nedge zz z z\nedge c w w\n",
        )
        .unwrap();
        let v = game.position_by_name("v").unwrap();
        let a = game.edge_by_label("a").unwrap();
        let d = game.edge_by_label("d").unwrap();
        let spec = RepairSpec::new(&game, [], [a, d]).unwrap();
        let result = compute_repairs(&game, &spec, v, false, &SolveOptions::default()).unwrap();
        let minimal: Vec<_> = result.repairs.iter().filter(|r| r.minimal).collect();
        assert_eq!(minimal.len(), 1);
        assert_eq!(minimal[0].edge_names(&game), ["a", "d"]);
    }

    #[test]
    fn adding_an_edge_can_be_the_repair() {
        // w's target loop is unreachable for Player 0 until v -> w exists
        let game = BuchiGame::parse("position v 0\nposition w 0 target\nedge a v v\nedge c w w\n")
            .unwrap();
        let v = game.position_by_name("v").unwrap();
        let w = game.position_by_name("w").unwrap();
        let spec = RepairSpec::new(&game, [(v, w)], []).unwrap();
        let result = compute_repairs(&game, &spec, v, false, &SolveOptions::default()).unwrap();
        assert_eq!(result.repairs.len(), 1);
        assert_eq!(result.repairs[0].edge_names(&game), ["v__w"]);
        assert!(result.repairs[0].minimal);
    }

    #[test]
    fn monomials_evaluate_to_one_under_their_own_repair_assignment() {
        // the Boolean assignment that enacts a monomial's repair: variables
        // of the monomial map to 1, untouched addable pairs stay absent,
        // untouched removable edges stay present
        use crate::dual::DualPoly;
        use crate::poly::Var;
        use crate::semiring::Boolean;
        use std::sync::Arc;

        let game = BuchiGame::parse(REPAIR_DEMO).unwrap();
        let v = game.position_by_name("v").unwrap();
        let a = game.edge_by_label("a").unwrap();
        let w = game.position_by_name("w").unwrap();
        let spec = RepairSpec::new(&game, [(w, v)], [a]).unwrap();
        let (_, relation) = crate::interp::pi_rep(&game, &spec);
        let result = compute_repairs(&game, &spec, v, true, &SolveOptions::default()).unwrap();
        assert!(!result.value.is_zero());

        for m in result.value.monomials() {
            let mut h = std::collections::BTreeMap::new();
            for var in m.vars() {
                h.insert(var.clone(), true);
                h.insert(var.partner(), false);
            }
            // untouched tracked literals keep their value in the game
            for base in [Var::new("a"), Var::new(game.synthesized_label(w, v))] {
                if !m.contains(&base) && !m.contains(&base.partner()) {
                    let present = game.edge_by_label(base.base_name()).is_ok();
                    h.insert(base.clone(), present);
                    h.insert(base.partner(), !present);
                }
            }
            let single = DualPoly::new(Poly::from_monomial(m.clone()), Arc::clone(&relation));
            assert!(single.eval(&h, &Boolean).unwrap());
            let whole = DualPoly::new(result.value.clone(), Arc::clone(&relation));
            assert!(whole.eval(&h, &Boolean).unwrap());
        }
    }

    #[test]
    fn report_on_a_four_class_game() {
        // a self-loop at the start competes with three classes that route
        // through a two-path merge; the mixed class is not positional
        let game = BuchiGame::parse(
            "position v 0 target\nposition u 1\nposition x 0\nposition y 0\nposition m 0\n\
             position s 0 target\nposition t 0 target\n\
             edge d v v\nedge a v u\nedge b u x\nedge c u y\nedge p x m\nedge q y m\n\
             edge e m s\nedge f m t\nedge gs s s\nedge gt t t\n",
        )
        .unwrap();
        let v = game.position_by_name("v").unwrap();
        let interp = pi_strat(&game, &TrackingSpec::all(&game));
        let opts = SolveOptions {
            gfp_mode: crate::fixpoint::GfpMode::Accelerated,
            ..SolveOptions::default()
        };
        let solution = crate::fixpoint::solve_win0(&game, &interp, &opts).unwrap();
        let rep = report(solution.value(v), &game, v);
        assert_eq!(rep.counts.dominant, 4);
        assert_eq!(rep.counts.positional, 3);
        // validated against the enumeration oracle, not asserted from text
        let oracle =
            crate::strategy::dominant_sum(&game, &interp, &crate::semiring::PolyRing, v, 1_000_000)
                .unwrap();
        assert_eq!(&oracle, solution.value(v));
    }

    #[test]
    fn full_exponent_mode_keeps_counts() {
        let game = BuchiGame::parse(REPAIR_DEMO).unwrap();
        let v = game.position_by_name("v").unwrap();
        let a = game.edge_by_label("a").unwrap();
        let spec = RepairSpec::new(&game, [], [a]).unwrap();
        let flat = compute_repairs(&game, &spec, v, false, &SolveOptions::default()).unwrap();
        let full = compute_repairs(&game, &spec, v, true, &SolveOptions::default()).unwrap();
        assert_eq!(flat.repairs, full.repairs);
        // the flat value has unit exponents only
        assert!(flat
            .value
            .monomials()
            .iter()
            .all(|m| m.iter().all(|(_, e)| e == Exponent::Fin(1))));
    }
}
