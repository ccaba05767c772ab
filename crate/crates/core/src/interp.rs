//! Semiring interpretations over the game signature {E, F, V₀, V₁}.
//!
//! An interpretation assigns a semiring value to every instantiated literal.
//! Membership literals for F, V₀, V₁ and (in)equalities are fixed to 0 or 1
//! by the game, so only edge literals are stored: the positive and negative
//! value per existing edge, plus explicit pairs for tracked absent edges.
//! Everything else defaults to (0, 1) lazily.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::game::{BuchiGame, EdgeId, PositionId, RepairSpec};
use crate::poly::{Poly, Var};
use crate::semiring::Semiring;

/// Which edges get their own indeterminate; everything untracked maps to 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrackingSpec {
    tracked: std::collections::BTreeSet<EdgeId>,
}

impl TrackingSpec {
    /// Track every edge of the game.
    pub fn all(game: &BuchiGame) -> TrackingSpec {
        TrackingSpec {
            tracked: game.edges().collect(),
        }
    }

    /// Track nothing; the interpretation becomes Boolean-valued.
    pub fn none() -> TrackingSpec {
        TrackingSpec::default()
    }

    pub fn from_labels<S: AsRef<str>>(
        game: &BuchiGame,
        labels: &[S],
    ) -> Result<TrackingSpec, Error> {
        let tracked = labels
            .iter()
            .map(|l| game.edge_by_label(l.as_ref()))
            .collect::<Result<_, _>>()?;
        Ok(TrackingSpec { tracked })
    }

    pub fn is_tracked(&self, e: EdgeId) -> bool {
        self.tracked.contains(&e)
    }
}

/// Per-literal semiring values for one game.
#[derive(Debug, Clone)]
pub struct Interpretation<V> {
    edge_pos: Vec<V>,
    edge_neg: Vec<V>,
    /// (π(Evw), π(¬Evw)) for absent pairs that carry non-default values.
    absent: BTreeMap<(PositionId, PositionId), (V, V)>,
    zero: V,
    one: V,
    model_defining: bool,
}

impl<V: Clone + PartialEq> Interpretation<V> {
    pub fn edge_value(&self, e: EdgeId) -> &V {
        &self.edge_pos[e.index()]
    }

    pub fn edge_neg_value(&self, e: EdgeId) -> &V {
        &self.edge_neg[e.index()]
    }

    /// (π(Evw), π(¬Evw)) for a pair that is not an edge. Pairs outside the
    /// tracked set materialize lazily as (0, 1).
    pub fn absent_pair_value(&self, from: PositionId, to: PositionId) -> (V, V) {
        self.absent
            .get(&(from, to))
            .cloned()
            .unwrap_or_else(|| (self.zero.clone(), self.one.clone()))
    }

    /// Absent pairs carrying non-default values, by source position.
    pub fn absent_pairs_from(
        &self,
        from: PositionId,
    ) -> impl Iterator<Item = (PositionId, &(V, V))> {
        self.absent
            .iter()
            .filter(move |((f, _), _)| *f == from)
            .map(|((_, t), v)| (*t, v))
    }

    /// Whether exactly one of π(L), π(¬L) is 0 for every literal.
    pub fn is_model_defining<S: Semiring<Value = V>>(&self, ring: &S) -> bool {
        let ok = |pos: &V, neg: &V| ring.is_zero(pos) != ring.is_zero(neg);
        self.edge_pos
            .iter()
            .zip(&self.edge_neg)
            .all(|(p, n)| ok(p, n))
            && self.absent.values().all(|(p, n)| ok(p, n))
    }

    /// Whether π(L) · π(¬L) = 0 for every literal. Holds for both the
    /// strategy-tracking and the repair interpretation.
    pub fn opposing_product_is_zero<S: Semiring<Value = V>>(&self, ring: &S) -> bool {
        let ok = |pos: &V, neg: &V| ring.is_zero(&ring.mul(pos, neg));
        self.edge_pos
            .iter()
            .zip(&self.edge_neg)
            .all(|(p, n)| ok(p, n))
            && self.absent.values().all(|(p, n)| ok(p, n))
    }

    /// Whether only positive edge literals carry values other than 0 and 1.
    pub fn is_edge_tracking<S: Semiring<Value = V>>(&self, ring: &S) -> bool {
        self.edge_neg.iter().all(|n| ring.is_zero(n))
            && self
                .absent
                .values()
                .all(|(p, n)| ring.is_zero(p) && ring.is_one(n))
    }

    /// The flag recorded at construction; π_rep± is not model-defining.
    pub fn model_defining_flag(&self) -> bool {
        self.model_defining
    }
}

/// The strategy-tracking interpretation: every tracked edge maps to its own
/// indeterminate (named by the edge label), untracked edges map to 1, and
/// all other literals are 0/1 according to the game.
pub fn pi_strat(game: &BuchiGame, tracking: &TrackingSpec) -> Interpretation<Poly> {
    let edge_pos = game
        .edges()
        .map(|e| {
            if tracking.is_tracked(e) {
                Poly::var(Var::new(game.label(e)))
            } else {
                Poly::one()
            }
        })
        .collect();
    let edge_neg = game.edges().map(|_| Poly::zero()).collect();
    Interpretation {
        edge_pos,
        edge_neg,
        absent: BTreeMap::new(),
        zero: Poly::zero(),
        one: Poly::one(),
        model_defining: true,
    }
}

/// The repair interpretation over dual indeterminates: every edge in E⁻ and
/// every pair in E⁺ gets the pair (X, X~) on its positive and negative
/// literal. Returns the interpretation together with the duality relation.
/// Not model-defining, but opposing literals still multiply to zero.
pub fn pi_rep(
    game: &BuchiGame,
    spec: &RepairSpec,
) -> (Interpretation<Poly>, Arc<crate::dual::DualityRelation>) {
    let mut relation = crate::dual::DualityRelation::new();
    let mut edge_pos = Vec::with_capacity(game.edge_count());
    let mut edge_neg = Vec::with_capacity(game.edge_count());
    for e in game.edges() {
        if spec.removable().contains(&e) {
            let base = Var::new(game.label(e));
            relation.pair_with_partner(base.clone());
            edge_pos.push(Poly::var(base.clone()));
            edge_neg.push(Poly::var(base.partner()));
        } else {
            edge_pos.push(Poly::one());
            edge_neg.push(Poly::zero());
        }
    }
    let mut absent = BTreeMap::new();
    for &(from, to) in spec.addable() {
        let base = Var::new(game.synthesized_label(from, to));
        relation.pair_with_partner(base.clone());
        absent.insert(
            (from, to),
            (Poly::var(base.clone()), Poly::var(base.partner())),
        );
    }
    let interp = Interpretation {
        edge_pos,
        edge_neg,
        absent,
        zero: Poly::zero(),
        one: Poly::one(),
        model_defining: false,
    };
    (interp, Arc::new(relation))
}

/// Evaluates a polynomial interpretation pointwise into a target semiring.
/// The assignment must cover every indeterminate the interpretation uses.
pub fn compose_with_target<S: Semiring>(
    interp: &Interpretation<Poly>,
    assignment: &BTreeMap<Var, S::Value>,
    ring: &S,
) -> Result<Interpretation<S::Value>, Error> {
    let edge_pos = interp
        .edge_pos
        .iter()
        .map(|p| p.eval(assignment, ring))
        .collect::<Result<_, _>>()?;
    let edge_neg = interp
        .edge_neg
        .iter()
        .map(|p| p.eval(assignment, ring))
        .collect::<Result<_, _>>()?;
    let absent = interp
        .absent
        .iter()
        .map(|(k, (p, n))| Ok((*k, (p.eval(assignment, ring)?, n.eval(assignment, ring)?))))
        .collect::<Result<_, Error>>()?;
    Ok(Interpretation {
        edge_pos,
        edge_neg,
        absent,
        zero: ring.zero(),
        one: ring.one(),
        model_defining: interp.model_defining,
    })
}
