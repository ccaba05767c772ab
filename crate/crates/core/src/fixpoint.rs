//! The winning-region equation system and its nested fixed-point solution.
//!
//! The winning region of Player 0 is the greatest solution of `Y = Z*(Y)`,
//! where `Z*(Y)` is the least solution of one equation per position:
//! target positions combine their successors' `Y` values, the rest combine
//! `Z` values; Player 0 positions sum over successors, Player 1 positions
//! multiply. With an edge-tracking interpretation the factors collapse to
//! `π(Evw) · var`; in general a Player 1 factor is `π(¬Evw) + π(Evw) · var`.
//!
//! The inner least fixed point is reached by ascending Kleene iteration and
//! stabilizes at a finite antichain. The outer greatest fixed point can
//! descend forever (`bc, bc², …`), so two modes close it off:
//!
//! * saturating — finite exponents above a bound collapse to ∞; a repeat is
//!   certified only when no exponent sits exactly at the bound and one
//!   unsaturated application reproduces the candidate, otherwise the bound
//!   doubles and the descent reruns;
//! * accelerated — monomials that grew by a factor with unchanged variable
//!   support are pumped to their ∞-power limit, then descent continues to
//!   an exact repeat.
//!
//! Both modes verify the result is a true fixed point before returning.
//! Iteration is Jacobi (every position reads the previous iterate), which
//! pins the trace output byte for byte.

use crate::error::Error;
use crate::game::{BuchiGame, Player, PositionId};
use crate::interp::Interpretation;
use crate::poly::{Exponent, Monomial, Poly};
use crate::semiring::{PolyRing, Semiring};

/// How the outer greatest fixed point detects convergence on polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GfpMode {
    #[default]
    Saturating,
    Accelerated,
}

/// Hard ceiling for the doubling of the saturation bound.
pub const SATURATION_BOUND_CAP: u64 = 4096;

/// Whether an inner iteration reads the previous iterate only (Jacobi) or
/// sees values updated earlier in the same sweep (Gauss–Seidel). Both reach
/// the same least fixed point; golden traces pin Jacobi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterationSchedule {
    #[default]
    Jacobi,
    GaussSeidel,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub gfp_mode: GfpMode,
    pub schedule: IterationSchedule,
    /// Finite exponents above this bound saturate to ∞ (saturating mode).
    pub saturation_bound: u64,
    /// Hard cap on iteration steps of either fixed-point loop.
    pub max_steps: usize,
    /// Abort when an iterate's antichain grows past this many monomials.
    /// Saturating descents materialize every intermediate iterate, which
    /// can be exponentially wide on games with mutually recursive target
    /// cycles; the accelerated mode collapses those early.
    pub max_monomials: usize,
    /// Record every iterate for diagnostic output.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gfp_mode: GfpMode::Saturating,
            schedule: IterationSchedule::Jacobi,
            saturation_bound: 64,
            max_steps: 10_000,
            max_monomials: 1_000_000,
            trace: false,
        }
    }
}

/// One summand or factor of a position equation: `pos · var(successor)`,
/// or `neg + pos · var(successor)` when the negative edge literal carries
/// a value (repair interpretations).
#[derive(Debug, Clone)]
pub struct Term<V> {
    pub successor: PositionId,
    pub pos: V,
    pub neg: Option<V>,
}

/// The simplified equation for one position.
#[derive(Debug, Clone)]
pub struct PositionEquation<V> {
    pub owner: Player,
    pub in_target: bool,
    pub terms: Vec<Term<V>>,
}

impl<V> PositionEquation<V> {
    /// Target positions read the outer `Y` of their successors, all others
    /// the inner `Z`.
    pub fn reads_outer(&self) -> bool {
        self.in_target
    }
}

/// One equation per position, indexed like the game's positions.
#[derive(Debug, Clone)]
pub struct EquationSystem<V> {
    equations: Vec<PositionEquation<V>>,
}

impl<V> EquationSystem<V> {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn equation(&self, v: PositionId) -> &PositionEquation<V> {
        &self.equations[v.index()]
    }
}

/// Builds the equation system for a game under an interpretation. Every
/// game edge from `v` contributes exactly one term to `v`'s equation;
/// tracked absent pairs contribute their general `π(¬E) + π(E) · var` form.
/// Terms that cannot influence the result (zero summands, factors equal to
/// one by absorption) are dropped.
pub fn build_equations<S: Semiring>(
    game: &BuchiGame,
    interp: &Interpretation<S::Value>,
    ring: &S,
) -> EquationSystem<S::Value> {
    let equations = game
        .positions()
        .map(|v| {
            let owner = game.owner(v);
            let mut terms = Vec::new();
            let mut push = |successor: PositionId, pos: S::Value, neg: S::Value| {
                match owner {
                    Player::Zero => {
                        // summand pos · var; negative literals never occur in sums
                        if !ring.is_zero(&pos) {
                            terms.push(Term {
                                successor,
                                pos,
                                neg: None,
                            });
                        }
                    }
                    Player::One => {
                        // factor neg + pos · var; a factor with neg = 1 is 1 by absorption
                        if !ring.is_one(&neg) {
                            let neg = if ring.is_zero(&neg) { None } else { Some(neg) };
                            terms.push(Term {
                                successor,
                                pos,
                                neg,
                            });
                        }
                    }
                }
            };
            for &e in game.out_edges(v) {
                push(
                    game.edge(e).to,
                    interp.edge_value(e).clone(),
                    interp.edge_neg_value(e).clone(),
                );
            }
            for (to, (pos, neg)) in interp.absent_pairs_from(v) {
                push(to, pos.clone(), neg.clone());
            }
            PositionEquation {
                owner,
                in_target: game.is_target(v),
                terms,
            }
        })
        .collect();
    EquationSystem { equations }
}

/// Upper bound on the number of candidate monomials the next evaluation of
/// this equation generates, before absorption.
fn estimate_width<S: Semiring>(
    ring: &S,
    eq: &PositionEquation<S::Value>,
    outer: &[S::Value],
    inner: &[S::Value],
) -> usize {
    let var = |w: PositionId| {
        if eq.reads_outer() {
            &outer[w.index()]
        } else {
            &inner[w.index()]
        }
    };
    match eq.owner {
        Player::Zero => eq.terms.iter().fold(0usize, |acc, t| {
            acc.saturating_add(
                ring.size_hint(&t.pos)
                    .saturating_mul(ring.size_hint(var(t.successor))),
            )
        }),
        Player::One => eq.terms.iter().fold(1usize, |acc, t| {
            let factor = ring
                .size_hint(&t.pos)
                .saturating_mul(ring.size_hint(var(t.successor)))
                .saturating_add(t.neg.as_ref().map_or(0, |n| ring.size_hint(n)));
            acc.saturating_mul(factor)
        }),
    }
}

fn eval_equation<S: Semiring>(
    ring: &S,
    eq: &PositionEquation<S::Value>,
    outer: &[S::Value],
    inner: &[S::Value],
) -> S::Value {
    let var = |w: PositionId| {
        if eq.reads_outer() {
            &outer[w.index()]
        } else {
            &inner[w.index()]
        }
    };
    match eq.owner {
        Player::Zero => eq.terms.iter().fold(ring.zero(), |acc, t| {
            ring.add(&acc, &ring.mul(&t.pos, var(t.successor)))
        }),
        Player::One => eq.terms.iter().fold(ring.one(), |acc, t| {
            let step = ring.mul(&t.pos, var(t.successor));
            let factor = match &t.neg {
                Some(neg) => ring.add(neg, &step),
                None => step,
            };
            ring.mul(&acc, &factor)
        }),
    }
}

/// The least solution of the inner equations, given outer values `Y`:
/// ascending Kleene iteration from the all-zero map until two consecutive
/// iterates coincide. The step budget is `|V| · (1 + max antichain size
/// seen)`, capped by `max_steps`; exhausting it signals a bug, since the
/// ascending chain is dominated by the finite limit antichain.
pub fn lfp_inner<S: Semiring>(
    ring: &S,
    sys: &EquationSystem<S::Value>,
    outer: &[S::Value],
    opts: &SolveOptions,
    mut trace: Option<&mut Vec<Vec<S::Value>>>,
) -> Result<Vec<S::Value>, Error> {
    let n = sys.len();
    let mut z: Vec<S::Value> = vec![ring.zero(); n];
    if let Some(t) = trace.as_deref_mut() {
        t.push(z.clone());
    }
    let mut steps = 0usize;
    let mut max_size = 1usize;
    loop {
        // A single product step can blow up far past the width limit before
        // any between-step check sees it; bail on the candidate estimate.
        for eq in &sys.equations {
            if estimate_width(ring, eq, outer, &z) > opts.max_monomials {
                return Err(Error::MonomialLimit(opts.max_monomials));
            }
        }
        let next: Vec<S::Value> = match opts.schedule {
            IterationSchedule::Jacobi => sys
                .equations
                .iter()
                .map(|eq| eval_equation(ring, eq, outer, &z))
                .collect(),
            IterationSchedule::GaussSeidel => {
                let mut fresh = z.clone();
                for (i, eq) in sys.equations.iter().enumerate() {
                    fresh[i] = eval_equation(ring, eq, outer, &fresh);
                }
                fresh
            }
        };
        if next == z {
            return Ok(z);
        }
        steps += 1;
        for value in &next {
            max_size = max_size.max(ring.size_hint(value));
        }
        let budget = n.saturating_mul(1 + max_size).min(opts.max_steps);
        if steps > budget {
            return Err(Error::StepBudget { steps });
        }
        if max_size > opts.max_monomials {
            return Err(Error::MonomialLimit(opts.max_monomials));
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(next.clone());
        }
        z = next;
    }
}

/// Iterates recorded during a solve: the outer descent and, per outer step,
/// the inner ascent that produced it.
#[derive(Debug, Clone)]
pub struct SolveTrace<V> {
    pub outer: Vec<Vec<V>>,
    pub inner: Vec<Vec<Vec<V>>>,
}

impl<V> Default for SolveTrace<V> {
    fn default() -> Self {
        SolveTrace {
            outer: Vec::new(),
            inner: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub outer_steps: usize,
    /// Saturation bound in effect when the run converged (saturating mode).
    pub saturation_bound: Option<u64>,
    /// Number of bound-sensitive reruns that doubled the bound.
    pub bound_retries: u32,
}

#[derive(Debug, Clone)]
pub struct Solution<V> {
    pub values: Vec<V>,
    pub trace: Option<SolveTrace<V>>,
    pub stats: SolveStats,
}

impl<V> Solution<V> {
    pub fn value(&self, v: PositionId) -> &V {
        &self.values[v.index()]
    }
}

/// Solves `win₀` over S∞[X] with the default polynomial ring.
pub fn solve_win0(
    game: &BuchiGame,
    interp: &Interpretation<Poly>,
    opts: &SolveOptions,
) -> Result<Solution<Poly>, Error> {
    solve_win0_poly(game, interp, &PolyRing, opts)
}

/// Solves `win₀` over any polynomial-valued semiring (plain or
/// dual-indeterminate), using the configured outer mode.
pub fn solve_win0_poly<S: Semiring<Value = Poly>>(
    game: &BuchiGame,
    interp: &Interpretation<Poly>,
    ring: &S,
    opts: &SolveOptions,
) -> Result<Solution<Poly>, Error> {
    let sys = build_equations(game, interp, ring);
    match opts.gfp_mode {
        GfpMode::Saturating => {
            let mut bound = opts.saturation_bound.max(1);
            let mut retries = 0u32;
            loop {
                let (y, trace, outer_steps) = descend(ring, &sys, opts, |p| saturate(p, bound))?;
                // Certify: no exponent may sit exactly at the bound, and one
                // unsaturated application must reproduce the candidate.
                if !any_exponent_at(&y, bound) && lfp_inner(ring, &sys, &y, opts, None)? == y {
                    return Ok(Solution {
                        values: y,
                        trace,
                        stats: SolveStats {
                            outer_steps,
                            saturation_bound: Some(bound),
                            bound_retries: retries,
                        },
                    });
                }
                // bound-sensitive: double and rerun
                if bound >= SATURATION_BOUND_CAP {
                    return Err(Error::BoundExhausted { bound });
                }
                bound = (bound * 2).min(SATURATION_BOUND_CAP);
                retries += 1;
            }
        }
        GfpMode::Accelerated => {
            let n = sys.len();
            let mut y: Vec<Poly> = vec![Poly::one(); n];
            // Monomials of all iterates seen so far, per position. Pumping
            // is detected against the whole history because supports can
            // recur with a period (alternating cycles), not only between
            // consecutive iterates.
            let mut history: Vec<std::collections::BTreeSet<Monomial>> = y
                .iter()
                .map(|p| p.monomials().iter().cloned().collect())
                .collect();
            let mut trace = opts.trace.then(SolveTrace::default);
            if let Some(t) = &mut trace {
                t.outer.push(y.clone());
            }
            let mut steps = 0usize;
            loop {
                let mut inner_trace = trace.as_ref().map(|_| Vec::new());
                let raw = lfp_inner(ring, &sys, &y, opts, inner_trace.as_mut())?;
                let next: Vec<Poly> = history
                    .iter()
                    .zip(&raw)
                    .map(|(seen, next)| accelerate(seen, next))
                    .collect();
                if let Some(t) = &mut trace {
                    t.inner.push(inner_trace.unwrap());
                    t.outer.push(next.clone());
                }
                if next == y {
                    if raw == y {
                        return Ok(Solution {
                            values: y,
                            trace,
                            stats: SolveStats {
                                outer_steps: steps,
                                saturation_bound: None,
                                bound_retries: 0,
                            },
                        });
                    }
                    // the acceleration mapped a non-fixed-point onto itself
                    return Err(Error::NotAFixedPoint);
                }
                steps += 1;
                if steps > opts.max_steps {
                    return Err(Error::StepBudget { steps });
                }
                check_sizes(&next, opts.max_monomials)?;
                for (seen, p) in history.iter_mut().zip(&next) {
                    seen.extend(p.monomials().iter().cloned());
                }
                y = next;
            }
        }
    }
}

/// Direct solving in an exact target semiring by plain Kleene descent.
/// Terminates for targets whose descending chains stabilize exactly
/// (Boolean, finite min-max); numeric targets should evaluate the
/// polynomial solution instead.
pub fn solve_win0_direct<S: Semiring>(
    game: &BuchiGame,
    interp: &Interpretation<S::Value>,
    ring: &S,
    opts: &SolveOptions,
) -> Result<Solution<S::Value>, Error> {
    let sys = build_equations(game, interp, ring);
    let (values, trace, outer_steps) = descend(ring, &sys, opts, |v| v.clone())?;
    Ok(Solution {
        values,
        trace,
        stats: SolveStats {
            outer_steps,
            saturation_bound: None,
            bound_retries: 0,
        },
    })
}

type Descent<V> = (Vec<V>, Option<SolveTrace<V>>, usize);

/// Kleene descent of the outer system from the all-one map, applying
/// `post` to each freshly computed value, until an exact repeat.
fn descend<S: Semiring>(
    ring: &S,
    sys: &EquationSystem<S::Value>,
    opts: &SolveOptions,
    post: impl Fn(&S::Value) -> S::Value,
) -> Result<Descent<S::Value>, Error> {
    let n = sys.len();
    let mut y: Vec<S::Value> = vec![ring.one(); n];
    let mut trace = opts.trace.then(SolveTrace::default);
    if let Some(t) = &mut trace {
        t.outer.push(y.clone());
    }
    let mut steps = 0usize;
    loop {
        let mut inner_trace = trace.as_ref().map(|_| Vec::new());
        let raw = lfp_inner(ring, sys, &y, opts, inner_trace.as_mut())?;
        let next: Vec<S::Value> = raw.iter().map(&post).collect();
        if let Some(t) = &mut trace {
            t.inner.push(inner_trace.unwrap());
            t.outer.push(next.clone());
        }
        if next == y {
            return Ok((y, trace, steps));
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::StepBudget { steps });
        }
        y = next;
    }
}

fn check_sizes(values: &[Poly], limit: usize) -> Result<(), Error> {
    for p in values {
        if p.len() > limit {
            return Err(Error::MonomialLimit(limit));
        }
    }
    Ok(())
}

/// Replaces every finite exponent strictly above `bound` with ∞ and
/// re-normalizes the antichain.
fn saturate(p: &Poly, bound: u64) -> Poly {
    let needs_it = p.monomials().iter().any(|m| {
        m.iter()
            .any(|(_, e)| matches!(e, Exponent::Fin(k) if k > bound))
    });
    if !needs_it {
        return p.clone();
    }
    Poly::from_monomials(p.monomials().iter().map(|m| {
        Monomial::from_iter(m.iter().map(|(x, e)| {
            let e = match e {
                Exponent::Fin(k) if k > bound => Exponent::Inf,
                other => other,
            };
            (x.clone(), e)
        }))
    }))
}

fn any_exponent_at(values: &[Poly], bound: u64) -> bool {
    values.iter().any(|p| {
        p.monomials()
            .iter()
            .any(|m| m.iter().any(|(_, e)| e == Exponent::Fin(bound)))
    })
}

/// Pumping detection: a monomial of the new iterate that equals `m · d`
/// for an already-seen monomial `m` with the same variable support is
/// replaced by `m · d^∞`. The candidate set spans all earlier iterates,
/// since a support pattern recurs with the period of the game cycle that
/// pumps it. Matching is deterministic (first candidate in canonical
/// order); pumping a monomial that already reached its limit is a no-op.
fn accelerate(seen: &std::collections::BTreeSet<Monomial>, next: &Poly) -> Poly {
    Poly::from_monomials(next.monomials().iter().map(|m_next| {
        match seen.iter().find(|m_prev| pumps(m_prev, m_next)) {
            Some(m_prev) => pump_limit(m_prev, m_next),
            None => m_next.clone(),
        }
    }))
}

fn pumps(m_prev: &Monomial, m_next: &Monomial) -> bool {
    m_prev != m_next
        && m_prev.len() == m_next.len()
        && m_next.iter().all(|(x, e)| {
            let p = m_prev.exponent(x);
            !p.is_zero() && p <= e
        })
}

fn pump_limit(m_prev: &Monomial, m_next: &Monomial) -> Monomial {
    Monomial::from_iter(m_next.iter().map(|(x, e)| {
        let grew = m_prev.exponent(x) < e;
        (x.clone(), if grew { Exponent::Inf } else { e })
    }))
}
