//! Dual-indeterminate absorptive polynomials.
//!
//! For reverse analysis each tracked literal gets a pair of variables `x`
//! and `x~`; a monomial containing both carries contradictory information
//! and is identified with zero. The quotient is implemented by deleting
//! contradictory monomials eagerly after every multiplication — the
//! congruence is generated by monomial-local relations, so eager deletion
//! is complete.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::poly::{Monomial, Poly, Var};
use crate::semiring::Semiring;

/// A symmetric involution pairing each variable with its dual.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DualityRelation {
    pairs: BTreeMap<Var, Var>,
}

impl DualityRelation {
    pub fn new() -> DualityRelation {
        DualityRelation::default()
    }

    /// Pairs a base variable with its `~`-marked partner.
    pub fn pair_with_partner(&mut self, base: Var) {
        let partner = base.partner();
        self.pair(base, partner);
    }

    pub fn pair(&mut self, x: Var, y: Var) {
        assert_ne!(x, y, "a variable cannot be its own dual");
        self.pairs.insert(x.clone(), y.clone());
        self.pairs.insert(y, x);
    }

    pub fn dual_of(&self, x: &Var) -> Option<&Var> {
        self.pairs.get(x)
    }

    pub fn iter_pairs(&self) -> impl Iterator<Item = (&Var, &Var)> {
        // each unordered pair once, keyed by its smaller member
        self.pairs.iter().filter(|(x, y)| x < y)
    }

    /// True when the monomial mentions a variable together with its dual.
    pub fn contradicts(&self, m: &Monomial) -> bool {
        m.vars()
            .any(|x| self.dual_of(x).is_some_and(|y| x < y && m.contains(y)))
    }

    /// Deletes contradictory monomials.
    pub fn strike(&self, p: &Poly) -> Poly {
        if p.monomials().iter().any(|m| self.contradicts(m)) {
            Poly::from_monomials(
                p.monomials()
                    .iter()
                    .filter(|m| !self.contradicts(m))
                    .cloned(),
            )
        } else {
            p.clone()
        }
    }
}

/// Flattens every positive exponent to 1 and re-normalizes. This is the
/// projection onto the exponent-free PosBool variant.
pub fn drop_exponents(p: &Poly) -> Poly {
    Poly::from_monomials(
        p.monomials().iter().map(|m| {
            Monomial::from_iter(m.vars().map(|v| (v.clone(), crate::poly::Exponent::ONE)))
        }),
    )
}

/// An absorptive polynomial quotiented by `x · x~ = 0`, carrying its
/// ambient duality relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPoly {
    poly: Poly,
    relation: Arc<DualityRelation>,
}

impl DualPoly {
    pub fn new(poly: Poly, relation: Arc<DualityRelation>) -> DualPoly {
        let poly = relation.strike(&poly);
        DualPoly { poly, relation }
    }

    pub fn zero(relation: Arc<DualityRelation>) -> DualPoly {
        DualPoly {
            poly: Poly::zero(),
            relation,
        }
    }

    pub fn one(relation: Arc<DualityRelation>) -> DualPoly {
        DualPoly {
            poly: Poly::one(),
            relation,
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn relation(&self) -> &Arc<DualityRelation> {
        &self.relation
    }

    fn check_same_relation(&self, other: &DualPoly) -> Result<(), Error> {
        if Arc::ptr_eq(&self.relation, &other.relation) || self.relation == other.relation {
            Ok(())
        } else {
            Err(Error::RelationMismatch)
        }
    }

    /// Quotient addition; striking contradictory monomials is a no-op for
    /// inputs that already satisfy the invariant.
    pub fn add(&self, other: &DualPoly) -> Result<DualPoly, Error> {
        self.check_same_relation(other)?;
        Ok(DualPoly {
            poly: self.relation.strike(&self.poly.add(&other.poly)),
            relation: Arc::clone(&self.relation),
        })
    }

    /// Quotient multiplication: the plain product followed by deletion of
    /// every monomial containing a complementary pair.
    pub fn mul(&self, other: &DualPoly) -> Result<DualPoly, Error> {
        self.check_same_relation(other)?;
        Ok(DualPoly {
            poly: self.relation.strike(&self.poly.mul(&other.poly)),
            relation: Arc::clone(&self.relation),
        })
    }

    /// Projection onto PosBool: every positive exponent becomes 1.
    pub fn drop_exponents(&self) -> DualPoly {
        DualPoly {
            poly: drop_exponents(&self.poly),
            relation: Arc::clone(&self.relation),
        }
    }

    /// Homomorphic evaluation under an assignment that respects duals,
    /// i.e. `h(x) · h(x~) = 0` for every pair (checked).
    pub fn eval<S: Semiring>(
        &self,
        assignment: &BTreeMap<Var, S::Value>,
        ring: &S,
    ) -> Result<S::Value, Error> {
        for (x, y) in self.relation.iter_pairs() {
            if let (Some(vx), Some(vy)) = (assignment.get(x), assignment.get(y)) {
                if !ring.is_zero(&ring.mul(vx, vy)) {
                    return Err(Error::DualityViolation {
                        x: x.to_string(),
                        x_bar: y.to_string(),
                    });
                }
            }
        }
        self.poly.eval(assignment, ring)
    }
}

impl std::fmt::Display for DualPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.poly.fmt(f)
    }
}

/// `S∞[X, X̄]` as a semiring over plain [`Poly`] values: the ordinary
/// operations followed by striking contradictory monomials. With `posbool`
/// set, exponents are flattened after every operation, which keeps the
/// whole fixed-point computation in the finite PosBool lattice.
#[derive(Debug, Clone)]
pub struct DualRing {
    pub relation: Arc<DualityRelation>,
    pub posbool: bool,
}

impl DualRing {
    pub fn new(relation: Arc<DualityRelation>, posbool: bool) -> DualRing {
        DualRing { relation, posbool }
    }

    fn normalize(&self, p: Poly) -> Poly {
        let p = self.relation.strike(&p);
        if self.posbool {
            drop_exponents(&p)
        } else {
            p
        }
    }
}

impl Semiring for DualRing {
    type Value = Poly;

    fn zero(&self) -> Poly {
        Poly::zero()
    }

    fn one(&self) -> Poly {
        Poly::one()
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.normalize(a.add(b))
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.normalize(a.mul(b))
    }

    fn inf_power(&self, a: &Poly) -> Poly {
        self.normalize(a.inf_power())
    }

    fn size_hint(&self, a: &Poly) -> usize {
        a.len()
    }
}
