//! Generalized absorptive polynomials.
//!
//! A polynomial here is a ⪰-antichain of coefficient-free monomials whose
//! exponents come from ℕ ∪ {∞}. A monomial `m1` absorbs `m2` when every
//! exponent of `m1` is less or equal to the matching exponent of `m2`
//! (`ab² ⪰ a∞b²`, `a ⪰ ab`, while `a²b` and `ab²` are incomparable).
//! Addition and multiplication are the usual polynomial operations followed
//! by discarding absorbed monomials, which makes addition idempotent and
//! multiplication decreasing. The singleton antichain of the empty monomial
//! is `1`; the empty antichain is `0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::Error;

/// Upper bound on the number of monomials a single polynomial may hold.
/// Antichains can grow exponentially in the size of the game, so insertion
/// aborts with a diagnostic instead of exhausting memory.
static MONOMIAL_LIMIT: AtomicUsize = AtomicUsize::new(1_000_000);

/// Replaces the global monomial limit, returning the previous value.
pub fn set_monomial_limit(limit: usize) -> usize {
    MONOMIAL_LIMIT.swap(limit.max(1), AtomicOrdering::Relaxed)
}

/// Current global monomial limit.
pub fn monomial_limit() -> usize {
    MONOMIAL_LIMIT.load(AtomicOrdering::Relaxed)
}

/// An exponent: a natural number or ∞, with `n < ∞` and `n + ∞ = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Fin(u64),
    Inf,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::Fin(0);
    pub const ONE: Exponent = Exponent::Fin(1);

    pub fn is_zero(self) -> bool {
        self == Exponent::Fin(0)
    }

    /// Exponent addition. Overflow of the finite part is a hard error,
    /// never a wraparound.
    pub fn plus(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Fin(a), Exponent::Fin(b)) => Exponent::Fin(
                a.checked_add(b)
                    .expect("exponent overflow: finite exponents exceeded u64"),
            ),
            _ => Exponent::Inf,
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Fin(a), Exponent::Fin(b)) => a.cmp(b),
            (Exponent::Fin(_), Exponent::Inf) => Ordering::Less,
            (Exponent::Inf, Exponent::Fin(_)) => Ordering::Greater,
            (Exponent::Inf, Exponent::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Fin(n) => write!(f, "{n}"),
            Exponent::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Fin(n) => serializer.serialize_u64(*n),
            Exponent::Inf => serializer.serialize_str("inf"),
        }
    }
}

/// An indeterminate. Variables are interned per analysis context (one per
/// tracked edge) and may carry a dual marker; the dual of `a` renders as `a~`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    name: Arc<str>,
    dual: bool,
}

impl Var {
    pub fn new(name: impl Into<Arc<str>>) -> Var {
        Var {
            name: name.into(),
            dual: false,
        }
    }

    pub fn dual(name: impl Into<Arc<str>>) -> Var {
        Var {
            name: name.into(),
            dual: true,
        }
    }

    pub fn base_name(&self) -> &str {
        &self.name
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    /// The partner variable with the dual marker flipped.
    pub fn partner(&self) -> Var {
        Var {
            name: Arc::clone(&self.name),
            dual: !self.dual,
        }
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.name.as_ref(), self.dual).cmp(&(other.name.as_ref(), other.dual))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            write!(f, "{}~", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// A coefficient-free monomial: a sparse, sorted list of variables with
/// positive exponents. `m(x)` defaults to zero for absent variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Monomial {
    exps: Vec<(Var, Exponent)>,
}

impl Monomial {
    /// The empty monomial, i.e. the semiring one.
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: Var) -> Monomial {
        Monomial {
            exps: vec![(v, Exponent::ONE)],
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// The exponent of `x`, zero when absent.
    pub fn exponent(&self, x: &Var) -> Exponent {
        match self.exps.binary_search_by(|(v, _)| v.cmp(x)) {
            Ok(i) => self.exps[i].1,
            Err(_) => Exponent::ZERO,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, Exponent)> {
        self.exps.iter().map(|(v, e)| (v, *e))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.exps.iter().map(|(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn contains(&self, x: &Var) -> bool {
        self.exps.binary_search_by(|(v, _)| v.cmp(x)).is_ok()
    }

    /// `self ⪰ other`: every exponent of `self` is ≤ the matching exponent
    /// of `other`. Reflexive; the absorber is the cheaper monomial.
    pub fn absorbs(&self, other: &Monomial) -> bool {
        // merge-scan over both sorted lists
        let mut rhs = other.exps.iter();
        let mut next = rhs.next();
        'outer: for (x, e) in &self.exps {
            while let Some((y, f)) = next {
                match y.cmp(x) {
                    Ordering::Less => next = rhs.next(),
                    Ordering::Equal => {
                        if e > f {
                            return false;
                        }
                        next = rhs.next();
                        continue 'outer;
                    }
                    Ordering::Greater => break,
                }
            }
            // x is absent on the right, so its exponent there is zero
            return false;
        }
        true
    }

    /// Exponent-wise sum (`n + ∞ = ∞`).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let mut a = self.exps.iter().peekable();
        let mut b = other.exps.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((x, e)), Some((y, f))) => match x.cmp(y) {
                    Ordering::Less => {
                        exps.push((x.clone(), *e));
                        a.next();
                    }
                    Ordering::Greater => {
                        exps.push((y.clone(), *f));
                        b.next();
                    }
                    Ordering::Equal => {
                        exps.push((x.clone(), e.plus(*f)));
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => {
                    exps.extend(a.cloned());
                    break;
                }
                (None, Some(_)) => {
                    exps.extend(b.cloned());
                    break;
                }
                (None, None) => break,
            }
        }
        Monomial { exps }
    }

    /// Every positive exponent becomes ∞.
    pub fn inf_power(&self) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .map(|(x, _)| (x.clone(), Exponent::Inf))
                .collect(),
        }
    }

    /// Raises the whole monomial to a (possibly infinite) power.
    pub fn pow(&self, e: Exponent) -> Monomial {
        match e {
            Exponent::Fin(0) => Monomial::one(),
            Exponent::Fin(n) => Monomial {
                exps: self
                    .exps
                    .iter()
                    .map(|(x, ex)| {
                        let raised = match ex {
                            Exponent::Fin(k) => Exponent::Fin(
                                k.checked_mul(n)
                                    .expect("exponent overflow: finite exponents exceeded u64"),
                            ),
                            Exponent::Inf => Exponent::Inf,
                        };
                        (x.clone(), raised)
                    })
                    .collect(),
            },
            Exponent::Inf => self.inf_power(),
        }
    }
}

impl FromIterator<(Var, Exponent)> for Monomial {
    /// Collects variable–exponent pairs, dropping zero exponents and
    /// summing duplicates.
    fn from_iter<I: IntoIterator<Item = (Var, Exponent)>>(iter: I) -> Monomial {
        let mut exps: Vec<(Var, Exponent)> =
            iter.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        exps.sort_by(|a, b| a.0.cmp(&b.0));
        exps.dedup_by(|hot, kept| {
            if hot.0 == kept.0 {
                kept.1 = kept.1.plus(hot.1);
                true
            } else {
                false
            }
        });
        Monomial { exps }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Canonical total order used for deterministic output: lexicographic
    /// over the sorted `(variable, exponent)` pairs, with ∞ greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.exps.iter();
        let mut b = other.exps.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => match (va, ea).cmp(&(vb, eb)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (x, e) in &self.exps {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                Exponent::Fin(1) => write!(f, "{x}")?,
                e => write!(f, "{x}^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.exps.len()))?;
        for (x, e) in &self.exps {
            map.serialize_entry(&x.to_string(), e)?;
        }
        map.end()
    }
}

/// An absorptive polynomial: a ⪰-antichain of monomials, kept sorted in the
/// canonical monomial order. The empty antichain is the semiring zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    monomials: Vec<Monomial>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly {
            monomials: vec![Monomial::one()],
        }
    }

    pub fn var(v: Var) -> Poly {
        Poly::from_monomial(Monomial::var(v))
    }

    pub fn from_monomial(m: Monomial) -> Poly {
        Poly { monomials: vec![m] }
    }

    pub fn from_monomials(iter: impl IntoIterator<Item = Monomial>) -> Poly {
        let mut p = Poly::zero();
        for m in iter {
            p.insert(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.monomials.len() == 1 && self.monomials[0].is_one()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn into_monomials(self) -> Vec<Monomial> {
        self.monomials
    }

    /// All variables with a positive exponent in some monomial.
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        let mut seen = Vec::new();
        for m in &self.monomials {
            for v in m.vars() {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen.into_iter()
    }

    /// Inserts a monomial, preserving the antichain invariant. Returns false
    /// when the monomial is absorbed by an existing one.
    pub fn insert(&mut self, m: Monomial) -> bool {
        if self.monomials.iter().any(|old| old.absorbs(&m)) {
            return false;
        }
        self.monomials.retain(|old| !m.absorbs(old));
        let limit = monomial_limit();
        if self.monomials.len() >= limit {
            panic!(
                "absorptive polynomial exceeded the monomial limit of {limit}; \
                 track fewer edges or raise the limit"
            );
        }
        match self.monomials.binary_search(&m) {
            Ok(_) => unreachable!("absorbed duplicates are filtered above"),
            Err(idx) => self.monomials.insert(idx, m),
        }
        true
    }

    /// Antichain of the maximal monomials of the union.
    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for m in &small.monomials {
            out.insert(m.clone());
        }
        out
    }

    /// Antichain of the maximal pairwise products.
    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = Poly::zero();
        for a in &self.monomials {
            for b in &other.monomials {
                out.insert(a.mul(b));
            }
        }
        out
    }

    /// The infinitary power `p^∞ = ⨅ₙ pⁿ`. In closed form this maps every
    /// positive exponent of every monomial to ∞, justified by
    /// `(a + b)^∞ = a^∞ + b^∞` and `(m^n)^∞ = m^∞`.
    pub fn inf_power(&self) -> Poly {
        Poly::from_monomials(self.monomials.iter().map(Monomial::inf_power))
    }

    pub fn pow(&self, e: Exponent) -> Poly {
        match e {
            Exponent::Fin(0) => Poly::one(),
            Exponent::Fin(n) => {
                // Square-and-multiply over poly_mul.
                let mut base = self.clone();
                let mut acc = Poly::one();
                let mut n = n;
                while n > 0 {
                    if n & 1 == 1 {
                        acc = acc.mul(&base);
                    }
                    n >>= 1;
                    if n > 0 {
                        base = base.mul(&base);
                    }
                }
                acc
            }
            Exponent::Inf => self.inf_power(),
        }
    }

    /// Natural order of the semiring: `p ≤ q ⇔ p + q = q`.
    pub fn leq(&self, other: &Poly) -> bool {
        self.add(other) == *other
    }

    /// Homomorphic evaluation into an absorptive, fully-continuous target.
    /// Every variable occurring in the polynomial must be assigned.
    pub fn eval<S: crate::semiring::Semiring>(
        &self,
        assignment: &BTreeMap<Var, S::Value>,
        ring: &S,
    ) -> Result<S::Value, Error> {
        let mut sum = ring.zero();
        for m in &self.monomials {
            let mut prod = ring.one();
            for (x, e) in m.iter() {
                let value = assignment
                    .get(x)
                    .ok_or_else(|| Error::UnassignedVariable(x.to_string()))?;
                prod = ring.mul(&prod, &ring.pow(value, e));
            }
            sum = ring.add(&sum, &prod);
        }
        Ok(sum)
    }

    /// Canonical text form, e.g. `a^2*b + b*c^inf`; `0` and `1` for the
    /// constants. Two polynomials are equal iff these renderings agree.
    pub fn canonical_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for m in &self.monomials {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.monomials.len()))?;
        for m in &self.monomials {
            seq.serialize_element(m)?;
        }
        seq.end()
    }
}
