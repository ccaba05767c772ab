//! Absorptive, fully-continuous semirings used as evaluation targets.
//!
//! Every target carries an infinitary power `a^∞ = ⨅ₙ aⁿ` in closed form,
//! which is what makes greatest fixed points computable exactly. Polynomials
//! evaluate homomorphically into any of these targets; the polynomial
//! semiring itself is the universal one.

use std::fmt;

use crate::error::Error;
use crate::poly::{Exponent, Poly};

/// Operations of a commutative, absorptive, idempotent, fully-continuous
/// semiring on a carrier `Value`. Laws expected of implementors (and checked
/// by the randomized law suite): `a + a = a`, `a + ab = a`, distributivity,
/// `a · a^∞ = a^∞` and `(a + b)^∞ = a^∞ + b^∞`.
pub trait Semiring {
    type Value: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn inf_power(&self, a: &Self::Value) -> Self::Value;

    /// Natural order `a ≤ b ⇔ a + b = b`.
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        self.add(a, b) == *b
    }

    fn is_zero(&self, a: &Self::Value) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Value) -> bool {
        *a == self.one()
    }

    /// `a^e` by square-and-multiply, with `a^∞` from the closed form.
    fn pow(&self, a: &Self::Value, e: Exponent) -> Self::Value {
        match e {
            Exponent::Inf => self.inf_power(a),
            Exponent::Fin(mut n) => {
                let mut acc = self.one();
                let mut base = a.clone();
                while n > 0 {
                    if n & 1 == 1 {
                        acc = self.mul(&acc, &base);
                    }
                    n >>= 1;
                    if n > 0 {
                        base = self.mul(&base, &base);
                    }
                }
                acc
            }
        }
    }

    fn sum<'a>(&self, values: impl IntoIterator<Item = &'a Self::Value>) -> Self::Value
    where
        Self::Value: 'a,
    {
        values
            .into_iter()
            .fold(self.zero(), |acc, v| self.add(&acc, v))
    }

    fn product<'a>(&self, values: impl IntoIterator<Item = &'a Self::Value>) -> Self::Value
    where
        Self::Value: 'a,
    {
        values
            .into_iter()
            .fold(self.one(), |acc, v| self.mul(&acc, v))
    }

    /// Size estimate used by step budgets; polynomial rings override this
    /// with the antichain size.
    fn size_hint(&self, _a: &Self::Value) -> usize {
        1
    }
}

/// The semiring of generalized absorptive polynomials itself. Evaluating
/// with the identity assignment through this ring is the identity
/// homomorphism.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyRing;

impl Semiring for PolyRing {
    type Value = Poly;

    fn zero(&self) -> Poly {
        Poly::zero()
    }

    fn one(&self) -> Poly {
        Poly::one()
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b)
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(b)
    }

    fn inf_power(&self, a: &Poly) -> Poly {
        a.inf_power()
    }

    fn pow(&self, a: &Poly, e: Exponent) -> Poly {
        a.pow(e)
    }

    fn size_hint(&self, a: &Poly) -> usize {
        a.len()
    }
}

/// The Boolean semiring ({0,1}, ∨, ∧): plain logical truth. `a^∞ = a`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    fn zero(&self) -> bool {
        false
    }

    fn one(&self) -> bool {
        true
    }

    fn add(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }

    fn inf_power(&self, a: &bool) -> bool {
        *a
    }
}

/// The Viterbi semiring ([0,1], max, ·): confidence scores.
/// `a^∞` is 1 at 1 and collapses to 0 below.
#[derive(Debug, Clone, Copy, Default)]
pub struct Viterbi;

impl Viterbi {
    /// Checks that a value lies in the carrier [0, 1].
    pub fn check(&self, value: f64) -> Result<f64, Error> {
        if (0.0..=1.0).contains(&value) {
            Ok(value)
        } else {
            Err(Error::ValueOutOfRange {
                semiring: "Viterbi",
                value: value.to_string(),
            })
        }
    }
}

impl Semiring for Viterbi {
    type Value = f64;

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    fn add(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }

    fn inf_power(&self, a: &f64) -> f64 {
        if *a >= 1.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// The tropical semiring (ℝ₊ ∪ {∞}, min, +): cost accounting. Zero is ∞,
/// one is 0, and `a^∞` is 0 at 0 and ∞ above.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tropical;

impl Tropical {
    /// Checks that a value lies in the carrier ℝ₊ ∪ {∞}.
    pub fn check(&self, value: f64) -> Result<f64, Error> {
        if value >= 0.0 {
            Ok(value)
        } else {
            Err(Error::ValueOutOfRange {
                semiring: "tropical",
                value: value.to_string(),
            })
        }
    }
}

impl Semiring for Tropical {
    type Value = f64;

    fn zero(&self) -> f64 {
        f64::INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    fn add(&self, a: &f64, b: &f64) -> f64 {
        a.min(*b)
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }

    fn inf_power(&self, a: &f64) -> f64 {
        if *a <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// A min-max semiring over a user-supplied finite totally ordered set of
/// levels (access privileges and the like). Values are level indices,
/// addition is max, multiplication is min, and `a^∞ = a`.
#[derive(Debug, Clone)]
pub struct MinMax {
    levels: Vec<String>,
}

impl MinMax {
    pub fn new(levels: Vec<String>) -> Result<MinMax, Error> {
        if levels.is_empty() {
            return Err(Error::EmptyLevels);
        }
        Ok(MinMax { levels })
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn level_name(&self, index: usize) -> &str {
        &self.levels[index]
    }

    pub fn level_index(&self, name: &str) -> Result<usize, Error> {
        self.levels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::ValueOutOfRange {
                semiring: "min-max",
                value: name.to_string(),
            })
    }
}

impl Semiring for MinMax {
    type Value = usize;

    fn zero(&self) -> usize {
        0
    }

    fn one(&self) -> usize {
        self.levels.len() - 1
    }

    fn add(&self, a: &usize, b: &usize) -> usize {
        *a.max(b)
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        *a.min(b)
    }

    fn inf_power(&self, a: &usize) -> usize {
        *a
    }
}
