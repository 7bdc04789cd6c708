//! Truncated Taylor expansions in three variables.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α f(p) / α!` of a scalar
//! function around a base point `p`, for every multi-index `α` with
//! `|α| ≤ order`. Coefficients are kept densely in graded-lexicographic order.
//!
//! Every jet also carries a `valid_order`: the highest degree whose
//! coefficients are exact. Seeded jets start fully valid. Taking a partial
//! derivative shifts the coefficients down one degree, so the top degree is
//! lost and `valid_order` drops by one. When it reaches zero no further
//! derivatives can be taken and [`Jet::partial`] fails instead of returning
//! garbage.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::JetError;

/// A point of 3-space.
pub type Point = [f64; 3];

/// Highest supported jet order.
pub const MAX_ORDER: u8 = 6;

/// Coordinate axis of 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Exponents of a monomial `x^a y^b z^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub [u8; 3]);

impl MultiIndex {
    pub fn new(a: u8, b: u8, c: u8) -> Self {
        MultiIndex([a, b, c])
    }

    pub fn degree(&self) -> u8 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// `α!` = a!·b!·c!.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k as usize)).product()
    }

    /// The unit multi-index along `axis`.
    pub fn unit(axis: Axis) -> Self {
        let mut e = [0u8; 3];
        e[axis.index()] = 1;
        MultiIndex(e)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Number of monomials of degree ≤ `order` in three variables, `C(order+3, 3)`.
pub fn coefficient_count(order: u8) -> usize {
    let n = order as usize;
    (n + 1) * (n + 2) * (n + 3) / 6
}

/// Index tables for one jet order.
struct Basis {
    order: u8,
    indices: Vec<MultiIndex>,
    lookup: Vec<u16>,
    /// (i, j, k) with indices[i] + indices[j] = indices[k].
    products: Vec<(u16, u16, u16)>,
    /// Per axis: (target, source, factor) for the partial-derivative shift.
    partials: [Vec<(u16, u16, f64)>; 3],
}

const NO_INDEX: u16 = u16::MAX;

impl Basis {
    fn build(order: u8) -> Basis {
        let mut indices = Vec::with_capacity(coefficient_count(order));
        for d in 0..=order {
            for a in (0..=d).rev() {
                for b in (0..=(d - a)).rev() {
                    indices.push(MultiIndex::new(a, b, d - a - b));
                }
            }
        }
        let side = order as usize + 1;
        let mut lookup = vec![NO_INDEX; side * side * side];
        for (i, m) in indices.iter().enumerate() {
            lookup[Self::slot(side, m)] = i as u16;
        }
        let find = |m: &MultiIndex| -> Option<u16> {
            if m.degree() > order {
                None
            } else {
                Some(lookup[Self::slot(side, m)])
            }
        };
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                let sum = MultiIndex([a.0[0] + b.0[0], a.0[1] + b.0[1], a.0[2] + b.0[2]]);
                if let Some(k) = find(&sum) {
                    products.push((i as u16, j as u16, k));
                }
            }
        }
        let partials = [0usize, 1, 2].map(|axis| {
            let mut shift = Vec::new();
            for (t, m) in indices.iter().enumerate() {
                let mut up = *m;
                up.0[axis] += 1;
                if let Some(s) = find(&up) {
                    shift.push((t as u16, s, up.0[axis] as f64));
                }
            }
            shift
        });
        Basis {
            order,
            indices,
            lookup,
            products,
            partials,
        }
    }

    fn slot(side: usize, m: &MultiIndex) -> usize {
        (m.0[0] as usize * side + m.0[1] as usize) * side + m.0[2] as usize
    }

    fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        if m.degree() > self.order {
            return None;
        }
        let side = self.order as usize + 1;
        match self.lookup[Self::slot(side, m)] {
            NO_INDEX => None,
            i => Some(i as usize),
        }
    }
}

fn basis(order: u8) -> &'static Basis {
    static TABLES: [OnceLock<Basis>; MAX_ORDER as usize + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    TABLES[order as usize].get_or_init(|| Basis::build(order))
}

/// All multi-indices of degree ≤ `order`, in storage order.
pub fn multi_indices(order: u8) -> &'static [MultiIndex] {
    &basis(order).indices
}

fn check_order(order: u8) -> Result<(), JetError> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(JetError::OrderOutOfRange(order))
    }
}

/// Truncated Taylor expansion of a scalar function around a base point.
#[derive(Clone, PartialEq)]
pub struct Jet {
    base: Point,
    order: u8,
    valid_order: u8,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("base", &self.base)
            .field("order", &self.order)
            .field("valid_order", &self.valid_order)
            .field("value", &self.value())
            .finish()
    }
}

impl Jet {
    /// The constant function `value`.
    pub fn constant(base: Point, value: f64, order: u8) -> Result<Jet, JetError> {
        check_order(order)?;
        let mut coeffs = vec![0.0; coefficient_count(order)];
        coeffs[0] = value;
        Ok(Jet {
            base,
            order,
            valid_order: order,
            coeffs,
        })
    }

    /// The coordinate function along `axis`.
    pub fn variable(base: Point, axis: Axis, order: u8) -> Result<Jet, JetError> {
        let mut jet = Jet::constant(base, base[axis.index()], order)?;
        let idx = basis(order)
            .index_of(&MultiIndex::unit(axis))
            .expect("order ≥ 1 has linear terms");
        jet.coeffs[idx] = 1.0;
        Ok(jet)
    }

    /// A jet that only knows its value (valid order 0).
    pub fn value_only(base: Point, value: f64, order: u8) -> Result<Jet, JetError> {
        let mut jet = Jet::constant(base, value, order)?;
        jet.valid_order = 0;
        Ok(jet)
    }

    /// Builds a jet from raw Taylor coefficients in storage order.
    pub fn from_coefficients(
        base: Point,
        order: u8,
        valid_order: u8,
        coeffs: Vec<f64>,
    ) -> Result<Jet, JetError> {
        check_order(order)?;
        if coeffs.len() != coefficient_count(order) {
            return Err(JetError::CoefficientCount {
                expected: coefficient_count(order),
                got: coeffs.len(),
            });
        }
        Ok(Jet {
            base,
            order,
            valid_order: valid_order.min(order),
            coeffs,
        })
    }

    /// A zero jet with the same base point and order as `self`, fully valid.
    pub fn zero_like(&self) -> Jet {
        Jet {
            base: self.base,
            order: self.order,
            valid_order: self.order,
            coeffs: vec![0.0; self.coeffs.len()],
        }
    }

    /// A constant jet with the same base point and order as `self`, fully valid.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut jet = self.zero_like();
        jet.coeffs[0] = value;
        jet
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn valid_order(&self) -> u8 {
        self.valid_order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial `m` (zero above the jet order).
    pub fn coefficient(&self, m: MultiIndex) -> f64 {
        basis(self.order)
            .index_of(&m)
            .map_or(0.0, |i| self.coeffs[i])
    }

    /// The mixed partial derivative `∂^α f(p)`.
    pub fn derivative(&self, m: MultiIndex) -> f64 {
        self.coefficient(m) * m.factorial()
    }

    /// First-order partials at the base point.
    pub fn gradient(&self) -> [f64; 3] {
        Axis::ALL.map(|a| self.coefficient(MultiIndex::unit(a)))
    }

    /// Restricts the valid order, used to mark quantities whose high-order
    /// coefficients are not trustworthy.
    pub fn with_valid_order(mut self, valid: u8) -> Jet {
        self.valid_order = self.valid_order.min(valid);
        self
    }

    /// Re-expresses the jet at a lower order, dropping higher coefficients.
    pub fn truncate(&self, order: u8) -> Result<Jet, JetError> {
        check_order(order)?;
        if order >= self.order {
            return Ok(self.clone());
        }
        let coeffs = self.coeffs[..coefficient_count(order)].to_vec();
        Ok(Jet {
            base: self.base,
            order,
            valid_order: self.valid_order.min(order),
            coeffs,
        })
    }

    fn compatible(&self, other: &Jet) -> Result<(), JetError> {
        if self.base != other.base {
            return Err(JetError::BaseMismatch {
                left: self.base,
                right: other.base,
            });
        }
        if self.order != other.order {
            return Err(JetError::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.compatible(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.compatible(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.compatible(other)?;
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &basis(self.order).products {
            coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Ok(Jet {
            base: self.base,
            order: self.order,
            valid_order: self.valid_order.min(other.valid_order),
            coeffs,
        })
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.compatible(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn scale(&self, factor: f64) -> Jet {
        self.map(|c| c * factor)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            base: self.base,
            order: self.order,
            valid_order: self.valid_order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        Jet {
            base: self.base,
            order: self.order,
            valid_order: self.valid_order.min(other.valid_order),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Jet of `∂f/∂axis`. Consumes one order of the derivative budget.
    pub fn partial(&self, axis: Axis) -> Result<Jet, JetError> {
        if self.valid_order == 0 {
            return Err(JetError::BudgetExhausted { base: self.base });
        }
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(t, s, factor) in &basis(self.order).partials[axis.index()] {
            coeffs[t as usize] = factor * self.coeffs[s as usize];
        }
        Ok(Jet {
            base: self.base,
            order: self.order,
            valid_order: self.valid_order - 1,
            coeffs,
        })
    }

    /// Applies a univariate function given its Taylor coefficients
    /// `t_k = g^(k)(a₀)/k!` at the value of `self`, by Horner evaluation in the
    /// nilpotent part.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = self.order as usize;
        let mut acc = self.constant_like(taylor[top]);
        for k in (0..top).rev() {
            acc = acc.try_mul(&h).expect("same base");
            acc.coeffs[0] += taylor[k];
        }
        acc.valid_order = self.valid_order;
        acc
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let taylor: Vec<f64> = (0..=self.order as usize)
            .map(|k| e / factorial(k))
            .collect();
        self.compose(&taylor)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain {
                function: "ln",
                value: a,
            });
        }
        let mut taylor = vec![a.ln()];
        for k in 1..=self.order as usize {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            taylor.push(sign / (k as f64 * a.powi(k as i32)));
        }
        Ok(self.compose(&taylor))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let taylor: Vec<f64> = (0..=self.order as usize)
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose(&taylor)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let taylor: Vec<f64> = (0..=self.order as usize)
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose(&taylor)
    }

    /// Real power `f^r`. Requires a positive value unless `r` is an integer.
    pub fn powf(&self, r: f64) -> Result<Jet, JetError> {
        if r.fract() == 0.0 && r.abs() < i32::MAX as f64 {
            return self.powi(r as i32);
        }
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain {
                function: "pow",
                value: a,
            });
        }
        Ok(self.compose(&binomial_series(r, a, self.order)))
    }

    /// Integer power; negative exponents require a nonzero value.
    pub fn powi(&self, n: i32) -> Result<Jet, JetError> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = self.constant_like(1.0).with_valid_order(self.valid_order);
        let mut base = self.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain {
                function: "sqrt",
                value: a,
            });
        }
        Ok(self.compose(&binomial_series(0.5, a, self.order)))
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(JetError::DivisionByZero { base: self.base });
        }
        // (1/a) Σ (-h/a)^k
        let taylor: Vec<f64> = (0..=self.order as i32)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k + 1))
            .collect();
        Ok(self.compose(&taylor))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Taylor coefficients of `u ↦ u^r` at `a`: `C(r, k) a^{r-k}`.
fn binomial_series(r: f64, a: f64, order: u8) -> Vec<f64> {
    let mut out = Vec::with_capacity(order as usize + 1);
    let mut binom = 1.0;
    for k in 0..=order as i32 {
        out.push(binom * a.powf(r - k as f64));
        binom *= (r - k as f64) / (k as f64 + 1.0);
    }
    out
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$try(rhs)
                    .expect("jets must share base point and order")
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const ORIGIN: Point = [0.0, 0.0, 0.0];

    #[test]
    fn coefficient_counts() {
        assert_eq!(coefficient_count(4), 35);
        for order in 1..=MAX_ORDER {
            assert_eq!(multi_indices(order).len(), coefficient_count(order));
        }
        let idx = multi_indices(2);
        assert_eq!(idx[0], MultiIndex::new(0, 0, 0));
        assert_eq!(idx[1], MultiIndex::new(1, 0, 0));
        assert_eq!(idx[4], MultiIndex::new(2, 0, 0));
    }

    #[test]
    fn seed_constant_and_variables() {
        let c = Jet::constant([1.0, 2.0, 3.0], 4.0, 4).unwrap();
        assert_eq!(c.value(), 4.0);
        assert!(c.coefficients()[1..].iter().all(|&v| v == 0.0));
        assert_eq!(c.valid_order(), 4);

        let x = Jet::variable([2.0, 0.0, 0.0], Axis::X, 4).unwrap();
        assert_eq!(x.value(), 2.0);
        assert_eq!(x.coefficient(MultiIndex::new(1, 0, 0)), 1.0);
        assert_eq!(x.coefficients().iter().filter(|&&v| v != 0.0).count(), 2);

        let y = Jet::variable([0.0, 1.0, 5.0], Axis::Y, 4).unwrap();
        assert_eq!(y.value(), 1.0);
        assert_eq!(y.coefficient(MultiIndex::new(0, 1, 0)), 1.0);
        assert_eq!(y.coefficients().iter().filter(|&&v| v != 0.0).count(), 2);
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(
            Jet::constant(ORIGIN, 1.0, 0),
            Err(JetError::OrderOutOfRange(0))
        ));
        assert!(Jet::variable(ORIGIN, Axis::Z, 7).is_err());
    }

    #[test]
    fn square_of_x() {
        let x = Jet::variable([2.0, 0.0, 0.0], Axis::X, 4).unwrap();
        let sq = &x * &x;
        assert_eq!(sq.value(), 4.0);
        assert_eq!(sq.coefficient(MultiIndex::new(1, 0, 0)), 4.0);
        assert_eq!(sq.coefficient(MultiIndex::new(2, 0, 0)), 1.0);
        assert_eq!(sq.derivative(MultiIndex::new(2, 0, 0)), 2.0);
    }

    #[test]
    fn self_difference_vanishes() {
        let p = [0.3, -0.2, 0.9];
        let y = Jet::variable(p, Axis::Y, 4).unwrap();
        let f = y.sin() * y.exp();
        let d = &f - &f;
        assert!(d.coefficients().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn product_with_reciprocal_is_one() {
        let p = [0.0, 1.0, 0.0];
        let y = Jet::variable(p, Axis::Y, 4).unwrap();
        let g = &y * &y + 1.0;
        let prod = &g * &g.recip().unwrap();
        assert_abs_diff_eq!(prod.value(), 1.0, epsilon = 1e-14);
        for &c in &prod.coefficients()[1..] {
            assert_abs_diff_eq!(c, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn division_by_zero_value() {
        let x = Jet::variable(ORIGIN, Axis::X, 3).unwrap();
        let one = x.constant_like(1.0);
        assert!(matches!(
            one.try_div(&x),
            Err(JetError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let a = Jet::constant(ORIGIN, 1.0, 3).unwrap();
        let b = Jet::constant([1.0, 0.0, 0.0], 1.0, 3).unwrap();
        assert!(matches!(a.try_add(&b), Err(JetError::BaseMismatch { .. })));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn sqrt_values() {
        let four = Jet::constant(ORIGIN, 4.0, 4).unwrap();
        let two = four.sqrt().unwrap();
        assert_abs_diff_eq!(two.value(), 2.0, epsilon = 1e-15);
        assert!(two.coefficients()[1..].iter().all(|&c| c == 0.0));

        let y = Jet::variable([0.0, 1.0, 0.0], Axis::Y, 4).unwrap();
        let s = (&y * &y + 1.0).sqrt().unwrap();
        assert_abs_diff_eq!(s.value(), 2f64.sqrt(), epsilon = 1e-14);
        // d/dy sqrt(1+y²) = y / sqrt(1+y²)
        assert_abs_diff_eq!(s.gradient()[1], 1.0 / 2f64.sqrt(), epsilon = 1e-14);

        assert!(matches!(
            four.scale(-1.0).sqrt(),
            Err(JetError::Domain {
                function: "sqrt",
                ..
            })
        ));
        assert!(four.scale(0.0).ln().is_err());
    }

    #[test]
    fn exp_coefficients_are_inverse_factorials() {
        let x = Jet::variable(ORIGIN, Axis::X, 6).unwrap();
        let e = x.exp();
        for k in 0..=6u8 {
            assert_abs_diff_eq!(
                e.coefficient(MultiIndex::new(k, 0, 0)),
                1.0 / factorial(k as usize),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn partials_and_budget() {
        let x = Jet::variable([3.0, 0.0, 0.0], Axis::X, 4).unwrap();
        let sq = &x * &x;
        let d = sq.partial(Axis::X).unwrap();
        assert_eq!(d.value(), 6.0);
        assert_eq!(d.gradient()[0], 2.0);
        assert_eq!(d.valid_order(), 3);

        let c = Jet::constant(ORIGIN, 7.0, 4).unwrap();
        let dc = c.partial(Axis::Y).unwrap();
        assert!(dc.coefficients().iter().all(|&v| v == 0.0));

        let y = Jet::variable([0.0, 1.0, 0.0], Axis::Y, 4).unwrap();
        let s = (&y * &y + 1.0).sqrt().unwrap();
        let ds = s.partial(Axis::Y).unwrap();
        assert_abs_diff_eq!(ds.value(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        // (1+y²)^{-3/2} at y = 1
        assert_abs_diff_eq!(
            ds.gradient()[1],
            0.5 * std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn budget_exhaustion() {
        let mut j = Jet::variable([0.1, 0.2, 0.3], Axis::Z, 3).unwrap().exp();
        for _ in 0..3 {
            j = j.partial(Axis::Z).unwrap();
        }
        assert_eq!(j.valid_order(), 0);
        assert!(matches!(
            j.partial(Axis::Z),
            Err(JetError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn partials_commute_exactly() {
        let p = [0.4, -0.3, 0.2];
        let x = Jet::variable(p, Axis::X, 5).unwrap();
        let y = Jet::variable(p, Axis::Y, 5).unwrap();
        let z = Jet::variable(p, Axis::Z, 5).unwrap();
        let f = (&x * &y).sin() * (&z * 0.5).exp() + &x * &z * &z;
        let xy = f.partial(Axis::X).unwrap().partial(Axis::Y).unwrap();
        let yx = f.partial(Axis::Y).unwrap().partial(Axis::X).unwrap();
        assert_eq!(xy.coefficients(), yx.coefficients());
    }

    #[test]
    fn integer_powers() {
        let p = [-1.5, 0.0, 0.0];
        let x = Jet::variable(p, Axis::X, 4).unwrap();
        let cube = x.powi(3).unwrap();
        assert_abs_diff_eq!(cube.value(), -3.375, epsilon = 1e-14);
        assert_abs_diff_eq!(cube.gradient()[0], 3.0 * 2.25, epsilon = 1e-14);
        let inv = x.powi(-2).unwrap();
        assert_abs_diff_eq!(inv.value(), 1.0 / 2.25, epsilon = 1e-14);
        assert!(x.powf(0.5).is_err());
        let same = x.powf(3.0).unwrap();
        assert_eq!(same.coefficients(), cube.coefficients());
    }

    #[test]
    fn truncation_keeps_low_coefficients() {
        let p = [0.2, 0.1, -0.4];
        let x = Jet::variable(p, Axis::X, 6).unwrap();
        let f = x.exp();
        let t = f.truncate(3).unwrap();
        assert_eq!(t.order(), 3);
        assert_eq!(t.coefficients(), &f.coefficients()[..coefficient_count(3)]);
    }
}
