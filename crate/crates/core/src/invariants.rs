//! The scalar invariants `M` and `K` of a contact sub-Riemannian structure.

use crate::error::Result;
use crate::field::{MetricField, OneForm};
use crate::frame::{build_contact_frame, AdaptedFrame, Pair, StructureFunctions};
use crate::jet::{Jet, Point};
use crate::settings::Settings;
use crate::vector::JetVector;

/// `M`, `K` and the section-level coefficients they are built from.
///
/// `a₁, a₂` are the torsion coefficients and `p₁, p₂, p₃` the coefficients of
/// the connection form at the constructed section, fiber angle zero.
#[derive(Debug, Clone)]
pub struct InvariantValues {
    pub m: Jet,
    pub k: Jet,
    pub a1: Jet,
    pub a2: Jet,
    pub p1: Jet,
    pub p2: Jet,
    pub p3: Jet,
}

/// `E f = Eᵃ∂ₐf`. Consumes one order.
pub fn directional_derivative(f: &Jet, e: &JetVector) -> Result<Jet> {
    Ok(e.derive(f)?)
}

/// `(a₁, a₂, p₁, p₂, p₃)`.
pub fn torsion_and_connection_coeffs(c: &StructureFunctions) -> [Jet; 5] {
    let c1_23 = c.get(1, Pair::P23);
    let c2_31 = c.get(2, Pair::P31);
    [
        (c1_23 - c2_31).scale(0.5),
        c.get(1, Pair::P31).clone(),
        c.get(1, Pair::P12).clone(),
        c.get(2, Pair::P12).clone(),
        (c1_23 + c2_31).scale(-0.5),
    ]
}

/// `M = ((C¹₂₃ − C²₃₁)/2)² + (C¹₃₁)²`.
pub fn invariant_m(c: &StructureFunctions) -> Jet {
    let [a1, a2, ..] = torsion_and_connection_coeffs(c);
    &a1 * &a1 + &a2 * &a2
}

/// `K = E₁C²₁₂ − E₂C¹₁₂ + (C¹₁₂)² + (C²₁₂)² − ½(C¹₂₃ + C²₃₁)`.
pub fn invariant_k(c: &StructureFunctions, frame: &AdaptedFrame) -> Result<Jet> {
    let c1 = c.get(1, Pair::P12);
    let c2 = c.get(2, Pair::P12);
    let trace = c.get(1, Pair::P23) + c.get(2, Pair::P31);
    Ok(
        directional_derivative(c2, &frame.e[0])? - directional_derivative(c1, &frame.e[1])?
            + c1 * c1
            + c2 * c2
            - trace.scale(0.5),
    )
}

pub fn invariant_values(c: &StructureFunctions, frame: &AdaptedFrame) -> Result<InvariantValues> {
    let [a1, a2, p1, p2, p3] = torsion_and_connection_coeffs(c);
    let m = &a1 * &a1 + &a2 * &a2;
    let k = invariant_k(c, frame)?;
    Ok(InvariantValues {
        m,
        k,
        a1,
        a2,
        p1,
        p2,
        p3,
    })
}

/// Frame, structure functions and invariants at a contact point.
#[derive(Debug, Clone)]
pub struct ContactAnalysis {
    pub frame: AdaptedFrame,
    pub c: StructureFunctions,
    pub invariants: InvariantValues,
}

pub fn compute_invariants(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<ContactAnalysis> {
    let (frame, c) = build_contact_frame(omega, metric, p, settings)?;
    let invariants = invariant_values(&c, &frame)?;
    Ok(ContactAnalysis {
        frame,
        c,
        invariants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn at(omega: &str, p: Point) -> InvariantValues {
        let w = OneForm::parse(omega).unwrap();
        compute_invariants(&w, &MetricField::euclidean(), p, &Settings::default())
            .unwrap()
            .invariants
    }

    #[test]
    fn heisenberg_examples() {
        let v = at("dz + y*dx - x*dy", [0.0; 3]);
        assert_abs_diff_eq!(v.m.value(), 0.0, epsilon = 1e-14);
        // E₁C²₁₂ = 2, −E₂C¹₁₂ = 3, C¹₂₃ = C²₃₁ = −1 at the origin
        assert_abs_diff_eq!(v.k.value(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.p3.value(), 1.0, epsilon = 1e-13);
        let v = at("dz + y*dx - x*dy", [1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(v.m.value(), 9.0 / 64.0, epsilon = 1e-13);
    }

    #[test]
    fn heisenberg_invariants_are_rotation_invariant() {
        let w = "dz + y*dx - x*dy";
        let a = at(w, [1.0, 0.0, 0.5]);
        for p in [[0.0, 1.0, 0.0], [0.6, -0.8, 2.0], [-0.28, 0.96, -1.0]] {
            let b = at(w, p);
            assert_abs_diff_eq!(a.m.value(), b.m.value(), epsilon = 1e-13);
            assert_abs_diff_eq!(a.k.value(), b.k.value(), epsilon = 1e-12);
        }
    }

    #[test]
    fn cartan_examples() {
        let v = at("dz + y*dx", [0.0; 3]);
        assert_abs_diff_eq!(v.m.value(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(v.k.value(), 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(v.a1.value(), -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(v.a2.value(), 0.0, epsilon = 1e-14);
        let v = at("dz + y*dx", [0.0, 1.0, 0.0]);
        // (5 + 2y²)/(2(1 + y²)²) from the bracket oracle
        assert_abs_diff_eq!(v.k.value(), 0.875, epsilon = 1e-12);
    }

    #[test]
    fn directional_derivative_of_square() {
        let p = [3.0, 0.0, 0.0];
        let x = Jet::variable(p, crate::jet::Axis::X, 2).unwrap();
        let e = JetVector::coordinate(&x, crate::jet::Axis::X);
        assert_eq!(directional_derivative(&(&x * &x), &e).unwrap().value(), 6.0);
    }
}
