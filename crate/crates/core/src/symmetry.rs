//! Infinitesimal symmetries of a contact sub-Riemannian structure.
//!
//! A symmetry is `V = −E₂(f)E₁ + E₁(f)E₂ + fE₃` for a function `f` with
//! `E₃f = 0`. Where `D = E₁K·E₂M − E₂K·E₁M ≠ 0`, the conditions `VK = VM = 0`
//! fix `E₁ln f = EQ1`, `E₂ln f = EQ2`, and `E₃ln f = 0`. A solution exists
//! only if the three integrability residuals vanish, and then `ln f` is a
//! line integral of its coordinate gradient.

use crate::error::{Error, Result};
use crate::field::{MetricField, OneForm, ScalarField};
use crate::frame::{AdaptedFrame, Pair};
use crate::invariants::{compute_invariants, ContactAnalysis};
use crate::jet::{multi_indices, Jet, Point};
use crate::quadrature;
use crate::settings::Settings;
use crate::vector::{lie_bracket, solve3, JetVector};

#[derive(Debug, Clone)]
pub struct SymmetrySystem {
    pub d: Jet,
    /// `None` on the degenerate branch.
    pub eq: Option<[Jet; 2]>,
    pub degenerate: bool,
    /// `|E₁K·E₂M| + |E₂K·E₁M|`, the magnitude `D` is compared against.
    pub scale: f64,
    /// `(E₁K, E₂K, E₃K)`.
    pub ek: [Jet; 3],
    /// `(E₁M, E₂M, E₃M)`.
    pub em: [Jet; 3],
}

impl SymmetrySystem {
    pub fn eq_values(&self) -> Option<[f64; 2]> {
        self.eq.as_ref().map(|[a, b]| [a.value(), b.value()])
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryAnalysis {
    pub contact: ContactAnalysis,
    pub system: SymmetrySystem,
}

impl SymmetryAnalysis {
    pub fn frame(&self) -> &AdaptedFrame {
        &self.contact.frame
    }
}

/// The system for `(EQ1, EQ2)` from the frame derivatives of `K` and `M`.
pub fn system_from(contact: &ContactAnalysis, settings: &Settings) -> Result<SymmetrySystem> {
    let e = &contact.frame.e;
    let inv = &contact.invariants;
    let ek = [
        e[0].derive(&inv.k)?,
        e[1].derive(&inv.k)?,
        e[2].derive(&inv.k)?,
    ];
    let em = [
        e[0].derive(&inv.m)?,
        e[1].derive(&inv.m)?,
        e[2].derive(&inv.m)?,
    ];
    let p1 = &ek[0] * &em[1];
    let p2 = &ek[1] * &em[0];
    let d = &p1 - &p2;
    let scale = p1.value().abs() + p2.value().abs();
    let degenerate =
        !(d.value().abs() > settings.eps_degenerate * scale + settings.eps_degenerate_abs);
    let eq = if degenerate {
        None
    } else {
        let n1 = &ek[2] * &em[0] - &ek[0] * &em[2];
        let n2 = &ek[2] * &em[1] - &ek[1] * &em[2];
        Some([n1.try_div(&d)?, n2.try_div(&d)?])
    };
    Ok(SymmetrySystem {
        d,
        eq,
        degenerate,
        scale,
        ek,
        em,
    })
}

pub fn build_system(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<SymmetryAnalysis> {
    let contact = compute_invariants(omega, metric, p, settings)?;
    let system = system_from(&contact, settings)?;
    Ok(SymmetryAnalysis { contact, system })
}

fn regular_eq(a: &SymmetryAnalysis) -> Result<&[Jet; 2]> {
    a.system
        .eq
        .as_ref()
        .ok_or_else(|| Error::Degenerate(a.frame().base()))
}

/// `(r₁, r₂, r₃)` with `rₐ` the defect of `[E_b, E_c] ln f = −C^d_{bc}E_d ln f`
/// for `(bc) = (12), (31), (23)`:
/// `r₁ = E₁EQ2 − E₂EQ1 + C¹₁₂EQ1 + C²₁₂EQ2`,
/// `r₂ = E₃EQ1 + C¹₃₁EQ1 + C²₃₁EQ2`, `r₃ = −E₃EQ2 + C¹₂₃EQ1 + C²₂₃EQ2`.
pub fn integrability_residuals(a: &SymmetryAnalysis) -> Result<[f64; 3]> {
    let [eq1, eq2] = regular_eq(a)?;
    let e = &a.frame().e;
    let c = &a.contact.c;
    let lin =
        |pair: Pair| c.get(1, pair).value() * eq1.value() + c.get(2, pair).value() * eq2.value();
    let r1 = e[0].derive(eq2)?.value() - e[1].derive(eq1)?.value() + lin(Pair::P12);
    let r2 = e[2].derive(eq1)?.value() + lin(Pair::P31);
    let r3 = -e[2].derive(eq2)?.value() + lin(Pair::P23);
    Ok([r1, r2, r3])
}

/// Jets of the coordinate gradient `g` of `ln f`, solving `E_a·g = (EQ1,
/// EQ2, 0)_a`.
pub fn frame_to_coordinate_gradient(a: &SymmetryAnalysis) -> Result<[Jet; 3]> {
    let [eq1, eq2] = regular_eq(a)?;
    let e = &a.frame().e;
    let rows = [e[0].0.clone(), e[1].0.clone(), e[2].0.clone()];
    solve3(&rows, &[eq1.clone(), eq2.clone(), eq1.zero_like()])
}

/// Base-point value of [`frame_to_coordinate_gradient`].
pub fn lnf_gradient(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<[f64; 3]> {
    let a = build_system(omega, metric, p, settings)?;
    Ok(frame_to_coordinate_gradient(&a)?.each_ref().map(Jet::value))
}

/// The jet of `ln f` at a point from the jets of its gradient, normalized to
/// `value` at the point.
pub fn lnf_jet(gradient: &[Jet; 3], value: f64) -> Result<Jet> {
    let g0 = &gradient[0];
    let valid = gradient.iter().map(Jet::valid_order).min().unwrap_or(0);
    let order = g0.order();
    let top = (valid + 1).min(order);
    let coeffs = multi_indices(order)
        .iter()
        .map(|m| {
            if m.degree() == 0 {
                return value;
            }
            if m.degree() > top {
                return 0.0;
            }
            let b = (0..3).find(|&b| m.0[b] > 0).expect("nonzero multi-index");
            let mut lower = *m;
            lower.0[b] -= 1;
            gradient[b].coefficient(lower) / m.0[b] as f64
        })
        .collect();
    Ok(Jet::from_coefficients(g0.base(), order, top, coeffs)?)
}

/// A reconstructed value of `ln f(target) − ln f(base)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub lnf: f64,
    /// Largest `|rᵢ|` over the quadrature nodes.
    pub max_residual: f64,
    pub evaluations: usize,
}

/// `ln f(target) − ln f(base)` by integrating the coordinate gradient along
/// the polyline `base → via… → target`.
///
/// Fails on a degenerate node or where a residual exceeds
/// `settings.residual_tol`, since the integral is then path dependent.
pub fn reconstruct_lnf(
    omega: &OneForm,
    metric: &MetricField,
    base: Point,
    target: Point,
    via: &[Point],
    settings: &Settings,
) -> Result<Reconstruction> {
    let mut nodes = vec![base];
    nodes.extend_from_slice(via);
    nodes.push(target);
    let mut out = Reconstruction {
        lnf: 0.0,
        max_residual: 0.0,
        evaluations: 0,
    };
    for leg in nodes.windows(2) {
        let (p0, p1) = (leg[0], leg[1]);
        let dir = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
        if dir == [0.0; 3] {
            continue;
        }
        out.lnf += quadrature::integrate(
            |t| {
                let p = [p0[0] + t * dir[0], p0[1] + t * dir[1], p0[2] + t * dir[2]];
                let a = build_system(omega, metric, p, settings)?;
                let r = integrability_residuals(&a)?;
                let worst = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if !(worst <= settings.residual_tol) {
                    return Err(Error::ResidualTooLarge {
                        point: p,
                        residual: worst,
                        tolerance: settings.residual_tol,
                    });
                }
                out.max_residual = out.max_residual.max(worst);
                out.evaluations += 1;
                let g = frame_to_coordinate_gradient(&a)?;
                Ok(g[0].value() * dir[0] + g[1].value() * dir[1] + g[2].value() * dir[2])
            },
            0.0,
            1.0,
            settings.quad_tol,
        )?;
    }
    Ok(out)
}

/// `V = −E₂(f)E₁ + E₁(f)E₂ + fE₃` with the rotation rate `λ = η²([E₁, V])`.
#[derive(Debug, Clone)]
pub struct SymmetryField {
    pub f: Jet,
    pub v: JetVector,
    pub lambda_mult: Jet,
}

pub fn assemble_field(frame: &AdaptedFrame, f: &Jet) -> Result<SymmetryField> {
    let e = &frame.e;
    let e1f = e[0].derive(f)?;
    let e2f = e[1].derive(f)?;
    let v = e[0].scale(&-e2f).add(&e[1].scale(&e1f)).add(&e[2].scale(f));
    let lambda_mult = frame.eta[1].apply(&lie_bracket(&e[0], &v)?);
    Ok(SymmetryField {
        f: f.clone(),
        v,
        lambda_mult,
    })
}

/// Defects of a candidate symmetry at a point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Verification {
    pub vk: f64,
    pub vm: f64,
    pub e3f: f64,
    /// `‖[E₁, V] − λE₂‖`.
    pub bracket1: f64,
    /// `‖[E₂, V] + λE₁‖`.
    pub bracket2: f64,
}

impl Verification {
    pub fn max(&self) -> f64 {
        [self.vk, self.vm, self.e3f, self.bracket1, self.bracket2]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn verify_field(contact: &ContactAnalysis, field: &SymmetryField) -> Result<Verification> {
    let e = &contact.frame.e;
    let v = &field.v;
    let lam = &field.lambda_mult;
    let d1 = lie_bracket(&e[0], v)?.sub(&e[1].scale(lam));
    let d2 = lie_bracket(&e[1], v)?.add(&e[0].scale(lam));
    Ok(Verification {
        vk: v.derive(&contact.invariants.k)?.value().abs(),
        vm: v.derive(&contact.invariants.m)?.value().abs(),
        e3f: e[2].derive(&field.f)?.value().abs(),
        bracket1: d1.norm_euclidean(),
        bracket2: d2.norm_euclidean(),
    })
}

/// Verifies a supplied `f` as the generating function of a symmetry.
pub fn verify_candidate(
    omega: &OneForm,
    metric: &MetricField,
    f: &dyn ScalarField,
    p: Point,
    settings: &Settings,
) -> Result<(SymmetryField, Verification)> {
    let contact = compute_invariants(omega, metric, p, settings)?;
    let fj = f.eval(p, settings.jet_order)?;
    let field = assemble_field(&contact.frame, &fj)?;
    let check = verify_field(&contact, &field)?;
    Ok((field, check))
}

/// Symmetry generated by the reconstructed `f` with `f(base) = 1`.
#[derive(Debug, Clone)]
pub struct ReconstructedSymmetry {
    pub reconstruction: Reconstruction,
    pub residuals: [f64; 3],
    pub gradient: [f64; 3],
    pub field: SymmetryField,
    pub verification: Verification,
}

pub fn reconstruct_symmetry(
    omega: &OneForm,
    metric: &MetricField,
    base: Point,
    p: Point,
    via: &[Point],
    settings: &Settings,
) -> Result<ReconstructedSymmetry> {
    let reconstruction = reconstruct_lnf(omega, metric, base, p, via, settings)?;
    let a = build_system(omega, metric, p, settings)?;
    let residuals = integrability_residuals(&a)?;
    let g = frame_to_coordinate_gradient(&a)?;
    let f = lnf_jet(&g, reconstruction.lnf)?.exp();
    let field = assemble_field(a.frame(), &f)?;
    let verification = verify_field(&a.contact, &field)?;
    Ok(ReconstructedSymmetry {
        reconstruction,
        residuals,
        gradient: g.each_ref().map(Jet::value),
        field,
        verification,
    })
}

/// `E_a(f)` along each frame vector, used by callers that inspect `V`.
pub fn frame_derivatives(frame: &AdaptedFrame, f: &Jet) -> Result<[Jet; 3]> {
    Ok([
        frame.e[0].derive(f)?,
        frame.e[1].derive(f)?,
        frame.e[2].derive(f)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::field::parse_scalar;
    use crate::jet::Axis;
    use approx::assert_abs_diff_eq;

    fn heis() -> OneForm {
        OneForm::parse("dz + y*dx - x*dy").unwrap()
    }

    /// Heisenberg with a metric that keeps `∂z` but breaks rotations.
    fn skewed() -> (OneForm, MetricField) {
        (
            heis(),
            MetricField::parse("1 + x^2; 0; 0; 1; 0; 1").unwrap(),
        )
    }

    #[test]
    fn heisenberg_is_degenerate_everywhere() {
        let g = MetricField::euclidean();
        let s = Settings::default();
        for p in [[0.0; 3], [1.0, 0.0, 0.0], [0.4, 0.3, 0.1], [-1.2, 0.7, 2.0]] {
            let a = build_system(&heis(), &g, p, &s).unwrap();
            assert!(a.system.degenerate, "{p:?}");
            assert!(matches!(
                integrability_residuals(&a),
                Err(Error::Degenerate(_))
            ));
        }
    }

    #[test]
    fn gradient_matches_the_generator_of_translations() {
        let (w, g) = skewed();
        let s = Settings::default();
        let p = [0.4, -0.7, 1.2];
        let a = build_system(&w, &g, p, &s).unwrap();
        assert!(!a.system.degenerate);
        let r = integrability_residuals(&a).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-12), "{r:?}");
        let grad = frame_to_coordinate_gradient(&a).unwrap();
        // ∂z ↔ f = −1/λ; compare with central differences of −ln|λ|
        let h = 1e-4;
        for i in 0..3 {
            let (mut q, mut r) = (p, p);
            q[i] += h;
            r[i] -= h;
            let l = |q| {
                crate::frame::nonholonomity(&w, &g, q, &s)
                    .unwrap()
                    .value()
                    .abs()
                    .ln()
            };
            assert_abs_diff_eq!(grad[i].value(), -(l(q) - l(r)) / (2.0 * h), epsilon = 1e-7);
        }
    }

    #[test]
    fn reconstruction_is_path_independent() {
        let (w, g) = skewed();
        let s = Settings::default();
        let (a, b) = ([0.4, -0.7, 1.2], [1.1, 0.3, -0.5]);
        let direct = reconstruct_lnf(&w, &g, a, b, &[], &s).unwrap();
        let bent = reconstruct_lnf(&w, &g, a, b, &[[0.9, -0.2, 0.0]], &s).unwrap();
        assert_abs_diff_eq!(direct.lnf, bent.lnf, epsilon = 1e-9);
        assert_eq!(reconstruct_lnf(&w, &g, a, a, &[], &s).unwrap().lnf, 0.0);
        let rs = reconstruct_symmetry(&w, &g, a, b, &[], &s).unwrap();
        assert!(rs.verification.max() < 1e-9, "{:?}", rs.verification);
        // V is a constant multiple of ∂z
        let v = rs.field.v.values();
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn residual_failure_is_reported() {
        let w = OneForm::parse("dz + y*dx - x*dy + 0.1*x^2*dz").unwrap();
        let g = MetricField::parse("1 + x^2; 0; 0; 1 + y^2; 0; 1").unwrap();
        let s = Settings::default();
        let a = build_system(&w, &g, [0.4, -0.7, 1.2], &s).unwrap();
        let r1 = integrability_residuals(&a).unwrap();
        let r2 =
            integrability_residuals(&build_system(&w, &g, [0.4, -0.7, 1.2], &s).unwrap()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn injected_heisenberg_symmetry_verifies() {
        let f = parse_scalar("sqrt(1 + x^2 + y^2)").unwrap();
        let s = Settings::default();
        let (field, check) =
            verify_candidate(&heis(), &MetricField::euclidean(), f.as_ref(), [0.0; 3], &s).unwrap();
        let v = field.v.values();
        assert_abs_diff_eq!(v[2], -2.0, epsilon = 1e-12);
        assert!(check.max() < 1e-10, "{check:?}");
    }

    #[test]
    fn zero_function_gives_zero_field() {
        let f = parse_scalar("0").unwrap();
        let (field, check) = verify_candidate(
            &heis(),
            &MetricField::euclidean(),
            f.as_ref(),
            [0.2, 0.1, 0.0],
            &Settings::default(),
        )
        .unwrap();
        assert_eq!(field.v.values(), [0.0; 3]);
        assert_eq!(check.max(), 0.0);
    }

    #[test]
    fn lnf_jet_integrates_a_gradient() {
        let p = [0.3, -0.2, 0.5];
        let h = Expr::parse("x^2*y + sin(z) - y^3").unwrap();
        let hj = h.eval_jet(p, 4).unwrap();
        let grad = [Axis::X, Axis::Y, Axis::Z].map(|a| hj.partial(a).unwrap());
        let l = lnf_jet(&grad, hj.value()).unwrap();
        assert_eq!(l.valid_order(), 4);
        for (a, b) in l.coefficients().iter().zip(hj.coefficients()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }
}
