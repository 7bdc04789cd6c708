//! Orthonormal bases of the distribution and the adapted frame of a contact
//! sub-Riemannian surface.
//!
//! At a contact point the adapted coframe is normalized so that
//! `dη³ = η¹∧η²`. With `λ = ω([E₁, E₂])` for an oriented orthonormal basis of
//! `Δ = ker ω` this means `η³ = −ω/λ`. `E₃` is the Reeb field of `η³`, which
//! in three dimensions is the kernel vector of `dη³` rescaled so that
//! `η³(E₃) = 1`, and `η¹, η²` complete the dual coframe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{MetricField, MetricJets, OneForm};
use crate::jet::{Axis, Jet, Point};
use crate::settings::Settings;
use crate::vector::{det3, dual_coframe, lie_bracket, Covector, JetVector};

/// An oriented `g`-orthonormal basis of `Δ = ker ω` at a point.
#[derive(Debug, Clone)]
pub struct DeltaBasis {
    pub e1: JetVector,
    pub e2: JetVector,
    /// `g⁻¹ω`, normal to Δ.
    pub normal: JetVector,
    pub omega: Covector,
    pub metric: MetricJets,
    /// Coordinate field whose projection seeded `E₁`.
    pub seed: Axis,
}

/// Builds `(E₁, E₂)`.
///
/// `E₁` is the normalized `g`-orthogonal projection of a coordinate field onto
/// Δ: the first of `∂x, ∂y, ∂z` whose projection has at least half the
/// largest projection norm. `E₂` is the unit vector of Δ orthogonal to `E₁`
/// with `det(E₁, E₂, g⁻¹ω) > 0`.
pub fn delta_basis(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<DeltaBasis> {
    let order = settings.jet_order;
    let w = omega.eval_nonvanishing(p, order)?;
    let g = metric.eval(p, order)?;
    let normal = g.raise(&w)?;
    let wn = w.apply(&normal);
    let one = Jet::constant(p, 1.0, order)?;

    let projections: Vec<(JetVector, f64)> = Axis::ALL
        .iter()
        .map(|&a| {
            let e = JetVector::coordinate(&one, a);
            let coeff = w.apply(&e).try_div(&wn)?;
            let proj = e.sub(&normal.scale(&coeff));
            let norm = g.inner(&proj, &proj).value().max(0.0).sqrt();
            Ok((proj, norm))
        })
        .collect::<Result<_>>()?;
    let largest = projections.iter().map(|(_, n)| *n).fold(0.0, f64::max);
    let seed = match settings.gauge.seed {
        Some(a) if projections[a.index()].1 > 1e-6 * largest => a,
        _ => Axis::ALL
            .into_iter()
            .find(|a| projections[a.index()].1 >= 0.5 * largest)
            .expect("largest projection qualifies"),
    };
    let e1 = g.normalize(&projections[seed.index()].0)?;
    let u = w.cross(&g.lower(&e1));
    let mut e2 = g.normalize(&u)?;
    if det3(&e1, &e2, &normal).value() < 0.0 {
        e2 = e2.scale_f64(-1.0);
    }
    let (e1, e2) = match &settings.gauge.rotation {
        None => (e1, e2),
        Some(theta) => {
            let t = theta.eval(p, order)?;
            let (c, s) = (t.cos(), t.sin());
            (
                e1.scale(&c).add(&e2.scale(&s)),
                e2.scale(&c).sub(&e1.scale(&s)),
            )
        }
    };
    Ok(DeltaBasis {
        e1,
        e2,
        normal,
        omega: w,
        metric: g,
        seed,
    })
}

/// `λ_ω = ω([E₁, E₂])` for the oriented orthonormal basis of Δ.
pub fn nonholonomity(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<Jet> {
    let basis = delta_basis(omega, metric, p, settings)?;
    Ok(basis.omega.apply(&lie_bracket(&basis.e1, &basis.e2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Contact,
    Singular,
}

/// Frame `(E₁, E₂, E₃)` and dual coframe `(η¹, η², η³)` at a point.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub kind: FrameKind,
    pub e: [JetVector; 3],
    pub eta: [Covector; 3],
    /// Nonholonomity `ω([E₁, E₂])` of the form the frame was built from.
    pub lambda: Jet,
}

impl AdaptedFrame {
    pub fn base(&self) -> Point {
        self.lambda.base()
    }

    /// Components of `v` in the frame, `η^a(v)`.
    pub fn frame_components(&self, v: &JetVector) -> [Jet; 3] {
        self.eta.each_ref().map(|eta| eta.apply(v))
    }

    /// `(E₁, E₂, E₃)` evaluated at the base point, one row per vector.
    pub fn frame_matrix(&self) -> [[f64; 3]; 3] {
        self.e.each_ref().map(JetVector::values)
    }
}

/// Index pair `(bc)` of a structure function `C^a_{bc}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pair {
    P23,
    P31,
    P12,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P23, Pair::P31, Pair::P12];

    pub fn index(self) -> usize {
        self as usize
    }

    fn members(self) -> (usize, usize) {
        match self {
            Pair::P23 => (1, 2),
            Pair::P31 => (2, 0),
            Pair::P12 => (0, 1),
        }
    }
}

/// The nine `C^a_{bc}` with `dη^a = Σ C^a_{bc} η^b∧η^c` over `(bc) ∈
/// {23, 31, 12}`, equivalently `C^a_{bc} = −η^a([E_b, E_c])`.
///
/// An entry is absent when the frame lacks the derivative budget for its
/// bracket, which happens for singular frames whose `E₃` is only known by
/// value on Σ.
#[derive(Debug, Clone)]
pub struct StructureFunctions {
    c: [[Option<Jet>; 3]; 3],
}

impl StructureFunctions {
    /// `C^a_{pair}` with `a ∈ 1..=3`. Panics if the entry is absent.
    pub fn get(&self, a: usize, pair: Pair) -> &Jet {
        self.try_get(a, pair)
            .unwrap_or_else(|| panic!("C^{a}_{pair:?} not available at this point"))
    }

    pub fn try_get(&self, a: usize, pair: Pair) -> Option<&Jet> {
        self.c[a - 1][pair.index()].as_ref()
    }

    pub fn is_complete(&self) -> bool {
        self.c.iter().flatten().all(Option::is_some)
    }

    /// Base-point values, NaN where absent.
    pub fn values(&self) -> [[f64; 3]; 3] {
        self.c.each_ref().map(|row| {
            row.each_ref()
                .map(|j| j.as_ref().map_or(f64::NAN, Jet::value))
        })
    }

    pub fn from_rows(c: [[Jet; 3]; 3]) -> Self {
        StructureFunctions {
            c: c.map(|row| row.map(Some)),
        }
    }

    /// Smallest valid order among the present entries.
    pub fn valid_order(&self) -> u8 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .map(Jet::valid_order)
            .min()
            .unwrap_or(0)
    }
}

/// Structure functions of a frame from its Lie brackets; fails if any
/// bracket exceeds the derivative budget.
pub fn structure_functions(frame: &AdaptedFrame) -> Result<StructureFunctions> {
    let mut rows: [[Option<Jet>; 3]; 3] = Default::default();
    for pair in Pair::ALL {
        let br = pair_bracket(frame, pair)?;
        for a in 0..3 {
            rows[a][pair.index()] = Some(-frame.eta[a].apply(&br));
        }
    }
    Ok(StructureFunctions { c: rows })
}

/// Like [`structure_functions`], leaving out the pairs whose bracket runs out
/// of derivative budget.
pub fn available_structure_functions(frame: &AdaptedFrame) -> Result<StructureFunctions> {
    let mut rows: [[Option<Jet>; 3]; 3] = Default::default();
    for pair in Pair::ALL {
        match pair_bracket(frame, pair) {
            Ok(br) => {
                for a in 0..3 {
                    rows[a][pair.index()] = Some(-frame.eta[a].apply(&br));
                }
            }
            Err(crate::error::JetError::BudgetExhausted { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(StructureFunctions { c: rows })
}

fn pair_bracket(
    frame: &AdaptedFrame,
    pair: Pair,
) -> std::result::Result<JetVector, crate::error::JetError> {
    let (b, c) = pair.members();
    lie_bracket(&frame.e[b], &frame.e[c])
}

/// Adapted frame at a contact point and its structure functions.
pub fn build_contact_frame(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<(AdaptedFrame, StructureFunctions)> {
    let basis = delta_basis(omega, metric, p, settings)?;
    let lambda = basis.omega.apply(&lie_bracket(&basis.e1, &basis.e2)?);
    if !(lambda.value().abs() >= settings.eps_contact) {
        return Err(Error::NonContact {
            point: p,
            lambda: lambda.value(),
        });
    }
    let scale = -lambda.recip()?;
    let eta3 = basis.omega.scale(&scale);
    let d_eta3 = eta3.exterior_derivative()?;
    let w = d_eta3.as_vector();
    let e3 = w.scale(&eta3.apply(&w).recip().map_err(|_| Error::NonContact {
        point: p,
        lambda: lambda.value(),
    })?);
    let e = [basis.e1, basis.e2, e3];
    let eta = dual_coframe(&e)?;
    let frame = AdaptedFrame {
        kind: FrameKind::Contact,
        e,
        eta,
        lambda,
    };
    let c = structure_functions(&frame)?;
    Ok((frame, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn heis() -> OneForm {
        OneForm::parse("dz + y*dx - x*dy").unwrap()
    }

    fn cartan() -> OneForm {
        OneForm::parse("dz + y*dx").unwrap()
    }

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) {
        for i in 0..3 {
            assert_abs_diff_eq!(a[i], b[i], epsilon = tol);
        }
    }

    #[test]
    fn delta_basis_at_origin() {
        let s = Settings::default();
        let g = MetricField::euclidean();
        for w in [heis(), cartan()] {
            let b = delta_basis(&w, &g, [0.0; 3], &s).unwrap();
            close(b.e1.values(), [1.0, 0.0, 0.0], 1e-15);
            close(b.e2.values(), [0.0, 1.0, 0.0], 1e-15);
        }
    }

    #[test]
    fn heisenberg_e1_on_the_y_axis() {
        let b = delta_basis(
            &heis(),
            &MetricField::euclidean(),
            [0.0, 1.0, 0.0],
            &Settings::default(),
        )
        .unwrap();
        let r = 0.5f64.sqrt();
        close(b.e1.values(), [r, 0.0, -r], 1e-15);
    }

    #[test]
    fn nonholonomity_examples() {
        let s = Settings::default();
        let g = MetricField::euclidean();
        assert_abs_diff_eq!(
            nonholonomity(&heis(), &g, [0.0; 3], &s).unwrap().value(),
            2.0,
            epsilon = 1e-14
        );
        for y in [-1.5, 0.0, 0.4, 2.0] {
            let l = nonholonomity(&cartan(), &g, [0.0, y, 0.0], &s).unwrap();
            assert_abs_diff_eq!(l.value(), 1.0 / (1.0 + y * y).sqrt(), epsilon = 1e-14);
        }
        let w1 = OneForm::parse("dy + x^2*dz").unwrap();
        for x in [-0.8, 0.0, 0.3, 1.7] {
            let l = nonholonomity(&w1, &g, [x, 0.0, 0.0], &s).unwrap();
            assert_abs_diff_eq!(
                l.value(),
                2.0 * x / (1.0 + x.powi(4)).sqrt(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn heisenberg_coframe_calibration() {
        let (frame, c) = build_contact_frame(
            &heis(),
            &MetricField::euclidean(),
            [0.0; 3],
            &Settings::default(),
        )
        .unwrap();
        close(frame.e[2].values(), [0.0, 0.0, -2.0], 1e-14);
        close(frame.eta[2].values(), [0.0, 0.0, -0.5], 1e-14);
        let v = c.values();
        assert_abs_diff_eq!(v[2][2], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(v[0][0], -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(v[1][1], -1.0, epsilon = 1e-13);
    }

    #[test]
    fn cartan_structure_functions_along_y() {
        let s = Settings::default();
        for y in [0.5, 1.0, -1.3] {
            let (_, c) =
                build_contact_frame(&cartan(), &MetricField::euclidean(), [0.2, y, -0.4], &s)
                    .unwrap();
            let v = c.values();
            let q = 1.0 + y * y;
            assert_abs_diff_eq!(v[0][0], -(1.0 - 2.0 * y * y) / (q * q), epsilon = 1e-12);
            assert_abs_diff_eq!(v[0][2], -2.0 * y / q, epsilon = 1e-12);
            assert_abs_diff_eq!(v[0][1], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v[1][1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn contact_frame_rows_of_the_third_coframe() {
        let (_, c) = build_contact_frame(
            &heis(),
            &MetricField::euclidean(),
            [0.3, 1.0, -0.2],
            &Settings::default(),
        )
        .unwrap();
        let v = c.values();
        assert_abs_diff_eq!(v[2][0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2][1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2][2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0][1], v[1][0], epsilon = 1e-12);
    }

    #[test]
    fn cartan_structure_functions_at_origin() {
        let (frame, c) = build_contact_frame(
            &cartan(),
            &MetricField::euclidean(),
            [0.0; 3],
            &Settings::default(),
        )
        .unwrap();
        let v = c.values();
        assert_abs_diff_eq!(v[0][0], -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(v[0][2], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(v[2][2], 1.0, epsilon = 1e-13);
        // [E₁, E₂] = −(C¹₁₂E₁ + C²₁₂E₂ + E₃)
        let br = lie_bracket(&frame.e[0], &frame.e[1]).unwrap().values();
        let want: Vec<f64> = (0..3)
            .map(|i| {
                -(v[0][2] * frame.e[0].values()[i]
                    + v[1][2] * frame.e[1].values()[i]
                    + frame.e[2].values()[i])
            })
            .collect();
        close(br, [want[0], want[1], want[2]], 1e-13);
    }

    #[test]
    fn noncontact_point_is_flagged() {
        let w1 = OneForm::parse("dy + x^2*dz").unwrap();
        assert!(matches!(
            build_contact_frame(
                &w1,
                &MetricField::euclidean(),
                [0.0, 0.3, 0.1],
                &Settings::default()
            ),
            Err(Error::NonContact { .. })
        ));
    }
}
