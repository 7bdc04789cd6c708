//! The singular surface `Σ = {ω∧dω = 0}` of a noncontact distribution.
//!
//! `Σ` is the zero set of the nonholonomity `λ`. Near `Σ` a special form `ω`
//! has a characteristic field `E₃` spanning `ker dω` with `ω(E₃) = 1`. The
//! singular adapted frame takes `E₁` tangent to the level sets of `λ`,
//! `η³ = ω`, and its structure functions `C¹₁₂, C²₁₂` restricted to `Σ` are
//! invariants of the structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, JetError, Result};
use crate::field::{FieldRef, FnField, MetricField, OneForm, ScalarField};
use crate::frame::{
    available_structure_functions, delta_basis, nonholonomity, AdaptedFrame, FrameKind, Pair,
    StructureFunctions,
};
use crate::jet::{Axis, Jet, Point, MAX_ORDER};
use crate::settings::Settings;
use crate::vector::{det3, dual_coframe, lie_bracket, Covector, JetVector};

/// Samples per probe segment when bracketing sign changes of `λ`.
pub const PROBE_SAMPLES: usize = 64;

const MAX_ROOT_ITERATIONS: usize = 200;

/// `λ_ω` as a scalar field, fully valid to the requested order.
///
/// The bracket consumes one order, so it is evaluated one order higher and
/// truncated; at the maximum order the top coefficients stay invalid.
pub fn nonholonomity_field(omega: &OneForm, metric: &MetricField, settings: &Settings) -> FieldRef {
    let (omega, metric, settings) = (omega.clone(), metric.clone(), settings.clone());
    FnField::new("lambda", move |p, order| {
        let s = settings.clone().with_order((order + 1).min(MAX_ORDER));
        Ok(nonholonomity(&omega, &metric, p, &s)?.truncate(order)?)
    })
}

/// A located point of Σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub point: Point,
    /// Parameter along the probe segment.
    pub t: f64,
    pub lambda_residual: f64,
    pub transversal: bool,
    /// `|dλ|_Δ|` in the metric.
    pub lambda_gradient_on_delta: f64,
}

fn lerp(p0: Point, p1: Point, t: f64) -> Point {
    [0, 1, 2].map(|i| p0[i] + t * (p1[i] - p0[i]))
}

fn lambda_value(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<f64> {
    Ok(nonholonomity(omega, metric, p, &settings.clone().with_order(1))?.value())
}

/// `|dλ|_Δ| = ((E₁λ)² + (E₂λ)²)^½` for any orthonormal basis of Δ.
pub fn lambda_gradient_on_delta(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<f64> {
    let s = settings.clone().with_order(settings.jet_order.max(2));
    let basis = delta_basis(omega, metric, p, &s)?;
    let lam = basis.omega.apply(&lie_bracket(&basis.e1, &basis.e2)?);
    let a = basis.e1.derive(&lam)?.value();
    let b = basis.e2.derive(&lam)?.value();
    Ok(a.hypot(b))
}

/// Roots of `λ` on the segment `p0 → p1`, ordered by parameter.
///
/// Sign changes between [`PROBE_SAMPLES`] equally spaced samples are refined
/// by Illinois regula falsi until `|λ|` falls below `settings.root_tol`.
/// Tangential zeros without a sign change are not reported.
pub fn locate_sigma(
    omega: &OneForm,
    metric: &MetricField,
    p0: Point,
    p1: Point,
    settings: &Settings,
) -> Result<Vec<SigmaPoint>> {
    let f = |t: f64| lambda_value(omega, metric, lerp(p0, p1, t), settings);
    let ts: Vec<f64> = (0..=PROBE_SAMPLES)
        .map(|i| i as f64 / PROBE_SAMPLES as f64)
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 0..PROBE_SAMPLES {
        let (a, b, fa, fb) = (ts[i], ts[i + 1], vals[i], vals[i + 1]);
        if fa == 0.0 {
            roots.push((a, 0.0));
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(refine_root(&f, a, b, fa, fb, settings.root_tol)?);
        }
    }
    if vals[PROBE_SAMPLES] == 0.0 {
        roots.push((1.0, 0.0));
    }
    roots
        .into_iter()
        .map(|(t, residual)| {
            let point = lerp(p0, p1, t);
            let grad = lambda_gradient_on_delta(omega, metric, point, settings)?;
            Ok(SigmaPoint {
                point,
                t,
                lambda_residual: residual,
                transversal: grad > settings.eps_transversal,
                lambda_gradient_on_delta: grad,
            })
        })
        .collect()
}

fn refine_root<F>(
    f: &F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut best = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    let mut side = 0i8;
    for _ in 0..MAX_ROOT_ITERATIONS {
        let mut t = (a * fb - b * fa) / (fb - fa);
        if !(t > a && t < b) {
            t = 0.5 * (a + b);
        }
        let ft = f(t)?;
        if ft.abs() < best.1.abs() {
            best = (t, ft);
        }
        if ft == 0.0 || (ft.abs() < 1e-3 * tol) || b - a <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
        if ft.signum() == fb.signum() {
            b = t;
            fb = ft;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = t;
            fa = ft;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    Ok((best.0, best.1.abs()))
}

/// Characteristic field of `ω`, with a flag for values obtained by
/// extrapolation onto Σ.
#[derive(Debug, Clone)]
pub struct CharacteristicField {
    pub v: JetVector,
    /// Set when `ker dω` degenerates at the point; `v` is then value-only.
    pub extrapolated: bool,
}

fn direct_characteristic(
    omega: &OneForm,
    p: Point,
    order: u8,
    eps: f64,
) -> Result<Option<JetVector>> {
    let w_form = omega.eval_nonvanishing(p, order)?;
    let w = w_form.exterior_derivative()?.as_vector();
    let wmax = w.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(wmax > eps) {
        return Ok(None);
    }
    let ow = w_form.apply(&w);
    if !(ow.value().abs() > eps * wmax) {
        return Err(Error::NoCharacteristicField {
            point: p,
            reason: "ω vanishes on ker dω".into(),
        });
    }
    Ok(Some(w.scale(&ow.recip()?)))
}

/// Euclidean unit normal of the level set of `ω∧dω` through `p`.
pub fn sigma_normal(omega: &OneForm, p: Point) -> Result<[f64; 3]> {
    let w = omega.eval(p, 2)?;
    let defect = w.wedge(&w.exterior_derivative()?);
    let g = defect.gradient();
    let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    if !(n > 0.0) {
        return Err(Error::NoCharacteristicField {
            point: p,
            reason: "contact defect has a critical point".into(),
        });
    }
    Ok(g.map(|c| c / n))
}

/// `V = w/ω(w)` for `w` spanning `ker dω`.
///
/// Where `w` vanishes, the value is extrapolated from `p ± h n` along the
/// Σ-normal, with `h = ε, ε/2` and `(4A(ε/2) − A(ε))/3` for the symmetric
/// means `A`.
pub fn characteristic_field(
    omega: &OneForm,
    p: Point,
    settings: &Settings,
) -> Result<CharacteristicField> {
    let order = settings.jet_order;
    if let Some(v) = direct_characteristic(omega, p, order, settings.eps_kernel)? {
        return Ok(CharacteristicField {
            v,
            extrapolated: false,
        });
    }
    let n = sigma_normal(omega, p)?;
    let mean = |h: f64| -> Result<[f64; 3]> {
        let mut acc = [0.0; 3];
        for s in [h, -h] {
            let q = [0, 1, 2].map(|i| p[i] + s * n[i]);
            let v = direct_characteristic(omega, q, 1, settings.eps_kernel)?.ok_or_else(|| {
                Error::NoCharacteristicField {
                    point: p,
                    reason: "dω vanishes near Σ".into(),
                }
            })?;
            for (a, x) in acc.iter_mut().zip(v.values()) {
                *a += 0.5 * x;
            }
        }
        Ok(acc)
    };
    let eps = settings.extrapolation_step;
    let (coarse, fine) = (mean(eps)?, mean(0.5 * eps)?);
    let v = [0, 1, 2].map(|i| (4.0 * fine[i] - coarse[i]) / 3.0);
    let comps = v
        .iter()
        .map(|&x| Jet::value_only(p, x, order))
        .collect::<std::result::Result<Vec<_>, JetError>>()?;
    Ok(CharacteristicField {
        v: JetVector([comps[0].clone(), comps[1].clone(), comps[2].clone()]),
        extrapolated: true,
    })
}

/// Singular frame, its structure functions and the quantities it is built
/// from.
#[derive(Debug, Clone)]
pub struct SingularAnalysis {
    pub frame: AdaptedFrame,
    pub c: StructureFunctions,
    /// `λ_ω` with full derivative budget.
    pub lambda: Jet,
    pub characteristic: CharacteristicField,
    pub lambda_gradient_on_delta: f64,
}

/// Builds the singular adapted frame at `p`.
///
/// `E₁` spans `Δ ∩ ker dλ` with its first nonzero component positive, or
/// with positive inner product against `orientation` when given; `E₂`
/// completes an oriented orthonormal basis of Δ; `E₃` is the characteristic
/// field.
pub fn analyze_singular(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    orientation: Option<[f64; 3]>,
    settings: &Settings,
) -> Result<SingularAnalysis> {
    let order = settings.jet_order;
    let lam_field = nonholonomity_field(omega, metric, settings);
    let lambda = lam_field.eval(p, order)?;
    let omega_j = omega.eval_nonvanishing(p, order)?;
    let g = metric.eval(p, order)?;
    let normal = g.raise(&omega_j)?;
    let dlam = Covector(
        Axis::ALL
            .map(|a| lambda.partial(a))
            .map(|r| r.expect("order ≥ 1")),
    );

    let basis = delta_basis(omega, metric, p, settings)?;
    let grad = basis
        .e1
        .derive(&lambda)?
        .value()
        .hypot(basis.e2.derive(&lambda)?.value());
    if !(grad > settings.eps_transversal) {
        return Err(Error::NotTransversal(p));
    }

    let mut e1 = g.normalize(&omega_j.cross(&dlam))?;
    let v = e1.values();
    let flip = match orientation {
        Some(r) => v[0] * r[0] + v[1] * r[1] + v[2] * r[2] < 0.0,
        None => {
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            v.iter()
                .find(|x| x.abs() > 1e-12 * scale)
                .is_some_and(|x| *x < 0.0)
        }
    };
    if flip {
        e1 = e1.scale_f64(-1.0);
    }
    let mut e2 = g.normalize(&omega_j.cross(&g.lower(&e1)))?;
    if det3(&e1, &e2, &normal).value() < 0.0 {
        e2 = e2.scale_f64(-1.0);
    }
    let characteristic = characteristic_field(omega, p, settings)?;
    let e = [e1, e2, characteristic.v.clone()];
    let eta = dual_coframe(&e)?;
    let frame_lambda = omega_j.apply(&lie_bracket(&e[0], &e[1])?);
    let frame = AdaptedFrame {
        kind: FrameKind::Singular,
        e,
        eta,
        lambda: frame_lambda,
    };
    let c = available_structure_functions(&frame)?;
    Ok(SingularAnalysis {
        frame,
        c,
        lambda,
        characteristic,
        lambda_gradient_on_delta: grad,
    })
}

pub fn build_singular_frame(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<(AdaptedFrame, StructureFunctions)> {
    let a = analyze_singular(omega, metric, p, None, settings)?;
    Ok((a.frame, a.c))
}

/// Residuals of the identities satisfied by the singular frame. Entries
/// needing `E₃`-brackets are absent on Σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaIdentities {
    /// `E₁λ`.
    pub e1_lambda: f64,
    /// `E₃λ + λ(C¹₃₁ − C²₂₃)`.
    pub lambda3_defect: Option<f64>,
    /// `C³₁₂ + λ`, i.e. `dη³(E₁, E₂) + λ`.
    pub c3_12_defect: f64,
    pub c3_23: Option<f64>,
    pub c3_31: Option<f64>,
}

pub fn lambda_identities(a: &SingularAnalysis) -> Result<LambdaIdentities> {
    let e = &a.frame.e;
    let lam = &a.lambda;
    let e1_lambda = e[0].derive(lam)?.value();
    let c = &a.c;
    let lambda3_defect = match (c.try_get(1, Pair::P31), c.try_get(2, Pair::P23)) {
        (Some(c131), Some(c223)) => match e[2].derive(lam) {
            Ok(l3) => Some(l3.value() + lam.value() * (c131.value() - c223.value())),
            Err(_) => None,
        },
        _ => None,
    };
    Ok(LambdaIdentities {
        e1_lambda,
        lambda3_defect,
        c3_12_defect: c.get(3, Pair::P12).value() + lam.value(),
        c3_23: c.try_get(3, Pair::P23).map(Jet::value),
        c3_31: c.try_get(3, Pair::P31).map(Jet::value),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaInvariants {
    pub q112: f64,
    pub q212: f64,
}

/// `(Q¹₁₂, Q²₁₂) = (C¹₁₂, C²₁₂)` of the singular frame at a Σ-point.
pub fn sigma_invariants(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    settings: &Settings,
) -> Result<SigmaInvariants> {
    let a = analyze_singular(omega, metric, p, None, settings)?;
    Ok(invariants_of(&a))
}

fn invariants_of(a: &SingularAnalysis) -> SigmaInvariants {
    SigmaInvariants {
        q112: a.c.get(1, Pair::P12).value(),
        q212: a.c.get(2, Pair::P12).value(),
    }
}

/// One Σ-point of a specialness check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleEntry {
    pub point: Point,
    pub dphi_on_delta: f64,
    pub dlambda_on_delta: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleReport {
    pub entries: Vec<RescaleEntry>,
    /// Every entry passes. Necessary for `e^φω` to stay special.
    pub preserves_specialness: bool,
}

/// Checks `|dφ|_Δ| ≤ tol·|dλ|_Δ|` at each Σ-point.
pub fn check_special_rescale(
    omega: &OneForm,
    metric: &MetricField,
    phi: &dyn ScalarField,
    sigma_points: &[Point],
    tol: f64,
    settings: &Settings,
) -> Result<RescaleReport> {
    let entries = sigma_points
        .iter()
        .map(|&p| {
            let basis = delta_basis(omega, metric, p, settings)?;
            let phi_j = phi.eval(p, settings.jet_order)?;
            let dphi = basis
                .e1
                .derive(&phi_j)?
                .value()
                .hypot(basis.e2.derive(&phi_j)?.value());
            let dlam = lambda_gradient_on_delta(omega, metric, p, settings)?;
            Ok(RescaleEntry {
                point: p,
                dphi_on_delta: dphi,
                dlambda_on_delta: dlam,
                passes: dphi <= tol * dlam,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let preserves_specialness = entries.iter().all(|e| e.passes);
    Ok(RescaleReport {
        entries,
        preserves_specialness,
    })
}

/// `e^{λ²}ω`, a rescaling that keeps a special form special.
pub fn lambda_squared_rescale(
    omega: &OneForm,
    metric: &MetricField,
    settings: &Settings,
) -> OneForm {
    let lam = nonholonomity_field(omega, metric, settings);
    let phi: FieldRef = FnField::new("lambda^2", move |p, order| {
        let l = lam.eval(p, order)?;
        Ok(&l * &l)
    });
    omega.rescaled(phi, "lambda^2")
}

/// `(VQ¹₁₂, VQ²₁₂)` at a Σ-point by central differences along `v`, with the
/// displaced points projected back onto Σ along its normal.
pub fn q_derivative_along(
    omega: &OneForm,
    metric: &MetricField,
    p: Point,
    v: [f64; 3],
    h: f64,
    settings: &Settings,
) -> Result<[f64; 2]> {
    let base = analyze_singular(omega, metric, p, None, settings)?;
    let reference = base.frame.e[0].values();
    let n = sigma_normal(omega, p)?;
    let reach = 10.0 * h * (1.0 + v.iter().map(|x| x.abs()).sum::<f64>());
    let mut q = [[0.0; 2]; 2];
    for (k, s) in [h, -h].into_iter().enumerate() {
        let moved = [0, 1, 2].map(|i| p[i] + s * v[i]);
        let a = [0, 1, 2].map(|i| moved[i] - reach * n[i]);
        let b = [0, 1, 2].map(|i| moved[i] + reach * n[i]);
        let on = locate_sigma(omega, metric, a, b, settings)?
            .into_iter()
            .min_by(|x, y| (x.t - 0.5).abs().total_cmp(&(y.t - 0.5).abs()))
            .ok_or(Error::NotTransversal(moved))?;
        let inv = invariants_of(&analyze_singular(
            omega,
            metric,
            on.point,
            Some(reference),
            settings,
        )?);
        q[k] = [inv.q112, inv.q212];
    }
    Ok([0, 1].map(|i| (q[0][i] - q[1][i]) / (2.0 * h)))
}
