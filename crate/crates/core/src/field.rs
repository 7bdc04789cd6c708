//! Field programs: scalar fields, 1-forms and metrics that evaluate to jets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet, Point};
use crate::parse;
use crate::vector::{solve3, Covector, JetVector, TwoFormValue};

/// Anything that can be expanded as a jet at a point.
///
/// Evaluation must be deterministic: the same point and order give the same
/// coefficients bit for bit.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn eval(&self, p: Point, order: u8) -> Result<Jet>;
}

pub type FieldRef = Arc<dyn ScalarField>;

impl ScalarField for Expr {
    fn eval(&self, p: Point, order: u8) -> Result<Jet> {
        Ok(self.eval_jet(p, order)?)
    }
}

/// A field defined by a closure, used for derived quantities such as the
/// nonholonomity function or `e^φ·f`.
pub struct FnField<F> {
    label: String,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(Point, u8) -> Result<Jet> + Send + Sync + 'static,
{
    pub fn new(label: impl Into<String>, f: F) -> Arc<Self> {
        Arc::new(FnField {
            label: label.into(),
            f,
        })
    }
}

impl<F> fmt::Debug for FnField<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnField({})", self.label)
    }
}

impl<F> ScalarField for FnField<F>
where
    F: Fn(Point, u8) -> Result<Jet> + Send + Sync,
{
    fn eval(&self, p: Point, order: u8) -> Result<Jet> {
        (self.f)(p, order)
    }
}

pub fn expr_field(e: Expr) -> FieldRef {
    Arc::new(e)
}

/// Parses a scalar expression into a field.
pub fn parse_scalar(text: &str) -> Result<FieldRef> {
    Ok(expr_field(Expr::parse(text)?))
}

/// `ω = f₁ dx + f₂ dy + f₃ dz`.
#[derive(Clone)]
pub struct OneForm {
    comps: [FieldRef; 3],
    exprs: Option<[Expr; 3]>,
    label: String,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm({})", self.label)
    }
}

impl OneForm {
    pub fn parse(text: &str) -> Result<OneForm> {
        let exprs = parse::parse_one_form_exprs(text)?;
        Ok(OneForm {
            comps: exprs.clone().map(expr_field),
            exprs: Some(exprs),
            label: text.trim().to_string(),
        })
    }

    pub fn from_fields(comps: [FieldRef; 3], label: impl Into<String>) -> OneForm {
        OneForm {
            comps,
            exprs: None,
            label: label.into(),
        }
    }

    /// Coefficient expressions, when the form was parsed from text.
    pub fn expressions(&self) -> Option<&[Expr; 3]> {
        self.exprs.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[FieldRef; 3] {
        &self.comps
    }

    pub fn eval(&self, p: Point, order: u8) -> Result<Covector> {
        Ok(Covector([
            self.comps[0].eval(p, order)?,
            self.comps[1].eval(p, order)?,
            self.comps[2].eval(p, order)?,
        ]))
    }

    /// Like [`eval`](Self::eval), but fails where the form vanishes.
    pub fn eval_nonvanishing(&self, p: Point, order: u8) -> Result<Covector> {
        let c = self.eval(p, order)?;
        let v = c.values();
        if v.iter().all(|x| x.abs() < 1e-300) || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::VanishingForm(p));
        }
        Ok(c)
    }

    /// `e^φ ω`.
    pub fn rescaled(&self, phi: FieldRef, label: &str) -> OneForm {
        let comps = self.comps.clone().map(|c| {
            let phi = phi.clone();
            let f: FieldRef = FnField::new("e^φ·f", move |p, order| {
                Ok(phi.eval(p, order)?.exp().try_mul(&c.eval(p, order)?)?)
            });
            f
        });
        OneForm {
            comps,
            exprs: None,
            label: format!("exp({label})*({})", self.label),
        }
    }

    /// `−ω`.
    pub fn negated(&self) -> OneForm {
        let comps = self.comps.clone().map(|c| {
            let f: FieldRef = FnField::new("-f", move |p, order| Ok(-c.eval(p, order)?));
            f
        });
        OneForm {
            comps,
            exprs: None,
            label: format!("-({})", self.label),
        }
    }

    /// `dω` at `p`; components carry one order less than the input.
    pub fn exterior_derivative(&self, p: Point, order: u8) -> Result<TwoFormValue> {
        Ok(self.eval(p, order)?.exterior_derivative()?)
    }

    /// Coefficient of `ω∧dω` against `dx∧dy∧dz`; zero exactly on the
    /// singular surface.
    pub fn contact_defect(&self, p: Point, order: u8) -> Result<f64> {
        let omega = self.eval(p, order.max(1))?;
        let d = omega.exterior_derivative()?;
        Ok(omega.wedge(&d).value())
    }
}

/// Ambient metric `g`, stored as its upper triangle; `None` is the identity.
#[derive(Clone, Default)]
pub struct MetricField {
    entries: Option<[FieldRef; 6]>,
    label: Option<String>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            None => f.write_str("MetricField(identity)"),
            Some(l) => write!(f, "MetricField({l})"),
        }
    }
}

impl MetricField {
    pub fn euclidean() -> MetricField {
        MetricField::default()
    }

    /// Parses a metric block: six expressions `g11 g12 g13 g22 g23 g33`.
    pub fn parse(text: &str) -> Result<MetricField> {
        let exprs = parse::parse_metric_block(text)?;
        let label = exprs
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        Ok(MetricField {
            entries: Some(exprs.map(expr_field)),
            label: Some(label),
        })
    }

    pub fn from_fields(entries: [FieldRef; 6]) -> MetricField {
        MetricField {
            entries: Some(entries),
            label: Some("custom".into()),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        self.entries.is_none()
    }

    pub fn eval(&self, p: Point, order: u8) -> Result<MetricJets> {
        let one = Jet::constant(p, 1.0, order)?;
        let g = match &self.entries {
            None => {
                let z = one.zero_like();
                [
                    [one.clone(), z.clone(), z.clone()],
                    [z.clone(), one.clone(), z.clone()],
                    [z.clone(), z, one],
                ]
            }
            Some(e) => {
                let v: Vec<Jet> = e.iter().map(|f| f.eval(p, order)).collect::<Result<_>>()?;
                [
                    [v[0].clone(), v[1].clone(), v[2].clone()],
                    [v[1].clone(), v[3].clone(), v[4].clone()],
                    [v[2].clone(), v[4].clone(), v[5].clone()],
                ]
            }
        };
        let m = MetricJets { g };
        if !m.is_positive_definite() {
            return Err(Error::MetricNotPositive(p));
        }
        Ok(m)
    }
}

/// Metric components at a point.
#[derive(Debug, Clone)]
pub struct MetricJets {
    pub g: [[Jet; 3]; 3],
}

impl MetricJets {
    /// Sylvester's criterion on the base-point values.
    pub fn is_positive_definite(&self) -> bool {
        let v = |i: usize, j: usize| self.g[i][j].value();
        let m1 = v(0, 0);
        let m2 = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);
        let m3 = v(0, 0) * (v(1, 1) * v(2, 2) - v(1, 2) * v(2, 1))
            - v(0, 1) * (v(1, 0) * v(2, 2) - v(1, 2) * v(2, 0))
            + v(0, 2) * (v(1, 0) * v(2, 1) - v(1, 1) * v(2, 0));
        m1 > 0.0 && m2 > 0.0 && m3 > 0.0
    }

    pub fn inner(&self, u: &JetVector, v: &JetVector) -> Jet {
        self.lower(u).apply(v)
    }

    /// `g(v, ·)`.
    pub fn lower(&self, v: &JetVector) -> Covector {
        Covector(
            [0, 1, 2].map(|i| {
                &self.g[i][0] * &v.0[0] + &self.g[i][1] * &v.0[1] + &self.g[i][2] * &v.0[2]
            }),
        )
    }

    /// The `g`-dual vector of a covector.
    pub fn raise(&self, theta: &Covector) -> Result<JetVector> {
        Ok(JetVector(solve3(&self.g, &theta.0)?))
    }

    /// `v / |v|_g`.
    pub fn normalize(&self, v: &JetVector) -> Result<JetVector> {
        let n2 = self.inner(v, v);
        if !(n2.value() > 0.0) {
            return Err(Error::SingularMatrix(v.base()));
        }
        Ok(v.scale(&n2.sqrt()?.recip()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Axis;

    #[test]
    fn exterior_derivative_examples() {
        let w0 = OneForm::parse("dz + x*dy").unwrap();
        let d = w0.exterior_derivative([0.3, -0.1, 2.0], 3).unwrap();
        assert_eq!(d.values(), [0.0, 0.0, 1.0]);

        let w1 = OneForm::parse("dy + x^2*dz").unwrap();
        let d = w1.exterior_derivative([0.7, 0.2, 0.1], 3).unwrap();
        let v = d.values();
        assert_eq!(v[0], 0.0);
        assert!((v[1] + 1.4).abs() < 1e-15);
        assert_eq!(v[2], 0.0);

        let closed = OneForm::parse("2*dx - 3*dy + 0.5*dz").unwrap();
        assert_eq!(
            closed
                .exterior_derivative([1.0, 2.0, 3.0], 2)
                .unwrap()
                .values(),
            [0.0; 3]
        );
    }

    #[test]
    fn contact_defect_examples() {
        let w0 = OneForm::parse("dz + x*dy").unwrap();
        assert_eq!(w0.contact_defect([0.4, 1.0, -2.0], 2).unwrap(), 1.0);
        let w1 = OneForm::parse("dy + x^2*dz").unwrap();
        assert_eq!(w1.contact_defect([0.0, 0.5, 0.7], 2).unwrap(), 0.0);
        let h = OneForm::parse("dz + y*dx - x*dy").unwrap();
        // dω = −2 dx∧dy, ω∧dω = −2 dx∧dy∧dz
        assert_eq!(h.contact_defect([0.0; 3], 2).unwrap().abs(), 2.0);
    }

    #[test]
    fn vanishing_form_is_rejected() {
        let w = OneForm::parse("x*dx + y*dz").unwrap();
        assert!(matches!(
            w.eval_nonvanishing([0.0, 0.0, 1.0], 2),
            Err(Error::VanishingForm(_))
        ));
    }

    #[test]
    fn metric_checks() {
        let g = MetricField::parse("1; 0; 0; 1; 0; 1").unwrap();
        assert!(g.eval([0.0; 3], 2).is_ok());
        let bad = MetricField::parse("1; 2; 0; 1; 0; 1").unwrap();
        assert!(matches!(
            bad.eval([0.0; 3], 2),
            Err(Error::MetricNotPositive(_))
        ));
        let g = MetricField::parse("2; 0; 0; 1 + x^2; 0; 1").unwrap();
        let m = g.eval([1.0, 0.0, 0.0], 2).unwrap();
        let one = Jet::constant([1.0, 0.0, 0.0], 1.0, 2).unwrap();
        let ey = JetVector::coordinate(&one, Axis::Y);
        assert_eq!(m.inner(&ey, &ey).value(), 2.0);
        let raised = m.raise(&m.lower(&ey)).unwrap();
        assert!((raised.values()[1] - 1.0).abs() < 1e-15);
    }
}
