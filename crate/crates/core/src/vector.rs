//! Jet-valued vectors, covectors and 2-forms at a point, with the small dense
//! linear algebra the frame constructions need.
//!
//! Wedge and exterior derivative carry no 1/2 factor:
//! `(α∧β)(X,Y) = α(X)β(Y) − α(Y)β(X)` and
//! `dθ(X,Y) = Xθ(Y) − Yθ(X) − θ([X,Y])`.

use crate::error::{Error, JetError, Result};
use crate::jet::{Axis, Jet, Point};

/// Components `V^i` of a vector field in the coordinate basis `∂_x, ∂_y, ∂_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVector(pub [Jet; 3]);

/// Components `θ_i` of a 1-form in the basis `dx, dy, dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector(pub [Jet; 3]);

/// A 2-form `β₂₃ dy∧dz + β₃₁ dz∧dx + β₁₂ dx∧dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFormValue {
    pub b23: Jet,
    pub b31: Jet,
    pub b12: Jet,
}

fn cross(a: &[Jet; 3], b: &[Jet; 3]) -> [Jet; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &[Jet; 3], b: &[Jet; 3]) -> Jet {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

impl JetVector {
    pub fn coordinate(like: &Jet, axis: Axis) -> JetVector {
        let mut c = [like.zero_like(), like.zero_like(), like.zero_like()];
        c[axis.index()] = like.constant_like(1.0);
        JetVector(c)
    }

    pub fn values(&self) -> [f64; 3] {
        self.0.each_ref().map(Jet::value)
    }

    pub fn base(&self) -> Point {
        self.0[0].base()
    }

    pub fn valid_order(&self) -> u8 {
        self.0.iter().map(Jet::valid_order).min().unwrap_or(0)
    }

    pub fn add(&self, other: &JetVector) -> JetVector {
        JetVector([0, 1, 2].map(|i| &self.0[i] + &other.0[i]))
    }

    pub fn sub(&self, other: &JetVector) -> JetVector {
        JetVector([0, 1, 2].map(|i| &self.0[i] - &other.0[i]))
    }

    pub fn scale(&self, s: &Jet) -> JetVector {
        JetVector(self.0.each_ref().map(|c| c * s))
    }

    pub fn scale_f64(&self, s: f64) -> JetVector {
        JetVector(self.0.each_ref().map(|c| c * s))
    }

    /// Directional derivative `V f = V^i ∂_i f`. Consumes one order.
    pub fn derive(&self, f: &Jet) -> std::result::Result<Jet, JetError> {
        let mut acc = f.zero_like();
        for axis in Axis::ALL {
            acc = acc + &self.0[axis.index()] * &f.partial(axis)?;
        }
        Ok(acc)
    }

    /// Applies `V` to each component of another vector.
    fn derive_vector(&self, w: &JetVector) -> std::result::Result<JetVector, JetError> {
        Ok(JetVector([
            self.derive(&w.0[0])?,
            self.derive(&w.0[1])?,
            self.derive(&w.0[2])?,
        ]))
    }

    pub fn norm_euclidean(&self) -> f64 {
        self.values().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `[V, W]^a = V^b ∂_b W^a − W^b ∂_b V^a`. Consumes one order.
pub fn lie_bracket(v: &JetVector, w: &JetVector) -> std::result::Result<JetVector, JetError> {
    Ok(v.derive_vector(w)?.sub(&w.derive_vector(v)?))
}

impl Covector {
    pub fn values(&self) -> [f64; 3] {
        self.0.each_ref().map(Jet::value)
    }

    pub fn apply(&self, v: &JetVector) -> Jet {
        dot(&self.0, &v.0)
    }

    pub fn scale(&self, s: &Jet) -> Covector {
        Covector(self.0.each_ref().map(|c| c * s))
    }

    pub fn valid_order(&self) -> u8 {
        self.0.iter().map(Jet::valid_order).min().unwrap_or(0)
    }

    /// Exterior derivative of a 1-form from the jets of its components.
    pub fn exterior_derivative(&self) -> std::result::Result<TwoFormValue, JetError> {
        let [f1, f2, f3] = &self.0;
        Ok(TwoFormValue {
            b23: f3.partial(Axis::Y)? - f2.partial(Axis::Z)?,
            b31: f1.partial(Axis::Z)? - f3.partial(Axis::X)?,
            b12: f2.partial(Axis::X)? - f1.partial(Axis::Y)?,
        })
    }

    /// The vector `u` with `u^i = ε^{ijk} a_j b_k`, annihilated by both forms.
    pub fn cross(&self, other: &Covector) -> JetVector {
        JetVector(cross(&self.0, &other.0))
    }

    /// `θ∧β` as the coefficient of `dx∧dy∧dz`.
    pub fn wedge(&self, beta: &TwoFormValue) -> Jet {
        dot(&self.0, &beta.as_vector().0)
    }
}

impl TwoFormValue {
    /// The vector `w = (β₂₃, β₃₁, β₁₂)`; `β(U, V) = w·(U×V)` and `ι_w β = 0`.
    pub fn as_vector(&self) -> JetVector {
        JetVector([self.b23.clone(), self.b31.clone(), self.b12.clone()])
    }

    pub fn eval(&self, u: &JetVector, v: &JetVector) -> Jet {
        dot(&self.as_vector().0, &cross(&u.0, &v.0))
    }

    pub fn values(&self) -> [f64; 3] {
        [self.b23.value(), self.b31.value(), self.b12.value()]
    }
}

/// Determinant of the matrix whose columns are `a, b, c`.
pub fn det3(a: &JetVector, b: &JetVector, c: &JetVector) -> Jet {
    dot(&a.0, &cross(&b.0, &c.0))
}

/// Solves `A x = b` for a 3×3 jet matrix by LU with partial pivoting on the
/// base-point values.
pub fn solve3(a: &[[Jet; 3]; 3], b: &[Jet; 3]) -> Result<[Jet; 3]> {
    let base = b[0].base();
    let mut m: Vec<Vec<Jet>> = a.iter().map(|r| r.to_vec()).collect();
    let mut rhs = b.to_vec();
    let scale = m
        .iter()
        .flatten()
        .map(|j| j.value().abs())
        .fold(0.0, f64::max);
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].value().abs().total_cmp(&m[j][col].value().abs()))
            .expect("non-empty");
        if m[piv][col].value().abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularMatrix(base));
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip()?;
        for row in col + 1..3 {
            let factor = &m[row][col] * &inv;
            for k in col..3 {
                let t = &factor * &m[col][k];
                m[row][k] = &m[row][k] - &t;
            }
            let t = &factor * &rhs[col];
            rhs[row] = &rhs[row] - &t;
        }
    }
    let mut x: Vec<Jet> = vec![rhs[0].zero_like(); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..3 {
            acc = acc - &m[row][k] * &x[k];
        }
        x[row] = acc.try_div(&m[row][row])?;
    }
    Ok(x.try_into().expect("three entries"))
}

/// Rows of the inverse of the matrix with columns `e[0], e[1], e[2]`, i.e. the
/// dual coframe.
pub fn dual_coframe(e: &[JetVector; 3]) -> Result<[Covector; 3]> {
    // Solve Fᵀ θ^a = δ^a for each coframe row, F = [E1 E2 E3].
    let ft: [[Jet; 3]; 3] = [0, 1, 2].map(|a| [0, 1, 2].map(|i| e[a].0[i].clone()));
    let like = &e[0].0[0];
    let unit = |a: usize| [0, 1, 2].map(|b| like.constant_like(if a == b { 1.0 } else { 0.0 }));
    Ok([
        Covector(solve3(&ft, &unit(0))?),
        Covector(solve3(&ft, &unit(1))?),
        Covector(solve3(&ft, &unit(2))?),
    ])
}

/// Plain 3×3 solve by partial pivoting.
pub fn solve3_f64(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = a;
    let mut r = b;
    let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty");
        if m[piv][col].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = r[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    fn var(p: Point, a: Axis) -> Jet {
        Jet::variable(p, a, 4).unwrap()
    }

    #[test]
    fn coordinate_fields_commute() {
        let one = Jet::constant([0.3, 0.1, 0.2], 1.0, 3).unwrap();
        let dx = JetVector::coordinate(&one, Axis::X);
        let dy = JetVector::coordinate(&one, Axis::Y);
        let b = lie_bracket(&dx, &dy).unwrap();
        assert_eq!(b.values(), [0.0; 3]);
    }

    #[test]
    fn heisenberg_bracket() {
        // [∂x − y∂z, ∂y + x∂z] = 2∂z
        let p = [0.7, -1.2, 0.4];
        let x = var(p, Axis::X);
        let y = var(p, Axis::Y);
        let one = x.constant_like(1.0);
        let zero = x.zero_like();
        let v = JetVector([one.clone(), zero.clone(), -&y]);
        let w = JetVector([zero, one, x]);
        let b = lie_bracket(&v, &w).unwrap();
        assert_eq!(b.values(), [0.0, 0.0, 2.0]);
        assert_eq!(b.valid_order(), 3);
    }

    #[test]
    fn two_form_is_alternating() {
        let p = [0.2, 0.5, -0.3];
        let x = var(p, Axis::X);
        let omega = Covector([x.zero_like(), x.clone(), x.constant_like(1.0)]);
        let d = omega.exterior_derivative().unwrap();
        assert_eq!(d.values(), [0.0, 0.0, 1.0]);
        let u = JetVector([
            x.constant_like(1.0),
            x.constant_like(2.0),
            x.constant_like(0.5),
        ]);
        let v = JetVector([
            x.constant_like(-1.0),
            x.constant_like(0.3),
            x.constant_like(4.0),
        ]);
        let uv = d.eval(&u, &v).value();
        let vu = d.eval(&v, &u).value();
        assert_eq!(uv, -vu);
        assert_eq!(d.eval(&u, &u).value(), 0.0);
    }

    #[test]
    fn dual_coframe_inverts_frame() {
        let p = [0.1, 0.2, 0.3];
        let x = var(p, Axis::X);
        let e = [
            JetVector([x.constant_like(2.0), x.clone(), x.zero_like()]),
            JetVector([x.zero_like(), x.constant_like(1.0), x.constant_like(3.0)]),
            JetVector([x.constant_like(1.0), x.zero_like(), x.exp()]),
        ];
        let eta = dual_coframe(&e).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let v = eta[a].apply(&e[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((v.value() - want).abs() < 1e-14);
                for &c in &v.coefficients()[1..] {
                    assert!(c.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let one = Jet::constant([0.0; 3], 1.0, 2).unwrap();
        let zero = one.zero_like();
        let e = [
            JetVector([one.clone(), zero.clone(), zero.clone()]),
            JetVector([one.scale(2.0), zero.clone(), zero.clone()]),
            JetVector([zero.clone(), zero.clone(), one.clone()]),
        ];
        assert!(matches!(dual_coframe(&e), Err(Error::SingularMatrix(_))));
        assert!(solve3_f64(
            [[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]],
            [1.0; 3]
        )
        .is_none());
    }
}
