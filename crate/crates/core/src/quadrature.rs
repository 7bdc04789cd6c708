//! Adaptive Gauss–Legendre quadrature.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Number of nodes of the base rule.
pub const NODES: usize = 32;

const MAX_DEPTH: u32 = 24;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// ascending in the node.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's approximation of the i-th root, then Newton on P_n.
        let mut t = (std::f64::consts::PI * (4 * i + 3) as f64 / (4 * n + 2) as f64).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d != 0.0 {
            dp = d;
        }
        out.push((t, 2.0 / ((1.0 - t * t) * dp * dp)));
    }
    out.reverse();
    out
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut sum = 0.0;
    for &(t, w) in rule() {
        sum += w * f(mid + half * t)?;
    }
    Ok(sum * half)
}

/// `∫_a^b f` to absolute tolerance `tol`, bisecting panels whose value
/// differs from the sum of their halves by more than their share of `tol`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let whole = panel(&mut f, a, b)?;
    refine(&mut f, a, b, whole, tol, 0)
}

fn refine<F>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let left = panel(f, a, m)?;
    let right = panel(f, m, b)?;
    if !(left + right).is_finite() {
        return Err(Error::QuadratureDivergence { start: a, end: b });
    }
    if (left + right - whole).abs() <= tol {
        return Ok(left + right);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureDivergence { start: a, end: b });
    }
    Ok(
        refine(f, a, m, left, 0.5 * tol, depth + 1)?
            + refine(f, m, b, right, 0.5 * tol, depth + 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = gauss_legendre(NODES);
        assert_eq!(r.len(), NODES);
        let total: f64 = r.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        for k in [2, 10, 40, 62] {
            let q: f64 = r.iter().map(|(t, w)| w * t.powi(k)).sum();
            assert!((q - 2.0 / (k as f64 + 1.0)).abs() < 1e-14, "degree {k}");
        }
        assert!(r.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn adaptive_integration() {
        let v = integrate(|t| Ok(t.exp()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-13);
        let v = integrate(|t| Ok(1.0 / (1e-4 + t * t)), -1.0, 1.0, 1e-9).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-8);
        assert_eq!(integrate(Ok, 0.5, 0.5, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn non_integrable_singularity_diverges() {
        assert!(integrate(|t| Ok(1.0 / t), 0.0, 1.0, 1e-9).is_err());
    }
}
