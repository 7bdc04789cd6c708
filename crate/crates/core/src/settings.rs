use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldRef;
use crate::jet::{Axis, MAX_ORDER};

/// Choice of the SO(2) gauge for the orthonormal basis of the distribution.
///
/// Invariants must not depend on it; the options exist so that this can be
/// checked.
#[derive(Clone, Default)]
pub struct Gauge {
    /// Forces the coordinate field projected onto Δ to seed `E₁`.
    pub seed: Option<Axis>,
    /// Rotates `(E₁, E₂)` by a point-dependent angle.
    pub rotation: Option<FieldRef>,
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gauge")
            .field("seed", &self.seed)
            .field("rotation", &self.rotation.is_some())
            .finish()
    }
}

/// Jet order and numerical tolerances shared by all analyses.
#[derive(Debug, Clone)]
pub struct Settings {
    /// Truncation order of every jet. The symmetry residuals need five
    /// derivative levels.
    pub jet_order: u8,
    /// `|λ|` below this marks a point as noncontact.
    pub eps_contact: f64,
    /// Relative threshold on `D` against `|∇_Δ K|·|∇_Δ M|`.
    pub eps_degenerate: f64,
    /// Absolute floor on `D`.
    pub eps_degenerate_abs: f64,
    /// Target `|λ|` for roots on probe segments.
    pub root_tol: f64,
    /// Absolute tolerance of the adaptive line integral.
    pub quad_tol: f64,
    /// Largest integrability residual accepted along a reconstruction path.
    pub residual_tol: f64,
    /// Offset used to extrapolate the characteristic field onto Σ.
    pub extrapolation_step: f64,
    /// Below this sup-norm the kernel vector of `dω` counts as vanishing.
    pub eps_kernel: f64,
    /// `|dλ|_Δ|` below this fails transversality.
    pub eps_transversal: f64,
    pub gauge: Gauge,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            jet_order: 5,
            eps_contact: 1e-9,
            eps_degenerate: 1e-9,
            eps_degenerate_abs: 1e-14,
            root_tol: 1e-10,
            quad_tol: 1e-9,
            residual_tol: 1e-6,
            extrapolation_step: 1e-3,
            eps_kernel: 1e-12,
            eps_transversal: 1e-9,
            gauge: Gauge::default(),
        }
    }
}

impl Settings {
    pub fn with_order(mut self, order: u8) -> Self {
        self.jet_order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ORDER).contains(&self.jet_order) {
            return Err(Error::Config(format!(
                "jet order {} outside 1..={MAX_ORDER}",
                self.jet_order
            )));
        }
        let positive = [
            ("eps-contact", self.eps_contact),
            ("eps-degenerate", self.eps_degenerate),
            ("root", self.root_tol),
            ("quad", self.quad_tol),
            ("residual", self.residual_tol),
            ("extrapolation-step", self.extrapolation_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        if !(self.eps_degenerate_abs >= 0.0)
            || !(self.eps_kernel >= 0.0)
            || !(self.eps_transversal >= 0.0)
        {
            return Err(Error::Config("absolute floors must be non-negative".into()));
        }
        Ok(())
    }
}
