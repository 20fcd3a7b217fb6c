//! Probability measures on ℝ used to average rotated recovery maps, and the
//! quadrature rule for the smoothed universal-recovery density
//! dμ(t) = π (cosh(2πt) + 1)⁻¹ dt.
//!
//! The density has CDF F(t) = (1 + tanh(πt))/2. Its inverse-CDF substitution
//! u = F(t) makes the mass uniform on (0,1) but leaves log-oscillatory
//! endpoint behavior, so the discretization composes it with the sinh map
//! t = sinh(τ)/2 and applies the uniform trapezoid rule in τ, under which the
//! transformed weight decays double-exponentially. At the default order 64
//! the rule reproduces the measure's characteristic function
//! ∫ e^{iat} dμ(t) = (a/2)/sinh(a/2) to ≤ 7e-9 for |a| ≤ 3π and has mass
//! error below 1e-14.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of quadrature nodes for the smoothed measure.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

/// Half-width of the trapezoid window in the sinh variable.
const TAU_MAX: f64 = 3.0;

/// A probability measure on ℝ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measure {
    /// Point mass at `t`.
    Dirac { t: f64 },
    /// Finite convex combination of point masses.
    DiscreteConvex { points: Vec<(f64, f64)> },
    /// The density π (cosh(2πt) + 1)⁻¹ dt, discretized at `order` nodes.
    Jrsww {
        #[serde(default = "default_order")]
        order: usize,
    },
}

fn default_order() -> usize {
    DEFAULT_QUADRATURE_ORDER
}

impl Measure {
    pub fn jrsww() -> Measure {
        Measure::Jrsww {
            order: DEFAULT_QUADRATURE_ORDER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Measure::Dirac { t } => {
                if !t.is_finite() {
                    return Err(Error::InvalidParameter("non-finite Dirac point".into()));
                }
            }
            Measure::DiscreteConvex { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidParameter("empty discrete measure".into()));
                }
                let mut mass = 0.0;
                for &(t, w) in points {
                    if !t.is_finite() || !w.is_finite() || w <= 0.0 {
                        return Err(Error::InvalidParameter(
                            "discrete measure weights must be positive and finite".into(),
                        ));
                    }
                    mass += w;
                }
                if (mass - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "discrete measure mass {mass} != 1"
                    )));
                }
            }
            Measure::Jrsww { order } => {
                if *order < 8 {
                    return Err(Error::InvalidParameter(format!(
                        "quadrature order {order} too small"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Nodes and weights: exact for the discrete kinds, the sinh-trapezoid
    /// rule for the smoothed density.
    pub fn nodes_weights(&self) -> Vec<(f64, f64)> {
        match self {
            Measure::Dirac { t } => vec![(*t, 1.0)],
            Measure::DiscreteConvex { points } => points.clone(),
            Measure::Jrsww { order } => jrsww_rule(*order),
        }
    }

    /// Total mass of the discretization; the self-test asserts 1 within
    /// 1e-12.
    pub fn mass(&self) -> f64 {
        self.nodes_weights().iter().map(|(_, w)| w).sum()
    }

    /// ∫ cos(at) dμ(t) evaluated through the node rule.
    pub fn characteristic_quadrature(&self, a: f64) -> f64 {
        self.nodes_weights()
            .iter()
            .map(|(t, w)| w * (a * t).cos())
            .sum()
    }

    /// Convolution μ∗ν for the discrete kinds (Dirac is a one-point case);
    /// used by the iterate law tests.
    pub fn convolve(&self, other: &Measure) -> Result<Measure> {
        let pts = |m: &Measure| -> Result<Vec<(f64, f64)>> {
            match m {
                Measure::Dirac { t } => Ok(vec![(*t, 1.0)]),
                Measure::DiscreteConvex { points } => Ok(points.clone()),
                Measure::Jrsww { .. } => Err(Error::InvalidParameter(
                    "convolution is implemented for discrete measures".into(),
                )),
            }
        };
        let a = pts(self)?;
        let b = pts(other)?;
        let mut points = Vec::with_capacity(a.len() * b.len());
        for &(t1, w1) in &a {
            for &(t2, w2) in &b {
                points.push((t1 + t2, w1 * w2));
            }
        }
        Ok(Measure::DiscreteConvex { points })
    }
}

/// The sinh-trapezoid rule for dμ(t) = π (cosh 2πt + 1)⁻¹ dt:
/// t = sinh(τ)/2, uniform τ grid on [−TAU_MAX, TAU_MAX], weights
/// h · π cosh(τ) / (2 (cosh(π sinh τ) + 1)).
fn jrsww_rule(order: usize) -> Vec<(f64, f64)> {
    let n = order.max(2);
    let h = 2.0 * TAU_MAX / (n as f64 - 1.0);
    (0..n)
        .map(|i| {
            let tau = -TAU_MAX + h * i as f64;
            let t = tau.sinh() / 2.0;
            let w = h * std::f64::consts::PI * tau.cosh()
                / (2.0 * ((std::f64::consts::PI * tau.sinh()).cosh() + 1.0));
            (t, w)
        })
        .collect()
}
