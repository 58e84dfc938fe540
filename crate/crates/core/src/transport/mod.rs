//! Entropic unbalanced optimal transport on the sphere.
//!
//! The solver minimises, over nonnegative plans P,
//!
//! ```text
//! ⟨C, P⟩ + τ·KL(P·1 ‖ a) + τ·KL(Pᵀ·1 ‖ b) − γ·H(P),   H(P) = −Σ P_ij (log P_ij − 1)
//! ```
//!
//! with the generalised KL(x‖y) = Σ x log(x/y) − x + y. Iterations run on the
//! dual potentials (f, g) in the log domain, P_ij = exp((f_i + g_j − C_ij)/γ),
//! so cost/γ ratios far beyond the exponent range of f64 are safe.

mod sinkhorn;
pub mod std_metric;
pub mod stl;

use ndarray::Array2;

pub use sinkhorn::{sinkhorn_uot, sinkhorn_uot_log, sinkhorn_uot_symmetric, Duals};
pub use std_metric::{std_metric, StdReport};
pub use stl::{stl, SphericalTransportLoss, StlOutput, StlSolve, StlWarmStart};

use crate::error::{Error, Result};
use crate::sphgeom::{geodesic_distance_vec, SphDir};

/// Solver and loss parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportConfig {
    /// Marginal relaxation weight τ.
    pub tau: f64,
    /// Entropic weight γ.
    pub gamma: f64,
    pub max_iter: usize,
    /// Stop when the largest dual update falls below this.
    pub tol: f64,
    /// Fraction of source slots replaced by auxiliary points.
    pub aux_fraction: f64,
    /// Mass of each auxiliary point. `None` gives the slot the coefficient
    /// value 1/N (band of N points) before exponentiation, i.e. mass e^{1/N}.
    pub aux_mass: Option<f64>,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            tau: 10.0,
            gamma: 0.05,
            max_iter: 2000,
            tol: 1e-9,
            aux_fraction: 0.66,
            aux_mass: None,
        }
    }
}

impl TransportConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tau > 0.0
            && self.tau.is_finite()
            && self.gamma > 0.0
            && self.gamma.is_finite()
            && self.tol > 0.0
            && self.max_iter > 0
            && (0.0..1.0).contains(&self.aux_fraction)
            && self.aux_mass.map_or(true, |m| m > 0.0 && m.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid transport config {self:?}")))
        }
    }

    pub fn without_aux(mut self) -> Self {
        self.aux_fraction = 0.0;
        self
    }
}

/// Outcome of one unbalanced Sinkhorn solve.
#[derive(Debug, Clone)]
pub struct TransportResult {
    pub plan: Array2<f64>,
    /// Dual potentials; the Sinkhorn scalings are u = exp(f/γ), v = exp(g/γ).
    pub duals: Duals,
    /// Value of the regularised objective at `plan`.
    pub objective: f64,
    /// ‖P·1 − a‖₁ + ‖Pᵀ·1 − b‖₁.
    pub marginal_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl TransportResult {
    /// Transport part ⟨C, P⟩ of the objective.
    pub fn transport_cost(&self, cost: &Array2<f64>) -> f64 {
        (&self.plan * cost).sum()
    }

    /// Fraction of plan entries below `1e-6·max`.
    pub fn sparsity(&self) -> f64 {
        plan_sparsity(&self.plan)
    }
}

/// Fraction of entries of `plan` that are below 1e-6 times its largest entry.
pub fn plan_sparsity(plan: &Array2<f64>) -> f64 {
    let max = plan.iter().cloned().fold(0.0, f64::max);
    if plan.is_empty() {
        return 0.0;
    }
    let small = plan.iter().filter(|v| **v < 1e-6 * max).count();
    small as f64 / plan.len() as f64
}

/// Geodesic cost matrix C_ij = d(a_i, b_j).
pub fn cost_matrix(points_a: &[SphDir], points_b: &[SphDir]) -> Array2<f64> {
    let va: Vec<[f64; 3]> = points_a.iter().map(|p| p.to_vec3()).collect();
    let vb: Vec<[f64; 3]> = points_b.iter().map(|p| p.to_vec3()).collect();
    Array2::from_shape_fn((va.len(), vb.len()), |(i, j)| geodesic_distance_vec(va[i], vb[j]))
}
