use ndarray::Array2;

use super::{TransportConfig, TransportResult};
use crate::error::{Error, Result};

/// Masses are floored here before taking logarithms.
pub const MASS_FLOOR: f64 = 1e-30;

/// Dual potentials (f, g) of an unbalanced Sinkhorn solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Duals {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[inline]
fn logsumexp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Unbalanced Sinkhorn on nonnegative masses `a`, `b`.
pub fn sinkhorn_uot(a: &[f64], b: &[f64], cost: &Array2<f64>, cfg: &TransportConfig) -> Result<TransportResult> {
    if a.iter().chain(b).any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("masses must be finite and nonnegative".into()));
    }
    let log_a: Vec<f64> = a.iter().map(|v| v.max(MASS_FLOOR).ln()).collect();
    let log_b: Vec<f64> = b.iter().map(|v| v.max(MASS_FLOOR).ln()).collect();
    sinkhorn_uot_log(&log_a, &log_b, cost, cfg, None)
}

/// Unbalanced Sinkhorn on log-masses, optionally warm-started from earlier
/// potentials.
///
/// Each sweep applies the two KL-proximal updates
/// `f ← κγ·(log a − LSE_j((g_j − C_ij)/γ))` (and symmetrically for g) with
/// κ = τ/(τ+γ), then shifts (f, g) → (f + t, g − t) by the closed-form
/// maximiser t of the dual along that direction. The entropic term is
/// invariant under the shift, and without it the total-mass mode converges
/// only at rate κ per sweep.
pub fn sinkhorn_uot_log(
    log_a: &[f64],
    log_b: &[f64],
    cost: &Array2<f64>,
    cfg: &TransportConfig,
    init: Option<&Duals>,
) -> Result<TransportResult> {
    let (log_a, log_b) = validated_log_masses(log_a, log_b, cost, cfg)?;
    let (n, m) = cost.dim();
    let (tau, gamma) = (cfg.tau, cfg.gamma);
    let kappa = tau / (tau + gamma);
    let inv_gamma = 1.0 / gamma;
    let scaled: Vec<f64> = cost.iter().map(|c| c * inv_gamma).collect();
    let scaled_t: Vec<f64> = cost.t().iter().map(|c| c * inv_gamma).collect();

    let (mut f, mut g) = match init {
        Some(d) if d.f.len() == n && d.g.len() == m => (d.f.clone(), d.g.clone()),
        _ => (vec![0.0; n], vec![0.0; m]),
    };
    let mut iterations = 0;
    let mut converged = false;
    let mut g_scaled = vec![0.0; m];
    let mut f_scaled = vec![0.0; n];

    while iterations < cfg.max_iter {
        iterations += 1;
        let mut delta: f64 = 0.0;

        for (gs, gv) in g_scaled.iter_mut().zip(&g) {
            *gs = gv * inv_gamma;
        }
        for i in 0..n {
            let row = &scaled[i * m..(i + 1) * m];
            let lse = logsumexp(g_scaled.iter().zip(row).map(|(gs, c)| gs - c));
            let new = kappa * gamma * (log_a[i] - lse);
            delta = delta.max((new - f[i]).abs());
            f[i] = new;
        }
        for (fs, fv) in f_scaled.iter_mut().zip(&f) {
            *fs = fv * inv_gamma;
        }
        for j in 0..m {
            let col = &scaled_t[j * n..(j + 1) * n];
            let lse = logsumexp(f_scaled.iter().zip(col).map(|(fs, c)| fs - c));
            let new = kappa * gamma * (log_b[j] - lse);
            delta = delta.max((new - g[j]).abs());
            g[j] = new;
        }

        let lhs = logsumexp(log_a.iter().zip(&f).map(|(la, fv)| la - fv / tau));
        let rhs = logsumexp(log_b.iter().zip(&g).map(|(lb, gv)| lb - gv / tau));
        let shift = 0.5 * tau * (lhs - rhs);
        if shift.is_finite() {
            for v in f.iter_mut() {
                *v += shift;
            }
            for v in g.iter_mut() {
                *v -= shift;
            }
            delta = delta.max(shift.abs());
        }

        if f.iter().chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite dual potential at Sinkhorn iteration {iterations}"
            )));
        }
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }

    assemble(f, g, &log_a, &log_b, cost, cfg, iterations, converged)
}

/// Sinkhorn for transporting `log_a` onto itself over a symmetric cost.
///
/// The optimum has f = g, so a single potential is iterated with the averaged
/// update `f ← ½(f + κγ·(log a − LSE_j((f_j − C_ij)/γ)))`, which converges in
/// far fewer sweeps than the alternating scheme.
pub fn sinkhorn_uot_symmetric(log_a: &[f64], cost: &Array2<f64>, cfg: &TransportConfig) -> Result<TransportResult> {
    let (log_a, _) = validated_log_masses(log_a, log_a, cost, cfg)?;
    let n = log_a.len();
    if cost.indexed_iter().any(|((i, j), c)| *c != cost[[j, i]]) {
        return Err(Error::InvalidArgument("cost matrix is not symmetric".into()));
    }
    let (tau, gamma) = (cfg.tau, cfg.gamma);
    let kappa = tau / (tau + gamma);
    let inv_gamma = 1.0 / gamma;
    let scaled: Vec<f64> = cost.iter().map(|c| c * inv_gamma).collect();

    let mut f = vec![0.0; n];
    let mut f_scaled = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        for (fs, fv) in f_scaled.iter_mut().zip(&f) {
            *fs = fv * inv_gamma;
        }
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let row = &scaled[i * n..(i + 1) * n];
            let lse = logsumexp(f_scaled.iter().zip(row).map(|(fs, c)| fs - c));
            let new = 0.5 * (f[i] + kappa * gamma * (log_a[i] - lse));
            delta = delta.max((new - f[i]).abs());
            f[i] = new;
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite dual potential at Sinkhorn iteration {iterations}"
            )));
        }
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }
    let g = f.clone();
    assemble(f, g, &log_a, &log_a, cost, cfg, iterations, converged)
}

/// Checks shapes and values and floors the log-masses.
fn validated_log_masses(
    log_a: &[f64],
    log_b: &[f64],
    cost: &Array2<f64>,
    cfg: &TransportConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let (n, m) = cost.dim();
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("empty cost matrix".into()));
    }
    if log_a.len() != n || log_b.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "masses of length {} and {} for a {n}x{m} cost matrix",
            log_a.len(),
            log_b.len()
        )));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("cost matrix has non-finite entries".into()));
    }
    if log_a.iter().chain(log_b).any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::Numerical("non-finite log-mass".into()));
    }
    let floor = MASS_FLOOR.ln();
    Ok((
        log_a.iter().map(|v| v.max(floor)).collect(),
        log_b.iter().map(|v| v.max(floor)).collect(),
    ))
}

/// Builds the plan, objective and residuals from converged potentials.
#[allow(clippy::too_many_arguments)]
fn assemble(
    f: Vec<f64>,
    g: Vec<f64>,
    log_a: &[f64],
    log_b: &[f64],
    cost: &Array2<f64>,
    cfg: &TransportConfig,
    iterations: usize,
    converged: bool,
) -> Result<TransportResult> {
    let (n, m) = cost.dim();
    let (tau, gamma) = (cfg.tau, cfg.gamma);
    let inv_gamma = 1.0 / gamma;
    let mut log_plan = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            log_plan[[i, j]] = (f[i] + g[j]) * inv_gamma - cost[[i, j]] * inv_gamma;
        }
    }
    let plan = log_plan.mapv(f64::exp);
    if plan.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("transport plan overflowed".into()));
    }

    let row_log: Vec<f64> = (0..n)
        .map(|i| logsumexp(log_plan.row(i).iter().copied()))
        .collect();
    let col_log: Vec<f64> = (0..m)
        .map(|j| logsumexp(log_plan.column(j).iter().copied()))
        .collect();
    let transport: f64 = (&plan * cost).sum();
    let entropy: f64 = plan
        .iter()
        .zip(log_plan.iter())
        .map(|(p, lp)| if *p > 0.0 { p * (lp - 1.0) } else { 0.0 })
        .sum();
    let objective = transport
        + tau * kl_log(&row_log, log_a)
        + tau * kl_log(&col_log, log_b)
        + gamma * entropy;
    if !objective.is_finite() {
        return Err(Error::Numerical("non-finite transport objective".into()));
    }
    let marginal_residual = row_log
        .iter()
        .zip(log_a)
        .chain(col_log.iter().zip(log_b))
        .map(|(x, y)| (x.exp() - y.exp()).abs())
        .sum();

    Ok(TransportResult {
        plan,
        duals: Duals { f, g },
        objective,
        marginal_residual,
        iterations,
        converged,
    })
}

/// Generalised KL(x‖y) from log x and log y.
fn kl_log(log_x: &[f64], log_y: &[f64]) -> f64 {
    log_x
        .iter()
        .zip(log_y)
        .map(|(lx, ly)| {
            let x = lx.exp();
            let y = ly.exp();
            if x > 0.0 {
                x * (lx - ly) - x + y
            } else {
                y
            }
        })
        .sum()
}
