//! Direct gradient-descent fit of needlet coefficients to a target panorama
//! under an L2 coefficient loss, the spherical transport loss, or both.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::EquirectMap;
use crate::error::{Error, Result};
use crate::needlet::{NeedletCoeffs, NeedletFrame};
use crate::transport::std_metric::DEFAULT_STD_POINTS;
use crate::transport::{std_metric, SphericalTransportLoss, StlWarmStart, TransportConfig};

/// Abort when the loss exceeds this multiple of its starting value.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitLoss {
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "stl")]
    Stl,
    #[serde(rename = "l2+stl")]
    L2Stl,
}

impl FitLoss {
    pub fn uses_l2(&self) -> bool {
        matches!(self, FitLoss::L2 | FitLoss::L2Stl)
    }

    pub fn uses_stl(&self) -> bool {
        matches!(self, FitLoss::Stl | FitLoss::L2Stl)
    }
}

impl fmt::Display for FitLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitLoss::L2 => "l2",
            FitLoss::Stl => "stl",
            FitLoss::L2Stl => "l2+stl",
        })
    }
}

impl FromStr for FitLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(FitLoss::L2),
            "stl" => Ok(FitLoss::Stl),
            "l2+stl" | "l2stl" => Ok(FitLoss::L2Stl),
            other => Err(Error::InvalidArgument(format!(
                "unknown loss {other:?} (expected l2, stl or l2+stl)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub loss: FitLoss,
    pub iters: usize,
    pub lr: f64,
    /// Multiplier on the transport term in the total loss.
    pub stl_weight: f64,
    pub transport: TransportConfig,
    pub std_points: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            loss: FitLoss::L2Stl,
            iters: 500,
            lr: 0.5,
            stl_weight: 0.01,
            transport: TransportConfig::default(),
            std_points: DEFAULT_STD_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// ½‖pred − target‖² over all coefficients.
    pub l2: f64,
    pub stl: f64,
    /// Objective actually driving the updates.
    pub total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub loss: FitLoss,
    pub iters: usize,
    pub lr: f64,
    pub trace: Vec<TraceEntry>,
    pub initial_std: f64,
    pub final_std: f64,
    /// Values clamped to zero in the final reconstruction.
    pub negative_values: usize,
    pub wall_time_s: f64,
}

fn l2_term(pred: &NeedletCoeffs, target: &NeedletCoeffs) -> f64 {
    let diff = target.axpy(-1.0, pred);
    let dc: f64 = diff.dc.iter().map(|v| v * v).sum();
    0.5 * (dc + (0..3).map(|c| diff.detail_energy(c)).sum::<f64>())
}

/// Fits coefficients to `target`, starting from its mean with every band at
/// zero. Returns the report and the fitted coefficients.
pub fn fit_demo(
    target: &EquirectMap,
    frame: &NeedletFrame,
    cfg: &FitConfig,
) -> Result<(FitReport, NeedletCoeffs)> {
    if cfg.iters == 0 {
        return Err(Error::InvalidArgument("iters must be >= 1".into()));
    }
    if !(cfg.lr >= 0.0) || !cfg.lr.is_finite() || !(cfg.stl_weight >= 0.0) {
        return Err(Error::InvalidArgument("lr and stl_weight must be nonnegative".into()));
    }
    target.check_radiance()?;
    let start = Instant::now();
    let goal = frame.analyze_map(target)?;
    let loss_fn = SphericalTransportLoss::new(frame, cfg.transport)?;
    let mut warm = StlWarmStart::default();

    let mut pred = frame.zero_coeffs();
    pred.dc = goal.dc;

    let (h, w) = (target.height(), target.width());
    let initial_map = frame.synthesize(&pred, h, w)?.clamp_negative().0;
    let initial_std = std_metric(&initial_map, target, cfg.std_points, &cfg.transport)?.distance;

    let mut trace = Vec::with_capacity(cfg.iters + 1);
    let mut reference_total = None;
    for it in 0..=cfg.iters {
        let stl = loss_fn.evaluate_warm(&pred, &goal, Some(&mut warm))?;
        let l2 = l2_term(&pred, &goal);
        let mut total = 0.0;
        if cfg.loss.uses_l2() {
            total += l2;
        }
        if cfg.loss.uses_stl() {
            total += cfg.stl_weight * stl.loss;
        }
        if !total.is_finite() || !stl.loss.is_finite() {
            return Err(Error::Numerical(format!("non-finite loss at iteration {it}")));
        }
        let reference = *reference_total.get_or_insert(total.abs().max(1e-12));
        if total.abs() > DIVERGENCE_FACTOR * reference {
            return Err(Error::Numerical(format!(
                "fit diverged at iteration {it}: loss {total:e} vs initial {reference:e} (try a smaller lr)"
            )));
        }
        trace.push(TraceEntry {
            iteration: it,
            l2,
            stl: stl.loss,
            total,
        });
        if it == cfg.iters || cfg.lr == 0.0 {
            if cfg.lr == 0.0 {
                // no updates: the remaining trace is this entry repeated
                let last = *trace.last().expect("trace entry");
                trace.extend((it + 1..=cfg.iters).map(|i| TraceEntry { iteration: i, ..last }));
            }
            break;
        }
        let mut grad = frame.zero_coeffs();
        if cfg.loss.uses_l2() {
            grad = goal.axpy(-1.0, &pred);
        }
        if cfg.loss.uses_stl() {
            grad = stl.grad.axpy(cfg.stl_weight, &grad);
        }
        pred = grad.axpy(-cfg.lr, &pred);
    }

    let (recon, negative_values) = frame.synthesize(&pred, h, w)?.clamp_negative();
    let final_std = std_metric(&recon, target, cfg.std_points, &cfg.transport)?.distance;
    Ok((
        FitReport {
            loss: cfg.loss,
            iters: cfg.iters,
            lr: cfg.lr,
            trace,
            initial_std,
            final_std,
            negative_values,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        pred,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_names() {
        assert_eq!("l2+stl".parse::<FitLoss>().unwrap(), FitLoss::L2Stl);
        assert!("l1".parse::<FitLoss>().is_err());
        assert_eq!(FitLoss::Stl.to_string(), "stl");
    }

    #[test]
    fn zero_iterations_rejected() {
        let frame = NeedletFrame::standard().unwrap();
        let map = EquirectMap::constant(64, 128, [1.0; 3]).unwrap();
        let cfg = FitConfig {
            iters: 0,
            ..Default::default()
        };
        assert!(fit_demo(&map, &frame, &cfg).is_err());
    }
}
