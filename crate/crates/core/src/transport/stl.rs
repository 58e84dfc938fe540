//! Spherical transport loss between predicted and reference needlet
//! coefficients.
//!
//! Per band and channel the coefficients are exponentiated into positive
//! masses on the band's cubature points and compared with unbalanced
//! Sinkhorn under geodesic cost. A fraction of the predicted slots (those with
//! the smallest |β|) is replaced by auxiliary points: the small coefficient
//! value 1/N, exponentiated like the others, and zero cost to every target, so they soak up mass that has nowhere useful to
//! go. Losses are summed over bands and channels.

use ndarray::Array2;
use rayon::prelude::*;

use super::sinkhorn::{sinkhorn_uot_log, Duals};
use super::{cost_matrix, plan_sparsity, TransportConfig, TransportResult};
use crate::error::{Error, Result};
use crate::needlet::{NeedletCoeffs, NeedletFrame};

/// One band/channel solve of the loss.
#[derive(Debug, Clone)]
pub struct StlSolve {
    pub j: usize,
    pub channel: usize,
    /// Source slots replaced by auxiliary points.
    pub aux: Vec<bool>,
    pub result: TransportResult,
}

impl StlSolve {
    /// The plan with every connection to an auxiliary point removed.
    pub fn sparse_plan(&self) -> Array2<f64> {
        let mut p = self.result.plan.clone();
        for (i, is_aux) in self.aux.iter().enumerate() {
            if *is_aux {
                p.row_mut(i).fill(0.0);
            }
        }
        p
    }

    pub fn sparsity(&self) -> f64 {
        plan_sparsity(&self.sparse_plan())
    }
}

#[derive(Debug, Clone)]
pub struct StlOutput {
    pub loss: f64,
    /// ∂loss/∂β for the predicted band coefficients; dc and low-pass are zero.
    pub grad: NeedletCoeffs,
    /// Loss per band and channel.
    pub per_band: Vec<[f64; 3]>,
    pub solves: Vec<StlSolve>,
}

impl StlOutput {
    pub fn all_converged(&self) -> bool {
        self.solves.iter().all(|s| s.result.converged)
    }
}

/// Potentials from a previous evaluation, reused as starting points.
#[derive(Debug, Clone, Default)]
pub struct StlWarmStart {
    duals: Vec<Option<Duals>>,
}

/// Loss bound to a frame's cubature geometry.
#[derive(Debug, Clone)]
pub struct SphericalTransportLoss {
    cfg: TransportConfig,
    costs: Vec<Array2<f64>>,
    j_max: usize,
    counts: Vec<usize>,
    lowpass_len: usize,
}

impl SphericalTransportLoss {
    pub fn new(frame: &NeedletFrame, cfg: TransportConfig) -> Result<Self> {
        cfg.validate()?;
        let costs = frame
            .bands()
            .iter()
            .map(|b| cost_matrix(&b.points, &b.points))
            .collect();
        Ok(Self {
            cfg,
            costs,
            j_max: frame.j_max(),
            counts: frame.band_counts(),
            lowpass_len: frame.lowpass_len(),
        })
    }

    pub fn config(&self) -> &TransportConfig {
        &self.cfg
    }

    fn check(&self, co: &NeedletCoeffs, what: &str) -> Result<()> {
        let counts: Vec<usize> = co.bands.iter().map(|b| b.len()).collect();
        if counts != self.counts {
            return Err(Error::ShapeMismatch(format!(
                "{what} coefficients have band sizes {counts:?}, frame expects {:?}",
                self.counts
            )));
        }
        Ok(())
    }

    /// Auxiliary slots: the `round(aux_fraction·N)` smallest |β|, ties broken
    /// by index.
    pub fn aux_slots(&self, beta: &[f64]) -> Vec<bool> {
        let n = beta.len();
        let n_aux = ((self.cfg.aux_fraction * n as f64).round() as usize).min(n.saturating_sub(1));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| beta[a].abs().total_cmp(&beta[b].abs()).then(a.cmp(&b)));
        let mut aux = vec![false; n];
        for &i in &order[..n_aux] {
            aux[i] = true;
        }
        aux
    }

    pub fn evaluate(&self, pred: &NeedletCoeffs, gt: &NeedletCoeffs) -> Result<StlOutput> {
        self.evaluate_warm(pred, gt, None)
    }

    pub fn evaluate_warm(
        &self,
        pred: &NeedletCoeffs,
        gt: &NeedletCoeffs,
        mut warm: Option<&mut StlWarmStart>,
    ) -> Result<StlOutput> {
        self.check(pred, "predicted")?;
        self.check(gt, "reference")?;
        let jobs: Vec<(usize, usize)> = (1..=self.j_max)
            .flat_map(|j| (0..3).map(move |c| (j, c)))
            .collect();
        let starts: Vec<Option<Duals>> = match warm.as_deref() {
            Some(w) if w.duals.len() == jobs.len() => w.duals.clone(),
            _ => vec![None; jobs.len()],
        };
        let cfg = self.cfg;
        let solved: Vec<(StlSolve, Vec<f64>)> = jobs
            .par_iter()
            .zip(starts.par_iter())
            .map(|(&(j, c), start)| {
                let beta = pred.band_channel(j, c);
                let target = gt.band_channel(j, c);
                let n = beta.len();
                let aux = self.aux_slots(&beta);
                let aux_log_mass = cfg.aux_mass.map_or(1.0 / n as f64, f64::ln);
                let log_a: Vec<f64> = beta
                    .iter()
                    .zip(&aux)
                    .map(|(b, is_aux)| if *is_aux { aux_log_mass } else { *b })
                    .collect();
                let mut cost = self.costs[j - 1].clone();
                for (i, is_aux) in aux.iter().enumerate() {
                    if *is_aux {
                        cost.row_mut(i).fill(0.0);
                    }
                }
                let result = sinkhorn_uot_log(&log_a, &target, &cost, &cfg, start.as_ref())?;
                // envelope theorem: ∂/∂a_i = τ(1 − e^{−f_i/τ}), and a_i = e^{β_i}
                let grad: Vec<f64> = beta
                    .iter()
                    .zip(&aux)
                    .zip(&result.duals.f)
                    .map(|((b, is_aux), f)| {
                        if *is_aux {
                            0.0
                        } else {
                            -cfg.tau * b.exp() * (-f / cfg.tau).exp_m1()
                        }
                    })
                    .collect();
                Ok((
                    StlSolve {
                        j,
                        channel: c,
                        aux,
                        result,
                    },
                    grad,
                ))
            })
            .collect::<Result<_>>()?;

        let mut grad = NeedletCoeffs {
            dc: [0.0; 3],
            lowpass: vec![[0.0; 3]; self.lowpass_len],
            bands: self.counts.iter().map(|&n| vec![[0.0; 3]; n]).collect(),
        };
        let mut per_band = vec![[0.0; 3]; self.j_max];
        let mut loss = 0.0;
        let mut solves = Vec::with_capacity(solved.len());
        for (solve, g) in solved {
            let (j, c) = (solve.j, solve.channel);
            for (dst, v) in grad.band_mut(j).iter_mut().zip(g) {
                dst[c] = v;
            }
            per_band[j - 1][c] = solve.result.objective;
            loss += solve.result.objective;
            solves.push(solve);
        }
        if let Some(w) = warm.as_deref_mut() {
            w.duals = solves.iter().map(|s| Some(s.result.duals.clone())).collect();
        }
        Ok(StlOutput {
            loss,
            grad,
            per_band,
            solves,
        })
    }
}

/// Spherical transport loss of `pred` against `gt` and its gradient with
/// respect to the predicted band coefficients.
pub fn stl(
    pred: &NeedletCoeffs,
    gt: &NeedletCoeffs,
    frame: &NeedletFrame,
    cfg: &TransportConfig,
) -> Result<(f64, NeedletCoeffs)> {
    let out = SphericalTransportLoss::new(frame, *cfg)?.evaluate(pred, gt)?;
    Ok((out.loss, out.grad))
}
