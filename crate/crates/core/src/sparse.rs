//! Sparsification of needlet coefficients.
//!
//! Observed coefficients are modelled as β = s + φ + η with light-source
//! coefficients s under a Laplace prior of rate λ, a Gaussian ambient term φ
//! with variance σ_φ² and Gaussian noise η with variance σ_η². With diagonal
//! covariances the MAP estimate of s is a soft threshold at
//!
//! ```text
//! t = [1/σ_η² − (σ_η² + σ_η⁴/σ_φ²)⁻¹]⁻¹ · λ = (σ_φ² + σ_η²) · λ
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::needlet::NeedletCoeffs;

/// Smallest noise variance an estimate may report.
pub const SIGMA_FLOOR: f64 = 1e-12;
/// Consistency factor turning a median absolute deviation into a standard deviation.
pub const MAD_SCALE: f64 = 1.4826;
/// Minimum band size for [`estimate_prior`].
pub const MIN_BAND_LEN: usize = 8;
pub const DEFAULT_LAMBDA: f64 = 1.0;

/// Per-band parameters of the sparse signal model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsePrior {
    pub sigma_eta2: f64,
    pub sigma_phi2: f64,
    pub lambda: f64,
}

impl SparsePrior {
    pub fn new(sigma_eta2: f64, sigma_phi2: f64, lambda: f64) -> Result<Self> {
        if !(sigma_eta2 > 0.0) || !(sigma_phi2 > 0.0) || !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "invalid prior (sigma_eta2={sigma_eta2}, sigma_phi2={sigma_phi2}, lambda={lambda})"
            )));
        }
        Ok(Self {
            sigma_eta2,
            sigma_phi2,
            lambda,
        })
    }

    /// Robust variance estimates from a sample of coefficients; `lambda` is
    /// taken from configuration.
    pub fn from_samples(values: &[f64], lambda: f64) -> Result<Self> {
        if values.len() < MIN_BAND_LEN {
            return Err(Error::InvalidArgument(format!(
                "band has {} coefficients, need at least {MIN_BAND_LEN}",
                values.len()
            )));
        }
        let med = median(values.to_vec());
        let mad = median(values.iter().map(|v| (v - med).abs()).collect());
        let sigma_eta2 = (MAD_SCALE * mad).powi(2).max(SIGMA_FLOOR);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sigma_phi2 = (var - sigma_eta2).max(0.1 * sigma_eta2);
        Self::new(sigma_eta2, sigma_phi2, lambda)
    }

    /// Scalar reduction of the MAP threshold, (σ_φ² + σ_η²)·λ.
    pub fn threshold(&self) -> f64 {
        (self.sigma_phi2 + self.sigma_eta2) * self.lambda
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Estimates the prior of band `j`, pooling the three colour channels.
pub fn estimate_prior(coeffs: &NeedletCoeffs, j: usize, lambda: f64) -> Result<SparsePrior> {
    if j == 0 || j > coeffs.bands.len() {
        return Err(Error::IndexOutOfRange(format!("band {j} does not exist")));
    }
    let band = coeffs.band(j);
    if band.len() < MIN_BAND_LEN {
        return Err(Error::InvalidArgument(format!(
            "band {j} has {} coefficients, need at least {MIN_BAND_LEN}",
            band.len()
        )));
    }
    let values: Vec<f64> = band.iter().flatten().copied().collect();
    SparsePrior::from_samples(&values, lambda)
}

/// Priors for every band, keyed by band index.
pub fn estimate_priors(coeffs: &NeedletCoeffs, lambda: f64) -> Result<BTreeMap<usize, SparsePrior>> {
    (1..=coeffs.bands.len())
        .map(|j| estimate_prior(coeffs, j, lambda).map(|p| (j, p)))
        .collect()
}

/// Default set of bands to sparsify: every band above the first.
pub fn default_apply_bands(j_max: usize) -> BTreeSet<usize> {
    (2..=j_max).collect()
}

pub fn soft_threshold_value(beta: f64, t: f64) -> f64 {
    if t == 0.0 {
        return beta;
    }
    beta.signum() * (beta.abs() - t).max(0.0)
}

pub fn hard_threshold_value(beta: f64, t: f64) -> f64 {
    if beta.abs() > t {
        beta
    } else {
        0.0
    }
}

fn apply(
    coeffs: &NeedletCoeffs,
    priors: &BTreeMap<usize, SparsePrior>,
    apply_bands: &BTreeSet<usize>,
    op: fn(f64, f64) -> f64,
) -> Result<NeedletCoeffs> {
    let mut out = coeffs.clone();
    for &j in apply_bands {
        if j == 0 || j > coeffs.bands.len() {
            return Err(Error::IndexOutOfRange(format!("band {j} does not exist")));
        }
        let t = priors.get(&j).ok_or(Error::MissingPrior(j))?.threshold();
        for v in out.band_mut(j).iter_mut().flatten() {
            *v = op(*v, t);
        }
    }
    Ok(out)
}

/// s = sign(β)·max(|β| − t, 0) on the selected bands; everything else,
/// including dc and the low-pass block, passes through.
pub fn soft_threshold(
    coeffs: &NeedletCoeffs,
    priors: &BTreeMap<usize, SparsePrior>,
    apply_bands: &BTreeSet<usize>,
) -> Result<NeedletCoeffs> {
    apply(coeffs, priors, apply_bands, soft_threshold_value)
}

/// s = β if |β| > t else 0, with the same threshold as [`soft_threshold`].
pub fn hard_threshold(
    coeffs: &NeedletCoeffs,
    priors: &BTreeMap<usize, SparsePrior>,
    apply_bands: &BTreeSet<usize>,
) -> Result<NeedletCoeffs> {
    apply(coeffs, priors, apply_bands, hard_threshold_value)
}
