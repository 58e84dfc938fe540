//! File formats and end-to-end workflows.

pub mod coeff_file;
pub mod fit;
pub mod pfm;
pub mod synthetic;

pub use coeff_file::{CoeffFile, Provenance, SparsifyRecord};
pub use fit::{fit_demo, FitConfig, FitLoss, FitReport};
pub use pfm::{decode_pfm, encode_pfm, read_pfm, write_pfm};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::needlet::NeedletCoeffs;
use crate::sparse::{estimate_prior, hard_threshold, soft_threshold};

/// An H×W RGB panorama in linear radiance, rows from the north pole down,
/// columns eastward from φ = 0.
///
/// Radiance maps are nonnegative; [`EquirectMap::from_signal`] also admits
/// signed reconstructions, which [`EquirectMap::clamp_negative`] turns back
/// into radiance.
#[derive(Debug, Clone, PartialEq)]
pub struct EquirectMap {
    height: usize,
    width: usize,
    pixels: Vec<[f64; 3]>,
}

impl EquirectMap {
    /// A radiance map; rejects negative and non-finite values.
    pub fn new(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        let map = Self::from_signal(height, width, pixels)?;
        map.check_radiance()?;
        Ok(map)
    }

    /// A possibly signed signal sampled on the panorama grid.
    pub fn from_signal(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if height < 2 || width < 4 {
            return Err(Error::InvalidArgument(format!(
                "degenerate panorama {height}x{width}"
            )));
        }
        if pixels.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "{} pixels for a {height}x{width} panorama",
                pixels.len()
            )));
        }
        if pixels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite pixel value".into()));
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn constant(height: usize, width: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::new(height, width, vec![rgb; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        self.pixels[row * self.width + col]
    }

    /// True when the map is not the preferred 2:1 aspect.
    pub fn unusual_aspect(&self) -> bool {
        self.width != 2 * self.height
    }

    pub fn check_radiance(&self) -> Result<()> {
        if let Some(i) = self.pixels.iter().position(|p| p.iter().any(|v| *v < 0.0)) {
            return Err(Error::Format(format!(
                "negative radiance at pixel ({}, {})",
                i / self.width,
                i % self.width
            )));
        }
        Ok(())
    }

    /// Clamps negative values to zero and reports how many values were clamped.
    pub fn clamp_negative(&self) -> (EquirectMap, usize) {
        let mut count = 0;
        let pixels = self
            .pixels
            .iter()
            .map(|p| {
                let mut q = *p;
                for v in &mut q {
                    if *v < 0.0 {
                        *v = 0.0;
                        count += 1;
                    }
                }
                q
            })
            .collect();
        (
            EquirectMap {
                height: self.height,
                width: self.width,
                pixels,
            },
            count,
        )
    }

    pub fn scaled(&self, factor: f64) -> EquirectMap {
        EquirectMap {
            height: self.height,
            width: self.width,
            pixels: self
                .pixels
                .iter()
                .map(|p| [p[0] * factor, p[1] * factor, p[2] * factor])
                .collect(),
        }
    }

    /// Rotation about the polar axis by a whole number of columns (eastward).
    pub fn roll_columns(&self, shift: usize) -> EquirectMap {
        let w = self.width;
        let mut pixels = vec![[0.0; 3]; self.pixels.len()];
        for r in 0..self.height {
            for c in 0..w {
                pixels[r * w + (c + shift) % w] = self.pixels[r * w + c];
            }
        }
        EquirectMap {
            height: self.height,
            width: self.width,
            pixels,
        }
    }

    /// Rotation about the polar axis by `angle` radians, linearly
    /// interpolating between columns.
    pub fn rotate_azimuth(&self, angle: f64) -> EquirectMap {
        let w = self.width;
        let shift = (angle / (2.0 * std::f64::consts::PI) * w as f64).rem_euclid(w as f64);
        let whole = shift.floor() as usize;
        let frac = shift - whole as f64;
        let mut pixels = vec![[0.0; 3]; self.pixels.len()];
        for r in 0..self.height {
            for c in 0..w {
                // destination c takes from source c − shift
                let s0 = (c + 2 * w - whole) % w;
                let s1 = (s0 + w - 1) % w;
                let (p0, p1) = (self.pixels[r * w + s0], self.pixels[r * w + s1]);
                for k in 0..3 {
                    pixels[r * w + c][k] = (1.0 - frac) * p0[k] + frac * p1[k];
                }
            }
        }
        EquirectMap {
            height: self.height,
            width: self.width,
            pixels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Soft,
    Hard,
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::Soft => "soft",
            ThresholdMode::Hard => "hard",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(ThresholdMode::Soft),
            "hard" => Ok(ThresholdMode::Hard),
            other => Err(Error::InvalidArgument(format!(
                "unknown threshold mode {other:?} (expected soft or hard)"
            ))),
        }
    }
}

/// Estimates a prior for each band in `bands` from the coefficients
/// themselves and thresholds those bands.
pub fn sparsify(
    coeffs: &NeedletCoeffs,
    lambda: f64,
    bands: &BTreeSet<usize>,
    mode: ThresholdMode,
) -> Result<(NeedletCoeffs, SparsifyRecord)> {
    let priors = bands
        .iter()
        .map(|&j| estimate_prior(coeffs, j, lambda).map(|p| (j, p)))
        .collect::<Result<_>>()?;
    let out = match mode {
        ThresholdMode::Soft => soft_threshold(coeffs, &priors, bands)?,
        ThresholdMode::Hard => hard_threshold(coeffs, &priors, bands)?,
    };
    let record = SparsifyRecord {
        mode: mode.to_string(),
        lambda,
        bands: bands.iter().copied().collect(),
        thresholds: priors.values().map(|p| p.threshold()).collect(),
    };
    Ok((out, record))
}
