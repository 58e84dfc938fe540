//! Versioned JSON container for needlet coefficients.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::needlet::{NeedletCoeffs, NeedletFrame};
use crate::sphgeom::{band_top_degree, Scheme};

pub const COEFF_FILE_VERSION: u32 = 1;
/// Frames deeper than this are refused when reading files.
pub const MAX_J: usize = 8;

/// Record of a thresholding step applied to the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyRecord {
    /// "soft" or "hard".
    pub mode: String,
    pub lambda: f64,
    pub bands: Vec<usize>,
    /// Threshold applied to each band, in the same order as `bands`.
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsify: Option<SparsifyRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandRecord {
    pub j: usize,
    /// `channels[c][k]` = β_jk of channel c.
    pub channels: [Vec<f64>; 3],
}

/// On-disk coefficient file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffFile {
    pub version: u32,
    #[serde(rename = "B")]
    pub b: f64,
    pub j_max: usize,
    pub scheme: String,
    pub band_counts: Vec<usize>,
    pub dc: [f64; 3],
    /// Weighted SH coefficients for 1 ≤ l < B, `lowpass[c][l² + l + m − 1]`.
    pub lowpass: [Vec<f64>; 3],
    pub bands: Vec<BandRecord>,
    pub provenance: Provenance,
}

/// Band sizes a frame with these parameters produces.
pub fn expected_band_counts(b: f64, j_max: usize, scheme: Scheme) -> Vec<usize> {
    (1..=j_max)
        .map(|j| match scheme {
            Scheme::PaperMatching => 12 * 4usize.pow(j as u32 - 1),
            Scheme::Exact => {
                let l = band_top_degree(b, j);
                (l + 1) * (2 * l + 1)
            }
        })
        .collect()
}

fn expected_lowpass_len(b: f64) -> usize {
    let mut l = 0usize;
    while ((l + 1) as f64) < b {
        l += 1;
    }
    (l + 1) * (l + 1) - 1
}

impl CoeffFile {
    pub fn from_coeffs(frame: &NeedletFrame, coeffs: &NeedletCoeffs, provenance: Provenance) -> Result<Self> {
        frame.check_coeffs(coeffs)?;
        if !coeffs.is_finite() {
            return Err(Error::Numerical("non-finite coefficient".into()));
        }
        let split = |rows: &[[f64; 3]]| -> [Vec<f64>; 3] {
            [
                rows.iter().map(|v| v[0]).collect(),
                rows.iter().map(|v| v[1]).collect(),
                rows.iter().map(|v| v[2]).collect(),
            ]
        };
        Ok(Self {
            version: COEFF_FILE_VERSION,
            b: frame.b(),
            j_max: frame.j_max(),
            scheme: frame.scheme().as_str().to_string(),
            band_counts: frame.band_counts(),
            dc: coeffs.dc,
            lowpass: split(&coeffs.lowpass),
            bands: coeffs
                .bands
                .iter()
                .enumerate()
                .map(|(i, band)| BandRecord {
                    j: i + 1,
                    channels: split(band),
                })
                .collect(),
            provenance,
        })
    }

    pub fn scheme(&self) -> Result<Scheme> {
        self.scheme.parse()
    }

    /// Checks the version and that every count agrees with (B, j_max, scheme).
    pub fn validate(&self) -> Result<()> {
        if self.version != COEFF_FILE_VERSION {
            return Err(Error::Format(format!(
                "unsupported coefficient file version {}",
                self.version
            )));
        }
        if !(self.b > 1.0) || !self.b.is_finite() || self.b > 16.0 {
            return Err(Error::Format(format!("invalid B {}", self.b)));
        }
        if self.j_max == 0 || self.j_max > MAX_J {
            return Err(Error::Format(format!("invalid j_max {}", self.j_max)));
        }
        let scheme = self
            .scheme()
            .map_err(|_| Error::Format(format!("unknown scheme {:?}", self.scheme)))?;
        if scheme == Scheme::Exact && band_top_degree(self.b, self.j_max) > crate::harmonics::LMAX_LIMIT {
            return Err(Error::Format("frame top degree above supported limit".into()));
        }
        let expected = expected_band_counts(self.b, self.j_max, scheme);
        if self.band_counts != expected {
            return Err(Error::Format(format!(
                "band counts {:?} do not match frame ({expected:?})",
                self.band_counts
            )));
        }
        if self.bands.len() != self.j_max {
            return Err(Error::Format(format!(
                "{} band records for j_max {}",
                self.bands.len(),
                self.j_max
            )));
        }
        for (i, (band, n)) in self.bands.iter().zip(&expected).enumerate() {
            if band.j != i + 1 {
                return Err(Error::Format(format!("band record {i} labelled j = {}", band.j)));
            }
            if band.channels.iter().any(|c| c.len() != *n) {
                return Err(Error::Format(format!("band {} has the wrong length", band.j)));
            }
        }
        let nl = expected_lowpass_len(self.b);
        if self.lowpass.iter().any(|c| c.len() != nl) {
            return Err(Error::Format(format!("low-pass block must hold {nl} values per channel")));
        }
        let values = self
            .dc
            .iter()
            .chain(self.lowpass.iter().flatten())
            .chain(self.bands.iter().flat_map(|b| b.channels.iter().flatten()));
        if values.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn frame(&self) -> Result<NeedletFrame> {
        self.validate()?;
        NeedletFrame::new(self.b, self.j_max, self.scheme()?)
    }

    pub fn coeffs(&self) -> Result<NeedletCoeffs> {
        self.validate()?;
        let join = |ch: &[Vec<f64>; 3]| -> Vec<[f64; 3]> {
            (0..ch[0].len()).map(|k| [ch[0][k], ch[1][k], ch[2][k]]).collect()
        };
        Ok(NeedletCoeffs {
            dc: self.dc,
            lowpass: join(&self.lowpass),
            bands: self.bands.iter().map(|b| join(&b.channels)).collect(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: CoeffFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        let s = std::str::from_utf8(bytes).map_err(|_| Error::Format("coefficient file is not UTF-8".into()))?;
        Self::from_json_str(s)
    }

    pub fn to_json_string(&self) -> Result<String> {
        self.validate()?;
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_bytes(&fs::read(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut s = self.to_json_string()?;
        s.push('\n');
        fs::write(path, s)?;
        Ok(())
    }
}
