//! Real orthonormal spherical harmonics and direct-summation transforms.
//!
//! Convention: Condon–Shortley phase in the associated Legendre functions,
//!
//! ```text
//! Y_l0  = P̄_l0(cos θ)
//! Y_lm  = √2 P̄_lm(cos θ) cos(mφ)     m > 0
//! Y_l-m = √2 P̄_lm(cos θ) sin(mφ)     m > 0
//! ```
//!
//! where P̄_lm are the unit-L² normalised associated Legendre functions.
//! Coefficients are stored per channel at index `l² + l + m`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphgeom::{QuadGrid, SphDir};

/// Largest supported degree.
pub const LMAX_LIMIT: usize = 64;

const FORWARD_CHUNK: usize = 512;

const INV_SQRT_4PI: f64 = 0.282_094_791_773_878_14;

/// Number of coefficients through degree `lmax`.
#[inline]
pub fn sh_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// Real SH coefficients a_lm for three colour channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SHCoeffs {
    lmax: usize,
    channels: [Vec<f64>; 3],
}

impl SHCoeffs {
    pub fn zeros(lmax: usize) -> Self {
        let n = sh_count(lmax);
        Self {
            lmax,
            channels: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn from_channels(lmax: usize, channels: [Vec<f64>; 3]) -> Result<Self> {
        let n = sh_count(lmax);
        if channels.iter().any(|c| c.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} coefficients per channel for lmax {lmax}"
            )));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite SH coefficient".into()));
        }
        Ok(Self { lmax, channels })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.channels[c]
    }

    pub fn get(&self, c: usize, l: usize, m: i64) -> f64 {
        self.channels[c][lm_index(l, m)]
    }

    pub fn set(&mut self, c: usize, l: usize, m: i64, v: f64) {
        self.channels[c][lm_index(l, m)] = v;
    }

    /// Σ_lm a_lm² for one channel.
    pub fn energy(&self, c: usize) -> f64 {
        self.channels[c].iter().map(|v| v * v).sum()
    }
}

#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Values of every Y_lm with l ≤ lmax at `dir`, indexed by [`lm_index`].
pub fn eval_all(lmax: usize, dir: &SphDir) -> Vec<f64> {
    let mut out = vec![0.0; sh_count(lmax)];
    eval_all_into(lmax, dir, &mut out);
    out
}

pub(crate) fn eval_all_into(lmax: usize, dir: &SphDir, out: &mut [f64]) {
    let (st, x) = dir.theta().sin_cos();
    let phi = dir.phi();
    let mut pmm = INV_SQRT_4PI;
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
        }
        let (sm, cm) = (m as f64 * phi).sin_cos();
        let store = |out: &mut [f64], l: usize, p: f64| {
            if m == 0 {
                out[lm_index(l, 0)] = p;
            } else {
                let s2 = std::f64::consts::SQRT_2 * p;
                out[lm_index(l, m as i64)] = s2 * cm;
                out[lm_index(l, -(m as i64))] = s2 * sm;
            }
        };
        store(out, m, pmm);
        if m == lmax {
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p_cur = (2.0 * mf + 3.0).sqrt() * x * pmm;
        store(out, m + 1, p_cur);
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            let p_next = a * (x * p_cur - b * p_prev);
            store(out, l, p_next);
            p_prev = p_cur;
            p_cur = p_next;
        }
    }
}

/// Real orthonormal Y_lm at `dir`.
pub fn eval_ylm(l: usize, m: i64, dir: &SphDir) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    if l > LMAX_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "degree {l} above supported limit {LMAX_LIMIT}"
        )));
    }
    Ok(eval_all(l, dir)[lm_index(l, m)])
}

/// Legendre polynomials P_0..=P_lmax at `x`.
pub fn legendre_polys(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax >= 1 {
        p.push(x);
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let v = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        p.push(v);
    }
    p
}

/// Projects RGB samples on a quadrature grid onto real SH:
/// a_lm = Σ_i f(x_i)·Y_lm(x_i)·w_i.
pub fn sht_forward(values: &[[f64; 3]], grid: &QuadGrid, lmax: usize) -> Result<SHCoeffs> {
    if values.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} samples for a grid of {} directions",
            values.len(),
            grid.len()
        )));
    }
    if lmax > LMAX_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "lmax {lmax} above supported limit {LMAX_LIMIT}"
        )));
    }
    if lmax > grid.lmax_exact {
        return Err(Error::ResolutionTooLow {
            requested: lmax,
            resolvable: grid.lmax_exact,
        });
    }
    let n = sh_count(lmax);
    // fixed chunking keeps the summation order independent of the thread count
    let partials: Vec<Vec<f64>> = values
        .par_chunks(FORWARD_CHUNK)
        .zip(grid.dirs.par_chunks(FORWARD_CHUNK))
        .zip(grid.weights.par_chunks(FORWARD_CHUNK))
        .map(|((vals, dirs), weights)| {
            let mut acc = vec![0.0; 3 * n];
            let mut y = vec![0.0; n];
            for ((f, dir), w) in vals.iter().zip(dirs).zip(weights) {
                eval_all_into(lmax, dir, &mut y);
                for c in 0..3 {
                    let fw = f[c] * w;
                    if fw != 0.0 {
                        let dst = &mut acc[c * n..(c + 1) * n];
                        for (d, yv) in dst.iter_mut().zip(&y) {
                            *d += fw * yv;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![0.0; 3 * n];
    for p in &partials {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
    }
    let channels = [
        acc[..n].to_vec(),
        acc[n..2 * n].to_vec(),
        acc[2 * n..].to_vec(),
    ];
    SHCoeffs::from_channels(lmax, channels)
}

/// Synthesises f(x) = Σ a_lm·Y_lm(x) at each direction.
pub fn sht_inverse(coeffs: &SHCoeffs, dirs: &[SphDir]) -> Vec<[f64; 3]> {
    let lmax = coeffs.lmax();
    let n = sh_count(lmax);
    dirs.par_iter()
        .map_init(
            || vec![0.0; n],
            |y, dir| {
                eval_all_into(lmax, dir, y);
                let mut out = [0.0; 3];
                for (c, o) in out.iter_mut().enumerate() {
                    *o = coeffs.channel(c).iter().zip(y.iter()).map(|(a, b)| a * b).sum();
                }
                out
            },
        )
        .collect()
}
