//! Needlet frames: analysis of spherical signals into band coefficients β_jk
//! anchored at cubature points, and synthesis back to the sphere.
//!
//! With window `b` and cubature (ξ_jk, λ_jk),
//!
//! ```text
//! ψ_jk(x) = √λ_jk Σ_l b(l/B^j) Σ_m Y_lm(ξ_jk) Y_lm(x)
//! β_jk    = √λ_jk Σ_l b(l/B^j) Σ_m a_lm Y_lm(ξ_jk)
//! ```
//!
//! Degree zero lies outside every band and is carried as the `dc` mean. Degrees
//! 1 ≤ l < B are only partly covered by bands j ≥ 1 (for B = 2, l = 1 is not
//! covered at all), so the remainder φ(l/B) of the partition of unity is kept
//! as a small low-pass block of weighted SH coefficients. Together these make
//! the system a tight frame for signals band-limited to B^j_max.

mod window;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use window::NeedletWindow;

use crate::error::{Error, Result};
use crate::harmonics::{self, eval_all, lm_index, sh_count, SHCoeffs};
use crate::pipeline::EquirectMap;
use crate::sphgeom::{band_top_degree, make_band_points, CubatureBand, QuadGrid, Scheme, SphDir};

/// Partition-of-unity tolerance enforced when a frame is built.
pub const PARTITION_TOL: f64 = 1e-7;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Clone)]
struct BandTables {
    l_lo: usize,
    l_hi: usize,
    /// b(l/B^j) for l in 0..=l_hi
    window: Vec<f64>,
    /// Y_lm(ξ_k), row k, (l_hi+1)² columns
    ylm: Vec<f64>,
}

/// A needlet frame: window, bands j = 1..=j_max and their cubature.
#[derive(Debug, Clone)]
pub struct NeedletFrame {
    window: NeedletWindow,
    j_max: usize,
    scheme: Scheme,
    bands: Vec<CubatureBand>,
    tables: Vec<BandTables>,
    lowpass_lmax: usize,
    lowpass_weight: Vec<f64>,
}

impl NeedletFrame {
    pub fn new(b: f64, j_max: usize, scheme: Scheme) -> Result<Self> {
        let window = NeedletWindow::new(b)?;
        Self::with_window(window, j_max, scheme)
    }

    /// Frame with the default operating point B = 2, j_max = 3.
    pub fn standard() -> Result<Self> {
        Self::new(2.0, 3, Scheme::PaperMatching)
    }

    pub fn with_window(window: NeedletWindow, j_max: usize, scheme: Scheme) -> Result<Self> {
        if j_max == 0 {
            return Err(Error::InvalidArgument("j_max must be >= 1".into()));
        }
        let b = window.b();
        let top = band_top_degree(b, j_max);
        if top > harmonics::LMAX_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "top degree {top} exceeds supported limit {}",
                harmonics::LMAX_LIMIT
            )));
        }
        let covered = (b.powi(j_max as i32) * (1.0 + 1e-12)).floor() as usize;
        let err = window.partition_error(covered.max(1));
        if err > PARTITION_TOL && window_is_nonzero(&window) {
            return Err(Error::Numerical(format!(
                "window partition of unity off by {err:e}"
            )));
        }
        let mut bands = Vec::with_capacity(j_max);
        let mut tables = Vec::with_capacity(j_max);
        for j in 1..=j_max {
            let band = make_band_points(j, scheme, b)?;
            let l_hi = band_top_degree(b, j);
            let l_lo = (b.powi(j as i32 - 1) * (1.0 - 1e-12)).ceil() as usize;
            let win: Vec<f64> = (0..=l_hi).map(|l| window.band_weight(l, j)).collect();
            let n = sh_count(l_hi);
            let mut ylm = Vec::with_capacity(band.len() * n);
            for p in &band.points {
                ylm.extend(eval_all(l_hi, p));
            }
            tables.push(BandTables {
                l_lo,
                l_hi,
                window: win,
                ylm,
            });
            bands.push(band);
        }
        // degrees 1 ≤ l < B keep the residual φ(l/B) of the partition of unity
        let mut lowpass_lmax = 0;
        while ((lowpass_lmax + 1) as f64) < b {
            lowpass_lmax += 1;
        }
        let lowpass_weight: Vec<f64> = (0..=lowpass_lmax)
            .map(|l| {
                if l == 0 {
                    0.0
                } else {
                    window.lowpass_profile(l as f64 / b).sqrt()
                }
            })
            .collect();
        Ok(Self {
            window,
            j_max,
            scheme,
            bands,
            tables,
            lowpass_lmax,
            lowpass_weight,
        })
    }

    pub fn b(&self) -> f64 {
        self.window.b()
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn window(&self) -> &NeedletWindow {
        &self.window
    }

    pub fn bands(&self) -> &[CubatureBand] {
        &self.bands
    }

    /// Cubature band `j` (1-based).
    pub fn band(&self, j: usize) -> Result<&CubatureBand> {
        if j == 0 || j > self.j_max {
            return Err(Error::IndexOutOfRange(format!(
                "band {j} not in 1..={}",
                self.j_max
            )));
        }
        Ok(&self.bands[j - 1])
    }

    pub fn band_counts(&self) -> Vec<usize> {
        self.bands.iter().map(|b| b.len()).collect()
    }

    /// Total number of band coefficients per channel.
    pub fn coefficient_count(&self) -> usize {
        self.bands.iter().map(|b| b.len()).sum()
    }

    /// Highest SH degree the analysis uses, ⌊B^(j_max+1)⌋.
    pub fn lmax(&self) -> usize {
        band_top_degree(self.b(), self.j_max)
    }

    /// Degree range [⌈B^(j−1)⌉, ⌊B^(j+1)⌋] of band j.
    pub fn band_degrees(&self, j: usize) -> Result<(usize, usize)> {
        self.band(j)?;
        let t = &self.tables[j - 1];
        Ok((t.l_lo, t.l_hi))
    }

    pub fn lowpass_lmax(&self) -> usize {
        self.lowpass_lmax
    }

    /// Number of low-pass coefficients per channel (degrees 1..=lowpass_lmax).
    pub fn lowpass_len(&self) -> usize {
        sh_count(self.lowpass_lmax) - 1
    }

    pub fn zero_coeffs(&self) -> NeedletCoeffs {
        NeedletCoeffs {
            dc: [0.0; 3],
            lowpass: vec![[0.0; 3]; self.lowpass_len()],
            bands: self.bands.iter().map(|b| vec![[0.0; 3]; b.len()]).collect(),
        }
    }

    pub fn check_coeffs(&self, coeffs: &NeedletCoeffs) -> Result<()> {
        if coeffs.bands.len() != self.j_max {
            return Err(Error::ShapeMismatch(format!(
                "{} bands for a frame with j_max = {}",
                coeffs.bands.len(),
                self.j_max
            )));
        }
        for (j, (c, b)) in coeffs.bands.iter().zip(&self.bands).enumerate() {
            if c.len() != b.len() {
                return Err(Error::ShapeMismatch(format!(
                    "band {} has {} coefficients, frame expects {}",
                    j + 1,
                    c.len(),
                    b.len()
                )));
            }
        }
        if coeffs.lowpass.len() != self.lowpass_len() {
            return Err(Error::ShapeMismatch(format!(
                "{} low-pass coefficients, frame expects {}",
                coeffs.lowpass.len(),
                self.lowpass_len()
            )));
        }
        Ok(())
    }

    /// ψ_jk(x), evaluated through the addition theorem
    /// Σ_m Y_lm(ξ)Y_lm(x) = (2l+1)/(4π)·P_l(ξ·x).
    pub fn basis(&self, j: usize, k: usize, dir: &SphDir) -> Result<f64> {
        let band = self.band(j)?;
        let xi = band.points.get(k).ok_or_else(|| {
            Error::IndexOutOfRange(format!("point {k} not in band {j} of size {}", band.len()))
        })?;
        let t = &self.tables[j - 1];
        let (u, v) = (xi.to_vec3(), dir.to_vec3());
        let cosg = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
        let p = harmonics::legendre_polys(t.l_hi, cosg);
        let s: f64 = (t.l_lo..=t.l_hi)
            .map(|l| t.window[l] * (2 * l + 1) as f64 / FOUR_PI * p[l])
            .sum();
        Ok(band.weights[k].sqrt() * s)
    }

    /// Needlet coefficients of a signal given by its SH expansion. Degrees
    /// above `sh.lmax()` are taken as zero.
    pub fn analyze_sh(&self, sh: &SHCoeffs) -> NeedletCoeffs {
        let mut out = self.zero_coeffs();
        for c in 0..3 {
            out.dc[c] = sh.get(c, 0, 0) / FOUR_PI.sqrt();
        }
        for l in 1..=self.lowpass_lmax.min(sh.lmax()) {
            for m in -(l as i64)..=(l as i64) {
                let idx = lm_index(l, m) - 1;
                for c in 0..3 {
                    out.lowpass[idx][c] = self.lowpass_weight[l] * sh.get(c, l, m);
                }
            }
        }
        out.bands = self
            .tables
            .par_iter()
            .zip(self.bands.par_iter())
            .map(|(t, band)| {
                let n = sh_count(t.l_hi);
                let l_hi = t.l_hi.min(sh.lmax());
                // filtered coefficients b(l/B^j)·a_lm
                let mut filtered = vec![[0.0; 3]; sh_count(l_hi)];
                for l in t.l_lo..=l_hi {
                    let w = t.window[l];
                    if w == 0.0 {
                        continue;
                    }
                    for m in -(l as i64)..=(l as i64) {
                        let i = lm_index(l, m);
                        for c in 0..3 {
                            filtered[i][c] = w * sh.get(c, l, m);
                        }
                    }
                }
                band.weights
                    .iter()
                    .enumerate()
                    .map(|(k, lambda)| {
                        let y = &t.ylm[k * n..k * n + filtered.len()];
                        let mut acc = [0.0; 3];
                        for (f, yv) in filtered.iter().zip(y) {
                            for c in 0..3 {
                                acc[c] += f[c] * yv;
                            }
                        }
                        let s = lambda.sqrt();
                        [s * acc[0], s * acc[1], s * acc[2]]
                    })
                    .collect()
            })
            .collect();
        out
    }

    /// Analysis of RGB samples on a quadrature grid.
    pub fn analyze_samples(&self, values: &[[f64; 3]], grid: &QuadGrid) -> Result<NeedletCoeffs> {
        let sh = harmonics::sht_forward(values, grid, self.lmax())?;
        Ok(self.analyze_sh(&sh))
    }

    /// Analysis of an equirectangular panorama. The panorama must resolve the
    /// frame's top degree.
    pub fn analyze_map(&self, map: &EquirectMap) -> Result<NeedletCoeffs> {
        let grid = QuadGrid::equirect(map.height(), map.width())?;
        if grid.lmax_exact < self.lmax() {
            return Err(Error::ResolutionTooLow {
                requested: self.lmax(),
                resolvable: grid.lmax_exact,
            });
        }
        self.analyze_samples(map.pixels(), &grid)
    }

    /// SH expansion of the signal a set of needlet coefficients represents.
    pub fn to_sh(&self, coeffs: &NeedletCoeffs) -> Result<SHCoeffs> {
        self.check_coeffs(coeffs)?;
        let lmax = self.lmax().max(self.lowpass_lmax);
        let n = sh_count(lmax);
        let mut acc = vec![[0.0; 3]; n];
        for c in 0..3 {
            acc[0][c] = coeffs.dc[c] * FOUR_PI.sqrt();
        }
        for l in 1..=self.lowpass_lmax {
            for m in -(l as i64)..=(l as i64) {
                let i = lm_index(l, m);
                for c in 0..3 {
                    acc[i][c] += self.lowpass_weight[l] * coeffs.lowpass[i - 1][c];
                }
            }
        }
        for ((t, band), beta) in self.tables.iter().zip(&self.bands).zip(&coeffs.bands) {
            let nb = sh_count(t.l_hi);
            for (k, (lambda, bk)) in band.weights.iter().zip(beta).enumerate() {
                let s = lambda.sqrt();
                let y = &t.ylm[k * nb..(k + 1) * nb];
                for l in t.l_lo..=t.l_hi {
                    let w = s * t.window[l];
                    if w == 0.0 {
                        continue;
                    }
                    for i in lm_index(l, -(l as i64))..=lm_index(l, l as i64) {
                        let f = w * y[i];
                        for c in 0..3 {
                            acc[i][c] += f * bk[c];
                        }
                    }
                }
            }
        }
        let mut channels = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for (i, v) in acc.iter().enumerate() {
            for c in 0..3 {
                channels[c][i] = v[c];
            }
        }
        SHCoeffs::from_channels(lmax, channels)
    }

    /// I(x) = dc + low-pass + Σ_jk β_jk ψ_jk(x) at each direction.
    pub fn synthesize_at(&self, coeffs: &NeedletCoeffs, dirs: &[SphDir]) -> Result<Vec<[f64; 3]>> {
        let sh = self.to_sh(coeffs)?;
        Ok(harmonics::sht_inverse(&sh, dirs))
    }

    /// Reconstruction on an H×W panorama. Negative values are kept.
    pub fn synthesize(&self, coeffs: &NeedletCoeffs, height: usize, width: usize) -> Result<EquirectMap> {
        let dirs: Vec<SphDir> = crate::sphgeom::equirect_geometry(height, width)?
            .into_iter()
            .map(|(d, _)| d)
            .collect();
        let values = self.synthesize_at(coeffs, &dirs)?;
        EquirectMap::from_signal(height, width, values)
    }
}

fn window_is_nonzero(w: &NeedletWindow) -> bool {
    w.eval(1.0) > 0.0
}

/// Needlet coefficients of an RGB signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedletCoeffs {
    /// Per-channel mean (the l = 0 component).
    pub dc: [f64; 3],
    /// Weighted SH coefficients for 1 ≤ l < B, indexed by `l² + l + m − 1`.
    pub lowpass: Vec<[f64; 3]>,
    /// `bands[j−1][k][c]` = β_jk for channel c.
    pub bands: Vec<Vec<[f64; 3]>>,
}

impl NeedletCoeffs {
    pub fn band(&self, j: usize) -> &[[f64; 3]] {
        &self.bands[j - 1]
    }

    pub fn band_mut(&mut self, j: usize) -> &mut [[f64; 3]] {
        &mut self.bands[j - 1]
    }

    /// Values of band `j` for one channel.
    pub fn band_channel(&self, j: usize, c: usize) -> Vec<f64> {
        self.bands[j - 1].iter().map(|v| v[c]).collect()
    }

    /// Σ_jk β_jk² + Σ low-pass² for one channel (everything except dc).
    pub fn detail_energy(&self, c: usize) -> f64 {
        let bands: f64 = self.bands.iter().flatten().map(|v| v[c] * v[c]).sum();
        let low: f64 = self.lowpass.iter().map(|v| v[c] * v[c]).sum();
        bands + low
    }

    pub fn is_finite(&self) -> bool {
        self.dc.iter().all(|v| v.is_finite())
            && self.lowpass.iter().flatten().all(|v| v.is_finite())
            && self.bands.iter().flatten().flatten().all(|v| v.is_finite())
    }

    /// Linear combination `alpha·self + other` of coefficients of the same shape.
    pub fn axpy(&self, alpha: f64, other: &NeedletCoeffs) -> NeedletCoeffs {
        let mut out = other.clone();
        for c in 0..3 {
            out.dc[c] += alpha * self.dc[c];
        }
        for (o, s) in out.lowpass.iter_mut().zip(&self.lowpass) {
            for c in 0..3 {
                o[c] += alpha * s[c];
            }
        }
        for (ob, sb) in out.bands.iter_mut().zip(&self.bands) {
            for (o, s) in ob.iter_mut().zip(sb) {
                for c in 0..3 {
                    o[c] += alpha * s[c];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::sht_inverse;
    use crate::sphgeom::{geodesic_distance, nearest_index};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sh(lmax: usize, seed: u64) -> SHCoeffs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sh = SHCoeffs::zeros(lmax);
        for c in 0..3 {
            for v in sh.channel_mut(c) {
                *v = rng.random_range(-1.0..1.0);
            }
        }
        sh
    }

    #[test]
    fn standard_frame_has_252_coefficients() {
        let f = NeedletFrame::standard().unwrap();
        assert_eq!(f.band_counts(), vec![12, 48, 192]);
        assert_eq!(f.coefficient_count(), 252);
        assert_eq!(f.lmax(), 16);
        assert_eq!(f.band_degrees(1).unwrap(), (1, 4));
        assert_eq!(f.band_degrees(3).unwrap(), (4, 16));
        assert_eq!(f.lowpass_len(), 3);
    }

    #[test]
    fn constant_map_only_dc() {
        let f = NeedletFrame::standard().unwrap();
        let map = EquirectMap::constant(64, 128, [0.7, 1.5, 3.0]).unwrap();
        let co = f.analyze_map(&map).unwrap();
        for (c, expect) in [0.7, 1.5, 3.0].iter().enumerate() {
            assert!((co.dc[c] - expect).abs() < 1e-12);
        }
        assert!(co.bands.iter().flatten().flatten().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn degree_two_mode_lands_in_band_one() {
        let f = NeedletFrame::standard().unwrap();
        let mut sh = SHCoeffs::zeros(2);
        for c in 0..3 {
            sh.set(c, 2, 1, 1.0);
        }
        let co = f.analyze_sh(&sh);
        assert!(co.band(1).iter().any(|v| v[0].abs() > 1e-3));
        for j in 2..=3 {
            assert!(co.band(j).iter().flatten().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn low_resolution_map_rejected() {
        let f = NeedletFrame::standard().unwrap();
        let map = EquirectMap::constant(16, 32, [1.0; 3]).unwrap();
        assert!(matches!(
            f.analyze_map(&map),
            Err(Error::ResolutionTooLow { requested: 16, .. })
        ));
    }

    #[test]
    fn exact_frame_is_tight() {
        let f = NeedletFrame::new(2.0, 3, Scheme::Exact).unwrap();
        let sh = random_sh(8, 3);
        let co = f.analyze_sh(&sh);
        for c in 0..3 {
            let detail = sh.energy(c) - sh.get(c, 0, 0).powi(2);
            assert!((co.detail_energy(c) - detail).abs() < 1e-9 * detail);
        }
        let back = f.to_sh(&co).unwrap();
        for c in 0..3 {
            for (i, a) in sh.channel(c).iter().enumerate() {
                assert!((back.channel(c)[i] - a).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn basis_routes_agree() {
        // addition theorem vs synthesis of a unit coefficient
        let f = NeedletFrame::standard().unwrap();
        let dirs = crate::sphgeom::quasi_uniform_points(100).unwrap();
        let mut co = f.zero_coeffs();
        co.band_mut(2)[5] = [1.0, 0.0, 0.0];
        let synth = f.synthesize_at(&co, &dirs).unwrap();
        for (d, s) in dirs.iter().zip(&synth) {
            assert!((f.basis(2, 5, d).unwrap() - s[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_localised() {
        let f = NeedletFrame::standard().unwrap();
        let grid = crate::sphgeom::equirect_geometry(90, 180).unwrap();
        for (j, k) in [(1, 3), (2, 17), (3, 100)] {
            let xi = f.band(j).unwrap().points[k];
            let (best, max) = grid
                .iter()
                .map(|(d, _)| (*d, f.basis(j, k, d).unwrap()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            // within one cell diagonal of the 2° grid
            assert!(geodesic_distance(&best, &xi) < 2.0f64.to_radians() * 1.5);
            let anti = f.basis(j, k, &xi.antipode()).unwrap();
            // band 2 of the B = 2 frame sits at 0.060
            let bound = if j == 2 { 0.065 } else { 0.05 };
            assert!(anti.abs() < bound * max, "band {j}: {anti} vs {max}");
        }
    }

    #[test]
    fn basis_index_errors() {
        let f = NeedletFrame::standard().unwrap();
        let d = SphDir::north_pole();
        assert!(f.basis(0, 0, &d).is_err());
        assert!(f.basis(4, 0, &d).is_err());
        assert!(f.basis(1, 12, &d).is_err());
    }

    #[test]
    fn zero_window_basis_vanishes() {
        let f = NeedletFrame::with_window(NeedletWindow::zero(2.0), 2, Scheme::PaperMatching)
            .unwrap();
        for d in crate::sphgeom::quasi_uniform_points(48).unwrap() {
            assert_eq!(f.basis(1, 0, &d).unwrap(), 0.0);
            assert_eq!(f.basis(2, 7, &d).unwrap(), 0.0);
        }
    }

    #[test]
    fn dc_only_synthesis_is_constant() {
        let f = NeedletFrame::standard().unwrap();
        let mut co = f.zero_coeffs();
        co.dc = [1.0; 3];
        let map = f.synthesize(&co, 16, 32).unwrap();
        for p in map.pixels() {
            for v in p {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_mismatch_detected() {
        let f = NeedletFrame::standard().unwrap();
        let mut co = f.zero_coeffs();
        co.bands[2].pop();
        assert!(matches!(f.synthesize(&co, 8, 16), Err(Error::ShapeMismatch(_))));
        let g = NeedletFrame::new(2.0, 2, Scheme::PaperMatching).unwrap();
        assert!(g.check_coeffs(&f.zero_coeffs()).is_err());
    }

    #[test]
    fn analysis_is_linear() {
        let f = NeedletFrame::standard().unwrap();
        let a = random_sh(12, 1);
        let b = random_sh(12, 2);
        let alpha = -1.7;
        let mut combo = b.clone();
        for c in 0..3 {
            for (i, v) in combo.channel_mut(c).iter_mut().enumerate() {
                *v += alpha * a.channel(c)[i];
            }
        }
        let lhs = f.analyze_sh(&combo);
        let rhs = f.analyze_sh(&a).axpy(alpha, &f.analyze_sh(&b));
        for (x, y) in lhs.bands.iter().flatten().zip(rhs.bands.iter().flatten()) {
            for c in 0..3 {
                assert!((x[c] - y[c]).abs() <= 1e-9 * (1.0 + y[c].abs()));
            }
        }
    }

    #[test]
    fn exact_sampled_roundtrip() {
        let f = NeedletFrame::new(2.0, 3, Scheme::Exact).unwrap();
        let grid = QuadGrid::gauss(16);
        let sh = random_sh(8, 9);
        let samples = sht_inverse(&sh, &grid.dirs);
        let co = f.analyze_samples(&samples, &grid).unwrap();
        let rec = f.synthesize_at(&co, &grid.dirs).unwrap();
        let err: f64 = samples
            .iter()
            .zip(&rec)
            .map(|(a, b)| (0..3).map(|c| (a[c] - b[c]).powi(2)).sum::<f64>())
            .sum();
        let norm: f64 = samples.iter().map(|a| a.iter().map(|v| v * v).sum::<f64>()).sum();
        assert!((err / norm).sqrt() < 1e-9);
    }

    #[test]
    fn single_source_argmax_follows_rotation() {
        use crate::pipeline::synthetic::{render_sources, LightSource};
        let f = NeedletFrame::standard().unwrap();
        let xi = f.band(2).unwrap().points[20];
        let src = |d: SphDir| {
            vec![LightSource {
                dir: d,
                concentration: 40.0,
                power: [10.0; 3],
            }]
        };
        let argmax = |co: &NeedletCoeffs| {
            co.band(2)
                .iter()
                .enumerate()
                .max_by(|a, b| a.1[0].total_cmp(&b.1[0]))
                .unwrap()
                .0
        };
        let m0 = render_sources(64, 128, &src(xi));
        let k0 = argmax(&f.analyze_map(&m0).unwrap());
        let shifted = m0.roll_columns(1);
        let k1 = argmax(&f.analyze_map(&shifted).unwrap());
        let step = 2.0 * std::f64::consts::PI / 128.0;
        let rotated = f.band(2).unwrap().points[k0].rotated_azimuth(step);
        assert_eq!(k1, nearest_index(&f.band(2).unwrap().points, &rotated).unwrap());
    }
}
