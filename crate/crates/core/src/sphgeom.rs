//! Geometry on the unit sphere: directions, point sets, quadrature grids and
//! the equirectangular pixel layout.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

/// A direction on the unit sphere as colatitude `theta` ∈ [0, π] and
/// longitude `phi` ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphDir {
    theta: f64,
    phi: f64,
}

impl SphDir {
    /// Builds a direction, wrapping `phi` into [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite direction ({theta}, {phi})"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "colatitude {theta} outside [0, pi]"
            )));
        }
        Ok(Self {
            theta,
            phi: wrap_longitude(phi),
        })
    }

    pub fn north_pole() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn south_pole() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// Direction of a (not necessarily normalised) Cartesian vector.
    pub fn from_vec3(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("zero or non-finite vector".into()));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Self::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_vec3(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Rotation about the polar axis by `angle` radians.
    pub fn rotated_azimuth(&self, angle: f64) -> Self {
        Self {
            theta: self.theta,
            phi: wrap_longitude(self.phi + angle),
        }
    }

    pub fn antipode(&self) -> Self {
        Self {
            theta: PI - self.theta,
            phi: wrap_longitude(self.phi + PI),
        }
    }
}

fn wrap_longitude(phi: f64) -> f64 {
    let w = phi.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Great-circle distance in radians, in [0, π].
///
/// Evaluated as `atan2(|u × v|, u · v)`, which equals the arccosine of the
/// clamped dot product but keeps full precision near 0 and π.
pub fn geodesic_distance(u: &SphDir, v: &SphDir) -> f64 {
    geodesic_distance_vec(u.to_vec3(), v.to_vec3())
}

pub(crate) fn geodesic_distance_vec(a: [f64; 3], b: [f64; 3]) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let s = dot(cross, cross).sqrt();
    s.atan2(dot(a, b)).clamp(0.0, PI)
}

/// Index of the point in `points` closest to `dir`.
pub fn nearest_index(points: &[SphDir], dir: &SphDir) -> Option<usize> {
    let d = dir.to_vec3();
    points
        .iter()
        .map(|p| dot(p.to_vec3(), d))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Cubature point construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// 12·4^(j−1) equal-area points with equal weights (12/48/192 for j ≤ 3).
    PaperMatching,
    /// Gauss–Legendre × uniform-longitude product grid, exact for the band's
    /// top degree.
    Exact,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::PaperMatching => "paper_matching",
            Scheme::Exact => "exact",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_matching" => Ok(Scheme::PaperMatching),
            "exact" => Ok(Scheme::Exact),
            other => Err(Error::UnsupportedScheme(other.to_string())),
        }
    }
}

/// A set of weighted directions. When `lmax_exact` is set, the weights
/// integrate every product Y_lm·Y_l'm' with l, l' ≤ lmax_exact exactly.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub dirs: Vec<SphDir>,
    pub weights: Vec<f64>,
    pub lmax_exact: usize,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Product grid of `lmax + 1` Gauss–Legendre colatitudes and `2·lmax + 1`
    /// equispaced longitudes.
    pub fn gauss(lmax: usize) -> Self {
        let n_theta = lmax + 1;
        let n_phi = 2 * lmax + 1;
        let (nodes, gl_weights) = gauss_legendre(n_theta);
        let dphi = TWO_PI / n_phi as f64;
        let mut dirs = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in nodes.iter().zip(&gl_weights) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for c in 0..n_phi {
                dirs.push(SphDir {
                    theta,
                    phi: c as f64 * dphi,
                });
                weights.push(w * dphi);
            }
        }
        Self {
            dirs,
            weights,
            lmax_exact: lmax,
        }
    }

    /// Quadrature on the pixel centres of an H×W equirectangular panorama.
    ///
    /// Rows use Fejér's first rule in cos θ, which is exact for polynomials of
    /// degree < H; together with the uniform longitude sum this integrates
    /// SH products up to `min((H−1)/2, (W−1)/2)` exactly.
    pub fn equirect(height: usize, width: usize) -> Result<Self> {
        check_equirect_dims(height, width)?;
        let row_w = fejer_weights(height);
        let dphi = TWO_PI / width as f64;
        let mut dirs = Vec::with_capacity(height * width);
        let mut weights = Vec::with_capacity(height * width);
        for (r, rw) in row_w.iter().enumerate() {
            let theta = (r as f64 + 0.5) * PI / height as f64;
            for c in 0..width {
                dirs.push(SphDir {
                    theta,
                    phi: (c as f64 + 0.5) * dphi,
                });
                weights.push(rw * dphi);
            }
        }
        Ok(Self {
            dirs,
            weights,
            lmax_exact: ((height - 1) / 2).min((width - 1) / 2),
        })
    }
}

/// The cubature points ξ_jk and weights λ_jk of one needlet band.
#[derive(Debug, Clone)]
pub struct CubatureBand {
    pub j: usize,
    pub points: Vec<SphDir>,
    pub weights: Vec<f64>,
    /// Degree up to which products of harmonics are integrated exactly, when
    /// the construction guarantees it.
    pub lmax_exact: Option<usize>,
}

impl CubatureBand {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Top harmonic degree ⌊B^(j+1)⌋ touched by band `j`.
pub fn band_top_degree(b: f64, j: usize) -> usize {
    // small epsilon so that exact powers such as 2^4 are not floored to 15
    (b.powi(j as i32 + 1) * (1.0 + 1e-12)).floor() as usize
}

/// Cubature points for needlet band `j ≥ 1`.
pub fn make_band_points(j: usize, scheme: Scheme, b: f64) -> Result<CubatureBand> {
    if j == 0 {
        return Err(Error::InvalidArgument("band index must be >= 1".into()));
    }
    match scheme {
        Scheme::PaperMatching => {
            if j > 12 {
                return Err(Error::InvalidArgument(format!("band {j} too fine")));
            }
            let nside = 1usize << (j - 1);
            let points = healpix_centers(nside);
            let w = FOUR_PI / points.len() as f64;
            Ok(CubatureBand {
                j,
                weights: vec![w; points.len()],
                points,
                lmax_exact: None,
            })
        }
        Scheme::Exact => {
            if !(b > 1.0) {
                return Err(Error::InvalidArgument(format!("B must exceed 1, got {b}")));
            }
            let grid = QuadGrid::gauss(band_top_degree(b, j));
            Ok(CubatureBand {
                j,
                points: grid.dirs,
                weights: grid.weights,
                lmax_exact: Some(grid.lmax_exact),
            })
        }
    }
}

/// Pixel centres of the HEALPix ring scheme at resolution `nside`
/// (12·nside² equal-area cells).
pub fn healpix_centers(nside: usize) -> Vec<SphDir> {
    let ns = nside as f64;
    let npix = 12 * nside * nside;
    let ncap = 2 * nside * (nside - 1);
    let mut out = Vec::with_capacity(npix);
    for p in 0..npix {
        let (z, phi) = if p < ncap {
            let i = ((1.0 + (1.0 + 2.0 * p as f64).sqrt()) / 2.0).floor() as usize;
            let j = p + 1 - 2 * i * (i - 1);
            let fi = i as f64;
            (
                1.0 - fi * fi / (3.0 * ns * ns),
                (j as f64 - 0.5) * PI / (2.0 * fi),
            )
        } else if p < npix - ncap {
            let ip = p - ncap;
            let i = ip / (4 * nside) + nside;
            let j = ip % (4 * nside) + 1;
            let shift = if (i + nside) % 2 == 1 { 1.0 } else { 0.5 };
            (
                (2.0 * ns - i as f64) * 2.0 / (3.0 * ns),
                (j as f64 - shift) * PI / (2.0 * ns),
            )
        } else {
            let ip = npix - p;
            let i = ((1.0 + (2.0 * ip as f64 - 1.0).sqrt()) / 2.0).floor() as usize;
            let j = 4 * i + 1 - (ip - 2 * i * (i - 1));
            let fi = i as f64;
            (
                -1.0 + fi * fi / (3.0 * ns * ns),
                (j as f64 - 0.5) * PI / (2.0 * fi),
            )
        };
        out.push(SphDir {
            theta: z.clamp(-1.0, 1.0).acos(),
            phi: wrap_longitude(phi),
        });
    }
    out
}

/// A quasi-uniform set of `n` directions: HEALPix centres when
/// `n = 12·nside²`, a Fibonacci lattice otherwise.
pub fn quasi_uniform_points(n: usize) -> Result<Vec<SphDir>> {
    if n < 12 {
        return Err(Error::InvalidArgument(format!(
            "need at least 12 points, got {n}"
        )));
    }
    if n % 12 == 0 {
        let k = n / 12;
        let nside = (k as f64).sqrt().round() as usize;
        if nside * nside == k {
            return Ok(healpix_centers(nside));
        }
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    Ok((0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            SphDir {
                theta: z.acos(),
                phi: wrap_longitude(golden * i as f64),
            }
        })
        .collect())
}

/// Gauss–Legendre nodes (descending in x) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fejér's first rule on the midpoint colatitudes (r + ½)π/n, weights for
/// ∫ f(cos θ) d(cos θ) over [−1, 1].
fn fejer_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..n)
        .map(|r| {
            let theta = (r as f64 + 0.5) * PI / nf;
            let s: f64 = (1..=n / 2)
                .map(|k| {
                    let kf = k as f64;
                    (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0)
                })
                .sum();
            2.0 / nf * (1.0 - 2.0 * s)
        })
        .collect()
}

fn check_equirect_dims(height: usize, width: usize) -> Result<()> {
    if height < 2 || width < 4 {
        return Err(Error::InvalidArgument(format!(
            "degenerate panorama {height}x{width} (need H >= 2, W >= 4)"
        )));
    }
    Ok(())
}

/// Pixel-centre directions and solid angles of an H×W equirectangular grid,
/// row-major from the north pole.
///
/// The weight is the exact solid angle of the pixel,
/// `(cos θ_top − cos θ_bottom)·Δφ = 2 sin θ sin(Δθ/2)·Δφ`, i.e. the midpoint
/// value `sin θ·Δθ·Δφ` scaled by `sinc(Δθ/2)`, so the weights sum to 4π.
pub fn equirect_geometry(height: usize, width: usize) -> Result<Vec<(SphDir, f64)>> {
    check_equirect_dims(height, width)?;
    let dtheta = PI / height as f64;
    let dphi = TWO_PI / width as f64;
    let mut out = Vec::with_capacity(height * width);
    for r in 0..height {
        let theta = (r as f64 + 0.5) * dtheta;
        let w = 2.0 * theta.sin() * (0.5 * dtheta).sin() * dphi;
        for c in 0..width {
            out.push((
                SphDir {
                    theta,
                    phi: (c as f64 + 0.5) * dphi,
                },
                w,
            ));
        }
    }
    Ok(out)
}
