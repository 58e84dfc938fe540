//! Synthetic panoramas made of smooth light lobes.

use rand::Rng;

use super::EquirectMap;
use crate::sphgeom::{equirect_geometry, SphDir};

/// A von Mises–Fisher shaped light: radiance ∝ exp(κ(μ·x − 1)), scaled so the
/// lobe integrates to `power` over the sphere.
#[derive(Debug, Clone, Copy)]
pub struct LightSource {
    pub dir: SphDir,
    pub concentration: f64,
    pub power: [f64; 3],
}

impl LightSource {
    pub fn radiance(&self, x: &SphDir) -> [f64; 3] {
        let k = self.concentration;
        let (u, v) = (self.dir.to_vec3(), x.to_vec3());
        let cosg = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let norm = k / (2.0 * std::f64::consts::PI * (-(-2.0 * k).exp_m1()));
        let s = norm * (k * (cosg - 1.0)).exp();
        [self.power[0] * s, self.power[1] * s, self.power[2] * s]
    }
}

/// Renders the sum of `sources` onto an H×W panorama.
pub fn render_sources(height: usize, width: usize, sources: &[LightSource]) -> EquirectMap {
    render_with_ambient(height, width, sources, [0.0; 3])
}

pub fn render_with_ambient(
    height: usize,
    width: usize,
    sources: &[LightSource],
    ambient: [f64; 3],
) -> EquirectMap {
    let pixels = equirect_geometry(height, width)
        .expect("panorama dimensions")
        .iter()
        .map(|(d, _)| {
            let mut p = ambient;
            for s in sources {
                let r = s.radiance(d);
                for c in 0..3 {
                    p[c] += r[c];
                }
            }
            p
        })
        .collect();
    EquirectMap::new(height, width, pixels).expect("nonnegative radiance")
}

/// Two equal lights at `dir` and its antipode.
pub fn two_antipodal_sources(dir: SphDir, concentration: f64, power: [f64; 3]) -> [LightSource; 2] {
    [
        LightSource {
            dir,
            concentration,
            power,
        },
        LightSource {
            dir: dir.antipode(),
            concentration,
            power,
        },
    ]
}

/// A direction drawn uniformly on the sphere.
pub fn random_direction(rng: &mut impl Rng) -> SphDir {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    SphDir::new(z.acos(), phi).expect("valid direction")
}
