//! Spherical transport distance between two panoramas.

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use super::sinkhorn::{sinkhorn_uot, sinkhorn_uot_symmetric, MASS_FLOOR};
use super::{cost_matrix, TransportConfig};
use crate::error::{Error, Result};
use crate::pipeline::EquirectMap;
use crate::sphgeom::{equirect_geometry, quasi_uniform_points, SphDir};

/// Default number of pooling points (one 192-point band).
pub const DEFAULT_STD_POINTS: usize = 192;

#[derive(Debug, Clone, Serialize)]
pub struct StdReport {
    pub distance: f64,
    pub per_channel: [f64; 3],
    pub n_points: usize,
    pub converged: bool,
}

/// Radiant power of each pixel pooled onto the nearest point.
pub fn pool_onto_points(map: &EquirectMap, points: &[SphDir]) -> Result<Vec<[f64; 3]>> {
    let geom = equirect_geometry(map.height(), map.width())?;
    let pv: Vec<[f64; 3]> = points.iter().map(|p| p.to_vec3()).collect();
    let nearest: Vec<usize> = geom
        .par_iter()
        .map(|(d, _)| {
            let v = d.to_vec3();
            let mut best = 0;
            let mut best_dot = f64::NEG_INFINITY;
            for (i, p) in pv.iter().enumerate() {
                let dot = p[0] * v[0] + p[1] * v[1] + p[2] * v[2];
                if dot > best_dot {
                    best_dot = dot;
                    best = i;
                }
            }
            best
        })
        .collect();
    let mut pooled = vec![[0.0; 3]; points.len()];
    for ((k, (_, w)), px) in nearest.iter().zip(&geom).zip(map.pixels()) {
        for c in 0..3 {
            pooled[*k][c] += px[c] * w;
        }
    }
    Ok(pooled)
}

/// Unbalanced transport distance between two maps pooled onto `n_points`
/// quasi-uniform directions, summed over channels. No auxiliary points.
///
/// Each channel contributes the debiased objective
/// `OT(a, b) − ½·OT(a, a) − ½·OT(b, b)`, which vanishes for identical maps.
pub fn std_metric(
    map_a: &EquirectMap,
    map_b: &EquirectMap,
    n_points: usize,
    cfg: &TransportConfig,
) -> Result<StdReport> {
    cfg.validate()?;
    map_a.check_radiance()?;
    map_b.check_radiance()?;
    for (name, m) in [("first", map_a), ("second", map_b)] {
        if m.pixels().iter().flatten().all(|v| *v == 0.0) {
            return Err(Error::Format(format!(
                "{name} map is all zero; transport distance undefined"
            )));
        }
    }
    let points = quasi_uniform_points(n_points)?;
    let cost = cost_matrix(&points, &points);
    let pa = pool_onto_points(map_a, &points)?;
    let pb = pool_onto_points(map_b, &points)?;
    std_from_pooled(&pa, &pb, &cost, cfg, n_points)
}

pub(crate) fn std_from_pooled(
    pa: &[[f64; 3]],
    pb: &[[f64; 3]],
    cost: &Array2<f64>,
    cfg: &TransportConfig,
    n_points: usize,
) -> Result<StdReport> {
    let cfg = cfg.without_aux();
    let channel = |p: &[[f64; 3]], c: usize| -> Vec<f64> { p.iter().map(|v| v[c]).collect() };
    // per channel: OT(a, b), OT(a, a), OT(b, b)
    let results = (0..9)
        .into_par_iter()
        .map(|k| {
            let c = k / 3;
            let log = |x: Vec<f64>| -> Vec<f64> { x.iter().map(|v| v.max(MASS_FLOOR).ln()).collect() };
            match k % 3 {
                0 if channel(pa, c) == channel(pb, c) => sinkhorn_uot_symmetric(&log(channel(pa, c)), cost, &cfg),
                0 => sinkhorn_uot(&channel(pa, c), &channel(pb, c), cost, &cfg),
                1 => sinkhorn_uot_symmetric(&log(channel(pa, c)), cost, &cfg),
                _ => sinkhorn_uot_symmetric(&log(channel(pb, c)), cost, &cfg),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let per_channel: [f64; 3] = std::array::from_fn(|c| {
        let [ab, aa, bb] = [&results[3 * c], &results[3 * c + 1], &results[3 * c + 2]];
        ab.objective - 0.5 * (aa.objective + bb.objective)
    });
    Ok(StdReport {
        distance: per_channel.iter().sum(),
        per_channel,
        n_points,
        converged: results.iter().all(|r| r.converged),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::synthetic::{render_with_ambient, LightSource};

    fn lobe_map() -> EquirectMap {
        let src = LightSource {
            dir: SphDir::new(1.0, 0.4).unwrap(),
            concentration: 15.0,
            power: [3.0, 2.0, 1.0],
        };
        render_with_ambient(32, 64, &[src], [0.05; 3])
    }

    #[test]
    fn self_distance_vanishes() {
        let m = lobe_map();
        let r = std_metric(&m, &m, 48, &TransportConfig::default()).unwrap();
        assert_eq!(r.distance, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn symmetric_and_positive() {
        let m = lobe_map();
        let r = m.rotate_azimuth(1.0);
        let cfg = TransportConfig::default();
        let ab = std_metric(&m, &r, 48, &cfg).unwrap();
        let ba = std_metric(&r, &m, 48, &cfg).unwrap();
        assert!(ab.distance > 0.0);
        assert!((ab.distance - ba.distance).abs() < 1e-9);
        for c in 0..3 {
            assert!(ab.per_channel[c] > 0.0);
        }
    }

    #[test]
    fn zero_map_rejected() {
        let m = lobe_map();
        let z = EquirectMap::constant(32, 64, [0.0; 3]).unwrap();
        assert!(std_metric(&m, &z, 48, &TransportConfig::default()).is_err());
    }
}
