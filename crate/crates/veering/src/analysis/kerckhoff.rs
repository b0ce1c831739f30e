use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flips::{column_pair, widest, width_flip};
use crate::flow::SliceSampler;
use crate::geometry::width_cone;
use crate::triangulation::{ColouredTriangulation, Label};

/// Move cap for one width expansion.
pub const EXPANSION_CAP: usize = 100_000;

#[derive(Clone, Debug, Serialize)]
pub struct KerckhoffRow {
    pub threshold: f64,
    pub fraction: f64,
    /// `threshold * fraction`.
    pub constant: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KerckhoffReport {
    pub edge: String,
    pub samples: usize,
    pub horizon_exceeded: usize,
    pub rows: Vec<KerckhoffRow>,
}

impl KerckhoffReport {
    /// Largest over smallest fitted constant.
    pub fn spread(&self) -> f64 {
        let cs: Vec<f64> = self.rows.iter().map(|r| r.constant).filter(|&c| c > 0.0).collect();
        if cs.len() < self.rows.len() {
            return f64::INFINITY;
        }
        cs.iter().copied().fold(0.0, f64::max) / cs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Expands `x` by flipping the widest edge until `r` is the widest. Returns the
/// coordinate sum of column `r` of the matrix of the flips made, or `None` past the
/// move cap. Stops early once the sum exceeds `stop_above`.
pub fn column_growth_before_flip(
    t: &ColouredTriangulation,
    x: &[f64],
    r: Label,
    stop_above: f64,
) -> Result<Option<f64>> {
    let n = t.num_labels();
    let mut t = t.clone();
    let mut x = x.to_vec();
    // Column p of the matrix, as a vector over labels.
    let mut columns: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..EXPANSION_CAP {
        let e = widest(&x);
        let norm: f64 = columns[r.0].iter().sum();
        if e == r || norm > stop_above {
            return Ok(Some(norm));
        }
        let before = t.clone();
        let (u, mv) = width_flip(&t, &mut x, e)?;
        let (p, q) = column_pair(&before, e, mv.outcome)?;
        for target in [p, q] {
            let add = columns[e.0].clone();
            columns[target.0].iter_mut().zip(add).for_each(|(a, b)| *a += b);
        }
        t = u;
        let m = x.iter().copied().fold(0.0, f64::max);
        x.iter_mut().for_each(|v| *v /= m);
    }
    Ok(None)
}

/// Monte Carlo estimate of the probability that column `edge` of the expansion
/// matrix exceeds each threshold before `edge` is flipped, for widths uniform on the
/// slice of the width cone.
pub fn kerckhoff_estimate(
    t: &ColouredTriangulation,
    edge: Label,
    thresholds: &[f64],
    samples: usize,
    seed: u64,
) -> Result<KerckhoffReport> {
    if edge.0 >= t.num_labels() {
        return Err(Error::UnknownLabel(edge.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = SliceSampler::new(&width_cone(t)?)?;
    sampler.mix(&mut rng, 50 * sampler.dimension().max(1));
    let top = thresholds.iter().copied().fold(0.0, f64::max);
    let mut exceeded = vec![0usize; thresholds.len()];
    let mut horizon_exceeded = 0;
    let mut done = 0;
    while done + horizon_exceeded < samples {
        let x = sampler.sample(&mut rng);
        match column_growth_before_flip(t, &x, edge, top) {
            Ok(Some(norm)) => {
                done += 1;
                for (k, &m) in thresholds.iter().enumerate() {
                    if norm > m {
                        exceeded[k] += 1;
                    }
                }
            }
            Ok(None) => horizon_exceeded += 1,
            // A tie between widths has probability zero; resample.
            Err(Error::DegenerateWidth(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let rows = thresholds
        .iter()
        .zip(exceeded)
        .map(|(&m, k)| {
            let fraction = k as f64 / done.max(1) as f64;
            KerckhoffRow { threshold: m, fraction, constant: m * fraction }
        })
        .collect();
    Ok(KerckhoffReport { edge: t.name(edge).to_string(), samples: done, horizon_exceeded, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn immediate_flip_has_unit_column() {
        let t = fixtures::torus();
        let c = t.label_by_name("c").unwrap();
        assert_eq!(column_growth_before_flip(&t, &[0.2, 0.3, 0.5], c, 1e9).unwrap(), Some(1.0));
    }

    #[test]
    fn column_growth_on_the_torus() {
        // From (s, 1/2 - s, 1/2) with s small, a stays narrow while b and c alternate;
        // column a gains the flipped column each time a is a side of the quad.
        let t = fixtures::torus();
        let a = t.label_by_name("a").unwrap();
        let small = column_growth_before_flip(&t, &[0.01, 0.49, 0.5], a, 1e9).unwrap().unwrap();
        let large = column_growth_before_flip(&t, &[0.2, 0.3, 0.5], a, 1e9).unwrap().unwrap();
        assert!(small > large);
        assert!(large >= 1.0);
    }

    #[test]
    fn estimate_decays_like_inverse_threshold() {
        let t = fixtures::torus();
        let a = t.label_by_name("a").unwrap();
        let report = kerckhoff_estimate(&t, a, &[10.0, 30.0, 100.0], 20_000, 3).unwrap();
        let f: Vec<f64> = report.rows.iter().map(|r| r.fraction).collect();
        assert!(f[0] >= f[1] && f[1] >= f[2]);
        assert!(report.spread() <= 2.0, "{report:?}");
    }
}
