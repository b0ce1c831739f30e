use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{height_cone, null_space, width_cone, Cone, SurfaceState};
use crate::triangulation::ColouredTriangulation;

/// Hit-and-run sampler for the uniform measure on a cone cut by `sum = 1`.
#[derive(Clone, Debug)]
pub struct SliceSampler {
    directions: Vec<Vec<f64>>,
    point: Vec<f64>,
    thin: usize,
}

impl SliceSampler {
    pub fn new(cone: &Cone) -> Result<SliceSampler> {
        let cycles = cone.vertex_cycles()?;
        if !cycles.covers_all() {
            return Err(Error::BoundaryPoint);
        }
        let directions = slice_basis(cone);
        let thin = 3 * directions.len().max(1);
        Ok(SliceSampler { directions, point: cycles.barycentre(), thin })
    }

    /// Dimension of the slice.
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    pub fn current(&self) -> &[f64] {
        &self.point
    }

    /// Runs `steps` hit-and-run moves from the current point.
    pub fn mix<R: Rng + ?Sized>(&mut self, rng: &mut R, steps: usize) {
        if self.directions.is_empty() {
            return;
        }
        let n = self.point.len();
        for _ in 0..steps {
            let mut d = vec![0.0; n];
            for basis in &self.directions {
                let g: f64 = rng.sample(StandardNormal);
                for (di, bi) in d.iter_mut().zip(basis) {
                    *di += g * bi;
                }
            }
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (p, di) in self.point.iter().zip(&d) {
                if *di > 0.0 {
                    lo = lo.max(-p / di);
                } else if *di < 0.0 {
                    hi = hi.min(-p / di);
                }
            }
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                continue;
            }
            let t = rng.random_range(lo..hi);
            for (p, di) in self.point.iter_mut().zip(&d) {
                *p = (*p + t * di).max(0.0);
            }
            let s: f64 = self.point.iter().sum();
            self.point.iter_mut().for_each(|p| *p /= s);
        }
    }

    /// Next thinned sample.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64> {
        self.mix(rng, self.thin);
        self.point.clone()
    }
}

/// Orthonormal basis of the directions along the cone's slice `sum = 1`.
pub fn slice_basis(cone: &Cone) -> Vec<Vec<f64>> {
    let n = cone.ambient;
    let mut rows = cone.equalities.clone();
    rows.push(vec![1; n]);
    let kernel: Vec<Vec<f64>> = null_space(&rows, n)
        .into_iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    orthonormalise(kernel)
}

pub(crate) fn orthonormalise(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        for u in &out {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            v.iter_mut().for_each(|a| *a /= norm);
            out.push(v);
        }
    }
    out
}

/// Random unit-area surfaces on a fixed triangulation: widths and heights uniform on
/// their normalised cones, heights then rescaled to unit area.
#[derive(Clone, Debug)]
pub struct StateSampler {
    tri: ColouredTriangulation,
    widths: SliceSampler,
    heights: SliceSampler,
}

impl StateSampler {
    pub fn new<R: Rng + ?Sized>(tri: &ColouredTriangulation, rng: &mut R) -> Result<StateSampler> {
        let mut widths = SliceSampler::new(&width_cone(tri)?)?;
        let mut heights = SliceSampler::new(&height_cone(tri)?)?;
        widths.mix(rng, 50 * widths.dimension());
        heights.mix(rng, 50 * heights.dimension());
        Ok(StateSampler { tri: tri.clone(), widths, heights })
    }

    pub fn triangulation(&self) -> &ColouredTriangulation {
        &self.tri
    }

    pub fn widths_mut(&mut self) -> &mut SliceSampler {
        &mut self.widths
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<SurfaceState> {
        let x = self.widths.sample(rng);
        let y = self.heights.sample(rng);
        let s = SurfaceState::from_coordinates(self.tri.clone(), &x, &y)?;
        Ok(unit_area(s))
    }
}

/// Rescales heights so that the area is one.
pub fn unit_area(mut s: SurfaceState) -> SurfaceState {
    let a = s.area();
    s.scale_heights(a.recip());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_slice_is_uniform_on_a_segment() {
        // Widths on the torus slice are (s, 1/2 - s, 1/2) with s uniform on (0, 1/2).
        let t = fixtures::torus();
        let mut sampler = SliceSampler::new(&width_cone(&t).unwrap()).unwrap();
        assert_eq!(sampler.dimension(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 20000;
        let mut below = 0;
        for _ in 0..n {
            let x = sampler.sample(&mut rng);
            assert!((x[2] - 0.5).abs() < 1e-12);
            assert!((x[0] + x[1] - 0.5).abs() < 1e-12);
            if x[0] < 0.125 {
                below += 1;
            }
        }
        let frac = below as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.02, "{frac}");
    }

    #[test]
    fn samples_lie_in_the_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in fixtures::all() {
            let cone = width_cone(&t).unwrap();
            let mut sampler = SliceSampler::new(&cone).unwrap();
            for _ in 0..200 {
                let x = sampler.sample(&mut rng);
                assert!(cone.contains(&x, 1e-12));
                assert!(x.iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn sampled_states_are_valid_unit_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in fixtures::all() {
            let mut sampler = StateSampler::new(&t, &mut rng).unwrap();
            for _ in 0..50 {
                let s = sampler.sample(&mut rng).unwrap();
                assert!((s.area() - 1.0).abs() < 1e-12);
                assert!(s.closure_residual() < 1e-12);
            }
        }
    }
}
