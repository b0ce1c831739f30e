use std::f64::consts::PI;

use quadrature::double_exponential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::flow::{advance, roof_time, BalancedState};
use crate::geometry::{height_cone, omega, SurfaceState};
use crate::triangulation::ColouredTriangulation;

/// Overall factor carried by the integrands in the scaled normalisation.
pub const VOLUME_SCALE: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub i1: f64,
    pub i2: f64,
    pub i1_scaled: f64,
    pub i2_scaled: f64,
    /// `I1 + I2 - pi^2/12`.
    pub closed_form_error: f64,
    /// `2 (I1 + I2)`.
    pub volume: f64,
    pub mc_samples: usize,
    pub mc_estimate: f64,
    pub mc_std_error: f64,
}

fn quad(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let out = double_exponential::integrate(f, 0.0, 0.5, tol);
    if !(out.error_estimate <= tol) || !out.integral.is_finite() {
        return Err(Error::QuadratureNonconvergence(tol));
    }
    Ok(out.integral)
}

/// `int_0^{1/2} -log(1 - x)/x dx` and `int_0^{1/2} -log(1 - x)/(1 - x) dx`.
pub fn torus_integrals(tol: f64) -> Result<(f64, f64)> {
    let i1 = quad(|x| if x == 0.0 { 1.0 } else { -(-x).ln_1p() / x }, tol)?;
    let i2 = quad(|x| -(-x).ln_1p() / (1.0 - x), tol)?;
    Ok((i1, i2))
}

/// The unit-area heights at the two ends of the segment of heights compatible with
/// widths `x`, i.e. the height-cone vertex cycles scaled to `Omega(x, y) = 1`.
pub fn height_segment(t: &ColouredTriangulation, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    height_cone(t)?
        .vertex_cycles()?
        .cycles()
        .into_iter()
        .map(|v| {
            let w = omega(t, x, &v)?;
            if !(w > 0.0) {
                return Err(Error::SingularPoint);
            }
            Ok(v.into_iter().map(|y| y / w).collect())
        })
        .collect()
}

/// Return time and fibre length of the torus suspension over widths `(s, 1 - s, 1)`
/// on the upper boundary of `t`. The fibre length is the spread of the diagonal's
/// height along the segment of unit-area heights.
pub fn torus_cell(t: &ColouredTriangulation, s: f64) -> Result<(f64, f64)> {
    let x = [s, 1.0 - s, 1.0];
    let ends = height_segment(t, &x)?;
    let diagonal = t.label_by_name("c")?.0;
    let length = ends.iter().map(|y| y[diagonal]).fold(f64::NEG_INFINITY, f64::max)
        - ends.iter().map(|y| y[diagonal]).fold(f64::INFINITY, f64::min);
    let y: Vec<f64> = (0..3).map(|i| 0.5 * (ends[0][i] + ends[1][i])).collect();
    let b = BalancedState::new(SurfaceState::from_coordinates(t.clone(), &x, &y)?)?;
    let (next, _) = advance(&b, 0)?;
    Ok((roof_time(&next), length))
}

/// Torus volume by quadrature, plus a Monte Carlo estimate of the suspension volume
/// summed over both colourings and doubled by the symmetry `a <-> b`.
pub fn torus_volume(tol: f64, mc_samples: usize, seed: u64) -> Result<VolumeReport> {
    let (i1, i2) = torus_integrals(tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = [fixtures::torus(), fixtures::torus_blue()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..mc_samples {
        let s: f64 = rng.random_range(0.0..0.5);
        if s == 0.0 {
            continue;
        }
        let mut f = 0.0;
        for t in &cases {
            let (roof, length) = torus_cell(t, s)?;
            f += roof * length;
        }
        sum += f;
        sum_sq += f * f;
    }
    let n = mc_samples.max(1) as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    // Twice the integral over s in (0, 1/2), whose length is 1/2.
    Ok(VolumeReport {
        i1,
        i2,
        i1_scaled: VOLUME_SCALE * i1,
        i2_scaled: VOLUME_SCALE * i2,
        closed_form_error: i1 + i2 - PI * PI / 12.0,
        volume: 2.0 * (i1 + i2),
        mc_samples,
        mc_estimate: mean,
        mc_std_error: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrals_match_the_dilogarithm() {
        let (i1, i2) = torus_integrals(1e-12).unwrap();
        // Li2(1/2) = pi^2/12 - ln^2(2)/2
        let ln2 = 2f64.ln();
        assert!((i1 - (PI * PI / 12.0 - ln2 * ln2 / 2.0)).abs() < 1e-10);
        assert!((i2 - ln2 * ln2 / 2.0).abs() < 1e-10);
        assert!((i1 - 0.582241).abs() < 1e-6 && (i2 - 0.240227).abs() < 1e-6);
    }

    #[test]
    fn red_cell_has_the_stated_segment() {
        let t = fixtures::torus();
        let s = 0.2;
        let mut ends = height_segment(&t, &[s, 1.0 - s, 1.0]).unwrap();
        ends.sort_by(|p, q| p[2].total_cmp(&q[2]));
        let want = [[1.0, 1.0, 0.0], [0.0, 1.0 / s, 1.0 / s]];
        for (got, w) in ends.iter().zip(want) {
            for (g, w) in got.iter().zip(w) {
                assert!((g - w).abs() < 1e-12, "{ends:?}");
            }
        }
        let (roof, length) = torus_cell(&t, s).unwrap();
        assert!((roof + (1.0 - s).ln()).abs() < 1e-12);
        assert!((length - 1.0 / s).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_close() {
        let r = torus_volume(1e-10, 100_000, 1).unwrap();
        assert!(r.closed_form_error.abs() < 1e-8);
        assert!(((r.mc_estimate - PI * PI / 6.0) / (PI * PI / 6.0)).abs() < 0.03, "{r:?}");
    }
}
