use serde::Serialize;

use super::jacobian::richardson;
use crate::error::{Error, Result};
use crate::flips::FlipWord;
use crate::flow::{orthonormalise, Trajectory};
use crate::geometry::{null_space, width_cone};
use crate::triangulation::{ColouredTriangulation, Label};

/// `(6g - 6 + 3|Z|) / 3`, the constant of the upper-boundary norm bounds.
pub fn norm_constant(t: &ColouredTriangulation) -> f64 {
    t.num_labels() as f64 / 3.0
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
    pub min_sum: f64,
    pub max_sum: f64,
    /// Returns whose width sum is not strictly between the bounds.
    pub violations: usize,
}

impl NormBounds {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `3 < |x| < 6g - 6 + 3|Z|` for the widths at every return.
pub fn upper_boundary_norms(traj: &Trajectory) -> NormBounds {
    let lower = 3.0;
    let upper = traj.start.triangulation().num_labels() as f64;
    let sums: Vec<f64> = traj.events.iter().map(|e| e.width_sum).collect();
    NormBounds {
        lower,
        upper,
        min_sum: sums.iter().copied().fold(f64::INFINITY, f64::min),
        max_sum: sums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        violations: sums.iter().filter(|&&s| !(s > lower && s < upper)).count(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoofCheck {
    pub horizon: usize,
    /// Largest `|sum of roofs - log |A rho(x_end)||` over the horizons.
    pub max_gap: f64,
    /// `log((6g - 6 + 3|Z|) / 3)`.
    pub bound: f64,
    /// Largest relative error of `x_start = e^{-T} A x_end` over the horizons.
    pub max_conjugacy_error: f64,
}

/// Compares flow time with the growth of the matrix of the flips made, for every
/// horizon up to `horizon` returns from the first return of `traj`.
pub fn roof_against_matrix(traj: &Trajectory, horizon: usize) -> Result<RoofCheck> {
    let events = &traj.events;
    let horizon = horizon.min(events.len().saturating_sub(1));
    let x0 = &events[0].boundary_widths;
    let mut word = FlipWord::empty(traj.start.triangulation().clone());
    let mut time = 0.0;
    let (mut max_gap, mut max_err) = (0.0f64, 0.0f64);
    for k in 1..=horizon {
        word = word.concat(&FlipWord::new(word.start.clone(), events[k - 1].moves.clone()));
        time += events[k].roof;
        let a = word.matrix()?.apply(&events[k].boundary_widths);
        let end_sum = events[k].width_sum;
        let image: f64 = a.iter().sum::<f64>() / end_sum;
        max_gap = max_gap.max((time - image.ln()).abs());
        let scale = (-time).exp();
        let err = a.iter().zip(x0).map(|(ai, xi)| (scale * ai - xi).abs()).fold(0.0, f64::max)
            / x0.iter().copied().fold(0.0, f64::max);
        max_err = max_err.max(err);
    }
    Ok(RoofCheck {
        horizon,
        max_gap,
        bound: norm_constant(traj.start.triangulation()).ln(),
        max_conjugacy_error: max_err,
    })
}

/// Numeric Jacobian of `x -> x/|x|` from the face `{x_e = 1}` of the width cone to the
/// slice `{|x| = 1}`, both with Lebesgue measure. Equals a constant of the face times
/// `|x|^-D`.
pub fn rho_jacobian(t: &ColouredTriangulation, e: Label, x: &[f64]) -> Result<f64> {
    let cone = width_cone(t)?;
    if !cone.contains(x, 1e-10) || (x[e.0] - 1.0).abs() > 1e-12 {
        return Err(Error::BoundaryPoint);
    }
    let n = cone.ambient;
    let mut rows = cone.equalities.clone();
    let mut pin = vec![0i64; n];
    pin[e.0] = 1;
    rows.push(pin);
    let dirs = orthonormalise(
        null_space(&rows, n)
            .into_iter()
            .map(|v| v.iter().map(|c| num_traits::ToPrimitive::to_f64(c).unwrap_or(0.0)).collect())
            .collect(),
    );
    let f = |v: &[f64]| -> Result<Vec<f64>> {
        let s: f64 = v.iter().sum();
        Ok(v.iter().map(|w| w / s).collect())
    };
    richardson(&f, x, &dirs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flow::{make_balanced, run_trajectory, SliceSampler, StateSampler};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trajectory(t: &ColouredTriangulation, seed: u64, n: usize) -> Trajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = StateSampler::new(t, &mut rng).unwrap();
        run_trajectory(&make_balanced(s.sample(&mut rng).unwrap()).unwrap().0, n, None)
    }

    #[test]
    fn pillowcase_norms_are_inside_the_bounds() {
        let traj = trajectory(&fixtures::pillowcase(), 1, 2000);
        let b = upper_boundary_norms(&traj);
        assert!(b.holds(), "{b:?}");
    }

    #[test]
    fn torus_norms_sit_at_two() {
        // Widths (s, 1 - s, 1) on the upper boundary: the lower bound 3 cannot hold.
        let traj = trajectory(&fixtures::torus(), 2, 500);
        let b = upper_boundary_norms(&traj);
        assert!((b.min_sum - 2.0).abs() < 1e-9 && (b.max_sum - 2.0).abs() < 1e-9);
        assert!(!b.holds());
    }

    #[test]
    fn roofs_track_the_matrix_norm() {
        for (t, seed) in [(fixtures::torus(), 3), (fixtures::pillowcase(), 4)] {
            let traj = trajectory(&t, seed, 201);
            let r = roof_against_matrix(&traj, 200).unwrap();
            assert!(r.max_gap <= r.bound + 1e-9, "{r:?}");
            assert!(r.max_conjugacy_error < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn rho_jacobian_scales_with_the_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in [fixtures::torus(), fixtures::pillowcase()] {
            let cone = width_cone(&t).unwrap();
            let dim = cone.dim as i32;
            let mut sampler = SliceSampler::new(&cone).unwrap();
            let e = t.flippable_edges(crate::triangulation::Direction::Forward)[0];
            let mut first = None;
            for _ in 0..50 {
                let mut x = sampler.sample(&mut rng);
                let s = x[e.0];
                x.iter_mut().for_each(|w| *w /= s);
                let c = rho_jacobian(&t, e, &x).unwrap() * x.iter().sum::<f64>().powi(dim);
                let want = *first.get_or_insert(c);
                assert!(((c - want) / want).abs() < 1e-5, "{c} vs {want}");
            }
        }
    }
}
