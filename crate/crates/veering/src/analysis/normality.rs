use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flips::{widest, width_flip, FlipWord};
use crate::flow::{theta_occurrences, SliceSampler, Trajectory, BALANCE_TOL};
use crate::geometry::{height_cone, omega, width_cone, SurfaceState};
use crate::triangulation::ColouredTriangulation;

#[derive(Clone, Debug, Serialize)]
pub struct NormalityReport {
    pub word: String,
    /// Returns whose triangulation, before the flips, is isomorphic to the word's start.
    pub visits: usize,
    pub occurrences: usize,
    /// `occurrences / visits`.
    pub trajectory_frequency: f64,
    pub lebesgue_samples: usize,
    /// Weighted fraction of widths, uniform on the start cone's slice, whose expansion
    /// begins with the word; see [`transversal_weight`].
    pub lebesgue_frequency: f64,
}

impl NormalityReport {
    /// Larger frequency over smaller; infinite when exactly one vanishes.
    pub fn ratio(&self) -> f64 {
        let (a, b) = (self.trajectory_frequency, self.lebesgue_frequency);
        if a == 0.0 && b == 0.0 {
            1.0
        } else {
            a.max(b) / a.min(b)
        }
    }
}

/// True when the width expansion of `x` from the word's start begins with the word.
pub fn expansion_begins_with(word: &FlipWord, x: &[f64]) -> Result<bool> {
    let mut t = word.start.clone();
    let mut x = x.to_vec();
    for m in &word.moves {
        let e = widest(&x);
        let (u, mv) = width_flip(&t, &mut x, e)?;
        if mv != *m {
            return Ok(false);
        }
        t = u;
    }
    Ok(true)
}

/// Density of the first-return measure at widths `x` of the slice, relative to
/// Lebesgue measure there. With `u = x / max(x)` the upper-boundary point, it is the
/// volume of the unit-area height fibre, `prod 1 / Omega(u, c)` over the height-cone
/// vertex cycles `c`, times `|u|^D` from moving between the slice and the face. Zero
/// when `u` is not balanced.
pub fn transversal_weight(t: &ColouredTriangulation, x: &[f64]) -> Result<f64> {
    let top = x.iter().copied().fold(0.0, f64::max);
    let u: Vec<f64> = x.iter().map(|w| w / top).collect();
    let cone = height_cone(t)?;
    let cycles = cone.vertex_cycles()?.cycles();
    if cycles.len() != cone.dim {
        return Err(Error::Geometry("height cone is not simplicial".into()));
    }
    let mut fibre = 1.0;
    let mut y = vec![0.0; u.len()];
    for c in &cycles {
        let w = omega(t, &u, c)?;
        if !(w > 0.0) {
            return Ok(0.0);
        }
        fibre /= w;
        y.iter_mut().zip(c).for_each(|(a, b)| *a += b / w / cycles.len() as f64);
    }
    let s = SurfaceState::from_coordinates(t.clone(), &u, &y)?;
    if !s.check_balance(BALANCE_TOL).is_balanced() {
        return Ok(0.0);
    }
    let norm: f64 = u.iter().sum();
    Ok(fibre * norm.powi(width_cone(t)?.dim as i32))
}

/// Compares the frequency of `word` among the returns of a trajectory that sit on its
/// start with the first-return measure of the widths whose expansion starts with it.
/// An inapplicable word gets both frequencies zero.
pub fn normality_check(traj: &Trajectory, word: &FlipWord, samples: usize, seed: u64) -> Result<NormalityReport> {
    let name = word.render();
    if word.is_empty() || word.end().is_err() {
        return Ok(NormalityReport {
            word: name,
            visits: 0,
            occurrences: 0,
            trajectory_frequency: 0.0,
            lebesgue_samples: 0,
            lebesgue_frequency: 0.0,
        });
    }
    let flips = traj.word();
    let ts = flips.triangulations()?;
    let key = word.start.canonical_form();
    let mut returns = Vec::with_capacity(traj.events.len());
    let mut pos = 0;
    for ev in &traj.events {
        if !ev.moves.is_empty() {
            returns.push(pos);
        }
        pos += ev.moves.len();
    }
    let visits = returns.iter().filter(|&&i| ts[i].canonical_form() == key).count();
    let occurrences = theta_occurrences(&flips, word)?
        .into_iter()
        .filter(|i| returns.binary_search(i).is_ok())
        .count();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = SliceSampler::new(&width_cone(&word.start)?)?;
    sampler.mix(&mut rng, 50 * sampler.dimension().max(1));
    let (mut hits, mut total, mut drawn) = (0.0, 0.0, 0usize);
    while drawn < samples {
        let x = sampler.sample(&mut rng);
        match expansion_begins_with(word, &x) {
            Ok(hit) => {
                drawn += 1;
                let w = transversal_weight(&word.start, &x)?;
                total += w;
                if hit {
                    hits += w;
                }
            }
            Err(Error::DegenerateWidth(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(NormalityReport {
        word: name,
        visits,
        occurrences,
        trajectory_frequency: if visits == 0 { 0.0 } else { occurrences as f64 / visits as f64 },
        lebesgue_samples: drawn,
        lebesgue_frequency: if total > 0.0 { hits / total } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flips::FlipMove;
    use crate::flow::{make_balanced, run_trajectory, StateSampler};
    use crate::triangulation::{Colour, Label};

    #[test]
    fn torus_weight_is_the_fibre_length() {
        // At (s, 1/2 - s, 1/2) the boundary point is (2s, 1 - 2s, 1); the heights run
        // from (1, 1, 0) to (0, 1, 1)/(2s), so the weight is proportional to 1/s.
        let t = fixtures::torus();
        let w1 = transversal_weight(&t, &[0.1, 0.4, 0.5]).unwrap();
        let w2 = transversal_weight(&t, &[0.2, 0.3, 0.5]).unwrap();
        assert!((w1 / w2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_frequency_of_a_single_flip() {
        // From the torus slice (s, 1/2 - s, 1/2), c flips red exactly when b > a, that
        // is s < 1/4; weighted by 1/s this has most of the mass.
        let t = fixtures::torus();
        let c = t.label_by_name("c").unwrap();
        let w = FlipWord::new(t.clone(), vec![FlipMove::forward(c, Colour::Red)]);
        assert!(expansion_begins_with(&w, &[0.1, 0.4, 0.5]).unwrap());
        assert!(!expansion_begins_with(&w, &[0.4, 0.1, 0.5]).unwrap());
        let traj = {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut s = StateSampler::new(&t, &mut rng).unwrap();
            run_trajectory(&make_balanced(s.sample(&mut rng).unwrap()).unwrap().0, 2000, None)
        };
        let r = normality_check(&traj, &w, 4000, 2).unwrap();
        assert!(r.lebesgue_frequency > 0.8, "{r:?}");
        assert!(r.ratio() < 2.0, "{r:?}");
    }

    #[test]
    fn inapplicable_word_scores_zero() {
        let t = fixtures::torus();
        let w = FlipWord::new(t.clone(), vec![FlipMove::forward(Label(0), Colour::Red)]);
        let traj = {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut s = StateSampler::new(&t, &mut rng).unwrap();
            run_trajectory(&make_balanced(s.sample(&mut rng).unwrap()).unwrap().0, 10, None)
        };
        let r = normality_check(&traj, &w, 10, 2).unwrap();
        assert_eq!((r.trajectory_frequency, r.lebesgue_frequency), (0.0, 0.0));
    }
}
