use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flips::FlipWord;
use crate::flow::{code_by_theta, make_balanced, run_trajectory, StateSampler, Trajectory};
use crate::triangulation::ColouredTriangulation;

/// Area renormalisation period used by the pooled runs.
pub const RENORM_EVERY: usize = 1000;

/// Fewest samples accepted by [`tail_fit`].
pub const MIN_TAIL_SAMPLES: usize = 10_000;
/// Fraction of the largest samples discarded before fitting.
pub const TAIL_TRIM: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailFit {
    /// Decay rate: minus the fitted slope of `log P(X > t)`.
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
    pub points: usize,
}

/// Least-squares fit of the empirical `log P(X > t)` against `t`, over the order
/// statistics left after dropping the top 1%.
pub fn tail_fit(samples: &[f64]) -> Result<TailFit> {
    let n = samples.len();
    if n < MIN_TAIL_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_TAIL_SAMPLES, got: n });
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let keep = n - (n as f64 * TAIL_TRIM).ceil() as usize;
    let points: Vec<(f64, f64)> = (0..keep).map(|i| (s[i], ((n - i) as f64 / n as f64).ln())).collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InsufficientSamples { needed: MIN_TAIL_SAMPLES, got: 0 });
    }
    let slope = sxy / sxx;
    Ok(TailFit {
        rate: -slope,
        intercept: my - slope * mx,
        r_squared: sxy * sxy / (sxx * syy),
        samples: n,
        points: points.len(),
    })
}

/// One trajectory of `returns` returns from a state sampled with `seed`.
pub fn seeded_trajectory(t: &ColouredTriangulation, returns: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = StateSampler::new(t, &mut rng)?;
    let (start, _) = make_balanced(sampler.sample(&mut rng)?)?;
    let mut traj = run_trajectory(&start, returns, Some(RENORM_EVERY));
    traj.seed = Some(seed);
    match traj.abort.take() {
        Some((_, e)) => Err(e),
        None => Ok(traj),
    }
}

/// Roofs, or with `theta` the durations of the symbols of the coding by `theta`, from
/// `runs` independent trajectories seeded `seed, seed + 1, ...`. Runs are spread over
/// `threads` workers and concatenated in run order.
pub fn pooled_durations(
    t: &ColouredTriangulation,
    theta: Option<&FlipWord>,
    runs: usize,
    returns: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<f64>> {
    let one = |i: usize| -> Result<Vec<f64>> {
        let traj = seeded_trajectory(t, returns, seed.wrapping_add(i as u64))?;
        match theta {
            None => Ok(traj.roofs()),
            Some(theta) => match code_by_theta(&traj, theta) {
                Ok(rec) => Ok(rec.durations),
                Err(Error::ThetaNeverSeen) => Ok(Vec::new()),
                Err(e) => Err(e),
            },
        }
    };
    let threads = threads.clamp(1, runs.max(1));
    let results: Vec<Result<Vec<f64>>> = thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|w| {
                let one = &one;
                scope.spawn(move || (w..runs).step_by(threads).map(|i| (i, one(i))).collect::<Vec<_>>())
            })
            .collect();
        let mut all: Vec<(usize, Result<Vec<f64>>)> =
            workers.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect();
        all.sort_by_key(|(i, _)| *i);
        all.into_iter().map(|(_, r)| r).collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
