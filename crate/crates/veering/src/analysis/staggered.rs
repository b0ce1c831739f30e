use serde::Serialize;

use crate::error::Result;
use crate::flips::{widest, width_flip};
use crate::triangulation::ColouredTriangulation;

#[derive(Clone, Debug, Serialize)]
pub struct StaggeredReport {
    pub flips: usize,
    /// Every flip strictly shrank the flipped width and left the others unchanged.
    pub monotone: bool,
    pub all_veering: bool,
    /// Natural log of the largest width at the end.
    pub log_max_width: f64,
}

impl StaggeredReport {
    pub fn max_width(&self) -> f64 {
        self.log_max_width.exp()
    }
}

/// Flips the widest edge `flips` times starting from widths `x`. Widths are held as a
/// log scale times a vector with largest entry one, so long runs neither underflow nor
/// need renormalising in a way that would hide monotonicity.
pub fn widest_flip_run(t: &ColouredTriangulation, x: &[f64], flips: usize) -> Result<StaggeredReport> {
    let mut t = t.clone();
    let top = x.iter().copied().fold(0.0, f64::max);
    let mut log_scale = top.ln();
    let mut v: Vec<f64> = x.iter().map(|w| w / top).collect();
    let mut monotone = true;
    let mut all_veering = true;
    for _ in 0..flips {
        let e = widest(&v);
        let before = v[e.0];
        let (u, _) = width_flip(&t, &mut v, e)?;
        monotone &= v[e.0] < before;
        all_veering &= u.is_veering();
        t = u;
        let m = v.iter().copied().fold(0.0, f64::max);
        v.iter_mut().for_each(|w| *w /= m);
        log_scale += m.ln();
    }
    Ok(StaggeredReport { flips, monotone, all_veering, log_max_width: log_scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn golden_torus_shrinks_by_the_golden_ratio() {
        // Widths (1/phi^2, 1/phi, 1) stay a geometric sequence: each flip divides the
        // largest width by phi.
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let t = fixtures::torus();
        let x = [1.0 / phi / phi, 1.0 / phi, 1.0];
        let r = widest_flip_run(&t, &x, 12).unwrap();
        assert!(r.monotone && r.all_veering);
        assert!((r.log_max_width + 12.0 * phi.ln()).abs() < 1e-8, "{}", r.log_max_width);
    }
}
