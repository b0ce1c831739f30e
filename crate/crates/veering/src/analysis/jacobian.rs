use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::flips::{FlipMatrix, FlipWord};
use crate::flow::slice_basis;
use crate::geometry::width_cone;

/// Central-difference step for the numeric Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Disagreement between steps `h` and `h/2` above which Richardson extrapolation is used.
pub const RICHARDSON_SWITCH: f64 = 1e-4;

/// `Au / |Au|` with `|.|` the coordinate sum.
pub fn projective_action(a: &[Vec<f64>], u: &[f64]) -> Result<Vec<f64>> {
    let v: Vec<f64> = a.iter().map(|row| row.iter().zip(u).map(|(x, y)| x * y).sum()).collect();
    let s: f64 = v.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::SingularPoint);
    }
    Ok(v.into_iter().map(|x| x / s).collect())
}

fn norm_of_image(a: &[Vec<f64>], u: &[f64]) -> f64 {
    a.iter().map(|row| row.iter().zip(u).map(|(x, y)| x * y).sum::<f64>()).sum()
}

fn interior_of_simplex(u: &[f64], margin: f64) -> Result<()> {
    let s: f64 = u.iter().sum();
    if (s - 1.0).abs() > 1e-12 * u.len() as f64 || u.iter().any(|&x| !(x > margin)) {
        return Err(Error::BoundaryPoint);
    }
    Ok(())
}

/// Jacobian of `u -> Au/|Au|` on the standard simplex: `det(A) / |Au|^n`.
pub fn jacobian_full(a: &FlipMatrix, u: &[f64]) -> Result<f64> {
    interior_of_simplex(u, 0.0)?;
    let det = a.determinant().to_f64().ok_or(Error::SingularPoint)?;
    let norm = norm_of_image(&a.to_f64(), u);
    if det == 0.0 || !(norm > 0.0) {
        return Err(Error::SingularPoint);
    }
    Ok(det.abs() / norm.powi(u.len() as i32))
}

/// Determinant of the finite-difference derivative of `f` at `u` along `dirs`, measured
/// as the volume factor `sqrt(det(G^T G))`.
fn volume_factor(f: &dyn Fn(&[f64]) -> Result<Vec<f64>>, u: &[f64], dirs: &[Vec<f64>], h: f64) -> Result<f64> {
    let n = f(u)?.len();
    let mut g = DMatrix::<f64>::zeros(n, dirs.len());
    for (j, d) in dirs.iter().enumerate() {
        let plus: Vec<f64> = u.iter().zip(d).map(|(x, y)| x + h * y).collect();
        let minus: Vec<f64> = u.iter().zip(d).map(|(x, y)| x - h * y).collect();
        let (fp, fm) = (f(&plus)?, f(&minus)?);
        for i in 0..n {
            g[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok((g.transpose() * g).determinant().max(0.0).sqrt())
}

pub(crate) fn richardson(f: &dyn Fn(&[f64]) -> Result<Vec<f64>>, u: &[f64], dirs: &[Vec<f64>]) -> Result<f64> {
    let h = JACOBIAN_STEP;
    let coarse = volume_factor(f, u, dirs, h)?;
    let fine = volume_factor(f, u, dirs, h / 2.0)?;
    if ((fine - coarse) / fine).abs() <= RICHARDSON_SWITCH {
        return Ok(fine);
    }
    // Extrapolate the derivative itself, then take its volume factor.
    let n = f(u)?.len();
    let mut g = DMatrix::<f64>::zeros(n, dirs.len());
    for (j, d) in dirs.iter().enumerate() {
        let diff = |h: f64| -> Result<Vec<f64>> {
            let p: Vec<f64> = u.iter().zip(d).map(|(x, y)| x + h * y).collect();
            let m: Vec<f64> = u.iter().zip(d).map(|(x, y)| x - h * y).collect();
            let (fp, fm) = (f(&p)?, f(&m)?);
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let (d1, d2) = (diff(h)?, diff(h / 2.0)?);
        for i in 0..n {
            g[(i, j)] = (4.0 * d2[i] - d1[i]) / 3.0;
        }
    }
    Ok((g.transpose() * g).determinant().max(0.0).sqrt())
}

/// Numeric counterpart of [`jacobian_full`]: central differences in the chart given by
/// the first `n - 1` coordinates.
pub fn jacobian_full_numeric(a: &FlipMatrix, u: &[f64]) -> Result<f64> {
    let n = u.len();
    interior_of_simplex(u, 4.0 * JACOBIAN_STEP)?;
    let af = a.to_f64();
    // Chart directions e_j - e_n keep the coordinate sum fixed; projecting the image to
    // its first n - 1 coordinates makes the volume factor the chart determinant.
    let dirs: Vec<Vec<f64>> = (0..n - 1)
        .map(|j| {
            let mut d = vec![0.0; n];
            d[j] = 1.0;
            d[n - 1] = -1.0;
            d
        })
        .collect();
    let f = |v: &[f64]| -> Result<Vec<f64>> {
        let mut w = projective_action(&af, v)?;
        w.truncate(n - 1);
        Ok(w)
    };
    richardson(&f, u, &dirs)
}

/// Numeric Jacobian of `u -> Au/|Au|` restricted to the slice of the end width cone
/// of `w`, with Lebesgue measure on both slices.
pub fn jacobian_restricted(w: &FlipWord, u: &[f64]) -> Result<f64> {
    let cone = width_cone(&w.end()?)?;
    if !cone.contains(u, 1e-10) {
        return Err(Error::BoundaryPoint);
    }
    interior_of_simplex(u, 4.0 * JACOBIAN_STEP)?;
    let af = w.matrix()?.to_f64();
    let dirs = slice_basis(&cone);
    let f = |v: &[f64]| projective_action(&af, v);
    richardson(&f, u, &dirs)
}

/// `J(u) / J(u2)` for the restricted Jacobian; equals `(|Au2| / |Au|)^D`.
pub fn jacobian_restricted_ratio(w: &FlipWord, u: &[f64], u2: &[f64]) -> Result<f64> {
    Ok(jacobian_restricted(w, u)? / jacobian_restricted(w, u2)?)
}

/// Positive integer compositions of `total` into `parts` parts.
fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, acc: &mut Vec<usize>) {
    if parts == 1 {
        acc.push(total);
        out.push(acc.clone());
        acc.pop();
        return;
    }
    for first in 1..=total - (parts - 1) {
        acc.push(first);
        compositions(total - first, parts - 1, out, acc);
        acc.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// At least `min_points` strictly positive convex combinations of `cycles` on a
/// regular grid.
pub fn grid_points(cycles: &[Vec<f64>], min_points: usize) -> Vec<Vec<f64>> {
    let k = cycles.len();
    if k == 1 {
        return vec![cycles[0].clone()];
    }
    let mut total = k;
    while binomial(total - 1, k - 1) < min_points as f64 {
        total += 1;
    }
    let mut weights = Vec::new();
    compositions(total, k, &mut weights, &mut Vec::new());
    let n = cycles[0].len();
    weights
        .into_iter()
        .map(|w| {
            let mut p = vec![0.0; n];
            for (c, &wi) in cycles.iter().zip(&w) {
                let t = wi as f64 / total as f64;
                p.iter_mut().zip(c).for_each(|(x, y)| *x += t * y);
            }
            p
        })
        .collect()
}

/// Distortion of `w`: `(max |Au| / min |Au|)^D` over the slice of its end width cone.
/// `|Au|` is affine on the slice, so the vertex cycles attain both extremes; a grid of
/// interior points is scanned as well.
pub fn distortion(w: &FlipWord) -> Result<f64> {
    let cone = width_cone(&w.end()?)?;
    let cycles = cone.vertex_cycles()?.cycles();
    let af = w.matrix()?.to_f64();
    let mut points = grid_points(&cycles, 1000);
    points.extend(cycles);
    let (lo, hi) = points.iter().map(|u| norm_of_image(&af, u)).fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo > 0.0) {
        return Err(Error::SingularPoint);
    }
    Ok((hi / lo).powi(cone.dim as i32))
}

/// Bound `(m / B)^D` on the distortion of any word ending with the loop `theta`, where
/// `m` is the largest column sum of its matrix and `B` the smallest barycentric
/// coefficient of the images of the vertex cycles. `None` when the start cone is not
/// simplicial or an image touches its boundary.
pub fn theta_distortion_bound(theta: &FlipWord) -> Result<Option<f64>> {
    let start = width_cone(&theta.start)?;
    let end = width_cone(&theta.end()?)?;
    let basis = start.vertex_cycles()?.cycles();
    if basis.len() != start.dim {
        return Ok(None);
    }
    let a = theta.matrix()?;
    let m = a.column_norms().iter().filter_map(|c| c.to_f64()).fold(0.0, f64::max);
    let af = a.to_f64();
    let n = start.ambient;
    let c = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
    let svd = c.svd(true, true);
    let mut least = f64::INFINITY;
    for v in end.vertex_cycles()?.cycles() {
        let z = DVector::from_vec(projective_action(&af, &v)?);
        let coeffs = svd.solve(&z, 1e-12).map_err(|_| Error::SingularPoint)?;
        least = least.min(coeffs.min());
    }
    if !(least > 0.0) {
        return Ok(None);
    }
    Ok(Some((m / least).powi(start.dim as i32)))
}
