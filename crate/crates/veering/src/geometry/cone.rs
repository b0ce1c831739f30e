//! Width and height cones, exact rank and kernel computations, and vertex cycles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::roles_of;
use crate::error::{Error, Result};
use crate::triangulation::ColouredTriangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    Widths,
    Heights,
}

/// Nonnegative solutions of one linear equality per triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub kind: ConeKind,
    pub ambient: usize,
    pub equalities: Vec<Vec<i64>>,
    pub dim: usize,
}

fn cone(t: &ColouredTriangulation, kind: ConeKind) -> Result<Cone> {
    let n = t.num_labels();
    let mut equalities = Vec::with_capacity(t.num_triangles());
    for tri in 0..t.num_triangles() {
        let r = roles_of(t, tri)?;
        let l = |i: usize| t.triangles()[tri][i].label.0;
        let mut row = vec![0i64; n];
        let (plus, minus) = match kind {
            // x_wide = x_tall + x_small
            ConeKind::Widths => (r.wide, [r.tall, r.small]),
            // y_tall = y_wide + y_small
            ConeKind::Heights => (r.tall, [r.wide, r.small]),
        };
        row[l(plus)] += 1;
        for m in minus {
            row[l(m)] -= 1;
        }
        equalities.push(row);
    }
    let dim = n - rank(&equalities);
    Ok(Cone { kind, ambient: n, equalities, dim })
}

pub fn width_cone(t: &ColouredTriangulation) -> Result<Cone> {
    cone(t, ConeKind::Widths)
}

pub fn height_cone(t: &ColouredTriangulation) -> Result<Cone> {
    cone(t, ConeKind::Heights)
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
fn rref(rows: &[Vec<i64>], n: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..n {
                    let delta = &f * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    rref(rows, n).1.len()
}

/// Integer basis of `{x : rows·x = 0}` in `n` variables, one primitive vector per free column.
pub fn null_space(rows: &[Vec<i64>], n: usize) -> Vec<Vec<BigInt>> {
    let (m, pivots) = rref(rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            let ints: Vec<BigInt> = v.iter().map(|q| (q * &lcm).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            ints.into_iter().map(|x| x / &g).collect()
        })
        .collect()
}

fn gcd_normalise(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |acc, &x| acc.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn zero_set(v: &[i128]) -> Vec<bool> {
    v.iter().map(|&x| x == 0).collect()
}

/// Extreme rays of `{x >= 0 : E x = 0}` by the double description method, starting from
/// the coordinate rays and cutting by one equality at a time.
fn extreme_rays(equalities: &[Vec<i64>], n: usize) -> Vec<Vec<i128>> {
    let mut rays: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    for h in equalities {
        let value = |r: &[i128]| r.iter().zip(h).map(|(&a, &b)| a * i128::from(b)).sum::<i128>();
        let values: Vec<i128> = rays.iter().map(|r| value(r)).collect();
        let zeros: Vec<Vec<bool>> = rays.iter().map(|r| zero_set(r)).collect();
        let mut next: Vec<Vec<i128>> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if values[i] == 0 {
                next.push(r.clone());
            }
        }
        for p in 0..rays.len() {
            if values[p] <= 0 {
                continue;
            }
            for q in 0..rays.len() {
                if values[q] >= 0 {
                    continue;
                }
                let common: Vec<bool> = (0..n).map(|k| zeros[p][k] && zeros[q][k]).collect();
                let blocked = (0..rays.len()).any(|r| {
                    r != p && r != q && (0..n).all(|k| !common[k] || zeros[r][k])
                });
                if blocked {
                    continue;
                }
                let mut v: Vec<i128> = (0..n)
                    .map(|k| values[p] * rays[q][k] - values[q] * rays[p][k])
                    .collect();
                gcd_normalise(&mut v);
                next.push(v);
            }
        }
        next.sort();
        next.dedup();
        rays = next;
    }
    rays
}

impl Cone {
    pub fn vertex_cycles(&self) -> Result<VertexCycleSet> {
        let rays = extreme_rays(&self.equalities, self.ambient);
        if rays.is_empty() {
            return Err(Error::EmptyCone);
        }
        Ok(VertexCycleSet { rays })
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        v.iter().all(|&x| x >= -tol * scale)
            && self.equalities.iter().all(|row| {
                let s: f64 = row.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum();
                s.abs() <= tol * scale
            })
    }
}

/// Extreme points of a cone cut by `sum = 1`, stored as primitive integer rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCycleSet {
    pub rays: Vec<Vec<i128>>,
}

impl VertexCycleSet {
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Each ray exactly normalised to coordinate sum one.
    pub fn exact(&self) -> Vec<Vec<BigRational>> {
        self.rays
            .iter()
            .map(|r| {
                let s: i128 = r.iter().sum();
                r.iter()
                    .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(s)))
                    .collect()
            })
            .collect()
    }

    pub fn cycles(&self) -> Vec<Vec<f64>> {
        self.rays
            .iter()
            .map(|r| {
                let s: i128 = r.iter().sum();
                r.iter().map(|&x| x as f64 / s as f64).collect()
            })
            .collect()
    }

    /// Smallest positive coefficient over all cycles.
    pub fn min_coefficient(&self) -> f64 {
        self.cycles()
            .iter()
            .flatten()
            .copied()
            .filter(|&x| x > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every coordinate is positive in some cycle.
    pub fn covers_all(&self) -> bool {
        let n = self.rays.first().map_or(0, Vec::len);
        (0..n).all(|k| self.rays.iter().any(|r| r[k] > 0))
    }

    /// Barycentre of the cycles; strictly positive exactly when the cycles cover all labels.
    pub fn barycentre(&self) -> Vec<f64> {
        let cycles = self.cycles();
        let n = cycles[0].len();
        let k = cycles.len() as f64;
        (0..n).map(|i| cycles.iter().map(|c| c[i]).sum::<f64>() / k).collect()
    }
}

/// True when the edge vectors admit a global orientation compatible with the side
/// signs of every triangle, each triangle being free to negate all its sides. This holds
/// exactly when the quadratic differential is the square of an abelian one.
pub fn is_abelian(t: &ColouredTriangulation) -> Result<bool> {
    let mut side_sign = Vec::with_capacity(t.num_triangles());
    for tri in 0..t.num_triangles() {
        let r = roles_of(t, tri)?;
        side_sign.push([0, 1, 2].map(|i| if i == r.wide { 1i8 } else { -1 }));
    }
    let flag = |tri: usize, side: usize| if t.triangles()[tri][side].forward { 1i8 } else { -1 };
    // Triangle chart signs, propagated across edges: the label orientation seen from
    // a slot is chart * role sign * flag, and both slots of a label must agree.
    let mut chart: Vec<Option<i8>> = vec![None; t.num_triangles()];
    chart[0] = Some(1);
    let mut stack = vec![0];
    while let Some(tri) = stack.pop() {
        let ct = chart[tri].expect("assigned before push");
        for side in 0..3 {
            let here = ct * side_sign[tri][side] * flag(tri, side);
            let tw = t.twin(crate::triangulation::SlotRef::new(tri, side));
            let want = here * side_sign[tw.triangle][tw.side] * flag(tw.triangle, tw.side);
            match chart[tw.triangle] {
                None => {
                    chart[tw.triangle] = Some(want);
                    stack.push(tw.triangle);
                }
                Some(c) if c != want => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// Complex dimension of the stratum containing `t`: `2g + |Z| - 1` for squares of
/// abelian differentials, `2g - 2 + |Z|` otherwise.
pub fn expected_dimension(t: &ColouredTriangulation) -> Result<usize> {
    let g = t.genus();
    let z = t.marked();
    Ok(if is_abelian(t)? { 2 * g + z - 1 } else { 2 * g + z - 2 })
}

/// Both cones have dimension `expected` and contain a strictly positive point.
pub fn is_core(t: &ColouredTriangulation, expected: usize) -> Result<bool> {
    for c in [width_cone(t)?, height_cone(t)?] {
        if c.dim != expected {
            return Ok(false);
        }
        match c.vertex_cycles() {
            Ok(v) if v.covers_all() => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
