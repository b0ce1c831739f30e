//! Edge vectors and the quantities derived from them: widths, heights, triangle roles,
//! the area form, the width and height cones, and the balance conditions.

mod cone;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{Colour, ColouredTriangulation, Direction, Label, SlotRef};

pub use cone::{
    expected_dimension, height_cone, is_abelian, is_core, null_space, rank, width_cone, Cone, ConeKind,
    VertexCycleSet,
};

/// Relative tolerance for algebraic identities on edge vectors.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative size below which a coordinate counts as zero.
pub const AXIS_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub dx: f64,
    pub dy: f64,
}

impl Vec2 {
    pub fn new(dx: f64, dy: f64) -> Vec2 {
        Vec2 { dx, dy }
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.dx * o.dy - self.dy * o.dx
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.dx * s, self.dy * s)
    }

    pub fn norm_inf(self) -> f64 {
        self.dx.abs().max(self.dy.abs())
    }

    /// The representative with positive real part.
    pub fn canonical(self) -> Vec2 {
        if self.dx < 0.0 || (self.dx == 0.0 && self.dy < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn colour(self) -> Colour {
        if self.dx * self.dy > 0.0 {
            Colour::Red
        } else {
            Colour::Blue
        }
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.dx - o.dx, self.dy - o.dy)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.dx, -self.dy)
    }
}

/// Side indices of the wide, tall and small edge of a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub wide: usize,
    pub tall: usize,
    pub small: usize,
}

/// Roles from the anticlockwise colours of a triangle. With two blue sides the wide one
/// is the blue side followed by the other blue; with two red sides it is the red side
/// followed by blue.
pub fn triangle_roles(colours: [Colour; 3]) -> Option<Roles> {
    let blues = colours.iter().filter(|&&c| c == Colour::Blue).count();
    let (majority, wide_successor) = match blues {
        2 => (Colour::Blue, Colour::Blue),
        1 => (Colour::Red, Colour::Blue),
        _ => return None,
    };
    let wide = (0..3).find(|&i| colours[i] == majority && colours[(i + 1) % 3] == wide_successor)?;
    let tall = (0..3).find(|&i| i != wide && colours[i] == majority)?;
    let small = 3 - wide - tall;
    Some(Roles { wide, tall, small })
}

/// Sign of each side vector relative to the label's canonical vector (positive `dx`).
pub fn side_signs(colours: [Colour; 3]) -> Option<[f64; 3]> {
    let r = triangle_roles(colours)?;
    let mut s = [-1.0; 3];
    s[r.wide] = 1.0;
    Some(s)
}

/// Roles of triangle `t`, failing on monochromatic triangles.
pub fn roles_of(t: &ColouredTriangulation, tri: usize) -> Result<Roles> {
    triangle_roles(t.triangle_colours(tri)).ok_or(Error::Monochromatic(tri))
}

/// A triangulation with one vector per label; the geometric model of a surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceState {
    tri: ColouredTriangulation,
    vectors: Vec<Vec2>,
}

impl SurfaceState {
    /// Checks orientation, colours, non-degeneracy and triangle closure (1e-9 relative).
    pub fn new(tri: ColouredTriangulation, vectors: Vec<Vec2>) -> Result<Self> {
        let s = Self::build(tri, vectors)?;
        let residual = s.closure_residual();
        if residual > 1e-9 {
            return Err(Error::Geometry(format!("triangle closure residual {residual:e}")));
        }
        Ok(s)
    }

    /// As [`SurfaceState::new`] without the closure check; used after exact flips.
    pub(crate) fn build(tri: ColouredTriangulation, vectors: Vec<Vec2>) -> Result<Self> {
        if vectors.len() != tri.num_labels() {
            return Err(Error::Geometry(format!(
                "{} vectors for {} labels",
                vectors.len(),
                tri.num_labels()
            )));
        }
        let vectors: Vec<Vec2> = vectors.into_iter().map(Vec2::canonical).collect();
        let scale = vectors.iter().map(|v| v.norm_inf()).fold(0.0, f64::max);
        for (l, v) in vectors.iter().enumerate() {
            if v.dx.abs() <= AXIS_TOL * scale || v.dy.abs() <= AXIS_TOL * scale {
                return Err(Error::AxisAlignedEdge(Label(l)));
            }
            if v.colour() != tri.colour(Label(l)) {
                return Err(Error::Geometry(format!(
                    "edge {} has slope colour {:?} but is coloured {:?}",
                    tri.name(Label(l)),
                    v.colour(),
                    tri.colour(Label(l))
                )));
            }
        }
        if let Some(t) = tri.has_monochromatic_triangle() {
            return Err(Error::Monochromatic(t));
        }
        let s = SurfaceState { tri, vectors };
        for t in 0..s.triangulation().num_triangles() {
            let w = s.triangle_sides(t);
            if w[0].cross(w[1]) <= 0.0 {
                return Err(Error::Geometry(format!("triangle {t} is not anticlockwise")));
            }
        }
        Ok(s)
    }

    /// State with vectors `(x_l, ±y_l)`, the sign given by each label's colour.
    pub fn from_coordinates(tri: ColouredTriangulation, x: &[f64], y: &[f64]) -> Result<Self> {
        let vectors = tri
            .labels()
            .map(|l| Vec2::new(x[l.0], tri.colour(l).sign() * y[l.0]))
            .collect();
        Self::new(tri, vectors)
    }

    pub fn triangulation(&self) -> &ColouredTriangulation {
        &self.tri
    }

    pub fn vectors(&self) -> &[Vec2] {
        &self.vectors
    }

    pub fn vector(&self, l: Label) -> Vec2 {
        self.vectors[l.0]
    }

    pub fn width(&self, l: Label) -> f64 {
        self.vectors[l.0].dx
    }

    pub fn height(&self, l: Label) -> f64 {
        self.vectors[l.0].dy.abs()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| v.dx).collect()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| v.dy.abs()).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.vectors.iter().map(|v| v.dx).fold(0.0, f64::max)
    }

    pub(crate) fn into_parts(self) -> (ColouredTriangulation, Vec<Vec2>) {
        (self.tri, self.vectors)
    }

    /// Side vector of a slot, oriented anticlockwise around its triangle.
    pub fn side_vector(&self, r: SlotRef) -> Vec2 {
        let t = self.triangulation();
        let signs = side_signs(t.triangle_colours(r.triangle)).expect("bichromatic triangles");
        self.vectors[t.slot(r).label.0].scale(signs[r.side])
    }

    pub fn triangle_sides(&self, tri: usize) -> [Vec2; 3] {
        [0, 1, 2].map(|i| self.side_vector(SlotRef::new(tri, i)))
    }

    /// Largest triangle closure defect relative to the largest vector entry.
    pub fn closure_residual(&self) -> f64 {
        let scale = self.vectors.iter().map(|v| v.norm_inf()).fold(0.0, f64::max);
        (0..self.triangulation().num_triangles())
            .map(|t| {
                let w = self.triangle_sides(t);
                (w[0] + w[1] + w[2]).norm_inf()
            })
            .fold(0.0, f64::max)
            / scale
    }

    /// Total area by the shoelace formula.
    pub fn area(&self) -> f64 {
        (0..self.triangulation().num_triangles())
            .map(|t| {
                let w = self.triangle_sides(t);
                0.5 * w[0].cross(w[1])
            })
            .sum()
    }

    /// Applies the diagonal action: widths times `factor`, heights divided by it.
    pub fn stretch(&mut self, factor: f64) {
        for v in &mut self.vectors {
            v.dx *= factor;
            v.dy /= factor;
        }
    }

    /// Multiplies all heights by `factor`.
    pub fn scale_heights(&mut self, factor: f64) {
        for v in &mut self.vectors {
            v.dy *= factor;
        }
    }

    /// The other diagonal of the quadrilateral about `e`, as a canonical vector.
    pub fn other_diagonal(&self, e: Label) -> Result<Vec2> {
        let t = self.triangulation();
        let q = t.quad_about(e)?;
        let [p, m] = t.occurrences(e);
        let we = self.side_vector(p);
        let we_other = self.side_vector(m);
        // Develop the second triangle so that it meets the first along -w_e.
        let sigma = if (we + we_other).norm_inf() <= (we - we_other).norm_inf() { 1.0 } else { -1.0 };
        let w_b = self.side_vector(q.b);
        let w_c = self.side_vector(q.c).scale(sigma);
        Ok((w_b + w_c).canonical())
    }

    /// Conditions for the balanced normal form.
    pub fn check_balance(&self, tol: f64) -> BalanceReport {
        let t = self.triangulation();
        let forward = t
            .flippable_edges(Direction::Forward)
            .into_iter()
            .map(|l| {
                let w = self.width(l);
                EdgeCheck { label: l, width: w, ok: w <= 1.0 + tol }
            })
            .collect();
        let backward = t
            .flippable_edges(Direction::Backward)
            .into_iter()
            .map(|l| {
                let w = self.other_diagonal(l).map(|v| v.dx).unwrap_or(f64::NAN);
                EdgeCheck { label: l, width: w, ok: w > 1.0 - tol }
            })
            .collect();
        BalanceReport { forward, backward }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCheck {
    pub label: Label,
    /// Current width for forward-flippable edges, back-flipped width for backward ones.
    pub width: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub forward: Vec<EdgeCheck>,
    pub backward: Vec<EdgeCheck>,
}

impl BalanceReport {
    pub fn is_balanced(&self) -> bool {
        self.forward.iter().chain(&self.backward).all(|c| c.ok)
    }
}

/// Area pairing of widths and heights, triangle by triangle.
pub fn omega(t: &ColouredTriangulation, x: &[f64], y: &[f64]) -> Result<f64> {
    let mut twice = 0.0;
    for tri in 0..t.num_triangles() {
        let r = roles_of(t, tri)?;
        let l = |i: usize| t.triangles()[tri][i].label.0;
        let (w, tl, s) = (l(r.wide), l(r.tall), l(r.small));
        twice += x[w] * y[s] + x[s] * y[tl] - x[s] * y[s];
    }
    Ok(0.5 * twice)
}

/// Twice the area form as an integer matrix indexed `[height label][width label]`.
pub fn area_matrix(t: &ColouredTriangulation) -> Result<Vec<Vec<i64>>> {
    let n = t.num_labels();
    let mut m = vec![vec![0i64; n]; n];
    for tri in 0..t.num_triangles() {
        let r = roles_of(t, tri)?;
        let l = |i: usize| t.triangles()[tri][i].label.0;
        let (w, tl, s) = (l(r.wide), l(r.tall), l(r.small));
        m[s][w] += 1;
        m[tl][s] += 1;
        m[s][s] -= 1;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Oracle: classify edges of a concrete triangle by comparing coordinates directly.
    fn brute_roles(p: [Vec2; 3]) -> Roles {
        let sides = [p[1] - p[0], p[2] - p[1], p[0] - p[2]];
        let wide = (0..3).max_by(|&i, &j| sides[i].dx.abs().total_cmp(&sides[j].dx.abs())).unwrap();
        let tall = (0..3).max_by(|&i, &j| sides[i].dy.abs().total_cmp(&sides[j].dy.abs())).unwrap();
        Roles { wide, tall, small: 3 - wide - tall }
    }

    #[test]
    fn roles_match_random_triangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let p: [Vec2; 3] = [0, 1, 2].map(|_| Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let sides = [p[1] - p[0], p[2] - p[1], p[0] - p[2]];
            if sides[0].cross(sides[1]) <= 0.0 {
                continue;
            }
            let colours = sides.map(|s| s.canonical().colour());
            // Thin triangles can have three sides of one slope sign; veering excludes them.
            let Some(r) = triangle_roles(colours) else {
                continue;
            };
            assert_eq!(r, brute_roles(p), "{colours:?}");
            let x = sides.map(|s| s.dx.abs());
            let y = sides.map(|s| s.dy.abs());
            assert!((x[r.wide] - x[r.tall] - x[r.small]).abs() < 1e-12);
            assert!((y[r.tall] - y[r.wide] - y[r.small]).abs() < 1e-12);
            // Side signs are fixed up to negating the whole triangle.
            let signs = side_signs(colours).unwrap();
            let w = [0, 1, 2].map(|i| sides[i].canonical().scale(signs[i]));
            let flipped = (w[0] + sides[0]).norm_inf() < 1e-15;
            for i in 0..3 {
                let expect = if flipped { -sides[i] } else { sides[i] };
                assert!((w[i] - expect).norm_inf() < 1e-15);
            }
        }
    }

    #[test]
    fn roles_examples() {
        use Colour::*;
        assert_eq!(triangle_roles([Red, Blue, Red]), Some(Roles { wide: 0, tall: 2, small: 1 }));
        assert_eq!(triangle_roles([Blue, Blue, Red]), Some(Roles { wide: 0, tall: 1, small: 2 }));
        assert_eq!(triangle_roles([Red, Red, Red]), None);
        let p = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0), Vec2::new(1.0, 3.0)];
        let sides = [p[1] - p[0], p[2] - p[1], p[0] - p[2]];
        assert_eq!(sides.map(|s| s.dx.abs()), [2.0, 1.0, 1.0]);
        assert_eq!(sides.map(|s| s.dy.abs()), [1.0, 2.0, 3.0]);
        let r = triangle_roles(sides.map(|s| s.canonical().colour())).unwrap();
        assert_eq!((r.wide, r.tall), (0, 2));
    }

    #[test]
    fn torus_views() {
        let s = fixtures::torus_state();
        let x = s.widths();
        for (got, want) in x.iter().zip([0.3, 0.7, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let t = s.triangulation();
        for l in t.labels() {
            assert_eq!(s.vector(l).colour(), t.colour(l));
        }
        assert!(s.closure_residual() < IDENTITY_TOL);
    }

    #[test]
    fn torus_area_is_one() {
        let s = fixtures::torus_state();
        let t = s.triangulation();
        let (x, y) = (s.widths(), s.heights());
        let a = t.label_by_name("a").unwrap().0;
        let b = t.label_by_name("b").unwrap().0;
        let by_hand = x[a] * y[b] + x[b] * y[a];
        let om = omega(t, &x, &y).unwrap();
        assert!((by_hand - 1.0).abs() < 1e-12);
        assert!((om - 1.0).abs() < 1e-12);
        assert!((s.area() - 1.0).abs() < 1e-12);
        assert_eq!(omega(t, &x, &[0.0; 3]).unwrap(), 0.0);
        let f = 0.37f64.exp();
        let xs: Vec<f64> = x.iter().map(|v| v * f).collect();
        let ys: Vec<f64> = y.iter().map(|v| v / f).collect();
        assert!((omega(t, &xs, &ys).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn area_matrix_matches_omega() {
        for s in [fixtures::torus_state(), fixtures::pillowcase_state()] {
            let t = s.triangulation();
            let m = area_matrix(t).unwrap();
            let (x, y) = (s.widths(), s.heights());
            let mut v = 0.0;
            for i in 0..x.len() {
                for j in 0..x.len() {
                    v += y[i] * m[i][j] as f64 * x[j];
                }
            }
            assert!((0.5 * v - s.area()).abs() < 1e-12);
        }
    }

    #[test]
    fn stretch_scales_views() {
        let mut s = fixtures::torus_state();
        let (x, y) = (s.widths(), s.heights());
        s.stretch(2f64.exp());
        for l in 0..3 {
            assert!((s.widths()[l] - x[l] * 2f64.exp()).abs() < 1e-12);
            assert!((s.heights()[l] - y[l] / 2f64.exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_other_diagonal() {
        let s = fixtures::torus_state();
        let c = s.triangulation().label_by_name("c").unwrap();
        let d = s.other_diagonal(c).unwrap();
        assert!((d.dx - 0.4).abs() < 1e-15);
        assert!((d.dy - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn torus_balance() {
        let s = fixtures::torus_state();
        let r = s.check_balance(IDENTITY_TOL);
        assert!(r.is_balanced());
        let c = s.triangulation().label_by_name("c").unwrap();
        assert_eq!(r.forward.len(), 1);
        assert_eq!(r.forward[0].label, c);
        assert!((r.forward[0].width - 1.0).abs() < 1e-15);
        let mut s2 = s.clone();
        s2.stretch(0.1f64.exp());
        assert!(!s2.check_balance(IDENTITY_TOL).is_balanced());
    }

    #[test]
    fn rejects_wrong_colour() {
        let s = fixtures::torus_state();
        let t = s.triangulation().clone();
        let mut v = s.vectors().to_vec();
        v[0] = Vec2::new(0.3, 0.5);
        assert!(SurfaceState::new(t, v).is_err());
    }
}
