//! Geometric flips, flip words and their exact integer matrices, and lattice
//! operations on forward flip sequences.

mod lattice;
mod matrix;
mod word;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SurfaceState, AXIS_TOL};
use crate::triangulation::{Colour, ColouredTriangulation, Direction, Label};

pub use lattice::{lattice_join, lattice_meet, Position};
pub use matrix::FlipMatrix;
pub use word::{area_compatibility, full_area_identity, literal_area_compatibility, FlipWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipMove {
    pub label: Label,
    pub direction: Direction,
    /// Colour of the new diagonal.
    pub outcome: Colour,
}

impl FlipMove {
    pub fn forward(label: Label, outcome: Colour) -> FlipMove {
        FlipMove { label, direction: Direction::Forward, outcome }
    }
}

/// Flips `e` geometrically: the new diagonal is the other diagonal of the quadrilateral
/// and its slope decides the colour.
pub fn flip(s: &SurfaceState, e: Label, direction: Direction) -> Result<(SurfaceState, FlipMove)> {
    let t = s.triangulation();
    if !t.is_flippable(e, direction) {
        return Err(Error::NotFlippable { label: e, direction });
    }
    let diagonal = s.other_diagonal(e)?;
    let scale = s.vectors().iter().map(|v| v.norm_inf()).fold(0.0, f64::max);
    if diagonal.dx.abs() <= AXIS_TOL * scale || diagonal.dy.abs() <= AXIS_TOL * scale {
        return Err(Error::DegenerateWidth(e));
    }
    let outcome = diagonal.colour();
    let u = t.flip(e, direction, outcome)?;
    let mut vectors = s.vectors().to_vec();
    vectors[e.0] = diagonal;
    let next = SurfaceState::build(u, vectors)?;
    Ok((next, FlipMove { label: e, direction, outcome }))
}

/// Forward flip driven by widths alone: the new width is `|x_d - x_a|` and the new
/// diagonal is red exactly when `x_d > x_a`. Updates `x` in place.
pub fn width_flip(t: &ColouredTriangulation, x: &mut [f64], e: Label) -> Result<(ColouredTriangulation, FlipMove)> {
    if !t.is_flippable(e, Direction::Forward) {
        return Err(Error::NotFlippable { label: e, direction: Direction::Forward });
    }
    let q = t.quad_about(e)?;
    let xa = x[t.slot(q.a).label.0];
    let xd = x[t.slot(q.d).label.0];
    let gap = xd - xa;
    if gap.abs() <= AXIS_TOL * x[e.0] {
        return Err(Error::DegenerateWidth(e));
    }
    let outcome = if gap > 0.0 { Colour::Red } else { Colour::Blue };
    x[e.0] = gap.abs();
    let u = t.flip(e, Direction::Forward, outcome)?;
    Ok((u, FlipMove::forward(e, outcome)))
}

/// The two labels whose matrix columns gain the column of `e` when `e` is
/// forward-flipped in `t` to a diagonal of colour `outcome`.
pub fn column_pair(t: &ColouredTriangulation, e: Label, outcome: Colour) -> Result<(Label, Label)> {
    let q = t.quad_about(e)?;
    let (p, r) = match outcome {
        Colour::Red => (q.a, q.c),
        Colour::Blue => (q.b, q.d),
    };
    Ok((t.slot(p).label, t.slot(r).label))
}

/// The widest edge; it is always forward flippable in a veering triangulation.
pub fn widest(x: &[f64]) -> Label {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[best] {
            best = i;
        }
    }
    Label(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::IDENTITY_TOL;
    use rand::seq::IndexedRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_flip_example() {
        let s = fixtures::torus_state();
        let t = s.triangulation();
        let c = t.label_by_name("c").unwrap();
        let b = t.label_by_name("b").unwrap();
        let (u, mv) = flip(&s, c, Direction::Forward).unwrap();
        assert_eq!(mv.outcome, Colour::Red);
        let x = u.widths();
        for (got, want) in x.iter().zip([0.3, 0.7, 0.4]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(widest(&x), b);
        let y = u.heights();
        assert!((y[c.0] - 8.0 / 3.0).abs() < 1e-14);
        assert!((y[c.0] - y[0] - y[1]).abs() < 1e-14);
        assert!(u.closure_residual() < IDENTITY_TOL);
        assert!((u.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn width_flip_agrees_with_geometry() {
        let s = fixtures::torus_state();
        let c = s.triangulation().label_by_name("c").unwrap();
        let mut x = s.widths();
        let (t, mv) = width_flip(s.triangulation(), &mut x, c).unwrap();
        let (u, mv2) = flip(&s, c, Direction::Forward).unwrap();
        assert_eq!(mv, mv2);
        assert_eq!(&t, u.triangulation());
        for (a, b) in x.iter().zip(u.widths()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn flip_and_back() {
        for s in [fixtures::torus_state(), fixtures::pillowcase_state()] {
            for e in s.triangulation().flippable_edges(Direction::Forward) {
                let (u, _) = flip(&s, e, Direction::Forward).unwrap();
                let (back, mv) = flip(&u, e, Direction::Backward).unwrap();
                assert_eq!(mv.outcome, s.triangulation().colour(e));
                assert_eq!(back.triangulation(), s.triangulation());
                for (a, b) in back.vectors().iter().zip(s.vectors()) {
                    assert!((*a - *b).norm_inf() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_flips_preserve_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s0 in [fixtures::torus_state(), fixtures::pillowcase_state()] {
            let kappa = s0.triangulation().stratum_datum().unwrap().sorted();
            let mut s = s0.clone();
            for _ in 0..2000 {
                let t = s.triangulation();
                let dir = if rand::Rng::random_bool(&mut rng, 0.5) { Direction::Forward } else { Direction::Backward };
                let options = t.flippable_edges(dir);
                let &e = options.choose(&mut rng).unwrap();
                let (u, _) = match flip(&s, e, dir) {
                    Ok(r) => r,
                    Err(Error::DegenerateWidth(_)) => continue,
                    Err(err) => panic!("{err}"),
                };
                let ut = u.triangulation();
                assert!(ut.parts().validate().is_valid());
                assert!(ut.is_veering());
                assert_eq!(ut.stratum_datum().unwrap().sorted(), kappa);
                assert!((u.area() - s0.area()).abs() < 1e-9 * s0.area());
                s = u;
            }
        }
    }
}
