//! Small triangulations and surfaces used throughout tests, examples and the CLI.

use crate::geometry::{SurfaceState, Vec2};
use crate::triangulation::{Colour, ColouredTriangulation, Slot, TriangulationParts};

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn torus_with(c: Colour) -> ColouredTriangulation {
    // Labels a, b, c; both triangles read (c, a, b) anticlockwise.
    ColouredTriangulation::new(TriangulationParts {
        names: names(&["a", "b", "c"]),
        triangles: vec![
            [Slot::new(2, false), Slot::new(0, true), Slot::new(1, false)],
            [Slot::new(2, true), Slot::new(0, false), Slot::new(1, true)],
        ],
        colours: vec![Colour::Blue, Colour::Red, c],
        genus: 1,
        marked: 1,
    })
    .expect("torus fixture is valid")
}

/// Two-triangle torus with `a` blue and `b`, `c` red.
pub fn torus() -> ColouredTriangulation {
    torus_with(Colour::Red)
}

/// The other veering colouring of the same torus: `c` blue.
pub fn torus_blue() -> ColouredTriangulation {
    torus_with(Colour::Blue)
}

/// Unit-area torus with widths (0.3, 0.7, 1) and heights (1/2, 13/6, 5/3).
pub fn torus_state() -> SurfaceState {
    SurfaceState::new(
        torus(),
        vec![Vec2::new(0.3, -0.5), Vec2::new(0.7, 13.0 / 6.0), Vec2::new(1.0, 5.0 / 3.0)],
    )
    .expect("torus state is consistent")
}

/// Unit-area torus on [`torus`] with irrational widths and heights, so that no flip
/// sequence meets a tie.
pub fn generic_torus_state() -> SurfaceState {
    let (xa, xb) = (std::f64::consts::SQRT_2 - 1.0, (5f64.sqrt() - 1.0) / 2.0);
    let (ya, yc) = (3f64.sqrt().recip(), std::f64::consts::E.recip());
    let s = SurfaceState::from_coordinates(torus(), &[xa, xb, xa + xb], &[ya, ya + yc, yc])
        .expect("generic torus is consistent");
    let k = s.area().sqrt().recip();
    let (t, vectors) = s.into_parts();
    SurfaceState::new(t, vectors.into_iter().map(|w| w.scale(k)).collect()).expect("rescaled")
}

/// Sphere with four cone points, as the quotient of a torus by `z -> -z`.
///
/// A fundamental domain is the hexagon `0, u, 2u, 2u+v, u+v, v`; the bottom and top
/// edges fold at their midpoints and the slanted edges are identified by translation.
/// The hexagon is fanned from `u`.
pub fn pillowcase() -> ColouredTriangulation {
    let (a, b, c, d1, d2, d3) = (0, 1, 2, 3, 4, 5);
    use Colour::{Blue, Red};
    ColouredTriangulation::new(TriangulationParts {
        names: names(&["a", "b", "c", "d", "e", "f"]),
        triangles: vec![
            [Slot::new(a, true), Slot::new(d1, true), Slot::new(c, true)],
            [Slot::new(d2, true), Slot::new(b, true), Slot::new(d1, false)],
            [Slot::new(d3, true), Slot::new(b, false), Slot::new(d2, false)],
            [Slot::new(a, false), Slot::new(c, false), Slot::new(d3, false)],
        ],
        colours: vec![Red, Red, Blue, Blue, Blue, Red],
        genus: 0,
        marked: 4,
    })
    .expect("pillowcase fixture is valid")
}

/// The pillowcase with `u = (1, 1/2)`, `v = (-0.3, 1)`, rescaled to unit area.
pub fn pillowcase_state() -> SurfaceState {
    let u = Vec2::new(1.0, 0.5);
    let v = Vec2::new(-0.3, 1.0);
    let vectors = vec![u, -u, -v, v - u, v, u + v];
    let s = SurfaceState::new(pillowcase(), vectors).expect("pillowcase state is consistent");
    let k = s.area().sqrt().recip();
    let (t, vectors) = s.into_parts();
    SurfaceState::new(t, vectors.into_iter().map(|w| w.scale(k)).collect()).expect("rescaled")
}

/// Every combinatorial fixture.
pub fn all() -> Vec<ColouredTriangulation> {
    vec![torus(), torus_blue(), pillowcase()]
}

/// Combinatorial fixture by name.
pub fn by_name(name: &str) -> Option<ColouredTriangulation> {
    match name {
        "torus" => Some(torus()),
        "torus-blue" => Some(torus_blue()),
        "pillowcase" => Some(pillowcase()),
        _ => None,
    }
}

/// Geometric fixture by name.
pub fn state_by_name(name: &str) -> Option<SurfaceState> {
    match name {
        "torus" => Some(torus_state()),
        "generic-torus" => Some(generic_torus_state()),
        "pillowcase" => Some(pillowcase_state()),
        _ => None,
    }
}
