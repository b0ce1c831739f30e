use super::{flip, FlipMove, FlipWord};
use crate::error::{Error, Result};
use crate::geometry::SurfaceState;
use crate::triangulation::{Direction, Label};

/// A state reached from a base surface, with its net flip count per label.
#[derive(Clone, Debug)]
pub struct Position {
    pub state: SurfaceState,
    pub phi: Vec<i64>,
}

impl Position {
    pub fn base(state: SurfaceState) -> Position {
        let n = state.triangulation().num_labels();
        Position { state, phi: vec![0; n] }
    }

    /// Follows the labels and directions of `w` geometrically.
    pub fn follow(&self, w: &FlipWord) -> Result<Position> {
        let mut p = self.clone();
        for (i, m) in w.moves.iter().enumerate() {
            let (next, mv) = flip(&p.state, m.label, m.direction).map_err(|_| Error::InapplicableWord { index: i })?;
            if mv.outcome != m.outcome {
                return Err(Error::InapplicableWord { index: i });
            }
            p.step(next, m.label, m.direction);
        }
        Ok(p)
    }

    fn step(&mut self, state: SurfaceState, l: Label, direction: Direction) {
        self.state = state;
        self.phi[l.0] += match direction {
            Direction::Forward => 1,
            Direction::Backward => -1,
        };
    }

    /// Same labelled triangulation and edge vectors within `tol` (relative).
    pub fn same_as(&self, other: &Position, tol: f64) -> bool {
        let scale = self.state.vectors().iter().map(|v| v.norm_inf()).fold(0.0, f64::max);
        self.phi == other.phi
            && self.state.triangulation().same_labelled(other.state.triangulation())
            && self
                .state
                .vectors()
                .iter()
                .zip(other.state.vectors())
                .all(|(a, b)| (*a - *b).norm_inf() <= tol * scale)
    }
}

/// Greedy walk from `from` towards `target`, flipping in `direction` any label whose
/// coordinate has not reached the target yet.
fn walk(from: &Position, target: &[i64], direction: Direction) -> Result<(Position, Vec<FlipMove>)> {
    let cap = 10 * target.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>().max(1);
    let behind = |phi: &[i64], l: Label| match direction {
        Direction::Forward => phi[l.0] < target[l.0],
        Direction::Backward => phi[l.0] > target[l.0],
    };
    let mut p = from.clone();
    let mut moves = Vec::new();
    while p.phi != target {
        if moves.len() >= cap {
            return Err(Error::JoinStalled { steps: moves.len() });
        }
        let t = p.state.triangulation();
        let Some(l) = t.flippable_edges(direction).into_iter().find(|&l| behind(&p.phi, l)) else {
            return Err(Error::JoinStalled { steps: moves.len() });
        };
        let (next, mv) = flip(&p.state, l, direction)?;
        moves.push(mv);
        p.step(next, l, direction);
    }
    Ok((p, moves))
}

impl Position {
    /// Least upper bound: forward flips from `self` up to the coordinatewise maximum.
    pub fn join(&self, other: &Position) -> Result<(Position, Vec<FlipMove>)> {
        let target: Vec<i64> = self.phi.iter().zip(&other.phi).map(|(a, b)| *a.max(b)).collect();
        walk(self, &target, Direction::Forward)
    }

    /// Greatest lower bound: backward flips from `self` down to the coordinatewise minimum.
    pub fn meet(&self, other: &Position) -> Result<(Position, Vec<FlipMove>)> {
        let target: Vec<i64> = self.phi.iter().zip(&other.phi).map(|(a, b)| *a.min(b)).collect();
        walk(self, &target, Direction::Backward)
    }
}

/// Forward word from the end of `u` reaching the join of `u` and `v`.
pub fn lattice_join(s: &SurfaceState, u: &FlipWord, v: &FlipWord) -> Result<FlipWord> {
    let base = Position::base(s.clone());
    let pu = base.follow(u)?;
    let pv = base.follow(v)?;
    let (_, moves) = pu.join(&pv)?;
    Ok(FlipWord::new(pu.state.triangulation().clone(), moves))
}

/// Backward word from the end of `u` reaching the meet of `u` and `v`.
pub fn lattice_meet(s: &SurfaceState, u: &FlipWord, v: &FlipWord) -> Result<FlipWord> {
    let base = Position::base(s.clone());
    let pu = base.follow(u)?;
    let pv = base.follow(v)?;
    let (_, moves) = pu.meet(&pv)?;
    Ok(FlipWord::new(pu.state.triangulation().clone(), moves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn forward_position(s: &SurfaceState, steps: usize) -> Position {
        let mut p = Position::base(s.clone());
        for _ in 0..steps {
            let l = p.state.triangulation().flippable_edges(Direction::Forward)[0];
            let (next, _) = flip(&p.state, l, Direction::Forward).unwrap();
            p.step(next, l, Direction::Forward);
        }
        p
    }

    #[test]
    fn join_with_self_is_empty() {
        let s = fixtures::torus_state();
        let p = forward_position(&s, 4);
        let (j, moves) = p.join(&p).unwrap();
        assert!(moves.is_empty());
        assert!(j.same_as(&p, 0.0));
    }

    #[test]
    fn join_with_base_reaches_other() {
        let s = fixtures::generic_torus_state();
        let base = Position::base(s.clone());
        let p = forward_position(&s, 12);
        let (j, _) = base.join(&p).unwrap();
        assert!(j.same_as(&p, 1e-12));
    }

    #[test]
    fn public_join_word() {
        let s = fixtures::torus_state();
        let t = s.triangulation().clone();
        let empty = FlipWord::empty(t.clone());
        let p = forward_position(&s, 3);
        let (_, moves) = Position::base(s.clone()).join(&p).unwrap();
        let v = FlipWord::new(t, moves);
        let w = lattice_join(&s, &empty, &v).unwrap();
        assert_eq!(w.moves, v.moves);
        assert!(lattice_meet(&s, &v, &empty).unwrap().moves.iter().all(|m| m.direction == Direction::Backward));
    }
}
