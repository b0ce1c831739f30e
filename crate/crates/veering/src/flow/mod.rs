//! The suspension-flow model: balanced states, the diagonal flow, first returns to the
//! upper boundary, trajectories and their coding by a marker loop.

mod coding;
mod sample;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flips::{flip, FlipMove, FlipWord};
use crate::geometry::SurfaceState;
use crate::triangulation::{CanonicalKey, ColouredTriangulation, Direction, Label};

pub use coding::{code_by_theta, is_neat, split_by_theta, theta_occurrences, CodingRecord};
pub(crate) use sample::orthonormalise;
pub use sample::{slice_basis, unit_area, SliceSampler, StateSampler};

/// Tolerance for the balance conditions.
pub const BALANCE_TOL: f64 = 1e-9;
/// Relative tolerance for an edge to count as having width one at a return.
pub const UNIT_WIDTH_TOL: f64 = 1e-12;
/// Flip budget for [`make_balanced`].
pub const BALANCE_CAP: usize = 1_000_000;

/// A unit-area state satisfying both balance conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancedState {
    state: SurfaceState,
}

impl BalancedState {
    pub fn new(state: SurfaceState) -> Result<BalancedState> {
        let area = state.area();
        if (area - 1.0).abs() > BALANCE_TOL {
            return Err(Error::Geometry(format!("area {area} is not one")));
        }
        if !state.check_balance(BALANCE_TOL).is_balanced() {
            return Err(Error::Geometry("state is not balanced".into()));
        }
        Ok(BalancedState { state })
    }

    pub fn state(&self) -> &SurfaceState {
        &self.state
    }

    pub fn into_state(self) -> SurfaceState {
        self.state
    }

    pub fn triangulation(&self) -> &ColouredTriangulation {
        self.state.triangulation()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.state.widths()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.state.heights()
    }
}

fn keane(event: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::DegenerateWidth(_) => Error::NonKeaneDetected { event, source: Box::new(e) },
        other => other,
    }
}

/// Brings a unit-area state to its balanced triangulation: back-flips edges whose
/// back-flipped width is at most one, then forward-flips edges wider than one, and
/// repeats until both conditions hold. Returns the state and the flips made.
pub fn make_balanced(s: SurfaceState) -> Result<(BalancedState, Vec<FlipMove>)> {
    let area = s.area();
    if (area - 1.0).abs() > BALANCE_TOL {
        return Err(Error::Geometry(format!("area {area} is not one")));
    }
    let mut s = s;
    let mut moves = Vec::new();
    loop {
        loop {
            let bad: Vec<Label> = s
                .check_balance(0.0)
                .backward
                .iter()
                .filter(|c| !c.ok)
                .map(|c| c.label)
                .collect();
            if bad.is_empty() {
                break;
            }
            for l in bad {
                let (next, mv) = flip(&s, l, Direction::Backward).map_err(keane(moves.len()))?;
                s = next;
                moves.push(mv);
            }
            if moves.len() > BALANCE_CAP {
                return Err(Error::IterationCap(BALANCE_CAP));
            }
        }
        let bad: Vec<Label> =
            s.check_balance(0.0).forward.iter().filter(|c| !c.ok).map(|c| c.label).collect();
        if bad.is_empty() {
            break;
        }
        for l in bad {
            let (next, mv) = flip(&s, l, Direction::Forward).map_err(keane(moves.len()))?;
            s = next;
            moves.push(mv);
        }
        if moves.len() > BALANCE_CAP {
            return Err(Error::IterationCap(BALANCE_CAP));
        }
    }
    Ok((BalancedState::new(s)?, moves))
}

/// Time to the upper boundary: `-log` of the largest width.
pub fn roof_time(b: &BalancedState) -> f64 {
    -b.state.max_width().ln()
}

/// One first return to the upper boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnEvent {
    pub roof: f64,
    pub flipped: Vec<Label>,
    pub moves: Vec<FlipMove>,
    pub symbol_key: CanonicalKey,
    /// Widths on the upper boundary, before the flips.
    pub boundary_widths: Vec<f64>,
    pub width_sum: f64,
    pub area: f64,
}

/// Flows to the upper boundary and flips every forward-flippable edge of width one.
/// `event` only labels errors.
pub fn advance(b: &BalancedState, event: usize) -> Result<(BalancedState, ReturnEvent)> {
    let roof = roof_time(b);
    let mut s = b.state.clone();
    s.stretch(s.max_width().recip());
    let boundary_widths = s.widths();
    let width_sum = boundary_widths.iter().sum();
    let flipped: Vec<Label> = s
        .triangulation()
        .flippable_edges(Direction::Forward)
        .into_iter()
        .filter(|&l| s.width(l) >= 1.0 - UNIT_WIDTH_TOL)
        .collect();
    let mut moves = Vec::with_capacity(flipped.len());
    for &l in &flipped {
        let (next, mv) = flip(&s, l, Direction::Forward).map_err(keane(event))?;
        s = next;
        moves.push(mv);
    }
    if !s.check_balance(BALANCE_TOL).is_balanced() {
        return Err(Error::NotBalancedAfterFlip(event));
    }
    let area = s.area();
    let symbol_key = s.triangulation().canonical_form();
    let event = ReturnEvent { roof, flipped, moves, symbol_key, boundary_widths, width_sum, area };
    Ok((BalancedState { state: s }, event))
}

/// Reverse of [`advance`]: flows backwards until some backward-flippable edge would
/// have width one after back-flipping, then back-flips all such edges. Returns the
/// new state, which lies on an upper boundary, and the elapsed time.
pub fn retreat(b: &BalancedState, event: usize) -> Result<(BalancedState, f64, Vec<FlipMove>)> {
    let report = b.state.check_balance(BALANCE_TOL);
    let least = report.backward.iter().map(|c| c.width).fold(f64::INFINITY, f64::min);
    if !least.is_finite() {
        return Err(Error::Geometry("no backward-flippable edge".into()));
    }
    let mut s = b.state.clone();
    s.stretch(least.recip());
    let targets: Vec<Label> = s
        .check_balance(0.0)
        .backward
        .iter()
        .filter(|c| c.width <= 1.0 + UNIT_WIDTH_TOL)
        .map(|c| c.label)
        .collect();
    let mut moves = Vec::with_capacity(targets.len());
    for l in targets {
        let (next, mv) = flip(&s, l, Direction::Backward).map_err(keane(event))?;
        s = next;
        moves.push(mv);
    }
    if !s.check_balance(BALANCE_TOL).is_balanced() {
        return Err(Error::NotBalancedAfterFlip(event));
    }
    Ok((BalancedState { state: s }, least.ln(), moves))
}

/// A run of first returns, stopping early at the first error.
#[derive(Debug)]
pub struct Trajectory {
    pub start: BalancedState,
    pub end: BalancedState,
    pub events: Vec<ReturnEvent>,
    pub seed: Option<u64>,
    /// Index of the failing return and its error, when the run stopped early.
    pub abort: Option<(usize, Error)>,
    pub renormalisations: usize,
}

impl Trajectory {
    pub fn total_time(&self) -> f64 {
        self.events.iter().map(|e| e.roof).sum()
    }

    pub fn roofs(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.roof).collect()
    }

    /// Every flip made, as a word from the start triangulation.
    pub fn word(&self) -> FlipWord {
        let moves = self.events.iter().flat_map(|e| e.moves.iter().copied()).collect();
        FlipWord::new(self.start.triangulation().clone(), moves)
    }

    /// For each move of [`Trajectory::word`], the index of its return.
    pub fn move_events(&self) -> Vec<usize> {
        self.events.iter().enumerate().flat_map(|(i, e)| std::iter::repeat_n(i, e.moves.len())).collect()
    }
}

/// Runs `n` returns from `b`. With `renorm_every = Some(k)`, every `k` returns the
/// heights are rescaled to unit area if the area has drifted by more than 1e-9.
pub fn run_trajectory(b: &BalancedState, n: usize, renorm_every: Option<usize>) -> Trajectory {
    let mut current = b.clone();
    let mut events = Vec::with_capacity(n);
    let mut abort = None;
    let mut renormalisations = 0;
    for i in 0..n {
        match advance(&current, i) {
            Ok((next, ev)) => {
                current = next;
                events.push(ev);
            }
            Err(e) => {
                abort = Some((i, e));
                break;
            }
        }
        if let Some(k) = renorm_every {
            if k > 0 && (i + 1) % k == 0 {
                let area = current.state.area();
                if (area - 1.0).abs() > 1e-9 {
                    current.state.scale_heights(area.recip());
                    renormalisations += 1;
                }
            }
        }
    }
    Trajectory { start: b.clone(), end: current, events, seed: None, abort, renormalisations }
}
