use std::ops::Range;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::flips::{FlipMove, FlipWord};
use crate::triangulation::{ColouredTriangulation, Label};

/// A trajectory's flip word cut into symbols, each ending with the marker loop.
#[derive(Clone, Debug)]
pub struct CodingRecord {
    pub theta: FlipWord,
    pub symbols: Vec<FlipWord>,
    pub durations: Vec<f64>,
    /// Moves after the last marker, not part of any symbol.
    pub tail: FlipWord,
}

/// True when no proper nonempty prefix of the loop is also a suffix.
pub fn is_neat(theta: &FlipWord) -> bool {
    let m = &theta.moves;
    !m.is_empty() && (1..m.len()).all(|k| m[..k] != m[m.len() - k..])
}

fn inverse(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (l, &c) in map.iter().enumerate() {
        inv[c] = l;
    }
    inv
}

fn matches(moves: &[FlipMove], theta: &[FlipMove], to_word: &[usize], theta_map: &[usize]) -> bool {
    moves.iter().zip(theta).all(|(m, t)| {
        m.direction == t.direction && m.outcome == t.outcome && m.label == Label(to_word[theta_map[t.label.0]])
    })
}

/// Start indices of every occurrence of `theta` in `word`, up to relabelling: the
/// triangulation at the start index must be isomorphic to `theta.start` and the moves
/// must agree under the isomorphism.
pub fn theta_occurrences(word: &FlipWord, theta: &FlipWord) -> Result<Vec<usize>> {
    let k = theta.len();
    if k == 0 || word.len() < k {
        return Ok(Vec::new());
    }
    let ts = word.triangulations()?;
    occurrences_in(&ts, &word.moves, theta)
}

fn occurrences_in(ts: &[ColouredTriangulation], moves: &[FlipMove], theta: &FlipWord) -> Result<Vec<usize>> {
    let k = theta.len();
    let key = theta.start.canonical_form();
    let theta_map = theta.start.canonical_label_maps().swap_remove(0);
    let first = theta.moves[0];
    let mut out = Vec::new();
    for i in 0..=moves.len().saturating_sub(k) {
        if moves[i].direction != first.direction || moves[i].outcome != first.outcome {
            continue;
        }
        if ts[i].num_labels() != theta.start.num_labels() || ts[i].canonical_form() != key {
            continue;
        }
        let found = ts[i]
            .canonical_label_maps()
            .iter()
            .any(|m| matches(&moves[i..i + k], &theta.moves, &inverse(m), &theta_map));
        if found {
            out.push(i);
        }
    }
    Ok(out)
}

/// Leftmost-greedy cut at non-overlapping occurrences of length `k`. Each range ends
/// with an occurrence; the remainder after the last one is not returned.
pub fn split_by_theta(occurrences: &[usize], k: usize) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for &i in occurrences {
        if i >= start {
            out.push(start..i + k);
            start = i + k;
        }
    }
    out
}

/// Codes a trajectory by the marker loop `theta`. Durations sum the roofs of the
/// returns whose first flip lies in the symbol.
pub fn code_by_theta(t: &Trajectory, theta: &FlipWord) -> Result<CodingRecord> {
    let word = t.word();
    let ts = word.triangulations()?;
    let occ = if theta.is_empty() { Vec::new() } else { occurrences_in(&ts, &word.moves, theta)? };
    let ranges = split_by_theta(&occ, theta.len());
    if ranges.is_empty() {
        return Err(Error::ThetaNeverSeen);
    }
    let mut first_move = Vec::with_capacity(t.events.len());
    let mut n = 0;
    for e in &t.events {
        first_move.push(n);
        n += e.moves.len();
    }
    let segment = |r: &Range<usize>| FlipWord::new(ts[r.start].clone(), word.moves[r.clone()].to_vec());
    let symbols = ranges.iter().map(segment).collect();
    let durations = ranges
        .iter()
        .map(|r| {
            t.events
                .iter()
                .zip(&first_move)
                .filter(|(e, &f)| !e.moves.is_empty() && r.contains(&f))
                .map(|(e, _)| e.roof)
                .sum()
        })
        .collect();
    let end = ranges.last().map_or(0, |r| r.end);
    let tail = segment(&(end..word.len()));
    Ok(CodingRecord { theta: theta.clone(), symbols, durations, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn split_examples() {
        assert_eq!(split_by_theta(&[0, 4, 8], 4), vec![0..4, 4..8, 8..12]);
        // zeta theta eta theta with |zeta| = 2, |eta| = 3, |theta| = 4
        assert_eq!(split_by_theta(&[2, 9], 4), vec![0..6, 6..13]);
        // Overlapping occurrences are skipped.
        assert_eq!(split_by_theta(&[0, 2, 4], 4), vec![0..4, 4..8]);
    }

    #[test]
    fn repeated_loop_is_found_each_time() {
        let blue = fixtures::torus_blue();
        let theta = FlipWord::parse(&blue, "c,b,c,a").unwrap();
        assert!(is_neat(&theta));
        let word = theta.concat(&theta).concat(&theta);
        assert_eq!(theta_occurrences(&word, &theta).unwrap(), vec![0, 4, 8]);
    }

    #[test]
    fn occurrences_are_found_up_to_relabelling() {
        let blue = fixtures::torus_blue();
        let theta = FlipWord::parse(&blue, "c,b,c,a").unwrap();
        let relabelled = blue.relabel(&[1, 2, 0]).unwrap();
        let moved = FlipWord::new(
            relabelled.clone(),
            theta
                .moves
                .iter()
                .map(|m| FlipMove { label: Label([1, 2, 0][m.label.0]), ..*m })
                .collect(),
        );
        assert!(moved.end().is_ok());
        assert_eq!(theta_occurrences(&moved, &theta).unwrap(), vec![0]);
    }

    #[test]
    fn neatness() {
        use crate::triangulation::Colour;
        let t = fixtures::torus();
        let m = |l: usize, c: Colour| FlipMove::forward(Label(l), c);
        let w = FlipWord::new(t.clone(), vec![m(2, Colour::Red), m(1, Colour::Blue), m(2, Colour::Red)]);
        assert!(!is_neat(&w));
        let w = FlipWord::new(t, vec![m(2, Colour::Red), m(1, Colour::Blue), m(2, Colour::Blue)]);
        assert!(is_neat(&w));
    }
}
