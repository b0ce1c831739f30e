use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ColouredTriangulation, SlotRef};

/// Relabelling-invariant code of a coloured triangulation. Two triangulations have the
/// same key iff there is a colour- and orientation-preserving isomorphism between them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey(pub Vec<u32>);

impl fmt::Display for CanonicalKey {
    /// Compact form: one token per slot, `<label><colour>`, triangles separated by `.`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, code) in self.0.iter().enumerate() {
            if i > 0 && i % 3 == 0 {
                write!(f, ".")?;
            }
            let colour = if code & 1 == 0 { 'R' } else { 'B' };
            write!(f, "{}{}", code >> 1, colour)?;
        }
        Ok(())
    }
}

/// Code and label map obtained by a breadth-first walk starting at `start`.
fn walk(t: &ColouredTriangulation, start: SlotRef) -> (Vec<u32>, Vec<usize>) {
    let f = t.num_triangles();
    let mut rotation: Vec<Option<usize>> = vec![None; f];
    let mut ids: Vec<Option<usize>> = vec![None; t.num_labels()];
    let mut next_id = 0;
    let mut code = Vec::with_capacity(3 * f);
    let mut queue = VecDeque::new();
    rotation[start.triangle] = Some(start.side);
    queue.push_back(start.triangle);
    while let Some(tri) = queue.pop_front() {
        let rot = rotation[tri].expect("queued triangles have a rotation");
        for k in 0..3 {
            let r = SlotRef::new(tri, rot + k);
            let slot = t.slot(r);
            let id = *ids[slot.label.0].get_or_insert_with(|| {
                next_id += 1;
                next_id - 1
            });
            let colour_bit = match t.colour(slot.label) {
                super::Colour::Red => 0,
                super::Colour::Blue => 1,
            };
            code.push((id as u32) << 1 | colour_bit);
            let tw = t.twin(r);
            if rotation[tw.triangle].is_none() {
                rotation[tw.triangle] = Some(tw.side);
                queue.push_back(tw.triangle);
            }
        }
    }
    (code, ids.into_iter().map(|i| i.expect("connected")).collect())
}

fn starts(t: &ColouredTriangulation) -> impl Iterator<Item = SlotRef> + '_ {
    (0..t.num_triangles()).flat_map(|tri| (0..3).map(move |s| SlotRef::new(tri, s)))
}

pub(super) fn canonical_form(t: &ColouredTriangulation) -> CanonicalKey {
    CanonicalKey(starts(t).map(|s| walk(t, s).0).min().expect("nonempty triangulation"))
}

pub(super) fn canonical_maps(t: &ColouredTriangulation) -> Vec<Vec<usize>> {
    let walks: Vec<(Vec<u32>, Vec<usize>)> = starts(t).map(|s| walk(t, s)).collect();
    let best = walks.iter().map(|w| &w.0).min().expect("nonempty triangulation").clone();
    let mut maps: Vec<Vec<usize>> = walks.into_iter().filter(|w| w.0 == best).map(|w| w.1).collect();
    maps.sort();
    maps.dedup();
    maps
}

#[cfg(test)]
mod tests {
    use crate::fixtures;
    use crate::triangulation::{Colour, Direction};

    #[test]
    fn relabelling_preserves_key() {
        let t = fixtures::torus();
        let u = t.relabel(&[2, 0, 1]).unwrap();
        assert!(t.isomorphic(&u));
    }

    #[test]
    fn torus_colour_classes_differ() {
        assert!(!fixtures::torus().isomorphic(&fixtures::torus_blue()));
    }

    #[test]
    fn forward_flip_changes_torus_class() {
        for t in [fixtures::torus(), fixtures::torus_blue()] {
            for e in t.flippable_edges(Direction::Forward) {
                let outcome = t.colour(e).other();
                let u = t.flip(e, Direction::Forward, outcome).unwrap();
                assert!(!t.isomorphic(&u));
            }
        }
    }

    #[test]
    fn maps_send_labels_to_key_positions() {
        let t = fixtures::pillowcase();
        let key = t.canonical_form();
        for map in t.canonical_label_maps() {
            for l in t.labels() {
                let colour_bit = u32::from(t.colour(l) == Colour::Blue);
                assert!(key.0.contains(&((map[l.0] as u32) << 1 | colour_bit)));
            }
        }
    }
}
