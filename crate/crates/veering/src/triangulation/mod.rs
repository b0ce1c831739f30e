//! Labelled, coloured triangulations of a closed oriented surface with marked points.
//!
//! A triangle is an anticlockwise triple of slots; each slot names an edge label and
//! whether the side traverses the label in its reference direction. Every label fills
//! exactly two slots with opposite directions.

mod canonical;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canonical::CanonicalKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label(pub usize);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    pub fn other(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Colour::Red => 'R',
            Colour::Blue => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Colour> {
        match c {
            'R' | 'r' => Some(Colour::Red),
            'B' | 'b' => Some(Colour::Blue),
            _ => None,
        }
    }

    /// +1 for red (positive slope), -1 for blue.
    pub fn sign(self) -> f64 {
        match self {
            Colour::Red => 1.0,
            Colour::Blue => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub label: Label,
    /// True when the side runs along the label's reference direction.
    pub forward: bool,
}

impl Slot {
    pub fn new(label: usize, forward: bool) -> Slot {
        Slot { label: Label(label), forward }
    }
}

/// Position of a slot: triangle index and side index 0..3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotRef {
    pub triangle: usize,
    pub side: usize,
}

impl SlotRef {
    pub fn new(triangle: usize, side: usize) -> SlotRef {
        SlotRef { triangle, side: side % 3 }
    }

    pub fn next(self) -> SlotRef {
        SlotRef::new(self.triangle, self.side + 1)
    }

    pub fn prev(self) -> SlotRef {
        SlotRef::new(self.triangle, self.side + 2)
    }
}

/// The quadrilateral formed by the two triangles on either side of an edge.
///
/// `a, b` follow the edge in the triangle where it runs forward, `c, d` in the other
/// one, so the boundary reads a, b, c, d anticlockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quad {
    pub edge: Label,
    pub a: SlotRef,
    pub b: SlotRef,
    pub c: SlotRef,
    pub d: SlotRef,
}

impl Quad {
    pub fn sides(&self) -> [SlotRef; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    LabelOutOfRange { triangle: usize, label: usize },
    ColourCount { expected: usize, got: usize },
    Multiplicity { label: Label, count: usize },
    Orientability { label: Label },
    TriangleCount { expected: i64, got: usize },
    EdgeCount { expected: i64, got: usize },
    VertexCount { expected: usize, got: usize },
    EulerCharacteristic { expected: i64, got: i64 },
    Disconnected,
    SelfGluedEdge { label: Label },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LabelOutOfRange { triangle, label } => {
                write!(f, "triangle {triangle} uses undeclared label index {label}")
            }
            Violation::ColourCount { expected, got } => {
                write!(f, "expected {expected} colours, got {got}")
            }
            Violation::Multiplicity { label, count } => {
                write!(f, "label {label} occurs {count} times, expected 2")
            }
            Violation::Orientability { label } => {
                write!(f, "label {label} has equal direction flags in both slots")
            }
            Violation::TriangleCount { expected, got } => {
                write!(f, "expected {expected} triangles, got {got}")
            }
            Violation::EdgeCount { expected, got } => {
                write!(f, "expected {expected} edges, got {got}")
            }
            Violation::VertexCount { expected, got } => {
                write!(f, "expected {expected} vertices, got {got}")
            }
            Violation::EulerCharacteristic { expected, got } => {
                write!(f, "Euler characteristic {got}, expected {expected}")
            }
            Violation::Disconnected => write!(f, "triangles do not form a connected surface"),
            Violation::SelfGluedEdge { label } => {
                write!(f, "veering triangulation has both sides of {label} in one triangle")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Raw, unchecked triangulation data. Turn it into a [`ColouredTriangulation`] with
/// [`ColouredTriangulation::new`], or inspect it with [`TriangulationParts::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationParts {
    pub names: Vec<String>,
    pub triangles: Vec<[Slot; 3]>,
    pub colours: Vec<Colour>,
    pub genus: usize,
    pub marked: usize,
}

impl TriangulationParts {
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.names.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            for s in tri {
                if s.label.0 >= n {
                    violations.push(Violation::LabelOutOfRange { triangle: t, label: s.label.0 });
                }
            }
        }
        if self.colours.len() != n {
            violations.push(Violation::ColourCount { expected: n, got: self.colours.len() });
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }

        let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
        for tri in &self.triangles {
            for s in tri {
                seen[s.label.0].push(s.forward);
            }
        }
        for (l, flags) in seen.iter().enumerate() {
            if flags.len() != 2 {
                violations.push(Violation::Multiplicity { label: Label(l), count: flags.len() });
            } else if flags[0] == flags[1] {
                violations.push(Violation::Orientability { label: Label(l) });
            }
        }

        let g = self.genus as i64;
        let z = self.marked as i64;
        let want_f = 4 * g - 4 + 2 * z;
        let want_e = 6 * g - 6 + 3 * z;
        if want_f != self.triangles.len() as i64 {
            violations.push(Violation::TriangleCount { expected: want_f, got: self.triangles.len() });
        }
        if want_e != n as i64 {
            violations.push(Violation::EdgeCount { expected: want_e, got: n });
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }

        let pairs = pair_slots(&self.triangles, n).expect("multiplicities checked above");
        if !is_connected(&self.triangles, &pairs) {
            violations.push(Violation::Disconnected);
        }
        let vertices = corner_vertices(&self.triangles, &pairs).len();
        if vertices != self.marked {
            violations.push(Violation::VertexCount { expected: self.marked, got: vertices });
        }
        let chi = vertices as i64 - n as i64 + self.triangles.len() as i64;
        if chi != 2 - 2 * g {
            violations.push(Violation::EulerCharacteristic { expected: 2 - 2 * g, got: chi });
        }
        if violations.is_empty() {
            let t = ColouredTriangulation::from_checked(self.clone(), pairs);
            if t.is_veering() {
                for l in 0..n {
                    let [p, m] = t.pairs[l];
                    if p.triangle == m.triangle {
                        violations.push(Violation::SelfGluedEdge { label: Label(l) });
                    }
                }
            }
        }
        ValidationReport { violations }
    }
}

/// Default label names: a, b, ..., z, then e26, e27, ...
pub fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("e{i}")
    }
}

fn pair_slots(triangles: &[[Slot; 3]], n: usize) -> Option<Vec<[SlotRef; 2]>> {
    let mut pos: Vec<[Option<SlotRef>; 2]> = vec![[None, None]; n];
    for (t, tri) in triangles.iter().enumerate() {
        for (i, s) in tri.iter().enumerate() {
            let k = if s.forward { 0 } else { 1 };
            let entry = pos.get_mut(s.label.0)?;
            if entry[k].is_some() {
                return None;
            }
            entry[k] = Some(SlotRef::new(t, i));
        }
    }
    pos.into_iter()
        .map(|[p, m]| Some([p?, m?]))
        .collect()
}

fn twin_of(triangles: &[[Slot; 3]], pairs: &[[SlotRef; 2]], r: SlotRef) -> SlotRef {
    let s = triangles[r.triangle][r.side];
    let [p, m] = pairs[s.label.0];
    if s.forward {
        m
    } else {
        p
    }
}

fn is_connected(triangles: &[[Slot; 3]], pairs: &[[SlotRef; 2]]) -> bool {
    if triangles.is_empty() {
        return false;
    }
    let mut seen = vec![false; triangles.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(t) = stack.pop() {
        for i in 0..3 {
            let u = twin_of(triangles, pairs, SlotRef::new(t, i)).triangle;
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Corners grouped by vertex, each group listed in walk order. Corner `(t, i)` sits at
/// the start of side `i`; the walk steps across side `i - 1` to the corner at the start
/// of its twin.
fn corner_vertices(triangles: &[[Slot; 3]], pairs: &[[SlotRef; 2]]) -> Vec<Vec<SlotRef>> {
    let mut done = vec![[false; 3]; triangles.len()];
    let mut out = Vec::new();
    for t in 0..triangles.len() {
        for i in 0..3 {
            if done[t][i] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut c = SlotRef::new(t, i);
            while !done[c.triangle][c.side] {
                done[c.triangle][c.side] = true;
                cycle.push(c);
                c = twin_of(triangles, pairs, c.prev());
            }
            out.push(cycle);
        }
    }
    out
}

/// A valid labelled coloured triangulation. Immutable; flips return new values.
#[derive(Clone, Debug)]
pub struct ColouredTriangulation {
    parts: TriangulationParts,
    /// For each label, the slot where it runs forward and the slot where it runs backward.
    pairs: Vec<[SlotRef; 2]>,
}

impl PartialEq for ColouredTriangulation {
    fn eq(&self, other: &Self) -> bool {
        self.parts.triangles == other.parts.triangles && self.parts.colours == other.parts.colours
    }
}

impl Eq for ColouredTriangulation {}

impl ColouredTriangulation {
    pub fn new(parts: TriangulationParts) -> Result<Self> {
        let report = parts.validate();
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        let pairs = pair_slots(&parts.triangles, parts.names.len()).expect("validated");
        Ok(Self::from_checked(parts, pairs))
    }

    fn from_checked(parts: TriangulationParts, pairs: Vec<[SlotRef; 2]>) -> Self {
        ColouredTriangulation { parts, pairs }
    }

    /// Builds a triangulation with default names, inferring genus from the Euler count.
    pub fn from_triangles(triangles: Vec<[Slot; 3]>, colours: Vec<Colour>, marked: usize) -> Result<Self> {
        let f = triangles.len();
        // F = 4g - 4 + 2|Z|
        let g4 = f as i64 + 4 - 2 * marked as i64;
        if g4 < 0 || g4 % 4 != 0 {
            return Err(Error::Invalid(ValidationReport {
                violations: vec![Violation::TriangleCount { expected: -1, got: f }],
            }));
        }
        let names = (0..colours.len()).map(default_name).collect();
        Self::new(TriangulationParts { names, triangles, colours, genus: (g4 / 4) as usize, marked })
    }

    pub fn parts(&self) -> &TriangulationParts {
        &self.parts
    }

    pub fn into_parts(self) -> TriangulationParts {
        self.parts
    }

    pub fn genus(&self) -> usize {
        self.parts.genus
    }

    pub fn marked(&self) -> usize {
        self.parts.marked
    }

    pub fn num_labels(&self) -> usize {
        self.parts.names.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.parts.triangles.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.num_labels()).map(Label)
    }

    pub fn triangles(&self) -> &[[Slot; 3]] {
        &self.parts.triangles
    }

    pub fn name(&self, l: Label) -> &str {
        &self.parts.names[l.0]
    }

    pub fn names(&self) -> &[String] {
        &self.parts.names
    }

    pub fn label_by_name(&self, name: &str) -> Result<Label> {
        self.parts
            .names
            .iter()
            .position(|n| n == name)
            .map(Label)
            .ok_or_else(|| Error::UnknownLabelName(name.to_string()))
    }

    pub fn colour(&self, l: Label) -> Colour {
        self.parts.colours[l.0]
    }

    pub fn colours(&self) -> &[Colour] {
        &self.parts.colours
    }

    pub fn slot(&self, r: SlotRef) -> Slot {
        self.parts.triangles[r.triangle][r.side]
    }

    pub fn slot_colour(&self, r: SlotRef) -> Colour {
        self.colour(self.slot(r).label)
    }

    pub fn triangle_colours(&self, t: usize) -> [Colour; 3] {
        let tri = &self.parts.triangles[t];
        [0, 1, 2].map(|i| self.colour(tri[i].label))
    }

    /// The two slots of a label: forward first, backward second.
    pub fn occurrences(&self, l: Label) -> [SlotRef; 2] {
        self.pairs[l.0]
    }

    pub fn twin(&self, r: SlotRef) -> SlotRef {
        twin_of(&self.parts.triangles, &self.pairs, r)
    }

    /// Vertices as cyclic lists of corners; see the walk described on `corner_vertices`.
    pub fn vertices(&self) -> Vec<Vec<SlotRef>> {
        corner_vertices(&self.parts.triangles, &self.pairs)
    }

    /// Colours of the edge ends met while walking around each vertex.
    pub fn vertex_links(&self) -> Vec<Vec<Colour>> {
        self.vertices()
            .into_iter()
            .map(|cycle| cycle.into_iter().map(|c| self.slot_colour(c.prev())).collect())
            .collect()
    }

    pub fn has_monochromatic_triangle(&self) -> Option<usize> {
        (0..self.num_triangles()).find(|&t| {
            let c = self.triangle_colours(t);
            c[0] == c[1] && c[1] == c[2]
        })
    }

    pub fn is_veering(&self) -> bool {
        self.has_monochromatic_triangle().is_none()
            && self
                .vertex_links()
                .iter()
                .all(|link| link.contains(&Colour::Red) && link.contains(&Colour::Blue))
    }

    pub fn stratum_datum(&self) -> Result<StratumDatum> {
        if !self.is_veering() {
            return Err(Error::NotVeering);
        }
        let kappa = self
            .vertex_links()
            .iter()
            .map(|link| {
                let k = link.len();
                let transitions = (0..k)
                    .filter(|&i| link[i] == Colour::Red && link[(i + 1) % k] == Colour::Blue)
                    .count();
                transitions as i64 - 2
            })
            .collect();
        Ok(StratumDatum { kappa, genus: self.genus() })
    }

    pub fn quad_about(&self, e: Label) -> Result<Quad> {
        if e.0 >= self.num_labels() {
            return Err(Error::UnknownLabel(e.0));
        }
        let [p, m] = self.pairs[e.0];
        if p.triangle == m.triangle {
            return Err(Error::DegenerateQuad(e));
        }
        Ok(Quad { edge: e, a: p.next(), b: p.next().next(), c: m.next(), d: m.next().next() })
    }

    pub fn is_flippable(&self, e: Label, direction: Direction) -> bool {
        let Ok(q) = self.quad_about(e) else {
            return false;
        };
        let [a, b, c, d] = q.sides().map(|r| self.slot_colour(r));
        let (odd, even) = match direction {
            Direction::Forward => (Colour::Blue, Colour::Red),
            Direction::Backward => (Colour::Red, Colour::Blue),
        };
        a == odd && c == odd && b == even && d == even
    }

    pub fn flippable_edges(&self, direction: Direction) -> Vec<Label> {
        self.labels().filter(|&e| self.is_flippable(e, direction)).collect()
    }

    /// Combinatorial flip of `e`; the new diagonal gets colour `outcome`.
    ///
    /// A forward flip followed by a backward flip of the same edge (and vice versa)
    /// restores the slot layout exactly.
    pub fn flip(&self, e: Label, direction: Direction, outcome: Colour) -> Result<Self> {
        if !self.is_flippable(e, direction) {
            return Err(Error::NotFlippable { label: e, direction });
        }
        let q = self.quad_about(e)?;
        let [p, m] = self.pairs[e.0];
        let [a, b, c, d] = q.sides().map(|r| self.slot(r));
        let (first, second) = match direction {
            Direction::Forward => ([d, a], [b, c]),
            Direction::Backward => ([b, c], [d, a]),
        };
        let mut parts = self.parts.clone();
        let e_fwd = Slot { label: e, forward: true };
        let e_bwd = Slot { label: e, forward: false };
        parts.triangles[p.triangle][p.side] = e_fwd;
        parts.triangles[p.triangle][(p.side + 1) % 3] = first[0];
        parts.triangles[p.triangle][(p.side + 2) % 3] = first[1];
        parts.triangles[m.triangle][m.side] = e_bwd;
        parts.triangles[m.triangle][(m.side + 1) % 3] = second[0];
        parts.triangles[m.triangle][(m.side + 2) % 3] = second[1];
        parts.colours[e.0] = outcome;
        let pairs = pair_slots(&parts.triangles, parts.names.len()).expect("flip keeps pairing");
        Ok(Self::from_checked(parts, pairs))
    }

    pub fn with_colours(&self, colours: Vec<Colour>) -> Result<Self> {
        let mut parts = self.parts.clone();
        parts.colours = colours;
        Self::new(parts)
    }

    /// Renames label `l` to `perm[l]`, keeping names attached to their edges.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_labels();
        let mut parts = self.parts.clone();
        for tri in parts.triangles.iter_mut() {
            for s in tri.iter_mut() {
                s.label = Label(perm[s.label.0]);
            }
        }
        let mut names = vec![String::new(); n];
        let mut colours = vec![Colour::Red; n];
        for l in 0..n {
            names[perm[l]] = self.parts.names[l].clone();
            colours[perm[l]] = self.parts.colours[l];
        }
        parts.names = names;
        parts.colours = colours;
        Self::new(parts)
    }

    /// Equality as labelled triangulations, ignoring triangle order and rotation and
    /// the reference direction of each label.
    pub fn same_labelled(&self, other: &Self) -> bool {
        self.parts.colours == other.parts.colours && self.normal_triangles() == other.normal_triangles()
    }

    fn normal_triangles(&self) -> Vec<[Label; 3]> {
        let mut out: Vec<[Label; 3]> = self
            .parts
            .triangles
            .iter()
            .map(|t| {
                let t = t.map(|s| s.label);
                (0..3)
                    .map(|r| [t[r], t[(r + 1) % 3], t[(r + 2) % 3]])
                    .min()
                    .expect("three rotations")
            })
            .collect();
        out.sort();
        out
    }

    pub fn canonical_form(&self) -> CanonicalKey {
        canonical::canonical_form(self)
    }

    pub fn isomorphic(&self, other: &Self) -> bool {
        self.num_labels() == other.num_labels() && self.canonical_form() == other.canonical_form()
    }

    /// Maps from this triangulation's labels to canonical label indices, one per
    /// start attaining the canonical form (several when there are automorphisms).
    pub fn canonical_label_maps(&self) -> Vec<Vec<usize>> {
        canonical::canonical_maps(self)
    }
}

/// Orders of the marked points: each vertex carries `kappa = transitions - 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumDatum {
    pub kappa: Vec<i64>,
    pub genus: usize,
}

impl StratumDatum {
    pub fn total(&self) -> i64 {
        self.kappa.iter().sum()
    }

    /// The multiset of orders, sorted; isomorphism-invariant.
    pub fn sorted(&self) -> Vec<i64> {
        let mut k = self.kappa.clone();
        k.sort_unstable();
        k
    }

    pub fn counts(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &k in &self.kappa {
            *m.entry(k).or_insert(0) += 1;
        }
        m
    }
}

impl fmt::Display for StratumDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sorted().iter().rev().map(|k| k.to_string()).collect();
        write!(f, "Q({})", parts.join(", "))
    }
}
