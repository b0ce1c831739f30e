use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{expected_dimension, is_core, width_cone};
use crate::triangulation::{CanonicalKey, Colour, ColouredTriangulation, Direction, Label, Slot};

/// Largest edge count accepted by [`enumerate_core_graph`].
pub const ENUMERATION_LIMIT: usize = 9;

#[derive(Clone, Debug, Serialize)]
pub struct CoreNode {
    pub key: CanonicalKey,
    pub stratum: Vec<i64>,
    #[serde(skip)]
    pub triangulation: ColouredTriangulation,
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumComponents {
    pub stratum: Vec<i64>,
    pub nodes: usize,
    pub arcs: usize,
    pub scc_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreGraph {
    pub genus: usize,
    pub marked: usize,
    /// Isomorphism classes of veering triangulations, core or not.
    pub veering_classes: usize,
    pub nodes: Vec<CoreNode>,
    pub arcs: Vec<(usize, usize)>,
    pub strata: Vec<StratumComponents>,
}

impl CoreGraph {
    pub fn scc_count(&self) -> usize {
        self.strata.iter().map(|s| s.scc_count).sum()
    }

    pub fn strongly_connected_per_stratum(&self) -> bool {
        self.strata.iter().all(|s| s.scc_count == 1)
    }
}

/// Every way of gluing the sides of `faces` triangles in pairs, excluding pairs within
/// one triangle. Labels are numbered in order of first appearance.
fn gluings(faces: usize, out: &mut Vec<Vec<[Slot; 3]>>) {
    fn go(open: &mut Vec<Option<Slot>>, next_label: usize, out: &mut Vec<Vec<[Slot; 3]>>) {
        let Some(i) = open.iter().position(Option::is_none) else {
            let triangles = open.chunks(3).map(|c| [c[0].unwrap(), c[1].unwrap(), c[2].unwrap()]).collect();
            out.push(triangles);
            return;
        };
        open[i] = Some(Slot::new(next_label, true));
        for j in i + 1..open.len() {
            if open[j].is_some() || j / 3 == i / 3 {
                continue;
            }
            open[j] = Some(Slot::new(next_label, false));
            go(open, next_label + 1, out);
            open[j] = None;
        }
        open[i] = None;
    }
    go(&mut vec![None; 3 * faces], 0, out);
}

/// Representatives of the uncoloured triangulations of genus `g` with `marked` vertices.
fn shapes(g: usize, marked: usize) -> Vec<ColouredTriangulation> {
    let edges = 6 * g + 3 * marked - 6;
    let faces = 2 * edges / 3;
    let mut all = Vec::new();
    gluings(faces, &mut all);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for triangles in all {
        let Ok(t) = ColouredTriangulation::from_triangles(triangles, vec![Colour::Red; edges], marked) else {
            continue;
        };
        if t.genus() == g && seen.insert(t.canonical_form()) {
            out.push(t);
        }
    }
    out
}

/// True when some point of the width cone's interior gives the forward flip of `e`
/// the colour `outcome`, i.e. some vertex cycle strictly prefers it.
fn realisable(t: &ColouredTriangulation, e: Label, outcome: Colour) -> Result<bool> {
    let q = t.quad_about(e)?;
    let a = t.slot(q.a).label.0;
    let d = t.slot(q.d).label.0;
    let cycles = width_cone(t)?.vertex_cycles()?;
    Ok(cycles.rays.iter().any(|v| match outcome {
        Colour::Red => v[d] > v[a],
        Colour::Blue => v[a] > v[d],
    }))
}

fn core_of(t: &ColouredTriangulation) -> Result<bool> {
    is_core(t, expected_dimension(t)?)
}

/// Enumerates the veering triangulations of genus `g` with `marked` vertices up to
/// isomorphism and builds the directed graph of realisable forward flips between the
/// core ones, with strongly connected components counted per stratum.
pub fn enumerate_core_graph(g: usize, marked: usize) -> Result<CoreGraph> {
    let edges = (6 * g + 3 * marked) as i64 - 6;
    if edges <= 0 {
        return Err(Error::Geometry(format!("no triangulations with genus {g} and {marked} vertices")));
    }
    if edges as usize > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { edges: edges as usize, limit: ENUMERATION_LIMIT });
    }
    let n = edges as usize;
    let mut veering = BTreeMap::new();
    for shape in shapes(g, marked) {
        for mask in 0u32..1 << n {
            let colours = (0..n).map(|i| if mask >> i & 1 == 1 { Colour::Blue } else { Colour::Red }).collect();
            let Ok(t) = shape.with_colours(colours) else { continue };
            if t.is_veering() {
                veering.entry(t.canonical_form()).or_insert(t);
            }
        }
    }
    let veering_classes = veering.len();

    let mut nodes = Vec::new();
    for (key, t) in veering {
        if core_of(&t)? {
            let stratum = t.stratum_datum()?.sorted();
            nodes.push(CoreNode { key, stratum, triangulation: t });
        }
    }
    let index: HashMap<CanonicalKey, usize> = nodes.iter().enumerate().map(|(i, n)| (n.key.clone(), i)).collect();
    let mut arcs = BTreeSet::new();
    for (i, node) in nodes.iter().enumerate() {
        let t = &node.triangulation;
        for e in t.flippable_edges(Direction::Forward) {
            for outcome in [Colour::Red, Colour::Blue] {
                if !realisable(t, e, outcome)? {
                    continue;
                }
                let u = t.flip(e, Direction::Forward, outcome)?;
                if let Some(&j) = index.get(&u.canonical_form()) {
                    arcs.insert((i, j));
                }
            }
        }
    }
    let arcs: Vec<(usize, usize)> = arcs.into_iter().collect();

    let mut by_stratum: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        by_stratum.entry(node.stratum.clone()).or_default().push(i);
    }
    let strata = by_stratum
        .into_iter()
        .map(|(stratum, members)| {
            let mut graph = DiGraph::<usize, ()>::new();
            let local: HashMap<usize, _> = members.iter().map(|&m| (m, graph.add_node(m))).collect();
            let mut count = 0;
            for &(i, j) in &arcs {
                if let (Some(&a), Some(&b)) = (local.get(&i), local.get(&j)) {
                    graph.add_edge(a, b, ());
                    count += 1;
                }
            }
            StratumComponents { stratum, nodes: members.len(), arcs: count, scc_count: tarjan_scc(&graph).len() }
        })
        .collect();
    Ok(CoreGraph { genus: g, marked, veering_classes, nodes, arcs, strata })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn torus_has_two_classes() {
        let graph = enumerate_core_graph(1, 1).unwrap();
        assert_eq!(graph.veering_classes, 2);
        assert_eq!(graph.nodes.len(), 2);
        assert!(graph.strongly_connected_per_stratum());
        let keys: Vec<_> = graph.nodes.iter().map(|n| n.key.clone()).collect();
        assert!(keys.contains(&fixtures::torus().canonical_form()));
        assert!(keys.contains(&fixtures::torus_blue().canonical_form()));
    }

    #[test]
    fn arcs_stay_in_their_stratum() {
        let graph = enumerate_core_graph(0, 4).unwrap();
        assert!(graph.nodes.iter().any(|n| n.key == fixtures::pillowcase().canonical_form()));
        for &(i, j) in &graph.arcs {
            assert_eq!(graph.nodes[i].stratum, graph.nodes[j].stratum);
        }
        assert!(graph.strongly_connected_per_stratum(), "{:?}", graph.strata);
    }

    #[test]
    fn large_requests_are_refused() {
        assert!(matches!(enumerate_core_graph(2, 2), Err(Error::TooLarge { edges: 12, limit: 9 })));
    }
}
