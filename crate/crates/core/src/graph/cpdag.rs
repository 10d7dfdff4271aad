//! Equivalence-class representation: compelled/reversible edge labeling.

use std::collections::BTreeSet;

use super::{ConstraintSet, Dag};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    Compelled,
    Reversible,
}

/// One labeled edge. Reversible edges are normalized to `from < to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CpdagEdge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// A partially directed graph in which every edge is labeled compelled
/// (oriented identically in every member of the equivalence class) or
/// reversible (orientation varies across members).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpdag {
    n: usize,
    edges: Vec<CpdagEdge>,
}

impl Cpdag {
    /// Builds a CPDAG from explicit edges, checking that indices are in
    /// range, no pair appears twice, reversible edges are normalized,
    /// and the compelled subgraph is acyclic.
    pub fn from_edges(n: usize, mut edges: Vec<CpdagEdge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut compelled_bits = vec![false; (n * (n - 1)).max(0)];
        for e in &edges {
            if e.from >= n || e.to >= n || e.from == e.to {
                return Err(Error::Structural(format!(
                    "edge ({}, {}) out of range",
                    e.from, e.to
                )));
            }
            if e.label == EdgeLabel::Reversible && e.from > e.to {
                return Err(Error::Structural(format!(
                    "reversible edge ({}, {}) must be stored with from < to",
                    e.from, e.to
                )));
            }
            let pair = (e.from.min(e.to), e.from.max(e.to));
            if !seen.insert(pair) {
                return Err(Error::Structural(format!(
                    "duplicate edge between {} and {}",
                    pair.0, pair.1
                )));
            }
            if e.label == EdgeLabel::Compelled {
                compelled_bits[super::pair_index(n, e.from, e.to)] = true;
            }
        }
        if !super::is_acyclic(&compelled_bits, n)? {
            return Err(Error::Structural(
                "compelled subgraph contains a directed cycle".into(),
            ));
        }
        edges.sort_unstable();
        Ok(Self { n, edges })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[CpdagEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True iff any edge (either label, either direction) joins `a` and `b`.
    pub fn has_edge_between(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a))
    }

    /// True iff the compelled arc `from -> to` is present.
    pub fn has_compelled(&self, from: usize, to: usize) -> bool {
        self.edges
            .iter()
            .any(|e| e.label == EdgeLabel::Compelled && e.from == from && e.to == to)
    }

    /// Adjacent unordered pairs, smaller index first.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Children per node in the compelled subgraph.
    pub fn compelled_children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n];
        for e in &self.edges {
            if e.label == EdgeLabel::Compelled {
                ch[e.from].push(e.to);
            }
        }
        ch
    }

    /// True iff `dst` is reachable from `src` along compelled edges only.
    pub fn directed_reachable(&self, src: usize, dst: usize) -> Result<bool> {
        if src >= self.n || dst >= self.n {
            return Err(Error::Structural(format!(
                "node index out of range: ({src}, {dst}) with n = {}",
                self.n
            )));
        }
        if src == dst {
            return Err(Error::Structural(
                "reachability query requires distinct endpoints".into(),
            ));
        }
        let children = self.compelled_children();
        let mut stack = vec![src];
        let mut seen = vec![false; self.n];
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                if c == dst {
                    return Ok(true);
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        Ok(false)
    }
}

/// Chickering's total edge ordering: nodes are ranked topologically
/// (ties by ascending index); for each head node in that order, incoming
/// edges are emitted from the highest-ranked tail down.
fn order_edges(g: &Dag) -> Vec<(usize, usize)> {
    let topo = g.topological_order();
    let mut pos = vec![0usize; g.n()];
    for (p, &v) in topo.iter().enumerate() {
        pos[v] = p;
    }
    let mut ordered = Vec::with_capacity(g.arc_count());
    for &y in &topo {
        let mut parents = g.parents_of(y);
        parents.sort_unstable_by(|a, b| pos[*b].cmp(&pos[*a]));
        for x in parents {
            ordered.push((x, y));
        }
    }
    ordered
}

#[derive(Clone, Copy, PartialEq)]
enum Mark {
    Unknown,
    Compelled,
    Reversible,
}

/// Converts a DAG into the CPDAG of its equivalence class, restricted by
/// background knowledge: edges matched by a constraint are pre-labeled
/// compelled in the constraint-consistent direction before the standard
/// labeling sweep runs over the remaining edges.
pub fn cons_dag2cpdag(g: &Dag, constraints: &ConstraintSet) -> Result<Cpdag> {
    for (a, b) in g.arcs() {
        if constraints.is_forbidden(a, b) {
            return Err(Error::Contract(format!(
                "graph contains forbidden arc {a} -> {b}"
            )));
        }
    }
    let ordered = order_edges(g);
    let mut mark = vec![Mark::Unknown; ordered.len()];

    // An arc x -> y matches the constraint (y -/-> x); it can only ever
    // point this way, so it is compelled before the sweep starts.
    for (k, &(x, y)) in ordered.iter().enumerate() {
        if constraints.is_forbidden(y, x) {
            mark[k] = Mark::Compelled;
        }
    }

    let label_into =
        |head: usize, with: Mark, mark: &mut Vec<Mark>, ordered: &[(usize, usize)]| {
            for (k, &(_, y)) in ordered.iter().enumerate() {
                if y == head && mark[k] == Mark::Unknown {
                    mark[k] = with;
                }
            }
        };

    while let Some(cur) = mark.iter().position(|&m| m == Mark::Unknown) {
        let (x, y) = ordered[cur];
        let mut resolved = false;
        for k in 0..ordered.len() {
            if mark[k] != Mark::Compelled || ordered[k].1 != x {
                continue;
            }
            let w = ordered[k].0;
            if !g.has_arc(w, y) {
                label_into(y, Mark::Compelled, &mut mark, &ordered);
                resolved = true;
                break;
            }
            let wy = ordered
                .iter()
                .position(|&e| e == (w, y))
                .expect("w is a parent of y");
            debug_assert!(mark[wy] != Mark::Reversible);
            mark[wy] = Mark::Compelled;
        }
        if resolved {
            continue;
        }
        let has_external_parent = g
            .parents_of(y)
            .iter()
            .any(|&z| z != x && !g.has_arc(z, x));
        let with = if has_external_parent {
            Mark::Compelled
        } else {
            Mark::Reversible
        };
        label_into(y, with, &mut mark, &ordered);
    }

    let edges = ordered
        .iter()
        .zip(&mark)
        .map(|(&(x, y), &m)| match m {
            Mark::Compelled => CpdagEdge {
                from: x,
                to: y,
                label: EdgeLabel::Compelled,
            },
            Mark::Reversible => CpdagEdge {
                from: x.min(y),
                to: x.max(y),
                label: EdgeLabel::Reversible,
            },
            Mark::Unknown => unreachable!("sweep labels every edge"),
        })
        .collect();
    Cpdag::from_edges(g.n(), edges)
}

/// The v-structures of `g`: triples `(x, y, z)` with `x -> y <- z`,
/// `x < z`, and `x`, `z` non-adjacent.
pub fn v_structures(g: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for y in 0..g.n() {
        let parents = g.parents_of(y);
        for (i, &x) in parents.iter().enumerate() {
            for &z in &parents[i + 1..] {
                if !g.is_adjacent(x, z) {
                    out.insert((x.min(z), y, x.max(z)));
                }
            }
        }
    }
    out
}

/// Brute-force enumeration of the Markov equivalence class of `g`: all
/// acyclic orientations of its skeleton with identical v-structures.
/// Exponential in the edge count, intended as a small-graph oracle.
pub fn enumerate_equivalence_class(g: &Dag) -> Result<Vec<Dag>> {
    if g.n() > 5 {
        return Err(Error::Unsupported(format!(
            "equivalence-class enumeration limited to 5 nodes, got {}",
            g.n()
        )));
    }
    let skeleton = g.skeleton();
    let targets = v_structures(g);
    let n = g.n();
    let mut members = Vec::new();
    for mask in 0u32..(1 << skeleton.len()) {
        let arcs: Vec<(usize, usize)> = skeleton
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| if mask >> k & 1 == 0 { (a, b) } else { (b, a) })
            .collect();
        let Ok(candidate) = Dag::from_arcs(n, &arcs) else {
            continue;
        };
        if v_structures(&candidate) == targets {
            members.push(candidate);
        }
    }
    Ok(members)
}
