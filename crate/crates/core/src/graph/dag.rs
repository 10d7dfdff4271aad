//! Directed acyclic graph genotype over an ordered-pair bit vector.

use rand::seq::SliceRandom;
use rand::Rng;

use super::ConstraintSet;
use crate::error::{Error, Result};

/// Slot of the ordered pair `(from, to)` in a bit vector of length `n(n-1)`.
///
/// Pairs are laid out row-major by source node with the diagonal skipped.
#[inline]
pub fn pair_index(n: usize, from: usize, to: usize) -> usize {
    debug_assert!(from != to && from < n && to < n);
    from * (n - 1) + if to < from { to } else { to - 1 }
}

/// Inverse of [`pair_index`].
#[inline]
pub fn pair_from_index(n: usize, idx: usize) -> (usize, usize) {
    let from = idx / (n - 1);
    let rest = idx % (n - 1);
    let to = if rest < from { rest } else { rest + 1 };
    (from, to)
}

/// A directed acyclic graph encoded as one boolean per ordered node pair.
///
/// This is the genotype manipulated by the search. The invariants
/// (acyclic, at most one direction per pair, constraint-consistent) are
/// established by the constructors and by [`repair`]; the raw vectors
/// produced by crossover and mutation are not `Dag`s until repaired.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    n: usize,
    bits: Vec<bool>,
}

impl Dag {
    /// The graph with no arcs.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            bits: vec![false; n * (n - 1)],
        }
    }

    /// Validates a raw bit vector as a DAG (length, single direction per
    /// pair, acyclicity).
    pub fn from_bits(n: usize, bits: Vec<bool>) -> Result<Self> {
        check_len(&bits, n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if bits[pair_index(n, i, j)] && bits[pair_index(n, j, i)] {
                    return Err(Error::Structural(format!(
                        "both directions set for pair ({i}, {j})"
                    )));
                }
            }
        }
        if !is_acyclic(&bits, n)? {
            return Err(Error::Structural("graph contains a directed cycle".into()));
        }
        Ok(Self { n, bits })
    }

    /// Convenience constructor from an arc list.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut bits = vec![false; n * (n - 1)];
        for &(a, b) in arcs {
            if a == b || a >= n || b >= n {
                return Err(Error::Structural(format!("invalid arc ({a}, {b})")));
            }
            bits[pair_index(n, a, b)] = true;
        }
        Self::from_bits(n, bits)
    }

    /// The complete DAG whose arcs all point from earlier to later in
    /// `order` (a permutation of the nodes).
    pub fn complete_from_order(order: &[usize]) -> Self {
        let n = order.len();
        let mut bits = vec![false; n * (n - 1)];
        for i in 0..n {
            for j in (i + 1)..n {
                bits[pair_index(n, order[i], order[j])] = true;
            }
        }
        Self { n, bits }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.bits[pair_index(self.n, from, to)]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a)
    }

    pub fn arc_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Arcs as `(from, to)` pairs in bit-slot order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(idx, _)| pair_from_index(n, idx))
    }

    /// Adjacent unordered pairs, each with the smaller index first.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.is_adjacent(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn parents_of(&self, node: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&p| p != node && self.has_arc(p, node))
            .collect()
    }

    pub fn children_of(&self, node: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&c| c != node && self.has_arc(node, c))
            .collect()
    }

    /// Kahn topological order, ties broken by ascending node index.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.n;
        let mut indeg = vec![0usize; n];
        for (_, to) in self.arcs() {
            indeg[to] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        // ready kept sorted descending so pop() yields the smallest index
        ready.sort_unstable_by(|a, b| b.cmp(a));
        while let Some(v) = ready.pop() {
            order.push(v);
            for c in self.children_of(v) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    let at = ready
                        .binary_search_by(|x| c.cmp(x))
                        .unwrap_or_else(|at| at);
                    ready.insert(at, c);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "Dag invariant violated: cycle present");
        order
    }
}

fn check_len(bits: &[bool], n: usize) -> Result<()> {
    if n < 1 || bits.len() != n * (n - 1) {
        return Err(Error::Structural(format!(
            "bit vector length {} does not match n(n-1) = {} for n = {}",
            bits.len(),
            n.saturating_mul(n.saturating_sub(1)),
            n
        )));
    }
    Ok(())
}

/// True iff the directed graph encoded by `bits` has no directed cycle.
pub fn is_acyclic(bits: &[bool], n: usize) -> Result<bool> {
    check_len(bits, n)?;
    let mut indeg = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for (idx, &b) in bits.iter().enumerate() {
        if b {
            let (from, to) = pair_from_index(n, idx);
            indeg[to] += 1;
            children[from].push(to);
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &c in &children[v] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(c);
            }
        }
    }
    Ok(seen == n)
}

// Whether `to` can already reach `from` through `children`, in which case
// adding the arc (from, to) would close a cycle.
fn closes_cycle(children: &[Vec<usize>], from: usize, to: usize) -> bool {
    let mut stack = vec![to];
    let mut seen = vec![false; children.len()];
    while let Some(v) = stack.pop() {
        if v == from {
            return true;
        }
        if seen[v] {
            continue;
        }
        seen[v] = true;
        stack.extend(children[v].iter().copied());
    }
    false
}

/// Draws a random DAG consistent with `constraints`.
///
/// Every ordered pair is considered once, in a uniformly shuffled order,
/// with inclusion probability 0.5; an arc is kept only if its reverse is
/// absent, it is not forbidden, and it does not close a cycle.
pub fn random_dag<R: Rng>(n: usize, constraints: &ConstraintSet, rng: &mut R) -> Dag {
    let mut slots: Vec<usize> = (0..n * (n - 1)).collect();
    slots.shuffle(rng);
    let mut bits = vec![false; n * (n - 1)];
    let mut children = vec![Vec::new(); n];
    for idx in slots {
        let coin = rng.gen_bool(0.5);
        let (from, to) = pair_from_index(n, idx);
        if coin
            && !constraints.is_forbidden(from, to)
            && !bits[pair_index(n, to, from)]
            && !closes_cycle(&children, from, to)
        {
            bits[idx] = true;
            children[from].push(to);
        }
    }
    Dag { n, bits }
}

/// Restores a raw genotype to a valid constraint-consistent DAG by
/// clearing bits only (never flipping), so the result is a subgraph of
/// the input:
///
/// 1. constraint-forbidden bits are cleared;
/// 2. for each pair with both directions set, one side is cleared
///    uniformly at random;
/// 3. remaining arcs are visited in a uniformly shuffled order and any
///    arc that would close a cycle given the arcs kept so far is cleared.
pub fn repair<R: Rng>(
    bits: &[bool],
    n: usize,
    constraints: &ConstraintSet,
    rng: &mut R,
) -> Result<Dag> {
    check_len(bits, n)?;
    let mut bits = bits.to_vec();
    for &(a, b) in constraints.iter() {
        bits[pair_index(n, a, b)] = false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let ij = pair_index(n, i, j);
            let ji = pair_index(n, j, i);
            if bits[ij] && bits[ji] {
                if rng.gen_bool(0.5) {
                    bits[ij] = false;
                } else {
                    bits[ji] = false;
                }
            }
        }
    }
    let mut set: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
    set.shuffle(rng);
    let mut children = vec![Vec::new(); n];
    for idx in set {
        let (from, to) = pair_from_index(n, idx);
        if closes_cycle(&children, from, to) {
            bits[idx] = false;
        } else {
            children[from].push(to);
        }
    }
    Ok(Dag { n, bits })
}
