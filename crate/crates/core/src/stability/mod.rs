//! Outer subsampling loop and stability selection over complexity levels.
//!
//! Each of `J` half-size subsamples yields an archive of best models per
//! complexity level; every archived model is converted to its
//! (constrained) CPDAG, and selection probabilities are aggregated per
//! level into an edge stability graph and a causal-path stability graph.

pub mod output;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cons_dag2cpdag, pair_index, ConstraintSet, Cpdag};
use crate::moea::{search_subset, SearchParams};
use crate::seed::child_seed;
use crate::sem::Dataset;

/// What a stability graph counts per variable pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    /// Any edge between an unordered pair.
    Edge,
    /// A compelled directed path between an ordered pair.
    CausalPath,
}

/// Rank of the unordered pair `(a, b)`, `a < b`, in lexicographic order.
fn unordered_rank(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Selection probabilities per complexity level and variable pair.
#[derive(Debug, Clone)]
pub struct StabilityGraph {
    kind: RelationKind,
    names: Vec<String>,
    /// `levels[c]` is `None` when no subset produced a model with
    /// complexity `c`.
    levels: Vec<Option<LevelProbs>>,
}

#[derive(Debug, Clone)]
pub struct LevelProbs {
    /// Number of subsets contributing a model at this level (the
    /// denominator of every probability in `probs`).
    pub n_models: u32,
    probs: Vec<f64>,
}

impl StabilityGraph {
    fn empty(kind: RelationKind, names: Vec<String>) -> Self {
        let n = names.len();
        let levels = vec![None; n * (n - 1) / 2 + 1];
        Self { kind, names, levels }
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    /// Highest complexity level, `n(n-1)/2`.
    pub fn c_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, c: usize) -> Option<&LevelProbs> {
        self.levels.get(c).and_then(|l| l.as_ref())
    }

    fn pair_slot(&self, a: usize, b: usize) -> usize {
        let n = self.n_vars();
        match self.kind {
            RelationKind::Edge => unordered_rank(n, a.min(b), a.max(b)),
            RelationKind::CausalPath => pair_index(n, a, b),
        }
    }

    /// Selection probability of the pair at level `c`, `None` if the
    /// level is unpopulated. For edge graphs the order of `a`, `b` is
    /// irrelevant; for causal-path graphs the pair is `a` to `b`.
    pub fn prob(&self, c: usize, a: usize, b: usize) -> Option<f64> {
        let slot = self.pair_slot(a, b);
        self.level(c).map(|l| l.probs[slot])
    }

    /// All pairs this graph tracks, in output order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_vars();
        let mut out = Vec::new();
        match self.kind {
            RelationKind::Edge => {
                for a in 0..n {
                    for b in (a + 1)..n {
                        out.push((a, b));
                    }
                }
            }
            RelationKind::CausalPath => {
                for a in 0..n {
                    for b in 0..n {
                        if a != b {
                            out.push((a, b));
                        }
                    }
                }
            }
        }
        out
    }

    /// Averages several runs (equal weight per contributing run at each
    /// level); `n_models` becomes the number of contributing runs.
    pub fn average(graphs: &[&StabilityGraph]) -> Result<StabilityGraph> {
        let first = graphs.first().ok_or_else(|| {
            Error::Structural("cannot average zero stability graphs".into())
        })?;
        let mut out = StabilityGraph::empty(first.kind, first.names.to_vec());
        for g in graphs {
            if g.kind != first.kind || g.names != first.names {
                return Err(Error::Structural(
                    "stability graphs to average do not match".into(),
                ));
            }
        }
        for c in 0..out.levels.len() {
            let contributing: Vec<&LevelProbs> =
                graphs.iter().filter_map(|g| g.level(c)).collect();
            if contributing.is_empty() {
                continue;
            }
            let m = contributing[0].probs.len();
            let mut probs = vec![0.0; m];
            for l in &contributing {
                for (acc, p) in probs.iter_mut().zip(&l.probs) {
                    *acc += p;
                }
            }
            for p in probs.iter_mut() {
                *p /= contributing.len() as f64;
            }
            out.levels[c] = Some(LevelProbs {
                n_models: contributing.len() as u32,
                probs,
            });
        }
        Ok(out)
    }
}

/// Mean BIC of the archived model per complexity level.
#[derive(Debug, Clone)]
pub struct BicCurve {
    levels: Vec<Option<(f64, u32)>>,
}

impl BicCurve {
    pub fn c_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn mean(&self, c: usize) -> Option<f64> {
        self.levels.get(c).and_then(|l| l.map(|(m, _)| m))
    }

    pub fn count(&self, c: usize) -> u32 {
        self.levels
            .get(c)
            .and_then(|l| l.map(|(_, k)| k))
            .unwrap_or(0)
    }

    /// Averages curves level-wise over contributing runs.
    pub fn average(curves: &[&BicCurve]) -> Result<BicCurve> {
        let first = curves
            .first()
            .ok_or_else(|| Error::Structural("cannot average zero curves".into()))?;
        let mut levels = vec![None; first.levels.len()];
        for (c, slot) in levels.iter_mut().enumerate() {
            let vals: Vec<f64> = curves.iter().filter_map(|k| k.mean(c)).collect();
            if !vals.is_empty() {
                *slot = Some((
                    vals.iter().sum::<f64>() / vals.len() as f64,
                    vals.len() as u32,
                ));
            }
        }
        Ok(BicCurve { levels })
    }
}

/// Selection thresholds: probability cutoff and complexity cutoff.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    pub pi_sel: f64,
    pub pi_bic: usize,
}

impl Thresholds {
    pub fn validate(&self, c_max: usize) -> Result<()> {
        if !(self.pi_sel > 0.0 && self.pi_sel < 1.0) {
            return Err(Error::Config(format!(
                "pi_sel must lie in (0, 1), got {}",
                self.pi_sel
            )));
        }
        if self.pi_bic > c_max {
            return Err(Error::Config(format!(
                "pi_bic {} exceeds maximum complexity {c_max}",
                self.pi_bic
            )));
        }
        Ok(())
    }
}

/// An edge of the inferred model. Directed edges point `from -> to`;
/// undirected edges are normalized to `from < to`.
#[derive(Debug, Clone, PartialEq)]
pub struct InferredEdge {
    pub from: usize,
    pub to: usize,
    pub directed: bool,
    pub reliability: f64,
}

/// The visualization-phase output: relevant edges with orientations from
/// background knowledge and relevant causal paths.
#[derive(Debug, Clone)]
pub struct InferredModel {
    pub names: Vec<String>,
    pub edges: Vec<InferredEdge>,
}

/// Outer-loop settings.
#[derive(Debug, Clone)]
pub struct RunParams {
    /// Number of subsampling iterations (J).
    pub subsets: usize,
    pub search: SearchParams,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            subsets: 100,
            search: SearchParams::default(),
        }
    }
}

/// Everything a search run produces before thresholding.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub edge: StabilityGraph,
    pub path: StabilityGraph,
    pub bic: BicCurve,
    pub subsets_total: usize,
    pub subsets_failed: usize,
}

/// Draws `floor(N/2)` distinct rows uniformly without replacement.
pub fn subsample<R: Rng>(data: &Dataset, rng: &mut R) -> Result<Dataset> {
    let n = data.n_rows();
    let p = data.n_vars();
    if n < 2 * (p + 2) {
        return Err(Error::Config(format!(
            "need at least 2(p+2) = {} rows to subsample, got {n}",
            2 * (p + 2)
        )));
    }
    let mut rows = rand::seq::index::sample(rng, n, n / 2).into_vec();
    rows.sort_unstable();
    data.select_rows(&rows)
}

/// The model at one complexity level of one subset, after CPDAG
/// conversion.
#[derive(Debug, Clone)]
pub struct LevelModel {
    pub complexity: usize,
    pub cpdag: Cpdag,
    pub bic: f64,
}

/// Folds per-subset level models into the two stability graphs and the
/// BIC curve. The denominator at each level is the number of subsets
/// contributing a model there.
pub fn aggregate(
    names: &[String],
    per_subset: &[Vec<LevelModel>],
) -> (StabilityGraph, StabilityGraph, BicCurve) {
    let n = names.len();
    let c_max = n * (n - 1) / 2;
    let n_unordered = c_max;
    let n_ordered = n * (n - 1);

    let mut level_count = vec![0u32; c_max + 1];
    let mut bic_sum = vec![0.0f64; c_max + 1];
    let mut edge_count = vec![vec![0u32; n_unordered]; c_max + 1];
    let mut path_count = vec![vec![0u32; n_ordered]; c_max + 1];

    for subset in per_subset {
        for lm in subset {
            let c = lm.complexity;
            level_count[c] += 1;
            bic_sum[c] += lm.bic;
            for a in 0..n {
                for b in (a + 1)..n {
                    if lm.cpdag.has_edge_between(a, b) {
                        edge_count[c][unordered_rank(n, a, b)] += 1;
                    }
                }
            }
            // one BFS per source over the compelled subgraph
            let children = lm.cpdag.compelled_children();
            for src in 0..n {
                let mut seen = vec![false; n];
                let mut stack = vec![src];
                while let Some(v) = stack.pop() {
                    for &w in &children[v] {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                for dst in 0..n {
                    if dst != src && seen[dst] {
                        path_count[c][pair_index(n, src, dst)] += 1;
                    }
                }
            }
        }
    }

    let mut edge = StabilityGraph::empty(RelationKind::Edge, names.to_vec());
    let mut path = StabilityGraph::empty(RelationKind::CausalPath, names.to_vec());
    let mut bic_levels = vec![None; c_max + 1];
    for c in 0..=c_max {
        let k = level_count[c];
        if k == 0 {
            continue;
        }
        edge.levels[c] = Some(LevelProbs {
            n_models: k,
            probs: edge_count[c].iter().map(|&x| x as f64 / k as f64).collect(),
        });
        path.levels[c] = Some(LevelProbs {
            n_models: k,
            probs: path_count[c].iter().map(|&x| x as f64 / k as f64).collect(),
        });
        bic_levels[c] = Some((bic_sum[c] / k as f64, k));
    }
    (edge, path, BicCurve { levels: bic_levels })
}

/// Runs the full search phase: `J` independent subsample searches, CPDAG
/// conversion, and aggregation into stability graphs.
///
/// Each subset owns an RNG stream derived from `(seed, subset index)`,
/// so the outcome is identical for any worker count. Subsets whose
/// covariance is degenerate are recorded as failed and excluded from the
/// denominators; the run aborts if more than 20% fail.
pub fn run_search(
    data: &Dataset,
    constraints: &ConstraintSet,
    params: &RunParams,
    seed: u64,
) -> Result<SearchOutcome> {
    params.search.validate()?;
    if params.subsets == 0 {
        return Err(Error::Config("need at least one subset".into()));
    }
    if constraints.n() != data.n_vars() {
        return Err(Error::Structural(format!(
            "constraints sized for {} variables, data has {}",
            constraints.n(),
            data.n_vars()
        )));
    }
    // fail early on impossible subsampling instead of J times in workers
    {
        let mut probe = ChaCha8Rng::seed_from_u64(child_seed(seed, 0));
        subsample(data, &mut probe)?;
    }

    let results: Vec<Result<Vec<LevelModel>>> = (0..params.subsets)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, j as u64));
            let sub = subsample(data, &mut rng)?;
            let archive = search_subset(&sub, constraints, &params.search, &mut rng)?;
            archive
                .levels()
                .map(|(c, m)| {
                    Ok(LevelModel {
                        complexity: c,
                        cpdag: cons_dag2cpdag(&m.dag, constraints)?,
                        bic: m.bic,
                    })
                })
                .collect()
        })
        .collect();

    let mut per_subset = Vec::with_capacity(results.len());
    let mut failed = 0usize;
    for r in results {
        match r {
            Ok(levels) => per_subset.push(levels),
            Err(Error::DegenerateData(_)) => failed += 1,
            Err(other) => return Err(other),
        }
    }
    if failed * 5 > params.subsets {
        return Err(Error::RunQuality(format!(
            "{failed} of {} subsets failed to fit",
            params.subsets
        )));
    }
    let (edge, path, bic) = aggregate(data.names(), &per_subset);
    Ok(SearchOutcome {
        edge,
        path,
        bic,
        subsets_total: params.subsets,
        subsets_failed: failed,
    })
}

/// The complexity level with the minimum mean BIC; ties go to the
/// smaller level. The curve must be populated at one level at least.
pub fn pick_pi_bic(curve: &BicCurve) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for c in 0..=curve.c_max() {
        if let Some(m) = curve.mean(c) {
            if best.map_or(true, |(_, b)| m < b) {
                best = Some((c, m));
            }
        }
    }
    best.expect("BIC curve populated at no level").0
}

/// Highest selection probability of the pair over complexity levels up
/// to and including `pi_bic`; a relation is relevant iff this score
/// reaches `pi_sel`.
pub fn relevance_score(graph: &StabilityGraph, a: usize, b: usize, pi_bic: usize) -> f64 {
    let mut best = 0.0f64;
    for c in 0..=pi_bic.min(graph.c_max()) {
        if let Some(p) = graph.prob(c, a, b) {
            best = best.max(p);
        }
    }
    best
}

/// Combines the stability graphs into a model: every relevant edge is
/// included with its relevance score as reliability, oriented by
/// background knowledge first and by relevant causal paths second.
/// Conflicting path evidence leaves the edge undirected.
pub fn infer_model(
    edge: &StabilityGraph,
    path: &StabilityGraph,
    constraints: &ConstraintSet,
    thresholds: &Thresholds,
) -> InferredModel {
    let n = edge.n_vars();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let reliability = relevance_score(edge, a, b, thresholds.pi_bic);
            if reliability < thresholds.pi_sel {
                continue;
            }
            let a_to_b_forbidden = constraints.is_forbidden(a, b);
            let b_to_a_forbidden = constraints.is_forbidden(b, a);
            let (from, to, directed) = if b_to_a_forbidden && !a_to_b_forbidden {
                (a, b, true)
            } else if a_to_b_forbidden && !b_to_a_forbidden {
                (b, a, true)
            } else {
                let fwd = relevance_score(path, a, b, thresholds.pi_bic) >= thresholds.pi_sel;
                let rev = relevance_score(path, b, a, thresholds.pi_bic) >= thresholds.pi_sel;
                match (fwd, rev) {
                    (true, false) => (a, b, true),
                    (false, true) => (b, a, true),
                    _ => (a, b, false),
                }
            };
            edges.push(InferredEdge {
                from,
                to,
                directed,
                reliability,
            });
        }
    }
    InferredModel {
        names: edge.names().to_vec(),
        edges,
    }
}
