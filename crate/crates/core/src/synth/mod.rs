//! Ground-truth SEM data generation and structure-recovery evaluation.
//!
//! A benchmark run draws datasets from a known linear-Gaussian network,
//! runs the full stability search on each, and scores how well the
//! stability graphs recover the edges and causal paths of the true
//! model's CPDAG, via ROC curves swept over the selection threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cons_dag2cpdag, ConstraintSet, Dag};
use crate::seed::child_seed;
use crate::sem::Dataset;
use crate::stability::{
    pick_pi_bic, relevance_score, run_search, BicCurve, RunParams, StabilityGraph,
};

/// Declarative ground-truth description, loadable from JSON. Arcs and
/// constraints reference variables by name; coefficients (aligned with
/// `arcs`) and noise variances are optional and get defaults when
/// instantiated.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct TruthSpec {
    pub names: Vec<String>,
    pub arcs: Vec<(String, String)>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub noise_variances: Option<Vec<f64>>,
    #[serde(default)]
    pub constraints: Vec<(String, String)>,
}

impl TruthSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Config(format!("unknown variable `{name}` in ground truth")))
    }

    /// Resolves names and fills in defaults: unspecified coefficients
    /// are drawn uniformly from +/-[0.5, 1.5] (sign by coin flip, in arc
    /// order), unspecified noise variances are 1.0.
    pub fn instantiate<R: Rng>(&self, rng: &mut R) -> Result<GroundTruth> {
        let p = self.names.len();
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for (from, to) in &self.arcs {
            arcs.push((self.index_of(from)?, self.index_of(to)?));
        }
        let dag = Dag::from_arcs(p, &arcs)?;
        let coefficients = match &self.coefficients {
            Some(c) => {
                if c.len() != arcs.len() {
                    return Err(Error::Config(format!(
                        "{} coefficients for {} arcs",
                        c.len(),
                        arcs.len()
                    )));
                }
                c.clone()
            }
            None => arcs
                .iter()
                .map(|_| {
                    let magnitude = rng.gen_range(0.5..=1.5);
                    if rng.gen_bool(0.5) {
                        magnitude
                    } else {
                        -magnitude
                    }
                })
                .collect(),
        };
        let noise_variances = match &self.noise_variances {
            Some(v) => {
                if v.len() != p {
                    return Err(Error::Config(format!(
                        "{} noise variances for {p} variables",
                        v.len()
                    )));
                }
                if v.iter().any(|&x| x <= 0.0) {
                    return Err(Error::Config("noise variances must be positive".into()));
                }
                v.clone()
            }
            None => vec![1.0; p],
        };
        let mut constraints = ConstraintSet::new(p);
        for (a, b) in &self.constraints {
            constraints.forbid(self.index_of(a)?, self.index_of(b)?)?;
        }
        for (k, &(from, to)) in arcs.iter().enumerate() {
            let _ = k;
            if constraints.is_forbidden(from, to) {
                return Err(Error::Config(format!(
                    "true arc {} -> {} contradicts a declared constraint",
                    self.names[from], self.names[to]
                )));
            }
        }
        let mut beta = DMatrix::<f64>::zeros(p, p);
        for (&(from, to), &w) in arcs.iter().zip(&coefficients) {
            beta[(to, from)] = w;
        }
        Ok(GroundTruth {
            names: self.names.clone(),
            dag,
            beta,
            noise_variances,
            constraints,
        })
    }
}

/// A fully specified linear-Gaussian SEM used as simulation truth.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub names: Vec<String>,
    pub dag: Dag,
    /// Path-coefficient matrix; entry `(to, from)` is the weight of the
    /// arc `from -> to`.
    pub beta: DMatrix<f64>,
    pub noise_variances: Vec<f64>,
    pub constraints: ConstraintSet,
}

impl GroundTruth {
    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    /// Closed-form covariance `(I - B)^-1 Psi (I - B)^-T`.
    pub fn implied_covariance(&self) -> DMatrix<f64> {
        let p = self.n_vars();
        let mut imb = -self.beta.clone();
        for i in 0..p {
            imb[(i, i)] += 1.0;
        }
        let inv = imb.try_inverse().expect("I - B is unit triangular up to permutation");
        let psi = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            self.noise_variances.clone(),
        ));
        &inv * psi * inv.transpose()
    }
}

/// Samples rows ancestrally: in topological order,
/// `x_i = sum_j b_ij x_j + e_i` with `e_i ~ Normal(0, noise_variance_i)`.
pub fn generate_data<R: Rng>(truth: &GroundTruth, n_rows: usize, rng: &mut R) -> Result<Dataset> {
    let p = truth.n_vars();
    let order = truth.dag.topological_order();
    let sd: Vec<f64> = truth.noise_variances.iter().map(|v| v.sqrt()).collect();
    let mut values = DMatrix::<f64>::zeros(n_rows, p);
    for r in 0..n_rows {
        for &i in &order {
            let noise: f64 = StandardNormal.sample(rng);
            let mut x = sd[i] * noise;
            for j in truth.dag.parents_of(i) {
                x += truth.beta[(i, j)] * values[(r, j)];
            }
            values[(r, i)] = x;
        }
    }
    Dataset::new(truth.names.clone(), values)
}

/// The positive sets the ROC is scored against: skeleton pairs of the
/// truth's (constrained) CPDAG, and ordered pairs joined by a compelled
/// directed path.
pub fn true_positives(
    truth: &GroundTruth,
) -> Result<(BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>)> {
    let cpdag = cons_dag2cpdag(&truth.dag, &truth.constraints)?;
    let edges: BTreeSet<(usize, usize)> = cpdag.skeleton().into_iter().collect();
    let mut paths = BTreeSet::new();
    let n = truth.n_vars();
    for a in 0..n {
        for b in 0..n {
            if a != b && cpdag.directed_reachable(a, b)? {
                paths.insert((a, b));
            }
        }
    }
    Ok((edges, paths))
}

/// Ordered pairs that could be joined by a directed path in some
/// constraint-consistent DAG: `b` reachable from `a` in the digraph of
/// non-forbidden arcs.
pub fn candidate_paths(n: usize, constraints: &ConstraintSet) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for a in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if w != v && !seen[w] && !constraints.is_forbidden(v, w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        for b in 0..n {
            if b != a && seen[b] {
                out.insert((a, b));
            }
        }
    }
    out
}

/// An ROC curve with its trapezoid-rule AUC.
#[derive(Debug, Clone, Serialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` points, anchored at (0,0) and (1,1), non-decreasing.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweeps a predict-positive threshold over every distinct score plus
/// {0, 1} and integrates TPR against FPR by the trapezoid rule.
pub fn roc(
    scores: &BTreeMap<(usize, usize), f64>,
    positives: &BTreeSet<(usize, usize)>,
) -> Result<RocCurve> {
    for pos in positives {
        if !scores.contains_key(pos) {
            return Err(Error::Contract(format!(
                "positive pair {pos:?} missing from the score map"
            )));
        }
    }
    let n_pos = positives.len();
    let n_neg = scores.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedRate(format!(
            "{n_pos} positives and {n_neg} negatives"
        )));
    }

    let mut thresholds: Vec<f64> = scores.values().copied().collect();
    thresholds.push(0.0);
    thresholds.push(1.0);
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut points = vec![(0.0, 0.0)];
    for &t in thresholds.iter().rev() {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (pair, &s) in scores {
            if s >= t {
                if positives.contains(pair) {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    points.push((1.0, 1.0));
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup();

    let mut auc = 0.0;
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        auc += (x1 - x0) * (y0 + y1) * 0.5;
    }
    Ok(RocCurve { points, auc })
}

/// Writes ROC points as a two-column CSV.
pub fn write_roc_csv<W: Write>(curve: &RocCurve, mut w: W) -> Result<()> {
    writeln!(w, "fpr,tpr")?;
    for &(fpr, tpr) in &curve.points {
        writeln!(w, "{fpr},{tpr}")?;
    }
    Ok(())
}

/// Benchmark settings.
#[derive(Debug, Clone)]
pub struct BenchParams {
    pub reps: usize,
    pub samples: usize,
    pub run: RunParams,
}

/// AUCs of one scheme; an entry is `None` when the rate is undefined
/// for the truth at hand (no positives or no negatives of that kind).
#[derive(Debug, Serialize)]
pub struct SchemeAuc {
    pub edge: Option<f64>,
    pub path: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct IndividualAuc {
    pub edge: Vec<Option<f64>>,
    pub path: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
pub struct AucSection {
    pub averaging: SchemeAuc,
    pub individual: IndividualAuc,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub reps: usize,
    pub samples: usize,
    pub subsets: usize,
    pub truth_names: Vec<String>,
    pub truth_arcs: Vec<(String, String)>,
    pub auc: AucSection,
    pub roc_edge_averaging: Option<RocCurve>,
    pub roc_path_averaging: Option<RocCurve>,
    pub subsets_failed_total: usize,
}

fn edge_scores(
    graph: &StabilityGraph,
    pi_bic: usize,
) -> BTreeMap<(usize, usize), f64> {
    let n = graph.n_vars();
    let mut scores = BTreeMap::new();
    for a in 0..n {
        for b in (a + 1)..n {
            scores.insert((a, b), relevance_score(graph, a, b, pi_bic));
        }
    }
    scores
}

fn path_scores(
    graph: &StabilityGraph,
    candidates: &BTreeSet<(usize, usize)>,
    pi_bic: usize,
) -> BTreeMap<(usize, usize), f64> {
    candidates
        .iter()
        .map(|&(a, b)| ((a, b), relevance_score(graph, a, b, pi_bic)))
        .collect()
}

/// An ROC curve, or `None` when the truth leaves one of the rates
/// undefined; other errors propagate.
fn roc_or_none(
    scores: &BTreeMap<(usize, usize), f64>,
    positives: &BTreeSet<(usize, usize)>,
) -> Result<Option<RocCurve>> {
    match roc(scores, positives) {
        Ok(curve) => Ok(Some(curve)),
        Err(Error::UndefinedRate(_)) => Ok(None),
        Err(other) => Err(other),
    }
}

/// Runs the simulated-recovery protocol: `reps` independent datasets
/// from the ground truth, a full stability search on each, then ROC/AUC
/// under the individual scheme (per repetition) and the averaging scheme
/// (stability graphs averaged across repetitions first).
pub fn run_benchmark(spec: &TruthSpec, params: &BenchParams, seed: u64) -> Result<BenchReport> {
    if params.reps == 0 {
        return Err(Error::Config("need at least one repetition".into()));
    }
    let mut truth_rng = ChaCha8Rng::seed_from_u64(child_seed(seed, 0));
    let truth = spec.instantiate(&mut truth_rng)?;
    let n = truth.n_vars();
    let (pos_edges, pos_paths) = true_positives(&truth)?;
    let path_candidates = candidate_paths(n, &truth.constraints);

    let mut edge_graphs = Vec::with_capacity(params.reps);
    let mut path_graphs = Vec::with_capacity(params.reps);
    let mut bic_curves: Vec<BicCurve> = Vec::with_capacity(params.reps);
    let mut individual_edge = Vec::with_capacity(params.reps);
    let mut individual_path = Vec::with_capacity(params.reps);
    let mut failed_total = 0usize;

    for rep in 0..params.reps {
        let rep_seed = child_seed(seed, 1 + rep as u64);
        let mut data_rng = ChaCha8Rng::seed_from_u64(child_seed(rep_seed, 0));
        let data = generate_data(&truth, params.samples, &mut data_rng)?;
        let outcome = run_search(
            &data,
            &truth.constraints,
            &params.run,
            child_seed(rep_seed, 1),
        )?;
        failed_total += outcome.subsets_failed;

        let pi_bic = pick_pi_bic(&outcome.bic);
        let e_curve = roc_or_none(&edge_scores(&outcome.edge, pi_bic), &pos_edges)?;
        let p_curve = roc_or_none(
            &path_scores(&outcome.path, &path_candidates, pi_bic),
            &pos_paths,
        )?;
        individual_edge.push(e_curve.map(|c| c.auc));
        individual_path.push(p_curve.map(|c| c.auc));
        edge_graphs.push(outcome.edge);
        path_graphs.push(outcome.path);
        bic_curves.push(outcome.bic);
    }

    let edge_avg = StabilityGraph::average(&edge_graphs.iter().collect::<Vec<_>>())?;
    let path_avg = StabilityGraph::average(&path_graphs.iter().collect::<Vec<_>>())?;
    let bic_avg = BicCurve::average(&bic_curves.iter().collect::<Vec<_>>())?;
    let pi_bic_avg = pick_pi_bic(&bic_avg);
    let roc_edge_averaging = roc_or_none(&edge_scores(&edge_avg, pi_bic_avg), &pos_edges)?;
    let roc_path_averaging = roc_or_none(
        &path_scores(&path_avg, &path_candidates, pi_bic_avg),
        &pos_paths,
    )?;

    Ok(BenchReport {
        seed,
        reps: params.reps,
        samples: params.samples,
        subsets: params.run.subsets,
        truth_names: spec.names.clone(),
        truth_arcs: spec.arcs.clone(),
        auc: AucSection {
            averaging: SchemeAuc {
                edge: roc_edge_averaging.as_ref().map(|c| c.auc),
                path: roc_path_averaging.as_ref().map(|c| c.auc),
            },
            individual: IndividualAuc {
                edge: individual_edge,
                path: individual_path,
            },
        },
        roc_edge_averaging,
        roc_path_averaging,
        subsets_failed_total: failed_total,
    })
}
