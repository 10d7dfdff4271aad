//! Shared test oracles, independent of the library's computation paths.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use specsearch::graph::{
    enumerate_equivalence_class, is_acyclic, pair_from_index, Cpdag, CpdagEdge, Dag, EdgeLabel,
};

/// All labeled DAGs on `n` nodes, by filtering every ordered-pair bit
/// vector (3 / 25 / 543 graphs for n = 2 / 3 / 4).
pub fn all_dags(n: usize) -> Vec<Dag> {
    let slots = n * (n - 1);
    let mut out = Vec::new();
    'outer: for mask in 0u32..(1 << slots) {
        let bits: Vec<bool> = (0..slots).map(|k| mask >> k & 1 == 1).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let ij = i * (n - 1) + (j - 1);
                let ji = j * (n - 1) + i;
                if bits[ij] && bits[ji] {
                    continue 'outer;
                }
            }
        }
        if !is_acyclic(&bits, n).unwrap() {
            continue;
        }
        let arcs: Vec<(usize, usize)> = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(idx, _)| pair_from_index(n, idx))
            .collect();
        out.push(Dag::from_arcs(n, &arcs).unwrap());
    }
    out
}

/// Labels a DAG's edges straight from the definition: an arc is
/// compelled iff it keeps its orientation in every member of the
/// equivalence class.
pub fn oracle_cpdag(g: &Dag) -> Cpdag {
    let members = enumerate_equivalence_class(g).unwrap();
    let edges = g
        .arcs()
        .map(|(a, b)| {
            if members.iter().all(|m| m.has_arc(a, b)) {
                CpdagEdge { from: a, to: b, label: EdgeLabel::Compelled }
            } else {
                CpdagEdge { from: a.min(b), to: a.max(b), label: EdgeLabel::Reversible }
            }
        })
        .collect();
    Cpdag::from_edges(g.n(), edges).unwrap()
}

/// The SEM discrepancy computed straight from its definition:
/// `F(theta) = ln|Sigma| + tr(S Sigma^-1) - ln|S| - p` with
/// `Sigma = (I-B)^-1 Psi (I-B)^-T`, using explicit inverses and LU
/// determinants rather than the per-equation shortcut the library uses.
///
/// `theta` holds one weight per arc of `g` (in `g.arcs()` order)
/// followed by `log psi_i` for every variable.
pub fn f_ml_direct(g: &Dag, s: &DMatrix<f64>, theta: &[f64]) -> f64 {
    let p = g.n();
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    assert_eq!(theta.len(), arcs.len() + p);
    let mut beta = DMatrix::<f64>::zeros(p, p);
    for (k, &(from, to)) in arcs.iter().enumerate() {
        beta[(to, from)] = theta[k];
    }
    let psi = DMatrix::from_diagonal(&DVector::from_iterator(
        p,
        theta[arcs.len()..].iter().map(|&u| u.exp()),
    ));
    let mut imb = -beta;
    for i in 0..p {
        imb[(i, i)] += 1.0;
    }
    let Some(inv) = imb.try_inverse() else {
        return f64::INFINITY;
    };
    let sigma = &inv * psi * inv.transpose();
    let Some(sigma_inv) = sigma.clone().try_inverse() else {
        return f64::INFINITY;
    };
    let ln_det_sigma = sigma.determinant().ln();
    let ln_det_s = s.determinant().ln();
    ln_det_sigma + (s * sigma_inv).trace() - ln_det_s - p as f64
}

/// Plain Nelder-Mead with standard coefficients; returns the best point
/// and value found.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let d = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];
        if (values[worst] - values[best]).abs() < 1e-14 * (1.0 + values[best].abs()) {
            break;
        }
        let mut centroid = vec![0.0; d];
        for &i in &order[..d] {
            for k in 0..d {
                centroid[k] += simplex[i][k] / d as f64;
            }
        }
        let blend = |a: f64, from: &[f64], to: &[f64]| -> Vec<f64> {
            (0..d).map(|k| from[k] + a * (to[k] - from[k])).collect()
        };
        let reflected = blend(-alpha, &centroid, &simplex[worst]);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = blend(-gamma, &centroid, &simplex[worst]);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = blend(rho, &centroid, &simplex[worst]);
            let fc = f(&contracted);
            if fc < values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                let best_point = simplex[best].clone();
                for i in 0..=d {
                    if i != best {
                        simplex[i] = blend(sigma, &best_point, &simplex[i]);
                        values[i] = f(&simplex[i]);
                    }
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=d {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

/// Minimizes the direct discrepancy over the model's free parameters
/// with restarts, starting from the empty-model point (all weights zero,
/// `psi = diag(S)`).
pub fn minimize_f_ml(g: &Dag, s: &DMatrix<f64>) -> f64 {
    let p = g.n();
    let n_arcs = g.arc_count();
    let mut x: Vec<f64> = vec![0.0; n_arcs + p];
    for i in 0..p {
        x[n_arcs + i] = s[(i, i)].ln();
    }
    let objective = |t: &[f64]| f_ml_direct(g, s, t);
    let mut best = f64::INFINITY;
    for round in 0..4 {
        let step = [0.5, 0.1, 0.02, 0.004][round];
        let (point, value) = nelder_mead(&objective, &x, step, 40_000);
        if value < best {
            best = value;
        }
        x = point;
    }
    best
}

/// O(MN^3) front partition straight from the domination definition.
pub fn naive_front_partition(objectives: &[(f64, f64)]) -> Vec<Vec<usize>> {
    let dominates = |a: (f64, f64), b: (f64, f64)| -> bool {
        a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
    };
    let mut remaining: Vec<usize> = (0..objectives.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&p| {
                !remaining
                    .iter()
                    .any(|&q| q != p && dominates(objectives[q], objectives[p]))
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// AUC as the Mann-Whitney pairwise statistic with ties counted 0.5.
pub fn mann_whitney_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut u = 0.0;
    for &s in pos {
        for &t in neg {
            u += if s > t {
                1.0
            } else if s == t {
                0.5
            } else {
                0.0
            };
        }
    }
    u / (pos.len() as f64 * neg.len() as f64)
}
