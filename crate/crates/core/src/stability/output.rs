//! File formats emitted after a search run: stability CSVs, the BIC
//! curve, the inferred model as Graphviz DOT, and the run summary JSON.

use std::io::Write;

use serde::Serialize;

use super::{BicCurve, InferredModel, StabilityGraph, Thresholds};
use crate::error::Result;

/// Writes `edge_stability.csv` / `path_stability.csv` rows: one line per
/// populated complexity level and variable pair.
pub fn write_stability_csv<W: Write>(graph: &StabilityGraph, mut w: W) -> Result<()> {
    writeln!(w, "complexity,var_a,var_b,probability,n_models")?;
    let names = graph.names();
    let pairs = graph.pairs();
    for c in 0..=graph.c_max() {
        let Some(level) = graph.level(c) else {
            continue;
        };
        for &(a, b) in &pairs {
            writeln!(
                w,
                "{c},{},{},{},{}",
                names[a],
                names[b],
                graph.prob(c, a, b).expect("level is populated"),
                level.n_models
            )?;
        }
    }
    Ok(())
}

/// Writes `bic_curve.csv`: mean BIC per populated complexity level.
pub fn write_bic_csv<W: Write>(curve: &BicCurve, mut w: W) -> Result<()> {
    writeln!(w, "complexity,mean_bic,n_models")?;
    for c in 0..=curve.c_max() {
        if let Some(mean) = curve.mean(c) {
            writeln!(w, "{c},{mean},{}", curve.count(c))?;
        }
    }
    Ok(())
}

/// Writes the inferred model as Graphviz DOT. Undirected edges are
/// rendered with `dir=none`; every edge carries its reliability label.
pub fn write_dot<W: Write>(model: &InferredModel, mut w: W) -> Result<()> {
    writeln!(w, "digraph inferred {{")?;
    for name in &model.names {
        writeln!(w, "  \"{name}\";")?;
    }
    for e in &model.edges {
        let attrs = if e.directed {
            format!("label=\"{}\"", e.reliability)
        } else {
            format!("dir=none, label=\"{}\"", e.reliability)
        };
        writeln!(
            w,
            "  \"{}\" -> \"{}\" [{attrs}];",
            model.names[e.from], model.names[e.to]
        )?;
    }
    writeln!(w, "}}")?;
    Ok(())
}

/// Run parameters echoed into the summary. The worker count is absent
/// on purpose: outputs must be byte-identical for any worker count.
#[derive(Debug, Serialize)]
pub struct SummaryParameters {
    pub subsets: usize,
    pub generations: usize,
    pub population: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
}

#[derive(Debug, Serialize)]
pub struct SummaryThresholds {
    pub pi_sel: f64,
    pub pi_bic: usize,
}

#[derive(Debug, Serialize)]
pub struct SummaryEdge {
    pub var_a: String,
    pub var_b: String,
    pub orientation: String,
    pub reliability: f64,
}

#[derive(Debug, Serialize)]
pub struct SummaryPath {
    pub from: String,
    pub to: String,
    pub probability: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub parameters: SummaryParameters,
    pub thresholds: SummaryThresholds,
    pub subsets_total: usize,
    pub subsets_failed: usize,
    pub relevant_edges: Vec<SummaryEdge>,
    pub relevant_paths: Vec<SummaryPath>,
}

impl Summary {
    pub fn new(
        seed: u64,
        parameters: SummaryParameters,
        thresholds: &Thresholds,
        subsets_total: usize,
        subsets_failed: usize,
        model: &InferredModel,
        relevant_paths: &[(usize, usize, f64)],
    ) -> Self {
        let names = &model.names;
        let relevant_edges = model
            .edges
            .iter()
            .map(|e| SummaryEdge {
                var_a: names[e.from].clone(),
                var_b: names[e.to].clone(),
                orientation: if e.directed { "directed" } else { "undirected" }.to_string(),
                reliability: e.reliability,
            })
            .collect();
        let relevant_paths = relevant_paths
            .iter()
            .map(|&(a, b, p)| SummaryPath {
                from: names[a].clone(),
                to: names[b].clone(),
                probability: p,
            })
            .collect();
        Self {
            seed,
            parameters,
            thresholds: SummaryThresholds {
                pi_sel: thresholds.pi_sel,
                pi_bic: thresholds.pi_bic,
            },
            subsets_total,
            subsets_failed,
            relevant_edges,
            relevant_paths,
        }
    }
}

pub fn write_summary<W: Write>(summary: &Summary, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    Ok(())
}
