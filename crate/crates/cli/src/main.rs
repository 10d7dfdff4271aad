//! Command-line front end for robust causal structure search.
//!
//! Subcommands: `search` runs the full subsampled search on a CSV
//! dataset and writes stability graphs plus the inferred model;
//! `benchmark` evaluates structure recovery against a known ground
//! truth; `convert` reduces a single DAG to its constrained CPDAG.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use specsearch::graph::{cons_dag2cpdag, ConstraintSet, Cpdag, Dag, EdgeLabel};
use specsearch::moea::SearchParams;
use specsearch::sem::Dataset;
use specsearch::stability::output::{
    write_bic_csv, write_dot, write_stability_csv, write_summary, Summary, SummaryParameters,
};
use specsearch::stability::{
    infer_model, pick_pi_bic, relevance_score, run_search, RunParams, Thresholds,
};
use specsearch::synth::{run_benchmark, write_roc_csv, BenchParams, TruthSpec};
use specsearch::Error;

#[derive(Parser)]
#[command(name = "specsearch", version, about = "Stable specification search over linear SEMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the subsampled structure search on a CSV dataset.
    Search(SearchCmd),
    /// Evaluate structure recovery on data simulated from a ground truth.
    Benchmark(BenchmarkCmd),
    /// Convert an edge-list DAG to its constrained CPDAG in DOT form.
    Convert(ConvertCmd),
}

#[derive(Args)]
struct CommonSearchArgs {
    /// Forbidden direct causes, one `<nameA> -/-> <nameB>` per line.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Outer-loop subsampling iterations.
    #[arg(long, default_value_t = 100)]
    subsets: usize,
    /// Inner-loop generations.
    #[arg(long, default_value_t = 20)]
    generations: usize,
    /// Population size.
    #[arg(long, default_value_t = 100)]
    population: usize,
    #[arg(long, default_value_t = 0.85)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.075)]
    mutation_rate: f64,
    /// Selection-probability threshold for relevance.
    #[arg(long, default_value_t = 0.6)]
    pi_sel: f64,
    /// Master seed; drawn from system entropy (and recorded) if absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; affects wall-clock only, never results.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SearchCmd {
    /// CSV dataset with a header row of variable names.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    common: CommonSearchArgs,
}

#[derive(Args)]
struct BenchmarkCmd {
    /// Ground-truth JSON (names, arcs, optional coefficients,
    /// noise_variances, constraints).
    #[arg(long)]
    truth: PathBuf,
    /// Independent datasets to simulate.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Rows per simulated dataset.
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[command(flatten)]
    common: CommonSearchArgs,
}

#[derive(Args)]
struct ConvertCmd {
    /// Edge-list file: one `A -> B` arc per line, a bare name declares
    /// an isolated node, `#` starts a comment.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Output DOT file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search(cmd) => cmd_search(cmd),
        Command::Benchmark(cmd) => cmd_benchmark(cmd),
        Command::Convert(cmd) => cmd_convert(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::RunQuality(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

fn load_constraints(path: &Option<PathBuf>, names: &[String]) -> Result<ConstraintSet, Error> {
    match path {
        Some(p) => ConstraintSet::parse(&std::fs::read_to_string(p)?, names),
        None => Ok(ConstraintSet::new(names.len())),
    }
}

fn run_params(common: &CommonSearchArgs) -> RunParams {
    RunParams {
        subsets: common.subsets,
        search: SearchParams {
            generations: common.generations,
            population: common.population,
            crossover_rate: common.crossover_rate,
            mutation_rate: common.mutation_rate,
        },
    }
}

fn create_file(dir: &Path, name: &str) -> Result<std::io::BufWriter<std::fs::File>, Error> {
    Ok(std::io::BufWriter::new(std::fs::File::create(
        dir.join(name),
    )?))
}

fn cmd_search(cmd: SearchCmd) -> Result<(), Error> {
    let data = Dataset::from_csv_path(&cmd.data)?;
    let constraints = load_constraints(&cmd.common.constraints, data.names())?;
    let params = run_params(&cmd.common);
    let seed = resolve_seed(cmd.common.seed);
    if !(cmd.common.pi_sel > 0.0 && cmd.common.pi_sel < 1.0) {
        return Err(Error::Config(format!(
            "pi_sel must lie in (0, 1), got {}",
            cmd.common.pi_sel
        )));
    }

    let pool = thread_pool(cmd.common.workers)?;
    let outcome = pool.install(|| run_search(&data, &constraints, &params, seed))?;

    let thresholds = Thresholds {
        pi_sel: cmd.common.pi_sel,
        pi_bic: pick_pi_bic(&outcome.bic),
    };
    let model = infer_model(&outcome.edge, &outcome.path, &constraints, &thresholds);
    let names = data.names();
    let mut relevant_paths: Vec<(usize, usize, f64)> = Vec::new();
    for &(a, b) in &outcome.path.pairs() {
        let score = relevance_score(&outcome.path, a, b, thresholds.pi_bic);
        if score >= thresholds.pi_sel {
            relevant_paths.push((a, b, score));
        }
    }

    std::fs::create_dir_all(&cmd.common.out)?;
    let dir = &cmd.common.out;
    write_stability_csv(&outcome.edge, create_file(dir, "edge_stability.csv")?)?;
    write_stability_csv(&outcome.path, create_file(dir, "path_stability.csv")?)?;
    write_bic_csv(&outcome.bic, create_file(dir, "bic_curve.csv")?)?;
    write_dot(&model, create_file(dir, "model.dot")?)?;
    let summary = Summary::new(
        seed,
        SummaryParameters {
            subsets: params.subsets,
            generations: params.search.generations,
            population: params.search.population,
            crossover_rate: params.search.crossover_rate,
            mutation_rate: params.search.mutation_rate,
        },
        &thresholds,
        outcome.subsets_total,
        outcome.subsets_failed,
        &model,
        &relevant_paths,
    );
    write_summary(&summary, create_file(dir, "summary.json")?)?;

    println!("seed: {seed}");
    println!("pi_sel: {}  pi_bic: {}", thresholds.pi_sel, thresholds.pi_bic);
    println!(
        "subsets: {} run, {} failed",
        outcome.subsets_total, outcome.subsets_failed
    );
    println!("relevant edges ({}):", model.edges.len());
    for e in &model.edges {
        let arrow = if e.directed { "->" } else { "--" };
        println!(
            "  {} {arrow} {}  (reliability {})",
            names[e.from], names[e.to], e.reliability
        );
    }
    println!("relevant causal paths ({}):", relevant_paths.len());
    for &(a, b, score) in &relevant_paths {
        println!("  {} => {}  (probability {score})", names[a], names[b]);
    }
    Ok(())
}

fn cmd_benchmark(cmd: BenchmarkCmd) -> Result<(), Error> {
    let spec = TruthSpec::from_json(&std::fs::read_to_string(&cmd.truth)?)?;
    let params = BenchParams {
        reps: cmd.reps,
        samples: cmd.samples,
        run: run_params(&cmd.common),
    };
    let seed = resolve_seed(cmd.common.seed);
    let pool = thread_pool(cmd.common.workers)?;
    let report = pool.install(|| run_benchmark(&spec, &params, seed))?;

    std::fs::create_dir_all(&cmd.common.out)?;
    let dir = &cmd.common.out;
    let mut report_file = create_file(dir, "report.json")?;
    serde_json::to_writer_pretty(&mut report_file, &report).map_err(Error::Json)?;
    writeln!(report_file)?;
    if let Some(curve) = &report.roc_edge_averaging {
        write_roc_csv(curve, create_file(dir, "roc_edge.csv")?)?;
    }
    if let Some(curve) = &report.roc_path_averaging {
        write_roc_csv(curve, create_file(dir, "roc_path.csv")?)?;
    }

    let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.4}"));
    println!("seed: {seed}");
    println!("reps: {}  samples: {}  subsets: {}", report.reps, report.samples, report.subsets);
    println!("AUC (averaging scheme): edge {}  path {}",
        fmt(report.auc.averaging.edge), fmt(report.auc.averaging.path));
    println!("AUC (individual scheme):");
    for (i, (e, p)) in report
        .auc
        .individual
        .edge
        .iter()
        .zip(&report.auc.individual.path)
        .enumerate()
    {
        println!("  rep {}: edge {}  path {}", i + 1, fmt(*e), fmt(*p));
    }
    Ok(())
}

/// Parses the edge-list format: `A -> B` per arc, bare names declare
/// isolated nodes, `#` comments. Names are collected in order of first
/// appearance.
fn parse_edge_list(text: &str) -> Result<(Vec<String>, Vec<(usize, usize)>), Error> {
    let mut names: Vec<String> = Vec::new();
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let intern = |name: &str, names: &mut Vec<String>| -> usize {
        match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        }
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((from, to)) = content.split_once("->") {
            let (from, to) = (from.trim(), to.trim());
            if from.is_empty() || to.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `<from> -> <to>`, got `{content}`"),
                });
            }
            let f = intern(from, &mut names);
            let t = intern(to, &mut names);
            if f == t {
                return Err(Error::Parse {
                    line,
                    message: format!("self-loop on `{from}`"),
                });
            }
            arcs.push((f, t));
        } else if content.split_whitespace().count() == 1 {
            intern(content, &mut names);
        } else {
            return Err(Error::Parse {
                line,
                message: format!("expected `<from> -> <to>` or a bare node name, got `{content}`"),
            });
        }
    }
    Ok((names, arcs))
}

fn cpdag_dot(names: &[String], cpdag: &Cpdag) -> String {
    let mut out = String::from("digraph cpdag {\n");
    for name in names {
        out.push_str(&format!("  \"{name}\";\n"));
    }
    for e in cpdag.edges() {
        match e.label {
            EdgeLabel::Compelled => {
                out.push_str(&format!("  \"{}\" -> \"{}\";\n", names[e.from], names[e.to]));
            }
            EdgeLabel::Reversible => {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [dir=none];\n",
                    names[e.from], names[e.to]
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn cmd_convert(cmd: ConvertCmd) -> Result<(), Error> {
    let (names, arcs) = parse_edge_list(&std::fs::read_to_string(&cmd.graph)?)?;
    if names.is_empty() {
        return Err(Error::Config("graph file declares no nodes".into()));
    }
    let dag = Dag::from_arcs(names.len(), &arcs)
        .map_err(|e| Error::Contract(format!("input is not a DAG: {e}")))?;
    let constraints = load_constraints(&cmd.constraints, &names)?;
    let cpdag = cons_dag2cpdag(&dag, &constraints)?;
    let dot = cpdag_dot(&names, &cpdag);
    match &cmd.out {
        Some(path) => std::fs::write(path, dot)?,
        None => print!("{dot}"),
    }
    Ok(())
}
