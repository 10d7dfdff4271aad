//! NSGA-II over DAG genotypes, minimizing the pair (chi-square fit,
//! model complexity), with a best-per-complexity archive kept across the
//! whole run of one subsample.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{random_dag, repair, ConstraintSet, Dag};
use crate::sem::{ml_fit, sample_covariance, CovMatrix, Dataset};

/// NSGA-II settings for one inner-loop search.
#[derive(Debug, Clone)]
pub struct SearchParams {
    /// Inner-loop generations.
    pub generations: usize,
    /// Population size.
    pub population: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            generations: 20,
            population: 100,
            crossover_rate: 0.85,
            mutation_rate: 0.075,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.generations < 1 || self.population < 2 {
            return Err(Error::Config(
                "need at least 1 generation and population of 2".into(),
            ));
        }
        for (name, rate) in [
            ("crossover rate", self.crossover_rate),
            ("mutation rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} {rate} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// A scored population member. `chi2` is `f64::INFINITY` for models the
/// fit rejected as degenerate, so they still take part in sorting.
#[derive(Debug, Clone)]
pub struct ScoredModel {
    pub dag: Dag,
    pub chi2: f64,
    pub complexity: usize,
    pub bic: f64,
    /// Front index, 1-based.
    pub rank: usize,
    pub crowding: f64,
}

impl ScoredModel {
    fn score(dag: Dag, cov: &CovMatrix) -> Self {
        let complexity = dag.arc_count();
        match ml_fit(&dag, cov) {
            Ok(fit) => Self {
                dag,
                chi2: fit.chi2,
                complexity,
                bic: fit.bic,
                rank: 0,
                crowding: 0.0,
            },
            Err(_) => Self {
                dag,
                chi2: f64::INFINITY,
                complexity,
                bic: f64::INFINITY,
                rank: 0,
                crowding: 0.0,
            },
        }
    }

    pub fn objectives(&self) -> (f64, f64) {
        (self.chi2, self.complexity as f64)
    }
}

/// Pareto domination: `a` no worse than `b` in both objectives and
/// strictly better in at least one.
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Deb's fast non-dominated sort. Returns fronts as index lists; within
/// a front no member dominates another, and every member of front k+1 is
/// dominated by some member of front k.
pub fn fast_non_dominated_sort(objectives: &[(f64, f64)]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    let mut front: Vec<usize> = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            if dominates(objectives[p], objectives[q]) {
                dominated[p].push(q);
            } else if dominates(objectives[q], objectives[p]) {
                count[p] += 1;
            }
        }
        if count[p] == 0 {
            front.push(p);
        }
    }
    let mut fronts = Vec::new();
    while !front.is_empty() {
        let mut next = Vec::new();
        for &p in &front {
            for &q in &dominated[p] {
                count[q] -= 1;
                if count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut front));
        front = next;
    }
    fronts
}

/// Crowding distance of each front member. Boundary solutions per
/// objective get infinity; interior ones accumulate normalized gaps
/// between their neighbors. An objective with zero (or non-finite) range
/// across the front contributes nothing.
pub fn crowding_distance(objectives: &[(f64, f64)]) -> Vec<f64> {
    let m = objectives.len();
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let mut dist = vec![0.0f64; m];
    for obj in 0..2 {
        let value = |i: usize| if obj == 0 { objectives[i].0 } else { objectives[i].1 };
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        dist[idx[0]] = f64::INFINITY;
        dist[idx[m - 1]] = f64::INFINITY;
        let range = value(idx[m - 1]) - value(idx[0]);
        if !(range.is_finite() && range > 0.0) {
            continue;
        }
        for w in 1..m - 1 {
            let i = idx[w];
            if dist[i].is_finite() {
                dist[i] += (value(idx[w + 1]) - value(idx[w - 1])) / range;
            }
        }
    }
    dist
}

/// Draws two members uniformly (with replacement) and returns the index
/// of the better one: lower rank, then larger crowding distance, then a
/// coin flip.
pub fn binary_tournament<R: Rng>(pop: &[ScoredModel], rng: &mut R) -> usize {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if pop[a].rank != pop[b].rank {
        return if pop[a].rank < pop[b].rank { a } else { b };
    }
    if pop[a].crowding != pop[b].crowding {
        return if pop[a].crowding > pop[b].crowding { a } else { b };
    }
    if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// One-point crossover at the genotype midpoint `n(n-1)/2`. With
/// probability `rate` the suffixes are swapped; otherwise the children
/// are copies. Outputs are raw bit vectors that need [`repair`].
pub fn one_point_crossover<R: Rng>(
    a: &Dag,
    b: &Dag,
    rate: f64,
    rng: &mut R,
) -> Result<(Vec<bool>, Vec<bool>)> {
    if a.n() != b.n() {
        return Err(Error::Structural(format!(
            "crossover requires equal sizes, got {} and {}",
            a.n(),
            b.n()
        )));
    }
    let mut left = a.bits().to_vec();
    let mut right = b.bits().to_vec();
    if rng.gen_bool(rate) {
        let cut = a.n() * (a.n() - 1) / 2;
        for k in cut..left.len() {
            std::mem::swap(&mut left[k], &mut right[k]);
        }
    }
    Ok((left, right))
}

/// Flips each bit independently with probability `rate`.
pub fn bit_flip_mutation<R: Rng>(bits: &mut [bool], rate: f64, rng: &mut R) {
    for b in bits.iter_mut() {
        if rng.gen_bool(rate) {
            *b = !*b;
        }
    }
}

/// Best model seen at one complexity level.
#[derive(Debug, Clone)]
pub struct ArchivedModel {
    pub dag: Dag,
    pub chi2: f64,
    pub bic: f64,
}

/// Lowest-chi-square model per complexity level, fed by every model ever
/// scored during a subset search. Unlike a Pareto front, which holds at
/// most one model per complexity, the archive covers every level that
/// was visited, and the endpoints (empty and complete graph) are seeded
/// explicitly so they always exist.
#[derive(Debug, Clone, Default)]
pub struct ComplexityArchive {
    best: std::collections::BTreeMap<usize, ArchivedModel>,
}

impl ComplexityArchive {
    fn insert(&mut self, model: &ScoredModel) {
        use std::collections::btree_map::Entry;
        let archived = || ArchivedModel {
            dag: model.dag.clone(),
            chi2: model.chi2,
            bic: model.bic,
        };
        match self.best.entry(model.complexity) {
            Entry::Vacant(v) => {
                v.insert(archived());
            }
            Entry::Occupied(mut o) => {
                if model.chi2 < o.get().chi2 {
                    o.insert(archived());
                }
            }
        }
    }

    pub fn get(&self, complexity: usize) -> Option<&ArchivedModel> {
        self.best.get(&complexity)
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &ArchivedModel)> {
        self.best.iter().map(|(&c, m)| (c, m))
    }

    pub fn len(&self) -> usize {
        self.best.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }
}

/// A complete DAG consistent with the constraints, built from a random
/// topological order that honors every precedence the constraints force
/// (arc a -> b forbidden means b must come before a). If the forced
/// precedences are contradictory a complete graph is impossible, and the
/// densest repairable orientation is returned instead.
fn random_complete_dag<R: Rng>(n: usize, constraints: &ConstraintSet, rng: &mut R) -> Dag {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(a, b) in constraints.iter() {
        // arc a -> b is forbidden, so b must precede a
        succ[b].push(a);
        indeg[a] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let pick = rng.gen_range(0..ready.len());
        let v = ready.swap_remove(pick);
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    if order.len() == n {
        Dag::complete_from_order(&order)
    } else {
        // contradictory constraints; fall back to repairing a full genotype
        let full = vec![true; n * (n - 1)];
        repair(&full, n, constraints, rng).expect("genotype length is consistent")
    }
}

fn assign_rank_and_crowding(pop: &mut [ScoredModel]) {
    let objectives: Vec<(f64, f64)> = pop.iter().map(|m| m.objectives()).collect();
    let fronts = fast_non_dominated_sort(&objectives);
    for (k, front) in fronts.iter().enumerate() {
        let front_objs: Vec<(f64, f64)> = front.iter().map(|&i| objectives[i]).collect();
        let dist = crowding_distance(&front_objs);
        for (slot, &i) in front.iter().enumerate() {
            pop[i].rank = k + 1;
            pop[i].crowding = dist[slot];
        }
    }
}

/// Runs the NSGA-II inner loop on one subsample and returns the archive
/// of best models per complexity level.
pub fn search_subset<R: Rng>(
    data: &Dataset,
    constraints: &ConstraintSet,
    params: &SearchParams,
    rng: &mut R,
) -> Result<ComplexityArchive> {
    search_subset_observed(data, constraints, params, rng, |_, _, _| {})
}

/// [`search_subset`] with a per-generation observer, called after each
/// environmental selection with the generation index (0 = initial
/// population), the selected population, and the archive so far.
pub fn search_subset_observed<R, F>(
    data: &Dataset,
    constraints: &ConstraintSet,
    params: &SearchParams,
    rng: &mut R,
    mut on_generation: F,
) -> Result<ComplexityArchive>
where
    R: Rng,
    F: FnMut(usize, &[ScoredModel], &ComplexityArchive),
{
    params.validate()?;
    let n = data.n_vars();
    if constraints.n() != n {
        return Err(Error::Structural(format!(
            "constraints sized for {} variables, data has {n}",
            constraints.n()
        )));
    }
    let cov = sample_covariance(data)?;
    let mut archive = ComplexityArchive::default();

    // force-seed the endpoints so both complexity extremes are anchored
    archive.insert(&ScoredModel::score(Dag::empty(n), &cov));
    archive.insert(&ScoredModel::score(
        random_complete_dag(n, constraints, rng),
        &cov,
    ));

    let pop_size = params.population;
    let mut pop: Vec<ScoredModel> = (0..pop_size)
        .map(|_| {
            let m = ScoredModel::score(random_dag(n, constraints, rng), &cov);
            archive.insert(&m);
            m
        })
        .collect();
    assign_rank_and_crowding(&mut pop);
    on_generation(0, &pop, &archive);

    for gen in 1..=params.generations {
        let mut offspring: Vec<ScoredModel> = Vec::with_capacity(pop_size + 1);
        while offspring.len() < pop_size {
            let pa = binary_tournament(&pop, rng);
            let pb = binary_tournament(&pop, rng);
            let (mut left, mut right) =
                one_point_crossover(&pop[pa].dag, &pop[pb].dag, params.crossover_rate, rng)?;
            bit_flip_mutation(&mut left, params.mutation_rate, rng);
            bit_flip_mutation(&mut right, params.mutation_rate, rng);
            for raw in [left, right] {
                let dag = repair(&raw, n, constraints, rng)?;
                let m = ScoredModel::score(dag, &cov);
                archive.insert(&m);
                offspring.push(m);
            }
        }
        offspring.truncate(pop_size);

        let mut combined = pop;
        combined.append(&mut offspring);
        let objectives: Vec<(f64, f64)> = combined.iter().map(|m| m.objectives()).collect();
        let fronts = fast_non_dominated_sort(&objectives);
        let mut next: Vec<ScoredModel> = Vec::with_capacity(pop_size);
        for front in fronts {
            let front_objs: Vec<(f64, f64)> = front.iter().map(|&i| objectives[i]).collect();
            let dist = crowding_distance(&front_objs);
            let room = pop_size - next.len();
            if front.len() <= room {
                for (slot, &i) in front.iter().enumerate() {
                    let mut m = combined[i].clone();
                    m.crowding = dist[slot];
                    next.push(m);
                }
            } else {
                // boundary front: keep the most spread-out members
                let mut by_crowding: Vec<usize> = (0..front.len()).collect();
                by_crowding
                    .sort_by(|&x, &y| dist[y].total_cmp(&dist[x]).then(front[x].cmp(&front[y])));
                for &slot in by_crowding.iter().take(room) {
                    let mut m = combined[front[slot]].clone();
                    m.crowding = dist[slot];
                    next.push(m);
                }
            }
            if next.len() == pop_size {
                break;
            }
        }
        pop = next;
        assign_rank_and_crowding(&mut pop);
        on_generation(gen, &pop, &archive);
    }
    Ok(archive)
}
