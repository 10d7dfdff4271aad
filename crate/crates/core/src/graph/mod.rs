//! DAG and CPDAG representations, background-knowledge constraints,
//! and the constrained DAG-to-CPDAG conversion.

mod constraints;
mod cpdag;
mod dag;

pub use constraints::ConstraintSet;
pub use cpdag::{
    cons_dag2cpdag, enumerate_equivalence_class, v_structures, Cpdag, CpdagEdge, EdgeLabel,
};
pub use dag::{is_acyclic, pair_from_index, pair_index, random_dag, repair, Dag};
