//! Robust choice functions built from pairwise comparison data.
//!
//! An [`Instance`] holds a normalizing prospect, elicited comparisons and a
//! Lipschitz modulus. The value problem ([`sort_value_problem`]) computes the
//! robust choice function on the elicited prospects and [`eval_rcf`] extends
//! it to any prospect. [`accept`] answers acceptance-set queries and [`pro`]
//! maximizes the robust choice function over a polyhedral decision set.
//! Each routine has a law-invariant counterpart for preferences that only
//! depend on the payoff distribution.

pub mod accept;
mod assignment;
pub mod dmsim;
pub mod error;
pub mod instance;
pub mod io;
mod kinked;
pub mod pro;
pub mod prospect;
pub mod rcf;
pub mod value;

pub use accept::{
    acceptance_polyhedron, aspiration_grid, compute_c, eval_rcf_via_aspiration, kappa, membership,
    membership_law, AcceptancePolyhedron, AspirationalDecomposition,
};
pub use assignment::{min_cost_assignment, Assignment};
pub use dmsim::{ce_value, gen_capital_instance, generate_ecds, load_returns_csv, CeDm};
pub use error::{Error, Result};
pub use instance::{validate_instance, EcdsPair, Instance, ValidInstance};
pub use pro::{
    feasibility, feasibility_law, optimize_at_level, optimize_at_level_law, solve_benchmark_pro,
    solve_pro, solve_pro_law, solve_pro_law_levelsearch, solve_pro_levelsearch, DecisionModel,
    RobustSolution, ValidModel,
};
pub use prospect::{inf_norm_distance, permute, tilde, Permutation, Prospect};
pub use rcf::{binary_search_budget, eval_rcf, eval_rcf_law, eval_rcf_law_levelsearch, eval_rcf_levelsearch, evaluate, Evaluation};
pub use value::{
    oracle_value_problem, oracle_value_problem_law, predictor, solve_plp, solve_plp_law,
    solve_value_problem, sort_value_problem, sort_value_problem_law, Decomposition,
    DecompositionEntry, KinkedMajorant, LawKinkedMajorant,
};
