//! Enumeration of pattern-avoiding permutations through generating trees.
//!
//! The pipeline builds the avoidance tree `T(B)`, groups nodes whose
//! subtrees have equal level counts into label classes, compresses infinite
//! families of classes into general succession rules, and solves for
//! `G_B(x) = Σ |S_n(B)| x^n` in closed form. Every closed form is checked
//! against brute-force counts.

pub mod error;
pub mod gentree;
pub mod induction;
pub mod perm;
pub mod solvers;

pub use error::{Error, Result};
pub use gentree::{
    explore, finite_label_test, signature_of, transition_matrix, ClassId, Explorer, LabelClass, LabelSignature,
    RuleSet, SuccessionRule, TransitionMatrix,
};
pub use induction::{
    induce_general_rules, multiplicity_gf, verify_general_rules, ChildRef, CompressedRules, Family, FamilyLink,
    FamilyTemplate, GeneralRule, MultiplicityPoly, RunDir,
};
pub use perm::{
    count_avoiders, count_avoiders_with_budget, subtree_profile, subtree_profile_with_budget, LevelCounts, PatternSet,
    Permutation, DEFAULT_NODE_BUDGET,
};
pub use solvers::{
    classify_graph, compress, series_dp, solve, solve_almost_path, solve_alpha_growing, solve_backward_path,
    solve_finite, Gf, GraphFamily, SolveConfig, SolveReport,
};
