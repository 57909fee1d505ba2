//! Exact invariants of C*-algebras attached to amalgamated free products
//! `Γ = *_H G_i` of finite groups over a common subgroup.

pub mod amalgam;
pub mod boundary;
pub mod chartab;
pub mod cyclotomic;
pub mod error;
pub mod fock;
pub mod group;
pub mod kms;
pub mod ktheory;
pub mod snf;

pub use amalgam::{
    AmalgamSpec, Factor, FiniteFactor, Letter, NormalFormWord, SerreTree, Syllable, TreeVertex, DEFAULT_BALL_BUDGET,
};
pub use boundary::{act, cylinders, refine, strong_boundary_witness, verify_witness, Cylinder};
pub use chartab::{character_table, twisted_character, twisted_inner_product, CharacterTable};
pub use cyclotomic::CyclotomicNumber;
pub use error::{Error, Result};
pub use fock::{
    build_operators, f2_example, verify_relations, FockOperators, FreeGroupExample, RelationReport, SparseOperator,
    TruncatedFock,
};
pub use kms::{
    factor_type, martin_kernel_crosscheck, mu_weights, perron_check, random_walk, solve, solve_beta,
    verify_stationarity, GaugeWeights, KmsSolution, MartinReport, PerronReport, StationarityReport, WalkReport,
};
pub use ktheory::{
    build_a_gamma, ideal_lattice, irreducible, k_groups, simplicity_check, AGammaMatrix, IdealPoset, KGroups,
    SimplicityReport, DEFAULT_HEREDITARY_BOUND,
};
pub use snf::{smith_normal_form, SmithDecomposition};
pub use group::{
    conjugacy_classes, coset_stabilizer, double_cosets, left_cosets, normal_core, ConjugacyClasses, CosetSpace,
    DoubleCosetDecomposition, FiniteGroup, SubgroupEmbedding, DEFAULT_MAX_ORDER,
};
