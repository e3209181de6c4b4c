//! Exact computations with finitely structured locally compact abelian groups.

pub mod abelian;
pub mod adele;
pub(crate) mod analysis;
pub mod arith;
pub mod decompose;
pub mod error;
pub mod exact;
pub mod haar;
pub mod homological;
pub mod linalg;
pub mod module;
pub mod morphism;
pub mod nenashev;
pub mod object;
pub mod order;

pub use abelian::FgAbelian;
pub use error::{LcaError, Result};
pub use exact::{check_exact, classify, Admissibility, ExactSequenceSpec, ExactVerdict};
pub use morphism::{compose, LcaMorphism};
pub use object::{Kind, LcaObject, PadicKind, PadicRanks, PredicateSet};
pub use haar::{check_det_square, check_modulus_multiplicativity, det_square_factors, modulus, seq_factor, Ladder, PositiveRational};
pub use decompose::{compact_part, decompose_cg_discrete};
pub use adele::{adele_object, idele_modulus, product_formula_check, AdeleTruncation};
pub use order::{builtin_order, opposite_order, validate_order, Order, OrderReport};
pub use module::{classify_proj_inj, module_dual, parse_module, validate_module, LcaModule, ModuleViolation, ProjInj};
pub use homological::{build_m_alpha, cyclic_cohomology, splits_algebraically, ExtensionPresentation};
pub use nenashev::{
    class_of_automorphism, dses_generator, reduce, relation_from_3x3, Backend, Computed, DArrow, DObj, Declared,
    DiagramFile, DoubleSes, K1Expression, Reduction, Relation, ThreeByThree,
};
