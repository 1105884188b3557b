//! Equiangular tight frames from phased BIBDs and polyphase BIBD matrices.
//!
//! The crate builds polyphase matrices over finite abelian groups, lifts them
//! to the generalized quadrangles and DRACKNs they encode, and checks the
//! resulting frames both exactly (over the group ring) and numerically.

pub mod construct;
pub mod gf;
pub mod groupring;
pub mod polymat;
pub mod verify;

pub use construct::{
    affine_polyphase, brouwer_geometry, brouwer_polyphase, example_9_3_3, gq_from_polyphase,
    phased_to_polyphase, polyphase_from_gq, simplex_phased, BibdParams, BrouwerBlock,
    BrouwerGeometry, ConstructError, DracknParams, GqParams,
};
pub use gf::{FieldElement, FiniteField, GfError};
pub use groupring::{
    characters_of, geometric_sum, AbelianGroup, Character, GroupError, GroupRingElement, C64,
};
pub use polymat::{
    filter_bank_lift, modulus_squared, pm_adjoint, pm_evaluate, pm_matmul, ComplexMatrix,
    GroupRingMatrix, IncidenceMatrix, IntMatrix, PolymatError, PolyphaseMatrix,
};
pub use verify::{
    count_blocks_through_vertex, screen_parameters, verify_bibd, verify_drackn, verify_etf_numeric,
    verify_gq_axioms, verify_polyphase_algebraic, verify_polyphase_combinatorial,
    verify_srg_collinearity, Check, EtfNumerics, ScreenRow, VerificationReport, VerifyError,
};
