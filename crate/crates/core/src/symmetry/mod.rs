//! Finite permutation-group machinery: group generation, conjugacy classes,
//! character-theoretic isotypic projectors, and the block decomposition of
//! the coupling matrix.

mod character;
mod group;
mod isotypic;
mod perm;

pub use character::{
    cube_character_table, cube_orbit_data, BundledOrbitData, CharacterTable, CUBE_DEGREE,
    CUBE_GENERATORS,
};
pub use group::{ConjugacyClasses, PermGroup, DEFAULT_ORDER_CAP};
pub use isotypic::{
    decompose_coupling, equivariance_defect, isotypic_projectors, IsotypicComponent,
};
pub use perm::Perm;

#[derive(Debug, thiserror::Error)]
pub enum SymmetryError {
    #[error("invalid permutation `{token}`: {reason}")]
    InvalidPermutation { token: String, reason: String },
    #[error("group closure exceeded the configured cap of {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("character table rows {row_a} and {row_b} are not orthonormal (inner product {inner_product})")]
    NonOrthogonalTable { row_a: usize, row_b: usize, inner_product: String },
    #[error("malformed character table: {reason}")]
    TableShape { reason: String },
    #[error("projector {what} defect {defect} exceeds tolerance")]
    ProjectorDefect { what: String, defect: String },
    #[error("coupling matrix does not commute with the group action (defect {defect})")]
    EquivarianceViolation { defect: String },
    #[error("isotypic block {index} has non-integer dimension data: {value}")]
    NonIntegerDimension { index: usize, value: String },
}
