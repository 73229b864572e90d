//! z-function algebra and the J* combinatorial sum used to express eigenphase
//! correlations of Haar-random unitary matrices through averages of ratios of
//! characteristic polynomials.

pub mod jstar;
pub mod partitions;
pub mod poles;
pub mod zfun;

pub use jstar::{
    format_terms, h_st, jstar_full, jstar_layer, jstar_q, jstar_term, jstar_terms, jstar_truncated, layer_prefactor,
    ArgumentSets, Block, JStarTerm,
};
pub use partitions::{partition_blocks, partition_count, BlockPartition};
pub use poles::{circle_residue, exchanged_residues, layer_one_near_coincidence};
pub use zfun::{
    cexpm1, pole_distance, ratios_closed_form, z_dagger, z_fn, z_prime, z_product, zlog_deriv, zlog_deriv_prime,
    POLE_GUARD,
};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RatiosError {
    #[error("argument {0} lies within the pole guard of a point of 2πiℤ")]
    Pole(Complex64),
    #[error("truncation order q = {0} is outside 1..=3")]
    InvalidOrder(usize),
}
