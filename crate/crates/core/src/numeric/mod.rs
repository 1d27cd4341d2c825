//! Exact integer, modular, p-adic and multiquadratic arithmetic.

pub mod arith;
pub mod factor;
pub mod jacobi;
pub mod multiquad;
pub mod padic;
pub mod serde_int;

pub use factor::{factor, squarefree_kernel, Factorization};
pub use jacobi::{jacobi_symbol, legendre};
pub use multiquad::{
    multiquad_arith, multiquad_degree, multiquad_is_square, MultiQuadElem, MultiQuadOp,
    MultiQuadTower,
};
pub use padic::{padic_sqrt, ResidueWitness};
