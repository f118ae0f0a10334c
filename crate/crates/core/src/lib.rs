#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod fit;
pub mod format;
pub mod laplace;
pub mod montecarlo;
pub mod potentials;
pub mod quadrature;
pub mod roots;
pub mod sweep;
pub mod validation;
