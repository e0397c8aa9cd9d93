//! Numerical building blocks: special functions, bivariate normal/t CDFs,
//! adaptive quadrature, root finding, box-constrained optimization.

pub mod bvn;
pub mod bvt;
pub mod optim;
pub mod quad;
pub mod root;
pub mod special;
pub mod sum;
