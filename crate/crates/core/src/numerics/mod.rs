//! Special functions and quadrature primitives.
//!
//! Everything here is a pure function of its arguments. The hypergeometric
//! kernel is the workhorse of every interference Laplace transform; the
//! Gauss-Legendre rules carry all radial and angular integrals.

mod hypergeometric;
mod quadrature;
mod roots;
mod special;

pub use hypergeometric::{hyp2f1_series, lambda_kernel, lambda_kernel_via, KernelPath, LambdaKernelArgs};
pub use quadrature::{gauss_legendre, integrate_1d, QuadratureRule};
pub use roots::find_root;
pub use special::erf;
