mod error;
pub(crate) mod linalg;
pub mod scalar;

pub mod algebra;
pub mod analyticity;
pub mod cr_operator;
pub mod experiments;
pub mod kernels;
pub mod quadrature;
pub mod superspace;

pub use error::{Condition, Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/algebra.md")]
    struct Algebra;
    #[doc = include_str!("../../../book/src/superspace.md")]
    struct Superspace;
    #[doc = include_str!("../../../book/src/kernels.md")]
    struct Kernels;
    #[doc = include_str!("../../../book/src/quadrature.md")]
    struct Quadrature;
    #[doc = include_str!("../../../book/src/analyticity.md")]
    struct Analyticity;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
