// Compiles the book chapters as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/numerics.md")]
mod numerics {}
#[doc = include_str!("../../../book/src/fock.md")]
mod fock {}
#[doc = include_str!("../../../book/src/detector.md")]
mod detector {}
#[doc = include_str!("../../../book/src/hawking.md")]
mod hawking {}
#[doc = include_str!("../../../book/src/trilinear.md")]
mod trilinear {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
