//! Compiles and runs the code listings of the guide in `book/src` as
//! doc-tests. One module per chapter, so a failure names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/theta.md")]
pub mod theta {}
#[doc = include_str!("../../../book/src/xi.md")]
pub mod xi {}
#[doc = include_str!("../../../book/src/transforms.md")]
pub mod transforms {}
#[doc = include_str!("../../../book/src/crossings.md")]
pub mod crossings {}
#[doc = include_str!("../../../book/src/claims.md")]
pub mod claims {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
