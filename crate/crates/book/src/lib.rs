//! The guide in `book/`, compiled so that every Rust listing runs as a
//! doctest. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("../../../book/src/covectors.md")]
pub mod covectors {}
#[doc = include_str!("../../../book/src/rays.md")]
pub mod rays {}
#[doc = include_str!("../../../book/src/sgcc.md")]
pub mod sgcc {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/sources.md")]
pub mod sources {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
