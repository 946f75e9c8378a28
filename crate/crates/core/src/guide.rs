//! The guide, chapter by chapter. Code listings run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}

#[doc = include_str!("../../../book/src/learners.md")]
pub mod learners {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

#[doc = include_str!("../../../book/src/importance.md")]
pub mod importance {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
