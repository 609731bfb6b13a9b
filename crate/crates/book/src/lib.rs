//! Runs the code listings of the guide in `book/` as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/optics.md")]
pub mod optics {}
#[doc = include_str!("../../../book/src/post_selection.md")]
pub mod post_selection {}
#[doc = include_str!("../../../book/src/readout.md")]
pub mod readout {}
#[doc = include_str!("../../../book/src/shot_noise.md")]
pub mod shot_noise {}
#[doc = include_str!("../../../book/src/sensitivity.md")]
pub mod sensitivity {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
