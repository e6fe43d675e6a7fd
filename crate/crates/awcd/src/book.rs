//! Compiles the guide's code blocks as doctests so the book cannot drift
//! from the library. One module per chapter keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/geometry.md")]
mod geometry {}

#[doc = include_str!("../../../book/src/clouds.md")]
mod clouds {}

#[doc = include_str!("../../../book/src/denoising.md")]
mod denoising {}

#[doc = include_str!("../../../book/src/thresholding.md")]
mod thresholding {}

#[doc = include_str!("../../../book/src/benchmarking.md")]
mod benchmarking {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
