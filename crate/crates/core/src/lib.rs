//! Variational disentangling state preparation.
//!
//! A parametrized circuit is trained to push the entanglement of a target
//! state into the two leading singular values of every bond. The transformed
//! state is then prepared with a matrix-product disentangler, and the inverse
//! of the trained circuit is appended to recover the target.

pub mod circuits;
pub mod error;
pub mod linalg;
pub mod mpd;
pub mod pipeline;
pub mod targets;
pub mod tensornet;
pub mod train;

pub use error::{Error, Result};

// Compile and run the guide's code blocks as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/targets.md")]
    mod targets {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/mpd.md")]
    mod mpd {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
