//! Low-complexity wavelet + compressed-sensing video codec.
//!
//! The encoder applies a 3-D lifting DWT (9/7 spatially, Haar temporally) to
//! frame pairs, hard-thresholds the detail sub-bands and measures each column
//! block with a bit-packed Bernoulli matrix. The decoder recovers the sparse
//! columns with AMP and inverts the transform. [`strip_sim`] models the
//! hardware datapath cycle by cycle.

pub mod arith;
pub mod bitstream;
pub mod codec;
pub mod cs;
pub mod dwt3d;
pub mod error;
pub mod lifting;
pub mod metrics;
pub mod recovery;
pub mod strip_sim;
pub mod synth;
pub mod video_io;

pub use error::{Error, Result};
