//! Entropy coding and the `CSW1` container.

mod bits;
mod container;
mod golomb;

pub use bits::{BitReader, BitWriter};
pub use container::{pack, unpack, Container, Header, HEADER_LEN, MAGIC};
pub use golomb::{
    best_k, gr_decode, gr_encode, gr_len, read_gr, read_segment, unzigzag, write_gr, write_segment, zigzag, MAX_K,
    RUN_ESCAPE,
};
