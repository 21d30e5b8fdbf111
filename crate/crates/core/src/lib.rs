//! Experimental additive combinatorics on finite abelian groups.
//!
//! The crate is organised around a small number of building blocks:
//!
//! * [`group`]: finite abelian groups as products of cyclic factors, bitset
//!   subsets, sumsets, difference sets and doubling constants.
//! * [`fourier`]: the Fourier transform on such groups, spectral convolution
//!   and Fourier-sparse pointwise approximation of `A*(-A)` and `A*A`.
//! * [`cover`]: dyadic level sets of convolutions and certified dense
//!   subsets `A_l ⊆ F ⊆ A±A` in the small- and large-doubling regimes.
//! * [`cayley`]: random Cayley and Cayley-sum graphs and their independence
//!   numbers, together with the union-bound failure estimate.
//! * [`nonsumset`]: exhaustive atlases of `B+B` for small groups and the
//!   randomized large-non-sumset construction.
//! * [`ap`]: longest arithmetic progressions in sumsets of random subsets of
//!   `Z_p`.
//! * [`verify`]: the verification suite that backs `addcomb verify-all`.

pub mod ap;
pub mod cayley;
pub mod cover;
mod error;
pub mod fourier;
pub mod group;
pub mod nonsumset;
pub mod report;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use group::{DoublingReport, GroupDescriptor, SubsetBits};
pub use rng::RngStream;
