//! Exact computation of the symplectic pairing of shearing deformations on
//! train tracks.
//!
//! Tracks are trivalent ribbon graphs ([`track`]). Transverse cocycles are
//! edge weight systems over `Q` ([`weights`]); their homology classes and
//! intersection numbers live in [`homology`]. The pairing of two twisted
//! cocycles on an orientation cover is computed two independent ways in
//! [`symplectic`], and checked against Killing pairings of shearing
//! generators in [`shear`].

pub mod commands;
pub mod fixtures;
#[doc(hidden)]
pub mod fuzz_entry;
pub mod homology;
pub mod io;
pub mod linalg;
pub mod rational;
pub mod report;
pub mod selfcheck;
pub mod shear;
pub mod symplectic;
pub mod track;
pub mod weights;

pub use rational::Q;
pub use track::{BaseTrack, OrientedTrack, Track};
pub use weights::WeightSystem;
