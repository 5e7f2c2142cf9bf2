//! Small tracks shipped with the crate.

use crate::io::{parse_track, AnyTrack};
use crate::track::{BaseTrack, OrientedTrack};

pub const THETA_JSON: &str = include_str!("../fixtures/theta.json");
pub const THETA_ORIENTED_JSON: &str = include_str!("../fixtures/theta_oriented.json");
pub const GENUS2_JSON: &str = include_str!("../fixtures/genus2.json");

fn base(json: &str) -> BaseTrack {
    match parse_track(json).expect("bundled fixture parses") {
        AnyTrack::Base(b) => b,
        AnyTrack::Oriented(_) => unreachable!("bundled fixture is a base track"),
    }
}

/// Two switches joined trunk to trunk, left to left and right to right,
/// with every transport sign `+1`.
pub fn theta() -> BaseTrack {
    base(THETA_JSON)
}

/// The theta graph with `A` left-diverging and `B` right-diverging.
pub fn theta_oriented() -> OrientedTrack {
    match parse_track(THETA_ORIENTED_JSON).expect("bundled fixture parses") {
        AnyTrack::Oriented(o) => o,
        AnyTrack::Base(_) => unreachable!("bundled fixture is oriented"),
    }
}

/// A track on the closed genus-2 surface whose four complementary regions
/// are trigons; transport signs are those of its ribbon structure.
pub fn genus2() -> BaseTrack {
    base(GENUS2_JSON)
}
