//! Entry points shared by the fuzz targets and the corpus replay test. Each
//! accepts arbitrary bytes, must not panic, and asserts cheap invariants on
//! whatever parses.

use std::sync::OnceLock;

use num::Zero;

use crate::io::{
    parse_shear_config, parse_track, parse_weights, write_shear_config, write_track, AnyTrack,
};
use crate::rational::{format_rational, parse_rational};
use crate::shear::{compose_shearing, finite_gap_derivative};
use crate::symplectic::{gram_matrix, pairing_thm1, pairing_thm2};
use crate::track::{orientation_cover, region_analysis, OrientedTrack, Track};
use crate::weights::{check_switch_relations, twisted_subspace_basis};

/// Inputs larger than this are ignored so each run stays fast.
const MAX_FUZZ_BYTES: usize = 1 << 16;

fn text(data: &[u8]) -> Option<&str> {
    if data.len() > MAX_FUZZ_BYTES {
        return None;
    }
    std::str::from_utf8(data).ok()
}

fn genus2_cover() -> &'static OrientedTrack {
    static COVER: OnceLock<OrientedTrack> = OnceLock::new();
    COVER.get_or_init(|| {
        orientation_cover(&crate::fixtures::genus2()).expect("bundled fixture is valid")
    })
}

pub fn rational(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(q) = parse_rational(s) {
        assert_eq!(parse_rational(&format_rational(&q)).ok(), Some(q));
    }
}

pub fn track_json(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let Ok(track) = parse_track(s) else { return };
    let t = track.as_track();
    let report = t.validate();
    let again = parse_track(&write_track(&track)).expect("written tracks parse");
    assert_eq!(again.as_track().graph(), t.graph());
    if report.is_valid() {
        let regions = region_analysis(t).expect("valid track");
        assert_eq!(regions.total_cusps(), t.graph().num_switches());
    }
}

pub fn weights_json(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let cover = genus2_cover();
    let Ok(w) = parse_weights(s, cover.graph()) else {
        return;
    };
    if w.dim() > 6 || !matches!(check_switch_relations(&w, cover), Ok(true)) {
        return;
    }
    let n = w.dim() + 1;
    let thm1 = pairing_thm1(&w, &w, cover, n).expect("relations hold");
    let thm2 = pairing_thm2(&w, &w, cover, n).expect("relations hold");
    assert!(thm1.is_zero() && thm2.is_zero());
}

pub fn shear_config_json(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let Ok(cfg) = parse_shear_config(s) else {
        return;
    };
    let again =
        parse_shear_config(&write_shear_config(&cfg)).expect("written configurations parse");
    assert_eq!(again, cfg);
    if cfg.n() <= 6 && cfg.steps().len() <= 8 {
        let d = finite_gap_derivative(&cfg);
        assert!(d.trace().is_zero());
        let _ = compose_shearing(&cfg);
    }
}

/// Parse, validate, cover, and pair on the twisted basis for `n = 2`.
pub fn track_pipeline(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let Ok(AnyTrack::Base(base)) = parse_track(s) else {
        return;
    };
    if !base.validate().is_valid() || base.graph().num_switches() > 16 {
        return;
    }
    let cover = orientation_cover(&base).expect("valid base track");
    assert!(cover.validate().is_valid());
    assert_eq!(
        cover.graph().num_switches(),
        2 * base.graph().num_switches()
    );
    let basis = twisted_subspace_basis(&cover, 2).expect("cover is valid");
    let gram = gram_matrix(&basis, &cover, 2).expect("basis is twisted");
    assert!(gram.is_antisymmetric());
    assert_eq!(gram.rank % 2, 0);
}
