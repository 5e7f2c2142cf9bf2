//! Closed 1-chains on the graph obtained by collapsing each switch of an
//! oriented track to a vertex, and the two switch formulas for algebraic
//! intersection numbers.
//!
//! Edges are directed to the left of the oriented ties: at a left-diverging
//! switch the trunk comes in and the branches go out, at a right-diverging
//! switch the branches come in and the trunk goes out.

use num::{One, Zero};
use thiserror::Error;

use crate::rational::Q;
use crate::track::{Divergence, EdgeEnd, OrientedTrack, Slot, Track, TrackError};
use crate::weights::{require_switch_relations, WeightError, WeightSystem};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("divergence flags give edge {0} two incoming or two outgoing ends")]
    IncoherentDivergence(String),
    #[error("expected a scalar weight system, got dimension {0}")]
    NotScalar(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("chains live on different edge sets")]
    ChainMismatch,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Track(#[from] TrackError),
}

fn is_outgoing(div: Divergence, slot: Slot) -> bool {
    match div {
        Divergence::Left => slot.is_branch(),
        Divergence::Right => !slot.is_branch(),
    }
}

/// The end at which each edge starts, under the left-of-tie direction rule.
pub fn edge_tails(t: &OrientedTrack) -> Result<Vec<usize>, HomologyError> {
    t.ensure_valid()?;
    let g = t.graph();
    let he = g.half_edges();
    (0..g.num_edges())
        .map(|e| {
            let out: Vec<bool> = (0..2)
                .map(|end| {
                    let (s, slot) = he.at(EdgeEnd::new(e, end));
                    is_outgoing(t.divergence()[s], slot)
                })
                .collect();
            match (out[0], out[1]) {
                (true, false) => Ok(0),
                (false, true) => Ok(1),
                _ => Err(HomologyError::IncoherentDivergence(g.edge_ids()[e].clone())),
            }
        })
        .collect()
}

/// Edges whose divergence flags conflict with the direction rule.
pub fn direction_conflicts(t: &OrientedTrack) -> Result<Vec<String>, TrackError> {
    t.ensure_valid()?;
    let g = t.graph();
    let he = g.half_edges();
    Ok((0..g.num_edges())
        .filter(|&e| {
            let outs = (0..2)
                .filter(|&end| {
                    let (s, slot) = he.at(EdgeEnd::new(e, end));
                    is_outgoing(t.divergence()[s], slot)
                })
                .count();
            outs != 1
        })
        .map(|e| g.edge_ids()[e].clone())
        .collect())
}

/// A rational 1-chain: coefficient of each edge, traversed from its tail end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneChain {
    tails: Vec<usize>,
    coefficients: Vec<Q>,
}

impl OneChain {
    pub fn coefficients(&self) -> &[Q] {
        &self.coefficients
    }

    pub fn tails(&self) -> &[usize] {
        &self.tails
    }

    pub fn checked_add(&self, other: &OneChain) -> Result<OneChain, HomologyError> {
        if self.tails != other.tails {
            return Err(HomologyError::ChainMismatch);
        }
        Ok(OneChain {
            tails: self.tails.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Incoming minus outgoing coefficient at each switch.
    pub fn boundary(&self, t: &OrientedTrack) -> Vec<Q> {
        let g = t.graph();
        let he = g.half_edges();
        let mut b = vec![Q::zero(); g.num_switches()];
        for (e, c) in self.coefficients.iter().enumerate() {
            let tail = self.tails[e];
            let (from, _) = he.at(EdgeEnd::new(e, tail));
            let (to, _) = he.at(EdgeEnd::new(e, 1 - tail));
            b[to] += c;
            b[from] -= c;
        }
        b
    }

    pub fn is_closed(&self, t: &OrientedTrack) -> bool {
        self.boundary(t).iter().all(Zero::is_zero)
    }
}

fn scalar_weights(w: &WeightSystem) -> Result<Vec<Q>, HomologyError> {
    if w.dim() != 1 {
        return Err(HomologyError::NotScalar(w.dim()));
    }
    Ok(w.weights().iter().map(|v| v[0].clone()).collect())
}

/// The chain `sum_e w(e) f_e` of a scalar weight system.
pub fn homology_class(w: &WeightSystem, t: &OrientedTrack) -> Result<OneChain, HomologyError> {
    let coefficients = scalar_weights(w)?;
    require_switch_relations(w, t)?;
    Ok(OneChain {
        tails: edge_tails(t)?,
        coefficients,
    })
}

/// Signed crossing count of `ch` with a tie of edge `e`, counting `+1` when
/// the chain crosses the oriented tie from its right side to its left side.
pub fn tie_pairing(ch: &OneChain, t: &OrientedTrack, e: usize) -> Result<Q, HomologyError> {
    let g = t.graph();
    if e >= g.num_edges() || ch.coefficients.len() != g.num_edges() {
        return Err(HomologyError::UnknownEdge(e));
    }
    // Side of the tie at the end-0 switch on which the edge lies.
    let (s, slot) = g.half_edges().at(EdgeEnd::new(e, 0));
    let branch_side = t.divergence()[s];
    let side = if slot.is_branch() {
        branch_side
    } else {
        branch_side.flip()
    };
    // Leaving that switch the chain moves toward `side`; arriving, away from it.
    let toward = if ch.tails[e] == 0 { side } else { side.flip() };
    let sign = match toward {
        Divergence::Left => Q::one(),
        Divergence::Right => -Q::one(),
    };
    Ok(sign * &ch.coefficients[e])
}

fn scalar_pair<T: Track + ?Sized>(
    w1: &WeightSystem,
    w2: &WeightSystem,
    t: &T,
) -> Result<(Vec<Q>, Vec<Q>), HomologyError> {
    let a = scalar_weights(w1)?;
    let b = scalar_weights(w2)?;
    let edges = t.graph().num_edges();
    w1.expect_edges(edges)?;
    w2.expect_edges(edges)?;
    Ok((a, b))
}

/// `1/2 sum_s (a1(right) a2(left) - a1(left) a2(right))`, with no checks on
/// the weights.
pub fn switch_sum_antisym<T: Track + ?Sized>(t: &T, a1: &[Q], a2: &[Q]) -> Q {
    let mut total = Q::zero();
    for s in t.graph().switches() {
        let (l, r) = (s.left.edge, s.right.edge);
        total += &a1[r] * &a2[l] - &a1[l] * &a2[r];
    }
    total / Q::from_integer(2.into())
}

/// `sum_{left-diverging} a1(right) a2(left) - sum_{right-diverging} a1(left) a2(right)`,
/// with no checks on the weights.
pub fn switch_sum_raw(t: &OrientedTrack, a1: &[Q], a2: &[Q]) -> Q {
    let mut total = Q::zero();
    for (s, div) in t.graph().switches().iter().zip(t.divergence()) {
        let (l, r) = (s.left.edge, s.right.edge);
        match div {
            Divergence::Left => total += &a1[r] * &a2[l],
            Divergence::Right => total -= &a1[l] * &a2[r],
        }
    }
    total
}

/// Intersection number from the antisymmetrized switch formula.
pub fn intersection_antisym<T: Track + ?Sized>(
    w1: &WeightSystem,
    w2: &WeightSystem,
    t: &T,
) -> Result<Q, HomologyError> {
    let (a1, a2) = scalar_pair(w1, w2, t)?;
    require_switch_relations(w1, t)?;
    require_switch_relations(w2, t)?;
    Ok(switch_sum_antisym(t, &a1, &a2))
}

/// Intersection number from the divergence-split switch formula.
pub fn intersection_raw(
    w1: &WeightSystem,
    w2: &WeightSystem,
    t: &OrientedTrack,
) -> Result<Q, HomologyError> {
    let (a1, a2) = scalar_pair(w1, w2, t)?;
    require_switch_relations(w1, t)?;
    require_switch_relations(w2, t)?;
    Ok(switch_sum_raw(t, &a1, &a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    fn scalars(v: &[i64]) -> WeightSystem {
        WeightSystem::scalar(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn theta_chain_is_closed() {
        let t = fixtures::theta_oriented();
        let ch = homology_class(&scalars(&[2, 1, 1]), &t).unwrap();
        assert_eq!(ch.boundary(&t), vec![int(0), int(0)]);
        // e1 runs from B to A; e2 and e3 from A to B.
        assert_eq!(ch.tails(), &[1, 0, 0]);
    }

    #[test]
    fn zero_weights_give_zero_chain() {
        let t = fixtures::theta_oriented();
        let ch = homology_class(&scalars(&[0, 0, 0]), &t).unwrap();
        assert!(ch.coefficients().iter().all(Zero::is_zero));
    }

    #[test]
    fn broken_relation_is_an_error() {
        let t = fixtures::theta_oriented();
        assert!(matches!(
            homology_class(&scalars(&[1, 1, 1]), &t),
            Err(HomologyError::Weight(WeightError::SwitchRelation(_)))
        ));
    }

    #[test]
    fn tie_pairing_reads_back_weights() {
        let t = fixtures::theta_oriented();
        let ch = homology_class(&scalars(&[2, 1, 1]), &t).unwrap();
        assert_eq!(tie_pairing(&ch, &t, 0).unwrap(), int(2));
        assert_eq!(tie_pairing(&ch, &t, 2).unwrap(), int(1));
        assert!(tie_pairing(&ch, &t, 3).is_err());
    }

    #[test]
    fn theta_intersections() {
        let t = fixtures::theta_oriented();
        let (w1, w2) = (scalars(&[2, 1, 1]), scalars(&[0, 1, -1]));
        assert_eq!(intersection_antisym(&w1, &w2, &t).unwrap(), int(2));
        assert_eq!(intersection_raw(&w1, &w2, &t).unwrap(), int(2));
        assert_eq!(intersection_raw(&w1, &w1, &t).unwrap(), int(0));
        assert_eq!(intersection_antisym(&w1, &w1, &t).unwrap(), int(0));
        let zero = scalars(&[0, 0, 0]);
        assert_eq!(intersection_raw(&w1, &zero, &t).unwrap(), int(0));
    }

    #[test]
    fn conflicting_flags_detected() {
        let cover = crate::track::orientation_cover(&fixtures::theta()).unwrap();
        assert!(!direction_conflicts(&cover).unwrap().is_empty());
        assert!(matches!(
            edge_tails(&cover),
            Err(HomologyError::IncoherentDivergence(_))
        ));
        assert!(direction_conflicts(&fixtures::theta_oriented())
            .unwrap()
            .is_empty());
    }
}
