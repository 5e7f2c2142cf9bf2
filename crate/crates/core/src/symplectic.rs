//! The pairing of two twisted cocycles on an orientation cover, computed by
//! the homological formula and by the switch-sum formula, and its Gram matrix.

use num::{BigInt, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::homology::{direction_conflicts, intersection_raw, switch_sum_antisym, HomologyError};
use crate::linalg::rank;
use crate::rational::Q;
use crate::track::{
    check_maximal_carrying, quotient_region_cusps, BaseTrack, OrientedTrack, Track, TrackError,
};
use crate::weights::{
    is_twisted, require_switch_relations, SubspaceBasis, WeightError, WeightSystem,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("coupling index out of range: n = {n}, a = {a}, b = {b}")]
    IndexOutOfRange { n: usize, a: usize, b: usize },
    #[error("n must be at least 2, got {0}")]
    BadN(usize),
    #[error("weights have dimension {got}, n = {n} needs {}", n - 1)]
    DimensionMismatch { n: usize, got: usize },
    #[error("basis is not a twisted basis for n = {0}")]
    InvalidBasis(usize),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Track(#[from] TrackError),
}

/// `2a(n-b)` for `a <= b`, symmetric; indices are 1-based.
pub fn coupling_constant(n: usize, a: usize, b: usize) -> Result<i64, SymplecticError> {
    if n < 2 || a == 0 || b == 0 || a >= n || b >= n {
        return Err(SymplecticError::IndexOutOfRange { n, a, b });
    }
    let (lo, hi) = (a.min(b) as i64, a.max(b) as i64);
    Ok(2 * lo * (n as i64 - hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<Vec<i64>>,
}

impl CouplingMatrix {
    pub fn new(n: usize) -> Result<Self, SymplecticError> {
        if n < 2 {
            return Err(SymplecticError::BadN(n));
        }
        let entries = (1..n)
            .map(|a| (1..n).map(|b| coupling_constant(n, a, b)).collect())
            .collect::<Result<_, _>>()?;
        Ok(CouplingMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Zero-based entry.
    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.entries[a][b]
    }

    /// `x^T C y`.
    fn bilinear(&self, x: &[Q], y: &[Q]) -> Q {
        let mut total = Q::zero();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let mut row = Q::zero();
            for (b, yb) in y.iter().enumerate() {
                row += yb * Q::from_integer(BigInt::from(self.entries[a][b]));
            }
            total += xa * row;
        }
        total
    }
}

fn check_inputs<T: Track + ?Sized>(
    a1: &WeightSystem,
    a2: &WeightSystem,
    t: &T,
    n: usize,
) -> Result<CouplingMatrix, SymplecticError> {
    let c = CouplingMatrix::new(n)?;
    for w in [a1, a2] {
        if w.dim() != n - 1 {
            return Err(SymplecticError::DimensionMismatch { n, got: w.dim() });
        }
        require_switch_relations(w, t)?;
    }
    Ok(c)
}

/// Contribution of switch `s` to the switch-sum formula, before the factor 1/2.
fn switch_term(
    c: &CouplingMatrix,
    a1: &WeightSystem,
    a2: &WeightSystem,
    t: &(impl Track + ?Sized),
    s: usize,
) -> Q {
    let sw = &t.graph().switches()[s];
    let (l, r) = (sw.left.edge, sw.right.edge);
    c.bilinear(a1.weight(r), a2.weight(l)) - c.bilinear(a1.weight(l), a2.weight(r))
}

/// `1/2 sum_{a,b} sum_s C(a,b) (a1^a(right) a2^b(left) - a1^a(left) a2^b(right))`.
pub fn pairing_thm2<T: Track + ?Sized>(
    a1: &WeightSystem,
    a2: &WeightSystem,
    t: &T,
    n: usize,
) -> Result<Q, SymplecticError> {
    let c = check_inputs(a1, a2, t, n)?;
    let total: Q = (0..t.graph().num_switches())
        .map(|s| switch_term(&c, a1, a2, t, s))
        .sum();
    Ok(total / Q::from_integer(2.into()))
}

/// Contribution of one switch to [`pairing_thm2`], including the factor 1/2.
pub fn thm2_switch_contribution<T: Track + ?Sized>(
    a1: &WeightSystem,
    a2: &WeightSystem,
    t: &T,
    n: usize,
    s: usize,
) -> Result<Q, SymplecticError> {
    let c = check_inputs(a1, a2, t, n)?;
    Ok(switch_term(&c, a1, a2, t, s) / Q::from_integer(2.into()))
}

/// `sum_{a,b} C(a,b) [a1^a] . [a2^b]`, each intersection number taken from
/// the divergence-split formula.
pub fn pairing_thm1(
    a1: &WeightSystem,
    a2: &WeightSystem,
    t: &OrientedTrack,
    n: usize,
) -> Result<Q, SymplecticError> {
    let c = check_inputs(a1, a2, t, n)?;
    let p1: Vec<_> = (0..n - 1).map(|a| a1.coordinate(a)).collect();
    let p2: Vec<_> = (0..n - 1).map(|b| a2.coordinate(b)).collect();
    let mut total = Q::zero();
    for (a, x) in p1.iter().enumerate() {
        for (b, y) in p2.iter().enumerate() {
            let i = intersection_raw(x, y, t)?;
            total += i * Q::from_integer(BigInt::from(c.get(a, b)));
        }
    }
    Ok(total)
}

/// Both evaluations of the pairing, with notes on missing hypotheses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingReport {
    pub thm1: Q,
    pub thm2: Q,
    pub warnings: Vec<String>,
}

impl PairingReport {
    pub fn difference(&self) -> Q {
        &self.thm1 - &self.thm2
    }

    pub fn agree(&self) -> bool {
        self.thm1 == self.thm2
    }
}

/// Caveats for evaluating the pairing formulas on `t`.
pub fn track_warnings(t: &OrientedTrack) -> Result<Vec<String>, SymplecticError> {
    let mut warnings = Vec::new();
    if t.involution().is_none() {
        warnings.push("track has no involution; not an orientation cover".to_string());
    }
    let maximal = match quotient_region_cusps(t)? {
        Some(cusps) => cusps.iter().all(|&c| c == 3),
        None => check_maximal_carrying(t)?,
    };
    if !maximal {
        let surface = if t.involution().is_some() {
            "base surface"
        } else {
            "track"
        };
        warnings.push(format!(
            "not every complementary region of the {surface} is a trigon"
        ));
    }
    let conflicts = direction_conflicts(t)?;
    if !conflicts.is_empty() {
        warnings.push(format!(
            "divergence flags are not coherent along edges {}",
            conflicts.join(", ")
        ));
    }
    Ok(warnings)
}

pub fn evaluate_pairing(
    a1: &WeightSystem,
    a2: &WeightSystem,
    t: &OrientedTrack,
    n: usize,
) -> Result<PairingReport, SymplecticError> {
    let mut warnings = track_warnings(t)?;
    if t.involution().is_some() {
        for (name, w) in [("first", a1), ("second", a2)] {
            if !is_twisted(w, t)? {
                warnings.push(format!(
                    "{name} cocycle is not twisted under the involution"
                ));
            }
        }
    }
    Ok(PairingReport {
        thm1: pairing_thm1(a1, a2, t, n)?,
        thm2: pairing_thm2(a1, a2, t, n)?,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramReport {
    pub matrix: Vec<Vec<Q>>,
    pub rank: usize,
    pub dimension: usize,
}

impl GramReport {
    pub fn is_antisymmetric(&self) -> bool {
        let m = &self.matrix;
        (0..m.len()).all(|i| (0..m.len()).all(|j| m[i][j] == -m[j][i].clone()))
    }
}

/// Pairings of all basis elements; entries are computed in parallel and
/// assembled in index order.
pub fn gram_matrix(
    basis: &SubspaceBasis,
    t: &OrientedTrack,
    n: usize,
) -> Result<GramReport, SymplecticError> {
    if basis.twisted_n != Some(n) || basis.d != n - 1 {
        return Err(SymplecticError::InvalidBasis(n));
    }
    let k = basis.dimension();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let values: Vec<Q> = pairs
        .par_iter()
        .map(|&(i, j)| pairing_thm2(&basis.basis[i], &basis.basis[j], t, n))
        .collect::<Result<_, _>>()?;
    let mut matrix = vec![vec![Q::zero(); k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        matrix[j][i] = -v.clone();
        matrix[i][j] = v;
    }
    let rank = rank(&matrix);
    Ok(GramReport {
        matrix,
        rank,
        dimension: k,
    })
}

/// The switch-sum form `1/2 sum_s (w1(right) w2(left) - w1(left) w2(right))`
/// on any track, without checks.
pub fn thurston_switch_sum<T: Track + ?Sized>(
    w1: &WeightSystem,
    w2: &WeightSystem,
    t: &T,
) -> Result<Q, SymplecticError> {
    let edges = t.graph().num_edges();
    for w in [w1, w2] {
        w.expect_edges(edges)?;
        if w.dim() != 1 {
            return Err(SymplecticError::DimensionMismatch { n: 2, got: w.dim() });
        }
    }
    let a1: Vec<Q> = w1.weights().iter().map(|v| v[0].clone()).collect();
    let a2: Vec<Q> = w2.weights().iter().map(|v| v[0].clone()).collect();
    Ok(switch_sum_antisym(t, &a1, &a2))
}

/// Pulls a base weight system back to the orientation cover built by
/// [`crate::track::orientation_cover`], where both lifts of an edge get its weight.
pub fn lift_weights(base: &BaseTrack, w: &WeightSystem) -> Result<WeightSystem, SymplecticError> {
    w.expect_edges(base.graph().num_edges())?;
    let weights = w
        .weights()
        .iter()
        .flat_map(|v| [v.clone(), v.clone()])
        .collect();
    Ok(WeightSystem::new(w.dim(), weights)?)
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
    fn coupling_values() {
        assert_eq!(coupling_constant(2, 1, 1).unwrap(), 2);
        assert_eq!(
            CouplingMatrix::new(3).unwrap().entries(),
            &[vec![4, 2], vec![2, 4]]
        );
        for n in 2..=12 {
            for a in 1..n {
                for b in 1..n {
                    let c = coupling_constant(n, a, b).unwrap();
                    assert_eq!(c, coupling_constant(n, b, a).unwrap());
                    assert!(c > 0);
                }
            }
        }
        assert!(coupling_constant(3, 0, 1).is_err());
        assert!(coupling_constant(3, 3, 1).is_err());
    }

    #[test]
    fn theta_pairings() {
        let t = fixtures::theta_oriented();
        let (w1, w2) = (scalars(&[2, 1, 1]), scalars(&[0, 1, -1]));
        assert_eq!(pairing_thm2(&w1, &w2, &t, 2).unwrap(), int(4));
        assert_eq!(pairing_thm1(&w1, &w2, &t, 2).unwrap(), int(4));
        assert_eq!(pairing_thm2(&w1, &w1, &t, 2).unwrap(), int(0));
        let zero = scalars(&[0, 0, 0]);
        assert_eq!(pairing_thm2(&w1, &zero, &t, 2).unwrap(), int(0));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let t = fixtures::theta_oriented();
        let w = scalars(&[2, 1, 1]);
        assert!(matches!(
            pairing_thm2(&w, &w, &t, 3),
            Err(SymplecticError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn theta_warnings() {
        let report = evaluate_pairing(
            &scalars(&[2, 1, 1]),
            &scalars(&[0, 1, -1]),
            &fixtures::theta_oriented(),
            2,
        )
        .unwrap();
        assert!(report.agree());
        assert_eq!(report.warnings.len(), 2);
    }
}
