//! Edge weight systems with values in `Q^d`, and bases of the spaces cut out
//! by the switch relations and the twisted involution constraint.

use num::{BigInt, Zero};
use rand::Rng;
use thiserror::Error;

use crate::linalg::integer_echelon;
use crate::rational::{reverse_coordinates, Q};
use crate::track::{OrientedTrack, Track, TrackError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight system has {got} edges, track has {expected}")]
    EdgeCount { expected: usize, got: usize },
    #[error("weight vectors must have length {expected}, edge {edge} has {got}")]
    VectorLength {
        edge: usize,
        expected: usize,
        got: usize,
    },
    #[error("weight dimension must be positive")]
    ZeroDimension,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("switch relation fails at switch {0}")]
    SwitchRelation(String),
    #[error("track has no involution")]
    MissingInvolution,
    #[error("n must be at least 2, got {0}")]
    BadN(usize),
    #[error(transparent)]
    Track(#[from] TrackError),
}

/// A `Q^d` vector on each edge, indexed like the track's edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    dim: usize,
    weights: Vec<Vec<Q>>,
}

impl WeightSystem {
    pub fn new(dim: usize, weights: Vec<Vec<Q>>) -> Result<Self, WeightError> {
        if dim == 0 {
            return Err(WeightError::ZeroDimension);
        }
        for (edge, w) in weights.iter().enumerate() {
            if w.len() != dim {
                return Err(WeightError::VectorLength {
                    edge,
                    expected: dim,
                    got: w.len(),
                });
            }
        }
        Ok(WeightSystem { dim, weights })
    }

    /// A `d = 1` system from one scalar per edge.
    pub fn scalar(values: Vec<Q>) -> Self {
        WeightSystem {
            dim: 1,
            weights: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn zero(dim: usize, edges: usize) -> Self {
        WeightSystem {
            dim,
            weights: vec![vec![Q::zero(); dim]; edges],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_edges(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, edge: usize) -> &[Q] {
        &self.weights[edge]
    }

    pub fn weights(&self) -> &[Vec<Q>] {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().flatten().all(Zero::is_zero)
    }

    /// The `d = 1` system of coordinate `a` (zero-based).
    pub fn coordinate(&self, a: usize) -> WeightSystem {
        WeightSystem::scalar(self.weights.iter().map(|w| w[a].clone()).collect())
    }

    pub fn scaled(&self, k: &Q) -> WeightSystem {
        WeightSystem {
            dim: self.dim,
            weights: self
                .weights
                .iter()
                .map(|w| w.iter().map(|x| x * k).collect())
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &WeightSystem) -> Result<WeightSystem, WeightError> {
        if self.dim != other.dim {
            return Err(WeightError::DimensionMismatch(self.dim, other.dim));
        }
        if self.num_edges() != other.num_edges() {
            return Err(WeightError::EdgeCount {
                expected: self.num_edges(),
                got: other.num_edges(),
            });
        }
        Ok(WeightSystem {
            dim: self.dim,
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        })
    }

    pub(crate) fn expect_edges(&self, edges: usize) -> Result<(), WeightError> {
        if self.num_edges() != edges {
            return Err(WeightError::EdgeCount {
                expected: edges,
                got: self.num_edges(),
            });
        }
        Ok(())
    }
}

/// The first switch at which `trunk = left + right` fails, if any.
pub fn first_relation_failure<T: Track + ?Sized>(
    w: &WeightSystem,
    t: &T,
) -> Result<Option<usize>, WeightError> {
    let g = t.graph();
    w.expect_edges(g.num_edges())?;
    Ok(g.switches().iter().position(|s| {
        let (tr, l, r) = (
            w.weight(s.trunk.edge),
            w.weight(s.left.edge),
            w.weight(s.right.edge),
        );
        (0..w.dim()).any(|c| tr[c] != &l[c] + &r[c])
    }))
}

/// Whether `trunk = left + right` holds exactly at every switch.
pub fn check_switch_relations<T: Track + ?Sized>(
    w: &WeightSystem,
    t: &T,
) -> Result<bool, WeightError> {
    Ok(first_relation_failure(w, t)?.is_none())
}

pub(crate) fn require_switch_relations<T: Track + ?Sized>(
    w: &WeightSystem,
    t: &T,
) -> Result<(), WeightError> {
    match first_relation_failure(w, t)? {
        None => Ok(()),
        Some(s) => Err(WeightError::SwitchRelation(
            t.graph().switches()[s].id.clone(),
        )),
    }
}

/// Whether `w(iota(e)) = reverse(w(e))` for every edge.
pub fn is_twisted(w: &WeightSystem, c: &OrientedTrack) -> Result<bool, WeightError> {
    let inv = c.involution().ok_or(WeightError::MissingInvolution)?;
    w.expect_edges(c.graph().num_edges())?;
    Ok((0..w.num_edges()).all(|e| w.weight(inv.edges[e]) == reverse_coordinates(w.weight(e))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    /// Vector dimension of each weight.
    pub d: usize,
    /// `Some(n)` for the twisted subspace with `d = n - 1`.
    pub twisted_n: Option<usize>,
    pub basis: Vec<WeightSystem>,
}

impl SubspaceBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// `sum_i coeffs[i] * basis[i]`.
    pub fn combine(&self, coeffs: &[Q], edges: usize) -> WeightSystem {
        let mut acc = WeightSystem::zero(self.d, edges);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (a, x) in acc.weights.iter_mut().zip(&b.weights) {
                for (ai, xi) in a.iter_mut().zip(x) {
                    *ai += c * xi;
                }
            }
        }
        acc
    }

    /// A combination with coefficients `p/q`, `|p| <= bound`, `1 <= q <= bound`.
    pub fn random_element<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        bound: i64,
        edges: usize,
    ) -> WeightSystem {
        let coeffs: Vec<Q> = (0..self.dimension())
            .map(|_| random_rational(rng, bound))
            .collect();
        self.combine(&coeffs, edges)
    }
}

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Q {
    let p = rng.gen_range(-bound..=bound);
    let q = rng.gen_range(1..=bound);
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// Switch relation rows for one coordinate, over `vars` unknowns, with edge
/// `e` mapped to unknown `index(e)`.
fn relation_rows<T: Track + ?Sized>(
    t: &T,
    vars: usize,
    index: impl Fn(usize) -> usize,
) -> Vec<Vec<BigInt>> {
    t.graph()
        .switches()
        .iter()
        .map(|s| {
            let mut row = vec![BigInt::zero(); vars];
            row[index(s.trunk.edge)] += 1;
            row[index(s.left.edge)] -= 1;
            row[index(s.right.edge)] -= 1;
            row
        })
        .collect()
}

/// Basis of all `Q^d` weight systems on `t`: the scalar kernel tensored with
/// the standard basis of `Q^d`.
pub fn weight_space_basis<T: Track + ?Sized>(
    t: &T,
    d: usize,
) -> Result<SubspaceBasis, WeightError> {
    if d == 0 {
        return Err(WeightError::ZeroDimension);
    }
    t.ensure_valid()?;
    let e = t.graph().num_edges();
    let kernel = integer_echelon(relation_rows(t, e, |i| i), e).kernel_basis();
    let mut basis = Vec::with_capacity(kernel.len() * d);
    for k in &kernel {
        for c in 0..d {
            let weights = k
                .iter()
                .map(|x| {
                    let mut v = vec![Q::zero(); d];
                    v[c] = x.clone();
                    v
                })
                .collect();
            basis.push(WeightSystem { dim: d, weights });
        }
    }
    Ok(SubspaceBasis {
        d,
        twisted_n: None,
        basis,
    })
}

/// Basis of `Q^(n-1)` weight systems on a cover satisfying the switch
/// relations and `w(iota(e)) = reverse(w(e))`. Unknown `e * d + c` is
/// coordinate `c` on edge `e`.
pub fn twisted_subspace_basis(c: &OrientedTrack, n: usize) -> Result<SubspaceBasis, WeightError> {
    if n < 2 {
        return Err(WeightError::BadN(n));
    }
    let inv = c.involution().ok_or(WeightError::MissingInvolution)?;
    c.ensure_valid()?;
    let d = n - 1;
    let edges = c.graph().num_edges();
    let vars = edges * d;
    let mut rows = Vec::new();
    for coord in 0..d {
        rows.extend(relation_rows(c, vars, |e| e * d + coord));
    }
    for e in 0..edges {
        let image = inv.edges[e];
        if image < e {
            continue;
        }
        for coord in 0..d {
            let mut row = vec![BigInt::zero(); vars];
            row[image * d + coord] += 1;
            row[e * d + (d - 1 - coord)] -= 1;
            rows.push(row);
        }
    }
    let kernel = integer_echelon(rows, vars).kernel_basis();
    let basis = kernel
        .into_iter()
        .map(|k| WeightSystem {
            dim: d,
            weights: k.chunks(d).map(<[Q]>::to_vec).collect(),
        })
        .collect();
    Ok(SubspaceBasis {
        d,
        twisted_n: Some(n),
        basis,
    })
}
