//! Elementary and infinitesimal shearing maps, the Killing form, finite
//! shearing products and their derivative at the identity.
//!
//! Exact work happens over `Q`; exponentials and finite differences use `f64`.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::linalg::{Matrix, Scalar};
use crate::rational::{int, Q};
use crate::track::{Slot, Track};
use crate::weights::WeightSystem;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShearError {
    #[error("line decomposition is singular")]
    Singular,
    #[error("line decomposition must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("shear index {a} out of range for n = {n}")]
    IndexOutOfRange { n: usize, a: usize },
    #[error("n must be at least 2, got {0}")]
    BadN(usize),
    #[error("no cochain value at switch {switch}, {side} side")]
    MissingCochain { switch: String, side: &'static str },
}

fn q_of<T: Scalar>(v: i64) -> T {
    T::from_rational(&int(v))
}

/// Potentials `v` with `v_a - v_(a+1) = u_a` and `sum v_a = 0`, from the
/// closed form `v_a = -sum_(b<a) (b/n) u_b + sum_(b>=a) ((n-b)/n) u_b`.
pub fn amplitudes_to_potentials<T: Scalar>(u: &[T]) -> Vec<T> {
    let n = u.len() + 1;
    let nn: T = q_of(n as i64);
    (1..=n)
        .map(|a| {
            let mut v = T::zero();
            for (i, ub) in u.iter().enumerate() {
                let b = i + 1;
                let coeff: T = if b < a {
                    -(q_of::<T>(b as i64) / nn.clone())
                } else {
                    q_of::<T>((n - b) as i64) / nn.clone()
                };
                v = v + coeff * ub.clone();
            }
            v
        })
        .collect()
}

/// Columns of an invertible matrix, read as the lines `L_1, ..., L_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineDecomposition {
    lines: Matrix<Q>,
    inverse: Matrix<Q>,
    lines_f64: Matrix<f64>,
    inverse_f64: Matrix<f64>,
}

impl LineDecomposition {
    pub fn new(lines: Matrix<Q>) -> Result<Self, ShearError> {
        if !lines.is_square() {
            return Err(ShearError::NotSquare(lines.nrows(), lines.ncols()));
        }
        let inverse = lines.inverse().ok_or(ShearError::Singular)?;
        Ok(LineDecomposition {
            lines_f64: lines.to_f64(),
            inverse_f64: inverse.to_f64(),
            lines,
            inverse,
        })
    }

    pub fn standard(n: usize) -> Self {
        Self::new(Matrix::identity(n)).expect("identity is invertible")
    }

    pub fn n(&self) -> usize {
        self.lines.nrows()
    }

    pub fn lines(&self) -> &Matrix<Q> {
        &self.lines
    }

    /// `L diag(d) L^-1`.
    fn conjugate_diag(&self, d: &[Q]) -> Matrix<Q> {
        conj(&self.lines, d, &self.inverse)
    }

    fn conjugate_diag_f64(&self, d: &[f64]) -> Matrix<f64> {
        conj(&self.lines_f64, d, &self.inverse_f64)
    }
}

fn conj<T: Scalar>(l: &Matrix<T>, d: &[T], inv: &Matrix<T>) -> Matrix<T> {
    let n = l.nrows();
    let mut scaled = l.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] = scaled[(i, j)].clone() * d[j].clone();
        }
    }
    scaled.checked_mul(inv).expect("square")
}

fn check_amplitude(n: usize, len: usize) -> Result<(), ShearError> {
    if len + 1 != n {
        return Err(ShearError::SizeMismatch {
            expected: n - 1,
            got: len,
        });
    }
    Ok(())
}

/// `t^(a)`: multiplication by `(n-a)/n` on `L_b` for `b <= a` and by `-a/n`
/// for `b > a`. `a` is 1-based.
pub fn infinitesimal_shear(
    n: usize,
    a: usize,
    l: &LineDecomposition,
) -> Result<Matrix<Q>, ShearError> {
    if n < 2 {
        return Err(ShearError::BadN(n));
    }
    if a == 0 || a >= n {
        return Err(ShearError::IndexOutOfRange { n, a });
    }
    if l.n() != n {
        return Err(ShearError::SizeMismatch {
            expected: n,
            got: l.n(),
        });
    }
    let (ni, ai) = (n as i64, a as i64);
    let d: Vec<Q> = (1..=n)
        .map(|b| {
            if b <= a {
                Q::new(BigInt::from(ni - ai), BigInt::from(ni))
            } else {
                Q::new(BigInt::from(-ai), BigInt::from(ni))
            }
        })
        .collect();
    Ok(l.conjugate_diag(&d))
}

/// `L diag(exp v_a) L^-1` for the potentials of `u`.
pub fn elementary_shear(u: &[f64], l: &LineDecomposition) -> Result<Matrix<f64>, ShearError> {
    check_amplitude(l.n(), u.len())?;
    let d: Vec<f64> = amplitudes_to_potentials(u)
        .into_iter()
        .map(f64::exp)
        .collect();
    Ok(l.conjugate_diag_f64(&d))
}

/// `B(X, Y) = 2n Tr(XY)`.
pub fn killing_form<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<T, ShearError> {
    if !x.is_square() || x.nrows() != y.nrows() || !y.is_square() {
        return Err(ShearError::SizeMismatch {
            expected: x.nrows(),
            got: y.nrows(),
        });
    }
    let n = x.nrows();
    let mut tr = T::zero();
    for i in 0..n {
        for k in 0..n {
            tr = tr + x[(i, k)].clone() * y[(k, i)].clone();
        }
    }
    Ok(q_of::<T>(2 * n as i64) * tr)
}

/// A fixed unimodular, non-diagonal decomposition: upper unitriangular
/// all-ones times lower unitriangular all-ones.
pub fn reference_decomposition(n: usize) -> LineDecomposition {
    let mut upper = Matrix::<Q>::zeros(n, n);
    let mut lower = Matrix::<Q>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j >= i {
                upper[(i, j)] = Q::one();
            }
            if j <= i {
                lower[(i, j)] = Q::one();
            }
        }
    }
    LineDecomposition::new(upper.checked_mul(&lower).expect("square")).expect("unimodular")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingCheck {
    pub n: usize,
    /// `B(t^(a), t^(b))`, zero-based.
    pub killing: Vec<Vec<Q>>,
    /// 1-based `(a, b)` where the Killing value differs from `C(a, b)`.
    pub mismatches: Vec<(usize, usize)>,
}

impl CouplingCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `B(t^(a), t^(b))` on a shared decomposition with `C(a, b)`.
pub fn verify_coupling(n: usize) -> Result<CouplingCheck, ShearError> {
    if n < 2 {
        return Err(ShearError::BadN(n));
    }
    let l = reference_decomposition(n);
    let ts: Vec<Matrix<Q>> = (1..n)
        .map(|a| infinitesimal_shear(n, a, &l))
        .collect::<Result<_, _>>()?;
    let mut killing = vec![vec![Q::zero(); n - 1]; n - 1];
    let mut mismatches = Vec::new();
    for a in 1..n {
        for b in 1..n {
            let k = killing_form(&ts[a - 1], &ts[b - 1])?;
            let c = crate::symplectic::coupling_constant(n, a, b).expect("indices in range");
            if k != int(c) {
                mismatches.push((a, b));
            }
            killing[a - 1][b - 1] = k;
        }
    }
    Ok(CouplingCheck {
        n,
        killing,
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShearStep {
    pub minus: LineDecomposition,
    pub plus: LineDecomposition,
    /// Cumulative amplitude at this step.
    pub amplitude: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShearConfiguration {
    n: usize,
    steps: Vec<ShearStep>,
    terminal: LineDecomposition,
    terminal_amplitude: Vec<Q>,
}

impl ShearConfiguration {
    pub fn new(
        steps: Vec<ShearStep>,
        terminal: LineDecomposition,
        terminal_amplitude: Vec<Q>,
    ) -> Result<Self, ShearError> {
        let n = terminal.n();
        if n < 2 {
            return Err(ShearError::BadN(n));
        }
        check_amplitude(n, terminal_amplitude.len())?;
        for s in &steps {
            for l in [&s.minus, &s.plus] {
                if l.n() != n {
                    return Err(ShearError::SizeMismatch {
                        expected: n,
                        got: l.n(),
                    });
                }
            }
            check_amplitude(n, s.amplitude.len())?;
        }
        Ok(ShearConfiguration {
            n,
            steps,
            terminal,
            terminal_amplitude,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[ShearStep] {
        &self.steps
    }

    pub fn terminal(&self) -> (&LineDecomposition, &[Q]) {
        (&self.terminal, &self.terminal_amplitude)
    }

    /// The same configuration with every amplitude multiplied by `k`.
    pub fn scaled(&self, k: &Q) -> Self {
        let scale = |u: &[Q]| u.iter().map(|x| x * k).collect::<Vec<_>>();
        ShearConfiguration {
            n: self.n,
            steps: self
                .steps
                .iter()
                .map(|s| ShearStep {
                    minus: s.minus.clone(),
                    plus: s.plus.clone(),
                    amplitude: scale(&s.amplitude),
                })
                .collect(),
            terminal: self.terminal.clone(),
            terminal_amplitude: scale(&self.terminal_amplitude),
        }
    }
}

fn amplitude_f64(u: &[Q], scale: f64) -> Vec<f64> {
    u.iter()
        .map(|x| crate::rational::to_f64(x) * scale)
        .collect()
}

/// The product with every amplitude multiplied by `scale`, evaluated left to right:
/// `T(a_1; L_1^-) T(-a_1; L_1^+) ... T(a; L_final)`.
pub fn compose_shearing_scaled(cfg: &ShearConfiguration, scale: f64) -> Matrix<f64> {
    let mut acc = Matrix::<f64>::identity(cfg.n);
    let mul = |acc: &Matrix<f64>, u: Vec<f64>, l: &LineDecomposition| {
        let t = elementary_shear(&u, l).expect("validated configuration");
        acc.checked_mul(&t).expect("square")
    };
    for s in &cfg.steps {
        acc = mul(&acc, amplitude_f64(&s.amplitude, scale), &s.minus);
        acc = mul(&acc, amplitude_f64(&s.amplitude, -scale), &s.plus);
    }
    mul(
        &acc,
        amplitude_f64(&cfg.terminal_amplitude, scale),
        &cfg.terminal,
    )
}

pub fn compose_shearing(cfg: &ShearConfiguration) -> Matrix<f64> {
    compose_shearing_scaled(cfg, 1.0)
}

/// `sum_a u^a t^(a)_L`.
pub fn shear_generator(u: &[Q], l: &LineDecomposition) -> Result<Matrix<Q>, ShearError> {
    let n = l.n();
    check_amplitude(n, u.len())?;
    let mut acc = Matrix::<Q>::zeros(n, n);
    for (i, ua) in u.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        let t = infinitesimal_shear(n, i + 1, l)?;
        acc = acc.checked_add(&t.scale(ua)).expect("same size");
    }
    Ok(acc)
}

/// `sum_i sum_a a_i^a (t^(a)_(L_i^-) - t^(a)_(L_i^+)) + sum_a a^a t^(a)_(L_final)`,
/// the derivative at `0` of [`compose_shearing_scaled`].
pub fn finite_gap_derivative(cfg: &ShearConfiguration) -> Matrix<Q> {
    let gen =
        |u: &[Q], l: &LineDecomposition| shear_generator(u, l).expect("validated configuration");
    let mut acc = gen(&cfg.terminal_amplitude, &cfg.terminal);
    for s in &cfg.steps {
        let d = gen(&s.amplitude, &s.minus)
            .checked_sub(&gen(&s.amplitude, &s.plus))
            .expect("same size");
        acc = acc.checked_add(&d).expect("same size");
    }
    acc
}

/// Central-difference errors against the exact derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceSweep {
    pub steps: Vec<f64>,
    /// Relative Frobenius error at each step.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub slope: f64,
    /// Relative error of the Richardson extrapolation of the two largest steps.
    pub richardson_error: f64,
}

pub const DEFAULT_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

fn central_difference(cfg: &ShearConfiguration, h: f64) -> Matrix<f64> {
    let plus = compose_shearing_scaled(cfg, h);
    let minus = compose_shearing_scaled(cfg, -h);
    plus.checked_sub(&minus)
        .expect("same size")
        .scale(&(0.5 / h))
}

pub fn difference_sweep(cfg: &ShearConfiguration, steps: &[f64]) -> DifferenceSweep {
    let exact = finite_gap_derivative(cfg).to_f64();
    let norm = exact.frobenius_norm().max(f64::MIN_POSITIVE);
    let fds: Vec<Matrix<f64>> = steps.iter().map(|&h| central_difference(cfg, h)).collect();
    let rel = |m: &Matrix<f64>| m.checked_sub(&exact).expect("same size").frobenius_norm() / norm;
    let errors: Vec<f64> = fds.iter().map(rel).collect();
    let slope = log_log_slope(steps, &errors);
    let richardson_error = match (steps, fds.as_slice()) {
        ([h1, h2, ..], [f1, f2, ..]) => {
            let r2 = (h1 / h2).powi(2);
            let extrapolated = f2
                .scale(&r2)
                .checked_sub(f1)
                .expect("same size")
                .scale(&(1.0 / (r2 - 1.0)));
            rel(&extrapolated)
        }
        _ => f64::NAN,
    };
    DifferenceSweep {
        steps: steps.to_vec(),
        errors,
        slope,
        richardson_error,
    }
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R, num: i64, den: i64) -> Q {
    Q::new(BigInt::from(rng.gen_range(-num..=num)), BigInt::from(den))
}

/// `I + E` with entries of `E` in `{-num/den, ..., num/den}`, retried until invertible.
pub fn random_decomposition<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    num: i64,
    den: i64,
) -> LineDecomposition {
    loop {
        let mut m = Matrix::<Q>::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += small_rational(rng, num, den);
            }
        }
        if let Ok(l) = LineDecomposition::new(m) {
            return l;
        }
    }
}

/// Frobenius norm of the derivative that [`random_configuration`] aims for.
/// Central differences with steps `1e-3..1e-5` then stay above the `f64`
/// roundoff floor while the `h = 1e-4` error stays near `1e-7`.
pub const TARGET_DERIVATIVE_NORM: f64 = 4.0;

/// Largest central-difference error at `h = 1e-4` that
/// [`random_configuration`] accepts before shrinking amplitudes.
pub const TARGET_TRUNCATION_ERROR: f64 = 2e-7;

/// A random configuration with `m` steps. Each `L_i^+` is a small rational
/// perturbation of `L_i^-`, and the cumulative amplitudes are partial sums of
/// small increments. Amplitudes are finally rescaled by a rational factor
/// (multiple of 1/64) so the derivative has norm near
/// [`TARGET_DERIVATIVE_NORM`], and shrunk again if the predicted error at
/// `h = 1e-4` exceeds [`TARGET_TRUNCATION_ERROR`].
pub fn random_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
) -> ShearConfiguration {
    let mut cumulative = vec![Q::zero(); n - 1];
    let mut steps = Vec::with_capacity(m);
    for _ in 0..m {
        for c in cumulative.iter_mut() {
            *c += small_rational(rng, 8, 4);
        }
        let minus = random_decomposition(rng, n, 3, 10);
        let mut nudge = Matrix::<Q>::identity(n);
        for i in 0..n {
            for j in 0..n {
                nudge[(i, j)] += small_rational(rng, 3, 20);
            }
        }
        let plus = match minus
            .lines()
            .checked_mul(&nudge)
            .map(LineDecomposition::new)
        {
            Some(Ok(l)) => l,
            _ => minus.clone(),
        };
        steps.push(ShearStep {
            minus,
            plus,
            amplitude: cumulative.clone(),
        });
    }
    let terminal = random_decomposition(rng, n, 3, 10);
    let terminal_amplitude = (0..n - 1).map(|_| small_rational(rng, 8, 4)).collect();
    let cfg =
        ShearConfiguration::new(steps, terminal, terminal_amplitude).expect("consistent sizes");
    let norm = finite_gap_derivative(&cfg).to_f64().frobenius_norm();
    if norm == 0.0 {
        return cfg;
    }
    let k = ((64.0 * TARGET_DERIVATIVE_NORM / norm).round() as i64).max(1);
    let cfg = cfg.scaled(&Q::new(BigInt::from(k), BigInt::from(64)));
    // Truncation error scales as (k h)^2; shrink further when higher
    // derivatives are large relative to the first.
    let predicted = difference_sweep(&cfg, &[1e-3]).errors[0] / 100.0;
    if predicted <= TARGET_TRUNCATION_ERROR {
        return cfg;
    }
    let k = ((64.0 * (TARGET_TRUNCATION_ERROR / predicted).sqrt()).floor() as i64).max(1);
    cfg.scaled(&Q::new(BigInt::from(k), BigInt::from(64)))
}

/// Matrix values of a cocycle on the two branch sides of every switch.
pub type SwitchCochain = BTreeMap<(usize, Slot), Matrix<Q>>;

fn cochain_at<'a>(
    u: &'a SwitchCochain,
    t: &(impl Track + ?Sized),
    s: usize,
    side: Slot,
) -> Result<&'a Matrix<Q>, ShearError> {
    u.get(&(s, side)).ok_or_else(|| ShearError::MissingCochain {
        switch: t.graph().switches()[s].id.clone(),
        side: side.name(),
    })
}

/// `1/2 sum_s (B(u1(right), u2(left)) - B(u1(left), u2(right)))`.
pub fn abg_from_cochain<T: Track + ?Sized>(
    t: &T,
    u1: &SwitchCochain,
    u2: &SwitchCochain,
) -> Result<Q, ShearError> {
    let mut total = Q::zero();
    for s in 0..t.graph().num_switches() {
        let (r1, l1) = (
            cochain_at(u1, t, s, Slot::Right)?,
            cochain_at(u1, t, s, Slot::Left)?,
        );
        let (r2, l2) = (
            cochain_at(u2, t, s, Slot::Right)?,
            cochain_at(u2, t, s, Slot::Left)?,
        );
        total += killing_form(r1, l2)? - killing_form(l1, r2)?;
    }
    Ok(total / int(2))
}

/// `u(s, side) = sum_a w^a(e_side) t^(a)_(L_s)`, one decomposition per switch.
pub fn degenerate_cochain<T: Track + ?Sized>(
    t: &T,
    w: &WeightSystem,
    decompositions: &[LineDecomposition],
) -> Result<SwitchCochain, ShearError> {
    let g = t.graph();
    if decompositions.len() != g.num_switches() {
        return Err(ShearError::SizeMismatch {
            expected: g.num_switches(),
            got: decompositions.len(),
        });
    }
    if w.num_edges() != g.num_edges() {
        return Err(ShearError::SizeMismatch {
            expected: g.num_edges(),
            got: w.num_edges(),
        });
    }
    let mut u = SwitchCochain::new();
    for (s, (sw, l)) in g.switches().iter().zip(decompositions).enumerate() {
        for side in [Slot::Right, Slot::Left] {
            let edge = sw.slot(side).edge;
            u.insert((s, side), shear_generator(w.weight(edge), l)?);
        }
    }
    Ok(u)
}
