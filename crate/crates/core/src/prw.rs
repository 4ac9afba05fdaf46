//! Persistent random walk models of the velocity process.
//!
//! Order 0 treats the jumps as independent, order 1 conditions each jump on the
//! previous one, order 2 on the previous two. All probabilities are measures
//! of cylinder sets under the uniform invariant density.

use serde::{Deserialize, Serialize};

use crate::cylinder;
use crate::error::{Error, Result};
use crate::estimate::{DiffusionEstimate, Method};
use crate::linalg::{self, DenseMatrix};
use crate::map::{MapParams, Velocity};

/// Default summation tolerance of [`d_prw2`].
pub const DEFAULT_PRW2_TOL: f64 = 1e-14;
/// Default term cap of [`d_prw2`].
pub const DEFAULT_PRW2_MAX_TERMS: usize = 10_000;
/// Consecutive terms used to estimate the geometric decay of the tail.
const TAIL_WINDOW: usize = 5;

/// One-step memory. The mirror partners `P(-1|-1) = P(1|1)`,
/// `P(1|-1) = P(-1|1)` and `p(-1) = p(1)` are implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneStepProbs {
    /// `p(1) = h/2`.
    pub p1: f64,
    /// `P(1|1)`.
    pub p11: f64,
    /// `P(-1|1)`.
    pub p1m1: f64,
    /// Set when the conditioning event `[+1]` has measure zero (`h = 0`).
    pub degenerate: bool,
}

impl OneStepProbs {
    /// `P(0|1)`.
    pub fn p10(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            1.0 - self.p11 - self.p1m1
        }
    }

    /// `P(1|0)`, from stationarity: `p(0) P(1|0) = p(1) P(0|1)`.
    pub fn p01(&self) -> f64 {
        let p0 = 1.0 - 2.0 * self.p1;
        if p0 <= 0.0 {
            0.0
        } else {
            self.p1 * self.p10() / p0
        }
    }

    /// Column-stochastic transition matrix `T[b][a] = P(b|a)` in the order `0, +1, -1`.
    pub fn transition_matrix(&self) -> [[f64; 3]; 3] {
        let (p01, p10) = (self.p01(), self.p10());
        [
            [1.0 - 2.0 * p01, p10, p10],
            [p01, self.p11, self.p1m1],
            [p01, self.p1m1, self.p11],
        ]
    }
}

/// Closed forms of the one-step probabilities, piecewise in `h`.
pub fn one_step_probs(p: &MapParams) -> OneStepProbs {
    let h = p.h();
    let p11 = if h < 1.0 / 3.0 {
        0.0
    } else if h < 0.5 {
        (3.0 * h - 1.0) / (2.0 * h)
    } else {
        0.5
    };
    let p1m1 = if h < 0.5 { 0.0 } else { 1.0 - 1.0 / (2.0 * h) };
    OneStepProbs {
        p1: h / 2.0,
        p11,
        p1m1,
        degenerate: h == 0.0,
    }
}

/// The same probabilities as ratios of exact cylinder measures.
pub fn one_step_probs_from_cylinders(p: &MapParams) -> Result<OneStepProbs> {
    use Velocity::{Down, Up};
    let mu1 = cylinder::cylinder_intervals(&[Up], p)?.measure;
    if mu1 == 0.0 {
        return Ok(OneStepProbs { p1: 0.0, p11: 0.0, p1m1: 0.0, degenerate: true });
    }
    let mu11 = cylinder::cylinder_intervals(&[Up, Up], p)?.measure;
    let mu1m1 = cylinder::cylinder_intervals(&[Up, Down], p)?.measure;
    Ok(OneStepProbs {
        p1: mu1,
        p11: mu11 / mu1,
        p1m1: mu1m1 / mu1,
        degenerate: false,
    })
}

/// Memoryless walk: `D = h/2`.
pub fn d_prw0(p: &MapParams) -> DiffusionEstimate {
    DiffusionEstimate::new(Method::Prw, 0, p.h(), p.h() / 2.0)
}

/// `D = h/(1 - P(1|1) + P(-1|1)) - h/2`, the geometric resummation of the one-step model.
pub fn d_prw1(p: &MapParams) -> Result<DiffusionEstimate> {
    d_prw1_from(p.h(), &one_step_probs(p))
}

pub fn d_prw1_from(h: f64, probs: &OneStepProbs) -> Result<DiffusionEstimate> {
    let q = probs.p11 - probs.p1m1;
    if q.abs() >= 1.0 {
        return Err(Error::Divergence(format!(
            "persistence P(1|1) - P(-1|1) = {q} has modulus >= 1"
        )));
    }
    let value = h / (1.0 - q) - h / 2.0;
    Ok(DiffusionEstimate::new(Method::Prw, 1, h, value))
}

/// `<v_0 v_n> = 2 p(1) (P(1|1) - P(-1|1))^n` after the zero-state paths cancel.
pub fn prw1_autocorrelation(probs: &OneStepProbs, n: usize) -> f64 {
    2.0 * probs.p1 * (probs.p11 - probs.p1m1).powi(n as i32)
}

/// The same correlation from the full three-state chain, `r . T^n . s`.
pub fn prw1_autocorrelation_matrix(probs: &OneStepProbs, n: usize) -> f64 {
    let t = probs.transition_matrix();
    let mut x = [0.0, probs.p1, -probs.p1];
    for _ in 0..n {
        let mut y = [0.0; 3];
        for (b, yb) in y.iter_mut().enumerate() {
            *yb = (0..3).map(|a| t[b][a] * x[a]).sum();
        }
        x = y;
    }
    x[1] - x[2]
}

/// Two-step memory. Arrays are indexed by [`Velocity::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStepProbs {
    /// `pair[a][b] = p(a, b)`, the measure of `[v_0 = a, v_1 = b]`.
    pub pair: [[f64; 3]; 3],
    /// `cond[c][b][a] = P(c | b, a)`; `None` when `p(a, b) = 0`.
    pub cond: [[[Option<f64>; 3]; 3]; 3],
}

impl TwoStepProbs {
    pub fn pair_prob(&self, a: Velocity, b: Velocity) -> f64 {
        self.pair[a.index()][b.index()]
    }

    pub fn conditional(&self, c: Velocity, b: Velocity, a: Velocity) -> Option<f64> {
        self.cond[c.index()][b.index()][a.index()]
    }

    fn from_triples(triple: impl Fn(Velocity, Velocity, Velocity) -> f64) -> Self {
        let mut pair = [[0.0; 3]; 3];
        let mut cond = [[[None; 3]; 3]; 3];
        for a in Velocity::ALL {
            for b in Velocity::ALL {
                let masses: Vec<f64> = Velocity::ALL.iter().map(|&c| triple(a, b, c)).collect();
                let total: f64 = masses.iter().sum();
                pair[a.index()][b.index()] = total;
                if total > 0.0 {
                    for (c, m) in Velocity::ALL.iter().zip(&masses) {
                        cond[c.index()][b.index()][a.index()] = Some(m / total);
                    }
                }
            }
        }
        Self { pair, cond }
    }
}

fn triple_measures(p: &MapParams) -> Result<[[[f64; 3]; 3]; 3]> {
    let mut mu = [[[0.0; 3]; 3]; 3];
    for c in cylinder::enumerate_cylinders(3, p)? {
        let [a, b, d] = [c.symbols[0], c.symbols[1], c.symbols[2]];
        mu[a.index()][b.index()][d.index()] = c.measure;
    }
    Ok(mu)
}

/// Pair and conditional probabilities from the length-3 cylinders.
/// Pair probabilities are marginals of the triples, so every conditional row
/// sums to one up to a single rounding.
pub fn two_step_probs(p: &MapParams) -> Result<TwoStepProbs> {
    let mu = triple_measures(p)?;
    Ok(TwoStepProbs::from_triples(|a, b, c| mu[a.index()][b.index()][c.index()]))
}

/// The probabilities rebuilt from the mirror image `x -> 1 - x` of the
/// dynamics: each cylinder is replaced by its sign-flipped partner.
pub fn two_step_probs_mirrored(p: &MapParams) -> Result<TwoStepProbs> {
    let mu = triple_measures(p)?;
    Ok(TwoStepProbs::from_triples(|a, b, c| {
        mu[a.flip().index()][b.flip().index()][c.flip().index()]
    }))
}

/// Pair-state chain. State `(c, b)` (newest velocity first) sits at index
/// `3 c.index() + b.index()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryChain {
    /// `A[(c,b),(b,a)] = P(c|b,a)`.
    pub a: DenseMatrix,
    /// `r[(c,b)] = c`.
    pub r: Vec<f64>,
    /// `s[(b,a)] = a p(a,b)`.
    pub s: Vec<f64>,
}

#[inline]
fn state(newer: Velocity, older: Velocity) -> usize {
    3 * newer.index() + older.index()
}

pub fn build_two_step_chain(t: &TwoStepProbs) -> MemoryChain {
    let mut a = DenseMatrix::zeros(9);
    let mut r = vec![0.0; 9];
    let mut s = vec![0.0; 9];
    for older in Velocity::ALL {
        for newer in Velocity::ALL {
            r[state(newer, older)] = newer.as_f64();
            s[state(newer, older)] = older.as_f64() * t.pair_prob(older, newer);
            for next in Velocity::ALL {
                if let Some(pc) = t.conditional(next, newer, older) {
                    a.set(state(next, newer), state(newer, older), pc);
                }
            }
        }
    }
    MemoryChain { a, r, s }
}

/// `<v_0 v_n> = r . A^{n-1} . s`. The vector `s` already carries the first two
/// velocities, so `n - 1` further steps reach lag `n`.
pub fn prw2_autocorrelation(chain: &MemoryChain, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    let mut x = chain.s.clone();
    for _ in 1..n {
        x = linalg::matvec(&chain.a, &x)?;
    }
    Ok(linalg::dot(&chain.r, &x))
}

/// The same correlation through the reduced three-by-three form: with
/// `m_ij` the entries of `A^{n-1}` (1-based), sum the `+1` rows 4..6 against
/// the antisymmetric column differences and double for the `-1` rows.
pub fn prw2_autocorrelation_reduced(chain: &MemoryChain, t: &TwoStepProbs, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    let mut m = DenseMatrix::identity(9);
    for _ in 1..n {
        m = multiply(&chain.a, &m);
    }
    let e = |i: usize, j: usize| m.get(i - 1, j - 1);
    use Velocity::{Down, Stay, Up};
    let weights = [t.pair_prob(Up, Stay), t.pair_prob(Up, Up), t.pair_prob(Up, Down)];
    let mut total = 0.0;
    for row in 4..=6 {
        let cols = [e(row, 2) - e(row, 3), e(row, 5) - e(row, 9), e(row, 8) - e(row, 6)];
        total += cols.iter().zip(&weights).map(|(c, w)| c * w).sum::<f64>();
    }
    Ok(2.0 * total)
}

fn multiply(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.dim();
    DenseMatrix::from_fn(n, |i, j| (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum())
}

/// `D = <v_0^2>/2 + sum_{n>=1} <v_0 v_n>` for the two-step chain, summed term by term.
///
/// The iterate `x_n = A^n s` bounds every later term by `||x_n||_1` (columns of
/// `A` sum to at most one). Summation stops once a term and `||x_n||_1` are
/// below `tol` and the decay of `||x||_1` over the last five steps projects a
/// geometric tail below `tol`; that projected tail is the error bound.
pub fn d_prw2(p: &MapParams, tol: f64, n_max: usize) -> Result<DiffusionEstimate> {
    d_prw2_from(p.h(), &two_step_probs(p)?, tol, n_max)
}

pub fn d_prw2_from(h: f64, probs: &TwoStepProbs, tol: f64, n_max: usize) -> Result<DiffusionEstimate> {
    if !(tol > 0.0) || n_max == 0 {
        return Err(Error::InvalidParameter(format!(
            "summation needs tol > 0 and n_max >= 1 (got {tol}, {n_max})"
        )));
    }
    let chain = build_two_step_chain(probs);
    let v0_sq: f64 = probs.pair[Velocity::Up.index()].iter().sum::<f64>()
        + probs.pair[Velocity::Down.index()].iter().sum::<f64>();
    let mut sum = 0.0;
    let mut x = chain.s.clone();
    let mut norms: Vec<f64> = Vec::with_capacity(64);
    let l1 = |v: &[f64]| v.iter().map(|z| z.abs()).sum::<f64>();
    norms.push(l1(&x));
    for n in 1..=n_max {
        let term = linalg::dot(&chain.r, &x);
        sum += term;
        x = linalg::matvec(&chain.a, &x)?;
        let norm = l1(&x);
        norms.push(norm);
        if norm == 0.0 {
            return Ok(DiffusionEstimate::new(Method::Prw, 2, h, v0_sq / 2.0 + sum).with_bound(0.0));
        }
        if n >= TAIL_WINDOW && term.abs() < tol && norm < tol {
            let past = norms[norms.len() - 1 - TAIL_WINDOW];
            let rho = (norm / past).powf(1.0 / TAIL_WINDOW as f64);
            if rho < 1.0 {
                let tail = norm / (1.0 - rho);
                if tail < tol {
                    return Ok(DiffusionEstimate::new(Method::Prw, 2, h, v0_sq / 2.0 + sum).with_bound(tail));
                }
            }
        }
    }
    Err(Error::NoConvergence {
        what: format!("order-2 persistent walk series at h = {h}"),
        iterations: n_max,
    })
}
