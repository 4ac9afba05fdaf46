//! Small dense linear algebra for transition-matrix spectra.
//!
//! The leading eigenpair comes from power iteration polished by inverse
//! iteration. The subleading eigenvalue is found by deflating the leading pair
//! and running a two-column shift-invert iteration just above the leading
//! eigenvalue, so the iteration locks onto the eigenvalue *closest* to it; a
//! 2x2 Rayleigh-Ritz step resolves degenerate and complex-conjugate pairs.
//! A Hessenberg QR sweep over the full spectrum is the fallback.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Largest dimension handed to the full QR fallback.
pub const QR_FALLBACK_MAX_DIM: usize = 512;
/// Shift-invert iterations without a certified residual before falling back to QR.
const STALL_ITERATIONS: usize = 300;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("matrix dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    fn apply_transpose(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                axpy(xi, self.row(i), out);
            }
        }
    }
}

/// `A x`.
pub fn matvec(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.dim {
        return Err(Error::Dimension(format!(
            "vector of length {} against a {}x{} matrix",
            x.len(),
            a.dim,
            a.dim
        )));
    }
    let mut out = vec![0.0; a.dim];
    a.apply(x, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn scale(x: &mut [f64], s: f64) {
    x.iter_mut().for_each(|v| *v *= s);
}

/// `||A v - lambda v||_inf`.
fn residual(a: &DenseMatrix, lambda: f64, v: &[f64], transpose: bool) -> f64 {
    let mut av = vec![0.0; v.len()];
    if transpose {
        a.apply_transpose(v, &mut av);
    } else {
        a.apply(v, &mut av);
    }
    av.iter()
        .zip(v)
        .fold(0.0, |m, (y, x)| m.max((y - lambda * x).abs()))
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    dim: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factors `a`. An exactly zero pivot is replaced by `eps * ||A||` so that
    /// inverse iteration at an exact eigenvalue still yields a direction.
    pub fn factor(a: &DenseMatrix) -> Self {
        let n = a.dim;
        let mut lu = a.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = f64::EPSILON * a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            if pmax == 0.0 {
                lu[k * n + k] = tiny;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    let (upper, lower) = lu.split_at_mut(i * n);
                    let row_k = &upper[k * n + k + 1..k * n + n];
                    axpy(-f, row_k, &mut lower[k + 1..n]);
                }
            }
        }
        Self { dim: n, lu, perm }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu[i * n..i * n + i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu[i * n + i + 1..(i + 1) * n], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = b.to_vec();
        // U^T z = b
        for i in 0..n {
            y[i] /= self.lu[i * n + i];
            let yi = y[i];
            for j in i + 1..n {
                y[j] -= self.lu[i * n + j] * yi;
            }
        }
        // L^T w = z
        for i in (0..n).rev() {
            let wi = y[i];
            for j in 0..i {
                y[j] -= self.lu[i * n + j] * wi;
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Leading eigenvalue with right and left eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingPair {
    pub lambda: f64,
    pub v_right: Vec<f64>,
    pub v_left: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration from the all-ones vector on `A` and `A^T`, polished by a
/// few inverse-iteration steps once the Rayleigh quotient has settled.
pub fn leading_pair(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<LeadingPair> {
    check_tol(tol, max_iter)?;
    let (lambda, v_right, it_r) = dominant(a, tol, max_iter, None)?;
    let (_, v_left, it_l) = dominant(a, tol, max_iter, Some(lambda))?;
    Ok(LeadingPair {
        lambda,
        v_right,
        v_left,
        iterations: it_r.max(it_l),
    })
}

fn check_tol(tol: f64, max_iter: usize) -> Result<()> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidParameter(format!(
            "solver needs tol > 0 and max_iter >= 1 (got {tol}, {max_iter})"
        )));
    }
    Ok(())
}

fn dominant(
    a: &DenseMatrix,
    tol: f64,
    max_iter: usize,
    known: Option<f64>,
) -> Result<(f64, Vec<f64>, usize)> {
    // A known eigenvalue means the left vector is wanted, by inverse iteration
    // at that value so both vectors are certified against the same lambda.
    let transpose = known.is_some();
    let n = a.dim;
    let apply = |x: &[f64], out: &mut [f64]| {
        if transpose {
            a.apply_transpose(x, out)
        } else {
            a.apply(x, out)
        }
    };
    let certified = |lambda: f64, x: &[f64]| residual(a, lambda, x, transpose) <= 10.0 * tol * norm_inf(x);

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut lambda = known.unwrap_or(f64::NAN);
    let mut iterations = 0;
    while known.is_none() && iterations < max_iter {
        iterations += 1;
        apply(&x, &mut y);
        let next = dot(&x, &y);
        let ny = norm2(&y);
        if ny == 0.0 {
            return Ok((0.0, x, iterations));
        }
        std::mem::swap(&mut x, &mut y);
        scale(&mut x, 1.0 / ny);
        let settled = (next - lambda).abs() < 1e-6 * next.abs().max(1.0);
        lambda = next;
        if certified(lambda, &x) {
            return Ok((lambda, x, iterations));
        }
        if settled {
            break;
        }
    }

    // inverse iteration just above the estimate
    let sigma = lambda + 1e-9 * lambda.abs().max(1.0);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted.add_to(i, i, -sigma);
    }
    let lu = Lu::factor(&shifted);
    for _ in 0..50 {
        iterations += 1;
        let mut z = if transpose { lu.solve_transpose(&x) } else { lu.solve(&x) };
        let nz = norm2(&z);
        if !nz.is_finite() || nz == 0.0 {
            break;
        }
        scale(&mut z, 1.0 / nz);
        // orient consistently with the previous iterate
        if dot(&z, &x) < 0.0 {
            scale(&mut z, -1.0);
        }
        x = z;
        if known.is_none() {
            apply(&x, &mut y);
            lambda = dot(&x, &y);
        }
        if certified(lambda, &x) {
            return Ok((lambda, x, iterations));
        }
    }
    Err(Error::NoConvergence {
        what: "leading eigenpair".into(),
        iterations,
    })
}

/// Leading and subleading spectral data of a transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda1: f64,
    /// Modulus of the subleading eigenvalue.
    pub chi1: f64,
    /// Subleading eigenvalue itself; for a complex pair, the member with positive imaginary part.
    pub chi1_re: f64,
    pub chi1_im: f64,
    pub is_complex_pair: bool,
    pub iterations: usize,
    pub residual: f64,
    pub used_fallback: bool,
}

/// The eigenvalue of `A` closest to the leading one, after removing the
/// leading pair by rank-one deflation.
pub fn subdominant_modulus(
    a: &DenseMatrix,
    leading: &LeadingPair,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralSummary> {
    check_tol(tol, max_iter)?;
    let n = a.dim;
    if n < 2 {
        return Err(Error::Dimension("a subleading eigenvalue needs dimension >= 2".into()));
    }
    let Deflated { b, v, u_scaled } = deflate(a, leading)?;
    let lambda1 = leading.lambda;
    let sigma = lambda1 + 1e-9 * lambda1.abs().max(1.0);

    let stall = if n <= QR_FALLBACK_MAX_DIM {
        STALL_ITERATIONS.min(max_iter)
    } else {
        max_iter
    };
    let target = Complex64::new(lambda1, 0.0);
    match block_shift_invert(&b, &v, &u_scaled, Shift::Real(sigma), target, tol, stall) {
        Ok(mut s) => {
            s.lambda1 = lambda1;
            Ok(s)
        }
        Err(Error::NoConvergence { iterations, .. }) if n <= QR_FALLBACK_MAX_DIM => {
            let theta = qr_subleading(a, lambda1)?;
            let nudge = 1e-9 * theta.norm().max(1.0);
            let shift = if theta.im == 0.0 {
                Shift::Real(theta.re + nudge)
            } else {
                Shift::Pair(Complex64::new(theta.re + nudge, theta.im))
            };
            let mut s = block_shift_invert(
                &b,
                &v,
                &u_scaled,
                shift,
                theta,
                tol,
                max_iter.saturating_sub(iterations).max(STALL_ITERATIONS),
            )
            .map_err(|_| Error::NoConvergence {
                what: "subleading eigenvalue (after QR fallback)".into(),
                iterations: max_iter,
            })?;
            s.lambda1 = lambda1;
            s.iterations += iterations;
            s.used_fallback = true;
            Ok(s)
        }
        Err(e) => Err(e),
    }
}

struct Deflated {
    b: DenseMatrix,
    v: Vec<f64>,
    /// `u / (u . v)`.
    u_scaled: Vec<f64>,
}

fn deflate(a: &DenseMatrix, leading: &LeadingPair) -> Result<Deflated> {
    let n = a.dim;
    if leading.v_right.len() != n || leading.v_left.len() != n {
        return Err(Error::Dimension("leading eigenvectors do not match the matrix".into()));
    }
    let uv = dot(&leading.v_left, &leading.v_right);
    if uv.abs() <= f64::EPSILON * norm2(&leading.v_left) * norm2(&leading.v_right) {
        return Err(Error::InvalidParameter(
            "left and right leading eigenvectors are orthogonal".into(),
        ));
    }
    let u_scaled: Vec<f64> = leading.v_left.iter().map(|u| u / uv).collect();
    let v = leading.v_right.clone();
    let mut b = a.clone();
    for i in 0..n {
        let f = leading.lambda * v[i];
        if f != 0.0 {
            let row = &mut b.entries[i * n..(i + 1) * n];
            axpy(-f, &u_scaled, row);
        }
    }
    Ok(Deflated { b, v, u_scaled })
}

/// Removes the leading right eigenvector component, `x - v (u.x)/(u.v)`.
fn project(x: &mut [f64], v: &[f64], u_scaled: &[f64]) {
    let c = dot(u_scaled, x);
    axpy(-c, v, x);
}

/// Deterministic, generic starting columns.
fn start_columns(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let x1: Vec<f64> = (0..n).map(|_| next()).collect();
    let x2: Vec<f64> = (0..n).map(|_| next()).collect();
    (x1, x2)
}

/// Orthonormalises two columns; returns `false` when the second collapses.
fn orthonormalise(q1: &mut [f64], q2: &mut [f64]) -> bool {
    let n1 = norm2(q1);
    if n1 == 0.0 || !n1.is_finite() {
        return false;
    }
    scale(q1, 1.0 / n1);
    for _ in 0..2 {
        let c = dot(q1, q2);
        axpy(-c, q1, q2);
    }
    let n2 = norm2(q2);
    if n2 <= 1e-13 || !n2.is_finite() {
        return false;
    }
    scale(q2, 1.0 / n2);
    true
}

/// Eigenvalues of a real 2x2 matrix `[[a, b], [c, d]]`.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (Complex64::new(half_tr + s, 0.0), Complex64::new(half_tr - s, 0.0))
    } else {
        let s = (-disc).sqrt();
        (Complex64::new(half_tr, s), Complex64::new(half_tr, -s))
    }
}

/// Operator inverted by [`block_shift_invert`].
#[derive(Debug, Clone, Copy)]
enum Shift {
    /// `B - sigma I`.
    Real(f64),
    /// `(B - theta)(B - conj(theta))`, real, singular on the whole pair.
    Pair(Complex64),
}

fn block_shift_invert(
    b: &DenseMatrix,
    v: &[f64],
    u_scaled: &[f64],
    shift: Shift,
    target: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralSummary> {
    let n = b.dim;
    let shifted = match shift {
        Shift::Real(sigma) => {
            let mut m = b.clone();
            for i in 0..n {
                m.add_to(i, i, -sigma);
            }
            m
        }
        Shift::Pair(theta) => {
            let (two_re, norm_sq) = (2.0 * theta.re, theta.norm_sqr());
            let mut m = DenseMatrix::zeros(n);
            for i in 0..n {
                for k in 0..n {
                    let bik = b.get(i, k);
                    if bik != 0.0 {
                        axpy(bik, b.row(k), &mut m.entries[i * n..(i + 1) * n]);
                    }
                }
                axpy(-two_re, b.row(i), &mut m.entries[i * n..(i + 1) * n]);
                m.add_to(i, i, norm_sq);
            }
            m
        }
    };
    let lu = Lu::factor(&shifted);

    let (mut q1, mut q2) = start_columns(n);
    project(&mut q1, v, u_scaled);
    project(&mut q2, v, u_scaled);
    if !orthonormalise(&mut q1, &mut q2) {
        return Err(Error::NoConvergence {
            what: "subleading eigenvalue (degenerate start)".into(),
            iterations: 0,
        });
    }
    let (mut bq1, mut bq2) = (vec![0.0; n], vec![0.0; n]);
    let mut reseed = 0u64;
    let mut last_residual = f64::INFINITY;

    for it in 1..=max_iter {
        let mut z1 = lu.solve(&q1);
        let mut z2 = lu.solve(&q2);
        project(&mut z1, v, u_scaled);
        project(&mut z2, v, u_scaled);
        if !orthonormalise(&mut z1, &mut z2) {
            // the block collapsed onto one direction: keep it, draw a fresh second column
            reseed += 1;
            let n1 = norm2(&z1);
            if n1 == 0.0 || !n1.is_finite() {
                z1 = q1.clone();
            }
            let (_, mut fresh) = start_columns(n + reseed as usize);
            fresh.truncate(n);
            project(&mut fresh, v, u_scaled);
            z2 = fresh;
            if !orthonormalise(&mut z1, &mut z2) {
                continue;
            }
        }
        q1 = z1;
        q2 = z2;

        b.apply(&q1, &mut bq1);
        b.apply(&q2, &mut bq2);
        let (h11, h12, h21, h22) = (dot(&q1, &bq1), dot(&q1, &bq2), dot(&q2, &bq1), dot(&q2, &bq2));
        let (e1, e2) = eig2(h11, h12, h21, h22);
        let theta = if (e1 - target).norm() <= (e2 - target).norm() { e1 } else { e2 };

        let (res, scale_ref) = if theta.im != 0.0 {
            // invariant-subspace residual ||B Q - Q H||
            let mut r = 0.0f64;
            for i in 0..n {
                let r1 = bq1[i] - q1[i] * h11 - q2[i] * h21;
                let r2 = bq2[i] - q1[i] * h12 - q2[i] * h22;
                r = r.max(r1.abs()).max(r2.abs());
            }
            (r, norm_inf(&q1).max(norm_inf(&q2)))
        } else {
            // Ritz vector y = Q z with (H - theta) z = 0
            let (z_a, z_b) = if (h12).abs() + (h11 - theta.re).abs() > (h21).abs() + (h22 - theta.re).abs() {
                (h12, theta.re - h11)
            } else {
                (theta.re - h22, h21)
            };
            let (z_a, z_b) = if z_a == 0.0 && z_b == 0.0 { (1.0, 0.0) } else { (z_a, z_b) };
            let y: Vec<f64> = q1.iter().zip(&q2).map(|(a, c)| z_a * a + z_b * c).collect();
            let by: Vec<f64> = bq1.iter().zip(&bq2).map(|(a, c)| z_a * a + z_b * c).collect();
            let r = by
                .iter()
                .zip(&y)
                .fold(0.0f64, |m, (p, q)| m.max((p - theta.re * q).abs()));
            (r, norm_inf(&y))
        };
        last_residual = res / scale_ref;
        if res <= 10.0 * tol * scale_ref {
            let theta = if theta.im < 0.0 { theta.conj() } else { theta };
            return Ok(SpectralSummary {
                lambda1: f64::NAN,
                chi1: theta.norm(),
                chi1_re: theta.re,
                chi1_im: theta.im,
                is_complex_pair: theta.im != 0.0,
                iterations: it,
                residual: last_residual,
                used_fallback: false,
            });
        }
    }
    Err(Error::NoConvergence {
        what: format!("subleading eigenvalue (relative residual {last_residual:.3e})"),
        iterations: max_iter,
    })
}

/// The eigenvalue of `a` closest to `lambda1` once one copy of `lambda1` is removed.
fn qr_subleading(a: &DenseMatrix, lambda1: f64) -> Result<Complex64> {
    let mut spectrum = eigenvalues(a)?;
    let lead = spectrum
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - lambda1).norm().total_cmp(&(y.1 - lambda1).norm()))
        .map(|(i, _)| i)
        .expect("nonempty spectrum");
    spectrum.swap_remove(lead);
    spectrum
        .into_iter()
        .min_by(|x, y| (x - lambda1).norm().total_cmp(&(y - lambda1).norm()))
        .ok_or_else(|| Error::Dimension("no subleading eigenvalue".into()))
}

/// All eigenvalues of a general real matrix (balancing, Hessenberg reduction,
/// shifted QR). Intended for `dim <= QR_FALLBACK_MAX_DIM`.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim;
    if n > QR_FALLBACK_MAX_DIM {
        return Err(Error::Resource {
            requested: n,
            cap: QR_FALLBACK_MAX_DIM,
        });
    }
    let mut m = a.entries.clone();
    balance(&mut m, n);
    hessenberg(&mut m, n);
    for i in 2..n {
        for j in 0..i - 1 {
            m[i * n + j] = 0.0;
        }
    }
    hqr(&mut m, n)
}

fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i * n + j] *= g;
                    }
                    for j in 0..n {
                        a[j * n + i] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilised elementary similarity transforms.
fn hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    for m in 1..n - 1 {
        let mut x = 0.0f64;
        let mut i = m;
        for j in m..n {
            if a[j * n + m - 1].abs() > x.abs() {
                x = a[j * n + m - 1];
                i = j;
            }
        }
        if i != m {
            for j in m - 1..n {
                a.swap(i * n + j, m * n + j);
            }
            for j in 0..n {
                a.swap(j * n + i, j * n + m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i * n + m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i * n + m - 1] = y;
                    for j in m..n {
                        a[i * n + j] -= y * a[m * n + j];
                    }
                    for j in 0..n {
                        a[j * n + m] += y * a[j * n + i];
                    }
                }
            }
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hqr(a: &mut [f64], n: usize) -> Result<Vec<Complex64>> {
    let idx = |i: isize, j: isize| (i as usize) * n + j as usize;
    let mut wr = vec![Complex64::new(0.0, 0.0); n];
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i * n + j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut x, mut y, mut z, mut w): (f64, f64, f64, f64);
    let mut total_its = 0usize;
    while nn >= 0 {
        let mut its = 0;
        let mut l: isize;
        loop {
            l = nn;
            while l > 0 {
                let mut s = a[idx(l - 1, l - 1)].abs() + a[idx(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[idx(l, l - 1)].abs() <= eps * s {
                    a[idx(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[idx(nn, nn)];
            if l == nn {
                wr[nn as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                y = a[idx(nn - 1, nn - 1)];
                w = a[idx(nn, nn - 1)] * a[idx(nn - 1, nn)];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        let mut lo = x + z;
                        let hi = x + z;
                        if z != 0.0 {
                            lo = x - w / z;
                        }
                        wr[nn as usize - 1] = Complex64::new(hi, 0.0);
                        wr[nn as usize] = Complex64::new(lo, 0.0);
                    } else {
                        wr[nn as usize] = Complex64::new(x + p, -z);
                        wr[nn as usize - 1] = Complex64::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(Error::NoConvergence {
                            what: "Hessenberg QR".into(),
                            iterations: total_its,
                        });
                    }
                    if its == 10 || its == 20 || its == 40 {
                        t += x;
                        for i in 0..=nn {
                            a[idx(i, i)] -= x;
                        }
                        let s = a[idx(nn, nn - 1)].abs() + a[idx(nn - 1, nn - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    total_its += 1;
                    let mut m = nn - 2;
                    while m >= l {
                        z = a[idx(m, m)];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                        q = a[idx(m + 1, m + 1)] - z - r - s;
                        r = a[idx(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        a[idx(i + 2, i)] = 0.0;
                        if i != m {
                            a[idx(i + 2, i - 1)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[idx(k, k - 1)];
                            q = a[idx(k + 1, k - 1)];
                            r = 0.0;
                            if k + 1 != nn {
                                r = a[idx(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                                }
                            } else {
                                a[idx(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a[idx(k, j)] + q * a[idx(k + 1, j)];
                                if k + 1 != nn {
                                    pp += r * a[idx(k + 2, j)];
                                    a[idx(k + 2, j)] -= pp * z;
                                }
                                a[idx(k + 1, j)] -= pp * y;
                                a[idx(k, j)] -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                                if k + 1 != nn {
                                    pp += z * a[idx(i, k + 2)];
                                    a[idx(i, k + 2)] -= pp * r;
                                }
                                a[idx(i, k + 1)] -= pp * q;
                                a[idx(i, k)] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wr)
}
