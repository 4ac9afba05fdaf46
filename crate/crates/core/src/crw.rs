//! Truncated Taylor-Green-Kubo series ("correlated random walk").
//!
//! The order-`n` truncation is `D_n(h) = h/2 + T^{n-1}(h)`, where `T^n` is the
//! cumulative integral of the jump function. Evaluated at `x = h` it reduces to
//! a weighted sum of the kernel `t` along the reduced orbit of `h`:
//!
//! ```text
//! T^n(h) = 2^{-n} t(x_n) + sum_{k<n} 2^{-(k+1)} t(x_k),    x_k = M^k(h) mod 1
//! ```
//!
//! Since `0 <= t <= h/2`, the distance to the limit obeys
//! `|T^n(h) - T^inf(h)| <= h 2^{-n}`, which drives both the reported error
//! bounds and the stopping rule of [`exact_diffusion`].

use crate::error::{Error, Result};
use crate::estimate::{DiffusionEstimate, Method};
use crate::map::{self, MapParams, OrbitRecord};

/// Tolerance for orbit recurrence and for "t vanishes on the cycle" in floating mode.
pub const DEFAULT_CERTIFY_TOL: f64 = 1e-12;
/// Orbit length scanned when certifying finite-time convergence.
pub const DEFAULT_ORBIT_STEPS: usize = 256;

#[inline]
pub(crate) fn t_unchecked(x: f64, p: &MapParams) -> f64 {
    let h = p.h();
    if x < p.up_edge() || x >= p.down_edge() {
        0.0
    } else if x < 0.5 {
        x + 0.5 * (h - 1.0)
    } else {
        -x + 0.5 * (h + 1.0)
    }
}

/// Kernel `t_h(x)`: zero outside the jump windows, a tent of height `h/2` over them.
pub fn t_function(x: f64, p: &MapParams) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is outside [0, 1)")));
    }
    Ok(t_unchecked(x, p))
}

/// Orbit of `h` together with the kernel values and partial sums `T^n(h)`.
#[derive(Debug, Clone)]
pub struct TgkSeriesState {
    pub h: f64,
    pub orbit: OrbitRecord,
    /// `t(M^k(h))` for `k = 0..=n`.
    pub t_values: Vec<f64>,
    /// `T^n(h)` for `n = 0..=n`.
    pub partial_sums: Vec<f64>,
}

impl TgkSeriesState {
    /// Builds the series through order `n`. A detected cycle is continued
    /// periodically instead of iterating further in floating point.
    pub fn new(p: &MapParams, n: usize) -> Result<Self> {
        let steps = n.max(1);
        let (orbit, t_values) = match p.exact() {
            Some(lift) => {
                let exact = lift.orbit(lift.seed(), steps);
                let record = exact.to_record();
                let t: Vec<f64> = (0..=n)
                    .map(|k| {
                        let idx = periodic_index(&record, k);
                        lift.t_value(exact.points[idx])
                    })
                    .collect();
                (record, t)
            }
            None => {
                let record = map::orbit_of_lift(p, steps, DEFAULT_CERTIFY_TOL)?;
                let t: Vec<f64> = (0..=n)
                    .map(|k| t_unchecked(record.points[periodic_index(&record, k)], p))
                    .collect();
                (record, t)
            }
        };

        let mut partial_sums = Vec::with_capacity(n + 1);
        let mut prefix = 0.0;
        let mut weight = 1.0;
        for &t in &t_values {
            partial_sums.push(prefix + weight * t);
            weight *= 0.5;
            prefix += weight * t;
        }
        Ok(Self {
            h: p.h(),
            orbit,
            t_values,
            partial_sums,
        })
    }

    /// `T^n(h)`; `T^{-1}` is zero.
    pub fn cumulative(&self, n: isize) -> f64 {
        if n < 0 {
            0.0
        } else {
            self.partial_sums[n as usize]
        }
    }
}

fn periodic_index(orbit: &OrbitRecord, k: usize) -> usize {
    match (orbit.preperiod, orbit.period) {
        (Some(p), Some(q)) if k >= p + q => p + (k - p) % q,
        _ => k,
    }
}

/// `T^n_h(h)`.
pub fn cumulative_jump_at_h(p: &MapParams, n: usize) -> Result<f64> {
    Ok(TgkSeriesState::new(p, n)?.partial_sums[n])
}

/// Order at which the truncated series becomes exact: transient length of the
/// orbit of `h` plus one, provided `t` vanishes on the whole cycle.
pub fn finite_convergence_order(p: &MapParams, n_max: usize, tol: f64) -> Option<usize> {
    match p.exact() {
        Some(lift) => {
            let orbit = lift.orbit(lift.seed(), n_max);
            let (pre, q) = (orbit.preperiod?, orbit.period?);
            orbit.points[pre..pre + q]
                .iter()
                .all(|&k| lift.t_value(k) == 0.0)
                .then_some(pre + 1)
        }
        None => {
            let orbit = map::orbit_of_lift(p, n_max, tol).ok()?;
            let cycle = orbit.cycle()?;
            cycle
                .iter()
                .all(|&x| t_unchecked(x, p).abs() <= tol)
                .then_some(orbit.preperiod? + 1)
        }
    }
}

fn crw_bound(h: f64, n: usize) -> f64 {
    if n == 0 {
        1.5 * h
    } else {
        h * 0.5f64.powi(n as i32 - 1)
    }
}

/// `D_n(h) = h/2 + T^{n-1}(h)` with its certified truncation bound.
pub fn crw_diffusion(p: &MapParams, n: usize) -> Result<DiffusionEstimate> {
    let h = p.h();
    let value = if n == 0 {
        0.5 * h
    } else {
        0.5 * h + TgkSeriesState::new(p, n - 1)?.partial_sums[n - 1]
    };
    let exact = finite_convergence_order(p, DEFAULT_ORBIT_STEPS, DEFAULT_CERTIFY_TOL)
        .is_some_and(|m| m <= n);
    Ok(DiffusionEstimate::new(Method::Crw, n, h, value)
        .with_bound(crw_bound(h, n))
        .certified(exact))
}

/// Number of series terms needed for the tail bound `h 2^{-n}` to drop below `tol`.
fn terms_for(h: f64, tol: f64) -> usize {
    let mut n = 0;
    let mut tail = h;
    while tail >= tol && n < 1100 {
        tail *= 0.5;
        n += 1;
    }
    n
}

/// The limit `D(h)` of the truncated series, summed until the certified tail
/// bound falls below `tol`.
pub fn exact_diffusion(p: &MapParams, tol: f64) -> Result<DiffusionEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let h = p.h();
    let n = terms_for(h, tol);
    let state = TgkSeriesState::new(p, n)?;
    let tail = h * 0.5f64.powi(n as i32);
    let certified = finite_convergence_order(p, DEFAULT_ORBIT_STEPS, DEFAULT_CERTIFY_TOL).is_some();
    Ok(DiffusionEstimate::new(Method::Exact, 0, h, 0.5 * h + state.partial_sums[n])
        .with_bound(tail)
        .certified(certified))
}

/// `T^n_h(x)` for arbitrary `x` in `[0, 1]`, by the four-branch functional recursion.
/// `n = -1` gives the zero function.
pub fn cumulative_jump_profile(x: f64, p: &MapParams, n: isize) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is outside [0, 1]")));
    }
    if n < 0 || x == 1.0 {
        return Ok(0.0);
    }
    let offsets = if n >= 1 {
        TgkSeriesState::new(p, n as usize - 1)?.partial_sums
    } else {
        Vec::new()
    };
    // T^m(y) = t(y) + T^{m-1}(M y)/2 - T^{m-1}(h)/2, unrolled from m = n down to 0
    let mut value = 0.0;
    let mut weight = 1.0;
    let mut y = x;
    for m in (0..=n).rev() {
        value += weight * t_unchecked(y, p);
        if m >= 1 {
            value -= 0.5 * weight * offsets[m as usize - 1];
            y = map::step_mod1_unchecked(y, p);
        }
        weight *= 0.5;
    }
    Ok(value)
}
