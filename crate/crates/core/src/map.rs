//! The lifted Bernoulli-shift map, its reduction modulo one, and the
//! integer-displacement observables built on top of it.
//!
//! On the unit interval the map is `2x + h` for `x < 1/2` and `2x - 1 - h`
//! otherwise; it is extended to the real line by `M(x + z) = M(x) + z`.
//! The lift parameter is restricted to `0 <= h <= 1`.
//!
//! All intervals are half-open `[a, b)`; a point sitting exactly on a branch
//! point belongs to the branch on its right.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lift parameter `h` of the map, optionally carried as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    h: f64,
    exact: Option<RationalLift>,
}

/// `h = num / den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalLift {
    num: u64,
    den: u64,
}

/// Largest denominator accepted for exact arithmetic; keeps `2k + den` inside `u64`.
pub const MAX_EXACT_DENOMINATOR: u64 = 1 << 40;

impl MapParams {
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() || !(0.0..=1.0).contains(&h) {
            return Err(Error::InvalidParameter(format!(
                "lift parameter h = {h} must lie in [0, 1]"
            )));
        }
        Ok(Self { h, exact: None })
    }

    /// Exact parameter `h = num / den`. Orbit bookkeeping then runs in integer arithmetic.
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        let lift = RationalLift::new(num, den)?;
        Ok(Self {
            h: lift.to_f64(),
            exact: Some(lift),
        })
    }

    /// Recognises `h` as a small-denominator rational when the double nearest
    /// to `p/q` (with `q <= max_den`) is exactly `h`; otherwise stays in floating point.
    pub fn detect_rational(h: f64, max_den: u64) -> Result<Self> {
        let params = Self::new(h)?;
        for den in 1..=max_den.min(MAX_EXACT_DENOMINATOR) {
            let num = (h * den as f64).round();
            if num / den as f64 == h {
                return Self::rational(num as u64, den);
            }
        }
        Ok(params)
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn exact(&self) -> Option<RationalLift> {
        self.exact
    }

    /// Left edge of the `+1` jump window, `(1 - h)/2`.
    #[inline]
    pub fn up_edge(&self) -> f64 {
        0.5 * (1.0 - self.h)
    }

    /// Right edge of the `-1` jump window, `(1 + h)/2`.
    #[inline]
    pub fn down_edge(&self) -> f64 {
        0.5 * (1.0 + self.h)
    }

    /// Branch points `(1-h)/2, 1/2, (1+h)/2`.
    pub fn branch_points(&self) -> [f64; 3] {
        [self.up_edge(), 0.5, self.down_edge()]
    }
}

impl RationalLift {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "rational lift {num}/{den} must satisfy 0 <= num <= den, den > 0"
            )));
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        if den > MAX_EXACT_DENOMINATOR {
            return Err(Error::InvalidParameter(format!(
                "denominator {den} exceeds {MAX_EXACT_DENOMINATOR}"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// One step of the reduced map on numerators: `k/den -> M(k/den) mod 1`.
    #[inline]
    pub fn step(&self, k: u64) -> u64 {
        debug_assert!(k < self.den);
        if 2 * k < self.den {
            (2 * k + self.num) % self.den
        } else {
            (2 * k + self.den - self.num) % self.den
        }
    }

    /// Numerator of `h mod 1`.
    pub fn seed(&self) -> u64 {
        self.num % self.den
    }

    /// Exact value of the jump kernel `t(k/den)`, as a double.
    pub fn t_value(&self, k: u64) -> f64 {
        let (k2, den, num) = (2 * k, self.den, self.num);
        let scale = 2.0 * den as f64;
        if k2 + num >= den && k2 < den {
            (k2 + num - den) as f64 / scale
        } else if k2 >= den && k2 < den + num {
            (den + num - k2) as f64 / scale
        } else {
            0.0
        }
    }

    /// Orbit of `k0/den` with exact recurrence detection.
    pub fn orbit(&self, k0: u64, n_max: usize) -> ExactOrbit {
        let mut seen: HashMap<u64, usize> = HashMap::new();
        let mut points = vec![k0 % self.den];
        seen.insert(points[0], 0);
        for _ in 0..n_max {
            let next = self.step(*points.last().expect("nonempty"));
            if let Some(&first) = seen.get(&next) {
                let period = points.len() - first;
                points.push(next);
                return ExactOrbit {
                    lift: *self,
                    points,
                    preperiod: Some(first),
                    period: Some(period),
                };
            }
            seen.insert(next, points.len());
            points.push(next);
        }
        ExactOrbit {
            lift: *self,
            points,
            preperiod: None,
            period: None,
        }
    }
}

/// Orbit of a rational point, stored as numerators over the lift's denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOrbit {
    pub lift: RationalLift,
    pub points: Vec<u64>,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
}

impl ExactOrbit {
    pub fn to_record(&self) -> OrbitRecord {
        let den = self.lift.den as f64;
        OrbitRecord {
            seed: self.points[0] as f64 / den,
            points: self.points.iter().map(|&k| k as f64 / den).collect(),
            preperiod: self.preperiod,
            period: self.period,
            tolerance: 0.0,
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Integer displacement of one step: `floor(x_{k+1}) - floor(x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Velocity {
    Down,
    Stay,
    Up,
}

impl Velocity {
    /// Ordering used by the pair-state chains: `0, +1, -1`.
    pub const ALL: [Velocity; 3] = [Velocity::Stay, Velocity::Up, Velocity::Down];

    #[inline]
    pub fn value(self) -> i32 {
        match self {
            Velocity::Down => -1,
            Velocity::Stay => 0,
            Velocity::Up => 1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            -1 => Some(Velocity::Down),
            0 => Some(Velocity::Stay),
            1 => Some(Velocity::Up),
            _ => None,
        }
    }

    /// Position in [`Velocity::ALL`].
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Velocity::Stay => 0,
            Velocity::Up => 1,
            Velocity::Down => 2,
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Velocity::Down => Velocity::Up,
            Velocity::Stay => Velocity::Stay,
            Velocity::Up => Velocity::Down,
        }
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} is outside [0, 1)")))
    }
}

/// `M_h(x)` on the real line.
pub fn step_lifted(x: f64, p: &MapParams) -> f64 {
    let cell = x.floor();
    let f = x - cell;
    if f < 0.5 {
        2.0 * f + p.h + cell
    } else {
        2.0 * f - 1.0 - p.h + cell
    }
}

#[inline]
pub(crate) fn step_mod1_unchecked(x: f64, p: &MapParams) -> f64 {
    let y = if x < 0.5 {
        2.0 * x + p.h
    } else {
        2.0 * x - 1.0 - p.h
    };
    let r = y - y.floor();
    // a tiny negative y rounds up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// The reduced map `M_h(x) mod 1` on `[0, 1)`.
pub fn step_mod1(x: f64, p: &MapParams) -> Result<f64> {
    check_unit(x)?;
    Ok(step_mod1_unchecked(x, p))
}

#[inline]
pub(crate) fn velocity_unchecked(x: f64, p: &MapParams) -> Velocity {
    if x < 0.5 {
        if x >= p.up_edge() {
            Velocity::Up
        } else {
            Velocity::Stay
        }
    } else if x < p.down_edge() {
        Velocity::Down
    } else {
        Velocity::Stay
    }
}

/// Velocity symbol `v_0(x)`: `+1` on `[(1-h)/2, 1/2)`, `-1` on `[1/2, (1+h)/2)`, else `0`.
pub fn velocity(x: f64, p: &MapParams) -> Result<Velocity> {
    check_unit(x)?;
    Ok(velocity_unchecked(x, p))
}

/// Total displacement `J^n(x) = v_0(x) + ... + v_n(x)` along the reduced orbit.
pub fn jump(x: f64, p: &MapParams, n: usize) -> Result<i64> {
    check_unit(x)?;
    let mut x = x;
    let mut total = 0i64;
    for k in 0..=n {
        total += velocity_unchecked(x, p).value() as i64;
        if k < n {
            x = step_mod1_unchecked(x, p);
        }
    }
    Ok(total)
}

/// Reduced orbit of a seed with recurrence detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub seed: f64,
    pub points: Vec<f64>,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    pub tolerance: f64,
}

impl OrbitRecord {
    pub fn is_preperiodic(&self) -> bool {
        self.period.is_some()
    }

    /// Points of the detected cycle, if any.
    pub fn cycle(&self) -> Option<&[f64]> {
        let (p, q) = (self.preperiod?, self.period?);
        Some(&self.points[p..p + q])
    }

    /// `k`-th orbit point, continuing periodically past the stored prefix when a
    /// cycle was detected.
    pub fn point(&self, k: usize) -> Option<f64> {
        if let (Some(p), Some(q)) = (self.preperiod, self.period) {
            if k < p + q {
                return Some(self.points[k]);
            }
            return Some(self.points[p + (k - p) % q]);
        }
        self.points.get(k).copied()
    }
}

/// Distance on the circle `R / Z`.
#[inline]
pub(crate) fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Iterates the reduced map from `x0` for at most `n_max` steps, stopping at the
/// first point that returns within `tol` of an earlier one.
pub fn orbit_mod1(x0: f64, p: &MapParams, n_max: usize, tol: f64) -> Result<OrbitRecord> {
    check_unit(x0)?;
    if n_max == 0 || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "orbit needs n_max >= 1 and tol > 0 (got {n_max}, {tol})"
        )));
    }
    let mut points = vec![x0];
    for _ in 0..n_max {
        let next = step_mod1_unchecked(*points.last().expect("nonempty"), p);
        if let Some(first) = points.iter().position(|&y| circle_distance(y, next) <= tol) {
            let period = points.len() - first;
            points.push(next);
            return Ok(OrbitRecord {
                seed: x0,
                points,
                preperiod: Some(first),
                period: Some(period),
                tolerance: tol,
            });
        }
        points.push(next);
    }
    Ok(OrbitRecord {
        seed: x0,
        points,
        preperiod: None,
        period: None,
        tolerance: tol,
    })
}

/// Orbit of the point `x = h` (taken mod 1), the object controlling the
/// correlation structure. Uses exact arithmetic when `p` carries a rational.
pub fn orbit_of_lift(p: &MapParams, n_max: usize, tol: f64) -> Result<OrbitRecord> {
    match p.exact() {
        Some(lift) => Ok(lift.orbit(lift.seed(), n_max).to_record()),
        None => {
            let seed = if p.h() >= 1.0 { 0.0 } else { p.h() };
            orbit_mod1(seed, p, n_max, tol)
        }
    }
}
