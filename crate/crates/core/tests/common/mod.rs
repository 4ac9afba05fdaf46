//! Reference computations that share no code with the library.

#![allow(dead_code)]

/// Velocity of the reduced map: +1 on `[(1-h)/2, 1/2)`, -1 on `[1/2, (1+h)/2)`.
pub fn velocity(x: f64, h: f64) -> f64 {
    if x >= (1.0 - h) / 2.0 && x < 0.5 {
        1.0
    } else if x >= 0.5 && x < (1.0 + h) / 2.0 {
        -1.0
    } else {
        0.0
    }
}

/// Piecewise-constant signed density on `[0, 1)`.
#[derive(Debug, Clone)]
pub struct Density {
    /// `(lo, hi, value)`, sorted and contiguous.
    pub pieces: Vec<(f64, f64, f64)>,
}

impl Density {
    pub fn velocity_profile(h: f64) -> Self {
        let mut pieces = Vec::new();
        let (a, b) = ((1.0 - h) / 2.0, (1.0 + h) / 2.0);
        if h > 0.0 {
            pieces.push((a, 0.5, 1.0));
            pieces.push((0.5, b, -1.0));
        }
        Self { pieces }
    }

    /// `∫ v(x) rho(x) dx`.
    pub fn against_velocity(&self, h: f64) -> f64 {
        let (a, b) = ((1.0 - h) / 2.0, (1.0 + h) / 2.0);
        let overlap = |lo: f64, hi: f64, x: f64, y: f64| (hi.min(y) - lo.max(x)).max(0.0);
        self.pieces
            .iter()
            .map(|&(lo, hi, v)| v * (overlap(lo, hi, a, 0.5) - overlap(lo, hi, 0.5, b)))
            .sum()
    }

    /// Perron-Frobenius transport under the reduced map.
    pub fn push_forward(&self, h: f64) -> Self {
        let mut events: Vec<(f64, f64)> = Vec::new();
        let mut deposit = |lo: f64, hi: f64, v: f64| {
            // Image of length at most 1, wrapped into [0, 1).
            let shift = lo.floor();
            let (lo, hi) = (lo - shift, hi - shift);
            if hi <= 1.0 {
                events.push((lo, v));
                events.push((hi, -v));
            } else {
                events.push((lo, v));
                events.push((1.0, -v));
                events.push((0.0, v));
                events.push((hi - 1.0, -v));
            }
        };
        for &(lo, hi, v) in &self.pieces {
            let half = v / 2.0;
            if lo < 0.5 {
                let top = hi.min(0.5);
                deposit(2.0 * lo + h, 2.0 * top + h, half);
            }
            if hi > 0.5 {
                let bottom = lo.max(0.5);
                deposit(2.0 * bottom - 1.0 - h, 2.0 * hi - 1.0 - h, half);
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pieces = Vec::new();
        let mut level = 0.0;
        let mut i = 0;
        while i < events.len() {
            let x = events[i].0;
            while i < events.len() && events[i].0 == x {
                level += events[i].1;
                i += 1;
            }
            if i < events.len() {
                let next = events[i].0;
                if next > x && level != 0.0 {
                    pieces.push((x, next, level));
                }
            }
        }
        Self { pieces }
    }
}

/// `<v_0 v_k>` for `k = 0..=n` by transporting `v_0` as a density.
pub fn transfer_autocorrelations(h: f64, n: usize) -> Vec<f64> {
    let mut rho = Density::velocity_profile(h);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push(rho.against_velocity(h));
        if k < n {
            rho = rho.push_forward(h);
        }
    }
    out
}

/// Truncated Taylor-Green-Kubo sum `sum_{k=0}^n <v_0 v_k> - <v_0^2>/2`.
pub fn tgk_sum(h: f64, n: usize) -> f64 {
    let c = transfer_autocorrelations(h, n);
    c.iter().sum::<f64>() - c[0] / 2.0
}

/// Reduced map iterated in floating point.
pub fn reduced_step(x: f64, h: f64) -> f64 {
    let y = if x < 0.5 { 2.0 * x + h } else { 2.0 * x - 1.0 - h };
    y - y.floor()
}

/// Cumulative jump kernel with the `-T(h)/2` terms removed.
pub fn t_kernel(x: f64, h: f64) -> f64 {
    if x >= (1.0 - h) / 2.0 && x < 0.5 {
        x + (h - 1.0) / 2.0
    } else if x >= 0.5 && x < (1.0 + h) / 2.0 {
        -x + (h + 1.0) / 2.0
    } else {
        0.0
    }
}

/// `T^n(h)` from the unreduced recursion
/// `T^n(h) = sum_{k=0}^n 2^-k t(M^k h) - sum_{k=1}^n 2^-k T^{n-k}(h)`.
pub fn unreduced_t_at_h(h: f64, n: usize) -> f64 {
    let mut orbit = vec![h - h.floor()];
    for k in 0..n {
        orbit.push(reduced_step(orbit[k], h));
    }
    let t: Vec<f64> = orbit.iter().map(|&x| t_kernel(x, h)).collect();
    let mut big_t: Vec<f64> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let head: f64 = (0..=m).map(|k| t[k] / 2f64.powi(k as i32)).sum();
        let tail: f64 = (1..=m).map(|k| big_t[m - k] / 2f64.powi(k as i32)).sum();
        big_t.push(head - tail);
    }
    big_t[n]
}

/// Midpoint Riemann sum of `v_0(x) v_n(x)` with `points` samples.
pub fn riemann_autocorrelation(h: f64, n: usize, points: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..points {
        let x0 = (j as f64 + 0.5) / points as f64;
        let v0 = velocity(x0, h);
        if v0 == 0.0 {
            continue;
        }
        let mut x = x0;
        for _ in 0..n {
            x = reduced_step(x, h);
        }
        acc += v0 * velocity(x, h);
    }
    acc / points as f64
}

/// `h_i = i / (n - 1)` on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
