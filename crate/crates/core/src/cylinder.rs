//! Exact cylinder sets of the reduced map under the uniform invariant density.
//!
//! The partition of `[0, 1)` on which the first `m` velocity symbols are
//! constant is refined forward: each piece carries its image under the `k`-th
//! iterate (an affine map of slope `2^k`), the image is cut at the three branch
//! points, and each sub-piece is pushed through its affine branch. Piece
//! boundaries are stored in original coordinates so that neighbouring pieces
//! share endpoints exactly and measures telescope.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::map::{MapParams, Velocity};

/// Deepest symbol sequence the enumerators will refine to.
pub const MAX_CYLINDER_DEPTH: usize = 25;

/// Set of seeds sharing a prescribed velocity itinerary.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderSet {
    pub symbols: Vec<Velocity>,
    /// Disjoint, sorted half-open intervals `[a, b)`.
    pub intervals: Vec<(f64, f64)>,
    pub measure: f64,
}

impl CylinderSet {
    fn from_pieces(symbols: Vec<Velocity>, mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (a, b) in pieces {
            match intervals.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => intervals.push((a, b)),
            }
        }
        let measure = intervals.iter().map(|(a, b)| b - a).sum();
        Self {
            symbols,
            intervals,
            measure,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// A piece of the refinement: `[x_lo, x_hi)` in seed coordinates, mapped
/// affinely onto `[img_lo, img_hi)` by the current iterate.
#[derive(Debug, Clone, Copy)]
struct Piece {
    x_lo: f64,
    x_hi: f64,
    img_lo: f64,
    img_hi: f64,
}

/// The four monotone branches of the reduced map, with the symbol each emits.
#[derive(Debug, Clone, Copy)]
struct Window {
    lo: f64,
    hi: f64,
    symbol: Velocity,
    /// Image of `y` is `2y + offset`.
    offset: f64,
}

fn windows(p: &MapParams) -> [Window; 4] {
    let h = p.h();
    let [a, m, b] = p.branch_points();
    [
        Window { lo: 0.0, hi: a, symbol: Velocity::Stay, offset: h },
        Window { lo: a, hi: m, symbol: Velocity::Up, offset: h - 1.0 },
        Window { lo: m, hi: b, symbol: Velocity::Down, offset: -h },
        Window { lo: b, hi: 1.0, symbol: Velocity::Stay, offset: -1.0 - h },
    ]
}

impl Piece {
    fn unit() -> Self {
        Piece { x_lo: 0.0, x_hi: 1.0, img_lo: 0.0, img_hi: 1.0 }
    }

    /// Cuts the image at the window edges; returns sub-pieces with their window.
    fn split<'w>(self, wins: &'w [Window; 4]) -> impl Iterator<Item = (Piece, &'w Window)> + 'w {
        let span = self.img_hi - self.img_lo;
        let width = self.x_hi - self.x_lo;
        let to_x = move |y: f64| -> f64 {
            if y <= self.img_lo {
                self.x_lo
            } else if y >= self.img_hi {
                self.x_hi
            } else {
                (self.x_lo + (y - self.img_lo) / span * width).clamp(self.x_lo, self.x_hi)
            }
        };
        wins.iter().filter_map(move |w| {
            let lo = self.img_lo.max(w.lo);
            let hi = self.img_hi.min(w.hi);
            if hi <= lo {
                return None;
            }
            let (x_lo, x_hi) = (to_x(lo), to_x(hi));
            if x_hi <= x_lo {
                return None;
            }
            Some((Piece { x_lo, x_hi, img_lo: lo, img_hi: hi }, w))
        })
    }

    /// Pushes a piece lying inside window `w` through that branch.
    fn advance(&self, w: &Window) -> Piece {
        Piece {
            img_lo: (2.0 * self.img_lo + w.offset).clamp(0.0, 1.0),
            img_hi: (2.0 * self.img_hi + w.offset).clamp(0.0, 1.0),
            ..*self
        }
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_CYLINDER_DEPTH {
        return Err(Error::Resource { requested: depth, cap: MAX_CYLINDER_DEPTH });
    }
    Ok(())
}

/// The exact cylinder of `symbols`.
pub fn cylinder_intervals(symbols: &[Velocity], p: &MapParams) -> Result<CylinderSet> {
    if symbols.is_empty() {
        return Err(Error::InvalidParameter("empty symbol sequence".into()));
    }
    check_depth(symbols.len())?;
    let wins = windows(p);
    let mut pieces = Vec::new();
    let mut stack = vec![(Piece::unit(), 0usize)];
    while let Some((piece, depth)) = stack.pop() {
        for (sub, w) in piece.split(&wins) {
            if w.symbol != symbols[depth] {
                continue;
            }
            if depth + 1 == symbols.len() {
                pieces.push((sub.x_lo, sub.x_hi));
            } else {
                stack.push((sub.advance(w), depth + 1));
            }
        }
    }
    Ok(CylinderSet::from_pieces(symbols.to_vec(), pieces))
}

/// Every nonempty cylinder of length `len`, sorted by symbol sequence.
pub fn enumerate_cylinders(len: usize, p: &MapParams) -> Result<Vec<CylinderSet>> {
    if len == 0 {
        return Err(Error::InvalidParameter("cylinder length must be positive".into()));
    }
    check_depth(len)?;
    let wins = windows(p);
    let mut groups: BTreeMap<Vec<Velocity>, Vec<(f64, f64)>> = BTreeMap::new();
    let mut path = Vec::with_capacity(len);
    enumerate_rec(Piece::unit(), len, &wins, &mut path, &mut groups);
    Ok(groups
        .into_iter()
        .map(|(symbols, pieces)| CylinderSet::from_pieces(symbols, pieces))
        .collect())
}

fn enumerate_rec(
    piece: Piece,
    remaining: usize,
    wins: &[Window; 4],
    path: &mut Vec<Velocity>,
    out: &mut BTreeMap<Vec<Velocity>, Vec<(f64, f64)>>,
) {
    for (sub, w) in piece.split(wins) {
        path.push(w.symbol);
        if remaining == 1 {
            out.entry(path.clone()).or_default().push((sub.x_lo, sub.x_hi));
        } else {
            enumerate_rec(sub.advance(w), remaining - 1, wins, path, out);
        }
        path.pop();
    }
}

/// Largest lag accepted by [`exact_autocorrelation`].
pub const MAX_AUTOCORRELATION_LAG: usize = 24;

/// `<v_0 v_n>` under the uniform density, summed exactly over cylinders.
pub fn exact_autocorrelation(p: &MapParams, n: usize) -> Result<f64> {
    if n > MAX_AUTOCORRELATION_LAG {
        return Err(Error::Resource { requested: n, cap: MAX_AUTOCORRELATION_LAG });
    }
    let wins = windows(p);
    let mut total = 0.0;
    for (first, w) in Piece::unit().split(&wins) {
        let v0 = w.symbol.as_f64();
        if v0 == 0.0 {
            continue;
        }
        if n == 0 {
            total += first.x_hi - first.x_lo;
            continue;
        }
        total += v0 * lag_sum(first.advance(w), n - 1, &wins);
    }
    Ok(total)
}

/// `sum v_k * measure` over the pieces reached after `remaining` more steps.
fn lag_sum(piece: Piece, remaining: usize, wins: &[Window; 4]) -> f64 {
    let mut acc = 0.0;
    for (sub, w) in piece.split(wins) {
        if remaining == 0 {
            acc += w.symbol.as_f64() * (sub.x_hi - sub.x_lo);
        } else {
            acc += lag_sum(sub.advance(w), remaining - 1, wins);
        }
    }
    acc
}

/// Measure of a cylinder computed with the mirror image `x -> 1 - x` of the
/// dynamics, i.e. the measure of the sign-flipped itinerary.
pub fn mirrored_measure(symbols: &[Velocity], p: &MapParams) -> Result<f64> {
    let flipped: Vec<Velocity> = symbols.iter().map(|v| v.flip()).collect();
    Ok(cylinder_intervals(&flipped, p)?.measure)
}
