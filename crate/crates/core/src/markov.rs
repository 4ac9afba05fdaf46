//! Diffusion from the decay rate of approximate Markov transition matrices.
//!
//! The unit interval is cut at iterates of the critical point `1/2` and their
//! mirror images, the cut is copied into every unit cell of a ring of `L`
//! cells, and the map is coarse-grained into a matrix whose entry `a_ij` is the
//! fraction of cell `j` covered by the image of cell `i`. The subleading
//! eigenvalue `chi_1` gives the decay rate `ln(2/chi_1)`, and
//! `D = lim L^2 gamma / (4 pi^2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{DiffusionEstimate, Method};
use crate::linalg::{self, DenseMatrix, SpectralSummary};
use crate::map::{self, MapParams};

pub const DEFAULT_PARTITION_TOL: f64 = 1e-12;
pub const DEFAULT_L_LIST: [usize; 4] = [8, 16, 32, 64];

/// Where a partition point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointOrigin {
    /// The discontinuity `x = 1/2`.
    Critical,
    /// `M^k(1/2) mod 1`.
    Iterate(usize),
    /// `1 - M^k(1/2)`.
    Mirror(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub order: usize,
    /// Sorted interior breakpoints in `(0, 1)`.
    pub points: Vec<f64>,
    pub origins: Vec<PointOrigin>,
}

impl PartitionSpec {
    /// Cell boundaries `0 = b_0 < ... < b_K = 1` of the unit interval.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.points.len() + 2);
        b.push(0.0);
        b.extend_from_slice(&self.points);
        b.push(1.0);
        b
    }

    pub fn cells_per_unit(&self) -> usize {
        self.points.len() + 1
    }
}

/// Breakpoints `1/2` and, for `k = 1..order-1`, the iterate `M^k(1/2)` (taken
/// from the right branch) together with its mirror `1 - M^k(1/2)`.
pub fn critical_partition(p: &MapParams, order: usize, tol: f64) -> PartitionSpec {
    let mut candidates: Vec<(f64, PointOrigin)> = Vec::new();
    if order >= 1 {
        candidates.push((0.5, PointOrigin::Critical));
        let mut x = 0.5;
        for k in 1..order {
            x = map::step_mod1_unchecked(x, p);
            candidates.push((x, PointOrigin::Iterate(k)));
            candidates.push((1.0 - x, PointOrigin::Mirror(k)));
        }
    }
    let mut kept: Vec<(f64, PointOrigin)> = Vec::new();
    for (x, origin) in candidates {
        if x <= tol || x >= 1.0 - tol {
            continue;
        }
        if kept.iter().any(|(y, _)| (x - y).abs() <= tol) {
            continue;
        }
        kept.push((x, origin));
    }
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    PartitionSpec {
        order,
        points: kept.iter().map(|k| k.0).collect(),
        origins: kept.iter().map(|k| k.1).collect(),
    }
}

/// Whether every partition point, `0` included, maps onto a partition point.
/// At `0` and `1/2` the map is discontinuous, so both one-sided images
/// (`h` and `1 - h`) are required.
pub fn is_markov(spec: &PartitionSpec, p: &MapParams, tol: f64) -> bool {
    let mut set = vec![0.0];
    set.extend_from_slice(&spec.points);
    let hits = |y: f64| set.iter().any(|&s| map::circle_distance(s, y) <= tol);
    let h = p.h();
    let jumps = [h.rem_euclid(1.0), (1.0 - h).rem_euclid(1.0)];
    if !jumps.iter().all(|&y| hits(y)) {
        return false;
    }
    spec.points
        .iter()
        .filter(|&&x| (x - 0.5).abs() > tol)
        .all(|&x| hits(map::step_mod1_unchecked(x, p)))
}

/// The base partition copied into each unit cell of `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPartition {
    pub l: usize,
    pub base: Vec<f64>,
    /// Cell `z * K + k` is `[z + base[k], z + base[k + 1])`.
    pub cells: Vec<(f64, f64)>,
    pub lengths: Vec<f64>,
}

impl LiftedPartition {
    pub fn cells_per_unit(&self) -> usize {
        self.base.len() - 1
    }
}

pub fn lift_partition(spec: &PartitionSpec, l: usize) -> Result<LiftedPartition> {
    if l < 3 {
        return Err(Error::SystemSize(l));
    }
    let base = spec.boundaries();
    if base.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("partition has a zero-length cell".into()));
    }
    let mut cells = Vec::with_capacity(l * (base.len() - 1));
    let mut lengths = Vec::with_capacity(cells.capacity());
    for z in 0..l {
        for w in base.windows(2) {
            cells.push((z as f64 + w[0], z as f64 + w[1]));
            lengths.push(w[1] - w[0]);
        }
    }
    Ok(LiftedPartition { l, base, cells, lengths })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub a: DenseMatrix,
    pub lengths: Vec<f64>,
    pub l: usize,
    pub cells_per_unit: usize,
    pub h: f64,
}

impl TransitionMatrix {
    /// `||A w - 2 w||_inf / ||w||_inf`.
    pub fn eigenvector_defect(&self) -> f64 {
        let aw = linalg::matvec(&self.a, &self.lengths).expect("square by construction");
        let defect = aw
            .iter()
            .zip(&self.lengths)
            .fold(0.0f64, |m, (y, w)| m.max((y - 2.0 * w).abs()));
        defect / linalg::norm_inf(&self.lengths)
    }
}

/// `a_ij = |M(I_i) ∩ I_j| / |I_j|`, images wrapped modulo `L`.
///
/// Each unit cell is handled in its own local coordinates, so every unit
/// contributes bit-identical rows up to the cyclic shift.
pub fn build_transition_matrix(part: &LiftedPartition, p: &MapParams) -> Result<TransitionMatrix> {
    let k_cells = part.cells_per_unit();
    let l = part.l;
    let h = p.h();
    let base = &part.base;

    // local block: image of base cell k hits base cell k' of unit offset du
    let mut local: Vec<(usize, isize, usize, f64)> = Vec::new();
    for k in 0..k_cells {
        let (a, b) = (base[k], base[k + 1]);
        let mut pieces = Vec::with_capacity(2);
        if a < 0.5 {
            pieces.push((a, b.min(0.5), h));
        }
        if b > 0.5 {
            pieces.push((a.max(0.5), b, -1.0 - h));
        }
        for (lo, hi, offset) in pieces {
            let c = snap(2.0 * lo + offset, base);
            let d = snap(2.0 * hi + offset, base);
            let first = c.floor() as isize;
            let last = d.ceil() as isize;
            for du in first..last {
                for kp in 0..k_cells {
                    let cl = du as f64 + base[kp];
                    let cr = du as f64 + base[kp + 1];
                    let overlap = d.min(cr) - c.max(cl);
                    if overlap > 0.0 {
                        local.push((k, du, kp, overlap / (base[kp + 1] - base[kp])));
                    }
                }
            }
        }
    }

    let dim = l * k_cells;
    let mut a = DenseMatrix::zeros(dim);
    for z in 0..l {
        for &(k, du, kp, frac) in &local {
            let target = (z as isize + du).rem_euclid(l as isize) as usize;
            a.add_to(z * k_cells + k, target * k_cells + kp, frac);
        }
    }
    Ok(TransitionMatrix {
        a,
        lengths: part.lengths.clone(),
        l,
        cells_per_unit: k_cells,
        h,
    })
}

/// Moves an image endpoint onto a breakpoint lying within the partition
/// tolerance, so that images of Markov points land exactly on cell edges.
fn snap(y: f64, base: &[f64]) -> f64 {
    let unit = y.floor();
    let local = y - unit;
    base.iter()
        .find(|&&b| (local - b).abs() <= DEFAULT_PARTITION_TOL)
        .map_or(y, |&b| unit + b)
}

/// `gamma = ln(2 / chi_1)`, clamped at zero when `chi_1` rounds above 2.
pub fn decay_rate(chi1: f64) -> Result<f64> {
    if !(chi1 > 0.0) || chi1 > 2.0 + 1e-9 {
        return Err(Error::Domain(format!("chi_1 = {chi1} is outside (0, 2]")));
    }
    Ok((2.0 / chi1).ln().max(0.0))
}

/// Subleading eigenvalue of the order-0 (cyclic) matrix, `2 - 2h + 2h cos(2 pi / L)`.
pub fn analytic_zeroth(p: &MapParams, l: usize) -> Result<f64> {
    if l < 3 {
        return Err(Error::SystemSize(l));
    }
    let h = p.h();
    Ok(2.0 - 2.0 * h + 2.0 * h * (2.0 * PI / l as f64).cos())
}

/// Builds the order-`order` matrix on `L` cells and returns it with its spectral summary.
pub fn spectrum(
    p: &MapParams,
    order: usize,
    l: usize,
    solver_tol: f64,
) -> Result<(TransitionMatrix, SpectralSummary)> {
    let spec = critical_partition(p, order, DEFAULT_PARTITION_TOL);
    let part = lift_partition(&spec, l)?;
    let tm = build_transition_matrix(&part, p)?;
    let lead = linalg::leading_pair(&tm.a, solver_tol, linalg::DEFAULT_MAX_ITER)?;
    let summary = linalg::subdominant_modulus(&tm.a, &lead, solver_tol, linalg::DEFAULT_MAX_ITER)?;
    Ok((tm, summary))
}

/// A closed set of cells of the ring. For `h > 1/2` the reduced map leaves
/// both `[1 - h, h]` and its complement invariant, and partitions resolving
/// those edges decouple into one class per invariant set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportClass {
    pub cells: Vec<usize>,
    /// Share of the invariant (uniform) measure carried by the class.
    pub weight: f64,
    /// Whether the class is invariant under translation by one unit, i.e. wraps the ring.
    pub extended: bool,
}

/// Splits the ring into its closed classes. Since `A w = 2 w` and `1^T A = 2 1^T`
/// with positive vectors, the matrix is completely reducible and the classes
/// are the connected components of its support.
pub fn transport_classes(tm: &TransitionMatrix) -> Vec<TransportClass> {
    let n = tm.a.dim();
    let mut label = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if label[root] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![root];
        label[root] = id;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..n {
                if label[j] == usize::MAX && (tm.a.get(i, j) > 0.0 || tm.a.get(j, i) > 0.0) {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    let k = tm.cells_per_unit;
    let total: f64 = tm.lengths.iter().sum();
    classes
        .into_iter()
        .map(|cells| {
            let first = cells[0];
            let extended = label[(first + k) % n] == label[first];
            let weight = cells.iter().map(|&c| tm.lengths[c]).sum::<f64>() / total;
            TransportClass { cells, weight, extended }
        })
        .collect()
}

/// Spectral data of one extended class at one system size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpectrum {
    pub weight: f64,
    pub dim: usize,
    pub spectral: SpectralSummary,
    pub gamma: f64,
    pub d_l: f64,
}

/// One system size of a Markov scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPoint {
    pub l: usize,
    /// Extended classes; localised classes carry no transport and are omitted.
    pub classes: Vec<ClassSpectrum>,
    /// Measure-weighted `L^2 gamma / (4 pi^2)` over the classes.
    pub d_l: f64,
}

impl MarkovPoint {
    pub fn is_complex(&self) -> bool {
        self.classes.iter().any(|c| c.spectral.is_complex_pair)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovScan {
    pub order: usize,
    pub h: f64,
    pub is_markov: bool,
    pub points: Vec<MarkovPoint>,
    /// Intercept of the fit `D(L) = D_inf + c / L^2`.
    pub d_inf: f64,
    pub slope: f64,
    pub any_complex: bool,
}

/// `D(L)` at one system size.
pub fn markov_point(p: &MapParams, order: usize, l: usize, solver_tol: f64) -> Result<MarkovPoint> {
    let spec = critical_partition(p, order, DEFAULT_PARTITION_TOL);
    let part = lift_partition(&spec, l)?;
    let tm = build_transition_matrix(&part, p)?;
    let scale = (l * l) as f64 / (4.0 * PI * PI);
    let mut classes = Vec::new();
    for class in transport_classes(&tm) {
        if !class.extended {
            continue;
        }
        let sub = if class.cells.len() == tm.a.dim() {
            tm.a.clone()
        } else {
            DenseMatrix::from_fn(class.cells.len(), |i, j| tm.a.get(class.cells[i], class.cells[j]))
        };
        let lead = linalg::leading_pair(&sub, solver_tol, linalg::DEFAULT_MAX_ITER)?;
        let spectral = linalg::subdominant_modulus(&sub, &lead, solver_tol, linalg::DEFAULT_MAX_ITER)?;
        let gamma = decay_rate(spectral.chi1)?;
        classes.push(ClassSpectrum {
            weight: class.weight,
            dim: class.cells.len(),
            spectral,
            gamma,
            d_l: scale * gamma,
        });
    }
    let d_l = classes.iter().map(|c| c.weight * c.d_l).sum();
    Ok(MarkovPoint { l, classes, d_l })
}

/// `D(L)` for every `L` in `l_list`, plus the `1/L^2` extrapolation.
pub fn markov_scan(p: &MapParams, order: usize, l_list: &[usize], solver_tol: f64) -> Result<MarkovScan> {
    if l_list.len() < 3 || l_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "L list needs at least 3 strictly increasing sizes, got {l_list:?}"
        )));
    }
    let points = l_list
        .iter()
        .map(|&l| markov_point(p, order, l, solver_tol))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|pt| 1.0 / (pt.l * pt.l) as f64).collect();
    let ys: Vec<f64> = points.iter().map(|pt| pt.d_l).collect();
    let (d_inf, slope) = linear_fit(&xs, &ys);
    let spec = critical_partition(p, order, DEFAULT_PARTITION_TOL);
    Ok(MarkovScan {
        order,
        h: p.h(),
        is_markov: is_markov(&spec, p, DEFAULT_PARTITION_TOL),
        any_complex: points.iter().any(MarkovPoint::is_complex),
        points,
        d_inf,
        slope,
    })
}

/// Ordinary least squares `y = a + b x`; returns `(a, b)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

impl MarkovScan {
    /// Two-point `1/L^2` extrapolation from the two largest sizes.
    pub fn richardson(&self) -> f64 {
        let [a, b] = [&self.points[self.points.len() - 2], &self.points[self.points.len() - 1]];
        let (la, lb) = ((a.l * a.l) as f64, (b.l * b.l) as f64);
        (lb * b.d_l - la * a.d_l) / (lb - la)
    }

    /// `|D(L_max) - D_inf| + |D_inf - D_richardson|`: distance to the last
    /// finite-size value plus the disagreement between the two extrapolations.
    pub fn error_bound(&self) -> f64 {
        let last = self.points.last().expect("at least three sizes").d_l;
        (last - self.d_inf).abs() + (self.richardson() - self.d_inf).abs()
    }
}

/// Extrapolated `D_inf` with the bound of [`MarkovScan::error_bound`].
pub fn d_markov(p: &MapParams, order: usize, l_list: &[usize], solver_tol: f64) -> Result<DiffusionEstimate> {
    let scan = markov_scan(p, order, l_list, solver_tol)?;
    // `+ 0.0` turns a fit result of -0 into +0.
    let d_inf = scan.d_inf + 0.0;
    Ok(DiffusionEstimate::new(Method::Markov, order, p.h(), d_inf).with_bound(scan.error_bound()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(h: f64) -> MapParams {
        MapParams::new(h).unwrap()
    }

    const TOL: f64 = DEFAULT_PARTITION_TOL;

    #[test]
    fn partition_examples() {
        assert_eq!(critical_partition(&params(0.5), 2, TOL).points, vec![0.5]);
        assert!(critical_partition(&params(0.3), 0, TOL).points.is_empty());
        let pts = critical_partition(&params(0.3), 2, TOL).points;
        assert_eq!(pts.len(), 3);
        for (a, b) in pts.iter().zip([0.3, 0.5, 0.7]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(critical_partition(&params(0.3), 1, TOL).points, vec![0.5]);
        // at h = 0 the critical point maps onto 0
        assert_eq!(critical_partition(&params(0.0), 3, TOL).points, vec![0.5]);
    }

    #[test]
    fn markov_examples() {
        assert!(is_markov(&critical_partition(&params(0.0), 0, TOL), &params(0.0), TOL));
        assert!(is_markov(&critical_partition(&params(1.0), 0, TOL), &params(1.0), TOL));
        assert!(!is_markov(&critical_partition(&params(0.3), 0, TOL), &params(0.3), TOL));
        for order in 1..5 {
            assert!(is_markov(&critical_partition(&params(0.5), order, TOL), &params(0.5), TOL));
        }
    }

    #[test]
    fn lifting_examples() {
        let spec0 = critical_partition(&params(0.4), 0, TOL);
        let part = lift_partition(&spec0, 3).unwrap();
        assert_eq!(part.cells, vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]);
        let spec1 = critical_partition(&params(0.4), 1, TOL);
        let part = lift_partition(&spec1, 4).unwrap();
        assert_eq!(part.cells.len(), 8);
        assert!(part.lengths.iter().all(|&w| w == 0.5));
        let spec3 = critical_partition(&params(0.37), 3, TOL);
        let part = lift_partition(&spec3, 7).unwrap();
        assert!((part.lengths.iter().sum::<f64>() - 7.0).abs() < 1e-12);
        assert!(matches!(lift_partition(&spec0, 2), Err(Error::SystemSize(2))));
    }

    #[test]
    fn zeroth_order_matrix_is_cyclic() {
        let h = 0.3;
        let part = lift_partition(&critical_partition(&params(h), 0, TOL), 3).unwrap();
        let tm = build_transition_matrix(&part, &params(h)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 2.0 - 2.0 * h } else { h };
                assert!((tm.a.get(i, j) - expected).abs() < 1e-15);
            }
        }
        let part = lift_partition(&critical_partition(&params(0.0), 0, TOL), 5).unwrap();
        let tm = build_transition_matrix(&part, &params(0.0)).unwrap();
        assert_eq!(tm.a, DenseMatrix::from_fn(5, |i, j| if i == j { 2.0 } else { 0.0 }));
    }

    #[test]
    fn lengths_are_right_eigenvector() {
        let p = params(0.37);
        let part = lift_partition(&critical_partition(&p, 2, TOL), 7).unwrap();
        let tm = build_transition_matrix(&part, &p).unwrap();
        assert!(tm.eigenvector_defect() <= 1e-10);
        assert!(tm.a.entries().iter().all(|&v| (0.0..=2.0).contains(&v)));
    }

    #[test]
    fn decay_rate_examples() {
        assert_eq!(decay_rate(2.0).unwrap(), 0.0);
        assert!((decay_rate(1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        let chi = analytic_zeroth(&params(0.5), 4).unwrap();
        assert!((chi - 1.0).abs() < 1e-15);
        assert!(decay_rate(0.0).is_err());
        assert!(decay_rate(2.1).is_err());
    }

    #[test]
    fn analytic_zeroth_examples() {
        assert!((analytic_zeroth(&params(1.0), 3).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(analytic_zeroth(&params(0.0), 17).unwrap(), 2.0);
        let h = 0.6;
        let l = 1000;
        let approx = 2.0 - h * 4.0 * PI * PI / (l * l) as f64;
        assert!((analytic_zeroth(&params(h), l).unwrap() - approx).abs() < 1e-10);
    }

    #[test]
    fn markov_estimates() {
        let l_list = DEFAULT_L_LIST;
        let d = d_markov(&params(0.3), 0, &l_list, linalg::DEFAULT_TOL).unwrap();
        assert!((d.value - 0.15).abs() < 1e-3);
        for order in 0..4 {
            let d = d_markov(&params(0.0), order, &l_list, linalg::DEFAULT_TOL).unwrap();
            assert!(d.value.abs() < 1e-12);
        }
        let d = d_markov(&params(0.5), 1, &l_list, linalg::DEFAULT_TOL).unwrap();
        assert!((d.value - 0.5).abs() < 5e-3, "{}", d.value);
        assert!(d_markov(&params(0.5), 1, &[8, 16], linalg::DEFAULT_TOL).is_err());
    }
}
