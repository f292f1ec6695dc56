//! Coboundary calculus for coverings of a curve by trivialized charts.
//!
//! Sections live on per-chart coefficient windows; the coboundary sends a
//! tuple (f_i) to the overlap differences f_i - twist(f_j), assembled as one
//! dense matrix over weighted coefficient slots. Kernel and cokernel of that
//! matrix are the window-level global sections and obstruction classes;
//! `split_cocycle` realizes the splitting operator as a minimum-norm least
//! squares solve.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::defaults;
use crate::distorted::DistortedCylinder;
use crate::error::{Error, Result};
use crate::grid;
use crate::series::{Annulus, LaurentSeries, SmoothnessClass};

/// How chart j's coordinate relates to chart i's on an overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    /// Same coordinate on both sides; restriction only re-windows indices.
    Concentric,
    /// Chart j uses zeta = 1/z, so its index k lands on -k before the factor.
    Inversion,
}

/// One chart of a covering: where it lives, how many sheets the curve has
/// over it, and the norm its coefficient window is measured in.
#[derive(Debug, Clone)]
pub struct Chart {
    pub domain: Annulus,
    pub multiplicity: usize,
    pub smoothness: SmoothnessClass,
}

/// Pairwise overlap in chart `left`'s coordinate. Sections of chart `right`
/// are pulled onto it through the coordinate change and then multiplied by
/// the invertible factor.
///
/// Overlap norms use the left chart's smoothness class. The optional cylinder
/// carries the fiberwise distortion for the nonlinear glue maps; the linear
/// coboundary here never reads it.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub left: usize,
    pub right: usize,
    pub domain: Annulus,
    pub multiplicity: usize,
    pub kind: TransitionKind,
    pub factor: LaurentSeries,
    pub cylinder: Option<DistortedCylinder>,
}

/// Charts plus pairwise overlap data, validated so every overlap sits inside
/// both charts and every transition factor is invertible on its grid.
#[derive(Debug, Clone)]
pub struct Covering {
    charts: Vec<Chart>,
    overlaps: Vec<Overlap>,
}

impl Covering {
    pub fn new(charts: Vec<Chart>, overlaps: Vec<Overlap>) -> Result<Self> {
        for (idx, c) in charts.iter().enumerate() {
            if c.multiplicity == 0 {
                return Err(Error::Config(format!("chart {idx} has multiplicity 0")));
            }
        }
        for (idx, o) in overlaps.iter().enumerate() {
            for side in [o.left, o.right] {
                if side >= charts.len() {
                    return Err(Error::UnknownChart {
                        chart: side,
                        charts: charts.len(),
                    });
                }
            }
            if o.left == o.right {
                return Err(Error::Config(format!(
                    "overlap {idx} pairs chart {} with itself",
                    o.left
                )));
            }
            let (li, ri) = (&charts[o.left], &charts[o.right]);
            if o.multiplicity != li.multiplicity || o.multiplicity != ri.multiplicity {
                return Err(Error::MultiplicityMismatch {
                    overlap: idx,
                    overlap_mult: o.multiplicity,
                    left_mult: li.multiplicity,
                    right_mult: ri.multiplicity,
                });
            }
            let inside_left = li.domain.contains(&o.domain);
            let right_view = match o.kind {
                TransitionKind::Concentric => o.domain,
                TransitionKind::Inversion => Annulus::new(
                    1.0 / o.domain.outer_radius(),
                    1.0 / o.domain.inner_radius(),
                )?,
            };
            if !inside_left || !ri.domain.contains(&right_view) {
                return Err(Error::NotContained {
                    inner: li.domain.inner_radius(),
                    outer: li.domain.outer_radius(),
                    sub_inner: o.domain.inner_radius(),
                    sub_outer: o.domain.outer_radius(),
                });
            }
            if !o.factor.domain().contains(&o.domain) {
                return Err(Error::DomainMismatch {
                    context: format!("overlap {idx} factor does not cover the overlap"),
                });
            }
            let mut min_abs = f64::INFINITY;
            for radius in [
                o.domain.inner_radius().max(f64::MIN_POSITIVE),
                o.domain.sampling_radius(),
                o.domain.outer_radius(),
            ] {
                for z in grid::circle_points(radius, defaults::CONTAINMENT_GRID) {
                    min_abs = min_abs.min(o.factor.eval(z).norm());
                }
            }
            if min_abs < defaults::INVERTIBILITY_FLOOR {
                return Err(Error::SingularTransitionFactor {
                    overlap: idx,
                    min_abs,
                });
            }
        }
        Ok(Covering { charts, overlaps })
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.overlaps
    }
}

/// Two concentric annulus charts covering A(inner, outer) and overlapping on
/// A(mid_inner, mid_outer), glued by the constant factor 1.
pub fn two_chart_annulus(
    inner: f64,
    mid_inner: f64,
    mid_outer: f64,
    outer: f64,
    smoothness: SmoothnessClass,
) -> Result<Covering> {
    let shared = Annulus::new(mid_inner, mid_outer)?;
    let charts = vec![
        Chart {
            domain: Annulus::new(inner, mid_outer)?,
            multiplicity: 1,
            smoothness,
        },
        Chart {
            domain: Annulus::new(mid_inner, outer)?,
            multiplicity: 1,
            smoothness,
        },
    ];
    let overlaps = vec![Overlap {
        left: 0,
        right: 1,
        domain: shared,
        multiplicity: 1,
        kind: TransitionKind::Concentric,
        factor: LaurentSeries::constant(shared, Complex64::ONE)?,
        cylinder: None,
    }];
    Covering::new(charts, overlaps)
}

/// Two-disk covering of the projective line carrying the degree-d monomial
/// bundle: chart 0 in z, chart 1 in zeta = 1/z, glued by z^d over an annulus
/// around |z| = 1. Global sections are the polynomials of degree <= d.
pub fn projective_line(d: i32, smoothness: SmoothnessClass) -> Result<Covering> {
    let shared = Annulus::new(0.8, 1.25)?;
    let disk = Annulus::disk(1.25)?;
    let charts = vec![
        Chart {
            domain: disk,
            multiplicity: 1,
            smoothness,
        },
        Chart {
            domain: disk,
            multiplicity: 1,
            smoothness,
        },
    ];
    let overlaps = vec![Overlap {
        left: 0,
        right: 1,
        domain: shared,
        multiplicity: 1,
        kind: TransitionKind::Inversion,
        factor: LaurentSeries::monomial(shared, d, Complex64::ONE)?,
        cylinder: None,
    }];
    Covering::new(charts, overlaps)
}

/// Index windows the coboundary is truncated to, aligned with the covering's
/// chart and overlap lists.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub chart_windows: Vec<(i32, i32)>,
    pub overlap_windows: Vec<(i32, i32)>,
}

impl Truncation {
    /// [-half, half] everywhere, clipped to Taylor windows on disk charts.
    pub fn uniform(covering: &Covering, half: i32) -> Truncation {
        let chart_windows = covering
            .charts()
            .iter()
            .map(|c| if c.domain.is_disk() { (0, half) } else { (-half, half) })
            .collect();
        let overlap_windows = covering
            .overlaps()
            .iter()
            .map(|_| (-half, half))
            .collect();
        Truncation {
            chart_windows,
            overlap_windows,
        }
    }

    /// Taylor windows [0, half] on the charts and the slots either chart can
    /// reach, [d - half, half], on the overlap of the degree-d projective
    /// covering.
    pub fn projective(d: i32, half: i32) -> Truncation {
        Truncation {
            chart_windows: vec![(0, half); 2],
            overlap_windows: vec![((d - half).min(0), half.max(d))],
        }
    }
}

/// Layout of stacked coefficient windows: block b holds `levels` copies of
/// the index window [min, max], one slot per (level, index).
#[derive(Debug, Clone)]
pub struct SlotMap {
    blocks: Vec<BlockSpec>,
    total: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct BlockSpec {
    pub offset: usize,
    pub min: i32,
    pub max: i32,
    pub levels: usize,
}

impl SlotMap {
    pub fn new(windows: &[(i32, i32, usize)]) -> Result<SlotMap> {
        let mut blocks = Vec::with_capacity(windows.len());
        let mut total = 0usize;
        for &(min, max, levels) in windows {
            if min > max {
                return Err(Error::InvalidWindow { min, max });
            }
            blocks.push(BlockSpec {
                offset: total,
                min,
                max,
                levels,
            });
            total += levels * ((max - min + 1) as usize);
        }
        Ok(SlotMap { blocks, total })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, b: usize) -> BlockSpec {
        self.blocks[b]
    }

    pub fn window_len(&self, b: usize) -> usize {
        let spec = self.blocks[b];
        (spec.max - spec.min + 1) as usize
    }

    pub fn slot(&self, b: usize, level: usize, k: i32) -> usize {
        let spec = self.blocks[b];
        debug_assert!(level < spec.levels && k >= spec.min && k <= spec.max);
        spec.offset + level * self.window_len(b) + (k - spec.min) as usize
    }
}

/// The coboundary matrix in weighted coordinates, with the slot layout and
/// weights needed to move vectors in and out of them.
#[derive(Debug, Clone)]
pub struct CoboundaryOperator {
    source: SlotMap,
    target: SlotMap,
    matrix: DMatrix<Complex64>,
    source_weights: DVector<f64>,
    target_weights: DVector<f64>,
}

pub(crate) fn slot_weight(class: SmoothnessClass, k: i32) -> f64 {
    match class {
        SmoothnessClass::SupNorm => 1.0,
        SmoothnessClass::SobolevWeight(s) => (1.0 + k.abs() as f64).powf(s),
    }
}

/// Slot layout for chart tuples: one block per chart, stacked by level.
pub(crate) fn source_slots(c: &Covering, trunc: &Truncation) -> Result<SlotMap> {
    SlotMap::new(
        &c.charts()
            .iter()
            .zip(&trunc.chart_windows)
            .map(|(ch, &(min, max))| (min, max, ch.multiplicity))
            .collect::<Vec<_>>(),
    )
}

/// Slot layout for overlap tuples: one block per overlap.
pub(crate) fn target_slots(c: &Covering, trunc: &Truncation) -> Result<SlotMap> {
    SlotMap::new(
        &c.overlaps()
            .iter()
            .zip(&trunc.overlap_windows)
            .map(|(ov, &(min, max))| (min, max, ov.multiplicity))
            .collect::<Vec<_>>(),
    )
}

pub(crate) fn source_weight_vector(c: &Covering, source: &SlotMap) -> DVector<f64> {
    let mut weights = DVector::from_element(source.total(), 1.0);
    for (ci, ch) in c.charts().iter().enumerate() {
        let spec = source.block(ci);
        for level in 0..spec.levels {
            for k in spec.min..=spec.max {
                weights[source.slot(ci, level, k)] = slot_weight(ch.smoothness, k);
            }
        }
    }
    weights
}

/// Overlap slots are measured in the left chart's class.
pub(crate) fn target_weight_vector(c: &Covering, target: &SlotMap) -> DVector<f64> {
    let mut weights = DVector::from_element(target.total(), 1.0);
    for (oi, ov) in c.overlaps().iter().enumerate() {
        let class = c.charts()[ov.left].smoothness;
        let spec = target.block(oi);
        for level in 0..spec.levels {
            for k in spec.min..=spec.max {
                weights[target.slot(oi, level, k)] = slot_weight(class, k);
            }
        }
    }
    weights
}

/// Wraps a matrix given in raw coordinates, rescaling rows and columns into
/// the weighted ones every spectral routine works in.
pub(crate) fn operator_from_raw(
    source: SlotMap,
    target: SlotMap,
    mut matrix: DMatrix<Complex64>,
    source_weights: DVector<f64>,
    target_weights: DVector<f64>,
) -> CoboundaryOperator {
    for r in 0..matrix.nrows() {
        for col in 0..matrix.ncols() {
            matrix[(r, col)] *= target_weights[r] / source_weights[col];
        }
    }
    CoboundaryOperator {
        source,
        target,
        matrix,
        source_weights,
        target_weights,
    }
}

/// Builds the weighted matrix of the coboundary on the given truncation
/// windows: block (overlap, left) embeds the left chart's window, block
/// (overlap, right) subtracts the factor-twisted, coordinate-changed right
/// window.
pub fn assemble_coboundary(c: &Covering, trunc: &Truncation) -> Result<CoboundaryOperator> {
    if trunc.chart_windows.len() != c.charts().len()
        || trunc.overlap_windows.len() != c.overlaps().len()
    {
        return Err(Error::Config(
            "truncation windows are not aligned with the covering".into(),
        ));
    }
    let source = source_slots(c, trunc)?;
    let target = target_slots(c, trunc)?;

    let mut matrix = DMatrix::<Complex64>::zeros(target.total(), source.total());
    for (oi, ov) in c.overlaps().iter().enumerate() {
        let tw = target.block(oi);
        let lw = source.block(ov.left);
        let rw = source.block(ov.right);
        for level in 0..ov.multiplicity {
            for k in tw.min.max(lw.min)..=tw.max.min(lw.max) {
                let row = target.slot(oi, level, k);
                let col = source.slot(ov.left, level, k);
                matrix[(row, col)] += Complex64::ONE;
            }
            for kt in tw.min..=tw.max {
                let row = target.slot(oi, level, kt);
                for ks in rw.min..=rw.max {
                    let coeff = match ov.kind {
                        TransitionKind::Concentric => ov.factor.coeff(kt - ks),
                        TransitionKind::Inversion => ov.factor.coeff(kt + ks),
                    };
                    if coeff != Complex64::default() {
                        let col = source.slot(ov.right, level, ks);
                        matrix[(row, col)] -= coeff;
                    }
                }
            }
        }
    }

    let source_weights = source_weight_vector(c, &source);
    let target_weights = target_weight_vector(c, &target);
    Ok(operator_from_raw(
        source,
        target,
        matrix,
        source_weights,
        target_weights,
    ))
}

impl CoboundaryOperator {
    pub fn source(&self) -> &SlotMap {
        &self.source
    }

    pub fn target(&self) -> &SlotMap {
        &self.target
    }

    /// Matrix in weighted coordinates.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn source_weights(&self) -> &DVector<f64> {
        &self.source_weights
    }

    pub fn target_weights(&self) -> &DVector<f64> {
        &self.target_weights
    }

    /// Applies the coboundary to raw (unweighted) chart coefficients,
    /// returning raw overlap coefficients.
    pub fn apply_raw(&self, f: &DVector<Complex64>) -> DVector<Complex64> {
        let mut x = f.clone();
        for i in 0..x.len() {
            x[i] *= self.source_weights[i];
        }
        let mut y = &self.matrix * x;
        for i in 0..y.len() {
            y[i] /= self.target_weights[i];
        }
        y
    }

    pub fn singular_values(&self) -> Vec<f64> {
        if self.matrix.nrows() == 0 || self.matrix.ncols() == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self
            .matrix
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    fn rank(&self, singular_values: &[f64], rank_tol: f64) -> usize {
        let largest = singular_values.first().copied().unwrap_or(0.0);
        singular_values
            .iter()
            .filter(|&&s| s > rank_tol * largest)
            .count()
    }

    /// Slots of the target space lying in the outermost tenth of their block
    /// window on either side. Cokernel mass concentrated there is treated as
    /// truncation junk, not cohomology.
    fn edge_slots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for b in 0..self.target.blocks() {
            let spec = self.target.block(b);
            let len = self.target.window_len(b) as i32;
            let band = ((len + 9) / 10).max(1);
            for level in 0..spec.levels {
                for k in spec.min..=spec.max {
                    if k < spec.min + band || k > spec.max - band {
                        out.push(self.target.slot(b, level, k));
                    }
                }
            }
        }
        out
    }
}

/// Orthonormal eigenbasis of the Hermitian Gram matrix, paired with its
/// eigenvalues and sorted ascending. Used to read null spaces off with the
/// dimension decided by the singular spectrum.
fn sorted_hermitian_eigen(g: DMatrix<Complex64>) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let n = g.nrows();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let eig = nalgebra::SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, vectors)
}

/// Numerical null space of the weighted coboundary, returned as raw chart
/// coefficient vectors, orthonormal in the weighted inner product.
pub fn h0_kernel(op: &CoboundaryOperator, rank_tol: f64) -> Vec<DVector<Complex64>> {
    let svals = op.singular_values();
    let rank = op.rank(&svals, rank_tol);
    let n = op.matrix.ncols();
    let dim = n - rank;
    if dim == 0 {
        return Vec::new();
    }
    if op.matrix.nrows() == 0 {
        // Everything is a section; hand back the weighted standard basis.
        return (0..n)
            .map(|i| {
                let mut v = DVector::zeros(n);
                v[i] = Complex64::new(1.0 / op.source_weights[i], 0.0);
                v
            })
            .collect();
    }
    let gram = op.matrix.adjoint() * &op.matrix;
    let (_, vectors) = sorted_hermitian_eigen(gram);
    vectors
        .into_iter()
        .take(dim)
        .map(|mut v| {
            for i in 0..v.len() {
                v[i] /= op.source_weights[i];
            }
            v
        })
        .collect()
}

/// Cokernel representatives after the window-edge filter: raw overlap
/// vectors orthonormal in the weighted inner product, plus how many raw
/// cokernel directions were flagged as truncation artifacts.
pub fn cokernel_basis(
    op: &CoboundaryOperator,
    rank_tol: f64,
) -> (Vec<DVector<Complex64>>, usize) {
    let svals = op.singular_values();
    let rank = op.rank(&svals, rank_tol);
    let m = op.matrix.nrows();
    let raw_dim = m - rank;
    if raw_dim == 0 {
        return (Vec::new(), 0);
    }
    let raw: Vec<DVector<Complex64>> = if op.matrix.ncols() == 0 {
        (0..m)
            .map(|i| {
                let mut v = DVector::zeros(m);
                v[i] = Complex64::ONE;
                v
            })
            .collect()
    } else {
        let gram = &op.matrix * op.matrix.adjoint();
        let (_, vectors) = sorted_hermitian_eigen(gram);
        vectors.into_iter().take(raw_dim).collect()
    };
    // Edge-energy form on the cokernel: eigenvalues near 1 mean the direction
    // lives on the window rim and is an artifact of truncation, not a class.
    let edges = op.edge_slots();
    let mut b = DMatrix::<Complex64>::zeros(edges.len(), raw_dim);
    for (r, &slot) in edges.iter().enumerate() {
        for (ccol, v) in raw.iter().enumerate() {
            b[(r, ccol)] = v[slot];
        }
    }
    let (values, vectors) = sorted_hermitian_eigen(b.adjoint() * b);
    let mut genuine = Vec::new();
    let mut flagged = 0usize;
    for (lambda, combo) in values.iter().zip(vectors) {
        if *lambda > 0.5 {
            flagged += 1;
            continue;
        }
        let mut v = DVector::<Complex64>::zeros(m);
        for (ccol, basis_vec) in raw.iter().enumerate() {
            v += basis_vec * combo[ccol];
        }
        for i in 0..m {
            v[i] /= op.target_weights[i];
        }
        genuine.push(v);
    }
    (genuine, flagged)
}

/// Cokernel dimension of the coboundary after the edge filter, with the
/// singular spectrum for audit.
pub fn h1_dimension(op: &CoboundaryOperator, rank_tol: f64) -> (usize, Vec<f64>) {
    let svals = op.singular_values();
    let (basis, _) = cokernel_basis(op, rank_tol);
    (basis.len(), svals)
}

/// Minimum-norm least-squares preimage of the raw overlap vector `h` under
/// the coboundary: the splitting operator. The residual is the weighted norm
/// of delta(f) - h, near zero exactly when h carries no cokernel component.
pub fn split_cocycle(
    op: &CoboundaryOperator,
    h: &DVector<Complex64>,
) -> Result<(DVector<Complex64>, f64)> {
    if h.len() != op.target.total() {
        return Err(Error::DomainMismatch {
            context: format!(
                "cocycle has {} slots, operator target has {}",
                h.len(),
                op.target.total()
            ),
        });
    }
    let mut hw = h.clone();
    for i in 0..hw.len() {
        hw[i] *= op.target_weights[i];
    }
    let n = op.matrix.ncols();
    if n == 0 || op.matrix.nrows() == 0 {
        return Ok((DVector::zeros(n), hw.norm()));
    }
    let svd = op.matrix.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v");
    let largest = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s));
    let cut = defaults::RANK_TOL * largest;
    let mut xw = DVector::<Complex64>::zeros(n);
    for i in 0..svd.singular_values.len() {
        let s = svd.singular_values[i];
        if s <= cut {
            continue;
        }
        let proj = u.column(i).dotc(&hw);
        xw += v_t.row(i).adjoint() * (proj / s);
    }
    let residual = (&op.matrix * &xw - &hw).norm();
    let mut f = xw;
    for i in 0..n {
        f[i] /= op.source_weights[i];
    }
    Ok((f, residual))
}

/// Headline numbers for one coboundary: kernel and filtered cokernel
/// dimensions, the spectrum, how many directions the edge filter removed,
/// and the gap between kept and dropped singular values.
#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub h0_dim: usize,
    pub h1_dim: usize,
    pub singular_values: Vec<f64>,
    pub flagged_artifacts: usize,
    pub spectral_gap: f64,
}

pub fn cohomology_report(op: &CoboundaryOperator, rank_tol: f64) -> CohomologyReport {
    let svals = op.singular_values();
    let rank = op.rank(&svals, rank_tol);
    let (basis, flagged) = cokernel_basis(op, rank_tol);
    let spectral_gap = if rank == 0 || rank == svals.len() {
        f64::INFINITY
    } else {
        svals[rank - 1] / svals[rank]
    };
    CohomologyReport {
        h0_dim: op.matrix.ncols() - rank,
        h1_dim: basis.len(),
        singular_values: svals,
        flagged_artifacts: flagged,
        spectral_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = defaults::RANK_TOL;

    fn sobolev() -> SmoothnessClass {
        SmoothnessClass::SobolevWeight(1.0)
    }

    fn annulus_cover() -> Covering {
        two_chart_annulus(0.5, 0.9, 1.2, 2.0, sobolev()).unwrap()
    }

    /// Window-level dimensions of the degree-d projective covering by direct
    /// monomial bookkeeping: which overlap slots the two chart windows reach,
    /// and which chart pairs glue to a global section.
    fn projective_oracle(d: i32, half: i32) -> (usize, usize) {
        let (o_min, o_max) = ((d - half).min(0), half.max(d));
        let mut reached = vec![false; (o_max - o_min + 1) as usize];
        for k in 0..=half {
            reached[(k - o_min) as usize] = true;
            let hit = d - k;
            if hit >= o_min && hit <= o_max {
                reached[(hit - o_min) as usize] = true;
            }
        }
        let h1 = reached.iter().filter(|r| !**r).count();
        let h0 = (0..=half).filter(|&k| d - k >= 0 && d - k <= half).count();
        (h0, h1)
    }

    #[test]
    fn single_chart_has_no_target_and_full_kernel() {
        let c = Covering::new(
            vec![Chart {
                domain: Annulus::new(0.5, 2.0).unwrap(),
                multiplicity: 1,
                smoothness: sobolev(),
            }],
            vec![],
        )
        .unwrap();
        let op = assemble_coboundary(&c, &Truncation::uniform(&c, 4)).unwrap();
        assert_eq!(op.matrix().nrows(), 0);
        assert_eq!(op.matrix().ncols(), 9);
        let report = cohomology_report(&op, TOL);
        assert_eq!(report.h0_dim, 9);
        assert_eq!(report.h1_dim, 0);
        assert_eq!(h0_kernel(&op, TOL).len(), 9);
    }

    #[test]
    fn two_chart_trivial_factor_is_plus_minus_identity() {
        let c = two_chart_annulus(0.5, 0.9, 1.2, 2.0, SmoothnessClass::SupNorm).unwrap();
        let t = Truncation::uniform(&c, 8);
        let op = assemble_coboundary(&c, &t).unwrap();
        assert_eq!(op.matrix().nrows(), 17);
        assert_eq!(op.matrix().ncols(), 34);
        for k in -8..=8i32 {
            let row = op.target().slot(0, 0, k);
            for ks in -8..=8i32 {
                let left = op.matrix()[(row, op.source().slot(0, 0, ks))];
                let right = op.matrix()[(row, op.source().slot(1, 0, ks))];
                let expect = if ks == k { 1.0 } else { 0.0 };
                assert_eq!(left, Complex64::new(expect, 0.0));
                assert_eq!(right, Complex64::new(-expect, 0.0));
            }
        }
    }

    #[test]
    fn constant_tuples_are_cocycles() {
        let c = annulus_cover();
        let t = Truncation::uniform(&c, 8);
        let op = assemble_coboundary(&c, &t).unwrap();
        let mut f = DVector::<Complex64>::zeros(op.source().total());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in -8..=8i32 {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            f[op.source().slot(0, 0, k)] = v;
            f[op.source().slot(1, 0, k)] = v;
        }
        assert_eq!(op.apply_raw(&f).norm(), 0.0);
    }

    #[test]
    fn annulus_cover_kernel_is_the_shared_window() {
        let c = annulus_cover();
        let op = assemble_coboundary(&c, &Truncation::uniform(&c, 8)).unwrap();
        let report = cohomology_report(&op, TOL);
        assert_eq!(report.h0_dim, 17);
        assert_eq!(report.h1_dim, 0);
        assert_eq!(report.flagged_artifacts, 0);
        let basis = h0_kernel(&op, TOL);
        assert_eq!(basis.len(), 17);
        for v in &basis {
            assert!(op.apply_raw(v).norm() < 1e-10);
        }
    }

    #[test]
    fn stein_cover_splits_every_cocycle() {
        let c = annulus_cover();
        let op = assemble_coboundary(&c, &Truncation::uniform(&c, 8)).unwrap();
        let mut h = DVector::<Complex64>::zeros(op.target().total());
        h[op.target().slot(0, 0, -3)] = Complex64::ONE;
        let (f, residual) = split_cocycle(&op, &h).unwrap();
        assert!(residual < 1e-12, "residual {residual:.3e}");
        let back = op.apply_raw(&f);
        assert!((back - h).norm() < 1e-10);
    }

    #[test]
    fn splitting_is_a_right_inverse_on_the_image() {
        let c = annulus_cover();
        let op = assemble_coboundary(&c, &Truncation::uniform(&c, 8)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = DVector::from_fn(op.source().total(), |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = op.apply_raw(&f);
        let (f2, residual) = split_cocycle(&op, &h).unwrap();
        assert!(residual < 1e-10);
        assert!((op.apply_raw(&f2) - h).norm() < 1e-10);
    }

    #[test]
    fn projective_line_matches_the_monomial_oracle() {
        for d in -4..=2i32 {
            let c = projective_line(d, sobolev()).unwrap();
            for half in [2 * d.abs() + 4, 2 * d.abs() + 8, 2 * d.abs() + 16] {
                let t = Truncation::projective(d, half);
                let op = assemble_coboundary(&c, &t).unwrap();
                let report = cohomology_report(&op, TOL);
                let (h0, h1) = projective_oracle(d, half);
                assert_eq!(
                    (report.h0_dim, report.h1_dim),
                    (h0, h1),
                    "degree {d}, window {half}"
                );
                assert_eq!(report.h0_dim, (d + 1).max(0) as usize);
                assert_eq!(report.h1_dim, (-d - 1).max(0) as usize);
            }
        }
    }

    #[test]
    fn inversion_block_acts_like_the_monomial_map() {
        let d = 1i32;
        let c = projective_line(d, SmoothnessClass::SupNorm).unwrap();
        let op = assemble_coboundary(&c, &Truncation::projective(d, 6)).unwrap();
        // Chart 1 monomial zeta^k goes to -z^(d-k) on the overlap.
        for k in [0i32, 2, 5] {
            let mut f = DVector::<Complex64>::zeros(op.source().total());
            f[op.source().slot(1, 0, k)] = Complex64::ONE;
            let y = op.apply_raw(&f);
            for kt in (d - 6).min(0)..=6 {
                let want = if kt == d - k { -1.0 } else { 0.0 };
                let got = y[op.target().slot(0, 0, kt)];
                assert!((got - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn obstructed_class_shows_up_in_the_split_residual() {
        let c = projective_line(-2, sobolev()).unwrap();
        let op = assemble_coboundary(&c, &Truncation::projective(-2, 8)).unwrap();
        let mut h = DVector::<Complex64>::zeros(op.target().total());
        let slot = op.target().slot(0, 0, -1);
        h[slot] = Complex64::ONE;
        let (_, residual) = split_cocycle(&op, &h).unwrap();
        // The class of 1/z is exactly the cokernel direction, so the residual
        // is its full weighted norm.
        let expected = op.target_weights()[slot];
        assert!(
            (residual - expected).abs() < 1e-8,
            "residual {residual}, norm of the class {expected}"
        );
        let (basis, _) = cokernel_basis(&op, TOL);
        assert_eq!(basis.len(), 1);
        let rep = &basis[0];
        let mass = rep[slot].norm() / rep.norm();
        assert!(mass > 0.99, "cokernel representative concentrates on 1/z");
    }

    #[test]
    fn edge_filter_discards_unreachable_window_rim() {
        // Overlap window wider than the charts: the rim slots +-9, +-10 are
        // unreachable at this truncation and must be flagged, not counted.
        let c = annulus_cover();
        let t = Truncation {
            chart_windows: vec![(-8, 8), (-8, 8)],
            overlap_windows: vec![(-10, 10)],
        };
        let op = assemble_coboundary(&c, &t).unwrap();
        let report = cohomology_report(&op, TOL);
        assert_eq!(report.h1_dim, 0);
        assert_eq!(report.flagged_artifacts, 4);
        assert_eq!(report.h0_dim, 17);
    }

    #[test]
    fn rank_is_stable_under_smoothness_change() {
        for d in [-3i32, 0, 2] {
            let half = 2 * d.abs() + 6;
            let mut dims = Vec::new();
            let mut spectra = Vec::new();
            for class in [
                SmoothnessClass::SobolevWeight(1.0),
                SmoothnessClass::SobolevWeight(2.0),
            ] {
                let c = projective_line(d, class).unwrap();
                let op = assemble_coboundary(&c, &Truncation::projective(d, half)).unwrap();
                let report = cohomology_report(&op, TOL);
                dims.push((report.h0_dim, report.h1_dim));
                spectra.push(report.singular_values);
            }
            assert_eq!(dims[0], dims[1], "degree {d}");
            let diff: f64 = spectra[0]
                .iter()
                .zip(&spectra[1])
                .map(|(a, b)| (a - b).abs())
                .sum();
            if d != 0 {
                // Degree 0 pairs indices of equal modulus, so the weight
                // ratios cancel and the spectrum is genuinely unchanged.
                assert!(diff > 1e-6, "weights should move the spectrum, degree {d}");
            }
        }
    }

    #[test]
    fn covering_validation_catches_bad_data() {
        let shared = Annulus::new(0.9, 1.2).unwrap();
        let chart = |inner: f64, outer: f64| Chart {
            domain: Annulus::new(inner, outer).unwrap(),
            multiplicity: 1,
            smoothness: sobolev(),
        };
        let base_overlap = Overlap {
            left: 0,
            right: 1,
            domain: shared,
            multiplicity: 1,
            kind: TransitionKind::Concentric,
            factor: LaurentSeries::constant(shared, Complex64::ONE).unwrap(),
            cylinder: None,
        };
        let err = Covering::new(
            vec![chart(0.5, 1.2)],
            vec![base_overlap.clone()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownChart { .. }));

        let mut vanishing = base_overlap.clone();
        vanishing.factor = LaurentSeries::zero(shared, 0, 1).unwrap();
        let err = Covering::new(
            vec![chart(0.5, 1.2), chart(0.9, 2.0)],
            vec![vanishing],
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularTransitionFactor { .. }));

        let mut mismatched = base_overlap.clone();
        mismatched.multiplicity = 2;
        let err = Covering::new(
            vec![chart(0.5, 1.2), chart(0.9, 2.0)],
            vec![mismatched],
        )
        .unwrap_err();
        assert!(matches!(err, Error::MultiplicityMismatch { .. }));

        let mut outside = base_overlap;
        outside.domain = Annulus::new(0.3, 1.2).unwrap();
        let err = Covering::new(
            vec![chart(0.5, 1.2), chart(0.9, 2.0)],
            vec![outside],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotContained { .. }));
    }

    #[test]
    fn multiplicity_two_charts_stack_levels_independently() {
        let shared = Annulus::new(0.9, 1.2).unwrap();
        let mk = |inner: f64, outer: f64| Chart {
            domain: Annulus::new(inner, outer).unwrap(),
            multiplicity: 2,
            smoothness: sobolev(),
        };
        let c = Covering::new(
            vec![mk(0.5, 1.2), mk(0.9, 2.0)],
            vec![Overlap {
                left: 0,
                right: 1,
                domain: shared,
                multiplicity: 2,
                kind: TransitionKind::Concentric,
                factor: LaurentSeries::constant(shared, Complex64::ONE).unwrap(),
                cylinder: None,
            }],
        )
        .unwrap();
        let op = assemble_coboundary(&c, &Truncation::uniform(&c, 4)).unwrap();
        let report = cohomology_report(&op, TOL);
        assert_eq!(report.h0_dim, 2 * 9);
        assert_eq!(report.h1_dim, 0);
        // A level-1 section must not leak into level-0 overlap slots.
        let mut f = DVector::<Complex64>::zeros(op.source().total());
        f[op.source().slot(0, 1, 2)] = Complex64::ONE;
        let y = op.apply_raw(&f);
        assert_eq!(y[op.target().slot(0, 0, 2)], Complex64::default());
        assert_eq!(y[op.target().slot(0, 1, 2)], Complex64::ONE);
    }
}
