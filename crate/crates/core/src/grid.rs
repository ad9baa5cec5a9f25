//! Discretized fuzzy sets on uniform grids.
//!
//! A [`DomainBox`] is a box in `R^d` split into `N_0 x ... x N_{d-1}` cells.
//! Points of the underlying metric space are the cell centers; the distance
//! between two cells is the Euclidean distance between their centers (or the
//! torus distance when the box wraps around).
//!
//! A [`FuzzyGrid`] assigns each cell a quantized membership level
//! `0..=L`, the membership degree being `level / L`. Cuts of a grid are
//! [`CrispCellSet`]s. Cartesian products of grids are kept lazy in
//! [`FuzzyGridProduct`].

use std::sync::Arc;

use crate::error::{Error, Result};

/// A quantized membership level. Membership degree is `level / L`.
pub type Level = u16;

/// Grey quantization used when nothing else is specified.
pub const DEFAULT_LEVELS: Level = 255;

/// A uniform grid over an axis-aligned box.
///
/// Linear cell indices are row-major with axis 0 varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    cells: Vec<usize>,
    widths: Vec<f64>,
    strides: Vec<usize>,
    len: usize,
    wrap: bool,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        let dim = cells.len();
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be positive".into()));
        }
        if lo.len() != dim || hi.len() != dim {
            return Err(Error::InvalidDomain(format!(
                "expected {dim} bounds per side, got lo={} hi={}",
                lo.len(),
                hi.len()
            )));
        }
        let mut widths = Vec::with_capacity(dim);
        let mut strides = Vec::with_capacity(dim);
        let mut len = 1usize;
        for k in 0..dim {
            if cells[k] == 0 {
                return Err(Error::InvalidDomain(format!("axis {k} has no cells")));
            }
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] < hi[k]) {
                return Err(Error::InvalidDomain(format!(
                    "axis {k}: need lo < hi, got [{}, {}]",
                    lo[k], hi[k]
                )));
            }
            widths.push((hi[k] - lo[k]) / cells[k] as f64);
            strides.push(len);
            len = len
                .checked_mul(cells[k])
                .ok_or_else(|| Error::InvalidDomain("too many cells".into()))?;
        }
        Ok(Self {
            lo,
            hi,
            cells,
            widths,
            strides,
            len,
            wrap: false,
        })
    }

    /// `[0, 1]` split into `cells` cells.
    pub fn unit_interval(cells: usize) -> Result<Self> {
        Self::new(vec![0.0], vec![1.0], vec![cells])
    }

    /// `[0, 1]^2` split into `nx x ny` cells.
    pub fn unit_square(nx: usize, ny: usize) -> Result<Self> {
        Self::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![nx, ny])
    }

    /// Identify opposite faces of the box (points are taken modulo the box).
    pub fn with_wrap(mut self, wrap: bool) -> Self {
        self.wrap = wrap;
        self
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn wrap(&self) -> bool {
        self.wrap
    }

    /// True when every axis has the same cell width.
    pub fn is_isotropic(&self) -> bool {
        self.widths.iter().all(|w| *w == self.widths[0])
    }

    /// Length of one cell diagonal, the unit of every discretization slack.
    pub fn cell_diagonal(&self) -> f64 {
        self.widths.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Diameter of the set of cell centers.
    pub fn diameter(&self) -> f64 {
        let far: Vec<usize> = self.cells.iter().map(|n| n - 1).collect();
        self.cell_distance(0, self.linear_index(&far))
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn axis_index(&self, cell: usize, axis: usize) -> usize {
        (cell / self.strides[axis]) % self.cells[axis]
    }

    pub fn multi_index(&self, cell: usize) -> Vec<usize> {
        (0..self.dim()).map(|k| self.axis_index(cell, k)).collect()
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.center_into(cell, &mut out);
        out
    }

    pub fn center_into(&self, cell: usize, out: &mut [f64]) {
        for (k, slot) in out.iter_mut().enumerate() {
            let i = self.axis_index(cell, k);
            *slot = self.lo[k] + (i as f64 + 0.5) * self.widths[k];
        }
    }

    /// Cell whose center is nearest to `p`; ties go to the lower index.
    ///
    /// Points outside the box are wrapped when the box wraps and clamped
    /// otherwise. The flag reports whether clamping happened.
    pub fn nearest_cell(&self, p: &[f64]) -> (usize, bool) {
        let mut cell = 0usize;
        let mut clamped = false;
        for k in 0..self.dim() {
            let n = self.cells[k] as i64;
            let mut x = p[k];
            if self.wrap {
                let span = self.hi[k] - self.lo[k];
                x = self.lo[k] + (x - self.lo[k]).rem_euclid(span);
            } else if x < self.lo[k] || x > self.hi[k] || x.is_nan() {
                clamped = true;
            }
            let t = (x - self.lo[k]) / self.widths[k] - 0.5;
            let raw = (t - 0.5).ceil();
            let i = if raw.is_nan() {
                0
            } else if self.wrap {
                // x = lo ties between cell 0 and, across the seam, cell n - 1
                (raw as i64).clamp(0, n - 1)
            } else {
                (raw as i64).clamp(0, n - 1)
            };
            cell += i as usize * self.strides[k];
        }
        (cell, clamped)
    }

    /// Per-axis index offset between two cells, shortest way round on wrapped boxes.
    pub fn axis_offset(&self, a: usize, b: usize, axis: usize) -> usize {
        let i = self.axis_index(a, axis);
        let j = self.axis_index(b, axis);
        let d = i.abs_diff(j);
        if self.wrap {
            d.min(self.cells[axis] - d)
        } else {
            d
        }
    }

    /// Distance between two cell centers.
    ///
    /// On isotropic boxes this is `w * sqrt(n)` with `n` the integer squared
    /// index offset, which lets the distance transform reproduce it bit for bit.
    pub fn cell_distance(&self, a: usize, b: usize) -> f64 {
        if self.is_isotropic() {
            let n: u64 = (0..self.dim())
                .map(|k| {
                    let d = self.axis_offset(a, b, k) as u64;
                    d * d
                })
                .sum();
            self.distance_from_index_sq(n)
        } else {
            (0..self.dim())
                .map(|k| {
                    let d = self.axis_offset(a, b, k) as f64 * self.widths[k];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        }
    }

    /// Distance for a squared index offset on an isotropic box.
    pub(crate) fn distance_from_index_sq(&self, n: u64) -> f64 {
        self.widths[0] * (n as f64).sqrt()
    }
}

fn same_domain(a: &Arc<DomainBox>, b: &Arc<DomainBox>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A finite nonempty-or-empty set of cells, kept sorted.
#[derive(Debug, Clone)]
pub struct CrispCellSet {
    domain: Arc<DomainBox>,
    cells: Vec<usize>,
}

impl PartialEq for CrispCellSet {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && same_domain(&self.domain, &other.domain)
    }
}

impl Eq for CrispCellSet {}

impl CrispCellSet {
    pub fn new(domain: Arc<DomainBox>, mut cells: Vec<usize>) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        if let Some(&last) = cells.last() {
            if last >= domain.len() {
                return Err(Error::CellOutOfRange {
                    index: last,
                    len: domain.len(),
                });
            }
        }
        Ok(Self { domain, cells })
    }

    pub fn empty(domain: Arc<DomainBox>) -> Self {
        Self {
            domain,
            cells: Vec::new(),
        }
    }

    pub fn full(domain: Arc<DomainBox>) -> Self {
        let cells = (0..domain.len()).collect();
        Self { domain, cells }
    }

    pub fn from_mask(domain: Arc<DomainBox>, mask: &[bool]) -> Self {
        debug_assert_eq!(mask.len(), domain.len());
        let cells = mask
            .iter()
            .enumerate()
            .filter_map(|(c, &m)| m.then_some(c))
            .collect();
        Self { domain, cells }
    }

    pub fn domain(&self) -> &Arc<DomainBox> {
        &self.domain
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.domain.len()];
        for &c in &self.cells {
            mask[c] = true;
        }
        mask
    }

    pub fn is_subset(&self, other: &CrispCellSet) -> bool {
        let mut it = other.cells.iter().peekable();
        'outer: for &c in &self.cells {
            while let Some(&&o) = it.peek() {
                if o == c {
                    it.next();
                    continue 'outer;
                }
                if o > c {
                    return false;
                }
                it.next();
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &CrispCellSet) -> CrispCellSet {
        let mut cells = Vec::with_capacity(self.cells.len() + other.cells.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.cells, &other.cells);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    cells.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    cells.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    cells.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        cells.extend_from_slice(&a[i..]);
        cells.extend_from_slice(&b[j..]);
        CrispCellSet {
            domain: self.domain.clone(),
            cells,
        }
    }

    /// Characteristic function of the set. Rejects the empty set, which is
    /// not a normal fuzzy set.
    pub fn indicator(&self, levels: Level) -> Result<FuzzyGrid> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut values = vec![0; self.domain.len()];
        for &c in &self.cells {
            values[c] = levels;
        }
        FuzzyGrid::new(self.domain.clone(), levels, values)
    }
}

/// A quantized membership function on the cells of a [`DomainBox`].
#[derive(Debug, Clone)]
pub struct FuzzyGrid {
    domain: Arc<DomainBox>,
    levels: Level,
    values: Vec<Level>,
}

impl PartialEq for FuzzyGrid {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
            && self.values == other.values
            && same_domain(&self.domain, &other.domain)
    }
}

impl Eq for FuzzyGrid {}

impl FuzzyGrid {
    /// A normal fuzzy set. Fails if no cell reaches level `levels`.
    pub fn new(domain: Arc<DomainBox>, levels: Level, values: Vec<Level>) -> Result<Self> {
        let grid = Self::from_values(domain, levels, values)?;
        if !grid.is_normal() {
            return Err(Error::NotNormal);
        }
        Ok(grid)
    }

    /// Any membership function on the grid, normal or not.
    pub fn from_values(domain: Arc<DomainBox>, levels: Level, values: Vec<Level>) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidDomain("levels must be positive".into()));
        }
        if values.len() != domain.len() {
            return Err(Error::Mismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                domain.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v > levels) {
            return Err(Error::LevelOutOfRange {
                level: v as u32,
                levels,
            });
        }
        Ok(Self {
            domain,
            levels,
            values,
        })
    }

    /// The universe `u = 1`.
    pub fn universe(domain: Arc<DomainBox>, levels: Level) -> Self {
        let values = vec![levels; domain.len()];
        Self {
            domain,
            levels,
            values,
        }
    }

    pub fn zeros(domain: Arc<DomainBox>, levels: Level) -> Self {
        let values = vec![0; domain.len()];
        Self {
            domain,
            levels,
            values,
        }
    }

    pub fn domain(&self) -> &Arc<DomainBox> {
        &self.domain
    }

    pub fn levels(&self) -> Level {
        self.levels
    }

    pub fn values(&self) -> &[Level] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Level> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn level(&self, cell: usize) -> Level {
        self.values[cell]
    }

    pub fn membership(&self, cell: usize) -> f64 {
        self.values[cell] as f64 / self.levels as f64
    }

    pub fn max_level(&self) -> Level {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn is_normal(&self) -> bool {
        self.values.contains(&self.levels)
    }

    pub fn is_crisp(&self) -> bool {
        self.values.iter().all(|&v| v == 0 || v == self.levels)
    }

    /// Cellwise `self <= other`.
    pub fn le(&self, other: &FuzzyGrid) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn compatible(&self, other: &FuzzyGrid) -> Result<()> {
        if self.levels != other.levels {
            return Err(Error::Mismatch(format!(
                "levels {} vs {}",
                self.levels, other.levels
            )));
        }
        if !same_domain(&self.domain, &other.domain) {
            return Err(Error::Mismatch("different domains".into()));
        }
        Ok(())
    }

    /// `[u]^l` for a level `l`: cells with level `>= l`, or the support
    /// when `l = 0`. Closure is the identity on a finite grid.
    pub fn alpha_cut(&self, level: Level) -> CrispCellSet {
        let cells = if level == 0 {
            self.values
                .iter()
                .enumerate()
                .filter_map(|(c, &v)| (v > 0).then_some(c))
                .collect()
        } else {
            self.values
                .iter()
                .enumerate()
                .filter_map(|(c, &v)| (v >= level).then_some(c))
                .collect()
        };
        CrispCellSet {
            domain: self.domain.clone(),
            cells,
        }
    }

    /// `[u]^alpha` for a real threshold, which must sit on the lattice `k / L`.
    pub fn alpha_cut_at(&self, alpha: f64) -> Result<CrispCellSet> {
        let level = lattice_level(alpha, self.levels)?;
        Ok(self.alpha_cut(level))
    }

    pub fn support(&self) -> CrispCellSet {
        self.alpha_cut(0)
    }

    /// Cellwise maximum.
    pub fn join(&self, other: &FuzzyGrid) -> Result<FuzzyGrid> {
        self.compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a.max(b))
            .collect();
        Ok(FuzzyGrid {
            domain: self.domain.clone(),
            levels: self.levels,
            values,
        })
    }

    /// Cuts at levels `1..=L`; element `i` is the cut at level `i + 1`.
    pub fn cut_stack(&self) -> Vec<CrispCellSet> {
        (1..=self.levels).map(|l| self.alpha_cut(l)).collect()
    }

    /// Sorted distinct positive levels present in the grid.
    pub fn present_levels(&self) -> Vec<Level> {
        let mut seen = vec![false; self.levels as usize + 1];
        for &v in &self.values {
            seen[v as usize] = true;
        }
        (1..=self.levels).filter(|&l| seen[l as usize]).collect()
    }
}

/// Converts a real threshold to a lattice level, rejecting thresholds that
/// are not multiples of `1 / L`.
pub fn lattice_level(alpha: f64, levels: Level) -> Result<Level> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OffLattice(alpha));
    }
    let scaled = alpha * levels as f64;
    let rounded = scaled.round();
    if (scaled - rounded).abs() > 1e-9 * levels as f64 {
        return Err(Error::OffLattice(alpha));
    }
    Ok(rounded as Level)
}

/// Rebuilds a fuzzy set from its cuts at levels `1..=L` (element `i` is the
/// cut at level `i + 1`). The stack must be nonincreasing and its top cut
/// nonempty.
pub fn reconstruct_from_cuts(
    domain: Arc<DomainBox>,
    levels: Level,
    cuts: &[CrispCellSet],
) -> Result<FuzzyGrid> {
    if cuts.len() != levels as usize {
        return Err(Error::Mismatch(format!(
            "{} cuts for {} levels",
            cuts.len(),
            levels
        )));
    }
    for (i, cut) in cuts.iter().enumerate() {
        if !same_domain(cut.domain(), &domain) {
            return Err(Error::Mismatch(format!("cut {} on another domain", i + 1)));
        }
    }
    for i in 1..cuts.len() {
        if !cuts[i].is_subset(&cuts[i - 1]) {
            return Err(Error::NotNested {
                level: i + 1,
                below: i,
            });
        }
    }
    let mut values = vec![0 as Level; domain.len()];
    for (i, cut) in cuts.iter().enumerate() {
        let level = (i + 1) as Level;
        for &c in cut.cells() {
            values[c] = level;
        }
    }
    FuzzyGrid::new(domain, levels, values)
}

/// Lazy Cartesian product `u_0 x ... x u_{m-1}` with membership
/// `min_i u_i(x_i)`.
#[derive(Debug, Clone)]
pub struct FuzzyGridProduct {
    factors: Vec<FuzzyGrid>,
}

/// Product of cell sets `C_0 x ... x C_{m-1}`, not materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductCellSet {
    factors: Vec<CrispCellSet>,
}

pub fn cartesian_product(factors: &[FuzzyGrid]) -> Result<FuzzyGridProduct> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Mismatch("empty product".into()))?;
    for f in &factors[1..] {
        first.compatible(f)?;
    }
    Ok(FuzzyGridProduct {
        factors: factors.to_vec(),
    })
}

impl FuzzyGridProduct {
    pub fn factors(&self) -> &[FuzzyGrid] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn levels(&self) -> Level {
        self.factors[0].levels()
    }

    pub fn membership(&self, tuple: &[usize]) -> Level {
        self.factors
            .iter()
            .zip(tuple)
            .map(|(f, &c)| f.level(c))
            .min()
            .unwrap_or(0)
    }

    /// Cut of the product, expressed as the product of the factor cuts.
    pub fn alpha_cut(&self, level: Level) -> ProductCellSet {
        ProductCellSet {
            factors: self.factors.iter().map(|f| f.alpha_cut(level)).collect(),
        }
    }

    /// Cut of the product by direct evaluation of the membership at every tuple.
    pub fn alpha_cut_enumerated(&self, level: Level) -> Vec<Vec<usize>> {
        let lists: Vec<Vec<usize>> = self
            .factors
            .iter()
            .map(|f| (0..f.len()).collect())
            .collect();
        let refs: Vec<&[usize]> = lists.iter().map(|l| l.as_slice()).collect();
        let mut out = Vec::new();
        for_each_tuple(&refs, |t| {
            let m = self.membership(t);
            let inside = if level == 0 { m > 0 } else { m >= level };
            if inside {
                out.push(t.to_vec());
            }
        });
        out
    }

    pub fn is_normal(&self) -> bool {
        self.normal_witness().is_some()
    }

    /// A tuple at which the product reaches the top level, built from the
    /// per-factor argmax cells.
    pub fn normal_witness(&self) -> Option<Vec<usize>> {
        let top = self.levels();
        self.factors
            .iter()
            .map(|f| f.values().iter().position(|&v| v == top))
            .collect()
    }
}

impl ProductCellSet {
    pub fn factors(&self) -> &[CrispCellSet] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.iter().any(|f| f.is_empty())
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.factors.iter().zip(tuple).all(|(f, &c)| f.contains(c))
    }

    /// All tuples in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let refs: Vec<&[usize]> = self.factors.iter().map(|f| f.cells()).collect();
        let mut out = Vec::new();
        for_each_tuple(&refs, |t| out.push(t.to_vec()));
        out
    }
}

/// Calls `f` on every tuple of `lists[0] x ... x lists[m-1]`, last
/// coordinate varying fastest.
pub(crate) fn for_each_tuple(lists: &[&[usize]], mut f: impl FnMut(&[usize])) {
    if lists.is_empty() || lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let m = lists.len();
    let mut pos = vec![0usize; m];
    let mut tuple: Vec<usize> = lists.iter().map(|l| l[0]).collect();
    loop {
        f(&tuple);
        let mut k = m;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < lists[k].len() {
                tuple[k] = lists[k][pos[k]];
                break;
            }
            pos[k] = 0;
            tuple[k] = lists[k][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Arc<DomainBox> {
        Arc::new(DomainBox::unit_interval(n).unwrap())
    }

    fn grid(values: &[Level]) -> FuzzyGrid {
        FuzzyGrid::from_values(line(values.len()), 255, values.to_vec()).unwrap()
    }

    #[test]
    fn box_rejects_degenerate_axes() {
        assert!(DomainBox::new(vec![0.0], vec![0.0], vec![4]).is_err());
        assert!(DomainBox::new(vec![0.0], vec![1.0], vec![0]).is_err());
        assert!(DomainBox::new(vec![0.0, 0.0], vec![1.0], vec![4, 4]).is_err());
    }

    #[test]
    fn centers_and_indices_are_bijective() {
        let b = DomainBox::new(vec![-1.0, 0.0], vec![1.0, 3.0], vec![4, 3]).unwrap();
        for c in 0..b.len() {
            let idx = b.multi_index(c);
            assert_eq!(b.linear_index(&idx), c);
            let (back, clamped) = b.nearest_cell(&b.center(c));
            assert_eq!(back, c);
            assert!(!clamped);
        }
    }

    #[test]
    fn nearest_cell_breaks_ties_low_and_clamps() {
        let b = DomainBox::unit_interval(4).unwrap();
        // centers at 0.125, 0.375, ...; 0.25 is equidistant to cells 0 and 1
        assert_eq!(b.nearest_cell(&[0.25]), (0, false));
        assert_eq!(b.nearest_cell(&[0.26]), (1, false));
        assert_eq!(b.nearest_cell(&[1.7]), (3, true));
        assert_eq!(b.nearest_cell(&[-0.2]), (0, true));
        let w = b.clone().with_wrap(true);
        assert_eq!(w.nearest_cell(&[1.1]), (0, false));
        assert_eq!(w.nearest_cell(&[-0.1]), (3, false));
        // the seam point ties cells 0 and 3; the lower index wins
        assert_eq!(w.nearest_cell(&[0.0]), (0, false));
        assert_eq!(w.nearest_cell(&[1.0]), (0, false));
    }

    #[test]
    fn wrapped_distance_goes_the_short_way() {
        let b = DomainBox::unit_interval(8).unwrap().with_wrap(true);
        assert_eq!(b.cell_distance(0, 7), 0.125);
        assert_eq!(b.cell_distance(0, 4), 0.5);
    }

    #[test]
    fn alpha_cut_examples() {
        let u = grid(&[51, 255, 153]);
        assert_eq!(u.alpha_cut(153).cells(), &[1, 2]);
        assert_eq!(u.alpha_cut_at(0.6).unwrap().cells(), &[1, 2]);
        assert_eq!(u.alpha_cut(0).cells(), &[0, 1, 2]);
        assert!(!u.alpha_cut(255).is_empty());
        assert!(matches!(u.alpha_cut_at(0.5), Err(Error::OffLattice(_))));
    }

    #[test]
    fn indicator_examples() {
        let d = line(8);
        let k = CrispCellSet::new(d.clone(), vec![5]).unwrap();
        let chi = k.indicator(255).unwrap();
        assert_eq!(chi.level(5), 255);
        assert_eq!(chi.values().iter().filter(|&&v| v > 0).count(), 1);
        assert_eq!(chi.alpha_cut(255), k);
        assert_eq!(chi.alpha_cut(0), k);
        assert_eq!(CrispCellSet::empty(d).indicator(255), Err(Error::EmptySet));
    }

    #[test]
    fn normality_is_checked_not_repaired() {
        assert_eq!(
            FuzzyGrid::new(line(2), 255, vec![3, 7]),
            Err(Error::NotNormal)
        );
        assert!(FuzzyGrid::from_values(line(2), 255, vec![3, 256]).is_err());
    }

    #[test]
    fn join_examples() {
        let u = grid(&[10, 200]);
        let v = grid(&[30, 100]);
        let j = u.join(&v).unwrap();
        assert_eq!(j.values(), &[30, 200]);
        assert_eq!(u.join(&u).unwrap(), u);
        let lhs = j.alpha_cut(30);
        let rhs = u.alpha_cut(30).union(&v.alpha_cut(30));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.cells(), &[0, 1]);
        assert_eq!(j.alpha_cut(100).cells(), &[1]);
        let other = FuzzyGrid::from_values(line(3), 255, vec![0, 0, 0]).unwrap();
        assert!(u.join(&other).is_err());
    }

    #[test]
    fn product_examples() {
        let u = FuzzyGrid::new(line(2), 255, vec![255, 0]).unwrap();
        let v = FuzzyGrid::new(line(2), 255, vec![0, 255]).unwrap();
        let p = cartesian_product(&[u.clone(), v.clone()]).unwrap();
        assert_eq!(p.membership(&[0, 1]), 255);
        assert_eq!(p.membership(&[0, 0]), 0);
        assert_eq!(p.alpha_cut(255).tuples(), p.alpha_cut_enumerated(255));
        assert_eq!(p.normal_witness(), Some(vec![0, 1]));
        let w = FuzzyGrid::new(line(3), 255, vec![255, 0, 0]).unwrap();
        assert!(cartesian_product(&[u, w]).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        let d = line(2);
        let both = CrispCellSet::new(d.clone(), vec![0, 1]).unwrap();
        let first = CrispCellSet::new(d.clone(), vec![0]).unwrap();
        let cuts: Vec<CrispCellSet> = (1..=255)
            .map(|l| {
                if l <= 127 {
                    both.clone()
                } else {
                    first.clone()
                }
            })
            .collect();
        let u = reconstruct_from_cuts(d.clone(), 255, &cuts).unwrap();
        assert_eq!(u.values(), &[255, 127]);

        let crisp: Vec<CrispCellSet> = (1..=255).map(|_| both.clone()).collect();
        assert_eq!(
            reconstruct_from_cuts(d.clone(), 255, &crisp).unwrap(),
            both.indicator(255).unwrap()
        );

        let mut bad = cuts.clone();
        bad[10] = first.clone();
        bad[11] = both.clone();
        assert!(matches!(
            reconstruct_from_cuts(d, 255, &bad),
            Err(Error::NotNested {
                level: 12,
                below: 11
            })
        ));
    }

    #[test]
    fn subset_and_union() {
        let d = line(10);
        let a = CrispCellSet::new(d.clone(), vec![1, 3, 5]).unwrap();
        let b = CrispCellSet::new(d.clone(), vec![0, 1, 2, 3, 5, 9]).unwrap();
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert_eq!(a.union(&b), b);
        assert!(CrispCellSet::empty(d).is_subset(&a));
    }

    #[test]
    fn tuple_enumeration_order() {
        let mut seen = Vec::new();
        for_each_tuple(&[&[0, 1], &[5, 6, 7]], |t| seen.push(t.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 5]);
        assert_eq!(seen[1], vec![0, 6]);
        assert_eq!(seen[5], vec![1, 7]);
    }
}
