//! Affine contractions on `X^m`, crisp generalized IFS and their
//! Hutchinson-Barnsley operator on cell sets.
//!
//! Recurrences of degree `m` are fed newest-first: the window
//! `(K_k, ..., K_{k+m-1})` (oldest to newest) produces
//! `K_{k+m} = S(K_{k+m-1}, ..., K_k)`, so argument 0 of every map is the
//! most recent iterate.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CrispCellSet, DomainBox, Level};
use crate::metrics::hausdorff;

/// `phi(x_0, ..., x_{m-1}) = sum_i A_i x_i + b` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineContraction {
    dim: usize,
    /// `m` row-major `d x d` blocks.
    blocks: Vec<Vec<f64>>,
    offset: Vec<f64>,
    lambda: f64,
}

impl AffineContraction {
    pub fn new(blocks: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let dim = offset.len();
        let bad = |reason: String| Error::InvalidMap { index: 0, reason };
        if dim == 0 {
            return Err(bad("empty offset".into()));
        }
        if blocks.is_empty() {
            return Err(bad("degree must be at least 1".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != dim * dim {
                return Err(bad(format!(
                    "block {i} has {} entries, expected {} for dimension {dim}",
                    b.len(),
                    dim * dim
                )));
            }
        }
        if blocks
            .iter()
            .flatten()
            .chain(&offset)
            .any(|v| !v.is_finite())
        {
            return Err(bad("non-finite coefficient".into()));
        }
        let lambda = blocks.iter().map(|b| spectral_norm(b, dim)).sum();
        Ok(Self {
            dim,
            blocks,
            offset,
            lambda,
        })
    }

    /// One-dimensional map `x -> sum_i a_i x_i + b`.
    pub fn scalar(coeffs: &[f64], offset: f64) -> Result<Self> {
        Self::new(coeffs.iter().map(|&a| vec![a]).collect(), vec![offset])
    }

    pub fn degree(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Lipschitz bound `sum_i ||A_i||_2` with respect to the max metric on `X^m`.
    pub fn lip_bound(&self) -> f64 {
        self.lambda
    }

    /// True when block `i` is zero, so the map ignores argument `i`.
    pub fn is_inert(&self, i: usize) -> bool {
        self.blocks[i].iter().all(|&a| a == 0.0)
    }

    /// Adds `A_i x` to `acc`, summing each row left to right.
    pub(crate) fn accumulate(&self, i: usize, x: &[f64], acc: &mut [f64]) {
        let a = &self.blocks[i];
        for (r, slot) in acc.iter_mut().enumerate() {
            let row = &a[r * self.dim..(r + 1) * self.dim];
            let mut s = 0.0;
            for (aij, xj) in row.iter().zip(x) {
                s += aij * xj;
            }
            *slot += s;
        }
    }

    /// Evaluates the map at `points[0], ..., points[m-1]` into `out`.
    pub fn eval_into(&self, points: &[&[f64]], out: &mut [f64]) {
        out.copy_from_slice(&self.offset);
        for (i, x) in points.iter().enumerate() {
            self.accumulate(i, x, out);
        }
    }

    pub fn eval(&self, points: &[&[f64]]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(points, &mut out);
        out
    }

    /// The same map with one more, ignored, oldest argument.
    pub fn lift(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.push(vec![0.0; self.dim * self.dim]);
        Self {
            dim: self.dim,
            blocks,
            offset: self.offset.clone(),
            lambda: self.lambda,
        }
    }
}

fn spectral_norm(block: &[f64], dim: usize) -> f64 {
    if block.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    if dim == 1 {
        return block[0].abs();
    }
    DMatrix::from_row_slice(dim, dim, block)
        .singular_values()
        .max()
}

/// A generalized IFS of degree `m` on a grid: contractive affine maps `X^m -> X`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispGifs {
    domain: Arc<DomainBox>,
    degree: usize,
    maps: Vec<AffineContraction>,
}

impl CrispGifs {
    pub fn new(domain: Arc<DomainBox>, maps: Vec<AffineContraction>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidSystem("no maps".into()))?;
        let degree = first.degree();
        for (index, f) in maps.iter().enumerate() {
            if f.dim() != domain.dim() {
                return Err(Error::InvalidMap {
                    index,
                    reason: format!("acts on R^{}, domain is R^{}", f.dim(), domain.dim()),
                });
            }
            if f.degree() != degree {
                return Err(Error::InvalidMap {
                    index,
                    reason: format!("degree {}, map 0 has degree {degree}", f.degree()),
                });
            }
            if f.lip_bound() >= 1.0 {
                return Err(Error::NotContractive {
                    index,
                    lambda: f.lip_bound(),
                });
            }
        }
        Ok(Self {
            domain,
            degree,
            maps,
        })
    }

    pub fn domain(&self) -> &Arc<DomainBox> {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn maps(&self) -> &[AffineContraction] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `max_j Lip(phi_j)`.
    pub fn lambda(&self) -> f64 {
        self.maps.iter().map(|f| f.lip_bound()).fold(0.0, f64::max)
    }

    /// The system restricted to the maps with the given indices.
    pub fn subsystem(&self, indices: &[usize]) -> Result<Self> {
        let maps = indices.iter().map(|&j| self.maps[j].clone()).collect();
        Self::new(self.domain.clone(), maps)
    }

    /// Every map lifted to degree `m + 1`.
    pub fn lift(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            degree: self.degree + 1,
            maps: self.maps.iter().map(|f| f.lift()).collect(),
        }
    }
}

/// Walks every tuple of `lists[0] x ... x lists[m-1]`, rounding its image
/// under `f` to a cell. Each entry carries a level; the visitor receives the
/// image cell and the minimum level along the tuple. Returns how many
/// images fell outside a non-wrapping box.
///
/// Partial sums are shared between tuples with a common prefix; the result
/// is bit-identical to [`AffineContraction::eval`] because every coordinate
/// is added in the same order.
pub(crate) fn push_tuples(
    f: &AffineContraction,
    domain: &DomainBox,
    lists: &[&[(usize, Level)]],
    mut visit: impl FnMut(usize, Level),
) -> usize {
    let m = lists.len();
    let d = f.dim();
    if lists.iter().any(|l| l.is_empty()) {
        return 0;
    }
    // A_i x_c for every listed cell
    let mut center = vec![0.0; d];
    let contribs: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut out = vec![0.0; lists[i].len() * d];
            for (p, &(c, _)) in lists[i].iter().enumerate() {
                domain.center_into(c, &mut center);
                f.accumulate(i, &center, &mut out[p * d..(p + 1) * d]);
            }
            out
        })
        .collect();
    let mut acc = vec![0.0; (m + 1) * d];
    acc[..d].copy_from_slice(f.offset());
    let mut mins = vec![Level::MAX; m + 1];
    let mut pos = vec![0usize; m];
    let mut clamped = 0;
    let mut depth = 0;
    loop {
        if depth == m {
            let (cell, out) = domain.nearest_cell(&acc[m * d..]);
            clamped += out as usize;
            visit(cell, mins[m]);
            // next tuple: advance the deepest coordinate that has room
            loop {
                if depth == 0 {
                    return clamped;
                }
                depth -= 1;
                pos[depth] += 1;
                if pos[depth] < lists[depth].len() {
                    break;
                }
                pos[depth] = 0;
            }
        }
        let p = pos[depth];
        let (prev, next) = acc.split_at_mut((depth + 1) * d);
        let base = &prev[depth * d..];
        let add = &contribs[depth][p * d..(p + 1) * d];
        for k in 0..d {
            next[k] = base[k] + add[k];
        }
        mins[depth + 1] = mins[depth].min(lists[depth][p].1);
        depth += 1;
    }
}

/// Image cells of a product of cell sets and the number of clamped images.
#[derive(Debug, Clone, PartialEq)]
pub struct MapImage {
    pub cells: CrispCellSet,
    pub clamped: usize,
}

fn check_operands(degree: usize, sets: &[CrispCellSet]) -> Result<Arc<DomainBox>> {
    if sets.len() != degree {
        return Err(Error::Mismatch(format!(
            "{} operands for a map of degree {degree}",
            sets.len()
        )));
    }
    let domain = sets[0].domain().clone();
    for s in sets {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if **s.domain() != *domain {
            return Err(Error::Mismatch("operands on different domains".into()));
        }
    }
    Ok(domain)
}

/// Marks `phi(C_0 x ... x C_{m-1})` in `mask`; inert arguments contribute a
/// single representative. Empty operands give an empty image.
pub(crate) fn mark_image(
    f: &AffineContraction,
    domain: &DomainBox,
    sets: &[&CrispCellSet],
    mask: &mut [bool],
) -> usize {
    if sets.iter().any(|s| s.is_empty()) {
        return 0;
    }
    let lists: Vec<Vec<(usize, Level)>> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if f.is_inert(i) {
                vec![(s.cells()[0], 0)]
            } else {
                s.cells().iter().map(|&c| (c, 0)).collect()
            }
        })
        .collect();
    let refs: Vec<&[(usize, Level)]> = lists.iter().map(|l| l.as_slice()).collect();
    push_tuples(f, domain, &refs, |c, _| mask[c] = true)
}

/// `{ nearest cell of f(x_{c_0}, ..., x_{c_{m-1}}) : c_i in C_i }`.
pub fn map_cellset(f: &AffineContraction, sets: &[CrispCellSet]) -> Result<MapImage> {
    let domain = check_operands(f.degree(), sets)?;
    if f.dim() != domain.dim() {
        return Err(Error::Mismatch("map and domain dimensions differ".into()));
    }
    let mut mask = vec![false; domain.len()];
    let refs: Vec<&CrispCellSet> = sets.iter().collect();
    let clamped = mark_image(f, &domain, &refs, &mut mask);
    Ok(MapImage {
        cells: CrispCellSet::from_mask(domain, &mask),
        clamped,
    })
}

/// `S(K_0, ..., K_{m-1}) = union_j phi_j(K_0 x ... x K_{m-1})`.
pub fn ghb_apply(sys: &CrispGifs, sets: &[CrispCellSet]) -> Result<MapImage> {
    let domain = check_operands(sys.degree(), sets)?;
    if *domain != **sys.domain() {
        return Err(Error::Mismatch(
            "operands and system on different domains".into(),
        ));
    }
    let refs: Vec<&CrispCellSet> = sets.iter().collect();
    let (mask, clamped) = sys
        .maps()
        .par_iter()
        .map(|f| {
            let mut mask = vec![false; domain.len()];
            let clamped = mark_image(f, &domain, &refs, &mut mask);
            (mask, clamped)
        })
        .reduce(
            || (vec![false; domain.len()], 0),
            |(mut a, ca), (b, cb)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x |= y;
                }
                (a, ca + cb)
            },
        );
    Ok(MapImage {
        cells: CrispCellSet::from_mask(domain, &mask),
        clamped,
    })
}

/// Stopping rules shared by the crisp and fuzzy drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub max_iter: usize,
    /// Stop once the window-to-window change is at most `tol`. Zero means
    /// only an exact fixed point stops the run.
    pub tol: f64,
    /// Keep every iterate, seeds included, in the run.
    pub record_history: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 0.0,
            record_history: false,
        }
    }
}

pub(crate) struct Drive<S> {
    pub last: S,
    pub iterations: usize,
    pub decay: Vec<f64>,
    pub converged: bool,
    pub exact: bool,
    pub cycle: Option<usize>,
    pub history: Vec<S>,
}

pub(crate) fn fingerprint<T: Hash + ?Sized>(items: &[&T]) -> u64 {
    let mut h = DefaultHasher::new();
    for x in items {
        x.hash(&mut h);
    }
    h.finish()
}

/// Runs `x_{k+m} = step(x_{k+m-1}, ..., x_k)` from `seeds` (oldest first).
///
/// Stops when the newest iterate equals the whole window (an exact fixed
/// point), when a window repeats (a lattice cycle, reported as unconverged),
/// when the change drops to `tol > 0`, or at `max_iter`.
pub(crate) fn drive<S: Clone + PartialEq>(
    seeds: &[S],
    opts: &RunOptions,
    mut step: impl FnMut(&[&S]) -> Result<S>,
    dist: impl Fn(&S, &S) -> Result<f64>,
    key: impl Fn(&S) -> u64,
) -> Result<Drive<S>> {
    let m = seeds.len();
    let mut window: VecDeque<S> = seeds.iter().cloned().collect();
    let mut history: Vec<S> = if opts.record_history {
        seeds.to_vec()
    } else {
        Vec::new()
    };
    let mut diffs: VecDeque<f64> = VecDeque::new();
    for w in seeds.windows(2) {
        diffs.push_back(dist(&w[1], &w[0])?);
    }
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let window_key = |w: &VecDeque<S>| {
        let keys: Vec<u64> = w.iter().map(&key).collect();
        fingerprint(&[keys.as_slice()])
    };
    seen.insert(window_key(&window), 0);
    let mut decay = Vec::new();
    for k in 1..=opts.max_iter {
        let args: Vec<&S> = window.iter().rev().collect();
        let next = step(&args)?;
        let newest = window.back().expect("degree is positive");
        diffs.push_back(dist(&next, newest)?);
        while diffs.len() > m {
            diffs.pop_front();
        }
        let change = diffs.iter().copied().fold(0.0, f64::max);
        decay.push(change);
        let exact = window.iter().all(|w| *w == next);
        window.pop_front();
        window.push_back(next.clone());
        if opts.record_history {
            history.push(next.clone());
        }
        if exact || (opts.tol > 0.0 && change <= opts.tol) {
            return Ok(Drive {
                last: next,
                iterations: k,
                decay,
                converged: true,
                exact,
                cycle: None,
                history,
            });
        }
        if let Some(prev) = seen.insert(window_key(&window), k) {
            return Ok(Drive {
                last: next,
                iterations: k,
                decay,
                converged: false,
                exact: false,
                cycle: Some(k - prev),
                history,
            });
        }
    }
    Ok(Drive {
        last: window.back().expect("degree is positive").clone(),
        iterations: opts.max_iter,
        decay,
        converged: false,
        exact: false,
        cycle: None,
        history,
    })
}

/// Outcome of [`crisp_attractor`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrispRun {
    pub attractor: CrispCellSet,
    pub iterations: usize,
    /// Hausdorff change between successive windows.
    pub decay: Vec<f64>,
    pub converged: bool,
    pub collapsed_exact: bool,
    /// Period of a detected lattice cycle.
    pub cycle: Option<usize>,
    /// Images that fell outside the box and were clamped.
    pub clamped: usize,
    pub history: Vec<CrispCellSet>,
}

/// The full box, `m` times.
pub fn full_seeds(sys: &CrispGifs) -> Vec<CrispCellSet> {
    vec![CrispCellSet::full(sys.domain().clone()); sys.degree()]
}

/// Iterates the GHB recurrence from `seeds` (oldest first).
///
/// Starting from the full box the iterates decrease, so the run always ends
/// on an exact fixed point.
pub fn crisp_attractor(
    sys: &CrispGifs,
    seeds: &[CrispCellSet],
    opts: &RunOptions,
) -> Result<CrispRun> {
    if seeds.len() != sys.degree() {
        return Err(Error::Mismatch(format!(
            "{} seeds for a system of degree {}",
            seeds.len(),
            sys.degree()
        )));
    }
    let mut clamped = 0;
    let out = drive(
        seeds,
        opts,
        |args| {
            let owned: Vec<CrispCellSet> = args.iter().map(|s| (*s).clone()).collect();
            let image = ghb_apply(sys, &owned)?;
            clamped += image.clamped;
            Ok(image.cells)
        },
        |a, b| hausdorff(a, b).map(|h| h.value),
        |s| fingerprint(&[s.cells()]),
    )?;
    Ok(CrispRun {
        attractor: out.last,
        iterations: out.iterations,
        decay: out.decay,
        converged: out.converged,
        collapsed_exact: out.exact,
        cycle: out.cycle,
        clamped,
        history: out.history,
    })
}
