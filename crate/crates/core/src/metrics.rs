//! Hausdorff distance between cell sets and the `d_infty` metric on fuzzy grids.
//!
//! Two Hausdorff routes are provided: the brute-force double loop and a
//! route through an exact squared Euclidean distance transform of the
//! target set (integer arithmetic, so both agree bit for bit). The automatic
//! entry point [`hausdorff`] picks the transform once `|A| * |B|` exceeds
//! [`EDT_THRESHOLD`], or [`EDT_GRID_FACTOR`] times the grid size if that is
//! smaller, and the box allows it (isotropic, not wrapped).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CrispCellSet, DomainBox, FuzzyGrid, FuzzyGridProduct, Level, ProductCellSet};

/// `|A| * |B|` above which the distance transform route is used.
pub const EDT_THRESHOLD: usize = 1_000_000;

/// The transform costs a few passes over the whole grid, so it also wins
/// once `|A| * |B|` exceeds this many grid sizes.
pub const EDT_GRID_FACTOR: usize = 4;

fn prefer_edt(a: &CrispCellSet, b: &CrispCellSet) -> bool {
    let limit = EDT_THRESHOLD.min(EDT_GRID_FACTOR.saturating_mul(a.domain().len()));
    a.len().saturating_mul(b.len()) > limit
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffResult {
    pub value: f64,
    /// `(a, b)` with `a` in the first set and `b` in the second (or the
    /// reverse orientation, whichever side realizes the max-min), such that
    /// `value = d(a, b)`.
    pub witness: (usize, usize),
}

fn check_operands(a: &CrispCellSet, b: &CrispCellSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if **a.domain() != **b.domain() {
        return Err(Error::Mismatch("cell sets on different domains".into()));
    }
    Ok(())
}

/// Nearest cell of `to` from `from` by scanning; returns `(cell, distance)`.
fn nearest_brute(domain: &DomainBox, from: usize, to: &CrispCellSet) -> (usize, f64) {
    if domain.is_isotropic() {
        let mut best = (to.cells()[0], u64::MAX);
        for &b in to.cells() {
            let n: u64 = (0..domain.dim())
                .map(|k| {
                    let d = domain.axis_offset(from, b, k) as u64;
                    d * d
                })
                .sum();
            if n < best.1 {
                best = (b, n);
            }
        }
        (best.0, domain.distance_from_index_sq(best.1))
    } else {
        let mut best = (to.cells()[0], f64::INFINITY);
        for &b in to.cells() {
            let d = domain.cell_distance(from, b);
            if d < best.1 {
                best = (b, d);
            }
        }
        best
    }
}

fn directed_brute(a: &CrispCellSet, b: &CrispCellSet) -> (f64, (usize, usize)) {
    let domain = a.domain();
    let mut worst = (f64::NEG_INFINITY, (0, 0));
    for &x in a.cells() {
        let (y, d) = nearest_brute(domain, x, b);
        if d > worst.0 {
            worst = (d, (x, y));
        }
    }
    worst
}

/// Exact squared index distance to the nearest cell of `set`, for every
/// cell of the grid (`u64::MAX` where unreachable).
pub fn squared_distance_transform(set: &CrispCellSet) -> Vec<u64> {
    let domain = set.domain();
    let mut field = vec![u64::MAX; domain.len()];
    for &c in set.cells() {
        field[c] = 0;
    }
    let mut stride = 1usize;
    for axis in 0..domain.dim() {
        let n = domain.cells()[axis];
        let block = stride * n;
        let mut line = vec![0u64; n];
        let mut out = vec![0u64; n];
        for base in 0..domain.len() / n {
            let outer = base / stride;
            let inner = base % stride;
            let start = outer * block + inner;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = field[start + i * stride];
            }
            lower_envelope_1d(&line, &mut out);
            for (i, v) in out.iter().enumerate() {
                field[start + i * stride] = *v;
            }
        }
        stride = block;
    }
    field
}

/// `out[x] = min_i (x - i)^2 + f[i]` over finite `f[i]`, by the integer
/// lower-envelope scan of Meijster et al.
fn lower_envelope_1d(f: &[u64], out: &mut [u64]) {
    let n = f.len();
    let g = |x: usize, i: usize| -> u128 {
        let d = x.abs_diff(i) as u128;
        d * d + f[i] as u128
    };
    // start of each parabola's region and its apex
    let mut starts: Vec<usize> = Vec::with_capacity(n);
    let mut apex: Vec<usize> = Vec::with_capacity(n);
    for u in (0..n).filter(|&u| f[u] != u64::MAX) {
        while let (Some(&s), Some(&t)) = (starts.last(), apex.last()) {
            if g(s, t) > g(s, u) {
                starts.pop();
                apex.pop();
            } else {
                break;
            }
        }
        match apex.last() {
            None => {
                starts.push(0);
                apex.push(u);
            }
            Some(&t) => {
                // first x where parabola u is strictly below parabola t
                let num = (u * u) as i128 - (t * t) as i128 + f[u] as i128 - f[t] as i128;
                let den = 2 * (u as i128 - t as i128);
                let sep = num.div_euclid(den);
                let w = sep + 1;
                if w < n as i128 {
                    starts.push(w.max(0) as usize);
                    apex.push(u);
                }
            }
        }
    }
    if apex.is_empty() {
        out.fill(u64::MAX);
        return;
    }
    let mut q = apex.len() - 1;
    for x in (0..n).rev() {
        out[x] = g(x, apex[q]) as u64;
        if x == starts[q] && q > 0 {
            q -= 1;
        }
    }
}

fn directed_edt(a: &CrispCellSet, b: &CrispCellSet) -> (f64, (usize, usize)) {
    let domain = a.domain();
    let field = squared_distance_transform(b);
    let mut worst = (a.cells()[0], field[a.cells()[0]]);
    for &x in a.cells() {
        if field[x] > worst.1 {
            worst = (x, field[x]);
        }
    }
    let (y, d) = nearest_brute(domain, worst.0, b);
    debug_assert_eq!(d, domain.distance_from_index_sq(worst.1));
    (d, (worst.0, y))
}

fn edt_applicable(domain: &DomainBox) -> bool {
    domain.is_isotropic() && !domain.wrap()
}

fn combine(ab: (f64, (usize, usize)), ba: (f64, (usize, usize))) -> HausdorffResult {
    if ba.0 > ab.0 {
        HausdorffResult {
            value: ba.0,
            witness: (ba.1 .1, ba.1 .0),
        }
    } else {
        HausdorffResult {
            value: ab.0,
            witness: ab.1,
        }
    }
}

/// Hausdorff distance by the double loop.
pub fn hausdorff_brute(a: &CrispCellSet, b: &CrispCellSet) -> Result<HausdorffResult> {
    check_operands(a, b)?;
    Ok(combine(directed_brute(a, b), directed_brute(b, a)))
}

/// Hausdorff distance through distance transforms of both operands. Falls
/// back to the double loop on anisotropic or wrapped boxes.
pub fn hausdorff_edt(a: &CrispCellSet, b: &CrispCellSet) -> Result<HausdorffResult> {
    check_operands(a, b)?;
    if !edt_applicable(a.domain()) {
        return hausdorff_brute(a, b);
    }
    Ok(combine(directed_edt(a, b), directed_edt(b, a)))
}

/// Hausdorff distance `max(sup_a inf_b d, sup_b inf_a d)` between nonempty cell sets.
pub fn hausdorff(a: &CrispCellSet, b: &CrispCellSet) -> Result<HausdorffResult> {
    if prefer_edt(a, b) {
        hausdorff_edt(a, b)
    } else {
        hausdorff_brute(a, b)
    }
}

/// `sup_{a in A} inf_{b in B} d(a, b)`.
pub fn directed_hausdorff(a: &CrispCellSet, b: &CrispCellSet) -> Result<f64> {
    check_operands(a, b)?;
    Ok(if prefer_edt(a, b) && edt_applicable(a.domain()) {
        directed_edt(a, b).0
    } else {
        directed_brute(a, b).0
    })
}

/// Levels at which either grid has cells; the cut pair is constant between them.
fn breakpoint_levels(u: &FuzzyGrid, v: &FuzzyGrid) -> Vec<Level> {
    let mut levels = u.present_levels();
    levels.extend(v.present_levels());
    levels.sort_unstable();
    levels.dedup();
    levels
}

/// `d_infty(u, v) = max_{l = 1..L} h([u]^l, [v]^l)` for normal grids.
pub fn d_infty(u: &FuzzyGrid, v: &FuzzyGrid) -> Result<f64> {
    u.compatible(v)?;
    if !u.is_normal() || !v.is_normal() {
        return Err(Error::NotNormal);
    }
    d_infty_cutwise(u, v)
}

/// Like [`d_infty`] but for any grids: levels where both cuts are empty
/// contribute 0; a level where exactly one cut is empty gives infinity.
pub fn d_infty_cutwise(u: &FuzzyGrid, v: &FuzzyGrid) -> Result<f64> {
    u.compatible(v)?;
    let levels = breakpoint_levels(u, v);
    let worst = levels
        .par_iter()
        .map(|&l| {
            let a = u.alpha_cut(l);
            let b = v.alpha_cut(l);
            match (a.is_empty(), b.is_empty()) {
                (true, true) => Ok(0.0),
                (false, false) => hausdorff(&a, &b).map(|h| h.value),
                _ => Ok(f64::INFINITY),
            }
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Max metric on m-tuples: `max_i d_infty(u_i, v_i)`.
pub fn d_infty_m(us: &[FuzzyGrid], vs: &[FuzzyGrid]) -> Result<f64> {
    if us.len() != vs.len() {
        return Err(Error::Mismatch(format!(
            "tuples of length {} and {}",
            us.len(),
            vs.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for (u, v) in us.iter().zip(vs) {
        worst = worst.max(d_infty(u, v)?);
    }
    Ok(worst)
}

/// Hausdorff distance between products of cell sets under the max metric
/// on `X^m`, by enumerating both products.
pub fn hausdorff_product(a: &ProductCellSet, b: &ProductCellSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.factors().len() != b.factors().len() {
        return Err(Error::Mismatch("products of different degree".into()));
    }
    let domain = a.factors()[0].domain().clone();
    let ta = a.tuples();
    let tb = b.tuples();
    let dist = |x: &[usize], y: &[usize]| -> f64 {
        x.iter()
            .zip(y)
            .map(|(&p, &q)| domain.cell_distance(p, q))
            .fold(0.0, f64::max)
    };
    let directed = |from: &[Vec<usize>], to: &[Vec<usize>]| -> f64 {
        from.iter()
            .map(|x| to.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(&ta, &tb).max(directed(&tb, &ta)))
}

/// `d_infty` between two products, computed on the product space itself.
pub fn d_infty_product(p: &FuzzyGridProduct, q: &FuzzyGridProduct) -> Result<f64> {
    if p.levels() != q.levels() || p.degree() != q.degree() {
        return Err(Error::Mismatch("incompatible products".into()));
    }
    if !p.is_normal() || !q.is_normal() {
        return Err(Error::NotNormal);
    }
    let mut worst: f64 = 0.0;
    for l in 1..=p.levels() {
        worst = worst.max(hausdorff_product(&p.alpha_cut(l), &q.alpha_cut(l))?);
    }
    Ok(worst)
}
