//! Brute-force reference implementations for tiny instances.
//!
//! Nothing here shares code with the main operator or metric paths beyond
//! the grid container and the map's coefficients: images are rounded by
//! scanning every cell center, the Zadeh sup is taken per output cell over
//! every input tuple, distances come straight from center coordinates, and
//! the iteration keeps its whole history to detect cycles.

use crate::error::{Error, Result};
use crate::fuzzify::Gifzs;
use crate::grid::{CrispCellSet, DomainBox, FuzzyGrid, Level};
use crate::systems::AffineContraction;

pub const MAX_CELLS: usize = 16;
pub const MAX_LEVELS: Level = 16;
pub const MAX_DEGREE: usize = 2;
pub const MAX_MAPS: usize = 3;

/// A system small enough to enumerate exhaustively.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyInstance {
    system: Gifzs,
}

impl TinyInstance {
    pub fn new(system: Gifzs) -> Result<Self> {
        check_grid(system.domain(), system.levels())?;
        if system.degree() > MAX_DEGREE || system.len() > MAX_MAPS {
            return Err(Error::InvalidSystem(format!(
                "degree {} with {} maps exceeds {MAX_DEGREE} / {MAX_MAPS}",
                system.degree(),
                system.len()
            )));
        }
        Ok(Self { system })
    }

    pub fn system(&self) -> &Gifzs {
        &self.system
    }
}

fn check_grid(domain: &DomainBox, levels: Level) -> Result<()> {
    if domain.len() > MAX_CELLS || levels > MAX_LEVELS {
        return Err(Error::InvalidSystem(format!(
            "{} cells at {levels} levels exceeds {MAX_CELLS} / {MAX_LEVELS}",
            domain.len()
        )));
    }
    Ok(())
}

fn centers(domain: &DomainBox) -> Vec<Vec<f64>> {
    (0..domain.len()).map(|c| domain.center(c)).collect()
}

/// Nearest center by scanning all cells; strict comparison keeps the lower
/// index on ties.
fn round_to_cell(domain: &DomainBox, centers: &[Vec<f64>], p: &[f64]) -> usize {
    let mut q = p.to_vec();
    if domain.wrap() {
        for k in 0..q.len() {
            let span = domain.hi()[k] - domain.lo()[k];
            q[k] = domain.lo()[k] + (q[k] - domain.lo()[k]).rem_euclid(span);
        }
    }
    let mut best = 0;
    let mut best_gap = vec![f64::INFINITY; q.len()];
    for (c, x) in centers.iter().enumerate() {
        let gap: Vec<f64> = x.iter().zip(&q).map(|(a, b)| (a - b).abs()).collect();
        // per-axis nearest, so a box cell wins only if it is at least as
        // good on every axis and strictly better on one
        let better = gap.iter().zip(&best_gap).all(|(g, b)| g <= b)
            && gap.iter().zip(&best_gap).any(|(g, b)| g < b);
        if better {
            best = c;
            best_gap = gap;
        }
    }
    best
}

fn all_tuples(len: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..len).map(move |c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out
}

/// `f(u_0 x ... x u_{m-1})(y) = max over all tuples rounding to y of the
/// minimum membership`, and 0 where no tuple lands.
pub fn oracle_zadeh(f: &AffineContraction, us: &[FuzzyGrid]) -> Result<FuzzyGrid> {
    let first = us
        .first()
        .ok_or_else(|| Error::Mismatch("no operands".into()))?;
    let domain = first.domain();
    check_grid(domain, first.levels())?;
    let cs = centers(domain);
    let tuples = all_tuples(domain.len(), us.len());
    let images: Vec<usize> = tuples
        .iter()
        .map(|t| {
            let points: Vec<&[f64]> = t.iter().map(|&c| cs[c].as_slice()).collect();
            round_to_cell(domain, &cs, &f.eval(&points))
        })
        .collect();
    let mut values = vec![0; domain.len()];
    for (y, slot) in values.iter_mut().enumerate() {
        let mut best = 0;
        for (t, &img) in tuples.iter().zip(&images) {
            if img != y {
                continue;
            }
            let w = t
                .iter()
                .enumerate()
                .map(|(i, &c)| us[i].level(c))
                .min()
                .unwrap_or(0);
            best = best.max(w);
        }
        *slot = best;
    }
    FuzzyGrid::from_values(domain.clone(), first.levels(), values)
}

fn point_distance(domain: &DomainBox, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        let mut g = (a[k] - b[k]).abs();
        if domain.wrap() {
            let span = domain.hi()[k] - domain.lo()[k];
            g = g.min(span - g);
        }
        s += g * g;
    }
    s.sqrt()
}

/// Double-loop Hausdorff distance on center coordinates.
pub fn oracle_hausdorff(a: &CrispCellSet, b: &CrispCellSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let domain = a.domain();
    let directed = |x: &CrispCellSet, y: &CrispCellSet| {
        let mut worst: f64 = 0.0;
        for &p in x.cells() {
            let cp = domain.center(p);
            let mut near = f64::INFINITY;
            for &q in y.cells() {
                near = near.min(point_distance(domain, &cp, &domain.center(q)));
            }
            worst = worst.max(near);
        }
        worst
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// `d_infty` over every cut, the support included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDistance {
    pub value: f64,
    /// Hausdorff distance between the supports.
    pub zero_term: f64,
    /// Maximum over the positive levels alone.
    pub positive_max: f64,
}

pub fn oracle_dinfty(u: &FuzzyGrid, v: &FuzzyGrid) -> Result<OracleDistance> {
    check_grid(u.domain(), u.levels())?;
    if !u.is_normal() || !v.is_normal() {
        return Err(Error::NotNormal);
    }
    let zero_term = oracle_hausdorff(&u.alpha_cut(0), &v.alpha_cut(0))?;
    let mut positive_max: f64 = 0.0;
    for l in 1..=u.levels() {
        positive_max = positive_max.max(oracle_hausdorff(&u.alpha_cut(l), &v.alpha_cut(l))?);
    }
    Ok(OracleDistance {
        value: zero_term.max(positive_max),
        zero_term,
        positive_max,
    })
}

/// The GFHB operator from [`oracle_zadeh`] and the grey maps' sample tables.
pub fn oracle_gfhb(z: &Gifzs, us: &[FuzzyGrid]) -> Result<FuzzyGrid> {
    let domain = z.domain();
    let mut values = vec![0 as Level; domain.len()];
    for (f, rho) in z.gifs().maps().iter().zip(z.greys().maps()) {
        let push = oracle_zadeh(f, us)?;
        for (slot, &w) in values.iter_mut().zip(push.values()) {
            *slot = (*slot).max(rho.samples()[w as usize]);
        }
    }
    FuzzyGrid::from_values(domain.clone(), z.levels(), values)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    FixedPoint {
        attractor: FuzzyGrid,
        iterations: usize,
    },
    /// The window first seen at step `start` came back after `period` steps.
    Cycle { start: usize, period: usize },
}

/// Iterates from the universe with [`oracle_gfhb`] until the newest
/// iterate repeats the whole window or an earlier window returns.
pub fn oracle_attractor(instance: &TinyInstance, max_iter: usize) -> Result<OracleOutcome> {
    let z = instance.system();
    let m = z.degree();
    let mut seq = vec![FuzzyGrid::universe(z.domain().clone(), z.levels()); m];
    for k in 1..=max_iter {
        let args: Vec<FuzzyGrid> = seq.iter().rev().take(m).cloned().collect();
        let next = oracle_gfhb(z, &args)?;
        if seq[seq.len() - m..].iter().all(|u| *u == next) {
            return Ok(OracleOutcome::FixedPoint {
                attractor: next,
                iterations: k,
            });
        }
        seq.push(next);
        let n = seq.len();
        for start in 0..n - m {
            if seq[start..start + m] == seq[n - m..] {
                return Ok(OracleOutcome::Cycle {
                    start,
                    period: n - m - start,
                });
            }
        }
    }
    Err(Error::InvalidSystem(format!(
        "no fixed point or cycle within {max_iter} steps"
    )))
}
