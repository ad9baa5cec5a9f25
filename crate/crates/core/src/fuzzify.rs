//! Zadeh extension of affine maps and the generalized fuzzy
//! Hutchinson-Barnsley operator
//! `Z(u_0, ..., u_{m-1}) = max_j rho_j(phi_j(u_0 x ... x u_{m-1}))`.
//!
//! Two independent evaluations are provided. [`gfhb_suppush`] pushes every
//! support tuple forward and takes maxima of minima. [`gfhb_levelset`]
//! builds each cut of the output from cuts of the inputs, transported
//! through the generalized inverses of the grey maps, and reassembles the
//! grid from its cut stack. On the lattice the two agree exactly.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grey::{Clause, GreySystem};
use crate::grid::{reconstruct_from_cuts, CrispCellSet, DomainBox, FuzzyGrid, Level};
use crate::systems::{mark_image, push_tuples, AffineContraction, CrispGifs};

/// A generalized iterated fuzzy function system: maps paired with grey maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Gifzs {
    gifs: CrispGifs,
    greys: GreySystem,
    permissive: bool,
}

impl Gifzs {
    pub fn new(gifs: CrispGifs, greys: GreySystem) -> Result<Self> {
        Self::build(gifs, greys, false)
    }

    /// Like [`Gifzs::new`] but accepts constant-zero grey maps, which the
    /// nonzero clause of admissibility otherwise rules out.
    pub fn new_permissive(gifs: CrispGifs, greys: GreySystem) -> Result<Self> {
        Self::build(gifs, greys, true)
    }

    fn build(gifs: CrispGifs, greys: GreySystem, permissive: bool) -> Result<Self> {
        if gifs.len() != greys.len() {
            return Err(Error::InvalidSystem(format!(
                "{} maps but {} grey maps",
                gifs.len(),
                greys.len()
            )));
        }
        let report = greys.check_admissible();
        let blocking = report
            .violations
            .iter()
            .any(|v| !(permissive && v.clause == Clause::Nonzero));
        if blocking {
            return Err(Error::NotAdmissible(report.describe()));
        }
        Ok(Self {
            gifs,
            greys,
            permissive,
        })
    }

    pub fn gifs(&self) -> &CrispGifs {
        &self.gifs
    }

    pub fn greys(&self) -> &GreySystem {
        &self.greys
    }

    pub fn is_permissive(&self) -> bool {
        self.permissive
    }

    pub fn domain(&self) -> &Arc<DomainBox> {
        self.gifs.domain()
    }

    pub fn levels(&self) -> Level {
        self.greys.levels()
    }

    pub fn degree(&self) -> usize {
        self.gifs.degree()
    }

    pub fn len(&self) -> usize {
        self.gifs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gifs.is_empty()
    }

    pub fn lambda(&self) -> f64 {
        self.gifs.lambda()
    }

    /// Indices `j` with `rho_j(1) = 1`.
    pub fn top_indices(&self) -> Vec<usize> {
        self.greys.top_indices()
    }
}

fn check_operands(domain: &DomainBox, degree: usize, us: &[FuzzyGrid]) -> Result<()> {
    if us.len() != degree {
        return Err(Error::Mismatch(format!(
            "{} operands for degree {degree}",
            us.len()
        )));
    }
    for u in us {
        if **u.domain() != *domain {
            return Err(Error::Mismatch("operand on another domain".into()));
        }
        if u.levels() != us[0].levels() {
            return Err(Error::Mismatch(
                "operands use different quantizations".into(),
            ));
        }
        if !u.is_normal() {
            return Err(Error::NotNormal);
        }
    }
    Ok(())
}

/// `phi(u_0 x ... x u_{m-1})` as raw levels, with the clamp count.
fn push_forward(
    f: &AffineContraction,
    domain: &DomainBox,
    us: &[FuzzyGrid],
) -> (Vec<Level>, usize) {
    let lists: Vec<Vec<(usize, Level)>> = us
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let support = u
                .values()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0)
                .map(|(c, &v)| (c, v));
            if f.is_inert(i) {
                support.max_by_key(|&(_, v)| v).into_iter().collect()
            } else {
                support.collect()
            }
        })
        .collect();
    let refs: Vec<&[(usize, Level)]> = lists.iter().map(|l| l.as_slice()).collect();
    let mut out = vec![0 as Level; domain.len()];
    let clamped = push_tuples(f, domain, &refs, |c, w| {
        if w > out[c] {
            out[c] = w;
        }
    });
    (out, clamped)
}

/// Zadeh extension `phi(u_0 x ... x u_{m-1})(y) = max_{phi(x) = y} min_i u_i(x_i)`,
/// with `0` on cells that receive no tuple.
pub fn zadeh_extend(f: &AffineContraction, us: &[FuzzyGrid]) -> Result<FuzzyGrid> {
    let first = us
        .first()
        .ok_or_else(|| Error::Mismatch("no operands".into()))?;
    let domain = first.domain().clone();
    if f.dim() != domain.dim() {
        return Err(Error::Mismatch("map and domain dimensions differ".into()));
    }
    check_operands(&domain, f.degree(), us)?;
    let (values, _) = push_forward(f, &domain, us);
    FuzzyGrid::from_values(domain, first.levels(), values)
}

fn check_system_operands(z: &Gifzs, us: &[FuzzyGrid]) -> Result<()> {
    check_operands(z.domain(), z.degree(), us)?;
    if us[0].levels() != z.levels() {
        return Err(Error::Mismatch(format!(
            "grids use {} levels, system uses {}",
            us[0].levels(),
            z.levels()
        )));
    }
    Ok(())
}

/// The GFHB operator by forward push of every support tuple.
pub fn gfhb_suppush(z: &Gifzs, us: &[FuzzyGrid]) -> Result<FuzzyGrid> {
    check_system_operands(z, us)?;
    let domain = z.domain();
    let values = z
        .gifs()
        .maps()
        .par_iter()
        .zip(z.greys().maps().par_iter())
        .map(|(f, rho)| {
            let (mut w, _) = push_forward(f, domain, us);
            for v in &mut w {
                *v = rho.eval(*v);
            }
            w
        })
        .reduce(
            || vec![0; domain.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = (*x).max(y);
                }
                a
            },
        );
    FuzzyGrid::from_values(domain.clone(), z.levels(), values)
}

/// The GFHB operator through cuts: for each level `l`,
/// `[Z(u)]^l = union_{j : l <= rho_j(1)} phi_j([u_0]^{b} x ... x [u_{m-1}]^{b})`
/// with `b = beta_j(l)`.
pub fn gfhb_levelset(z: &Gifzs, us: &[FuzzyGrid]) -> Result<FuzzyGrid> {
    check_system_operands(z, us)?;
    let domain = z.domain().clone();
    let levels = z.levels();
    // a cut of u_i only changes at its present levels; key cuts by the
    // smallest present level at or above the requested one
    let present: Vec<Vec<Level>> = us.iter().map(|u| u.present_levels()).collect();
    let effective = |i: usize, b: Level| -> Option<Level> {
        let p = &present[i];
        let k = p.partition_point(|&x| x < b.max(1));
        p.get(k).copied()
    };
    // requests[l] lists the (map, key) pairs contributing to cut l
    let mut keys: Vec<(usize, Vec<Level>)> = Vec::new();
    let mut key_index: HashMap<(usize, Vec<Level>), usize> = HashMap::new();
    let mut requests: Vec<Vec<usize>> = vec![Vec::new(); levels as usize + 1];
    for (j, rho) in z.greys().maps().iter().enumerate() {
        for l in 1..=levels {
            let Some(b) = rho.beta(l) else { break };
            if b == 0 {
                return Err(Error::NotAdmissible(format!(
                    "grey {j} is positive at 0; cuts are not transported"
                )));
            }
            let key: Option<Vec<Level>> = (0..us.len()).map(|i| effective(i, b)).collect();
            let Some(key) = key else { continue };
            let id = *key_index.entry((j, key.clone())).or_insert_with(|| {
                keys.push((j, key));
                keys.len() - 1
            });
            requests[l as usize].push(id);
        }
    }
    let images: Vec<Vec<bool>> = keys
        .par_iter()
        .map(|(j, key)| {
            let cuts: Vec<CrispCellSet> =
                us.iter().zip(key).map(|(u, &b)| u.alpha_cut(b)).collect();
            let refs: Vec<&CrispCellSet> = cuts.iter().collect();
            let mut mask = vec![false; domain.len()];
            mark_image(&z.gifs().maps()[*j], &domain, &refs, &mut mask);
            mask
        })
        .collect();
    let stack: Vec<CrispCellSet> = (1..=levels as usize)
        .map(|l| {
            let mut mask = vec![false; domain.len()];
            for &id in &requests[l] {
                for (x, y) in mask.iter_mut().zip(&images[id]) {
                    *x |= *y;
                }
            }
            CrispCellSet::from_mask(domain.clone(), &mask)
        })
        .collect();
    reconstruct_from_cuts(domain, levels, &stack)
}

/// The degree `m + 1` system whose maps ignore the extra, oldest argument.
pub fn lift_degree(z: &Gifzs) -> Gifzs {
    Gifzs {
        gifs: z.gifs.lift(),
        greys: z.greys.clone(),
        permissive: z.permissive,
    }
}
