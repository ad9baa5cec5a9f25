//! Fixed points of the GFHB operator and what can be certified about them.
//!
//! The default seed is the universe `u = 1` in every slot. The operator is
//! monotone and maps the universe below itself, so from there the iterates
//! decrease cellwise on a finite lattice and must stop at an exact fixed
//! point: the greatest one.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzify::{gfhb_levelset, gfhb_suppush, Gifzs};
use crate::grey::{GreyLevelMap, GreySystem};
use crate::grid::{CrispCellSet, DomainBox, FuzzyGrid, Level};
use crate::metrics::{d_infty, directed_hausdorff, hausdorff};
use crate::systems::{
    crisp_attractor, drive, fingerprint, full_seeds, AffineContraction, CrispGifs, CrispRun,
    RunOptions,
};

/// Which evaluation of the operator a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    SupPush,
    LevelSet,
}

impl Algorithm {
    pub fn apply(self, z: &Gifzs, us: &[FuzzyGrid]) -> Result<FuzzyGrid> {
        match self {
            Algorithm::SupPush => gfhb_suppush(z, us),
            Algorithm::LevelSet => gfhb_levelset(z, us),
        }
    }
}

/// Applies the operator to the diagonal tuple `(u, ..., u)`.
pub fn apply_diagonal(z: &Gifzs, u: &FuzzyGrid) -> Result<FuzzyGrid> {
    gfhb_suppush(z, &vec![u.clone(); z.degree()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorRun {
    pub attractor: FuzzyGrid,
    pub iterations: usize,
    /// `d_infty` change between successive windows, one entry per step.
    pub decay: Vec<f64>,
    pub converged: bool,
    /// The run ended on an exact lattice fixed point.
    pub collapsed_exact: bool,
    /// Period of a lattice cycle, if one was hit instead of a fixed point.
    pub cycle: Option<usize>,
    /// Seeds followed by every iterate, when requested.
    pub history: Vec<FuzzyGrid>,
}

/// `(1, ..., 1)`.
pub fn universe_seeds(z: &Gifzs) -> Vec<FuzzyGrid> {
    vec![FuzzyGrid::universe(z.domain().clone(), z.levels()); z.degree()]
}

/// Indicator of the cell at the center of the box, in every slot.
pub fn center_seeds(z: &Gifzs) -> Vec<FuzzyGrid> {
    let domain = z.domain();
    let mid: Vec<f64> = domain
        .lo()
        .iter()
        .zip(domain.hi())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let (cell, _) = domain.nearest_cell(&mid);
    let mut values = vec![0; domain.len()];
    values[cell] = z.levels();
    let u = FuzzyGrid::from_values(domain.clone(), z.levels(), values).expect("sized to the grid");
    vec![u; z.degree()]
}

pub fn default_seeds(z: &Gifzs) -> Vec<FuzzyGrid> {
    universe_seeds(z)
}

pub fn iterate_attractor(
    z: &Gifzs,
    seeds: &[FuzzyGrid],
    opts: &RunOptions,
) -> Result<AttractorRun> {
    iterate_with(z, seeds, opts, Algorithm::SupPush)
}

/// Runs `u_{k+m} = Z(u_{k+m-1}, ..., u_k)` from `seeds`, oldest first.
pub fn iterate_with(
    z: &Gifzs,
    seeds: &[FuzzyGrid],
    opts: &RunOptions,
    algorithm: Algorithm,
) -> Result<AttractorRun> {
    if seeds.len() != z.degree() {
        return Err(Error::Mismatch(format!(
            "{} seeds for a system of degree {}",
            seeds.len(),
            z.degree()
        )));
    }
    if seeds.iter().any(|s| !s.is_normal()) {
        return Err(Error::NotNormal);
    }
    let out = drive(
        seeds,
        opts,
        |args| {
            let owned: Vec<FuzzyGrid> = args.iter().map(|u| (*u).clone()).collect();
            algorithm.apply(z, &owned)
        },
        d_infty,
        |u| fingerprint(&[u.values()]),
    )?;
    Ok(AttractorRun {
        attractor: out.last,
        iterations: out.iterations,
        decay: out.decay,
        converged: out.converged,
        collapsed_exact: out.exact,
        cycle: out.cycle,
        history: out.history,
    })
}

/// The collage bound `d(u, u_Z) <= d(u, Z(u, ..., u)) / (1 - lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollageReport {
    pub residual: f64,
    pub lambda: f64,
    pub bound: f64,
    /// `d_infty(u, u_Z)` when the attractor was supplied.
    pub actual: Option<f64>,
    /// Discretization allowance on top of `bound`.
    pub slack: f64,
}

impl CollageReport {
    /// `actual <= bound + slack`, when `actual` is known.
    pub fn holds(&self) -> Option<bool> {
        self.actual.map(|a| a <= self.bound + self.slack)
    }
}

pub fn collage(z: &Gifzs, u: &FuzzyGrid, attractor: Option<&FuzzyGrid>) -> Result<CollageReport> {
    let lambda = z.lambda();
    if lambda >= 1.0 {
        return Err(Error::NotContractive { index: 0, lambda });
    }
    let residual = d_infty(u, &apply_diagonal(z, u)?)?;
    let actual = attractor.map(|a| d_infty(u, a)).transpose()?;
    Ok(CollageReport {
        residual,
        lambda,
        bound: residual / (1.0 - lambda),
        actual,
        slack: 2.0 * z.domain().cell_diagonal(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `Z(v, ..., v) = v`: both orders hold and the sequence is constant.
    Fixed,
    /// `Z(v, ..., v) <= v`.
    Nonincreasing,
    /// `v <= Z(v, ..., v)`.
    Nondecreasing,
    NotComparable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneRun {
    pub direction: Direction,
    pub run: AttractorRun,
    /// Steps whose iterate broke the expected order against its predecessor.
    pub violations: usize,
    /// The final iterate sits on the expected side of `v`.
    pub bounded_by_seed: bool,
}

/// Iterates from `(v, ..., v)` and checks the order of the whole sequence.
pub fn monotone_iterate(z: &Gifzs, v: &FuzzyGrid, opts: &RunOptions) -> Result<MonotoneRun> {
    let image = apply_diagonal(z, v)?;
    let direction = if image == *v {
        Direction::Fixed
    } else if image.le(v) {
        Direction::Nonincreasing
    } else if v.le(&image) {
        Direction::Nondecreasing
    } else {
        Direction::NotComparable
    };
    let opts = RunOptions {
        record_history: true,
        ..opts.clone()
    };
    let run = iterate_attractor(z, &vec![v.clone(); z.degree()], &opts)?;
    let ordered = |a: &FuzzyGrid, b: &FuzzyGrid| match direction {
        Direction::Nonincreasing => b.le(a),
        Direction::Nondecreasing => a.le(b),
        Direction::Fixed => a == b,
        Direction::NotComparable => true,
    };
    let violations = run
        .history
        .windows(2)
        .filter(|w| !ordered(&w[0], &w[1]))
        .count();
    let bounded_by_seed = ordered(v, &run.attractor);
    Ok(MonotoneRun {
        direction,
        run,
        violations,
        bounded_by_seed,
    })
}

/// Cuts of a fuzzy attractor against the crisp attractors `A_S` (all maps)
/// and `A_S'` (maps whose grey reaches 1). Set comparisons allow one cell
/// diagonal; the `exact` fields record the undilated relation.
#[derive(Debug, Clone, PartialEq)]
pub struct CutComparison {
    pub a_s: CrispCellSet,
    pub a_s_prime: CrispCellSet,
    pub zero_cut_in_as: bool,
    pub zero_cut_in_as_exact: bool,
    /// Present when every grey map has minimal `r_+`.
    pub zero_cut_eq_as: Option<bool>,
    pub as_prime_in_one_cut: bool,
    pub as_prime_in_one_cut_exact: bool,
    /// Present when `beta_j(1) = 1` for every map reaching 1.
    pub one_cut_eq_as_prime: Option<bool>,
    /// Present when every grey map reaches 1.
    pub crisp: Option<bool>,
    /// Present when the system is proper and `A_S' != A_S`.
    pub not_crisp: Option<bool>,
    pub crisp_runs: (CrispRun, CrispRun),
}

impl CutComparison {
    pub fn passed(&self) -> bool {
        self.zero_cut_in_as
            && self.as_prime_in_one_cut
            && self.zero_cut_eq_as != Some(false)
            && self.one_cut_eq_as_prime != Some(false)
            && self.crisp != Some(false)
            && self.not_crisp != Some(false)
    }
}

pub fn compare_cuts(z: &Gifzs, run: &AttractorRun) -> Result<CutComparison> {
    if !run.converged {
        return Err(Error::InvalidSystem(
            "attractor run did not converge".into(),
        ));
    }
    let u = &run.attractor;
    let top = z.top_indices();
    if top.is_empty() {
        return Err(Error::NotAdmissible("no grey map reaches 1".into()));
    }
    let opts = RunOptions::default();
    let full = crisp_attractor(z.gifs(), &full_seeds(z.gifs()), &opts)?;
    let sub = z.gifs().subsystem(&top)?;
    let prime = crisp_attractor(&sub, &full_seeds(&sub), &opts)?;
    let a_s = full.attractor.clone();
    let a_s_prime = prime.attractor.clone();
    let diag = z.domain().cell_diagonal();
    let support = u.support();
    let one_cut = u.alpha_cut(z.levels());

    let zero_cut_in_as = directed_hausdorff(&support, &a_s)? <= diag;
    let zero_cut_in_as_exact = support.is_subset(&a_s);
    let proper = z.greys().check_proper();
    let r_plus_minimal = proper.entries.iter().all(|e| e.r_plus_minimal);
    let zero_cut_eq_as = r_plus_minimal
        .then(|| hausdorff(&support, &a_s).map(|h| h.value <= diag))
        .transpose()?;
    let as_prime_in_one_cut = directed_hausdorff(&a_s_prime, &one_cut)? <= diag;
    let as_prime_in_one_cut_exact = a_s_prime.is_subset(&one_cut);
    let beta_top = top.iter().all(|&j| proper.entries[j].beta_of_top);
    let one_cut_eq_as_prime = beta_top
        .then(|| hausdorff(&one_cut, &a_s_prime).map(|h| h.value <= diag))
        .transpose()?;
    let crisp = (top.len() == z.len())
        .then(|| hausdorff(&support, &a_s).map(|h| u.is_crisp() && h.value <= diag))
        .transpose()?;
    let not_crisp = (proper.passed() && a_s_prime != a_s).then(|| !u.is_crisp());
    Ok(CutComparison {
        a_s,
        a_s_prime,
        zero_cut_in_as,
        zero_cut_in_as_exact,
        zero_cut_eq_as,
        as_prime_in_one_cut,
        as_prime_in_one_cut_exact,
        one_cut_eq_as_prime,
        crisp,
        not_crisp,
        crisp_runs: (full, prime),
    })
}

/// Data that lets a reader re-check an approximation produced by
/// [`approximate_ifzs`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCertificate {
    pub epsilon: f64,
    /// Centers of the greedy cover, one per map.
    pub centers: Vec<usize>,
    /// Grey step heights, one per map.
    pub heights: Vec<Level>,
    /// Common contraction ratio of the maps.
    pub ratio: f64,
    pub collage: CollageReport,
    pub attractor: AttractorRun,
}

impl DensityCertificate {
    /// `d_infty(target, attractor)` and whether it is below `epsilon + 2` cell diagonals.
    pub fn distance(&self) -> f64 {
        self.collage.actual.expect("attractor supplied")
    }

    pub fn within(&self) -> bool {
        self.distance() < self.epsilon + self.collage.slack
    }
}

/// Keeps every contraction ratio strictly below one half.
pub const RATIO_MARGIN: f64 = 0.01;

/// Builds a degree-one system whose attractor is within `epsilon` of `target`.
///
/// Support cells are scanned in index order; each one not yet within
/// `epsilon / 4` of a chosen center becomes a center `x_j`. Map `j` is the
/// similarity `x -> x_j + s (x - c)` with `c` the support centroid and
/// `s = min(1/2 - 0.01, (epsilon / 8) / D)`, `D` bounding the support
/// diameter, and grey map `j` is the step at the largest target level in
/// the closed `epsilon / 4` ball around `x_j`.
pub fn approximate_ifzs(target: &FuzzyGrid, epsilon: f64) -> Result<(Gifzs, DensityCertificate)> {
    if !target.is_normal() {
        return Err(Error::NotNormal);
    }
    let domain: Arc<DomainBox> = target.domain().clone();
    let minimum = 4.0 * domain.cell_diagonal();
    if !(epsilon > minimum) {
        return Err(Error::EpsilonTooSmall { epsilon, minimum });
    }
    let radius = epsilon / 4.0;
    let support = target.support();
    let mut centers: Vec<usize> = Vec::new();
    for &c in support.cells() {
        if !centers
            .iter()
            .any(|&x| domain.cell_distance(x, c) <= radius)
        {
            centers.push(c);
        }
    }
    let heights: Vec<Level> = centers
        .iter()
        .map(|&x| {
            (0..domain.len())
                .filter(|&c| domain.cell_distance(x, c) <= radius)
                .map(|c| target.level(c))
                .max()
                .unwrap_or(0)
        })
        .collect();

    let dim = domain.dim();
    let mut centroid = vec![0.0; dim];
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &c in support.cells() {
        let p = domain.center(c);
        for k in 0..dim {
            centroid[k] += p[k];
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    for x in &mut centroid {
        *x /= support.len() as f64;
    }
    let spread = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    let cap = 0.5 - RATIO_MARGIN;
    let ratio = if spread > 0.0 {
        cap.min((epsilon / 8.0) / spread)
    } else {
        cap
    };

    let mut block = vec![0.0; dim * dim];
    for k in 0..dim {
        block[k * dim + k] = ratio;
    }
    let maps = centers
        .iter()
        .map(|&x| {
            let p = domain.center(x);
            let offset = (0..dim).map(|k| p[k] - ratio * centroid[k]).collect();
            AffineContraction::new(vec![block.clone()], offset)
        })
        .collect::<Result<Vec<_>>>()?;
    let greys = heights
        .iter()
        .map(|&h| GreyLevelMap::step_at(target.levels(), h))
        .collect();
    let z = Gifzs::new(
        CrispGifs::new(domain.clone(), maps)?,
        GreySystem::new(greys)?,
    )?;
    let run = iterate_attractor(&z, &default_seeds(&z), &RunOptions::default())?;
    let report = collage(&z, target, Some(&run.attractor))?;
    let certificate = DensityCertificate {
        epsilon,
        centers,
        heights,
        ratio,
        collage: report,
        attractor: run,
    };
    Ok((z, certificate))
}
