//! Fuzzy fractal attractors of generalized iterated fuzzy function systems
//! on discretized fuzzy sets.
//!
//! Fuzzy sets live on uniform grids over a box ([`FuzzyGrid`]) with
//! memberships quantized to `0..=L`. A system ([`Gifzs`]) pairs affine
//! contractions `X^m -> X` with grey level maps; its operator is evaluated
//! either by forward sup-push ([`gfhb_suppush`]) or through cuts
//! ([`gfhb_levelset`]), and [`iterate_attractor`] drives it to a fixed point.
//!
//! ```
//! use std::sync::Arc;
//! use gifzs::*;
//!
//! let domain = Arc::new(DomainBox::unit_interval(64).unwrap().with_wrap(true));
//! let maps = (0..2)
//!     .map(|j| AffineContraction::scalar(&[0.5, 0.0], j as f64 / 2.0).unwrap())
//!     .collect();
//! let z = Gifzs::new(
//!     CrispGifs::new(domain, maps).unwrap(),
//!     GreySystem::identities(DEFAULT_LEVELS, 2),
//! )
//! .unwrap();
//! let run = iterate_attractor(&z, &default_seeds(&z), &RunOptions::default()).unwrap();
//! assert!(run.collapsed_exact);
//! assert!(run.attractor.values().iter().all(|&v| v == DEFAULT_LEVELS));
//! ```

pub mod attractor;
pub mod error;
pub mod fuzzify;
pub mod grey;
pub mod grid;
pub mod metrics;
pub mod oracle;
pub mod systems;

pub use attractor::{
    apply_diagonal, approximate_ifzs, center_seeds, collage, compare_cuts, default_seeds,
    iterate_attractor, iterate_with, monotone_iterate, universe_seeds, Algorithm, AttractorRun,
    CollageReport, CutComparison, DensityCertificate, Direction, MonotoneRun,
};
pub use error::{Error, Result};
pub use fuzzify::{gfhb_levelset, gfhb_suppush, lift_degree, zadeh_extend, Gifzs};
pub use grey::{
    apply_grey, AdmissibilityReport, Clause, GreyLevelMap, GreySystem, ProperReport, Violation,
};
pub use grid::{
    cartesian_product, lattice_level, reconstruct_from_cuts, CrispCellSet, DomainBox, FuzzyGrid,
    FuzzyGridProduct, Level, ProductCellSet, DEFAULT_LEVELS,
};
pub use metrics::{
    d_infty, d_infty_cutwise, d_infty_m, d_infty_product, directed_hausdorff, hausdorff,
    hausdorff_brute, hausdorff_edt, hausdorff_product, HausdorffResult,
};
pub use systems::{
    crisp_attractor, full_seeds, ghb_apply, map_cellset, AffineContraction, CrispGifs, CrispRun,
    MapImage, RunOptions,
};
