//! Grey level maps: nondecreasing, right-continuous `[0,1] -> [0,1]`.
//!
//! A map is stored as its values at the lattice points `l / L`, read as a
//! right-continuous step function. Real-valued maps are sampled with upward
//! rounding, so a strictly positive value never collapses to zero.

use crate::error::{Error, Result};
use crate::grid::{FuzzyGrid, Level};

const LATTICE_EPS: f64 = 1e-9;

/// Rounds `x * L` up to the lattice, ignoring float noise just above a lattice point.
fn quantize_up(x: f64, levels: Level) -> Level {
    let scaled = (x * levels as f64 - LATTICE_EPS).ceil();
    scaled.clamp(0.0, levels as f64) as Level
}

/// True when lattice point `level / L` is at or beyond the real threshold `t`.
fn reaches(level: usize, t: f64, levels: Level) -> bool {
    level as f64 >= t * levels as f64 - LATTICE_EPS
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreyLevelMap {
    levels: Level,
    samples: Vec<Level>,
}

impl GreyLevelMap {
    /// Builds a map from its `L + 1` lattice samples.
    pub fn from_samples(levels: Level, samples: Vec<Level>) -> Result<Self> {
        if samples.len() != levels as usize + 1 {
            return Err(Error::InvalidGreyMap(format!(
                "expected {} samples, got {}",
                levels as usize + 1,
                samples.len()
            )));
        }
        if let Some(&v) = samples.iter().find(|&&v| v > levels) {
            return Err(Error::InvalidGreyMap(format!(
                "sample {v} exceeds {levels}"
            )));
        }
        if let Some(i) = samples.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidGreyMap(format!(
                "not nondecreasing at level {i}"
            )));
        }
        Ok(Self { levels, samples })
    }

    /// Samples a real function at the lattice points, rounding values up.
    pub fn from_fn(levels: Level, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..=levels)
            .map(|l| {
                let v = f(l as f64 / levels as f64);
                if !(0.0..=1.0 + LATTICE_EPS).contains(&v) {
                    return Err(Error::InvalidGreyMap(format!("value {v} outside [0,1]")));
                }
                Ok(quantize_up(v, levels))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(levels, samples)
    }

    /// Right-continuous step function through breakpoints `(t_i, v_i)`:
    /// the value is `v_i` on `[t_i, t_{i+1})` and 0 before the first breakpoint.
    pub fn from_breakpoints(levels: Level, points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGreyMap("no breakpoints".into()));
        }
        for (i, &(t, v)) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidGreyMap(format!(
                    "breakpoint ({t}, {v}) outside the unit square"
                )));
            }
            if i > 0 {
                let (pt, pv) = points[i - 1];
                if t <= pt {
                    return Err(Error::InvalidGreyMap(format!(
                        "breakpoint abscissae must increase: {pt} then {t}"
                    )));
                }
                if v < pv {
                    return Err(Error::InvalidGreyMap(format!(
                        "breakpoint values must not decrease: {pv} then {v}"
                    )));
                }
            }
        }
        let samples = (0..=levels as usize)
            .map(|l| {
                points
                    .iter()
                    .rev()
                    .find(|(t, _)| reaches(l, *t, levels))
                    .map_or(0, |&(_, v)| quantize_up(v, levels))
            })
            .collect();
        Self::from_samples(levels, samples)
    }

    pub fn identity(levels: Level) -> Self {
        Self {
            levels,
            samples: (0..=levels).collect(),
        }
    }

    /// `t -> s * t`.
    pub fn scale(levels: Level, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidGreyMap(format!("scale {s} outside [0,1]")));
        }
        Self::from_fn(levels, |t| s * t)
    }

    /// `a * chi_[a,1]`.
    pub fn step(levels: Level, a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidGreyMap(format!("step {a} outside [0,1]")));
        }
        let height = quantize_up(a, levels);
        let samples = (0..=levels as usize)
            .map(|l| if reaches(l, a, levels) { height } else { 0 })
            .collect();
        Self::from_samples(levels, samples)
    }

    /// Step at a lattice level: `(l/L) * chi_[l/L, 1]`.
    pub fn step_at(levels: Level, level: Level) -> Self {
        let samples = (0..=levels)
            .map(|l| if l >= level { level } else { 0 })
            .collect();
        Self { levels, samples }
    }

    /// 0 below `c`, identity from `c` on.
    pub fn zero_below(levels: Level, c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidGreyMap(format!(
                "threshold {c} outside [0,1]"
            )));
        }
        let samples = (0..=levels as usize)
            .map(|l| if reaches(l, c, levels) { l as Level } else { 0 })
            .collect();
        Self::from_samples(levels, samples)
    }

    /// The constant zero map. Not a grey level map in the strict sense; only
    /// permissive systems accept it.
    pub fn zero(levels: Level) -> Self {
        Self {
            levels,
            samples: vec![0; levels as usize + 1],
        }
    }

    pub fn levels(&self) -> Level {
        self.levels
    }

    pub fn samples(&self) -> &[Level] {
        &self.samples
    }

    pub fn eval(&self, level: Level) -> Level {
        self.samples[level as usize]
    }

    pub fn at_zero(&self) -> Level {
        self.samples[0]
    }

    pub fn at_one(&self) -> Level {
        self.samples[self.levels as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.at_one() == 0
    }

    pub fn is_identity(&self) -> bool {
        self.samples
            .iter()
            .enumerate()
            .all(|(l, &v)| v as usize == l)
    }

    /// Generalized inverse `min { t : rho(t) >= alpha }` for `alpha` in
    /// `(0, rho(1)]`. `None` means `alpha > rho(1)`: the cut of `rho(u)` at
    /// `alpha` is empty.
    pub fn beta(&self, alpha: Level) -> Option<Level> {
        if alpha > self.at_one() {
            return None;
        }
        let idx = self.samples.partition_point(|&v| v < alpha);
        Some(idx as Level)
    }

    /// `inf { t : rho(t) > 0 }`, attained on the lattice. `None` for the zero map.
    pub fn r_plus(&self) -> Option<Level> {
        self.samples.iter().position(|&v| v > 0).map(|i| i as Level)
    }

    /// Cellwise composition `rho(u)`.
    pub fn apply(&self, u: &FuzzyGrid) -> Result<FuzzyGrid> {
        if u.levels() != self.levels {
            return Err(Error::Mismatch(format!(
                "grey map has {} levels, grid has {}",
                self.levels,
                u.levels()
            )));
        }
        let values = u.values().iter().map(|&v| self.eval(v)).collect();
        FuzzyGrid::from_values(u.domain().clone(), self.levels, values)
    }

    /// Breakpoints `(l/L, rho(l/L))` at every jump, the inverse of
    /// [`GreyLevelMap::from_breakpoints`].
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let l = self.levels as f64;
        let mut out = Vec::new();
        let mut prev = None;
        for (i, &v) in self.samples.iter().enumerate() {
            if prev != Some(v) && (v > 0 || i == 0) {
                out.push((i as f64 / l, v as f64 / l));
            }
            prev = Some(v);
        }
        out
    }
}

/// Composition of a grey map with a grid: `rho(u)`.
pub fn apply_grey(rho: &GreyLevelMap, u: &FuzzyGrid) -> Result<FuzzyGrid> {
    rho.apply(u)
}

/// Clauses of admissibility for a grey system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// (a) nondecreasing
    Nondecreasing,
    /// (b) right continuous
    RightContinuous,
    /// (c) `rho_j(0) = 0`
    ZeroAtZero,
    /// (d) `rho_j(1) = 1` for some `j`
    SomeReachesOne,
    /// a grey level map is a nonzero function
    Nonzero,
}

impl Clause {
    pub fn label(&self) -> &'static str {
        match self {
            Clause::Nondecreasing => "a (nondecreasing)",
            Clause::RightContinuous => "b (right continuous)",
            Clause::ZeroAtZero => "c (rho(0) = 0)",
            Clause::SomeReachesOne => "d (rho(1) = 1 for some map)",
            Clause::Nonzero => "nonzero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    /// Offending map; `None` for system-wide clauses.
    pub map: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    pub fn describe(&self) -> String {
        self.violations
            .iter()
            .map(|v| match v.map {
                Some(j) => format!("grey {j}: clause {}", v.clause.label()),
                None => format!("clause {}", v.clause.label()),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Per-map outcome of the properness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProperEntry {
    /// `r_+ <= 1/L`, the lattice reading of `r_+ = 0`.
    pub r_plus_minimal: bool,
    /// `beta(rho(1)) = 1`.
    pub beta_of_top: bool,
}

impl ProperEntry {
    pub fn passed(&self) -> bool {
        self.r_plus_minimal && self.beta_of_top
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperReport {
    pub entries: Vec<ProperEntry>,
}

impl ProperReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(ProperEntry::passed)
    }
}

/// A family `(rho_j)` of grey level maps sharing one quantization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreySystem {
    maps: Vec<GreyLevelMap>,
}

impl GreySystem {
    pub fn new(maps: Vec<GreyLevelMap>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidSystem("no grey maps".into()))?;
        if let Some(j) = maps.iter().position(|m| m.levels != first.levels) {
            return Err(Error::Mismatch(format!(
                "grey {j} uses {} levels, grey 0 uses {}",
                maps[j].levels, first.levels
            )));
        }
        Ok(Self { maps })
    }

    pub fn identities(levels: Level, n: usize) -> Self {
        Self {
            maps: vec![GreyLevelMap::identity(levels); n],
        }
    }

    pub fn maps(&self) -> &[GreyLevelMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn levels(&self) -> Level {
        self.maps[0].levels
    }

    /// Indices `j` with `rho_j(1) = 1`.
    pub fn top_indices(&self) -> Vec<usize> {
        self.maps
            .iter()
            .enumerate()
            .filter_map(|(j, m)| (m.at_one() == m.levels).then_some(j))
            .collect()
    }

    pub fn check_admissible(&self) -> AdmissibilityReport {
        let mut violations = Vec::new();
        for (j, m) in self.maps.iter().enumerate() {
            if m.samples.windows(2).any(|w| w[0] > w[1]) {
                violations.push(Violation {
                    clause: Clause::Nondecreasing,
                    map: Some(j),
                });
            }
            if m.is_zero() {
                violations.push(Violation {
                    clause: Clause::Nonzero,
                    map: Some(j),
                });
            }
            if m.at_zero() != 0 {
                violations.push(Violation {
                    clause: Clause::ZeroAtZero,
                    map: Some(j),
                });
            }
        }
        if self.top_indices().is_empty() {
            violations.push(Violation {
                clause: Clause::SomeReachesOne,
                map: None,
            });
        }
        AdmissibilityReport { violations }
    }

    pub fn check_proper(&self) -> ProperReport {
        let entries = self
            .maps
            .iter()
            .map(|m| ProperEntry {
                r_plus_minimal: m.r_plus().is_some_and(|r| r <= 1),
                beta_of_top: m.at_one() > 0 && m.beta(m.at_one()) == Some(m.levels),
            })
            .collect();
        ProperReport { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainBox;
    use std::sync::Arc;

    const L: Level = 255;

    #[test]
    fn beta_of_step_is_the_step_point() {
        let rho = GreyLevelMap::step_at(L, 100);
        for a in 1..=100 {
            assert_eq!(rho.beta(a), Some(100));
        }
        assert_eq!(rho.beta(101), None);
    }

    #[test]
    fn beta_of_identity_is_identity() {
        let rho = GreyLevelMap::identity(L);
        for a in 1..=L {
            assert_eq!(rho.beta(a), Some(a));
        }
    }

    #[test]
    fn beta_of_half_scale() {
        // rho(l) = ceil(l / 2), so rho(t) >= a first holds at t = 2a - 1
        let rho = GreyLevelMap::scale(L, 0.5).unwrap();
        assert_eq!(rho.at_one(), 128);
        for a in 1..=128u16 {
            let b = rho.beta(a).unwrap();
            assert_eq!(b, 2 * a - 1);
            assert!(rho.eval(b) >= a && (b == 0 || rho.eval(b - 1) < a));
        }
        assert_eq!(rho.beta(129), None);
    }

    #[test]
    fn r_plus_examples() {
        assert_eq!(GreyLevelMap::identity(L).r_plus(), Some(1));
        assert_eq!(GreyLevelMap::step_at(L, 77).r_plus(), Some(77));
        let lifted = GreyLevelMap::from_samples(2, vec![1, 1, 2]).unwrap();
        assert_eq!(lifted.r_plus(), Some(0));
        assert_eq!(GreyLevelMap::zero(L).r_plus(), None);
    }

    #[test]
    fn positive_root_lifts_cut_to_whole_space() {
        let d = Arc::new(DomainBox::unit_interval(4).unwrap());
        let u = FuzzyGrid::new(d, 2, vec![0, 1, 2, 0]).unwrap();
        let rho = GreyLevelMap::from_samples(2, vec![1, 1, 2]).unwrap();
        let v = rho.apply(&u).unwrap();
        assert_eq!(v.alpha_cut(0).len(), 4);
        assert_eq!(rho.beta(1), Some(0));
    }

    #[test]
    fn apply_identity_and_step() {
        let d = Arc::new(DomainBox::unit_interval(5).unwrap());
        let u = FuzzyGrid::new(d, L, vec![0, 40, 100, 200, 255]).unwrap();
        assert_eq!(GreyLevelMap::identity(L).apply(&u).unwrap(), u);
        let rho = GreyLevelMap::step_at(L, 100);
        let v = rho.apply(&u).unwrap();
        for a in 101..=L {
            assert!(v.alpha_cut(a).is_empty());
        }
        for a in 1..=100 {
            assert_eq!(v.alpha_cut(a), u.alpha_cut(100));
        }
    }

    #[test]
    fn shorthand_constructors() {
        let s = GreyLevelMap::step(L, 0.5).unwrap();
        assert_eq!(s.r_plus(), Some(128));
        assert_eq!(s.at_one(), 128);
        let z = GreyLevelMap::zero_below(L, 0.5).unwrap();
        assert_eq!(z.eval(127), 0);
        assert_eq!(z.eval(128), 128);
        assert_eq!(z.at_one(), L);
        assert!(GreyLevelMap::scale(L, 1.5).is_err());
    }

    #[test]
    fn breakpoints_round_trip() {
        for rho in [
            GreyLevelMap::identity(L),
            GreyLevelMap::scale(L, 0.5).unwrap(),
            GreyLevelMap::step_at(L, 31),
            GreyLevelMap::zero_below(L, 0.3).unwrap(),
            GreyLevelMap::from_samples(3, vec![1, 1, 2, 3]).unwrap(),
        ] {
            let bp = rho.breakpoints();
            assert_eq!(
                GreyLevelMap::from_breakpoints(rho.levels(), &bp).unwrap(),
                rho
            );
        }
    }

    #[test]
    fn breakpoints_validation() {
        assert!(GreyLevelMap::from_breakpoints(L, &[(0.5, 0.2), (0.4, 0.3)]).is_err());
        assert!(GreyLevelMap::from_breakpoints(L, &[(0.1, 0.5), (0.4, 0.3)]).is_err());
        assert!(GreyLevelMap::from_breakpoints(L, &[]).is_err());
        let rho = GreyLevelMap::from_breakpoints(4, &[(0.5, 0.25), (1.0, 1.0)]).unwrap();
        assert_eq!(rho.samples(), &[0, 0, 1, 1, 4]);
    }

    #[test]
    fn samples_must_be_monotone() {
        assert!(GreyLevelMap::from_samples(2, vec![0, 2, 1]).is_err());
        assert!(GreyLevelMap::from_samples(2, vec![0, 1]).is_err());
    }

    #[test]
    fn admissibility_clauses() {
        let ids = GreySystem::identities(L, 3);
        assert!(ids.check_admissible().passed());

        let lifted = GreyLevelMap::from_fn(L, |t| 0.1 + 0.9 * t).unwrap();
        let sys = GreySystem::new(vec![GreyLevelMap::identity(L), lifted]).unwrap();
        let rep = sys.check_admissible();
        assert!(rep.violates(Clause::ZeroAtZero));
        assert_eq!(rep.violations[0].map, Some(1));

        let dim = GreyLevelMap::scale(L, 0.9).unwrap();
        let sys = GreySystem::new(vec![dim.clone(), dim]).unwrap();
        let rep = sys.check_admissible();
        assert!(rep.violates(Clause::SomeReachesOne));
        assert!(!rep.violates(Clause::ZeroAtZero));

        let sys = GreySystem::new(vec![GreyLevelMap::identity(L), GreyLevelMap::zero(L)]).unwrap();
        assert!(sys.check_admissible().violates(Clause::Nonzero));
    }

    #[test]
    fn properness() {
        assert!(GreySystem::identities(L, 2).check_proper().passed());
        let half = GreyLevelMap::scale(L, 0.5).unwrap();
        let sys = GreySystem::new(vec![
            half.clone(),
            half.clone(),
            half,
            GreyLevelMap::identity(L),
        ])
        .unwrap();
        assert!(sys.check_proper().passed());
        let step = GreySystem::new(vec![
            GreyLevelMap::step_at(L, 100),
            GreyLevelMap::identity(L),
        ])
        .unwrap();
        let rep = step.check_proper();
        assert!(!rep.passed());
        assert!(!rep.entries[0].r_plus_minimal);
        assert!(rep.entries[1].passed());
    }

    #[test]
    fn mismatched_levels_rejected() {
        assert!(
            GreySystem::new(vec![GreyLevelMap::identity(4), GreyLevelMap::identity(5)]).is_err()
        );
        let d = Arc::new(DomainBox::unit_interval(2).unwrap());
        let u = FuzzyGrid::universe(d, 4);
        assert!(GreyLevelMap::identity(5).apply(&u).is_err());
    }
}
