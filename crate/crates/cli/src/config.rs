//! Line-oriented system description.
//!
//! ```text
//! # doubling map on the circle
//! [domain]
//! dim = 1
//! lo = 0
//! hi = 1
//! cells = 256
//! wrap = 1
//!
//! [system]
//! degree = 2
//! levels = 255
//!
//! [map]
//! blocks = 0.5 0
//! offset = 0
//!
//! [grey]
//! spec = id
//! ```
//!
//! `[map]` and `[grey]` sections repeat, one pair per map, matched by order.
//! `blocks` lists the `degree` blocks of size `dim x dim` row-major, block 0
//! (applied to the newest iterate) first. Lists may be separated by spaces
//! or commas. `#` starts a comment.
//!
//! Grey specs: `id`, `scale:s`, `step:a`, `zero-below:c`, `zero` (needs
//! `permissive = 1` under `[system]`), or breakpoints `(t, v) (t, v) ...`
//! describing a right-continuous step function.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use gifzs::{
    AffineContraction, Clause, CrispGifs, DomainBox, Error as CoreError, Gifzs, GreyLevelMap,
    GreySystem, Level, RunOptions,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: Vec<usize>,
    pub wrap: bool,
}

impl DomainConfig {
    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn build(&self) -> Result<DomainBox, CoreError> {
        Ok(
            DomainBox::new(self.lo.clone(), self.hi.clone(), self.cells.clone())?
                .with_wrap(self.wrap),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapConfig {
    pub blocks: Vec<f64>,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GreySpec {
    Identity,
    Scale(f64),
    Step(f64),
    ZeroBelow(f64),
    Zero,
    Breakpoints(Vec<(f64, f64)>),
}

impl GreySpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text.starts_with('(') {
            return parse_breakpoints(text).map(GreySpec::Breakpoints);
        }
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (text, None),
        };
        let number = |what: &str| -> Result<f64, String> {
            let a = arg.ok_or_else(|| format!("`{what}` needs a value, as in `{what}:0.5`"))?;
            parse_float(a)
        };
        match name {
            "id" | "identity" if arg.is_none() => Ok(GreySpec::Identity),
            "zero" if arg.is_none() => Ok(GreySpec::Zero),
            "scale" => number("scale").map(GreySpec::Scale),
            "step" => number("step").map(GreySpec::Step),
            "zero-below" => number("zero-below").map(GreySpec::ZeroBelow),
            _ => Err(format!(
                "unknown grey spec `{text}` (expected id, scale:s, step:a, zero-below:c, zero or breakpoints)"
            )),
        }
    }

    pub fn build(&self, levels: Level) -> Result<GreyLevelMap, CoreError> {
        match self {
            GreySpec::Identity => Ok(GreyLevelMap::identity(levels)),
            GreySpec::Scale(s) => GreyLevelMap::scale(levels, *s),
            GreySpec::Step(a) => GreyLevelMap::step(levels, *a),
            GreySpec::ZeroBelow(c) => GreyLevelMap::zero_below(levels, *c),
            GreySpec::Zero => Ok(GreyLevelMap::zero(levels)),
            GreySpec::Breakpoints(p) => GreyLevelMap::from_breakpoints(levels, p),
        }
    }
}

impl fmt::Display for GreySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreySpec::Identity => write!(f, "id"),
            GreySpec::Scale(s) => write!(f, "scale:{s}"),
            GreySpec::Step(a) => write!(f, "step:{a}"),
            GreySpec::ZeroBelow(c) => write!(f, "zero-below:{c}"),
            GreySpec::Zero => write!(f, "zero"),
            GreySpec::Breakpoints(p) => {
                let parts: Vec<String> = p.iter().map(|(t, v)| format!("({t}, {v})")).collect();
                write!(f, "{}", parts.join(" "))
            }
        }
    }
}

fn parse_breakpoints(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let (pair, tail) = body
            .split_once(')')
            .ok_or_else(|| "unclosed `(`".to_string())?;
        let (t, v) = pair
            .split_once(',')
            .ok_or_else(|| format!("breakpoint `({pair})` needs two values"))?;
        out.push((parse_float(t)?, parse_float(v)?));
        rest = tail.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSpec {
    /// `u = 1` in every slot.
    Universe,
    /// Indicator of the box-center cell in every slot.
    Center,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub seed: SeedSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = RunOptions::default();
        Self {
            max_iter: d.max_iter,
            tol: d.tol,
            seed: SeedSpec::Universe,
        }
    }
}

impl RunConfig {
    pub fn options(&self) -> RunOptions {
        RunOptions {
            max_iter: self.max_iter,
            tol: self.tol,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub domain: DomainConfig,
    pub degree: usize,
    pub levels: Level,
    pub permissive: bool,
    pub maps: Vec<MapConfig>,
    pub greys: Vec<GreySpec>,
    pub run: RunConfig,
}

fn parse_float(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v: f64 = if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|_| format!("`{s}` is not a number"))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|_| format!("`{s}` is not a number"))?;
        a / b
    } else {
        s.parse().map_err(|_| format!("`{s}` is not a number"))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    split_list(s).map(parse_float).collect()
}

fn parse_usizes(s: &str) -> Result<Vec<usize>, String> {
    split_list(s)
        .map(|t| {
            t.parse()
                .map_err(|_| format!("`{t}` is not a nonnegative integer"))
        })
        .collect()
}

fn parse_flag(s: &str) -> Result<bool, String> {
    match s.trim() {
        "0" | "false" | "no" => Ok(false),
        "1" | "true" | "yes" => Ok(true),
        other => Err(format!("`{other}` is not 0 or 1")),
    }
}

/// Keys of one section with the line each came from.
struct Section {
    name: String,
    line: usize,
    entries: HashMap<String, (String, usize)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn finish(self, label: &str) -> Result<(), ConfigError> {
        if let Some((key, (_, line))) = self.entries.into_iter().min_by_key(|(_, (_, l))| *l) {
            return Err(ConfigError::new(
                Some(line),
                format!("{label}.{key}"),
                "unknown key",
            ));
        }
        Ok(())
    }
}

fn lex(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(Some(line), "section", "missing `]`"))?
                .trim();
            if !["domain", "system", "map", "grey", "run"].contains(&name) {
                return Err(ConfigError::new(
                    Some(line),
                    "section",
                    format!("unknown section `[{name}]`"),
                ));
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: HashMap::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            ConfigError::new(
                Some(line),
                "syntax",
                format!("expected `key = value`, got `{content}`"),
            )
        })?;
        let section = sections.last_mut().ok_or_else(|| {
            ConfigError::new(Some(line), key.trim(), "key outside of any section")
        })?;
        let key = key.trim().to_string();
        if section.entries.contains_key(&key) {
            return Err(ConfigError::new(
                Some(line),
                format!("{}.{key}", section.name),
                "duplicate key",
            ));
        }
        section
            .entries
            .insert(key, (value.trim().to_string(), line));
    }
    Ok(sections)
}

fn field<T>(
    section: &mut Section,
    label: &str,
    key: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<(T, usize)>, ConfigError> {
    match section.take(key) {
        None => Ok(None),
        Some((value, line)) => parse(&value)
            .map(|v| Some((v, line)))
            .map_err(|m| ConfigError::new(Some(line), format!("{label}.{key}"), m)),
    }
}

fn required<T>(
    section: &mut Section,
    label: &str,
    key: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<(T, usize), ConfigError> {
    let line = section.line;
    field(section, label, key, parse)?
        .ok_or_else(|| ConfigError::new(Some(line), format!("{label}.{key}"), "missing"))
}

/// Where each map and grey section started, for diagnostics.
#[derive(Debug, Clone, Default)]
struct Positions {
    maps: Vec<usize>,
    greys: Vec<usize>,
}

impl SystemConfig {
    /// Parses and validates a config. The result is guaranteed to build.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let (config, positions) = Self::parse_unchecked(text)?;
        config.validate(&positions)?;
        Ok(config)
    }

    fn parse_unchecked(text: &str) -> Result<(Self, Positions), ConfigError> {
        let mut domain = None;
        let mut system = None;
        let mut run = None;
        let mut maps = Vec::new();
        let mut greys = Vec::new();
        for s in lex(text)? {
            let once = |slot: &Option<Section>, s: &Section| {
                if slot.is_some() {
                    Err(ConfigError::new(
                        Some(s.line),
                        "section",
                        format!("`[{}]` given twice", s.name),
                    ))
                } else {
                    Ok(())
                }
            };
            match s.name.as_str() {
                "domain" => {
                    once(&domain, &s)?;
                    domain = Some(s);
                }
                "system" => {
                    once(&system, &s)?;
                    system = Some(s);
                }
                "run" => {
                    once(&run, &s)?;
                    run = Some(s);
                }
                "map" => maps.push(s),
                _ => greys.push(s),
            }
        }

        let mut d =
            domain.ok_or_else(|| ConfigError::new(None, "domain", "missing `[domain]` section"))?;
        let (dim, dim_line) = required(&mut d, "domain", "dim", |v| {
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("`{v}` is not a positive integer"))
        })?;
        let stretch = |v: Vec<f64>, what: &str, line: usize| -> Result<Vec<f64>, ConfigError> {
            match v.len() {
                1 => Ok(vec![v[0]; dim]),
                n if n == dim => Ok(v),
                n => Err(ConfigError::new(
                    Some(line),
                    format!("domain.{what}"),
                    format!("{n} values for dimension {dim}"),
                )),
            }
        };
        let lo = match field(&mut d, "domain", "lo", parse_floats)? {
            Some((v, line)) => stretch(v, "lo", line)?,
            None => vec![0.0; dim],
        };
        let hi = match field(&mut d, "domain", "hi", parse_floats)? {
            Some((v, line)) => stretch(v, "hi", line)?,
            None => vec![1.0; dim],
        };
        let (cells, cells_line) = required(&mut d, "domain", "cells", parse_usizes)?;
        let cells = match cells.len() {
            1 => vec![cells[0]; dim],
            n if n == dim => cells,
            n => {
                return Err(ConfigError::new(
                    Some(cells_line),
                    "domain.cells",
                    format!("{n} values for dimension {dim}"),
                ))
            }
        };
        let wrap = field(&mut d, "domain", "wrap", parse_flag)?.is_some_and(|(w, _)| w);
        d.finish("domain")?;
        let domain = DomainConfig {
            lo,
            hi,
            cells,
            wrap,
        };
        domain
            .build()
            .map_err(|e| ConfigError::new(Some(dim_line), "domain", e.to_string()))?;

        let (mut degree, mut levels, mut permissive) = (1, gifzs::DEFAULT_LEVELS, false);
        if let Some(mut s) = system {
            if let Some((v, _)) = field(&mut s, "system", "degree", |v| {
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| format!("`{v}` is not a positive integer"))
            })? {
                degree = v;
            }
            if let Some((v, _)) = field(&mut s, "system", "levels", |v| {
                v.trim()
                    .parse::<Level>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| format!("`{v}` is not an integer in 1..=65535"))
            })? {
                levels = v;
            }
            if let Some((v, _)) = field(&mut s, "system", "permissive", parse_flag)? {
                permissive = v;
            }
            s.finish("system")?;
        }

        let mut positions = Positions::default();
        let mut map_configs = Vec::new();
        for (j, mut s) in maps.into_iter().enumerate() {
            let label = format!("map {j}");
            let (blocks, bl) = required(&mut s, &label, "blocks", parse_floats)?;
            if blocks.len() != degree * dim * dim {
                return Err(ConfigError::new(
                    Some(bl),
                    format!("{label}.blocks"),
                    format!(
                        "{} values, expected degree x dim x dim = {}",
                        blocks.len(),
                        degree * dim * dim
                    ),
                ));
            }
            let (offset, ol) = required(&mut s, &label, "offset", parse_floats)?;
            if offset.len() != dim {
                return Err(ConfigError::new(
                    Some(ol),
                    format!("{label}.offset"),
                    format!("{} values for dimension {dim}", offset.len()),
                ));
            }
            positions.maps.push(s.line);
            s.finish(&label)?;
            map_configs.push(MapConfig { blocks, offset });
        }
        let mut grey_specs = Vec::new();
        for (j, mut s) in greys.into_iter().enumerate() {
            let label = format!("grey {j}");
            let (spec, _) = required(&mut s, &label, "spec", GreySpec::parse)?;
            positions.greys.push(s.line);
            s.finish(&label)?;
            grey_specs.push(spec);
        }

        let mut run_config = RunConfig::default();
        if let Some(mut s) = run {
            if let Some((v, _)) = field(&mut s, "run", "max_iter", |v| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{v}` is not a nonnegative integer"))
            })? {
                run_config.max_iter = v;
            }
            if let Some((v, line)) = field(&mut s, "run", "tol", parse_float)? {
                if v < 0.0 {
                    return Err(ConfigError::new(
                        Some(line),
                        "run.tol",
                        "must be nonnegative",
                    ));
                }
                run_config.tol = v;
            }
            if let Some((v, _)) = field(&mut s, "run", "seed", |v| match v.trim() {
                "universe" => Ok(SeedSpec::Universe),
                "center" => Ok(SeedSpec::Center),
                other => Err(format!(
                    "unknown seed `{other}` (expected universe or center)"
                )),
            })? {
                run_config.seed = v;
            }
            s.finish("run")?;
        }

        Ok((
            SystemConfig {
                domain,
                degree,
                levels,
                permissive,
                maps: map_configs,
                greys: grey_specs,
                run: run_config,
            },
            positions,
        ))
    }

    fn validate(&self, at: &Positions) -> Result<Gifzs, ConfigError> {
        let map_line = |j: usize| at.maps.get(j).copied();
        let grey_line = |j: usize| at.greys.get(j).copied();
        if self.maps.is_empty() {
            return Err(ConfigError::new(
                None,
                "map",
                "at least one `[map]` section is required",
            ));
        }
        if self.maps.len() != self.greys.len() {
            return Err(ConfigError::new(
                grey_line(self.greys.len().min(self.maps.len())).or(map_line(self.greys.len())),
                "grey",
                format!(
                    "{} maps but {} grey maps",
                    self.maps.len(),
                    self.greys.len()
                ),
            ));
        }
        let domain = Arc::new(
            self.domain
                .build()
                .map_err(|e| ConfigError::new(None, "domain", e.to_string()))?,
        );
        let dim = self.domain.dim();
        let mut maps = Vec::new();
        for (j, m) in self.maps.iter().enumerate() {
            let label = format!("map {j}");
            if m.blocks.len() != self.degree * dim * dim || m.offset.len() != dim {
                return Err(ConfigError::new(
                    map_line(j),
                    label,
                    "block shape does not match degree and dimension",
                ));
            }
            let blocks = m.blocks.chunks(dim * dim).map(|c| c.to_vec()).collect();
            let f = AffineContraction::new(blocks, m.offset.clone()).map_err(|e| match e {
                CoreError::InvalidMap { reason, .. } => {
                    ConfigError::new(map_line(j), &label, reason)
                }
                other => ConfigError::new(map_line(j), &label, other.to_string()),
            })?;
            if f.lip_bound() >= 1.0 {
                return Err(ConfigError::new(
                    map_line(j),
                    label,
                    format!("Lipschitz bound {} >= 1", f.lip_bound()),
                ));
            }
            maps.push(f);
        }
        let gifs = CrispGifs::new(domain, maps)
            .map_err(|e| ConfigError::new(None, "map", e.to_string()))?;
        let mut greys = Vec::new();
        for (j, g) in self.greys.iter().enumerate() {
            let rho = g
                .build(self.levels)
                .map_err(|e| ConfigError::new(grey_line(j), format!("grey {j}"), e.to_string()))?;
            greys.push(rho);
        }
        let greys =
            GreySystem::new(greys).map_err(|e| ConfigError::new(None, "grey", e.to_string()))?;
        let report = greys.check_admissible();
        if let Some(v) = report
            .violations
            .iter()
            .find(|v| !(self.permissive && v.clause == Clause::Nonzero))
        {
            let (line, label) = match v.map {
                Some(j) => (grey_line(j), format!("grey {j}")),
                None => (None, "grey".to_string()),
            };
            let mut message = format!("violates admissibility clause {}", v.clause.label());
            if v.clause == Clause::Nonzero {
                message.push_str("; set `permissive = 1` under [system] to allow it");
            }
            return Err(ConfigError::new(line, label, message));
        }
        let build = if self.permissive {
            Gifzs::new_permissive(gifs, greys)
        } else {
            Gifzs::new(gifs, greys)
        };
        build.map_err(|e| ConfigError::new(None, "system", e.to_string()))
    }

    /// The validated system.
    pub fn build(&self) -> Result<Gifzs, ConfigError> {
        self.validate(&Positions::default())
    }

    /// Describes an existing system; the run section gets defaults.
    pub fn from_system(z: &Gifzs, greys: Vec<GreySpec>) -> Self {
        let d = z.domain();
        SystemConfig {
            domain: DomainConfig {
                lo: d.lo().to_vec(),
                hi: d.hi().to_vec(),
                cells: d.cells().to_vec(),
                wrap: d.wrap(),
            },
            degree: z.degree(),
            levels: z.levels(),
            permissive: z.is_permissive(),
            maps: z
                .gifs()
                .maps()
                .iter()
                .map(|f| MapConfig {
                    blocks: f.blocks().concat(),
                    offset: f.offset().to_vec(),
                })
                .collect(),
            greys,
            run: RunConfig::default(),
        }
    }

    pub fn serialize(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        out.push_str("[domain]\n");
        out.push_str(&format!("dim = {}\n", self.domain.dim()));
        out.push_str(&format!("lo = {}\n", join(&self.domain.lo)));
        out.push_str(&format!("hi = {}\n", join(&self.domain.hi)));
        let cells: Vec<String> = self.domain.cells.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("cells = {}\n", cells.join(" ")));
        out.push_str(&format!("wrap = {}\n", self.domain.wrap as u8));
        out.push_str("\n[system]\n");
        out.push_str(&format!("degree = {}\n", self.degree));
        out.push_str(&format!("levels = {}\n", self.levels));
        out.push_str(&format!("permissive = {}\n", self.permissive as u8));
        for (m, g) in self.maps.iter().zip(&self.greys) {
            out.push_str("\n[map]\n");
            out.push_str(&format!("blocks = {}\n", join(&m.blocks)));
            out.push_str(&format!("offset = {}\n", join(&m.offset)));
            out.push_str("\n[grey]\n");
            out.push_str(&format!("spec = {g}\n"));
        }
        out.push_str("\n[run]\n");
        out.push_str(&format!("max_iter = {}\n", self.run.max_iter));
        out.push_str(&format!("tol = {}\n", self.run.tol));
        let seed = match self.run.seed {
            SeedSpec::Universe => "universe",
            SeedSpec::Center => "center",
        };
        out.push_str(&format!("seed = {seed}\n"));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DOUBLING: &str = "\
[domain]
dim = 1
cells = 64
wrap = 1

[system]
degree = 2

[map]
blocks = 1/2 0
offset = 0
[grey]
spec = id

[map]
blocks = 0.5, 0
offset = 0.5
[grey]
spec = id
";

    #[test]
    fn parses_a_small_system() {
        let c = SystemConfig::parse(DOUBLING).unwrap();
        assert_eq!(c.degree, 2);
        assert_eq!(c.maps.len(), 2);
        assert!(c.domain.wrap);
        assert_eq!(c.maps[0].blocks, vec![0.5, 0.0]);
        assert_eq!(c.levels, 255);
        let z = c.build().unwrap();
        assert_eq!(z.lambda(), 0.5);
    }

    #[test]
    fn lipschitz_diagnostic_names_the_map() {
        let text = DOUBLING.replace("blocks = 0.5, 0", "blocks = 1.25 0");
        let e = SystemConfig::parse(&text).unwrap_err();
        assert_eq!(e.field, "map 1");
        assert_eq!(e.message, "Lipschitz bound 1.25 >= 1");
        assert_eq!(e.line, Some(15));
    }

    #[test]
    fn admissibility_diagnostic_cites_the_clause() {
        let text = DOUBLING.replacen("spec = id", "spec = (0, 0.1) (1, 1)", 1);
        let e = SystemConfig::parse(&text).unwrap_err();
        assert_eq!(e.field, "grey 0");
        assert!(e.message.contains("clause c"), "{e}");
        let text = DOUBLING.replacen("spec = id", "spec = zero", 1);
        let e = SystemConfig::parse(&text).unwrap_err();
        assert!(e.message.contains("nonzero"), "{e}");
        let text = text.replace("degree = 2", "degree = 2\npermissive = 1");
        assert!(SystemConfig::parse(&text).is_ok());
    }

    #[test]
    fn shape_diagnostics() {
        let text = DOUBLING.replace("blocks = 1/2 0", "blocks = 0.5");
        let e = SystemConfig::parse(&text).unwrap_err();
        assert_eq!((e.field.as_str(), e.line), ("map 0.blocks", Some(10)));
        let e =
            SystemConfig::parse(&DOUBLING.replace("offset = 0.5", "offset = 0.5 1")).unwrap_err();
        assert_eq!(e.field, "map 1.offset");
        let e = SystemConfig::parse(&DOUBLING.replace("cells = 64", "cells = 64\ncolour = red"))
            .unwrap_err();
        assert_eq!(e.field, "domain.colour");
        let e = SystemConfig::parse(&format!("{DOUBLING}[runs]\n")).unwrap_err();
        assert_eq!(e.field, "section");
        let e = SystemConfig::parse(&format!("{DOUBLING}[map]\nblocks = 0.1 0\noffset = 0\n"))
            .unwrap_err();
        assert!(e.message.contains("3 maps but 2 grey maps"), "{e}");
    }

    #[test]
    fn grey_specs_round_trip() {
        for s in [
            "id",
            "scale:0.5",
            "step:1",
            "zero-below:0.25",
            "zero",
            "(0, 0) (0.5, 0.25) (1, 1)",
        ] {
            let g = GreySpec::parse(s).unwrap();
            assert_eq!(GreySpec::parse(&g.to_string()).unwrap(), g);
        }
        assert_eq!(GreySpec::parse("scale:1/2").unwrap(), GreySpec::Scale(0.5));
        assert!(GreySpec::parse("scale").is_err());
        assert!(GreySpec::parse("gamma:2").is_err());
        assert!(GreySpec::parse("(0, 1").is_err());
    }

    fn arb_grey() -> impl Strategy<Value = GreySpec> {
        prop_oneof![
            Just(GreySpec::Identity),
            (0.0f64..=1.0).prop_map(GreySpec::Scale),
            (0.0f64..=1.0).prop_map(GreySpec::Step),
            (0.0f64..=1.0).prop_map(GreySpec::ZeroBelow),
            proptest::collection::vec(0.0f64..1.0, 1..5).prop_map(|mut ts| {
                ts.sort_by(f64::total_cmp);
                ts.dedup();
                let n = ts.len() as f64;
                GreySpec::Breakpoints(
                    ts.into_iter()
                        .enumerate()
                        .map(|(i, t)| (t, (i + 1) as f64 / n))
                        .collect(),
                )
            }),
        ]
    }

    fn arb_config() -> impl Strategy<Value = SystemConfig> {
        (1usize..=2, 1usize..=2, 1usize..=3, 1u16..=1000).prop_flat_map(
            |(dim, degree, n, levels)| {
                let map = (
                    proptest::collection::vec(-1.0f64..1.0, degree * dim * dim),
                    proptest::collection::vec(-2.0f64..2.0, dim),
                )
                    .prop_map(move |(b, offset)| {
                        // keep the sum of block norms well below 1
                        let scale = 0.9 / (degree * dim) as f64;
                        MapConfig {
                            blocks: b.iter().map(|x| x * scale).collect(),
                            offset,
                        }
                    });
                (
                    proptest::collection::vec(-3.0f64..0.0, dim),
                    proptest::collection::vec(0.5f64..3.0, dim),
                    proptest::collection::vec(1usize..40, dim),
                    any::<bool>(),
                    proptest::collection::vec(map, n),
                    proptest::collection::vec(arb_grey(), n),
                    (0usize..5000, 0.0f64..0.1, any::<bool>()),
                )
                    .prop_map(
                        move |(lo, hi, cells, wrap, maps, mut greys, (max_iter, tol, center))| {
                            greys[0] = GreySpec::Identity;
                            SystemConfig {
                                domain: DomainConfig {
                                    lo,
                                    hi,
                                    cells,
                                    wrap,
                                },
                                degree,
                                levels,
                                permissive: false,
                                maps,
                                greys,
                                run: RunConfig {
                                    max_iter,
                                    tol,
                                    seed: if center {
                                        SeedSpec::Center
                                    } else {
                                        SeedSpec::Universe
                                    },
                                },
                            }
                        },
                    )
            },
        )
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(c in arb_config()) {
            let text = c.serialize();
            let back = SystemConfig::parse(&text);
            prop_assert!(back.is_ok(), "{}\n{}", back.unwrap_err(), text);
            prop_assert_eq!(back.unwrap(), c);
        }
    }
}
