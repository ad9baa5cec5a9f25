use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gifzs::{
    approximate_ifzs, center_seeds, collage, compare_cuts, crisp_attractor, d_infty, d_infty_m,
    full_seeds, gfhb_suppush, ghb_apply, iterate_with, monotone_iterate, universe_seeds, Algorithm,
    Direction, DomainBox, FuzzyGrid, Gifzs, Level, RunOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, GreySpec, SeedSpec, SystemConfig};
use crate::pgm::{Pgm, PgmError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] gifzs::Error),
    #[error("no fixed point after {0} iterations")]
    Unconverged(usize),
    #[error("{0} verification checks failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Unconverged(_) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_config(path: &Path) -> CliResult<SystemConfig> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
    SystemConfig::parse(&text).map_err(|e| {
        CliError::Config(ConfigError {
            field: format!("{}: {}", path.display(), e.field),
            ..e
        })
    })
}

pub fn load_image(path: &Path) -> CliResult<Pgm> {
    Pgm::decode(&read(path)?).map_err(|PgmError(message)| CliError::Image {
        path: path.to_path_buf(),
        message,
    })
}

/// Box for an image: 1-D when the image is a strip and no 2-D bounds were
/// given, 2-D otherwise. Missing bounds default to the unit box.
pub fn image_domain(
    pgm: &Pgm,
    lo: Option<&[f64]>,
    hi: Option<&[f64]>,
    wrap: bool,
) -> CliResult<Arc<DomainBox>> {
    let given = lo.map(<[f64]>::len).or(hi.map(<[f64]>::len));
    let dim = match given {
        Some(d @ (1 | 2)) => d,
        Some(d) => {
            return Err(CliError::Input(format!(
                "{d} bounds given; images are 1-D or 2-D"
            )))
        }
        None if pgm.height == 1 => 1,
        None => 2,
    };
    if dim == 1 && pgm.height != 1 {
        return Err(CliError::Input(format!(
            "1-D bounds for an image of height {}",
            pgm.height
        )));
    }
    let lo = lo.map(<[f64]>::to_vec).unwrap_or(vec![0.0; dim]);
    let hi = hi.map(<[f64]>::to_vec).unwrap_or(vec![1.0; dim]);
    if lo.len() != dim || hi.len() != dim {
        return Err(CliError::Input(
            "--lo and --hi have different lengths".into(),
        ));
    }
    let cells = if dim == 1 {
        vec![pgm.width]
    } else {
        vec![pgm.width, pgm.height]
    };
    Ok(Arc::new(DomainBox::new(lo, hi, cells)?.with_wrap(wrap)))
}

fn seeds(z: &Gifzs, spec: SeedSpec) -> Vec<FuzzyGrid> {
    match spec {
        SeedSpec::Universe => universe_seeds(z),
        SeedSpec::Center => center_seeds(z),
    }
}

/// Number of cells of the box whose images leave it under some map.
pub fn clamped_cells(z: &Gifzs) -> CliResult<usize> {
    Ok(ghb_apply(z.gifs(), &full_seeds(z.gifs()))?.clamped)
}

/// Bar plot of a 1-D grid: column `x` is filled from the bottom up to
/// `u(x) / L` of `height` rows.
pub fn bar_plot(u: &FuzzyGrid, height: usize) -> CliResult<Pgm> {
    if u.domain().dim() != 1 {
        return Err(CliError::Input("bar plots need a 1-D system".into()));
    }
    let width = u.len();
    let levels = u.levels();
    let mut samples = vec![0; width * height];
    for x in 0..width {
        let filled = (u.level(x) as usize * height).div_ceil(levels as usize);
        for row in height - filled..height {
            samples[row * width + x] = levels;
        }
    }
    Ok(Pgm {
        width,
        height,
        maxval: levels,
        samples,
    })
}

pub struct RenderArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub trace: Option<PathBuf>,
    pub algorithm: Algorithm,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub bars: Option<usize>,
}

pub fn render(args: &RenderArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(&args.config)?;
    let z = cfg.build()?;
    let mut opts = cfg.run.options();
    opts.max_iter = args.max_iter.unwrap_or(opts.max_iter);
    opts.tol = args.tol.unwrap_or(opts.tol);

    let clamped = clamped_cells(&z)?;
    if clamped > 0 {
        let _ = writeln!(
            err,
            "warning: {clamped} cells map outside the box and were clamped to its boundary"
        );
    }
    let run = iterate_with(&z, &seeds(&z, cfg.run.seed), &opts, args.algorithm)?;
    let image = match args.bars {
        Some(h) => bar_plot(&run.attractor, h)?,
        None => Pgm::from_grid(&run.attractor).map_err(|PgmError(m)| CliError::Input(m))?,
    };
    write(&args.out, &image.encode())?;

    let trace_path = args
        .trace
        .clone()
        .unwrap_or_else(|| args.out.with_extension("tsv"));
    let mut trace = String::from("iter\td_infty_change\n");
    for (k, d) in run.decay.iter().enumerate() {
        trace.push_str(&format!("{}\t{d}\n", k + 1));
    }
    write(&trace_path, trace.as_bytes())?;

    let _ = writeln!(
        out,
        "iterations: {}\nconverged: {}\nexact: {}\nimage: {}\ntrace: {}",
        run.iterations,
        run.converged,
        run.collapsed_exact,
        args.out.display(),
        trace_path.display()
    );
    if !run.converged {
        let _ = writeln!(
            err,
            "warning: not converged{}; the image holds the last iterate",
            run.cycle
                .map(|p| format!(" (lattice cycle of period {p})"))
                .unwrap_or_default()
        );
        return Err(CliError::Unconverged(run.iterations));
    }
    Ok(())
}

pub struct DistanceArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    pub wrap: bool,
}

fn normal_grid(path: &Path, pgm: &Pgm, domain: Arc<DomainBox>) -> CliResult<FuzzyGrid> {
    let u = pgm
        .to_grid(domain)
        .map_err(|PgmError(message)| CliError::Image {
            path: path.to_path_buf(),
            message,
        })?;
    if !u.is_normal() {
        return Err(CliError::Image {
            path: path.to_path_buf(),
            message: format!(
                "not a normal fuzzy set: no pixel reaches maxval {}",
                u.levels()
            ),
        });
    }
    Ok(u)
}

pub fn distance(args: &DistanceArgs, out: &mut dyn Write) -> CliResult<f64> {
    let pa = load_image(&args.a)?;
    let pb = load_image(&args.b)?;
    if (pa.width, pa.height, pa.maxval) != (pb.width, pb.height, pb.maxval) {
        return Err(CliError::Input(format!(
            "images differ: {}x{} maxval {} against {}x{} maxval {}",
            pa.width, pa.height, pa.maxval, pb.width, pb.height, pb.maxval
        )));
    }
    let domain = image_domain(&pa, args.lo.as_deref(), args.hi.as_deref(), args.wrap)?;
    let u = normal_grid(&args.a, &pa, domain.clone())?;
    let v = normal_grid(&args.b, &pb, domain)?;
    let d = d_infty(&u, &v)?;
    let _ = writeln!(out, "{d}");
    Ok(d)
}

pub struct ApproximateArgs {
    pub image: PathBuf,
    pub epsilon: f64,
    pub out: PathBuf,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    pub wrap: bool,
}

/// Config text for an approximating system; grey `j` is the step at
/// `heights[j]`.
pub fn approximation_config(z: &Gifzs, heights: &[Level]) -> SystemConfig {
    let l = z.levels() as f64;
    let greys = heights
        .iter()
        .map(|&h| GreySpec::Step(h as f64 / l))
        .collect();
    SystemConfig::from_system(z, greys)
}

pub fn approximate(args: &ApproximateArgs, out: &mut dyn Write) -> CliResult<()> {
    let pgm = load_image(&args.image)?;
    let domain = image_domain(&pgm, args.lo.as_deref(), args.hi.as_deref(), args.wrap)?;
    let target = normal_grid(&args.image, &pgm, domain)?;
    let (z, cert) = approximate_ifzs(&target, args.epsilon).map_err(|e| match e {
        gifzs::Error::EpsilonTooSmall { epsilon, minimum } => CliError::Input(format!(
            "epsilon {epsilon} is too small for this grid; it must exceed {minimum} (4 cell diagonals)"
        )),
        other => other.into(),
    })?;
    let cfg = approximation_config(&z, &cert.heights);
    let mut text = format!(
        "# {} maps approximating {} within epsilon = {}\n",
        z.len(),
        args.image.display(),
        args.epsilon
    );
    text.push_str(&cfg.serialize());
    write(&args.out, text.as_bytes())?;
    let _ = writeln!(
        out,
        "maps: {}\nepsilon: {}\nratio: {}\nresidual: {}\nlambda: {}\nbound: {}\nd_infty: {}\nwithin: {}\nconfig: {}",
        z.len(),
        cert.epsilon,
        cert.ratio,
        cert.collage.residual,
        cert.collage.lambda,
        cert.collage.bound,
        cert.distance(),
        cert.within(),
        args.out.display()
    );
    Ok(())
}

pub struct VerifyArgs {
    pub config: PathBuf,
    pub samples: usize,
    pub seed: u64,
}

/// A random normal grid: independent levels, one cell forced to `L`.
fn random_normal(r: &mut impl Rng, domain: &Arc<DomainBox>, levels: Level) -> FuzzyGrid {
    let mut values: Vec<Level> = (0..domain.len())
        .map(|_| {
            if r.random_bool(0.5) {
                0
            } else {
                r.random_range(0..=levels)
            }
        })
        .collect();
    let top = r.random_range(0..values.len());
    values[top] = levels;
    FuzzyGrid::new(domain.clone(), levels, values).expect("sized to the grid")
}

struct Report<'a> {
    out: &'a mut dyn Write,
    failures: usize,
}

impl Report<'_> {
    fn line(&mut self, name: &str, verdict: Option<bool>, detail: String) {
        let word = match verdict {
            Some(true) => "pass",
            Some(false) => {
                self.failures += 1;
                "fail"
            }
            None => "n/a",
        };
        let _ = if detail.is_empty() {
            writeln!(self.out, "{name}: {word}")
        } else {
            writeln!(self.out, "{name}: {word} ({detail})")
        };
    }
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(&args.config)?;
    let z = cfg.build()?;
    let opts = cfg.run.options();
    let levels = z.levels();
    let domain = z.domain().clone();
    let mut report = Report { out, failures: 0 };

    let run = iterate_with(&z, &seeds(&z, cfg.run.seed), &opts, Algorithm::SupPush)?;
    report.line(
        "converged",
        Some(run.converged),
        format!("{} iterations", run.iterations),
    );
    if run.converged {
        let c = compare_cuts(&z, &run)?;
        let exact = |b: bool| if b { "exact" } else { "within 1 cell diagonal" }.to_string();
        report.line(
            "(1) 0-cut in A_S",
            Some(c.zero_cut_in_as),
            exact(c.zero_cut_in_as_exact),
        );
        report.line("0-cut=A_S", c.zero_cut_eq_as, String::new());
        report.line(
            "(2) A_S' in 1-cut",
            Some(c.as_prime_in_one_cut),
            exact(c.as_prime_in_one_cut_exact),
        );
        report.line("1-cut=A_S'", c.one_cut_eq_as_prime, String::new());
        report.line("(3) crisp", c.crisp, String::new());
        report.line("not crisp", c.not_crisp, String::new());
    }

    let mut r = ChaCha8Rng::seed_from_u64(args.seed);
    let diag = domain.cell_diagonal();
    let lambda = z.lambda();

    let mut samples = vec![run.attractor.clone()];
    samples.extend((0..args.samples).map(|_| random_normal(&mut r, &domain, levels)));
    let mut bad = 0;
    let mut worst = f64::INFINITY;
    for u in &samples {
        let rep = collage(&z, u, Some(&run.attractor))?;
        bad += (rep.holds() != Some(true)) as usize;
        worst = worst.min(rep.bound + rep.slack - rep.actual.unwrap_or(0.0));
    }
    report.line(
        "collage",
        Some(bad == 0),
        format!(
            "{} samples, {bad} violations, smallest margin {worst:.4}",
            samples.len()
        ),
    );

    let a_s = crisp_attractor(z.gifs(), &full_seeds(z.gifs()), &RunOptions::default())?.attractor;
    let mut bad = 0;
    let starts = [
        FuzzyGrid::universe(domain.clone(), levels),
        a_s.indicator(levels)?,
    ];
    for v in &starts {
        let m = monotone_iterate(&z, v, &opts)?;
        let ok = matches!(m.direction, Direction::Nonincreasing | Direction::Fixed)
            && m.violations == 0
            && m.bounded_by_seed;
        bad += !ok as usize;
    }
    report.line(
        "monotone",
        Some(bad == 0),
        format!(
            "{} seeds above the attractor, {bad} violations",
            starts.len()
        ),
    );

    let m = z.degree();
    let mut bad = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..args.samples {
        let us: Vec<FuzzyGrid> = (0..m)
            .map(|_| random_normal(&mut r, &domain, levels))
            .collect();
        let vs: Vec<FuzzyGrid> = (0..m)
            .map(|_| random_normal(&mut r, &domain, levels))
            .collect();
        let lhs = d_infty(&gfhb_suppush(&z, &us)?, &gfhb_suppush(&z, &vs)?)?;
        let rhs = lambda * d_infty_m(&us, &vs)? + 2.0 * diag;
        bad += (lhs > rhs) as usize;
        worst = worst.min(rhs - lhs);
    }
    report.line(
        "contraction",
        Some(bad == 0),
        format!(
            "{} pairs, {bad} violations, smallest margin {worst:.4}",
            args.samples
        ),
    );

    let failures = report.failures;
    let _ = writeln!(
        report.out,
        "result: {}",
        if failures == 0 { "pass" } else { "fail" }
    );
    if failures > 0 {
        return Err(CliError::VerifyFailed(failures));
    }
    Ok(())
}
