//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use gifzs::oracle::{oracle_attractor, oracle_dinfty, oracle_zadeh, OracleOutcome, TinyInstance};
use gifzs::*;
use rand::Rng;

const L: Level = DEFAULT_LEVELS;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn opts() -> RunOptions {
    RunOptions::default()
}

fn doubling(n: usize) -> Gifzs {
    let d = std::sync::Arc::new(DomainBox::unit_interval(n).unwrap().with_wrap(true));
    let maps = (0..2)
        .map(|j| AffineContraction::scalar(&[0.5, 0.0], j as f64 / 2.0).unwrap())
        .collect();
    Gifzs::new(
        CrispGifs::new(d, maps).unwrap(),
        GreySystem::identities(L, 2),
    )
    .unwrap()
}

fn doubling_map() -> Outcome {
    let start = Instant::now();
    let z = doubling(256);
    let run = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
    let from_center = iterate_attractor(&z, &center_seeds(&z), &opts()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let all_max = |u: &FuzzyGrid| u.values().iter().all(|&v| v == L);
    let pass = run.collapsed_exact
        && all_max(&run.attractor)
        && run.iterations <= 20
        && from_center.collapsed_exact
        && all_max(&from_center.attractor)
        && from_center.iterations <= 20
        && elapsed < 1.0;
    outcome(
        pass,
        format!(
            "all cells at L; {} iterations from 1, {} from the center cell; {elapsed:.3} s",
            run.iterations, from_center.iterations
        ),
    )
}

fn quarter_sum() -> Outcome {
    let n = 512;
    let maps = (0..2)
        .map(|j| AffineContraction::scalar(&[0.25, 0.25], j as f64 / 2.0).unwrap())
        .collect();
    let greys = GreySystem::new(vec![
        GreyLevelMap::scale(L, 0.5).unwrap(),
        GreyLevelMap::identity(L),
    ])
    .unwrap();
    let z = Gifzs::new(CrispGifs::new(line(n), maps).unwrap(), greys).unwrap();
    let run = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
    let u = run.attractor.values();
    let worst = (n / 2..n)
        .map(|c| (u[c] as i32 - 2 * u[c - n / 2] as i32).abs())
        .max()
        .unwrap();
    outcome(
        run.collapsed_exact && worst <= 2,
        format!("max |u(z) - 2u(z - 1/2)| = {worst} levels over cells 256..511"),
    )
}

fn random_system(r: &mut impl Rng, lambda: f64) -> (CrispGifs, usize, usize) {
    let m = r.random_range(1..=2);
    let d = r.random_range(1..=2);
    let domain = if d == 1 {
        line(r.random_range(48..=128))
    } else {
        square(16)
    };
    let n = r.random_range(2..=3);
    (random_gifs(r, domain, m, n, lambda), m, d)
}

fn crispness() -> Outcome {
    let mut r = rng(3);
    let mut failures = 0;
    let mut exact = 0;
    for _ in 0..10 {
        let lambda = r.random_range(0.3..0.9);
        let (gifs, _, _) = random_system(&mut r, lambda);
        let z = Gifzs::new(gifs.clone(), GreySystem::identities(L, gifs.len())).unwrap();
        let run = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
        let a_s = crisp_attractor(&gifs, &full_seeds(&gifs), &opts())
            .unwrap()
            .attractor;
        let support = run.attractor.support();
        let h = hausdorff(&support, &a_s).unwrap().value;
        if !(run.converged && run.attractor.is_crisp() && h <= gifs.domain().cell_diagonal()) {
            failures += 1;
        }
        exact += (run.attractor == a_s.indicator(L).unwrap()) as usize;
    }
    outcome(
        failures == 0,
        format!("10 systems, {failures} failures, {exact} equal to the indicator exactly"),
    )
}

fn zero_cut() -> Outcome {
    let mut r = rng(4);
    let mut failures = 0;
    let mut proper = 0;
    for _ in 0..20 {
        let lambda = r.random_range(0.3..0.9);
        let (gifs, _, _) = random_system(&mut r, lambda);
        let greys = if r.random_bool(0.4) {
            // proper: r_+ minimal and beta(rho(1)) = 1
            let maps = (0..gifs.len())
                .map(|j| match (j, r.random_range(0..3)) {
                    (0, _) | (_, 0) => GreyLevelMap::identity(L),
                    (_, 1) => GreyLevelMap::scale(L, r.random_range(0.2..1.0)).unwrap(),
                    _ => GreyLevelMap::from_fn(L, |t| t * t).unwrap(),
                })
                .collect();
            GreySystem::new(maps).unwrap()
        } else {
            random_greys(&mut r, L, gifs.len())
        };
        let z = Gifzs::new(gifs, greys).unwrap();
        let run = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
        let cmp = compare_cuts(&z, &run).unwrap();
        let is_proper = z.greys().check_proper().passed();
        proper += is_proper as usize;
        let ok = cmp.zero_cut_in_as && (!is_proper || cmp.zero_cut_eq_as == Some(true));
        failures += !ok as usize;
    }
    outcome(
        failures == 0,
        format!("20 systems ({proper} proper), {failures} failures"),
    )
}

fn contraction() -> Outcome {
    let mut r = rng(5);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    let systems = 4;
    for _ in 0..systems {
        let m = r.random_range(1..=2);
        let domain = line(48);
        let gifs = sample_gifs(&mut r, domain.clone(), m, 0.2..0.5);
        let z = Gifzs::new(gifs.clone(), random_greys(&mut r, L, gifs.len())).unwrap();
        let slack = 2.0 * domain.cell_diagonal();
        for _ in 0..100 {
            let us: Vec<FuzzyGrid> = (0..m)
                .map(|_| random_normal(&mut r, domain.clone(), L))
                .collect();
            let vs: Vec<FuzzyGrid> = (0..m)
                .map(|_| random_normal(&mut r, domain.clone(), L))
                .collect();
            let lhs = d_infty(
                &gfhb_suppush(&z, &us).unwrap(),
                &gfhb_suppush(&z, &vs).unwrap(),
            )
            .unwrap();
            let rhs = z.lambda() * d_infty_m(&us, &vs).unwrap() + slack;
            violations += (lhs > rhs) as usize;
            tightest = tightest.min(rhs - lhs);
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} pairs, {violations} violations, smallest margin {tightest:.4}",
            systems * 100
        ),
    )
}

fn collage_inequality() -> Outcome {
    let mut r = rng(6);
    let mut violations = 0;
    let systems = 4;
    for _ in 0..systems {
        let m = r.random_range(1..=2);
        let domain = line(64);
        let gifs = sample_gifs(&mut r, domain.clone(), m, 0.2..0.5);
        let z = Gifzs::new(gifs.clone(), random_greys(&mut r, L, gifs.len())).unwrap();
        let star = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
        assert!(star.collapsed_exact);
        for _ in 0..50 {
            let u = random_normal(&mut r, domain.clone(), L);
            let report = collage(&z, &u, Some(&star.attractor)).unwrap();
            violations += (report.holds() != Some(true)) as usize;
        }
    }
    outcome(
        violations == 0,
        format!("{} samples, {violations} violations", systems * 50),
    )
}

fn product_isometry() -> Outcome {
    let mut r = rng(7);
    let mut mismatches = 0;
    for _ in 0..100 {
        let domain = line(r.random_range(4..=12));
        let levels: Level = r.random_range(1..=12);
        let g: Vec<FuzzyGrid> = (0..4)
            .map(|_| random_normal(&mut r, domain.clone(), levels))
            .collect();
        let p = cartesian_product(&g[0..2]).unwrap();
        let q = cartesian_product(&g[2..4]).unwrap();
        let lhs = d_infty_product(&p, &q).unwrap();
        let rhs = d_infty_m(&g[0..2], &g[2..4]).unwrap();
        mismatches += (lhs != rhs) as usize;
    }
    outcome(
        mismatches == 0,
        format!("100 quadruples, {mismatches} mismatches"),
    )
}

fn oracles() -> Outcome {
    let mut r = rng(8);
    let mut level_gap = 0u16;
    for _ in 0..200 {
        let m = r.random_range(1..=2);
        let domain = line(32);
        let gifs = sample_gifs(&mut r, domain.clone(), m, 0.2..0.9);
        let z = Gifzs::new(gifs.clone(), random_greys(&mut r, L, gifs.len())).unwrap();
        let us: Vec<FuzzyGrid> = (0..m)
            .map(|_| random_normal(&mut r, domain.clone(), L))
            .collect();
        let a = gfhb_suppush(&z, &us).unwrap();
        let b = gfhb_levelset(&z, &us).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            level_gap = level_gap.max(x.abs_diff(*y));
        }
    }
    let mut zadeh_bad = 0;
    for _ in 0..1000 {
        let z = tiny_system(&mut r);
        let f = &z.gifs().maps()[0];
        let us: Vec<FuzzyGrid> = (0..z.degree())
            .map(|_| random_normal(&mut r, z.domain().clone(), z.levels()))
            .collect();
        zadeh_bad += (zadeh_extend(f, &us).unwrap() != oracle_zadeh(f, &us).unwrap()) as usize;
    }
    let mut dinfty_bad = 0;
    let mut zero_term_above = 0;
    for _ in 0..1000 {
        let z = tiny_system(&mut r);
        let u = random_normal(&mut r, z.domain().clone(), z.levels());
        let v = random_normal(&mut r, z.domain().clone(), z.levels());
        let o = oracle_dinfty(&u, &v).unwrap();
        dinfty_bad += (d_infty(&u, &v).unwrap() != o.value) as usize;
        zero_term_above += (o.zero_term > o.positive_max) as usize;
    }
    let mut attractor_bad = 0;
    for _ in 0..200 {
        let z = tiny_system(&mut r);
        let main = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
        let tiny = TinyInstance::new(z).unwrap();
        match oracle_attractor(&tiny, 1000).unwrap() {
            OracleOutcome::FixedPoint { attractor, .. } => {
                attractor_bad += !(main.collapsed_exact && main.attractor == attractor) as usize;
            }
            OracleOutcome::Cycle { .. } => attractor_bad += 1,
        }
    }
    let pass = level_gap <= 1 && zadeh_bad + dinfty_bad + attractor_bad + zero_term_above == 0;
    outcome(
        pass,
        format!(
            "suppush vs levelset max gap {level_gap} levels; mismatches zadeh {zadeh_bad}/1000, \
             d_infty {dinfty_bad}/1000 (zero cut above {zero_term_above}), attractor {attractor_bad}/200"
        ),
    )
}

fn random_target(r: &mut impl Rng, n: usize) -> FuzzyGrid {
    let domain = line(n);
    if r.random_bool(0.5) {
        random_normal(r, domain, L)
    } else {
        // a few bumps
        let mut values = vec![0 as Level; n];
        for _ in 0..r.random_range(1..=4) {
            let c = r.random_range(0..n) as f64;
            let w = r.random_range(2.0..15.0);
            let h = r.random_range(0.2..1.0);
            for (i, v) in values.iter_mut().enumerate() {
                let t = 1.0 - ((i as f64 - c) / w).abs();
                if t > 0.0 {
                    *v = (*v).max((h * t * L as f64).round() as Level);
                }
            }
        }
        let top = values
            .iter()
            .enumerate()
            .max_by_key(|(_, v)| **v)
            .unwrap()
            .0;
        values[top] = L;
        FuzzyGrid::new(domain, L, values).unwrap()
    }
}

fn density() -> Outcome {
    let start = Instant::now();
    let mut r = rng(9);
    let epsilon = 0.1;
    let mut failures = 0;
    let mut worst_distance: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    for _ in 0..10 {
        let target = random_target(&mut r, 128);
        let diag = target.domain().cell_diagonal();
        let (_, cert) = approximate_ifzs(&target, epsilon).unwrap();
        let distance = cert.distance();
        let residual = cert.collage.residual;
        worst_distance = worst_distance.max(distance);
        worst_residual = worst_residual.max(residual);
        let ok = cert.attractor.converged
            && distance < epsilon + 2.0 * diag
            && residual <= epsilon / 2.0 + diag;
        failures += !ok as usize;
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && elapsed < 30.0,
        format!(
            "10 targets, {failures} failures; worst d_infty {worst_distance:.4}, worst residual \
             {worst_residual:.4}; {elapsed:.2} s"
        ),
    )
}

fn lifting() -> Outcome {
    let mut r = rng(10);
    let mut mismatches = 0;
    for k in 0..10 {
        let m = 1 + k % 2;
        let domain = line(64);
        let gifs = sample_gifs(&mut r, domain, m, 0.2..0.9);
        let z = Gifzs::new(gifs.clone(), random_greys(&mut r, L, gifs.len())).unwrap();
        let lz = lift_degree(&z);
        let a = iterate_attractor(&z, &default_seeds(&z), &opts()).unwrap();
        let b = iterate_attractor(&lz, &default_seeds(&lz), &opts()).unwrap();
        mismatches +=
            !(a.collapsed_exact && b.collapsed_exact && a.attractor == b.attractor) as usize;
    }
    outcome(
        mismatches == 0,
        format!("10 systems (5 of degree 1, 5 of degree 2), {mismatches} mismatches"),
    )
}

/// A cycle of the diagonal map `c -> phi_j(c, ..., c)` rounded to cells.
fn diagonal_cycle(z: &Gifzs, j: usize) -> CrispCellSet {
    let f = &z.gifs().maps()[j];
    let domain = z.domain();
    let step = |c: usize| {
        let x = domain.center(c);
        let args = vec![x.as_slice(); f.degree()];
        domain.nearest_cell(&f.eval(&args)).0
    };
    let mut seen = vec![false; domain.len()];
    let mut c = 0;
    while !seen[c] {
        seen[c] = true;
        c = step(c);
    }
    let mut cycle = vec![c];
    let mut x = step(c);
    while x != c {
        cycle.push(x);
        x = step(x);
    }
    CrispCellSet::new(domain.clone(), cycle).unwrap()
}

fn monotonicity() -> Outcome {
    let mut r = rng(11);
    let mut violations = 0;
    let mut runs = 0;
    for _ in 0..10 {
        let m = r.random_range(1..=2);
        let domain = line(64);
        let gifs = sample_gifs(&mut r, domain.clone(), m, 0.2..0.9);
        let z = Gifzs::new(gifs.clone(), random_greys(&mut r, L, gifs.len())).unwrap();
        let star = iterate_attractor(&z, &default_seeds(&z), &opts())
            .unwrap()
            .attractor;

        let a_s = crisp_attractor(&gifs, &full_seeds(&gifs), &opts())
            .unwrap()
            .attractor;
        let down = a_s.indicator(L).unwrap();
        let run = monotone_iterate(&z, &down, &opts()).unwrap();
        let ok = matches!(run.direction, Direction::Nonincreasing | Direction::Fixed)
            && run.violations == 0
            && run.bounded_by_seed
            && run.run.attractor.le(&down)
            && star.le(&down);
        violations += !ok as usize;

        let top = z.top_indices()[0];
        let up = diagonal_cycle(&z, top).indicator(L).unwrap();
        let run = monotone_iterate(&z, &up, &opts()).unwrap();
        let ok = matches!(run.direction, Direction::Nondecreasing | Direction::Fixed)
            && run.violations == 0
            && run.bounded_by_seed
            && up.le(&run.run.attractor)
            && up.le(&star);
        violations += !ok as usize;
        runs += 2;
    }
    outcome(
        violations == 0,
        format!("{runs} runs, {violations} violations"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("doubling map attractor is all-max", doubling_map),
        ("quarter-sum doubling relation", quarter_sum),
        ("identity greys give crisp attractors", crispness),
        ("zero cut inside the crisp attractor", zero_cut),
        ("operator contraction", contraction),
        ("collage inequality", collage_inequality),
        ("product isometry", product_isometry),
        ("cross-algorithm and oracle agreement", oracles),
        ("density construction", density),
        ("degree lifting", lifting),
        ("monotone sequences", monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        failed += !result.pass as usize;
        println!("{tag} {:>2} {name}: {}", i + 1, result.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
