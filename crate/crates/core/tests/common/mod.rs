#![allow(dead_code)]

use std::sync::Arc;

use gifzs::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn line(n: usize) -> Arc<DomainBox> {
    Arc::new(DomainBox::unit_interval(n).unwrap())
}

pub fn square(n: usize) -> Arc<DomainBox> {
    Arc::new(DomainBox::unit_square(n, n).unwrap())
}

/// Spectral norm estimate used only to rescale random blocks; the library
/// computes the certified bound itself.
fn frobenius(block: &[f64]) -> f64 {
    block.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// A random affine map of degree `m` on `domain` with `sum_i ||A_i|| <= lambda`
/// (Frobenius norms, which dominate spectral ones). The image of the box
/// center is a uniform point of the middle half of the box.
pub fn random_map(
    r: &mut impl Rng,
    domain: &DomainBox,
    m: usize,
    lambda: f64,
) -> AffineContraction {
    let d = domain.dim();
    let mut blocks: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..d * d).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect();
    let weights: Vec<f64> = (0..m).map(|_| r.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for (b, w) in blocks.iter_mut().zip(&weights) {
        let scale = lambda * w / total / frobenius(b).max(1e-12);
        for a in b.iter_mut() {
            *a *= scale;
        }
    }
    let mid: Vec<f64> = (0..d)
        .map(|k| 0.5 * (domain.lo()[k] + domain.hi()[k]))
        .collect();
    let target: Vec<f64> = (0..d)
        .map(|k| {
            let span = domain.hi()[k] - domain.lo()[k];
            domain.lo()[k] + span * r.random_range(0.25..0.75)
        })
        .collect();
    let mut offset = target.clone();
    let moved = AffineContraction::new(blocks.clone(), vec![0.0; d])
        .unwrap()
        .eval(&vec![mid.as_slice(); m]);
    for k in 0..d {
        offset[k] -= moved[k];
    }
    AffineContraction::new(blocks, offset).unwrap()
}

pub fn random_gifs(
    r: &mut impl Rng,
    domain: Arc<DomainBox>,
    m: usize,
    n: usize,
    lambda: f64,
) -> CrispGifs {
    let maps = (0..n).map(|_| random_map(r, &domain, m, lambda)).collect();
    CrispGifs::new(domain, maps).unwrap()
}

pub fn random_grey(r: &mut impl Rng, levels: Level) -> GreyLevelMap {
    match r.random_range(0..5) {
        0 => GreyLevelMap::identity(levels),
        1 => GreyLevelMap::scale(levels, r.random_range(0.1..1.0)).unwrap(),
        2 => GreyLevelMap::step(levels, r.random_range(0.0..1.0)).unwrap(),
        3 => GreyLevelMap::zero_below(levels, r.random_range(0.0..0.8)).unwrap(),
        _ => {
            // random nondecreasing table through 0
            let mut samples: Vec<Level> = vec![0];
            let mut v = 0u32;
            for _ in 1..=levels {
                if r.random_bool(0.3) {
                    v = (v + r.random_range(0..=levels as u32 / 4)).min(levels as u32);
                }
                samples.push(v as Level);
            }
            if samples.iter().all(|&s| s == 0) {
                *samples.last_mut().unwrap() = 1;
            }
            GreyLevelMap::from_samples(levels, samples).unwrap()
        }
    }
}

/// Random admissible greys; map 0 always reaches 1.
pub fn random_greys(r: &mut impl Rng, levels: Level, n: usize) -> GreySystem {
    let mut maps: Vec<GreyLevelMap> = (0..n).map(|_| random_grey(r, levels)).collect();
    if maps[0].at_one() != levels {
        maps[0] = GreyLevelMap::identity(levels);
    }
    GreySystem::new(maps).unwrap()
}

pub fn random_normal(r: &mut impl Rng, domain: Arc<DomainBox>, levels: Level) -> FuzzyGrid {
    let zero_rate = r.random_range(0.0..0.7);
    let mut values: Vec<Level> = (0..domain.len())
        .map(|_| {
            if r.random_bool(zero_rate) {
                0
            } else {
                r.random_range(0..=levels)
            }
        })
        .collect();
    let top = r.random_range(0..values.len());
    values[top] = levels;
    FuzzyGrid::new(domain, levels, values).unwrap()
}

/// Indicator of a random cell set, never empty.
pub fn random_crisp(r: &mut impl Rng, domain: Arc<DomainBox>, levels: Level) -> FuzzyGrid {
    let rate = r.random_range(0.05..0.6);
    let mut mask: Vec<bool> = (0..domain.len()).map(|_| r.random_bool(rate)).collect();
    let any = r.random_range(0..mask.len());
    mask[any] = true;
    CrispCellSet::from_mask(domain, &mask)
        .indicator(levels)
        .unwrap()
}

/// Map with coefficients on the 1/16 lattice, so every image point of a
/// dyadic grid is computed exactly.
pub fn dyadic_map(r: &mut impl Rng, d: usize, m: usize) -> AffineContraction {
    loop {
        let blocks: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                (0..d * d)
                    .map(|_| r.random_range(-5i32..=5) as f64 / 16.0)
                    .collect()
            })
            .collect();
        let offset: Vec<f64> = (0..d)
            .map(|_| r.random_range(0i32..=16) as f64 / 16.0)
            .collect();
        let f = AffineContraction::new(blocks, offset).unwrap();
        if f.lip_bound() < 1.0 {
            return f;
        }
    }
}

/// A random system of oracle size: at most 16 cells, 16 levels, degree 2, 3 maps.
pub fn tiny_system(r: &mut impl Rng) -> Gifzs {
    let levels: Level = r.random_range(1..=16);
    let (domain, d) = match r.random_range(0..3) {
        0 => (Arc::new(DomainBox::unit_interval(16).unwrap()), 1),
        1 => (
            Arc::new(DomainBox::unit_interval(8).unwrap().with_wrap(true)),
            1,
        ),
        _ => (Arc::new(DomainBox::unit_square(4, 4).unwrap()), 2),
    };
    let m = r.random_range(1..=2);
    let n = r.random_range(1..=3);
    let maps = (0..n).map(|_| dyadic_map(r, d, m)).collect();
    let gifs = CrispGifs::new(domain, maps).unwrap();
    Gifzs::new(gifs, random_greys(r, levels, n)).unwrap()
}

/// One to three random maps with a Lipschitz bound drawn from `lambda`.
pub fn sample_gifs(
    r: &mut impl Rng,
    domain: Arc<DomainBox>,
    m: usize,
    lambda: std::ops::Range<f64>,
) -> CrispGifs {
    let n = r.random_range(1..=3);
    let l = r.random_range(lambda);
    random_gifs(r, domain, m, n, l)
}
