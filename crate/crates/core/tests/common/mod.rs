#![allow(dead_code)]

use prefrobust::{EcdsPair, Instance, Prospect, ValidInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random prospect; with `grid` the entries are integers, which produces
/// ties and duplicates.
pub fn prospect(rng: &mut ChaCha8Rng, t: usize, n: usize, hi: f64, grid: bool) -> Prospect {
    let data = (0..t * n)
        .map(|_| {
            let x = rng.random_range(0.0..hi);
            if grid {
                x.floor()
            } else {
                x
            }
        })
        .collect();
    Prospect::new(t, n, data).unwrap()
}

/// Random instance with `k` pairs. The normalizing prospect dominates every
/// pair prospect by construction.
pub fn instance(rng: &mut ChaCha8Rng, t: usize, n: usize, k: usize, c: f64, law: bool) -> ValidInstance {
    let grid = rng.random_bool(0.3);
    let pairs: Vec<EcdsPair> = (0..k)
        .map(|_| {
            let a = prospect(rng, t, n, 6.0, grid);
            let b = prospect(rng, t, n, 6.0, grid);
            EcdsPair {
                preferred: a,
                dominated: b,
            }
        })
        .collect();
    let mut w0 = vec![0.0f64; t * n];
    for p in &pairs {
        for q in [&p.preferred, &p.dominated] {
            for (w, x) in w0.iter_mut().zip(q.as_slice()) {
                *w = w.max(*x);
            }
        }
    }
    if !grid {
        for w in &mut w0 {
            *w += rng.random_range(0.0..1.0);
        }
    }
    let w0 = Prospect::new(t, n, w0).unwrap();
    Instance::new(w0, pairs, c, law).validate().unwrap()
}
