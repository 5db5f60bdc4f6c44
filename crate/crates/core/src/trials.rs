//! Reproducible randomized trials.
//!
//! Trial `i` of a run seeded with `seed` draws from ChaCha8 seeded by
//! `seed` on stream `i`, so a trial's randomness is independent of how many
//! trials ran before it and of the worker it lands on. Searches report the
//! hit with the smallest trial index whatever the completion order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::field::{rat, Rational};

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Smallest index in `0..count` for which `probe` returns `Some`, evaluated on
/// up to `threads` workers (1 or 0 means the calling thread).
pub fn first_hit<T, P>(count: u64, threads: usize, probe: P) -> Option<(u64, T)>
where
    T: Send,
    P: Fn(u64) -> Option<T> + Sync + Send,
{
    if threads <= 1 {
        return (0..count).find_map(|i| probe(i).map(|t| (i, t)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| probe(i).map(|t| (i, t)))
            .find_first(|r| r.is_some())
            .flatten()
    })
}

/// Rationals `n/d` in lowest terms with `|n| + d == h`: positives ascending,
/// then negatives by ascending magnitude. Height 1 is just zero.
pub fn rationals_of_height(h: u64) -> Vec<Rational> {
    if h == 0 {
        return Vec::new();
    }
    if h == 1 {
        return vec![rat(0, 1)];
    }
    let mut pos: Vec<Rational> = (1..h)
        .filter_map(|n| {
            let d = h - n;
            (num_integer::gcd(n, d) == 1).then(|| rat(n as i64, d as i64))
        })
        .collect();
    pos.sort();
    let neg: Vec<Rational> = pos.iter().map(|q| -q).collect();
    pos.extend(neg);
    pos
}

/// All rationals up to sum-height `max_h`, in enumeration order.
pub fn rationals_up_to_height(max_h: u64) -> impl Iterator<Item = Rational> {
    (1..=max_h).flat_map(rationals_of_height)
}
