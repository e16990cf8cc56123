//! Random-number plumbing shared by policies and environments.
//!
//! Every run owns one seeded ChaCha generator per consumer. Policies and the
//! environment draw from disjoint ChaCha streams of the same seed, so the
//! number of draws a policy makes never shifts the environment's outcomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

/// The generator type used throughout the crate.
pub type DuelRng = ChaCha8Rng;

/// Fixed stream labels for the per-run sub-generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Policy = 1,
    Environment = 2,
}

/// Generator for `stream` of the run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> DuelRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Draws from `Beta(a, b)` as `X / (X + Y)` with `X ~ Gamma(a)`, `Y ~ Gamma(b)`.
///
/// Both shapes must be positive and finite.
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let x = Gamma::new(a, 1.0).expect("beta shape a > 0").sample(rng);
    let y = Gamma::new(b, 1.0).expect("beta shape b > 0").sample(rng);
    let s = x + y;
    if s > 0.0 {
        x / s
    } else {
        // Both draws underflowed; only reachable for tiny shapes.
        if rng.random::<bool>() {
            1.0
        } else {
            0.0
        }
    }
}

/// Beta posterior draw for "wins out of wins + losses" under a uniform prior.
#[inline]
pub fn sample_posterior<R: Rng + ?Sized>(rng: &mut R, wins: u64, losses: u64) -> f64 {
    sample_beta(rng, wins as f64 + 1.0, losses as f64 + 1.0)
}

/// Position of the maximum of `scores`, ties broken uniformly at random.
/// A random draw is consumed only when there is an actual tie.
pub fn argmax_random_tie<R: Rng + ?Sized>(rng: &mut R, scores: &[f64]) -> usize {
    pick_extreme(rng, scores, |a, b| a > b)
}

/// Position of the minimum of `scores`, ties broken uniformly at random.
pub fn argmin_random_tie<R: Rng + ?Sized>(rng: &mut R, scores: &[f64]) -> usize {
    pick_extreme(rng, scores, |a, b| a < b)
}

fn pick_extreme<R: Rng + ?Sized>(rng: &mut R, scores: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    assert!(!scores.is_empty(), "argmax over an empty set");
    let mut best = scores[0];
    let mut ties = 1usize;
    for &s in &scores[1..] {
        if better(s, best) {
            best = s;
            ties = 1;
        } else if s == best {
            ties += 1;
        }
    }
    let pick = if ties > 1 { rng.random_range(0..ties) } else { 0 };
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == best)
        .nth(pick)
        .map(|(i, _)| i)
        .expect("pick < ties")
}
