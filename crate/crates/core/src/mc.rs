//! Monte Carlo trajectories as an independent oracle for exit
//! distributions and Green functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{Domain, HarmonicSpace};

/// One kernel step from `x`; `None` when the walker is killed.
fn step(space: &HarmonicSpace, x: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
    let mut u: f64 = rng.random();
    for &(y, p) in space.kernel_row(x) {
        if u < p {
            return Some(y);
        }
        u -= p;
    }
    None
}

/// Empirical exit distribution with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McMeasure {
    pub support: Vec<usize>,
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Fraction of walkers killed before reaching the boundary.
    pub killed: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight_of(&self, b: usize) -> Option<(f64, f64)> {
        self.support
            .iter()
            .position(|&v| v == b)
            .map(|i| (self.weights[i], self.stderr[i]))
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        Err(Error::EmptySet("Monte Carlo samples"))
    } else {
        Ok(())
    }
}

/// Runs `samples` walkers from `x` until they leave the interior of
/// `domain` or are killed.
pub fn mc_hitting(space: &HarmonicSpace, domain: &Domain, x: usize, samples: usize, seed: u64) -> Result<McMeasure> {
    check_samples(samples)?;
    if !domain.contains(x) {
        return Err(Error::DomainMismatch(format!("vertex {x} is not interior to the domain")));
    }
    let boundary = domain.boundary();
    let mut counts = vec![0usize; boundary.len()];
    let mut killed = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut v = x;
        loop {
            match step(space, v, &mut rng) {
                None => {
                    killed += 1;
                    break;
                }
                Some(y) if domain.contains(y) => v = y,
                Some(y) => {
                    counts[boundary.binary_search(&y).expect("exit lands on the boundary")] += 1;
                    break;
                }
            }
        }
    }
    let n = samples as f64;
    let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(McMeasure {
        support: boundary.to_vec(),
        labels: boundary.iter().map(|&b| space.id(b).to_string()).collect(),
        stderr: weights.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect(),
        weights,
        killed: killed as f64 / n,
        samples,
        seed,
    })
}

/// A scalar Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Mean number of visits to `y` (time 0 included) by a walker from `x`
/// before absorption or killing. Visits to absorbing vertices are not
/// counted, so an absorbing `y` gives 0.
pub fn mc_green(space: &HarmonicSpace, x: usize, y: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    if x >= space.len() || y >= space.len() {
        return Err(Error::DomainMismatch("vertex out of range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let mut visits = 0u64;
        let mut v = x;
        while !space.is_absorbing(v) {
            if v == y {
                visits += 1;
            }
            match step(space, v, &mut rng) {
                Some(next) => v = next,
                None => break,
            }
        }
        let c = visits as f64;
        sum += c;
        sum_sq += c * c;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
        seed,
    })
}
