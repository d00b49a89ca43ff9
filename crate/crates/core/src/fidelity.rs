//! Coherent-state fidelities for Gaussian reconstruction distributions.
//!
//! The verifier knows which coherent state (mean `(x_a, y_a)`, in the scaling
//! where `alpha = (x_a + i·y_a)/2` and vacuum variance is 1) was sent, and is
//! handed either a reconstructed quantum state or a classical guess. Both
//! cases reduce to averaging the coherent-state overlap against a Gaussian
//! distribution of reconstructed amplitudes, available here in closed form and
//! as a seeded Monte Carlo average of the defining integral. The two routes
//! are kept deliberately independent so each can validate the other.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// A Gaussian distribution of reconstructed amplitudes: means `(mean_x,
/// mean_y)` and variances `(n_x, n_y)` per quadrature, both variances
/// nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianGuess {
    pub mean_x: f64,
    pub mean_y: f64,
    pub n_x: f64,
    pub n_y: f64,
}

impl GaussianGuess {
    pub fn new(mean_x: f64, mean_y: f64, n_x: f64, n_y: f64) -> Result<Self> {
        for (name, value) in [("n_x", n_x), ("n_y", n_y)] {
            if !(value >= 0.0) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    range: "[0, inf)",
                });
            }
        }
        Ok(GaussianGuess {
            mean_x,
            mean_y,
            n_x,
            n_y,
        })
    }
}

/// A fidelity computed both ways: closed form and Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityEstimate {
    pub closed_form: f64,
    pub monte_carlo: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Squared overlap of the coherent states centered at `(x, y)` and
/// `(x_a, y_a)`: `exp(−(x−x_a)²/4 − (y−y_a)²/4)`.
pub fn overlap(x: f64, y: f64, x_a: f64, y_a: f64) -> f64 {
    let dx = x - x_a;
    let dy = y - y_a;
    (-(dx * dx) / 4.0 - (dy * dy) / 4.0).exp()
}

/// Closed-form fidelity of a Gaussian guess against the coherent state at
/// `(x_a, y_a)`:
///
/// ```text
/// F = 2/√((2+N_X)(2+N_Y)) · exp(−(x_a−x_b)²/(2(2+N_X)) − (y_a−y_b)²/(2(2+N_Y)))
/// ```
///
/// Always in `(0, 1]`, and for fixed noises strictly maximal when the guess
/// means match the sent state.
pub fn fidelity_closed_form(guess: &GaussianGuess, x_a: f64, y_a: f64) -> f64 {
    let ax = 2.0 + guess.n_x;
    let ay = 2.0 + guess.n_y;
    let dx = x_a - guess.mean_x;
    let dy = y_a - guess.mean_y;
    2.0 / (ax * ay).sqrt() * (-(dx * dx) / (2.0 * ax) - (dy * dy) / (2.0 * ay)).exp()
}

/// Fidelity at matched means (unity gain) as a function of the equivalent
/// input noises alone: `2/√((2+n_x)(2+n_y))`.
pub fn fidelity_unity_gain(n_x: f64, n_y: f64) -> f64 {
    2.0 / ((2.0 + n_x) * (2.0 + n_y)).sqrt()
}

/// Fidelity of the best classical guess built from measurement outcomes with
/// measurement noises `(n_x_m, n_y_m)`.
///
/// Numerically the same map as [`fidelity_unity_gain`], kept as a separate
/// operation because its arguments are measurement noises rather than
/// reconstruction noises: the two feed different noise budgets that merely
/// end in the same formula.
pub fn classical_fidelity(n_x_m: f64, n_y_m: f64) -> f64 {
    fidelity_unity_gain(n_x_m, n_y_m)
}

/// Monte Carlo evaluation of the defining fidelity integral: draw amplitudes
/// from the guess distribution, average the coherent-state overlap.
///
/// Deterministic per `(seed, n)`. A zero-variance axis is sampled at its mean
/// (the distributional limit), so a fully degenerate guess returns the exact
/// overlap with zero spread. The standard error uses the sample standard
/// deviation of the overlap values; use `n ≥ 1000` for it to be meaningful.
pub fn fidelity_monte_carlo(
    guess: &GaussianGuess,
    x_a: f64,
    y_a: f64,
    n: usize,
    seed: u64,
) -> FidelityEstimate {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let sx = guess.n_x.sqrt();
    let sy = guess.n_y.sqrt();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let zx: f64 = StandardNormal.sample(&mut rng);
        let zy: f64 = StandardNormal.sample(&mut rng);
        let x = guess.mean_x + sx * zx;
        let y = guess.mean_y + sy * zy;
        let f = overlap(x, y, x_a, y_a);
        sum += f;
        sum_sq += f * f;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    FidelityEstimate {
        closed_form: fidelity_closed_form(guess, x_a, y_a),
        monte_carlo: mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
    }
}

/// Invert the matched-means fidelity in the symmetric case: the noise `N`
/// with `fidelity_unity_gain(N, N) = f`, i.e. `N = 2(1−f)/f`.
pub fn noise_for_fidelity(f: f64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::OutOfRange {
            name: "f",
            value: f,
            range: "(0, 1]",
        });
    }
    Ok(2.0 * (1.0 - f) / f)
}
