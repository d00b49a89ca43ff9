//! Built-in verification checks behind `cvtel verify`.
//!
//! Deterministic closed-form checks run against the user-supplied tolerance;
//! statistical checks compare Monte Carlo estimates with analytic values at
//! four standard errors, so they scale automatically with `--mc-samples`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use cv_teleport::{
    classical_fidelity, classical_measurement, classical_teleport, classify_regime, epr_circuit,
    epr_teleport, fidelity_monte_carlo, fidelity_unity_gain, find_conditional_threshold,
    find_eve_crossover, noise_for_fidelity, numeric::bisect, Context, GaussianGuess,
    ProtocolConfig, Regime,
};

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// Deviation normalized by its allowance; above 1 the check fails.
    pub severity: f64,
}

impl Check {
    fn from_deviation(name: &'static str, deviation: f64, allowance: f64, detail: String) -> Self {
        Check {
            name,
            pass: deviation <= allowance,
            detail,
            severity: deviation / allowance,
        }
    }
}

pub fn run_all(mc_samples: usize, seed: u64, tolerance: f64) -> Vec<Check> {
    vec![
        classical_teleport_floor(tolerance),
        classical_measurement_floor(tolerance),
        epr_ideal_limit(tolerance),
        squeezing_noise_law(tolerance),
        fidelity_mc_agreement(mc_samples, seed),
        protocol_mc_agreement(mc_samples, seed),
        eve_crossover(),
        conditional_threshold(),
        regime_boundaries(),
    ]
}

fn classical_teleport_floor(tol: f64) -> Check {
    let mut ctx = Context::new();
    let input = ctx.coherent(1.5, -0.5);
    let report = classical_teleport(&mut ctx, &input).unwrap();
    let fidelity = report.fidelity_at_unity_gain.unwrap();
    let deviation = (report.n_x_out - 2.0)
        .abs()
        .max((report.n_y_out - 2.0).abs())
        .max((fidelity - 0.5).abs());
    Check::from_deviation(
        "classical-teleport-floor",
        deviation,
        tol,
        format!("|N−2|, |F−1/2| ≤ {deviation:.3e} (tol {tol:.1e})"),
    )
}

fn classical_measurement_floor(tol: f64) -> Check {
    let mut ctx = Context::new();
    let input = ctx.coherent(2.0, 1.0);
    let (report, _, _) = classical_measurement(&mut ctx, &input).unwrap();
    let fidelity = classical_fidelity(report.n_x_m, report.n_y_m);
    let deviation = (report.n_x_m - 2.0)
        .abs()
        .max((report.n_y_m - 2.0).abs())
        .max((fidelity - 0.5).abs());
    Check::from_deviation(
        "classical-measurement-floor",
        deviation,
        tol,
        format!("|N_m−2|, |F_class−1/2| ≤ {deviation:.3e} (tol {tol:.1e})"),
    )
}

fn epr_ideal_limit(tol: f64) -> Check {
    let config = ProtocolConfig::new(20.0, 1.0, 1.0, 1.0).unwrap();
    let mut ctx = Context::new();
    let input = ctx.coherent(1.0, 1.0);
    let report = epr_teleport(&mut ctx, &input, &config).unwrap();
    let fidelity = report.fidelity_at_unity_gain.unwrap();
    let deviation = report
        .n_x_out
        .max(report.n_y_out)
        .max(1.0 - fidelity);
    Check::from_deviation(
        "epr-ideal-limit",
        deviation,
        tol,
        format!("residual noise and 1−F ≤ {deviation:.3e} (tol {tol:.1e})"),
    )
}

fn squeezing_noise_law(tol: f64) -> Check {
    let mut worst = 0.0_f64;
    for r in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let config = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
        let mut ctx = Context::new();
        let input = ctx.coherent(0.5, 0.5);
        let report = epr_teleport(&mut ctx, &input, &config).unwrap();
        let expected = 2.0 * (-2.0 * r).exp();
        worst = worst
            .max((report.n_x_out - expected).abs())
            .max((report.n_y_out - expected).abs());
    }

    // The fidelity-2/3 crossing must land on r = ln(2)/2.
    let crossing = bisect(0.1, 1.0, 1e-12, 200, |r| {
        let config = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
        let mut ctx = Context::new();
        let input = ctx.coherent(0.0, 0.0);
        let report = epr_teleport(&mut ctx, &input, &config).unwrap();
        report.fidelity_at_unity_gain.unwrap() - 2.0 / 3.0
    })
    .unwrap();
    let crossing_dev = (crossing - 0.5 * 2.0_f64.ln()).abs();
    let allowance = tol.max(1e-9);
    let deviation = worst.max(crossing_dev);
    Check::from_deviation(
        "squeezing-noise-law",
        deviation,
        allowance,
        format!(
            "worst |N−2e^-2r| = {worst:.3e}, crossing dev = {crossing_dev:.3e} (tol {allowance:.1e})"
        ),
    )
}

fn fidelity_mc_agreement(mc_samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let cases = 100;
    let mut ok = 0;
    let mut worst_z = 0.0_f64;
    for _ in 0..cases {
        let x_a = rng.random_range(-5.0..5.0);
        let y_a = rng.random_range(-5.0..5.0);
        let guess = GaussianGuess::new(
            x_a + rng.random_range(-5.0..5.0),
            y_a + rng.random_range(-5.0..5.0),
            rng.random_range(0.0..10.0),
            rng.random_range(0.0..10.0),
        )
        .unwrap();
        let est = fidelity_monte_carlo(&guess, x_a, y_a, mc_samples, rng.random());
        let diff = (est.monte_carlo - est.closed_form).abs();
        let z = if est.std_error > 0.0 {
            diff / est.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if z <= 4.0 {
            ok += 1;
        }
        worst_z = worst_z.max(z);
    }
    Check {
        name: "fidelity-mc-agreement",
        pass: ok >= 99,
        detail: format!("{ok}/{cases} cases within 4 std errors; worst z = {worst_z:.2}"),
        severity: worst_z / 4.0,
    }
}

fn protocol_mc_agreement(mc_samples: usize, seed: u64) -> Check {
    let config = ProtocolConfig::new(0.6, 0.9, 0.7, 1.0).unwrap();
    let mut ctx = Context::new();
    let input = ctx.coherent(1.0, -1.0);
    let circuit = epr_circuit(&mut ctx, &input, &config).unwrap();
    let residual_x = &circuit.output.x - &input.x;
    let residual_y = &circuit.output.y - &input.y;
    let moments = ctx
        .sample_moments(&[&residual_x, &residual_y], mc_samples, seed)
        .unwrap();
    let mut worst_z = 0.0_f64;
    for (sampled, form) in [(moments.variances[0], &residual_x), (moments.variances[1], &residual_y)] {
        let analytic = ctx.variance(form).unwrap();
        let se = moments.variance_std_error(analytic);
        worst_z = worst_z.max((sampled - analytic).abs() / se);
    }
    Check {
        name: "protocol-mc-agreement",
        pass: worst_z <= 4.0,
        detail: format!("sampled equivalent noise within {worst_z:.2} std errors of analytic"),
        severity: worst_z / 4.0,
    }
}

fn eve_crossover() -> Check {
    let eta = find_eve_crossover(1.0, 1e-9).unwrap();
    let deviation = (eta - 0.5).abs();
    Check::from_deviation(
        "eve-crossover",
        deviation,
        1e-6,
        format!("eta* = {eta:.9} (dev {deviation:.3e}, tol 1e-6)"),
    )
}

fn conditional_threshold() -> Check {
    let eta = find_conditional_threshold(5.0, 1e-9).unwrap();
    let deviation = (eta - 0.5).abs();
    Check::from_deviation(
        "conditional-threshold",
        deviation,
        1e-6,
        format!("eta* = {eta:.9} (dev {deviation:.3e}, tol 1e-6)"),
    )
}

fn regime_boundaries() -> Check {
    let delta = 1e-9;
    let pass = classify_regime(fidelity_unity_gain(2.0, 2.0)).unwrap() == Regime::ClassicalBoundary
        && classify_regime(fidelity_unity_gain(2.0 + delta, 2.0 + delta)).unwrap()
            == Regime::BelowClassical
        && classify_regime(fidelity_unity_gain(2.0 - delta, 2.0 - delta)).unwrap()
            == Regime::Intermediate
        && classify_regime(fidelity_unity_gain(1.0, 1.0)).unwrap() == Regime::Secure
        && classify_regime(fidelity_unity_gain(1.0 + delta, 1.0 + delta)).unwrap()
            == Regime::Intermediate
        && (noise_for_fidelity(0.5).unwrap() - 2.0).abs() < 1e-12
        && (noise_for_fidelity(2.0 / 3.0).unwrap() - 1.0).abs() < 1e-12;
    Check {
        name: "regime-boundaries",
        pass,
        detail: "labels flip exactly at N = 2 and N = 1".to_string(),
        severity: if pass { 0.0 } else { f64::INFINITY },
    }
}
