//! The two teleportation schemes under comparison.
//!
//! *Classical measure-and-reconstruct*: split the input on a balanced
//! beamsplitter, read X on one port and Y on the other, then displace a fresh
//! vacuum by the outcomes. Each stage charges one unit of vacuum noise, so the
//! channel floor is an equivalent input noise of 2 per quadrature regardless
//! of the input state.
//!
//! *EPR-assisted*: distribute a two-mode squeezed pair, mix the input with one
//! beam at the sender's station, feed the two homodyne readings forward onto
//! the other beam. The correlated/anticorrelated beams cancel the added noise
//! down to `2e^{−2r}` per quadrature at unity gain and lossless arms.
//!
//! Both schemes are built symbolically on [`crate::gaussian`], so every noise
//! figure is exact and the same circuit can be re-sampled by Monte Carlo.

use crate::error::{Error, Result};
use crate::fidelity::fidelity_unity_gain;
use crate::gaussian::{beamsplitter, feedforward, Axis, Context, Mode, QuadratureForm};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Parameters of an EPR-assisted teleportation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    /// Squeezing parameter of the entangled source, `r ≥ 0`.
    pub r: f64,
    /// Intensity transmission of the sender-side arm, in `[0, 1]`.
    pub eta_alice: f64,
    /// Intensity transmission of the receiver-side arm, in `[0, 1]`.
    pub eta_bob: f64,
    /// Feedforward gain; also the end-to-end mean gain of the channel.
    pub gain: f64,
}

impl ProtocolConfig {
    pub fn new(r: f64, eta_alice: f64, eta_bob: f64, gain: f64) -> Result<Self> {
        let config = ProtocolConfig {
            r,
            eta_alice,
            eta_bob,
            gain,
        };
        config.validate()?;
        Ok(config)
    }

    /// Equal transmission on both arms.
    pub fn symmetric(r: f64, eta: f64, gain: f64) -> Result<Self> {
        Self::new(r, eta, eta, gain)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0) {
            return Err(Error::OutOfRange {
                name: "r",
                value: self.r,
                range: "[0, inf)",
            });
        }
        for (name, value) in [("eta_alice", self.eta_alice), ("eta_bob", self.eta_bob)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    range: "[0, 1]",
                });
            }
        }
        if !(self.gain >= 0.0) {
            return Err(Error::OutOfRange {
                name: "gain",
                value: self.gain,
                range: "[0, inf)",
            });
        }
        Ok(())
    }
}

/// Noise budget of a reconstruction channel, referred to its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportReport {
    pub n_x_out: f64,
    pub n_y_out: f64,
    pub gain: f64,
    pub mean_x_out: f64,
    pub mean_y_out: f64,
    /// Fidelity implied by the noises when the means match the input, i.e.
    /// at unity gain; `None` otherwise.
    pub fidelity_at_unity_gain: Option<f64>,
}

/// Noise budget of the joint quadrature measurement alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementReport {
    pub n_x_m: f64,
    pub n_y_m: f64,
    pub measured_mean_x: f64,
    pub measured_mean_y: f64,
}

/// Joint X/Y measurement of a mode through a balanced beamsplitter.
///
/// X is read on the sum port and Y on the difference port, and both readings
/// are rescaled by √2 so the deterministic gain from input mean to measured
/// mean is exactly 1. The reported noises are the full variances of the
/// rescaled outcomes, which include the beamsplitting unit *and* the input
/// mode's own noise: a coherent input measures at 2 per quadrature.
pub fn classical_measurement(
    ctx: &mut Context,
    input: &Mode,
) -> Result<(MeasurementReport, QuadratureForm, QuadratureForm)> {
    let v1 = ctx.vacuum();
    let (sum_port, diff_port) = beamsplitter(input, &v1, 0.5)?;
    let x_m = sum_port.x.scale(SQRT_2); // X_in + X_v1
    let y_m = diff_port.y.scale(SQRT_2); // Y_in − Y_v1
    let report = MeasurementReport {
        n_x_m: ctx.variance(&x_m)?,
        n_y_m: ctx.variance(&y_m)?,
        measured_mean_x: x_m.mean(),
        measured_mean_y: y_m.mean(),
    };
    Ok((report, x_m, y_m))
}

/// Measure-and-reconstruct teleportation at unity gain: displace a fresh
/// vacuum by the two measurement outcomes.
///
/// The input quadratures cancel out of the input-referred budget exactly, so
/// the equivalent input noise is 2 per quadrature for *any* input state — one
/// vacuum unit from the measurement and one from the reconstruction.
pub fn classical_teleport(ctx: &mut Context, input: &Mode) -> Result<TeleportReport> {
    let (_, x_m, y_m) = classical_measurement(ctx, input)?;
    let v2 = ctx.vacuum();
    let output = feedforward(&v2, &x_m, &y_m, 1.0);
    teleport_report(ctx, &output, input, 1.0)
}

/// An entangled beam pair from two orthogonally squeezed vacua mixed on a
/// balanced beamsplitter: X quadratures correlated, Y anticorrelated, with
/// `Var(X1−X2) = Var(Y1+Y2) = 2e^{−2r}`.
pub fn epr_source(ctx: &mut Context, r: f64) -> Result<(Mode, Mode)> {
    let squeezed_y = ctx.squeezed(r, Axis::Y)?;
    let squeezed_x = ctx.squeezed(r, Axis::X)?;
    beamsplitter(&squeezed_y, &squeezed_x, 0.5)
}

/// Everything the EPR protocol produces, kept symbolic so downstream analyses
/// (noise reports, Monte Carlo resampling, eavesdropper models) can reuse the
/// exact same circuit.
#[derive(Debug, Clone)]
pub struct EprCircuit {
    /// The receiver's reconstructed mode.
    pub output: Mode,
    /// Rescaled X reading broadcast on the classical channel (`X_in − X_a1`).
    pub meas_x: QuadratureForm,
    /// Rescaled Y reading broadcast on the classical channel (`Y_in + Y_a1`).
    pub meas_y: QuadratureForm,
    /// Port tapped off the sender-side arm loss.
    pub alice_tap: Mode,
    /// Port tapped off the receiver-side arm loss.
    pub bob_tap: Mode,
}

/// Build the EPR-assisted teleportation circuit.
///
/// Beam 1 passes the sender-side loss and is mixed with the input on a
/// balanced beamsplitter; X is read on the difference port and Y on the sum
/// port (rescaled by √2 to unit deterministic gain). Beam 2 passes the
/// receiver-side loss and is displaced by `gain` times both readings. With
/// these port choices the correlated noise cancels exactly as `r → ∞` on
/// lossless arms, and the output means are `gain` times the input means for
/// every configuration.
pub fn epr_circuit(ctx: &mut Context, input: &Mode, config: &ProtocolConfig) -> Result<EprCircuit> {
    config.validate()?;
    let (beam1, beam2) = epr_source(ctx, config.r)?;
    let (arm1, alice_tap) = ctx.loss(&beam1, config.eta_alice)?;
    let (arm2, bob_tap) = ctx.loss(&beam2, config.eta_bob)?;

    let (sum_port, diff_port) = beamsplitter(input, &arm1, 0.5)?;
    let meas_x = diff_port.x.scale(SQRT_2); // X_in − X_a1
    let meas_y = sum_port.y.scale(SQRT_2); // Y_in + Y_a1

    let output = feedforward(&arm2, &meas_x, &meas_y, config.gain);
    Ok(EprCircuit {
        output,
        meas_x,
        meas_y,
        alice_tap,
        bob_tap,
    })
}

/// Run the EPR-assisted protocol and report its input-referred noise budget.
pub fn epr_teleport(
    ctx: &mut Context,
    input: &Mode,
    config: &ProtocolConfig,
) -> Result<TeleportReport> {
    let circuit = epr_circuit(ctx, input, config)?;
    teleport_report(ctx, &circuit.output, input, config.gain)
}

/// Equivalent input noise of a channel with output forms `(out_x, out_y)`
/// and deterministic gain `gain`:
///
/// ```text
/// N_X = Var(X_out − gain·X_in) / gain²
/// ```
///
/// The subtraction is symbolic, so any part of the output that is correlated
/// with the input cancels exactly rather than statistically.
pub fn equivalent_input_noise(
    ctx: &Context,
    out_x: &QuadratureForm,
    out_y: &QuadratureForm,
    input: &Mode,
    gain: f64,
) -> Result<(f64, f64)> {
    if gain == 0.0 {
        return Err(Error::ZeroGain);
    }
    let g2 = gain * gain;
    let residual_x = out_x - &input.x.scale(gain);
    let residual_y = out_y - &input.y.scale(gain);
    Ok((
        ctx.variance(&residual_x)? / g2,
        ctx.variance(&residual_y)? / g2,
    ))
}

/// Assemble a [`TeleportReport`] for an output mode produced at `gain`.
pub fn teleport_report(
    ctx: &Context,
    output: &Mode,
    input: &Mode,
    gain: f64,
) -> Result<TeleportReport> {
    let (n_x_out, n_y_out) = equivalent_input_noise(ctx, &output.x, &output.y, input, gain)?;
    let fidelity_at_unity_gain = (gain == 1.0).then(|| fidelity_unity_gain(n_x_out, n_y_out));
    Ok(TeleportReport {
        n_x_out,
        n_y_out,
        gain,
        mean_x_out: output.x.mean(),
        mean_y_out: output.y.mean(),
        fidelity_at_unity_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::classical_fidelity;

    const TOL: f64 = 1e-12;

    #[test]
    fn measurement_of_a_coherent_state_costs_two_units() {
        let mut ctx = Context::new();
        let input = ctx.coherent(3.0, -1.0);
        let (report, _, _) = classical_measurement(&mut ctx, &input).unwrap();
        assert!((report.n_x_m - 2.0).abs() < TOL);
        assert!((report.n_y_m - 2.0).abs() < TOL);
        assert!((report.measured_mean_x - 3.0).abs() < TOL);
        assert!((report.measured_mean_y - -1.0).abs() < TOL);
    }

    #[test]
    fn measurement_noise_tracks_the_input_state() {
        let r = 0.9;
        let mut ctx = Context::new();
        let input = ctx.squeezed(r, Axis::X).unwrap();
        let (report, x_m, _) = classical_measurement(&mut ctx, &input).unwrap();
        let expected = (-2.0 * r).exp() + 1.0;
        assert!((report.n_x_m - expected).abs() < TOL);

        // Cross-check the symbolic variance by sampling the same form.
        let moments = ctx.sample_moments(&[&x_m], 200_000, 17).unwrap();
        let se = moments.variance_std_error(expected);
        assert!((moments.variances[0] - expected).abs() < 4.0 * se);
    }

    #[test]
    fn classical_teleport_hits_the_two_unit_floor() {
        let mut ctx = Context::new();
        let input = ctx.coherent(5.0, 2.0);
        let report = classical_teleport(&mut ctx, &input).unwrap();
        assert!((report.n_x_out - 2.0).abs() < TOL);
        assert!((report.n_y_out - 2.0).abs() < TOL);
        assert!((report.mean_x_out - 5.0).abs() < TOL);
        assert!((report.mean_y_out - 2.0).abs() < TOL);
        assert!((report.fidelity_at_unity_gain.unwrap() - 0.5).abs() < TOL);
    }

    #[test]
    fn classical_floor_is_input_independent() {
        let mut ctx = Context::new();
        let squeezed = ctx.squeezed(1.3, Axis::Y).unwrap();
        let report = classical_teleport(&mut ctx, &squeezed).unwrap();
        assert!((report.n_x_out - 2.0).abs() < TOL);
        assert!((report.n_y_out - 2.0).abs() < TOL);
    }

    #[test]
    fn epr_source_correlations() {
        let mut ctx = Context::new();
        let (b1, b2) = epr_source(&mut ctx, 0.0).unwrap();
        let diff = &b1.x - &b2.x;
        assert!((ctx.variance(&diff).unwrap() - 2.0).abs() < TOL);

        for r in [0.25, 1.0, 2.5] {
            let mut ctx = Context::new();
            let (b1, b2) = epr_source(&mut ctx, r).unwrap();
            let x_diff = &b1.x - &b2.x;
            let y_sum = &b1.y + &b2.y;
            let x_sum = &b1.x + &b2.x;
            let squeezed = 2.0 * (-2.0 * r).exp();
            let antisqueezed = 2.0 * (2.0 * r).exp();
            assert!((ctx.variance(&x_diff).unwrap() - squeezed).abs() < TOL);
            assert!((ctx.variance(&y_sum).unwrap() - squeezed).abs() < TOL);
            assert!(
                (ctx.variance(&x_sum).unwrap() - antisqueezed).abs() < TOL * antisqueezed
            );
        }

        let mut ctx = Context::new();
        let (b1, b2) = epr_source(&mut ctx, 20.0).unwrap();
        let diff = &b1.x - &b2.x;
        assert!(ctx.variance(&diff).unwrap() <= 1e-15);
    }

    #[test]
    fn epr_with_no_squeezing_recovers_the_classical_floor() {
        let mut ctx = Context::new();
        let input = ctx.coherent(1.0, -4.0);
        let config = ProtocolConfig::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let report = epr_teleport(&mut ctx, &input, &config).unwrap();
        assert!((report.n_x_out - 2.0).abs() < TOL);
        assert!((report.n_y_out - 2.0).abs() < TOL);
        assert!((report.mean_x_out - 1.0).abs() < TOL);
        assert!((report.mean_y_out - -4.0).abs() < TOL);
    }

    #[test]
    fn ideal_epr_teleportation_is_noiseless() {
        let mut ctx = Context::new();
        let input = ctx.coherent(2.0, 3.0);
        let config = ProtocolConfig::new(20.0, 1.0, 1.0, 1.0).unwrap();
        let report = epr_teleport(&mut ctx, &input, &config).unwrap();
        assert!(report.n_x_out <= 1e-12);
        assert!(report.n_y_out <= 1e-12);
    }

    #[test]
    fn finite_squeezing_noise_law() {
        for r in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let mut ctx = Context::new();
            let input = ctx.coherent(0.7, 0.7);
            let config = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
            let report = epr_teleport(&mut ctx, &input, &config).unwrap();
            let expected = 2.0 * (-2.0 * r).exp();
            assert!((report.n_x_out - expected).abs() < 1e-10);
            assert!((report.n_y_out - expected).abs() < 1e-10);
        }

        // r = ln(2)/2 leaves one unit of noise, i.e. fidelity 2/3.
        let mut ctx = Context::new();
        let input = ctx.coherent(1.0, 1.0);
        let config = ProtocolConfig::new(0.5 * 2.0_f64.ln(), 1.0, 1.0, 1.0).unwrap();
        let report = epr_teleport(&mut ctx, &input, &config).unwrap();
        assert!((report.n_x_out - 1.0).abs() < 1e-12);
        assert!((report.fidelity_at_unity_gain.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn noise_is_monotone_in_squeezing() {
        let mut prev = f64::INFINITY;
        for r in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let mut ctx = Context::new();
            let input = ctx.coherent(0.0, 0.0);
            let config = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
            let report = epr_teleport(&mut ctx, &input, &config).unwrap();
            assert!(report.n_x_out < prev);
            prev = report.n_x_out;
        }
    }

    #[test]
    fn unity_gain_means_track_the_input_exactly() {
        for r in [0.0, 0.6, 3.0] {
            for alpha in [(0.0, 0.0), (2.5, -1.5), (-4.0, 0.25)] {
                let mut ctx = Context::new();
                let input = ctx.coherent(alpha.0, alpha.1);
                let config = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
                let report = epr_teleport(&mut ctx, &input, &config).unwrap();
                assert!((report.mean_x_out - alpha.0).abs() < TOL);
                assert!((report.mean_y_out - alpha.1).abs() < TOL);
            }
        }
    }

    #[test]
    fn lossy_arms_noise_budget() {
        // Symmetric arms at unity gain: N = 2·η·e^{−2r} + 2·(1−η).
        for (r, eta) in [(0.5, 0.8), (1.0, 0.3), (2.0, 0.55)] {
            let mut ctx = Context::new();
            let input = ctx.coherent(1.0, 0.0);
            let config = ProtocolConfig::symmetric(r, eta, 1.0).unwrap();
            let report = epr_teleport(&mut ctx, &input, &config).unwrap();
            let expected = 2.0 * eta * (-2.0 * r).exp() + 2.0 * (1.0 - eta);
            assert!((report.n_x_out - expected).abs() < 1e-10);
            assert!((report.n_y_out - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn gain_scaling_of_the_noise_budget() {
        // Non-unity gain: output means scale with the gain and the report
        // carries no unity-gain fidelity.
        let mut ctx = Context::new();
        let input = ctx.coherent(1.5, -2.0);
        let config = ProtocolConfig::new(0.8, 1.0, 1.0, 2.0).unwrap();
        let report = epr_teleport(&mut ctx, &input, &config).unwrap();
        assert!((report.mean_x_out - 3.0).abs() < TOL);
        assert!((report.mean_y_out - -4.0).abs() < TOL);
        assert!(report.fidelity_at_unity_gain.is_none());

        // Residual at gain g: Var(X_b2 − g·X_b1)/g² on lossless arms.
        let g: f64 = 2.0;
        let c = (2.0 * 0.8_f64).cosh();
        let s = (2.0 * 0.8_f64).sinh();
        let expected = (c + g * g * c - 2.0 * g * s) / (g * g);
        assert!((report.n_x_out - expected).abs() < 1e-10);
    }

    #[test]
    fn equivalent_noise_reference_cases() {
        let mut ctx = Context::new();
        let input = ctx.coherent(0.8, -0.3);

        // A perfect channel has zero equivalent noise.
        let (nx, ny) =
            equivalent_input_noise(&ctx, &input.x, &input.y, &input, 1.0).unwrap();
        assert_eq!((nx, ny), (0.0, 0.0));

        // Twice the input plus one vacuum unit, referred at gain 2.
        let v = ctx.vacuum();
        let out_x = &input.x.scale(2.0) + &v.x;
        let out_y = &input.y.scale(2.0) + &v.y;
        let (nx, ny) = equivalent_input_noise(&ctx, &out_x, &out_y, &input, 2.0).unwrap();
        assert!((nx - 0.25).abs() < TOL);
        assert!((ny - 0.25).abs() < TOL);

        assert_eq!(
            equivalent_input_noise(&ctx, &out_x, &out_y, &input, 0.0),
            Err(Error::ZeroGain)
        );
    }

    #[test]
    fn equivalent_noise_matches_the_added_noise_pattern() {
        // Output built exactly as input + v1 + v2 on X and input − v1 + v2
        // on Y carries two units per quadrature.
        let mut ctx = Context::new();
        let input = ctx.coherent(0.0, 0.0);
        let v1 = ctx.vacuum();
        let v2 = ctx.vacuum();
        let out_x = &(&input.x + &v1.x) + &v2.x;
        let out_y = &(&input.y - &v1.y) + &v2.y;
        let (nx, ny) = equivalent_input_noise(&ctx, &out_x, &out_y, &input, 1.0).unwrap();
        assert!((nx - 2.0).abs() < TOL);
        assert!((ny - 2.0).abs() < TOL);
    }

    #[test]
    fn rejects_mixed_contexts_and_bad_configs() {
        let mut ctx = Context::new();
        let mut other = Context::new();
        let input = other.vacuum();
        assert!(matches!(
            classical_teleport(&mut ctx, &input),
            Err(Error::ContextMismatch)
        ));

        assert!(ProtocolConfig::new(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ProtocolConfig::new(1.0, 1.2, 1.0, 1.0).is_err());
        assert!(ProtocolConfig::new(1.0, 1.0, -0.1, 1.0).is_err());
        assert!(ProtocolConfig::new(1.0, 1.0, 1.0, -2.0).is_err());

        let config = ProtocolConfig::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let input = ctx.vacuum();
        assert_eq!(
            epr_teleport(&mut ctx, &input, &config),
            Err(Error::ZeroGain)
        );
    }

    #[test]
    fn both_pictures_agree_on_the_classical_limit() {
        // Operatorial budget: two units of added noise at unity gain.
        let mut ctx = Context::new();
        let input = ctx.coherent(1.0, 1.0);
        let teleported = classical_teleport(&mut ctx, &input).unwrap();
        let f_channel =
            fidelity_unity_gain(teleported.n_x_out, teleported.n_y_out);

        // Measure-then-guess budget: beamsplitting unit plus the coherent
        // input's own unit.
        let mut ctx = Context::new();
        let input = ctx.coherent(1.0, 1.0);
        let (measured, _, _) = classical_measurement(&mut ctx, &input).unwrap();
        let f_guess = classical_fidelity(measured.n_x_m, measured.n_y_m);

        assert!((f_channel - 0.5).abs() < TOL);
        assert!((f_guess - 0.5).abs() < TOL);
    }

    #[test]
    fn reported_noise_matches_a_sampled_variance() {
        let config = ProtocolConfig::new(0.6, 0.9, 0.7, 1.0).unwrap();
        let mut ctx = Context::new();
        let input = ctx.coherent(1.0, -1.0);
        let circuit = epr_circuit(&mut ctx, &input, &config).unwrap();
        let report = teleport_report(&ctx, &circuit.output, &input, config.gain).unwrap();

        let residual_x = &circuit.output.x - &input.x;
        let residual_y = &circuit.output.y - &input.y;
        let moments = ctx
            .sample_moments(&[&residual_x, &residual_y], 300_000, 23)
            .unwrap();
        for (sampled, analytic) in [
            (moments.variances[0], report.n_x_out),
            (moments.variances[1], report.n_y_out),
        ] {
            let se = moments.variance_std_error(analytic);
            assert!(
                (sampled - analytic).abs() < 4.0 * se,
                "sampled {sampled} vs analytic {analytic} (se {se})"
            );
        }
    }
}
