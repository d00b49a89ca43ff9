//! Security analysis of the EPR-assisted scheme under transmission losses.
//!
//! Two complementary arguments are implemented. First, Gaussian conditioning:
//! a measurement on one entangled beam can reduce the noise of the other
//! below shot noise only while each arm keeps more than half its intensity.
//! Second, a concrete eavesdropper: Eve reads the classical channel perfectly
//! and holds the mode tapped off the receiver-side loss, from which she builds
//! her own reconstruction by replaying the feedforward on her tap. Comparing
//! her input-referred noise with the receiver's locates the efficiency below
//! which her copy is the better one — exactly one half, independent of the
//! squeezing strength.
//!
//! Fidelities are classified against the two boundaries that matter here: 1/2,
//! the best any classical relay can do, and 2/3, below which the eavesdropper
//! arguments bite.

use crate::error::{Error, Result};
use crate::gaussian::{feedforward, Context, QuadratureForm};
use crate::numeric::bisect;
use crate::protocols::{epr_circuit, epr_source, teleport_report, ProtocolConfig, TeleportReport};

/// Side-by-side noise budgets of the eavesdropper's copy and the receiver's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveReport {
    pub n_x_eve: f64,
    pub n_y_eve: f64,
    pub n_x_bob: f64,
    pub n_y_bob: f64,
    /// True when Eve's total equivalent noise is strictly smaller than Bob's.
    pub eve_wins: bool,
}

/// Fidelity regime relative to the 1/2 and 2/3 boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `F < 1/2`: worse than a classical relay.
    BelowClassical,
    /// `F = 1/2`: the classical limit itself.
    ClassicalBoundary,
    /// `1/2 < F < 2/3`: beats classical but an eavesdropper on a lossy arm
    /// can still hold the better copy.
    Intermediate,
    /// `F ≥ 2/3`: beyond the reach of the loss-based attacks modeled here.
    Secure,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::BelowClassical => "BelowClassical",
            Regime::ClassicalBoundary => "ClassicalBoundary",
            Regime::Intermediate => "Intermediate",
            Regime::Secure => "Secure",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Residual variance of `target` after the optimal linear correction using a
/// measurement of `meas`: `Var(T) − Cov(M,T)²/Var(M)` (Gaussian conditioning).
pub fn conditional_variance(
    ctx: &Context,
    meas: &QuadratureForm,
    target: &QuadratureForm,
) -> Result<f64> {
    let v_meas = ctx.variance(meas)?;
    if v_meas == 0.0 {
        return Err(Error::DegenerateMeasurement);
    }
    let v_target = ctx.variance(target)?;
    let cov = ctx.covariance(meas, target)?;
    Ok(v_target - cov * cov / v_meas)
}

/// Eve's reconstruction: the tap of the receiver-side loss, displaced by the
/// eavesdropped classical readings at the protocol gain.
///
/// She replays exactly the receiver's feedforward on her own mode, so the two
/// copies are compared like-for-like: same classical information, same gain,
/// same input-referred noise definition — they differ only in which loss port
/// each party holds. At `eta_bob = 1` her tap is bare vacuum and the report is
/// her best classical-channel-only copy; at `eta_bob = 0` she holds the whole
/// beam and the roles are exchanged.
pub fn eve_teleport(
    ctx: &mut Context,
    input: &crate::gaussian::Mode,
    config: &ProtocolConfig,
) -> Result<TeleportReport> {
    let circuit = epr_circuit(ctx, input, config)?;
    let eve = feedforward(&circuit.bob_tap, &circuit.meas_x, &circuit.meas_y, config.gain);
    teleport_report(ctx, &eve, input, config.gain)
}

/// Run the receiver's protocol and Eve's rival copy on the same circuit and
/// a coherent test input, and compare their noise budgets.
pub fn compare_eve_bob(config: &ProtocolConfig) -> Result<EveReport> {
    let mut ctx = Context::new();
    let input = ctx.coherent(1.0, 1.0);
    let circuit = epr_circuit(&mut ctx, &input, config)?;

    let bob = teleport_report(&ctx, &circuit.output, &input, config.gain)?;
    let eve_mode = feedforward(&circuit.bob_tap, &circuit.meas_x, &circuit.meas_y, config.gain);
    let eve = teleport_report(&ctx, &eve_mode, &input, config.gain)?;

    Ok(EveReport {
        n_x_eve: eve.n_x_out,
        n_y_eve: eve.n_y_out,
        n_x_bob: bob.n_x_out,
        n_y_bob: bob.n_y_out,
        eve_wins: eve.n_x_out + eve.n_y_out < bob.n_x_out + bob.n_y_out,
    })
}

/// Find the receiver-arm efficiency at which Eve's copy stops being the
/// better one, by bisecting the sign change of `ΣN_eve − ΣN_bob` over
/// `eta_bob ∈ [0, 1]` at unity gain with a lossless sender arm.
///
/// The crossover sits at one half for every `r > 0`; a missing sign change is
/// reported as an error since it would signal a regression in the model.
pub fn find_eve_crossover(r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "(0, inf)",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    bisect(0.0, 1.0, tol, 256, |eta_bob| {
        let config = ProtocolConfig::new(r, 1.0, eta_bob, 1.0).expect("valid config");
        let report = compare_eve_bob(&config).expect("comparison is total on valid configs");
        report.n_x_eve + report.n_y_eve - (report.n_x_bob + report.n_y_bob)
    })
}

/// Find the symmetric per-arm efficiency at which conditioning one entangled
/// beam's X on the other's stops reaching below shot noise: the root of
/// `conditional_variance − 1` in `eta`, which sits at one half for every
/// `r > 0`.
pub fn find_conditional_threshold(r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "(0, inf)",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    // The deficit also vanishes at eta = 0 (uncorrelated vacuum), so bracket
    // away from zero; the deficit is positive throughout (0, 1/2).
    bisect(0.25, 1.0, tol, 256, |eta| {
        symmetric_conditional_variance(r, eta) - 1.0
    })
}

/// Conditional variance of beam 2's X given beam 1's X after symmetric
/// per-arm loss `eta` on an entangled pair of squeezing `r`.
pub fn symmetric_conditional_variance(r: f64, eta: f64) -> f64 {
    let mut ctx = Context::new();
    let (beam1, beam2) = epr_source(&mut ctx, r).expect("r validated by caller");
    let (arm1, _) = ctx.loss(&beam1, eta).expect("eta in range");
    let (arm2, _) = ctx.loss(&beam2, eta).expect("eta in range");
    conditional_variance(&ctx, &arm1.x, &arm2.x).expect("nondegenerate by construction")
}

/// Classify a fidelity against the 1/2 and 2/3 boundaries. Exactly 1/2 maps
/// to the boundary label; 2/3 and above count as secure.
pub fn classify_regime(f: f64) -> Result<Regime> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange {
            name: "f",
            value: f,
            range: "[0, 1]",
        });
    }
    Ok(if f < 0.5 {
        Regime::BelowClassical
    } else if f == 0.5 {
        Regime::ClassicalBoundary
    } else if f < 2.0 / 3.0 {
        Regime::Intermediate
    } else {
        Regime::Secure
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::{fidelity_unity_gain, noise_for_fidelity};
    use crate::gaussian::Axis;
    use crate::protocols::epr_teleport;

    const TOL: f64 = 1e-12;

    #[test]
    fn conditioning_on_an_independent_form_changes_nothing() {
        let mut ctx = Context::new();
        let a = ctx.vacuum();
        let b = ctx.squeezed(0.5, Axis::X).unwrap();
        let cv = conditional_variance(&ctx, &a.x, &b.x).unwrap();
        assert_eq!(cv, ctx.variance(&b.x).unwrap());
    }

    #[test]
    fn conditioning_a_form_on_itself_is_deterministic() {
        let mut ctx = Context::new();
        let a = ctx.vacuum();
        let cv = conditional_variance(&ctx, &a.x, &a.x).unwrap();
        assert!(cv.abs() < TOL);
    }

    #[test]
    fn conditioning_never_increases_variance() {
        let mut ctx = Context::new();
        let s = ctx.squeezed(0.8, Axis::Y).unwrap();
        let v = ctx.vacuum();
        let (o1, o2) = crate::gaussian::beamsplitter(&s, &v, 0.37).unwrap();
        for (m, t) in [(&o1.x, &o2.x), (&o1.y, &o2.y), (&o2.x, &o1.y)] {
            let cv = conditional_variance(&ctx, m, t).unwrap();
            assert!(cv <= ctx.variance(t).unwrap() + TOL);
        }
    }

    #[test]
    fn conditioning_rejects_degenerate_measurements() {
        let mut ctx = Context::new();
        let a = ctx.vacuum();
        let zero = &a.x - &a.x;
        assert_eq!(
            conditional_variance(&ctx, &zero, &a.x),
            Err(Error::DegenerateMeasurement)
        );
    }

    #[test]
    fn sub_shot_noise_conditioning_needs_majority_transmission() {
        let r = 5.0;
        assert!(symmetric_conditional_variance(r, 0.55) < 1.0);
        assert!(symmetric_conditional_variance(r, 0.45) > 1.0);
        let threshold = find_conditional_threshold(r, 1e-9).unwrap();
        assert!((threshold - 0.5).abs() < 1e-6);
    }

    #[test]
    fn eve_with_a_balanced_tap_matches_bob() {
        let config = ProtocolConfig::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let report = compare_eve_bob(&config).unwrap();
        let eve_total = report.n_x_eve + report.n_y_eve;
        let bob_total = report.n_x_bob + report.n_y_bob;
        assert!((eve_total - bob_total).abs() <= 1e-9);
        assert!(!report.eve_wins);
    }

    #[test]
    fn total_loss_exchanges_the_roles() {
        // With the receiver's arm fully lost, Eve holds the entire beam and
        // her budget equals what the receiver would have on a lossless arm.
        for r in [0.3, 1.0, 2.0] {
            let lossless = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
            let mut ctx = Context::new();
            let input = ctx.coherent(1.0, 1.0);
            let bob_ideal = epr_teleport(&mut ctx, &input, &lossless).unwrap();

            let all_lost = ProtocolConfig::new(r, 1.0, 0.0, 1.0).unwrap();
            let report = compare_eve_bob(&all_lost).unwrap();
            assert!((report.n_x_eve - bob_ideal.n_x_out).abs() < TOL);
            assert!((report.n_y_eve - bob_ideal.n_y_out).abs() < TOL);
            assert!(report.eve_wins);
        }
    }

    #[test]
    fn lossless_receiver_arm_beats_eve_at_any_squeezing() {
        for r in [0.05, 0.1, 0.5, 1.0, 5.0] {
            let config = ProtocolConfig::new(r, 1.0, 1.0, 1.0).unwrap();
            let report = compare_eve_bob(&config).unwrap();
            assert!(!report.eve_wins, "r = {r}: {report:?}");
        }
    }

    #[test]
    fn eve_wins_below_half_transmission_and_loses_above() {
        let below = ProtocolConfig::new(2.0, 1.0, 0.3, 1.0).unwrap();
        assert!(compare_eve_bob(&below).unwrap().eve_wins);

        let above = ProtocolConfig::new(1.0, 1.0, 0.8, 1.0).unwrap();
        assert!(!compare_eve_bob(&above).unwrap().eve_wins);
    }

    #[test]
    fn report_flag_matches_its_invariant() {
        for eta in [0.2, 0.5, 0.9] {
            let config = ProtocolConfig::new(1.0, 1.0, eta, 1.0).unwrap();
            let report = compare_eve_bob(&config).unwrap();
            assert_eq!(
                report.eve_wins,
                report.n_x_eve + report.n_y_eve < report.n_x_bob + report.n_y_bob
            );
        }
    }

    #[test]
    fn swapping_loss_ports_swaps_the_reports() {
        for (r, eta) in [(0.5, 0.2), (1.0, 0.35), (2.0, 0.8)] {
            let config = ProtocolConfig::new(r, 1.0, eta, 1.0).unwrap();
            let swapped = ProtocolConfig::new(r, 1.0, 1.0 - eta, 1.0).unwrap();
            let a = compare_eve_bob(&config).unwrap();
            let b = compare_eve_bob(&swapped).unwrap();
            assert!((a.n_x_eve - b.n_x_bob).abs() < TOL);
            assert!((a.n_y_eve - b.n_y_bob).abs() < TOL);
            assert!((a.n_x_bob - b.n_x_eve).abs() < TOL);
            assert!((a.n_y_bob - b.n_y_eve).abs() < TOL);
        }
    }

    #[test]
    fn crossover_is_one_half_for_all_squeezing_strengths() {
        for r in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let eta = find_eve_crossover(r, 1e-9).unwrap();
            assert!((eta - 0.5).abs() < 1e-6, "r = {r}: eta = {eta}");
        }
    }

    #[test]
    fn crossover_rejects_degenerate_parameters() {
        assert!(find_eve_crossover(0.0, 1e-6).is_err());
        assert!(find_eve_crossover(1.0, 0.0).is_err());
        assert!(find_conditional_threshold(0.0, 1e-6).is_err());
    }

    #[test]
    fn regime_labels() {
        assert_eq!(classify_regime(0.3).unwrap(), Regime::BelowClassical);
        assert_eq!(classify_regime(0.5).unwrap(), Regime::ClassicalBoundary);
        assert_eq!(classify_regime(0.6).unwrap(), Regime::Intermediate);
        assert_eq!(classify_regime(2.0 / 3.0).unwrap(), Regime::Secure);
        assert_eq!(classify_regime(1.0).unwrap(), Regime::Secure);
        assert!(classify_regime(-0.1).is_err());
        assert!(classify_regime(1.1).is_err());
        assert_eq!(Regime::Intermediate.to_string(), "Intermediate");
    }

    #[test]
    fn regime_flips_exactly_at_the_noise_boundaries() {
        let delta = 1e-9;
        assert_eq!(
            classify_regime(fidelity_unity_gain(2.0, 2.0)).unwrap(),
            Regime::ClassicalBoundary
        );
        assert_eq!(
            classify_regime(fidelity_unity_gain(2.0 + delta, 2.0 + delta)).unwrap(),
            Regime::BelowClassical
        );
        assert_eq!(
            classify_regime(fidelity_unity_gain(2.0 - delta, 2.0 - delta)).unwrap(),
            Regime::Intermediate
        );
        assert_eq!(
            classify_regime(fidelity_unity_gain(1.0, 1.0)).unwrap(),
            Regime::Secure
        );
        assert_eq!(
            classify_regime(fidelity_unity_gain(1.0 + delta, 1.0 + delta)).unwrap(),
            Regime::Intermediate
        );
        // The boundary noises agree with the inverse map.
        assert!((noise_for_fidelity(0.5).unwrap() - 2.0).abs() < TOL);
        assert!((noise_for_fidelity(2.0 / 3.0).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn classical_boundary_tolerates_any_loss_without_conditioning() {
        // Deep symmetric losses keep the channel above the classical
        // boundary at strong squeezing, yet deny sub-shot-noise conditioning
        // the moment transmission drops below one half.
        let r = 5.0;
        for eta in [1e-3, 1e-2, 0.1, 0.3, 0.49] {
            let config = ProtocolConfig::symmetric(r, eta, 1.0).unwrap();
            let mut ctx = Context::new();
            let input = ctx.coherent(1.0, 1.0);
            let report = epr_teleport(&mut ctx, &input, &config).unwrap();
            let f = report.fidelity_at_unity_gain.unwrap();
            assert!(f > 0.5, "eta = {eta}: F = {f}");
            assert!(
                symmetric_conditional_variance(r, eta) >= 1.0,
                "eta = {eta} should not condition below shot noise"
            );
        }
    }
}
