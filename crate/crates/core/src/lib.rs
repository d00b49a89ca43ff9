//! Exact analysis toolkit for continuous-variable teleportation of coherent
//! states.
//!
//! The crate propagates quadrature observables symbolically through linear
//! optics ([`gaussian`]), evaluates coherent-state fidelities both in closed
//! form and by Monte Carlo ([`fidelity`]), builds the classical and
//! EPR-assisted teleportation channels ([`protocols`]), and analyzes what an
//! eavesdropper on the entanglement-distribution losses can achieve
//! ([`security`]).
//!
//! Conventions: vacuum quadrature variance is 1, a coherent state of
//! amplitude `alpha = (x_a + i·y_a)/2` has mean `(x_a, y_a)`, and noise
//! budgets are referred to the channel input. Under these conventions the
//! classical measure-and-reconstruct channel adds exactly two units of shot
//! noise (fidelity 1/2), and the EPR channel at unity gain adds `2e^{−2r}`.

pub mod error;
pub mod fidelity;
pub mod gaussian;
pub mod numeric;
pub mod protocols;
pub mod security;

pub use error::{Error, Result};
pub use fidelity::{
    classical_fidelity, fidelity_closed_form, fidelity_monte_carlo, fidelity_unity_gain,
    noise_for_fidelity, overlap, FidelityEstimate, GaussianGuess,
};
pub use gaussian::{
    beamsplitter, displace, feedforward, Axis, Context, Mode, QuadratureForm, SampleMoments,
};
pub use protocols::{
    classical_measurement, classical_teleport, epr_circuit, epr_source, epr_teleport,
    equivalent_input_noise, teleport_report, EprCircuit, MeasurementReport, ProtocolConfig,
    TeleportReport,
};
pub use security::{
    classify_regime, compare_eve_bob, conditional_variance, eve_teleport, find_conditional_threshold,
    find_eve_crossover, symmetric_conditional_variance, EveReport, Regime,
};
