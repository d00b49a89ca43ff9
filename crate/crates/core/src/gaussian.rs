//! Exact linear-Gaussian algebra over quadrature observables.
//!
//! Every optical mode is represented by two [`QuadratureForm`]s, one per
//! quadrature. A form is an affine combination of independent Gaussian noise
//! sources registered in a [`Context`]: `offset + Σ coeff_i · s_i` with
//! `s_i ~ N(0, variance_i)`. Passive and active transformations act on the
//! coefficients, so means, variances and covariances are available in closed
//! form at any point of a circuit — no sampling, no truncation.
//!
//! The vacuum quadrature variance is normalized to 1, and a coherent state of
//! amplitude `alpha = (x_a + i·y_a)/2` is a vacuum displaced to mean
//! `(x_a, y_a)`. All noise figures in the crate are expressed in these units.
//!
//! Sampling ([`Context::sample`]) draws every registered source once per shot
//! and evaluates the requested forms, providing an independent Monte Carlo
//! path for every analytic moment.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Which quadrature of a squeezed mode carries the reduced noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Identifier of one independent Gaussian noise source within a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceId(u32);

/// Registry of independent Gaussian noise sources.
///
/// Sources are only ever added (state preparation and loss channels register
/// fresh vacuum sources); existing entries are never mutated. Forms created
/// in one context cannot be evaluated against another: every cross-context
/// operation reports [`Error::ContextMismatch`].
#[derive(Debug, Clone)]
pub struct Context {
    id: u64,
    variances: Vec<f64>,
}

impl Context {
    pub fn new() -> Self {
        Context {
            id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
            variances: Vec::new(),
        }
    }

    /// Number of registered noise sources.
    pub fn num_sources(&self) -> usize {
        self.variances.len()
    }

    fn add_source(&mut self, variance: f64) -> SourceId {
        debug_assert!(variance >= 0.0);
        let id = SourceId(self.variances.len() as u32);
        self.variances.push(variance);
        id
    }

    fn unit_form(&mut self, variance: f64) -> QuadratureForm {
        let id = self.add_source(variance);
        let mut terms = BTreeMap::new();
        terms.insert(id, 1.0);
        QuadratureForm {
            ctx_id: self.id,
            offset: 0.0,
            terms,
        }
    }

    /// A fresh vacuum mode: unit variance on both quadratures, zero mean,
    /// uncorrelated with everything created before.
    pub fn vacuum(&mut self) -> Mode {
        Mode {
            x: self.unit_form(1.0),
            y: self.unit_form(1.0),
        }
    }

    /// A coherent state of amplitude `(x_a + i·y_a)/2`: vacuum statistics
    /// displaced to mean `(x_a, y_a)`.
    pub fn coherent(&mut self, x_a: f64, y_a: f64) -> Mode {
        displace(&self.vacuum(), x_a, y_a)
    }

    /// A squeezed vacuum with noise `e^{-2r}` on `axis` and `e^{+2r}` on the
    /// conjugate quadrature.
    pub fn squeezed(&mut self, r: f64, axis: Axis) -> Result<Mode> {
        if !(r >= 0.0) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                range: "[0, inf)",
            });
        }
        let reduced = (-2.0 * r).exp();
        let amplified = (2.0 * r).exp();
        let (vx, vy) = match axis {
            Axis::X => (reduced, amplified),
            Axis::Y => (amplified, reduced),
        };
        Ok(Mode {
            x: self.unit_form(vx),
            y: self.unit_form(vy),
        })
    }

    /// Transmission through a channel of intensity efficiency `eta`, modeled
    /// as a beamsplitter against a fresh vacuum. Returns the transmitted mode
    /// and the tapped port; the tap is kept so that an eavesdropper holding
    /// the channel losses can be modeled explicitly.
    pub fn loss(&mut self, mode: &Mode, eta: f64) -> Result<(Mode, Mode)> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange {
                name: "eta",
                value: eta,
                range: "[0, 1]",
            });
        }
        let v = self.vacuum();
        self.check(&mode.x)?;
        beamsplitter(mode, &v, eta)
    }

    fn check(&self, form: &QuadratureForm) -> Result<()> {
        if form.ctx_id == self.id {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Exact variance of a form: `Σ coeff_i² · variance_i`.
    pub fn variance(&self, form: &QuadratureForm) -> Result<f64> {
        self.check(form)?;
        Ok(form
            .terms
            .iter()
            .map(|(id, c)| c * c * self.variances[id.0 as usize])
            .sum())
    }

    /// Exact covariance of two forms over their shared sources.
    pub fn covariance(&self, a: &QuadratureForm, b: &QuadratureForm) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.terms
            .iter()
            .filter_map(|(id, ca)| {
                b.terms
                    .get(id)
                    .map(|cb| ca * cb * self.variances[id.0 as usize])
            })
            .sum())
    }

    /// Draw `n` joint samples of `forms`. Each draw samples every registered
    /// source once and evaluates all forms against the same source values, so
    /// correlations between forms are reproduced exactly. Deterministic for a
    /// fixed `seed`.
    pub fn sample(&self, forms: &[&QuadratureForm], n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        for f in forms {
            self.check(f)?;
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let scales: Vec<f64> = self.variances.iter().map(|v| v.sqrt()).collect();
        let mut draws = vec![0.0; scales.len()];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            for (d, s) in draws.iter_mut().zip(&scales) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *d = s * z;
            }
            out.push(
                forms
                    .iter()
                    .map(|f| {
                        f.offset
                            + f.terms
                                .iter()
                                .map(|(id, c)| c * draws[id.0 as usize])
                                .sum::<f64>()
                    })
                    .collect(),
            );
        }
        Ok(out)
    }

    /// Streaming sample moments of `forms` over `n` seeded draws: means,
    /// variances and the full covariance matrix, without materializing the
    /// sample matrix. Only the sources the forms actually reference are
    /// drawn, which leaves the statistics unchanged.
    pub fn sample_moments(
        &self,
        forms: &[&QuadratureForm],
        n: usize,
        seed: u64,
    ) -> Result<SampleMoments> {
        for f in forms {
            self.check(f)?;
        }
        // Dense index over the union of referenced sources.
        let mut used: Vec<u32> = forms
            .iter()
            .flat_map(|f| f.terms.keys().map(|id| id.0))
            .collect();
        used.sort_unstable();
        used.dedup();
        let slot_of = |id: u32| used.binary_search(&id).unwrap();
        let compiled: Vec<(f64, Vec<(usize, f64)>)> = forms
            .iter()
            .map(|f| {
                (
                    f.offset,
                    f.terms
                        .iter()
                        .map(|(id, c)| (slot_of(id.0), *c))
                        .collect(),
                )
            })
            .collect();
        let scales: Vec<f64> = used
            .iter()
            .map(|id| self.variances[*id as usize].sqrt())
            .collect();

        let k = forms.len();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut draws = vec![0.0; scales.len()];
        let mut values = vec![0.0; k];
        let mut means = vec![0.0; k];
        let mut comoments = vec![vec![0.0; k]; k];
        for step in 0..n {
            for (d, s) in draws.iter_mut().zip(&scales) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *d = s * z;
            }
            for (v, (offset, terms)) in values.iter_mut().zip(&compiled) {
                *v = offset + terms.iter().map(|(slot, c)| c * draws[*slot]).sum::<f64>();
            }
            // Welford update for means and centered co-moments.
            let count = (step + 1) as f64;
            let deltas: Vec<f64> = values.iter().zip(&means) .map(|(v, m)| v - m).collect();
            for (m, d) in means.iter_mut().zip(&deltas) {
                *m += d / count;
            }
            for i in 0..k {
                for j in i..k {
                    let update = deltas[i] * (values[j] - means[j]);
                    comoments[i][j] += update;
                    if i != j {
                        comoments[j][i] += update;
                    }
                }
            }
        }
        let denom = (n.max(2) - 1) as f64;
        let covariance: Vec<Vec<f64>> = comoments
            .iter()
            .map(|row| row.iter().map(|c| c / denom).collect())
            .collect();
        Ok(SampleMoments {
            n,
            variances: (0..k).map(|i| covariance[i][i]).collect(),
            means,
            covariance,
        })
    }
}

impl Default for Context {
    fn default() -> Self {
        Self::new()
    }
}

/// Sample statistics returned by [`Context::sample_moments`].
#[derive(Debug, Clone)]
pub struct SampleMoments {
    pub n: usize,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

impl SampleMoments {
    /// Standard error of a sample mean whose population variance is `variance`.
    pub fn mean_std_error(&self, variance: f64) -> f64 {
        (variance / self.n as f64).sqrt()
    }

    /// Standard error of a Gaussian sample variance whose population variance
    /// is `variance`.
    pub fn variance_std_error(&self, variance: f64) -> f64 {
        variance * (2.0 / (self.n as f64 - 1.0)).sqrt()
    }

    /// Standard error of a Gaussian sample covariance given the population
    /// variances and covariance.
    pub fn covariance_std_error(&self, var_a: f64, var_b: f64, cov: f64) -> f64 {
        ((var_a * var_b + cov * cov) / (self.n as f64 - 1.0)).sqrt()
    }
}

/// One quadrature observable as an affine combination of noise sources.
///
/// `mean = offset`; second moments follow from the coefficients and the
/// source variances held by the owning [`Context`]. Forms combine linearly
/// (`+`, `-`, scaling by `f64`), which is exactly how linear optics acts on
/// quadratures in the Heisenberg picture.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureForm {
    ctx_id: u64,
    offset: f64,
    terms: BTreeMap<SourceId, f64>,
}

impl QuadratureForm {
    /// Deterministic mean of the observable.
    pub fn mean(&self) -> f64 {
        self.offset
    }

    /// The form scaled by `factor` (mean and all coefficients).
    pub fn scale(&self, factor: f64) -> QuadratureForm {
        let mut terms: BTreeMap<SourceId, f64> = self
            .terms
            .iter()
            .map(|(id, c)| (*id, c * factor))
            .collect();
        terms.retain(|_, c| *c != 0.0);
        QuadratureForm {
            ctx_id: self.ctx_id,
            offset: self.offset * factor,
            terms,
        }
    }

    /// The form shifted by a deterministic amount.
    pub fn shift(&self, delta: f64) -> QuadratureForm {
        QuadratureForm {
            ctx_id: self.ctx_id,
            offset: self.offset + delta,
            terms: self.terms.clone(),
        }
    }

    fn combine(&self, other: &QuadratureForm, factor: f64) -> QuadratureForm {
        assert_eq!(
            self.ctx_id, other.ctx_id,
            "cannot combine quadrature forms from different simulation contexts"
        );
        let mut terms = self.terms.clone();
        for (id, c) in &other.terms {
            let entry = terms.entry(*id).or_insert(0.0);
            *entry += factor * c;
            if *entry == 0.0 {
                terms.remove(id);
            }
        }
        QuadratureForm {
            ctx_id: self.ctx_id,
            offset: self.offset + factor * other.offset,
            terms,
        }
    }
}

impl Add<&QuadratureForm> for &QuadratureForm {
    type Output = QuadratureForm;
    fn add(self, rhs: &QuadratureForm) -> QuadratureForm {
        self.combine(rhs, 1.0)
    }
}

impl Sub<&QuadratureForm> for &QuadratureForm {
    type Output = QuadratureForm;
    fn sub(self, rhs: &QuadratureForm) -> QuadratureForm {
        self.combine(rhs, -1.0)
    }
}

impl Mul<f64> for &QuadratureForm {
    type Output = QuadratureForm;
    fn mul(self, rhs: f64) -> QuadratureForm {
        self.scale(rhs)
    }
}

/// One optical mode: a pair of quadrature forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub x: QuadratureForm,
    pub y: QuadratureForm,
}

/// Mix two modes on a beamsplitter of intensity transmission `t`:
///
/// ```text
/// out1 = √t·m1 + √(1−t)·m2
/// out2 = √(1−t)·m1 − √t·m2
/// ```
///
/// applied identically to both quadratures (real orthogonal mixing; the minus
/// sign sits on the second output's second input).
pub fn beamsplitter(m1: &Mode, m2: &Mode, t: f64) -> Result<(Mode, Mode)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1]",
        });
    }
    if m1.x.ctx_id != m2.x.ctx_id {
        return Err(Error::ContextMismatch);
    }
    let ct = t.sqrt();
    let cr = (1.0 - t).sqrt();
    let out1 = Mode {
        x: m1.x.scale(ct).combine(&m2.x, cr),
        y: m1.y.scale(ct).combine(&m2.y, cr),
    };
    let out2 = Mode {
        x: m1.x.scale(cr).combine(&m2.x, -ct),
        y: m1.y.scale(cr).combine(&m2.y, -ct),
    };
    Ok((out1, out2))
}

/// Shift a mode's means by `(dx, dy)`; all second moments are unchanged.
pub fn displace(mode: &Mode, dx: f64, dy: f64) -> Mode {
    Mode {
        x: mode.x.shift(dx),
        y: mode.y.shift(dy),
    }
}

/// Add `gain` times the measured forms onto a mode: the symbolic version of a
/// feedforward displacement conditioned on homodyne outcomes. Correlations
/// between the mode and the measured forms are preserved exactly, which is
/// what lets anticorrelated noise cancel.
pub fn feedforward(
    mode: &Mode,
    measured_x: &QuadratureForm,
    measured_y: &QuadratureForm,
    gain: f64,
) -> Mode {
    Mode {
        x: mode.x.combine(measured_x, gain),
        y: mode.y.combine(measured_y, gain),
    }
}
