//! Lossy-cavity dynamics conditioned on the detector registering no
//! photon, the quantum-jump collapse when one photon is detected, and the
//! cumulative detection probability.
//!
//! Under continuous perfect monitoring the no-detection state stays pure
//! and evolves by the non-Hermitian generator obtained by adding
//! `-i Gamma b†b / 2` to the carrier interaction. On the per-m blocks
//! spanned by |m,0,e> and |m,1,g> the flow has a closed form governed by
//! the discriminant `D = Gamma² - 16 lambda_LD(m)²`: overdamped for D > 0,
//! oscillatory for D < 0, with an exceptional point at D = 0.
//!
//! One complex-arithmetic formula covers all three regimes: for D < 0 the
//! square root turns imaginary and cosh/sinh become cos/sin on their own.
//! Within |D| < 1e-12 of the exceptional point the `sinh(x)/x`-style
//! factors switch to their Taylor limits, keeping the formula branch-free
//! and accurate where the discriminant vanishes.

use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

use crate::hilbert::{CompositeState, InternalLevel, MotionalState, SystemParams};
use crate::lamb_dicke::coupling_ld;
use crate::numerics::KahanSum;
use crate::{Error, Result};

/// Below this distance from the exceptional point the closed form switches
/// to its series limit.
pub const DISCRIMINANT_FLOOR: f64 = 1e-12;

/// The pair of per-m amplitude vectors of the no-detection state at a
/// fixed time: `a` on the |m,0,e> sector, `b` on |m,1,g>.
///
/// The survival norm `Σ (|a_m|² + |b_m|²)` starts at 1 and decays
/// monotonically for Gamma > 0; it is the no-detection probability.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionalAmplitudes {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    tau: f64,
}

impl ConditionalAmplitudes {
    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn m_levels(&self) -> usize {
        self.a.len()
    }

    /// `Σ (|a_m|² + |b_m|²)`, compensated.
    pub fn survival_norm(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (a, b) in self.a.iter().zip(&self.b) {
            acc.add(a.norm_sqr());
            acc.add(b.norm_sqr());
        }
        acc.total()
    }

    /// Embed into the composite basis (|m,0,e> and |m,1,g> sectors).
    pub fn to_composite(&self) -> CompositeState {
        let m_levels = self.a.len();
        let mut amps = vec![Complex64::ZERO; 4 * m_levels];
        for m in 0..m_levels {
            amps[CompositeState::index(m, 0, InternalLevel::Excited)] = self.a[m];
            amps[CompositeState::index(m, 1, InternalLevel::Ground)] = self.b[m];
        }
        CompositeState::from_amplitudes(amps, m_levels).expect("layout is consistent")
    }

    /// JSON dump of the raw vectors, for golden-file comparisons.
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("serializable");
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

/// Per-m factors (C + (Gamma/sqrt(D)) S, S/sqrt(D)) with
/// C = cosh(sqrt(D) tau/4), S = sinh(sqrt(D) tau/4), valid across both
/// regimes and through the exceptional point.
fn block_factors(gamma: f64, lambda: f64, tau: f64) -> (Complex64, Complex64) {
    let d = gamma * gamma - 16.0 * lambda * lambda;
    if d.abs() < DISCRIMINANT_FLOOR {
        // series limit: C -> 1 + D tau²/32, S/sqrt(D) -> (tau/4)(1 + D tau²/96)
        let c = Complex64::new(1.0 + d * tau * tau / 32.0, 0.0);
        let s_over_root = Complex64::new(0.25 * tau * (1.0 + d * tau * tau / 96.0), 0.0);
        (c, s_over_root)
    } else {
        let root = Complex64::new(d, 0.0).sqrt();
        let arg = root * (0.25 * tau);
        let c = arg.cosh();
        let s_over_root = arg.sinh() / root;
        (c, s_over_root)
    }
}

/// Closed-form no-detection amplitudes at time `tau` (1/g units), from the
/// initial state |alpha>_v |0>_c |e>:
///
/// `a_m = c_m e^{-Gamma tau/4} (C + Gamma S / sqrt(D))`,
/// `b_m = -4 i c_m e^{-Gamma tau/4} lambda_LD(m) S / sqrt(D)`.
pub fn amplitudes(params: &SystemParams, tau: f64) -> ConditionalAmplitudes {
    let m_levels = params.m_levels();
    let gamma = params.gamma();
    let coherent = MotionalState::coherent(params.alpha(), m_levels);
    let envelope = (-0.25 * gamma * tau).exp();
    let mut a = Vec::with_capacity(m_levels);
    let mut b = Vec::with_capacity(m_levels);
    for m in 0..m_levels {
        let lambda = coupling_ld(params.eta(), m);
        let (c_factor, s_over_root) = block_factors(gamma, lambda, tau);
        let c_m = coherent.amplitude(m) * envelope;
        a.push(c_m * (c_factor + gamma * s_over_root));
        b.push(c_m * Complex64::new(0.0, -4.0 * lambda) * s_over_root);
    }
    ConditionalAmplitudes { a, b, tau }
}

/// Probability that at least one photon has been detected by `tau`:
/// `P(tau) = 1 - Σ (|a_m|² + |b_m|²)`, clamped into [0, 1].
pub fn jump_probability(params: &SystemParams, tau: f64) -> f64 {
    (1.0 - amplitudes(params, tau).survival_norm()).clamp(0.0, 1.0)
}

/// Alias for [`ConditionalAmplitudes::survival_norm`].
pub fn survival_norm(amps: &ConditionalAmplitudes) -> f64 {
    amps.survival_norm()
}

/// State right after a photon detection at `tau`: the cavity drops to
/// vacuum, the ion to its ground level, and the motion is left in the
/// pure normalized state with amplitudes `b_m / ‖b‖`.
///
/// (Applying b̂ to Σ b_m |m,1,g> lands on internal level g; the printed
/// account of this collapse labels the level e, but the motional part is
/// identical either way.)
#[derive(Clone, Debug)]
pub struct PostJumpState {
    pub motional: MotionalState,
    pub internal: InternalLevel,
    pub cavity_photons: u8,
}

/// Collapse after a detection at `tau`. Errors when there is no photon
/// amplitude to detect (tau = 0, or Gamma and tau such that b ≡ 0).
pub fn post_jump_state(params: &SystemParams, tau: f64) -> Result<PostJumpState> {
    let amps = amplitudes(params, tau);
    let b = MotionalState::from_amplitudes(amps.b.clone());
    let motional = b.normalized().map_err(|e| match e {
        Error::ZeroNorm { .. } => Error::NoPhotonToDetect { tau },
        other => other,
    })?;
    Ok(PostJumpState {
        motional,
        internal: InternalLevel::Ground,
        cavity_photons: 0,
    })
}

/// `(tau, P_jump, survival)` rows for the detection-probability export.
pub fn survival_series(params: &SystemParams, taus: &[f64]) -> Vec<(f64, f64, f64)> {
    taus.iter()
        .map(|&tau| {
            let s = amplitudes(params, tau).survival_norm();
            (tau, (1.0 - s).clamp(0.0, 1.0), s)
        })
        .collect()
}
