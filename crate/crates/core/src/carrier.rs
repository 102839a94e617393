//! Ideal-cavity (lossless) dynamics on the carrier resonance: closed-form
//! evolution from |alpha>_v |0>_c |e>, the even/odd coherent-state
//! superpositions it generates, and the internal-state measurement that
//! disentangles them.
//!
//! Two equivalent closed forms exist for the evolved state: per-Fock-level
//! amplitudes `c_m cos(lambda_LD(m) tau)` / `-i c_m sin(lambda_LD(m) tau)`,
//! and the cat-state decomposition driven by the precession scale
//! `omega_eta = 1 - eta²/2` and the rotation phase `phi = eta² tau`. Both
//! are implemented and the equivalence is under test.
//!
//! At the special times `omega_eta tau_k = k pi` the state reduces (up to
//! a global (-1)^k) to |Phi+>|0>|e> + |Phi->|1>|g>, so measuring the
//! internal level collapses the motion onto a single cat. The printed form
//! of that time condition omits the omega_eta factor; only the reading
//! implemented here reproduces the cat decomposition, and the global phase
//! is tracked rather than dropped.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::hilbert::{CompositeState, InternalLevel, MotionalState, SystemParams};
use crate::lamb_dicke::coupling_ld;
use crate::{Error, Result};

/// Relative parity of the two coherent components of a cat.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatSign {
    Plus,
    Minus,
}

/// Specification of a coherent-state superposition
/// `(|alpha e^{i phi}> ± |alpha e^{-i phi}>) / 2`.
#[derive(Clone, Copy, Debug)]
pub struct CatSpec {
    pub alpha: Complex64,
    pub phi: f64,
    pub sign: CatSign,
}

/// Fock-basis amplitudes of the cat with the paper's divisor-2 convention,
/// which is *not* unit norm: `c_m cos(m phi)` for the plus sign,
/// `i c_m sin(m phi)` for the minus sign.
pub fn cat_state_raw(spec: &CatSpec, m_levels: usize) -> MotionalState {
    let coherent = MotionalState::coherent(spec.alpha, m_levels);
    let amps = (0..m_levels)
        .map(|m| {
            let c = coherent.amplitude(m);
            let angle = m as f64 * spec.phi;
            match spec.sign {
                CatSign::Plus => c * angle.cos(),
                CatSign::Minus => Complex64::I * c * angle.sin(),
            }
        })
        .collect();
    MotionalState::from_amplitudes(amps)
}

/// Unit-norm cat state. The minus cat at `phi = 0` cancels identically
/// and is reported as [`Error::DegenerateCat`].
pub fn cat_state(spec: &CatSpec, m_levels: usize) -> Result<MotionalState> {
    cat_state_raw(spec, m_levels).normalized().map_err(|e| match e {
        Error::ZeroNorm { .. } => Error::DegenerateCat,
        other => other,
    })
}

/// Closed-form lossless evolution of |alpha>_v |0>_c |e> to time `tau`
/// (in 1/g units): amplitude `c_m cos(lambda_LD(m) tau)` on |m,0,e> and
/// `-i c_m sin(lambda_LD(m) tau)` on |m,1,g>. Unit norm for every tau.
pub fn evolve_ideal(params: &SystemParams, tau: f64) -> CompositeState {
    let m_levels = params.m_levels();
    let coherent = MotionalState::coherent(params.alpha(), m_levels);
    let mut amps = vec![Complex64::ZERO; 4 * m_levels];
    for m in 0..m_levels {
        let c = coherent.amplitude(m);
        let angle = coupling_ld(params.eta(), m) * tau;
        amps[CompositeState::index(m, 0, InternalLevel::Excited)] = c * angle.cos();
        amps[CompositeState::index(m, 1, InternalLevel::Ground)] =
            -Complex64::I * c * angle.sin();
    }
    CompositeState::from_amplitudes(amps, m_levels).expect("layout is consistent")
}

/// The k-th cat-generation time, solving `omega_eta tau = k pi`:
/// `tau_k = k pi / (1 - eta²/2)`.
pub fn t_k(params: &SystemParams, k: u32) -> f64 {
    k as f64 * PI / params.omega_eta()
}

/// Cat rotation phase accumulated by time `tau`: `phi = eta² tau`.
pub fn phase_at(params: &SystemParams, tau: f64) -> f64 {
    params.eta() * params.eta() * tau
}

/// State at `tau_k` for k >= 1. Equals, up to the global phase (-1)^k, the
/// decomposition |Phi+>|0>|e> + |Phi->|1>|g> with `phi = phase_at(tau_k)`.
pub fn state_at_tk(params: &SystemParams, k: u32) -> CompositeState {
    assert!(k >= 1, "the protocol times are indexed from k = 1");
    evolve_ideal(params, t_k(params, k))
}

/// Project onto an internal-level outcome, drop the cavity sector the
/// outcome determines, and renormalize the motional remainder. Returns
/// the collapsed motional state and the outcome probability.
///
/// The projected state must live in a single cavity sector (which every
/// state reachable from |alpha,0,e> does: outcome e pairs with n = 0,
/// outcome g with n = 1 or, after a jump, n = 0); otherwise the reduced
/// motional state would be mixed and [`Error::EntangledCavity`] is raised.
pub fn measure_internal(
    state: &CompositeState,
    outcome: InternalLevel,
) -> Result<(MotionalState, f64)> {
    let vacuum = state.sector(0, outcome);
    let one_photon = state.sector(1, outcome);
    let p0 = vacuum.norm_sq();
    let p1 = one_photon.norm_sq();
    let probability = p0 + p1;
    if probability < 1e-300 {
        return Err(Error::DegenerateMeasurement { outcome });
    }
    let cross_tol = 1e-24 * probability;
    let motional = if p1 <= cross_tol {
        vacuum
    } else if p0 <= cross_tol {
        one_photon
    } else {
        return Err(Error::EntangledCavity { outcome });
    };
    Ok((motional.normalized()?, probability))
}

/// One row of the lossless time series exported by the CLI.
#[derive(Clone, Copy, Debug)]
pub struct CarrierRow {
    pub tau: f64,
    pub p_excited: f64,
    pub p_ground: f64,
    /// Fidelity of the (n=0, e) motional sector against |Phi+(phi(tau))>.
    pub fidelity_plus: f64,
    /// Fidelity of the (n=1, g) motional sector against |Phi-(phi(tau))>.
    pub fidelity_minus: f64,
}

/// Lossless evolution sampled on a time grid, with sector populations and
/// cat fidelities per sample.
pub fn time_series(params: &SystemParams, taus: &[f64]) -> Vec<CarrierRow> {
    taus.iter()
        .map(|&tau| {
            let state = evolve_ideal(params, tau);
            let excited = state.sector(0, InternalLevel::Excited);
            let ground = state.sector(1, InternalLevel::Ground);
            let phi = phase_at(params, tau);
            let plus = cat_state_raw(
                &CatSpec {
                    alpha: params.alpha(),
                    phi,
                    sign: CatSign::Plus,
                },
                params.m_levels(),
            );
            let minus = cat_state_raw(
                &CatSpec {
                    alpha: params.alpha(),
                    phi,
                    sign: CatSign::Minus,
                },
                params.m_levels(),
            );
            let fid = |sector: &MotionalState, cat: &MotionalState| {
                if sector.norm_sq() < 1e-300 || cat.norm_sq() < 1e-300 {
                    f64::NAN
                } else {
                    crate::hilbert::fidelity(sector, cat).expect("matching dimensions")
                }
            };
            CarrierRow {
                tau,
                p_excited: excited.norm_sq(),
                p_ground: ground.norm_sq(),
                fidelity_plus: fid(&excited, &plus),
                fidelity_minus: fid(&ground, &minus),
            }
        })
        .collect()
}
