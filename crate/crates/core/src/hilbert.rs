//! Truncated-Fock-space foundation: basis indexing, coherent-state
//! amplitudes, inner products, norms, and the cavity jump operator as an
//! index-shift map.
//!
//! The composite basis is |m>_v ⊗ |n>_c ⊗ |q>_ion with m in `0..M`,
//! photon number n in {0, 1} and internal level q in {g, e}. The flat
//! index is m-major: `idx = 4 m + 2 n + q` with g = 0, e = 1. The layout
//! is fixed so golden files stay bit-stable.
//!
//! All states are immutable after construction and all operations are pure
//! functions, so values can be shared freely across worker threads.

use num_complex::Complex64;

use crate::numerics::{kahan_sum, KahanSum};
use crate::{Error, Result};

/// Squared norms below this are treated as identically zero.
pub const ZERO_NORM_FLOOR: f64 = 1e-300;

/// Internal electronic level of the ion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum InternalLevel {
    Ground,
    Excited,
}

impl InternalLevel {
    fn offset(self) -> usize {
        match self {
            InternalLevel::Ground => 0,
            InternalLevel::Excited => 1,
        }
    }
}

/// Physical parameters of the ion-cavity system, all dimensionless.
///
/// ħ = 1 and time is measured in units of 1/g, so `gamma` is the cavity
/// decay in units of the coupling (Γ = κ/g) and evolution times are
/// τ = g t. The bare coupling `g` is kept only as the unit of time.
#[derive(Clone, Debug)]
pub struct SystemParams {
    g: f64,
    eta: f64,
    gamma: f64,
    alpha: Complex64,
    m_levels: usize,
}

impl SystemParams {
    /// Build a parameter set, enforcing both validity bounds:
    ///
    /// * Lamb-Dicke safety, `eta^2 (|alpha|^2 + 6 |alpha| + 9) < 0.5`, which
    ///   keeps the linearized coupling positive over the occupied Fock tail;
    /// * truncation adequacy, `m_levels >= recommended_levels(alpha)`, which
    ///   keeps the coherent-state tail mass below ~1e-12.
    pub fn new(eta: f64, gamma: f64, alpha: Complex64, m_levels: usize) -> Result<Self> {
        let params = Self::relaxed(eta, gamma, alpha, m_levels)?;
        if m_levels < Self::recommended_levels(alpha) {
            return Err(Error::InvalidParams(format!(
                "m_levels = {m_levels} is below the recommended minimum {} for |alpha| = {}",
                Self::recommended_levels(alpha),
                alpha.norm()
            )));
        }
        Ok(params)
    }

    /// Like [`SystemParams::new`] but lets the caller run with a truncation
    /// below the recommended minimum. The Lamb-Dicke bound and the sign
    /// constraints are still enforced. Use [`SystemParams::truncation_tail`]
    /// to see what the relaxed cutoff costs.
    pub fn relaxed(eta: f64, gamma: f64, alpha: Complex64, m_levels: usize) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::InvalidParams(format!("eta must be > 0, got {eta}")));
        }
        let bound = eta * eta * (alpha.norm_sqr() + 6.0 * alpha.norm() + 9.0);
        if !bound.is_finite() || bound >= 0.5 {
            return Err(Error::InvalidParams(format!(
                "Lamb-Dicke bound violated: eta^2 (|alpha|^2 + 6|alpha| + 9) = {bound:.4} >= 0.5"
            )));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be >= 0, got {gamma}"
            )));
        }
        if m_levels < 1 {
            return Err(Error::InvalidParams("m_levels must be >= 1".into()));
        }
        Ok(Self {
            g: 1.0,
            eta,
            gamma,
            alpha,
            m_levels,
        })
    }

    /// Smallest vibrational truncation with coherent tail mass < 1e-12:
    /// `ceil(|alpha|^2 + 8 |alpha| + 20)`.
    pub fn recommended_levels(alpha: Complex64) -> usize {
        let a = alpha.norm();
        (a * a + 8.0 * a + 20.0).ceil() as usize
    }

    /// Set the bare coupling rate (default 1). Affects only the time unit;
    /// every API in this crate takes times in units of 1/g regardless.
    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn m_levels(&self) -> usize {
        self.m_levels
    }

    /// Carrier precession scale ω_η = 1 - η²/2, in units of g.
    pub fn omega_eta(&self) -> f64 {
        1.0 - 0.5 * self.eta * self.eta
    }

    /// Coherent-state probability mass above the Fock cutoff,
    /// `1 - Σ_m |c_m|²`. Bounds every truncation-induced error reported
    /// by this crate.
    pub fn truncation_tail(&self) -> f64 {
        let state = MotionalState::coherent(self.alpha, self.m_levels);
        (1.0 - state.norm_sq()).max(0.0)
    }
}

fn slice_norm_sq(amps: &[Complex64]) -> f64 {
    kahan_sum(amps.iter().map(|a| a.norm_sqr()))
}

fn slice_inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (a, b) in x.iter().zip(y) {
        let term = a.conj() * b;
        re.add(term.re);
        im.add(term.im);
    }
    Complex64::new(re.total(), im.total())
}

/// Pure state of the full ion-cavity system on the truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeState {
    amps: Vec<Complex64>,
    m_levels: usize,
}

impl CompositeState {
    /// The zero vector (not a physical state, but a valid accumulator).
    pub fn zero(m_levels: usize) -> Self {
        Self {
            amps: vec![Complex64::ZERO; 4 * m_levels],
            m_levels,
        }
    }

    /// Wrap a raw amplitude vector laid out as `idx = 4 m + 2 n + q`.
    pub fn from_amplitudes(amps: Vec<Complex64>, m_levels: usize) -> Result<Self> {
        if amps.len() != 4 * m_levels {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 4 * m_levels,
            });
        }
        Ok(Self { amps, m_levels })
    }

    /// Basis state |m, n, q>.
    pub fn basis(m: usize, photons: u8, level: InternalLevel, m_levels: usize) -> Self {
        let mut state = Self::zero(m_levels);
        state.amps[Self::index(m, photons, level)] = Complex64::ONE;
        state
    }

    /// The initial state of both protocols: |alpha>_v |0>_c |e>.
    pub fn coherent_excited(alpha: Complex64, m_levels: usize) -> Self {
        let motional = MotionalState::coherent(alpha, m_levels);
        let mut state = Self::zero(m_levels);
        for m in 0..m_levels {
            state.amps[Self::index(m, 0, InternalLevel::Excited)] = motional.amplitude(m);
        }
        state
    }

    /// Flat index of |m, n, q>: m-major, then photon number, then level.
    pub fn index(m: usize, photons: u8, level: InternalLevel) -> usize {
        debug_assert!(photons <= 1);
        4 * m + 2 * photons as usize + level.offset()
    }

    pub fn m_levels(&self) -> usize {
        self.m_levels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, m: usize, photons: u8, level: InternalLevel) -> Complex64 {
        self.amps[Self::index(m, photons, level)]
    }

    /// Apply the cavity annihilation operator b̂. On the {0, 1} photon
    /// space this moves each |m, 1, q> amplitude to |m, 0, q> and empties
    /// the one-photon sector. The result is intentionally not normalized:
    /// its squared norm is the one-photon probability of the input.
    pub fn annihilate_cavity(&self) -> CompositeState {
        let mut out = Self::zero(self.m_levels);
        for m in 0..self.m_levels {
            for level in [InternalLevel::Ground, InternalLevel::Excited] {
                out.amps[Self::index(m, 0, level)] = self.amps[Self::index(m, 1, level)];
            }
        }
        out
    }

    /// Squared norm, compensated summation.
    pub fn norm_sq(&self) -> f64 {
        slice_norm_sq(&self.amps)
    }

    /// Sesquilinear inner product <self|other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &CompositeState) -> Result<Complex64> {
        if self.m_levels != other.m_levels {
            return Err(Error::DimensionMismatch {
                left: self.m_levels,
                right: other.m_levels,
            });
        }
        Ok(slice_inner(&self.amps, &other.amps))
    }

    /// Unit-norm copy. Errors on (near-)zero vectors.
    pub fn normalized(&self) -> Result<CompositeState> {
        let norm_sq = self.norm_sq();
        if norm_sq <= ZERO_NORM_FLOOR {
            return Err(Error::ZeroNorm { norm_sq });
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            amps: self.amps.iter().map(|a| a * scale).collect(),
            m_levels: self.m_levels,
        })
    }

    /// Extract the motional amplitudes of the (n, q) sector, unnormalized.
    pub fn sector(&self, photons: u8, level: InternalLevel) -> MotionalState {
        MotionalState {
            amps: (0..self.m_levels)
                .map(|m| self.amps[Self::index(m, photons, level)])
                .collect(),
        }
    }
}

/// Pure state of the vibrational mode alone.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionalState {
    amps: Vec<Complex64>,
}

impl MotionalState {
    /// Coherent state |alpha> on the truncated Fock basis,
    /// `c_m = e^{-|alpha|²/2} alpha^m / sqrt(m!)`, computed by the stable
    /// recurrence `c_m = c_{m-1} · alpha / sqrt(m)`. Sub-normalized by the
    /// truncation tail; `1 - norm_sq()` reports the cut mass.
    pub fn coherent(alpha: Complex64, m_levels: usize) -> Self {
        assert!(m_levels >= 1, "need at least one Fock level");
        let mut amps = Vec::with_capacity(m_levels);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        amps.push(c);
        for m in 1..m_levels {
            c *= alpha / (m as f64).sqrt();
            amps.push(c);
        }
        Self { amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    /// Fock state |m>.
    pub fn fock(m: usize, m_levels: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; m_levels];
        amps[m] = Complex64::ONE;
        Self { amps }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, m: usize) -> Complex64 {
        self.amps[m]
    }

    pub fn norm_sq(&self) -> f64 {
        slice_norm_sq(&self.amps)
    }

    pub fn inner(&self, other: &MotionalState) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                left: self.amps.len(),
                right: other.amps.len(),
            });
        }
        Ok(slice_inner(&self.amps, &other.amps))
    }

    pub fn normalized(&self) -> Result<MotionalState> {
        let norm_sq = self.norm_sq();
        if norm_sq <= ZERO_NORM_FLOOR {
            return Err(Error::ZeroNorm { norm_sq });
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            amps: self.amps.iter().map(|a| a * scale).collect(),
        })
    }
}

/// Global-phase-insensitive overlap |<x|y>|² / (‖x‖² ‖y‖²).
///
/// States are compared by fidelity, never amplitude-by-amplitude, so the
/// (-1)^k phases of the measurement protocol drop out.
pub fn fidelity(x: &MotionalState, y: &MotionalState) -> Result<f64> {
    let overlap = x.inner(y)?;
    let denom = x.norm_sq() * y.norm_sq();
    if denom <= ZERO_NORM_FLOOR {
        return Err(Error::ZeroNorm { norm_sq: denom });
    }
    Ok(overlap.norm_sqr() / denom)
}
