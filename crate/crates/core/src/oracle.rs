//! Independent brute-force validator: fixed-step RK4 integration of the
//! no-detection Schrödinger equation, with either the exact-Laguerre or
//! the Lamb-Dicke coupling law, and either the per-m block decomposition
//! or a dense full-basis sweep.
//!
//! The generator conserves m and couples only |m,0,e> <-> |m,1,g>, so the
//! flow block-diagonalizes into 2x2 systems
//!
//! ```text
//! da_m/dtau = -i lambda(m) b_m
//! db_m/dtau = -i lambda(m) a_m - (Gamma/2) b_m
//! ```
//!
//! The block path exploits this for speed; the dense path applies the
//! generator on the full amplitude vector, exists to guard the block path
//! against indexing mistakes, and must agree with it to the last bit of
//! arithmetic reordering. Fixed-step RK4 (not adaptive) keeps golden
//! files reproducible.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::hilbert::{CompositeState, InternalLevel, SystemParams};
use crate::lamb_dicke::{CouplingKind, CouplingProfile};
use crate::{Error, Result};

/// Hard ceiling on total RK4 steps per call.
pub const MAX_STEPS: u64 = 1_000_000_000;

/// Largest admissible step size, in 1/g units.
pub const MAX_DT: f64 = 0.01;

/// Tolerated probability mass in the uncoupled (n=1, e) sector of the
/// initial state, which the truncated generator cannot propagate.
const SECTOR_MASS_TOL: f64 = 1e-14;

/// How to run the integrator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrationMode {
    /// Integrate each (a_m, b_m) block independently (default, parallel).
    PerBlock,
    /// Sweep the full 4M-dimensional amplitude vector.
    Dense,
}

/// Step size, coupling law, and damping for one integration run.
///
/// `gamma` is carried here, separately from [`SystemParams`], so the same
/// parameter set can be integrated both lossily and losslessly.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub coupling: CouplingKind,
    pub gamma: f64,
    pub mode: IntegrationMode,
}

impl IntegratorConfig {
    pub fn new(dt: f64, coupling: CouplingKind, gamma: f64) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 || dt > MAX_DT {
            return Err(Error::InvalidParams(format!(
                "dt must lie in (0, {MAX_DT}], got {dt}"
            )));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be >= 0, got {gamma}"
            )));
        }
        Ok(Self {
            dt,
            coupling,
            gamma,
            mode: IntegrationMode::PerBlock,
        })
    }

    /// Lossless run (gamma = 0); with `CouplingKind::LambDicke` this
    /// integrates the ideal carrier interaction.
    pub fn lossless(dt: f64, coupling: CouplingKind) -> Result<Self> {
        Self::new(dt, coupling, 0.0)
    }

    /// Take gamma from the parameter set.
    pub fn from_params(params: &SystemParams, dt: f64, coupling: CouplingKind) -> Result<Self> {
        Self::new(dt, coupling, params.gamma())
    }

    pub fn with_mode(mut self, mode: IntegrationMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Copy)]
struct Block {
    a: Complex64,
    b: Complex64,
}

#[inline]
fn block_rhs(lambda: f64, half_gamma: f64, y: Block) -> Block {
    Block {
        a: -Complex64::I * lambda * y.b,
        b: -Complex64::I * lambda * y.a - half_gamma * y.b,
    }
}

#[inline]
fn rk4_block_step(lambda: f64, half_gamma: f64, y: Block, h: f64) -> Block {
    let k1 = block_rhs(lambda, half_gamma, y);
    let k2 = block_rhs(
        lambda,
        half_gamma,
        Block {
            a: y.a + 0.5 * h * k1.a,
            b: y.b + 0.5 * h * k1.b,
        },
    );
    let k3 = block_rhs(
        lambda,
        half_gamma,
        Block {
            a: y.a + 0.5 * h * k2.a,
            b: y.b + 0.5 * h * k2.b,
        },
    );
    let k4 = block_rhs(
        lambda,
        half_gamma,
        Block {
            a: y.a + h * k3.a,
            b: y.b + h * k3.b,
        },
    );
    Block {
        a: y.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
        b: y.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
    }
}

/// Split `[0, tau_0, tau_1, ...]` into segments and per-segment (n, h)
/// with n h = segment length exactly, h <= dt.
fn segment_plan(dt: f64, checkpoints: &[f64]) -> Result<Vec<(u64, f64)>> {
    let mut plan = Vec::with_capacity(checkpoints.len());
    let mut prev = 0.0;
    let mut total_steps = 0u64;
    for &tau in checkpoints {
        if !tau.is_finite() || tau < prev {
            return Err(Error::InvalidParams(format!(
                "checkpoints must be ascending and >= 0, got {tau} after {prev}"
            )));
        }
        let span = tau - prev;
        let n = if span == 0.0 {
            0
        } else {
            let raw = (span / dt - 1e-12).ceil().max(1.0);
            if raw > (MAX_STEPS - total_steps) as f64 {
                return Err(Error::StepOverflow {
                    steps: raw,
                    limit: MAX_STEPS,
                });
            }
            raw as u64
        };
        total_steps += n;
        plan.push((n, if n == 0 { 0.0 } else { span / n as f64 }));
        prev = tau;
    }
    Ok(plan)
}

fn coupling_table(params: &SystemParams, kind: CouplingKind) -> Vec<f64> {
    let profile = CouplingProfile {
        kind,
        eta: params.eta(),
    };
    (0..params.m_levels()).map(|m| profile.eval(m)).collect()
}

fn check_initial(initial: &CompositeState) -> Result<()> {
    let stray = initial.sector(1, InternalLevel::Excited).norm_sq();
    if stray > SECTOR_MASS_TOL {
        return Err(Error::UnsupportedSector { mass: stray });
    }
    Ok(())
}

/// Integrate to each checkpoint (ascending, in 1/g units) in one pass,
/// landing on every checkpoint exactly. Returns one state per checkpoint.
///
/// The initial state may populate |m,0,e>, |m,1,g> and the dark |m,0,g>
/// sector; amplitude in |m,1,e> is rejected because the carrier
/// interaction would couple it outside the two-photon-truncated space.
pub fn integrate_checkpoints(
    params: &SystemParams,
    config: &IntegratorConfig,
    checkpoints: &[f64],
    initial: &CompositeState,
) -> Result<Vec<CompositeState>> {
    if initial.m_levels() != params.m_levels() {
        return Err(Error::DimensionMismatch {
            left: initial.m_levels(),
            right: params.m_levels(),
        });
    }
    check_initial(initial)?;
    let plan = segment_plan(config.dt, checkpoints)?;
    let lambdas = coupling_table(params, config.coupling);
    match config.mode {
        IntegrationMode::PerBlock => {
            integrate_blocks(params, config, &plan, checkpoints, &lambdas, initial)
        }
        IntegrationMode::Dense => {
            integrate_dense(params, config, &plan, checkpoints, &lambdas, initial)
        }
    }
}

/// Integrate to a single time `tau`.
pub fn integrate(
    params: &SystemParams,
    config: &IntegratorConfig,
    tau: f64,
    initial: &CompositeState,
) -> Result<CompositeState> {
    Ok(integrate_checkpoints(params, config, &[tau], initial)?
        .pop()
        .expect("one checkpoint in, one state out"))
}

fn integrate_blocks(
    params: &SystemParams,
    config: &IntegratorConfig,
    plan: &[(u64, f64)],
    checkpoints: &[f64],
    lambdas: &[f64],
    initial: &CompositeState,
) -> Result<Vec<CompositeState>> {
    let m_levels = params.m_levels();
    let half_gamma = 0.5 * config.gamma;

    // each m evolves independently; collect (per m, per checkpoint) blocks
    let per_m: Vec<Vec<Block>> = (0..m_levels)
        .into_par_iter()
        .map(|m| {
            let lambda = lambdas[m];
            let mut y = Block {
                a: initial.amplitude(m, 0, InternalLevel::Excited),
                b: initial.amplitude(m, 1, InternalLevel::Ground),
            };
            let mut out = Vec::with_capacity(plan.len());
            for (&(n, h), &tau) in plan.iter().zip(checkpoints) {
                for _ in 0..n {
                    y = rk4_block_step(lambda, half_gamma, y, h);
                }
                if !(y.a.is_finite() && y.b.is_finite()) {
                    return Err(Error::NonFinite { m, tau });
                }
                out.push(y);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut states = Vec::with_capacity(checkpoints.len());
    for k in 0..checkpoints.len() {
        let mut amps = vec![Complex64::ZERO; 4 * m_levels];
        for (m, blocks) in per_m.iter().enumerate() {
            amps[CompositeState::index(m, 0, InternalLevel::Excited)] = blocks[k].a;
            amps[CompositeState::index(m, 1, InternalLevel::Ground)] = blocks[k].b;
            // dark sectors ride along unchanged (decay acts only on n = 1)
            amps[CompositeState::index(m, 0, InternalLevel::Ground)] =
                initial.amplitude(m, 0, InternalLevel::Ground);
        }
        states.push(CompositeState::from_amplitudes(amps, m_levels).expect("consistent layout"));
    }
    Ok(states)
}

fn dense_rhs(
    lambdas: &[f64],
    half_gamma: f64,
    amps: &[Complex64],
    out: &mut [Complex64],
) {
    for (m, &lambda) in lambdas.iter().enumerate() {
        let idx_e0 = CompositeState::index(m, 0, InternalLevel::Excited);
        let idx_g1 = CompositeState::index(m, 1, InternalLevel::Ground);
        let idx_g0 = CompositeState::index(m, 0, InternalLevel::Ground);
        let idx_e1 = CompositeState::index(m, 1, InternalLevel::Excited);
        out[idx_e0] = -Complex64::I * lambda * amps[idx_g1];
        out[idx_g1] = -Complex64::I * lambda * amps[idx_e0] - half_gamma * amps[idx_g1];
        out[idx_g0] = Complex64::ZERO;
        out[idx_e1] = -half_gamma * amps[idx_e1];
    }
}

fn integrate_dense(
    params: &SystemParams,
    config: &IntegratorConfig,
    plan: &[(u64, f64)],
    checkpoints: &[f64],
    lambdas: &[f64],
    initial: &CompositeState,
) -> Result<Vec<CompositeState>> {
    let m_levels = params.m_levels();
    let dim = 4 * m_levels;
    let half_gamma = 0.5 * config.gamma;
    let mut y = initial.amplitudes().to_vec();
    let mut k1 = vec![Complex64::ZERO; dim];
    let mut k2 = vec![Complex64::ZERO; dim];
    let mut k3 = vec![Complex64::ZERO; dim];
    let mut k4 = vec![Complex64::ZERO; dim];
    let mut scratch = vec![Complex64::ZERO; dim];
    let mut states = Vec::with_capacity(checkpoints.len());
    for (&(n, h), &tau) in plan.iter().zip(checkpoints) {
        for _ in 0..n {
            dense_rhs(lambdas, half_gamma, &y, &mut k1);
            for i in 0..dim {
                scratch[i] = y[i] + 0.5 * h * k1[i];
            }
            dense_rhs(lambdas, half_gamma, &scratch, &mut k2);
            for i in 0..dim {
                scratch[i] = y[i] + 0.5 * h * k2[i];
            }
            dense_rhs(lambdas, half_gamma, &scratch, &mut k3);
            for i in 0..dim {
                scratch[i] = y[i] + h * k3[i];
            }
            dense_rhs(lambdas, half_gamma, &scratch, &mut k4);
            for i in 0..dim {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        if let Some(i) = y.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite { m: i / 4, tau });
        }
        states.push(CompositeState::from_amplitudes(y.clone(), m_levels).expect("layout"));
    }
    Ok(states)
}

/// The right-hand side `d psi / d tau` at a state — the generator applied
/// once. Useful for structural checks (a dark state has zero drift).
pub fn drift(
    params: &SystemParams,
    config: &IntegratorConfig,
    state: &CompositeState,
) -> CompositeState {
    let lambdas = coupling_table(params, config.coupling);
    let mut out = vec![Complex64::ZERO; 4 * params.m_levels()];
    dense_rhs(&lambdas, 0.5 * config.gamma, state.amplitudes(), &mut out);
    CompositeState::from_amplitudes(out, params.m_levels()).expect("layout")
}

/// Empirical convergence order by step halving: integrates to `tau` at
/// dt = 0.01, 0.005 and 0.0025, and returns
/// `log2(|x_dt - x_dt/2| / |x_dt/2 - x_dt/4|)`. Expect ~4 for RK4.
pub fn convergence_order(params: &SystemParams, tau: f64) -> f64 {
    let initial = CompositeState::coherent_excited(params.alpha(), params.m_levels());
    let run = |dt: f64| {
        let config = IntegratorConfig::from_params(params, dt, CouplingKind::LambDicke)
            .expect("dt within bounds");
        integrate(params, &config, tau, &initial).expect("smooth problem")
    };
    let coarse = run(0.01);
    let mid = run(0.005);
    let fine = run(0.0025);
    let max_abs = |x: &CompositeState, y: &CompositeState| {
        x.amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
    };
    (max_abs(&coarse, &mid) / max_abs(&mid, &fine)).log2()
}

/// Brute-force alternating series `L_m(x) = Σ_k C(m,k) (-x)^k / k!` — the
/// independent route against which the recurrence in
/// [`crate::lamb_dicke::laguerre`] is verified.
pub fn laguerre_series(m: usize, x: f64) -> f64 {
    let mut total = 1.0;
    let mut term = 1.0;
    for k in 1..=m {
        term *= -x * (m - k + 1) as f64 / (k as f64 * k as f64);
        total += term;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::evolve_ideal;
    use crate::conditional;
    use crate::lamb_dicke::{coupling_exact, coupling_ld};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paper_params(gamma: f64) -> SystemParams {
        SystemParams::new(0.05, gamma, c(2.0, 0.0), 40).unwrap()
    }

    fn max_abs_diff(x: &CompositeState, y: &CompositeState) -> f64 {
        x.amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
    }

    #[test]
    fn lossless_integration_matches_the_closed_form() {
        let params = paper_params(0.0);
        let config = IntegratorConfig::lossless(1e-4, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let numeric = integrate(&params, &config, 10.0, &initial).unwrap();
        let exact = evolve_ideal(&params, 10.0);
        assert!(max_abs_diff(&numeric, &exact) < 1e-9);
    }

    #[test]
    fn lossy_integration_matches_the_conditional_amplitudes() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-4, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let numeric = integrate(&params, &config, 3.29, &initial).unwrap();
        let exact = conditional::amplitudes(&params, 3.29).to_composite();
        assert!(max_abs_diff(&numeric, &exact) < 1e-8);
    }

    #[test]
    fn zero_initial_state_stays_zero() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        let zero = CompositeState::zero(40);
        let out = integrate(&params, &config, 2.0, &zero).unwrap();
        assert_eq!(out.norm_sq(), 0.0);
    }

    #[test]
    fn block_and_dense_modes_agree() {
        let params = paper_params(1.0);
        let base = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let taus = [0.7, 1.9, 3.29];
        let blocks = integrate_checkpoints(&params, &base, &taus, &initial).unwrap();
        let dense = integrate_checkpoints(
            &params,
            &base.with_mode(IntegrationMode::Dense),
            &taus,
            &initial,
        )
        .unwrap();
        for (x, y) in blocks.iter().zip(&dense) {
            assert!(max_abs_diff(x, y) < 1e-15);
        }
    }

    #[test]
    fn checkpoints_land_exactly() {
        // one pass against three separate integrations
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let taus = [0.5, 1.25, 2.75];
        let joint = integrate_checkpoints(&params, &config, &taus, &initial).unwrap();
        for (k, &tau) in taus.iter().enumerate() {
            let single = integrate(&params, &config, tau, &initial).unwrap();
            assert!(max_abs_diff(&joint[k], &single) < 1e-12, "checkpoint {tau}");
        }
    }

    #[test]
    fn norm_is_conserved_without_damping_and_decays_with_it() {
        let params = paper_params(0.0);
        let config = IntegratorConfig::lossless(1e-3, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let out = integrate(&params, &config, 1.0, &initial).unwrap();
        assert!((out.norm_sq() - 1.0).abs() < 1e-12);

        let lossy = paper_params(1.0);
        let config = IntegratorConfig::from_params(&lossy, 1e-3, CouplingKind::LambDicke).unwrap();
        let taus: Vec<f64> = (1..=30).map(|i| i as f64 * 0.2).collect();
        let states = integrate_checkpoints(&lossy, &config, &taus, &initial).unwrap();
        let mut prev = 1.0;
        for s in &states {
            let n = s.norm_sq();
            assert!(n <= prev + 1e-12, "norm increased: {n} > {prev}");
            prev = n;
        }
    }

    #[test]
    fn empirical_order_is_four() {
        let params = paper_params(1.0);
        let order = convergence_order(&params, 2.0);
        assert!(
            (3.7..=4.3).contains(&order),
            "convergence order {order} outside [3.7, 4.3]"
        );
    }

    #[test]
    fn exact_vs_ld_coupling_difference_is_bounded_by_the_validity_ratio() {
        let params = paper_params(0.0);
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let tau = 5.0;
        let ld = integrate(
            &params,
            &IntegratorConfig::lossless(1e-3, CouplingKind::LambDicke).unwrap(),
            tau,
            &initial,
        )
        .unwrap();
        let exact = integrate(
            &params,
            &IntegratorConfig::lossless(1e-3, CouplingKind::Exact).unwrap(),
            tau,
            &initial,
        )
        .unwrap();
        let coherent = crate::hilbert::MotionalState::coherent(params.alpha(), 40);
        let bound = 5.0
            * tau
            * (0..40)
                .map(|m| {
                    let r = coupling_exact(params.eta(), m) / coupling_ld(params.eta(), m);
                    (r - 1.0).abs() * coherent.amplitude(m).norm()
                })
                .fold(0.0f64, f64::max);
        let diff = max_abs_diff(&ld, &exact);
        assert!(diff > 0.0, "couplings should differ measurably");
        assert!(diff < bound, "diff {diff} exceeds bound {bound}");
    }

    #[test]
    fn stray_sector_is_rejected() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        let bad = CompositeState::basis(3, 1, InternalLevel::Excited, 40);
        assert!(matches!(
            integrate(&params, &config, 1.0, &bad),
            Err(Error::UnsupportedSector { .. })
        ));
    }

    #[test]
    fn dark_sector_rides_along_unchanged() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        let dark = CompositeState::basis(2, 0, InternalLevel::Ground, 40);
        let out = integrate(&params, &config, 3.0, &dark).unwrap();
        assert_eq!(
            out.amplitude(2, 0, InternalLevel::Ground),
            Complex64::ONE
        );
        assert!((out.norm_sq() - 1.0).abs() < 1e-15);
        // and its drift vanishes identically
        let d = drift(&params, &config, &dark);
        assert_eq!(d.norm_sq(), 0.0);
    }

    #[test]
    fn bad_step_sizes_are_rejected() {
        assert!(IntegratorConfig::new(0.0, CouplingKind::LambDicke, 1.0).is_err());
        assert!(IntegratorConfig::new(0.02, CouplingKind::LambDicke, 1.0).is_err());
        assert!(IntegratorConfig::new(-1e-3, CouplingKind::LambDicke, 1.0).is_err());
        assert!(IntegratorConfig::new(1e-3, CouplingKind::LambDicke, -1.0).is_err());
    }

    #[test]
    fn step_overflow_is_reported() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-4, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        let err = integrate(&params, &config, 1e7, &initial);
        assert!(matches!(err, Err(Error::StepOverflow { .. })));
    }

    #[test]
    fn descending_checkpoints_are_rejected() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        let initial = CompositeState::coherent_excited(params.alpha(), 40);
        assert!(matches!(
            integrate_checkpoints(&params, &config, &[2.0, 1.0], &initial),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn laguerre_series_small_orders() {
        assert_eq!(laguerre_series(0, 0.7), 1.0);
        assert!((laguerre_series(1, 0.25) - 0.75).abs() < 1e-15);
        assert!((laguerre_series(2, 0.0025) - 0.995003125).abs() < 1e-15);
    }
}
