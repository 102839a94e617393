//! Monte Carlo wavefunction engine: individual quantum trajectories of the
//! monitored system (no-detection drift punctuated by at most one photon
//! jump) and ensemble validation of the analytic detection probability.
//!
//! The jump time is sampled by inversion: draw u uniform in (0,1), then
//! the trajectory jumps where the closed-form survival norm has decayed to
//! u. Because the survival norm is available in closed form, the waiting
//! time is exact up to bisection tolerance — no time stepping is involved.
//! A per-step Bernoulli sampler is kept alongside as a second, independent
//! route to the same statistics.
//!
//! After a jump the system sits in span{|m,0,g>}, which the generator
//! annihilates: the state is dark, so no trajectory ever jumps twice. The
//! sampler never schedules a second jump, and the drift of every post-jump
//! state vanishes identically under the integrator's generator.
//!
//! Seeding contract: one root seed expands to per-trajectory seeds through
//! a splitmix64 finalizer, `seed_i = mix(root + (i+1) * GOLDEN)`, so
//! ensembles are reproducible across platforms and thread schedules. The
//! inverse-CDF threshold of a trajectory is the first splitmix64 output of
//! its seed; the Bernoulli sampler feeds its seed to ChaCha8.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conditional::{amplitudes, jump_probability, post_jump_state};
use crate::hilbert::{CompositeState, InternalLevel, SystemParams};
use crate::numerics::bisect_decreasing;

/// Bisection tolerance on the jump time, in 1/g units.
pub const JUMP_TIME_TOL: f64 = 1e-10;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix_finalize(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trajectory seed `i` derived from the root seed: the i-th output of
/// the splitmix64 stream anchored at `root`.
pub fn expand_seed(root: u64, index: u64) -> u64 {
    splitmix_finalize(root.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

/// Map a 64-bit word to the open interval (0, 1), using the top 53 bits.
fn unit_uniform(word: u64) -> f64 {
    ((word >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Outcome of one monitored evolution up to `tau_max`.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub seed: u64,
    /// Present iff the detector fired before `tau_max`.
    pub jump_time: Option<f64>,
    /// Unit-norm state at the end: the normalized no-detection state, or
    /// the post-jump product state |Phi(tau*)>_v |0>_c |g>.
    pub final_state: CompositeState,
    /// Survival norm at the instant the trajectory ended (the jump time
    /// if it jumped, `tau_max` otherwise).
    pub survival_at_end: f64,
}

fn post_jump_composite(params: &SystemParams, tau: f64) -> CompositeState {
    let post = post_jump_state(params, tau).expect("jump implies photon amplitude");
    let m_levels = params.m_levels();
    let mut amps = vec![Complex64::ZERO; 4 * m_levels];
    for m in 0..m_levels {
        amps[CompositeState::index(m, 0, InternalLevel::Ground)] = post.motional.amplitude(m);
    }
    CompositeState::from_amplitudes(amps, m_levels).expect("layout")
}

/// Run one trajectory by inverse-CDF waiting-time sampling.
///
/// Deterministic in `(params, tau_max, seed)`: re-running with the same
/// inputs reproduces the record bit for bit.
pub fn run_trajectory(params: &SystemParams, tau_max: f64, seed: u64) -> TrajectoryRecord {
    assert!(tau_max > 0.0, "tau_max must be positive");
    let threshold = unit_uniform(splitmix_finalize(seed.wrapping_add(GOLDEN)));
    let survival = |tau: f64| amplitudes(params, tau).survival_norm();
    let survival_end = survival(tau_max);
    if threshold < survival_end {
        // survival never decays down to the threshold inside the window
        let final_state = amplitudes(params, tau_max)
            .to_composite()
            .normalized()
            .expect("survival norm is positive");
        return TrajectoryRecord {
            seed,
            jump_time: None,
            final_state,
            survival_at_end: survival_end,
        };
    }
    let tau_star = bisect_decreasing(0.0, tau_max, threshold, JUMP_TIME_TOL, survival);
    TrajectoryRecord {
        seed,
        jump_time: Some(tau_star),
        final_state: post_jump_composite(params, tau_star),
        survival_at_end: survival(tau_star),
    }
}

/// Run one trajectory with per-step Bernoulli jump tests on a `dtau` grid
/// (the second, stepping-based route; [`run_trajectory`] is the primary).
///
/// Within each step the conditional jump probability is
/// `1 - S(t + dtau)/S(t)`; a jump recorded in a step is stamped at the
/// step's end, so ensemble counts at grid-aligned checkpoints follow the
/// analytic detection probability exactly.
pub fn run_trajectory_stepped(
    params: &SystemParams,
    tau_max: f64,
    dtau: f64,
    seed: u64,
) -> TrajectoryRecord {
    assert!(tau_max > 0.0 && dtau > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let survival = |tau: f64| amplitudes(params, tau).survival_norm();
    let mut t = 0.0;
    let mut s_here = survival(0.0);
    while t < tau_max {
        let t_next = (t + dtau).min(tau_max);
        let s_next = survival(t_next);
        let p_step = 1.0 - s_next / s_here;
        if unit_uniform(rng.next_u64()) < p_step {
            return TrajectoryRecord {
                seed,
                jump_time: Some(t_next),
                final_state: post_jump_composite(params, t_next),
                survival_at_end: s_next,
            };
        }
        t = t_next;
        s_here = s_next;
    }
    let final_state = amplitudes(params, tau_max)
        .to_composite()
        .normalized()
        .expect("survival norm is positive");
    TrajectoryRecord {
        seed,
        jump_time: None,
        final_state,
        survival_at_end: s_here,
    }
}

/// One checkpoint of the ensemble-vs-analytic comparison.
#[derive(Clone, Copy, Debug)]
pub struct CdfRow {
    pub tau: f64,
    pub empirical: f64,
    pub analytic: f64,
    /// Normalized deviation `(empirical - analytic) / binomial sigma`;
    /// zero when the two agree exactly (in particular at tau = 0).
    pub z: f64,
}

/// Seeds and jump times of a whole ensemble, run in parallel. The i-th
/// entry uses `expand_seed(base_seed, i)`, so the listing is reproducible
/// and independent of the thread schedule.
pub fn ensemble_jump_times(
    params: &SystemParams,
    tau_max: f64,
    n_traj: usize,
    base_seed: u64,
) -> Vec<(u64, Option<f64>)> {
    (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let seed = expand_seed(base_seed, i);
            (seed, run_trajectory(params, tau_max, seed).jump_time)
        })
        .collect()
}

/// Compare recorded jump times against the analytic detection probability
/// at the given checkpoints.
pub fn cdf_from_jump_times(
    params: &SystemParams,
    checkpoints: &[f64],
    jump_times: &[(u64, Option<f64>)],
) -> Vec<CdfRow> {
    let n_traj = jump_times.len();
    checkpoints
        .iter()
        .map(|&tau| {
            let count = jump_times
                .iter()
                .filter(|(_, t)| t.is_some_and(|t| t <= tau))
                .count();
            let empirical = count as f64 / n_traj as f64;
            let analytic = jump_probability(params, tau);
            let z = if empirical == analytic {
                0.0
            } else {
                (empirical - analytic) / (analytic * (1.0 - analytic) / n_traj as f64).sqrt()
            };
            CdfRow {
                tau,
                empirical,
                analytic,
                z,
            }
        })
        .collect()
}

/// Empirical jump CDF of `n_traj` trajectories against the analytic
/// detection probability, at the given checkpoints.
///
/// Trajectories are independent given their seeds and may run in any
/// order; counting is a commutative reduction, so the result does not
/// depend on the schedule.
pub fn ensemble_cdf(
    params: &SystemParams,
    checkpoints: &[f64],
    n_traj: usize,
    base_seed: u64,
) -> Vec<CdfRow> {
    assert!(n_traj >= 100, "ensemble statistics need n_traj >= 100");
    let tau_max = checkpoints
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let jump_times = ensemble_jump_times(params, tau_max, n_traj, base_seed);
    cdf_from_jump_times(params, checkpoints, &jump_times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lamb_dicke::CouplingKind;
    use crate::oracle::{drift, IntegratorConfig};
    use crate::stats::phonon_distribution;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paper_params(gamma: f64) -> SystemParams {
        SystemParams::new(0.05, gamma, c(2.0, 0.0), 40).unwrap()
    }

    #[test]
    fn lossless_trajectories_never_jump() {
        let params = paper_params(0.0);
        for seed in [0, 1, 17, 987654321] {
            let record = run_trajectory(&params, 8.0, seed);
            assert!(record.jump_time.is_none());
            assert!((record.survival_at_end - 1.0).abs() < 1e-12);
            assert!((record.final_state.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn records_are_bit_stable_under_reruns() {
        let params = paper_params(1.0);
        for seed in [3u64, 42, 1234567] {
            let first = run_trajectory(&params, 6.0, seed);
            let second = run_trajectory(&params, 6.0, seed);
            assert_eq!(first.jump_time, second.jump_time);
            assert_eq!(first.survival_at_end, second.survival_at_end);
            assert_eq!(
                first.final_state.amplitudes(),
                second.final_state.amplitudes()
            );
        }
    }

    #[test]
    fn jump_time_inverts_the_survival_norm() {
        let params = paper_params(1.0);
        let record = run_trajectory(&params, 10.0, 7);
        let tau_star = record.jump_time.expect("seed 7 jumps before tau = 10");
        let threshold = unit_uniform(splitmix_finalize(7u64.wrapping_add(GOLDEN)));
        assert!((record.survival_at_end - threshold).abs() < 1e-8);
        assert!(tau_star > 0.0 && tau_star < 10.0);
    }

    #[test]
    fn final_states_are_unit_norm_either_way() {
        let params = paper_params(1.0);
        let mut seen_jump = false;
        let mut seen_no_jump = false;
        for i in 0..64 {
            let record = run_trajectory(&params, 2.0, expand_seed(99, i));
            assert!((record.final_state.norm_sq() - 1.0).abs() < 1e-10);
            match record.jump_time {
                Some(t) => {
                    seen_jump = true;
                    assert!(t <= 2.0);
                }
                None => seen_no_jump = true,
            }
        }
        // P(2.0) ~ 0.63: both branches must occur in 64 draws
        assert!(seen_jump && seen_no_jump);
    }

    #[test]
    fn post_jump_states_are_dark() {
        let params = paper_params(1.0);
        let config = IntegratorConfig::from_params(&params, 1e-3, CouplingKind::LambDicke).unwrap();
        for i in 0..16 {
            let record = run_trajectory(&params, 10.0, expand_seed(5, i));
            if record.jump_time.is_some() {
                let rhs = drift(&params, &config, &record.final_state);
                assert_eq!(rhs.norm_sq(), 0.0);
            }
        }
    }

    #[test]
    fn ensemble_tracks_the_analytic_cdf() {
        let params = paper_params(1.0);
        let checkpoints: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let rows = ensemble_cdf(&params, &checkpoints, 2000, 42);
        assert_eq!(rows[0].tau, 0.0);
        assert_eq!(rows[0].empirical, 0.0);
        assert_eq!(rows[0].z, 0.0);
        let mut prev = -1.0;
        for row in &rows {
            assert!(row.z.is_finite());
            assert!(row.z.abs() < 4.0, "z({}) = {}", row.tau, row.z);
            assert!(row.empirical >= prev, "CDF not monotone");
            prev = row.empirical;
        }
    }

    #[test]
    fn stepped_sampler_agrees_with_the_analytic_cdf() {
        let params = paper_params(1.0);
        let n = 1500u64;
        let dtau = 0.25;
        let jumped_by_5: usize = (0..n)
            .into_par_iter()
            .map(|i| {
                let record =
                    run_trajectory_stepped(&params, 5.0, dtau, expand_seed(1234, i));
                usize::from(record.jump_time.is_some())
            })
            .sum();
        let p = jump_probability(&params, 5.0);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let z = (jumped_by_5 as f64 / n as f64 - p) / sigma;
        assert!(z.abs() < 4.0, "stepped sampler z = {z}");
    }

    #[test]
    fn jump_time_histogram_matches_the_analytic_density() {
        // chi-square against bin masses P(edge_{k+1}) - P(edge_k), eleven
        // bins: ten of width 1 on [0, 10] plus the no-jump overflow.
        let params = paper_params(1.0);
        let n = 4000u64;
        let jump_times: Vec<Option<f64>> = (0..n)
            .into_par_iter()
            .map(|i| run_trajectory(&params, 10.0, expand_seed(2024, i)).jump_time)
            .collect();
        let mut observed = [0usize; 11];
        for t in &jump_times {
            match t {
                Some(t) => observed[(t.floor() as usize).min(9)] += 1,
                None => observed[10] += 1,
            }
        }
        let mut chi2 = 0.0;
        for (k, &obs) in observed.iter().enumerate() {
            let mass = if k < 10 {
                jump_probability(&params, (k + 1) as f64) - jump_probability(&params, k as f64)
            } else {
                1.0 - jump_probability(&params, 10.0)
            };
            let expected = mass * n as f64;
            assert!(expected > 5.0, "bin {k} too thin for chi-square");
            chi2 += (obs as f64 - expected).powi(2) / expected;
        }
        // df = 10; the 0.9999 quantile is 35.6
        assert!(chi2 < 35.6, "chi-square statistic {chi2}");
    }

    #[test]
    fn jumped_trajectories_reproduce_the_post_jump_distribution() {
        // average |amplitude|^2 over trajectories jumping inside a narrow
        // bin vs the density-weighted analytic distribution on that bin
        let params = paper_params(1.0);
        let (lo, hi) = (1.0, 1.6);
        let n = 5000u64;
        let mut mean_p = vec![0.0f64; 40];
        let mut hits = 0usize;
        let records: Vec<TrajectoryRecord> = (0..n)
            .into_par_iter()
            .map(|i| run_trajectory(&params, 10.0, expand_seed(7777, i)))
            .collect();
        for record in &records {
            if record.jump_time.is_some_and(|t| t >= lo && t < hi) {
                hits += 1;
                let motional = record.final_state.sector(0, InternalLevel::Ground);
                for (m, p) in mean_p.iter_mut().enumerate() {
                    *p += motional.amplitude(m).norm_sqr();
                }
            }
        }
        assert!(hits > 100, "only {hits} trajectories jumped in the bin");
        for p in &mut mean_p {
            *p /= hits as f64;
        }
        // analytic reference: jump-density-weighted distribution over the bin
        let mut reference = vec![0.0f64; 40];
        let mut weight_total = 0.0;
        let sub = 12;
        for j in 0..sub {
            let a = lo + (hi - lo) * j as f64 / sub as f64;
            let b = lo + (hi - lo) * (j + 1) as f64 / sub as f64;
            let w = jump_probability(&params, b) - jump_probability(&params, a);
            let post = post_jump_state(&params, 0.5 * (a + b)).unwrap();
            let dist = phonon_distribution(&post.motional).unwrap();
            for (r, p) in reference.iter_mut().zip(dist.probabilities()) {
                *r += w * p;
            }
            weight_total += w;
        }
        for r in &mut reference {
            *r /= weight_total;
        }
        let tv: f64 = mean_p
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.1, "total variation {tv} too large for {hits} samples");
    }

    #[test]
    fn seed_expansion_is_stable() {
        // frozen values pin the documented splitmix64 contract
        assert_eq!(expand_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_ne!(expand_seed(1, 0), expand_seed(0, 0));
        assert_ne!(expand_seed(0, 1), expand_seed(0, 0));
    }
}
