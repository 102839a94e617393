//! Scenario runner: each subcommand reproduces one of the reference
//! figures as a flat data file, with parameters taken from flags, an
//! optional key-value config file, and documented defaults (the weak
//! coupling working point Gamma = 1, eta = 0.05, alpha = 2).
//!
//! Every command is deterministic given its effective config and seed,
//! writes `#`-commented headers carrying the effective parameter set and
//! library version, and echoes the full effective config to a `.cfg`
//! sidecar that can be fed back through `--config`. With `--verify`,
//! every closed-form result is diffed against the RK4 integrator and the
//! run fails (exit 3) if the worst deviation exceeds 1e-6.
//!
//! Exit codes: 0 success, 2 invalid usage or config, 3 verification
//! failure, 4 i/o failure.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::hilbert::{CompositeState, InternalLevel, SystemParams};
use crate::lamb_dicke::{self, CouplingKind};
use crate::oracle::{self, IntegratorConfig};
use crate::stats::{count_interior_maxima, phonon_distribution};
use crate::{carrier, conditional, trajectories, Error, Result, VERSION};

use config::KeyValues;

/// Verification gate on the worst closed-form-vs-oracle deviation.
pub const VERIFY_THRESHOLD: f64 = 1e-6;

/// Command-line surface. Global flags may appear before or after the
/// subcommand; values resolve as flag > config file > default.
#[derive(Parser, Debug)]
#[command(name = "ion-cavity", version, about = "Trapped ion in a lossy cavity: cat states, conditional dynamics, jump statistics")]
pub struct Cli {
    /// Flat key=value config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Cavity decay rate over coupling, Gamma = kappa/g.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,

    /// Lamb-Dicke parameter.
    #[arg(long, global = true)]
    pub eta: Option<f64>,

    /// Real part of the initial coherent amplitude.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,

    /// Imaginary part of the initial coherent amplitude.
    #[arg(long, global = true)]
    pub alpha_im: Option<f64>,

    /// Vibrational Fock levels kept.
    #[arg(long, global = true)]
    pub m_levels: Option<usize>,

    /// Root seed for stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// RK4 step size used by --verify.
    #[arg(long, global = true)]
    pub dt: Option<f64>,

    /// Output data file path.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Diff every closed-form result against the RK4 integrator.
    #[arg(long, global = true)]
    pub verify: bool,

    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Validity-ratio surface R(eta, m) of the Lamb-Dicke coupling.
    LdGrid {
        #[arg(long)]
        eta_start: Option<f64>,
        #[arg(long)]
        eta_stop: Option<f64>,
        #[arg(long)]
        eta_step: Option<f64>,
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Lossless cat-generation time series (gamma is ignored here).
    CarrierCat {
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        tau_step: Option<f64>,
    },
    /// Photon-detection probability P(tau).
    JumpProb {
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        tau_step: Option<f64>,
    },
    /// Fano factor of the post-detection motional state over time.
    FanoScan {
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        tau_step: Option<f64>,
    },
    /// Phonon distribution of the post-detection state at one time.
    PhononDist {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        window_lo: Option<usize>,
        #[arg(long)]
        window_hi: Option<usize>,
        #[arg(long)]
        floor: Option<f64>,
    },
    /// Monte Carlo trajectory ensemble vs the analytic detection CDF.
    Trajectories {
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        n_traj: Option<usize>,
        #[arg(long)]
        n_checkpoints: Option<usize>,
        /// Optional per-trajectory JSONL dump (seed, jump_time).
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
}

/// Fully resolved run: command settings, physical parameters, seed,
/// oracle step, verification switch, output path.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams,
    pub seed: u64,
    pub dt: f64,
    pub verify: bool,
    pub output: PathBuf,
}

#[derive(Clone, Debug)]
pub enum Command {
    LdGrid {
        eta_start: f64,
        eta_stop: f64,
        eta_step: f64,
        m_max: usize,
    },
    CarrierCat {
        tau_max: f64,
        tau_step: f64,
    },
    JumpProb {
        tau_max: f64,
        tau_step: f64,
    },
    FanoScan {
        tau_max: f64,
        tau_step: f64,
    },
    PhononDist {
        tau: f64,
        window_lo: usize,
        window_hi: usize,
        floor: f64,
    },
    Trajectories {
        tau_max: f64,
        n_traj: usize,
        n_checkpoints: usize,
        jsonl: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LdGrid { .. } => "ld-grid",
            Command::CarrierCat { .. } => "carrier-cat",
            Command::JumpProb { .. } => "jump-prob",
            Command::FanoScan { .. } => "fano-scan",
            Command::PhononDist { .. } => "phonon-dist",
            Command::Trajectories { .. } => "trajectories",
        }
    }
}

fn float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// Merge flags, config file, and defaults into a validated [`RunConfig`].
pub fn parse_config(cli: Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => KeyValues::load(path)?,
        None => KeyValues::default(),
    };

    let command_keys: &[&str] = match &cli.command {
        CliCommand::LdGrid { .. } => &["eta_start", "eta_stop", "eta_step", "m_max"],
        CliCommand::CarrierCat { .. } | CliCommand::JumpProb { .. }
        | CliCommand::FanoScan { .. } => &["tau_max", "tau_step"],
        CliCommand::PhononDist { .. } => &["tau", "window_lo", "window_hi", "floor"],
        CliCommand::Trajectories { .. } => &["tau_max", "n_traj", "n_checkpoints", "jsonl"],
    };
    let command_name = match &cli.command {
        CliCommand::LdGrid { .. } => "ld-grid",
        CliCommand::CarrierCat { .. } => "carrier-cat",
        CliCommand::JumpProb { .. } => "jump-prob",
        CliCommand::FanoScan { .. } => "fano-scan",
        CliCommand::PhononDist { .. } => "phonon-dist",
        CliCommand::Trajectories { .. } => "trajectories",
    };
    file.check_keys(command_name, command_keys)?;

    let eta = file.resolve("eta", cli.eta, 0.05)?;
    let gamma = file.resolve("gamma", cli.gamma, 1.0)?;
    let alpha = file.resolve("alpha", cli.alpha, 2.0)?;
    let alpha_im = file.resolve("alpha_im", cli.alpha_im, 0.0)?;
    let m_levels = file.resolve("m_levels", cli.m_levels, 40)?;
    let seed = file.resolve("seed", cli.seed, 1)?;
    let dt = file.resolve("dt", cli.dt, 1e-4)?;
    let verify = file.resolve_bool("verify", cli.verify)?;

    let params = SystemParams::new(eta, gamma, Complex64::new(alpha, alpha_im), m_levels)?;
    // validates the dt bounds even when --verify is off
    IntegratorConfig::new(dt, CouplingKind::LambDicke, gamma)?;

    let positive = |key: &str, v: f64| -> Result<f64> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Config(format!("key `{key}` must be positive, got {v}")))
        }
    };

    let command = match cli.command {
        CliCommand::LdGrid {
            eta_start,
            eta_stop,
            eta_step,
            m_max,
        } => {
            let eta_start = positive("eta_start", file.resolve("eta_start", eta_start, 0.01)?)?;
            let eta_stop = positive("eta_stop", file.resolve("eta_stop", eta_stop, 0.5)?)?;
            let eta_step = positive("eta_step", file.resolve("eta_step", eta_step, 0.01)?)?;
            if eta_stop < eta_start {
                return Err(Error::Config(format!(
                    "eta_stop {eta_stop} below eta_start {eta_start}"
                )));
            }
            Command::LdGrid {
                eta_start,
                eta_stop,
                eta_step,
                m_max: file.resolve("m_max", m_max, 30)?,
            }
        }
        CliCommand::CarrierCat { tau_max, tau_step } => Command::CarrierCat {
            tau_max: positive("tau_max", file.resolve("tau_max", tau_max, 10.0)?)?,
            tau_step: positive("tau_step", file.resolve("tau_step", tau_step, 0.01)?)?,
        },
        CliCommand::JumpProb { tau_max, tau_step } => Command::JumpProb {
            tau_max: positive("tau_max", file.resolve("tau_max", tau_max, 30.0)?)?,
            tau_step: positive("tau_step", file.resolve("tau_step", tau_step, 0.01)?)?,
        },
        CliCommand::FanoScan { tau_max, tau_step } => Command::FanoScan {
            tau_max: positive("tau_max", file.resolve("tau_max", tau_max, 10.0)?)?,
            tau_step: positive("tau_step", file.resolve("tau_step", tau_step, 0.01)?)?,
        },
        CliCommand::PhononDist {
            tau,
            window_lo,
            window_hi,
            floor,
        } => {
            let tau = positive("tau", file.resolve("tau", tau, 3.29)?)?;
            let window_lo = file.resolve("window_lo", window_lo, 0)?;
            let window_hi = file.resolve("window_hi", window_hi, 12)?;
            if window_lo > window_hi || window_hi >= m_levels {
                return Err(Error::Config(format!(
                    "window [{window_lo}, {window_hi}] invalid for m_levels = {m_levels}"
                )));
            }
            Command::PhononDist {
                tau,
                window_lo,
                window_hi,
                floor: file.resolve("floor", floor, 1e-4)?,
            }
        }
        CliCommand::Trajectories {
            tau_max,
            n_traj,
            n_checkpoints,
            jsonl,
        } => {
            let n_traj = file.resolve("n_traj", n_traj, 10_000)?;
            if n_traj < 100 {
                return Err(Error::Config(format!(
                    "n_traj must be at least 100, got {n_traj}"
                )));
            }
            let n_checkpoints = file.resolve("n_checkpoints", n_checkpoints, 20)?;
            if n_checkpoints == 0 {
                return Err(Error::Config("n_checkpoints must be positive".into()));
            }
            Command::Trajectories {
                tau_max: positive("tau_max", file.resolve("tau_max", tau_max, 10.0)?)?,
                n_traj,
                n_checkpoints,
                jsonl: file.resolve_opt("jsonl", jsonl)?,
            }
        }
    };

    let output = file
        .resolve_opt("output", cli.output)?
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())));

    Ok(RunConfig {
        command,
        params,
        seed,
        dt,
        verify,
        output,
    })
}

/// What a run produced.
#[derive(Debug)]
pub struct RunReport {
    pub output: PathBuf,
    pub sidecar: PathBuf,
    /// Worst closed-form-vs-oracle deviation, when `--verify` ran.
    pub max_deviation: Option<f64>,
}

/// Exit code for an error, per the documented contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Verification { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn tau_grid(tau_max: f64, step: f64) -> Vec<f64> {
    let n = (tau_max / step).round().max(1.0) as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Effective key-value pairs, shared by the file headers and the sidecar.
fn effective_pairs(cfg: &RunConfig) -> Vec<(String, String)> {
    let params = &cfg.params;
    let mut pairs = vec![
        ("eta".into(), float(params.eta())),
        ("gamma".into(), float(params.gamma())),
        ("alpha".into(), float(params.alpha().re)),
        ("alpha_im".into(), float(params.alpha().im)),
        ("m_levels".into(), params.m_levels().to_string()),
        ("seed".into(), cfg.seed.to_string()),
        ("dt".into(), float(cfg.dt)),
        ("verify".into(), cfg.verify.to_string()),
        ("output".into(), cfg.output.display().to_string()),
    ];
    match &cfg.command {
        Command::LdGrid {
            eta_start,
            eta_stop,
            eta_step,
            m_max,
        } => {
            pairs.push(("eta_start".into(), float(*eta_start)));
            pairs.push(("eta_stop".into(), float(*eta_stop)));
            pairs.push(("eta_step".into(), float(*eta_step)));
            pairs.push(("m_max".into(), m_max.to_string()));
        }
        Command::CarrierCat { tau_max, tau_step }
        | Command::JumpProb { tau_max, tau_step }
        | Command::FanoScan { tau_max, tau_step } => {
            pairs.push(("tau_max".into(), float(*tau_max)));
            pairs.push(("tau_step".into(), float(*tau_step)));
        }
        Command::PhononDist {
            tau,
            window_lo,
            window_hi,
            floor,
        } => {
            pairs.push(("tau".into(), float(*tau)));
            pairs.push(("window_lo".into(), window_lo.to_string()));
            pairs.push(("window_hi".into(), window_hi.to_string()));
            pairs.push(("floor".into(), float(*floor)));
        }
        Command::Trajectories {
            tau_max,
            n_traj,
            n_checkpoints,
            jsonl,
        } => {
            pairs.push(("tau_max".into(), float(*tau_max)));
            pairs.push(("n_traj".into(), n_traj.to_string()));
            pairs.push(("n_checkpoints".into(), n_checkpoints.to_string()));
            if let Some(path) = jsonl {
                pairs.push(("jsonl".into(), path.display().to_string()));
            }
        }
    }
    pairs.sort();
    pairs
}

fn header(cfg: &RunConfig) -> String {
    let mut text = String::new();
    writeln!(text, "# ion-cavity {VERSION}").unwrap();
    writeln!(text, "# command={}", cfg.command.name()).unwrap();
    for (key, value) in effective_pairs(cfg) {
        writeln!(text, "# {key}={value}").unwrap();
    }
    writeln!(text, "# truncation_tail={}", float(cfg.params.truncation_tail())).unwrap();
    text
}

fn sidecar_text(cfg: &RunConfig) -> String {
    let mut text = format!(
        "# ion-cavity {VERSION} effective config for command {}\n",
        cfg.command.name()
    );
    for (key, value) in effective_pairs(cfg) {
        writeln!(text, "{key}={value}").unwrap();
    }
    text
}

fn initial_state(params: &SystemParams) -> CompositeState {
    CompositeState::coherent_excited(params.alpha(), params.m_levels())
}

fn max_abs_diff(x: &CompositeState, y: &CompositeState) -> f64 {
    x.amplitudes()
        .iter()
        .zip(y.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Run the verification pass for a command: the closed forms against the
/// RK4 oracle, returning the worst deviation observed.
fn verify_deviation(cfg: &RunConfig) -> Result<f64> {
    let params = &cfg.params;
    let initial = initial_state(params);
    match &cfg.command {
        Command::LdGrid {
            eta_start,
            eta_stop,
            eta_step,
            m_max,
        } => {
            // reference route: brute-force Laguerre series
            let grid = lamb_dicke::validity_grid(*eta_start, *eta_stop, *eta_step, *m_max);
            let mut worst = 0.0f64;
            for cell in grid.cells() {
                if let Some(ratio) = cell.ratio {
                    let x = cell.eta * cell.eta;
                    let series = (-0.5 * x).exp() * oracle::laguerre_series(cell.m, x)
                        / lamb_dicke::coupling_ld(cell.eta, cell.m);
                    worst = worst.max((ratio - series).abs());
                }
            }
            Ok(worst)
        }
        Command::CarrierCat { tau_max, tau_step } => {
            let taus = tau_grid(*tau_max, *tau_step);
            let config = IntegratorConfig::lossless(cfg.dt, CouplingKind::LambDicke)?;
            let states = oracle::integrate_checkpoints(params, &config, &taus, &initial)?;
            let mut worst = 0.0f64;
            for (tau, numeric) in taus.iter().zip(&states) {
                worst = worst.max(max_abs_diff(&carrier::evolve_ideal(params, *tau), numeric));
            }
            Ok(worst)
        }
        Command::JumpProb { tau_max, tau_step } => {
            let taus = tau_grid(*tau_max, *tau_step);
            let config = IntegratorConfig::from_params(params, cfg.dt, CouplingKind::LambDicke)?;
            let states = oracle::integrate_checkpoints(params, &config, &taus, &initial)?;
            let mut worst = 0.0f64;
            for (tau, numeric) in taus.iter().zip(&states) {
                let p_closed = conditional::jump_probability(params, *tau);
                let p_oracle = (1.0 - numeric.norm_sq()).clamp(0.0, 1.0);
                worst = worst.max((p_closed - p_oracle).abs());
            }
            Ok(worst)
        }
        Command::FanoScan { tau_max, tau_step } => {
            let taus = tau_grid(*tau_max, *tau_step);
            let scan = crate::stats::fano_timeseries(params, &taus);
            let sample_taus: Vec<f64> = scan.rows.iter().map(|r| r.tau).collect();
            let config = IntegratorConfig::from_params(params, cfg.dt, CouplingKind::LambDicke)?;
            let states = oracle::integrate_checkpoints(params, &config, &sample_taus, &initial)?;
            let mut worst = 0.0f64;
            for (row, numeric) in scan.rows.iter().zip(&states) {
                let jumped = numeric
                    .annihilate_cavity()
                    .sector(0, InternalLevel::Ground)
                    .normalized()?;
                let oracle_fano = phonon_distribution(&jumped)?.fano();
                worst = worst.max((row.fano - oracle_fano).abs());
            }
            Ok(worst)
        }
        Command::PhononDist { tau, .. } => {
            let closed = conditional::post_jump_state(params, *tau)?;
            let dist = phonon_distribution(&closed.motional)?;
            let config = IntegratorConfig::from_params(params, cfg.dt, CouplingKind::LambDicke)?;
            let numeric = oracle::integrate(params, &config, *tau, &initial)?;
            let jumped = numeric
                .annihilate_cavity()
                .sector(0, InternalLevel::Ground)
                .normalized()?;
            let oracle_dist = phonon_distribution(&jumped)?;
            let worst = dist
                .probabilities()
                .iter()
                .zip(oracle_dist.probabilities())
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            Ok(worst)
        }
        Command::Trajectories {
            tau_max,
            n_checkpoints,
            ..
        } => {
            let taus: Vec<f64> = (1..=*n_checkpoints)
                .map(|k| tau_max * k as f64 / *n_checkpoints as f64)
                .collect();
            let config = IntegratorConfig::from_params(params, cfg.dt, CouplingKind::LambDicke)?;
            let states = oracle::integrate_checkpoints(params, &config, &taus, &initial)?;
            let mut worst = 0.0f64;
            for (tau, numeric) in taus.iter().zip(&states) {
                let p_closed = conditional::jump_probability(params, *tau);
                let p_oracle = (1.0 - numeric.norm_sq()).clamp(0.0, 1.0);
                worst = worst.max((p_closed - p_oracle).abs());
            }
            Ok(worst)
        }
    }
}

/// Execute a resolved run: compute, write the data file and its config
/// sidecar, then verify against the oracle when asked.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let params = &cfg.params;
    let mut body = header(cfg);
    let mut jsonl_dump: Option<(PathBuf, String)> = None;

    match &cfg.command {
        Command::LdGrid {
            eta_start,
            eta_stop,
            eta_step,
            m_max,
        } => {
            let grid = lamb_dicke::validity_grid(*eta_start, *eta_stop, *eta_step, *m_max);
            let mut csv = Vec::new();
            grid.write_csv(&mut csv)?;
            body.push_str(std::str::from_utf8(&csv).expect("csv is utf-8"));
        }
        Command::CarrierCat { tau_max, tau_step } => {
            let rows = carrier::time_series(params, &tau_grid(*tau_max, *tau_step));
            body.push_str("t,P(e),P(g),fidelity_plus,fidelity_minus\n");
            for row in rows {
                writeln!(
                    body,
                    "{},{},{},{},{}",
                    float(row.tau),
                    float(row.p_excited),
                    float(row.p_ground),
                    float(row.fidelity_plus),
                    float(row.fidelity_minus)
                )
                .unwrap();
            }
        }
        Command::JumpProb { tau_max, tau_step } => {
            let rows = conditional::survival_series(params, &tau_grid(*tau_max, *tau_step));
            body.push_str("tau,P_jump,survival_norm\n");
            for (tau, p, s) in rows {
                writeln!(body, "{},{},{}", float(tau), float(p), float(s)).unwrap();
            }
        }
        Command::FanoScan { tau_max, tau_step } => {
            let scan = crate::stats::fano_timeseries(params, &tau_grid(*tau_max, *tau_step));
            if !scan.skipped.is_empty() {
                writeln!(
                    body,
                    "# skipped {} grid points with no photon amplitude: {}",
                    scan.skipped.len(),
                    scan.skipped
                        .iter()
                        .map(|t| float(*t))
                        .collect::<Vec<_>>()
                        .join(" ")
                )
                .unwrap();
            }
            body.push_str("tau,fano\n");
            for row in scan.rows {
                writeln!(body, "{},{}", float(row.tau), float(row.fano)).unwrap();
            }
        }
        Command::PhononDist {
            tau,
            window_lo,
            window_hi,
            floor,
        } => {
            let post = conditional::post_jump_state(params, *tau)?;
            let dist = phonon_distribution(&post.motional)?;
            let maxima = count_interior_maxima(&dist, (*window_lo, *window_hi), *floor);
            writeln!(
                body,
                "# interior_maxima[{window_lo},{window_hi}]@floor={}: {maxima}",
                float(*floor)
            )
            .unwrap();
            body.push_str("m,P_m\n");
            for (m, p) in dist.probabilities().iter().enumerate() {
                writeln!(body, "{m},{}", float(*p)).unwrap();
            }
        }
        Command::Trajectories {
            tau_max,
            n_traj,
            n_checkpoints,
            jsonl,
        } => {
            let jump_times =
                trajectories::ensemble_jump_times(params, *tau_max, *n_traj, cfg.seed);
            let taus: Vec<f64> = (1..=*n_checkpoints)
                .map(|k| tau_max * k as f64 / *n_checkpoints as f64)
                .collect();
            let rows = trajectories::cdf_from_jump_times(params, &taus, &jump_times);
            body.push_str("tau,empirical_P,analytic_P,z\n");
            for row in rows {
                writeln!(
                    body,
                    "{},{},{},{}",
                    float(row.tau),
                    float(row.empirical),
                    float(row.analytic),
                    float(row.z)
                )
                .unwrap();
            }
            if let Some(path) = jsonl {
                let mut dump = String::new();
                for (seed, jump_time) in &jump_times {
                    let time = jump_time.map_or("null".to_string(), float);
                    writeln!(dump, "{{\"seed\":{seed},\"jump_time\":{time}}}").unwrap();
                }
                jsonl_dump = Some((path.clone(), dump));
            }
        }
    }

    std::fs::write(&cfg.output, body)?;
    let sidecar = sidecar_path(&cfg.output);
    std::fs::write(&sidecar, sidecar_text(cfg))?;
    if let Some((path, dump)) = jsonl_dump {
        std::fs::write(path, dump)?;
    }

    let max_deviation = if cfg.verify {
        let deviation = verify_deviation(cfg)?;
        println!(
            "verification: max deviation vs oracle = {deviation:e} (threshold {VERIFY_THRESHOLD:e})"
        );
        if deviation > VERIFY_THRESHOLD {
            return Err(Error::Verification {
                max_deviation: deviation,
                threshold: VERIFY_THRESHOLD,
            });
        }
        Some(deviation)
    } else {
        None
    };

    Ok(RunReport {
        output: cfg.output.clone(),
        sidecar,
        max_deviation,
    })
}

/// The `.cfg` sidecar next to an output file.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut os = output.as_os_str().to_owned();
    os.push(".cfg");
    PathBuf::from(os)
}
