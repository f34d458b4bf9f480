//! Ensemble sweep orchestration: configuration, seeding, statistics, and
//! CSV persistence for the four experiment families plus the finite-width
//! correlation diagnostic.
//!
//! Every sweep follows the same discipline. Each grid point draws
//! `n_realizations` independent networks whose seeds are derived from the
//! master seed and the *indices* of the grid point, never from its values,
//! so two sweeps sharing a master seed and grid layout see byte-identical
//! realizations (this is what lets the energy and entanglement figures be
//! computed over the same ensemble). Realizations run in parallel but are
//! aggregated in realization order, making the emitted CSV independent of
//! thread count.
//!
//! Per-realization numerical failures (amplitude underflow, cancellation)
//! are counted and excluded from the statistics; a grid point with more
//! than 10% failures aborts the sweep rather than silently reporting a
//! biased ensemble.

use crate::error::{Error, Result};
use crate::hilbert::{
    build_wavefunction, half_chain_entropy, page_entropy, PageConvention,
    ENUMERATION_GUARD_MAX_SPINS,
};
use crate::meanfield::{
    self, fixed_point_q, iterate_c, ActivationKind, MeanFieldParams, MeanFieldPoint,
};
use crate::network::{probe_moments, sample_network, NetworkConfig, ProbeSpec};
use crate::observables::{
    energy_expectation, h_squared_expectation, Boundary, HamiltonianSpec, SpinConvention,
};
use crate::seed::derive_seed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Iteration budget for mean-field solves driven by the harness. The
/// default solver budget is tuned for generic points; sweeps that straddle
/// the transition need the larger budget because both fixed-point maps
/// lose their spectral gap there.
const SWEEP_MAX_ITERS: usize = 200_000;

/// The experiment families the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Theory-only σ_w sweep of the mean-field phase diagram.
    #[serde(rename = "meanfield")]
    MeanFieldSweep,
    /// Half-chain entropy versus σ_w for several depths.
    #[serde(rename = "entanglement")]
    EntanglementSweep,
    /// Half-chain entropy versus system size for several σ_w.
    #[serde(rename = "scaling")]
    ScalingSweep,
    /// ⟨H⟩ and ⟨H²⟩ versus σ_w for one Heisenberg chain.
    #[serde(rename = "energy")]
    EnergySweep,
    /// Layerwise correlation of wide finite networks against theory.
    #[serde(rename = "correlation")]
    CorrelationCheck,
}

/// Full sweep configuration. Defaults depend on the experiment (see
/// [`SweepConfig::default_for`]); a TOML file and CLI flags override them
/// field by field.
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    /// Which experiment family to run.
    pub experiment: Experiment,
    /// σ_w grid (positive, nonempty).
    pub sigma_w_grid: Vec<f64>,
    /// System sizes; single-size sweeps use the first entry.
    pub l_list: Vec<usize>,
    /// Network depths; single-depth sweeps use the first entry.
    pub mu_list: Vec<usize>,
    /// Hidden width factor: width = round(alpha · L).
    pub alpha: f64,
    /// Requested realizations per grid point.
    pub n_realizations: usize,
    /// Master seed every per-realization seed is derived from.
    pub master_seed: u64,
    /// Bias scale (mean-field legs only; networks are bias-free).
    pub sigma_b: f64,
    /// Mean-field activation.
    pub activation: ActivationKind,
    /// Nearest-neighbor coupling (energy sweep).
    pub j1: f64,
    /// Next-nearest-neighbor coupling (energy sweep).
    pub j2: f64,
    /// Chain boundary (energy sweep).
    pub boundary: Boundary,
    /// Spin operator normalization (energy sweep).
    pub convention: SpinConvention,
    /// Hidden width of the correlation probe networks.
    pub probe_width: usize,
    /// Overlap of the two probe inputs in [0, 1]: 0 is orthogonal, 1
    /// feeds the identical vector through both slots.
    pub probe_correlation: f64,
    /// Where the CSV lands; the metadata sidecar appends `.meta.json`.
    pub output_path: String,
    /// Also write every per-realization value to `<out>.samples.csv`.
    pub dump_samples: bool,
    /// Append a standard-error column after the pinned columns.
    pub standard_error: bool,
}

/// The same fields, all optional: the shape of a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialSweepConfig {
    pub experiment: Option<Experiment>,
    pub sigma_w_grid: Option<Vec<f64>>,
    pub l_list: Option<Vec<usize>>,
    pub mu_list: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub n_realizations: Option<usize>,
    pub master_seed: Option<u64>,
    pub sigma_b: Option<f64>,
    pub activation: Option<ActivationKind>,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub boundary: Option<Boundary>,
    pub convention: Option<SpinConvention>,
    pub probe_width: Option<usize>,
    pub probe_correlation: Option<f64>,
    pub output_path: Option<String>,
    pub dump_samples: Option<bool>,
    pub standard_error: Option<bool>,
}

/// Evenly spaced grid from `lo` to `hi` inclusive (within half a step).
pub fn grid_with_step(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 0.5).floor() as usize + 1;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

impl SweepConfig {
    /// The desk-scale defaults of each experiment family. These are sized
    /// for minutes-long runs; raise `n_realizations` to 1000 for
    /// publication-fidelity error bars.
    pub fn default_for(experiment: Experiment) -> Self {
        let base = SweepConfig {
            experiment,
            sigma_w_grid: grid_with_step(0.5, 3.0, 0.25),
            l_list: vec![10],
            mu_list: vec![20],
            alpha: 1.0,
            n_realizations: 200,
            master_seed: 42,
            sigma_b: 0.01,
            activation: ActivationKind::Tanh,
            j1: 1.0,
            j2: 0.2,
            boundary: Boundary::Periodic,
            convention: SpinConvention::SpinHalf,
            probe_width: 1024,
            probe_correlation: 0.0,
            output_path: String::new(),
            dump_samples: false,
            standard_error: false,
        };
        match experiment {
            Experiment::MeanFieldSweep => SweepConfig {
                sigma_w_grid: grid_with_step(0.5, 3.0, 0.02),
                output_path: "meanfield.csv".into(),
                ..base
            },
            Experiment::EntanglementSweep => SweepConfig {
                mu_list: vec![5, 10, 20],
                output_path: "entanglement.csv".into(),
                ..base
            },
            Experiment::ScalingSweep => SweepConfig {
                sigma_w_grid: vec![0.75, 1.5, 2.5],
                l_list: vec![6, 8, 10, 12],
                output_path: "scaling.csv".into(),
                ..base
            },
            Experiment::EnergySweep => SweepConfig {
                output_path: "energy.csv".into(),
                ..base
            },
            Experiment::CorrelationCheck => SweepConfig {
                sigma_w_grid: vec![0.8, 2.5],
                mu_list: vec![40],
                n_realizations: 100,
                output_path: "correlation.csv".into(),
                ..base
            },
        }
    }

    /// Overlays every present field of `partial` onto `self`.
    pub fn apply(&mut self, partial: PartialSweepConfig) {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = partial.$field {
                    self.$field = v;
                }
            };
        }
        take!(experiment);
        take!(sigma_w_grid);
        take!(l_list);
        take!(mu_list);
        take!(alpha);
        take!(n_realizations);
        take!(master_seed);
        take!(sigma_b);
        take!(activation);
        take!(j1);
        take!(j2);
        take!(boundary);
        take!(convention);
        take!(probe_width);
        take!(probe_correlation);
        take!(output_path);
        take!(dump_samples);
        take!(standard_error);
    }

    /// Checks the invariants shared by all experiments. Grid values must
    /// be positive, sizes even and within the enumeration guard, depths
    /// and realization counts at least one.
    pub fn validate(&self) -> Result<()> {
        if self.sigma_w_grid.is_empty() {
            return Err(Error::InvalidParameter {
                name: "sigma_w_grid",
                reason: "grid must be nonempty".into(),
            });
        }
        if let Some(&bad) = self
            .sigma_w_grid
            .iter()
            .find(|&&s| !(s > 0.0 && s.is_finite()))
        {
            return Err(Error::InvalidParameter {
                name: "sigma_w_grid",
                reason: format!("grid values must be finite and positive, got {bad}"),
            });
        }
        if self.l_list.is_empty() {
            return Err(Error::InvalidParameter {
                name: "l_list",
                reason: "need at least one system size".into(),
            });
        }
        for &l in &self.l_list {
            if l < 2 || l % 2 != 0 {
                return Err(Error::InvalidParameter {
                    name: "l_list",
                    reason: format!("system sizes must be even and ≥ 2, got {l}"),
                });
            }
            if l > ENUMERATION_GUARD_MAX_SPINS {
                return Err(Error::SystemTooLarge {
                    num_spins: l,
                    max: ENUMERATION_GUARD_MAX_SPINS,
                });
            }
        }
        if self.mu_list.is_empty() || self.mu_list.iter().any(|&m| m == 0) {
            return Err(Error::InvalidParameter {
                name: "mu_list",
                reason: "need at least one positive depth".into(),
            });
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("width factor must be positive, got {}", self.alpha),
            });
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter {
                name: "n_realizations",
                reason: "need at least one realization".into(),
            });
        }
        if !(self.sigma_b >= 0.0 && self.sigma_b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma_b",
                reason: format!("bias scale must be nonnegative, got {}", self.sigma_b),
            });
        }
        if !self.j1.is_finite() || !self.j2.is_finite() {
            return Err(Error::InvalidParameter {
                name: "couplings",
                reason: "J1 and J2 must be finite".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.probe_correlation) {
            return Err(Error::InvalidParameter {
                name: "probe_correlation",
                reason: format!("input overlap must lie in [0, 1], got {}", self.probe_correlation),
            });
        }
        Ok(())
    }

    /// The Hamiltonian described by the energy-sweep fields.
    pub fn hamiltonian(&self, num_spins: usize) -> HamiltonianSpec {
        HamiltonianSpec {
            num_spins,
            j1: self.j1,
            j2: self.j2,
            boundary: self.boundary,
            convention: self.convention,
        }
    }

    /// Mean-field parameters at one grid σ_w, with the sweep-sized
    /// iteration budget.
    fn meanfield_params(&self, sigma_w: f64) -> MeanFieldParams {
        let mut params = MeanFieldParams::new(sigma_w, self.sigma_b, self.activation);
        params.max_iters = SWEEP_MAX_ITERS;
        params
    }
}

/// Parses a TOML config file; unknown keys are rejected so typos cannot
/// silently fall back to defaults.
pub fn load_partial_config(path: &Path) -> Result<PartialSweepConfig> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Which per-realization scalar an [`EnsembleResult`] aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Half-chain von Neumann entropy.
    Entropy,
    /// ⟨H⟩.
    EnergyH,
    /// ⟨H²⟩.
    EnergyHSquared,
}

impl Observable {
    fn label(self) -> &'static str {
        match self {
            Observable::Entropy => "entropy",
            Observable::EnergyH => "energy_h",
            Observable::EnergyHSquared => "energy_h2",
        }
    }
}

/// Ensemble statistics of one observable at one grid point.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleResult {
    /// Weight scale of the grid point.
    pub sigma_w: f64,
    /// System size.
    pub num_spins: usize,
    /// Network depth.
    pub depth: usize,
    /// Width factor.
    pub alpha: f64,
    /// Aggregated observable.
    pub observable: Observable,
    /// Sample mean over successful realizations.
    pub mean: f64,
    /// Two-pass sample standard deviation (divisor n−1; 0 when n = 1).
    pub std_dev: f64,
    /// Successful realizations.
    pub n: usize,
    /// Excluded realizations; `n + failures` equals the requested count.
    pub failures: usize,
    /// Per-realization values as (realization index, value), in index
    /// order — the dump that makes the statistics reproducible.
    pub samples: Vec<(usize, f64)>,
}

impl EnsembleResult {
    /// Standard error of the mean (std_dev / √n).
    pub fn standard_error(&self) -> f64 {
        if self.n > 1 {
            self.std_dev / (self.n as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Two-pass sample mean and standard deviation (n−1 divisor). A single
/// value has zero spread by convention.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// True for errors that count as a per-realization failure rather than a
/// configuration or programming bug: these are excluded and tallied.
fn is_realization_failure(err: &Error) -> bool {
    matches!(
        err,
        Error::AmplitudeCancellation | Error::ZeroNorm | Error::NumericalIntegrity(_)
    )
}

/// Evaluates one grid point over all realizations in parallel, with
/// deterministic realization-ordered aggregation and the 10% failure
/// budget.
fn collect_point<T, F>(
    n_realizations: usize,
    describe: &str,
    eval: F,
) -> Result<(Vec<(usize, T)>, usize)>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let outcomes: Vec<(usize, Result<T>)> = (0..n_realizations)
        .into_par_iter()
        .map(|r| (r, eval(r)))
        .collect();
    let mut samples = Vec::with_capacity(n_realizations);
    let mut failures = 0usize;
    for (r, outcome) in outcomes {
        match outcome {
            Ok(value) => samples.push((r, value)),
            Err(e) if is_realization_failure(&e) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if failures * 10 > n_realizations {
        return Err(Error::SweepAborted(format!(
            "{describe}: {failures} of {n_realizations} realizations failed (>10%)"
        )));
    }
    Ok((samples, failures))
}

fn ensemble_from_samples(
    sigma_w: f64,
    num_spins: usize,
    depth: usize,
    alpha: f64,
    observable: Observable,
    samples: Vec<(usize, f64)>,
    failures: usize,
) -> EnsembleResult {
    let values: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let (mean, std_dev) = mean_std(&values);
    EnsembleResult {
        sigma_w,
        num_spins,
        depth,
        alpha,
        observable,
        mean,
        std_dev,
        n: values.len(),
        failures,
        samples,
    }
}

/// One sampled wavefunction of the ensemble at (σ_w index, depth index,
/// realization): the single seeding rule shared by the entanglement and
/// energy sweeps.
fn realization_wavefunction(
    cfg: &SweepConfig,
    num_spins: usize,
    depth: usize,
    sigma_idx: usize,
    depth_idx: usize,
    realization: usize,
) -> Result<crate::hilbert::Wavefunction> {
    let net_config = NetworkConfig {
        num_spins,
        depth,
        width_factor: cfg.alpha,
        sigma_w: cfg.sigma_w_grid[sigma_idx],
        seed: derive_seed(
            cfg.master_seed,
            &[sigma_idx as u64, depth_idx as u64, realization as u64],
        ),
    };
    let net = sample_network(&net_config)?;
    build_wavefunction(&net)
}

/// Half-chain entropy ensembles over the (depth, σ_w) grid at the first
/// configured system size; results ordered depth-major.
pub fn run_entanglement_sweep(cfg: &SweepConfig) -> Result<Vec<EnsembleResult>> {
    cfg.validate()?;
    let num_spins = cfg.l_list[0];
    let mut results = Vec::new();
    for (depth_idx, &depth) in cfg.mu_list.iter().enumerate() {
        for sigma_idx in 0..cfg.sigma_w_grid.len() {
            let sigma_w = cfg.sigma_w_grid[sigma_idx];
            let label = format!("entanglement σ_w={sigma_w} μ={depth}");
            let (samples, failures) = collect_point(cfg.n_realizations, &label, |r| {
                let psi = realization_wavefunction(cfg, num_spins, depth, sigma_idx, depth_idx, r)?;
                half_chain_entropy(&psi)
            })?;
            results.push(ensemble_from_samples(
                sigma_w,
                num_spins,
                depth,
                cfg.alpha,
                Observable::Entropy,
                samples,
                failures,
            ));
        }
    }
    Ok(results)
}

/// Half-chain entropy ensembles over the (σ_w, L) grid at the first
/// configured depth; results ordered σ_w-major (L varies fastest).
pub fn run_scaling_sweep(cfg: &SweepConfig) -> Result<Vec<EnsembleResult>> {
    cfg.validate()?;
    let depth = cfg.mu_list[0];
    let mut results = Vec::new();
    for sigma_idx in 0..cfg.sigma_w_grid.len() {
        let sigma_w = cfg.sigma_w_grid[sigma_idx];
        for (l_idx, &num_spins) in cfg.l_list.iter().enumerate() {
            let label = format!("scaling σ_w={sigma_w} L={num_spins}");
            let (samples, failures) = collect_point(cfg.n_realizations, &label, |r| {
                let psi = realization_wavefunction(cfg, num_spins, depth, sigma_idx, l_idx, r)?;
                half_chain_entropy(&psi)
            })?;
            results.push(ensemble_from_samples(
                sigma_w,
                num_spins,
                depth,
                cfg.alpha,
                Observable::Entropy,
                samples,
                failures,
            ));
        }
    }
    Ok(results)
}

/// ⟨H⟩ and ⟨H²⟩ ensembles over the (depth, σ_w) grid. Seeds follow the
/// same rule as the entanglement sweep, so with matching grids both
/// sweeps measure the identical set of wavefunctions. Results come in
/// pairs: `EnergyH` then `EnergyHSquared` per grid point.
pub fn run_energy_sweep(cfg: &SweepConfig) -> Result<Vec<EnsembleResult>> {
    cfg.validate()?;
    let num_spins = cfg.l_list[0];
    let hamiltonian = cfg.hamiltonian(num_spins);
    hamiltonian.validate()?;
    let mut results = Vec::new();
    for (depth_idx, &depth) in cfg.mu_list.iter().enumerate() {
        for sigma_idx in 0..cfg.sigma_w_grid.len() {
            let sigma_w = cfg.sigma_w_grid[sigma_idx];
            let label = format!("energy σ_w={sigma_w} μ={depth}");
            let (samples, failures) = collect_point(cfg.n_realizations, &label, |r| {
                let psi = realization_wavefunction(cfg, num_spins, depth, sigma_idx, depth_idx, r)?;
                let e = energy_expectation(&hamiltonian, &psi)?;
                let e2 = h_squared_expectation(&hamiltonian, &psi)?;
                Ok((e, e2))
            })?;
            let h_samples: Vec<(usize, f64)> =
                samples.iter().map(|&(r, (e, _))| (r, e)).collect();
            let h2_samples: Vec<(usize, f64)> =
                samples.iter().map(|&(r, (_, e2))| (r, e2)).collect();
            results.push(ensemble_from_samples(
                sigma_w,
                num_spins,
                depth,
                cfg.alpha,
                Observable::EnergyH,
                h_samples,
                failures,
            ));
            results.push(ensemble_from_samples(
                sigma_w,
                num_spins,
                depth,
                cfg.alpha,
                Observable::EnergyHSquared,
                h2_samples,
                failures,
            ));
        }
    }
    Ok(results)
}

/// Thin driver over the mean-field phase sweep with the harness iteration
/// budget; points come back in grid order with per-point convergence
/// flags.
pub fn run_meanfield_sweep(cfg: &SweepConfig) -> Result<Vec<MeanFieldPoint>> {
    cfg.validate()?;
    let template = cfg.meanfield_params(1.0);
    meanfield::phase_sweep_with(&cfg.sigma_w_grid, &template)
}

/// One layer of the empirical-vs-theory correlation comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrelationRow {
    /// Weight scale of the probe ensemble.
    pub sigma_w: f64,
    /// Layer index, 1-based.
    pub layer: usize,
    /// Ensemble estimate of the pre-activation correlation.
    pub empirical_c: f64,
    /// Mean-field prediction at the same layer.
    pub meanfield_c: f64,
}

/// Propagates two fixed inputs through shared wide real networks and
/// compares the layerwise correlation estimate with the mean-field
/// recursion, for every grid σ_w.
///
/// The inputs have exact overlap `probe_correlation` and are scaled so
/// the first layer sits exactly at the variance fixed point q*; the
/// theory curve then starts at c₁ = ((q*−σ_b²)·c_in + σ_b²)/q* and
/// follows the correlation map. Widths below 64 are rejected — the
/// mean-field comparison is meaningless there.
pub fn empirical_correlation_check(cfg: &SweepConfig) -> Result<Vec<CorrelationRow>> {
    cfg.validate()?;
    if cfg.probe_width < 64 {
        return Err(Error::InvalidParameter {
            name: "probe_width",
            reason: format!(
                "mean-field comparison needs width ≥ 64, got {}",
                cfg.probe_width
            ),
        });
    }
    let width = cfg.probe_width;
    let depth = cfg.mu_list[0];
    let mut rows = Vec::new();
    for (sigma_idx, &sigma_w) in cfg.sigma_w_grid.iter().enumerate() {
        let params = cfg.meanfield_params(sigma_w);
        let q_star = fixed_point_q(&params)?;
        let qx = (q_star - cfg.sigma_b * cfg.sigma_b) / (sigma_w * sigma_w);
        if qx <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma_w",
                reason: format!(
                    "no positive input variance reproduces q* = {q_star} at σ_w = {sigma_w}"
                ),
            });
        }

        // Fixed input pair with exact overlap c_in: an orthonormal Gaussian
        // frame (e₁, e₂) combined as e₁ and c_in·e₁ + √(1−c_in²)·e₂, both
        // scaled to squared norm width·q_x so layer one lands on q*.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            cfg.master_seed,
            &[u64::MAX, u64::MAX],
        ));
        let mut e1: Vec<f64> =
            (0..width).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut e2: Vec<f64> =
            (0..width).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm1 = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
        e1.iter_mut().for_each(|x| *x /= norm1);
        let dot: f64 = e1.iter().zip(&e2).map(|(a, b)| a * b).sum();
        e2.iter_mut().zip(&e1).for_each(|(b, &a)| *b -= dot * a);
        let norm2 = e2.iter().map(|x| x * x).sum::<f64>().sqrt();
        e2.iter_mut().for_each(|x| *x /= norm2);

        let c_in = cfg.probe_correlation;
        let scale = (width as f64 * qx).sqrt();
        let input_a: Vec<f64> = e1.iter().map(|&a| scale * a).collect();
        let input_b: Vec<f64> = e1
            .iter()
            .zip(&e2)
            .map(|(&a, &b)| scale * (c_in * a + (1.0 - c_in * c_in).sqrt() * b))
            .collect();

        // Theory: correlation of the layer-l pre-activations.
        let sb2 = cfg.sigma_b * cfg.sigma_b;
        let c_input = ((q_star - sb2) * c_in + sb2) / q_star;
        let mut theory = Vec::with_capacity(depth);
        theory.push(c_input);
        for _ in 1..depth {
            let next = iterate_c(*theory.last().unwrap(), q_star, &params)?;
            theory.push(next);
        }

        // Ensemble moments, realization-parallel, realization-ordered sum.
        let per_realization: Vec<Result<Vec<crate::network::ProbeLayerMoments>>> = (0
            ..cfg.n_realizations)
            .into_par_iter()
            .map(|r| {
                let spec = ProbeSpec {
                    width,
                    depth,
                    sigma_w,
                    sigma_b: cfg.sigma_b,
                    activation: cfg.activation,
                    seed: derive_seed(
                        cfg.master_seed,
                        &[u64::MAX, sigma_idx as u64, r as u64],
                    ),
                };
                probe_moments(&spec, &input_a, &input_b)
            })
            .collect();
        let mut sum_aa = vec![0.0; depth];
        let mut sum_bb = vec![0.0; depth];
        let mut sum_ab = vec![0.0; depth];
        for moments in per_realization {
            for (l, m) in moments?.iter().enumerate() {
                sum_aa[l] += m.sum_aa;
                sum_bb[l] += m.sum_bb;
                sum_ab[l] += m.sum_ab;
            }
        }
        for l in 0..depth {
            rows.push(CorrelationRow {
                sigma_w,
                layer: l + 1,
                empirical_c: sum_ab[l] / (sum_aa[l] * sum_bb[l]).sqrt(),
                meanfield_c: theory[l],
            });
        }
    }
    Ok(rows)
}

// --------------------------------------------------------------- persistence

/// Writes `L,mu,alpha,sigma_w,mean_entropy,std_entropy,n,failures` rows
/// (plus `se_entropy` when requested).
pub fn write_entanglement_csv<W: Write>(
    results: &[EnsembleResult],
    standard_error: bool,
    mut out: W,
) -> Result<()> {
    let mut header = "L,mu,alpha,sigma_w,mean_entropy,std_entropy,n,failures".to_string();
    if standard_error {
        header.push_str(",se_entropy");
    }
    writeln!(out, "{header}")?;
    for r in results {
        let mut line = format!(
            "{},{},{},{},{},{},{},{}",
            r.num_spins, r.depth, r.alpha, r.sigma_w, r.mean, r.std_dev, r.n, r.failures
        );
        if standard_error {
            write!(line, ",{}", r.standard_error()).expect("infallible string write");
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Writes `L,mu,alpha,sigma_w,mean_entropy,std_entropy,page_paper,page_standard,n`
/// rows; the Page columns carry both conventions of the random-state
/// reference at the row's L.
pub fn write_scaling_csv<W: Write>(
    results: &[EnsembleResult],
    standard_error: bool,
    mut out: W,
) -> Result<()> {
    let mut header =
        "L,mu,alpha,sigma_w,mean_entropy,std_entropy,page_paper,page_standard,n".to_string();
    if standard_error {
        header.push_str(",se_entropy");
    }
    writeln!(out, "{header}")?;
    for r in results {
        let paper = page_entropy(r.num_spins, PageConvention::PaperEq5)?;
        let standard = page_entropy(r.num_spins, PageConvention::StandardHalfChain)?;
        let mut line = format!(
            "{},{},{},{},{},{},{},{},{}",
            r.num_spins, r.depth, r.alpha, r.sigma_w, r.mean, r.std_dev, paper, standard, r.n
        );
        if standard_error {
            write!(line, ",{}", r.standard_error()).expect("infallible string write");
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Writes `L,mu,alpha,sigma_w,J1,J2,boundary,mean_H,std_H,mean_H2,std_H2,n`
/// rows by pairing the `EnergyH`/`EnergyHSquared` entries the energy sweep
/// produced.
pub fn write_energy_csv<W: Write>(
    results: &[EnsembleResult],
    cfg: &SweepConfig,
    mut out: W,
) -> Result<()> {
    let mut header = "L,mu,alpha,sigma_w,J1,J2,boundary,mean_H,std_H,mean_H2,std_H2,n".to_string();
    if cfg.standard_error {
        header.push_str(",se_H,se_H2");
    }
    writeln!(out, "{header}")?;
    let boundary = match cfg.boundary {
        Boundary::Periodic => "periodic",
        Boundary::Open => "open",
    };
    for pair in results.chunks(2) {
        let [h, h2] = pair else {
            return Err(Error::NumericalIntegrity(
                "energy results must come in ⟨H⟩/⟨H²⟩ pairs".into(),
            ));
        };
        debug_assert_eq!(h.observable, Observable::EnergyH);
        debug_assert_eq!(h2.observable, Observable::EnergyHSquared);
        let mut line = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            h.num_spins,
            h.depth,
            h.alpha,
            h.sigma_w,
            cfg.j1,
            cfg.j2,
            boundary,
            h.mean,
            h.std_dev,
            h2.mean,
            h2.std_dev,
            h.n
        );
        if cfg.standard_error {
            write!(line, ",{},{}", h.standard_error(), h2.standard_error())
                .expect("infallible string write");
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Writes `sigma_w,layer,empirical_c,meanfield_c` rows.
pub fn write_correlation_csv<W: Write>(rows: &[CorrelationRow], mut out: W) -> Result<()> {
    writeln!(out, "sigma_w,layer,empirical_c,meanfield_c")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.sigma_w, r.layer, r.empirical_c, r.meanfield_c
        )?;
    }
    Ok(())
}

/// Writes the per-realization dump:
/// `L,mu,alpha,sigma_w,observable,realization,value`.
pub fn write_samples_csv<W: Write>(results: &[EnsembleResult], mut out: W) -> Result<()> {
    writeln!(out, "L,mu,alpha,sigma_w,observable,realization,value")?;
    for res in results {
        for &(r, v) in &res.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                res.num_spins,
                res.depth,
                res.alpha,
                res.sigma_w,
                res.observable.label(),
                r,
                v
            )?;
        }
    }
    Ok(())
}

/// The conventions sidecar written next to every CSV: everything a reader
/// needs to interpret or regenerate the data.
pub fn metadata_json(cfg: &SweepConfig) -> serde_json::Value {
    serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "rng": "chacha8",
        "seed_derivation": "splitmix64 fold over (master, indices)",
        "spin_convention": match cfg.convention {
            SpinConvention::SpinHalf => "S = sigma/2",
            SpinConvention::Pauli => "bare Pauli (4x)",
        },
        "boundary": match cfg.boundary {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        },
        "bit_order": "site0=msb",
        "activation": cfg.activation,
        "complex_activation": "selu(Re) + i selu(Im)",
        "config": cfg,
    })
}

/// What [`execute`] wrote, for CLI reporting.
#[derive(Debug)]
pub struct ExecutionSummary {
    /// Data rows written (header excluded).
    pub rows: usize,
    /// The CSV path.
    pub output_path: String,
    /// The sidecar path.
    pub sidecar_path: String,
}

/// Runs the configured experiment and persists CSV, metadata sidecar, and
/// (when requested) the per-realization samples dump.
pub fn execute(cfg: &SweepConfig) -> Result<ExecutionSummary> {
    cfg.validate()?;
    let mut csv: Vec<u8> = Vec::new();
    let mut samples_csv: Option<Vec<u8>> = None;
    let rows = match cfg.experiment {
        Experiment::MeanFieldSweep => {
            let points = run_meanfield_sweep(cfg)?;
            meanfield::write_points_csv(&points, &mut csv)?;
            points.len()
        }
        Experiment::EntanglementSweep => {
            let results = run_entanglement_sweep(cfg)?;
            write_entanglement_csv(&results, cfg.standard_error, &mut csv)?;
            if cfg.dump_samples {
                let mut dump = Vec::new();
                write_samples_csv(&results, &mut dump)?;
                samples_csv = Some(dump);
            }
            results.len()
        }
        Experiment::ScalingSweep => {
            let results = run_scaling_sweep(cfg)?;
            write_scaling_csv(&results, cfg.standard_error, &mut csv)?;
            if cfg.dump_samples {
                let mut dump = Vec::new();
                write_samples_csv(&results, &mut dump)?;
                samples_csv = Some(dump);
            }
            results.len()
        }
        Experiment::EnergySweep => {
            let results = run_energy_sweep(cfg)?;
            write_energy_csv(&results, cfg, &mut csv)?;
            if cfg.dump_samples {
                let mut dump = Vec::new();
                write_samples_csv(&results, &mut dump)?;
                samples_csv = Some(dump);
            }
            results.len() / 2
        }
        Experiment::CorrelationCheck => {
            let rows = empirical_correlation_check(cfg)?;
            write_correlation_csv(&rows, &mut csv)?;
            rows.len()
        }
    };
    std::fs::write(&cfg.output_path, &csv)?;
    let sidecar_path = format!("{}.meta.json", cfg.output_path);
    let meta = serde_json::to_string_pretty(&metadata_json(cfg))
        .map_err(|e| Error::Config(format!("metadata serialization: {e}")))?;
    std::fs::write(&sidecar_path, meta)?;
    if let Some(dump) = samples_csv {
        std::fs::write(format!("{}.samples.csv", cfg.output_path), dump)?;
    }
    Ok(ExecutionSummary {
        rows,
        output_path: cfg.output_path.clone(),
        sidecar_path,
    })
}
