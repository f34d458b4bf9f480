//! Random deep complex-weight networks and their log-amplitudes.
//!
//! A neural quantum state assigns each spin configuration `x ∈ {0,1}^L` the
//! amplitude `⟨x|ψ⟩ = Σ_{i=1}^{αL} exp(y_i^{(μ)})`, where `y^{(μ)}` is the
//! output of a depth-μ feed-forward network with complex Gaussian weights,
//! no biases, and the split SELU activation applied after every affine
//! layer. This module samples such networks reproducibly from a seed and
//! evaluates `log⟨x|ψ⟩` stably.
//!
//! Conventions fixed here (and recorded in run metadata by the harness):
//!
//! * Weight entries: `Re` and `Im` drawn independently from
//!   `N(0, σ_w²/N_{l−1})` with `N_{l−1}` the input dimension of layer `l`.
//! * Complex activation: real SELU applied independently to real and
//!   imaginary parts, `φ(z) = selu(Re z) + i·selu(Im z)`. Every downstream
//!   entanglement number depends on this choice.
//! * The activation is applied after each of the μ affine layers; the
//!   exponential sum consumes the activated output.
//! * Inputs are the raw 0/1 occupations, not ±1 spins.
//!
//! Determinism: layer `l` of a network is filled from an independent
//! ChaCha8 stream seeded with `derive_seed(config.seed, [l])`, entries in
//! row-major order, real part before imaginary part. Identical
//! `(config, seed)` therefore reproduce identical networks bit for bit.

use crate::error::{Error, Result};
use crate::meanfield::{selu, ActivationKind};
use crate::seed::derive_seed;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::{Read, Write};

/// Geometry and distribution parameters of one network ensemble member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Number of spins L (≥ 2, even — the chain is bipartitioned at L/2).
    pub num_spins: usize,
    /// Number of affine-then-activation layers μ (≥ 1).
    pub depth: usize,
    /// Width factor α; all hidden layers have width `round(α·L)`.
    pub width_factor: f64,
    /// Weight standard deviation scale σ_w (≥ 0; zero is the degenerate
    /// all-zero-weights distribution, useful for tests).
    pub sigma_w: f64,
    /// Seed of this realization.
    pub seed: u64,
}

impl NetworkConfig {
    /// Hidden width `round(α·L)` shared by all layers.
    pub fn hidden_width(&self) -> usize {
        (self.width_factor * self.num_spins as f64).round() as usize
    }

    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        if self.num_spins < 2 || self.num_spins % 2 != 0 {
            return Err(Error::InvalidParameter {
                name: "num_spins",
                reason: format!("need an even L ≥ 2, got {}", self.num_spins),
            });
        }
        if self.depth == 0 {
            return Err(Error::InvalidParameter {
                name: "depth",
                reason: "need at least one layer".into(),
            });
        }
        if !(self.width_factor > 0.0 && self.width_factor.is_finite())
            || self.hidden_width() == 0
        {
            return Err(Error::InvalidParameter {
                name: "width_factor",
                reason: format!(
                    "round(α·L) must be ≥ 1, got α = {} at L = {}",
                    self.width_factor, self.num_spins
                ),
            });
        }
        if !(self.sigma_w >= 0.0 && self.sigma_w.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma_w",
                reason: format!("must be a finite nonnegative real, got {}", self.sigma_w),
            });
        }
        Ok(())
    }
}

/// A basis configuration of L spins with entries in {0, 1}
/// (0 ↔ down, 1 ↔ up).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfiguration {
    bits: Vec<u8>,
}

impl SpinConfiguration {
    /// Wraps a raw bit pattern, rejecting entries outside {0, 1}.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter {
                name: "bits",
                reason: format!("entries must be 0 or 1, got {bad}"),
            });
        }
        Ok(Self { bits })
    }

    /// The configuration encoded by computational-basis index `index` over
    /// `num_spins` sites.
    ///
    /// Bit order: site 0 is the most significant bit, so index 1 at L = 4
    /// is `0001` (site 3 up). This is the single basis-ordering convention
    /// used across the crate.
    pub fn from_basis_index(index: usize, num_spins: usize) -> Self {
        let bits = (0..num_spins)
            .map(|site| ((index >> (num_spins - 1 - site)) & 1) as u8)
            .collect();
        Self { bits }
    }

    /// The computational-basis index of this configuration (site 0 = MSB).
    pub fn basis_index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// True for the L = 0 corner case.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The raw 0/1 entries, site 0 first.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

/// A sampled network: μ complex weight matrices, no biases, split-SELU
/// activation. Immutable after sampling.
#[derive(Debug, Clone)]
pub struct DeepNetwork {
    config: NetworkConfig,
    /// `weights[0]` has shape (width × L); all later layers (width × width).
    weights: Vec<DMatrix<Complex64>>,
}

impl DeepNetwork {
    /// Builds a network from explicit weight matrices (for tests and
    /// cross-implementation regression); shapes must match the config.
    pub fn from_weights(
        config: NetworkConfig,
        weights: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        config.validate()?;
        if weights.len() != config.depth {
            return Err(Error::DimensionMismatch {
                expected: config.depth,
                got: weights.len(),
            });
        }
        let width = config.hidden_width();
        for (l, w) in weights.iter().enumerate() {
            let expect_cols = if l == 0 { config.num_spins } else { width };
            if w.nrows() != width || w.ncols() != expect_cols {
                return Err(Error::DimensionMismatch {
                    expected: width * expect_cols,
                    got: w.nrows() * w.ncols(),
                });
            }
        }
        Ok(Self { config, weights })
    }

    /// The configuration this network was sampled from.
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    /// The weight matrices, first layer first.
    pub fn weights(&self) -> &[DMatrix<Complex64>] {
        &self.weights
    }
}

/// Samples the network determined by `(config, config.seed)`.
///
/// Layer `l` (0-based) draws from `ChaCha8(derive_seed(seed, [l]))` in
/// row-major entry order, real part then imaginary part, each entry part
/// `N(0, σ_w²/N_{l−1})`.
pub fn sample_network(config: &NetworkConfig) -> Result<DeepNetwork> {
    config.validate()?;
    let width = config.hidden_width();
    let mut weights = Vec::with_capacity(config.depth);
    for layer in 0..config.depth {
        let fan_in = if layer == 0 { config.num_spins } else { width };
        let std = config.sigma_w / (fan_in as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[layer as u64]));
        let mut entries = Vec::with_capacity(width * fan_in);
        for _row in 0..width {
            for _col in 0..fan_in {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                entries.push(Complex64::new(std * re, std * im));
            }
        }
        weights.push(DMatrix::from_row_slice(width, fan_in, &entries));
    }
    Ok(DeepNetwork { config: *config, weights })
}

/// Split SELU on a complex scalar: `selu(Re z) + i·selu(Im z)`.
pub fn selu_complex(z: Complex64) -> Complex64 {
    Complex64::new(selu(z.re), selu(z.im))
}

/// Propagates a spin configuration through the network, returning the
/// activated output `y^{(μ)}` of the last layer.
pub fn forward(net: &DeepNetwork, x: &SpinConfiguration) -> Result<DVector<Complex64>> {
    if x.len() != net.config.num_spins {
        return Err(Error::DimensionMismatch {
            expected: net.config.num_spins,
            got: x.len(),
        });
    }
    let mut y = DVector::from_iterator(
        x.len(),
        x.bits().iter().map(|&b| Complex64::new(b as f64, 0.0)),
    );
    for w in &net.weights {
        y = (w * y).map(selu_complex);
    }
    Ok(y)
}

/// Stable log of the amplitude: `log Σ_i exp(y_i^{(μ)})`.
///
/// Shift-by-max: with `m = max_i Re(y_i)`, returns
/// `m + Log Σ_i exp(y_i − m)` on the principal branch, so the largest
/// exponentiated magnitude is exactly 1 and no finite output overflows.
/// The measure-zero case of the shifted sum cancelling to exactly zero is
/// reported as an error instead of a silent −∞.
pub fn log_amplitude(net: &DeepNetwork, x: &SpinConfiguration) -> Result<Complex64> {
    let y = forward(net, x)?;
    log_sum_exp(y.as_slice())
}

/// Shift-by-max log-sum-exp over complex terms (principal log branch).
pub(crate) fn log_sum_exp(terms: &[Complex64]) -> Result<Complex64> {
    debug_assert!(!terms.is_empty(), "networks have width ≥ 1");
    let shift = terms.iter().map(|y| y.re).fold(f64::NEG_INFINITY, f64::max);
    let sum: Complex64 = terms
        .iter()
        .map(|y| Complex64::new(y.re - shift, y.im).exp())
        .sum();
    if sum == Complex64::ZERO {
        return Err(Error::AmplitudeCancellation);
    }
    Ok(Complex64::new(shift, 0.0) + sum.ln())
}

// --------------------------------------------------------------------------
// Real-weight probe mode
// --------------------------------------------------------------------------

/// Setup of the real-weight wide-network diagnostic used to check the
/// mean-field correlation map against an actual network.
///
/// Unlike [`DeepNetwork`], the probe carries real weights, Gaussian biases
/// of scale σ_b, a configurable scalar activation, and a uniform width for
/// input and hidden layers — exactly the ensemble the mean-field
/// recurrences describe.
#[derive(Debug, Clone, Copy)]
pub struct ProbeSpec {
    /// Uniform layer width (input dimension equals this width).
    pub width: usize,
    /// Number of affine-then-activation layers.
    pub depth: usize,
    /// Weight scale: entries are `N(0, σ_w²/width)`.
    pub sigma_w: f64,
    /// Bias scale: biases are `N(0, σ_b²)`.
    pub sigma_b: f64,
    /// Scalar activation applied between layers.
    pub activation: ActivationKind,
    /// Seed of this probe realization.
    pub seed: u64,
}

/// Per-layer second moments of a pair of signals propagating through one
/// probe network: `Σ_i a_i²`, `Σ_i b_i²`, `Σ_i a_i b_i` over the width,
/// taken on the pre-activations entering the layer's nonlinearity.
#[derive(Debug, Clone, Copy)]
pub struct ProbeLayerMoments {
    /// Squared magnitude of the first signal.
    pub sum_aa: f64,
    /// Squared magnitude of the second signal.
    pub sum_bb: f64,
    /// Cross moment of the two signals.
    pub sum_ab: f64,
}

/// Propagates two inputs through one sampled probe network and records the
/// pre-activation second moments after every layer.
///
/// Layers are sampled one at a time from `derive_seed(spec.seed, [layer])`
/// (weights row-major, then the bias vector) and dropped after use, so the
/// memory footprint is one width×width matrix regardless of depth.
pub fn probe_moments(
    spec: &ProbeSpec,
    input_a: &[f64],
    input_b: &[f64],
) -> Result<Vec<ProbeLayerMoments>> {
    if spec.width < 1 || spec.depth < 1 {
        return Err(Error::InvalidParameter {
            name: "probe",
            reason: format!(
                "width and depth must be ≥ 1, got {}×{}",
                spec.width, spec.depth
            ),
        });
    }
    if input_a.len() != spec.width || input_b.len() != spec.width {
        return Err(Error::DimensionMismatch {
            expected: spec.width,
            got: input_a.len().min(input_b.len()),
        });
    }
    let n = spec.width;
    let weight_std = spec.sigma_w / (n as f64).sqrt();
    let mut act_a: Vec<f64> = input_a.to_vec();
    let mut act_b: Vec<f64> = input_b.to_vec();
    let mut moments = Vec::with_capacity(spec.depth);
    let mut pre_a = vec![0.0; n];
    let mut pre_b = vec![0.0; n];
    for layer in 0..spec.depth {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[layer as u64]));
        let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (mut za, mut zb) = (0.0, 0.0);
            for j in 0..n {
                let w: f64 = weight_std * rng.sample::<f64, _>(StandardNormal);
                za += w * act_a[j];
                zb += w * act_b[j];
            }
            let bias: f64 = spec.sigma_b * rng.sample::<f64, _>(StandardNormal);
            za += bias;
            zb += bias;
            pre_a[i] = za;
            pre_b[i] = zb;
            aa += za * za;
            bb += zb * zb;
            ab += za * zb;
        }
        moments.push(ProbeLayerMoments { sum_aa: aa, sum_bb: bb, sum_ab: ab });
        for i in 0..n {
            act_a[i] = spec.activation.eval(pre_a[i]);
            act_b[i] = spec.activation.eval(pre_b[i]);
        }
    }
    Ok(moments)
}

// --------------------------------------------------------------------------
// Binary dump
// --------------------------------------------------------------------------

const NETWORK_DUMP_MAGIC: &[u8; 8] = b"NQSNET1\n";

/// Writes the network in the cross-implementation regression format:
/// magic, layer count, then per layer its shape and row-major complex
/// entries as little-endian IEEE-754 doubles (real before imaginary).
pub fn write_network_dump<W: Write>(net: &DeepNetwork, mut out: W) -> Result<()> {
    out.write_all(NETWORK_DUMP_MAGIC)?;
    out.write_all(&(net.weights.len() as u32).to_le_bytes())?;
    for w in &net.weights {
        out.write_all(&(w.nrows() as u32).to_le_bytes())?;
        out.write_all(&(w.ncols() as u32).to_le_bytes())?;
        for i in 0..w.nrows() {
            for j in 0..w.ncols() {
                out.write_all(&w[(i, j)].re.to_le_bytes())?;
                out.write_all(&w[(i, j)].im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Reads a dump written by [`write_network_dump`], reattaching the given
/// config (shapes are validated against it).
pub fn read_network_dump<R: Read>(config: NetworkConfig, mut input: R) -> Result<DeepNetwork> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != NETWORK_DUMP_MAGIC {
        return Err(Error::NumericalIntegrity(
            "network dump magic bytes do not match".into(),
        ));
    }
    let mut u32_buf = [0u8; 4];
    input.read_exact(&mut u32_buf)?;
    let layers = u32::from_le_bytes(u32_buf) as usize;
    let mut weights = Vec::with_capacity(layers);
    let mut f64_buf = [0u8; 8];
    for _ in 0..layers {
        input.read_exact(&mut u32_buf)?;
        let rows = u32::from_le_bytes(u32_buf) as usize;
        input.read_exact(&mut u32_buf)?;
        let cols = u32::from_le_bytes(u32_buf) as usize;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            input.read_exact(&mut f64_buf)?;
            let re = f64::from_le_bytes(f64_buf);
            input.read_exact(&mut f64_buf)?;
            let im = f64::from_le_bytes(f64_buf);
            entries.push(Complex64::new(re, im));
        }
        weights.push(DMatrix::from_row_slice(rows, cols, &entries));
    }
    DeepNetwork::from_weights(config, weights)
}
