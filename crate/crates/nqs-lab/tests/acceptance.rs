//! Acceptance suite: one test per numbered criterion, each printing a
//! single `criterion N: PASS|FAIL` line (run with `--nocapture` to see the
//! lines for passing tests) before asserting. The failure message repeats
//! the measured numbers, so a red criterion documents itself.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeSet;

use nqs_lab::harness::{
    empirical_correlation_check, run_energy_sweep, run_entanglement_sweep, run_meanfield_sweep,
    run_scaling_sweep, write_entanglement_csv, Experiment, SweepConfig,
};
use nqs_lab::hilbert::{
    entanglement, half_chain_entropy, page_entropy, reduced_spectrum, PageConvention,
    Wavefunction,
};
use nqs_lab::meanfield::{
    correlation_slope_chi, decay_length_xi, fit_decay_length, fixed_point_c, fixed_point_q,
    gaussian_quadrature, iterate_c, ActivationKind, MeanFieldParams,
};
use nqs_lab::network::{sample_network, NetworkConfig};
use nqs_lab::observables::{
    apply_hamiltonian, energy_expectation, exact_spectrum_reference, h_squared_expectation,
    Boundary, HamiltonianSpec,
};

fn report(n: usize, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} - {detail}");
}

/// Mean-field parameters with the iteration budget sized for evaluation
/// points arbitrarily close to the transition.
fn slow_params(sigma_w: f64, sigma_b: f64) -> MeanFieldParams {
    let mut params = MeanFieldParams::new(sigma_w, sigma_b, ActivationKind::Tanh);
    params.max_iters = 400_000;
    params
}

/// Slope of the correlation map at c = 1: σ_w² E[φ′(√q* z)²]. This is the
/// quantity whose crossing through 1 defines the transition.
fn chi_at_unit_correlation(sigma_w: f64) -> f64 {
    let params = slow_params(sigma_w, 0.0);
    let q_star = fixed_point_q(&params).expect("q fixed point");
    let quad = gaussian_quadrature(params.quadrature_order).expect("quadrature");
    let s = q_star.sqrt();
    sigma_w
        * sigma_w
        * quad.integrate(|z| {
            let d = params.activation.derivative(s * z);
            d * d
        })
}

fn lsq_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    sxy / sxx
}

#[test]
fn criterion_1_meanfield_critical_point() {
    // Bias-free leg: bisect the crossing of the unit-correlation slope.
    // At exactly σ_w = 1 the slope is exactly 1 (q* = 0), so the crossing
    // bracket closes onto 1 from above.
    let mut lo = 0.5f64;
    let mut hi = 1.5f64;
    assert!(chi_at_unit_correlation(lo) < 1.0, "bracket precondition at {lo}");
    assert!(chi_at_unit_correlation(hi) > 1.0, "bracket precondition at {hi}");
    for _ in 0..13 {
        let mid = 0.5 * (lo + hi);
        if chi_at_unit_correlation(mid) > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let sigma_c = 0.5 * (lo + hi);
    let critical_ok = (sigma_c - 1.0).abs() <= 1e-3;

    // Closed form below the transition: q* = 0, so the slope is σ_w².
    let closed_06 = (chi_at_unit_correlation(0.6) - 0.36).abs() <= 1e-9;
    let closed_09 = (chi_at_unit_correlation(0.9) - 0.81).abs() <= 1e-9;
    let exact_at_one =
        (correlation_slope_chi(&slow_params(1.0, 0.0)).unwrap() - 1.0).abs() <= 1e-12;

    // Biased leg: on the default grid (step 0.02) the decay length must
    // have a single maximum, located where c* leaves 1.
    let cfg = SweepConfig::default_for(Experiment::MeanFieldSweep);
    let points = run_meanfield_sweep(&cfg).expect("meanfield sweep");
    let all_converged = points.iter().all(|p| p.converged);
    let peak = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.xi_c.total_cmp(&b.1.xi_c))
        .map(|(i, _)| i)
        .unwrap();
    let mut unimodal = true;
    for i in 1..points.len() {
        let slack = 1e-9 * points[i - 1].xi_c.abs().max(1.0);
        if i <= peak {
            unimodal &= points[i].xi_c >= points[i - 1].xi_c - slack;
        } else {
            unimodal &= points[i].xi_c <= points[i - 1].xi_c + slack;
        }
    }
    let last_ordered = points
        .iter()
        .rposition(|p| p.c_star > 1.0 - 1e-3)
        .expect("an ordered grid point");
    let has_chaotic_side = last_ordered + 1 < points.len();
    let transition_matches =
        (points[peak].sigma_w - points[last_ordered].sigma_w).abs() <= 0.02 + 1e-9;

    let pass = critical_ok
        && closed_06
        && closed_09
        && exact_at_one
        && all_converged
        && unimodal
        && has_chaotic_side
        && transition_matches;
    let detail = format!(
        "bias-free crossing at sigma_w = {sigma_c:.6} (want 1.000 +- 0.001); \
         slope(0.6) - 0.36 and slope(0.9) - 0.81 within 1e-9: {closed_06}/{closed_09}; \
         slope at sigma_w = 1 exactly 1: {exact_at_one}; biased grid converged: {all_converged}, \
         xi unimodal: {unimodal}, xi peak at sigma_w = {:.2} vs last c* > 1 - 1e-3 at {:.2}",
        points[peak].sigma_w, points[last_ordered].sigma_w
    );
    report(1, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_2_decay_length_trajectory_fit() {
    let mut pass = true;
    let mut parts = Vec::new();
    for &sigma_w in &[0.7, 0.9, 1.3, 1.6] {
        let params = slow_params(sigma_w, 0.01);
        let q_star = fixed_point_q(&params).unwrap();
        let c_star = fixed_point_c(&params).unwrap();
        let xi = decay_length_xi(&params).unwrap();
        let mut c = 0.5;
        let mut trajectory = Vec::new();
        for layer in 1..=2000usize {
            c = iterate_c(c, q_star, &params).unwrap();
            let d = (c - c_star).abs();
            if d <= 1e-9 {
                break;
            }
            if d < 1e-3 {
                trajectory.push((layer, d));
            }
        }
        let fitted = fit_decay_length(&trajectory).unwrap();
        let rel = (fitted - xi).abs() / xi;
        pass &= rel <= 0.05;
        parts.push(format!(
            "sigma_w {sigma_w}: fit {fitted:.4} vs -1/ln(chi) {xi:.4} ({:.2}%)",
            100.0 * rel
        ));
    }
    let detail = parts.join("; ");
    report(2, pass, &detail);
    assert!(pass, "{detail}");
}

/// Runs the wide-network probe at one σ_w and fits the decay of |c_l − c*|
/// for the empirical and the mean-field curves over the same layer window
/// (layers whose predicted distance lies in [d_lo, d_hi]).
fn correlation_leg(
    sigma_w: f64,
    probe_correlation: f64,
    depth: usize,
    d_lo: f64,
    d_hi: f64,
) -> (f64, f64, usize, f64) {
    let mut cfg = SweepConfig::default_for(Experiment::CorrelationCheck);
    cfg.sigma_w_grid = vec![sigma_w];
    cfg.mu_list = vec![depth];
    cfg.probe_correlation = probe_correlation;
    let rows = empirical_correlation_check(&cfg).expect("correlation check");

    let params = slow_params(sigma_w, cfg.sigma_b);
    let c_star = fixed_point_c(&params).unwrap();
    let xi_asymptotic = decay_length_xi(&params).unwrap();

    let mut empirical = Vec::new();
    let mut theory = Vec::new();
    for row in &rows {
        let d_theory = (row.meanfield_c - c_star).abs();
        if d_theory >= d_lo && d_theory <= d_hi {
            empirical.push((row.layer, (row.empirical_c - c_star).abs()));
            theory.push((row.layer, d_theory));
        }
    }
    let fit_empirical = fit_decay_length(&empirical).expect("empirical fit");
    let fit_theory = fit_decay_length(&theory).expect("theory fit");
    (fit_empirical, fit_theory, theory.len(), xi_asymptotic)
}

#[test]
fn criterion_3_wide_network_tracks_meanfield() {
    // Ordered side: orthogonal inputs, correlation rises toward c* = 1.
    // The window covers the asymptotic tail, so the theory fit must also
    // agree with -1/ln(chi).
    let (emp_a, th_a, n_a, xi_a) = correlation_leg(0.8, 0.0, 14, 0.01, 0.5);
    // Chaotic side: strongly aligned inputs, correlation falls toward a
    // small c*. The approach is not yet asymptotic at these depths, so the
    // reference is the mean-field curve fitted over the same window.
    let (emp_b, th_b, n_b, xi_b) = correlation_leg(2.5, 0.9, 20, 0.05, 0.95);

    let rel_a = (emp_a - th_a).abs() / th_a;
    let rel_b = (emp_b - th_b).abs() / th_b;
    let sanity_a = (th_a - xi_a).abs() / xi_a <= 0.10;
    let pass = n_a >= 6 && n_b >= 10 && rel_a <= 0.15 && rel_b <= 0.15 && sanity_a;
    let detail = format!(
        "sigma_w 0.8: empirical xi {emp_a:.3} vs meanfield {th_a:.3} ({:.1}%, {n_a} layers, \
         asymptote {xi_a:.3}); sigma_w 2.5: empirical xi {emp_b:.3} vs meanfield {th_b:.3} \
         ({:.1}%, {n_b} layers, asymptote {xi_b:.3}); tolerance 15%",
        100.0 * rel_a,
        100.0 * rel_b
    );
    report(3, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_4_entanglement_peak() {
    let cfg = SweepConfig::default_for(Experiment::EntanglementSweep);
    let results = run_entanglement_sweep(&cfg).expect("entanglement sweep");
    let n_sigma = cfg.sigma_w_grid.len();
    assert_eq!(results.len(), n_sigma * cfg.mu_list.len());

    let mut peak_heights = Vec::new();
    let mut peak_sigma_deepest = 0.0;
    for (depth_idx, _) in cfg.mu_list.iter().enumerate() {
        let slice = &results[depth_idx * n_sigma..(depth_idx + 1) * n_sigma];
        let best = slice
            .iter()
            .max_by(|a, b| a.mean.total_cmp(&b.mean))
            .unwrap();
        peak_heights.push(best.mean);
        peak_sigma_deepest = best.sigma_w;
    }
    let peak_in_band = (1.0..=2.0).contains(&peak_sigma_deepest);
    let nondecreasing = peak_heights.windows(2).all(|w| w[1] >= w[0]);
    let pass = peak_in_band && nondecreasing;
    let detail = format!(
        "depth-20 peak at sigma_w = {peak_sigma_deepest} (want within [1.0, 2.0]); \
         peak entropies over depths {:?} = {:?} (want nondecreasing)",
        cfg.mu_list, peak_heights
    );
    report(4, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_5_scaling_dichotomy() {
    let cfg = SweepConfig::default_for(Experiment::ScalingSweep);
    let results = run_scaling_sweep(&cfg).expect("scaling sweep");
    let n_l = cfg.l_list.len();
    assert_eq!(results.len(), cfg.sigma_w_grid.len() * n_l);
    let slice = |sigma_idx: usize| &results[sigma_idx * n_l..(sigma_idx + 1) * n_l];

    // sigma_w = 0.75: entropy saturates with system size.
    let ordered = slice(0);
    let growth = ordered[3].mean - ordered[2].mean;
    let saturates = growth < 0.1;

    // sigma_w = 2.5: entropy keeps growing linearly with system size.
    let chaotic = slice(2);
    let pts: Vec<(f64, f64)> = chaotic
        .iter()
        .map(|r| (r.num_spins as f64, r.mean))
        .collect();
    let slope = lsq_slope(&pts);
    let volume_law = slope >= 0.1;

    // sigma_w = 1.5: near the transition the L = 10 entropy approaches the
    // random-state value.
    let near = slice(1)[2].mean;
    let page = page_entropy(10, PageConvention::StandardHalfChain).unwrap();
    let near_page = near >= 0.8 * page;

    let pass = saturates && volume_law && near_page;
    let detail = format!(
        "sigma_w 0.75: S(12) - S(10) = {growth:.4} (want < 0.1); \
         sigma_w 2.5: slope dS/dL = {slope:.4} (want >= 0.1); \
         sigma_w 1.5: S(10) = {near:.4} vs 0.8 x random-state value {:.4}",
        0.8 * page
    );
    report(5, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_6_energy_crossover() {
    let mut cfg = SweepConfig::default_for(Experiment::EnergySweep);
    cfg.sigma_w_grid = vec![0.75, 2.5];
    let results = run_energy_sweep(&cfg).expect("energy sweep");
    // Pairs per grid point: [0] H at 0.75, [1] H^2 at 0.75, [2] H at 2.5,
    // [3] H^2 at 2.5.
    assert_eq!(results.len(), 4);
    let (h_lo, h2_lo, h_hi, h2_hi) = (&results[0], &results[1], &results[2], &results[3]);

    let h_gap = h_hi.mean - h_lo.mean;
    let h_sep = 2.0 * (h_lo.standard_error().powi(2) + h_hi.standard_error().powi(2)).sqrt();
    let h_leg = h_lo.mean < h_hi.mean && h_gap >= h_sep;

    let h2_gap = h2_lo.mean - h2_hi.mean;
    let h2_sep = 2.0 * (h2_lo.standard_error().powi(2) + h2_hi.standard_error().powi(2)).sqrt();
    let h2_leg = h2_hi.mean < h2_lo.mean && h2_gap >= h2_sep;

    let reference = exact_spectrum_reference(&cfg.hamiltonian(cfg.l_list[0])).unwrap();
    let pass = h_leg && h2_leg;
    let detail = format!(
        "<H> = {:.4} +- {:.4} at sigma_w 0.75 vs {:.4} +- {:.4} at 2.5 \
         (claimed ordered < chaotic by >= 2 se: {h_leg}); \
         <H^2> = {:.4} +- {:.4} at 0.75 vs {:.4} +- {:.4} at 2.5 \
         (chaotic < ordered by >= 2 se: {h2_leg}); \
         exact ground energy {:.4} for scale",
        h_lo.mean,
        h_lo.standard_error(),
        h_hi.mean,
        h_hi.standard_error(),
        h2_lo.mean,
        h2_lo.standard_error(),
        h2_hi.mean,
        h2_hi.standard_error(),
        reference.ground_energy
    );
    report(6, pass, &detail);
    assert!(pass, "{detail}");
}

// ------------------------------------------------------- dense oracles (7)

fn spin_half_matrices() -> [DMatrix<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let h = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5);
    [
        DMatrix::from_row_slice(2, 2, &[o, h, h, o]),
        DMatrix::from_row_slice(2, 2, &[o, -ih, ih, o]),
        DMatrix::from_row_slice(2, 2, &[h, o, o, -h]),
    ]
}

/// Operator acting on one site, built by Kronecker products with site 0 as
/// the leftmost factor (most significant index bits).
fn site_operator(l: usize, site: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for s in 0..l {
        out = out.kronecker(if s == site { op } else { &id2 });
    }
    out
}

/// Independent bond enumeration: plain double loop plus unordered-pair
/// deduplication per distance.
fn oracle_bonds(l: usize, j1: f64, j2: f64, periodic: bool) -> Vec<(usize, usize, f64)> {
    let mut seen = BTreeSet::new();
    let mut bonds = Vec::new();
    for (distance, coupling) in [(1usize, j1), (2usize, j2)] {
        if coupling == 0.0 {
            continue;
        }
        for i in 0..l {
            let raw = i + distance;
            let j = if periodic {
                raw % l
            } else if raw < l {
                raw
            } else {
                continue;
            };
            if i == j {
                continue;
            }
            let key = (distance, i.min(j), i.max(j));
            if seen.insert(key) {
                bonds.push((key.1, key.2, coupling));
            }
        }
    }
    bonds
}

fn dense_hamiltonian(l: usize, j1: f64, j2: f64, periodic: bool) -> DMatrix<Complex64> {
    let dim = 1usize << l;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (a, b, coupling) in oracle_bonds(l, j1, j2, periodic) {
        for op in &spin_half_matrices() {
            h += site_operator(l, a, op) * site_operator(l, b, op) * Complex64::from(coupling);
        }
    }
    h
}

fn random_state(l: usize, seed: u64) -> Wavefunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..1usize << l)
        .map(|_| {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    Wavefunction::from_amplitudes(l, amps).unwrap()
}

#[test]
fn criterion_7_oracle_equivalence() {
    let mut max_action = 0.0f64;
    let mut max_spectrum = 0.0f64;
    let mut max_h2 = 0.0f64;
    for &l in &[4usize, 6, 8] {
        let psi = random_state(l, 0xC7 + l as u64);
        let dim = 1usize << l;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());

        for &(j1, j2, periodic) in &[(1.0, 0.2, true), (1.0, 0.0, false), (0.7, -0.3, false)] {
            let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
            let spec = HamiltonianSpec::new(l, j1, j2, boundary);
            let dense = dense_hamiltonian(l, j1, j2, periodic);

            let fast = apply_hamiltonian(&spec, &psi).unwrap();
            let slow = &dense * &v;
            for n in 0..dim {
                max_action = max_action.max((fast[n] - slow[n]).norm());
            }

            let h2 = h_squared_expectation(&spec, &psi).unwrap();
            let twice = &dense * &slow;
            let oracle_h2 = v.dotc(&twice).re;
            max_h2 = max_h2.max((h2 - oracle_h2).abs());
        }

        for cut in [1, l / 2, l - 1] {
            let spectrum = reduced_spectrum(&psi, cut).unwrap();
            let rows = 1usize << cut;
            let cols = dim >> cut;
            let m = DMatrix::from_fn(rows, cols, |i, j| psi.amplitudes()[i * cols + j]);
            let rho = &m * m.adjoint();
            let mut oracle: Vec<f64> = rho.symmetric_eigen().eigenvalues.iter().copied().collect();
            oracle.sort_by(|a, b| b.total_cmp(a));
            for (k, &p) in oracle.iter().enumerate() {
                let reference = spectrum.get(k).copied().unwrap_or(0.0);
                max_spectrum = max_spectrum.max((p - reference).abs());
            }
        }
    }
    let pass = max_action <= 1e-10 && max_spectrum <= 1e-10 && max_h2 <= 1e-9;
    let detail = format!(
        "max |Hpsi - dense Hpsi| = {max_action:.2e} (want <= 1e-10); \
         max Schmidt spectrum deviation = {max_spectrum:.2e} (want <= 1e-10); \
         max <H^2> deviation = {max_h2:.2e} (want <= 1e-9)"
    );
    report(7, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_8_property_suite() {
    let l = 8usize;
    let spec = HamiltonianSpec::new(l, 1.0, 0.2, Boundary::Periodic);
    let mut norm_ok = true;
    let mut symmetry_ok = true;
    let mut bounds_ok = true;
    let mut variance_ok = true;
    let mut phase_ok = true;
    for (k, &sigma_w) in [0.6, 1.5, 2.5].iter().enumerate() {
        let net = sample_network(&NetworkConfig {
            num_spins: l,
            depth: 5,
            width_factor: 1.0,
            sigma_w,
            seed: 900 + k as u64,
        })
        .unwrap();
        let psi = nqs_lab::hilbert::build_wavefunction(&net).unwrap();

        let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        norm_ok &= (norm - 1.0).abs() <= 1e-12;

        for cut in 1..l {
            let s = entanglement(&psi, cut).unwrap().entropy;
            // Complement leg computed from scratch: reshape to M, diagonalize
            // rho_B = M† M, and take its entropy. Equality with the A-side
            // entropy is the Schmidt theorem.
            let rows = 1usize << cut;
            let cols = (1usize << l) >> cut;
            let m = nalgebra::DMatrix::from_fn(rows, cols, |i, j| {
                psi.amplitudes()[i * cols + j]
            });
            let rho_b = m.adjoint() * &m;
            let complement: f64 = rho_b
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .filter(|&&p| p >= 1e-14)
                .map(|&p| -p * p.ln())
                .sum();
            symmetry_ok &= (s - complement).abs() <= 1e-10;
            let cap = cut.min(l - cut) as f64 * 2.0f64.ln();
            bounds_ok &= s >= -1e-12 && s <= cap + 1e-12;
        }

        let e = energy_expectation(&spec, &psi).unwrap();
        let e2 = h_squared_expectation(&spec, &psi).unwrap();
        variance_ok &= e2 >= e * e - 1e-9;

        let rotated = Wavefunction::from_amplitudes(
            l,
            psi.amplitudes()
                .iter()
                .map(|a| a * Complex64::new(0.0, 0.7).exp())
                .collect(),
        )
        .unwrap();
        phase_ok &= (half_chain_entropy(&rotated).unwrap() - half_chain_entropy(&psi).unwrap())
            .abs()
            <= 1e-12;
        phase_ok &= (energy_expectation(&spec, &rotated).unwrap() - e).abs() <= 1e-12;
    }

    // Total S^z conservation: H applied to a single basis state stays in
    // the magnetization sector, exactly.
    let mut sector_ok = true;
    let n0 = 0b0011_0101usize;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << l];
    amps[n0] = Complex64::new(1.0, 0.0);
    let basis = Wavefunction::from_amplitudes(l, amps).unwrap();
    let image = apply_hamiltonian(&spec, &basis).unwrap();
    for (m, a) in image.iter().enumerate() {
        if a.norm() > 0.0 {
            sector_ok &= m.count_ones() == n0.count_ones();
        }
    }

    // Determinism: the same sweep on 1 and 3 rayon threads must serialize
    // to identical bytes.
    let mut cfg = SweepConfig::default_for(Experiment::EntanglementSweep);
    cfg.sigma_w_grid = vec![0.9, 1.8];
    cfg.l_list = vec![6];
    cfg.mu_list = vec![3];
    cfg.n_realizations = 8;
    cfg.master_seed = 7;
    let mut csv = Vec::new();
    for threads in [1usize, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let results = pool.install(|| run_entanglement_sweep(&cfg)).unwrap();
        let mut bytes = Vec::new();
        write_entanglement_csv(&results, cfg.standard_error, &mut bytes).unwrap();
        csv.push(bytes);
    }
    let deterministic = csv[0] == csv[1];

    let pass = norm_ok
        && symmetry_ok
        && bounds_ok
        && variance_ok
        && phase_ok
        && sector_ok
        && deterministic;
    let detail = format!(
        "norm within 1e-12: {norm_ok}; cut/complement entropy within 1e-10: {symmetry_ok}; \
         0 <= S <= min(|A|,|B|) ln2: {bounds_ok}; <H^2> >= <H>^2: {variance_ok}; \
         global phase invariance: {phase_ok}; S^z sector preserved exactly: {sector_ok}; \
         byte-identical CSV on 1 vs 3 threads: {deterministic}"
    );
    report(8, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_9_random_state_entropy() {
    let l = 8usize;
    let samples = 10_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5041_4745);
    let mut sum = 0.0;
    for _ in 0..samples {
        let amps: Vec<Complex64> = (0..1usize << l)
            .map(|_| {
                Complex64::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        let psi = Wavefunction::from_amplitudes(l, amps).unwrap();
        sum += half_chain_entropy(&psi).unwrap();
    }
    let mean = sum / samples as f64;
    let standard = page_entropy(l, PageConvention::StandardHalfChain).unwrap();
    let printed = page_entropy(l, PageConvention::PaperEq5).unwrap();
    let matches_standard = (mean - standard).abs() / standard <= 0.02;
    let diverges_from_printed = (mean - printed).abs() / printed > 0.02;
    let pass = matches_standard && diverges_from_printed;
    let detail = format!(
        "mean entropy of {samples} random states = {mean:.5}; \
         (L/2) ln2 - 1/2 = {standard:.5} (within 2%: {matches_standard}); \
         full-L convention {printed:.5} is off by design: {diverges_from_printed}"
    );
    report(9, pass, &detail);
    assert!(pass, "{detail}");
}
