//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use weakval::{builtin_config, render_scenario, RunOptions};
use weakval_core::adiabatic::{
    adiabatic_nonhermitian_measure, build_spin_protection, effective_hamiltonian, evolve_adiabatic,
    kaon_toy_hamiltonian, protective_shift, simulate_protected_2sv, unprotected_control, AdiabaticOptions,
    RampProfile, StepControl,
};
use weakval_core::ensemble::{collect_samples, sample_discrete, RngStream, Schedule};
use weakval_core::hilbert::{
    axis_top_state, eig_biorthogonal, qubit, spin_operators, weak_value, Operator, Spin, StateVector,
    TwoStateVector, X_AXIS, Y_AXIS,
};
use weakval_core::impulsive::{
    entangle, post_select, post_selection_terms, readout_ensemble, weak_ensemble_estimate, weak_limit_report,
};
use weakval_core::pointer::{gaussian_pointer, mixture_mean, Grid, PointerWave, Representation};
use weakval_core::C64;

/// Failure detail; errors from the library convert into it.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(format!("error: {e}"))
    }
}

type Outcome = Result<String, Fail>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(Fail(detail))
    }
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}

fn within(elapsed: Duration, limit_s: f64, detail: String) -> Outcome {
    let s = elapsed.as_secs_f64();
    check(s < limit_s, format!("{detail}; {s:.2}s (limit {limit_s}s)"))
}

fn c1_spin_weak_values() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [1u32, 2, 5, 10] {
        let spin = Spin::integer(n);
        let tsv = TwoStateVector::new(axis_top_state(X_AXIS, spin)?, axis_top_state(Y_AXIS, spin)?)?;
        let s = spin_operators(spin);
        let nf = f64::from(n);
        let expected = [C64::new(nf, 0.0), C64::new(nf, 0.0), C64::new(0.0, nf)];
        for (op, e) in s.components().into_iter().zip(expected) {
            worst = worst.max((weak_value(op, &tsv)? - e).norm());
        }
    }
    check(worst < 1e-9, format!("max |S_w - (N, N, iN)| = {worst:.2e}"))
        .and_then(|d| within(start.elapsed(), 1.0, d))
}

fn c2_effective_spectrum() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (n, lambda) in [(1u32, 1.0), (10, 0.5), (7, -0.3)] {
        let h = effective_hamiltonian(&build_spin_protection(n, lambda)?)?;
        let e = lambda * f64::from(n);
        let h_dag = h.adjoint();
        let residual = |op: &Operator, v: &StateVector, ev: C64| -> Result<f64, Fail> {
            let hv = op.apply(v)?;
            Ok((hv - v.as_vector() * ev).norm())
        };
        // right eigenvectors of H, and left ones as right eigenvectors of H†
        worst = worst
            .max(residual(&h, &qubit::up_x(), C64::new(-e, 0.0))?)
            .max(residual(&h_dag, &qubit::up_y(), C64::new(-e, 0.0))?)
            .max(residual(&h, &qubit::down_y(), C64::new(e, 0.0))?)
            .max(residual(&h_dag, &qubit::down_x(), C64::new(e, 0.0))?);
    }
    check(worst < 1e-12, format!("max eigen-residual {worst:.2e}")).and_then(|d| within(start.elapsed(), 1.0, d))
}

fn c3_ideal_regime() -> Outcome {
    let start = Instant::now();
    let delta = 0.05;
    let grid = Grid::auto(delta, 1.0)?;
    let js = entangle(&qubit::up_x(), &Operator::pauli_z(), &gaussian_pointer(&grid, delta)?)?;
    let n = 100_000;
    let records = readout_ensemble(&js, n, 3, Schedule::Parallel)?;
    let near_plus = records.iter().filter(|r| (r.reading - 1.0).abs() <= 5.0 * delta).count();
    let stray = records
        .iter()
        .filter(|r| (r.reading - 1.0).abs() > 5.0 * delta && (r.reading + 1.0).abs() > 5.0 * delta)
        .count();
    let frac = near_plus as f64 / n as f64;
    check(
        (frac - 0.5).abs() <= 0.01 && stray == 0,
        format!("fraction near +1 = {frac:.4}, readings off both eigenvalues = {stray}"),
    )
    .and_then(|d| within(start.elapsed(), 10.0, d))
}

fn c4_weak_ensemble() -> Outcome {
    let start = Instant::now();
    let r = weak_ensemble_estimate(&qubit::up_z(), &Operator::pauli_z(), 10.0, 100_000, 4, Schedule::Parallel)?;
    let z = (r.mean - 1.0).abs() / r.std_error;
    check(
        z < 3.0 && (r.std_error - 0.022).abs() < 0.002,
        format!("estimate {:.4} +- {:.4} ({z:.2} SE from 1)", r.mean, r.std_error),
    )
    .and_then(|d| within(start.elapsed(), 10.0, d))
}

fn c5_post_selected_weak_limit() -> Outcome {
    let start = Instant::now();
    let theta: f64 = 0.75;
    let tsv = TwoStateVector::new(qubit::tilted(theta, 1.0), qubit::tilted(theta, -1.0))?;
    let aw = 1.0 / (2.0 * theta).cos();
    let mut errors = Vec::new();
    let mut at_100 = f64::NAN;
    for delta in [25.0, 50.0, 100.0, 200.0] {
        let r = weak_limit_report(&tsv, &Operator::pauli_z(), delta)?;
        if delta == 100.0 {
            at_100 = r.exact_mean;
        }
        errors.push(r.error());
    }
    let rel = (at_100 - aw).abs() / aw;
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    check(
        rel < 0.05 && decreasing && (aw - 14.137).abs() < 1e-3,
        format!("A_w = {aw:.4}, mean at delta 100 = {at_100:.4} ({:.2}%), errors {}", rel * 100.0, sci(&errors)),
    )
    .and_then(|d| within(start.elapsed(), 1.0, d))
}

fn c6_protective() -> Outcome {
    let start = Instant::now();
    let h0 = Operator::pauli_x() + Operator::pauli_z();
    let mut errors = Vec::new();
    for t in [20.0, 40.0, 80.0, 160.0] {
        errors.push((protective_shift(&h0, 1, &Operator::pauli_z(), 1.0, t)? - FRAC_1_SQRT_2).abs());
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let last = errors[errors.len() - 1];
    check(decreasing && last < 1e-2, format!("errors over T = 20..160: {}", sci(&errors)))
        .and_then(|d| within(start.elapsed(), 60.0, d))
}

fn c7_spin_protection() -> Outcome {
    let start = Instant::now();
    let opts = AdiabaticOptions::default();
    let (n, lambda, t, delta) = (10, 0.5, 40.0, 1.0);
    let setup = build_spin_protection(n, lambda)?;
    let sx = simulate_protected_2sv(&setup, &Operator::pauli_x(), delta, t, &opts)?;
    let sz = simulate_protected_2sv(&setup, &Operator::pauli_z(), delta, t, &opts)?;
    let control = unprotected_control(n, &Operator::pauli_z(), delta, t, &opts)?;
    check(
        (sx.pointer_mean - 1.0).abs() < 0.05 && sz.pointer_mean.abs() < 0.05 && control.disturbance > sz.disturbance,
        format!(
            "sigma_x mean {:.5}, sigma_z mean {:.5}, disturbance {:.3e} vs unprotected {:.3e}",
            sx.pointer_mean, sz.pointer_mean, sz.disturbance, control.disturbance
        ),
    )
    .and_then(|d| within(start.elapsed(), 600.0, d))
}

fn c8_nonhermitian_rule() -> Outcome {
    // kets (1, 0) at ω = 0 and (1, 1)/√2 at ω = −0.1i; α = (0.6, 0.8)
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let h = Operator::from_rows(&[vec![z, -0.1 * i], vec![z, -0.1 * i]])?;
    let s = FRAC_1_SQRT_2;
    let psi0 = StateVector::from_real(&[0.6 + 0.8 * s, 0.8 * s])?;
    let t = 5.0;
    let m = adiabatic_nonhermitian_measure(&h, &Operator::pauli_z(), &psi0, 1.0, t)?;

    let w_stable = 0.36;
    let w_decay = 0.64 * (-2.0 * 0.1 * t).exp();
    let exact = [w_stable / (w_stable + w_decay), w_decay / (w_stable + w_decay)];
    let prob_of = |shift: f64| m.outcomes.iter().find(|o| (o.shift - shift).abs() < 1e-10).map(|o| o.probability);
    let got = [prob_of(1.0).unwrap_or(f64::NAN), prob_of(-1.0).unwrap_or(f64::NAN)];
    let analytic_err = (got[0] - exact[0]).abs().max((got[1] - exact[1]).abs());
    // criterion quotes four-digit values; the exact ratio rounds to 0.6046
    let quoted_gap = (got[0] - 0.6047).abs().max((got[1] - 0.3953).abs());

    let sys = eig_biorthogonal(&h)?;
    let weak_set: Vec<f64> = (0..sys.len())
        .map(|k| sys.pair_weak_value(k, &Operator::pauli_z()).map(|w| w.re))
        .collect::<Result<_, _>>()?;
    let weights: Vec<f64> = m.outcomes.iter().map(|o| o.probability).collect();
    let n = 10_000;
    let picks = collect_samples(n, 8, Schedule::Parallel, |rng| sample_discrete(&weights, rng.uniform()));
    let shifts: Vec<f64> = picks.iter().map(|&k| m.outcomes[k].shift).collect();
    let in_set = shifts.iter().all(|x| weak_set.iter().any(|w| (x - w).abs() < 1e-10));
    let freq_plus = shifts.iter().filter(|&&x| (x - 1.0).abs() < 1e-10).count() as f64 / n as f64;
    let freq_err = (freq_plus - exact[0]).abs();
    check(
        analytic_err < 1e-8 && quoted_gap < 2e-4 && freq_err <= 0.02 && in_set,
        format!(
            "probabilities ({:.6}, {:.6}), exact {analytic_err:.1e} off, quoted (0.6047, 0.3953) {quoted_gap:.1e} off; \
             frequency {freq_plus:.4}; shifts in weak-value set {weak_set:?}: {in_set}",
            got[0], got[1]
        ),
    )
}

fn c9_biorthogonality() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(9, 0);
    let (mut orth, mut recon): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let entries: Vec<C64> = (0..16).map(|_| C64::new(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0)).collect();
        let h = Operator::new(4, entries)?;
        let sys = eig_biorthogonal(&h)?;
        orth = orth.max(sys.orthogonality_residual());
        recon = recon.max(sys.reconstruct().max_abs_diff(&h));
    }
    check(orth < 1e-10 && recon < 1e-10, format!("orthogonality {orth:.2e}, reconstruction {recon:.2e}"))
        .and_then(|d| within(start.elapsed(), 5.0, d))
}

fn c10_kaon() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [0.01f64, 0.1, 0.3] {
        let sys = eig_biorthogonal(&kaon_toy_hamiltonian(eps)?)?;
        let expected = 1.0 / (1.0 - eps * eps).sqrt();
        for k in 0..sys.len() {
            worst = worst.max((sys.bra_ket_fidelity(k) - expected).abs());
        }
    }
    check(worst < 1e-10, format!("max |fidelity - 1/sqrt(1-eps^2)| = {worst:.2e}"))
}

fn c11_infrastructure() -> Outcome {
    // grid post-selection against the analytic mixture
    let mut grid_err: f64 = 0.0;
    for (theta, delta) in [(0.75f64, 100.0), (0.75, 5.0), (0.3, 1.0)] {
        let tsv = TwoStateVector::new(qubit::tilted(theta, 1.0), qubit::tilted(theta, -1.0))?;
        let grid = Grid::auto(delta, 1.0)?;
        let js = entangle(tsv.ket(), &Operator::pauli_z(), &gaussian_pointer(&grid, delta)?)?;
        let (w, _) = post_select(&js, tsv.bra())?;
        let exact = mixture_mean(&post_selection_terms(&tsv, &Operator::pauli_z())?, delta)?;
        grid_err = grid_err.max((w.moments().mean_q - exact).abs());
    }

    let mut rng = RngStream::new(11, 0);
    let grid = Grid::new(1024, 30.0)?;
    let amps: Vec<C64> = (0..1024).map(|_| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5)).collect();
    let w = PointerWave::from_amplitudes(grid, amps, Representation::Position)?;
    let back = w.to_representation(Representation::Momentum).to_representation(Representation::Position);
    let fft_err = back.amplitudes().iter().zip(w.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let h0 = Operator::pauli_x() + Operator::pauli_z();
    let psi0 = StateVector::from_real(&[0.3, 0.9])?;
    let pointer = gaussian_pointer(&Grid::auto(1.0, 1.0)?, 1.0)?;
    let run = evolve_adiabatic(&h0, &Operator::pauli_z(), &psi0, &pointer, RampProfile::with_default_ramp(20.0)?, StepControl::Auto)?;
    let before = pointer.momentum_density();
    let marginal_err = run.momentum_marginal().iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let mut differing = Vec::new();
    for name in ["ideal-vs-weak", "decay-postselect", "protective-two-level"] {
        let cfg = builtin_config(name).expect("builtin exists")?;
        let serial = render_scenario(&cfg, &RunOptions { schedule: Schedule::Serial })?;
        let parallel = render_scenario(&cfg, &RunOptions { schedule: Schedule::Parallel })?;
        for (a, b) in serial.artifacts.iter().zip(&parallel.artifacts) {
            if a.render()? != b.render()? {
                differing.push(format!("{name}{}", a.suffix));
            }
        }
    }
    check(
        grid_err < 1e-8 && fft_err < 1e-12 && marginal_err < 1e-10 && differing.is_empty(),
        format!(
            "grid vs analytic {grid_err:.1e}, Fourier round trip {fft_err:.1e}, marginal drift {marginal_err:.1e}, \
             serial/parallel CSV mismatches {differing:?}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("spin weak values (N, N, iN)", c1_spin_weak_values),
        ("effective Hamiltonian eigen-pairs", c2_effective_spectrum),
        ("ideal regime readout", c3_ideal_regime),
        ("weak ensemble estimate", c4_weak_ensemble),
        ("post-selected weak limit", c5_post_selected_weak_limit),
        ("protective measurement convergence", c6_protective),
        ("full protection simulation", c7_spin_protection),
        ("non-hermitian outcome rule", c8_nonhermitian_rule),
        ("bi-orthogonality", c9_biorthogonality),
        ("bra/ket fidelity relation", c10_kaon),
        ("numerical infrastructure", c11_infrastructure),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", k + 1),
            Err(Fail(detail)) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
