//! Dispatch from a scenario to the simulation engine and CSV artifacts.

use std::path::PathBuf;

use weakval_core::adiabatic::{
    adiabatic_nonhermitian_measure, build_spin_protection, evolve_adiabatic_with, kaon_fidelity_prediction,
    kaon_toy_hamiltonian, protective_outcomes, simulate_protected_2sv, unprotected_control, AdiabaticOptions,
    RampProfile, StepControl, DEFAULT_RAMP_FRACTION,
};
use weakval_core::ensemble::{collect_samples, sample_discrete, summarize, EnsembleReport, Schedule};
use weakval_core::hilbert::{
    eig_biorthogonal, eig_hermitian, expectation, qubit, weak_value, Operator, StateVector, TwoStateVector,
};
use weakval_core::impulsive::{
    entangle, pointer_distribution, post_select, weak_ensemble_readings, weak_limit_report, ReadoutSampler,
};
use weakval_core::pointer::{gaussian_pointer, Grid, DEFAULT_POINTS};

use crate::config::{Kind, ScenarioConfig, StateSpec};
use crate::error::CliError;
use crate::output::{num, Artifact};
use crate::presets::Context;

/// Execution settings that do not change results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub schedule: Schedule,
}

/// Artifacts of one scenario, not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    /// The scenario with all defaults filled in.
    pub effective: ScenarioConfig,
    pub artifacts: Vec<Artifact>,
}

impl Kind {
    pub fn procedure(self) -> &'static str {
        match self {
            Kind::WeakValue => "two-state weak value",
            Kind::Impulsive => "impulsive von Neumann measurement with ideal readout",
            Kind::WeakEnsemble => "weak measurement on a pre-selected ensemble",
            Kind::PostSelect => "weak measurement on a pre- and post-selected ensemble",
            Kind::Protective => "protective measurement of an energy eigenstate",
            Kind::NonHermitian => "adiabatic measurement under a non-hermitian Hamiltonian",
            Kind::Protect2sv => "protection of a two-state vector by a large-spin ancilla",
            Kind::KaonToy => "bra/ket overlap of a decaying two-level system",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Kind::WeakValue => "A_w = <Psi2|A|Psi1> / <Psi2|Psi1>",
            Kind::Impulsive => {
                "pointer density sum_i |alpha_i|^2 exp(-(Q-a_i)^2/Delta^2) / (sqrt(pi) Delta); \
                 reading drawn by inverse CDF, system collapsed onto its conditional state"
            }
            Kind::WeakEnsemble => "readings from the pointer density with Delta >> |a_i|; mean -> <Psi|A|Psi>",
            Kind::PostSelect => "Phi(Q) ~ sum_i <Psi2|a_i><a_i|Psi1> exp(-(Q-a_i)^2/(2 Delta^2)); mean -> Re A_w",
            Kind::Protective => "H = H0 + g(t) P A with g = 1/(T(1-r)) on the plateau; shift -> <E_i|A|E_i>",
            Kind::NonHermitian => {
                "shift Re(<bra_i|A|ket_i>/<bra_i|ket_i>) with probability ~ |alpha_i exp(-i omega_i T)|^2"
            }
            Kind::Protect2sv => {
                "H_prot = -lambda S.sigma; ancilla |S_x=N> ... <S_y=N|; H_eff = -lambda N (sigma_x + sigma_y + i sigma_z)"
            }
            Kind::KaonToy => "1/|<bra|ket>| = 1/sqrt(1 - eps^2) for eigen-ket overlap eps",
        }
    }
}

fn required<T: Copy>(v: Option<T>, field: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::validation(field, "is required"))
}

fn grid_for(cfg: &ScenarioConfig, delta: f64, max_shift: f64) -> Result<Grid, CliError> {
    let g = cfg.grid.unwrap_or(crate::config::GridSpec {
        points: None,
        extent: None,
    });
    let points = g.points.unwrap_or(DEFAULT_POINTS);
    Ok(match g.extent {
        Some(l) => Grid::new(points, l)?,
        None => Grid::auto_with_points(points, delta, max_shift)?,
    })
}

fn adiabatic_options(cfg: &ScenarioConfig, opts: &RunOptions) -> AdiabaticOptions {
    AdiabaticOptions {
        ramp_fraction: DEFAULT_RAMP_FRACTION,
        steps: cfg.steps.map_or(StepControl::Auto, StepControl::Fixed),
        points: cfg.grid.and_then(|g| g.points),
        extent: cfg.grid.and_then(|g| g.extent),
        schedule: opts.schedule,
    }
}

fn state(ctx: &Context, spec: &Option<StateSpec>, field: &str) -> Result<StateVector, CliError> {
    let spec = spec.as_ref().ok_or_else(|| CliError::validation(field, "is required"))?;
    ctx.state(spec, field)
}

fn observable(ctx: &Context, cfg: &ScenarioConfig) -> Result<Operator, CliError> {
    let spec = cfg
        .observable
        .as_ref()
        .ok_or_else(|| CliError::validation("observable", "is required"))?;
    ctx.operator(spec, "observable")
}

fn hamiltonian(ctx: &Context) -> Result<Operator, CliError> {
    ctx.hamiltonian
        .clone()
        .ok_or_else(|| CliError::validation("hamiltonian", "is required"))
}

fn ensemble_artifacts(report: &EnsembleReport) -> (Artifact, Artifact) {
    let mut summary = Artifact::new("_summary", vec!["n", "mean", "std_error", "seed"]);
    summary.push(vec![
        report.n.to_string(),
        num(report.mean),
        num(report.std_error),
        report.seed.map_or(String::new(), |s| s.to_string()),
    ]);
    let mut hist = Artifact::new("_histogram", vec!["bin_left", "bin_right", "count"]);
    for (e, c) in report.histogram.edges.windows(2).zip(&report.histogram.counts) {
        hist.push(vec![num(e[0]), num(e[1]), c.to_string()]);
    }
    (summary, hist)
}

fn readings_artifact(readings: &[(f64, bool)]) -> Artifact {
    let mut a = Artifact::new("", vec!["sample_index", "reading", "success_flag"]);
    for (i, (r, ok)) in readings.iter().enumerate() {
        a.push(vec![i.to_string(), num(*r), u8::from(*ok).to_string()]);
    }
    a
}

/// Runs a scenario in memory.
pub fn render_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Rendered, CliError> {
    cfg.validate()?;
    let eff = cfg.with_defaults();
    let ctx = Context::from_config(&eff)?;
    let mut artifacts = match eff.kind {
        Kind::WeakValue => weak_value_run(&eff, &ctx)?,
        Kind::Impulsive => impulsive_run(&eff, &ctx, opts)?,
        Kind::WeakEnsemble => weak_ensemble_run(&eff, &ctx, opts)?,
        Kind::PostSelect => postselect_run(&eff, &ctx)?,
        Kind::Protective => protective_run(&eff, &ctx, opts)?,
        Kind::NonHermitian => nonhermitian_run(&eff, &ctx, opts)?,
        Kind::Protect2sv => protect2sv_run(&eff, &ctx, opts)?,
        Kind::KaonToy => kaon_run(&eff)?,
    };
    let config_json = eff.to_json();
    for a in &mut artifacts {
        let mut meta = vec![
            ("generator".to_string(), format!("weakval {}", env!("CARGO_PKG_VERSION"))),
            ("kind".to_string(), eff.kind.name().to_string()),
            ("procedure".to_string(), eff.kind.procedure().to_string()),
            ("formula".to_string(), eff.kind.formula().to_string()),
            ("config".to_string(), config_json.clone()),
        ];
        if let Some(seed) = eff.seed {
            meta.push(("seed".to_string(), seed.to_string()));
        }
        meta.append(&mut a.meta);
        a.meta = meta;
    }
    Ok(Rendered {
        effective: eff,
        artifacts,
    })
}

/// Runs a scenario and writes its CSV files; returns the paths written.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let rendered = render_scenario(cfg, opts)?;
    let main = rendered.effective.output.clone().expect("defaults fill output");
    rendered.artifacts.iter().map(|a| a.write(&main)).collect()
}

fn weak_value_run(cfg: &ScenarioConfig, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
    let pre = state(ctx, &cfg.pre_state, "pre_state")?;
    let post = state(ctx, &cfg.post_state, "post_state")?;
    let a = observable(ctx, cfg)?;
    let tsv = TwoStateVector::new(pre, post)?;
    let aw = weak_value(&a, &tsv)?;
    let mut art = Artifact::new("", vec!["re", "im"]);
    art.meta("overlap", format!("{} {}", num(tsv.overlap().re), num(tsv.overlap().im)));
    art.push(vec![num(aw.re), num(aw.im)]);
    Ok(vec![art])
}

fn impulsive_run(cfg: &ScenarioConfig, ctx: &Context, opts: &RunOptions) -> Result<Vec<Artifact>, CliError> {
    let pre = state(ctx, &cfg.pre_state, "pre_state")?;
    let post = match &cfg.post_state {
        Some(spec) => Some(ctx.state(spec, "post_state")?),
        None => None,
    };
    let a = observable(ctx, cfg)?;
    let delta = required(cfg.delta, "delta")?;
    let a_max = eig_hermitian(&a)?.max_abs_eigenvalue();
    let grid = grid_for(cfg, delta, a_max)?;
    let js = entangle(&pre, &a, &gaussian_pointer(&grid, delta)?)?;
    let sampler = ReadoutSampler::new(&js)?;
    let n = required(cfg.samples, "samples")?;
    let seed = required(cfg.seed, "seed")?;
    let records = collect_samples(n, seed, opts.schedule, |rng| match &post {
        Some(p) => sampler.draw_post_selected(p, rng),
        None => Ok(sampler.draw(rng)),
    })
    .into_iter()
    .map(|r| r.map(|rec| (rec.reading, rec.success)))
    .collect::<Result<Vec<_>, _>>()?;

    let accepted: Vec<f64> = records.iter().filter(|r| r.1).map(|r| r.0).collect();
    let mut report = summarize(&accepted, required(cfg.bins, "bins")?)?;
    report.seed = Some(seed);
    let mut main = readings_artifact(&records);
    main.meta("accepted", format!("{} of {}", accepted.len(), n));
    if let Some(p) = &post {
        let (_, prob) = post_select(&js, p)?;
        main.meta("post_selection_probability", num(prob));
    }
    let (summary, hist) = ensemble_artifacts(&report);
    Ok(vec![main, summary, hist])
}

fn weak_ensemble_run(cfg: &ScenarioConfig, ctx: &Context, opts: &RunOptions) -> Result<Vec<Artifact>, CliError> {
    let pre = state(ctx, &cfg.pre_state, "pre_state")?;
    let a = observable(ctx, cfg)?;
    let delta = required(cfg.delta, "delta")?;
    let n = required(cfg.samples, "samples")?;
    let seed = required(cfg.seed, "seed")?;
    let readings = weak_ensemble_readings(&pre, &a, delta, n, seed, opts.schedule)?;
    let mut report = summarize(&readings, required(cfg.bins, "bins")?)?;
    report.seed = Some(seed);
    let flagged: Vec<(f64, bool)> = readings.iter().map(|&r| (r, true)).collect();
    let mut main = readings_artifact(&flagged);
    main.meta("expectation", num(expectation(&a, &pre)?));
    let (summary, hist) = ensemble_artifacts(&report);
    Ok(vec![main, summary, hist])
}

fn postselect_run(cfg: &ScenarioConfig, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
    let pre = state(ctx, &cfg.pre_state, "pre_state")?;
    let post = state(ctx, &cfg.post_state, "post_state")?;
    let a = observable(ctx, cfg)?;
    let delta = required(cfg.delta, "delta")?;
    let tsv = TwoStateVector::new(pre.clone(), post.clone())?;
    let report = weak_limit_report(&tsv, &a, delta)?;
    let a_max = eig_hermitian(&a)?.max_abs_eigenvalue();
    let grid = grid_for(cfg, delta, a_max)?;
    let js = entangle(&pre, &a, &gaussian_pointer(&grid, delta)?)?;
    let (w, prob) = post_select(&js, &post)?;

    let mut art = Artifact::new("", vec!["Q", "density", "re_amp", "im_amp"]);
    art.meta("success_probability", num(prob));
    art.meta("weak_value", format!("{} {}", num(report.weak_value.re), num(report.weak_value.im)));
    art.meta("exact_mean", num(report.exact_mean));
    art.meta("grid_mean", num(w.moments().mean_q));
    let residuals: Vec<String> = report
        .residual_moments
        .iter()
        .map(|m| format!("{} {}", num(m.re), num(m.im)))
        .collect();
    art.meta("residual_moments_n2_n4", residuals.join("; "));
    for (q, z) in grid.positions().zip(w.position_amplitudes()) {
        art.push(vec![num(q), num(z.norm_sqr()), num(z.re), num(z.im)]);
    }
    Ok(vec![art])
}

fn scan_artifact() -> Artifact {
    Artifact::new("", vec!["T", "mean_q", "error", "disturbance", "post_select_prob"])
}

fn scan_times(cfg: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    let t = required(cfg.total_time, "T")?;
    let doublings = cfg.doublings.unwrap_or(0);
    Ok((0..=doublings).map(|k| t * f64::from(1u32 << k.min(30))).collect())
}

fn protective_run(cfg: &ScenarioConfig, ctx: &Context, opts: &RunOptions) -> Result<Vec<Artifact>, CliError> {
    let h = hamiltonian(ctx)?;
    let a = observable(ctx, cfg)?;
    let delta = required(cfg.delta, "delta")?;
    let pre = match &cfg.pre_state {
        Some(spec) => ctx.state(spec, "pre_state")?,
        None => ctx.state(&StateSpec::Named(format!("eigen-{}", ctx.dim - 1)), "pre_state")?,
    };
    // rejects degenerate Hamiltonians
    protective_outcomes(&h, &pre, &a)?;
    let spec = eig_hermitian(&h)?;
    let level = spec
        .eigenvectors
        .iter()
        .position(|e| e.fidelity(&pre).is_ok_and(|f| f > 1.0 - 1e-9))
        .ok_or_else(|| CliError::validation("pre_state", "must be an energy eigenstate of the Hamiltonian"))?;
    let target = &spec.eigenvectors[level];
    let shift = a.sandwich(target, target)?.re;

    let aopts = adiabatic_options(cfg, opts);
    let a_max = eig_hermitian(&a)?.max_abs_eigenvalue();
    let w = gaussian_pointer(&aopts.grid(delta, a_max)?, delta)?;
    let mut art = scan_artifact();
    art.meta("level", level.to_string());
    art.meta("expectation", num(shift));
    for t in scan_times(cfg)? {
        let ramp = RampProfile::new(t, aopts.ramp_fraction)?;
        let run = evolve_adiabatic_with(&h, &a, target, &w, ramp, aopts.steps, aopts.schedule)?;
        let mean = run.mean_q();
        let rho = run.state.reduced_density_matrix();
        let v = target.as_vector();
        let kept = (v.adjoint() * rho * v)[(0, 0)].re;
        art.push(vec![num(t), num(mean), num(mean - shift), num(1.0 - kept), num(1.0)]);
    }
    Ok(vec![art])
}

fn protect2sv_run(cfg: &ScenarioConfig, ctx: &Context, opts: &RunOptions) -> Result<Vec<Artifact>, CliError> {
    let a = observable(ctx, cfg)?;
    let n = required(cfg.ancilla_spin, "N")?;
    let lambda = required(cfg.lambda, "lambda")?;
    let delta = required(cfg.delta, "delta")?;
    let aw = weak_value(&a, &TwoStateVector::new(qubit::up_x(), qubit::up_y())?)?;
    let aopts = adiabatic_options(cfg, opts);
    let mut art = scan_artifact();
    art.meta("weak_value", format!("{} {}", num(aw.re), num(aw.im)));
    art.meta("protected", (lambda != 0.0).to_string());
    let setup = if lambda != 0.0 {
        Some(build_spin_protection(n, lambda)?)
    } else {
        None
    };
    for t in scan_times(cfg)? {
        let run = match &setup {
            Some(s) => simulate_protected_2sv(s, &a, delta, t, &aopts)?,
            None => unprotected_control(n, &a, delta, t, &aopts)?,
        };
        art.push(vec![
            num(t),
            num(run.pointer_mean),
            num(run.pointer_mean - aw.re),
            num(run.disturbance),
            num(run.post_select_prob),
        ]);
    }
    Ok(vec![art])
}

fn nonhermitian_run(cfg: &ScenarioConfig, ctx: &Context, opts: &RunOptions) -> Result<Vec<Artifact>, CliError> {
    let h = hamiltonian(ctx)?;
    let a = observable(ctx, cfg)?;
    let pre = state(ctx, &cfg.pre_state, "pre_state")?;
    let delta = required(cfg.delta, "delta")?;
    let t = required(cfg.total_time, "T")?;
    let m = adiabatic_nonhermitian_measure(&h, &a, &pre, delta, t)?;
    let sys = eig_biorthogonal(&h)?;

    let mut main = Artifact::new("", vec!["label", "shift", "weak_re", "weak_im", "probability"]);
    let freqs: Vec<String> = sys.frequencies.iter().map(|w| format!("{} {}", num(w.re), num(w.im))).collect();
    main.meta("frequencies", freqs.join("; "));
    for o in &m.outcomes {
        main.push(vec![
            o.label.to_string(),
            num(o.shift),
            num(o.weak_or_expectation.re),
            num(o.weak_or_expectation.im),
            num(o.probability),
        ]);
    }
    let mut pointer = Artifact::new("_pointer", vec!["Q", "density"]);
    for (q, d) in m.joint.grid().positions().zip(pointer_distribution(&m.joint)) {
        pointer.push(vec![num(q), num(d)]);
    }
    let mut out = vec![main, pointer];

    let n = cfg.samples.unwrap_or(0);
    if n > 0 {
        let seed = required(cfg.seed, "seed")?;
        let weights: Vec<f64> = m.outcomes.iter().map(|o| o.probability).collect();
        let picks = collect_samples(n, seed, opts.schedule, |rng| sample_discrete(&weights, rng.uniform()));
        let mut draws = Artifact::new("_draws", vec!["sample_index", "label", "shift"]);
        for (i, k) in picks.into_iter().enumerate() {
            let o = &m.outcomes[k];
            draws.push(vec![i.to_string(), o.label.to_string(), num(o.shift)]);
        }
        out.push(draws);
    }
    Ok(out)
}

fn kaon_run(cfg: &ScenarioConfig) -> Result<Vec<Artifact>, CliError> {
    let eps = required(cfg.epsilon, "epsilon")?;
    let sys = eig_biorthogonal(&kaon_toy_hamiltonian(eps)?)?;
    let mut art = Artifact::new("", vec!["epsilon", "pair", "fidelity", "predicted"]);
    for i in 0..sys.len() {
        art.push(vec![
            num(eps),
            i.to_string(),
            num(sys.bra_ket_fidelity(i)),
            num(kaon_fidelity_prediction(eps)),
        ]);
    }
    Ok(vec![art])
}
