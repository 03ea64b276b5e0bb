use evanescent_core::analysis::{
    fit_speed, invariance_check, qm_dwell_time, sweep, synthetic_population, FitOptions, MonteCarloOptions,
};
use evanescent_core::analytic::{
    characteristic_speed, relative_population_asymptotic, Regime, StepSolution, WaveguideSolution,
};
use evanescent_core::bbm::{bbm_dwell_analytic, entry_probability};
use evanescent_core::guidance::{
    integrate_trajectory, PlaneWave, StandardGuidance, StationaryState, StepControl, TrajectoryRecord,
};
use evanescent_core::{Complex64, PhysicalParams};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig, Runtime, System};
use crate::error::Result;
use crate::output::{read_population_csv, Cell, Report, Table};
use crate::parallel::run_ensemble_parallel;

/// Runs the configured command and returns its results without writing.
pub fn execute(config: &RunConfig, runtime: &Runtime) -> Result<Report> {
    match config.command {
        Command::SolveWaveguide => solve_waveguide(config),
        Command::SolveStep => solve_step(config),
        Command::Population => population(config),
        Command::FitSpeed => fit(config),
        Command::Trajectory => trajectory(config),
        Command::BbmRun => bbm_run(config, runtime),
        Command::Dwell => dwell(config),
        Command::Invariance => invariance(config),
        Command::Sweep => run_sweep(config, runtime),
    }
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Length over which the waveguide population changes appreciably, `v/J`.
fn coupling_length(p: &PhysicalParams) -> f64 {
    let scale = characteristic_speed(p) / p.j();
    if scale.is_finite() && scale > 0.0 {
        scale
    } else {
        1.0
    }
}

fn solve_waveguide(c: &RunConfig) -> Result<Report> {
    let sol = WaveguideSolution::new(&c.params)?;
    let x_max = c.x_max.unwrap_or(3.0 * coupling_length(&c.params));
    let mut table = Table::new(
        "fields",
        &[
            "x", "psi_m_re", "psi_m_im", "psi_a_re", "psi_a_im", "density", "current", "p_a",
        ],
    );
    for x in linspace(0.0, x_max, c.points) {
        let (m, a) = sol.fields(x);
        table.push_floats(&[
            x,
            m.re,
            m.im,
            a.re,
            a.im,
            StationaryState::density(&sol, x),
            StationaryState::current(&sol, x),
            sol.relative_population(x)?,
        ]);
    }
    let results = json!({
        "delta": c.params.delta(),
        "regime": Regime::of(c.params.delta()),
        "k0": sol.k0(),
        "k1": complex(sol.k1()),
        "k2": complex(sol.k2()),
        "amplitude": complex(sol.amplitude()),
        "characteristic_speed": characteristic_speed(&c.params),
    });
    Ok(Report {
        results,
        tables: vec![table],
    })
}

fn step_results(sol: &StepSolution) -> Value {
    json!({
        "k": sol.k(),
        "kappa": sol.kappa(),
        "r": complex(sol.r()),
        "t": complex(sol.t()),
        "transmission_weight": sol.transmission_weight(),
        "incident_flux": sol.incident_flux(),
        "right_speed": sol.right_speed(),
        "entry_probability": entry_probability(sol),
    })
}

fn solve_step(c: &RunConfig) -> Result<Report> {
    let sol = StepSolution::new(&c.params)?;
    let x_max = c.x_max.unwrap_or(5.0 / sol.kappa());
    let mut table = Table::new("density", &["x", "psi_re", "psi_im", "density", "current"]);
    for x in linspace(-x_max, x_max, c.points) {
        let psi = sol.psi(x);
        table.push_floats(&[x, psi.re, psi.im, sol.density(x), StationaryState::current(&sol, x)]);
    }
    Ok(Report {
        results: step_results(&sol),
        tables: vec![table],
    })
}

fn population(c: &RunConfig) -> Result<Report> {
    let sol = WaveguideSolution::new(&c.params)?;
    let v = characteristic_speed(&c.params);
    let regime = Regime::of(c.params.delta());
    let x_max = c.x_max.unwrap_or(3.0 * coupling_length(&c.params));
    let mut table = Table::new("population", &["x", "p_a_exact", "p_a_asymptotic"]);
    for x in linspace(0.0, x_max, c.points) {
        let asym = relative_population_asymptotic(c.params.j(), v, x, regime);
        table.push_floats(&[x, sol.relative_population(x)?, asym]);
    }
    let results = json!({
        "delta": c.params.delta(),
        "regime": regime,
        "characteristic_speed": v,
        "coupling_length": c.params.j().recip() * v,
    });
    Ok(Report {
        results,
        tables: vec![table],
    })
}

fn fit(c: &RunConfig) -> Result<Report> {
    let (samples, source) = match &c.input {
        Some(path) => (read_population_csv(path)?, "file"),
        None => {
            let sol = WaveguideSolution::new(&c.params)?;
            let x_max = c.x_max.unwrap_or(0.3 * coupling_length(&c.params));
            let xs = linspace(0.0, x_max, c.points);
            let exact = synthetic_population(
                &xs,
                |x| sol.relative_population(x).unwrap_or(f64::NAN),
                c.counts,
                c.seed,
            );
            (exact, if c.counts.is_some() { "binomial" } else { "exact" })
        }
    };
    let options = FitOptions {
        small_x_bound: c.small_x_bound,
        ..FitOptions::default()
    };
    let result = fit_speed(&samples, c.params.j(), &options)?;
    let v_true = characteristic_speed(&c.params);
    let mut table = Table::new("samples", &["x", "p_a"]);
    for &(x, p) in &samples {
        table.push_floats(&[x, p]);
    }
    let results = json!({
        "source": source,
        "v_hat": result.v_hat,
        "j_over_v": result.j_over_v,
        "rms_residual": result.rms_residual,
        "n_points": result.n_points,
        "x_max_over_scale": result.x_max_over_scale,
        "characteristic_speed": v_true,
        "relative_error": (result.v_hat - v_true) / v_true,
    });
    Ok(Report {
        results,
        tables: vec![table],
    })
}

fn integrate_state<S: StationaryState>(state: &S, c: &RunConfig) -> Result<TrajectoryRecord> {
    Ok(integrate_trajectory(
        &StandardGuidance::new(state),
        c.x0,
        c.t_end,
        &StepControl::default(),
    )?)
}

fn trajectory(c: &RunConfig) -> Result<Report> {
    let record = match c.system {
        System::Step => integrate_state(&StepSolution::new(&c.params)?, c)?,
        System::Waveguide => integrate_state(&WaveguideSolution::new(&c.params)?, c)?,
        System::PlaneWave => integrate_state(&PlaneWave::new(&c.params, 1.0), c)?,
    };
    let mut table = Table::new("trajectory", &["t", "x"]);
    for &(t, x) in &record.samples {
        table.push_floats(&[t, x]);
    }
    let (t_final, x_final) = record.last();
    let results = json!({
        "system": c.system,
        "termination": record.terminated,
        "t_final": t_final,
        "x_final": x_final,
        "n_samples": record.samples.len(),
    });
    Ok(Report {
        results,
        tables: vec![table],
    })
}

fn bbm_run(c: &RunConfig, rt: &Runtime) -> Result<Report> {
    let cfg = c.bbm_config()?;
    let sol = cfg.validate()?;
    let record_first = if c.dump_trajectories {
        c.n_particles.min(c.trajectory_cap)
    } else {
        0
    };
    let run = run_ensemble_parallel(&cfg, rt.workers, record_first)?;
    let est = &run.estimates;

    let mut hist = Table::new(
        "density_histogram",
        &[
            "x_lo",
            "x_hi",
            "rho_plus",
            "rho_plus_stderr",
            "rho_minus",
            "rho_minus_stderr",
            "rho_sum",
            "rho_qm",
        ],
    );
    let (plus, minus) = (&est.density_hist_plus, &est.density_hist_minus);
    for b in 0..plus.bins() {
        let (lo, hi) = plus.edges(b);
        // Bin average of |t|² e^{−2κx}.
        let two_k = 2.0 * sol.kappa();
        let qm = sol.transmission_weight() * ((-two_k * lo).exp() - (-two_k * hi).exp()) / (two_k * (hi - lo));
        let sum = plus.density[b] + minus.density[b];
        hist.push_floats(&[
            lo,
            hi,
            plus.density[b],
            plus.stderr[b],
            minus.density[b],
            minus.stderr[b],
            sum,
            qm,
        ]);
    }
    let mut tables = vec![hist];
    if c.dump_trajectories {
        let mut traj = Table::new("trajectories", &["particle", "t", "x"]);
        for (i, rec) in &run.trajectories {
            for &(t, x) in &rec.samples {
                traj.push(vec![Cell::Int(*i), Cell::Float(t), Cell::Float(x)]);
            }
        }
        tables.push(traj);
    }

    let dwell = qm_dwell_time(&sol);
    let finite = |v: f64| v.is_finite().then_some(v);
    let results = json!({
        "n_particles": est.n_particles,
        "dwell_mean": est.dwell_mean,
        "dwell_stderr": est.dwell_stderr,
        "entered_fraction": est.entered_fraction,
        "entered_count": est.entered_count,
        "mean_turning_point": finite(est.mean_turning_point),
        "turning_point_stderr": finite(est.turning_point_stderr),
        "a_analytic": entry_probability(&sol),
        "mean_turning_point_analytic": 0.5 / sol.kappa(),
        "tau_qm": dwell.closed_form,
        "tau_bbm": bbm_dwell_analytic(&sol),
        "left_extent": cfg.left_extent,
        "bin_range": cfg.bin_range,
    });
    Ok(Report { results, tables })
}

fn dwell(c: &RunConfig) -> Result<Report> {
    let sol = StepSolution::new(&c.params)?;
    let qm = qm_dwell_time(&sol);
    let bbm = bbm_dwell_analytic(&sol);
    let mut results = step_results(&sol);
    let extra = json!({
        "tau_qm": qm.closed_form,
        "tau_qm_quadrature": qm.quadrature,
        "tau_bbm": bbm,
        "relative_difference": (qm.closed_form - bbm).abs() / qm.closed_form,
    });
    results
        .as_object_mut()
        .unwrap()
        .extend(extra.as_object().unwrap().clone());
    Ok(Report {
        results,
        tables: Vec::new(),
    })
}

fn invariance(c: &RunConfig) -> Result<Report> {
    let x_max = c.x_max.unwrap_or(3.0 * coupling_length(&c.params));
    let xs: Vec<f64> = linspace(0.0, x_max, c.points + 1).into_iter().skip(1).collect();
    let report = invariance_check(&c.params, c.alpha, c.mode.into(), &xs)?;
    let dilated = evanescent_core::analytic::dilation_transform(&c.params, c.alpha, c.mode.into())?;
    let (v, v_d) = (characteristic_speed(&c.params), characteristic_speed(&dilated));
    let regime = Regime::of(c.params.delta());
    let scale = match c.mode {
        crate::config::Mode::Space => c.alpha,
        crate::config::Mode::Time => 1.0,
    };
    let mut table = Table::new("samples", &["x", "p_a", "x_dilated", "p_a_dilated"]);
    for &x in &xs {
        let xd = scale * x;
        table.push_floats(&[
            x,
            relative_population_asymptotic(c.params.j(), v, x, regime),
            xd,
            relative_population_asymptotic(dilated.j(), v_d, xd, regime),
        ]);
    }
    let results = json!({
        "report": report,
        "dilated_params": dilated,
    });
    Ok(Report {
        results,
        tables: vec![table],
    })
}

fn run_sweep(c: &RunConfig, rt: &Runtime) -> Result<Report> {
    let mc = c.monte_carlo.then_some(MonteCarloOptions {
        n_particles: c.n_particles,
        seed: c.seed,
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(rt.workers.unwrap_or(0))
        .build()
        .map_err(|e| crate::error::CliError::Usage(format!("--workers: {e}")))?;
    let rows = pool.install(|| sweep(&c.grid, mc.as_ref()));

    let mut columns = vec!["v0", "e_over_v0", "tau_qm", "tau_bbm", "a", "v_r"];
    if c.monte_carlo {
        columns.extend(["dwell_mean", "dwell_stderr", "entered_fraction"]);
    }
    columns.push("error");
    let mut table = Table::new("grid", &columns);
    let mut max_identity: f64 = 0.0;
    let mut failed = 0usize;
    for row in &rows {
        let mut cells: Vec<Cell> = [row.v0, row.e_over_v0, row.tau_qm, row.tau_bbm, row.a, row.v_r]
            .map(Cell::Float)
            .to_vec();
        if c.monte_carlo {
            let (m, s, f) = row.monte_carlo.as_ref().map_or((f64::NAN, f64::NAN, f64::NAN), |e| {
                (e.dwell_mean, e.dwell_stderr, e.entered_fraction)
            });
            cells.extend([Cell::Float(m), Cell::Float(s), Cell::Float(f)]);
        }
        cells.push(Cell::Text(
            row.error.as_ref().map_or_else(String::new, |e| e.to_string()),
        ));
        table.push(cells);
        if row.error.is_none() {
            max_identity = max_identity.max((row.tau_qm - row.tau_bbm).abs() / row.tau_qm);
        } else {
            failed += 1;
        }
    }
    let results = json!({
        "rows": rows.len(),
        "failed_rows": failed,
        "max_relative_identity_gap": max_identity,
    });
    Ok(Report {
        results,
        tables: vec![table],
    })
}
