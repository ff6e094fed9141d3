//! Subcommand implementations.

use std::time::Instant;

use num_complex::Complex;
use spinor_tunnel::analysis::{
    detect_self_trapping, measure_period, period_autocorrelation, period_from_samples, period_scan, ScanSettings,
};
use spinor_tunnel::integrator::integrate;
use spinor_tunnel::model::{find_stationary, StationaryOptions};
use spinor_tunnel::reduced::{analytic_period, classify_regime, integrate_reduced};
use spinor_tunnel::wellmodes::{barrier_scan, lowest_modes, well_parameters, LineCouplings};
use spinor_tunnel::{
    DoubleWellPotential, Error, Grid1D, IntegratorConfig, ReducedParams, ReducedState, Spinor, SpinorPair,
    SystemParams, Trajectory,
};

use crate::cli::*;
use crate::error::{CliError, CliResult};
use crate::output::{
    emit, find_column, portrait_table, read_series, reduced_table, trajectory_table, Cell, Destination, Header, Table,
};
use crate::plot;

/// Allowed deviation of each well's norm from one.
pub const NORM_TOL: f64 = 1e-9;

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Reduced(a) => reduced(&a),
        Command::Period(a) => period(&a),
        Command::Scan(a) => scan(&a),
        Command::Portrait(a) => portrait(&a),
        Command::Modes(a) => modes(&a),
        Command::Stationary(a) => stationary(&a),
        Command::Figure(a) => crate::figures::run_figure(&a),
    }
}

/// Summary lines go to stdout unless stdout carries the data.
pub fn summary(dest: &Destination, line: &str) {
    if dest.is_stdout() {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

pub fn system_params(p: &PhysArgs) -> CliResult<SystemParams> {
    Ok(SystemParams::new(
        p.eps_left.unwrap_or(p.eps),
        p.eps_right.unwrap_or(p.eps),
        p.lambda_s_left.unwrap_or(p.lambda_s),
        p.lambda_s_right.unwrap_or(p.lambda_s),
        p.lambda_a_left.unwrap_or(p.lambda_a),
        p.lambda_a_right.unwrap_or(p.lambda_a),
        p.j,
    )?)
}

/// Twelve comma-separated reals; each well must be normalized within [`NORM_TOL`].
pub fn parse_init(text: &str) -> CliResult<SpinorPair> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--init: cannot parse '{}' as a number", s.trim())))
        })
        .collect::<CliResult<_>>()?;
    if values.len() != 12 {
        return Err(CliError::Usage(format!(
            "--init needs 12 values (re/im of xi+, xi0, xi-, eta+, eta0, eta-), got {}",
            values.len()
        )));
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(CliError::Usage("--init values must be finite".into()));
    }
    let c = |k: usize| Complex::new(values[2 * k], values[2 * k + 1]);
    let state = SpinorPair::new(Spinor::new(c(0), c(1), c(2)), Spinor::new(c(3), c(4), c(5)));
    for (name, well) in [("left (xi)", &state.left), ("right (eta)", &state.right)] {
        let n = well.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(CliError::Usage(format!(
                "--init: {name} spinor has norm {n:.12} (|norm - 1| = {:.3e} exceeds {NORM_TOL:e})",
                (n - 1.0).abs()
            )));
        }
    }
    Ok(state)
}

pub fn integrator_config(a: &IntegArgs) -> CliResult<IntegratorConfig> {
    let d = IntegratorConfig::default();
    let cfg = IntegratorConfig {
        rtol: a.rtol.unwrap_or(d.rtol),
        atol: a.atol.unwrap_or(d.atol),
        dt_init: a.dt_init.unwrap_or(d.dt_init),
        dt_min: a.dt_min.unwrap_or(d.dt_min),
        t_max: a.tmax,
        sample_dt: a.sample_dt,
        max_steps: a.max_steps.unwrap_or(d.max_steps),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

pub fn record_params(h: &mut Header, p: &SystemParams) {
    h.num("eps_left", p.eps_left)
        .num("eps_right", p.eps_right)
        .num("lambda_s_left", p.lambda_s_left)
        .num("lambda_s_right", p.lambda_s_right)
        .num("lambda_a_left", p.lambda_a_left)
        .num("lambda_a_right", p.lambda_a_right)
        .num("j", p.j);
}

pub fn record_config(h: &mut Header, c: &IntegratorConfig) {
    h.num("t_max", c.t_max)
        .num("sample_dt", c.sample_dt)
        .num("rtol", c.rtol)
        .num("atol", c.atol)
        .num("dt_init", c.dt_init)
        .num("dt_min", c.dt_min)
        .push("max_steps", c.max_steps);
}

pub fn record_state(h: &mut Header, key: &str, s: &SpinorPair) {
    let v: Vec<String> = s.to_reals().iter().map(|x| format!("{x:?}")).collect();
    h.push(key, v.join(","));
}

pub fn regime_label(traj: &Trajectory) -> &'static str {
    match detect_self_trapping(traj) {
        Ok(true) => "SelfTrapped",
        Ok(false) => "FullOscillation",
        Err(_) => "Undetermined",
    }
}

pub fn trajectory_summary(command: &str, traj: &Trajectory, dest: &Destination) -> String {
    let period = match measure_period(traj, "m_left") {
        Ok(p) => format!("{:.6}", p.period),
        Err(_) => "n/a".into(),
    };
    format!(
        "{command}: regime={} period={period} max_drift={:.3e} samples={} steps={} out={}",
        regime_label(traj),
        traj.max_ledger_drift(),
        traj.len(),
        traj.stats.accepted,
        dest.label()
    )
}

pub fn maybe_plot(out: &OutArgs, title: &str, table: &Table) {
    let Some(path) = &out.plot else {
        return;
    };
    let Some(x) = table.numeric_column("t") else {
        eprintln!("warning: no time column to plot");
        return;
    };
    let mut series = Vec::new();
    for name in &out.plot_columns {
        match table.numeric_column(name) {
            Some(v) => series.push((name.clone(), v)),
            None => eprintln!("warning: plot column '{name}' not in output; skipped"),
        }
    }
    plot::try_write(path, title, "t", &x, &series);
}

fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let params = system_params(&a.phys)?;
    let state = parse_init(&a.init.init)?;
    let cfg = integrator_config(&a.integ)?;
    let traj = integrate(&state, &params, &cfg)?;
    let mut h = Header::new("simulate");
    record_params(&mut h, &params);
    record_state(&mut h, "init", &state);
    record_config(&mut h, &cfg);
    let table = trajectory_table(&traj);
    let dest = Destination::from_arg(&a.out.out);
    emit(&dest, &h, &table, a.out.format)?;
    maybe_plot(&a.out, "simulate", &table);
    summary(&dest, &trajectory_summary("simulate", &traj, &dest));
    Ok(())
}

fn reduced(a: &ReducedArgs) -> CliResult<()> {
    let p = ReducedParams::new(a.j, a.lambda_a)?;
    let s0 = ReducedState::new(a.m0, a.r0, a.i0);
    if !s0.is_physical() {
        return Err(CliError::Usage(format!(
            "initial (M, R0, I0) = ({}, {}, {}) is unphysical: need |M| <= 1 and R0^2 + I0^2 + M^2/4 <= 1/4",
            a.m0, a.r0, a.i0
        )));
    }
    let cfg = integrator_config(&a.integ)?;
    let traj = integrate_reduced(&s0, &p, &cfg)?;
    let mut h = Header::new("reduced");
    h.num("j", a.j).num("lambda_a", a.lambda_a).num("m0", a.m0).num("r0", a.r0).num("i0", a.i0);
    record_config(&mut h, &cfg);
    let table = reduced_table(&traj);
    let dest = Destination::from_arg(&a.out.out);
    emit(&dest, &h, &table, a.out.format)?;
    maybe_plot(&a.out, "reduced", &table);
    let period = match measure_period(&traj, "m") {
        Ok(e) => format!("{:.6}", e.period),
        Err(_) => "n/a".into(),
    };
    summary(
        &dest,
        &format!(
            "reduced: regime={} period={period} max_drift={:.3e} samples={} out={}",
            classify_regime(&p),
            traj.conserved_drift(),
            traj.times.len(),
            dest.label()
        ),
    );
    Ok(())
}

fn period(a: &PeriodArgs) -> CliResult<()> {
    if a.j.is_none() && a.input.is_none() {
        return Err(CliError::Usage("period needs --j (analytic) and/or --input (measured)".into()));
    }
    if let Some(j) = a.j {
        let p = ReducedParams::new(j, a.lambda_a)?;
        let regime = classify_regime(&p);
        let tau = match analytic_period(&p) {
            Ok(t) => format!("{t}"),
            Err(Error::CriticalPoint) => "diverges".into(),
            Err(e) => return Err(e.into()),
        };
        println!("period: regime={regime} ratio={} tau_analytic={tau}", p.ratio());
    }
    if let Some(path) = &a.input {
        let series = read_series(path)?;
        let values = find_column(&series, &a.column)?;
        let est = match a.method {
            PeriodMethodArg::Extrema => period_from_samples(&series.times, values)?,
            PeriodMethodArg::Autocorrelation => period_autocorrelation(&series.times, values)?,
        };
        println!(
            "period: measured={} uncertainty={:.3e} cycles={} method={:?} column={} input={}",
            est.period,
            est.uncertainty,
            est.n_cycles_used,
            est.method,
            a.column,
            path.display()
        );
    }
    Ok(())
}

pub fn scan_j_values(a: &ScanArgs) -> CliResult<Vec<f64>> {
    if !a.j.is_empty() {
        return Ok(a.j.clone());
    }
    match (a.j_min, a.j_max) {
        (Some(lo), Some(hi)) => {
            if a.j_steps < 2 {
                return Err(CliError::Usage("--j-steps must be at least 2".into()));
            }
            let n = a.j_steps - 1;
            Ok((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
        }
        _ => Err(CliError::Usage("scan needs --j or both --j-min and --j-max".into())),
    }
}

pub fn scan_table(rows: &[spinor_tunnel::analysis::PeriodScanRow<f64>]) -> Table {
    let mut t = Table::new(&[
        "j",
        "ratio",
        "regime",
        "tau_analytic",
        "tau_measured",
        "rel_error",
        "uncertainty",
        "self_trapped",
        "status",
    ]);
    for r in rows {
        t.push(vec![
            r.j.into(),
            r.ratio.into(),
            r.regime.map_or(Cell::Missing, |g| Cell::Text(g.to_string())),
            r.tau_analytic.into(),
            r.tau_measured.into(),
            r.relative_error().into(),
            r.uncertainty.into(),
            r.self_trapped.map_or(Cell::Missing, |b| Cell::Text(b.to_string())),
            r.status.as_str().into(),
        ]);
    }
    t
}

fn scan(a: &ScanArgs) -> CliResult<()> {
    let js = scan_j_values(a)?;
    let d = ScanSettings::<f64>::default();
    let settings = ScanSettings {
        eps: a.eps,
        lambda_s: a.lambda_s,
        periods: a.periods,
        samples_per_period: a.samples_per_period,
        rtol: a.rtol.unwrap_or(d.rtol),
        atol: a.atol.unwrap_or(d.atol),
    };
    if !(settings.periods > 0.0) || settings.samples_per_period < 8 {
        return Err(CliError::Usage("--periods must be positive and --samples-per-period at least 8".into()));
    }
    let start = Instant::now();
    let rows = period_scan(&js, a.lambda_a, &settings);
    let elapsed = start.elapsed().as_secs_f64();
    let mut h = Header::new("scan");
    h.num("lambda_a", a.lambda_a)
        .num("eps", a.eps)
        .num("lambda_s", a.lambda_s)
        .num("periods", a.periods)
        .push("samples_per_period", a.samples_per_period)
        .num("rtol", settings.rtol)
        .num("atol", settings.atol)
        .push("init", POLARIZED_INIT);
    let table = scan_table(&rows);
    let dest = Destination::from_arg(&a.out.out);
    emit(&dest, &h, &table, a.out.format)?;
    let ok = rows.iter().filter(|r| r.status == "ok").count();
    let worst = rows.iter().filter_map(|r| r.relative_error()).fold(0.0f64, f64::max);
    summary(
        &dest,
        &format!(
            "scan: points={} ok={ok} max_rel_error={worst:.3e} elapsed={elapsed:.2}s out={}",
            rows.len(),
            dest.label()
        ),
    );
    Ok(())
}

fn portrait(a: &PortraitArgs) -> CliResult<()> {
    let mut h = Header::new("portrait");
    let (times, theta, m) = if let Some(path) = &a.input {
        h.push("input", path.display());
        let s = read_series(path)?;
        (s.times.clone(), find_column(&s, "theta")?.to_vec(), find_column(&s, "M_left")?.to_vec())
    } else {
        let j = a.j.ok_or_else(|| CliError::Usage("portrait needs --j or --input".into()))?;
        let params = SystemParams::symmetric(a.eps, a.lambda_s, a.lambda_a, j)?;
        let state = parse_init(&a.init.init)?;
        let cfg = integrator_config(&a.integ)?;
        let traj = integrate(&state, &params, &cfg)?;
        record_params(&mut h, &params);
        record_state(&mut h, "init", &state);
        record_config(&mut h, &cfg);
        let theta = traj.observables_left.iter().map(|o| o.theta).collect();
        let m = traj.observables_left.iter().map(|o| o.m).collect();
        (traj.times, theta, m)
    };
    let table = portrait_table(&times, &theta, &m);
    let dest = Destination::from_arg(&a.out.out);
    emit(&dest, &h, &table, a.out.format)?;
    if let Some(path) = &a.out.plot {
        let x = table.numeric_column("theta_unwrapped").unwrap_or_default();
        plot::try_write(path, "phase portrait", "theta", &x, &[("M_left".into(), m.clone())]);
    }
    summary(&dest, &format!("portrait: samples={} out={}", table.rows.len(), dest.label()));
    Ok(())
}

fn modes(a: &ModesArgs) -> CliResult<()> {
    let grid = Grid1D::new(a.x_min, a.x_max, a.points).map_err(|e| CliError::Usage(e.to_string()))?;
    let dest = Destination::from_arg(&a.out.out);
    let mut h = Header::new("modes");
    h.num("x_min", a.x_min).num("x_max", a.x_max).push("points", a.points);
    if !a.v0_scan.is_empty() {
        h.num("a", a.a);
        let mut t = Table::new(&["v0", "j", "status"]);
        for (v0, r) in a.v0_scan.iter().zip(barrier_scan(&a.v0_scan, a.a, &grid)) {
            match r {
                Ok((_, j)) => t.push(vec![(*v0).into(), j.into(), "ok".into()]),
                Err(e) => t.push(vec![(*v0).into(), Cell::Missing, e.to_string().into()]),
            }
        }
        emit(&dest, &h, &t, a.out.format)?;
        summary(&dest, &format!("modes: scanned {} barrier heights out={}", t.rows.len(), dest.label()));
        return Ok(());
    }
    let pot = match &a.potential_file {
        Some(path) => {
            h.push("potential_file", path.display());
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            DoubleWellPotential::parse_table(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => {
            h.num("v0", a.v0).num("a", a.a);
            DoubleWellPotential::quartic(a.v0, a.a).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    let m = lowest_modes(&pot, &grid).map_err(|e| match e {
        Error::InvalidConfig(_) | Error::GridMismatch(_) | Error::Domain(_) => CliError::Usage(e.to_string()),
        other => other.into(),
    })?;
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    let wp = well_parameters(&m, &pot, &grid, &LineCouplings { c_s: a.c_s, c_a: a.c_a })?;
    h.num("c_s", a.c_s)
        .num("c_a", a.c_a)
        .num("e_s", m.e_s)
        .num("e_a", m.e_a)
        .num("e_2", m.e_2)
        .num("gap_ratio", m.gap_ratio)
        .num("j_signed", wp.j_signed)
        .num("overlap", wp.overlap);
    record_params(&mut h, &wp.params);
    let v = pot.sample(&grid)?;
    let mut t = Table::new(&["x", "V", "psi_s", "psi_a", "phi_left", "phi_right", "sqrt_n_left", "sqrt_n_right"]);
    for (i, x) in grid.points().into_iter().enumerate() {
        t.push(
            [x, v[i], m.psi_s[i], m.psi_a[i], m.phi_left[i], m.phi_right[i], m.sqrt_n_left[i], m.sqrt_n_right[i]]
                .map(Cell::Num)
                .to_vec(),
        );
    }
    emit(&dest, &h, &t, a.out.format)?;
    if let Some(path) = &a.out.plot {
        let series = vec![
            ("sqrt_n_left".to_string(), m.sqrt_n_left.clone()),
            ("sqrt_n_right".to_string(), m.sqrt_n_right.clone()),
        ];
        plot::try_write(path, "localized modes", "x", &grid.points(), &series);
    }
    let p = wp.params;
    summary(
        &dest,
        &format!(
            "modes: e_s={} e_a={} J={:e} (signed {:e}, (e_a-e_s)/2={:e}) eps_left={} eps_right={} lambda_s={:e} lambda_a={:e} overlap={:.3e} out={}",
            m.e_s,
            m.e_a,
            p.j,
            wp.j_signed,
            (m.e_a - m.e_s) / 2.0,
            p.eps_left,
            p.eps_right,
            p.lambda_s_left,
            p.lambda_a_left,
            wp.overlap,
            dest.label()
        ),
    );
    Ok(())
}

fn stationary(a: &StationaryArgs) -> CliResult<()> {
    let params = system_params(&a.phys)?;
    let seed = parse_init(&a.init.init)?;
    if !(a.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let opts = StationaryOptions { tol: a.tol, max_iterations: a.max_iterations };
    let st = find_stationary(&seed, &params, opts)?;
    let reals = st.state.to_reals();
    println!("stationary: mu={} residual={:.3e} iterations={}", st.mu, st.residual, st.iterations);
    println!(
        "state: {}",
        reals.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(",")
    );
    if let Some(out) = &a.out {
        let mut h = Header::new("stationary");
        record_params(&mut h, &params);
        record_state(&mut h, "seed", &seed);
        h.num("tol", a.tol);
        let mut cols: Vec<&str> = crate::output::STATE_COLUMNS.to_vec();
        cols.extend(["mu", "residual", "iterations"]);
        let mut t = Table::new(&cols);
        let mut row: Vec<Cell> = reals.iter().map(|x| Cell::Num(*x)).collect();
        row.extend([st.mu.into(), st.residual.into(), (st.iterations as f64).into()]);
        t.push(row);
        emit(&Destination::from_arg(out), &h, &t, a.format)?;
    }
    Ok(())
}
