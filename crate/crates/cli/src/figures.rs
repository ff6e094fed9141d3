//! Figure presets: fixed parameter sets written as data files and SVG plots.

use std::path::{Path, PathBuf};

use spinor_tunnel::analysis::polarized_initial_state;
use spinor_tunnel::integrator::integrate;
use spinor_tunnel::reduced::{analytic_period, classify_regime, integrate_reduced};
use spinor_tunnel::{IntegratorConfig, ReducedParams, ReducedState, Spinor, SpinorPair, SystemParams, Trajectory};

use crate::cli::{FigureArgs, POLARIZED_INIT};
use crate::commands::{record_config, record_params, record_state, regime_label};
use crate::error::{CliError, CliResult};
use crate::output::{emit, portrait_table, reduced_table, trajectory_table, Cell, Destination, Format, Header, Table};
use crate::plot;

const EPS: f64 = 1.0;
const LAMBDA_S: f64 = 1.0;
const LAMBDA_A: f64 = -0.01;
const SAMPLE_DT: f64 = 0.5;

struct Writer<'a> {
    dir: &'a Path,
    format: Format,
    plot: bool,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    /// Writes `stem.{csv,jsonl}` and, with plotting on, `stem.svg` of
    /// `plot_cols` against `x_col`.
    fn write(&mut self, stem: &str, header: &Header, table: &Table, x_col: &str, plot_cols: &[&str]) -> CliResult<()> {
        let path = self.dir.join(format!("{stem}.{}", self.format.extension()));
        emit(&Destination::File(path.clone()), header, table, self.format)?;
        self.written.push(path);
        if self.plot && !plot_cols.is_empty() {
            if let Some(x) = table.numeric_column(x_col) {
                let series: Vec<(String, Vec<f64>)> = plot_cols
                    .iter()
                    .filter_map(|c| table.numeric_column(c).map(|v| (c.to_string(), v)))
                    .collect();
                plot::try_write(&self.dir.join(format!("{stem}.svg")), stem, x_col, &x, &series);
            }
        }
        Ok(())
    }
}

fn caption_header(n: u8, caption: &str) -> Header {
    let mut h = Header::new(&format!("figure {n}"));
    h.push("caption", caption);
    h
}

fn fig4_run(j: f64, t_max: f64) -> CliResult<(SystemParams, IntegratorConfig, Trajectory)> {
    let params = SystemParams::symmetric(EPS, LAMBDA_S, LAMBDA_A, j)?;
    let cfg = IntegratorConfig::with_span(t_max, SAMPLE_DT);
    let traj = integrate(&polarized_initial_state(), &params, &cfg)?;
    Ok((params, cfg, traj))
}

fn tau(j: f64) -> CliResult<f64> {
    Ok(analytic_period(&ReducedParams::new(j, LAMBDA_A)?)?)
}

/// Phase diagram at J=0.02: reduced orbits from several amplitudes plus the
/// full-system run from the polarized state.
fn figure1(w: &mut Writer) -> CliResult<String> {
    let j = 0.02;
    let caption = "The Josephson phase diagram for J=0.02 and lambda_A=-0.01";
    let p = ReducedParams::new(j, LAMBDA_A)?;
    let t_max = 2.0 * tau(j)?;
    let cfg = IntegratorConfig::with_span(t_max, SAMPLE_DT);
    let mut table = Table::new(&["orbit", "m0", "t", "M", "R0", "I0", "theta", "C"]);
    let amplitudes = [1.0, 0.8, 0.6, 0.4, 0.2];
    for (k, m0) in amplitudes.iter().enumerate() {
        let traj = integrate_reduced(&ReducedState::new(*m0, 0.0, 0.0), &p, &cfg)?;
        let rt = reduced_table(&traj);
        for row in rt.rows {
            let mut full = vec![Cell::Num(k as f64), Cell::Num(*m0)];
            full.extend(row);
            table.push(full);
        }
    }
    let mut h = caption_header(1, caption);
    h.num("j", j).num("lambda_a", LAMBDA_A).push("orbit_m0", format!("{amplitudes:?}"));
    h.push("orbit_r0", "0.0").push("orbit_i0", "0.0");
    record_config(&mut h, &cfg);
    w.write("fig1_orbits", &h, &table, "M", &["I0"])?;

    let (params, cfg, traj) = fig4_run(j, t_max)?;
    let mut h = caption_header(1, caption);
    h.num("lambda_a", LAMBDA_A);
    record_params(&mut h, &params);
    h.push("init", POLARIZED_INIT);
    record_config(&mut h, &cfg);
    w.write("fig1_full", &h, &trajectory_table(&traj), "t", &["M_left", "R0", "I0"])?;
    Ok(format!("regime={}", classify_regime(&p)))
}

fn figure2(w: &mut Writer) -> CliResult<String> {
    let j = 0.0051;
    let caption = "The phase portrait for J=0.0051 and lambda_A=-0.01";
    let t_max = 2.0 * tau(j)?;
    let (params, cfg, traj) = fig4_run(j, t_max)?;
    let mut h = caption_header(2, caption);
    h.num("lambda_a", LAMBDA_A);
    record_params(&mut h, &params);
    h.push("init", POLARIZED_INIT);
    record_config(&mut h, &cfg);
    let theta: Vec<f64> = traj.observables_left.iter().map(|o| o.theta).collect();
    let m: Vec<f64> = traj.observables_left.iter().map(|o| o.m).collect();
    w.write("fig2_portrait", &h, &portrait_table(&traj.times, &theta, &m), "theta_unwrapped", &["M_left"])?;
    w.write("fig2_trajectory", &h, &trajectory_table(&traj), "t", &["M_left"])?;
    Ok(format!("regime={}", regime_label(&traj)))
}

fn figure3(w: &mut Writer) -> CliResult<String> {
    let caption = "Dependence of the period to the 2J/|lambda_A|";
    let mut table = Table::new(&["ratio", "j", "regime", "tau_analytic", "tau_times_abs_lambda_a"]);
    for i in 1..=150 {
        let ratio = i as f64 * 0.02;
        let j = ratio * LAMBDA_A.abs() / 2.0;
        let p = ReducedParams::new(j, LAMBDA_A)?;
        let tau = analytic_period(&p).ok();
        table.push(vec![
            ratio.into(),
            j.into(),
            classify_regime(&p).to_string().into(),
            tau.into(),
            tau.map(|t| t * LAMBDA_A.abs()).into(),
        ]);
    }
    let mut h = caption_header(3, caption);
    h.num("lambda_a", LAMBDA_A).push("ratio_grid", "0.02..=3.00 step 0.02");
    w.write("fig3_period", &h, &table, "ratio", &["tau_times_abs_lambda_a"])?;
    Ok(format!("points={}", table.rows.len()))
}

fn figure4(w: &mut Writer) -> CliResult<String> {
    let caption = "Initial state is xi(0)=(1,0,0) and eta(0)=(0,0,1). eps=1.0, lambda_S=1.0, and lambda_A=-0.01. \
                   Left: J=0.001 (solid), J=0.0049 (dashed). Right: J=0.0051 (solid), J=0.01 (dashed)";
    let mut regimes = Vec::new();
    for j in [0.001, 0.0049, 0.0051, 0.01] {
        let t_max = 5.0 * tau(j)?;
        let (params, cfg, traj) = fig4_run(j, t_max)?;
        let mut h = caption_header(4, caption);
        h.push("xi0", "(1,0,0)")
            .push("eta0", "(0,0,1)")
            .num("eps", EPS)
            .num("lambda_s", LAMBDA_S)
            .num("lambda_a", LAMBDA_A);
        record_params(&mut h, &params);
        h.push("init", POLARIZED_INIT);
        record_config(&mut h, &cfg);
        w.write(&format!("fig4_j{j}"), &h, &trajectory_table(&traj), "t", &["M_left"])?;
        regimes.push(format!("J={j}:{}", regime_label(&traj)));
    }
    Ok(regimes.join(" "))
}

/// Caption amplitudes of Fig. 5 (not normalized as printed).
pub const FIG5_XI0: [f64; 3] = [0.9962, 0.0872, 0.0];

pub fn fig5_initial_state() -> SpinorPair {
    let [p, z, m] = FIG5_XI0;
    SpinorPair::spin_flip_symmetric(Spinor::real(p, z, m).normalized())
}

fn figure5(w: &mut Writer) -> CliResult<String> {
    let j = 0.001;
    let caption = "Oscillation of rho_++ - rho_00 for xi(0)=(0.9962,0.0872,0); eps=1.0, lambda_S=1.0, \
                   lambda_A=-0.01 (solid) and lambda_A=0 (dashed), J=0.001";
    let state = fig5_initial_state();
    let t_max = 4.0 * std::f64::consts::PI / j;
    let mut notes = Vec::new();
    for lambda_a in [LAMBDA_A, 0.0] {
        let params = SystemParams::symmetric(EPS, LAMBDA_S, lambda_a, j)?;
        let cfg = IntegratorConfig::with_span(t_max, SAMPLE_DT);
        let traj = integrate(&state, &params, &cfg)?;
        let mut h = caption_header(5, caption);
        h.push("xi0_caption", "(0.9962, 0.0872, 0)")
            .push("xi0_normalization", "caption amplitudes rescaled to unit norm")
            .push("eta0", "spin flip of xi0: (xi-, xi0, xi+)")
            .num("eps", EPS)
            .num("lambda_s", LAMBDA_S)
            .num("lambda_a", lambda_a);
        record_params(&mut h, &params);
        record_state(&mut h, "init", &state);
        record_config(&mut h, &cfg);
        let mut table = Table::new(&["t", "rho_pp_minus_rho_00"]);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (t, o) in traj.times.iter().zip(&traj.observables_left) {
            let v = o.rho_pp_minus_rho_00();
            lo = lo.min(v);
            hi = hi.max(v);
            table.push(vec![(*t).into(), v.into()]);
        }
        let tag = if lambda_a == 0.0 { "0".to_string() } else { format!("{lambda_a}") };
        w.write(&format!("fig5_lambda_a_{tag}"), &h, &table, "t", &["rho_pp_minus_rho_00"])?;
        notes.push(format!("lambda_A={tag}:[{lo:.4},{hi:.4}]"));
    }
    Ok(notes.join(" "))
}

pub fn run_figure(a: &FigureArgs) -> CliResult<()> {
    let dir = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("fig{}", a.number)));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut w = Writer { dir: &dir, format: a.format, plot: a.plot, written: Vec::new() };
    let note = match a.number {
        1 => figure1(&mut w)?,
        2 => figure2(&mut w)?,
        3 => figure3(&mut w)?,
        4 => figure4(&mut w)?,
        5 => figure5(&mut w)?,
        n => return Err(CliError::Usage(format!("no figure {n}"))),
    };
    let files: Vec<String> = w.written.iter().map(|p| p.display().to_string()).collect();
    println!("figure {}: {note} files={}", a.number, files.join(","));
    Ok(())
}
